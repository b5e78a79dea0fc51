use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{
    normal_angle_of, regular_polygon, AngleRecord, ClosedPolyline, Frame, FrameStep, OrientedSegment, Point,
};
use crate::snowflake::Coding;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeInfo {
    pub normal: AngleRecord,
    /// Outer normal is exactly `(1,0)` and the edge exactly vertical.
    pub frozen: bool,
    /// Registry entry of the frozen segment `T` this chord lies on.
    pub parent: Option<u32>,
    /// Generation of the equal-chord run that produced the edge. Edges kept
    /// verbatim by a windowed step keep their level.
    pub level: u32,
    /// Produced by an incompletely expanded tree node.
    pub partial: bool,
    /// Equal-chord run the edge belongs to; `None` for partial pieces.
    pub run: Option<u32>,
}

impl EdgeInfo {
    pub fn plain(normal: AngleRecord, level: u32, run: u32) -> Self {
        EdgeInfo {
            normal,
            frozen: false,
            parent: None,
            level,
            partial: false,
            run: Some(run),
        }
    }
}

/// A maximal family of equal chords produced by one re-inscription.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChordRun {
    pub level: u32,
    pub chord_length: f64,
}

/// A boundary curve `∂Ωₙ` in local coordinates of `frame`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationCurve {
    pub generation: u32,
    pub frame: Frame,
    pub polyline: ClosedPolyline,
    pub edges: Vec<EdgeInfo>,
    /// `ℓₙ` of the level-`n` chords, in local units. For windowed curves
    /// this is the length of the largest level-`n` run.
    pub chord_length: f64,
    pub runs: Vec<ChordRun>,
}

impl GenerationCurve {
    pub fn new(
        generation: u32,
        frame: Frame,
        vertices: Vec<Point>,
        edges: Vec<EdgeInfo>,
        chord_length: f64,
        runs: Vec<ChordRun>,
    ) -> Result<Self> {
        if vertices.len() != edges.len() {
            return Err(Error::ConstructionBug(format!(
                "{} vertices but {} edge records",
                vertices.len(),
                edges.len()
            )));
        }
        if let Some(e) = edges.iter().find(|e| e.run.is_some_and(|r| r as usize >= runs.len())) {
            return Err(Error::ConstructionBug(format!("edge refers to missing run {:?}", e.run)));
        }
        Ok(GenerationCurve {
            generation,
            frame,
            polyline: ClosedPolyline::new(vertices)?,
            edges,
            chord_length,
            runs,
        })
    }

    /// Curve from bare vertices with normals computed from directions.
    pub fn from_vertices(generation: u32, vertices: Vec<Point>, chord_length: f64) -> Result<Self> {
        let n = vertices.len();
        let edges = (0..n)
            .map(|i| {
                let d = vertices[(i + 1) % n] - vertices[i];
                normal_angle_of(d).map(|a| EdgeInfo::plain(a, generation, 0))
            })
            .collect::<Result<Vec<_>>>()?;
        let runs = vec![ChordRun { level: generation, chord_length }];
        GenerationCurve::new(generation, Frame::identity(), vertices, edges, chord_length, runs)
    }

    /// `Ω₀`: the regular 100-gon with unit side, edge 0 horizontal on `y = 0`
    /// with outer normal `(0,1)`.
    pub fn initial_polygon(sides: usize) -> Self {
        let (v, normals) = regular_polygon(sides);
        let edges = normals.into_iter().map(|a| EdgeInfo::plain(a, 0, 0)).collect();
        let runs = vec![ChordRun { level: 0, chord_length: 1.0 }];
        GenerationCurve::new(0, Frame::identity(), v, edges, 1.0, runs).expect("regular polygon")
    }

    pub fn len(&self) -> usize {
        self.polyline.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polyline.is_empty()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.polyline.vertices
    }

    #[inline]
    pub fn edge(&self, i: usize) -> (Point, Point) {
        self.polyline.edge(i)
    }

    pub fn segment(&self, i: usize) -> OrientedSegment {
        let (a, b) = self.edge(i);
        OrientedSegment::new(a, b, self.edges[i].normal)
    }

    pub fn frozen_edges(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.edges[i].frozen).collect()
    }

    /// Indices of edges produced at this curve's own generation.
    pub fn finest_edges(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.edges[i].level == self.generation).collect()
    }

    /// Angle bound for consecutive chords of generation `g`: `2^(−g−4)·π`.
    pub fn angle_bound(generation: u32) -> f64 {
        PI * (-(generation as f64) - 4.0).exp2()
    }

    /// Same curve expressed in a child frame.
    pub fn reframed(&self, step: FrameStep) -> Self {
        let vertices = self.polyline.vertices.iter().map(|p| step.apply(*p)).collect();
        GenerationCurve {
            generation: self.generation,
            frame: self.frame.then(step),
            polyline: ClosedPolyline { vertices },
            edges: self.edges.clone(),
            chord_length: self.chord_length / step.scale(),
            runs: self
                .runs
                .iter()
                .map(|r| ChordRun {
                    chord_length: r.chord_length / step.scale(),
                    ..*r
                })
                .collect(),
        }
    }

    /// Largest `| |zᵢ − zᵢ₊₁| − ℓ | / ℓ` over edges belonging to a run.
    pub fn equal_chord_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, e) in self.edges.iter().enumerate() {
            if let Some(r) = e.run {
                let l = self.runs[r as usize].chord_length;
                let (a, b) = self.edge(i);
                worst = worst.max((a.dist(b) - l).abs() / l);
            }
        }
        worst
    }

    /// Largest turn between consecutive edges of the same run at `level`.
    pub fn max_run_turn(&self, level: u32) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let (e, f) = (&self.edges[i], &self.edges[(i + 1) % n]);
            if e.run.is_some() && e.run == f.run && self.runs[e.run.unwrap() as usize].level == level {
                worst = worst.max(self.turn_at(i).abs());
            }
        }
        worst
    }

    /// Turning angle at vertex `i + 1` between edges `i` and `i + 1`.
    pub fn turn_at(&self, i: usize) -> f64 {
        let n = self.len();
        let (a, b) = self.edge(i);
        let (_, c) = self.edge((i + 1) % n);
        let u = b - a;
        let v = c - b;
        u.cross(v).atan2(u.dot(v))
    }

    pub fn nearest_vertex(&self, p: Point) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, v) in self.polyline.vertices.iter().enumerate() {
            let d = v.dist(p);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }
}

/// One frozen vertical segment `T ∈ 𝒱_{n+1}`; `F` collects the middle halves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegistryEntry {
    pub generation: u32,
    pub a: Point,
    pub b: Point,
    pub coding: Coding,
    /// Edge index in the generation it was refined from.
    pub source_edge: u32,
}

impl RegistryEntry {
    pub fn half(&self) -> (Point, Point) {
        (self.a.lerp(self.b, 0.25), self.a.lerp(self.b, 0.75))
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FrozenRegistry {
    pub entries: Vec<RegistryEntry>,
}

impl FrozenRegistry {
    pub fn new() -> Self {
        FrozenRegistry::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn of_generation(&self, g: u32) -> impl Iterator<Item = &RegistryEntry> {
        self.entries.iter().filter(move |e| e.generation == g)
    }

    pub fn reframed(&self, step: FrameStep) -> Self {
        FrozenRegistry {
            entries: self
                .entries
                .iter()
                .map(|e| RegistryEntry {
                    a: step.apply(e.a),
                    b: step.apply(e.b),
                    ..*e
                })
                .collect(),
        }
    }
}
