//! One refinement step, global or windowed.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{normal_angle_of, AngleRecord, Ball, Frame, FrameStep, Point};
use crate::refine::assemble::{assemble_g, assemble_windowed, Assembly, GPiece};
use crate::refine::chords::{inscribe, target_chord_length, CurvePos, Inscription, DEFAULT_CHORD_BUDGET};
use crate::refine::curve::{ChordRun, EdgeInfo, FrozenRegistry, GenerationCurve, RegistryEntry};
use crate::refine::smooth::{smooth_tagged, SegmentTag, SmoothCurve, SmoothPiece};
use crate::snowflake::DEFAULT_LEAF_BUDGET;

#[derive(Clone, Copy, Debug)]
pub struct AdvanceParams {
    pub m: u32,
    /// Tree depth; `None` means `M²`.
    pub depth: Option<u32>,
    pub leaf_budget: u64,
    pub chord_budget: u64,
    pub exec: Exec,
}

impl AdvanceParams {
    pub fn new(m: u32) -> Self {
        AdvanceParams {
            m,
            depth: None,
            leaf_budget: DEFAULT_LEAF_BUDGET,
            chord_budget: DEFAULT_CHORD_BUDGET,
            exec: Exec::default(),
        }
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AdvanceStats {
    pub generation: u32,
    pub m: u32,
    pub depth: u32,
    /// Pieces of `G_{n+1}`, full-depth or not.
    pub segments: u64,
    pub full_leaves: u64,
    pub refined_edges: usize,
    pub a: f64,
    pub chords: usize,
    pub chord_length: f64,
    pub runs: usize,
    pub leaf_length: f64,
    pub vertical_length: f64,
    pub wrap_length: f64,
    pub smooth_length: f64,
    pub max_turn: f64,
    pub tangent_residual: f64,
    /// Largest closure defect relative to `ℓ`, before redistribution.
    pub closure_defect: f64,
    pub iterations: u32,
    pub new_frozen: usize,
}

impl AdvanceStats {
    pub fn vertical_ratio(&self) -> f64 {
        if self.leaf_length > 0.0 {
            self.vertical_length / self.leaf_length
        } else {
            0.0
        }
    }
}

#[derive(Clone, Debug)]
pub struct Advance {
    pub curve: GenerationCurve,
    pub registry: FrozenRegistry,
    pub stats: AdvanceStats,
    /// Index in `curve` of the tracked horizontal chord.
    pub lineage: Option<usize>,
}

/// One equal-chord run: a maximal sequence of full-depth pieces.
struct Run {
    /// Indices into the assembly pieces, in order.
    pieces: Vec<usize>,
    sc: SmoothCurve,
    ins: Option<Inscription>,
}

enum Block {
    Single(usize),
    Run(usize),
}

fn tag_of(p: &GPiece, registry_index: Option<u32>) -> SegmentTag {
    if p.frozen.is_some() {
        SegmentTag {
            normal: AngleRecord::east(),
            frozen: true,
            registry: registry_index,
        }
    } else {
        SegmentTag {
            normal: p.segment.normal.flattened(),
            frozen: false,
            registry: None,
        }
    }
}

/// Whether a smooth piece is part of a straight frozen chain.
fn frozen_straight(sc: &SmoothCurve, k: usize) -> bool {
    let t = sc.tags.len();
    match sc.pieces[k] {
        SmoothPiece::Line { src, .. } => sc.tags[src as usize].frozen,
        SmoothPiece::Connector { src, .. } => {
            let s = src as usize;
            sc.tags[s].frozen && sc.tags[(s + 1) % t].frozen
        }
        SmoothPiece::Arc { .. } => false,
    }
}

/// Pieces touched by a chord from `from` to `to`, walking forward.
fn span(sc: &SmoothCurve, from: CurvePos, to: CurvePos) -> Vec<usize> {
    let n = sc.pieces.len();
    let mut out = vec![from.piece as usize];
    let mut p = from.piece as usize;
    while p != to.piece as usize {
        p = (p + 1) % n;
        out.push(p);
        if out.len() > n {
            break;
        }
    }
    out
}

/// Edge records for the chords of an inscription.
fn chord_edges(sc: &SmoothCurve, ins: &Inscription, end: CurvePos, end_point: Point, level: u32, run: u32) -> Result<Vec<EdgeInfo>> {
    let k = ins.positions.len();
    (0..k)
        .map(|i| {
            let from = ins.positions[i];
            let (to, q) = if i + 1 < k {
                (ins.positions[i + 1], ins.vertices[i + 1])
            } else {
                (end, end_point)
            };
            let pieces = span(sc, from, to);
            let frozen = pieces.iter().all(|&p| frozen_straight(sc, p));
            let mut info = EdgeInfo::plain(AngleRecord::east(), level, run);
            if frozen {
                info.frozen = true;
                info.parent = pieces.iter().find_map(|&p| match sc.pieces[p] {
                    SmoothPiece::Line { src, .. } => sc.tags[src as usize].registry,
                    _ => None,
                });
                if info.parent.is_none() {
                    // a chord inside a connector between two frozen segments
                    if let SmoothPiece::Connector { src, .. } = sc.pieces[pieces[0]] {
                        info.parent = sc.tags[src as usize].registry;
                    }
                }
            } else if pieces.len() == 1 && sc.pieces[pieces[0]].is_line() {
                info.normal = sc.tags[sc.pieces[pieces[0]].src() as usize].normal;
            } else {
                info.normal = normal_angle_of(q - ins.vertices[i])?;
            }
            Ok(info)
        })
        .collect()
}

fn end_of(sc: &SmoothCurve) -> CurvePos {
    let last = sc.pieces.len() - 1;
    CurvePos {
        piece: last as u32,
        s: sc.pieces[last].length(),
    }
}

/// Smooths and re-inscribes a closed curve given as consecutive segments.
pub fn rechordalize(sc: &SmoothCurve, generation: u32, a: f64, anchor: Point, budget: u64) -> Result<GenerationCurve> {
    if !sc.closed {
        return Err(Error::InvalidInput("rechordalize needs a closed curve".into()));
    }
    let bound = GenerationCurve::angle_bound(generation);
    let target = target_chord_length(sc, bound, a);
    let ins = inscribe(sc, target, bound, Some(anchor), budget)?;
    let edges = chord_edges(sc, &ins, ins.positions[0], ins.vertices[0], generation, 0)?;
    let runs = vec![ChordRun {
        level: generation,
        chord_length: ins.chord_length,
    }];
    GenerationCurve::new(generation, Frame::identity(), ins.vertices.clone(), edges, ins.chord_length, runs)
}

/// Global step `Ωₙ → Ω_{n+1}`.
pub fn advance(prev: &GenerationCurve, registry: &FrozenRegistry, params: &AdvanceParams) -> Result<Advance> {
    advance_tracked(prev, registry, None, params, None)
}

/// Lower bound on the chord count of a global step, from `H¹(G) ≥ H¹(∂Ωₙ)`
/// and `a ≤ min |L|·(2(1+cos α))^(−depth)`.
pub fn global_chord_lower_bound(prev: &GenerationCurve, m: u32, depth: Option<u32>) -> f64 {
    let depth = depth.unwrap_or(m * m) as i32;
    let mut a_max = f64::INFINITY;
    for i in 0..prev.len() {
        let alpha = prev.edges[i].normal.radians().abs() / m as f64;
        let alpha = if prev.edges[i].normal.is_east() { 0.0 } else { alpha };
        let l = prev.segment(i).length();
        a_max = a_max.min(l * crate::snowflake::child_factor(alpha.min(crate::snowflake::MAX_ALPHA)).powi(depth));
    }
    prev.polyline.perimeter() * 200.0 / a_max
}

/// Step refining only near `windows`; the rest of `prev` is kept.
pub fn advance_windowed(
    prev: &GenerationCurve,
    registry: &FrozenRegistry,
    windows: &[Ball],
    params: &AdvanceParams,
) -> Result<Advance> {
    advance_tracked(prev, registry, Some(windows), params, None)
}

/// Global (`windows = None`) or windowed step that also follows the tracked
/// horizontal chord `track` of `prev` to its all-ones descendant.
pub fn advance_tracked(
    prev: &GenerationCurve,
    registry: &FrozenRegistry,
    windows: Option<&[Ball]>,
    params: &AdvanceParams,
    track: Option<usize>,
) -> Result<Advance> {
    let asm = match windows {
        None => {
            let need = global_chord_lower_bound(prev, params.m, params.depth);
            if need > params.chord_budget as f64 {
                return Err(Error::ResourceLimit {
                    what: "chord count",
                    needed: need as u128,
                    budget: params.chord_budget as u128,
                    hint: "refine locally with advance_windowed",
                });
            }
            assemble_g(prev, params.m, params.depth, params.leaf_budget, params.exec)?
        }
        Some(w) => assemble_windowed(prev, params.m, w, params.depth, params.leaf_budget, params.exec)?,
    };
    build_next(prev, registry, asm, params, track)
}

fn build_next(
    prev: &GenerationCurve,
    registry: &FrozenRegistry,
    asm: Assembly,
    params: &AdvanceParams,
    track: Option<usize>,
) -> Result<Advance> {
    let g = prev.generation + 1;
    let bound = GenerationCurve::angle_bound(g);
    let pieces = &asm.pieces;
    let np = pieces.len();

    let mut registry = registry.clone();
    let mut reg_index = vec![None; np];
    for (i, p) in pieces.iter().enumerate() {
        if p.full_depth && p.frozen.is_some() {
            reg_index[i] = Some(registry.entries.len() as u32);
            registry.entries.push(RegistryEntry {
                generation: g,
                a: p.segment.a,
                b: p.segment.b,
                coding: p.coding,
                source_edge: p.source_edge,
            });
        }
    }
    let new_frozen = reg_index.iter().flatten().count();

    // blocks in curve order, starting at a non-run piece when there is one
    let all_full = pieces.iter().all(|p| p.full_depth);
    let start = if all_full {
        0
    } else {
        (0..np).find(|&i| !pieces[i].full_depth).expect("some non-full piece")
    };
    let mut blocks = Vec::new();
    let mut runs: Vec<Run> = Vec::new();
    let mut k = 0;
    while k < np {
        let i = (start + k) % np;
        if pieces[i].full_depth {
            let mut idx = Vec::new();
            while k < np && pieces[(start + k) % np].full_depth {
                idx.push((start + k) % np);
                k += 1;
            }
            let segs: Vec<(Point, Point)> = idx.iter().map(|&j| (pieces[j].segment.a, pieces[j].segment.b)).collect();
            let tags = idx.iter().map(|&j| tag_of(&pieces[j], reg_index[j])).collect();
            let sc = smooth_tagged(&segs, tags, asm.a, all_full)?;
            blocks.push(Block::Run(runs.len()));
            runs.push(Run { pieces: idx, sc, ins: None });
        } else {
            blocks.push(Block::Single(i));
            k += 1;
        }
    }

    let target = runs
        .iter()
        .map(|r| target_chord_length(&r.sc, bound, asm.a))
        .fold(f64::INFINITY, f64::min);
    let estimate: f64 = runs.iter().map(|r| (r.sc.length() / target).ceil()).sum();
    if estimate > params.chord_budget as f64 {
        return Err(Error::ResourceLimit {
            what: "chord count",
            needed: estimate as u128,
            budget: params.chord_budget as u128,
            hint: "refine locally with advance_windowed",
        });
    }
    let anchor = if all_full { Some(prev.vertices()[0]) } else { None };
    for r in runs.iter_mut() {
        r.ins = Some(inscribe(&r.sc, target, bound, anchor, params.chord_budget)?);
    }

    // old runs that survive keep their ids after compaction
    let mut used_old = vec![false; prev.runs.len()];
    for b in &blocks {
        if let Block::Single(i) = b {
            if let Some(EdgeInfo { run: Some(r), .. }) = pieces[*i].kept {
                used_old[r as usize] = true;
            }
        }
    }
    let mut remap = vec![None; prev.runs.len()];
    let mut chord_runs = Vec::new();
    for (r, used) in used_old.iter().enumerate() {
        if *used {
            remap[r] = Some(chord_runs.len() as u32);
            chord_runs.push(prev.runs[r]);
        }
    }

    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut run_offsets = vec![0usize; runs.len()];
    for (bi, b) in blocks.iter().enumerate() {
        match b {
            Block::Single(i) => {
                let p = &pieces[*i];
                vertices.push(p.segment.a);
                edges.push(match p.kept {
                    Some(mut e) => {
                        e.run = e.run.and_then(|r| remap[r as usize]);
                        e
                    }
                    None => EdgeInfo {
                        normal: if p.frozen.is_some() {
                            AngleRecord::east()
                        } else {
                            p.segment.normal.flattened()
                        },
                        frozen: p.frozen.is_some(),
                        parent: None,
                        level: prev.generation,
                        partial: true,
                        run: None,
                    },
                });
            }
            Block::Run(r) => {
                let run = &runs[*r];
                let ins = run.ins.as_ref().expect("inscribed");
                let id = chord_runs.len() as u32;
                chord_runs.push(ChordRun {
                    level: g,
                    chord_length: ins.chord_length,
                });
                let (end, end_point) = if all_full {
                    (ins.positions[0], ins.vertices[0])
                } else {
                    let next = match &blocks[(bi + 1) % blocks.len()] {
                        Block::Single(j) => pieces[*j].segment.a,
                        Block::Run(_) => unreachable!("runs are maximal"),
                    };
                    (end_of(&run.sc), next)
                };
                run_offsets[*r] = vertices.len();
                edges.extend(chord_edges(&run.sc, ins, end, end_point, g, id)?);
                vertices.extend_from_slice(&ins.vertices);
            }
        }
    }

    let lineage = match track {
        Some(k) => Some(follow_lineage(&asm, &runs, &run_offsets, k)?),
        None => None,
    };

    let main = runs
        .iter()
        .filter_map(|r| r.ins.as_ref())
        .max_by_key(|ins| ins.len())
        .map(|ins| ins.chord_length)
        .unwrap_or(prev.chord_length);
    let mut stats = AdvanceStats {
        generation: g,
        m: asm.m,
        depth: asm.depth,
        segments: np as u64,
        full_leaves: asm.full_leaves,
        refined_edges: asm.refined_edges.len(),
        a: asm.a,
        chord_length: main,
        runs: runs.len(),
        leaf_length: asm.leaf_length,
        vertical_length: asm.vertical_length,
        wrap_length: asm.wrap_length,
        new_frozen,
        ..Default::default()
    };
    for r in &runs {
        let ins = r.ins.as_ref().expect("inscribed");
        stats.chords += ins.len();
        stats.smooth_length += ins.curve_length;
        stats.max_turn = stats.max_turn.max(ins.max_turn);
        stats.tangent_residual = stats.tangent_residual.max(r.sc.tangent_residual);
        stats.closure_defect = stats.closure_defect.max(ins.closure_defect.abs() / ins.chord_length);
        stats.iterations = stats.iterations.max(ins.iterations);
    }
    let curve = GenerationCurve::new(g, prev.frame.clone(), vertices, edges, main, chord_runs)?;
    log::info!(
        "generation {g}: {} pieces, {} chords in {} runs, l = {:.6e}",
        np,
        stats.chords,
        stats.runs,
        main
    );
    Ok(Advance {
        curve,
        registry,
        stats,
        lineage,
    })
}

/// Index of the chord of the all-ones leaf of `edge` nearest that leaf's
/// midpoint.
fn follow_lineage(asm: &Assembly, runs: &[Run], offsets: &[usize], edge: usize) -> Result<usize> {
    let lost = || Error::ConstructionBug(format!("horizontal lineage of edge {edge} lost"));
    let leaf = asm
        .pieces
        .iter()
        .position(|p| p.source_edge as usize == edge && p.full_depth && p.coding.is_all_ones() && p.coding.len() == asm.depth as usize)
        .ok_or_else(lost)?;
    let (r, local) = runs
        .iter()
        .enumerate()
        .find_map(|(r, run)| run.pieces.iter().position(|&j| j == leaf).map(|l| (r, l)))
        .ok_or_else(lost)?;
    let run = &runs[r];
    let line = run
        .sc
        .pieces
        .iter()
        .position(|p| p.is_line() && p.src() as usize == local)
        .ok_or_else(lost)?;
    let ins = run.ins.as_ref().ok_or_else(lost)?;
    let mid = asm.pieces[leaf].segment.midpoint();
    let k = ins.positions.len();
    let mut best: Option<(f64, usize)> = None;
    for i in 0..k.saturating_sub(1) {
        if ins.positions[i].piece as usize == line && ins.positions[i + 1].piece as usize == line {
            let d = ins.vertices[i].midpoint(ins.vertices[i + 1]).dist(mid);
            if best.is_none_or(|b| d < b.0) {
                best = Some((d, i));
            }
        }
    }
    best.map(|b| offsets[r] + b.1).ok_or_else(lost)
}

/// Re-expresses a curve and registry in a frame centred on the vertex
/// nearest `window.center`, scaled by the power of two just below its radius.
pub fn focus(curve: &GenerationCurve, registry: &FrozenRegistry, window: Ball) -> (GenerationCurve, FrozenRegistry, Ball) {
    let origin = curve.vertices()[curve.nearest_vertex(window.center)];
    let log2_scale = window.radius.log2().floor() as i32;
    let step = FrameStep { origin, log2_scale };
    let w = Ball::new(step.apply(window.center), window.radius / step.scale());
    (curve.reframed(step), registry.reframed(step), w)
}

/// Windowed step around `center` that shrinks the window by 4× until the
/// chord count fits the budget. Returns the step and the radius used.
pub fn advance_fitted(
    prev: &GenerationCurve,
    registry: &FrozenRegistry,
    center: Point,
    radius: f64,
    params: &AdvanceParams,
    track: Option<usize>,
) -> Result<(Advance, f64)> {
    let mut r = radius;
    for _ in 0..24 {
        match advance_tracked(prev, registry, Some(&[Ball::new(center, r)]), params, track) {
            Ok(a) => return Ok((a, r)),
            Err(e) if e.is_resource_limit() => {
                log::debug!("window radius {r:e} too large: {e}");
                r /= 4.0;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::ResourceLimit {
        what: "chord count",
        needed: u128::MAX,
        budget: params.chord_budget as u128,
        hint: "no window small enough fits the chord budget",
    })
}
