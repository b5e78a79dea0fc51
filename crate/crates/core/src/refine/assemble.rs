//! `G_{n+1}`: the concatenation of the curves `Γ_jⁿ` over the edges of `Ωₙ`.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{distance_point_segment, Ball, FreezeKind, OrientedSegment};
use crate::refine::curve::{EdgeInfo, GenerationCurve};
use crate::snowflake::{generate_gamma_windowed, generate_gamma_with, Coding, GeneratorParams, SegmentNode};

/// One segment `Tᵢ` of `G_{n+1}`, or a piece of `Ωₙ` left unrefined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GPiece {
    pub segment: OrientedSegment,
    pub frozen: Option<FreezeKind>,
    pub source_edge: u32,
    pub coding: Coding,
    /// A full-depth leaf of its tree (a genuine `T`).
    pub full_depth: bool,
    /// Edge record for pieces carried over from `Ωₙ` verbatim.
    pub kept: Option<EdgeInfo>,
}

impl GPiece {
    fn leaf(node: &SegmentNode, edge: u32, full: bool) -> Self {
        GPiece {
            segment: node.segment,
            frozen: node.frozen,
            source_edge: edge,
            coding: node.coding,
            full_depth: full,
            kept: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Assembly {
    pub pieces: Vec<GPiece>,
    /// `a_{n+1}`: minimum length over full-depth pieces.
    pub a: f64,
    pub m: u32,
    pub depth: u32,
    pub refined_edges: Vec<u32>,
    pub leaf_length: f64,
    pub vertical_length: f64,
    pub wrap_length: f64,
    pub full_leaves: u64,
}

impl Assembly {
    fn finish(pieces: Vec<GPiece>, m: u32, depth: u32, refined_edges: Vec<u32>) -> Self {
        let mut a = f64::INFINITY;
        let (mut tl, mut vl, mut wl, mut n) = (0.0, 0.0, 0.0, 0u64);
        for p in pieces.iter().filter(|p| p.full_depth) {
            let l = p.segment.length();
            a = a.min(l);
            tl += l;
            n += 1;
            match p.frozen {
                Some(FreezeKind::Principal) => vl += l,
                Some(FreezeKind::WrapAround) => {
                    vl += l;
                    wl += l;
                }
                None => {}
            }
        }
        Assembly {
            pieces,
            a,
            m,
            depth,
            refined_edges,
            leaf_length: tl,
            vertical_length: vl,
            wrap_length: wl,
            full_leaves: n,
        }
    }

    pub fn is_global(&self) -> bool {
        self.pieces.iter().all(|p| p.full_depth)
    }

    pub fn vertical_ratio(&self) -> f64 {
        self.vertical_length / self.leaf_length
    }
}

fn params_for(prev: &GenerationCurve, i: usize, m: u32, depth: u32, budget: u64) -> GeneratorParams {
    GeneratorParams {
        m,
        depth,
        source: prev.segment(i),
        leaf_budget: budget,
    }
}

/// Global assembly over every edge of `prev`.
pub fn assemble_g(prev: &GenerationCurve, m: u32, depth: Option<u32>, leaf_budget: u64, exec: Exec) -> Result<Assembly> {
    let depth = depth.unwrap_or(m * m);
    let total = (prev.len() as u128).saturating_mul(4u128.checked_pow(depth).unwrap_or(u128::MAX));
    if total > leaf_budget as u128 {
        return Err(Error::ResourceLimit {
            what: "G leaf count",
            needed: total,
            budget: leaf_budget as u128,
            hint: "refine locally with advance_windowed",
        });
    }
    let per_edge = exec.map_range(prev.len(), |i| -> Result<Vec<GPiece>> {
        let g = generate_gamma_with(&params_for(prev, i, m, depth, leaf_budget), Exec::Sequential)?;
        Ok(g.leaves.iter().map(|l| GPiece::leaf(l, i as u32, true)).collect())
    });
    let mut pieces = Vec::with_capacity(total as usize);
    for p in per_edge {
        pieces.extend(p?);
    }
    Ok(Assembly::finish(pieces, m, depth, (0..prev.len() as u32).collect()))
}

/// Does a segment meet the ball `B(c, ρ)`?
#[inline]
fn meets(s: &OrientedSegment, ball: &Ball, slack: f64) -> bool {
    distance_point_segment(ball.center, s.a, s.b) <= ball.radius + slack
}

/// Windowed assembly: edges meeting `2·window` for some window are refined,
/// and inside their trees a node is expanded only while it lies within its
/// own length of `2·window`. Everything else is carried over verbatim.
pub fn assemble_windowed(
    prev: &GenerationCurve,
    m: u32,
    windows: &[Ball],
    depth: Option<u32>,
    leaf_budget: u64,
    exec: Exec,
) -> Result<Assembly> {
    let depth = depth.unwrap_or(m * m);
    let doubled: Vec<Ball> = windows.iter().map(|w| w.scaled(2.0)).collect();
    let candidates: Vec<u32> = (0..prev.len())
        .filter(|&i| {
            let s = prev.segment(i);
            doubled.iter().any(|w| meets(&s, w, 0.0))
        })
        .map(|i| i as u32)
        .collect();
    // shared across trees so that many small trees cannot exhaust memory
    let produced = AtomicU64::new(0);
    let trees = exec.map_slice(&candidates, |&i| -> Result<Vec<GPiece>> {
        let p = params_for(prev, i as usize, m, depth, leaf_budget);
        let pieces = generate_gamma_windowed(&p, |node| {
            let s = &node.segment;
            let slack = s.length();
            doubled.iter().any(|w| meets(s, w, slack)) && produced.fetch_add(3, Ordering::Relaxed) < leaf_budget
        })?;
        Ok(pieces.iter().map(|gp| GPiece::leaf(&gp.node, i, gp.full_depth)).collect())
    });
    let produced = produced.into_inner();
    if produced >= leaf_budget {
        return Err(Error::ResourceLimit {
            what: "windowed G piece count",
            needed: produced as u128,
            budget: leaf_budget as u128,
            hint: "shrink the refinement window",
        });
    }
    let mut refined = std::collections::BTreeMap::new();
    for (i, t) in candidates.iter().zip(trees) {
        refined.insert(*i, t?);
    }
    let full: u64 = refined.values().map(|v| v.iter().filter(|p| p.full_depth).count() as u64).sum();
    if full > leaf_budget {
        return Err(Error::ResourceLimit {
            what: "windowed G leaf count",
            needed: full as u128,
            budget: leaf_budget as u128,
            hint: "shrink the refinement window",
        });
    }
    let mut pieces = Vec::new();
    for i in 0..prev.len() {
        match refined.remove(&(i as u32)) {
            Some(v) => pieces.extend(v),
            None => pieces.push(GPiece {
                segment: prev.segment(i),
                frozen: None,
                source_edge: i as u32,
                coding: Coding::root(),
                full_depth: false,
                kept: Some(prev.edges[i]),
            }),
        }
    }
    Ok(Assembly::finish(pieces, m, depth, candidates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    #[test]
    fn hundred_gon_generation_one() {
        let prev = GenerationCurve::initial_polygon(100);
        let g = assemble_g(&prev, 2, None, 100_000_000, Exec::available()).unwrap();
        assert_eq!(g.pieces.len(), 25_600);
        for w in g.pieces.windows(2) {
            assert_eq!(w[0].segment.b, w[1].segment.a);
        }
        assert_eq!(g.pieces.last().unwrap().segment.b, g.pieces[0].segment.a);
        let brute = g.pieces.iter().map(|p| p.segment.length()).fold(f64::INFINITY, f64::min);
        assert_eq!(g.a, brute);
    }

    #[test]
    fn square_freezes_only_east_edge() {
        let sq = GenerationCurve::from_vertices(
            0,
            vec![Point::new(0.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 1.0), Point::new(1.0, 0.0)],
            1.0,
        )
        .unwrap();
        // edge 2 runs down the right side: normal (1,0)
        let g = assemble_g(&sq, 4, Some(2), 1000, Exec::Sequential).unwrap();
        for p in &g.pieces {
            assert_eq!(p.frozen.is_some() && p.coding.len() == 2 && p.source_edge == 2, p.source_edge == 2);
        }
    }

    #[test]
    fn window_far_away_keeps_everything() {
        let prev = GenerationCurve::initial_polygon(100);
        let w = [Ball::new(Point::new(500.0, 500.0), 1.0)];
        let g = assemble_windowed(&prev, 2, &w, None, 1 << 20, Exec::Sequential).unwrap();
        assert_eq!(g.pieces.len(), 100);
        assert!(g.pieces.iter().all(|p| p.kept.is_some()));
        assert!(g.refined_edges.is_empty());
    }
}
