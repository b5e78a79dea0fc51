//! The curve `Γ = Γ_{M²}(L)`: `depth` rounds of replacement with freezing.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{AngleRecord, FreezeKind, OrientedSegment, Point};
use crate::snowflake::replace::{breakpoints, MAX_ALPHA};

/// Sized so a multi-generation build stays within a few GB.
pub const DEFAULT_LEAF_BUDGET: u64 = 10_000_000;
/// Codings are packed two bits per level.
pub const MAX_DEPTH: u32 = 64;

/// Path `(i₁, …, i_k)` in the coding tree, digits in `1..=4`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coding {
    bits: u128,
    len: u8,
}

impl Coding {
    pub fn root() -> Self {
        Coding::default()
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn child(&self, digit: u8) -> Coding {
        debug_assert!((1..=4).contains(&digit));
        debug_assert!((self.len as u32) < MAX_DEPTH);
        Coding {
            bits: self.bits | (((digit - 1) as u128) << (2 * self.len as u32)),
            len: self.len + 1,
        }
    }

    pub fn digit(&self, i: usize) -> u8 {
        ((self.bits >> (2 * i)) & 3) as u8 + 1
    }

    pub fn digits(&self) -> Vec<u8> {
        (0..self.len()).map(|i| self.digit(i)).collect()
    }

    pub fn from_digits(d: &[u8]) -> Coding {
        d.iter().fold(Coding::root(), |c, &x| c.child(x))
    }

    /// True for the all-ones path `S_{1,…,1}`.
    pub fn is_all_ones(&self) -> bool {
        self.bits == 0
    }
}

impl std::fmt::Display for Coding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len() {
            write!(f, "{}", self.digit(i))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentNode {
    pub coding: Coding,
    pub segment: OrientedSegment,
    pub frozen: Option<FreezeKind>,
}

impl SegmentNode {
    pub fn rotation_count(&self) -> i64 {
        self.segment.normal.count
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen.is_some()
    }

    pub fn length(&self) -> f64 {
        self.segment.length()
    }

    pub fn depth(&self) -> usize {
        self.coding.len()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GeneratorParams {
    pub m: u32,
    pub depth: u32,
    pub source: OrientedSegment,
    pub leaf_budget: u64,
}

impl GeneratorParams {
    /// Canonical parameters: depth `M²`.
    pub fn canonical(m: u32, source: OrientedSegment) -> Self {
        GeneratorParams {
            m,
            depth: m * m,
            source,
            leaf_budget: DEFAULT_LEAF_BUDGET,
        }
    }

    pub fn with_depth(mut self, depth: u32) -> Self {
        self.depth = depth;
        self
    }

    pub fn is_canonical(&self) -> bool {
        self.depth == self.m * self.m
    }

    pub fn root(&self) -> Result<SegmentNode> {
        if self.m == 0 {
            return Err(Error::InvalidParameter("M must be positive".into()));
        }
        if self.depth > MAX_DEPTH {
            return Err(Error::InvalidParameter(format!("depth {} exceeds {MAX_DEPTH}", self.depth)));
        }
        let rec = self.source.normal.with_divisor(self.m);
        let alpha = rec.step();
        if alpha > MAX_ALPHA + 1e-15 {
            return Err(Error::InvalidParameter(format!(
                "alpha = |γ|/M = {alpha} exceeds π/2 (γ = {}, M = {})",
                rec.base_radians(),
                self.m
            )));
        }
        if self.source.length() == 0.0 {
            return Err(Error::DegenerateInput("zero-length source".into()));
        }
        Ok(SegmentNode {
            coding: Coding::root(),
            segment: OrientedSegment::new(self.source.a, self.source.b, rec),
            frozen: rec.freeze_kind(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.source.normal.with_divisor(self.m).step().min(MAX_ALPHA)
    }

    fn check_budget(&self) -> Result<()> {
        let leaves = 4u128.checked_pow(self.depth).unwrap_or(u128::MAX);
        if leaves > self.leaf_budget as u128 {
            return Err(Error::ResourceLimit {
                what: "Γ leaf count",
                needed: leaves,
                budget: self.leaf_budget as u128,
                hint: "refine locally with advance_windowed",
            });
        }
        Ok(())
    }
}

/// The four children of `node`. Frozen nodes are quadrisected; otherwise
/// the replacement operator is applied and newly vertical children get
/// their free endpoint snapped onto the vertical through their start.
pub fn children(node: &SegmentNode, alpha: f64) -> [SegmentNode; 4] {
    let (a, b) = (node.segment.a, node.segment.b);
    let rec = node.segment.normal;
    if node.frozen.is_some() {
        let d = b - a;
        let p = [a, a + d * 0.25, a + d * 0.5, a + d * 0.75, b];
        return std::array::from_fn(|i| SegmentNode {
            coding: node.coding.child(i as u8 + 1),
            segment: OrientedSegment::new(p[i], p[i + 1], rec),
            frozen: node.frozen,
        });
    }
    let mut y = breakpoints(a, b, alpha);
    let recs = [rec, rec.rotated(1), rec.rotated(-1), rec];
    let fk = [None, recs[1].freeze_kind(), recs[2].freeze_kind(), None];
    if fk[1].is_some() {
        y[2].x = y[1].x;
    }
    if fk[2].is_some() {
        y[3].x = y[2].x;
    }
    std::array::from_fn(|i| SegmentNode {
        coding: node.coding.child(i as u8 + 1),
        segment: OrientedSegment::new(y[i], y[i + 1], recs[i]),
        frozen: fk[i],
    })
}

#[derive(Clone, Debug)]
pub struct GammaCurve {
    pub m: u32,
    pub depth: u32,
    pub alpha: f64,
    pub source: OrientedSegment,
    pub leaves: Vec<SegmentNode>,
    pub total_length: f64,
    pub vertical_mass: f64,
    /// Part of `vertical_mass` frozen by wrap-around solutions.
    pub wraparound_mass: f64,
}

impl GammaCurve {
    pub fn vertices(&self) -> Vec<Point> {
        let mut v: Vec<Point> = self.leaves.iter().map(|l| l.segment.a).collect();
        if let Some(l) = self.leaves.last() {
            v.push(l.segment.b);
        }
        v
    }
}

pub fn vertical_mass_ratio(g: &GammaCurve) -> f64 {
    g.vertical_mass / g.total_length
}

fn expand_full(node: SegmentNode, levels: u32, alpha: f64, out: &mut Vec<SegmentNode>) {
    if levels == 0 {
        out.push(node);
        return;
    }
    for c in children(&node, alpha) {
        expand_full(c, levels - 1, alpha, out);
    }
}

pub fn generate_gamma(params: &GeneratorParams) -> Result<GammaCurve> {
    generate_gamma_with(params, Exec::available())
}

/// Full expansion. Subtrees below a fixed split level are expanded as
/// independent tasks and reassembled in coding order.
pub fn generate_gamma_with(params: &GeneratorParams, exec: Exec) -> Result<GammaCurve> {
    params.check_budget()?;
    let root = params.root()?;
    let alpha = params.alpha();
    let split = params.depth.min(4);
    let mut top = Vec::new();
    expand_full(root, split, alpha, &mut top);
    let rest = params.depth - split;
    let parts = exec.map_slice(&top, |n| {
        let mut v = Vec::with_capacity(1usize << (2 * rest));
        expand_full(*n, rest, alpha, &mut v);
        v
    });
    let mut leaves = Vec::with_capacity(1usize << (2 * params.depth));
    for p in parts {
        leaves.extend(p);
    }
    let mut total = 0.0;
    let mut vertical = 0.0;
    let mut wrap = 0.0;
    for l in &leaves {
        let len = l.length();
        total += len;
        match l.frozen {
            Some(FreezeKind::Principal) => vertical += len,
            Some(FreezeKind::WrapAround) => {
                vertical += len;
                wrap += len;
            }
            None => {}
        }
    }
    Ok(GammaCurve {
        m: params.m,
        depth: params.depth,
        alpha,
        source: params.source,
        leaves,
        total_length: total,
        vertical_mass: vertical,
        wraparound_mass: wrap,
    })
}

/// A piece of a partially expanded tree: either a full-depth leaf or a node
/// that was left unexpanded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaPiece {
    pub node: SegmentNode,
    pub full_depth: bool,
}

/// Expands only nodes accepted by `keep`; rejected nodes are returned as
/// they are. The pieces chain from `source.a` to `source.b`.
pub fn generate_gamma_windowed<F>(params: &GeneratorParams, keep: F) -> Result<Vec<GammaPiece>>
where
    F: Fn(&SegmentNode) -> bool,
{
    let root = params.root()?;
    let alpha = params.alpha();
    let mut out = Vec::new();
    let mut full = 0u64;
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        let d = node.depth() as u32;
        if d == params.depth {
            full += 1;
            if full > params.leaf_budget {
                return Err(Error::ResourceLimit {
                    what: "windowed Γ leaf count",
                    needed: full as u128,
                    budget: params.leaf_budget as u128,
                    hint: "shrink the refinement window",
                });
            }
            out.push(GammaPiece { node, full_depth: true });
        } else if keep(&node) {
            let c = children(&node, alpha);
            for k in (0..4).rev() {
                stack.push(c[k]);
            }
        } else {
            out.push(GammaPiece { node, full_depth: false });
        }
    }
    Ok(out)
}

/// Largest ratio `H¹(sub-arc generated by node) / |node|` over internal
/// nodes, together with the total length of the curve.
pub fn subarc_max_ratio(params: &GeneratorParams) -> Result<(f64, f64)> {
    params.check_budget()?;
    let root = params.root()?;
    let alpha = params.alpha();
    fn rec(n: &SegmentNode, levels: u32, alpha: f64, worst: &mut f64) -> f64 {
        if levels == 0 {
            return n.length();
        }
        let total: f64 = children(n, alpha).iter().map(|c| rec(c, levels - 1, alpha, worst)).sum();
        *worst = worst.max(total / n.length());
        total
    }
    let mut worst: f64 = 1.0;
    let total = rec(&root, params.depth, alpha, &mut worst);
    Ok((worst, total))
}

/// Largest distance from a leaf to the source segment.
pub fn max_leaf_distance(g: &GammaCurve) -> f64 {
    let (a, b) = (g.source.a, g.source.b);
    g.leaves
        .iter()
        .flat_map(|l| [l.segment.a, l.segment.b])
        .map(|p| crate::geometry::distance_point_segment(p, a, b))
        .fold(0.0, f64::max)
}

/// A horizontal source `[(0,0),(ℓ,0)]` with outer normal `(0,1)`.
pub fn horizontal_source(len: f64) -> OrientedSegment {
    OrientedSegment::new(Point::new(0.0, 0.0), Point::new(len, 0.0), AngleRecord::exact(1, 2))
}
