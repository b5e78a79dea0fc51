//! Bounding-volume hierarchy over the edges of a closed polyline.
//!
//! Leaves hold chunks of consecutive edges, which are spatially tight on a
//! curve; the tree above them is built by median splits of chunk centroids.

use crate::geometry::{closest_on_segment, distance_point_segment, segments_intersect, BBox, Location, Point};

const CHUNK: usize = 4;
const LEAF_CHUNKS: usize = 2;

#[derive(Clone, Copy, Debug)]
struct Node {
    bbox: BBox,
    /// Leaf: first index into `order`; inner: index of the left child (the
    /// right child follows the left subtree).
    first: u32,
    /// Leaf: number of chunks; inner: 0.
    count: u32,
    right: u32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Nearest {
    pub distance: f64,
    pub edge: u32,
    pub point: Point,
}

pub struct SpatialIndex<'a> {
    pts: &'a [Point],
    nodes: Vec<Node>,
    order: Vec<u32>,
}

impl<'a> SpatialIndex<'a> {
    pub fn new(pts: &'a [Point]) -> Self {
        let n = pts.len();
        let chunks = n.div_ceil(CHUNK);
        let mut boxes = Vec::with_capacity(chunks);
        for c in 0..chunks {
            let mut b = BBox::empty();
            for e in c * CHUNK..((c + 1) * CHUNK).min(n) {
                b.grow(pts[e]);
                b.grow(pts[(e + 1) % n]);
            }
            boxes.push(b);
        }
        let centers: Vec<Point> = boxes.iter().map(|b| b.center()).collect();
        let mut order: Vec<u32> = (0..chunks as u32).collect();
        let mut nodes = Vec::with_capacity(2 * chunks / LEAF_CHUNKS + 1);
        build(&mut nodes, &mut order, 0, chunks, &boxes, &centers);
        SpatialIndex { pts, nodes, order }
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn points(&self) -> &'a [Point] {
        self.pts
    }

    #[inline]
    pub fn edge(&self, e: usize) -> (Point, Point) {
        (self.pts[e], self.pts[(e + 1) % self.pts.len()])
    }

    pub fn bbox(&self) -> BBox {
        self.nodes[0].bbox
    }

    fn chunk_edges(&self, c: u32) -> std::ops::Range<usize> {
        let s = c as usize * CHUNK;
        s..(s + CHUNK).min(self.pts.len())
    }

    /// Nearest edge and point on it.
    pub fn nearest(&self, p: Point) -> Nearest {
        self.nearest_from(p, None)
    }

    /// As [`nearest`](Self::nearest), seeding the search with edge `hint`
    /// (typically the previous answer for a nearby point).
    pub fn nearest_from(&self, p: Point, hint: Option<u32>) -> Nearest {
        self.search(p, hint)
    }

    fn search(&self, p: Point, hint: Option<u32>) -> Nearest {
        let mut best = Nearest {
            distance: f64::INFINITY,
            edge: 0,
            point: p,
        };
        let mut best2 = f64::INFINITY;
        if let Some(h) = hint {
            let (a, b) = self.edge(h as usize);
            let (_, q) = closest_on_segment(p, a, b);
            best = Nearest {
                distance: 0.0,
                edge: h,
                point: q,
            };
            best2 = (q - p).norm2();
        }
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        stack.push(0);
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i as usize];
            if node.bbox.dist2(p) >= best2 {
                continue;
            }
            if node.count > 0 {
                for k in node.first..node.first + node.count {
                    for e in self.chunk_edges(self.order[k as usize]) {
                        let (a, b) = self.edge(e);
                        let (_, q) = closest_on_segment(p, a, b);
                        let d2 = (q - p).norm2();
                        if d2 < best2 {
                            best2 = d2;
                            best = Nearest {
                                distance: 0.0,
                                edge: e as u32,
                                point: q,
                            };
                        }
                    }
                }
            } else {
                let (l, r) = (node.first, node.right);
                let dl = self.nodes[l as usize].bbox.dist2(p);
                let dr = self.nodes[r as usize].bbox.dist2(p);
                if dl < dr {
                    stack.push(r);
                    stack.push(l);
                } else {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        let (a, b) = self.edge(best.edge as usize);
        best.distance = distance_point_segment(p, a, b);
        best
    }

    /// Distance from `p` to the curve.
    #[inline]
    pub fn distance(&self, p: Point) -> f64 {
        self.nearest(p).distance
    }

    /// Edges meeting the closed disk `B(c, r)`, in increasing order.
    pub fn edges_in_ball(&self, c: Point, r: f64) -> Vec<u32> {
        let mut out = Vec::new();
        let r2 = r * r;
        let mut stack = vec![0u32];
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i as usize];
            if node.bbox.dist2(c) > r2 {
                continue;
            }
            if node.count > 0 {
                for k in node.first..node.first + node.count {
                    for e in self.chunk_edges(self.order[k as usize]) {
                        let (a, b) = self.edge(e);
                        if distance_point_segment(c, a, b) <= r {
                            out.push(e as u32);
                        }
                    }
                }
            } else {
                stack.push(node.first);
                stack.push(node.right);
            }
        }
        out.sort_unstable();
        out
    }

    /// Crossings of the ray from `p` towards `+x` (half-open rule in `y`).
    pub fn ray_crossings(&self, p: Point) -> usize {
        let mut count = 0;
        let mut stack = vec![0u32];
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i as usize];
            let b = &node.bbox;
            if b.max.x < p.x || b.min.y > p.y || b.max.y < p.y {
                continue;
            }
            if node.count > 0 {
                for k in node.first..node.first + node.count {
                    for e in self.chunk_edges(self.order[k as usize]) {
                        let (a, q) = self.edge(e);
                        if (a.y > p.y) != (q.y > p.y) {
                            let x = a.x + (p.y - a.y) / (q.y - a.y) * (q.x - a.x);
                            if x > p.x {
                                count += 1;
                            }
                        }
                    }
                }
            } else {
                stack.push(node.first);
                stack.push(node.right);
            }
        }
        count
    }

    /// Inside/outside/boundary classification.
    pub fn locate(&self, p: Point, tol: f64) -> Location {
        if self.distance(p) <= tol {
            return Location::Boundary;
        }
        if self.ray_crossings(p) % 2 == 1 {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    /// First pair of non-adjacent intersecting edges, if any.
    pub fn find_self_intersection(&self) -> Option<(u32, u32)> {
        let n = self.pts.len();
        let mut stack = Vec::new();
        for e in 0..n {
            let (a, b) = self.edge(e);
            let eb = BBox::of_points(&[a, b]);
            stack.clear();
            stack.push(0u32);
            while let Some(i) = stack.pop() {
                let node = &self.nodes[i as usize];
                if !node.bbox.overlaps(&eb) {
                    continue;
                }
                if node.count > 0 {
                    for k in node.first..node.first + node.count {
                        for f in self.chunk_edges(self.order[k as usize]) {
                            if f <= e || f == e + 1 || (e == 0 && f == n - 1) {
                                continue;
                            }
                            let (c, d) = self.edge(f);
                            if segments_intersect(a, b, c, d) {
                                return Some((e as u32, f as u32));
                            }
                        }
                    }
                } else {
                    stack.push(node.first);
                    stack.push(node.right);
                }
            }
        }
        None
    }

    pub fn is_simple(&self) -> bool {
        self.find_self_intersection().is_none()
    }
}

fn build(nodes: &mut Vec<Node>, order: &mut [u32], offset: usize, len: usize, boxes: &[BBox], centers: &[Point]) -> u32 {
    let idx = nodes.len() as u32;
    let slice = &mut order[offset..offset + len];
    let bbox = slice.iter().fold(BBox::empty(), |b, &c| b.union(&boxes[c as usize]));
    nodes.push(Node {
        bbox,
        first: offset as u32,
        count: len as u32,
        right: 0,
    });
    if len <= LEAF_CHUNKS {
        return idx;
    }
    let cb = slice.iter().fold(BBox::empty(), |mut b, &c| {
        b.grow(centers[c as usize]);
        b
    });
    let split_x = cb.max.x - cb.min.x >= cb.max.y - cb.min.y;
    let mid = len / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| {
        let (pa, pb) = (centers[a as usize], centers[b as usize]);
        let (ka, kb) = if split_x { (pa.x, pb.x) } else { (pa.y, pb.y) };
        ka.total_cmp(&kb).then(a.cmp(&b))
    });
    let left = build(nodes, order, offset, mid, boxes, centers);
    let right = build(nodes, order, offset + mid, len - mid, boxes, centers);
    let node = &mut nodes[idx as usize];
    node.count = 0;
    node.first = left;
    node.right = right;
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{point_in_polygon, ClosedPolyline};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn wobbly(n: usize) -> Vec<Point> {
        (0..n)
            .map(|i| {
                let t = -(i as f64) / n as f64 * std::f64::consts::TAU;
                let r = 1.0 + 0.2 * (7.0 * t).sin();
                Point::polar(r, t)
            })
            .collect()
    }

    #[test]
    fn nearest_matches_brute_force() {
        let pts = wobbly(997);
        let idx = SpatialIndex::new(&pts);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let p = Point::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let brute = (0..pts.len())
                .map(|e| {
                    let (a, b) = idx.edge(e);
                    distance_point_segment(p, a, b)
                })
                .fold(f64::INFINITY, f64::min);
            let got = idx.distance(p);
            assert!((got - brute).abs() <= 1e-12 * brute.max(1e-300), "{got} vs {brute}");
        }
    }

    #[test]
    fn locate_matches_polygon_test() {
        let pts = wobbly(501);
        let idx = SpatialIndex::new(&pts);
        let poly = ClosedPolyline::new(pts.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let p = Point::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
            assert_eq!(idx.locate(p, 1e-12), point_in_polygon(p, &poly, 1e-12));
        }
    }

    #[test]
    fn ball_query_and_simplicity() {
        let pts = wobbly(400);
        let idx = SpatialIndex::new(&pts);
        let c = Point::new(1.0, 0.0);
        let got = idx.edges_in_ball(c, 0.3);
        let brute: Vec<u32> = (0..pts.len())
            .filter(|&e| {
                let (a, b) = idx.edge(e);
                distance_point_segment(c, a, b) <= 0.3
            })
            .map(|e| e as u32)
            .collect();
        assert_eq!(got, brute);
        assert!(idx.is_simple());
        let bow = vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        assert!(!SpatialIndex::new(&bow).is_simple());
    }
}
