//! Length-weighted vertical mass of `Γ` without building geometry.
//!
//! A node's length depends only on how many of its ancestors were frozen
//! and at which level, so the mass can be propagated over rotation counts
//! (exact) or sampled over random codings (Monte Carlo).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec::Exec;
use crate::geometry::{AngleRecord, FreezeKind};
use crate::snowflake::replace::child_factor;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassSummary {
    /// `H¹(Γ)/ℓ`.
    pub total: f64,
    /// `Σ_{S∈𝒱} H¹(S) / ℓ`.
    pub vertical: f64,
    pub wraparound: f64,
}

impl MassSummary {
    pub fn ratio(&self) -> f64 {
        self.vertical / self.total
    }
}

/// Exact propagation over the rotation count. `normal` is the source normal.
pub fn vertical_mass_exact(normal: AngleRecord, m: u32, depth: u32) -> MassSummary {
    let rec = normal.with_divisor(m);
    let f = child_factor(rec.step());
    if let Some(kind) = rec.freeze_kind() {
        let w = if kind == FreezeKind::WrapAround { 1.0 } else { 0.0 };
        return MassSummary { total: 1.0, vertical: 1.0, wraparound: w };
    }
    let d = depth as usize;
    // live[j + d]
    let mut live = vec![0.0f64; 2 * d + 1];
    live[d] = 1.0;
    let mut vertical = 0.0;
    let mut wrap = 0.0;
    for _ in 0..depth {
        let mut next = vec![0.0f64; 2 * d + 1];
        for (i, &w) in live.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let j = i as i64 - d as i64;
            let c = w * f;
            next[i] += 2.0 * c;
            for (dj, slot) in [(1i64, i + 1), (-1, i.wrapping_sub(1))] {
                match rec.rotated(j + dj).freeze_kind() {
                    Some(k) => {
                        vertical += c;
                        if k == FreezeKind::WrapAround {
                            wrap += c;
                        }
                    }
                    None => next[slot] += c,
                }
            }
        }
        live = next;
    }
    let total = vertical + live.iter().sum::<f64>();
    MassSummary { total, vertical, wraparound: wrap }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassEstimate {
    pub samples: u64,
    pub ratio: f64,
    /// 95% half-width from the delta method for a ratio of means.
    pub half_width: f64,
    /// Estimate of `H¹(Γ)/ℓ`.
    pub total: f64,
}

const CHUNK: u64 = 1 << 14;

/// Samples `samples` uniform codings of length `depth` and estimates the
/// length-weighted frozen fraction. Chunk `k` draws from ChaCha stream `k`
/// so the result does not depend on `exec`.
pub fn vertical_mass_sampled(normal: AngleRecord, m: u32, depth: u32, samples: u64, seed: u64, exec: Exec) -> MassEstimate {
    let rec = normal.with_divisor(m);
    let f = child_factor(rec.step());
    let chunks = samples.div_ceil(CHUNK) as usize;
    let parts = exec.map_range(chunks, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let n = CHUNK.min(samples - k as u64 * CHUNK);
        // sums of x (length), y (frozen length), x², y², xy
        let mut s = [0.0f64; 5];
        for _ in 0..n {
            let mut j = 0i64;
            let mut len = 1.0f64;
            let mut frozen = rec.is_east();
            for _ in 0..depth {
                let digit: u32 = rng.random_range(0..4);
                if frozen {
                    len *= 0.25;
                    continue;
                }
                len *= f;
                j += match digit {
                    1 => 1,
                    2 => -1,
                    _ => 0,
                };
                frozen = rec.rotated(j).is_east();
            }
            let y = if frozen { len } else { 0.0 };
            s[0] += len;
            s[1] += y;
            s[2] += len * len;
            s[3] += y * y;
            s[4] += len * y;
        }
        s
    });
    let mut s = [0.0f64; 5];
    for p in parts {
        for i in 0..5 {
            s[i] += p[i];
        }
    }
    let n = samples as f64;
    let (mx, my) = (s[0] / n, s[1] / n);
    let r = my / mx;
    // Var(Y − rX) / n / mx²
    let var = (s[3] / n - 2.0 * r * s[4] / n + r * r * s[2] / n) - (my - r * mx).powi(2);
    let hw = 1.96 * (var.max(0.0) / n).sqrt() / mx;
    MassEstimate {
        samples,
        ratio: r,
        half_width: hw,
        // H¹(Γ) = 4^depth · E[leaf length]
        total: mx * 4f64.powi(depth as i32),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snowflake::gamma::{generate_gamma, horizontal_source, GeneratorParams};

    #[test]
    fn exact_propagation_matches_geometry() {
        for m in [2u32, 3] {
            let g = generate_gamma(&GeneratorParams::canonical(m, horizontal_source(1.0))).unwrap();
            let s = vertical_mass_exact(AngleRecord::exact(1, 2), m, m * m);
            // the geometric sums carry rounding from 4^(M²) leaves
            assert!((s.total - g.total_length).abs() < 1e-10);
            assert!((s.vertical - g.vertical_mass).abs() < 1e-10);
            assert!((s.wraparound - g.wraparound_mass).abs() < 1e-12);
        }
    }

    #[test]
    fn sampler_is_exec_independent_and_close() {
        let h = AngleRecord::exact(1, 2);
        let a = vertical_mass_sampled(h, 2, 4, 50_000, 7, Exec::Sequential);
        let b = vertical_mass_sampled(h, 2, 4, 50_000, 7, Exec::Parallel);
        assert_eq!(a, b);
        let exact = vertical_mass_exact(h, 2, 4);
        assert!((a.ratio - exact.ratio()).abs() < 4.0 * a.half_width);
        assert!((a.total - exact.total).abs() < 0.02 * exact.total);
    }
}
