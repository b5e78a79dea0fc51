//! Exact probabilities for the rotation-count walk.
//!
//! Each level of the coding tree moves the count by `0` (digits 1 and 4),
//! `+1` (digit 2) or `−1` (digit 3), so along a uniformly random coding the
//! count is a lazy random walk with step law `{0: 1/2, ±1: 1/4}`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

fn to_rational(count: BigUint, steps: u32) -> BigRational {
    let den = BigUint::one() << (2 * steps as usize);
    BigRational::new(count.into(), den.into())
}

/// `P(X₁ + … + X_{M²} ≤ −M)`.
pub fn clt_tail_exact(m: u32) -> BigRational {
    assert!(m >= 1);
    let steps = m * m;
    let off = steps as usize;
    // counts[s + off] = number of weighted codings with sum s (weights 2,1,1)
    let mut counts = vec![BigUint::zero(); 2 * off + 1];
    counts[off] = BigUint::one();
    for k in 0..steps as usize {
        let mut next = vec![BigUint::zero(); 2 * off + 1];
        for i in off - k..=off + k {
            if counts[i].is_zero() {
                continue;
            }
            let c = &counts[i];
            next[i] += c << 1usize;
            next[i + 1] += c;
            next[i - 1] += c;
        }
        counts = next;
    }
    let tail: BigUint = counts[..=off - m as usize].iter().sum();
    to_rational(tail, steps)
}

/// `P(the running sum hits −M within M² steps)`.
pub fn freeze_hit_exact(m: u32) -> BigRational {
    assert!(m >= 1);
    let steps = m * m;
    let target = m as usize;
    // live[s + target] for s > −M
    let width = target + steps as usize + 1;
    let mut live = vec![BigUint::zero(); width];
    live[target] = BigUint::one();
    let mut absorbed = BigUint::zero();
    for _ in 0..steps {
        absorbed <<= 2usize;
        let mut next = vec![BigUint::zero(); width];
        for i in 1..width {
            if live[i].is_zero() {
                continue;
            }
            let c = &live[i];
            next[i] += c << 1usize;
            if i + 1 < width {
                next[i + 1] += c;
            }
            if i == 1 {
                absorbed += c;
            } else {
                next[i - 1] += c;
            }
        }
        live = next;
    }
    to_rational(absorbed, steps)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: u64, d: u64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_values() {
        assert_eq!(clt_tail_exact(1), q(1, 4));
        assert_eq!(clt_tail_exact(2), q(37, 256));
        assert_eq!(freeze_hit_exact(1), q(1, 4));
        assert_eq!(freeze_hit_exact(2), q(46, 256));
        assert_eq!(clt_tail_exact(3), q(31180, 262144));
        assert_eq!(freeze_hit_exact(3), q(43796, 262144));
    }
}
