//! Flatness modulus: for a target `bound`, a `delta > 0` such that
//! `2 - delta <= N(p, q) <= N(r, q) <= 2` and `q < 2 - delta` force `|p - r| < bound`.

use num_traits::Signed;

use super::AbsoluteNorm;
use crate::error::{Error, Result};
use crate::real::{q, q_to_f64, Q};

const MAX_HALVINGS: u32 = 80;
const Q_GRID: usize = 2048;
const BISECT: usize = 64;
/// Accepted widths must stay below this fraction of the bound.
const WIDTH_SLACK: f64 = 0.9;

/// Smallest `p >= 0` with `N(p, q) >= level`, on `[0, 2]`.
fn first_reaching(norm: &AbsoluteNorm, q: f64, level: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 2.0);
    if norm.eval_f64(lo, q) >= level {
        return 0.0;
    }
    for _ in 0..BISECT {
        let mid = 0.5 * (lo + hi);
        if norm.eval_f64(mid, q) >= level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Largest `p` in `[0, 2]` with `N(p, q) <= level`.
fn last_below(norm: &AbsoluteNorm, q: f64, level: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 2.0);
    if norm.eval_f64(hi, q) <= level {
        return 2.0;
    }
    for _ in 0..BISECT {
        let mid = 0.5 * (lo + hi);
        if norm.eval_f64(mid, q) <= level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Largest width of the level band `{p : 2 - delta <= N(p, q) <= 2}` over
/// `q < 2 - delta`; the band is an interval because `N(., q)` is monotone.
pub fn flatness_width(norm: &AbsoluteNorm, delta: f64) -> f64 {
    let top = 2.0 - delta;
    let uniform = (0..Q_GRID).map(|j| top * j as f64 / Q_GRID as f64);
    let near_top = (1..=40).map(|m| top * (1.0 - (-(m as f64)).exp2()));
    uniform
        .chain(near_top)
        .map(|qv| last_below(norm, qv, 2.0) - first_reaching(norm, qv, top))
        .fold(0.0, f64::max)
}

pub fn flatness_width_check(norm: &AbsoluteNorm, delta: f64, bound: f64) -> bool {
    flatness_width(norm, delta) <= WIDTH_SLACK * bound
}

/// Brute-force check of the flatness implication on the `(n+1)^3` grid of `[0, 2]^3`.
pub fn flatness_grid_check(norm: &AbsoluteNorm, delta: f64, bound: f64, n: usize) -> bool {
    let h = 2.0 / n as f64;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let top = 2.0 - delta;
    for &qv in grid.iter().take_while(|&&qv| qv < top) {
        // admissible p (and r) for this q; N(., q) is monotone so the widest
        // ordered pair is (min, max)
        let band: Vec<f64> = grid
            .iter()
            .copied()
            .filter(|&p| {
                let v = norm.eval_f64(p, qv);
                v >= top && v <= 2.0
            })
            .collect();
        if let (Some(lo), Some(hi)) = (band.first(), band.last()) {
            if norm.eval_f64(*lo, qv) <= norm.eval_f64(*hi, qv) && hi - lo >= bound {
                return false;
            }
        }
    }
    true
}

/// Decreasing dyadic search `delta = bound / 2^j` (capped at 1/2), returning the
/// first candidate that passes both the width check and the grid verifier.
pub fn flatness_delta(norm: &AbsoluteNorm, bound: &Q) -> Result<Q> {
    if !bound.is_positive() {
        return Err(Error::Domain("flatness bound must be positive".into()));
    }
    let b = q_to_f64(bound);
    let mut delta = bound / Q::from_integer(2.into());
    let cap = q(1, 2);
    if delta > cap {
        delta = cap;
    }
    for _ in 0..MAX_HALVINGS {
        let d = q_to_f64(&delta);
        if flatness_width_check(norm, d, b) && flatness_grid_check(norm, d, b, 200) {
            return Ok(delta);
        }
        delta /= Q::from_integer(2.into());
    }
    Err(Error::Domain(format!(
        "no flatness delta found down to {}",
        q_to_f64(&delta)
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_and_linf_accept_half_the_bound() {
        assert_eq!(flatness_delta(&AbsoluteNorm::l1(), &q(1, 10)).unwrap(), q(1, 20));
        assert_eq!(flatness_delta(&AbsoluteNorm::linf(), &q(1, 10)).unwrap(), q(1, 20));
    }

    #[test]
    fn l2_regression_constant() {
        // band width tends to 2 sqrt(delta) as q -> 2 - delta
        let d = flatness_delta(&AbsoluteNorm::l2(), &q(1, 10)).unwrap();
        assert_eq!(d, q(1, 640));
        assert!(flatness_grid_check(&AbsoluteNorm::l2(), q_to_f64(&d), 0.1, 200));
    }

    #[test]
    fn l1_width_equals_delta() {
        let w = flatness_width(&AbsoluteNorm::l1(), 0.05);
        assert!((w - 0.05).abs() < 1e-9);
    }

    #[test]
    fn rejects_nonpositive_bound() {
        assert!(flatness_delta(&AbsoluteNorm::l1(), &q(0, 1)).is_err());
    }
}
