//! Step functions on a finite partition of `[0, 1]`.
//!
//! The same representation serves as an integrable vector (norm = integral of
//! the absolute value) and as a bounded functional (norm = largest height).

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{serde_q_vec, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StepRaw", into = "StepRaw")]
pub struct StepFn {
    breaks: Vec<Q>,
    heights: Vec<Q>,
}

#[derive(Serialize, Deserialize)]
struct StepRaw {
    #[serde(with = "serde_q_vec")]
    breaks: Vec<Q>,
    #[serde(with = "serde_q_vec")]
    heights: Vec<Q>,
}

impl TryFrom<StepRaw> for StepFn {
    type Error = Error;
    fn try_from(r: StepRaw) -> Result<Self> {
        StepFn::new(r.breaks, r.heights)
    }
}

impl From<StepFn> for StepRaw {
    fn from(f: StepFn) -> Self {
        StepRaw {
            breaks: f.breaks,
            heights: f.heights,
        }
    }
}

impl StepFn {
    /// `breaks = [0, b_1, ..., 1]` strictly increasing; `heights[i]` is the value
    /// on `[breaks[i], breaks[i+1])`.
    pub fn new(breaks: Vec<Q>, heights: Vec<Q>) -> Result<Self> {
        if breaks.len() < 2 || heights.len() + 1 != breaks.len() {
            return Err(Error::Parse("need n + 1 breaks for n heights".into()));
        }
        if !breaks[0].is_zero() || !breaks[breaks.len() - 1].is_one() {
            return Err(Error::Parse("breaks must start at 0 and end at 1".into()));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parse("breaks must be strictly increasing".into()));
        }
        Ok(Self::canonical(breaks, heights))
    }

    fn canonical(breaks: Vec<Q>, heights: Vec<Q>) -> Self {
        let mut b = vec![breaks[0].clone()];
        let mut h: Vec<Q> = Vec::new();
        for (i, hi) in heights.into_iter().enumerate() {
            if h.last() == Some(&hi) {
                *b.last_mut().unwrap() = breaks[i + 1].clone();
            } else {
                h.push(hi);
                b.push(breaks[i + 1].clone());
            }
        }
        StepFn { breaks: b, heights: h }
    }

    pub fn constant(h: Q) -> Self {
        StepFn {
            breaks: vec![Q::zero(), Q::one()],
            heights: vec![h],
        }
    }

    /// `h` on `[lo, hi)`, zero elsewhere.
    pub fn indicator(lo: &Q, hi: &Q, h: Q) -> Result<Self> {
        if lo.is_negative() || hi > &Q::one() || lo >= hi {
            return Err(Error::Domain("indicator interval must satisfy 0 <= lo < hi <= 1".into()));
        }
        let mut breaks = vec![Q::zero()];
        let mut heights = Vec::new();
        if !lo.is_zero() {
            breaks.push(lo.clone());
            heights.push(Q::zero());
        }
        breaks.push(hi.clone());
        heights.push(h);
        if !hi.is_one() {
            breaks.push(Q::one());
            heights.push(Q::zero());
        }
        Ok(Self::canonical(breaks, heights))
    }

    pub fn breaks(&self) -> &[Q] {
        &self.breaks
    }

    pub fn heights(&self) -> &[Q] {
        &self.heights
    }

    /// Pieces as `(lo, hi, height)`.
    pub fn pieces(&self) -> impl Iterator<Item = (&Q, &Q, &Q)> {
        self.breaks
            .windows(2)
            .zip(self.heights.iter())
            .map(|(w, h)| (&w[0], &w[1], h))
    }

    /// Value on the piece containing `s` (right-continuous, the last piece closed).
    pub fn value_at(&self, s: &Q) -> Q {
        let i = match self.breaks.binary_search(s) {
            Ok(i) => i.min(self.heights.len() - 1),
            Err(i) => i.saturating_sub(1).min(self.heights.len() - 1),
        };
        self.heights[i].clone()
    }

    pub fn l1_norm(&self) -> Q {
        self.pieces().map(|(lo, hi, h)| h.abs() * (hi - lo)).sum()
    }

    pub fn sup_norm(&self) -> Q {
        self.heights.iter().map(|h| h.abs()).max().unwrap()
    }

    fn merged_breaks(&self, other: &StepFn) -> Vec<Q> {
        let mut b: Vec<Q> = self.breaks.iter().chain(other.breaks.iter()).cloned().collect();
        b.sort();
        b.dedup();
        b
    }

    /// `integral of f * g` over `[0, 1]`.
    pub fn integral_product(&self, other: &StepFn) -> Q {
        let b = self.merged_breaks(other);
        b.windows(2)
            .map(|w| self.value_at(&w[0]) * other.value_at(&w[0]) * (&w[1] - &w[0]))
            .sum()
    }

    /// `integral over [lo, hi] of |f|`.
    pub fn abs_integral_on(&self, lo: &Q, hi: &Q) -> Q {
        self.pieces()
            .map(|(a, b, h)| {
                let l = if a > lo { a } else { lo };
                let r = if b < hi { b } else { hi };
                if l < r {
                    h.abs() * (r - l)
                } else {
                    Q::zero()
                }
            })
            .sum()
    }

    pub fn scale(&self, c: &Q) -> StepFn {
        Self::canonical(self.breaks.clone(), self.heights.iter().map(|h| h * c).collect())
    }

    pub fn lincomb(a: &Q, f: &StepFn, b: &Q, g: &StepFn) -> StepFn {
        let br = f.merged_breaks(g);
        let heights = br[..br.len() - 1]
            .iter()
            .map(|s| a * f.value_at(s) + b * g.value_at(s))
            .collect();
        Self::canonical(br, heights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::q;

    #[test]
    fn norms_and_pairing() {
        let f = StepFn::new(vec![q(0, 1), q(1, 2), q(1, 1)], vec![q(1, 1), q(-1, 1)]).unwrap();
        assert_eq!(f.l1_norm(), q(1, 1));
        assert_eq!(f.sup_norm(), q(1, 1));
        assert_eq!(f.integral_product(&f), q(1, 1));
        assert_eq!(f.integral_product(&StepFn::constant(q(1, 1))), q(0, 1));
    }

    #[test]
    fn equal_neighbours_merge() {
        let f = StepFn::new(vec![q(0, 1), q(1, 3), q(1, 1)], vec![q(2, 1), q(2, 1)]).unwrap();
        assert_eq!(f.heights().len(), 1);
    }

    #[test]
    fn indicator_and_abs_integral() {
        let f = StepFn::indicator(&q(1, 4), &q(1, 2), q(4, 1)).unwrap();
        assert_eq!(f.l1_norm(), q(1, 1));
        assert_eq!(f.abs_integral_on(&q(0, 1), &q(3, 8)), q(1, 2));
        assert_eq!(f.value_at(&q(1, 4)), q(4, 1));
        assert_eq!(f.value_at(&q(1, 2)), q(0, 1));
    }

    #[test]
    fn lincomb_of_steps() {
        let f = StepFn::constant(q(1, 1));
        let g = StepFn::indicator(&q(0, 1), &q(1, 2), q(2, 1)).unwrap();
        let h = StepFn::lincomb(&q(1, 1), &f, &q(-1, 1), &g);
        assert_eq!(h.l1_norm(), q(1, 1));
    }
}
