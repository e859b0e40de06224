//! Continuous piecewise-linear functions on `[0, 1]` with rational knots.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{serde_q_pairs, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PlRaw", into = "PlRaw")]
pub struct PlFn {
    knots: Vec<(Q, Q)>,
}

#[derive(Serialize, Deserialize)]
struct PlRaw {
    #[serde(with = "serde_q_pairs")]
    knots: Vec<(Q, Q)>,
}

impl TryFrom<PlRaw> for PlFn {
    type Error = Error;
    fn try_from(r: PlRaw) -> Result<Self> {
        PlFn::new(r.knots)
    }
}

impl From<PlFn> for PlRaw {
    fn from(f: PlFn) -> Self {
        PlRaw { knots: f.knots }
    }
}

impl PlFn {
    /// Knots must start at `s = 0`, end at `s = 1` and be strictly increasing.
    /// Knots interior to a straight run are dropped.
    pub fn new(knots: Vec<(Q, Q)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Parse("a piecewise-linear function needs knots at 0 and 1".into()));
        }
        if !knots[0].0.is_zero() || !knots[knots.len() - 1].0.is_one() {
            return Err(Error::Parse("knots must start at 0 and end at 1".into()));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Parse("knot positions must be strictly increasing".into()));
        }
        Ok(Self::canonical(knots))
    }

    fn canonical(knots: Vec<(Q, Q)>) -> Self {
        let mut out: Vec<(Q, Q)> = Vec::with_capacity(knots.len());
        for k in knots {
            while out.len() >= 2 {
                let (s0, v0) = &out[out.len() - 2];
                let (s1, v1) = &out[out.len() - 1];
                // collinear iff the slopes agree
                if (v1 - v0) * (&k.0 - s1) == (&k.1 - v1) * (s1 - s0) {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(k);
        }
        PlFn { knots: out }
    }

    pub fn constant(v: Q) -> Self {
        PlFn {
            knots: vec![(Q::zero(), v.clone()), (Q::one(), v)],
        }
    }

    /// Interpolates the given `(s, value)` pairs and extends constantly to the
    /// ends of `[0, 1]`. Positions must be distinct and lie in `[0, 1]`.
    pub fn interpolate(mut points: Vec<(Q, Q)>) -> Result<Self> {
        points.sort_by(|a, b| a.0.cmp(&b.0));
        if points.is_empty() {
            return Ok(Self::constant(Q::zero()));
        }
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Domain("interpolation points must be distinct".into()));
        }
        if points[0].0.is_negative() || points[points.len() - 1].0 > Q::one() {
            return Err(Error::Domain("interpolation points must lie in [0, 1]".into()));
        }
        if !points[0].0.is_zero() {
            let v = points[0].1.clone();
            points.insert(0, (Q::zero(), v));
        }
        if !points[points.len() - 1].0.is_one() {
            let v = points[points.len() - 1].1.clone();
            points.push((Q::one(), v));
        }
        Self::new(points)
    }

    pub fn knots(&self) -> &[(Q, Q)] {
        &self.knots
    }

    pub fn eval(&self, s: &Q) -> Q {
        let i = match self.knots.binary_search_by(|(k, _)| k.cmp(s)) {
            Ok(i) => return self.knots[i].1.clone(),
            Err(i) => i,
        };
        if i == 0 {
            return self.knots[0].1.clone();
        }
        if i == self.knots.len() {
            return self.knots[i - 1].1.clone();
        }
        let (s0, v0) = &self.knots[i - 1];
        let (s1, v1) = &self.knots[i];
        v0 + (v1 - v0) * (s - s0) / (s1 - s0)
    }

    pub fn sup_norm(&self) -> Q {
        self.knots.iter().map(|(_, v)| v.abs()).max().unwrap()
    }

    /// Leftmost point of `[lo, hi]` where `|f|` is largest, with that value.
    pub fn max_abs_on(&self, lo: &Q, hi: &Q) -> (Q, Q) {
        let mut best = (lo.clone(), self.eval(lo).abs());
        let inner = self.knots.iter().filter(|(s, _)| s > lo && s < hi);
        for (s, v) in inner.chain(std::iter::once(&(hi.clone(), self.eval(hi)))) {
            if v.abs() > best.1 {
                best = (s.clone(), v.abs());
            }
        }
        best
    }

    /// Closed intervals where `|f| >= level`, for `level > 0`.
    pub fn level_set(&self, level: &Q) -> Vec<(Q, Q)> {
        let mut out: Vec<(Q, Q)> = Vec::new();
        let mut push = |lo: Q, hi: Q| {
            if let Some(last) = out.last_mut() {
                if lo <= last.1 {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                    return;
                }
            }
            out.push((lo, hi));
        };
        for w in self.knots.windows(2) {
            let (s0, v0) = &w[0];
            let (s1, v1) = &w[1];
            for sign in [Q::one(), -Q::one()] {
                // { s in [s0, s1] : sign * f(s) >= level }, an interval by linearity
                let a = &sign * v0 - level;
                let b = &sign * v1 - level;
                let cross = |a: &Q, b: &Q| s0 + (s1 - s0) * a / (a - b);
                match (a.is_negative(), b.is_negative()) {
                    (false, false) => push(s0.clone(), s1.clone()),
                    (false, true) => push(s0.clone(), cross(&a, &b)),
                    (true, false) => push(cross(&a, &b), s1.clone()),
                    (true, true) => {}
                }
            }
        }
        out.sort_by(|x, y| x.0.cmp(&y.0));
        out
    }

    pub fn scale(&self, c: &Q) -> PlFn {
        Self::canonical(self.knots.iter().map(|(s, v)| (s.clone(), v * c)).collect())
    }

    /// `a f + b g`.
    pub fn lincomb(a: &Q, f: &PlFn, b: &Q, g: &PlFn) -> PlFn {
        let mut pts: Vec<Q> = f.knots.iter().chain(g.knots.iter()).map(|(s, _)| s.clone()).collect();
        pts.sort();
        pts.dedup();
        let knots = pts
            .into_iter()
            .map(|s| {
                let v = a * f.eval(&s) + b * g.eval(&s);
                (s, v)
            })
            .collect();
        Self::canonical(knots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::q;

    fn tent() -> PlFn {
        PlFn::new(vec![(q(0, 1), q(0, 1)), (q(1, 2), q(1, 1)), (q(1, 1), q(0, 1))]).unwrap()
    }

    #[test]
    fn eval_and_norm() {
        let f = tent();
        assert_eq!(f.eval(&q(1, 4)), q(1, 2));
        assert_eq!(f.sup_norm(), q(1, 1));
    }

    #[test]
    fn collinear_knots_dropped() {
        let f = PlFn::new(vec![(q(0, 1), q(0, 1)), (q(1, 4), q(1, 4)), (q(1, 1), q(1, 1))]).unwrap();
        assert_eq!(f.knots().len(), 2);
    }

    #[test]
    fn level_set_of_tent() {
        assert_eq!(tent().level_set(&q(1, 2)), vec![(q(1, 4), q(3, 4))]);
    }

    #[test]
    fn lincomb_merges_knots() {
        let f = tent();
        let g = PlFn::constant(q(1, 1));
        let h = PlFn::lincomb(&q(1, 1), &g, &q(-1, 1), &f);
        assert_eq!(h.eval(&q(1, 2)), q(0, 1));
        assert_eq!(h.sup_norm(), q(1, 1));
    }

    #[test]
    fn max_abs_on_subinterval() {
        assert_eq!(tent().max_abs_on(&q(0, 1), &q(1, 4)), (q(1, 4), q(1, 2)));
        assert_eq!(tent().max_abs_on(&q(1, 4), &q(1, 1)), (q(1, 2), q(1, 1)));
    }
}
