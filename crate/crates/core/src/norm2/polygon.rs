//! Exact calculus for absolute norms with a piecewise-linear profile.
//!
//! A convex piecewise-linear profile with knots `(t_i, psi_i)` gives a norm that
//! is the maximum of finitely many linear forms on the positive quadrant: the
//! segment `[t_i, t_{i+1}]` contributes `(c_i, d_i) = (L_i(0), L_i(1))`, where
//! `L_i` is the affine extension of that segment. The unit sphere in the
//! quadrant is the polyline through the vertices `((1 - t_i)/psi_i, t_i/psi_i)`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::real::{q_to_f64, Real, Q};

#[derive(Clone, Debug)]
pub struct Polygon {
    knots: Vec<(Q, Q)>,
    pieces: Vec<(Q, Q)>,
    vertices: Vec<(Q, Q)>,
    pieces_f64: Vec<(f64, f64)>,
}

impl Polygon {
    pub fn new(knots: Vec<(Q, Q)>) -> Result<Self> {
        let bad = |m: String| Error::InvalidProfile(m);
        if knots.len() < 2 {
            return Err(bad("need at least the knots t = 0 and t = 1".into()));
        }
        let one = Q::one();
        let zero = Q::zero();
        if knots[0].0 != zero || knots[knots.len() - 1].0 != one {
            return Err(bad("knots must start at t = 0 and end at t = 1".into()));
        }
        if knots[0].1 != one || knots[knots.len() - 1].1 != one {
            return Err(bad("profile must satisfy psi(0) = psi(1) = 1".into()));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(bad("knot parameters must be strictly increasing".into()));
            }
        }
        for (t, psi) in &knots {
            let lower = if t + t >= one { t.clone() } else { &one - t };
            if psi < &lower || psi > &one {
                return Err(bad(format!(
                    "psi({}) = {} outside [max(1-t,t), 1]",
                    crate::real::format_q(t),
                    crate::real::format_q(psi)
                )));
            }
        }
        let slopes: Vec<Q> = knots
            .windows(2)
            .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))
            .collect();
        for s in slopes.windows(2) {
            if s[1] < s[0] {
                return Err(bad("profile is not convex".into()));
            }
        }
        // drop knots interior to a straight run so that pieces are distinct
        let mut cleaned = vec![knots[0].clone()];
        for i in 1..knots.len() - 1 {
            if slopes[i] != slopes[i - 1] {
                cleaned.push(knots[i].clone());
            }
        }
        cleaned.push(knots[knots.len() - 1].clone());

        let pieces: Vec<(Q, Q)> = cleaned
            .windows(2)
            .map(|w| {
                let slope = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
                let at0 = &w[0].1 - &slope * &w[0].0;
                let at1 = &at0 + &slope;
                (at0, at1)
            })
            .collect();
        let vertices = cleaned
            .iter()
            .map(|(t, psi)| ((&one - t) / psi, t / psi))
            .collect();
        let pieces_f64 = pieces.iter().map(|(c, d)| (q_to_f64(c), q_to_f64(d))).collect();
        Ok(Polygon {
            knots: cleaned,
            pieces,
            vertices,
            pieces_f64,
        })
    }

    pub fn knots(&self) -> &[(Q, Q)] {
        &self.knots
    }

    /// Extreme points of the dual ball in the positive quadrant.
    pub fn pieces(&self) -> &[(Q, Q)] {
        &self.pieces
    }

    /// Sphere vertices, ordered by increasing `t`.
    pub fn vertices(&self) -> &[(Q, Q)] {
        &self.vertices
    }

    pub fn knot_t(&self, i: usize) -> &Q {
        &self.knots[i].0
    }

    pub fn profile(&self, t: &Q) -> Q {
        let i = match self.knots.binary_search_by(|(k, _)| k.cmp(t)) {
            Ok(i) => return self.knots[i].1.clone(),
            Err(i) => i,
        };
        let (t0, p0) = &self.knots[i - 1];
        let (t1, p1) = &self.knots[i];
        p0 + (p1 - p0) * (t - t0) / (t1 - t0)
    }

    pub fn profile_f64(&self, t: f64) -> f64 {
        self.eval_f64(1.0 - t, t)
    }

    pub fn eval(&self, a: &Q, b: &Q) -> Q {
        self.pieces
            .iter()
            .map(|(c, d)| c * a + d * b)
            .max()
            .expect("at least one piece")
    }

    pub fn eval_f64(&self, a: f64, b: f64) -> f64 {
        self.pieces_f64
            .iter()
            .map(|(c, d)| c * a + d * b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn dual(&self, c: &Real, d: &Real) -> Real {
        self.vertices
            .iter()
            .map(|(a, b)| Real::from(a).mul(c).add(&Real::from(b).mul(d)))
            .reduce(|x, y| x.max(&y))
            .expect("at least two vertices")
    }

    /// `(c, d)` of the starred constants: largest `e` with `N(e, 1) = 1` and largest
    /// `f` with `N(1, f) = 1`.
    pub fn star_constants(&self) -> (Q, Q) {
        let one = Q::one();
        let bound = |own: &dyn Fn(&(Q, Q)) -> &Q, other: &dyn Fn(&(Q, Q)) -> &Q| {
            self.pieces
                .iter()
                .filter(|p| own(p).is_positive())
                .map(|p| (&one - other(p)) / own(p))
                .min()
                .map(|m| if m > one { one.clone() } else { m })
                .unwrap_or_else(|| one.clone())
        };
        let c = bound(&|p| &p.0, &|p| &p.1);
        let d = bound(&|p| &p.1, &|p| &p.0);
        (c, d)
    }

    /// Parameter `t = b / (a + b)` of a nonzero point of the quadrant.
    pub fn param_of(a: &Q, b: &Q) -> Q {
        b / (a + b)
    }

    pub fn sphere_at(&self, t: &Q) -> (Q, Q) {
        let psi = self.profile(t);
        ((Q::one() - t) / &psi, t / &psi)
    }

    /// Closed `t`-interval of sphere points diametral to the sphere point `(a, b)`:
    /// the union of the edges whose linear form attains 1 at `(a, b)`.
    pub fn diametral_interval(&self, a: &Q, b: &Q) -> Option<(Q, Q)> {
        let one = Q::one();
        let active: Vec<usize> = (0..self.pieces.len())
            .filter(|&i| {
                let (c, d) = &self.pieces[i];
                c * a + d * b == one
            })
            .collect();
        let first = *active.first()?;
        let last = *active.last()?;
        Some((self.knots[first].0.clone(), self.knots[last + 1].0.clone()))
    }

    /// Closed `t`-interval of sphere points at which the dual pair `(c, d)`
    /// attains its maximum over the sphere (the norming set).
    pub fn norming_interval(&self, c: &Real, d: &Real) -> (Q, Q) {
        let values: Vec<Real> = self
            .vertices
            .iter()
            .map(|(a, b)| Real::from(a).mul(c).add(&Real::from(b).mul(d)))
            .collect();
        let max = values.iter().cloned().reduce(|x, y| x.max(&y)).unwrap();
        let hits: Vec<usize> = (0..values.len())
            .filter(|&j| values[j].approx_eq(&max))
            .collect();
        let first = *hits.first().unwrap();
        let last = *hits.last().unwrap();
        (self.knots[first].0.clone(), self.knots[last].0.clone())
    }

    /// Knot parameters strictly inside `(lo, hi)`.
    pub fn knots_between<'a>(&'a self, lo: &'a Q, hi: &'a Q) -> impl Iterator<Item = &'a Q> + 'a {
        self.knots
            .iter()
            .map(|(t, _)| t)
            .filter(move |t| *t > lo && *t < hi)
    }

    /// A dual extreme point `(c, d)` norming the sphere point `(a, b)`; among
    /// several, the one with the largest `c`.
    pub fn norming_dual(&self, a: &Q, b: &Q) -> (Q, Q) {
        let one = Q::one();
        self.pieces
            .iter()
            .filter(|(c, d)| c * a + d * b == one)
            .max_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(&y.1)))
            .cloned()
            .expect("every sphere point is normed by some piece")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::q;

    fn hex() -> Polygon {
        Polygon::new(vec![
            (q(0, 1), q(1, 1)),
            (q(1, 5), q(4, 5)),
            (q(4, 5), q(4, 5)),
            (q(1, 1), q(1, 1)),
        ])
        .unwrap()
    }

    #[test]
    fn hex_pieces_are_the_three_forms() {
        let h = hex();
        assert_eq!(
            h.pieces(),
            &[(q(1, 1), q(0, 1)), (q(4, 5), q(4, 5)), (q(0, 1), q(1, 1))]
        );
        assert_eq!(h.eval(&q(1, 1), &q(1, 1)), q(8, 5));
    }

    #[test]
    fn collinear_knots_are_merged() {
        let p = Polygon::new(vec![(q(0, 1), q(1, 1)), (q(1, 2), q(1, 1)), (q(1, 1), q(1, 1))]).unwrap();
        assert_eq!(p.pieces().len(), 1);
    }

    #[test]
    fn rejects_nonconvex_and_out_of_range() {
        assert!(Polygon::new(vec![(q(0, 1), q(1, 1)), (q(1, 2), q(3, 5)), (q(3, 5), q(3, 5)), (q(1, 1), q(1, 1))]).is_ok());
        // dips below max(1-t, t)
        assert!(Polygon::new(vec![(q(0, 1), q(1, 1)), (q(1, 2), q(2, 5)), (q(1, 1), q(1, 1))]).is_err());
        // redundant collinear knots
        assert!(Polygon::new(vec![
            (q(0, 1), q(1, 1)),
            (q(1, 4), q(3, 4)),
            (q(1, 2), q(3, 4)),
            (q(3, 4), q(3, 4)),
            (q(7, 8), q(7, 8)),
            (q(1, 1), q(1, 1)),
        ])
        .is_ok());
        assert!(Polygon::new(vec![(q(0, 1), q(1, 1)), (q(1, 4), q(9, 10)), (q(1, 2), q(1, 2)), (q(1, 1), q(1, 1))]).is_err());
    }

    #[test]
    fn diametral_interval_of_hex_targets() {
        let h = hex();
        assert_eq!(h.diametral_interval(&q(1, 4), &q(1, 1)), Some((q(1, 5), q(1, 1))));
        assert_eq!(h.diametral_interval(&q(1, 1), &q(1, 4)), Some((q(0, 1), q(4, 5))));
    }
}
