//! Norming functionals and elements, and the Daugavet witness oracles of the
//! function-space models.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{shrink_q, DeskSpace, Functional, Lp, Masses, PlFn, SliceSpec, StepFn, Vector};
use crate::error::{Error, Result};
use crate::norm2::{norming_dual_of, AbsoluteNorm, SpherePoint};
use crate::real::{dyadic, q_to_f64, serde_q, Real, Q};

/// An element `u` of a slice that lies far from `point`, with the quantities
/// that certify it. Everything is recomputed by [`DiametralWitness::check`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiametralWitness {
    pub point: Vector,
    /// The slice the witness belongs to (already widened where a construction
    /// only guarantees a widened slice).
    pub slice: SliceSpec,
    #[serde(with = "serde_q")]
    pub eps: Q,
    pub u: Vector,
    #[serde(with = "serde_q")]
    pub functional_value: Q,
    pub distance: Real,
    pub norm_u: Real,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessCheck {
    pub in_ball: bool,
    pub in_slice: bool,
    pub far_enough: bool,
}

impl WitnessCheck {
    pub fn valid(&self) -> bool {
        self.in_ball && self.in_slice && self.far_enough
    }
}

impl DiametralWitness {
    pub fn build(space: &DeskSpace, point: &Vector, slice: &SliceSpec, eps: &Q, u: Vector) -> Result<Self> {
        let functional_value = space.apply(&slice.functional, &u)?;
        let distance = space.norm(&point.sub(&u)?)?;
        let norm_u = space.norm(&u)?;
        Ok(DiametralWitness {
            point: point.clone(),
            slice: slice.clone(),
            eps: eps.clone(),
            u,
            functional_value,
            distance,
            norm_u,
        })
    }

    /// Recomputes `||u|| <= 1`, `f(u) > 1 - alpha` and `||x - u|| >= 2 - eps`
    /// from the stored vectors (the stored numbers are not trusted).
    pub fn check(&self, space: &DeskSpace) -> Result<WitnessCheck> {
        let norm_u = space.norm(&self.u)?;
        let fu = space.apply(&self.slice.functional, &self.u)?;
        let dist = space.norm(&self.point.sub(&self.u)?)?;
        let target = Real::Exact(Q::from_integer(2.into()) - &self.eps);
        Ok(WitnessCheck {
            in_ball: norm_u.le(&Real::one()),
            in_slice: fu > self.slice.threshold(),
            far_enough: dist.ge(&target),
        })
    }

    pub fn is_valid(&self, space: &DeskSpace) -> bool {
        self.check(space).map(|c| c.valid()).unwrap_or(false)
    }

    /// Returns the witness if it passes [`check`](Self::check), else `VerificationFailed`.
    pub fn verified(self, space: &DeskSpace) -> Result<Self> {
        let c = self.check(space)?;
        if c.valid() {
            Ok(self)
        } else {
            Err(Error::VerificationFailed(format!(
                "in_ball={}, in_slice={}, far_enough={} (distance {}, eps {})",
                c.in_ball,
                c.in_slice,
                c.far_enough,
                self.distance,
                crate::real::format_q(&self.eps)
            )))
        }
    }
}

fn sign(x: &Q) -> Q {
    if x.is_positive() {
        Q::one()
    } else if x.is_negative() {
        -Q::one()
    } else {
        Q::zero()
    }
}

fn first_argmax_abs(xs: &[Q]) -> usize {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate() {
        if x.abs() > xs[best].abs() {
            best = i;
        }
    }
    best
}

/// Coordinates `sign(x_i) |x_i|^(r-1) / ||x||_r^(r-1)`, the gradient of the `l_r` norm.
fn lp_gradient(xs: &[Q], lp: Lp) -> Vec<Q> {
    match lp {
        Lp::One => xs.iter().map(sign).collect(),
        Lp::Inf => {
            let i = first_argmax_abs(xs);
            let mut out = vec![Q::zero(); xs.len()];
            out[i] = sign(&xs[i]);
            out
        }
        Lp::Two => match lp.norm(xs) {
            Real::Exact(n) => xs.iter().map(|x| x / &n).collect(),
            Real::Approx(n) => xs.iter().map(|x| shrink_q(q_to_f64(x) / n)).collect(),
        },
        Lp::Other(r) => {
            let n = lp.norm(xs).to_f64();
            xs.iter()
                .map(|x| {
                    let v = q_to_f64(x);
                    shrink_q(v.signum() * (v.abs() / n).powf(r - 1.0))
                })
                .collect()
        }
    }
}

fn real_to_q_down(x: &Real) -> Q {
    match x {
        Real::Exact(v) => v.clone(),
        Real::Approx(v) => shrink_q(*v),
    }
}

/// A norm-one functional with `f(x) = ||x||`.
pub fn norming_functional(space: &DeskSpace, x: &Vector) -> Result<Functional> {
    space.check_vector(x)?;
    if x.is_zero() {
        return Err(Error::Domain("the zero vector has no norming functional".into()));
    }
    Ok(match (space, x) {
        (DeskSpace::C01Pl { .. }, Vector::Pl(f)) => {
            let (s, v) = f
                .knots()
                .iter()
                .fold(None::<&(Q, Q)>, |best, k| match best {
                    Some(b) if b.1.abs() >= k.1.abs() => Some(b),
                    _ => Some(k),
                })
                .unwrap();
            Functional::point_mass(s.clone(), sign(v))?
        }
        (DeskSpace::L1Step { .. }, Vector::Step(f)) => {
            Functional::Step(StepFn::new(f.breaks().to_vec(), f.heights().iter().map(sign).collect())?)
        }
        (DeskSpace::Finite { p, .. }, Vector::Coords { coords }) => Functional::coords(lp_gradient(coords, Lp::of(p))),
        (DeskSpace::Sum(s), Vector::Pair { pair }) => {
            let (a, b) = (s.x.norm(&pair.0)?, s.y.norm(&pair.1)?);
            let sp = SpherePoint::from_coords(&s.norm, &a, &b)?;
            let dual = norming_dual_of(&s.norm, &sp)?;
            let part = |sp: &DeskSpace, v: &Vector| {
                if v.is_zero() {
                    Ok(sp.zero_functional())
                } else {
                    norming_functional(sp, v)
                }
            };
            Functional::pair(
                part(&s.x, &pair.0)?.scale(&real_to_q_down(&dual.c)),
                part(&s.y, &pair.1)?.scale(&real_to_q_down(&dual.d)),
            )
        }
        _ => unreachable!("checked shape"),
    })
}

/// A sphere point `(a, b)` maximizing `a c + b d`.
fn norming_sphere_point(norm: &AbsoluteNorm, c: &Real, d: &Real) -> (Q, Q) {
    match norm.polygon() {
        Some(p) => {
            let (lo, _) = p.norming_interval(c, d);
            p.sphere_at(&lo)
        }
        None => {
            let pe = norm.smooth_exponent().unwrap();
            let qe = pe / (pe - 1.0);
            let (a, b) = (c.to_f64().powf(qe - 1.0), d.to_f64().powf(qe - 1.0));
            let n = norm.eval_f64(a, b);
            (shrink_q(a / n), shrink_q(b / n))
        }
    }
}

/// An element `u` with `||u|| <= 1` and `f(u) = ||f||` (up to rounding for
/// inexact norms, where the error is on the side of `||u|| <= 1`).
pub fn norming_element(space: &DeskSpace, f: &Functional) -> Result<Vector> {
    space.check_functional(f)?;
    if f.is_zero() {
        return Ok(space.zero_vector());
    }
    Ok(match (space, f) {
        (DeskSpace::C01Pl { .. }, Functional::Masses(m)) => {
            Vector::Pl(PlFn::interpolate(m.items().iter().map(|(s, w)| (s.clone(), sign(w))).collect())?)
        }
        (DeskSpace::L1Step { .. }, Functional::Step(g)) => {
            let top = g.sup_norm();
            let (lo, hi, h) = g.pieces().find(|(_, _, h)| h.abs() == top).unwrap();
            Vector::Step(StepFn::indicator(lo, hi, sign(h) / (hi - lo))?)
        }
        (DeskSpace::Finite { p, .. }, Functional::Coords { coords }) => {
            Vector::coords(lp_gradient(coords, Lp::of(p).conjugate()))
        }
        (DeskSpace::Sum(s), Functional::Pair { pair }) => {
            let (c, d) = (s.x.dual_norm(&pair.0)?, s.y.dual_norm(&pair.1)?);
            let (a, b) = norming_sphere_point(&s.norm, &c, &d);
            Vector::pair(
                norming_element(&s.x, &pair.0)?.scale(&a),
                norming_element(&s.y, &pair.1)?.scale(&b),
            )
        }
        _ => unreachable!("checked shape"),
    })
}

/// For a unit vector `x` of a function-space model, some `u` in the slice with
/// `||x - u|| >= 2 - eps`.
pub fn daugavet_witness(space: &DeskSpace, x: &Vector, slice: &SliceSpec, eps: &Q) -> Result<DiametralWitness> {
    if !space.has_daugavet_oracle() {
        return Err(Error::NoOracle(space.label()));
    }
    if eps.is_negative() {
        return Err(Error::Domain("eps must be nonnegative".into()));
    }
    space.require_unit(x, "point")?;
    space.dual_norm(&slice.functional)?;
    let two = Q::from_integer(2.into());
    let u = if eps >= &two {
        norming_element(space, &slice.functional)?
    } else {
        match (space, x, &slice.functional) {
            (DeskSpace::C01Pl { max_level }, Vector::Pl(xf), Functional::Masses(m)) => {
                Vector::Pl(c01_witness(*max_level, xf, m, eps)?)
            }
            (DeskSpace::L1Step { max_level }, Vector::Step(xf), Functional::Step(g)) => {
                Vector::Step(l1_witness(*max_level, xf, g, eps)?)
            }
            _ => unreachable!("checked shape"),
        }
    };
    DiametralWitness::build(space, x, slice, eps, u)?.verified(space)
}

/// Interpolate `sign(w_j)` at the point masses, and `-sign(x(s*))` on a dyadic
/// interval `J` that avoids every mass and contains a point `s*` with
/// `|x(s*)| >= 1 - eps/2`. `J` is the leftmost such interval at the coarsest level.
fn c01_witness(max_level: u32, x: &PlFn, m: &Masses, eps: &Q) -> Result<PlFn> {
    let level = Q::one() - eps / Q::from_integer(2.into());
    let near_max = x.level_set(&level);
    let hits_mass = |lo: &Q, hi: &Q| m.items().iter().any(|(s, _)| s >= lo && s <= hi);
    for l in 1..=max_level {
        let h = dyadic(l);
        let scale = Q::from_integer(BigInt::one() << l);
        let mut best: Option<BigInt> = None;
        for (g0, g1) in &near_max {
            let mut i = (g0 * &scale).floor().to_integer();
            loop {
                let lo = Q::from_integer(i.clone()) * &h;
                if &lo > g1 || lo >= Q::one() {
                    break;
                }
                if best.as_ref().is_some_and(|b| &i >= b) {
                    break;
                }
                let hi = &lo + &h;
                if &hi >= g0 && !hits_mass(&lo, &hi) {
                    best = Some(i.clone());
                    break;
                }
                i += 1;
            }
        }
        if let Some(i) = best {
            let lo = Q::from_integer(i) * &h;
            let hi = &lo + &h;
            let (s_star, _) = x.max_abs_on(&lo, &hi);
            let target = -sign(&x.eval(&s_star));
            let mut pts: Vec<(Q, Q)> = m.items().iter().map(|(s, w)| (s.clone(), sign(w))).collect();
            pts.push((lo, target.clone()));
            pts.push((hi, target));
            return PlFn::interpolate(pts);
        }
    }
    Err(Error::InfeasibleMesh(format!(
        "no dyadic interval up to level {max_level} avoids the functional's support near the maximum of |x|"
    )))
}

/// Candidate dyadic intervals scanned per level and piece before refining.
const L1_SCAN: usize = 4096;

/// `u = sigma / |I| * chi_I` with `I` a dyadic interval inside a piece where
/// `|g|` is largest and `integral_I |x| <= eps / 2`.
fn l1_witness(max_level: u32, x: &StepFn, g: &StepFn, eps: &Q) -> Result<StepFn> {
    let top = g.sup_norm();
    let budget = eps / Q::from_integer(2.into());
    let pieces: Vec<(Q, Q, Q)> = g
        .pieces()
        .filter(|(_, _, h)| h.abs() == top)
        .map(|(a, b, h)| (a.clone(), b.clone(), sign(h)))
        .collect();
    for l in 0..=max_level {
        let h = dyadic(l);
        let scale = Q::from_integer(BigInt::one() << l);
        for (a, b, sigma) in &pieces {
            let mut i = (a * &scale).ceil().to_integer();
            for _ in 0..L1_SCAN {
                let lo = Q::from_integer(i.clone()) * &h;
                let hi = &lo + &h;
                if &hi > b {
                    break;
                }
                if x.abs_integral_on(&lo, &hi) <= budget {
                    return StepFn::indicator(&lo, &hi, sigma / &h);
                }
                i += 1;
            }
        }
    }
    Err(Error::InfeasibleMesh(format!("no dyadic interval up to level {max_level} is light enough")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::q;

    fn one_c01() -> Vector {
        Vector::Pl(PlFn::constant(q(1, 1)))
    }

    #[test]
    fn c01_example_with_zero_eps() {
        let space = DeskSpace::c01();
        let slice = SliceSpec::new(&space, Functional::point_mass(q(1, 2), q(1, 1)).unwrap(), q(1, 10)).unwrap();
        let w = daugavet_witness(&space, &one_c01(), &slice, &q(0, 1)).unwrap();
        assert_eq!(w.functional_value, q(1, 1));
        assert_eq!(w.distance, Real::Exact(q(2, 1)));
        let Vector::Pl(u) = &w.u else { panic!() };
        assert_eq!(u.eval(&q(1, 2)), q(1, 1));
        // leftmost dyadic interval avoiding 1/2
        assert_eq!(u.eval(&q(1, 8)), q(-1, 1));
    }

    #[test]
    fn l1_example_interval_length() {
        let space = DeskSpace::l1step();
        let x = Vector::Step(StepFn::constant(q(1, 1)));
        let slice = SliceSpec::new(&space, Functional::Step(StepFn::constant(q(1, 1))), q(1, 10)).unwrap();
        let w = daugavet_witness(&space, &x, &slice, &q(1, 10)).unwrap();
        assert_eq!(w.functional_value, q(1, 1));
        assert_eq!(w.distance, Real::Exact(q(31, 16)));
        let Vector::Step(u) = &w.u else { panic!() };
        assert_eq!(u.breaks()[1], q(1, 32));
    }

    #[test]
    fn eps_two_returns_norming_element() {
        let space = DeskSpace::c01();
        let slice = SliceSpec::new(&space, Functional::point_mass(q(1, 3), q(-1, 1)).unwrap(), q(1, 2)).unwrap();
        let w = daugavet_witness(&space, &one_c01(), &slice, &q(2, 1)).unwrap();
        assert_eq!(w.functional_value, q(1, 1));
    }

    #[test]
    fn finite_models_have_no_oracle() {
        let space = DeskSpace::lp(2, 2.0);
        let slice = SliceSpec::new(&space, Functional::coords(vec![q(1, 1), q(0, 1)]), q(1, 10)).unwrap();
        let err = daugavet_witness(&space, &Vector::coords(vec![q(1, 1), q(0, 1)]), &slice, &q(1, 10)).unwrap_err();
        assert_eq!(err.code(), "NoOracle");
    }

    #[test]
    fn norming_functional_examples() {
        assert_eq!(
            norming_functional(&DeskSpace::c01(), &one_c01()).unwrap(),
            Functional::point_mass(q(0, 1), q(1, 1)).unwrap()
        );
        assert_eq!(
            norming_functional(&DeskSpace::lp(2, 2.0), &Vector::coords(vec![q(3, 5), q(4, 5)])).unwrap(),
            Functional::coords(vec![q(3, 5), q(4, 5)])
        );
        let x = StepFn::new(vec![q(0, 1), q(1, 2), q(1, 1)], vec![q(1, 1), q(-1, 1)]).unwrap();
        assert_eq!(
            norming_functional(&DeskSpace::l1step(), &Vector::Step(x.clone())).unwrap(),
            Functional::Step(x)
        );
        assert!(norming_functional(&DeskSpace::c01(), &DeskSpace::c01().zero_vector()).is_err());
    }

    #[test]
    fn norming_functional_on_sums() {
        let z = DeskSpace::sum(AbsoluteNorm::l1(), DeskSpace::c01(), DeskSpace::lp(2, 2.0));
        let v = Vector::pair(one_c01().scale(&q(1, 2)), Vector::coords(vec![q(3, 10), q(2, 5)]));
        let f = norming_functional(&z, &v).unwrap();
        assert_eq!(z.dual_norm(&f).unwrap(), Real::one());
        assert_eq!(Real::Exact(z.apply(&f, &v).unwrap()), z.norm(&v).unwrap());
    }

    #[test]
    fn norming_element_attains_the_norm() {
        let z = DeskSpace::sum(AbsoluteNorm::hex(), DeskSpace::c01(), DeskSpace::lp(2, f64::INFINITY));
        let f = Functional::pair(
            Functional::point_mass(q(1, 3), q(2, 5)).unwrap(),
            Functional::coords(vec![q(1, 5), q(-1, 5)]),
        );
        let u = norming_element(&z, &f).unwrap();
        assert!(z.norm(&u).unwrap().le(&Real::one()));
        assert_eq!(Real::Exact(z.apply(&f, &u).unwrap()), z.dual_norm(&f).unwrap());
    }
}
