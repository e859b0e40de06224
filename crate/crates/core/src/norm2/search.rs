//! Sphere searches: the starred constants, property (beta), the
//! alpha/A-octahedral classifier and the `(k, l)` selection.
//!
//! Piecewise-linear norms are solved exactly on their edges. Smooth norms are
//! scanned on a dyadic grid of `t` with bisection polish at the boundaries.

use super::{AbsoluteNorm, DualFunctional2, NormClassification, Polygon, SpherePoint};
use crate::error::{Error, Result};
use crate::real::{Real, Q, TOL};

const GRID_BITS: u32 = 16;
const POLISH_STEPS: usize = 40;

pub fn star_constants(norm: &AbsoluteNorm) -> (Real, Real) {
    match norm.polygon() {
        Some(p) => {
            let (c, d) = p.star_constants();
            (Real::Exact(c), Real::Exact(d))
        }
        // N(e, 1) > 1 for every e > 0 when 1 < p < inf
        None => (Real::zero(), Real::zero()),
    }
}

fn sphere_f64(norm: &AbsoluteNorm, t: f64) -> (f64, f64) {
    let psi = norm.eval_f64(1.0 - t, t);
    ((1.0 - t) / psi, t / psi)
}

/// `t`-interval where `pred` holds, assuming the set is an interval.
fn grid_interval(pred: impl Fn(f64) -> bool) -> Option<(f64, f64)> {
    let n = 1usize << GRID_BITS;
    let ts = |j: usize| j as f64 / n as f64;
    let first = (0..=n).find(|&j| pred(ts(j)))?;
    let last = (first..=n).rev().find(|&j| pred(ts(j)))?;
    let polish = |mut inside: f64, mut outside: f64| {
        for _ in 0..POLISH_STEPS {
            let mid = 0.5 * (inside + outside);
            if pred(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    let lo = if first == 0 { 0.0 } else { polish(ts(first), ts(first - 1)) };
    let hi = if last == n { 1.0 } else { polish(ts(last), ts(last + 1)) };
    Some((lo, hi))
}

fn smooth_diametral_interval(norm: &AbsoluteNorm, target: (f64, f64)) -> Option<(f64, f64)> {
    grid_interval(|t| {
        let (a, b) = sphere_f64(norm, t);
        norm.eval_f64(a + target.0, b + target.1) >= 2.0 - TOL
    })
}

fn intersect<T: PartialOrd + Clone>(x: (T, T), y: (T, T)) -> Option<(T, T)> {
    let lo = if x.0 >= y.0 { x.0 } else { y.0 };
    let hi = if x.1 <= y.1 { x.1 } else { y.1 };
    (lo <= hi).then_some((lo, hi))
}

/// Sphere points diametral to both targets, as a `t`-interval; the canonical
/// representative is its midpoint.
fn common_diametral(norm: &AbsoluteNorm, t1: (&Real, &Real), t2: (&Real, &Real)) -> Option<SpherePoint> {
    match norm.polygon() {
        Some(p) => {
            let on_sphere = |a: &Real, b: &Real| -> Option<(Q, Q)> {
                let sp = SpherePoint::from_coords(norm, a, b).ok()?;
                sp.exact_coords()
            };
            let (a1, b1) = on_sphere(t1.0, t1.1)?;
            let (a2, b2) = on_sphere(t2.0, t2.1)?;
            let (lo, hi) = intersect(p.diametral_interval(&a1, &b1)?, p.diametral_interval(&a2, &b2)?)?;
            let mid = (lo + hi) / Q::from_integer(2.into());
            SpherePoint::at(norm, &Real::Exact(mid)).ok()
        }
        None => {
            let n1 = norm.eval(t1.0, t1.1).ok()?.to_f64();
            let n2 = norm.eval(t2.0, t2.1).ok()?.to_f64();
            let i1 = smooth_diametral_interval(norm, (t1.0.to_f64() / n1, t1.1.to_f64() / n1))?;
            let i2 = smooth_diametral_interval(norm, (t2.0.to_f64() / n2, t2.1.to_f64() / n2))?;
            let (lo, hi) = intersect(i1, i2)?;
            SpherePoint::at(norm, &Real::Approx(0.5 * (lo + hi))).ok()
        }
    }
}

/// A sphere pair `(a, b)` diametral to both `(0, 1)` and `(1, 0)`, if any.
pub fn has_beta(norm: &AbsoluteNorm) -> Option<SpherePoint> {
    common_diametral(norm, (&Real::zero(), &Real::one()), (&Real::one(), &Real::zero()))
}

/// Property (alpha) versus A-octahedrality, via the `eps = 0` form of (alpha).
pub fn classify(norm: &AbsoluteNorm) -> NormClassification {
    let (c, d) = star_constants(norm);
    match common_diametral(norm, (&c, &Real::one()), (&Real::one(), &d)) {
        Some(pair) => NormClassification::Aoh {
            pair,
            c,
            d,
            beta: has_beta(norm).is_some(),
        },
        None => NormClassification::Alpha { c, d },
    }
}

/// A point `(k, l)` on the sphere with `N((a, b) + (k, l)) = 2` and
/// `k c* + l d* = 1`, for an A-octahedral norm with witnessing pair `ab`.
pub fn find_kl(norm: &AbsoluteNorm, ab: &SpherePoint, dual: &DualFunctional2) -> Result<SpherePoint> {
    if !classify(norm).is_aoh() {
        return Err(Error::NotAoh);
    }
    find_kl_unchecked(norm, ab, dual)
}

/// [`find_kl`] without the classifier gate, for any sphere point `ab`.
/// Among admissible points the lexicographic maximum of `(k, l)` is returned.
pub fn find_kl_unchecked(norm: &AbsoluteNorm, ab: &SpherePoint, dual: &DualFunctional2) -> Result<SpherePoint> {
    match norm.polygon() {
        Some(p) => poly_find_kl(p, ab, dual),
        None => {
            let (a, b) = (ab.a.to_f64(), ab.b.to_f64());
            let diam = smooth_diametral_interval(norm, (a, b))
                .ok_or_else(|| Error::Infeasible("empty diametral set".into()))?;
            let (c, d) = (dual.c.to_f64(), dual.d.to_f64());
            let norming = grid_interval(|t| {
                let (k, l) = sphere_f64(norm, t);
                k * c + l * d >= 1.0 - TOL
            })
            .ok_or_else(|| Error::Infeasible("empty norming set".into()))?;
            let (lo, _) = intersect(diam, norming).ok_or_else(|| {
                Error::Infeasible("diametral and norming sets are disjoint".into())
            })?;
            SpherePoint::at(norm, &Real::Approx(lo))
        }
    }
}

fn poly_find_kl(p: &Polygon, ab: &SpherePoint, dual: &DualFunctional2) -> Result<SpherePoint> {
    let (a, b) = (ab.a.to_q(), ab.b.to_q());
    let diam = p
        .diametral_interval(&a, &b)
        .ok_or_else(|| Error::Infeasible("point is not on the sphere".into()))?;
    let norming = p.norming_interval(&dual.c, &dual.d);
    let (lo, hi) = intersect(diam, norming)
        .ok_or_else(|| Error::Infeasible("diametral and norming sets are disjoint".into()))?;
    let mut candidates = vec![lo.clone(), hi.clone()];
    candidates.extend(p.knots_between(&lo, &hi).cloned());
    candidates
        .iter()
        .map(|t| p.sphere_at(t))
        .max_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(&y.1)))
        .map(|(k, l)| {
            let t = Polygon::param_of(&k, &l);
            SpherePoint {
                t: Real::Exact(t),
                a: Real::Exact(k),
                b: Real::Exact(l),
            }
        })
        .ok_or_else(|| Error::Infeasible("no candidate".into()))
}

/// A norm-one dual pair `(c, d)` with `a c + b d = 1` for the sphere point `(a, b)`.
pub fn norming_dual_of(norm: &AbsoluteNorm, sp: &SpherePoint) -> Result<DualFunctional2> {
    match (norm.polygon(), sp.exact_coords()) {
        (Some(p), Some((a, b))) => {
            let (c, d) = p.norming_dual(&a, &b);
            Ok(DualFunctional2 { c: Real::Exact(c), d: Real::Exact(d) })
        }
        _ => {
            let (a, b) = (sp.a.to_f64(), sp.b.to_f64());
            let (c, d) = match norm.smooth_exponent() {
                Some(pe) => (a.powf(pe - 1.0), b.powf(pe - 1.0)),
                None => {
                    // inexact point on a polygon: use the exact nearby sphere point
                    let t = sp.t.to_q();
                    let (ka, kb) = norm.polygon().unwrap().sphere_at(&t);
                    let (c, d) = norm.polygon().unwrap().norming_dual(&ka, &kb);
                    return Ok(DualFunctional2 { c: Real::Exact(c), d: Real::Exact(d) });
                }
            };
            DualFunctional2::normalized(norm, &Real::Approx(c), &Real::Approx(d))
        }
    }
}
