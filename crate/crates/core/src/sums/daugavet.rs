//! Daugavet points of absolute sums built from Daugavet points of the
//! summands, and the transfer of witnesses from a sum back to a summand.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{Component, Guarantee, Oracle, PointOracle};
use crate::error::{Error, Result};
use crate::norm2::{classify, find_kl, flatness_delta, star_constants, AbsoluteNorm, DualFunctional2, SpherePoint};
use crate::real::{format_q, min_q, q_from_f64, Real, Q};
use crate::spaces::{norming_element, DeskSpace, DiametralWitness, Functional, SliceSpec, Vector};

/// Which construction a sum point came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumRule {
    /// A-octahedral norm, coefficients from a pair satisfying the diametral
    /// equations with the starred constants.
    Aoh,
    /// `l_inf` sum with an arbitrary second coefficient; only the first
    /// summand needs an oracle.
    LinfAnyB,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    X,
    Y,
}

/// `(a x, b y)` in `X (+)_N Y` with its witness oracle.
#[derive(Clone, Debug)]
pub struct AohSumPoint {
    pub space: DeskSpace,
    pub point: Vector,
    pub a: Q,
    pub b: Q,
    pub x: Component,
    pub y: Component,
    pub rule: SumRule,
}

fn two() -> Q {
    Q::from_integer(2.into())
}

impl AohSumPoint {
    pub fn norm(&self) -> &AbsoluteNorm {
        &self.space.as_sum().expect("sum space").norm
    }

    pub fn into_oracle(self) -> Oracle {
        Arc::new(self)
    }
}

impl PointOracle for AohSumPoint {
    fn space(&self) -> &DeskSpace {
        &self.space
    }
    fn point(&self) -> &Vector {
        &self.point
    }
    fn guarantee(&self) -> Guarantee {
        Guarantee::Daugavet
    }
    fn witness(&self, slice: &SliceSpec, eps: &Q) -> Result<DiametralWitness> {
        sum_daugavet_witness(self, slice, eps)
    }
}

/// `(a x, b y)` with `(a, b)` the classifier's A-octahedral pair.
pub fn aoh_daugavet_point(norm: &AbsoluteNorm, x: Component, y: Component) -> Result<AohSumPoint> {
    let cls = classify(norm);
    let pair = cls.pair().ok_or(Error::NotAoh)?;
    let (a, b) = pair
        .exact_coords()
        .ok_or_else(|| Error::Domain("classifier pair is not exact; use a rational profile".into()))?;
    aoh_daugavet_point_with_pair(norm, x, y, a, b)
}

/// Same with a caller-supplied pair, which must satisfy
/// `N(a, b) = 1`, `N(a + c, b + 1) = 2` and `N(a + 1, b + d) = 2` exactly.
pub fn aoh_daugavet_point_with_pair(norm: &AbsoluteNorm, x: Component, y: Component, a: Q, b: Q) -> Result<AohSumPoint> {
    if !classify(norm).is_aoh() {
        return Err(Error::NotAoh);
    }
    if a.is_negative() || b.is_negative() {
        return Err(Error::Domain("pair must be nonnegative".into()));
    }
    let (c, d) = star_constants(norm);
    let (ra, rb) = (Real::Exact(a.clone()), Real::Exact(b.clone()));
    let on_sphere = norm.eval(&ra, &rb)?.approx_eq(&Real::one());
    let first = norm.eval(&ra.add(&c), &rb.add(&Real::one()))?.approx_eq(&Real::int(2));
    let second = norm.eval(&ra.add(&Real::one()), &rb.add(&d))?.approx_eq(&Real::int(2));
    if !(on_sphere && first && second) {
        return Err(Error::Domain(format!(
            "({}, {}) does not satisfy the diametral equations with the starred constants",
            format_q(&a),
            format_q(&b)
        )));
    }
    x.space.require_unit(&x.vector, "x")?;
    y.space.require_unit(&y.vector, "y")?;
    if a.is_positive() {
        x.daugavet_oracle("X")?;
    }
    if b.is_positive() {
        y.daugavet_oracle("Y")?;
    }
    Ok(build(norm.clone(), x, y, a, b, SumRule::Aoh))
}

/// `(x, b y)` in `X (+)_inf Y` for any `b` in `[0, 1]`; only `x` needs an oracle.
pub fn linf_daugavet_point(x: Component, b: Q, y: Component) -> Result<AohSumPoint> {
    if b.is_negative() || b > Q::one() {
        return Err(Error::Domain("b must lie in [0, 1]".into()));
    }
    x.space.require_unit(&x.vector, "x")?;
    y.space.require_unit(&y.vector, "y")?;
    x.daugavet_oracle("X")?;
    Ok(build(AbsoluteNorm::linf(), x, y, Q::one(), b, SumRule::LinfAnyB))
}

fn build(norm: AbsoluteNorm, x: Component, y: Component, a: Q, b: Q, rule: SumRule) -> AohSumPoint {
    let space = DeskSpace::sum(norm, x.space.clone(), y.space.clone());
    let point = Vector::pair(x.vector.scale(&a), y.vector.scale(&b));
    AohSumPoint {
        space,
        point,
        a,
        b,
        x,
        y,
        rule,
    }
}

/// Element of the component slice `S(g/||g||, width)` far from the component
/// vector, or a substitute when the component does not need an oracle.
fn component_element(comp: &Component, side: &str, coeff: &Q, g: &Functional, width: &Q, delta: &Q, use_oracle: bool) -> Result<Vector> {
    let gn = comp.space.dual_norm(g)?;
    if !use_oracle || coeff.is_zero() {
        if gn.is_zero() {
            return Ok(comp.vector.clone());
        }
        let scale = crate::spaces::recip_down(&gn)?;
        return norming_element(&comp.space, &g.scale(&scale));
    }
    if gn.is_zero() {
        return Ok(comp.vector.neg());
    }
    let oracle = comp.daugavet_oracle(side)?;
    let slice = SliceSpec::normalized(&comp.space, g, width.clone())?;
    Ok(oracle.witness(&slice, delta)?.u)
}

/// Witness for a slice of the sum, assembled from component witnesses.
pub fn sum_daugavet_witness(p: &AohSumPoint, slice: &SliceSpec, eps: &Q) -> Result<DiametralWitness> {
    let z = &p.space;
    z.check_functional(&slice.functional)?;
    if !eps.is_positive() {
        return Err(Error::Domain("eps must be positive".into()));
    }
    if *eps >= two() {
        let u = norming_element(z, &slice.functional)?;
        return DiametralWitness::build(z, &p.point, slice, eps, u)?.verified(z);
    }
    let (fx, fy) = slice.functional.as_pair()?;
    let norm = p.norm();
    let w = match p.rule {
        SumRule::LinfAnyB => {
            let u = component_element(&p.x, "X", &p.a, fx, &slice.alpha, eps, true)?;
            let v = component_element(&p.y, "Y", &p.b, fy, &slice.alpha, eps, false)?;
            Vector::pair(u, v)
        }
        SumRule::Aoh => {
            // delta N(1, 1) <= eps / 2
            let delta = eps / Q::from_integer(4.into());
            let half = &slice.alpha / two();
            let nx = p.x.space.dual_norm(fx)?;
            let ny = p.y.space.dual_norm(fy)?;
            let ab = SpherePoint {
                t: Real::Exact(&p.b / (&p.a + &p.b)),
                a: Real::Exact(p.a.clone()),
                b: Real::Exact(p.b.clone()),
            };
            let kl = find_kl(norm, &ab, &DualFunctional2 { c: nx, d: ny })?;
            let k = real_down(&kl.a)?;
            let l = real_down(&kl.b)?;
            let u = component_element(&p.x, "X", &p.a, fx, &half, &delta, true)?;
            let v = component_element(&p.y, "Y", &p.b, fy, &half, &delta, true)?;
            Vector::pair(u.scale(&k), v.scale(&l))
        }
    };
    DiametralWitness::build(z, &p.point, slice, eps, w)?.verified(z)
}

fn real_down(x: &Real) -> Result<Q> {
    match x {
        Real::Exact(v) => Ok(v.clone()),
        Real::Approx(v) => q_from_f64(v * (1.0 - 1e-12)),
    }
}

/// Witness in a summand, obtained from the sum oracle through the functional
/// `(x*, 0)` (or `(0, y*)`), for the normalized component of the sum point.
pub fn component_witness_from_sum(oracle: &dyn PointOracle, which: Which, slice: &SliceSpec, eps: &Q) -> Result<DiametralWitness> {
    if oracle.guarantee() != Guarantee::Daugavet {
        return Err(Error::MissingOracle("sum point has no Daugavet oracle".into()));
    }
    let z = oracle.space();
    let s = z.as_sum()?;
    let (px, py) = oracle.point().as_pair()?;
    let (cspace, cvec, ospace, ovec) = match which {
        Which::X => (&s.x, px, &s.y, py),
        Which::Y => (&s.y, py, &s.x, px),
    };
    cspace.check_functional(&slice.functional)?;
    if cvec.is_zero() {
        return Err(Error::ZeroComponent);
    }
    if !eps.is_positive() {
        return Err(Error::Domain("eps must be positive".into()));
    }
    let m = cspace.norm(cvec)?;
    let other = ospace.norm(ovec)?;
    let norm = &s.norm;
    let half_eps = eps / two();
    let mut delta = if norm.is_linf() {
        if other.ge(&Real::one()) {
            return Err(Error::NotApplicable(
                "l_inf sum with both components of norm 1: only one of them is guaranteed".into(),
            ));
        }
        let slack = real_down(&Real::one().sub(&other))? / two();
        min_q(min_q(&half_eps, &slice.alpha), &slack).clone()
    } else {
        let bound = real_down(&m.mul(&Real::Exact(half_eps.clone())))?;
        let fd = flatness_delta(norm, &bound)?;
        min_q(min_q(&fd, &half_eps), &slice.alpha).clone()
    };
    if !norm.is_linf() {
        let n11 = norm.n11();
        while !Real::Exact(Q::one() - &delta).mul(&n11).gt(&Real::one()) {
            delta /= two();
        }
    }
    let zero = match which {
        Which::X => s.y.zero_functional(),
        Which::Y => s.x.zero_functional(),
    };
    let lifted = match which {
        Which::X => Functional::pair(slice.functional.clone(), zero),
        Which::Y => Functional::pair(zero, slice.functional.clone()),
    };
    let lifted = SliceSpec::new(z, lifted, delta.clone())?;
    let w = oracle.witness(&lifted, &delta)?;
    let (ux, uy) = w.u.as_pair()?;
    let u = match which {
        Which::X => ux,
        Which::Y => uy,
    };
    let target = if m.approx_eq(&Real::one()) && m.is_exact() {
        cvec.clone()
    } else {
        cvec.scale(&crate::spaces::recip_down(&m)?)
    };
    let un = cspace.norm(u)?;
    let u = if norm.is_linf() || un.is_zero() {
        u.clone()
    } else {
        u.scale(&crate::spaces::recip_down(&un)?)
    };
    DiametralWitness::build(cspace, &target, slice, eps, u)?.verified(cspace)
}
