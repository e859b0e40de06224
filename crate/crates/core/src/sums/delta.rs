//! Delta_k-points: the `l_1` construction `((1 - 1/k) x, y/k)`, and `l_inf`
//! sums of a Delta_p-point and a Delta_q-point with `1/p + 1/q = 1`.

use std::sync::Arc;

use num_traits::{One, Signed};
use serde_json::json;

use super::{check_conjugate, Component, Guarantee, Oracle, PointOracle};
use crate::error::{Error, Result};
use crate::norm2::AbsoluteNorm;
use crate::real::{format_q, Real, Q};
use crate::spaces::{recip_down, norming_element, CertKind, DeskSpace, DiametralWitness, Functional, NonDeltaCertificate, SliceSpec, Vector};

fn two() -> Q {
    Q::from_integer(2.into())
}

/// `z = ((1 - 1/k) x, y/k)` in `X (+)_1 Y`, where `y` has a Delta (or
/// Daugavet) oracle. `x` is any unit vector.
#[derive(Clone, Debug)]
pub struct DeltaKPoint {
    pub k: Q,
    pub space: DeskSpace,
    pub point: Vector,
    pub x: Component,
    pub y: Component,
}

impl DeltaKPoint {
    pub fn new(k: Q, x: Component, y: Component) -> Result<Self> {
        if k <= Q::one() {
            return Err(Error::Domain("k must exceed 1".into()));
        }
        x.space.require_unit(&x.vector, "x")?;
        y.space.require_unit(&y.vector, "y")?;
        y.delta_oracle("Y", &Q::one())?;
        let space = DeskSpace::sum(AbsoluteNorm::l1(), x.space.clone(), y.space.clone());
        let kinv = k.recip();
        let point = Vector::pair(x.vector.scale(&(Q::one() - &kinv)), y.vector.scale(&kinv));
        Ok(DeltaKPoint { k, space, point, x, y })
    }

    pub fn into_oracle(self) -> Oracle {
        Arc::new(self)
    }
}

impl PointOracle for DeltaKPoint {
    fn space(&self) -> &DeskSpace {
        &self.space
    }
    fn point(&self) -> &Vector {
        &self.point
    }
    fn guarantee(&self) -> Guarantee {
        Guarantee::DeltaK { k: self.k.clone() }
    }
    fn witness(&self, slice: &SliceSpec, eps: &Q) -> Result<DiametralWitness> {
        deltak_witness_l1(self, slice, eps)
    }
}

/// For a slice `S(f, alpha)` containing `z`, returns `(0, v)` in the widened
/// slice `S(f, k alpha)` with `||z - (0, v)|| >= 2 - eps`.
pub fn deltak_witness_l1(p: &DeltaKPoint, slice: &SliceSpec, eps: &Q) -> Result<DiametralWitness> {
    let z = &p.space;
    z.check_functional(&slice.functional)?;
    if !eps.is_positive() {
        return Err(Error::Domain("eps must be positive".into()));
    }
    if !slice.contains(z, &p.point)? {
        return Err(Error::SliceDoesNotContainPoint);
    }
    let wide = slice.with_alpha(&p.k * &slice.alpha);
    let (_, g) = slice.functional.as_pair()?;
    let ys = &p.y.space;
    let v = if *eps >= two() {
        p.y.vector.clone()
    } else {
        // g(y) > 1 - k alpha follows from f(z) > 1 - alpha
        let gn = ys.dual_norm(g)?;
        let target = Q::one() - wide.alpha.clone();
        if gn.is_zero() {
            p.y.vector.neg()
        } else {
            let s = recip_down(&gn)?;
            let width = Q::one() - &s * &target;
            let ys_slice = SliceSpec::new(ys, g.scale(&s), width)?;
            let oracle = p.y.delta_oracle("Y", &Q::one())?;
            oracle.witness(&ys_slice, eps)?.u
        }
    };
    let u = Vector::pair(p.x.space.zero_vector(), v);
    DiametralWitness::build(z, &p.point, &wide, eps, u)?.verified(z)
}

/// `(x, y)` in `X (+)_inf Y` from a Delta_p-point `x` and a Delta_q-point `y`.
#[derive(Clone, Debug)]
pub struct InftyDeltaPoint {
    pub p: Q,
    pub q: Q,
    pub space: DeskSpace,
    pub point: Vector,
    pub x: Component,
    pub y: Component,
}

impl InftyDeltaPoint {
    pub fn new(p: Q, x: Oracle, q: Q, y: Oracle) -> Result<Self> {
        check_conjugate(&p, &q)?;
        let x = Component::from_oracle(x);
        let y = Component::from_oracle(y);
        x.delta_oracle("X", &p)?;
        y.delta_oracle("Y", &q)?;
        x.space.require_unit(&x.vector, "x")?;
        y.space.require_unit(&y.vector, "y")?;
        let space = DeskSpace::sum(AbsoluteNorm::linf(), x.space.clone(), y.space.clone());
        let point = Vector::pair(x.vector.clone(), y.vector.clone());
        Ok(InftyDeltaPoint { p, q, space, point, x, y })
    }

    pub fn into_oracle(self) -> Oracle {
        Arc::new(self)
    }
}

impl PointOracle for InftyDeltaPoint {
    fn space(&self) -> &DeskSpace {
        &self.space
    }
    fn point(&self) -> &Vector {
        &self.point
    }
    fn guarantee(&self) -> Guarantee {
        Guarantee::DeltaK { k: Q::one() }
    }
    fn witness(&self, slice: &SliceSpec, eps: &Q) -> Result<DiametralWitness> {
        infty_delta_witness(self, slice, eps)
    }
}

/// Far element of the component for the branch that gets the oracle: the
/// component slice is `S(g/||g||, w)` with `w` chosen so that its `r`-times
/// widening is `{ g > ||g|| - alpha }`.
fn branch(comp: &Component, side: &str, r: &Q, g: &Functional, alpha: &Q, eps: &Q) -> Result<Vector> {
    let gn = comp.space.dual_norm(g)?;
    if gn.is_zero() {
        return Ok(comp.vector.neg());
    }
    let s = recip_down(&gn)?;
    let gq = match &gn {
        Real::Exact(v) => v.clone(),
        Real::Approx(v) => crate::real::q_from_f64(*v)?,
    };
    let w = (Q::one() - &s * (&gq - alpha)) / r;
    let slice = SliceSpec::new(&comp.space, g.scale(&s), w)?;
    Ok(comp.delta_oracle(side, r)?.witness(&slice, eps)?.u)
}

fn norming_or_self(comp: &Component, g: &Functional) -> Result<Vector> {
    let gn = comp.space.dual_norm(g)?;
    if gn.is_zero() {
        return Ok(comp.vector.clone());
    }
    norming_element(&comp.space, &g.scale(&recip_down(&gn)?))
}

/// Witness for a slice containing `(x, y)`: if `alpha - (||y*|| - y*(y)) <= alpha/p`
/// the `X` oracle is used, otherwise the `Y` oracle; the other coordinate is a
/// norming element.
pub fn infty_delta_witness(pt: &InftyDeltaPoint, slice: &SliceSpec, eps: &Q) -> Result<DiametralWitness> {
    check_conjugate(&pt.p, &pt.q)?;
    let z = &pt.space;
    z.check_functional(&slice.functional)?;
    if !eps.is_positive() {
        return Err(Error::Domain("eps must be positive".into()));
    }
    if !slice.contains(z, &pt.point)? {
        return Err(Error::SliceDoesNotContainPoint);
    }
    if *eps >= two() {
        let u = norming_element(z, &slice.functional)?;
        return DiametralWitness::build(z, &pt.point, slice, eps, u)?.verified(z);
    }
    let (gx, gy) = slice.functional.as_pair()?;
    let ny = pt.y.space.dual_norm(gy)?;
    let gy_at = Real::Exact(pt.y.space.apply(gy, &pt.y.vector)?);
    let alpha = Real::Exact(slice.alpha.clone());
    let lhs = alpha.sub(&ny.sub(&gy_at));
    let rhs = Real::Exact(&slice.alpha / &pt.p);
    let u = if lhs.le(&rhs) {
        Vector::pair(branch(&pt.x, "X", &pt.p, gx, &slice.alpha, eps)?, norming_or_self(&pt.y, gy)?)
    } else {
        Vector::pair(norming_or_self(&pt.x, gx)?, branch(&pt.y, "Y", &pt.q, gy, &slice.alpha, eps)?)
    };
    DiametralWitness::build(z, &pt.point, slice, eps, u)?.verified(z)
}

/// Non-Delta_p and non-Delta_q certificates with a common gap give a non-Delta
/// certificate for `(x, y)` in the `l_inf` sum, with
/// `lambda = q alpha_2 / (p alpha_1 + q alpha_2)`.
pub fn combine_non_deltak_certificates(p: &Q, cert_x: &NonDeltaCertificate, q: &Q, cert_y: &NonDeltaCertificate) -> Result<NonDeltaCertificate> {
    check_conjugate(p, q)?;
    if cert_x.k != *p || cert_y.k != *q {
        return Err(Error::ParameterMismatch(format!(
            "widenings ({}, {}) do not match (p, q) = ({}, {})",
            format_q(&cert_x.k),
            format_q(&cert_y.k),
            format_q(p),
            format_q(q)
        )));
    }
    if cert_x.eps != cert_y.eps {
        return Err(Error::ParameterMismatch("certificates need a common gap; shrink first".into()));
    }
    let (a1, a2) = (&cert_x.alpha, &cert_y.alpha);
    if !a1.is_positive() || !a2.is_positive() {
        return Err(Error::Domain("widths must be positive".into()));
    }
    let lambda = q * a2 / (p * a1 + q * a2);
    let rest = Q::one() - &lambda;
    let alpha = &lambda * a1 + &rest * a2;
    let f = Functional::pair(cert_x.functional.scale(&lambda), cert_y.functional.scale(&rest));
    let mut c = NonDeltaCertificate::new(CertKind::NonDelta, f, alpha, cert_x.eps.clone(), Q::one())?;
    c.trace.insert("lambda".into(), json!(format_q(&lambda)));
    c.trace.insert("p".into(), json!(format_q(p)));
    c.trace.insert("q".into(), json!(format_q(q)));
    c.trace.insert("input_x".into(), serde_json::to_value(cert_x)?);
    c.trace.insert("input_y".into(), serde_json::to_value(cert_y)?);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::q;
    use crate::spaces::{non_delta_certificate_with_alpha, PlFn};

    fn l2() -> DeskSpace {
        DeskSpace::lp(2, 2.0)
    }

    fn e1() -> Vector {
        Vector::coords(vec![q(1, 1), q(0, 1)])
    }

    fn deltak(k: Q) -> DeltaKPoint {
        let x = Component::plain(l2(), e1()).unwrap();
        let y = Component::new(DeskSpace::c01(), Vector::Pl(PlFn::constant(q(1, 1)))).unwrap();
        DeltaKPoint::new(k, x, y).unwrap()
    }

    #[test]
    fn deltak_example() {
        let p = deltak(q(2, 1));
        // (0, delta_{1/2}) does not contain z; mixing in e1* does
        let f = Functional::pair(Functional::coords(vec![q(1, 1), q(0, 1)]), Functional::point_mass(q(1, 2), q(1, 1)).unwrap());
        let slice = SliceSpec::new(&p.space, f, q(1, 10)).unwrap();
        let w = deltak_witness_l1(&p, &slice, &q(1, 5)).unwrap();
        assert!(w.is_valid(&p.space));
        assert_eq!(w.slice.alpha, q(1, 5));
        let bad = SliceSpec::new(&p.space, Functional::pair(Functional::coords(vec![q(0, 1), q(0, 1)]), Functional::point_mass(q(1, 2), q(1, 1)).unwrap()), q(1, 10)).unwrap();
        assert!(matches!(deltak_witness_l1(&p, &bad, &q(1, 5)), Err(Error::SliceDoesNotContainPoint)));
    }

    #[test]
    fn nested_linf_of_deltak_points() {
        let pt = InftyDeltaPoint::new(q(2, 1), deltak(q(2, 1)).into_oracle(), q(2, 1), deltak(q(2, 1)).into_oracle()).unwrap();
        let side = Functional::pair(Functional::coords(vec![q(1, 1), q(0, 1)]), Functional::point_mass(q(0, 1), q(1, 1)).unwrap());
        let half = q(1, 2);
        let f = Functional::pair(side.scale(&half), side.scale(&half));
        let slice = SliceSpec::new(&pt.space, f, q(1, 10)).unwrap();
        let w = infty_delta_witness(&pt, &slice, &q(1, 10)).unwrap();
        assert!(w.is_valid(&pt.space));
    }

    #[test]
    fn conjugate_mismatch() {
        assert!(matches!(
            InftyDeltaPoint::new(q(3, 1), deltak(q(2, 1)).into_oracle(), q(2, 1), deltak(q(2, 1)).into_oracle()),
            Err(Error::ConjugateMismatch { .. })
        ));
    }

    #[test]
    fn combine_examples() {
        let c = non_delta_certificate_with_alpha(&l2(), &e1(), &q(2, 1), &q(1, 4)).unwrap().shrink(q(1, 4), q(1, 2)).unwrap();
        let out = combine_non_deltak_certificates(&q(2, 1), &c, &q(2, 1), &c).unwrap();
        assert_eq!(out.alpha, q(1, 4));
        assert_eq!(out.trace["lambda"], json!("1/2"));
        let z = DeskSpace::sum(AbsoluteNorm::linf(), l2(), l2());
        let chk = out.brute_check(&z, &Vector::pair(e1(), e1())).unwrap();
        assert!(chk.holds);

        let c1 = c.shrink(q(1, 10), q(1, 2)).unwrap();
        let c2 = c.shrink(q(1, 5), q(1, 2)).unwrap();
        let out = combine_non_deltak_certificates(&q(2, 1), &c1, &q(2, 1), &c2).unwrap();
        assert_eq!(out.trace["lambda"], json!("2/3"));
        assert_eq!(out.alpha, q(2, 15));
        assert!(matches!(combine_non_deltak_certificates(&q(3, 1), &c, &q(2, 1), &c), Err(Error::ConjugateMismatch { .. })));
    }
}
