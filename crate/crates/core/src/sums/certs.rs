//! Certificates on sums built from certificates on a summand.

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::norm2::{flatness_delta, norming_dual_of, AbsoluteNorm, SpherePoint};
use crate::real::{format_q, min_q, q_from_f64, Real, Q};
use crate::spaces::{norming_functional, CertKind, DeskSpace, Functional, NonDeltaCertificate, Vector};

fn two() -> Q {
    Q::from_integer(2.into())
}

fn fq(x: &Q) -> serde_json::Value {
    json!(format_q(x))
}

/// Certificates against Daugavet-ness of `x` and of `y` with common width
/// `alpha` and gap `eps` give one for `(x, y)` in `X (+)_inf Y`: the slice of
/// `(x*, y*)/2` of width `alpha/2` avoids `Delta_{eps - alpha}(x, y)`.
pub fn combine_non_daugavet_certificates(cert_x: &NonDeltaCertificate, cert_y: &NonDeltaCertificate) -> Result<NonDeltaCertificate> {
    for (name, c) in [("X", cert_x), ("Y", cert_y)] {
        if !c.k.is_one() {
            return Err(Error::ParameterMismatch(format!("{name} certificate has widening {}", format_q(&c.k))));
        }
    }
    if cert_x.alpha != cert_y.alpha || cert_x.eps != cert_y.eps {
        return Err(Error::ParameterMismatch(format!(
            "(alpha, eps) = ({}, {}) vs ({}, {}); shrink to common values first",
            format_q(&cert_x.alpha),
            format_q(&cert_x.eps),
            format_q(&cert_y.alpha),
            format_q(&cert_y.eps)
        )));
    }
    let (alpha, eps) = (&cert_x.alpha, &cert_x.eps);
    if alpha >= eps {
        return Err(Error::WidthTooLarge {
            alpha: format_q(alpha),
            eps: format_q(eps),
        });
    }
    let half = Q::one() / two();
    let f = Functional::pair(cert_x.functional.scale(&half), cert_y.functional.scale(&half));
    let mut c = NonDeltaCertificate::new(CertKind::NonDaugavet, f, alpha / two(), eps - alpha, Q::one())?;
    c.trace.insert("rule".into(), json!("half sum of functionals, width alpha/2, gap eps - alpha"));
    c.trace.insert("input_x".into(), serde_json::to_value(cert_x)?);
    c.trace.insert("input_y".into(), serde_json::to_value(cert_y)?);
    Ok(c)
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftedCertificate {
    pub space: DeskSpace,
    pub point: Vector,
    pub certificate: NonDeltaCertificate,
}

fn real_q_down(x: &Real) -> Result<Q> {
    match x {
        Real::Exact(v) => Ok(v.clone()),
        Real::Approx(v) => q_from_f64(v * (1.0 - 1e-12)),
    }
}

/// A non-Delta certificate `(x*, alpha, eps)` for `x` in `X` gives one for
/// `(a x, b y)` in `X (+)_N Y` whenever `N(a, b) = 1` and `b != 1`.
///
/// With `(c, d)` norming `(a, b)` and `y*` norming `y`, the functional is
/// `f = (c x*, (1 - alpha) d y*)`, the width `alpha - gamma` with
/// `gamma = (alpha - (1 - f(ax, by)))/2`, and the gap
/// `delta = min(flatness_delta(N, beta), (1 - b)/2)` with
/// `beta = min(a eps, gamma eps)/2`. The stored functional is `f/||f||` with
/// the width rescaled so the slice is the same set.
#[allow(clippy::too_many_arguments)]
pub fn lift_non_delta_certificate(
    norm: &AbsoluteNorm,
    a: &Q,
    b: &Q,
    x_space: &DeskSpace,
    x: &Vector,
    y_space: &DeskSpace,
    y: &Vector,
    cert_x: &NonDeltaCertificate,
) -> Result<LiftedCertificate> {
    if a.is_negative() || b.is_negative() {
        return Err(Error::Domain("coefficients must be nonnegative".into()));
    }
    if !norm.eval_q(a, b)?.approx_eq(&Real::one()) {
        return Err(Error::Domain(format!("N({}, {}) != 1", format_q(a), format_q(b))));
    }
    if b.is_one() {
        return Err(Error::BEqualsOne);
    }
    if !cert_x.k.is_one() || cert_x.kind != CertKind::NonDelta {
        return Err(Error::ParameterMismatch("need a plain non-Delta certificate (k = 1)".into()));
    }
    x_space.require_unit(x, "x")?;
    y_space.require_unit(y, "y")?;
    cert_x.check_shape(x_space, x)?;
    let alpha = &cert_x.alpha;
    let eps = &cert_x.eps;

    let sp = SpherePoint::from_coords(norm, &Real::Exact(a.clone()), &Real::Exact(b.clone()))?;
    let dual = norming_dual_of(norm, &sp)?;
    let (c, d) = (real_q_down(&dual.c)?, real_q_down(&dual.d)?);
    let y_star = norming_functional(y_space, y)?;
    let one_minus = Q::one() - alpha;
    let f = Functional::pair(cert_x.functional.scale(&c), y_star.scale(&(&one_minus * &d)));
    let z = DeskSpace::sum(norm.clone(), x_space.clone(), y_space.clone());
    let point = Vector::pair(x.scale(a), y.scale(b));
    let f_at = z.apply(&f, &point)?;
    let gamma = (alpha - (Q::one() - &f_at)) / two();
    if !gamma.is_positive() {
        return Err(Error::Infeasible(format!(
            "f(ax, by) = {} leaves no room inside the slice",
            format_q(&f_at)
        )));
    }
    let beta = min_q(&(a * eps), &(&gamma * eps)).clone() / two();
    let flat = flatness_delta(norm, &beta)?;
    let side = (Q::one() - b) / two();
    let delta = min_q(&flat, &side).clone();

    let f_norm = z.dual_norm(&f)?;
    let scale = crate::spaces::recip_down(&f_norm)?;
    let raw_alpha = alpha - &gamma;
    let width = Q::one() - &scale * (Q::one() - &raw_alpha);
    let mut cert = NonDeltaCertificate::new(CertKind::NonDelta, f.scale(&scale), width, delta.clone(), Q::one())?;
    cert.raw_functional = Some(f);
    let t = &mut cert.trace;
    t.insert("a".into(), fq(a));
    t.insert("b".into(), fq(b));
    t.insert("c".into(), fq(&c));
    t.insert("d".into(), fq(&d));
    t.insert("f_at_point".into(), fq(&f_at));
    t.insert("gamma".into(), fq(&gamma));
    t.insert("beta".into(), fq(&beta));
    t.insert("flatness_delta".into(), fq(&flat));
    t.insert("delta".into(), fq(&delta));
    t.insert("raw_alpha".into(), fq(&raw_alpha));
    t.insert("raw_norm".into(), serde_json::to_value(&f_norm)?);
    t.insert("input".into(), serde_json::to_value(cert_x)?);
    if !cert.contains_point(&z, &point)? {
        return Err(Error::VerificationFailed("lifted slice does not contain the point".into()));
    }
    if cert.alpha.is_zero() || cert.alpha.is_negative() {
        return Err(Error::VerificationFailed("lifted width is not positive".into()));
    }
    Ok(LiftedCertificate {
        space: z,
        point,
        certificate: cert,
    })
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

    fn example_cert() -> NonDeltaCertificate {
        non_delta_certificate_with_alpha(&l2(), &e1(), &q(1, 1), &q(1, 4)).unwrap().shrink(q(1, 4), q(1, 2)).unwrap()
    }

    #[test]
    fn combine_example() {
        let mut c = example_cert();
        c.kind = CertKind::NonDaugavet;
        let out = combine_non_daugavet_certificates(&c, &c).unwrap();
        assert_eq!(out.alpha, q(1, 8));
        assert_eq!(out.eps, q(1, 4));
        let z = DeskSpace::sum(AbsoluteNorm::linf(), l2(), l2());
        let p = Vector::pair(e1(), e1());
        let chk = out.brute_check(&z, &p).unwrap();
        assert!(chk.holds);
        assert!(chk.sup.unwrap().value.to_f64() < 1.75);
    }

    #[test]
    fn combine_rejects_wide_slices() {
        let c = example_cert().shrink(q(1, 4), q(1, 4)).unwrap();
        assert!(matches!(combine_non_daugavet_certificates(&c, &c), Err(Error::WidthTooLarge { .. })));
    }

    #[test]
    fn lift_example_parameters() {
        let y = Vector::Pl(PlFn::constant(q(1, 1)));
        let out = lift_non_delta_certificate(&AbsoluteNorm::l1(), &q(1, 2), &q(1, 2), &l2(), &e1(), &DeskSpace::c01(), &y, &example_cert()).unwrap();
        let t = &out.certificate.trace;
        assert_eq!(t["c"], json!("1"));
        assert_eq!(t["d"], json!("1"));
        assert_eq!(t["gamma"], json!("1/16"));
        assert_eq!(t["beta"], json!("1/64"));
        assert!(out.certificate.contains_point(&out.space, &out.point).unwrap());
    }

    #[test]
    fn lift_with_zero_b_and_corner() {
        let y = Vector::coords(vec![q(0, 1), q(1, 1)]);
        let out = lift_non_delta_certificate(&AbsoluteNorm::l1(), &q(1, 1), &q(0, 1), &l2(), &e1(), &l2(), &y, &example_cert()).unwrap();
        assert!(out.certificate.brute_check(&out.space, &out.point).unwrap().holds);
        assert!(matches!(
            lift_non_delta_certificate(&AbsoluteNorm::linf(), &q(1, 1), &q(1, 1), &l2(), &e1(), &l2(), &y, &example_cert()),
            Err(Error::BEqualsOne)
        ));
    }
}
