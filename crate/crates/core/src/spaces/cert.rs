//! Certificates that a point is not diametral for some slice.
//!
//! A certificate `(f, alpha, eps, k)` claims that every `u` in the widened
//! slice `S(B, f, k alpha)` has `||x - u|| < 2 - eps`. For the `NonDelta` kind
//! the slice `S(B, f, alpha)` must also contain `x`. Claims are checked against
//! the brute-force oracle or the falsifier, never taken on trust.

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::brute::{has_brute_oracle, sup_over_halfspace, SliceSup};
use super::{norming_functional, DeskSpace, Functional, SliceSpec, Vector};
use crate::error::{Error, Result};
use crate::real::{dyadic, floor_dyadic, format_q, q_from_f64, serde_q, Real, Q};

/// Slack kept between certified distances and the brute-force supremum.
pub const MARGIN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertKind {
    /// The slice contains the point: it is not a Delta-point (or Delta_k-point).
    NonDelta,
    /// No containment requirement: it is not a Daugavet-point.
    NonDaugavet,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NonDeltaCertificate {
    pub kind: CertKind,
    pub functional: Functional,
    #[serde(with = "serde_q")]
    pub alpha: Q,
    #[serde(with = "serde_q")]
    pub eps: Q,
    #[serde(with = "serde_q")]
    pub k: Q,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_functional: Option<Functional>,
    #[serde(default)]
    pub trace: Map<String, Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BruteCheck {
    /// `None` when the widened slice is empty.
    pub sup: Option<SliceSup>,
    #[serde(with = "serde_q")]
    pub bound: Q,
    pub holds: bool,
    pub slack: f64,
}

impl NonDeltaCertificate {
    pub fn new(kind: CertKind, functional: Functional, alpha: Q, eps: Q, k: Q) -> Result<Self> {
        if alpha.is_negative() {
            return Err(Error::Domain("certificate width must be nonnegative".into()));
        }
        if !eps.is_positive() {
            return Err(Error::Domain("certificate gap must be positive".into()));
        }
        if k < Q::one() {
            return Err(Error::Domain("widening factor must be at least 1".into()));
        }
        Ok(NonDeltaCertificate {
            kind,
            functional,
            alpha,
            eps,
            k,
            raw_functional: None,
            trace: Map::new(),
        })
    }

    /// Distances in the widened slice are claimed to stay below this.
    pub fn claimed_bound(&self) -> Q {
        Q::from_integer(2.into()) - &self.eps
    }

    pub fn widened_alpha(&self) -> Q {
        &self.k * &self.alpha
    }

    /// `S(B, f, k alpha)`.
    pub fn widened_slice(&self) -> SliceSpec {
        SliceSpec {
            functional: self.functional.clone(),
            alpha: self.widened_alpha(),
        }
    }

    /// Structural checks: `||f|| = 1` and, for `NonDelta`, `f(x) > 1 - alpha`.
    pub fn check_shape(&self, space: &DeskSpace, x: &Vector) -> Result<()> {
        let n = space.dual_norm(&self.functional)?;
        if !n.approx_eq(&Real::one()) {
            return Err(Error::VerificationFailed(format!("certificate functional has norm {n}")));
        }
        if self.kind == CertKind::NonDelta && !self.contains_point(space, x)? {
            return Err(Error::SliceDoesNotContainPoint);
        }
        Ok(())
    }

    pub fn contains_point(&self, space: &DeskSpace, x: &Vector) -> Result<bool> {
        Ok(space.apply(&self.functional, x)? > Q::one() - &self.alpha)
    }

    /// Compares the claim with the brute-force supremum over the widened slice.
    pub fn brute_check(&self, space: &DeskSpace, x: &Vector) -> Result<BruteCheck> {
        let bound = self.claimed_bound();
        let tau = Real::Exact(Q::one() - self.widened_alpha());
        match sup_over_halfspace(space, x, &self.functional, &tau) {
            Err(Error::EmptySlice) => Ok(BruteCheck {
                sup: None,
                bound,
                holds: true,
                slack: f64::INFINITY,
            }),
            Err(e) => Err(e),
            Ok(sup) => {
                let slack = crate::real::q_to_f64(&bound) - sup.value.to_f64();
                let holds = match &sup.value {
                    Real::Exact(v) => *v < bound,
                    Real::Approx(v) => *v < crate::real::q_to_f64(&bound) - MARGIN * 1e-3,
                };
                Ok(BruteCheck { sup: Some(sup), bound, holds, slack })
            }
        }
    }

    /// The same claim with smaller width and gap (always implied by the original).
    pub fn shrink(&self, alpha: Q, eps: Q) -> Result<Self> {
        if alpha > self.alpha || eps > self.eps || !eps.is_positive() || alpha.is_negative() {
            return Err(Error::Domain("shrinking may only decrease width and gap".into()));
        }
        let mut c = self.clone();
        c.trace.insert("shrunk_from".into(), serde_json::to_value(self).expect("serializes"));
        c.alpha = alpha;
        c.eps = eps;
        Ok(c)
    }
}

fn gap_from_sup(sup: &SliceSup) -> Q {
    let two = Q::from_integer(2.into());
    let s = match &sup.value {
        Real::Exact(v) => v.clone(),
        Real::Approx(v) => q_from_f64(v + 1e-12).unwrap_or_else(|_| two.clone()),
    };
    let margin = q_from_f64(2.0 * MARGIN).expect("finite");
    floor_dyadic(&(two - s - margin), 30)
}

fn require_brute(sup: &SliceSup) -> Result<()> {
    if sup.lower_bound_only {
        Err(Error::NoBruteOracle("slice supremum is only a sampled lower bound".into()))
    } else {
        Ok(())
    }
}

/// Searches widths `2^-j` and keeps the one maximizing `alpha * eps`, with `f`
/// the norming functional of `x`.
pub fn non_delta_certificate(space: &DeskSpace, x: &Vector, k: &Q) -> Result<NonDeltaCertificate> {
    space.require_unit(x, "x")?;
    if !has_brute_oracle(space) {
        return Err(Error::NoBruteOracle(space.label()));
    }
    let f = norming_functional(space, x)?;
    let mut best: Option<(Q, Q, Q)> = None;
    let mut tried = Vec::new();
    for j in 0..=12 {
        let alpha = dyadic(j);
        if &alpha * k >= Q::from_integer(2.into()) {
            continue;
        }
        let tau = Real::Exact(Q::one() - &alpha * k);
        let sup = sup_over_halfspace(space, x, &f, &tau)?;
        require_brute(&sup)?;
        let eps = gap_from_sup(&sup);
        tried.push(serde_json::json!({"alpha": format_q(&alpha), "sup": sup.value.to_f64(), "eps": format_q(&eps)}));
        if eps.is_positive() {
            let score = &alpha * &eps;
            if best.as_ref().is_none_or(|b| score > b.0) {
                best = Some((score, alpha, eps));
            }
        }
    }
    let (_, alpha, eps) = best.ok_or(Error::NotFound)?;
    let mut c = NonDeltaCertificate::new(CertKind::NonDelta, f, alpha, eps, k.clone())?;
    c.trace.insert("searched".into(), Value::Array(tried));
    Ok(c)
}

/// Certificate for a prescribed width, with the largest dyadic gap the brute
/// oracle supports.
pub fn non_delta_certificate_with_alpha(space: &DeskSpace, x: &Vector, k: &Q, alpha: &Q) -> Result<NonDeltaCertificate> {
    space.require_unit(x, "x")?;
    if !alpha.is_positive() {
        return Err(Error::Domain("certificate width must be positive".into()));
    }
    if !has_brute_oracle(space) {
        return Err(Error::NoBruteOracle(space.label()));
    }
    let f = norming_functional(space, x)?;
    let tau = Real::Exact(Q::one() - alpha * k);
    let sup = sup_over_halfspace(space, x, &f, &tau)?;
    require_brute(&sup)?;
    let eps = gap_from_sup(&sup);
    if !eps.is_positive() {
        return Err(Error::NotFound);
    }
    let mut c = NonDeltaCertificate::new(CertKind::NonDelta, f, alpha.clone(), eps, k.clone())?;
    c.trace.insert("sup".into(), serde_json::to_value(&sup.value).expect("serializes"));
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::q;
    use num_traits::Zero;

    fn l2() -> DeskSpace {
        DeskSpace::lp(2, 2.0)
    }

    fn e1() -> Vector {
        Vector::coords(vec![q(1, 1), q(0, 1)])
    }

    #[test]
    fn fixed_width_examples() {
        let c = non_delta_certificate_with_alpha(&l2(), &e1(), &q(2, 1), &q(1, 4)).unwrap();
        assert!(c.eps >= q(1, 2));
        assert!(c.brute_check(&l2(), &e1()).unwrap().holds);
        let c1 = non_delta_certificate_with_alpha(&l2(), &e1(), &q(1, 1), &q(1, 4)).unwrap();
        assert!(c1.eps >= q(129, 100));
    }

    #[test]
    fn searched_certificates_validate() {
        for k in [q(1, 1), q(2, 1), q(3, 1)] {
            let c = non_delta_certificate(&l2(), &e1(), &k).unwrap();
            c.check_shape(&l2(), &e1()).unwrap();
            let b = c.brute_check(&l2(), &e1()).unwrap();
            assert!(b.holds && b.slack >= MARGIN);
        }
        let l1 = DeskSpace::lp(2, 1.0);
        let c = non_delta_certificate(&l1, &e1(), &q(1, 1)).unwrap();
        assert!(c.brute_check(&l1, &e1()).unwrap().slack >= MARGIN);
    }

    #[test]
    fn monotone_in_k() {
        let c = non_delta_certificate(&l2(), &e1(), &q(2, 1)).unwrap();
        let mut weaker = c.clone();
        weaker.k = q(3, 2);
        assert!(weaker.brute_check(&l2(), &e1()).unwrap().holds);
    }

    #[test]
    fn no_oracle_for_function_spaces() {
        let x = Vector::Pl(super::super::PlFn::constant(q(1, 1)));
        assert!(matches!(non_delta_certificate(&DeskSpace::c01(), &x, &q(1, 1)), Err(Error::NoBruteOracle(_))));
    }

    #[test]
    fn zero_width_is_trivially_true() {
        let mut c = non_delta_certificate(&l2(), &e1(), &q(1, 1)).unwrap();
        c.alpha = Q::zero();
        assert!(c.brute_check(&l2(), &e1()).unwrap().sup.is_none());
    }
}
