//! Absolute normalized norms on the plane.
//!
//! A norm `N` is stored through its profile `psi(t) = N(1 - t, t)` on `[0, 1]`,
//! so that `N(a, b) = (a + b) psi(b / (a + b))`. Piecewise-linear profiles (which
//! include `l_1`, `l_inf` and sampled profiles) are handled in exact rational
//! arithmetic; `l_p` for `1 < p < inf` uses closed forms in floating point.

mod flatness;
mod polygon;
mod search;

use std::fmt;

use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::real::{q, q_from_f64, serde_q_pairs, Real, Q};

pub use flatness::{flatness_delta, flatness_grid_check, flatness_width_check};
pub use polygon::Polygon;
pub use search::{classify, find_kl, find_kl_unchecked, has_beta, norming_dual_of, star_constants};

/// Exponent of an `l_p` norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(Exponent::Finite)
                .ok_or_else(|| serde::de::Error::custom("bad exponent")),
            serde_json::Value::String(s) => match s.as_str() {
                "inf" | "infinity" | "Infinity" => Ok(Exponent::Infinity),
                other => other
                    .parse::<f64>()
                    .map(Exponent::Finite)
                    .map_err(serde::de::Error::custom),
            },
            other => Err(serde::de::Error::custom(format!("bad exponent {other}"))),
        }
    }
}

/// Norm spec file contents.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NormSpec {
    Lp {
        p: Exponent,
    },
    Pl {
        #[serde(with = "serde_q_pairs")]
        knots: Vec<(Q, Q)>,
    },
    /// Profile values on the uniform grid `t_j = j / (n - 1)`, linearly interpolated.
    Sampled {
        values: Vec<f64>,
    },
}

#[derive(Clone, Debug)]
enum Repr {
    Poly(Polygon),
    Smooth(f64),
}

/// An absolute normalized norm on the plane.
#[derive(Clone, Debug)]
pub struct AbsoluteNorm {
    spec: NormSpec,
    repr: Repr,
}

impl AbsoluteNorm {
    pub fn from_spec(spec: NormSpec) -> Result<Self> {
        let repr = match &spec {
            NormSpec::Lp { p } => match p {
                Exponent::Infinity => Repr::Poly(Polygon::new(vec![
                    (q(0, 1), q(1, 1)),
                    (q(1, 2), q(1, 2)),
                    (q(1, 1), q(1, 1)),
                ])?),
                Exponent::Finite(p) if *p == 1.0 => {
                    Repr::Poly(Polygon::new(vec![(q(0, 1), q(1, 1)), (q(1, 1), q(1, 1))])?)
                }
                Exponent::Finite(p) if p.is_finite() && *p > 1.0 => Repr::Smooth(*p),
                Exponent::Finite(p) => {
                    return Err(Error::InvalidProfile(format!("l_p needs p >= 1, got {p}")))
                }
            },
            NormSpec::Pl { knots } => Repr::Poly(Polygon::new(knots.clone())?),
            NormSpec::Sampled { values } => {
                if values.len() < 2 {
                    return Err(Error::InvalidProfile("need at least two samples".into()));
                }
                let n = values.len() - 1;
                let mut knots = Vec::with_capacity(values.len());
                for (j, v) in values.iter().enumerate() {
                    let psi = if j == 0 || j == n {
                        if (v - 1.0).abs() > 1e-12 {
                            return Err(Error::InvalidProfile("psi(0) = psi(1) = 1 required".into()));
                        }
                        Q::one()
                    } else {
                        q_from_f64(*v)?
                    };
                    knots.push((q(j as i64, n as i64), psi));
                }
                Repr::Poly(Polygon::new(knots)?)
            }
        };
        Ok(AbsoluteNorm { spec, repr })
    }

    pub fn lp(p: f64) -> Result<Self> {
        if p.is_infinite() {
            Self::linf_checked()
        } else {
            Self::from_spec(NormSpec::Lp { p: Exponent::Finite(p) })
        }
    }

    fn linf_checked() -> Result<Self> {
        Self::from_spec(NormSpec::Lp { p: Exponent::Infinity })
    }

    pub fn l1() -> Self {
        Self::lp(1.0).expect("l1 is valid")
    }

    pub fn linf() -> Self {
        Self::linf_checked().expect("linf is valid")
    }

    pub fn l2() -> Self {
        Self::lp(2.0).expect("l2 is valid")
    }

    pub fn pl(knots: Vec<(Q, Q)>) -> Result<Self> {
        Self::from_spec(NormSpec::Pl { knots })
    }

    /// `psi(t) = max(1 - t, t, 4/5)`.
    pub fn hex() -> Self {
        Self::pl(vec![
            (q(0, 1), q(1, 1)),
            (q(1, 5), q(4, 5)),
            (q(4, 5), q(4, 5)),
            (q(1, 1), q(1, 1)),
        ])
        .expect("hex profile is valid")
    }

    /// Samples a profile function on `n + 1` uniform points.
    pub fn sampled_from_fn(n: usize, psi: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..=n).map(|j| psi(j as f64 / n as f64)).collect();
        Self::from_spec(NormSpec::Sampled { values })
    }

    pub fn spec(&self) -> &NormSpec {
        &self.spec
    }

    pub fn polygon(&self) -> Option<&Polygon> {
        match &self.repr {
            Repr::Poly(p) => Some(p),
            Repr::Smooth(_) => None,
        }
    }

    /// Exponent for the smooth `l_p` kinds.
    pub fn smooth_exponent(&self) -> Option<f64> {
        match &self.repr {
            Repr::Smooth(p) => Some(*p),
            Repr::Poly(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.polygon().is_some()
    }

    pub fn eval(&self, a: &Real, b: &Real) -> Result<Real> {
        if a.lt(&Real::zero()) || b.lt(&Real::zero()) {
            return Err(Error::Domain(format!("norm arguments must be nonnegative, got ({a}, {b})")));
        }
        Ok(match (&self.repr, a, b) {
            (Repr::Poly(p), Real::Exact(a), Real::Exact(b)) => Real::Exact(p.eval(a, b)),
            _ => Real::Approx(self.eval_f64(a.to_f64().max(0.0), b.to_f64().max(0.0))),
        })
    }

    pub fn eval_q(&self, a: &Q, b: &Q) -> Result<Real> {
        self.eval(&Real::from(a), &Real::from(b))
    }

    pub fn eval_f64(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.abs(), b.abs());
        match &self.repr {
            Repr::Poly(p) => p.eval_f64(a, b),
            Repr::Smooth(p) => lp_f64(a, b, *p),
        }
    }

    pub fn dual_eval(&self, c: &Real, d: &Real) -> Result<Real> {
        if c.lt(&Real::zero()) || d.lt(&Real::zero()) {
            return Err(Error::Domain(format!("dual arguments must be nonnegative, got ({c}, {d})")));
        }
        Ok(match &self.repr {
            Repr::Poly(p) => p.dual(c, d),
            Repr::Smooth(p) => {
                let q = p / (p - 1.0);
                Real::Approx(lp_f64(c.to_f64(), d.to_f64(), q))
            }
        })
    }

    pub fn dual_eval_f64(&self, c: f64, d: f64) -> f64 {
        match &self.repr {
            Repr::Poly(p) => p.dual(&Real::Approx(c.abs()), &Real::Approx(d.abs())).to_f64(),
            Repr::Smooth(p) => lp_f64(c.abs(), d.abs(), p / (p - 1.0)),
        }
    }

    pub fn profile(&self, t: &Real) -> Real {
        match (&self.repr, t) {
            (Repr::Poly(p), Real::Exact(t)) => Real::Exact(p.profile(t)),
            _ => {
                let t = t.to_f64();
                Real::Approx(self.eval_f64(1.0 - t, t))
            }
        }
    }

    /// `N(1, 1)`; equals 1 exactly for `l_inf` and exceeds 1 otherwise.
    pub fn n11(&self) -> Real {
        self.eval(&Real::one(), &Real::one()).expect("nonnegative")
    }

    pub fn is_linf(&self) -> bool {
        match &self.repr {
            Repr::Poly(p) => p.eval(&Q::one(), &Q::one()).is_one(),
            Repr::Smooth(_) => false,
        }
    }

    pub fn label(&self) -> String {
        match &self.spec {
            NormSpec::Lp { p: Exponent::Infinity } => "l_inf".into(),
            NormSpec::Lp { p: Exponent::Finite(p) } => format!("l_{p}"),
            NormSpec::Pl { .. } => "pl".into(),
            NormSpec::Sampled { values } => format!("sampled[{}]", values.len()),
        }
    }
}

impl fmt::Display for AbsoluteNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn lp_f64(a: f64, b: f64, p: f64) -> f64 {
    let m = a.max(b);
    if m == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return m;
    }
    m * ((a / m).powf(p) + (b / m).powf(p)).powf(1.0 / p)
}

/// A point `(a, b)` of the unit sphere in the positive quadrant, with its
/// profile parameter `t = b / (a + b)`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SpherePoint {
    pub t: Real,
    pub a: Real,
    pub b: Real,
}

impl SpherePoint {
    /// `(a(t), b(t)) = ((1 - t)/psi(t), t/psi(t))`.
    pub fn at(norm: &AbsoluteNorm, t: &Real) -> Result<Self> {
        if t.lt(&Real::zero()) || t.gt(&Real::one()) {
            return Err(Error::Domain(format!("sphere parameter {t} outside [0, 1]")));
        }
        let psi = norm.profile(t);
        Ok(SpherePoint {
            t: t.clone(),
            a: Real::one().sub(t).div(&psi),
            b: t.div(&psi),
        })
    }

    /// Radial projection of a nonzero point of the quadrant onto the sphere.
    pub fn from_coords(norm: &AbsoluteNorm, a: &Real, b: &Real) -> Result<Self> {
        if a.lt(&Real::zero()) || b.lt(&Real::zero()) {
            return Err(Error::Domain("sphere coordinates must be nonnegative".into()));
        }
        let s = a.add(b);
        if s.is_zero() {
            return Err(Error::Domain("(0, 0) is not on the sphere".into()));
        }
        let n = norm.eval(a, b)?;
        Ok(SpherePoint {
            t: b.div(&s),
            a: a.div(&n),
            b: b.div(&n),
        })
    }

    pub fn exact_coords(&self) -> Option<(Q, Q)> {
        Some((self.a.as_exact()?.clone(), self.b.as_exact()?.clone()))
    }
}

/// A norm-one element `(c, d)` of the dual quadrant.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DualFunctional2 {
    pub c: Real,
    pub d: Real,
}

impl DualFunctional2 {
    pub fn new(norm: &AbsoluteNorm, c: Real, d: Real) -> Result<Self> {
        let n = norm.dual_eval(&c, &d)?;
        if !n.approx_eq(&Real::one()) {
            return Err(Error::Domain(format!("dual pair ({c}, {d}) has dual norm {n}, not 1")));
        }
        Ok(DualFunctional2 { c, d })
    }

    /// Normalizes a nonzero nonnegative pair.
    pub fn normalized(norm: &AbsoluteNorm, c: &Real, d: &Real) -> Result<Self> {
        let n = norm.dual_eval(c, d)?;
        if n.is_zero() {
            return Err(Error::Domain("zero dual pair".into()));
        }
        Ok(DualFunctional2 { c: c.div(&n), d: d.div(&n) })
    }
}

/// Outcome of the property (alpha) versus A-octahedral dichotomy.
#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(tag = "variant")]
pub enum NormClassification {
    Alpha {
        c: Real,
        d: Real,
    },
    #[serde(rename = "AOH")]
    Aoh {
        pair: SpherePoint,
        c: Real,
        d: Real,
        beta: bool,
    },
}

impl NormClassification {
    pub fn is_aoh(&self) -> bool {
        matches!(self, NormClassification::Aoh { .. })
    }

    pub fn pair(&self) -> Option<&SpherePoint> {
        match self {
            NormClassification::Aoh { pair, .. } => Some(pair),
            NormClassification::Alpha { .. } => None,
        }
    }
}
