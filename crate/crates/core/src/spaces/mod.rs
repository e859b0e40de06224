//! Desk-scale Banach space models.
//!
//! * `C01Pl`: piecewise-linear functions on `[0, 1]` with the sup norm; the
//!   functionals are finite signed combinations of point evaluations.
//! * `L1Step`: step functions with the integral norm; functionals are step
//!   functions acting by integration, normed by their largest height.
//! * `Finite`: `R^n` with an `l_p` norm.
//! * `Sum`: an absolute sum of two models (see [`crate::sums`]).
//!
//! Vectors and functionals always carry rational data, so pairings are exact.
//! Norms are exact except where an `l_p` norm with `1 < p < inf` is involved.

mod brute;
mod cert;
mod flat;
mod pl;
mod step;
mod witness;

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm2::{Exponent, NormSpec};
use crate::real::{exact_sqrt, q_from_f64, serde_q, serde_q_pairs, serde_q_vec, Real, Q};
use crate::sums::SumSpace;

pub use brute::{brute_slice_sup, enumeration_sup, grid_ascent_sup, has_brute_oracle, sup_over_halfspace, SliceSup, SupMethod};
pub use cert::{non_delta_certificate, non_delta_certificate_with_alpha, BruteCheck, CertKind, NonDeltaCertificate, MARGIN};
pub use flat::{search_plane, search_slice, FlatModel, SearchConfig, SearchOutcome};
pub use pl::PlFn;
pub use step::StepFn;
pub use witness::{daugavet_witness, norming_element, norming_functional, DiametralWitness, WitnessCheck};

/// Default finest dyadic level available to witness constructions.
pub const DEFAULT_MAX_LEVEL: u32 = 40;

#[derive(Clone, Debug)]
pub enum DeskSpace {
    C01Pl { max_level: u32 },
    L1Step { max_level: u32 },
    Finite { dim: usize, p: Exponent },
    Sum(Box<SumSpace>),
}

/// The four shapes an `l_p` exponent can take for exact purposes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Lp {
    One,
    Two,
    Inf,
    Other(f64),
}

impl Lp {
    pub(crate) fn of(p: &Exponent) -> Lp {
        match p {
            Exponent::Infinity => Lp::Inf,
            Exponent::Finite(p) if *p == 1.0 => Lp::One,
            Exponent::Finite(p) if *p == 2.0 => Lp::Two,
            Exponent::Finite(p) if p.is_infinite() => Lp::Inf,
            Exponent::Finite(p) => Lp::Other(*p),
        }
    }

    pub(crate) fn conjugate(self) -> Lp {
        match self {
            Lp::One => Lp::Inf,
            Lp::Inf => Lp::One,
            Lp::Two => Lp::Two,
            Lp::Other(p) => Lp::Other(p / (p - 1.0)),
        }
    }

    pub(crate) fn exponent(self) -> f64 {
        match self {
            Lp::One => 1.0,
            Lp::Two => 2.0,
            Lp::Inf => f64::INFINITY,
            Lp::Other(p) => p,
        }
    }

    pub(crate) fn norm(self, xs: &[Q]) -> Real {
        match self {
            Lp::One => Real::Exact(xs.iter().map(|x| x.abs()).sum()),
            Lp::Inf => Real::Exact(xs.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero)),
            Lp::Two => {
                let s: Q = xs.iter().map(|x| x * x).sum();
                match exact_sqrt(&s) {
                    Some(r) => Real::Exact(r),
                    None => Real::Approx(crate::real::q_to_f64(&s).sqrt()),
                }
            }
            Lp::Other(p) => {
                let v: Vec<f64> = xs.iter().map(crate::real::q_to_f64).collect();
                Real::Approx(lp_f64(&v, p))
            }
        }
    }
}

pub(crate) fn lp_f64(v: &[f64], p: f64) -> f64 {
    let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m == 0.0 || p.is_infinite() {
        return m;
    }
    m * v.iter().map(|x| (x.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Vector {
    Pl(PlFn),
    Step(StepFn),
    Coords {
        #[serde(with = "serde_q_vec")]
        coords: Vec<Q>,
    },
    Pair {
        pair: Box<(Vector, Vector)>,
    },
}

/// Point masses `sum w_j delta_{s_j}`, sorted by position, without zero weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MassesRaw", into = "MassesRaw")]
pub struct Masses(Vec<(Q, Q)>);

#[derive(Serialize, Deserialize)]
struct MassesRaw {
    #[serde(with = "serde_q_pairs")]
    masses: Vec<(Q, Q)>,
}

impl TryFrom<MassesRaw> for Masses {
    type Error = Error;
    fn try_from(r: MassesRaw) -> Result<Self> {
        Masses::new(r.masses)
    }
}

impl From<Masses> for MassesRaw {
    fn from(m: Masses) -> Self {
        MassesRaw { masses: m.0 }
    }
}

impl Masses {
    pub fn new(mut items: Vec<(Q, Q)>) -> Result<Self> {
        if items.iter().any(|(s, _)| s.is_negative() || s > &Q::one()) {
            return Err(Error::Parse("point masses must sit in [0, 1]".into()));
        }
        items.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Q, Q)> = Vec::with_capacity(items.len());
        for (s, w) in items {
            match out.last_mut() {
                Some(last) if last.0 == s => last.1 += w,
                _ => out.push((s, w)),
            }
        }
        out.retain(|(_, w)| !w.is_zero());
        Ok(Masses(out))
    }

    pub fn point(s: Q, w: Q) -> Result<Self> {
        Self::new(vec![(s, w)])
    }

    pub fn items(&self) -> &[(Q, Q)] {
        &self.0
    }

    pub fn total_mass(&self) -> Q {
        self.0.iter().map(|(_, w)| w.abs()).sum()
    }

    pub fn apply(&self, f: &PlFn) -> Q {
        self.0.iter().map(|(s, w)| w * f.eval(s)).sum()
    }

    fn scale(&self, c: &Q) -> Masses {
        Masses::new(self.0.iter().map(|(s, w)| (s.clone(), w * c)).collect()).unwrap()
    }

    fn lincomb(a: &Q, f: &Masses, b: &Q, g: &Masses) -> Masses {
        let items = f
            .0
            .iter()
            .map(|(s, w)| (s.clone(), w * a))
            .chain(g.0.iter().map(|(s, w)| (s.clone(), w * b)))
            .collect();
        Masses::new(items).unwrap()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Functional {
    Masses(Masses),
    Step(StepFn),
    Coords {
        #[serde(with = "serde_q_vec")]
        coords: Vec<Q>,
    },
    Pair {
        pair: Box<(Functional, Functional)>,
    },
}

fn shape(msg: &str) -> Error {
    Error::Shape(msg.into())
}

impl Vector {
    pub fn coords(c: Vec<Q>) -> Self {
        Vector::Coords { coords: c }
    }

    pub fn pair(x: Vector, y: Vector) -> Self {
        Vector::Pair { pair: Box::new((x, y)) }
    }

    pub fn as_pair(&self) -> Result<(&Vector, &Vector)> {
        match self {
            Vector::Pair { pair } => Ok((&pair.0, &pair.1)),
            _ => Err(shape("expected a pair vector")),
        }
    }

    pub fn scale(&self, c: &Q) -> Vector {
        match self {
            Vector::Pl(f) => Vector::Pl(f.scale(c)),
            Vector::Step(f) => Vector::Step(f.scale(c)),
            Vector::Coords { coords } => Vector::coords(coords.iter().map(|x| x * c).collect()),
            Vector::Pair { pair } => Vector::pair(pair.0.scale(c), pair.1.scale(c)),
        }
    }

    pub fn neg(&self) -> Vector {
        self.scale(&-Q::one())
    }

    /// `a x + b y`.
    pub fn lincomb(a: &Q, x: &Vector, b: &Q, y: &Vector) -> Result<Vector> {
        Ok(match (x, y) {
            (Vector::Pl(f), Vector::Pl(g)) => Vector::Pl(PlFn::lincomb(a, f, b, g)),
            (Vector::Step(f), Vector::Step(g)) => Vector::Step(StepFn::lincomb(a, f, b, g)),
            (Vector::Coords { coords: u }, Vector::Coords { coords: v }) => {
                if u.len() != v.len() {
                    return Err(shape("coordinate vectors of different length"));
                }
                Vector::coords(u.iter().zip(v).map(|(s, t)| a * s + b * t).collect())
            }
            (Vector::Pair { pair: p }, Vector::Pair { pair: r }) => Vector::pair(
                Vector::lincomb(a, &p.0, b, &r.0)?,
                Vector::lincomb(a, &p.1, b, &r.1)?,
            ),
            _ => return Err(shape("vectors from different models")),
        })
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        Vector::lincomb(&Q::one(), self, &-Q::one(), other)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Vector::Pl(f) => f.sup_norm().is_zero(),
            Vector::Step(f) => f.l1_norm().is_zero(),
            Vector::Coords { coords } => coords.iter().all(|x| x.is_zero()),
            Vector::Pair { pair } => pair.0.is_zero() && pair.1.is_zero(),
        }
    }
}

impl Functional {
    pub fn coords(c: Vec<Q>) -> Self {
        Functional::Coords { coords: c }
    }

    pub fn pair(f: Functional, g: Functional) -> Self {
        Functional::Pair { pair: Box::new((f, g)) }
    }

    pub fn point_mass(s: Q, w: Q) -> Result<Self> {
        Ok(Functional::Masses(Masses::point(s, w)?))
    }

    pub fn as_pair(&self) -> Result<(&Functional, &Functional)> {
        match self {
            Functional::Pair { pair } => Ok((&pair.0, &pair.1)),
            _ => Err(shape("expected a pair functional")),
        }
    }

    pub fn scale(&self, c: &Q) -> Functional {
        match self {
            Functional::Masses(m) => Functional::Masses(m.scale(c)),
            Functional::Step(f) => Functional::Step(f.scale(c)),
            Functional::Coords { coords } => Functional::coords(coords.iter().map(|x| x * c).collect()),
            Functional::Pair { pair } => Functional::pair(pair.0.scale(c), pair.1.scale(c)),
        }
    }

    pub fn lincomb(a: &Q, f: &Functional, b: &Q, g: &Functional) -> Result<Functional> {
        Ok(match (f, g) {
            (Functional::Masses(m), Functional::Masses(n)) => Functional::Masses(Masses::lincomb(a, m, b, n)),
            (Functional::Step(m), Functional::Step(n)) => Functional::Step(StepFn::lincomb(a, m, b, n)),
            (Functional::Coords { coords: u }, Functional::Coords { coords: v }) => {
                if u.len() != v.len() {
                    return Err(shape("coordinate functionals of different length"));
                }
                Functional::coords(u.iter().zip(v).map(|(s, t)| a * s + b * t).collect())
            }
            (Functional::Pair { pair: p }, Functional::Pair { pair: r }) => Functional::pair(
                Functional::lincomb(a, &p.0, b, &r.0)?,
                Functional::lincomb(a, &p.1, b, &r.1)?,
            ),
            _ => return Err(shape("functionals from different models")),
        })
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Functional::Masses(m) => m.items().is_empty(),
            Functional::Step(f) => f.sup_norm().is_zero(),
            Functional::Coords { coords } => coords.iter().all(|x| x.is_zero()),
            Functional::Pair { pair } => pair.0.is_zero() && pair.1.is_zero(),
        }
    }
}

impl DeskSpace {
    pub fn c01() -> Self {
        DeskSpace::C01Pl { max_level: DEFAULT_MAX_LEVEL }
    }

    pub fn l1step() -> Self {
        DeskSpace::L1Step { max_level: DEFAULT_MAX_LEVEL }
    }

    pub fn finite(dim: usize, p: Exponent) -> Self {
        DeskSpace::Finite { dim, p }
    }

    pub fn lp(dim: usize, p: f64) -> Self {
        let p = if p.is_infinite() { Exponent::Infinity } else { Exponent::Finite(p) };
        DeskSpace::Finite { dim, p }
    }

    pub fn sum(norm: crate::norm2::AbsoluteNorm, x: DeskSpace, y: DeskSpace) -> Self {
        DeskSpace::Sum(Box::new(SumSpace::new(norm, x, y)))
    }

    pub fn as_sum(&self) -> Result<&SumSpace> {
        match self {
            DeskSpace::Sum(s) => Ok(s),
            _ => Err(shape("expected an absolute sum")),
        }
    }

    /// Spaces whose sphere points all come with a Daugavet witness oracle.
    pub fn has_daugavet_oracle(&self) -> bool {
        matches!(self, DeskSpace::C01Pl { .. } | DeskSpace::L1Step { .. })
    }

    /// Total dimension for finite-dimensional models and sums of them.
    pub fn finite_dim(&self) -> Option<usize> {
        match self {
            DeskSpace::Finite { dim, .. } => Some(*dim),
            DeskSpace::Sum(s) => Some(s.x.finite_dim()? + s.y.finite_dim()?),
            _ => None,
        }
    }

    /// The unit ball is a polytope.
    pub fn is_polyhedral(&self) -> bool {
        match self {
            DeskSpace::Finite { p, .. } => matches!(Lp::of(p), Lp::One | Lp::Inf),
            DeskSpace::Sum(s) => s.norm.polygon().is_some() && s.x.is_polyhedral() && s.y.is_polyhedral(),
            _ => false,
        }
    }

    pub fn label(&self) -> String {
        match self {
            DeskSpace::C01Pl { .. } => "C[0,1] (piecewise linear)".into(),
            DeskSpace::L1Step { .. } => "L1[0,1] (step)".into(),
            DeskSpace::Finite { dim, p } => match p {
                Exponent::Infinity => format!("l_inf^{dim}"),
                Exponent::Finite(p) => format!("l_{p}^{dim}"),
            },
            DeskSpace::Sum(s) => format!("({} + {})_{}", s.x.label(), s.y.label(), s.norm.label()),
        }
    }

    pub fn check_vector(&self, v: &Vector) -> Result<()> {
        match (self, v) {
            (DeskSpace::C01Pl { .. }, Vector::Pl(_)) | (DeskSpace::L1Step { .. }, Vector::Step(_)) => Ok(()),
            (DeskSpace::Finite { dim, .. }, Vector::Coords { coords }) if coords.len() == *dim => Ok(()),
            (DeskSpace::Sum(s), Vector::Pair { pair }) => {
                s.x.check_vector(&pair.0)?;
                s.y.check_vector(&pair.1)
            }
            _ => Err(Error::Shape(format!("vector does not belong to {}", self.label()))),
        }
    }

    pub fn check_functional(&self, f: &Functional) -> Result<()> {
        match (self, f) {
            (DeskSpace::C01Pl { .. }, Functional::Masses(_)) | (DeskSpace::L1Step { .. }, Functional::Step(_)) => Ok(()),
            (DeskSpace::Finite { dim, .. }, Functional::Coords { coords }) if coords.len() == *dim => Ok(()),
            (DeskSpace::Sum(s), Functional::Pair { pair }) => {
                s.x.check_functional(&pair.0)?;
                s.y.check_functional(&pair.1)
            }
            _ => Err(Error::Shape(format!("functional does not act on {}", self.label()))),
        }
    }

    pub fn norm(&self, v: &Vector) -> Result<Real> {
        self.check_vector(v)?;
        Ok(self.norm_unchecked(v))
    }

    fn norm_unchecked(&self, v: &Vector) -> Real {
        match (self, v) {
            (DeskSpace::C01Pl { .. }, Vector::Pl(f)) => Real::Exact(f.sup_norm()),
            (DeskSpace::L1Step { .. }, Vector::Step(f)) => Real::Exact(f.l1_norm()),
            (DeskSpace::Finite { p, .. }, Vector::Coords { coords }) => Lp::of(p).norm(coords),
            (DeskSpace::Sum(s), Vector::Pair { pair }) => {
                let a = s.x.norm_unchecked(&pair.0);
                let b = s.y.norm_unchecked(&pair.1);
                s.norm.eval(&a, &b).expect("norms are nonnegative")
            }
            _ => unreachable!("checked shape"),
        }
    }

    pub fn dual_norm(&self, f: &Functional) -> Result<Real> {
        self.check_functional(f)?;
        Ok(self.dual_norm_unchecked(f))
    }

    fn dual_norm_unchecked(&self, f: &Functional) -> Real {
        match (self, f) {
            (DeskSpace::C01Pl { .. }, Functional::Masses(m)) => Real::Exact(m.total_mass()),
            (DeskSpace::L1Step { .. }, Functional::Step(g)) => Real::Exact(g.sup_norm()),
            (DeskSpace::Finite { p, .. }, Functional::Coords { coords }) => Lp::of(p).conjugate().norm(coords),
            (DeskSpace::Sum(s), Functional::Pair { pair }) => {
                let c = s.x.dual_norm_unchecked(&pair.0);
                let d = s.y.dual_norm_unchecked(&pair.1);
                s.norm.dual_eval(&c, &d).expect("dual norms are nonnegative")
            }
            _ => unreachable!("checked shape"),
        }
    }

    /// `f(v)`, always exact.
    pub fn apply(&self, f: &Functional, v: &Vector) -> Result<Q> {
        self.check_functional(f)?;
        self.check_vector(v)?;
        Ok(apply_unchecked(f, v))
    }

    pub fn zero_vector(&self) -> Vector {
        match self {
            DeskSpace::C01Pl { .. } => Vector::Pl(PlFn::constant(Q::zero())),
            DeskSpace::L1Step { .. } => Vector::Step(StepFn::constant(Q::zero())),
            DeskSpace::Finite { dim, .. } => Vector::coords(vec![Q::zero(); *dim]),
            DeskSpace::Sum(s) => Vector::pair(s.x.zero_vector(), s.y.zero_vector()),
        }
    }

    pub fn zero_functional(&self) -> Functional {
        match self {
            DeskSpace::C01Pl { .. } => Functional::Masses(Masses(Vec::new())),
            DeskSpace::L1Step { .. } => Functional::Step(StepFn::constant(Q::zero())),
            DeskSpace::Finite { dim, .. } => Functional::coords(vec![Q::zero(); *dim]),
            DeskSpace::Sum(s) => Functional::pair(s.x.zero_functional(), s.y.zero_functional()),
        }
    }

    /// `x` is on the unit sphere (exactly, or within tolerance for inexact norms).
    pub fn require_unit(&self, x: &Vector, what: &str) -> Result<()> {
        let n = self.norm(x)?;
        if !n.approx_eq(&Real::one()) {
            return Err(Error::Domain(format!("{what} must have norm 1, got {n}")));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SpaceRepr::from(self)).expect("space serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let r: SpaceRepr = serde_json::from_value(v.clone())?;
        r.try_into()
    }
}

fn apply_unchecked(f: &Functional, v: &Vector) -> Q {
    match (f, v) {
        (Functional::Masses(m), Vector::Pl(x)) => m.apply(x),
        (Functional::Step(g), Vector::Step(x)) => g.integral_product(x),
        (Functional::Coords { coords: g }, Vector::Coords { coords: x }) => g.iter().zip(x).map(|(a, b)| a * b).sum(),
        (Functional::Pair { pair: f }, Vector::Pair { pair: v }) => {
            apply_unchecked(&f.0, &v.0) + apply_unchecked(&f.1, &v.1)
        }
        _ => unreachable!("checked shape"),
    }
}

impl fmt::Display for DeskSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn default_level() -> u32 {
    DEFAULT_MAX_LEVEL
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
enum ModelRepr {
    C01pl {
        #[serde(default = "default_level")]
        max_level: u32,
    },
    L1step {
        #[serde(default = "default_level")]
        max_level: u32,
    },
    Finite {
        dim: usize,
        p: Exponent,
    },
}

#[derive(Serialize, Deserialize)]
struct SumRepr {
    norm: NormSpec,
    #[serde(rename = "X")]
    x: SpaceRepr,
    #[serde(rename = "Y")]
    y: SpaceRepr,
}

/// Space spec file contents: a model, or `{"sum": {"norm", "X", "Y"}}`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SpaceRepr {
    Sum { sum: Box<SumRepr> },
    Model(ModelRepr),
}

impl From<&DeskSpace> for SpaceRepr {
    fn from(s: &DeskSpace) -> Self {
        match s {
            DeskSpace::C01Pl { max_level } => SpaceRepr::Model(ModelRepr::C01pl { max_level: *max_level }),
            DeskSpace::L1Step { max_level } => SpaceRepr::Model(ModelRepr::L1step { max_level: *max_level }),
            DeskSpace::Finite { dim, p } => SpaceRepr::Model(ModelRepr::Finite { dim: *dim, p: *p }),
            DeskSpace::Sum(s) => SpaceRepr::Sum {
                sum: Box::new(SumRepr {
                    norm: s.norm.spec().clone(),
                    x: (&s.x).into(),
                    y: (&s.y).into(),
                }),
            },
        }
    }
}

impl TryFrom<SpaceRepr> for DeskSpace {
    type Error = Error;
    fn try_from(r: SpaceRepr) -> Result<Self> {
        Ok(match r {
            SpaceRepr::Model(ModelRepr::C01pl { max_level }) => DeskSpace::C01Pl { max_level },
            SpaceRepr::Model(ModelRepr::L1step { max_level }) => DeskSpace::L1Step { max_level },
            SpaceRepr::Model(ModelRepr::Finite { dim, p }) => {
                if dim == 0 {
                    return Err(Error::Config("finite model needs dim >= 1".into()));
                }
                if let Exponent::Finite(p) = p {
                    if !(p >= 1.0) {
                        return Err(Error::Config(format!("l_p needs p >= 1, got {p}")));
                    }
                }
                DeskSpace::Finite { dim, p }
            }
            SpaceRepr::Sum { sum } => {
                let norm = crate::norm2::AbsoluteNorm::from_spec(sum.norm)?;
                DeskSpace::sum(norm, sum.x.try_into()?, sum.y.try_into()?)
            }
        })
    }
}

impl Serialize for DeskSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpaceRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DeskSpace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SpaceRepr::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

/// The slice `S(B, f, alpha) = { u in B : f(u) > 1 - alpha }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub functional: Functional,
    #[serde(with = "serde_q")]
    pub alpha: Q,
}

impl SliceSpec {
    /// Checks `||f|| = 1` (within tolerance when the dual norm is inexact) and `alpha > 0`.
    pub fn new(space: &DeskSpace, functional: Functional, alpha: Q) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(Error::Domain("slice width must be positive".into()));
        }
        let n = space.dual_norm(&functional)?;
        if !n.approx_eq(&Real::one()) {
            return Err(Error::Domain(format!("slice functional has norm {n}, not 1")));
        }
        Ok(SliceSpec { functional, alpha })
    }

    /// Normalizes a nonzero functional. Inexact dual norms are rounded so the
    /// result has norm at most 1 and within tolerance of 1.
    pub fn normalized(space: &DeskSpace, functional: &Functional, alpha: Q) -> Result<Self> {
        let n = space.dual_norm(functional)?;
        if n.is_zero() {
            return Err(Error::Domain("zero functional does not define a slice".into()));
        }
        let scale = recip_down(&n)?;
        SliceSpec::new(space, functional.scale(&scale), alpha)
    }

    pub fn with_alpha(&self, alpha: Q) -> SliceSpec {
        SliceSpec {
            functional: self.functional.clone(),
            alpha,
        }
    }

    pub fn threshold(&self) -> Q {
        Q::one() - &self.alpha
    }

    pub fn contains(&self, space: &DeskSpace, u: &Vector) -> Result<bool> {
        let in_ball = space.norm(u)?.le(&Real::one());
        Ok(in_ball && space.apply(&self.functional, u)? > self.threshold())
    }
}

/// A rational no larger than `1 / n` and within relative `1e-12` of it.
pub(crate) fn recip_down(n: &Real) -> Result<Q> {
    match n {
        Real::Exact(x) => Ok(Q::one() / x),
        Real::Approx(x) => q_from_f64((1.0 / x) * (1.0 - 1e-12)),
    }
}

/// Rational value of a float, pulled towards zero by a relative `1e-12`.
pub(crate) fn shrink_q(x: f64) -> Q {
    q_from_f64(x * (1.0 - 1e-12)).unwrap_or_else(|_| Q::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm2::AbsoluteNorm;
    use crate::real::q;

    #[test]
    fn norms_of_each_model() {
        let c01 = DeskSpace::c01();
        let x = Vector::Pl(PlFn::constant(q(-3, 4)));
        assert_eq!(c01.norm(&x).unwrap(), Real::Exact(q(3, 4)));

        let l2 = DeskSpace::lp(2, 2.0);
        assert_eq!(l2.norm(&Vector::coords(vec![q(3, 5), q(4, 5)])).unwrap(), Real::one());
        assert!(!l2.norm(&Vector::coords(vec![q(1, 1), q(1, 1)])).unwrap().is_exact());

        let z = DeskSpace::sum(AbsoluteNorm::l1(), c01.clone(), l2.clone());
        let v = Vector::pair(x, Vector::coords(vec![q(3, 5), q(4, 5)]));
        assert_eq!(z.norm(&v).unwrap(), Real::Exact(q(7, 4)));
    }

    #[test]
    fn pairing_and_dual_norms() {
        let c01 = DeskSpace::c01();
        let f = Functional::Masses(Masses::new(vec![(q(1, 2), q(1, 2)), (q(0, 1), q(-1, 2))]).unwrap());
        assert_eq!(c01.dual_norm(&f).unwrap(), Real::one());
        let x = Vector::Pl(PlFn::new(vec![(q(0, 1), q(0, 1)), (q(1, 1), q(1, 1))]).unwrap());
        assert_eq!(c01.apply(&f, &x).unwrap(), q(1, 4));

        let linf = DeskSpace::lp(2, f64::INFINITY);
        assert_eq!(linf.dual_norm(&Functional::coords(vec![q(1, 2), q(-1, 2)])).unwrap(), Real::one());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let c01 = DeskSpace::c01();
        assert!(c01.norm(&Vector::coords(vec![q(1, 1)])).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let z = DeskSpace::sum(AbsoluteNorm::hex(), DeskSpace::c01(), DeskSpace::lp(2, 2.0));
        let back = DeskSpace::from_json(&z.to_json()).unwrap();
        assert_eq!(back.label(), z.label());
        let parsed: DeskSpace =
            serde_json::from_str(r#"{"sum":{"norm":{"kind":"lp","p":"inf"},"X":{"model":"c01pl"},"Y":{"model":"finite","dim":2,"p":2}}}"#)
                .unwrap();
        assert!(parsed.as_sum().unwrap().norm.is_linf());

        let v: Vector = serde_json::from_str(r#"{"pair":[{"knots":[["0","1"],["1","1"]]},{"coords":["3/5","4/5"]}]}"#).unwrap();
        assert!(parsed.check_vector(&v).is_ok());
        let f: Functional = serde_json::from_str(r#"{"pair":[{"masses":[["1/3","1/2"]]},{"coords":["1/2","0"]}]}"#).unwrap();
        assert!(parsed.check_functional(&f).is_ok());
        let s: Functional = serde_json::from_str(r#"{"breaks":["0","1/2","1"],"heights":["1","-1"]}"#).unwrap();
        assert!(DeskSpace::l1step().check_functional(&s).is_ok());
    }

    #[test]
    fn slices_require_norm_one() {
        let l1 = DeskSpace::lp(2, 1.0);
        assert!(SliceSpec::new(&l1, Functional::coords(vec![q(1, 2), q(1, 2)]), q(1, 10)).is_err());
        let s = SliceSpec::normalized(&l1, &Functional::coords(vec![q(1, 2), q(1, 4)]), q(1, 10)).unwrap();
        assert_eq!(s.functional, Functional::coords(vec![q(1, 1), q(1, 2)]));
    }
}
