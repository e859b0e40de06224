//! Absolute sums `X (+)_N Y` and the witness and certificate transformers
//! between a sum and its summands.
//!
//! A point that carries a witness oracle implements [`PointOracle`]. Model
//! points of `C01Pl` and `L1Step` are Daugavet points; the constructors here
//! produce new oracle-backed points in sums, which can be fed into further
//! sums.

mod certs;
mod daugavet;
mod delta;

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm2::AbsoluteNorm;
use crate::real::{serde_q, Q};
use crate::spaces::{daugavet_witness, DeskSpace, DiametralWitness, SliceSpec, Vector};

pub use certs::{combine_non_daugavet_certificates, lift_non_delta_certificate, LiftedCertificate};
pub use daugavet::{
    aoh_daugavet_point, aoh_daugavet_point_with_pair, component_witness_from_sum, linf_daugavet_point,
    sum_daugavet_witness, AohSumPoint, SumRule, Which,
};
pub use delta::{
    combine_non_deltak_certificates, deltak_witness_l1, infty_delta_witness, DeltaKPoint, InftyDeltaPoint,
};

#[derive(Clone, Debug)]
pub struct SumSpace {
    pub norm: AbsoluteNorm,
    pub x: DeskSpace,
    pub y: DeskSpace,
}

impl SumSpace {
    pub fn new(norm: AbsoluteNorm, x: DeskSpace, y: DeskSpace) -> Self {
        SumSpace { norm, x, y }
    }
}

/// What a point oracle promises about its witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Guarantee {
    /// Every slice, containing the point or not.
    Daugavet,
    /// Slices containing the point, with the witness in the `k`-times widened
    /// slice (`k = 1` is a Delta-point).
    DeltaK {
        #[serde(with = "serde_q")]
        k: Q,
    },
}

impl Guarantee {
    /// Width multiplier of the slice the witnesses land in.
    pub fn widening(&self) -> Q {
        match self {
            Guarantee::Daugavet => Q::one(),
            Guarantee::DeltaK { k } => k.clone(),
        }
    }
}

/// A unit vector together with a procedure producing diametral witnesses.
pub trait PointOracle: Send + Sync + fmt::Debug {
    fn space(&self) -> &DeskSpace;
    fn point(&self) -> &Vector;
    fn guarantee(&self) -> Guarantee;
    /// A witness for `slice` at distance at least `2 - eps`. For `DeltaK`
    /// guarantees the slice must contain the point and the returned witness
    /// records the widened slice.
    fn witness(&self, slice: &SliceSpec, eps: &Q) -> Result<DiametralWitness>;
}

pub type Oracle = Arc<dyn PointOracle>;

/// A sphere point of `C01Pl` or `L1Step`, answered by the model oracle.
#[derive(Clone, Debug)]
pub struct ModelPoint {
    space: DeskSpace,
    x: Vector,
}

impl ModelPoint {
    pub fn new(space: DeskSpace, x: Vector) -> Result<Self> {
        if !space.has_daugavet_oracle() {
            return Err(Error::NoOracle(space.label()));
        }
        space.require_unit(&x, "x")?;
        Ok(ModelPoint { space, x })
    }
}

impl PointOracle for ModelPoint {
    fn space(&self) -> &DeskSpace {
        &self.space
    }
    fn point(&self) -> &Vector {
        &self.x
    }
    fn guarantee(&self) -> Guarantee {
        Guarantee::Daugavet
    }
    fn witness(&self, slice: &SliceSpec, eps: &Q) -> Result<DiametralWitness> {
        daugavet_witness(&self.space, &self.x, slice, eps)
    }
}

/// A summand: its space, a vector and possibly an oracle for that vector.
#[derive(Clone, Debug)]
pub struct Component {
    pub space: DeskSpace,
    pub vector: Vector,
    pub oracle: Option<Oracle>,
}

impl Component {
    /// Attaches the model oracle when the space has one.
    pub fn new(space: DeskSpace, vector: Vector) -> Result<Self> {
        space.check_vector(&vector)?;
        let oracle: Option<Oracle> = if space.has_daugavet_oracle() && space.require_unit(&vector, "x").is_ok() {
            Some(Arc::new(ModelPoint::new(space.clone(), vector.clone())?))
        } else {
            None
        };
        Ok(Component { space, vector, oracle })
    }

    /// A component without any oracle.
    pub fn plain(space: DeskSpace, vector: Vector) -> Result<Self> {
        space.check_vector(&vector)?;
        Ok(Component {
            space,
            vector,
            oracle: None,
        })
    }

    pub fn from_oracle(oracle: Oracle) -> Self {
        Component {
            space: oracle.space().clone(),
            vector: oracle.point().clone(),
            oracle: Some(oracle),
        }
    }

    pub(crate) fn daugavet_oracle(&self, side: &str) -> Result<&Oracle> {
        match &self.oracle {
            Some(o) if o.guarantee() == Guarantee::Daugavet => Ok(o),
            Some(_) => Err(Error::MissingOracle(format!("{side}: oracle is not a Daugavet oracle"))),
            None => Err(Error::MissingOracle(format!("{side}: no witness oracle for {}", self.space.label()))),
        }
    }

    pub(crate) fn delta_oracle(&self, side: &str, k: &Q) -> Result<&Oracle> {
        match &self.oracle {
            Some(o) if o.guarantee().widening() <= *k => Ok(o),
            Some(o) => Err(Error::MissingOracle(format!(
                "{side}: oracle widens by {}, need at most {}",
                crate::real::format_q(&o.guarantee().widening()),
                crate::real::format_q(k)
            ))),
            None => Err(Error::MissingOracle(format!("{side}: no witness oracle for {}", self.space.label()))),
        }
    }
}

/// Widening index of a point: it is a Delta_k-point exactly for `k >= a`, and
/// for no `k` when `a` is infinite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaIndexSet {
    From(#[serde(with = "serde_q")] Q),
    Never(Infinite),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Infinite {
    Inf,
}

impl DeltaIndexSet {
    pub fn from(a: Q) -> Result<Self> {
        if a < Q::one() {
            return Err(Error::Domain("Delta index must be at least 1".into()));
        }
        Ok(DeltaIndexSet::From(a))
    }

    pub fn never() -> Self {
        DeltaIndexSet::Never(Infinite::Inf)
    }

    pub fn contains(&self, k: &Q) -> bool {
        match self {
            DeltaIndexSet::From(a) => k >= a,
            DeltaIndexSet::Never(_) => false,
        }
    }

    /// `1/a`, zero for the infinite index.
    pub fn reciprocal(&self) -> Q {
        match self {
            DeltaIndexSet::From(a) => a.recip(),
            DeltaIndexSet::Never(_) => Q::zero(),
        }
    }
}

/// Conjugate exponents `p >= a`, `q >= b` with `1/p + 1/q = 1`, if any exist;
/// they do exactly when `1/a + 1/b >= 1`. The smallest admissible `p` is returned.
pub fn conjugate_pair_exists(a: &DeltaIndexSet, b: &DeltaIndexSet) -> Option<(Q, Q)> {
    let one = Q::one();
    if a.reciprocal() + b.reciprocal() < one {
        return None;
    }
    match (a, b) {
        (DeltaIndexSet::From(a), DeltaIndexSet::From(b)) => {
            if *a == one {
                // p = 1 has no finite conjugate; take the smallest p with q = b
                if *b == one {
                    let two = Q::from_integer(2.into());
                    return Some((two.clone(), two));
                }
                return Some((b / (b - &one), b.clone()));
            }
            let q = a / (a - &one);
            debug_assert!(q >= *b);
            Some((a.clone(), q))
        }
        _ => None,
    }
}

/// `1/p + 1/q = 1`, exactly.
pub fn check_conjugate(p: &Q, q: &Q) -> Result<()> {
    if !p.is_positive() || !q.is_positive() || p.recip() + q.recip() != Q::one() {
        return Err(Error::ConjugateMismatch {
            p: crate::real::format_q(p),
            q: crate::real::format_q(q),
        });
    }
    Ok(())
}
