//! Randomized search for points that break a certificate.

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::real::{q_to_f64, serde_q, Real, Q};
use crate::spaces::{
    norming_element, recip_down, search_plane, search_slice, DeskSpace, FlatModel, NonDeltaCertificate, SearchConfig,
    Vector,
};

/// Dyadic resolution of the flattened function-space models.
const RESOLUTION: u32 = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FalsifierBudget {
    pub samples: usize,
    pub ascent_steps: usize,
    pub seed: u64,
}

impl Default for FalsifierBudget {
    fn default() -> Self {
        FalsifierBudget {
            samples: 100_000,
            ascent_steps: 200,
            seed: 0,
        }
    }
}

/// A ball point in the widened slice at distance at least `2 - eps`, checked
/// in exact arithmetic (up to the tolerance of inexact norms).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Violation {
    pub u: Vector,
    pub norm_u: Real,
    #[serde(with = "serde_q")]
    pub functional_value: Q,
    pub distance: Real,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Unfalsified,
    Violated,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FalsifyOutcome {
    pub verdict: Verdict,
    pub violation: Option<Violation>,
    /// Largest distance seen by the search (floating point).
    pub best_distance: Option<f64>,
    pub bound: f64,
    pub samples_used: usize,
    pub empty_slice: bool,
}

impl FalsifyOutcome {
    fn unfalsified(bound: f64, best: Option<f64>, used: usize, empty: bool) -> Self {
        FalsifyOutcome {
            verdict: Verdict::Unfalsified,
            violation: None,
            best_distance: best,
            bound,
            samples_used: used,
            empty_slice: empty,
        }
    }
}

/// Exact recheck of a candidate: pulled into the ball, then tested against
/// the widened slice and the claimed bound.
fn revalidate(space: &DeskSpace, x: &Vector, cert: &NonDeltaCertificate, u: Vector) -> Result<Option<Violation>> {
    let n = space.norm(&u)?;
    let u = if n.gt(&Real::one()) || (n.is_exact() && n.to_q() > Q::one()) {
        u.scale(&recip_down(&n)?)
    } else {
        u
    };
    let norm_u = space.norm(&u)?;
    let fu = space.apply(&cert.functional, &u)?;
    let distance = space.norm(&x.sub(&u)?)?;
    let bound = cert.claimed_bound();
    let far = match &distance {
        Real::Exact(d) => *d >= bound,
        Real::Approx(d) => *d >= q_to_f64(&bound),
    };
    let inside = norm_u.le(&Real::one()) && fu > Q::one() - cert.widened_alpha();
    Ok((far && inside).then_some(Violation {
        u,
        norm_u,
        functional_value: fu,
        distance,
    }))
}

/// Searches `S(B, f, k alpha)` for `u` with `||x - u|| >= 2 - eps`. Absence of
/// a violation after the budget is "unfalsified", not a proof.
pub fn falsify(space: &DeskSpace, x: &Vector, cert: &NonDeltaCertificate, budget: &FalsifierBudget) -> Result<FalsifyOutcome> {
    let bound = q_to_f64(&cert.claimed_bound());
    let width = cert.widened_alpha();
    if !width.is_positive() {
        return Ok(FalsifyOutcome::unfalsified(bound, None, 0, true));
    }
    let f = &cert.functional;
    let model = FlatModel::build(space, &[x], &[f], RESOLUTION)?;
    let xf = model.embed_vector(x)?;
    let gf = model.embed_functional(f)?;
    let tau = q_to_f64(&(Q::one() - &width));
    let fnorm = space.dual_norm(f)?;
    let anchor_v = norming_element(space, &f.scale(&recip_down(&fnorm)?))?;
    let anchor = model.embed_vector(&anchor_v)?;
    let cfg = SearchConfig {
        samples: budget.samples,
        ascent_steps: budget.ascent_steps,
        seed: budget.seed,
        keep: 8,
    };
    let mut candidates = Vec::new();
    let out = search_slice(&model, &xf, &gf, tau, &anchor, &cfg, Some(bound + 1e-9));
    let mut best = out.best.as_ref().map(|_| out.value);
    let used = out.samples_used;
    if let Some(u) = out.best {
        candidates.push((out.value, u));
    }
    if model.dim() == 2 {
        let p = search_plane(&model, &xf, &gf, tau, 2048);
        if let Some(u) = p.best {
            best = Some(best.map_or(p.value, |b: f64| b.max(p.value)));
            candidates.push((p.value, u));
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    for (value, u) in candidates {
        if value < bound - 1e-6 {
            break;
        }
        if let Some(v) = revalidate(space, x, cert, model.to_vector(&u)?)? {
            return Ok(FalsifyOutcome {
                verdict: Verdict::Violated,
                violation: Some(v),
                best_distance: best,
                bound,
                samples_used: used,
                empty_slice: false,
            });
        }
    }
    Ok(FalsifyOutcome::unfalsified(bound, best, used, false))
}
