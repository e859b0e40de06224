//! Seeded random functionals, vectors and slices for the demos and tests.

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::real::{q, Q};
use crate::spaces::{norming_functional, recip_down, DeskSpace, Functional, Masses, PlFn, SliceSpec, StepFn, Vector};

const DEN: i64 = 64;

fn small_q<R: Rng>(rng: &mut R) -> Q {
    q(rng.gen_range(-DEN..=DEN), DEN)
}

fn dyadic_positions<R: Rng>(rng: &mut R, n: usize, level: u32) -> Vec<Q> {
    let d = 1i64 << level;
    let mut all: Vec<i64> = (0..=d).collect();
    all.shuffle(rng);
    let mut picked: Vec<i64> = all.into_iter().take(n).collect();
    picked.sort_unstable();
    picked.into_iter().map(|k| q(k, d)).collect()
}

/// A nonzero functional with small rational data.
pub fn random_functional<R: Rng>(space: &DeskSpace, rng: &mut R) -> Result<Functional> {
    loop {
        let f = match space {
            DeskSpace::C01Pl { .. } => {
                let n = rng.gen_range(1..=3);
                let pos = dyadic_positions(rng, n, 4);
                Functional::Masses(Masses::new(pos.into_iter().map(|s| (s, small_q(rng))).collect())?)
            }
            DeskSpace::L1Step { .. } => {
                let n = rng.gen_range(1..=4);
                let mut inner = dyadic_positions(rng, n + 1, 4);
                inner.retain(|s| !s.is_zero() && !s.is_one());
                let mut breaks = vec![Q::zero()];
                breaks.extend(inner);
                breaks.push(Q::one());
                let heights = (0..breaks.len() - 1).map(|_| small_q(rng)).collect();
                Functional::Step(StepFn::new(breaks, heights)?)
            }
            DeskSpace::Finite { dim, .. } => Functional::coords((0..*dim).map(|_| small_q(rng)).collect()),
            DeskSpace::Sum(s) => {
                let fx = random_functional(&s.x, rng)?;
                let fy = random_functional(&s.y, rng)?;
                // sometimes let one side dominate or vanish
                match rng.gen_range(0..6) {
                    0 => Functional::pair(fx, s.y.zero_functional()),
                    1 => Functional::pair(s.x.zero_functional(), fy),
                    2 => Functional::pair(fx.scale(&q(1, 8)), fy),
                    _ => Functional::pair(fx, fy),
                }
            }
        };
        if !space.dual_norm(&f)?.is_zero() {
            return Ok(f);
        }
    }
}

/// A unit vector with small rational data (exactly normed for exact norms).
pub fn random_unit_vector<R: Rng>(space: &DeskSpace, rng: &mut R) -> Result<Vector> {
    loop {
        let v = match space {
            DeskSpace::C01Pl { .. } => {
                let n = rng.gen_range(2..=5);
                let pos = dyadic_positions(rng, n, 3);
                let mut knots: Vec<(Q, Q)> = pos.into_iter().map(|s| (s, small_q(rng))).collect();
                if !knots[0].0.is_zero() {
                    knots.insert(0, (Q::zero(), small_q(rng)));
                }
                if !knots.last().unwrap().0.is_one() {
                    knots.push((Q::one(), small_q(rng)));
                }
                Vector::Pl(PlFn::new(knots)?)
            }
            DeskSpace::L1Step { .. } => {
                let n = rng.gen_range(3..=5);
                let pos = dyadic_positions(rng, n, 3);
                let mut breaks = vec![Q::zero()];
                breaks.extend(pos.into_iter().filter(|s| !s.is_zero() && !s.is_one()));
                breaks.push(Q::one());
                let heights = (0..breaks.len() - 1).map(|_| small_q(rng)).collect();
                Vector::Step(StepFn::new(breaks, heights)?)
            }
            DeskSpace::Finite { dim, .. } => Vector::coords((0..*dim).map(|_| small_q(rng)).collect()),
            DeskSpace::Sum(s) => Vector::pair(random_unit_vector(&s.x, rng)?, random_unit_vector(&s.y, rng)?),
        };
        let n = space.norm(&v)?;
        if n.is_zero() {
            continue;
        }
        let Some(n) = n.as_exact() else {
            return Err(Error::Domain(format!("no exact unit vectors in {}", space.label())));
        };
        return Ok(v.scale(&n.recip()));
    }
}

/// Width drawn from `{1/2, 1/4, ..., 1/64}` or uniformly from `(0, 1/2]` on a
/// grid of step `1/100`.
pub fn random_width<R: Rng>(rng: &mut R) -> Q {
    if rng.gen_bool(0.5) {
        q(1, 1 << rng.gen_range(1..=6))
    } else {
        q(rng.gen_range(1..=50), 100)
    }
}

/// A random slice of the unit ball.
pub fn random_slice<R: Rng>(space: &DeskSpace, rng: &mut R) -> Result<SliceSpec> {
    let f = random_functional(space, rng)?;
    SliceSpec::normalized(space, &f, random_width(rng))
}

/// A random slice that contains `x`: a random functional is tilted towards a
/// norming functional of `x` until `x` falls inside with some room.
pub fn random_slice_containing<R: Rng>(space: &DeskSpace, x: &Vector, rng: &mut R) -> Result<SliceSpec> {
    let nx = norming_functional(space, x)?;
    let f = random_functional(space, rng)?;
    let fnorm = space.dual_norm(&f)?;
    let f = f.scale(&recip_down(&fnorm)?);
    let lambda = q(rng.gen_range(0..=8), 8);
    let mut g = Functional::lincomb(&lambda, &nx, &(Q::one() - &lambda), &f)?;
    if space.dual_norm(&g)?.is_zero() {
        g = nx;
    }
    let g = g.scale(&recip_down(&space.dual_norm(&g)?)?);
    let gap = Q::one() - space.apply(&g, x)?;
    let gap = if gap.is_negative() { Q::zero() } else { gap };
    let alpha = gap + q(rng.gen_range(1..=20), 100);
    SliceSpec::new(space, g, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_objects_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let l2 = DeskSpace::lp(2, 2.0);
        for space in [DeskSpace::c01(), DeskSpace::l1step(), DeskSpace::lp(3, 1.0), l2.clone()] {
            for _ in 0..20 {
                let s = random_slice(&space, &mut rng).unwrap();
                assert!(s.alpha.is_positive());
                if space.is_polyhedral() || !matches!(space, DeskSpace::Finite { .. }) {
                    let x = random_unit_vector(&space, &mut rng).unwrap();
                    let t = random_slice_containing(&space, &x, &mut rng).unwrap();
                    assert!(t.contains(&space, &x).unwrap());
                }
            }
        }
    }
}
