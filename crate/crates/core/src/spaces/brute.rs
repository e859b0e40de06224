//! Ground truth for `sup { ||x - u|| : u in B, f(u) > 1 - alpha }`.
//!
//! Exact routes: a closed form for Euclidean spaces, vertex enumeration of the
//! (closed) slice for polyhedral unit balls, and a splitting rule for `l_inf`
//! sums. Other sums of finite-dimensional models are handled by a grid over the
//! sphere parameter of the outer norm and over the split of the threshold
//! between the components, followed by local refinement. Everything else falls
//! back to sampling, which only gives a lower bound and is flagged as such.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::flat::{search_plane, search_slice, FlatModel, SearchConfig};
use super::{lp_f64, norming_element, DeskSpace, Functional, Lp, SliceSpec, Vector};
use crate::error::{Error, Result};
use crate::norm2::AbsoluteNorm;
use crate::real::{q_to_f64, Real, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupMethod {
    WholeBall,
    Analytic,
    Enumeration,
    Decomposition,
    SphereGrid,
    GridAscent,
    Sampled,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SliceSup {
    pub value: Real,
    pub method: SupMethod,
    /// True when `value` is only the best point found by sampling.
    pub lower_bound_only: bool,
}

impl SliceSup {
    fn new(value: Real, method: SupMethod) -> Self {
        SliceSup {
            value,
            method,
            lower_bound_only: matches!(method, SupMethod::GridAscent | SupMethod::Sampled),
        }
    }
}

/// Largest dimension for which the exact routes enumerate vertices.
const MAX_ENUM_DIM: usize = 6;

/// `sup ||x - u||` over the slice. Spaces without an exact or grid route get a
/// sampled lower bound.
pub fn brute_slice_sup(space: &DeskSpace, x: &Vector, slice: &SliceSpec) -> Result<SliceSup> {
    sup_over_halfspace(space, x, &slice.functional, &Real::Exact(slice.threshold()))
}

/// Same as [`brute_slice_sup`] for `{ u in B : g(u) > tau }` with any functional.
pub fn sup_over_halfspace(space: &DeskSpace, x: &Vector, g: &Functional, tau: &Real) -> Result<SliceSup> {
    match exact_sup(space, x, g, tau)? {
        Some(Sub::Empty) => Err(Error::EmptySlice),
        Some(Sub::Value(v, m)) => Ok(SliceSup::new(v, m)),
        None => {
            let cfg = SearchConfig::default();
            let mut s = sampled_sup(space, x, g, tau, &cfg)?;
            s.method = SupMethod::Sampled;
            Ok(s)
        }
    }
}

/// The exact route alone; `NoBruteOracle` when the space has none.
pub fn enumeration_sup(space: &DeskSpace, x: &Vector, slice: &SliceSpec) -> Result<SliceSup> {
    match exact_sup(space, x, &slice.functional, &Real::Exact(slice.threshold()))? {
        Some(Sub::Empty) => Err(Error::EmptySlice),
        Some(Sub::Value(v, m)) if m != SupMethod::SphereGrid => Ok(SliceSup::new(v, m)),
        _ => Err(Error::NoBruteOracle(space.label())),
    }
}

/// Independent route through the flat model: angular grid with bisection on
/// the slice boundary and ascent in the plane, sampling plus ascent above.
pub fn grid_ascent_sup(space: &DeskSpace, x: &Vector, slice: &SliceSpec, cfg: &SearchConfig) -> Result<SliceSup> {
    let mut s = sampled_sup(space, x, &slice.functional, &Real::Exact(slice.threshold()), cfg)?;
    s.method = SupMethod::GridAscent;
    Ok(s)
}

fn sampled_sup(space: &DeskSpace, x: &Vector, g: &Functional, tau: &Real, cfg: &SearchConfig) -> Result<SliceSup> {
    let model = FlatModel::build(space, &[x], &[g], 6)?;
    let xf = model.embed_vector(x)?;
    let gf = model.embed_functional(g)?;
    let t = tau.to_f64();
    let out = if model.dim() == 2 {
        search_plane(&model, &xf, &gf, t, 4096)
    } else {
        let anchor = if g.is_zero() {
            vec![0.0; model.dim()]
        } else {
            let n = space.dual_norm(g)?;
            let e = norming_element(space, &g.scale(&super::recip_down(&n)?))?;
            model.embed_vector(&e)?
        };
        search_slice(&model, &xf, &gf, t, &anchor, cfg, None)
    };
    if out.best.is_none() {
        return Err(Error::EmptySlice);
    }
    Ok(SliceSup::new(Real::Approx(out.value), SupMethod::Sampled))
}

/// Whether [`brute_slice_sup`] has a non-sampling route for this space.
pub fn has_brute_oracle(space: &DeskSpace) -> bool {
    match space {
        DeskSpace::Finite { dim, p } => Lp::of(p) == Lp::Two || (space.is_polyhedral() && *dim <= MAX_ENUM_DIM),
        DeskSpace::Sum(s) => {
            if space.is_polyhedral() && space.finite_dim().is_some_and(|d| d <= MAX_ENUM_DIM) {
                return true;
            }
            if s.norm.is_linf() {
                return has_brute_oracle(&s.x) && has_brute_oracle(&s.y);
            }
            let comp = |c: &DeskSpace| match c {
                DeskSpace::Finite { dim, p } => matches!(Lp::of(p), Lp::Two) || (matches!(Lp::of(p), Lp::One | Lp::Inf) && *dim <= 4),
                _ => false,
            };
            comp(&s.x) && comp(&s.y)
        }
        _ => false,
    }
}

enum Sub {
    Empty,
    Value(Real, SupMethod),
}

fn exact_sup(space: &DeskSpace, x: &Vector, g: &Functional, tau: &Real) -> Result<Option<Sub>> {
    space.check_vector(x)?;
    let gn = space.dual_norm(g)?;
    if !gn.gt(tau) {
        return Ok(Some(Sub::Empty));
    }
    if tau.lt(&gn.neg()) {
        let v = space.norm(x)?.add(&Real::one());
        return Ok(Some(Sub::Value(v, SupMethod::WholeBall)));
    }
    if let DeskSpace::Finite { p, dim } = space {
        if Lp::of(p) == Lp::Two {
            let xf = flat_f64(x);
            let gf = flat_f64_fn(g);
            let v = euclid_sup(&xf, &gf, tau.to_f64()).expect("nonempty slice");
            return Ok(Some(Sub::Value(Real::Approx(v), SupMethod::Analytic)));
        }
        if *dim > MAX_ENUM_DIM {
            return Ok(None);
        }
    }
    if space.is_polyhedral() && space.finite_dim().is_some_and(|d| d <= MAX_ENUM_DIM) {
        let tq = match tau {
            Real::Exact(t) => t.clone(),
            Real::Approx(t) => crate::real::q_from_f64(*t)?,
        };
        return Ok(enumerate(space, x, g, &tq)?.map(|v| {
            let v = if tau.is_exact() { v } else { Real::Approx(v.to_f64()) };
            Sub::Value(v, SupMethod::Enumeration)
        }));
    }
    if let DeskSpace::Sum(s) = space {
        let (xa, xb) = x.as_pair()?;
        let (ga, gb) = g.as_pair()?;
        if s.norm.is_linf() {
            let na = s.x.dual_norm(ga)?;
            let nb = s.y.dual_norm(gb)?;
            let left = exact_sup(&s.x, xa, ga, &tau.sub(&nb))?;
            let right = exact_sup(&s.y, xb, gb, &tau.sub(&na))?;
            let (Some(left), Some(right)) = (left, right) else { return Ok(None) };
            let mut best: Option<Real> = None;
            let mut grid = false;
            for sub in [left, right] {
                if let Sub::Value(v, m) = sub {
                    grid |= m == SupMethod::SphereGrid;
                    best = Some(match best {
                        Some(b) => b.max(&v),
                        None => v,
                    });
                }
            }
            let method = if grid { SupMethod::SphereGrid } else { SupMethod::Decomposition };
            return Ok(Some(best.map_or(Sub::Empty, |v| Sub::Value(v, method))));
        }
        if let (Some(cx), Some(cy)) = (Component::of(&s.x, xa, ga)?, Component::of(&s.y, xb, gb)?) {
            return Ok(sphere_grid(&s.norm, &cx, &cy, tau.to_f64()).map(|v| Sub::Value(Real::Approx(v), SupMethod::SphereGrid)));
        }
    }
    Ok(None)
}

fn flat_q(v: &Vector, out: &mut Vec<Q>) {
    match v {
        Vector::Coords { coords } => out.extend(coords.iter().cloned()),
        Vector::Pair { pair } => {
            flat_q(&pair.0, out);
            flat_q(&pair.1, out);
        }
        _ => unreachable!("finite-dimensional vector"),
    }
}

fn flat_q_fn(f: &Functional, out: &mut Vec<Q>) {
    match f {
        Functional::Coords { coords } => out.extend(coords.iter().cloned()),
        Functional::Pair { pair } => {
            flat_q_fn(&pair.0, out);
            flat_q_fn(&pair.1, out);
        }
        _ => unreachable!("finite-dimensional functional"),
    }
}

fn flat_f64(v: &Vector) -> Vec<f64> {
    let mut q = Vec::new();
    flat_q(v, &mut q);
    q.iter().map(q_to_f64).collect()
}

fn flat_f64_fn(f: &Functional) -> Vec<f64> {
    let mut q = Vec::new();
    flat_q_fn(f, &mut q);
    q.iter().map(q_to_f64).collect()
}

fn unflat(space: &DeskSpace, coords: &[Q]) -> Vector {
    match space {
        DeskSpace::Finite { .. } => Vector::coords(coords.to_vec()),
        DeskSpace::Sum(s) => {
            let k = s.x.finite_dim().expect("finite");
            Vector::pair(unflat(&s.x, &coords[..k]), unflat(&s.y, &coords[k..]))
        }
        _ => unreachable!("finite-dimensional model"),
    }
}

/// Rows `r` with `B = { u : r . u <= 1 for all r }`.
fn ball_rows(space: &DeskSpace) -> Vec<Vec<Q>> {
    match space {
        DeskSpace::Finite { dim, p } => match Lp::of(p) {
            Lp::One => (0..1usize << dim)
                .map(|m| {
                    (0..*dim)
                        .map(|i| if m >> i & 1 == 1 { -Q::one() } else { Q::one() })
                        .collect()
                })
                .collect(),
            Lp::Inf => (0..*dim)
                .flat_map(|i| {
                    [Q::one(), -Q::one()].into_iter().map(move |s| {
                        let mut r = vec![Q::zero(); *dim];
                        r[i] = s;
                        r
                    })
                })
                .collect(),
            _ => unreachable!("polyhedral model"),
        },
        DeskSpace::Sum(s) => {
            let rx = ball_rows(&s.x);
            let ry = ball_rows(&s.y);
            let dx = s.x.finite_dim().unwrap();
            let dy = s.y.finite_dim().unwrap();
            let mut rows = Vec::new();
            for (c, d) in s.norm.polygon().expect("polyhedral").pieces() {
                let xs: Vec<Vec<Q>> = if c.is_zero() { vec![vec![Q::zero(); dx]] } else { rx.iter().map(|r| r.iter().map(|v| v * c).collect()).collect() };
                let ys: Vec<Vec<Q>> = if d.is_zero() { vec![vec![Q::zero(); dy]] } else { ry.iter().map(|r| r.iter().map(|v| v * d).collect()).collect() };
                for a in &xs {
                    for b in &ys {
                        rows.push(a.iter().chain(b.iter()).cloned().collect());
                    }
                }
            }
            rows.sort();
            rows.dedup();
            rows
        }
        _ => unreachable!("finite-dimensional model"),
    }
}

/// Solves the square system by Gaussian elimination; `None` if singular.
fn solve_q(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let m = &a[r][col] / &a[col][col];
                for c in col..n {
                    let v = &m * &a[col][c];
                    a[r][c] -= v;
                }
                let v = &m * &b[col];
                b[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Visits every `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Maximum of `||x - u||` over the vertices of the polytope `B` cut by `g . u >= tau`.
fn enumerate(space: &DeskSpace, x: &Vector, g: &Functional, tau: &Q) -> Result<Option<Real>> {
    let n = space.finite_dim().expect("finite");
    let mut rows = ball_rows(space);
    let rhs_ball = rows.len();
    let mut gq = Vec::new();
    flat_q_fn(g, &mut gq);
    rows.push(gq.iter().map(|v| -v).collect());
    let rhs: Vec<Q> = (0..rows.len()).map(|i| if i < rhs_ball { Q::one() } else { -tau }).collect();
    let mut best: Option<Real> = None;
    let mut err = None;
    for_each_subset(rows.len(), n, |idx| {
        if err.is_some() {
            return;
        }
        let a = idx.iter().map(|&i| rows[i].clone()).collect();
        let b = idx.iter().map(|&i| rhs[i].clone()).collect();
        let Some(u) = solve_q(a, b) else { return };
        let feasible = rows
            .iter()
            .zip(&rhs)
            .all(|(r, c)| r.iter().zip(&u).map(|(p, q)| p * q).sum::<Q>() <= *c);
        if !feasible {
            return;
        }
        match unflat(space, &u).sub(x).and_then(|d| space.norm(&d)) {
            Ok(v) => {
                best = Some(match best.take() {
                    Some(b) => b.max(&v),
                    None => v,
                })
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(best)
}

/// Closed form for Euclidean balls: `None` if `||g|| < tau`.
fn euclid_sup(x: &[f64], g: &[f64], tau: f64) -> Option<f64> {
    let gn = lp_f64(g, 2.0);
    let xn = lp_f64(x, 2.0);
    if gn < tau {
        return None;
    }
    if gn == 0.0 || tau <= -gn {
        return Some(xn + 1.0);
    }
    if xn == 0.0 {
        return Some(1.0);
    }
    let t = (tau / gn).min(1.0);
    let xg: f64 = x.iter().zip(g).map(|(a, b)| a * b).sum::<f64>() / gn;
    if -xg / xn >= t {
        return Some(xn + 1.0);
    }
    let perp = (xn * xn - xg * xg).max(0.0).sqrt();
    let m = t * xg - (1.0 - t * t).max(0.0).sqrt() * perp;
    Some((xn * xn + 1.0 - 2.0 * m).max(0.0).sqrt())
}

/// Floating-point counterpart of [`enumerate`] for a single finite model,
/// with the ball scaled by `r`.
struct Component {
    x: Vec<f64>,
    g: Vec<f64>,
    gnorm: f64,
    kind: Lp,
    rows: Vec<Vec<f64>>,
}

impl Component {
    fn of(space: &DeskSpace, x: &Vector, g: &Functional) -> Result<Option<Component>> {
        let DeskSpace::Finite { dim, p } = space else { return Ok(None) };
        let kind = Lp::of(p);
        let rows = match kind {
            Lp::Two => Vec::new(),
            Lp::One | Lp::Inf if *dim <= 4 => ball_rows(space)
                .iter()
                .map(|r| r.iter().map(q_to_f64).collect())
                .collect(),
            _ => return Ok(None),
        };
        Ok(Some(Component {
            x: flat_f64(x),
            g: flat_f64_fn(g),
            gnorm: space.dual_norm(g)?.to_f64(),
            kind,
            rows,
        }))
    }

    fn norm(&self, v: &[f64]) -> f64 {
        lp_f64(v, self.kind.exponent())
    }

    /// `sup ||x - u||` over `||u|| <= r`, `g . u >= s`.
    fn sup(&self, r: f64, s: f64) -> Option<f64> {
        if r <= 0.0 {
            return (s <= 0.0).then(|| self.norm(&self.x));
        }
        let xs: Vec<f64> = self.x.iter().map(|v| v / r).collect();
        let t = s / r;
        let v = match self.kind {
            Lp::Two => euclid_sup(&xs, &self.g, t)?,
            _ => self.enumerate(&xs, t)?,
        };
        Some(r * v)
    }

    fn enumerate(&self, x: &[f64], tau: f64) -> Option<f64> {
        if self.gnorm < tau - 1e-12 {
            return None;
        }
        let n = x.len();
        let mut rows = self.rows.clone();
        rows.push(self.g.iter().map(|v| -v).collect());
        let rhs: Vec<f64> = (0..rows.len()).map(|i| if i + 1 < rows.len() { 1.0 } else { -tau }).collect();
        let mut best: Option<f64> = None;
        for_each_subset(rows.len(), n, |idx| {
            let mut a: Vec<Vec<f64>> = idx.iter().map(|&i| rows[i].clone()).collect();
            let mut b: Vec<f64> = idx.iter().map(|&i| rhs[i]).collect();
            for col in 0..n {
                let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
                if a[piv][col].abs() < 1e-12 {
                    return;
                }
                a.swap(col, piv);
                b.swap(col, piv);
                for r in 0..n {
                    if r != col {
                        let m = a[r][col] / a[col][col];
                        for c in col..n {
                            a[r][c] -= m * a[col][c];
                        }
                        b[r] -= m * b[col];
                    }
                }
            }
            let u: Vec<f64> = (0..n).map(|i| b[i] / a[i][i]).collect();
            let ok = rows
                .iter()
                .zip(&rhs)
                .all(|(r, c)| r.iter().zip(&u).map(|(p, q)| p * q).sum::<f64>() <= c + 1e-12);
            if ok {
                let d: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a - b).collect();
                let v = self.norm(&d);
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        });
        best
    }
}

/// `max over (t, s) of N(D_X(a(t), s), D_Y(b(t), tau - s))` where `(a(t), b(t))`
/// runs over the positive unit sphere of `N` and `D` is the component supremum
/// over a scaled ball and half-space.
fn sphere_grid(norm: &AbsoluteNorm, cx: &Component, cy: &Component, tau: f64) -> Option<f64> {
    let sphere = |t: f64| {
        let psi = norm.eval_f64(1.0 - t, t);
        ((1.0 - t) / psi, t / psi)
    };
    let value = |t: f64, lam: f64| -> Option<f64> {
        let t = t.clamp(0.0, 1.0);
        let (a, b) = sphere(t);
        let lo = tau - b * cy.gnorm;
        let hi = a * cx.gnorm;
        if lo > hi {
            return None;
        }
        let s = lo + lam.clamp(0.0, 1.0) * (hi - lo);
        let p = cx.sup(a, s)?;
        let q = cy.sup(b, tau - s)?;
        Some(norm.eval_f64(p, q))
    };
    const T: usize = 256;
    const L: usize = 64;
    let mut ts: Vec<f64> = (0..=T).map(|i| i as f64 / T as f64).collect();
    if let Some(poly) = norm.polygon() {
        ts.extend(poly.knots().iter().map(|(t, _)| q_to_f64(t)));
    }
    let mut scored: Vec<(f64, f64, f64)> = Vec::new();
    for &t in &ts {
        for j in 0..=L {
            let lam = j as f64 / L as f64;
            if let Some(v) = value(t, lam) {
                scored.push((v, t, lam));
            }
        }
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    scored.truncate(12);
    for (best, t, lam) in scored.iter_mut() {
        let (mut ht, mut hl) = (1.0 / T as f64, 1.0 / L as f64);
        while ht > 1e-14 || hl > 1e-14 {
            let mut moved = false;
            for (dt, dl) in [(ht, 0.0), (-ht, 0.0), (0.0, hl), (0.0, -hl), (ht, hl), (-ht, -hl), (ht, -hl), (-ht, hl)] {
                let (nt, nl) = ((*t + dt).clamp(0.0, 1.0), (*lam + dl).clamp(0.0, 1.0));
                if let Some(v) = value(nt, nl) {
                    if v > *best {
                        *best = v;
                        *t = nt;
                        *lam = nl;
                        moved = true;
                    }
                }
            }
            if !moved {
                ht *= 0.5;
                hl *= 0.5;
            }
        }
    }
    scored.iter().map(|s| s.0).reduce(f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::q;

    fn slice(space: &DeskSpace, f: Vec<Q>, alpha: Q) -> SliceSpec {
        SliceSpec::new(space, Functional::coords(f), alpha).unwrap()
    }

    #[test]
    fn euclidean_example() {
        let s = DeskSpace::lp(2, 2.0);
        let x = Vector::coords(vec![q(1, 1), q(0, 1)]);
        let r = brute_slice_sup(&s, &x, &slice(&s, vec![q(1, 1), q(0, 1)], q(1, 50))).unwrap();
        assert!((r.value.to_f64() - 0.2).abs() < 1e-12);
        let whole = brute_slice_sup(&s, &x, &slice(&s, vec![q(1, 1), q(0, 1)], q(2, 1))).unwrap();
        assert!((whole.value.to_f64() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sup_norm_example_is_exact() {
        let s = DeskSpace::lp(2, f64::INFINITY);
        let x = Vector::coords(vec![q(1, 1), q(1, 1)]);
        let r = brute_slice_sup(&s, &x, &slice(&s, vec![q(1, 2), q(1, 2)], q(2, 5))).unwrap();
        assert_eq!(r.value, Real::Exact(q(4, 5)));
        assert_eq!(r.method, SupMethod::Enumeration);
    }

    #[test]
    fn empty_slice_reported() {
        let s = DeskSpace::lp(2, 1.0);
        let x = Vector::coords(vec![q(1, 1), q(0, 1)]);
        let f = Functional::coords(vec![q(1, 1), q(0, 1)]);
        assert!(matches!(sup_over_halfspace(&s, &x, &f, &Real::one()), Err(Error::EmptySlice)));
    }

    #[test]
    fn routes_agree_on_l1_sum() {
        let inner = DeskSpace::lp(2, 2.0);
        let z = DeskSpace::sum(AbsoluteNorm::l1(), inner.clone(), inner);
        let x = Vector::pair(Vector::coords(vec![q(1, 2), q(0, 1)]), Vector::coords(vec![q(1, 2), q(0, 1)]));
        let f = Functional::pair(Functional::coords(vec![q(1, 1), q(0, 1)]), Functional::coords(vec![q(1, 1), q(0, 1)]));
        let sl = SliceSpec::new(&z, f, q(1, 4)).unwrap();
        let g = brute_slice_sup(&z, &x, &sl).unwrap();
        assert_eq!(g.method, SupMethod::SphereGrid);
        let cfg = SearchConfig { samples: 20000, ..Default::default() };
        let s = grid_ascent_sup(&z, &x, &sl, &cfg).unwrap();
        assert!(s.value.to_f64() <= g.value.to_f64() + 1e-9);
        assert!(g.value.to_f64() - s.value.to_f64() < 1e-3, "{} vs {}", g.value, s.value);
    }

    #[test]
    fn linf_decomposition_matches_enumeration() {
        let inner = DeskSpace::lp(2, 1.0);
        let z = DeskSpace::sum(AbsoluteNorm::linf(), inner.clone(), inner);
        let x = Vector::pair(Vector::coords(vec![q(1, 1), q(0, 1)]), Vector::coords(vec![q(0, 1), q(1, 2)]));
        let f = Functional::pair(Functional::coords(vec![q(1, 2), q(0, 1)]), Functional::coords(vec![q(1, 4), q(1, 2)]));
        let sl = SliceSpec::normalized(&z, &f, q(1, 3)).unwrap();
        let r = brute_slice_sup(&z, &x, &sl).unwrap();
        assert_eq!(r.method, SupMethod::Enumeration);
        let mut gq = Vec::new();
        flat_q_fn(&sl.functional, &mut gq);
        let DeskSpace::Sum(s) = &z else { unreachable!() };
        let (xa, xb) = x.as_pair().unwrap();
        let (ga, gb) = sl.functional.as_pair().unwrap();
        let na = s.x.dual_norm(ga).unwrap();
        let nb = s.y.dual_norm(gb).unwrap();
        let t = Real::Exact(sl.threshold());
        let mut best = Real::Exact(Q::zero());
        for sub in [exact_sup(&s.x, xa, ga, &t.sub(&nb)).unwrap().unwrap(), exact_sup(&s.y, xb, gb, &t.sub(&na)).unwrap().unwrap()] {
            if let Sub::Value(v, _) = sub {
                best = best.max(&v);
            }
        }
        assert_eq!(best, r.value);
    }

    #[test]
    fn subsets_enumerated() {
        let mut n = 0;
        for_each_subset(5, 2, |_| n += 1);
        assert_eq!(n, 10);
    }
}
