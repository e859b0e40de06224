//! Floating-point restriction of a model to a finite mesh, and a sampled
//! maximizer of `||x - u||` over a slice of its unit ball.
//!
//! For `C01Pl` the mesh is a finite set of knots (a function is given by its
//! values there); for `L1Step` it is a finite partition. The mesh always
//! contains the knots of the vectors and the support of the functionals it was
//! built from, so those embed exactly up to float rounding. Suprema over a
//! mesh are lower bounds for the suprema over the full model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{lp_f64, DeskSpace, Functional, Lp, PlFn, StepFn, Vector};
use crate::error::{Error, Result};
use crate::norm2::AbsoluteNorm;
use crate::real::{dyadic, q_from_f64, q_to_f64, Q};

#[derive(Clone, Debug)]
enum Layout {
    Coords { dim: usize, p: f64 },
    Mesh(Vec<Q>),
    Steps(Vec<Q>),
    Pair {
        norm: AbsoluteNorm,
        split: usize,
        left: Box<Layout>,
        right: Box<Layout>,
    },
}

#[derive(Clone, Debug)]
pub struct FlatModel {
    layout: Layout,
    weights: Vec<f64>,
    dim: usize,
}

fn layout_dim(l: &Layout) -> usize {
    match l {
        Layout::Coords { dim, .. } => *dim,
        Layout::Mesh(m) => m.len(),
        Layout::Steps(b) => b.len() - 1,
        Layout::Pair { left, right, .. } => layout_dim(left) + layout_dim(right),
    }
}

fn collect_layout(space: &DeskSpace, vectors: &[&Vector], functionals: &[&Functional], res: u32) -> Result<Layout> {
    let uniform = |res: u32| -> Vec<Q> {
        let h = dyadic(res);
        (0..=(1u64 << res)).map(|j| Q::from_integer(j.into()) * &h).collect()
    };
    Ok(match space {
        DeskSpace::C01Pl { .. } => {
            let mut pts = uniform(res);
            for v in vectors {
                let Vector::Pl(f) = v else { return Err(Error::Shape("expected a C01 vector".into())) };
                pts.extend(f.knots().iter().map(|(s, _)| s.clone()));
            }
            for f in functionals {
                let Functional::Masses(m) = f else { return Err(Error::Shape("expected point masses".into())) };
                pts.extend(m.items().iter().map(|(s, _)| s.clone()));
            }
            pts.sort();
            pts.dedup();
            Layout::Mesh(pts)
        }
        DeskSpace::L1Step { .. } => {
            let mut br = uniform(res);
            for v in vectors {
                let Vector::Step(f) = v else { return Err(Error::Shape("expected a step vector".into())) };
                br.extend(f.breaks().iter().cloned());
            }
            for f in functionals {
                let Functional::Step(g) = f else { return Err(Error::Shape("expected a step functional".into())) };
                br.extend(g.breaks().iter().cloned());
            }
            br.sort();
            br.dedup();
            Layout::Steps(br)
        }
        DeskSpace::Finite { dim, p } => Layout::Coords {
            dim: *dim,
            p: Lp::of(p).exponent(),
        },
        DeskSpace::Sum(s) => {
            let mut lv = Vec::new();
            let mut rv = Vec::new();
            for v in vectors {
                let (a, b) = v.as_pair()?;
                lv.push(a);
                rv.push(b);
            }
            let mut lf = Vec::new();
            let mut rf = Vec::new();
            for f in functionals {
                let (a, b) = f.as_pair()?;
                lf.push(a);
                rf.push(b);
            }
            let left = collect_layout(&s.x, &lv, &lf, res)?;
            let right = collect_layout(&s.y, &rv, &rf, res)?;
            Layout::Pair {
                norm: s.norm.clone(),
                split: layout_dim(&left),
                left: Box::new(left),
                right: Box::new(right),
            }
        }
    })
}

fn collect_weights(l: &Layout, out: &mut Vec<f64>) {
    match l {
        Layout::Steps(b) => out.extend(b.windows(2).map(|w| q_to_f64(&(&w[1] - &w[0])))),
        Layout::Coords { dim, .. } => out.extend(std::iter::repeat_n(1.0, *dim)),
        Layout::Mesh(m) => out.extend(std::iter::repeat_n(1.0, m.len())),
        Layout::Pair { left, right, .. } => {
            collect_weights(left, out);
            collect_weights(right, out);
        }
    }
}

impl FlatModel {
    /// Mesh containing the data of `vectors` and `functionals` plus the uniform
    /// dyadic grid of level `resolution`.
    pub fn build(space: &DeskSpace, vectors: &[&Vector], functionals: &[&Functional], resolution: u32) -> Result<Self> {
        for v in vectors {
            space.check_vector(v)?;
        }
        for f in functionals {
            space.check_functional(f)?;
        }
        let layout = collect_layout(space, vectors, functionals, resolution)?;
        let mut weights = Vec::new();
        collect_weights(&layout, &mut weights);
        let dim = layout_dim(&layout);
        Ok(FlatModel { layout, weights, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self, u: &[f64]) -> f64 {
        self.norm_in(&self.layout, u, 0)
    }

    fn norm_in(&self, l: &Layout, u: &[f64], offset: usize) -> f64 {
        match l {
            Layout::Coords { p, .. } => lp_f64(u, *p),
            Layout::Mesh(_) => u.iter().fold(0.0f64, |m, x| m.max(x.abs())),
            Layout::Steps(_) => u
                .iter()
                .zip(&self.weights[offset..offset + u.len()])
                .map(|(x, w)| x.abs() * w)
                .sum(),
            Layout::Pair { norm, split, left, right } => {
                let a = self.norm_in(left, &u[..*split], offset);
                let b = self.norm_in(right, &u[*split..], offset + split);
                norm.eval_f64(a, b)
            }
        }
    }

    pub fn embed_vector(&self, v: &Vector) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.dim);
        embed_v(&self.layout, v, &mut out)?;
        Ok(out)
    }

    /// `g` with `f(u) = g . embed(u)` for every mesh vector `u`.
    pub fn embed_functional(&self, f: &Functional) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.dim);
        embed_f(&self.layout, f, &mut out)?;
        Ok(out)
    }

    /// Exact vector with the binary values of `u`.
    pub fn to_vector(&self, u: &[f64]) -> Result<Vector> {
        to_v(&self.layout, u)
    }
}

fn embed_v(l: &Layout, v: &Vector, out: &mut Vec<f64>) -> Result<()> {
    match (l, v) {
        (Layout::Coords { .. }, Vector::Coords { coords }) => out.extend(coords.iter().map(q_to_f64)),
        (Layout::Mesh(m), Vector::Pl(f)) => out.extend(m.iter().map(|s| q_to_f64(&f.eval(s)))),
        (Layout::Steps(b), Vector::Step(f)) => out.extend(b[..b.len() - 1].iter().map(|s| q_to_f64(&f.value_at(s)))),
        (Layout::Pair { left, right, .. }, Vector::Pair { pair }) => {
            embed_v(left, &pair.0, out)?;
            embed_v(right, &pair.1, out)?;
        }
        _ => return Err(Error::Shape("vector does not fit the mesh".into())),
    }
    Ok(())
}

fn embed_f(l: &Layout, f: &Functional, out: &mut Vec<f64>) -> Result<()> {
    match (l, f) {
        (Layout::Coords { .. }, Functional::Coords { coords }) => out.extend(coords.iter().map(q_to_f64)),
        (Layout::Mesh(m), Functional::Masses(ms)) => {
            let start = out.len();
            out.extend(std::iter::repeat_n(0.0, m.len()));
            for (s, w) in ms.items() {
                let i = m
                    .binary_search(s)
                    .map_err(|_| Error::Shape("point mass off the mesh".into()))?;
                out[start + i] += q_to_f64(w);
            }
        }
        (Layout::Steps(b), Functional::Step(g)) => {
            out.extend(b.windows(2).map(|w| q_to_f64(&(g.value_at(&w[0]) * (&w[1] - &w[0])))))
        }
        (Layout::Pair { left, right, .. }, Functional::Pair { pair }) => {
            embed_f(left, &pair.0, out)?;
            embed_f(right, &pair.1, out)?;
        }
        _ => return Err(Error::Shape("functional does not fit the mesh".into())),
    }
    Ok(())
}

fn to_v(l: &Layout, u: &[f64]) -> Result<Vector> {
    let q = |x: &f64| q_from_f64(*x);
    Ok(match l {
        Layout::Coords { .. } => Vector::coords(u.iter().map(q).collect::<Result<_>>()?),
        Layout::Mesh(m) => Vector::Pl(PlFn::new(
            m.iter().cloned().zip(u.iter().map(q).collect::<Result<Vec<_>>>()?).collect(),
        )?),
        Layout::Steps(b) => Vector::Step(StepFn::new(b.clone(), u.iter().map(q).collect::<Result<_>>()?)?),
        Layout::Pair { split, left, right, .. } => Vector::pair(to_v(left, &u[..*split])?, to_v(right, &u[*split..])?),
    })
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub samples: usize,
    pub ascent_steps: usize,
    pub seed: u64,
    /// Number of best samples that get refined by local ascent.
    pub keep: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            samples: 20_000,
            ascent_steps: 200,
            seed: 0,
            keep: 8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Best feasible point found, if any.
    pub best: Option<Vec<f64>>,
    pub value: f64,
    pub samples_used: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist(model: &FlatModel, x: &[f64], u: &[f64], buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    buf.extend(x.iter().zip(u).map(|(a, b)| a - b));
    model.norm(buf)
}

fn into_ball(model: &FlatModel, u: &mut [f64]) {
    let n = model.norm(u);
    if n > 1.0 {
        u.iter_mut().for_each(|v| *v /= n);
    }
}

/// Maximizes `||x - u||` over `{ u : ||u|| <= 1, g . u > tau }`.
///
/// `anchor` must be a feasible point (typically a norming element of `g`);
/// infeasible samples are pulled towards it along a segment, which stays in
/// the ball. Stops early once `stop_at` is reached.
pub fn search_slice(
    model: &FlatModel,
    x: &[f64],
    g: &[f64],
    tau: f64,
    anchor: &[f64],
    cfg: &SearchConfig,
    stop_at: Option<f64>,
) -> SearchOutcome {
    let n = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut buf = Vec::with_capacity(n);
    let ga = dot(g, anchor);
    let mut top: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut samples_used = 0;
    let feasible = |u: &[f64]| dot(g, u) > tau;

    if feasible(anchor) {
        let v = dist(model, x, anchor, &mut buf);
        top.push((v, anchor.to_vec()));
    }
    let reached = |v: f64| stop_at.is_some_and(|s| v >= s);
    if top.first().is_some_and(|t| reached(t.0)) {
        return finish(top, 1);
    }

    for _ in 0..cfg.samples {
        samples_used += 1;
        let mode: u32 = rng.gen_range(0..3);
        let mut u: Vec<f64> = match mode {
            0 => (0..n).map(|_| rng.sample(StandardNormal)).collect(),
            1 => (0..n)
                .map(|_| if rng.gen_bool(0.5) { rng.gen_range(-1.0..1.0) } else if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
                .collect(),
            _ => {
                let mut v = vec![0.0; n];
                for _ in 0..rng.gen_range(1..=2) {
                    v[rng.gen_range(0..n)] = rng.sample(StandardNormal);
                }
                v
            }
        };
        let nu = model.norm(&u);
        if nu == 0.0 {
            continue;
        }
        let r: f64 = if rng.gen_bool(0.8) { 1.0 } else { rng.gen::<f64>().powf(1.0 / n as f64) };
        u.iter_mut().for_each(|v| *v *= r / nu);
        let gu = dot(g, &u);
        if gu <= tau {
            if ga <= gu {
                continue;
            }
            let t = ((tau - gu) / (ga - gu) * (1.0 + 1e-9) + 1e-12).min(1.0);
            for (v, a) in u.iter_mut().zip(anchor) {
                *v = (1.0 - t) * *v + t * a;
            }
            if !feasible(&u) {
                continue;
            }
        }
        let v = dist(model, x, &u, &mut buf);
        if reached(v) {
            top.push((v, u));
            return finish(top, samples_used);
        }
        if top.len() < cfg.keep || v > top[top.len() - 1].0 {
            top.push((v, u));
            top.sort_by(|a, b| b.0.total_cmp(&a.0));
            top.truncate(cfg.keep.max(1));
        }
    }

    let mut trial = vec![0.0; n];
    for entry in top.iter_mut() {
        let (ref mut best, ref mut u) = *entry;
        let mut h = 0.5;
        for _ in 0..cfg.ascent_steps {
            let mut improved = false;
            let away: Vec<f64> = {
                let d: Vec<f64> = u.iter().zip(x).map(|(a, b)| a - b).collect();
                let l = d.iter().map(|v| v * v).sum::<f64>().sqrt();
                if l > 0.0 { d.iter().map(|v| v / l).collect() } else { vec![0.0; n] }
            };
            let moves = (0..n).flat_map(|i| [(i, 1.0), (i, -1.0)]).map(Some).chain(std::iter::once(None));
            for mv in moves {
                trial.copy_from_slice(u);
                match mv {
                    Some((i, s)) => trial[i] += s * h,
                    None => trial.iter_mut().zip(&away).for_each(|(t, a)| *t += h * a),
                }
                into_ball(model, &mut trial);
                if !feasible(&trial) {
                    continue;
                }
                let v = dist(model, x, &trial, &mut buf);
                if v > *best {
                    *best = v;
                    u.copy_from_slice(&trial);
                    improved = true;
                }
            }
            if reached(*best) {
                break;
            }
            if !improved {
                h *= 0.5;
                if h < 1e-13 {
                    break;
                }
            }
        }
    }
    finish(top, samples_used)
}

fn finish(mut top: Vec<(f64, Vec<f64>)>, samples_used: usize) -> SearchOutcome {
    top.sort_by(|a, b| b.0.total_cmp(&a.0));
    match top.into_iter().next() {
        Some((value, u)) => SearchOutcome {
            best: Some(u),
            value,
            samples_used,
        },
        None => SearchOutcome {
            best: None,
            value: f64::NEG_INFINITY,
            samples_used,
        },
    }
}

/// Planar variant: the maximum sits on the unit circle of the norm, so the
/// search runs over the angle, with exact-to-rounding location of the points
/// where the circle crosses the hyperplane `g . u = tau`.
pub fn search_plane(model: &FlatModel, x: &[f64], g: &[f64], tau: f64, grid: usize) -> SearchOutcome {
    assert_eq!(model.dim(), 2);
    let mut buf = Vec::with_capacity(2);
    let sphere = |th: f64| {
        let d = [th.cos(), th.sin()];
        let n = model.norm(&d);
        [d[0] / n, d[1] / n]
    };
    let feasible = |th: f64| dot(g, &sphere(th)) > tau;
    let step = std::f64::consts::TAU / grid as f64;
    let mut cands: Vec<f64> = Vec::new();
    for j in 0..grid {
        let (a, b) = (j as f64 * step, (j + 1) as f64 * step);
        let (fa, fb) = (feasible(a), feasible(b));
        if fa {
            cands.push(a);
        }
        if fa != fb {
            let (mut inside, mut outside) = if fa { (a, b) } else { (b, a) };
            for _ in 0..80 {
                let mid = 0.5 * (inside + outside);
                if feasible(mid) {
                    inside = mid;
                } else {
                    outside = mid;
                }
            }
            cands.push(inside);
        }
    }
    let value = |th: f64, buf: &mut Vec<f64>| dist(model, x, &sphere(th), buf);
    let mut scored: Vec<(f64, f64)> = cands.iter().map(|&t| (value(t, &mut buf), t)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    scored.truncate(16);
    for (best, th) in scored.iter_mut() {
        let mut h = step;
        while h > 1e-15 {
            let mut moved = false;
            for cand in [*th + h, *th - h] {
                if feasible(cand) {
                    let v = value(cand, &mut buf);
                    if v > *best {
                        *best = v;
                        *th = cand;
                        moved = true;
                    }
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    match scored.first() {
        Some(&(v, th)) => SearchOutcome {
            best: Some(sphere(th).to_vec()),
            value: v,
            samples_used: grid,
        },
        None => SearchOutcome {
            best: None,
            value: f64::NEG_INFINITY,
            samples_used: grid,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::q;

    #[test]
    fn mesh_embedding_is_faithful() {
        let space = DeskSpace::sum(AbsoluteNorm::l1(), DeskSpace::c01(), DeskSpace::l1step());
        let x = Vector::pair(
            Vector::Pl(PlFn::new(vec![(q(0, 1), q(1, 2)), (q(1, 3), q(-1, 2)), (q(1, 1), q(0, 1))]).unwrap()),
            Vector::Step(StepFn::indicator(&q(1, 5), &q(2, 5), q(5, 2)).unwrap()),
        );
        let f = Functional::pair(
            Functional::point_mass(q(1, 7), q(1, 1)).unwrap(),
            Functional::Step(StepFn::constant(q(-1, 1))),
        );
        let m = FlatModel::build(&space, &[&x], &[&f], 3).unwrap();
        let xv = m.embed_vector(&x).unwrap();
        let gv = m.embed_functional(&f).unwrap();
        assert!((m.norm(&xv) - q_to_f64(&space.norm(&x).unwrap().to_q())).abs() < 1e-12);
        assert!((dot(&gv, &xv) - q_to_f64(&space.apply(&f, &x).unwrap())).abs() < 1e-12);
        let back = m.to_vector(&xv).unwrap();
        assert_eq!(space.norm(&back).unwrap(), space.norm(&x).unwrap());
    }

    #[test]
    fn plane_search_finds_l2_value() {
        let space = DeskSpace::lp(2, 2.0);
        let x = Vector::coords(vec![q(1, 1), q(0, 1)]);
        let f = Functional::coords(vec![q(1, 1), q(0, 1)]);
        let m = FlatModel::build(&space, &[&x], &[&f], 0).unwrap();
        let out = search_plane(&m, &[1.0, 0.0], &[1.0, 0.0], 0.98, 4096);
        assert!((out.value - 0.2).abs() < 1e-9);
    }

    #[test]
    fn sampled_search_respects_constraints() {
        let space = DeskSpace::lp(3, f64::INFINITY);
        let x = Vector::coords(vec![q(1, 1), q(1, 1), q(0, 1)]);
        let f = Functional::coords(vec![q(1, 2), q(1, 2), q(0, 1)]);
        let m = FlatModel::build(&space, &[&x], &[&f], 0).unwrap();
        let cfg = SearchConfig { samples: 2000, ..Default::default() };
        let out = search_slice(&m, &[1.0, 1.0, 0.0], &[0.5, 0.5, 0.0], 0.6, &[1.0, 1.0, 0.0], &cfg, None);
        let u = out.best.unwrap();
        assert!(m.norm(&u) <= 1.0 + 1e-12);
        assert!(0.5 * (u[0] + u[1]) > 0.6);
        // u3 = -1 and one coordinate at 0.2 gives 1
        assert!((out.value - 1.0).abs() < 1e-6);
    }
}
