//! End-to-end pipelines. Each one reads an optional JSON config, fills in the
//! defaults it uses (so the report's `inputs` replay the run), builds the
//! construction, and records a verdict for every witness and certificate.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use super::falsify::{falsify, FalsifierBudget, Verdict};
use super::sample::{random_slice, random_slice_containing};
use super::{CertificateFile, Report};
use crate::error::{Error, Result};
use crate::norm2::{classify, AbsoluteNorm, NormSpec};
use crate::real::{format_q, serde_q, Q};
use crate::spaces::{
    has_brute_oracle, non_delta_certificate_with_alpha, CertKind, DeskSpace, NonDeltaCertificate, PlFn, StepFn,
    Vector,
};
use crate::sums::{
    aoh_daugavet_point, aoh_daugavet_point_with_pair, combine_non_daugavet_certificates,
    combine_non_deltak_certificates, component_witness_from_sum, conjugate_pair_exists, deltak_witness_l1,
    infty_delta_witness, lift_non_delta_certificate, linf_daugavet_point, sum_daugavet_witness, AohSumPoint,
    Component, DeltaIndexSet, DeltaKPoint, InftyDeltaPoint, Which,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    Thm22,
    Prop23,
    Prop24,
    Thm31,
    Thm32,
    Thm41,
    Ex43,
    Prop44a,
    Prop44b,
    Prop45,
}

impl Pipeline {
    pub const ALL: [Pipeline; 10] = [
        Pipeline::Thm22,
        Pipeline::Prop23,
        Pipeline::Prop24,
        Pipeline::Thm31,
        Pipeline::Thm32,
        Pipeline::Thm41,
        Pipeline::Ex43,
        Pipeline::Prop44a,
        Pipeline::Prop44b,
        Pipeline::Prop45,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Thm22 => "thm22",
            Pipeline::Prop23 => "prop23",
            Pipeline::Prop24 => "prop24",
            Pipeline::Thm31 => "thm31",
            Pipeline::Thm32 => "thm32",
            Pipeline::Thm41 => "thm41",
            Pipeline::Ex43 => "ex43",
            Pipeline::Prop44a => "prop44a",
            Pipeline::Prop44b => "prop44b",
            Pipeline::Prop45 => "prop45",
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pipeline {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Pipeline::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown pipeline {s}")))
    }
}

/// Config reader that records every value it hands out, defaults included.
struct Cfg<'a> {
    raw: &'a Map<String, Value>,
    used: Map<String, Value>,
}

impl<'a> Cfg<'a> {
    fn value(&mut self, key: &str, default: Value) -> Value {
        let v = self.raw.get(key).cloned().unwrap_or(default);
        self.used.insert(key.into(), v.clone());
        v
    }

    fn q(&mut self, key: &str, default: &str) -> Result<Q> {
        let v = self.value(key, json!(default));
        serde_q::from_value(&v).map_err(|e| Error::Config(format!("{key}: {e}")))
    }

    fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        self.value(key, json!(default))
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| Error::Config(format!("{key} must be a nonnegative integer")))
    }

    fn u64(&mut self, key: &str, default: u64) -> Result<u64> {
        self.value(key, json!(default))
            .as_u64()
            .ok_or_else(|| Error::Config(format!("{key} must be a nonnegative integer")))
    }

    fn norm(&mut self, key: &str, default: Value) -> Result<AbsoluteNorm> {
        let v = self.value(key, default);
        let spec: NormSpec = serde_json::from_value(v).map_err(|e| Error::Config(format!("{key}: {e}")))?;
        AbsoluteNorm::from_spec(spec)
    }

    fn space(&mut self, key: &str, default: Value) -> Result<DeskSpace> {
        let v = self.value(key, default);
        DeskSpace::from_json(&v).map_err(|e| Error::Config(format!("{key}: {e}")))
    }

    /// A vector for `space`, or the model's default unit vector.
    fn vector(&mut self, key: &str, space: &DeskSpace) -> Result<Vector> {
        let v = match self.raw.get(key) {
            Some(v) => serde_json::from_value(v.clone()).map_err(|e| Error::Config(format!("{key}: {e}")))?,
            None => default_unit(space)?,
        };
        self.used.insert(key.into(), serde_json::to_value(&v)?);
        Ok(v)
    }

    fn budget(&mut self) -> Result<FalsifierBudget> {
        Ok(FalsifierBudget {
            samples: self.usize("samples", 20_000)?,
            ascent_steps: self.usize("ascent_steps", 200)?,
            seed: self.u64("falsify_seed", 0)?,
        })
    }
}

fn default_unit(space: &DeskSpace) -> Result<Vector> {
    Ok(match space {
        DeskSpace::C01Pl { .. } => Vector::Pl(PlFn::constant(Q::from_integer(1.into()))),
        DeskSpace::L1Step { .. } => Vector::Step(StepFn::constant(Q::from_integer(1.into()))),
        DeskSpace::Finite { dim, .. } => {
            let mut c = vec![Q::from_integer(0.into()); *dim];
            c[0] = Q::from_integer(1.into());
            Vector::coords(c)
        }
        DeskSpace::Sum(_) => return Err(Error::Config("give an explicit vector for sum spaces".into())),
    })
}

fn c01() -> Value {
    json!({"model": "c01pl"})
}

fn l2sq() -> Value {
    json!({"model": "finite", "dim": 2, "p": 2.0})
}

fn l1() -> Value {
    json!({"kind": "lp", "p": 1.0})
}

/// Runs `pipeline`; errors end up in the report rather than being returned.
pub fn run_demo(pipeline: Pipeline, config: &Value) -> Report {
    let empty = Map::new();
    let raw = config.as_object().unwrap_or(&empty);
    let mut cfg = Cfg { raw, used: Map::new() };
    let mut r = Report::new(pipeline.name(), Value::Null);
    let res = match pipeline {
        Pipeline::Thm22 => thm22(&mut cfg, &mut r),
        Pipeline::Prop23 => prop23(&mut cfg, &mut r),
        Pipeline::Prop24 => prop24(&mut cfg, &mut r),
        Pipeline::Thm31 => thm31(&mut cfg, &mut r),
        Pipeline::Thm32 => thm32(&mut cfg, &mut r),
        Pipeline::Thm41 => thm41(&mut cfg, &mut r),
        Pipeline::Ex43 => ex43(&mut cfg, &mut r),
        Pipeline::Prop44a => prop44a(&mut cfg, &mut r),
        Pipeline::Prop44b => prop44b(&mut cfg, &mut r),
        Pipeline::Prop45 => prop45(&mut cfg, &mut r),
    };
    if let Err(e) = res {
        r.fail(&e);
    }
    r.inputs = Value::Object(cfg.used);
    r
}

fn rng(cfg: &mut Cfg) -> Result<ChaCha8Rng> {
    Ok(ChaCha8Rng::seed_from_u64(cfg.u64("seed", 0)?))
}

fn witness_verdict(r: &mut Report, name: String, res: Result<crate::spaces::DiametralWitness>, space: &DeskSpace) {
    match res {
        Ok(w) => {
            let ok = w.is_valid(space);
            r.verdict(name, if ok { "valid" } else { "invalid" }, Some(format!("distance {}", w.distance)));
        }
        Err(e) => r.verdict(name, "invalid", Some(format!("{}: {e}", e.code()))),
    }
}

fn sum_slices(cfg: &mut Cfg, r: &mut Report, p: &AohSumPoint) -> Result<()> {
    let n = cfg.usize("slices", 20)?;
    let eps = cfg.q("eps", "1/10")?;
    let mut rng = rng(cfg)?;
    let mut sample = Vec::new();
    r.time("witnesses", |r| -> Result<()> {
        for i in 0..n {
            let slice = random_slice(&p.space, &mut rng)?;
            let w = sum_daugavet_witness(p, &slice, &eps);
            if i < 3 {
                if let Ok(w) = &w {
                    sample.push(serde_json::to_value(w)?);
                }
            }
            witness_verdict(r, format!("slice {i}"), w, &p.space);
        }
        Ok(())
    })?;
    r.output("point", &p.point)?;
    r.output("space", &p.space)?;
    r.output("pair", json!([format_q(&p.a), format_q(&p.b)]))?;
    r.output("sample_witnesses", sample)
}

fn thm22(cfg: &mut Cfg, r: &mut Report) -> Result<()> {
    let norm = cfg.norm("norm", l1())?;
    let xs = cfg.space("X", c01())?;
    let ys = cfg.space("Y", c01())?;
    let x = cfg.vector("x", &xs)?;
    let y = cfg.vector("y", &ys)?;
    r.trace("classification", classify(&norm))?;
    let p = aoh_daugavet_point(&norm, Component::new(xs, x)?, Component::new(ys, y)?)?;
    sum_slices(cfg, r, &p)
}

fn prop23(cfg: &mut Cfg, r: &mut Report) -> Result<()> {
    let norm = cfg.norm("norm", l1())?;
    let xs = cfg.space("X", c01())?;
    let ys = cfg.space("Y", l2sq())?;
    let x = cfg.vector("x", &xs)?;
    let y = cfg.vector("y", &ys)?;
    let a = cfg.q("a", "1")?;
    let b = cfg.q("b", "0")?;
    let p = aoh_daugavet_point_with_pair(&norm, Component::new(xs, x)?, Component::new(ys, y)?, a, b)?;
    sum_slices(cfg, r, &p)
}

fn prop24_point(cfg: &mut Cfg) -> Result<AohSumPoint> {
    let xs = cfg.space("X", c01())?;
    let ys = cfg.space("Y", l2sq())?;
    let x = cfg.vector("x", &xs)?;
    let y = cfg.vector("y", &ys)?;
    let b = cfg.q("b", "3/10")?;
    linf_daugavet_point(Component::new(xs, x)?, b, Component::new(ys, y)?)
}

fn prop24(cfg: &mut Cfg, r: &mut Report) -> Result<()> {
    let p = prop24_point(cfg)?;
    sum_slices(cfg, r, &p)
}

fn component_slices(cfg: &mut Cfg, r: &mut Report, p: &AohSumPoint, which: Which) -> Result<()> {
    let n = cfg.usize("slices", 20)?;
    let eps = cfg.q("eps", "3/10")?;
    let mut rng = rng(cfg)?;
    let comp = match which {
        Which::X => &p.x.space,
        Which::Y => &p.y.space,
    };
    r.time("component_witnesses", |r| -> Result<()> {
        for i in 0..n {
            let slice = random_slice(comp, &mut rng)?;
            let w = component_witness_from_sum(p, which, &slice, &eps);
            witness_verdict(r, format!("component slice {i}"), w, comp);
        }
        Ok(())
    })?;
    r.output("point", &p.point)?;
    r.output("which", which)
}

fn thm31(cfg: &mut Cfg, r: &mut Report) -> Result<()> {
    let norm = cfg.norm("norm", l1())?;
    let xs = cfg.space("X", c01())?;
    let ys = cfg.space("Y", c01())?;
    let x = cfg.vector("x", &xs)?;
    let y = cfg.vector("y", &ys)?;
    let which: Which = serde_json::from_value(cfg.value("which", json!("x")))?;
    let p = aoh_daugavet_point(&norm, Component::new(xs, x)?, Component::new(ys, y)?)?;
    component_slices(cfg, r, &p, which)
}

fn check_certificate(r: &mut Report, name: &str, file: &CertificateFile, budget: &FalsifierBudget) -> Result<()> {
    let out = r.time(&format!("falsify {name}"), |_| falsify(&file.space, &file.point, &file.certificate, budget))?;
    let v = match out.verdict {
        Verdict::Unfalsified => "unfalsified",
        Verdict::Violated => "violated",
    };
    r.verdict(format!("{name} falsifier"), v, out.best_distance.map(|d| format!("best distance {d:.9}, bound {:.9}", out.bound)));
    if has_brute_oracle(&file.space) {
        let chk = file.certificate.brute_check(&file.space, &file.point)?;
        let detail = chk.sup.as_ref().map(|s| format!("sup {} ({:?})", s.value, s.method));
        r.verdict(format!("{name} brute"), if chk.holds { "holds" } else { "fails" }, detail);
    }
    r.output(name, file)
}

fn l2_certificate(cfg: &mut Cfg, prefix: &str, k: &Q, alpha_default: &str, eps_default: &str) -> Result<(DeskSpace, Vector, NonDeltaCertificate)> {
    let xs = cfg.space(&format!("{prefix}space"), l2sq())?;
    let x = cfg.vector(&format!("{prefix}x"), &xs)?;
    let alpha = cfg.q(&format!("{prefix}alpha"), alpha_default)?;
    let eps = cfg.q(&format!("{prefix}cert_eps"), eps_default)?;
    let c = non_delta_certificate_with_alpha(&xs, &x, k, &alpha)?.shrink(alpha, eps)?;
    Ok((xs, x, c))
}

fn thm32(cfg: &mut Cfg, r: &mut Report) -> Result<()> {
    let p = prop24_point(cfg)?;
    component_slices(cfg, r, &p, Which::X)?;
    let one = Q::from_integer(1.into());
    let (xs, x, mut cx) = l2_certificate(cfg, "", &one, "1/4", "1/2")?;
    cx.kind = CertKind::NonDaugavet;
    let c = combine_non_daugavet_certificates(&cx, &cx)?;
    let space = DeskSpace::sum(AbsoluteNorm::linf(), xs.clone(), xs);
    let file = CertificateFile {
        point: Vector::pair(x.clone(), x),
        space,
        certificate: c,
    };
    let budget = cfg.budget()?;
    check_certificate(r, "combined_certificate", &file, &budget)
}

fn lift(cfg: &mut Cfg, r: &mut Report, norm: &AbsoluteNorm, a: &Q, b: &Q, name: &str) -> Result<()> {
    let one = Q::from_integer(1.into());
    let (xs, x, cx) = l2_certificate(cfg, "", &one, "1/4", "1/2")?;
    let ys = cfg.space("Y", c01())?;
    let y = cfg.vector("y", &ys)?;
    let lifted = lift_non_delta_certificate(norm, a, b, &xs, &x, &ys, &y, &cx)?;
    r.trace(&format!("{name} trace"), &lifted.certificate.trace)?;
    let file = CertificateFile {
        space: lifted.space,
        point: lifted.point,
        certificate: lifted.certificate,
    };
    let budget = cfg.budget()?;
    check_certificate(r, name, &file, &budget)
}

fn thm41(cfg: &mut Cfg, r: &mut Report) -> Result<()> {
    let norm = cfg.norm("norm", l1())?;
    let cls = classify(&norm);
    r.trace("classification", &cls)?;
    if !cls.is_aoh() {
        return Err(Error::NotApplicable(format!(
            "{} has property alpha, so no sum point of this kind is built",
            norm.label()
        )));
    }
    let a = cfg.q("a", "1/2")?;
    let b = cfg.q("b", "1/2")?;
    lift(cfg, r, &norm, &a, &b, "lifted_certificate")
}

fn deltak_point(k: Q, xs: &DeskSpace, x: &Vector, ys: &DeskSpace, y: &Vector) -> Result<DeltaKPoint> {
    DeltaKPoint::new(k, Component::plain(xs.clone(), x.clone())?, Component::new(ys.clone(), y.clone())?)
}

fn ex43(cfg: &mut Cfg, r: &mut Report) -> Result<()> {
    let ks: Vec<Q> = match cfg.value("k", json!(["2", "4"])) {
        Value::Array(v) => v.iter().map(serde_q::from_value).collect::<Result<_>>()?,
        other => vec![serde_q::from_value(&other)?],
    };
    let xs = cfg.space("X", l2sq())?;
    let ys = cfg.space("Y", c01())?;
    let x = cfg.vector("x", &xs)?;
    let y = cfg.vector("y", &ys)?;
    let n = cfg.usize("slices", 20)?;
    let eps = cfg.q("eps", "1/5")?;
    let mut rng = rng(cfg)?;
    let one = Q::from_integer(1.into());
    for k in ks {
        let p = deltak_point(k.clone(), &xs, &x, &ys, &y)?;
        let tag = format!("k={}", format_q(&k));
        r.time(&format!("witnesses {tag}"), |r| -> Result<()> {
            for i in 0..n {
                let slice = random_slice_containing(&p.space, &p.point, &mut rng)?;
                witness_verdict(r, format!("{tag} slice {i}"), deltak_witness_l1(&p, &slice, &eps), &p.space);
            }
            Ok(())
        })?;
        r.output(&format!("point {tag}"), &p.point)?;
        let a = &one - k.recip();
        let b = k.recip();
        lift(cfg, r, &AbsoluteNorm::l1(), &a, &b, &format!("non_delta_certificate {tag}"))?;
    }
    Ok(())
}

fn prop44a(cfg: &mut Cfg, r: &mut Report) -> Result<()> {
    let p = cfg.q("p", "2")?;
    let qq = cfg.q("q", "2")?;
    let xs = cfg.space("X", l2sq())?;
    let ys = cfg.space("Y", c01())?;
    let x = cfg.vector("x", &xs)?;
    let y = cfg.vector("y", &ys)?;
    let left = deltak_point(p.clone(), &xs, &x, &ys, &y)?;
    let right = deltak_point(qq.clone(), &xs, &x, &ys, &y)?;
    let pt = InftyDeltaPoint::new(p, left.into_oracle(), qq, right.into_oracle())?;
    let n = cfg.usize("slices", 20)?;
    let eps = cfg.q("eps", "1/5")?;
    let mut rng = rng(cfg)?;
    r.time("witnesses", |r| -> Result<()> {
        for i in 0..n {
            let slice = random_slice_containing(&pt.space, &pt.point, &mut rng)?;
            witness_verdict(r, format!("slice {i}"), infty_delta_witness(&pt, &slice, &eps), &pt.space);
        }
        Ok(())
    })?;
    r.output("point", &pt.point)?;
    r.output("space", &pt.space)
}

fn prop44b(cfg: &mut Cfg, r: &mut Report) -> Result<()> {
    let p = cfg.q("p", "2")?;
    let qq = cfg.q("q", "2")?;
    let (xs, x, cx) = l2_certificate(cfg, "x_", &p, "1/10", "1/2")?;
    let (ys, y, cy) = l2_certificate(cfg, "y_", &qq, "1/5", "1/2")?;
    let c = combine_non_deltak_certificates(&p, &cx, &qq, &cy)?;
    r.output("lambda", &c.trace["lambda"])?;
    r.output("alpha", format_q(&c.alpha))?;
    let file = CertificateFile {
        space: DeskSpace::sum(AbsoluteNorm::linf(), xs, ys),
        point: Vector::pair(x, y),
        certificate: c,
    };
    let budget = cfg.budget()?;
    check_certificate(r, "combined_certificate", &file, &budget)
}

fn index(v: &Value) -> Result<DeltaIndexSet> {
    match v {
        Value::String(s) if s == "inf" => Ok(DeltaIndexSet::never()),
        other => DeltaIndexSet::from(serde_q::from_value(other)?),
    }
}

fn prop45(cfg: &mut Cfg, r: &mut Report) -> Result<()> {
    let a = index(&cfg.value("a", json!("2")))?;
    let b = index(&cfg.value("b", json!("2")))?;
    let pair = conjugate_pair_exists(&a, &b);
    let expected = a.reciprocal() + b.reciprocal() >= Q::from_integer(1.into());
    let ok = match &pair {
        Some((p, qq)) => expected && a.contains(p) && b.contains(qq) && p.recip() + qq.recip() == Q::from_integer(1.into()),
        None => !expected,
    };
    r.verdict("conjugate pair", if ok { "consistent" } else { "invalid" }, None);
    r.output("pair", pair.map(|(p, qq)| json!([format_q(&p), format_q(&qq)])))?;
    r.output("reciprocal_sum", format_q(&(a.reciprocal() + b.reciprocal())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> Value {
        json!({"slices": 4, "samples": 2000})
    }

    #[test]
    fn every_pipeline_passes_with_defaults() {
        for p in Pipeline::ALL {
            let r = run_demo(p, &quick());
            assert!(r.all_passed(), "{p}: {:?} {:?}", r.error, r.verdicts.iter().filter(|v| v.verdict != "valid").collect::<Vec<_>>());
            assert_eq!(r.exit_code(), 0);
        }
    }

    #[test]
    fn thm41_refuses_l2() {
        let r = run_demo(Pipeline::Thm41, &json!({"norm": {"kind": "lp", "p": 2.0}}));
        assert_eq!(r.error.as_ref().unwrap().code, "NotApplicable");
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn prop45_pair() {
        let r = run_demo(Pipeline::Prop45, &json!({"a": "2", "b": "2"}));
        assert_eq!(r.outputs["pair"], json!(["2", "2"]));
        let r = run_demo(Pipeline::Prop45, &json!({"a": "3", "b": "inf"}));
        assert!(r.outputs["pair"].is_null() && r.all_passed());
    }

    #[test]
    fn replay_is_stable() {
        let a = run_demo(Pipeline::Thm22, &quick());
        let b = run_demo(Pipeline::Thm22, &a.inputs);
        assert_eq!(serde_json::to_value(&a.verdicts).unwrap(), serde_json::to_value(&b.verdicts).unwrap());
        assert_eq!(a.outputs, b.outputs);
    }
}
