//! Reports, the falsifier, demo pipelines and the operations behind the CLI.

mod demo;
mod falsify;
pub mod sample;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::norm2::{classify, star_constants, AbsoluteNorm, NormSpec};
use crate::real::Q;
use crate::spaces::{daugavet_witness, DeskSpace, NonDeltaCertificate, SliceSpec, Vector};
use crate::sums::{aoh_daugavet_point_with_pair, linf_daugavet_point, sum_daugavet_witness, Component};

pub use demo::{run_demo, Pipeline};
pub use falsify::{falsify, FalsifierBudget, FalsifyOutcome, Verdict, Violation};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerdictEntry {
    pub name: String,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub code: String,
    pub message: String,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        ErrorInfo {
            code: e.code().into(),
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub task: String,
    pub inputs: Value,
    pub outputs: Map<String, Value>,
    pub verdicts: Vec<VerdictEntry>,
    pub traces: Map<String, Value>,
    pub timings: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

/// Verdict strings that count as passing.
const PASSING: &[&str] = &["valid", "unfalsified", "holds", "consistent"];

impl Report {
    pub fn new(task: impl Into<String>, inputs: Value) -> Self {
        Report {
            task: task.into(),
            inputs,
            outputs: Map::new(),
            verdicts: Vec::new(),
            traces: Map::new(),
            timings: Map::new(),
            error: None,
        }
    }

    pub fn verdict(&mut self, name: impl Into<String>, verdict: &str, detail: Option<String>) {
        self.verdicts.push(VerdictEntry {
            name: name.into(),
            verdict: verdict.into(),
            detail,
        });
    }

    pub fn output(&mut self, key: &str, v: impl Serialize) -> Result<()> {
        self.outputs.insert(key.into(), serde_json::to_value(v)?);
        Ok(())
    }

    pub fn trace(&mut self, key: &str, v: impl Serialize) -> Result<()> {
        self.traces.insert(key.into(), serde_json::to_value(v)?);
        Ok(())
    }

    pub fn time<T>(&mut self, key: &str, f: impl FnOnce(&mut Self) -> T) -> T {
        let t = Instant::now();
        let out = f(self);
        self.timings.insert(key.into(), json!(t.elapsed().as_secs_f64()));
        out
    }

    pub fn fail(&mut self, e: &Error) {
        self.error = Some(e.into());
    }

    pub fn all_passed(&self) -> bool {
        self.error.is_none() && self.verdicts.iter().all(|v| PASSING.contains(&v.verdict.as_str()))
    }

    pub fn has_violation(&self) -> bool {
        self.verdicts.iter().any(|v| v.verdict == "violated" || v.verdict == "invalid" || v.verdict == "fails")
    }

    /// 0 when everything passed, 2 when a validation failed, 1 on error.
    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            1
        } else if self.has_violation() {
            2
        } else if self.all_passed() {
            0
        } else {
            1
        }
    }
}

/// A certificate together with the space and point it speaks about, as read
/// by the `falsify` subcommand.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateFile {
    pub space: DeskSpace,
    pub point: Vector,
    pub certificate: NonDeltaCertificate,
}

pub fn classify_report(spec: &NormSpec) -> Report {
    let mut r = Report::new("classify", json!({ "norm": spec }));
    let res = (|| -> Result<()> {
        let norm = AbsoluteNorm::from_spec(spec.clone())?;
        let cls = r.time("classify", |_| classify(&norm));
        r.output("classification", &cls)?;
        r.output("star_constants", star_constants(&norm))?;
        r.output("n11", norm.n11())?;
        Ok(())
    })();
    if let Err(e) = res {
        r.fail(&e);
    }
    r
}

/// Splits `x = (u, v)` in a sum into coefficients and unit components.
fn split_point(space: &DeskSpace, x: &Vector) -> Result<(Component, Q, Component, Q)> {
    let s = space.as_sum()?;
    let (u, v) = x.as_pair()?;
    let side = |sp: &DeskSpace, w: &Vector| -> Result<(Component, Q)> {
        let n = sp.norm(w)?;
        let n = n.as_exact().cloned().ok_or_else(|| Error::Domain("component norm is not exact".into()))?;
        if num_traits::Zero::is_zero(&n) {
            return Err(Error::ZeroComponent);
        }
        Ok((Component::new(sp.clone(), w.scale(&n.recip()))?, n))
    };
    let (cx, a) = side(&s.x, u)?;
    let (cy, b) = side(&s.y, v)?;
    Ok((cx, a, cy, b))
}

/// Daugavet witness for a model point, or for a sum point assembled from
/// model points.
pub fn witness_for(space: &DeskSpace, x: &Vector, slice: &SliceSpec, eps: &Q) -> Result<crate::spaces::DiametralWitness> {
    match space {
        DeskSpace::Sum(s) => {
            let (cx, a, cy, b) = split_point(space, x)?;
            let p = match aoh_daugavet_point_with_pair(&s.norm, cx.clone(), cy.clone(), a.clone(), b.clone()) {
                Ok(p) => p,
                Err(e) if s.norm.is_linf() && a == num_traits::One::one() => {
                    linf_daugavet_point(cx, b, cy).map_err(|_| e)?
                }
                Err(e) => return Err(e),
            };
            sum_daugavet_witness(&p, slice, eps)
        }
        _ => daugavet_witness(space, x, slice, eps),
    }
}

pub fn witness_report(space: &DeskSpace, x: &Vector, slice: &SliceSpec, eps: &Q) -> Report {
    let mut r = Report::new(
        "witness",
        json!({ "space": space, "x": x, "slice": slice, "eps": crate::real::format_q(eps) }),
    );
    let t = Instant::now();
    match witness_for(space, x, slice, eps) {
        Ok(w) => {
            let chk = w.check(space);
            let ok = chk.as_ref().map(|c| c.valid()).unwrap_or(false);
            r.verdict("witness", if ok { "valid" } else { "invalid" }, None);
            let _ = r.output("witness", &w);
            if let Ok(c) = chk {
                let _ = r.trace("check", c);
            }
        }
        Err(e) => r.fail(&e),
    }
    r.timings.insert("witness".into(), json!(t.elapsed().as_secs_f64()));
    r
}

pub fn falsify_report(file: &CertificateFile, budget: &FalsifierBudget) -> Report {
    let mut r = Report::new("falsify", json!({ "certificate": file, "budget": budget }));
    let t = Instant::now();
    match falsify(&file.space, &file.point, &file.certificate, budget) {
        Ok(out) => {
            let v = match out.verdict {
                Verdict::Unfalsified => "unfalsified",
                Verdict::Violated => "violated",
            };
            r.verdict("certificate", v, None);
            let _ = r.output("falsify", &out);
        }
        Err(e) => r.fail(&e),
    }
    r.timings.insert("falsify".into(), json!(t.elapsed().as_secs_f64()));
    r
}
