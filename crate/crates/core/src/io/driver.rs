use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::distribution::{is_involutive, rank_of, Distribution, Involutivity};
use crate::error::{Error, Result};
use crate::frobenius::{adapted_coordinates, straighten_deg0, straighten_nonzero, verify_adapted};
use crate::io::problem::{Loaded, ProblemSpec, Task};
use crate::io::report::{
    certificate_json, change_json, field_json, parse_certificate, rank_json, verification_json, witness_json,
};

/// Command-line overrides applied on top of a problem file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub task: Option<Task>,
    pub j_order: Option<u32>,
    pub base_order: Option<u32>,
    /// Certificate file; implies the `verify` task.
    pub certificate: Option<PathBuf>,
}

/// JSON report and process exit code (0 yes, 1 mathematical no or failed
/// precondition, 2 malformed input).
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Value,
    pub exit_code: i32,
}

/// Parses a problem from JSON text and runs it. `base_dir` resolves relative
/// certificate paths.
pub fn run_source(text: &str, overrides: &Overrides, base_dir: Option<&Path>) -> Outcome {
    match serde_json::from_str::<ProblemSpec>(text) {
        Ok(spec) => run(&spec, overrides, base_dir),
        Err(e) => Outcome {
            report: json!({ "error_kind": "FormatError", "message": e.to_string() }),
            exit_code: 2,
        },
    }
}

pub fn run(spec: &ProblemSpec, overrides: &Overrides, base_dir: Option<&Path>) -> Outcome {
    let mut spec = spec.clone();
    if let Some(k) = overrides.j_order {
        spec.truncation.j_order = k;
    }
    if let Some(k) = overrides.base_order {
        spec.truncation.base_order = k;
    }
    if let Some(task) = overrides.task {
        spec.task = task;
    }
    if let Some(path) = &overrides.certificate {
        spec.task = Task::Verify;
        // Relative to the working directory, not the problem file.
        let path = std::path::absolute(path).unwrap_or_else(|_| path.clone());
        spec.args.certificate = Some(Value::String(path.display().to_string()));
    }
    let task = spec.task;
    let loaded = match spec.load() {
        Ok(l) => l,
        Err(e) => return failure(task, &e, None, &[]),
    };
    let names: Vec<String> = match loaded.selected(spec.args.fields.as_deref()) {
        Ok(sel) => sel.into_iter().map(|(n, _)| n).collect(),
        Err(e) => return failure(task, &e, Some(&loaded), &[]),
    };
    let (mut report, exit_code) = match execute(&spec, &loaded, base_dir) {
        Ok(answer) => answer,
        Err(e) => return failure(task, &e, Some(&loaded), &names),
    };
    report["task"] = json!(task.as_str());
    if !loaded.warnings.is_empty() {
        report["warnings"] = json!(loaded.warnings);
    }
    Outcome { report, exit_code }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Format(_) | Error::UnknownCoordinate(_) | Error::Dimension(..) | Error::ChartMismatch => 2,
        _ => 1,
    }
}

fn failure(task: Task, e: &Error, loaded: Option<&Loaded>, names: &[String]) -> Outcome {
    let mut report = json!({
        "task": task.as_str(),
        "error_kind": e.kind(),
        "message": e.to_string(),
    });
    if let Error::Parse(p) = e {
        report["position"] = json!({ "offset": p.offset, "line": p.line, "column": p.column });
    }
    if let Some(loaded) = loaded {
        match e {
            Error::NotInvolutive(w) => report["witness"] = witness_json(&loaded.chart, names, w),
            Error::NotCommuting { left, right, bracket } => {
                report["witness"] = json!({ "left": left, "right": right, "bracket": field_json(bracket) })
            }
            _ => {}
        }
        if !loaded.warnings.is_empty() {
            report["warnings"] = json!(loaded.warnings);
        }
    }
    Outcome {
        report,
        exit_code: exit_code_for(e),
    }
}

fn execute(spec: &ProblemSpec, loaded: &Loaded, base_dir: Option<&Path>) -> Result<(Value, i32)> {
    let selected = loaded.selected(spec.args.fields.as_deref())?;
    let names: Vec<String> = selected.iter().map(|(n, _)| n.clone()).collect();
    let fields: Vec<_> = selected.into_iter().map(|(_, f)| f).collect();
    let chart = &loaded.chart;
    match spec.task {
        Task::Bracket => {
            let [x, y] = fields.as_slice() else {
                return Err(Error::Format("bracket needs exactly two fields".into()));
            };
            Ok((json!({ "bracket": field_json(&x.bracket(y)?) }), 0))
        }
        Task::Rank => {
            let rank = rank_of(&Distribution::new(chart, fields)?)?;
            Ok((json!({ "rank": rank_json(&rank), "total": rank.total() }), 0))
        }
        Task::Involutive => match is_involutive(&Distribution::new(chart, fields)?)? {
            Involutivity::Involutive => Ok((json!({ "involutive": true }), 0)),
            Involutivity::NotInvolutive(w) => Ok((
                json!({
                    "involutive": false,
                    "error_kind": "NotInvolutive",
                    "witness": witness_json(chart, &names, &w),
                }),
                1,
            )),
        },
        Task::Straighten => {
            let [x] = fields.as_slice() else {
                return Err(Error::Format("straighten needs exactly one field".into()));
            };
            let s = if x.degree().is_zero() {
                straighten_deg0(x)?
            } else {
                straighten_nonzero(x)?
            };
            let mut report = change_json(&s.change);
            report["pivot"] = json!(chart.name(s.pivot));
            report["pushforward"] = field_json(&s.change.pushforward(x)?);
            Ok((report, 0))
        }
        Task::Frobenius => {
            let cert = adapted_coordinates(&Distribution::new(chart, fields)?)?;
            Ok((json!({ "certificate": certificate_json(&cert, &names) }), 0))
        }
        Task::Verify => {
            let raw = load_certificate(spec.args.certificate.as_ref(), base_dir)?;
            let loaded_cert = parse_certificate(chart, &raw)?;
            let v = verify_adapted(&Distribution::new(chart, fields)?, &loaded_cert.certificate)?;
            let mut report = verification_json(&v, &names);
            report["inverse_consistent"] = json!(loaded_cert.inverse_consistent);
            let ok = v.holds() && loaded_cert.inverse_consistent;
            report["verified"] = json!(ok);
            if ok {
                Ok((report, 0))
            } else {
                report["error_kind"] = json!("NotVerified");
                Ok((report, 1))
            }
        }
    }
}

fn load_certificate(arg: Option<&Value>, base_dir: Option<&Path>) -> Result<Value> {
    match arg {
        None => Err(Error::Format("verify needs a certificate".into())),
        Some(Value::String(path)) => {
            let mut full = PathBuf::from(path);
            if full.is_relative() {
                if let Some(dir) = base_dir {
                    full = dir.join(full);
                }
            }
            let text = fs::read_to_string(&full)
                .map_err(|e| Error::Format(format!("cannot read certificate {}: {e}", full.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::Format(format!("certificate is not valid JSON: {e}")))
        }
        Some(other) => Ok(other.clone()),
    }
}
