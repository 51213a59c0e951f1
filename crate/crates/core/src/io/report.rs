//! JSON encodings of series, fields, changes and certificates.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::distribution::{InvolutivityWitness, Obstruction, Rank};
use crate::error::{Error, Result};
use crate::fields::{CoordinateChange, VectorField};
use crate::frobenius::{FrobeniusCertificate, Verification};
use crate::io::parse::parse_expression;
use crate::series::{Chart, GradedSeries, Window};

pub fn series_json(s: &GradedSeries) -> Value {
    Value::String(s.to_string())
}

/// `{"degree": [...], "coefficients": {coordinate: expression}}`, zero
/// coefficients omitted.
pub fn field_json(f: &VectorField) -> Value {
    let chart = f.chart();
    let coefficients: Map<String, Value> = f
        .coefficients()
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.is_zero())
        .map(|(u, a)| (chart.name(u).to_string(), series_json(a)))
        .collect();
    json!({ "degree": f.degree(), "coefficients": coefficients })
}

fn images_json(chart: &Chart, images: &[GradedSeries]) -> Value {
    Value::Object(
        images
            .iter()
            .enumerate()
            .map(|(u, s)| (chart.name(u).to_string(), series_json(s)))
            .collect(),
    )
}

/// `{"change": {...}, "inverse": {...}}`: new coordinates in old ones and back.
pub fn change_json(change: &CoordinateChange) -> Value {
    json!({
        "change": images_json(change.chart(), change.images()),
        "inverse": images_json(change.chart(), change.inverse_images()),
    })
}

pub fn rank_json(rank: &Rank) -> Value {
    Value::Object(
        rank.counts
            .iter()
            .map(|(d, k)| (d.to_string(), json!(k)))
            .collect(),
    )
}

pub fn obstruction_json(chart: &Chart, o: &Obstruction) -> Value {
    json!({
        "coordinate": chart.name(o.coordinate),
        "order": o.order,
        "residual": series_json(&o.residual),
    })
}

pub fn witness_json(chart: &Chart, names: &[String], w: &InvolutivityWitness) -> Value {
    json!({
        "left": names[w.left],
        "right": names[w.right],
        "bracket": field_json(&w.bracket),
        "obstruction": obstruction_json(chart, &w.obstruction),
    })
}

pub fn certificate_json(cert: &FrobeniusCertificate, names: &[String]) -> Value {
    let mut out = change_json(&cert.change);
    let residuals: Map<String, Value> = cert
        .residuals
        .iter()
        .map(|(&i, &order)| (names[i].clone(), json!(order)))
        .collect();
    let steps: Vec<Value> = cert
        .steps
        .iter()
        .map(|s| {
            let mut step = change_json(&s.change);
            step["kind"] = json!(s.kind.as_str());
            step["pivot"] = json!(s.pivot);
            step
        })
        .collect();
    out["adapted"] = json!(cert.adapted);
    out["residuals"] = Value::Object(residuals);
    out["steps"] = Value::Array(steps);
    out
}

pub fn verification_json(v: &Verification, names: &[String]) -> Value {
    let residuals: Map<String, Value> = v
        .residuals
        .iter()
        .map(|(&i, &order)| (names[i].clone(), json!(order)))
        .collect();
    json!({
        "verified": v.holds(),
        "tangent": v.tangent,
        "spanning": v.spanning,
        "rank_matches": v.rank_matches,
        "residuals": residuals,
        "failures": v.failures,
    })
}

/// A certificate read back from JSON.
#[derive(Clone, Debug)]
pub struct LoadedCertificate {
    pub certificate: FrobeniusCertificate,
    /// Whether the stored inverse, if any, matches the recomputed one.
    pub inverse_consistent: bool,
}

/// Reads `{"change": ..., "inverse"?: ..., "adapted": [...]}`, also accepted
/// when nested under `"certificate"` as in a frobenius report. The change is
/// rebuilt from its images; the stored inverse is only compared.
pub fn parse_certificate(chart: &Arc<Chart>, value: &Value) -> Result<LoadedCertificate> {
    let value = value.get("certificate").unwrap_or(value);
    let images = read_images(chart, value.get("change"), "change")?
        .ok_or_else(|| Error::Format("certificate has no `change`".into()))?;
    let change = CoordinateChange::new(chart, images)?;
    let inverse_consistent = match read_images(chart, value.get("inverse"), "inverse")? {
        None => true,
        Some(stored) => stored
            .iter()
            .zip(change.inverse_images())
            .all(|(a, b)| a.agrees_within(b, Window::CHECK)),
    };
    let adapted = match value.get("adapted") {
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                let name = v
                    .as_str()
                    .ok_or_else(|| Error::Format("`adapted` must list coordinate names".into()))?;
                chart.index_of(name)?;
                Ok(name.to_string())
            })
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::Format("certificate has no `adapted` list".into())),
    };
    Ok(LoadedCertificate {
        certificate: FrobeniusCertificate {
            change,
            adapted,
            residuals: BTreeMap::new(),
            steps: Vec::new(),
        },
        inverse_consistent,
    })
}

/// Coordinate → expression map; missing coordinates map to themselves.
fn read_images(chart: &Arc<Chart>, value: Option<&Value>, what: &str) -> Result<Option<Vec<GradedSeries>>> {
    let Some(value) = value else { return Ok(None) };
    let map = value
        .as_object()
        .ok_or_else(|| Error::Format(format!("`{what}` must be an object")))?;
    let mut images: Vec<GradedSeries> = (0..chart.len()).map(|u| GradedSeries::variable(chart, u)).collect();
    for (name, expr) in map {
        let expr = expr
            .as_str()
            .ok_or_else(|| Error::Format(format!("`{what}.{name}` must be an expression string")))?;
        images[chart.index_of(name)?] = parse_expression(chart, expr)?;
    }
    Ok(Some(images))
}
