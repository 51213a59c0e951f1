//! Problem files: a chart, named fields, and a task.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::VectorField;
use crate::grading::DegreeVector;
use crate::io::parse::parse_expression_with_warnings;
use crate::series::{Chart, Coordinate, GradedSeries, Truncation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Bracket,
    Rank,
    Involutive,
    Straighten,
    Frobenius,
    Verify,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Bracket => "bracket",
            Task::Rank => "rank",
            Task::Involutive => "involutive",
            Task::Straighten => "straighten",
            Task::Frobenius => "frobenius",
            Task::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub n: usize,
    #[serde(default)]
    pub truncation: Truncation,
    pub coordinates: Vec<Coordinate>,
    #[serde(default)]
    pub fields: Vec<FieldSpec>,
    pub task: Task,
    #[serde(default)]
    pub args: TaskArgs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<DegreeVector>,
    /// Coordinate name → coefficient expression; omitted coordinates are zero.
    #[serde(default)]
    pub coefficients: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskArgs {
    /// Field names the task acts on; defaults to every field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<String>>,
    /// Certificate for `verify`: a file path or an inline object.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<serde_json::Value>,
}

/// A problem with its chart built and every field parsed.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub chart: Arc<Chart>,
    pub fields: Vec<(String, VectorField)>,
    pub warnings: Vec<String>,
}

impl Loaded {
    pub fn field(&self, name: &str) -> Result<&VectorField> {
        self.fields
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
            .ok_or_else(|| Error::Format(format!("unknown field `{name}`")))
    }

    /// Fields named in `args.fields`, or all of them.
    pub fn selected(&self, names: Option<&[String]>) -> Result<Vec<(String, VectorField)>> {
        match names {
            None => Ok(self.fields.clone()),
            Some(names) => names
                .iter()
                .map(|n| Ok((n.clone(), self.field(n)?.clone())))
                .collect(),
        }
    }
}

impl ProblemSpec {
    pub fn load(&self) -> Result<Loaded> {
        let chart = Chart::new(self.n, self.coordinates.clone(), self.truncation)?;
        let mut warnings = Vec::new();
        let mut fields: Vec<(String, VectorField)> = Vec::with_capacity(self.fields.len());
        for spec in &self.fields {
            if fields.iter().any(|(n, _)| *n == spec.name) {
                return Err(Error::Format(format!("duplicate field `{}`", spec.name)));
            }
            fields.push((spec.name.clone(), spec.build(&chart, &mut warnings)?));
        }
        Ok(Loaded {
            chart,
            fields,
            warnings,
        })
    }
}

impl FieldSpec {
    fn build(&self, chart: &Arc<Chart>, warnings: &mut Vec<String>) -> Result<VectorField> {
        let mut coefficients = vec![GradedSeries::zero(chart); chart.len()];
        for (coord, src) in &self.coefficients {
            let index = chart.index_of(coord)?;
            let parsed = parse_expression_with_warnings(chart, src)?;
            warnings.extend(
                parsed
                    .warnings
                    .into_iter()
                    .map(|w| format!("field `{}`, coefficient of `{coord}`: {w}", self.name)),
            );
            coefficients[index] = parsed.series;
        }
        match self.degree {
            Some(degree) => VectorField::new(chart, degree, coefficients),
            None if coefficients.iter().all(|c| c.is_zero()) => {
                Ok(VectorField::zero(chart, chart.zero_degree()))
            }
            None => VectorField::infer(chart, coefficients),
        }
        .map_err(|e| match e {
            Error::Homogeneity(msg) => Error::Homogeneity(format!("field `{}`: {msg}", self.name)),
            other => other,
        })
    }
}
