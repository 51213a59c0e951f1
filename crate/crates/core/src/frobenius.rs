//! Straightening of single fields, triangular forms of commuting families,
//! and adapted coordinates for involutive distributions.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::distribution::{
    is_involutive, membership_within, normalize_generators, rank_of, Distribution, Involutivity, Membership,
};
use crate::error::{Error, Result};
use crate::fields::{CoordinateChange, VectorField};
use crate::grading::DegreeVector;
use crate::linalg::GradedMatrix;
use crate::series::{rational, same_chart, Chart, GradedSeries, Reduction, Window};

/// A change after which the input field is the coordinate derivation along `pivot`.
#[derive(Clone, Debug)]
pub struct Straightened {
    pub change: CoordinateChange,
    pub pivot: usize,
}

/// Straightens a degree-zero field that is nonzero at the base point.
pub fn straighten_deg0(x: &VectorField) -> Result<Straightened> {
    if !x.degree().is_zero() {
        return Err(Error::NonzeroDegree);
    }
    let chart = x.chart().clone();
    let p = (0..chart.len())
        .find(|&u| chart.is_base(u) && !x.coefficient(u).at_point().is_zero())
        .ok_or(Error::DegenerateAtPoint)?;

    let mut total = flow_box(x, p)?;
    let pushed = total.pushforward(x)?;
    total = total.then(&linear_j_step(&pushed, p)?)?;

    // Residuals at step k lie in J^k; integrating along the pivot removes them.
    for _ in 2..=chart.truncation().j_order {
        let pushed = total.pushforward(x)?;
        let corrections = (0..chart.len())
            .map(|u| {
                let target = unit_if(&chart, u == p);
                let residual = (pushed.coefficient(u) - &target).restrict(Window::DEGREE_ZERO_STEP);
                Ok(-&residual.antiderivative(p)?.series)
            })
            .collect::<Result<Vec<_>>>()?;
        total = total.then(&shift(&chart, corrections)?)?;
    }
    Ok(Straightened { change: total, pivot: p })
}

/// Straightens a nonzero-degree field; odd fields must square to zero.
pub fn straighten_nonzero(chi: &VectorField) -> Result<Straightened> {
    let degree = chi.degree();
    if degree.is_zero() {
        return Err(Error::ZeroDegree);
    }
    let chart = chi.chart().clone();
    let sigma = (0..chart.len())
        .find(|&u| chart.degree(u) == degree && !chi.coefficient(u).at_point().is_zero())
        .ok_or(Error::DegenerateAtPoint)?;
    let odd = degree.is_odd();
    if odd && !chi.bracket(chi)?.is_zero_within(Window::CHECK) {
        return Err(Error::OddSquareNonzero);
    }

    // Old coordinates in terms of new ones: u = u + η·a_u|_{η=0}, and η_old = η·a_η|_{η=0}.
    let eta = GradedSeries::variable(&chart, sigma);
    let old_in_new = (0..chart.len())
        .map(|u| {
            let tail = &eta * &chi.coefficient(u).set_zero(sigma);
            if u == sigma {
                tail
            } else {
                &GradedSeries::variable(&chart, u) + &tail
            }
        })
        .collect();
    let mut total = CoordinateChange::from_inverse(&chart, old_in_new)?;

    if !odd {
        for _ in 1..=chart.truncation().j_order {
            let pushed = total.pushforward(chi)?;
            let corrections = (0..chart.len())
                .map(|u| {
                    let target = unit_if(&chart, u == sigma);
                    let residual = (pushed.coefficient(u) - &target).restrict(Window::NONZERO_STEP);
                    Ok(-&residual.antiderivative(sigma)?.series)
                })
                .collect::<Result<Vec<_>>>()?;
            total = total.then(&shift(&chart, corrections)?)?;
        }
    }
    Ok(Straightened { change: total, pivot: sigma })
}

fn unit_if(chart: &Arc<Chart>, cond: bool) -> GradedSeries {
    if cond {
        GradedSeries::one(chart)
    } else {
        GradedSeries::zero(chart)
    }
}

/// New coordinates `u + corrections[u]`.
fn shift(chart: &Arc<Chart>, corrections: Vec<GradedSeries>) -> Result<CoordinateChange> {
    if corrections.iter().all(|c| c.is_zero()) {
        return Ok(CoordinateChange::identity(chart));
    }
    let images = corrections
        .into_iter()
        .enumerate()
        .map(|(u, c)| &GradedSeries::variable(chart, u) + &c)
        .collect();
    CoordinateChange::new(chart, images)
}

/// Formal flow box of the reduced field: the point at time `y_p` on the
/// orbit through the hyperplane `z_p = 0`, expanded as a Lie series.
fn flow_box(x: &VectorField, p: usize) -> Result<CoordinateChange> {
    let chart = x.chart().clone();
    let reduced = x.map_coefficients(|u, a| {
        if chart.is_base(u) {
            a.reduce(Reduction::ModJ)
        } else {
            GradedSeries::zero(&chart)
        }
    });
    if reduced == VectorField::coordinate(&chart, p) {
        return Ok(CoordinateChange::identity(&chart));
    }
    let time = GradedSeries::variable(&chart, p);
    let mut old_in_new = Vec::with_capacity(chart.len());
    for u in 0..chart.len() {
        let coordinate = GradedSeries::variable(&chart, u);
        if !chart.is_base(u) {
            old_in_new.push(coordinate);
            continue;
        }
        let mut iterate = coordinate;
        let mut weight = GradedSeries::one(&chart);
        let mut acc = GradedSeries::zero(&chart);
        for k in 0..=chart.truncation().base_order {
            acc = &acc + &(&weight * &iterate.set_zero(p));
            iterate = reduced.apply(&iterate)?;
            if iterate.is_zero() {
                break;
            }
            weight = (&weight * &time).scale(&rational(1, i64::from(k) + 1));
        }
        old_in_new.push(acc);
    }
    CoordinateChange::from_inverse(&chart, old_in_new)
}

/// Kills the part of the J-coefficients that is linear in J: new
/// `η_ρ = Σ g_ρτ η_τ` with `∂_p g = −g·b`, `g = I` on `y_p = 0`.
fn linear_j_step(pushed: &VectorField, p: usize) -> Result<CoordinateChange> {
    let chart = pushed.chart().clone();
    let fiber: Vec<usize> = (0..chart.len()).filter(|&u| !chart.is_base(u)).collect();
    let m = fiber.len();
    let b: Vec<Vec<GradedSeries>> = fiber
        .iter()
        .map(|&rho| {
            let linear = pushed.coefficient(rho).restrict(Window::DEGREE_ZERO_STEP).j_layer(1);
            fiber.iter().map(|&tau| linear.derive(tau)).collect()
        })
        .collect();
    if b.iter().flatten().all(|s| s.is_zero()) {
        return Ok(CoordinateChange::identity(&chart));
    }
    let identity: Vec<Vec<GradedSeries>> = (0..m)
        .map(|i| (0..m).map(|j| unit_if(&chart, i == j)).collect())
        .collect();
    let mut g = identity.clone();
    // Each pass fixes one more base order.
    for _ in 0..=chart.truncation().base_order + 1 {
        let mut next = identity.clone();
        for i in 0..m {
            for j in 0..m {
                let mut gb = GradedSeries::zero(&chart);
                for k in 0..m {
                    if !g[i][k].is_zero() && !b[k][j].is_zero() {
                        gb = &gb + &(&g[i][k] * &b[k][j]);
                    }
                }
                next[i][j] = &next[i][j] - &gb.antiderivative(p)?.series;
            }
        }
        if next == g {
            break;
        }
        g = next;
    }
    let mut images: Vec<GradedSeries> = (0..chart.len()).map(|u| GradedSeries::variable(&chart, u)).collect();
    for (i, &rho) in fiber.iter().enumerate() {
        images[rho] = fiber
            .iter()
            .enumerate()
            .fold(GradedSeries::zero(&chart), |acc, (j, &tau)| {
                &acc + &(&g[i][j] * &GradedSeries::variable(&chart, tau))
            });
    }
    CoordinateChange::new(&chart, images)
}

/// Coordinates in which a commuting degree-zero family spans the
/// derivations along `pivots`.
#[derive(Clone, Debug)]
pub struct TriangularForm {
    pub change: CoordinateChange,
    pub pivots: Vec<usize>,
    /// Inverse of the unit-triangular matrix of pushed fields on the pivot
    /// derivations: row `i` expresses `∂/∂pivots[i]` through the family.
    pub basis: GradedMatrix,
}

pub fn commuting_triangular(chart: &Arc<Chart>, fields: &[VectorField]) -> Result<TriangularForm> {
    let (change, pivots) = triangularize(chart, fields, &mut Vec::new())?;
    let degrees = vec![chart.zero_degree(); fields.len()];
    let entries = fields
        .iter()
        .map(|x| {
            let pushed = change.pushforward(x)?;
            Ok(pivots.iter().map(|&p| pushed.coefficient(p).clone()).collect())
        })
        .collect::<Result<Vec<Vec<GradedSeries>>>>()?;
    let basis = GradedMatrix::new(chart, degrees.clone(), degrees, entries)?.invert_mod_j()?;
    Ok(TriangularForm { change, pivots, basis })
}

fn triangularize(
    chart: &Arc<Chart>,
    fields: &[VectorField],
    steps: &mut Vec<Step>,
) -> Result<(CoordinateChange, Vec<usize>)> {
    for x in fields {
        if !same_chart(x.chart(), chart) {
            return Err(Error::ChartMismatch);
        }
        if !x.degree().is_zero() {
            return Err(Error::NonzeroDegree);
        }
        if x.at_point().is_zero() {
            return Err(Error::DegenerateAtPoint);
        }
    }
    rank_of(&Distribution::new(chart, fields.to_vec())?)?;
    for i in 0..fields.len() {
        for j in i + 1..fields.len() {
            let bracket = fields[i].bracket(&fields[j])?;
            if !bracket.is_zero_within(Window::CHECK) {
                return Err(Error::NotCommuting {
                    left: i,
                    right: j,
                    bracket: Box::new(bracket),
                });
            }
        }
    }
    let mut total = CoordinateChange::identity(chart);
    let mut pivots = Vec::new();
    for x in fields {
        let reduced = strip(&total.pushforward(x)?, &pivots);
        let s = straighten_deg0(&reduced)?;
        steps.push(Step::new(StepKind::DegreeZero, chart, s.pivot, &s.change));
        pivots.push(s.pivot);
        total = total.then(&s.change)?;
    }
    Ok((total, pivots))
}

/// Drops the components along `adapted` and the dependence on those coordinates.
fn strip(x: &VectorField, adapted: &[usize]) -> VectorField {
    x.map_coefficients(|u, a| {
        if adapted.contains(&u) {
            GradedSeries::zero(a.chart())
        } else {
            adapted.iter().fold(a.clone(), |s, &b| s.set_zero(b))
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    DegreeZero,
    NonzeroDegree,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::DegreeZero => "degree_zero",
            StepKind::NonzeroDegree => "nonzero_degree",
        }
    }
}

/// One straightening step of the pipeline, expressed in the coordinates
/// produced by the previous steps.
#[derive(Clone, Debug)]
pub struct Step {
    pub kind: StepKind,
    pub pivot: String,
    pub change: CoordinateChange,
}

impl Step {
    fn new(kind: StepKind, chart: &Chart, pivot: usize, change: &CoordinateChange) -> Self {
        Step {
            kind,
            pivot: chart.name(pivot).to_string(),
            change: change.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FrobeniusCertificate {
    pub change: CoordinateChange,
    /// Coordinates whose derivations span the pushed distribution.
    pub adapted: Vec<String>,
    /// Generator index → highest filtration order of a leftover component
    /// off the adapted directions; such terms sit beyond the reliable
    /// truncation window. Absent means clean.
    pub residuals: BTreeMap<usize, u32>,
    pub steps: Vec<Step>,
}

pub fn adapted_coordinates(d: &Distribution) -> Result<FrobeniusCertificate> {
    let chart = d.chart();
    rank_of(d)?;
    if let Involutivity::NotInvolutive(witness) = is_involutive(d)? {
        return Err(Error::NotInvolutive(witness));
    }
    let normalized = normalize_generators(d)?;
    let gens = normalized.distribution.generators();
    let mut steps = Vec::new();

    let even: Vec<VectorField> = gens.iter().filter(|g| g.degree().is_zero()).cloned().collect();
    let (mut total, mut adapted) = triangularize(chart, &even, &mut steps).map_err(internal)?;

    let mut graded: Vec<(usize, &VectorField)> = gens
        .iter()
        .zip(&normalized.pivots)
        .filter(|(g, _)| !g.degree().is_zero())
        .map(|(g, &p)| (p, g))
        .collect();
    graded.sort_by_key(|(p, _)| *p);
    for (_, chi) in graded {
        let reduced = strip(&total.pushforward(chi)?, &adapted);
        let s = straighten_nonzero(&reduced).map_err(internal)?;
        steps.push(Step::new(StepKind::NonzeroDegree, chart, s.pivot, &s.change));
        adapted.push(s.pivot);
        total = total.then(&s.change)?;
    }

    let mut cert = FrobeniusCertificate {
        change: total,
        adapted: adapted.iter().map(|&a| chart.name(a).to_string()).collect(),
        residuals: BTreeMap::new(),
        steps,
    };
    let report = verify_adapted(d, &cert)?;
    if !report.holds() {
        return Err(Error::InternalInconsistency(format!(
            "constructed coordinates fail verification: {}",
            report.failures.join("; ")
        )));
    }
    cert.residuals = report.residuals;
    Ok(cert)
}

/// Failures that involutive, independent input rules out.
fn internal(e: Error) -> Error {
    match e {
        Error::OddSquareNonzero | Error::DegenerateAtPoint | Error::NotCommuting { .. } | Error::DependentAtPoint => {
            Error::InternalInconsistency(e.to_string())
        }
        other => other,
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Verification {
    /// Every pushed generator lies in the span of the adapted derivations.
    pub tangent: bool,
    /// Every adapted derivation lies in the span of the pushed generators.
    pub spanning: bool,
    /// Adapted counts per degree equal the rank.
    pub rank_matches: bool,
    pub residuals: BTreeMap<usize, u32>,
    pub failures: Vec<String>,
}

impl Verification {
    pub fn holds(&self) -> bool {
        self.tangent && self.spanning && self.rank_matches
    }
}

/// Checks a certificate against the distribution; a failed check is
/// reported, not raised.
pub fn verify_adapted(d: &Distribution, cert: &FrobeniusCertificate) -> Result<Verification> {
    let chart = d.chart();
    if !same_chart(cert.change.chart(), chart) {
        return Err(Error::ChartMismatch);
    }
    let adapted = cert
        .adapted
        .iter()
        .map(|name| chart.index_of(name))
        .collect::<Result<Vec<usize>>>()?;
    let mut report = Verification {
        tangent: true,
        spanning: true,
        rank_matches: true,
        ..Verification::default()
    };

    let pushed = d
        .generators()
        .iter()
        .map(|g| cert.change.pushforward(g))
        .collect::<Result<Vec<_>>>()?;
    for (i, y) in pushed.iter().enumerate() {
        let off: Vec<&GradedSeries> = (0..chart.len())
            .filter(|u| !adapted.contains(u))
            .map(|u| y.coefficient(u))
            .collect();
        if let Some(order) = off.iter().filter_map(|s| s.max_order()).max() {
            report.residuals.insert(i, order);
        }
        if off.iter().any(|s| !s.restrict(Window::CHECK).is_zero()) {
            report.tangent = false;
            report.failures.push(format!("generator {i} leaves the adapted directions"));
        }
    }

    let span = Distribution::new(chart, pushed)?;
    for &a in &adapted {
        let target = VectorField::coordinate(chart, a);
        if !matches!(membership_within(&target, &span, Window::CHECK), Ok(Membership::Member { .. })) {
            report.spanning = false;
            report.failures.push(format!("∂/∂{} is not in the span", chart.name(a)));
        }
    }

    let mut counts: BTreeMap<DegreeVector, usize> = BTreeMap::new();
    for &a in &adapted {
        *counts.entry(chart.degree(a)).or_default() += 1;
    }
    let unique = {
        let mut sorted = adapted.clone();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.len() == adapted.len()
    };
    match rank_of(d) {
        Ok(rank) if rank.counts == counts && unique => {}
        _ => {
            report.rank_matches = false;
            report.failures.push("adapted counts differ from the rank".into());
        }
    }
    Ok(report)
}
