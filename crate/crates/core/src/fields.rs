//! Homogeneous vector fields, the graded Lie bracket, and coordinate changes.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::grading::DegreeVector;
use crate::linalg::{invert_rational, TangentVector};
use crate::series::{same_chart, Chart, GradedSeries, Window};

/// A homogeneous derivation `Σ a_u ∂/∂u` with coefficients acting from the left.
#[derive(Clone, PartialEq)]
pub struct VectorField {
    chart: Arc<Chart>,
    degree: DegreeVector,
    coefficients: Vec<GradedSeries>,
}

impl VectorField {
    pub fn new(chart: &Arc<Chart>, degree: DegreeVector, coefficients: Vec<GradedSeries>) -> Result<Self> {
        if degree.len() != chart.rank() {
            return Err(Error::Dimension(chart.rank(), degree.len()));
        }
        if coefficients.len() != chart.len() {
            return Err(Error::Format("one coefficient per coordinate is required".into()));
        }
        for (u, a) in coefficients.iter().enumerate() {
            if !same_chart(a.chart(), chart) {
                return Err(Error::ChartMismatch);
            }
            let expected = degree + chart.degree(u);
            if !a.is_homogeneous_of(expected) {
                return Err(Error::Homogeneity(format!(
                    "coefficient of ∂/∂{} must have degree {expected}",
                    chart.name(u)
                )));
            }
        }
        Ok(VectorField {
            chart: chart.clone(),
            degree,
            coefficients,
        })
    }

    /// Builds a field from (coordinate name, coefficient) pairs; missing coefficients are zero.
    pub fn from_named(
        chart: &Arc<Chart>,
        degree: DegreeVector,
        named: &[(&str, GradedSeries)],
    ) -> Result<Self> {
        let mut coefficients = vec![GradedSeries::zero(chart); chart.len()];
        for (name, a) in named {
            coefficients[chart.index_of(name)?] = a.clone();
        }
        Self::new(chart, degree, coefficients)
    }

    /// Infers the degree from the first nonzero coefficient.
    pub fn infer(chart: &Arc<Chart>, coefficients: Vec<GradedSeries>) -> Result<Self> {
        let degree = coefficients
            .iter()
            .enumerate()
            .find_map(|(u, a)| a.degree().map(|d| d + chart.degree(u)))
            .ok_or_else(|| {
                Error::Homogeneity("cannot infer the degree of a zero or inhomogeneous field".into())
            })?;
        Self::new(chart, degree, coefficients)
    }

    pub fn zero(chart: &Arc<Chart>, degree: DegreeVector) -> Self {
        VectorField {
            chart: chart.clone(),
            degree,
            coefficients: vec![GradedSeries::zero(chart); chart.len()],
        }
    }

    /// Coordinate derivation ∂/∂u.
    pub fn coordinate(chart: &Arc<Chart>, index: usize) -> Self {
        let mut f = Self::zero(chart, chart.degree(index));
        f.coefficients[index] = GradedSeries::one(chart);
        f
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> DegreeVector {
        self.degree
    }

    pub fn coefficients(&self) -> &[GradedSeries] {
        &self.coefficients
    }

    pub fn coefficient(&self, index: usize) -> &GradedSeries {
        &self.coefficients[index]
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|a| a.is_zero())
    }

    fn check_chart(&self, chart: &Arc<Chart>) -> Result<()> {
        if same_chart(&self.chart, chart) {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    /// X(f) = Σ a_u · ∂_u f.
    pub fn apply(&self, f: &GradedSeries) -> Result<GradedSeries> {
        self.check_chart(f.chart())?;
        let mut out = GradedSeries::zero(&self.chart);
        for (u, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() || !f.depends_on(u) {
                continue;
            }
            out = &out + &(a * &f.derive(u));
        }
        Ok(out)
    }

    /// [X, Y] with coefficients X(Y^v) − (−1)^{⟨X,Y⟩} Y(X^v).
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField> {
        self.check_chart(&other.chart)?;
        let negative = self.degree.scalar_product(&other.degree)?;
        let mut coefficients = Vec::with_capacity(self.chart.len());
        for v in 0..self.chart.len() {
            let xy = self.apply(&other.coefficients[v])?;
            let yx = other.apply(&self.coefficients[v])?;
            coefficients.push(if negative { &xy + &yx } else { &xy - &yx });
        }
        Ok(VectorField {
            chart: self.chart.clone(),
            degree: self.degree + other.degree,
            coefficients,
        })
    }

    pub fn try_add(&self, other: &VectorField) -> Result<VectorField> {
        self.check_chart(&other.chart)?;
        if self.degree != other.degree {
            return Err(Error::Homogeneity("sum of fields of different degree".into()));
        }
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &VectorField) -> Result<VectorField> {
        self.check_chart(&other.chart)?;
        if self.degree != other.degree {
            return Err(Error::Homogeneity("difference of fields of different degree".into()));
        }
        Ok(self.zip(other, |a, b| a - b))
    }

    fn zip(&self, other: &VectorField, f: impl Fn(&GradedSeries, &GradedSeries) -> GradedSeries) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            degree: self.degree,
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    /// f · X for homogeneous f.
    pub fn left_multiply(&self, f: &GradedSeries) -> Result<VectorField> {
        self.check_chart(f.chart())?;
        let degree = match f.degree() {
            Some(d) => d + self.degree,
            None if f.is_zero() => self.degree,
            None => return Err(Error::Homogeneity("multiplier is not homogeneous".into())),
        };
        Ok(VectorField {
            chart: self.chart.clone(),
            degree,
            coefficients: self.coefficients.iter().map(|a| f * a).collect(),
        })
    }

    pub(crate) fn map_coefficients(&self, f: impl Fn(usize, &GradedSeries) -> GradedSeries) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            degree: self.degree,
            coefficients: self.coefficients.iter().enumerate().map(|(u, a)| f(u, a)).collect(),
        }
    }

    pub fn restrict(&self, window: Window) -> VectorField {
        self.map_coefficients(|_, a| a.restrict(window))
    }

    pub fn is_zero_within(&self, window: Window) -> bool {
        self.coefficients.iter().all(|a| a.restrict(window).is_zero())
    }

    pub fn agrees_within(&self, other: &VectorField, window: Window) -> bool {
        same_chart(&self.chart, &other.chart)
            && self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .all(|(a, b)| a.agrees_within(b, window))
    }

    /// Tangent vector at the base point.
    pub fn at_point(&self) -> TangentVector {
        let components: BTreeMap<usize, BigRational> = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(u, a)| (u, a.at_point()))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        TangentVector {
            degree: self.degree,
            components,
        }
    }

    pub fn retruncate(&self, target: &Arc<Chart>) -> Result<VectorField> {
        let coefficients = self
            .coefficients
            .iter()
            .map(|a| a.retruncate(target))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField {
            chart: target.clone(),
            degree: self.degree,
            coefficients,
        })
    }
}

impl std::ops::Neg for VectorField {
    type Output = VectorField;

    fn neg(self) -> VectorField {
        self.map_coefficients(|_, a| -a)
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorField[{}](", self.degree)?;
        let mut first = true;
        for (u, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({a})∂{}", self.chart.name(u))?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

/// A centered, degree-preserving change of coordinates on one chart.
///
/// `images[v]` expresses the new coordinate `v` in the old coordinates;
/// `inverse[u]` expresses the old coordinate `u` in the new ones. Both
/// systems use the chart's coordinate names.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateChange {
    chart: Arc<Chart>,
    images: Vec<GradedSeries>,
    inverse: Vec<GradedSeries>,
}

impl CoordinateChange {
    pub fn identity(chart: &Arc<Chart>) -> Self {
        let images: Vec<_> = (0..chart.len()).map(|i| GradedSeries::variable(chart, i)).collect();
        CoordinateChange {
            chart: chart.clone(),
            inverse: images.clone(),
            images,
        }
    }

    /// Validates `images` and computes the inverse.
    pub fn new(chart: &Arc<Chart>, images: Vec<GradedSeries>) -> Result<Self> {
        validate_images(chart, &images)?;
        let inverse = invert_images(chart, &images)?;
        Ok(CoordinateChange {
            chart: chart.clone(),
            images,
            inverse,
        })
    }

    /// Partial map by name; unspecified coordinates are kept.
    pub fn from_named(chart: &Arc<Chart>, named: &[(&str, GradedSeries)]) -> Result<Self> {
        let mut images: Vec<_> = (0..chart.len()).map(|i| GradedSeries::variable(chart, i)).collect();
        for (name, s) in named {
            images[chart.index_of(name)?] = s.clone();
        }
        Self::new(chart, images)
    }

    /// Change whose inverse images are `inverse`.
    pub fn from_inverse(chart: &Arc<Chart>, inverse: Vec<GradedSeries>) -> Result<Self> {
        Ok(Self::new(chart, inverse)?.inverse())
    }

    /// Uses a precomputed inverse after checking both compositions.
    pub fn with_inverse(chart: &Arc<Chart>, images: Vec<GradedSeries>, inverse: Vec<GradedSeries>) -> Result<Self> {
        validate_images(chart, &images)?;
        validate_images(chart, &inverse)?;
        let change = CoordinateChange {
            chart: chart.clone(),
            images,
            inverse,
        };
        if !change.is_consistent() {
            return Err(Error::Format("stored inverse does not invert the change".into()));
        }
        Ok(change)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn images(&self) -> &[GradedSeries] {
        &self.images
    }

    pub fn image(&self, index: usize) -> &GradedSeries {
        &self.images[index]
    }

    pub fn inverse_images(&self) -> &[GradedSeries] {
        &self.inverse
    }

    pub fn inverse(&self) -> CoordinateChange {
        CoordinateChange {
            chart: self.chart.clone(),
            images: self.inverse.clone(),
            inverse: self.images.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, s)| *s == GradedSeries::variable(&self.chart, i))
    }

    /// Both compositions are the identity wherever truncated data is exact.
    pub fn is_consistent(&self) -> bool {
        (0..self.chart.len()).all(|u| {
            let x = GradedSeries::variable(&self.chart, u);
            self.images[u].compose(&self.inverse).agrees_within(&x, Window::EXACT)
                && self.inverse[u].compose(&self.images).agrees_within(&x, Window::EXACT)
        })
    }

    /// Apply `self` first, then `then`.
    pub fn then(&self, then: &CoordinateChange) -> Result<CoordinateChange> {
        if !same_chart(&self.chart, &then.chart) {
            return Err(Error::ChartMismatch);
        }
        Ok(CoordinateChange {
            chart: self.chart.clone(),
            images: then.images.iter().map(|s| s.compose(&self.images)).collect(),
            inverse: self.inverse.iter().map(|s| s.compose(&then.inverse)).collect(),
        })
    }

    /// Rewrites `f`, a function of the new coordinates, in the old ones.
    pub fn substitute(&self, f: &GradedSeries) -> Result<GradedSeries> {
        if !same_chart(f.chart(), &self.chart) {
            return Err(Error::ChartMismatch);
        }
        Ok(f.compose(&self.images))
    }

    /// Expresses X in the new coordinates: Y(v) = X(image v) rewritten via the inverse.
    pub fn pushforward(&self, field: &VectorField) -> Result<VectorField> {
        field.check_chart(&self.chart)?;
        let coefficients = self
            .images
            .iter()
            .map(|img| field.apply(img).map(|s| s.compose(&self.inverse)))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField {
            chart: self.chart.clone(),
            degree: field.degree,
            coefficients,
        })
    }

    pub fn retruncate(&self, target: &Arc<Chart>) -> Result<CoordinateChange> {
        let conv = |v: &[GradedSeries]| v.iter().map(|s| s.retruncate(target)).collect::<Result<Vec<_>>>();
        Ok(CoordinateChange {
            chart: target.clone(),
            images: conv(&self.images)?,
            inverse: conv(&self.inverse)?,
        })
    }
}

/// Free function form of [`CoordinateChange::substitute`].
pub fn substitute(f: &GradedSeries, change: &CoordinateChange) -> Result<GradedSeries> {
    change.substitute(f)
}

fn validate_images(chart: &Arc<Chart>, images: &[GradedSeries]) -> Result<()> {
    if images.len() != chart.len() {
        return Err(Error::Format("a coordinate change needs one image per coordinate".into()));
    }
    for (u, img) in images.iter().enumerate() {
        if !same_chart(img.chart(), chart) {
            return Err(Error::ChartMismatch);
        }
        if !img.is_homogeneous_of(chart.degree(u)) {
            return Err(Error::Homogeneity(format!(
                "image of `{}` must have degree {}",
                chart.name(u),
                chart.degree(u)
            )));
        }
        if !img.at_point().is_zero() {
            return Err(Error::Centering(chart.name(u).to_string()));
        }
    }
    Ok(())
}

/// Jacobian at the base point: `jac[v][u]` is the coefficient of `u` in `images[v]`.
pub(crate) fn linear_part(chart: &Chart, images: &[GradedSeries]) -> Vec<Vec<BigRational>> {
    images
        .iter()
        .map(|img| (0..chart.len()).map(|u| img.linear_coefficient(u)).collect())
        .collect()
}

/// Solves φ(ψ) = id by the fixed point ψ = L⁻¹(w − N(ψ)), where L is the
/// linear part of φ and N the rest. Each pass fixes at least one more
/// order, so the iteration stabilizes inside the truncation box.
fn invert_images(chart: &Arc<Chart>, images: &[GradedSeries]) -> Result<Vec<GradedSeries>> {
    let n = chart.len();
    let jac = linear_part(chart, images);
    // Degree-preserving images make the Jacobian block diagonal, so the
    // full inverse exists iff every degree block is invertible.
    let jac_inv = invert_rational(&jac).ok_or(Error::JacobianSingular)?;
    let vars: Vec<GradedSeries> = (0..n).map(|i| GradedSeries::variable(chart, i)).collect();
    let nonlinear: Vec<GradedSeries> = images
        .iter()
        .map(|img| img.filter(|m| m.as_variable().is_none()))
        .collect();
    let apply_inv = |rhs: &[GradedSeries]| -> Vec<GradedSeries> {
        (0..n)
            .map(|u| {
                let mut acc = GradedSeries::zero(chart);
                for (v, r) in rhs.iter().enumerate() {
                    if !jac_inv[u][v].is_zero() && !r.is_zero() {
                        acc = &acc + &r.scale(&jac_inv[u][v]);
                    }
                }
                acc
            })
            .collect()
    };
    let mut psi = apply_inv(&vars);
    let t = chart.truncation();
    let max_iter = 2 * (t.j_order + 2 * t.base_order) + 4;
    for _ in 0..max_iter {
        let rhs: Vec<GradedSeries> = vars
            .iter()
            .zip(&nonlinear)
            .map(|(w, nl)| w - &nl.compose(&psi))
            .collect();
        let next = apply_inv(&rhs);
        if next == psi {
            return Ok(psi);
        }
        psi = next;
    }
    Err(Error::InternalInconsistency(
        "inverse of coordinate change did not stabilize".into(),
    ))
}
