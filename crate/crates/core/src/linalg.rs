//! Matrices over the graded ring and tangent vectors at the base point.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::grading::DegreeVector;
use crate::series::{same_chart, Chart, GradedSeries};

/// Dense matrix over Q.
pub type RationalMatrix = Vec<Vec<BigRational>>;

pub fn rational_identity(n: usize) -> RationalMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect()
}

/// Gauss-Jordan inverse with first-nonzero pivoting; `None` if singular.
pub fn invert_rational(m: &RationalMatrix) -> Option<RationalMatrix> {
    let n = m.len();
    let mut a = m.clone();
    let mut inv = rational_identity(n);
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = &f * &a[col][j];
                a[r][j] -= t;
                let t = &f * &inv[col][j];
                inv[r][j] -= t;
            }
        }
    }
    Some(inv)
}

/// Incremental row-echelon basis used for rank tests and pivot selection.
#[derive(Clone, Debug, Default)]
pub(crate) struct Echelon {
    /// (pivot column, normalized row)
    rows: Vec<(usize, Vec<BigRational>)>,
}

impl Echelon {
    /// Reduces `v` against the basis.
    pub(crate) fn reduce(&self, v: &[BigRational]) -> Vec<BigRational> {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                *x -= &f * r;
            }
        }
        v
    }

    /// Inserts `v`; returns its pivot column, or `None` if `v` was in the span.
    pub(crate) fn insert(&mut self, v: &[BigRational]) -> Option<usize> {
        let v = self.reduce(v);
        let p = v.iter().position(|x| !x.is_zero())?;
        let inv = v[p].recip();
        let row: Vec<BigRational> = v.iter().map(|x| x * &inv).collect();
        for (_, other) in self.rows.iter_mut() {
            if !other[p].is_zero() {
                let f = other[p].clone();
                for (o, r) in other.iter_mut().zip(&row) {
                    *o -= &f * r;
                }
            }
        }
        self.rows.push((p, row));
        Some(p)
    }
}

/// A tangent vector at the base point, homogeneous of `degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub degree: DegreeVector,
    pub components: BTreeMap<usize, BigRational>,
}

impl TangentVector {
    pub fn new(
        chart: &Chart,
        degree: DegreeVector,
        components: BTreeMap<usize, BigRational>,
    ) -> Result<Self> {
        for (&i, c) in &components {
            if i >= chart.len() {
                return Err(Error::Format(format!("coordinate index {i} out of range")));
            }
            if !c.is_zero() && chart.degree(i) != degree {
                return Err(Error::Homogeneity(format!(
                    "tangent vector of degree {degree} has a component along `{}` of degree {}",
                    chart.name(i),
                    chart.degree(i)
                )));
            }
        }
        let components = components.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(TangentVector { degree, components })
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    fn dense(&self, chart: &Chart) -> Vec<BigRational> {
        (0..chart.len())
            .map(|i| self.components.get(&i).cloned().unwrap_or_else(BigRational::zero))
            .collect()
    }
}

/// Verifies that `vectors` are independent in each degree block and extends
/// them by coordinate directions to a basis of the tangent space.
///
/// Returns the added coordinate names in chart order.
pub fn complete_basis(vectors: &[TangentVector], chart: &Chart) -> Result<Vec<String>> {
    Ok(complete_basis_indices(vectors, chart)?
        .into_iter()
        .map(|i| chart.name(i).to_string())
        .collect())
}

pub(crate) fn complete_basis_indices(vectors: &[TangentVector], chart: &Chart) -> Result<Vec<usize>> {
    let mut blocks: BTreeMap<u32, Echelon> = BTreeMap::new();
    for v in vectors {
        if v.degree.len() != chart.rank() {
            return Err(Error::Dimension(chart.rank(), v.degree.len()));
        }
        for &i in v.components.keys() {
            if chart.degree(i) != v.degree {
                return Err(Error::Homogeneity(format!(
                    "component along `{}` does not match degree {}",
                    chart.name(i),
                    v.degree
                )));
            }
        }
        let block = blocks.entry(v.degree.bits()).or_default();
        if block.insert(&v.dense(chart)).is_none() {
            return Err(Error::DependentAtPoint);
        }
    }
    let mut added = Vec::new();
    for i in 0..chart.len() {
        let block = blocks.entry(chart.degree(i).bits()).or_default();
        let mut unit = vec![BigRational::zero(); chart.len()];
        unit[i] = BigRational::one();
        if block.insert(&unit).is_some() {
            added.push(i);
        }
    }
    Ok(added)
}

/// Matrix with graded-series entries; entry (i, j) has degree
/// `row_degrees[i] + col_degrees[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMatrix {
    chart: Arc<Chart>,
    row_degrees: Vec<DegreeVector>,
    col_degrees: Vec<DegreeVector>,
    entries: Vec<Vec<GradedSeries>>,
}

impl GradedMatrix {
    pub fn new(
        chart: &Arc<Chart>,
        row_degrees: Vec<DegreeVector>,
        col_degrees: Vec<DegreeVector>,
        entries: Vec<Vec<GradedSeries>>,
    ) -> Result<Self> {
        if entries.len() != row_degrees.len() {
            return Err(Error::Format("row count does not match row degrees".into()));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != col_degrees.len() {
                return Err(Error::Format("column count does not match column degrees".into()));
            }
            for (j, e) in row.iter().enumerate() {
                if !same_chart(e.chart(), chart) {
                    return Err(Error::ChartMismatch);
                }
                let d = row_degrees[i].checked_add(&col_degrees[j])?;
                if !e.is_homogeneous_of(d) {
                    return Err(Error::Homogeneity(format!(
                        "entry ({i},{j}) is not homogeneous of degree {d}"
                    )));
                }
            }
        }
        Ok(GradedMatrix {
            chart: chart.clone(),
            row_degrees,
            col_degrees,
            entries,
        })
    }

    pub fn identity(chart: &Arc<Chart>, degrees: Vec<DegreeVector>) -> Self {
        let n = degrees.len();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            GradedSeries::one(chart)
                        } else {
                            GradedSeries::zero(chart)
                        }
                    })
                    .collect()
            })
            .collect();
        GradedMatrix {
            chart: chart.clone(),
            row_degrees: degrees.clone(),
            col_degrees: degrees,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.col_degrees.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &GradedSeries {
        &self.entries[i][j]
    }

    pub fn row_degrees(&self) -> &[DegreeVector] {
        &self.row_degrees
    }

    pub fn col_degrees(&self) -> &[DegreeVector] {
        &self.col_degrees
    }

    pub fn multiply(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        if self.cols() != other.rows() || self.col_degrees != other.row_degrees {
            return Err(Error::Format("incompatible matrix shapes or degrees".into()));
        }
        if !same_chart(&self.chart, &other.chart) {
            return Err(Error::ChartMismatch);
        }
        let entries = (0..self.rows())
            .map(|i| {
                (0..other.cols())
                    .map(|j| {
                        let mut acc = GradedSeries::zero(&self.chart);
                        for k in 0..self.cols() {
                            let (a, b) = (&self.entries[i][k], &other.entries[k][j]);
                            if !a.is_zero() && !b.is_zero() {
                                acc = &acc + &(a * b);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(GradedMatrix {
            chart: self.chart.clone(),
            row_degrees: self.row_degrees.clone(),
            col_degrees: other.col_degrees.clone(),
            entries,
        })
    }

    fn map_entries(&self, f: impl Fn(&GradedSeries) -> GradedSeries) -> GradedMatrix {
        GradedMatrix {
            chart: self.chart.clone(),
            row_degrees: self.row_degrees.clone(),
            col_degrees: self.col_degrees.clone(),
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(&f).collect())
                .collect(),
        }
    }

    fn zip_entries(
        &self,
        other: &GradedMatrix,
        f: impl Fn(&GradedSeries, &GradedSeries) -> GradedSeries,
    ) -> GradedMatrix {
        GradedMatrix {
            chart: self.chart.clone(),
            row_degrees: self.row_degrees.clone(),
            col_degrees: self.col_degrees.clone(),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows() == self.cols()
            && self.entries.iter().enumerate().all(|(i, row)| {
                row.iter().enumerate().all(|(j, e)| {
                    if i == j {
                        *e == GradedSeries::one(&self.chart)
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    /// Constant terms of all entries.
    pub fn at_point(&self) -> RationalMatrix {
        self.entries
            .iter()
            .map(|row| row.iter().map(|e| e.at_point()).collect())
            .collect()
    }

    fn constant_like(&self, m: &RationalMatrix) -> GradedMatrix {
        GradedMatrix {
            chart: self.chart.clone(),
            row_degrees: self.row_degrees.clone(),
            col_degrees: self.col_degrees.clone(),
            entries: m
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|c| GradedSeries::constant(&self.chart, c.clone()))
                        .collect()
                })
                .collect(),
        }
    }

    /// Inverse over the truncated ring.
    ///
    /// With `C` the value at the base point and `N = T − C`, the inverse is
    /// `Σₖ (−C⁻¹N)ᵏ C⁻¹`; `N` has entries in the maximal ideal, so the sum
    /// is finite in the truncated ring.
    pub fn invert_mod_j(&self) -> Result<GradedMatrix> {
        if self.rows() != self.cols() || self.row_degrees != self.col_degrees {
            return Err(Error::Format(
                "invert_mod_j needs a square matrix with matching row and column degrees".into(),
            ));
        }
        let constant = self.at_point();
        let c_inv = invert_rational(&constant).ok_or(Error::NotInvertibleModJ)?;
        let c_inv = self.constant_like(&c_inv);
        let nilpotent = self.zip_entries(&self.constant_like(&constant), |a, b| a - b);
        let step = c_inv.multiply(&nilpotent)?.map_entries(|e| -e);
        let mut term = c_inv.clone();
        let mut sum = c_inv;
        let bound = {
            let t = self.chart.truncation();
            t.j_order + t.base_order + 1
        };
        for _ in 0..bound {
            term = step.multiply(&term)?;
            if term.entries.iter().all(|r| r.iter().all(|e| e.is_zero())) {
                break;
            }
            sum = sum.zip_entries(&term, |a, b| a + b);
        }
        Ok(sum)
    }
}
