use std::cmp::Ordering;
use std::collections::HashSet;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grading::{pairing, DegreeVector, MAX_RANK};

/// Maximum number of coordinates on one chart (masks are `u64`).
pub const MAX_COORDINATES: usize = 64;

pub const DEFAULT_J_ORDER: u32 = 4;
pub const DEFAULT_BASE_ORDER: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Truncation {
    /// Largest kept J-degree (total exponent of nonzero-degree generators).
    pub j_order: u32,
    /// Largest kept base degree (total exponent of degree-zero coordinates).
    pub base_order: u32,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            j_order: DEFAULT_J_ORDER,
            base_order: DEFAULT_BASE_ORDER,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coordinate {
    pub name: String,
    pub degree: DegreeVector,
}

/// A coordinate chart centered at the base point.
///
/// The order of `coordinates` is the canonical factor order of monomials.
#[derive(Clone, Debug)]
pub struct Chart {
    n: usize,
    coordinates: Vec<Coordinate>,
    truncation: Truncation,
    /// `pair_mask[j]` has bit `i` set iff ⟨deg i, deg j⟩ = 1.
    pair_mask: Vec<u64>,
    odd_mask: u64,
    base_mask: u64,
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.coordinates == other.coordinates
            && self.truncation == other.truncation
    }
}

impl Eq for Chart {}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Chart {
    pub fn new(n: usize, coordinates: Vec<Coordinate>, truncation: Truncation) -> Result<Arc<Chart>> {
        if n == 0 || n > MAX_RANK {
            return Err(Error::Format(format!("grading rank must be in 1..={MAX_RANK}")));
        }
        if coordinates.is_empty() || coordinates.len() > MAX_COORDINATES {
            return Err(Error::Format(format!(
                "a chart needs between 1 and {MAX_COORDINATES} coordinates"
            )));
        }
        if truncation.j_order == 0 || truncation.base_order == 0 {
            return Err(Error::Format("truncation orders must be positive".into()));
        }
        if truncation.j_order > 64 || truncation.base_order > 64 {
            return Err(Error::Format("truncation orders above 64 are not supported".into()));
        }
        let mut seen = HashSet::new();
        for c in &coordinates {
            if !is_identifier(&c.name) {
                return Err(Error::Format(format!("`{}` is not a valid identifier", c.name)));
            }
            if !seen.insert(c.name.as_str()) {
                return Err(Error::Format(format!("duplicate coordinate `{}`", c.name)));
            }
            if c.degree.len() != n {
                return Err(Error::Dimension(n, c.degree.len()));
            }
        }
        let mut pair_mask = vec![0u64; coordinates.len()];
        let mut odd_mask = 0u64;
        let mut base_mask = 0u64;
        for (j, cj) in coordinates.iter().enumerate() {
            for (i, ci) in coordinates.iter().enumerate() {
                if pairing(ci.degree.bits(), cj.degree.bits()) {
                    pair_mask[j] |= 1 << i;
                }
            }
            if cj.degree.is_odd() {
                odd_mask |= 1 << j;
            }
            if cj.degree.is_zero() {
                base_mask |= 1 << j;
            }
        }
        Ok(Arc::new(Chart {
            n,
            coordinates,
            truncation,
            pair_mask,
            odd_mask,
            base_mask,
        }))
    }

    /// Same coordinates, different truncation orders.
    pub fn with_truncation(&self, truncation: Truncation) -> Result<Arc<Chart>> {
        Chart::new(self.n, self.coordinates.clone(), truncation)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.coordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coordinates.is_empty()
    }

    pub fn coordinates(&self) -> &[Coordinate] {
        &self.coordinates
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn name(&self, index: usize) -> &str {
        &self.coordinates[index].name
    }

    pub fn degree(&self, index: usize) -> DegreeVector {
        self.coordinates[index].degree
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.coordinates
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCoordinate(name.to_string()))
    }

    pub fn is_base(&self, index: usize) -> bool {
        self.base_mask >> index & 1 == 1
    }

    pub fn is_odd(&self, index: usize) -> bool {
        self.odd_mask >> index & 1 == 1
    }

    pub fn zero_degree(&self) -> DegreeVector {
        DegreeVector::zero(self.n)
    }

    pub(crate) fn pair_mask(&self, index: usize) -> u64 {
        self.pair_mask[index]
    }

    pub(crate) fn odd_mask(&self) -> u64 {
        self.odd_mask
    }


    /// Indices of coordinates with the given degree, in chart order.
    pub fn indices_of_degree(&self, degree: DegreeVector) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.degree(i) == degree).collect()
    }

    /// Distinct coordinate degrees in order of first appearance.
    pub fn degree_classes(&self) -> Vec<DegreeVector> {
        let mut out: Vec<DegreeVector> = Vec::new();
        for c in &self.coordinates {
            if !out.contains(&c.degree) {
                out.push(c.degree);
            }
        }
        out
    }

    pub(crate) fn within_bounds(&self, jdeg: u32, bdeg: u32) -> bool {
        jdeg <= self.truncation.j_order && bdeg <= self.truncation.base_order
    }
}

pub(crate) fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A monomial in canonical (chart) factor order.
///
/// Ordering, equality and hashing look at the exponents only; the remaining
/// fields are caches derived from them and the chart.
#[derive(Clone, Debug)]
pub struct Monomial {
    exps: Box<[u8]>,
    jdeg: u32,
    bdeg: u32,
    degree: u32,
    /// Coordinates with odd exponent.
    odd_exps: u64,
    /// Bit `j` set iff Σ_{i>j} exps[i]·⟨deg i, deg j⟩ is odd.
    sign_mask: u64,
}

impl PartialEq for Monomial {
    fn eq(&self, other: &Self) -> bool {
        self.exps == other.exps
    }
}

impl Eq for Monomial {}

impl Hash for Monomial {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.exps.hash(state)
    }
}

impl Ord for Monomial {
    /// Lower total degree first, then earlier coordinates first.
    fn cmp(&self, other: &Self) -> Ordering {
        (self.jdeg + self.bdeg)
            .cmp(&(other.jdeg + other.bdeg))
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    /// Builds a monomial; returns `None` when an odd coordinate has exponent > 1.
    pub fn new(chart: &Chart, exps: &[u8]) -> Option<Monomial> {
        assert_eq!(exps.len(), chart.len(), "exponent vector does not match chart");
        let mut jdeg = 0u32;
        let mut bdeg = 0u32;
        let mut degree = 0u32;
        let mut odd_exps = 0u64;
        for (i, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if chart.is_odd(i) && e > 1 {
                return None;
            }
            if chart.is_base(i) {
                bdeg += e as u32;
            } else {
                jdeg += e as u32;
            }
            if e & 1 == 1 {
                odd_exps |= 1 << i;
                degree ^= chart.degree(i).bits();
            }
        }
        let mut sign_mask = 0u64;
        for j in 0..exps.len() {
            let above = if j + 1 >= 64 { 0 } else { !0u64 << (j + 1) };
            if (odd_exps & above & chart.pair_mask(j)).count_ones() & 1 == 1 {
                sign_mask |= 1 << j;
            }
        }
        Some(Monomial {
            exps: exps.into(),
            jdeg,
            bdeg,
            degree,
            odd_exps,
            sign_mask,
        })
    }

    pub fn one(chart: &Chart) -> Monomial {
        Monomial::new(chart, &vec![0; chart.len()]).unwrap()
    }

    pub fn variable(chart: &Chart, index: usize) -> Monomial {
        let mut exps = vec![0; chart.len()];
        exps[index] = 1;
        Monomial::new(chart, &exps).unwrap()
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exps
    }

    pub fn exponent(&self, index: usize) -> u8 {
        self.exps[index]
    }

    pub fn j_degree(&self) -> u32 {
        self.jdeg
    }

    pub fn base_degree(&self) -> u32 {
        self.bdeg
    }

    /// Total filtration order (base + J).
    pub fn order(&self) -> u32 {
        self.jdeg + self.bdeg
    }

    pub fn degree_bits(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.jdeg + self.bdeg == 0
    }

    /// Index of the single coordinate if this monomial is a bare coordinate.
    pub fn as_variable(&self) -> Option<usize> {
        if self.order() != 1 {
            return None;
        }
        self.exps.iter().position(|&e| e == 1)
    }

    /// Product `self · other` as (sign is negative, monomial), or `None` if it vanishes.
    pub(crate) fn mul(&self, chart: &Chart, other: &Monomial) -> Option<(bool, Monomial)> {
        let present_a = self.present();
        let present_b = other.present();
        if present_a & present_b & chart.odd_mask() != 0 {
            return None;
        }
        let negative = (self.sign_mask & other.odd_exps).count_ones() & 1 == 1;
        let exps: Vec<u8> = self
            .exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| a + b)
            .collect();
        Monomial::new(chart, &exps).map(|m| (negative, m))
    }

    pub(crate) fn present(&self) -> u64 {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0u64, |acc, (i, _)| acc | 1 << i)
    }

    /// Whether moving one factor of coordinate `index` to the front costs a sign.
    pub(crate) fn front_sign(&self, chart: &Chart, index: usize) -> bool {
        let below = (1u64 << index) - 1;
        (self.odd_exps & below & chart.pair_mask(index)).count_ones() & 1 == 1
    }
}

/// Region of monomials whose coefficients survive a bounded number of
/// order-losing operations on truncated data.
///
/// With weight `2·base + J`, a monomial lies in the window iff
/// `J ≤ K_J − j_loss` and `2·base + J ≤ 2·K_B + 1 − weight_loss`.
/// Centered degree-preserving substitutions and products never lower the
/// weight, while applying a degree-zero field lowers it by at most 2 and a
/// nonzero-degree field by at most 1 (and the J-degree by at most 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub weight_loss: u32,
    pub j_loss: u32,
}

impl Window {
    pub const EXACT: Window = Window {
        weight_loss: 0,
        j_loss: 0,
    };
    /// Residuals after pushing a degree-zero field.
    pub const DEGREE_ZERO_STEP: Window = Window {
        weight_loss: 2,
        j_loss: 0,
    };
    /// Residuals after pushing a nonzero-degree field.
    pub const NONZERO_STEP: Window = Window {
        weight_loss: 1,
        j_loss: 1,
    };
    /// Comparisons of brackets and pushforwards of possibly truncated fields.
    pub const CHECK: Window = Window {
        weight_loss: 4,
        j_loss: 2,
    };

    pub fn contains(&self, chart: &Chart, m: &Monomial) -> bool {
        let t = chart.truncation();
        let jdeg = m.j_degree() as i64;
        let weight = 2 * m.base_degree() as i64 + jdeg;
        jdeg + self.j_loss as i64 <= t.j_order as i64
            && weight + self.weight_loss as i64 <= 2 * t.base_order as i64 + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Arc<Chart> {
        let d = |e: &[u8]| DegreeVector::from_slice(e).unwrap();
        Chart::new(
            2,
            vec![
                Coordinate { name: "x".into(), degree: d(&[0, 0]) },
                Coordinate { name: "t1".into(), degree: d(&[0, 1]) },
                Coordinate { name: "t2".into(), degree: d(&[1, 0]) },
                Coordinate { name: "e".into(), degree: d(&[1, 1]) },
            ],
            Truncation { j_order: 3, base_order: 4 },
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_charts() {
        let c = chart();
        let mut coords = c.coordinates().to_vec();
        coords[1].name = "x".into();
        assert!(Chart::new(2, coords, Truncation::default()).is_err());
        let mut coords = c.coordinates().to_vec();
        coords[0].name = "1x".into();
        assert!(Chart::new(2, coords, Truncation::default()).is_err());
        assert!(matches!(
            Chart::new(3, c.coordinates().to_vec(), Truncation::default()),
            Err(Error::Dimension(3, 2))
        ));
    }

    #[test]
    fn monomial_degrees() {
        let c = chart();
        let m = Monomial::new(&c, &[2, 1, 0, 2]).unwrap();
        assert_eq!(m.base_degree(), 2);
        assert_eq!(m.j_degree(), 3);
        // t1 · e² has degree (0,1)
        assert_eq!(m.degree_bits(), 0b10);
        assert!(Monomial::new(&c, &[0, 2, 0, 0]).is_none());
    }

    #[test]
    fn window_shrinks_with_loss() {
        let c = chart();
        let top = Monomial::new(&c, &[4, 0, 0, 1]).unwrap();
        assert!(Window::EXACT.contains(&c, &top));
        assert!(!Window::DEGREE_ZERO_STEP.contains(&c, &top));
        let low = Monomial::new(&c, &[1, 1, 0, 0]).unwrap();
        assert!(Window::CHECK.contains(&c, &low));
    }
}
