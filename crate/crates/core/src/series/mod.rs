//! Truncated graded series: the chart-level model of the function ring.
//!
//! A [`GradedSeries`] is a finite sum of canonical monomials with exact
//! rational coefficients. Monomials beyond the chart's truncation box
//! (J-degree above `K_J` or base degree above `K_B`) are dropped; the
//! dropped set is an ideal, so products are exact in the quotient ring.

mod chart;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use chart::{
    Chart, Coordinate, Monomial, Truncation, Window, DEFAULT_BASE_ORDER, DEFAULT_J_ORDER,
    MAX_COORDINATES,
};
pub(crate) use chart::same_chart;

use crate::error::{Error, Result};
use crate::grading::DegreeVector;

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone)]
pub struct GradedSeries {
    chart: Arc<Chart>,
    terms: BTreeMap<Monomial, BigRational>,
}

/// Which truncation bounds an antiderivative crossed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TruncationLoss {
    pub j: bool,
    pub base: bool,
}

impl TruncationLoss {
    pub fn any(&self) -> bool {
        self.j || self.base
    }
}

#[derive(Clone, Debug)]
pub struct Antiderivative {
    pub series: GradedSeries,
    pub loss: TruncationLoss,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    /// Drop every monomial of positive J-degree.
    ModJ,
    /// Additionally evaluate the base coordinates at the origin.
    AtPoint,
}

impl PartialEq for GradedSeries {
    fn eq(&self, other: &Self) -> bool {
        same_chart(&self.chart, &other.chart) && self.terms == other.terms
    }
}

impl Eq for GradedSeries {}

impl GradedSeries {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        GradedSeries {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(chart: &Arc<Chart>, c: BigRational) -> Self {
        let mut s = Self::zero(chart);
        if !c.is_zero() {
            s.terms.insert(Monomial::one(chart), c);
        }
        s
    }

    pub fn one(chart: &Arc<Chart>) -> Self {
        Self::constant(chart, BigRational::one())
    }

    pub fn variable(chart: &Arc<Chart>, index: usize) -> Self {
        let mut s = Self::zero(chart);
        let m = Monomial::variable(chart, index);
        if chart.within_bounds(m.j_degree(), m.base_degree()) {
            s.terms.insert(m, BigRational::one());
        }
        s
    }

    pub fn variable_named(chart: &Arc<Chart>, name: &str) -> Result<Self> {
        Ok(Self::variable(chart, chart.index_of(name)?))
    }

    /// Single term `c · x^exps`; out-of-box or vanishing monomials give zero.
    pub fn monomial(chart: &Arc<Chart>, exps: &[u8], c: BigRational) -> Self {
        let mut s = Self::zero(chart);
        if let Some(m) = Monomial::new(chart, exps) {
            if !c.is_zero() && chart.within_bounds(m.j_degree(), m.base_degree()) {
                s.terms.insert(m, c);
            }
        }
        s
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coefficient_of(&self, exps: &[u8]) -> BigRational {
        match Monomial::new(&self.chart, exps) {
            Some(m) => self.coefficient(&m),
            None => BigRational::zero(),
        }
    }

    /// Constant term (value at the base point).
    pub fn constant_term(&self) -> BigRational {
        self.coefficient(&Monomial::one(&self.chart))
    }

    /// Coefficient of the bare coordinate `index`.
    pub fn linear_coefficient(&self, index: usize) -> BigRational {
        self.coefficient(&Monomial::variable(&self.chart, index))
    }

    fn check_chart(&self, other: &GradedSeries) -> Result<()> {
        if same_chart(&self.chart, &other.chart) {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    /// Degree shared by all monomials; `None` for zero or inhomogeneous series.
    pub fn degree(&self) -> Option<DegreeVector> {
        let mut it = self.terms.keys();
        let first = it.next()?.degree_bits();
        if it.all(|m| m.degree_bits() == first) {
            Some(DegreeVector::from_bits(self.chart.rank(), first))
        } else {
            None
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    /// True for zero or for a series homogeneous of degree `d`.
    pub fn is_homogeneous_of(&self, d: DegreeVector) -> bool {
        self.terms.keys().all(|m| m.degree_bits() == d.bits())
    }

    /// True iff every monomial has positive J-degree.
    pub fn in_j(&self) -> bool {
        self.terms.keys().all(|m| m.j_degree() > 0)
    }

    pub fn min_j_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.j_degree()).min()
    }

    pub fn max_order(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.order()).max()
    }

    pub fn min_order(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.order()).min()
    }

    fn insert_add(terms: &mut BTreeMap<Monomial, BigRational>, m: Monomial, c: BigRational) {
        use std::collections::btree_map::Entry;
        match terms.entry(m) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn try_add(&self, other: &GradedSeries) -> Result<GradedSeries> {
        self.check_chart(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::insert_add(&mut terms, m.clone(), c.clone());
        }
        Ok(GradedSeries {
            chart: self.chart.clone(),
            terms,
        })
    }

    pub fn try_sub(&self, other: &GradedSeries) -> Result<GradedSeries> {
        self.check_chart(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::insert_add(&mut terms, m.clone(), -c.clone());
        }
        Ok(GradedSeries {
            chart: self.chart.clone(),
            terms,
        })
    }

    pub fn scale(&self, c: &BigRational) -> GradedSeries {
        if c.is_zero() {
            return Self::zero(&self.chart);
        }
        GradedSeries {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Koszul-signed product, truncated to the chart's box.
    pub fn multiply(&self, other: &GradedSeries) -> Result<GradedSeries> {
        self.check_chart(other)?;
        Ok(self.mul_tracked(other, &mut false))
    }

    /// Product that records whether any nonzero term fell outside the box.
    pub(crate) fn mul_tracked(&self, other: &GradedSeries, dropped: &mut bool) -> GradedSeries {
        let chart = &self.chart;
        let t = chart.truncation();
        let mut acc: HashMap<Monomial, BigRational> = HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma.j_degree() + mb.j_degree() > t.j_order
                    || ma.base_degree() + mb.base_degree() > t.base_order
                {
                    *dropped = true;
                    continue;
                }
                if let Some((negative, m)) = ma.mul(chart, mb) {
                    let c = ca * cb;
                    let c = if negative { -c } else { c };
                    *acc.entry(m).or_insert_with(BigRational::zero) += c;
                }
            }
        }
        GradedSeries {
            chart: chart.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> GradedSeries {
        let mut out = Self::one(&self.chart);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Graded left derivative ∂/∂u.
    pub fn derive(&self, index: usize) -> GradedSeries {
        let chart = &self.chart;
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent(index);
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[index] -= 1;
            let dm = Monomial::new(chart, &exps).expect("lowering an exponent keeps validity");
            let mut coeff = c * BigRational::from_integer(BigInt::from(e));
            if m.front_sign(chart, index) {
                coeff = -coeff;
            }
            Self::insert_add(&mut terms, dm, coeff);
        }
        GradedSeries {
            chart: chart.clone(),
            terms,
        }
    }

    pub fn derive_by_name(&self, name: &str) -> Result<GradedSeries> {
        Ok(self.derive(self.chart.index_of(name)?))
    }

    /// Antiderivative along an even coordinate, vanishing where that coordinate is zero.
    pub fn antiderivative(&self, index: usize) -> Result<Antiderivative> {
        let chart = &self.chart;
        if chart.is_odd(index) {
            return Err(Error::OddIntegration(chart.name(index).to_string()));
        }
        let mut loss = TruncationLoss::default();
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut exps = m.exponents().to_vec();
            let e = exps[index] as u32 + 1;
            exps[index] = e as u8;
            let im = Monomial::new(chart, &exps).expect("even coordinate");
            if im.j_degree() > chart.truncation().j_order {
                loss.j = true;
                continue;
            }
            if im.base_degree() > chart.truncation().base_order {
                loss.base = true;
                continue;
            }
            // The derivative of `im` brings down `e` and the same front sign.
            let mut coeff = c / BigRational::from_integer(BigInt::from(e));
            if m.front_sign(chart, index) {
                coeff = -coeff;
            }
            Self::insert_add(&mut terms, im, coeff);
        }
        Ok(Antiderivative {
            series: GradedSeries {
                chart: chart.clone(),
                terms,
            },
            loss,
        })
    }

    pub fn antiderivative_by_name(&self, name: &str) -> Result<Antiderivative> {
        self.antiderivative(self.chart.index_of(name)?)
    }

    pub fn reduce(&self, mode: Reduction) -> GradedSeries {
        let keep = |m: &Monomial| match mode {
            Reduction::ModJ => m.j_degree() == 0,
            Reduction::AtPoint => m.is_one(),
        };
        self.filter(keep)
    }

    /// Value at the base point.
    pub fn at_point(&self) -> BigRational {
        self.constant_term()
    }

    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> GradedSeries {
        GradedSeries {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Part of the series inside `window`.
    pub fn restrict(&self, window: Window) -> GradedSeries {
        let chart = self.chart.clone();
        self.filter(|m| window.contains(&chart, m))
    }

    /// Terms of exactly the given J-degree.
    pub fn j_layer(&self, k: u32) -> GradedSeries {
        self.filter(|m| m.j_degree() == k)
    }

    /// Sets coordinate `index` to zero.
    pub fn set_zero(&self, index: usize) -> GradedSeries {
        self.filter(|m| m.exponent(index) == 0)
    }

    pub fn depends_on(&self, index: usize) -> bool {
        self.terms.keys().any(|m| m.exponent(index) > 0)
    }

    pub fn agrees_within(&self, other: &GradedSeries, window: Window) -> bool {
        match self.try_sub(other) {
            Ok(d) => d.restrict(window).is_zero(),
            Err(_) => false,
        }
    }

    /// Re-expresses the series on `target`, a chart with the same coordinates
    /// and a possibly different truncation.
    pub fn retruncate(&self, target: &Arc<Chart>) -> Result<GradedSeries> {
        if target.coordinates() != self.chart.coordinates() {
            return Err(Error::ChartMismatch);
        }
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if target.within_bounds(m.j_degree(), m.base_degree()) {
                let nm = Monomial::new(target, m.exponents()).unwrap();
                terms.insert(nm, c.clone());
            }
        }
        Ok(GradedSeries {
            chart: target.clone(),
            terms,
        })
    }

    /// Formal composition `f(images)`: coordinate `i` is replaced by `images[i]`.
    ///
    /// The images must live on the same chart and be homogeneous of the
    /// replaced coordinate's degree; callers validate this.
    pub(crate) fn compose(&self, images: &[GradedSeries]) -> GradedSeries {
        assert_eq!(images.len(), self.chart.len());
        if self.is_zero() {
            return self.clone();
        }
        let out_chart = images[0].chart.clone();
        let mut entries: Vec<(&[u8], &BigRational)> = self
            .terms
            .iter()
            .map(|(m, c)| (m.exponents(), c))
            .collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        let mut powers = PowerCache::new(images);
        compose_rec(&entries, 0, &mut powers, &out_chart)
    }
}

struct PowerCache<'a> {
    images: &'a [GradedSeries],
    powers: Vec<Vec<GradedSeries>>,
}

impl<'a> PowerCache<'a> {
    fn new(images: &'a [GradedSeries]) -> Self {
        PowerCache {
            images,
            powers: vec![Vec::new(); images.len()],
        }
    }

    fn get(&mut self, var: usize, k: u8) -> &GradedSeries {
        let cache = &mut self.powers[var];
        if cache.is_empty() {
            cache.push(GradedSeries::one(self.images[var].chart()));
        }
        while cache.len() <= k as usize {
            let next = cache.last().unwrap() * &self.images[var];
            cache.push(next);
        }
        &cache[k as usize]
    }
}

fn compose_rec(
    entries: &[(&[u8], &BigRational)],
    var: usize,
    powers: &mut PowerCache<'_>,
    chart: &Arc<Chart>,
) -> GradedSeries {
    let n = powers.images.len();
    if var == n {
        let c: BigRational = entries.iter().map(|(_, c)| (*c).clone()).sum();
        return GradedSeries::constant(chart, c);
    }
    let mut out = GradedSeries::zero(chart);
    let mut start = 0;
    while start < entries.len() {
        let e = entries[start].0[var];
        let mut end = start;
        while end < entries.len() && entries[end].0[var] == e {
            end += 1;
        }
        let rest = compose_rec(&entries[start..end], var + 1, powers, chart);
        if !rest.is_zero() {
            let term = if e == 0 {
                rest
            } else {
                powers.get(var, e) * &rest
            };
            out = &out + &term;
        }
        start = end;
    }
    out
}

impl fmt::Debug for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedSeries({self})")
    }
}

impl fmt::Display for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            let monomial = format_monomial(&self.chart, m);
            let body = match (monomial.is_empty(), abs.is_one()) {
                (true, _) => format_rational(&abs),
                (false, true) if !(i == 0 && negative) => monomial,
                // A leading "-x^2" would parse as (-x)^2, so keep the coefficient.
                (false, _) => format!("{}*{}", format_rational(&abs), monomial),
            };
            match (i, negative) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

pub(crate) fn format_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Factors in chart order joined by `*`; empty for the unit monomial.
pub fn format_monomial(chart: &Chart, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(chart.name(i).to_string()),
            _ => parts.push(format!("{}^{}", chart.name(i), e)),
        }
    }
    parts.join("*")
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&GradedSeries> for &GradedSeries {
            type Output = GradedSeries;

            /// Panics if the operands live on different charts.
            fn $method(self, rhs: &GradedSeries) -> GradedSeries {
                self.$checked(rhs).expect("operands live on different charts")
            }
        }

        impl $trait<GradedSeries> for GradedSeries {
            type Output = GradedSeries;

            fn $method(self, rhs: GradedSeries) -> GradedSeries {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, multiply);

impl Neg for &GradedSeries {
    type Output = GradedSeries;

    fn neg(self) -> GradedSeries {
        GradedSeries {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for GradedSeries {
    type Output = GradedSeries;

    fn neg(self) -> GradedSeries {
        -&self
    }
}

#[cfg(test)]
mod tests;
