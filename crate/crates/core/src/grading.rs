//! Degree vectors in (Z₂)ⁿ and the pairing that determines every Koszul sign.

use std::fmt;
use std::ops::Add;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported grading rank.
pub const MAX_RANK: usize = 32;

/// An element of (Z₂)ⁿ, stored as a bit mask (bit `i` is component `i`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DegreeVector {
    n: u8,
    bits: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl DegreeVector {
    pub fn zero(n: usize) -> Self {
        assert!((1..=MAX_RANK).contains(&n), "grading rank {n} out of range");
        DegreeVector { n: n as u8, bits: 0 }
    }

    pub fn from_bits(n: usize, bits: u32) -> Self {
        assert!((1..=MAX_RANK).contains(&n), "grading rank {n} out of range");
        let mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        DegreeVector {
            n: n as u8,
            bits: bits & mask,
        }
    }

    /// Builds a degree vector from 0/1 entries.
    pub fn from_slice(entries: &[u8]) -> Result<Self> {
        if entries.is_empty() || entries.len() > MAX_RANK {
            return Err(Error::Format(format!(
                "degree vector must have between 1 and {MAX_RANK} entries"
            )));
        }
        let mut bits = 0u32;
        for (i, &e) in entries.iter().enumerate() {
            match e {
                0 => {}
                1 => bits |= 1 << i,
                other => {
                    return Err(Error::Format(format!(
                        "degree vector entries must be 0 or 1, got {other}"
                    )))
                }
            }
        }
        Ok(DegreeVector {
            n: entries.len() as u8,
            bits,
        })
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn entries(&self) -> Vec<u8> {
        (0..self.len()).map(|i| ((self.bits >> i) & 1) as u8).collect()
    }

    /// ⟨a, b⟩ = Σ aᵢbᵢ mod 2.
    pub fn scalar_product(&self, other: &DegreeVector) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::Dimension(self.len(), other.len()));
        }
        Ok(pairing(self.bits, other.bits))
    }

    pub fn checked_add(&self, other: &DegreeVector) -> Result<DegreeVector> {
        if self.n != other.n {
            return Err(Error::Dimension(self.len(), other.len()));
        }
        Ok(DegreeVector {
            n: self.n,
            bits: self.bits ^ other.bits,
        })
    }

    pub fn parity(&self) -> Parity {
        if pairing(self.bits, self.bits) {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == Parity::Odd
    }
}

/// Pairing on raw masks; callers guarantee equal length.
#[inline]
pub(crate) fn pairing(a: u32, b: u32) -> bool {
    (a & b).count_ones() & 1 == 1
}

impl Add for DegreeVector {
    type Output = DegreeVector;

    /// Panics on length mismatch; use [`DegreeVector::checked_add`] for untrusted input.
    fn add(self, rhs: DegreeVector) -> DegreeVector {
        self.checked_add(&rhs).expect("degree vectors of different length")
    }
}

impl fmt::Debug for DegreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DegreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for DegreeVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DegreeVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<u8>::deserialize(deserializer)?;
        DegreeVector::from_slice(&entries).map_err(D::Error::custom)
    }
}
