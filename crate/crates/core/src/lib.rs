//! Exact computations on formal charts of Z₂ⁿ-graded supermanifolds:
//! truncated graded power series, vector fields, coordinate changes, and
//! adapted coordinates for involutive distributions.

pub mod distribution;
pub mod error;
pub mod fields;
pub mod frobenius;
pub mod grading;
pub mod io;
pub mod linalg;
pub mod series;

pub use distribution::{
    is_involutive, membership, normalize_generators, rank_of, Distribution, Involutivity, Membership, Rank,
};
pub use error::{Error, Result};
pub use fields::{substitute, CoordinateChange, VectorField};
pub use frobenius::{adapted_coordinates, verify_adapted, FrobeniusCertificate};
pub use grading::{DegreeVector, Parity};
pub use linalg::{complete_basis, GradedMatrix, TangentVector};
pub use series::{Chart, Coordinate, GradedSeries, Monomial, Truncation, Window};
