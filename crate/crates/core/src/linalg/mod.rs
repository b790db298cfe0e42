//! Exact rational linear algebra: scalars, dense matrices, determinants,
//! rank, kernels and maximal-minor enumeration.

mod det;
mod echelon;
mod matrix;
mod rational;
mod subset;

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

pub use det::{
    det, det_with, registry, Bareiss, Cofactor, DeterminantAlgorithm, DeterminantRegistry,
    RationalGauss,
};
pub use echelon::{canonicalize_leading_one, inverse, kernel_basis, rank, solve_for_left_factor};
pub use matrix::RationalMatrix;
pub use rational::Rational;
pub use subset::{binomial, k_subsets, ColexSubsets, IndexSubset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("index {index} out of range 1..={bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("invalid index subset: {0}")]
    Subset(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is singular")]
    Singular,
    #[error("target has rank {rank}, needs full row rank {needed}")]
    DegenerateTarget { rank: usize, needed: usize },
    #[error("no exact left factor exists")]
    Inconsistent,
    #[error("unknown determinant algorithm {0:?}")]
    UnknownAlgorithm(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Maximal minors keyed by column subset; iterates colexicographically.
pub type MinorTable = BTreeMap<IndexSubset, Rational>;

/// Subset counts above this are evaluated on the rayon pool.
const PARALLEL_MINOR_THRESHOLD: usize = 64;

/// Determinant of the submatrix on 1-based `rows` × `cols`.
pub fn minor(m: &RationalMatrix, rows: &IndexSubset, cols: &IndexSubset) -> Result<Rational, LinalgError> {
    if rows.len() != cols.len() {
        return Err(LinalgError::Subset(format!(
            "row subset {rows} and column subset {cols} differ in size"
        )));
    }
    det(&m.select(rows, cols)?)
}

/// Maximal minor on the column subset `cols`, using every row.
pub fn maximal_minor(m: &RationalMatrix, cols: &IndexSubset) -> Result<Rational, LinalgError> {
    minor(m, &IndexSubset::full(m.rows()), cols)
}

/// Every k×k minor of a k×n matrix, one per k-subset of columns.
pub fn all_maximal_minors(m: &RationalMatrix) -> Result<MinorTable, LinalgError> {
    let (k, n) = m.shape();
    if k > n {
        return Err(LinalgError::Shape(format!("{k} rows exceed {n} columns")));
    }
    let subsets: Vec<IndexSubset> = k_subsets(n, k).collect();
    let rows = IndexSubset::full(k);
    let eval = |s: &IndexSubset| {
        let sub = m.select(&rows, s).expect("subset within bounds");
        (s.clone(), Bareiss.determinant(&sub))
    };
    let entries: Vec<(IndexSubset, Rational)> = if subsets.len() > PARALLEL_MINOR_THRESHOLD {
        subsets.par_iter().map(eval).collect()
    } else {
        subsets.iter().map(eval).collect()
    };
    Ok(entries.into_iter().collect())
}

pub fn is_invertible(m: &RationalMatrix) -> bool {
    m.is_square() && rank(m) == m.rows()
}
