//! Points of the totally nonnegative matrix space, positroid cell
//! specifications given by nonbases, and closed-cell membership.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    all_maximal_minors, binomial, maximal_minor, rank, IndexSubset, LinalgError, MinorTable,
    Rational, RationalMatrix,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TnnError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("matrix is not totally nonnegative: {0}")]
    NotTnn(String),
    #[error("invalid cell specification: {0}")]
    InvalidCell(String),
    #[error("cell is for {cell_k}x{cell_n} matrices, got {rows}x{cols}")]
    CellShape { cell_k: usize, cell_n: usize, rows: usize, cols: usize },
    #[error("invalid sampling nodes: {0}")]
    InvalidNodes(String),
    #[error("zeroing columns {cols} drops rank to {rank} < {k}")]
    Degenerate { cols: IndexSubset, rank: usize, k: usize },
}

/// Outcome of a total-nonnegativity test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TnnReport {
    pub is_tnn: bool,
    /// Colexicographically least negative maximal minor.
    pub first_violation: Option<(IndexSubset, Rational)>,
    pub rank_ok: bool,
}

fn require_wide(m: &RationalMatrix) -> Result<(), LinalgError> {
    if m.rows() > m.cols() {
        return Err(LinalgError::Shape(format!(
            "{} rows exceed {} columns",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

fn report_from_minors(m: &RationalMatrix, minors: &MinorTable) -> TnnReport {
    let first_violation = minors
        .iter()
        .find(|(_, v)| v.is_negative())
        .map(|(s, v)| (s.clone(), v.clone()));
    // some nonzero maximal minor <=> full row rank
    let rank_ok = m.rows() == 0 || minors.values().any(|v| !v.is_zero());
    TnnReport { is_tnn: rank_ok && first_violation.is_none(), first_violation, rank_ok }
}

/// Rank k and every maximal minor nonnegative.
pub fn check_tnn(m: &RationalMatrix) -> Result<TnnReport, TnnError> {
    require_wide(m)?;
    let minors = all_maximal_minors(m)?;
    Ok(report_from_minors(m, &minors))
}

/// Every maximal minor strictly positive.
pub fn check_totally_positive(m: &RationalMatrix) -> Result<bool, TnnError> {
    require_wide(m)?;
    Ok(all_maximal_minors(m)?.values().all(Rational::is_positive))
}

/// A k×n matrix of rank k whose maximal minors are all nonnegative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TnnPoint {
    matrix: RationalMatrix,
    minors: MinorTable,
}

impl TnnPoint {
    pub fn new(matrix: RationalMatrix) -> Result<Self, TnnError> {
        require_wide(&matrix)?;
        let minors = all_maximal_minors(&matrix)?;
        let report = report_from_minors(&matrix, &minors);
        if !report.is_tnn {
            let why = match report.first_violation {
                Some((s, v)) => format!("minor {s} = {v}"),
                None => "rank below row count".to_string(),
            };
            return Err(TnnError::NotTnn(why));
        }
        Ok(TnnPoint { matrix, minors })
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }

    pub fn minors(&self) -> &MinorTable {
        &self.minors
    }

    pub fn k(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    pub fn into_matrix(self) -> RationalMatrix {
        self.matrix
    }
}

/// A closed positroid cell, given by the k-subsets declared to be nonbases.
///
/// No check is made that the nonbases come from a realizable positroid; the
/// cell acts as a set of vanishing-minor constraints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CellJson", into = "CellJson")]
pub struct PositroidCellSpec {
    k: usize,
    n: usize,
    nonbases: BTreeSet<IndexSubset>,
}

#[derive(Serialize, Deserialize)]
struct CellJson {
    k: usize,
    n: usize,
    nonbases: Vec<IndexSubset>,
}

impl TryFrom<CellJson> for PositroidCellSpec {
    type Error = TnnError;
    fn try_from(raw: CellJson) -> Result<Self, TnnError> {
        PositroidCellSpec::new(raw.k, raw.n, raw.nonbases)
    }
}

impl From<PositroidCellSpec> for CellJson {
    fn from(c: PositroidCellSpec) -> Self {
        CellJson { k: c.k, n: c.n, nonbases: c.nonbases.into_iter().collect() }
    }
}

impl PositroidCellSpec {
    pub fn new(
        k: usize,
        n: usize,
        nonbases: impl IntoIterator<Item = IndexSubset>,
    ) -> Result<Self, TnnError> {
        if k > n {
            return Err(TnnError::InvalidCell(format!("k = {k} exceeds n = {n}")));
        }
        let nonbases: BTreeSet<IndexSubset> = nonbases.into_iter().collect();
        for s in &nonbases {
            if s.len() != k {
                return Err(TnnError::InvalidCell(format!("nonbasis {s} does not have size {k}")));
            }
            s.check_bound(n)?;
        }
        if nonbases.len() >= binomial(n, k) {
            return Err(TnnError::InvalidCell("every k-subset declared a nonbasis".into()));
        }
        Ok(PositroidCellSpec { k, n, nonbases })
    }

    /// The cell with no nonbases, i.e. the whole space.
    pub fn top(k: usize, n: usize) -> Self {
        PositroidCellSpec { k, n, nonbases: BTreeSet::new() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nonbases(&self) -> &BTreeSet<IndexSubset> {
        &self.nonbases
    }

    pub fn is_top(&self) -> bool {
        self.nonbases.is_empty()
    }

    fn check_shape(&self, m: &RationalMatrix) -> Result<(), TnnError> {
        if m.shape() != (self.k, self.n) {
            return Err(TnnError::CellShape {
                cell_k: self.k,
                cell_n: self.n,
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        Ok(())
    }
}

/// The nonbases of a point: the k-subsets with vanishing minor.
pub fn matroid_of(point: &TnnPoint) -> PositroidCellSpec {
    let nonbases = point
        .minors
        .iter()
        .filter(|(_, v)| v.is_zero())
        .map(|(s, _)| s.clone())
        .collect();
    PositroidCellSpec { k: point.k(), n: point.n(), nonbases }
}

/// TNN and every nonbasis minor zero.
pub fn in_closed_cell(m: &RationalMatrix, cell: &PositroidCellSpec) -> Result<bool, TnnError> {
    cell.check_shape(m)?;
    if !check_tnn(m)?.is_tnn {
        return Ok(false);
    }
    for s in &cell.nonbases {
        if !maximal_minor(m, s)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Generalized Vandermonde `(i, j) ↦ nodes[j]^(i-1)`; totally positive for
/// strictly increasing positive nodes.
pub fn sample_top_cell(k: usize, nodes: &[Rational]) -> Result<TnnPoint, TnnError> {
    let n = nodes.len();
    if k > n {
        return Err(TnnError::InvalidNodes(format!("k = {k} exceeds {n} nodes")));
    }
    if nodes.iter().any(|t| !t.is_positive()) {
        return Err(TnnError::InvalidNodes("nodes must be positive".into()));
    }
    if nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TnnError::InvalidNodes("nodes must be strictly increasing".into()));
    }
    TnnPoint::new(vandermonde(k, nodes))
}

/// `(i, j) ↦ nodes[j]^i` for `i < rows`, without validation.
pub fn vandermonde(rows: usize, nodes: &[Rational]) -> RationalMatrix {
    let entries = (0..rows)
        .flat_map(|i| nodes.iter().map(move |t| t.pow(i as u32)))
        .collect();
    RationalMatrix::from_flat(rows, nodes.len(), entries).expect("shape by construction")
}

/// Copy of the point with the listed (1-based) columns set to zero.
pub fn zero_columns(point: &TnnPoint, cols: &IndexSubset) -> Result<RationalMatrix, TnnError> {
    cols.check_bound(point.n())?;
    let mut m = point.matrix.clone();
    for j in cols.zero_based() {
        for i in 0..m.rows() {
            m[(i, j)] = Rational::zero();
        }
    }
    let r = rank(&m);
    if r < point.k() {
        return Err(TnnError::Degenerate { cols: cols.clone(), rank: r, k: point.k() });
    }
    Ok(m)
}
