//! Projective equivalence between positive setups with `n = k+m+1`, and the
//! `k = 1` cyclic-polytope check.
//!
//! For kernel generators `a` of `Z` and `b` of `Z'` with matching signs,
//! `D = diag(a_i / b_i)` is positive and `Z·D` has kernel `b`, hence the same
//! row span as `Z'`. The left factor `C` with `Z' = C·Z·D` is solved exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amplituhedron::{alternates_in_sign, hat_map, AmplituhedronSetup, SetupError};
use crate::linalg::{
    all_maximal_minors, det, rank, solve_for_left_factor, LinalgError, Rational, RationalMatrix,
};
use crate::tnn::{check_tnn, TnnError, TnnPoint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivalenceError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Setup(#[from] SetupError),
    #[error(transparent)]
    Tnn(#[from] TnnError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("affine chart x1 = 1 unavailable: column {column} has first coordinate {value}")]
    Chart { column: usize, value: Rational },
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),
}

impl EquivalenceError {
    pub fn is_internal_consistency(&self) -> bool {
        matches!(self, EquivalenceError::InternalConsistency(_))
    }
}

/// Witness that `Z' = C·Z·D` with `D` positive diagonal and `det C > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceCertificate {
    #[serde(rename = "Z")]
    pub z: RationalMatrix,
    #[serde(rename = "Zprime")]
    pub z_prime: RationalMatrix,
    #[serde(rename = "D_diag")]
    pub d_diag: Vec<Rational>,
    #[serde(rename = "C")]
    pub c: RationalMatrix,
    #[serde(rename = "detC")]
    pub det_c: Rational,
}

impl EquivalenceCertificate {
    pub fn d(&self) -> RationalMatrix {
        RationalMatrix::diagonal(&self.d_diag)
    }

    /// `Z·D`, scaling columns.
    pub fn z_times_d(&self) -> RationalMatrix {
        scale_columns(&self.z, &self.d_diag)
    }

    /// Re-derives every invariant from the stored matrices.
    pub fn is_valid(&self) -> bool {
        let exact = self
            .c
            .mul(&self.z_times_d())
            .is_ok_and(|czd| czd == self.z_prime);
        let det_ok = det(&self.c).is_ok_and(|d| d == self.det_c) && self.det_c.is_positive();
        exact && det_ok && self.d_diag.iter().all(Rational::is_positive)
    }

    /// Chains `A → B` (self) with `B → C` (next) into `A → C`.
    pub fn compose(&self, next: &EquivalenceCertificate) -> Result<EquivalenceCertificate, EquivalenceError> {
        if self.z_prime != next.z {
            return Err(EquivalenceError::Precondition(
                "target of the first certificate is not the source of the second".into(),
            ));
        }
        let c = next.c.mul(&self.c)?;
        let d_diag = self.d_diag.iter().zip(&next.d_diag).map(|(x, y)| x * y).collect();
        Ok(EquivalenceCertificate {
            z: self.z.clone(),
            z_prime: next.z_prime.clone(),
            d_diag,
            det_c: &self.det_c * &next.det_c,
            c,
        })
    }
}

pub(crate) fn scale_columns(m: &RationalMatrix, diag: &[Rational]) -> RationalMatrix {
    let mut out = m.clone();
    for i in 0..m.rows() {
        for (j, d) in diag.iter().enumerate() {
            out[(i, j)] = &out[(i, j)] * d;
        }
    }
    out
}

fn positive_kernel<'a>(setup: &'a AmplituhedronSetup, name: &str) -> Result<&'a [Rational], EquivalenceError> {
    if !setup.is_corank_one() {
        return Err(EquivalenceError::Precondition(format!(
            "{name}: need n = k+m+1, got n = {}",
            setup.n()
        )));
    }
    if !setup.all_minors_positive() {
        return Err(EquivalenceError::Precondition(format!("{name}: Z has a nonpositive maximal minor")));
    }
    let a = setup.kernel().expect("corank one setups carry a kernel");
    if !alternates_in_sign(a) {
        return Err(EquivalenceError::Precondition(format!(
            "{name}: kernel generator has a zero entry or does not alternate"
        )));
    }
    Ok(a)
}

/// Builds `(C, D)` with `Z_B = C · Z_A · D`.
pub fn construct_equivalence(
    source: &AmplituhedronSetup,
    target: &AmplituhedronSetup,
) -> Result<EquivalenceCertificate, EquivalenceError> {
    if (source.k(), source.m()) != (target.k(), target.m()) {
        return Err(EquivalenceError::Precondition(format!(
            "(k, m) differ: ({}, {}) vs ({}, {})",
            source.k(),
            source.m(),
            target.k(),
            target.m()
        )));
    }
    let a = positive_kernel(source, "source")?;
    let b = positive_kernel(target, "target")?;
    // both generators are canonicalized with first entry 1, so signs already agree
    let d_diag: Vec<Rational> = a.iter().zip(b).map(|(ai, bi)| ai / bi).collect();
    if let Some(i) = d_diag.iter().position(|d| !d.is_positive()) {
        return Err(EquivalenceError::InternalConsistency(format!(
            "a_{0} / b_{0} = {1} is not positive",
            i + 1,
            d_diag[i]
        )));
    }
    let zd = scale_columns(source.z(), &d_diag);
    let c = solve_for_left_factor(target.z(), &zd).map_err(|e| match e {
        LinalgError::Inconsistent => {
            EquivalenceError::InternalConsistency("Z·D and Z' have different row spans".into())
        }
        other => other.into(),
    })?;
    let det_c = det(&c)?;
    if !det_c.is_positive() {
        return Err(EquivalenceError::InternalConsistency(format!("det(C) = {det_c} is not positive")));
    }
    Ok(EquivalenceCertificate {
        z: source.z().clone(),
        z_prime: target.z().clone(),
        d_diag,
        c,
        det_c,
    })
}

/// An invertible `(k+m)×(k+m)` matrix acting on `G_k(ℝ^{k+m})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RationalMatrix", into = "RationalMatrix")]
pub struct ProjectiveMap(RationalMatrix);

impl ProjectiveMap {
    pub fn new(m: RationalMatrix) -> Result<Self, EquivalenceError> {
        if !m.is_square() || rank(&m) != m.rows() {
            return Err(EquivalenceError::Precondition("projective map must be invertible".into()));
        }
        Ok(ProjectiveMap(m))
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.0
    }
}

impl TryFrom<RationalMatrix> for ProjectiveMap {
    type Error = EquivalenceError;
    fn try_from(m: RationalMatrix) -> Result<Self, EquivalenceError> {
        ProjectiveMap::new(m)
    }
}

impl From<ProjectiveMap> for RationalMatrix {
    fn from(p: ProjectiveMap) -> Self {
        p.0
    }
}

/// `P ↦ P·Mᵀ`: the row span of `P` moved by `M`.
pub fn apply_projective_map(map: &ProjectiveMap, p: &RationalMatrix) -> Result<RationalMatrix, EquivalenceError> {
    if p.cols() != map.0.rows() {
        return Err(EquivalenceError::Linalg(LinalgError::Shape(format!(
            "point has {} columns, map acts on dimension {}",
            p.cols(),
            map.0.rows()
        ))));
    }
    if rank(p) != p.rows() {
        return Err(EquivalenceError::Precondition("point must have full row rank".into()));
    }
    Ok(p.mul_transpose(&map.0)?)
}

/// Checks `(V·D)·Zᵀ·Cᵀ = V·Z'ᵀ` and that `V·D` stays totally nonnegative.
pub fn equivalence_transport_check(
    cert: &EquivalenceCertificate,
    v: &TnnPoint,
) -> Result<bool, EquivalenceError> {
    if v.n() != cert.d_diag.len() {
        return Err(EquivalenceError::Linalg(LinalgError::Shape(format!(
            "point has {} columns, certificate has n = {}",
            v.n(),
            cert.d_diag.len()
        ))));
    }
    let vd = scale_columns(v.matrix(), &cert.d_diag);
    let lhs = vd.mul_transpose(&cert.z)?.mul_transpose(&cert.c)?;
    let rhs = v.matrix().mul_transpose(&cert.z_prime)?;
    Ok(lhs == rhs && check_tnn(&vd)?.is_tnn)
}

/// Images of the coordinate rays for `k = 1`, in the chart `x₁ = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CyclicPolytopeReport {
    /// Each vertex as `(1, y_1, ..., y_m)`.
    pub vertices: Vec<Vec<Rational>>,
    /// Every `(m+1)`-subset of charted vertices, in column order, has positive orientation.
    pub convex_position: bool,
    pub orientation_checks: usize,
}

pub fn cyclic_polytope_vertices(setup: &AmplituhedronSetup) -> Result<CyclicPolytopeReport, EquivalenceError> {
    if setup.k() != 1 {
        return Err(EquivalenceError::Unsupported(format!("k = {}, need k = 1", setup.k())));
    }
    if !setup.all_minors_positive() {
        return Err(EquivalenceError::Precondition("Z has a nonpositive maximal minor".into()));
    }
    let z = setup.z();
    let mut charted = z.clone();
    for j in 0..z.cols() {
        let lead = z[(0, j)].clone();
        if !lead.is_positive() {
            return Err(EquivalenceError::Chart { column: j + 1, value: lead });
        }
        for i in 0..z.rows() {
            charted[(i, j)] = &z[(i, j)] / &lead;
        }
    }
    let orientations = all_maximal_minors(&charted)?;
    Ok(CyclicPolytopeReport {
        vertices: (0..charted.cols()).map(|j| charted.column(j)).collect(),
        convex_position: orientations.values().all(Rational::is_positive),
        orientation_checks: orientations.len(),
    })
}

/// Every `V` maps to the same point when `m = 0`: the image is `k×k` of full rank.
pub fn is_single_point_image(setup: &AmplituhedronSetup, v: &TnnPoint) -> Result<bool, EquivalenceError> {
    let mapped = hat_map(setup, v.matrix())?;
    Ok(setup.m() == 0 && mapped.image.is_square() && mapped.image_rank == setup.k())
}
