//! Fibers of `V ↦ V·Zᵀ` over closed positroid cells when `n = k+m+1`.
//!
//! Two same-fiber points differ by `xᵀ·a` with `a` the kernel generator, so
//! every maximal minor along the segment `U + λ·xᵀ·a` is affine in `λ`. A
//! [`FiberConvexityCertificate`] records those affine coefficients; nonnegative
//! endpoints then certify the whole segment. [`section_witness`] realizes the
//! inverse of `U ↦ span(U)` on a fiber.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amplituhedron::{AmplituhedronSetup, SetupError};
use crate::linalg::{
    det, inverse, k_subsets, kernel_basis, rank, solve_for_left_factor, IndexSubset, LinalgError,
    Rational, RationalMatrix,
};
use crate::sampling::small_vector;
use crate::tnn::{check_tnn, in_closed_cell, PositroidCellSpec, TnnError, TnnPoint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiberError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Tnn(#[from] TnnError),
    #[error(transparent)]
    Setup(#[from] SetupError),
    #[error("fiber operations need n = k+m+1, got k={k}, m={m}, n={n}")]
    UnsupportedCorank { k: usize, m: usize, n: usize },
    #[error("points are not in the same fiber: {0}")]
    FiberMismatch(String),
    #[error("{0} is not in the closed cell")]
    NotInCell(&'static str),
    #[error("representative does not lie over the target: {0}")]
    NotInFiber(String),
    #[error("rank condition failed: {0}")]
    Rank(String),
    /// A computed quantity contradicts a proved identity.
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),
}

impl FiberError {
    pub fn is_internal_consistency(&self) -> bool {
        matches!(self, FiberError::InternalConsistency(_))
    }
}

fn require_corank_one(setup: &AmplituhedronSetup) -> Result<&[Rational], FiberError> {
    match setup.kernel() {
        Some(a) if setup.is_corank_one() => Ok(a),
        _ => Err(FiberError::UnsupportedCorank { k: setup.k(), m: setup.m(), n: setup.n() }),
    }
}

fn check_point_shape(setup: &AmplituhedronSetup, m: &RationalMatrix, name: &str) -> Result<(), FiberError> {
    if m.shape() != (setup.k(), setup.n()) {
        return Err(FiberError::Linalg(LinalgError::Shape(format!(
            "{name} is {}x{}, expected {}x{}",
            m.rows(),
            m.cols(),
            setup.k(),
            setup.n()
        ))));
    }
    Ok(())
}

/// `U + λ·xᵀ·a`.
pub fn line_point(u: &RationalMatrix, x: &[Rational], a: &[Rational], lambda: &Rational) -> RationalMatrix {
    let mut out = u.clone();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        let s = xi * lambda;
        for (j, aj) in a.iter().enumerate() {
            out[(i, j)] += &(&s * aj);
        }
    }
    out
}

/// The unique `x` with `V - U = xᵀ·a`.
pub fn fiber_displacement(
    setup: &AmplituhedronSetup,
    u: &RationalMatrix,
    v: &RationalMatrix,
) -> Result<Vec<Rational>, FiberError> {
    let a = require_corank_one(setup)?;
    check_point_shape(setup, u, "U")?;
    check_point_shape(setup, v, "V")?;
    if u.mul_transpose(setup.z())? != v.mul_transpose(setup.z())? {
        return Err(FiberError::FiberMismatch("U·Zᵀ ≠ V·Zᵀ".into()));
    }
    let diff = v.sub(u)?;
    let pivot = a.iter().position(|x| !x.is_zero()).expect("kernel generator is nonzero");
    let x: Vec<Rational> = (0..setup.k()).map(|i| &diff[(i, pivot)] / &a[pivot]).collect();
    if RationalMatrix::outer(&x, a) != diff {
        return Err(FiberError::InternalConsistency(
            "rows of V - U lie in ker Z but are not multiples of its generator".into(),
        ));
    }
    Ok(x)
}

fn segment_minor(u_s: &RationalMatrix, x: &[Rational], a_s: &[Rational], lambda: &Rational) -> Rational {
    det(&line_point(u_s, x, a_s, lambda)).expect("square by construction")
}

fn columns(cols: &IndexSubset, row: &[Rational]) -> Vec<Rational> {
    cols.zero_based().map(|j| row[j].clone()).collect()
}

/// `(alpha, beta)` with `minor_S(U + λ·xᵀ·a) = alpha + beta·λ`.
///
/// Fitted at `λ = 0, 1` and confirmed at `λ = 2`; a mismatch means the minor is
/// not affine in `λ`, which contradicts the rank-one structure of the update.
pub fn minor_affine_coeffs(
    u: &RationalMatrix,
    x: &[Rational],
    a: &[Rational],
    cols: &IndexSubset,
) -> Result<(Rational, Rational), FiberError> {
    if x.len() != u.rows() || a.len() != u.cols() || cols.len() != u.rows() {
        return Err(FiberError::Linalg(LinalgError::Shape(format!(
            "U {}x{}, x {}, a {}, subset of size {}",
            u.rows(),
            u.cols(),
            x.len(),
            a.len(),
            cols.len()
        ))));
    }
    cols.check_bound(u.cols())?;
    let u_s = u.select(&IndexSubset::full(u.rows()), cols)?;
    let a_s = columns(cols, a);
    let alpha = segment_minor(&u_s, x, &a_s, &Rational::zero());
    let beta = segment_minor(&u_s, x, &a_s, &Rational::one()) - &alpha;
    let two = Rational::from(2);
    let at_two = segment_minor(&u_s, x, &a_s, &two);
    if at_two != &alpha + &(&beta * &two) {
        return Err(FiberError::InternalConsistency(format!(
            "minor {cols} is not affine in lambda: f(0)={alpha}, f(1)={}, f(2)={at_two}",
            &alpha + &beta
        )));
    }
    Ok((alpha, beta))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorCoefficients {
    pub cols: IndexSubset,
    pub alpha: Rational,
    pub beta: Rational,
}

impl MinorCoefficients {
    pub fn at(&self, lambda: &Rational) -> Rational {
        &self.alpha + &(&self.beta * lambda)
    }
}

/// Per-minor affine data for a same-fiber segment, and the resulting verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberConvexityCertificate {
    pub cell: PositroidCellSpec,
    pub minors: Vec<MinorCoefficients>,
    pub verdict: bool,
}

impl FiberConvexityCertificate {
    /// Recomputes the verdict from the stored coefficients.
    pub fn evaluate_verdict(&self) -> bool {
        let endpoints_ok = self
            .minors
            .iter()
            .all(|c| !c.alpha.is_negative() && !(&c.alpha + &c.beta).is_negative());
        let nonbases_vanish = self.cell.nonbases().iter().all(|s| {
            self.minors
                .iter()
                .find(|c| &c.cols == s)
                .is_some_and(|c| c.alpha.is_zero() && c.beta.is_zero())
        });
        endpoints_ok && nonbases_vanish
    }

    pub fn coefficients(&self, cols: &IndexSubset) -> Option<&MinorCoefficients> {
        self.minors.iter().find(|c| &c.cols == cols)
    }
}

/// Certifies that the segment from `U` to `V` stays in the closed cell.
pub fn convexity_certificate(
    setup: &AmplituhedronSetup,
    cell: &PositroidCellSpec,
    u: &RationalMatrix,
    v: &RationalMatrix,
) -> Result<FiberConvexityCertificate, FiberError> {
    let a = require_corank_one(setup)?;
    if (cell.k(), cell.n()) != (setup.k(), setup.n()) {
        return Err(FiberError::Tnn(TnnError::CellShape {
            cell_k: cell.k(),
            cell_n: cell.n(),
            rows: setup.k(),
            cols: setup.n(),
        }));
    }
    if !in_closed_cell(u, cell)? {
        return Err(FiberError::NotInCell("U"));
    }
    if !in_closed_cell(v, cell)? {
        return Err(FiberError::NotInCell("V"));
    }
    let x = fiber_displacement(setup, u, v)?;
    let subsets: Vec<IndexSubset> = k_subsets(setup.n(), setup.k()).collect();
    let fit = |s: &IndexSubset| {
        minor_affine_coeffs(u, &x, a, s).map(|(alpha, beta)| MinorCoefficients {
            cols: s.clone(),
            alpha,
            beta,
        })
    };
    let minors = if subsets.len() > 64 {
        subsets.par_iter().map(fit).collect::<Result<Vec<_>, _>>()?
    } else {
        subsets.iter().map(fit).collect::<Result<Vec<_>, _>>()?
    };
    let mut cert = FiberConvexityCertificate { cell: cell.clone(), minors, verdict: false };
    cert.verdict = cert.evaluate_verdict();
    Ok(cert)
}

/// `ψ` evaluated at `span(K)`: the representative `C⁻¹·K` lying over `W`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SectionWitness {
    #[serde(rename = "K")]
    pub k_matrix: RationalMatrix,
    #[serde(rename = "C")]
    pub c: RationalMatrix,
    pub result: RationalMatrix,
    #[serde(rename = "detC")]
    pub det_c: Rational,
}

/// Row spans of `a` and `b` coincide.
pub fn same_row_span(a: &RationalMatrix, b: &RationalMatrix) -> Result<bool, LinalgError> {
    let ra = rank(a);
    Ok(ra == rank(b) && rank(&a.vstack(b)?) == ra)
}

/// Solves `K·Zᵀ = C·W` and returns `C⁻¹·K`.
///
/// The caller promises `W = V·Zᵀ` for some totally nonnegative `V`; under that
/// promise a TNN `K` must give `det C > 0`, and anything else is reported as an
/// internal-consistency failure.
pub fn section_witness(
    setup: &AmplituhedronSetup,
    k_matrix: &RationalMatrix,
    w: &RationalMatrix,
) -> Result<SectionWitness, FiberError> {
    let k = setup.k();
    check_point_shape(setup, k_matrix, "K")?;
    if w.shape() != (k, setup.k() + setup.m()) {
        return Err(FiberError::Linalg(LinalgError::Shape(format!(
            "W is {}x{}, expected {}x{}",
            w.rows(),
            w.cols(),
            k,
            setup.k() + setup.m()
        ))));
    }
    if rank(k_matrix) != k {
        return Err(FiberError::Rank("K must have rank k".into()));
    }
    if rank(w) != k {
        return Err(FiberError::Rank("W must have rank k".into()));
    }
    let image = k_matrix.mul_transpose(setup.z())?;
    if !same_row_span(&image, w)? {
        return Err(FiberError::NotInFiber("span(K·Zᵀ) ≠ span(W)".into()));
    }
    let c = solve_for_left_factor(&image, w)?;
    let det_c = det(&c)?;
    let result = inverse(&c)?.mul(k_matrix)?;
    if &result.mul_transpose(setup.z())? != w {
        return Err(FiberError::InternalConsistency("C⁻¹·K does not map onto W".into()));
    }
    if !det_c.is_positive() && check_tnn(k_matrix)?.is_tnn {
        return Err(FiberError::InternalConsistency(format!(
            "det(C) = {det_c} for a totally nonnegative representative"
        )));
    }
    Ok(SectionWitness { k_matrix: k_matrix.clone(), c, result, det_c })
}

/// Directions `x` along which the nonbasis minors of `U + xᵀ·a` stay zero.
///
/// By the matrix determinant lemma the λ-slope of `minor_S` is linear in `x`,
/// with coefficient `i` equal to the minor after replacing row `i` of `U_S` by
/// `a_S`. Returns a basis of the common null space of those linear forms.
pub fn cell_preserving_directions(
    u: &RationalMatrix,
    a: &[Rational],
    cell: &PositroidCellSpec,
) -> Vec<Vec<Rational>> {
    let k = u.rows();
    let all_rows = IndexSubset::full(k);
    let forms: Vec<Vec<Rational>> = cell
        .nonbases()
        .iter()
        .map(|s| {
            let u_s = u.select(&all_rows, s).expect("cell matches point shape");
            let a_s = columns(s, a);
            (0..k)
                .map(|i| {
                    let mut replaced = u_s.clone();
                    for (j, v) in a_s.iter().enumerate() {
                        replaced[(i, j)] = v.clone();
                    }
                    det(&replaced).expect("square")
                })
                .collect()
        })
        .collect();
    let constraints = RationalMatrix::from_flat(
        forms.len(),
        k,
        forms.into_iter().flatten().collect(),
    )
    .expect("shape by construction");
    kernel_basis(&constraints)
}

/// A same-fiber pair together with its displacement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberPair {
    pub u: RationalMatrix,
    pub v: RationalMatrix,
    pub x: Vec<Rational>,
    /// Candidates discarded before `v` was accepted.
    pub rejected: usize,
}

impl FiberPair {
    pub fn is_trivial(&self) -> bool {
        self.x.iter().all(Rational::is_zero)
    }
}

const MAX_HALVINGS: usize = 48;
const MAX_DRAWS: usize = 16;

/// Draws `V = U + xᵀ·a` in the same fiber and closed cell as `U`.
///
/// `x` is a random combination of [`cell_preserving_directions`]; candidates
/// outside the cell are rejected and the step halved. If every candidate is
/// rejected (for example when the fiber through `U` is a single point) the
/// trivial pair `V = U` is returned.
pub fn sample_same_fiber_pair(
    rng: &mut impl Rng,
    setup: &AmplituhedronSetup,
    cell: &PositroidCellSpec,
    u: &TnnPoint,
) -> Result<FiberPair, FiberError> {
    let a = require_corank_one(setup)?;
    let u = u.matrix();
    check_point_shape(setup, u, "U")?;
    if !in_closed_cell(u, cell)? {
        return Err(FiberError::NotInCell("U"));
    }
    let directions = cell_preserving_directions(u, a, cell);
    let k = setup.k();
    let mut rejected = 0;
    if !directions.is_empty() {
        let mut x = vec![Rational::zero(); k];
        for _ in 0..MAX_DRAWS {
            let coeffs = small_vector(rng, directions.len(), 6, 3);
            x = (0..k)
                .map(|i| directions.iter().zip(&coeffs).map(|(d, c)| &d[i] * c).sum())
                .collect();
            if x.iter().any(|xi| !xi.is_zero()) {
                break;
            }
        }
        // start at a step comparable to the entries of U
        let u_scale = u.entries().iter().map(Rational::abs).max().unwrap_or_else(Rational::one);
        let a_scale = a.iter().map(Rational::abs).max().expect("nonzero kernel");
        let x_scale = x.iter().map(Rational::abs).max().unwrap_or_else(Rational::zero);
        if !x_scale.is_zero() {
            let start = &u_scale / &(&a_scale * &x_scale);
            for xi in x.iter_mut() {
                *xi = &*xi * &start;
            }
            let half = Rational::new(1, 2);
            for _ in 0..MAX_HALVINGS {
                let v = line_point(u, &x, a, &Rational::one());
                if in_closed_cell(&v, cell)? {
                    return Ok(FiberPair { u: u.clone(), v, x, rejected });
                }
                rejected += 1;
                for xi in x.iter_mut() {
                    *xi = &*xi * &half;
                }
            }
        }
    }
    Ok(FiberPair { u: u.clone(), v: u.clone(), x: vec![Rational::zero(); k], rejected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplituhedron::build_setup;
    use crate::sampling::{random_gl_plus, trial_rng};
    use crate::tnn::vandermonde;

    fn r(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from(x)).collect()
    }

    fn subset(v: &[usize]) -> IndexSubset {
        IndexSubset::new(v.to_vec()).unwrap()
    }

    fn vandermonde_setup(k: usize, m: usize) -> AmplituhedronSetup {
        let nodes: Vec<i64> = (1..=(k + m + 1) as i64).collect();
        build_setup(k, m, vandermonde(k + m, &r(&nodes))).unwrap()
    }

    #[test]
    fn displacement_examples() {
        let s = vandermonde_setup(2, 1);
        let a = s.kernel().unwrap().to_vec();
        let u = vandermonde(2, &r(&[1, 2, 3, 4]));
        assert_eq!(fiber_displacement(&s, &u, &u).unwrap(), r(&[0, 0]));

        let v = line_point(&u, &r(&[1, 0]), &a, &Rational::one());
        assert_eq!(fiber_displacement(&s, &u, &v).unwrap(), r(&[1, 0]));

        let x0 = vec![Rational::new(-3, 7), Rational::new(5, 2)];
        let v = line_point(&u, &x0, &a, &Rational::one());
        assert_eq!(fiber_displacement(&s, &u, &v).unwrap(), x0);
    }

    #[test]
    fn displacement_errors() {
        let s = vandermonde_setup(2, 1);
        let u = vandermonde(2, &r(&[1, 2, 3, 4]));
        let v = vandermonde(2, &r(&[1, 2, 3, 5]));
        assert!(matches!(fiber_displacement(&s, &u, &v), Err(FiberError::FiberMismatch(_))));
        let wide = build_setup(1, 1, vandermonde(2, &r(&[1, 2, 3, 4]))).unwrap();
        let p = RationalMatrix::from_i64(&[&[1, 0, 0, 0]]);
        assert!(matches!(
            fiber_displacement(&wide, &p, &p),
            Err(FiberError::UnsupportedCorank { .. })
        ));
    }

    #[test]
    fn affine_coefficient_examples() {
        let u = RationalMatrix::from_i64(&[&[1, 1, 1], &[1, 2, 3]]);
        let a = r(&[1, -2, 1]);
        let (alpha, beta) = minor_affine_coeffs(&u, &r(&[0, 0]), &a, &subset(&[1, 3])).unwrap();
        assert_eq!((alpha, beta), (Rational::from(2), Rational::zero()));

        let u1 = RationalMatrix::from_i64(&[&[1, 0]]);
        let (alpha, beta) = minor_affine_coeffs(&u1, &r(&[1]), &r(&[1, -1]), &subset(&[2])).unwrap();
        assert_eq!((alpha, beta), (Rational::zero(), Rational::from(-1)));
    }

    #[test]
    fn affine_coefficients_match_three_point_oracle() {
        // affinity holds for any rank-one update, not only kernel directions
        let u = RationalMatrix::from_i64(&[&[1, 1, 1], &[1, 2, 3]]);
        let a = r(&[1, -1, 0]);
        let x = r(&[2, -1]);
        for s in k_subsets(3, 2) {
            let (alpha, beta) = minor_affine_coeffs(&u, &x, &a, &s).unwrap();
            for l in 0..3 {
                let lam = Rational::from(l);
                let direct = crate::linalg::maximal_minor(&line_point(&u, &x, &a, &lam), &s).unwrap();
                assert_eq!(direct, &alpha + &(&beta * &lam), "subset {s} at {l}");
            }
        }
    }

    #[test]
    fn identical_points_give_flat_certificate() {
        let s = vandermonde_setup(2, 2);
        let u = vandermonde(2, &r(&[1, 2, 3, 4, 5]));
        let cell = PositroidCellSpec::top(2, 5);
        let cert = convexity_certificate(&s, &cell, &u, &u).unwrap();
        assert!(cert.verdict);
        assert!(cert.minors.iter().all(|c| c.beta.is_zero()));
        assert_eq!(cert.minors.len(), 10);
    }

    #[test]
    fn certificate_precondition_errors() {
        let s = vandermonde_setup(1, 2);
        let cell = PositroidCellSpec::top(1, 4);
        let u = RationalMatrix::from_i64(&[&[1, 1, 1, 1]]);
        let neg = RationalMatrix::from_i64(&[&[1, -1, 1, 1]]);
        assert_eq!(convexity_certificate(&s, &cell, &neg, &u), Err(FiberError::NotInCell("U")));
        assert_eq!(convexity_certificate(&s, &cell, &u, &neg), Err(FiberError::NotInCell("V")));
        let other = RationalMatrix::from_i64(&[&[2, 1, 1, 1]]);
        assert!(matches!(
            convexity_certificate(&s, &cell, &u, &other),
            Err(FiberError::FiberMismatch(_))
        ));
    }

    #[test]
    fn certificate_json_shape() {
        let s = vandermonde_setup(1, 2);
        let u = RationalMatrix::from_i64(&[&[1, 1, 1, 1]]);
        let cert = convexity_certificate(&s, &PositroidCellSpec::top(1, 4), &u, &u).unwrap();
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["verdict"], serde_json::json!(true));
        assert_eq!(json["minors"][0], serde_json::json!({"cols": [1], "alpha": "1", "beta": "0"}));
        assert_eq!(json["cell"], serde_json::json!({"k": 1, "n": 4, "nonbases": []}));
    }

    #[test]
    fn merged_cell_admits_nontrivial_fiber_segments() {
        // k=2: columns 1 and 2 parallel, so {1,2} is a nonbasis; one direction survives
        let s = vandermonde_setup(2, 2);
        let u = RationalMatrix::from_i64(&[&[1, 2, 1, 1, 1], &[1, 2, 2, 3, 4]]);
        let point = TnnPoint::new(u.clone()).unwrap();
        let cell = PositroidCellSpec::new(2, 5, [subset(&[1, 2])]).unwrap();
        assert!(in_closed_cell(&u, &cell).unwrap());
        let dirs = cell_preserving_directions(&u, s.kernel().unwrap(), &cell);
        assert_eq!(dirs.len(), 1);
        let mut rng = trial_rng(5, 0);
        let pair = sample_same_fiber_pair(&mut rng, &s, &cell, &point).unwrap();
        assert!(!pair.is_trivial());
        let cert = convexity_certificate(&s, &cell, &pair.u, &pair.v).unwrap();
        assert!(cert.verdict);
        let c = cert.coefficients(&subset(&[1, 2])).unwrap();
        assert!(c.alpha.is_zero() && c.beta.is_zero());
    }

    #[test]
    fn section_identity_and_gauge_independence() {
        let s = vandermonde_setup(2, 1);
        let u = vandermonde(2, &r(&[1, 2, 4, 5]));
        let w = u.mul_transpose(s.z()).unwrap();
        let sw = section_witness(&s, &u, &w).unwrap();
        assert_eq!(sw.c, RationalMatrix::identity(2));
        assert_eq!(sw.result, u);

        let mut rng = trial_rng(9, 0);
        let g = random_gl_plus(&mut rng, 2);
        let gk = g.mul(&u).unwrap();
        let sw2 = section_witness(&s, &gk, &w).unwrap();
        assert_eq!(sw2.result, u);
        assert_eq!(sw2.c, g);
        assert!(sw2.det_c.is_positive());

        let c = Rational::new(3, 2);
        let sw3 = section_witness(&s, &u, &w.scale(&c)).unwrap();
        assert_eq!(sw3.result, u.scale(&c));
        assert!(sw3.det_c.is_positive());
    }

    #[test]
    fn section_errors() {
        let s = vandermonde_setup(2, 1);
        let u = vandermonde(2, &r(&[1, 2, 4, 5]));
        let other = vandermonde(2, &r(&[1, 3, 4, 5])).mul_transpose(s.z()).unwrap();
        assert!(matches!(section_witness(&s, &u, &other), Err(FiberError::NotInFiber(_))));
        let flipped = u.mul_transpose(s.z()).unwrap();
        let mut swapped = flipped.clone();
        for j in 0..3 {
            swapped[(0, j)] = flipped[(1, j)].clone();
            swapped[(1, j)] = flipped[(0, j)].clone();
        }
        let err = section_witness(&s, &u, &swapped).unwrap_err();
        assert!(err.is_internal_consistency());
    }
}
