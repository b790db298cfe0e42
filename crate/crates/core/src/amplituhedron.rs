//! Validated `(k, m, n, Z)` setups, the linear map `V ↦ V·Zᵀ` on
//! representatives, and the cyclically symmetric matrix `Z₀`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{kernel_basis, rank, LinalgError, Rational, RationalMatrix};
use crate::tnn::{check_tnn, TnnError, TnnPoint, TnnReport};

/// Digits beyond this exceed what an `f64` trigonometric estimate carries.
pub const MAX_Z0_PRECISION_DIGITS: u32 = 15;
pub const MIN_Z0_PRECISION_DIGITS: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetupError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Tnn(#[from] TnnError),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("Z has rank {rank}, expected k+m = {needed}")]
    Rank { rank: usize, needed: usize },
    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("stored setup field disagrees with recomputation: {0}")]
    Mismatch(String),
}

/// A `(k+m)×n` matrix `Z` of full rank together with derived data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SetupJson", into = "SetupJson")]
pub struct AmplituhedronSetup {
    k: usize,
    m: usize,
    z: RationalMatrix,
    kernel: Option<Vec<Rational>>,
    positivity: TnnReport,
    all_minors_positive: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct SetupJson {
    k: usize,
    m: usize,
    n: usize,
    #[serde(rename = "Z")]
    z: RationalMatrix,
    #[serde(default)]
    kernel: Option<Vec<Rational>>,
    #[serde(default)]
    all_minors_positive: Option<bool>,
}

impl TryFrom<SetupJson> for AmplituhedronSetup {
    type Error = SetupError;

    fn try_from(raw: SetupJson) -> Result<Self, SetupError> {
        let setup = build_setup(raw.k, raw.m, raw.z)?;
        if setup.n() != raw.n {
            return Err(SetupError::Mismatch(format!("n = {} but Z has {} columns", raw.n, setup.n())));
        }
        if let (Some(stored), Some(computed)) = (&raw.kernel, &setup.kernel) {
            if stored != computed {
                return Err(SetupError::Mismatch("kernel".into()));
            }
        }
        if let Some(flag) = raw.all_minors_positive {
            if flag != setup.all_minors_positive {
                return Err(SetupError::Mismatch("allMinorsPositive".into()));
            }
        }
        Ok(setup)
    }
}

impl From<AmplituhedronSetup> for SetupJson {
    fn from(s: AmplituhedronSetup) -> Self {
        SetupJson {
            k: s.k,
            m: s.m,
            n: s.z.cols(),
            z: s.z,
            kernel: s.kernel,
            all_minors_positive: Some(s.all_minors_positive),
        }
    }
}

impl AmplituhedronSetup {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.z.cols()
    }

    pub fn z(&self) -> &RationalMatrix {
        &self.z
    }

    /// Generator of the kernel of `v ↦ v·Zᵀ` when `n = k+m+1`, first nonzero entry 1.
    pub fn kernel(&self) -> Option<&[Rational]> {
        self.kernel.as_deref()
    }

    pub fn positivity(&self) -> &TnnReport {
        &self.positivity
    }

    pub fn all_minors_positive(&self) -> bool {
        self.all_minors_positive
    }

    pub fn is_corank_one(&self) -> bool {
        self.n() == self.k + self.m + 1
    }

    /// Kernel entries all nonzero and strictly alternating in sign.
    pub fn kernel_alternates(&self) -> bool {
        self.kernel.as_deref().is_some_and(alternates_in_sign)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("setup serialization is infallible")
    }
}

pub fn alternates_in_sign(v: &[Rational]) -> bool {
    v.iter().all(|x| !x.is_zero()) && v.windows(2).all(|w| w[0].signum() == -w[1].signum())
}

pub fn build_setup(k: usize, m: usize, z: RationalMatrix) -> Result<AmplituhedronSetup, SetupError> {
    if k == 0 {
        return Err(SetupError::UnsupportedParameter("k must be at least 1".into()));
    }
    let (rows, n) = z.shape();
    if rows != k + m {
        return Err(SetupError::Shape(format!("Z has {rows} rows, expected k+m = {}", k + m)));
    }
    if n < k + m {
        return Err(SetupError::Shape(format!("Z has {n} columns, fewer than k+m = {}", k + m)));
    }
    let r = rank(&z);
    if r < k + m {
        return Err(SetupError::Rank { rank: r, needed: k + m });
    }
    let positivity = check_tnn(&z)?;
    let all_minors_positive = crate::tnn::check_totally_positive(&z)?;
    let kernel = if n == k + m + 1 {
        let mut basis = kernel_basis(&z);
        debug_assert_eq!(basis.len(), 1);
        basis.pop()
    } else {
        None
    };
    Ok(AmplituhedronSetup { k, m, z, kernel, positivity, all_minors_positive })
}

/// Image of a representative under `V ↦ V·Zᵀ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MappedPoint {
    pub image: RationalMatrix,
    pub source_rank: usize,
    pub image_rank: usize,
}

pub fn hat_map(setup: &AmplituhedronSetup, v: &RationalMatrix) -> Result<MappedPoint, SetupError> {
    if v.shape() != (setup.k, setup.n()) {
        return Err(SetupError::Shape(format!(
            "point is {}x{}, expected {}x{}",
            v.rows(),
            v.cols(),
            setup.k,
            setup.n()
        )));
    }
    let image = v.mul_transpose(&setup.z)?;
    Ok(MappedPoint { source_rank: rank(v), image_rank: rank(&image), image })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WellDefinedReport {
    pub well_defined_on_samples: bool,
    pub samples: usize,
    /// Sample with the smallest image rank, when that rank is below k.
    pub worst: Option<RankDropWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RankDropWitness {
    pub index: usize,
    pub point: RationalMatrix,
    pub image_rank: usize,
}

/// Falsification check: does any sample lose rank under the map?
pub fn check_well_defined_on_samples(
    setup: &AmplituhedronSetup,
    samples: &[TnnPoint],
) -> Result<WellDefinedReport, SetupError> {
    let mut worst: Option<RankDropWitness> = None;
    for (index, p) in samples.iter().enumerate() {
        let mapped = hat_map(setup, p.matrix())?;
        if mapped.image_rank < setup.k
            && worst.as_ref().is_none_or(|w| mapped.image_rank < w.image_rank)
        {
            worst = Some(RankDropWitness {
                index,
                point: p.matrix().clone(),
                image_rank: mapped.image_rank,
            });
        }
    }
    Ok(WellDefinedReport {
        well_defined_on_samples: worst.is_none(),
        samples: samples.len(),
        worst,
    })
}

/// Angles `θ` of the real eigenvector pairs `cos(θ l)`, `sin(θ l)` spanning the
/// top `k+m` eigenspaces of `S + Sᵀ`, with `S` the cyclic shift twisted by
/// `(-1)^(k-1)`. A leading `0` means the constant eigenvector (no sine partner).
fn z0_angles(k: usize, m: usize) -> Vec<f64> {
    let n = (k + m + 1) as f64;
    if k % 2 == 1 {
        // eigenvalues 2cos(2πj/n); j = 0 is simple, then pairs
        (0..=(k + m - 1) / 2).map(|j| 2.0 * PI * j as f64 / n).collect()
    } else {
        // twisted: eigenvalues 2cos(π(2j+1)/n), all in pairs
        (0..(k + m) / 2).map(|j| PI * (2 * j + 1) as f64 / n).collect()
    }
}

/// Floating-point estimate of the rows of `Z₀`.
fn z0_rows_f64(k: usize, m: usize) -> Vec<Vec<f64>> {
    let n = k + m + 1;
    let mut rows = Vec::with_capacity(k + m);
    for theta in z0_angles(k, m) {
        if theta == 0.0 {
            rows.push(vec![1.0; n]);
        } else {
            rows.push((0..n).map(|l| (theta * l as f64).cos()).collect());
            rows.push((0..n).map(|l| (theta * l as f64).sin()).collect());
        }
    }
    debug_assert_eq!(rows.len(), k + m);
    rows
}

fn rationalize_z0(rows: &[Vec<f64>], digits: u32) -> Result<RationalMatrix, SetupError> {
    let entries = rows
        .iter()
        .map(|r| r.iter().map(|&x| Rational::from_f64_rounded(x, digits)).collect())
        .collect::<Result<Vec<Vec<_>>, _>>()?;
    Ok(RationalMatrix::from_rows(entries)?)
}

/// Cyclically symmetric `Z₀` for `n = k+m+1`, rounded to `precision_digits`
/// decimal digits and verified exactly.
///
/// The rounded matrix must have every maximal minor strictly positive and a
/// sign-alternating kernel. If the rows come out with all minors negative the
/// last row is negated (still a basis of the same eigenspaces). On failure the
/// precision is doubled, up to [`MAX_Z0_PRECISION_DIGITS`].
pub fn build_z0(k: usize, m: usize, precision_digits: u32) -> Result<AmplituhedronSetup, SetupError> {
    if k == 0 {
        return Err(SetupError::UnsupportedParameter("k must be at least 1".into()));
    }
    if m % 2 == 1 {
        return Err(SetupError::UnsupportedParameter(format!("m = {m} must be even")));
    }
    if precision_digits < MIN_Z0_PRECISION_DIGITS {
        return Err(SetupError::UnsupportedParameter(format!(
            "precision {precision_digits} below minimum {MIN_Z0_PRECISION_DIGITS}"
        )));
    }
    if precision_digits > MAX_Z0_PRECISION_DIGITS {
        return Err(SetupError::Construction(format!(
            "precision {precision_digits} exceeds ceiling {MAX_Z0_PRECISION_DIGITS}"
        )));
    }
    let rows = z0_rows_f64(k, m);
    let mut digits = precision_digits;
    loop {
        let mut z = rationalize_z0(&rows, digits)?;
        let minors = crate::linalg::all_maximal_minors(&z)?;
        if minors.values().all(Rational::is_negative) {
            let last = z.rows() - 1;
            for j in 0..z.cols() {
                z[(last, j)] = -&z[(last, j)];
            }
        }
        if let Ok(setup) = build_setup(k, m, z) {
            if setup.all_minors_positive && setup.kernel_alternates() {
                return Ok(setup);
            }
        }
        if digits >= MAX_Z0_PRECISION_DIGITS {
            return Err(SetupError::Construction(format!(
                "Z0 for k={k}, m={m} failed exact verification at {digits} digits"
            )));
        }
        digits = (digits * 2).min(MAX_Z0_PRECISION_DIGITS);
    }
}
