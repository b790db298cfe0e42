//! Determinant algorithms behind a common trait, registered by name.
//!
//! `bareiss` is the production path: rows are cleared of denominators and the
//! resulting integer matrix is reduced with fraction-free (exact-division)
//! elimination, so every intermediate is a minor of the scaled input.
//! `gauss` eliminates directly over the rationals. `cofactor` is the Laplace
//! expansion, exponential in the size and kept as an independent oracle.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{LinalgError, Rational, RationalMatrix};

pub trait DeterminantAlgorithm: Send + Sync {
    fn name(&self) -> &'static str;

    /// Determinant of a square matrix. Callers check squareness.
    fn determinant(&self, m: &RationalMatrix) -> Rational;
}

/// Fraction-free elimination on the integer-scaled matrix.
#[derive(Debug, Default, Clone, Copy)]
pub struct Bareiss;

/// Plain Gaussian elimination over the rationals with first-nonzero pivoting.
#[derive(Debug, Default, Clone, Copy)]
pub struct RationalGauss;

/// Laplace expansion along the first row.
#[derive(Debug, Default, Clone, Copy)]
pub struct Cofactor;

/// Scales each row by the lcm of its denominators. Returns the integer rows
/// and the product of the scale factors.
pub(crate) fn integer_rows(m: &RationalMatrix) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut scale_product = BigInt::one();
    let rows = (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            scale_product *= &lcm;
            row.iter()
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect()
        })
        .collect();
    (rows, scale_product)
}

/// Integer Bareiss determinant. Consumes the matrix.
pub(crate) fn bareiss_integer(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let pivot = &pivot_row[k];
        for row in bottom.iter_mut() {
            let lead = row[k].clone();
            for j in k + 1..n {
                let v = &row[j] * pivot - &lead * &pivot_row[j];
                debug_assert!((&v % &prev).is_zero(), "Bareiss division must be exact");
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

impl DeterminantAlgorithm for Bareiss {
    fn name(&self) -> &'static str {
        "bareiss"
    }

    fn determinant(&self, m: &RationalMatrix) -> Rational {
        let (rows, scale) = integer_rows(m);
        Rational::new(bareiss_integer(rows), scale)
    }
}

impl DeterminantAlgorithm for RationalGauss {
    fn name(&self) -> &'static str {
        "gauss"
    }

    fn determinant(&self, m: &RationalMatrix) -> Rational {
        let n = m.rows();
        let mut a = m.row_vectors();
        let mut det = Rational::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Rational::zero();
            };
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            let pivot = a[k][k].clone();
            det *= &pivot;
            let (top, bottom) = a.split_at_mut(k + 1);
            for row in bottom.iter_mut() {
                if row[k].is_zero() {
                    continue;
                }
                let factor = &row[k] / &pivot;
                for j in k..n {
                    let delta = &factor * &top[k][j];
                    row[j] -= &delta;
                }
            }
        }
        det
    }
}

impl Cofactor {
    fn expand(a: &[Vec<Rational>]) -> Rational {
        match a.len() {
            0 => Rational::one(),
            1 => a[0][0].clone(),
            2 => &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0],
            n => {
                let mut total = Rational::zero();
                for j in 0..n {
                    if a[0][j].is_zero() {
                        continue;
                    }
                    let minor: Vec<Vec<Rational>> = a[1..]
                        .iter()
                        .map(|row| {
                            row.iter()
                                .enumerate()
                                .filter(|&(c, _)| c != j)
                                .map(|(_, v)| v.clone())
                                .collect()
                        })
                        .collect();
                    let term = &a[0][j] * Self::expand(&minor);
                    if j % 2 == 0 {
                        total += &term;
                    } else {
                        total -= &term;
                    }
                }
                total
            }
        }
    }
}

impl DeterminantAlgorithm for Cofactor {
    fn name(&self) -> &'static str {
        "cofactor"
    }

    fn determinant(&self, m: &RationalMatrix) -> Rational {
        Self::expand(&m.row_vectors())
    }
}

/// Name → algorithm table.
pub struct DeterminantRegistry {
    algorithms: BTreeMap<&'static str, Box<dyn DeterminantAlgorithm>>,
}

impl DeterminantRegistry {
    pub fn empty() -> Self {
        DeterminantRegistry { algorithms: BTreeMap::new() }
    }

    pub fn register(&mut self, algorithm: Box<dyn DeterminantAlgorithm>) {
        self.algorithms.insert(algorithm.name(), algorithm);
    }

    pub fn get(&self, name: &str) -> Result<&dyn DeterminantAlgorithm, LinalgError> {
        self.algorithms
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| LinalgError::UnknownAlgorithm(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.algorithms.keys().copied().collect()
    }
}

impl Default for DeterminantRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Bareiss));
        r.register(Box::new(RationalGauss));
        r.register(Box::new(Cofactor));
        r
    }
}

/// Process-wide registry with the built-in algorithms.
pub fn registry() -> &'static DeterminantRegistry {
    static REGISTRY: OnceLock<DeterminantRegistry> = OnceLock::new();
    REGISTRY.get_or_init(DeterminantRegistry::default)
}

/// Exact determinant via the fraction-free path.
pub fn det(m: &RationalMatrix) -> Result<Rational, LinalgError> {
    det_with(&Bareiss, m)
}

pub fn det_with(algorithm: &dyn DeterminantAlgorithm, m: &RationalMatrix) -> Result<Rational, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    Ok(algorithm.determinant(m))
}
