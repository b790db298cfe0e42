//! Rank, kernels, inverses and left-factor solves.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::det::integer_rows;
use super::{LinalgError, Rational, RationalMatrix};

/// Fraction-free row echelon form of an integer matrix.
///
/// Entries of the returned rows are (scaled) minors of the input; the division
/// by the previous pivot at each step is exact.
pub(crate) struct IntegerEchelon {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
}

pub(crate) fn fraction_free_echelon(mut a: Vec<Vec<BigInt>>, cols: usize) -> IntegerEchelon {
    let nrows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let (top, bottom) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = &pivot_row[c];
        for row in bottom.iter_mut() {
            let lead = std::mem::take(&mut row[c]);
            for j in c + 1..cols {
                let v = &row[j] * pivot - &lead * &pivot_row[j];
                debug_assert!((&v % &prev).is_zero(), "fraction-free division must be exact");
                row[j] = v / &prev;
            }
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    IntegerEchelon { rows: a, pivots }
}

fn echelon_of(m: &RationalMatrix) -> IntegerEchelon {
    let (rows, _) = integer_rows(m);
    fraction_free_echelon(rows, m.cols())
}

/// Exact rank over the rationals.
pub fn rank(m: &RationalMatrix) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    echelon_of(m).pivots.len()
}

/// Basis of `{v : v·Mᵀ = 0}`; each vector's first nonzero entry is `+1`.
///
/// Vectors are ordered by their free column, so the basis is deterministic.
pub fn kernel_basis(m: &RationalMatrix) -> Vec<Vec<Rational>> {
    let cols = m.cols();
    let ech = echelon_of(m);
    let is_pivot = {
        let mut v = vec![false; cols];
        for &p in &ech.pivots {
            v[p] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut x = vec![Rational::zero(); cols];
        x[free] = Rational::one();
        for (t, &p) in ech.pivots.iter().enumerate().rev() {
            let row = &ech.rows[t];
            let acc: Rational = (p + 1..cols)
                .filter(|&j| !row[j].is_zero() && !x[j].is_zero())
                .map(|j| Rational::from_integer(row[j].clone()) * &x[j])
                .sum();
            x[p] = -acc / Rational::from_integer(row[p].clone());
        }
        canonicalize_leading_one(&mut x);
        basis.push(x);
    }
    basis
}

/// Rescales so the first nonzero entry is exactly 1. Zero vectors are left as is.
pub fn canonicalize_leading_one(v: &mut [Rational]) {
    if let Some(lead) = v.iter().find(|x| !x.is_zero()).cloned() {
        for x in v.iter_mut() {
            *x = &*x / &lead;
        }
    }
}

/// Exact inverse by Gauss–Jordan elimination.
pub fn inverse(m: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let mut a = m.row_vectors();
    let mut inv = RationalMatrix::identity(n).row_vectors();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(LinalgError::Singular)?;
        a.swap(p, k);
        inv.swap(p, k);
        let pivot = a[k][k].recip()?;
        for j in 0..n {
            a[k][j] *= &pivot;
            inv[k][j] *= &pivot;
        }
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let factor = a[i][k].clone();
            for j in 0..n {
                let da = &factor * &a[k][j];
                let di = &factor * &inv[k][j];
                a[i][j] -= &da;
                inv[i][j] -= &di;
            }
        }
    }
    RationalMatrix::from_rows(inv)
}

/// The unique `C` (k×k) with `image = C · target`, where `target` is k×p of rank k.
pub fn solve_for_left_factor(
    image: &RationalMatrix,
    target: &RationalMatrix,
) -> Result<RationalMatrix, LinalgError> {
    if image.shape() != target.shape() {
        return Err(LinalgError::Shape(format!(
            "left-factor solve needs equal shapes, got {:?} and {:?}",
            image.shape(),
            target.shape()
        )));
    }
    let k = target.rows();
    let ech = echelon_of(target);
    if ech.pivots.len() < k {
        return Err(LinalgError::DegenerateTarget { rank: ech.pivots.len(), needed: k });
    }
    // pivot columns of the row echelon form are independent columns of `target`
    let block = target.select_columns(&ech.pivots);
    let c = image.select_columns(&ech.pivots).mul(&inverse(&block)?)?;
    if &c.mul(target)? != image {
        return Err(LinalgError::Inconsistent);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from(x)).collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&RationalMatrix::zeros(2, 3)), 0);
        assert_eq!(rank(&RationalMatrix::identity(3)), 3);
        assert_eq!(rank(&RationalMatrix::from_i64(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&RationalMatrix::from_i64(&[&[0, 0, 1], &[0, 0, 2], &[0, 1, 0]])), 2);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&RationalMatrix::identity(3)).is_empty());
        assert_eq!(kernel_basis(&RationalMatrix::from_i64(&[&[1, 1]])), vec![r(&[1, -1])]);
        let m = RationalMatrix::from_i64(&[&[1, 1, 1, 1], &[1, 0, -1, 0], &[0, 1, 0, -1]]);
        assert_eq!(kernel_basis(&m), vec![r(&[1, -1, 1, -1])]);
    }

    #[test]
    fn kernel_of_zero_matrix_is_standard_basis() {
        let k = kernel_basis(&RationalMatrix::zeros(1, 3));
        assert_eq!(k, vec![r(&[1, 0, 0]), r(&[0, 1, 0]), r(&[0, 0, 1])]);
    }

    #[test]
    fn kernel_leading_entry_is_one_even_when_pivot_precedes() {
        // kernel spanned by (-2, 1) -> canonical (1, -1/2)
        let k = kernel_basis(&RationalMatrix::from_i64(&[&[1, 2]]));
        assert_eq!(k, vec![vec![Rational::one(), Rational::new(-1, 2)]]);
    }

    #[test]
    fn inverse_round_trip() {
        let m = RationalMatrix::from_i64(&[&[2, 1], &[7, 4]]);
        let inv = inverse(&m).unwrap();
        assert_eq!(m.mul(&inv).unwrap(), RationalMatrix::identity(2));
        assert!(matches!(
            inverse(&RationalMatrix::from_i64(&[&[1, 2], &[2, 4]])),
            Err(LinalgError::Singular)
        ));
    }

    #[test]
    fn left_factor_examples() {
        let w = RationalMatrix::from_i64(&[&[1, 0, 1], &[0, 1, 1]]);
        assert_eq!(solve_for_left_factor(&w, &w).unwrap(), RationalMatrix::identity(2));
        let two = Rational::from(2);
        assert_eq!(
            solve_for_left_factor(&w.scale(&two), &w).unwrap(),
            RationalMatrix::identity(2).scale(&two)
        );
        let swap = RationalMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let img = swap.mul(&w).unwrap();
        assert_eq!(solve_for_left_factor(&img, &w).unwrap(), swap);
    }

    #[test]
    fn left_factor_errors() {
        let w = RationalMatrix::from_i64(&[&[1, 0, 1], &[0, 1, 1]]);
        let degenerate = RationalMatrix::from_i64(&[&[1, 0, 1], &[2, 0, 2]]);
        assert!(matches!(
            solve_for_left_factor(&w, &degenerate),
            Err(LinalgError::DegenerateTarget { rank: 1, needed: 2 })
        ));
        let off_span = RationalMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 1]]);
        assert!(matches!(solve_for_left_factor(&off_span, &w), Err(LinalgError::Inconsistent)));
    }
}
