//! Plücker coordinates and the Veronese map onto rank-one projections.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amplituhedron::{hat_map, AmplituhedronSetup, SetupError};
use crate::linalg::{all_maximal_minors, rank, LinalgError, Rational, RationalMatrix};
use crate::tnn::TnnPoint;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbeddingError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Setup(#[from] SetupError),
    #[error("matrix has rank {rank}, expected {k}")]
    Rank { rank: usize, k: usize },
    #[error("the zero vector has no projective class")]
    ZeroVector,
    #[error("image of the point has rank {image_rank} < k = {k}; the map is not well defined here")]
    NotWellDefined { image_rank: usize, k: usize },
}

/// All k×k minors of a k×(k+m) matrix, colexicographic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlueckerVector(pub Vec<Rational>);

impl PlueckerVector {
    pub fn d(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn scale(&self, c: &Rational) -> PlueckerVector {
        PlueckerVector(self.0.iter().map(|x| x * c).collect())
    }
}

pub fn pluecker(m: &RationalMatrix) -> Result<PlueckerVector, EmbeddingError> {
    let k = m.rows();
    let r = rank(m);
    if r != k {
        return Err(EmbeddingError::Rank { rank: r, k });
    }
    Ok(PlueckerVector(all_maximal_minors(m)?.into_values().collect()))
}

/// `(x_i x_j / |x|²)`: the orthogonal projection onto the line through `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VeroneseMatrix(pub RationalMatrix);

impl VeroneseMatrix {
    pub fn matrix(&self) -> &RationalMatrix {
        &self.0
    }

    pub fn is_symmetric(&self) -> bool {
        self.0.is_symmetric()
    }

    pub fn trace(&self) -> Rational {
        self.0.trace()
    }

    pub fn is_idempotent(&self) -> bool {
        self.0.mul(&self.0).is_ok_and(|sq| sq == self.0)
    }

    pub fn rank(&self) -> usize {
        rank(&self.0)
    }
}

pub fn veronese(x: &[Rational]) -> Result<VeroneseMatrix, EmbeddingError> {
    let norm2: Rational = x.iter().map(|v| v * v).sum();
    if norm2.is_zero() {
        return Err(EmbeddingError::ZeroVector);
    }
    Ok(VeroneseMatrix(RationalMatrix::outer(x, x).scale(&norm2.recip()?)))
}

/// `ν ∘ γ ∘ Ẑ` applied to a representative.
pub fn embed_point(setup: &AmplituhedronSetup, v: &TnnPoint) -> Result<VeroneseMatrix, EmbeddingError> {
    let mapped = hat_map(setup, v.matrix())?;
    if mapped.image_rank < setup.k() {
        return Err(EmbeddingError::NotWellDefined { image_rank: mapped.image_rank, k: setup.k() });
    }
    veronese(pluecker(&mapped.image)?.coords())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplituhedron::build_setup;
    use crate::linalg::det;
    use crate::sampling::{random_gl_plus, trial_rng};
    use crate::tnn::vandermonde;

    fn r(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from(x)).collect()
    }

    #[test]
    fn pluecker_examples() {
        let m = RationalMatrix::from_i64(&[&[2, 1], &[1, 3]]);
        assert_eq!(pluecker(&m).unwrap().coords(), &r(&[5])[..]);
        let m = RationalMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0]]);
        assert_eq!(pluecker(&m).unwrap().coords(), &r(&[1, 0, 0])[..]);
        let m = RationalMatrix::from_i64(&[&[1, 1, 1], &[1, 2, 3]]);
        assert_eq!(pluecker(&m).unwrap().coords(), &r(&[1, 2, 1])[..]);
        let low = RationalMatrix::from_i64(&[&[1, 1, 1], &[2, 2, 2]]);
        assert_eq!(pluecker(&low), Err(EmbeddingError::Rank { rank: 1, k: 2 }));
    }

    #[test]
    fn pluecker_scales_by_determinant() {
        let mut rng = trial_rng(3, 0);
        let m = RationalMatrix::from_i64(&[&[1, 2, 0, -1], &[0, 1, 5, 2]]);
        for _ in 0..5 {
            let g = random_gl_plus(&mut rng, 2);
            let lhs = pluecker(&g.mul(&m).unwrap()).unwrap();
            assert_eq!(lhs, pluecker(&m).unwrap().scale(&det(&g).unwrap()));
        }
    }

    #[test]
    fn veronese_examples() {
        let e1 = veronese(&r(&[1, 0])).unwrap();
        assert_eq!(e1.matrix(), &RationalMatrix::from_i64(&[&[1, 0], &[0, 0]]));

        let half = Rational::new(1, 2);
        let ones = veronese(&r(&[1, 1])).unwrap();
        assert!(ones.matrix().entries().iter().all(|e| *e == half));

        let v = veronese(&r(&[1, 2, 1])).unwrap();
        assert_eq!(v.matrix()[(1, 1)], Rational::new(4, 6));
        assert_eq!(v.matrix()[(0, 2)], Rational::new(1, 6));
        assert!(v.is_symmetric());
        assert_eq!(v.trace(), Rational::one());
        assert!(v.is_idempotent());
        assert_eq!(v.rank(), 1);

        assert_eq!(veronese(&r(&[0, 0])), Err(EmbeddingError::ZeroVector));
    }

    #[test]
    fn veronese_is_scale_invariant() {
        let x = r(&[3, -1, 2]);
        let c = Rational::new(-5, 3);
        let cx: Vec<_> = x.iter().map(|v| v * &c).collect();
        assert_eq!(veronese(&x).unwrap(), veronese(&cx).unwrap());
    }

    #[test]
    fn embed_examples() {
        let id = build_setup(2, 0, RationalMatrix::identity(2)).unwrap();
        let p = TnnPoint::new(RationalMatrix::identity(2)).unwrap();
        assert_eq!(embed_point(&id, &p).unwrap().matrix(), &RationalMatrix::identity(1));

        let s = build_setup(1, 2, vandermonde(3, &r(&[1, 2, 3, 4]))).unwrap();
        let e1 = TnnPoint::new(RationalMatrix::from_i64(&[&[1, 0, 0, 0]])).unwrap();
        let emb = embed_point(&s, &e1).unwrap();
        assert!(emb.matrix().entries().iter().all(|e| *e == Rational::new(1, 3)));
    }

    #[test]
    fn embed_rejects_rank_drop() {
        let s = build_setup(1, 1, RationalMatrix::from_i64(&[&[1, -1, 0], &[0, 1, -1]])).unwrap();
        let p = TnnPoint::new(RationalMatrix::from_i64(&[&[1, 1, 1]])).unwrap();
        assert_eq!(
            embed_point(&s, &p),
            Err(EmbeddingError::NotWellDefined { image_rank: 0, k: 1 })
        );
    }
}
