use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::LinalgError;

/// A strictly increasing set of 1-based indices, e.g. the columns of a maximal minor.
///
/// Ordering is colexicographic: compare the largest elements first. Every
/// subset-indexed table in the crate iterates in this order.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct IndexSubset(Vec<usize>);

impl IndexSubset {
    pub fn new(members: Vec<usize>) -> Result<Self, LinalgError> {
        if members.contains(&0) {
            return Err(LinalgError::IndexOutOfRange { index: 0, bound: 0 });
        }
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LinalgError::Subset(format!(
                "indices must be strictly increasing: {members:?}"
            )));
        }
        Ok(IndexSubset(members))
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(mut members: Vec<usize>) -> Result<Self, LinalgError> {
        members.sort_unstable();
        members.dedup();
        Self::new(members)
    }

    /// `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        IndexSubset((1..=n).collect())
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Checks every member against an upper bound `n`.
    pub fn check_bound(&self, n: usize) -> Result<(), LinalgError> {
        match self.max() {
            Some(m) if m > n => Err(LinalgError::IndexOutOfRange { index: m, bound: n }),
            _ => Ok(()),
        }
    }

    /// 0-based positions, for indexing into storage.
    pub fn zero_based(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|i| i - 1)
    }
}

impl Ord for IndexSubset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .iter()
            .rev()
            .cmp(other.0.iter().rev())
            .then_with(|| self.0.len().cmp(&other.0.len()))
    }
}

impl PartialOrd for IndexSubset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for IndexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for IndexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<'de> Deserialize<'de> for IndexSubset {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let members = Vec::<usize>::deserialize(deserializer)?;
        IndexSubset::new(members).map_err(serde::de::Error::custom)
    }
}

/// All k-subsets of `{1..n}` in colexicographic order.
pub fn k_subsets(n: usize, k: usize) -> ColexSubsets {
    ColexSubsets {
        n,
        current: if k <= n { Some((1..=k).collect()) } else { None },
    }
}

pub struct ColexSubsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for ColexSubsets {
    type Item = IndexSubset;

    fn next(&mut self) -> Option<IndexSubset> {
        let cur = self.current.take()?;
        let out = IndexSubset(cur.clone());
        // successor: bump the first entry that can move up without colliding
        let mut next = cur;
        let k = next.len();
        let mut advanced = false;
        for i in 0..k {
            let limit = if i + 1 < k { next[i + 1] } else { self.n + 1 };
            if next[i] + 1 < limit {
                next[i] += 1;
                for (j, slot) in next.iter_mut().enumerate().take(i) {
                    *slot = j + 1;
                }
                advanced = true;
                break;
            }
        }
        if advanced {
            self.current = Some(next);
        }
        Some(out)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subs(n: usize, k: usize) -> Vec<Vec<usize>> {
        k_subsets(n, k).map(|s| s.members().to_vec()).collect()
    }

    #[test]
    fn colex_order_n4_k2() {
        assert_eq!(
            subs(4, 2),
            vec![vec![1, 2], vec![1, 3], vec![2, 3], vec![1, 4], vec![2, 4], vec![3, 4]]
        );
    }

    #[test]
    fn counts_match_binomial() {
        for n in 0..8 {
            for k in 0..=n + 1 {
                assert_eq!(k_subsets(n, k).count(), binomial(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn iteration_agrees_with_ord() {
        let all: Vec<_> = k_subsets(6, 3).collect();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    #[test]
    fn rejects_bad_subsets() {
        assert!(IndexSubset::new(vec![2, 1]).is_err());
        assert!(IndexSubset::new(vec![0, 1]).is_err());
        assert!(IndexSubset::new(vec![1, 1]).is_err());
        assert!(IndexSubset::new(vec![1, 5]).unwrap().check_bound(4).is_err());
    }
}
