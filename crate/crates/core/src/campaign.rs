//! Seeded fiber-convexity campaigns.
//!
//! Stream 0 of the campaign seed draws the Vandermonde nodes of `Z`; trial `i`
//! uses stream `i + 1`. Trials run in parallel and are returned in index order.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amplituhedron::{build_setup, AmplituhedronSetup, SetupError};
use crate::fiber::{convexity_certificate, sample_same_fiber_pair, FiberConvexityCertificate, FiberError};
use crate::linalg::Rational;
use crate::sampling::{random_tnn_point, trial_rng};
use crate::tnn::{vandermonde, PositroidCellSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CampaignError {
    #[error("invalid campaign config: {0}")]
    Config(String),
    #[error(transparent)]
    Setup(#[from] SetupError),
    #[error("trial {index}: {source}")]
    Trial { index: u64, source: FiberError },
}

impl CampaignError {
    pub fn is_internal_consistency(&self) -> bool {
        matches!(self, CampaignError::Trial { source, .. } if source.is_internal_consistency())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CampaignConfig {
    pub seed: u64,
    pub trials: u64,
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub node_range: (Rational, Rational),
    pub precision_digits: u32,
    /// Certify `U` against itself instead of sampling a second point.
    #[serde(default)]
    pub force_trivial: bool,
}

impl CampaignConfig {
    pub fn new(seed: u64, trials: u64, k: usize, m: usize) -> Self {
        CampaignConfig {
            seed,
            trials,
            k,
            m,
            n: k + m + 1,
            node_range: (Rational::one(), Rational::from(10)),
            precision_digits: 8,
            force_trivial: false,
        }
    }

    pub fn validate(&self) -> Result<(), CampaignError> {
        if self.trials == 0 {
            return Err(CampaignError::Config("trials must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(CampaignError::Config("k must be at least 1".into()));
        }
        if self.n != self.k + self.m + 1 {
            return Err(CampaignError::Config(format!(
                "n = {} but fiber campaigns need n = k+m+1 = {}",
                self.n,
                self.k + self.m + 1
            )));
        }
        if self.node_range.0 >= self.node_range.1 {
            return Err(CampaignError::Config("node range must satisfy lo < hi".into()));
        }
        Ok(())
    }
}

/// `n` strictly increasing nodes on a grid of the open interval `(lo, hi)`.
pub fn random_nodes(rng: &mut impl Rng, n: usize, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let grid = 8 * n + 8;
    let mut picks: Vec<usize> = sample(rng, grid - 1, n).into_iter().map(|p| p + 1).collect();
    picks.sort_unstable();
    let width = hi - lo;
    picks
        .into_iter()
        .map(|p| lo + &(&width * &Rational::new(p as i64, grid as i64)))
        .collect()
}

/// The campaign's `Z`: a Vandermonde matrix on seeded nodes.
pub fn campaign_setup(config: &CampaignConfig) -> Result<AmplituhedronSetup, CampaignError> {
    config.validate()?;
    let mut rng = trial_rng(config.seed, 0);
    let nodes = random_nodes(&mut rng, config.n, &config.node_range.0, &config.node_range.1);
    Ok(build_setup(config.k, config.m, vandermonde(config.k + config.m, &nodes))?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialOutcome {
    pub index: u64,
    pub trivial: bool,
    pub rejected: usize,
    pub certificate: FiberConvexityCertificate,
}

pub fn run_trial(config: &CampaignConfig, setup: &AmplituhedronSetup, index: u64) -> Result<TrialOutcome, FiberError> {
    let mut rng = trial_rng(config.seed, index + 1);
    let u = random_tnn_point(&mut rng, setup.k(), setup.n());
    let cell = PositroidCellSpec::top(setup.k(), setup.n());
    if config.force_trivial {
        let certificate = convexity_certificate(setup, &cell, u.matrix(), u.matrix())?;
        return Ok(TrialOutcome { index, trivial: true, rejected: 0, certificate });
    }
    let pair = sample_same_fiber_pair(&mut rng, setup, &cell, &u)?;
    let certificate = convexity_certificate(setup, &cell, &pair.u, &pair.v)?;
    Ok(TrialOutcome { index, trivial: pair.is_trivial(), rejected: pair.rejected, certificate })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CampaignResult {
    pub config: CampaignConfig,
    pub setup: AmplituhedronSetup,
    pub outcomes: Vec<TrialOutcome>,
}

impl CampaignResult {
    pub fn accepted(&self) -> usize {
        self.outcomes.iter().filter(|o| o.certificate.verdict).count()
    }

    pub fn rejected_samples(&self) -> usize {
        self.outcomes.iter().map(|o| o.rejected).sum()
    }

    pub fn trivial_pairs(&self) -> usize {
        self.outcomes.iter().filter(|o| o.trivial).count()
    }

    pub fn all_true(&self) -> bool {
        self.outcomes.iter().all(|o| o.certificate.verdict)
    }
}

pub fn run_fiber_campaign(config: &CampaignConfig) -> Result<CampaignResult, CampaignError> {
    let setup = campaign_setup(config)?;
    let outcomes = (0..config.trials)
        .into_par_iter()
        .map(|index| run_trial(config, &setup, index).map_err(|source| CampaignError::Trial { index, source }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CampaignResult { config: config.clone(), setup, outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_increasing_and_inside() {
        let mut rng = trial_rng(5, 0);
        let lo = Rational::new(-1, 2);
        let hi = Rational::from(3);
        let nodes = random_nodes(&mut rng, 6, &lo, &hi);
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(nodes.iter().all(|t| *t > lo && *t < hi));
    }

    #[test]
    fn config_validation() {
        assert!(CampaignConfig::new(1, 1, 1, 2).validate().is_ok());
        let mut c = CampaignConfig::new(1, 0, 1, 2);
        assert!(c.validate().is_err());
        c.trials = 1;
        c.n = 5;
        assert!(matches!(c.validate(), Err(CampaignError::Config(_))));
    }

    #[test]
    fn campaign_is_deterministic_and_true() {
        let config = CampaignConfig::new(42, 20, 1, 2);
        let a = run_fiber_campaign(&config).unwrap();
        let b = run_fiber_campaign(&config).unwrap();
        assert_eq!(a, b);
        assert!(a.setup.all_minors_positive());
        assert!(a.all_true());
        assert_eq!(a.outcomes.iter().map(|o| o.index).collect::<Vec<_>>(), (0..20).collect::<Vec<_>>());
        assert!(a.trivial_pairs() < 20);
    }

    #[test]
    fn forced_trivial_pairs() {
        let mut config = CampaignConfig::new(3, 2, 2, 1);
        config.force_trivial = true;
        let result = run_fiber_campaign(&config).unwrap();
        assert_eq!(result.trivial_pairs(), 2);
        assert!(result.all_true());
        assert!(result.outcomes[0].certificate.minors.iter().all(|c| c.beta.is_zero()));
    }
}
