//! Randomized campaigns over many pairs.
//!
//! Trial `i` (counting across all dimensions in order) uses seed `base_seed + i`.
//! Trials may run on any number of threads; results are gathered in trial order, so
//! the report does not depend on the degree of concurrency.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::projections::random_pair;

use super::{
    check_corollary, check_lemma_commutator, check_lemma_product_power, check_nw_block,
    check_power_expansion, check_theorem, VerifyError, DEFAULT_M_MAX, DEFAULT_N_MAX, DEFAULT_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Theorem,
    Corollary,
    LemmaProductPower,
    LemmaCommutator,
    PowerExpansion,
    NwBlock,
}

impl CheckKind {
    pub const ALL: [CheckKind; 6] = [
        CheckKind::Theorem,
        CheckKind::Corollary,
        CheckKind::LemmaProductPower,
        CheckKind::LemmaCommutator,
        CheckKind::PowerExpansion,
        CheckKind::NwBlock,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Theorem => "theorem",
            CheckKind::Corollary => "corollary",
            CheckKind::LemmaProductPower => "lemma_product_power",
            CheckKind::LemmaCommutator => "lemma_commutator",
            CheckKind::PowerExpansion => "power_expansion",
            CheckKind::NwBlock => "nw_block",
        }
    }

    pub fn parse(s: &str) -> Option<CheckKind> {
        CheckKind::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub dims: Vec<usize>,
    pub trials_per_dim: usize,
    pub base_seed: u64,
    pub tol: f64,
    pub n_max: usize,
    pub m_max: usize,
    pub checks: Vec<CheckKind>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 4, 8, 16],
            trials_per_dim: 200,
            base_seed: 0,
            tol: DEFAULT_TOL,
            n_max: DEFAULT_N_MAX,
            m_max: DEFAULT_M_MAX,
            checks: CheckKind::ALL.to_vec(),
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<(), VerifyError> {
        let bad = |m: &str| Err(VerifyError::InvalidArgument(m.to_string()));
        if self.dims.contains(&0) {
            return bad("dims must be positive");
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return bad("tol must be a finite nonnegative number");
        }
        if self.n_max == 0 || self.m_max == 0 {
            return bad("n_max and m_max must be at least 1");
        }
        Ok(())
    }

    pub fn total_trials(&self) -> usize {
        self.dims.len() * self.trials_per_dim
    }

    /// `(dim, seed)` for global trial index `i`.
    pub fn trial(&self, i: usize) -> (usize, u64) {
        (self.dims[i / self.trials_per_dim], self.base_seed.wrapping_add(i as u64))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub trials: usize,
    pub max_residual: f64,
    /// Trial indices that failed, including trials that errored.
    pub failures: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialError {
    pub trial: usize,
    pub check: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub per_check: Vec<CheckSummary>,
    pub errors: Vec<TrialError>,
    /// `"pass"` or `"fail"`.
    pub verdict: String,
}

impl CampaignReport {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    pub fn summary(&self, check: CheckKind) -> Option<&CheckSummary> {
        self.per_check.iter().find(|s| s.name == check.name())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Per-check `(residual, pass)` or an error message, for one trial.
type CheckOutcome = Result<(f64, bool), String>;

enum TrialOutcome {
    Construction(String),
    Checks(Vec<CheckOutcome>),
}

fn run_one(config: &CampaignConfig, i: usize) -> TrialOutcome {
    let (dim, seed) = config.trial(i);
    let pair = match random_pair(dim, seed) {
        Ok(p) => p,
        Err(e) => return TrialOutcome::Construction(e.to_string()),
    };
    let tol = config.tol;
    let outcomes = config
        .checks
        .iter()
        .map(|&kind| {
            let report = match kind {
                CheckKind::Theorem => check_theorem(&pair, tol),
                CheckKind::Corollary => check_corollary(&pair, tol),
                CheckKind::LemmaProductPower => check_lemma_product_power(&pair, config.m_max, tol),
                CheckKind::LemmaCommutator => check_lemma_commutator(&pair, tol),
                CheckKind::PowerExpansion => check_power_expansion(&pair, config.n_max, tol),
                CheckKind::NwBlock => check_nw_block(&pair, config.n_max, tol),
            };
            report.map(|r| (r.residual, r.pass)).map_err(|e| e.to_string())
        })
        .collect();
    TrialOutcome::Checks(outcomes)
}

/// Runs every configured check on `trials_per_dim` random pairs per dimension.
///
/// `threads` caps the worker count; `None` uses the global rayon pool. A failure to
/// build a pair or to run one check is recorded against that trial and the campaign
/// carries on.
pub fn run_trials(config: &CampaignConfig, threads: Option<usize>) -> Result<CampaignReport, VerifyError> {
    config.validate()?;
    let total = config.total_trials();
    let work = || -> Vec<TrialOutcome> {
        (0..total)
            .into_par_iter()
            .map(|i| run_one(config, i))
            .collect()
    };
    let outcomes = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| VerifyError::ThreadPool(e.to_string()))?
            .install(work),
        None => work(),
    };

    let mut per_check: Vec<CheckSummary> = config
        .checks
        .iter()
        .map(|k| CheckSummary {
            name: k.name().to_string(),
            trials: 0,
            max_residual: 0.0,
            failures: Vec::new(),
        })
        .collect();
    let mut errors = Vec::new();

    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            TrialOutcome::Construction(message) => {
                errors.push(TrialError {
                    trial: i,
                    check: None,
                    message,
                });
                for s in &mut per_check {
                    s.trials += 1;
                    s.failures.push(i);
                }
            }
            TrialOutcome::Checks(results) => {
                for ((s, kind), result) in per_check.iter_mut().zip(&config.checks).zip(results) {
                    s.trials += 1;
                    match result {
                        Ok((residual, pass)) => {
                            if residual.is_nan() || residual > s.max_residual {
                                s.max_residual = residual;
                            }
                            if !pass {
                                s.failures.push(i);
                            }
                        }
                        Err(message) => {
                            s.failures.push(i);
                            errors.push(TrialError {
                                trial: i,
                                check: Some(kind.name().to_string()),
                                message,
                            });
                        }
                    }
                }
            }
        }
    }

    let pass = errors.is_empty() && per_check.iter().all(|s| s.failures.is_empty());
    Ok(CampaignReport {
        config: config.clone(),
        per_check,
        errors,
        verdict: if pass { "pass" } else { "fail" }.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> CampaignConfig {
        CampaignConfig {
            dims: vec![2, 3, 5],
            trials_per_dim: 4,
            base_seed: 11,
            ..CampaignConfig::default()
        }
    }

    #[test]
    fn empty_campaign_passes() {
        let cfg = CampaignConfig {
            trials_per_dim: 0,
            ..CampaignConfig::default()
        };
        let r = run_trials(&cfg, None).unwrap();
        assert!(r.passed());
        assert!(r.per_check.iter().all(|s| s.trials == 0 && s.max_residual == 0.0));
    }

    #[test]
    fn small_campaign_passes() {
        let r = run_trials(&small_config(), Some(1)).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert_eq!(r.per_check.len(), 6);
        assert!(r.per_check.iter().all(|s| s.trials == 12));
    }

    #[test]
    fn thread_count_does_not_change_the_report() {
        let a = run_trials(&small_config(), Some(1)).unwrap().to_json();
        let b = run_trials(&small_config(), Some(3)).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn seeds_follow_global_trial_index() {
        let cfg = small_config();
        assert_eq!(cfg.trial(0), (2, 11));
        assert_eq!(cfg.trial(4), (3, 15));
        assert_eq!(cfg.trial(11), (5, 22));
    }

    #[test]
    fn impossible_tolerance_records_failures() {
        let cfg = CampaignConfig {
            dims: vec![4],
            trials_per_dim: 3,
            tol: 0.0,
            checks: vec![CheckKind::PowerExpansion],
            ..CampaignConfig::default()
        };
        let r = run_trials(&cfg, Some(1)).unwrap();
        assert!(!r.passed());
        assert!(!r.per_check[0].failures.is_empty());
    }

    #[test]
    fn zero_dimension_is_rejected() {
        let cfg = CampaignConfig {
            dims: vec![0],
            ..small_config()
        };
        assert!(run_trials(&cfg, None).is_err());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = small_config();
        cfg.tol = -1.0;
        assert!(run_trials(&cfg, None).is_err());
        cfg.tol = 1e-8;
        cfg.n_max = 0;
        assert!(run_trials(&cfg, None).is_err());
    }

    #[test]
    fn check_names_roundtrip() {
        for k in CheckKind::ALL {
            assert_eq!(CheckKind::parse(k.name()), Some(k));
        }
        assert_eq!(CheckKind::parse("nope"), None);
    }
}
