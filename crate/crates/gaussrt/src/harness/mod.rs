//! Numerical verification suites.
//!
//! Each suite samples instances from a seeded generator, evaluates the
//! quantifiers and records every check in a [`SuiteReport`]. Reports are
//! deterministic for a fixed [`ExperimentConfig`].

pub mod free;
mod suites;

use std::fmt;
use std::str::FromStr;

use gaussrt_core::cones::{cone_spec, kappa_with, KappaOptions, Method, Theory};
use gaussrt_core::{Matrix, ModePartition};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub use suites::{
    run_agreement, run_convexity, run_duality, run_hierarchy, run_monotonicity, run_nogo,
    run_overlap, run_tensorization, run_williamson,
};

/// Largest number of modes handed to the SDP-backed theories.
pub const SDP_MODE_LIMIT: usize = 10;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] gaussrt_core::Error),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Fock(#[from] crate::fock::FockError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Tensorization,
    Monotonicity,
    Nogo,
    Hierarchy,
    Convexity,
    Agreement,
    Duality,
    Williamson,
    Overlap,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Tensorization,
        Suite::Monotonicity,
        Suite::Nogo,
        Suite::Hierarchy,
        Suite::Convexity,
        Suite::Agreement,
        Suite::Duality,
        Suite::Williamson,
        Suite::Overlap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Tensorization => "tensorization",
            Suite::Monotonicity => "monotonicity",
            Suite::Nogo => "nogo",
            Suite::Hierarchy => "hierarchy",
            Suite::Convexity => "convexity",
            Suite::Agreement => "agreement",
            Suite::Duality => "duality",
            Suite::Williamson => "williamson",
            Suite::Overlap => "overlap",
        }
    }

    pub fn run(self, cfg: &ExperimentConfig) -> Result<SuiteReport, HarnessError> {
        cfg.validate()?;
        match self {
            Suite::Tensorization => run_tensorization(cfg),
            Suite::Monotonicity => run_monotonicity(cfg),
            Suite::Nogo => run_nogo(cfg),
            Suite::Hierarchy => run_hierarchy(cfg),
            Suite::Convexity => run_convexity(cfg),
            Suite::Agreement => run_agreement(cfg),
            Suite::Duality => run_duality(cfg),
            Suite::Williamson => run_williamson(cfg),
            Suite::Overlap => run_overlap(cfg),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown suite `{s}`")))
    }
}

/// Settings shared by all suites. Every field has a default, so a config
/// file only lists what it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Theory names, or `["all"]` for the four standard theories.
    pub theories: Vec<String>,
    pub seed: u64,
    /// Slack on every quantifier comparison.
    pub tol: f64,
    /// Slack on witness normalization identities.
    pub witness_tol: f64,
    /// Random instances per theory (0 picks the suite default).
    pub samples: usize,
    /// Two-mode squeezing values of the benchmark grid.
    pub r_grid: Vec<f64>,
    /// No-go experiment: source and target two-mode squeezing.
    pub source_r: f64,
    pub target_r: f64,
    pub max_copies_sdp: usize,
    pub max_copies_analytic: usize,
    /// Free channels sampled per theory in the no-go suite.
    pub channel_samples: usize,
    pub fock_cutoff: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            theories: vec!["all".into()],
            seed: 20_180_607,
            tol: 1e-6,
            witness_tol: 1e-7,
            samples: 0,
            r_grid: vec![0.1, 0.5, 1.0],
            source_r: 0.3,
            target_r: 0.8,
            max_copies_sdp: 4,
            max_copies_analytic: 8,
            channel_samples: 100,
            fock_cutoff: crate::fock::DEFAULT_CUTOFF,
        }
    }
}

pub const STANDARD_THEORIES: [Theory; 4] = [
    Theory::Nonclassicality,
    Theory::Ppt,
    Theory::Separability,
    Theory::Steering,
];

impl ExperimentConfig {
    pub fn theories(&self) -> Result<Vec<Theory>, HarnessError> {
        let mut out = Vec::new();
        for name in &self.theories {
            if name == "all" {
                out.extend(STANDARD_THEORIES);
            } else {
                out.push(
                    name.parse()
                        .map_err(|e: gaussrt_core::Error| HarnessError::Config(e.to_string()))?,
                );
            }
        }
        out.dedup();
        if out.is_empty() {
            return Err(HarnessError::Config("no theories selected".into()));
        }
        Ok(out)
    }

    pub fn samples_or(&self, default: usize) -> usize {
        if self.samples == 0 {
            default
        } else {
            self.samples
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.theories()?;
        if !(self.tol > 0.0 && self.witness_tol > 0.0) {
            return Err(HarnessError::Config("tolerances must be positive".into()));
        }
        if 2 * self.max_copies_sdp > SDP_MODE_LIMIT {
            return Err(HarnessError::Config(format!(
                "{} copies of a two-mode state exceed the {SDP_MODE_LIMIT}-mode SDP limit",
                self.max_copies_sdp
            )));
        }
        if self.max_copies_sdp == 0 || self.max_copies_analytic == 0 {
            return Err(HarnessError::Config("copy counts must be positive".into()));
        }
        Ok(())
    }

    pub fn max_copies(&self, theory: Theory) -> usize {
        if theory.has_analytic() {
            self.max_copies_analytic
        } else {
            self.max_copies_sdp
        }
    }
}

/// One failed check, with enough context to reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub check: String,
    pub instance: String,
    pub value: f64,
    pub bound: f64,
    /// Error message when the instance could not be evaluated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<Failure>,
    /// Largest observed deviation over all tolerance checks.
    pub max_deviation: f64,
    pub records: Vec<Value>,
    /// Conclusions derived from the computed values.
    pub summary: Vec<String>,
}

impl SuiteReport {
    pub fn new(suite: Suite, seed: u64) -> Self {
        Self {
            suite: suite.name().into(),
            seed,
            passed: true,
            checks: 0,
            failures: Vec::new(),
            max_deviation: 0.0,
            records: Vec::new(),
            summary: Vec::new(),
        }
    }

    fn fail(&mut self, check: &str, instance: &str, value: f64, bound: f64) {
        self.passed = false;
        self.failures.push(Failure {
            check: check.into(),
            instance: instance.into(),
            value,
            bound,
            detail: None,
        });
    }

    /// Unwraps the evaluation of one instance; an error counts as a failed
    /// check and the instance is skipped.
    pub fn attempt<T>(&mut self, instance: &str, r: Result<T, HarnessError>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checks += 1;
                self.passed = false;
                self.failures.push(Failure {
                    check: "evaluation".into(),
                    instance: instance.into(),
                    value: f64::NAN,
                    bound: f64::NAN,
                    detail: Some(e.to_string()),
                });
                None
            }
        }
    }

    /// `|value - expected| <= tol`.
    pub fn close(
        &mut self,
        check: &str,
        instance: &str,
        value: f64,
        expected: f64,
        tol: f64,
    ) -> bool {
        self.checks += 1;
        let dev = (value - expected).abs();
        self.max_deviation = self.max_deviation.max(dev);
        if dev <= tol {
            true
        } else {
            self.fail(check, instance, value, expected);
            false
        }
    }

    /// `value <= bound + tol`.
    pub fn at_most(
        &mut self,
        check: &str,
        instance: &str,
        value: f64,
        bound: f64,
        tol: f64,
    ) -> bool {
        self.checks += 1;
        self.max_deviation = self.max_deviation.max(value - bound);
        if value <= bound + tol {
            true
        } else {
            self.fail(check, instance, value, bound);
            false
        }
    }

    pub fn holds(&mut self, check: &str, instance: &str, ok: bool) -> bool {
        self.checks += 1;
        if !ok {
            self.fail(check, instance, f64::NAN, f64::NAN);
        }
        ok
    }

    pub fn record(&mut self, v: Value) {
        self.records.push(v);
    }

    /// One-line verdict.
    pub fn headline(&self) -> String {
        format!(
            "{}: {} ({} checks, {} failures, max deviation {})",
            self.suite,
            if self.passed { "PASS" } else { "FAIL" },
            self.checks,
            self.failures.len(),
            crate::format::fmt_num(self.max_deviation)
        )
    }
}

/// `kappa` with the default method for the theory (closed form when one
/// exists), without a witness.
pub fn kappa_value(theory: Theory, v: &Matrix, p: &ModePartition) -> Result<f64, HarnessError> {
    kappa_by(theory, v, p, Method::Auto)
}

pub fn kappa_by(
    theory: Theory,
    v: &Matrix,
    p: &ModePartition,
    method: Method,
) -> Result<f64, HarnessError> {
    let spec = cone_spec(theory, p)?;
    let opts = KappaOptions {
        method,
        witness: false,
        ..KappaOptions::default()
    };
    Ok(kappa_with(v, &spec, &opts)?.kappa)
}

/// Runs several suites and collects their reports.
pub fn run_suites(
    suites: &[Suite],
    cfg: &ExperimentConfig,
) -> Result<Vec<SuiteReport>, HarnessError> {
    suites.iter().map(|s| s.run(cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_limits() {
        let cfg: ExperimentConfig = serde_json::from_str(r#"{"seed": 3}"#).unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.theories().unwrap().len(), 4);
        let bad = ExperimentConfig {
            max_copies_sdp: 6,
            ..ExperimentConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"sed": 3}"#).is_err());
        assert!("nogo".parse::<Suite>().is_ok());
        assert!("bogus".parse::<Suite>().is_err());
    }
}
