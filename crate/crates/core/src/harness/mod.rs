//! Suites behind a common trait, selected by name at run time, with
//! deterministic CSV output.

pub mod config;
pub mod count_forms;
pub mod fixtures;
pub mod report;
pub mod suites;

pub use config::{Budgets, RunConfig};
pub use report::{Report, Row, Status};

use crate::moments::MomentKind;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("{file}:{line}: {message}")]
    Fixture { file: String, line: usize, message: String },
    #[error("io: {0}")]
    Io(String),
}

pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn run(&self, cfg: &RunConfig) -> Result<Report, HarnessError>;
}

#[derive(Default)]
pub struct Registry {
    suites: BTreeMap<&'static str, Box<dyn Suite>>,
}

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    /// Every built-in suite.
    pub fn standard() -> Self {
        let mut r = Registry::new();
        r.register(Box::new(suites::KloostermanSuite));
        r.register(Box::new(suites::PeterssonCheck));
        for kind in [MomentKind::First, MomentKind::Second, MomentKind::FirstDerivative, MomentKind::SecondDerivative] {
            r.register(Box::new(suites::MomentSuite { kind }));
        }
        r.register(Box::new(suites::EulerIdentities));
        r.register(Box::new(suites::OptimizeSuite));
        r.register(Box::new(suites::SieveCheck));
        r.register(Box::new(suites::CountForms));
        r.register(Box::new(suites::CentralValues));
        r
    }

    pub fn register(&mut self, suite: Box<dyn Suite>) {
        self.suites.insert(suite.name(), suite);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Suite> {
        self.suites.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.suites.keys().copied().collect()
    }

    pub fn describe(&self) -> Vec<(&'static str, &'static str)> {
        self.suites.values().map(|s| (s.name(), s.describe())).collect()
    }

    /// Runs a suite on a pool of `cfg.workers` threads.
    pub fn run(&self, name: &str, cfg: &RunConfig) -> Result<Report, HarnessError> {
        let suite = self.get(name).ok_or_else(|| HarnessError::UnknownSuite(name.into()))?;
        cfg.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        pool.install(|| suite.run(cfg))
    }
}

/// Runs `name` from the standard registry and writes its CSV to `cfg.out`
/// when set. Returns the report; it passed iff no row failed.
pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<Report, HarnessError> {
    let report = Registry::standard().run(name, cfg)?;
    if let Some(path) = &cfg.out {
        let file = std::fs::File::create(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        report.write_csv(std::io::BufWriter::new(file), true)?;
    }
    Ok(report)
}
