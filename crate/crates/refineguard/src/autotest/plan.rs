use std::time::Duration;

use globset::{Glob, GlobSet, GlobSetBuilder};
use serde::{Deserialize, Serialize};

pub const DEFAULT_MAX_CASES: usize = 100;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(2);
/// Raw draws allowed per requested case before giving up on a precondition.
pub const DRAW_BUDGET_FACTOR: usize = 20;
pub const DEFAULT_MAX_KILLS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestPlan {
    pub max_cases: usize,
    #[serde(with = "secs")]
    pub case_timeout: Duration,
    pub seed: u64,
    /// Glob patterns over function names; empty selects everything.
    pub only: Vec<String>,
    pub jobs: usize,
    /// A function stops being tested after this many killed cases.
    pub max_kills: usize,
}

impl Default for TestPlan {
    fn default() -> Self {
        TestPlan {
            max_cases: DEFAULT_MAX_CASES,
            case_timeout: DEFAULT_TIMEOUT,
            seed: 0,
            only: Vec::new(),
            jobs: 1,
            max_kills: DEFAULT_MAX_KILLS,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PlanError {
    #[error("case timeout must be positive")]
    ZeroTimeout,
    #[error("bad name pattern: {0}")]
    Pattern(#[from] globset::Error),
}

impl TestPlan {
    pub fn draw_budget(&self) -> usize {
        self.max_cases.max(1) * DRAW_BUDGET_FACTOR
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        if self.case_timeout.is_zero() {
            return Err(PlanError::ZeroTimeout);
        }
        self.matcher().map(drop)
    }

    pub(crate) fn matcher(&self) -> Result<Option<GlobSet>, PlanError> {
        if self.only.is_empty() {
            return Ok(None);
        }
        let mut b = GlobSetBuilder::new();
        for p in &self.only {
            b.add(Glob::new(p)?);
        }
        Ok(Some(b.build()?))
    }
}

mod secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let x = f64::deserialize(d)?;
        Duration::try_from_secs_f64(x).map_err(serde::de::Error::custom)
    }
}
