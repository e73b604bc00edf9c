//! TOML suite manifests.
//!
//! ```toml
//! suite = "nightly"
//! entry = "fixtures"
//!
//! [plan]
//! max_cases = 200
//! timeout_secs = 1.0
//! seed = 7
//! only = ["fisher_*"]
//! jobs = 2
//! ```

use std::path::Path;
use std::time::Duration;

use serde::Deserialize;

use crate::autotest::TestPlan;
use crate::fixtures::{self, Suite};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    /// Display name; defaults to the entry point.
    pub suite: Option<String>,
    /// Name of a built-in registration routine.
    pub entry: String,
    #[serde(default)]
    pub plan: PlanOverrides,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanOverrides {
    pub max_cases: Option<usize>,
    pub timeout_secs: Option<f64>,
    pub seed: Option<u64>,
    pub only: Option<Vec<String>>,
    pub jobs: Option<usize>,
    pub max_kills: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid manifest: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("unknown entry point `{0}`")]
    UnknownEntry(String),
    #[error("invalid plan: {0}")]
    Plan(String),
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self, ManifestError> {
        let m: Manifest = toml::from_str(text)?;
        m.resolve()?;
        m.plan.apply(TestPlan::default())?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Manifest::parse(&text)
    }

    /// Manifest selecting a built-in suite with no overrides.
    pub fn builtin(entry: &str) -> Result<Self, ManifestError> {
        let m = Manifest {
            suite: None,
            entry: entry.into(),
            plan: PlanOverrides::default(),
        };
        m.resolve()?;
        Ok(m)
    }

    pub fn resolve(&self) -> Result<Suite, ManifestError> {
        fixtures::suite(&self.entry).ok_or_else(|| ManifestError::UnknownEntry(self.entry.clone()))
    }

    pub fn name(&self) -> &str {
        self.suite.as_deref().unwrap_or(&self.entry)
    }
}

impl PlanOverrides {
    pub fn apply(&self, mut plan: TestPlan) -> Result<TestPlan, ManifestError> {
        if let Some(n) = self.max_cases {
            plan.max_cases = n;
        }
        if let Some(s) = self.timeout_secs {
            plan.case_timeout = Duration::try_from_secs_f64(s).map_err(|e| ManifestError::Plan(e.to_string()))?;
        }
        if let Some(s) = self.seed {
            plan.seed = s;
        }
        if let Some(o) = &self.only {
            plan.only = o.clone();
        }
        if let Some(j) = self.jobs {
            plan.jobs = j;
        }
        if let Some(k) = self.max_kills {
            plan.max_kills = k;
        }
        plan.validate().map_err(|e| ManifestError::Plan(e.to_string()))?;
        Ok(plan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_manifest() {
        let m = Manifest::parse(
            "suite = \"nightly\"\nentry = \"fixtures\"\n[plan]\nmax_cases = 5\ntimeout_secs = 0.5\nonly = [\"d*\"]\n",
        )
        .unwrap();
        assert_eq!(m.name(), "nightly");
        let p = m.plan.apply(TestPlan::default()).unwrap();
        assert_eq!(p.max_cases, 5);
        assert_eq!(p.case_timeout, Duration::from_millis(500));
        assert_eq!(p.seed, 0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Manifest::parse("entry = \"nope\""),
            Err(ManifestError::UnknownEntry(_))
        ));
        assert!(matches!(Manifest::parse("entry = 3"), Err(ManifestError::Toml(_))));
        assert!(matches!(
            Manifest::parse("entry = \"examples\"\ncolour = 1"),
            Err(ManifestError::Toml(_))
        ));
        assert!(matches!(
            Manifest::parse("entry = \"examples\"\n[plan]\ntimeout_secs = 0.0"),
            Err(ManifestError::Plan(_))
        ));
        assert!(matches!(
            Manifest::parse("entry = \"examples\"\n[plan]\nonly = [\"[\"]"),
            Err(ManifestError::Plan(_))
        ));
    }
}
