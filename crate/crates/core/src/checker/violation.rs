use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Error raised by a wrapped function body; propagated unchanged.
pub type HostError = Box<dyn core::error::Error + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ViolationKind {
    ArgumentType,
    ReturnType,
    EntryCondition,
    ExitCondition,
    ContractMalformed,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Rendered bindings of one execution involved in a failure.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WitnessFrame {
    /// Backtick depth the execution was bound to (0 for the current call).
    pub depth: u32,
    pub seq_no: u64,
    /// `false` for executions drawn from the history reservoir.
    pub current: bool,
    pub values: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ViolationReport {
    pub kind: ViolationKind,
    pub function: String,
    /// Offending type name or condition source.
    pub detail: String,
    pub argument: Option<String>,
    /// Offending element or value, rendered.
    pub offender: Option<String>,
    /// Evaluation error text when the condition could not be decided.
    pub message: Option<String>,
    pub witness: Vec<WitnessFrame>,
    /// Set when the failing condition referenced past executions.
    pub hyperproperty: bool,
}

impl ViolationReport {
    pub(crate) fn new(kind: ViolationKind, function: &str, detail: impl Into<String>) -> Self {
        ViolationReport {
            kind,
            function: function.into(),
            detail: detail.into(),
            argument: None,
            offender: None,
            message: None,
            witness: Vec::new(),
            hyperproperty: false,
        }
    }

    /// Sequence numbers of the past executions in the witness.
    pub fn past_seq_nos(&self) -> Vec<u64> {
        self.witness.iter().filter(|w| !w.current).map(|w| w.seq_no).collect()
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violation in `{}`: ", self.kind, self.function)?;
        match self.kind {
            ViolationKind::ArgumentType => write!(
                f,
                "argument `{}` is not {}",
                self.argument.as_deref().unwrap_or("?"),
                self.detail
            )?,
            ViolationKind::ReturnType => write!(f, "return value is not {}", self.detail)?,
            ViolationKind::EntryCondition | ViolationKind::ExitCondition => {
                write!(f, "condition `{}` failed", self.detail)?
            }
            ViolationKind::ContractMalformed => f.write_str(&self.detail)?,
        }
        if let Some(o) = &self.offender {
            write!(f, "; offending {o}")?;
        }
        if let Some(m) = &self.message {
            write!(f, "; {m}")?;
        }
        for w in &self.witness {
            let role = if w.current { "current" } else { "past" };
            write!(f, "\n  {role} call #{} at depth {}:", w.seq_no, w.depth)?;
            for (k, v) in &w.values {
                write!(f, " {k}={v}")?;
            }
        }
        Ok(())
    }
}

impl core::error::Error for ViolationReport {}

#[derive(Debug, Error)]
pub enum CallError {
    #[error("{0}")]
    Violation(Box<ViolationReport>),
    #[error("{0}")]
    Host(HostError),
    #[error("bad arguments: {0}")]
    BadArguments(String),
}

impl CallError {
    pub fn violation(&self) -> Option<&ViolationReport> {
        match self {
            CallError::Violation(v) => Some(v),
            _ => None,
        }
    }
}

impl From<ViolationReport> for CallError {
    fn from(v: ViolationReport) -> Self {
        CallError::Violation(Box::new(v))
    }
}
