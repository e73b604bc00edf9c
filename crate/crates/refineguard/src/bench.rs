//! Checks-on versus checks-off timing.
//!
//! Each run times three arms over the same prepared arguments: the wrapper
//! with checking on, the wrapper with checking off, and the bare body. Arm
//! order is shuffled per run from the seed.

use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use refineguard_core::checker::{Arguments, ContractedFunction, Registry};
use serde::{Deserialize, Serialize};

type ArgsFn = Arc<dyn Fn(usize) -> Arguments + Send + Sync>;

#[derive(Clone)]
pub struct Workload {
    pub name: String,
    pub function: String,
    pub calls: usize,
    args: ArgsFn,
}

impl std::fmt::Debug for Workload {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Workload")
            .field("name", &self.name)
            .field("function", &self.function)
            .field("calls", &self.calls)
            .finish()
    }
}

impl Workload {
    pub fn new(
        name: impl Into<String>,
        function: impl Into<String>,
        calls: usize,
        args: impl Fn(usize) -> Arguments + Send + Sync + 'static,
    ) -> Self {
        Workload {
            name: name.into(),
            function: function.into(),
            calls,
            args: Arc::new(args),
        }
    }

    pub fn with_calls(mut self, calls: usize) -> Self {
        self.calls = calls;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub sem: f64,
}

impl Stat {
    /// Mean and standard error of the mean; `sem` is NaN below two samples.
    pub fn of(xs: &[f64]) -> Stat {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Stat {
            mean,
            sem: (var / n).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub workload: String,
    pub function: String,
    pub calls: usize,
    pub runs: usize,
    /// Seconds per run.
    pub checked: Stat,
    pub unchecked: Stat,
    pub bare: Stat,
    /// `checked.mean / unchecked.mean`.
    pub slowdown: f64,
    /// `unchecked.mean / bare.mean`: the cost of the wrapper alone.
    pub disabled_overhead: f64,
    /// Both wrapper arms ran with checking off.
    pub checks_disabled: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("no function `{0}` is registered for this workload")]
    MissingFunction(String),
    #[error("at least two runs are needed for a standard error")]
    TooFewRuns,
    #[error("call {call} of `{workload}` failed: {message}")]
    CallFailed {
        workload: String,
        call: usize,
        message: String,
    },
}

#[derive(Clone, Copy)]
enum Arm {
    Checked,
    Unchecked,
    Bare,
}

fn time_arm(f: &ContractedFunction, arm: Arm, checks: bool, args: &[Arguments], w: &Workload) -> Result<f64, BenchError> {
    let g = f.fresh();
    g.set_checking(Some(matches!(arm, Arm::Checked) && checks));
    let fail = |call: usize, message: String| BenchError::CallFailed {
        workload: w.name.clone(),
        call,
        message,
    };
    let start = Instant::now();
    match arm {
        Arm::Bare => {
            for (i, a) in args.iter().enumerate() {
                let mut a = a.clone();
                std::hint::black_box(g.call_bare(&mut a).map_err(|e| fail(i, e.to_string()))?);
            }
        }
        Arm::Checked | Arm::Unchecked => {
            for (i, a) in args.iter().enumerate() {
                std::hint::black_box(g.call(a.clone()).map_err(|e| fail(i, e.to_string()))?);
            }
        }
    }
    Ok(start.elapsed().as_secs_f64())
}

/// Runs `w` `runs` times per arm. With `checks` false the checked arm also
/// runs with checking off.
pub fn run_workload(
    registry: &Registry,
    w: &Workload,
    runs: usize,
    seed: u64,
    checks: bool,
) -> Result<BenchResult, BenchError> {
    if runs < 2 {
        return Err(BenchError::TooFewRuns);
    }
    let f = registry
        .get(&w.function)
        .ok_or_else(|| BenchError::MissingFunction(w.function.clone()))?;
    let args: Vec<Arguments> = (0..w.calls).map(|i| (w.args)(i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut on, mut off, mut bare) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..runs {
        let mut order = [Arm::Checked, Arm::Unchecked, Arm::Bare];
        order.shuffle(&mut rng);
        for arm in order {
            let t = time_arm(&f, arm, checks, &args, w)?;
            match arm {
                Arm::Checked => on.push(t),
                Arm::Unchecked => off.push(t),
                Arm::Bare => bare.push(t),
            }
        }
    }
    let (checked, unchecked, bare) = (Stat::of(&on), Stat::of(&off), Stat::of(&bare));
    Ok(BenchResult {
        workload: w.name.clone(),
        function: w.function.clone(),
        calls: w.calls,
        runs,
        checked,
        unchecked,
        bare,
        slowdown: checked.mean / unchecked.mean,
        disabled_overhead: unchecked.mean / bare.mean,
        checks_disabled: !checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stat_matches_hand_computation() {
        let s = Stat::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        // sample variance 5/3, sem = sqrt(5/3 / 4)
        assert!((s.sem - (5.0f64 / 12.0).sqrt()).abs() < 1e-12);
    }
}
