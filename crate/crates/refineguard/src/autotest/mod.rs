//! Generator-driven testing of every registered function.
//!
//! Argument tuples come from the types' own generators, combined along
//! diagonals of the cartesian product. Candidates failing an entry
//! condition are discarded; the rest are run through the checker with a
//! per-case timeout on a worker thread.

mod enumerate;
mod plan;
pub mod shrink;

use std::any::Any;
use std::ops::ControlFlow;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use refineguard_core::checker::{Arguments, CallError, ContractedFunction, Registry, ViolationKind, ViolationReport};
use refineguard_core::types::Type;
use refineguard_core::Value;

use enumerate::Streams;
pub use plan::{PlanError, TestPlan, DEFAULT_MAX_CASES, DEFAULT_MAX_KILLS, DEFAULT_TIMEOUT, DRAW_BUDGET_FACTOR};

#[derive(Debug, Clone, PartialEq)]
pub enum Untestable {
    /// A declared argument type cannot produce values.
    UngeneratableArgType { argument: String },
    /// Every draw in the budget failed an entry condition.
    NoCandidatePassedRequires { draws: usize },
    /// An argument was declared without a type.
    UnspecifiedTypes { argument: String },
}

impl Untestable {
    pub fn code(&self) -> &'static str {
        match self {
            Untestable::UngeneratableArgType { .. } => "ungeneratable-arg-type",
            Untestable::NoCandidatePassedRequires { .. } => "no-candidate-passed-requires",
            Untestable::UnspecifiedTypes { .. } => "unspecified-types",
        }
    }
}

/// A failing case, with what is needed to replay it.
#[derive(Debug, Clone)]
pub struct Failure {
    /// Arguments after shrinking.
    pub args: Arguments,
    /// Arguments as generated.
    pub original_args: Arguments,
    /// Arguments of the earlier calls the failure depends on, in call
    /// order; empty unless a condition over past executions failed.
    pub history: Vec<Arguments>,
    pub seed: u64,
    /// Index of the failing case among the cases run.
    pub case: usize,
    pub violation: Option<ViolationReport>,
    pub error: String,
}

impl Failure {
    pub fn hyperproperty(&self) -> bool {
        self.violation.as_ref().is_some_and(|v| v.hyperproperty)
    }
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Passed { cases: usize },
    Failed(Box<Failure>),
    Untestable(Untestable),
    TimedOut { killed: usize, completed: usize },
}

impl Outcome {
    pub fn code(&self) -> &'static str {
        match self {
            Outcome::Passed { .. } => "passed",
            Outcome::Failed(_) => "failed",
            Outcome::Untestable(_) => "untestable",
            Outcome::TimedOut { .. } => "timed_out",
        }
    }
}

#[derive(Debug, Clone)]
pub struct FunctionReport {
    pub name: String,
    pub outcome: Outcome,
    /// Invocations that reached the function body.
    pub cases: usize,
    /// Raw candidate tuples drawn, including those discarded.
    pub draws: usize,
    pub reservoir_capacity: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Totals {
    pub passed: usize,
    pub failed: usize,
    pub untestable: usize,
    pub timed_out: usize,
}

#[derive(Debug, Clone)]
pub struct TestReport {
    pub plan: TestPlan,
    pub functions: Vec<FunctionReport>,
}

impl TestReport {
    pub fn totals(&self) -> Totals {
        let mut t = Totals::default();
        for f in &self.functions {
            match f.outcome {
                Outcome::Passed { .. } => t.passed += 1,
                Outcome::Failed(_) => t.failed += 1,
                Outcome::Untestable(_) => t.untestable += 1,
                Outcome::TimedOut { .. } => t.timed_out += 1,
            }
        }
        t
    }

    pub fn has_failures(&self) -> bool {
        self.totals().failed > 0
    }

    pub fn get(&self, name: &str) -> Option<&FunctionReport> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn untestable(&self) -> impl Iterator<Item = (&str, &Untestable)> {
        self.functions.iter().filter_map(|f| match &f.outcome {
            Outcome::Untestable(u) => Some((f.name.as_str(), u)),
            _ => None,
        })
    }
}

pub fn run_autotests(registry: &Registry, plan: &TestPlan) -> Result<TestReport, PlanError> {
    plan.validate()?;
    let matcher = plan.matcher()?;
    let selected: Vec<ContractedFunction> = registry
        .functions()
        .into_iter()
        .filter(|f| matcher.as_ref().is_none_or(|m| m.is_match(f.name())))
        .collect();
    let jobs = plan.jobs.max(1).min(selected.len().max(1));
    let slots: Vec<Mutex<Option<FunctionReport>>> = selected.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(f) = selected.get(i) else { break };
                let r = test_function(f, plan);
                *slots[i].lock().unwrap_or_else(|e| e.into_inner()) = Some(r);
            });
        }
    });
    let functions = slots
        .into_iter()
        .map(|m| m.into_inner().unwrap_or_else(|e| e.into_inner()).expect("every function tested"))
        .collect();
    Ok(TestReport {
        plan: plan.clone(),
        functions,
    })
}

/// Seed for one argument stream, stable across runs and platforms.
pub fn stream_seed(seed: u64, function: &str, arg: usize) -> u64 {
    // FNV-1a over the name.
    let f = function
        .bytes()
        .fold(0xCBF2_9CE4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01B3));
    // SplitMix64 finalizer over the mixed inputs.
    let mut z = seed ^ f.rotate_left(17) ^ (arg as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn test_function(f: &ContractedFunction, plan: &TestPlan) -> FunctionReport {
    let contract = f.contract();
    let mut report = FunctionReport {
        name: f.name().to_string(),
        outcome: Outcome::Passed { cases: 0 },
        cases: 0,
        draws: 0,
        reservoir_capacity: contract.capacity,
    };
    let mut types: Vec<&Type> = Vec::new();
    for p in &contract.params {
        match &p.ty {
            Some(t) => types.push(t),
            None => {
                report.outcome = Outcome::Untestable(Untestable::UnspecifiedTypes {
                    argument: p.name.clone(),
                });
                return report;
            }
        }
    }
    let names: Vec<&str> = contract.param_names().collect();
    let seeds: Vec<u64> = (0..types.len()).map(|i| stream_seed(plan.seed, f.name(), i)).collect();
    for (i, t) in types.iter().enumerate() {
        if t.generate(seeds[i], 1).next().is_none() {
            report.outcome = Outcome::Untestable(Untestable::UngeneratableArgType {
                argument: names[i].to_string(),
            });
            return report;
        }
    }
    if plan.max_cases == 0 {
        return report;
    }

    let f = f.fresh_seeded(plan.seed);
    let mut runner = CaseRunner::new(f.clone(), plan.case_timeout);
    let budget = plan.draw_budget();
    let mut streams = Streams::new(&types, &seeds, budget);
    let (mut draws, mut cases, mut killed) = (0usize, 0usize, 0usize);
    let mut calls: Vec<Arguments> = Vec::new();
    let mut failure: Option<Failure> = None;
    let mut malformed: Option<ViolationReport> = None;
    streams.diagonal(|tuple| {
        draws += 1;
        let args: Arguments = names.iter().map(|n| n.to_string()).zip(tuple).collect();
        match f.requires_hold(&args) {
            Ok(true) => {}
            Ok(false) => return budget_left(draws, budget),
            Err(v) if v.kind == ViolationKind::EntryCondition => return budget_left(draws, budget),
            Err(v) => {
                malformed = Some(v);
                return ControlFlow::Break(());
            }
        }
        calls.push(args.clone());
        match runner.run(args.clone()) {
            CaseResult::Done(Ok(_)) => cases += 1,
            CaseResult::Done(Err(e)) => {
                cases += usize::from(reached_body(&e));
                failure = Some(Failure {
                    history: history_for(&e, &calls),
                    args: args.clone(),
                    original_args: args,
                    seed: plan.seed,
                    case: calls.len() - 1,
                    violation: e.violation().cloned(),
                    error: e.to_string(),
                });
                return ControlFlow::Break(());
            }
            CaseResult::Panicked(msg) => {
                cases += 1;
                failure = Some(Failure {
                    history: Vec::new(),
                    args: args.clone(),
                    original_args: args,
                    seed: plan.seed,
                    case: calls.len() - 1,
                    violation: None,
                    error: format!("panic: {msg}"),
                });
                return ControlFlow::Break(());
            }
            CaseResult::TimedOut => {
                killed += 1;
                if killed >= plan.max_kills.max(1) {
                    return ControlFlow::Break(());
                }
            }
        }
        if cases + killed >= plan.max_cases {
            return ControlFlow::Break(());
        }
        budget_left(draws, budget)
    });
    report.draws = draws;
    report.cases = cases;
    report.outcome = if let Some(v) = malformed {
        Outcome::Failed(Box::new(Failure {
            args: Arguments::new(),
            original_args: Arguments::new(),
            history: Vec::new(),
            seed: plan.seed,
            case: calls.len(),
            error: v.to_string(),
            violation: Some(v),
        }))
    } else if let Some(mut fail) = failure {
        minimize(&f, &mut fail);
        Outcome::Failed(Box::new(fail))
    } else if killed > 0 {
        Outcome::TimedOut {
            killed,
            completed: cases,
        }
    } else if calls.is_empty() {
        Outcome::Untestable(Untestable::NoCandidatePassedRequires { draws })
    } else {
        Outcome::Passed { cases }
    };
    report
}

fn budget_left(draws: usize, budget: usize) -> ControlFlow<()> {
    if draws >= budget {
        ControlFlow::Break(())
    } else {
        ControlFlow::Continue(())
    }
}

fn reached_body(e: &CallError) -> bool {
    match e {
        CallError::Host(_) => true,
        CallError::BadArguments(_) => false,
        CallError::Violation(v) => !matches!(v.kind, ViolationKind::ArgumentType | ViolationKind::EntryCondition),
    }
}

/// Arguments of the past calls named in a hyperproperty witness. Sequence
/// numbers of the fresh function count every checked call from zero, so
/// they index `calls` directly.
fn history_for(e: &CallError, calls: &[Arguments]) -> Vec<Arguments> {
    let Some(v) = e.violation() else { return Vec::new() };
    let mut seqs = v.past_seq_nos();
    seqs.sort_unstable();
    seqs.dedup();
    seqs.iter().filter_map(|&s| calls.get(s as usize).cloned()).collect()
}

/// Same failure class: same violation kind and clause, or both host errors.
fn same_failure(a: &Result<Value, CallError>, want: &Failure) -> bool {
    match (a, &want.violation) {
        (Err(CallError::Violation(got)), Some(w)) => got.kind == w.kind && got.detail == w.detail,
        (Err(CallError::Host(_)), None) => !want.error.starts_with("panic: "),
        _ => false,
    }
}

fn minimize(f: &ContractedFunction, fail: &mut Failure) {
    if fail.error.starts_with("panic: ") {
        return;
    }
    let history = fail.history.clone();
    let probe = |args: &Arguments| {
        let g = f.fresh();
        g.requires_hold(args).unwrap_or(false) && {
            let r = run_with_history(&g, &history, args.clone());
            same_failure(&r, fail)
        }
    };
    let shrunk = shrink::shrink(&fail.args, probe);
    if shrunk != fail.args {
        let r = run_with_history(&f.fresh(), &history, shrunk.clone());
        if let Err(e) = r {
            fail.violation = e.violation().cloned();
            fail.error = e.to_string();
            fail.args = shrunk;
        }
    }
}

fn run_with_history(f: &ContractedFunction, history: &[Arguments], args: Arguments) -> Result<Value, CallError> {
    for h in history {
        let _ = f.call(h.clone());
    }
    f.call(args)
}

/// Re-runs a recorded failure on a fresh copy of `f`: the history calls
/// first, then the failing arguments. Returns the error it produced, or
/// `None` when the call now succeeds.
pub fn replay(f: &ContractedFunction, failure: &Failure) -> Option<CallError> {
    let g = f.fresh_seeded(failure.seed);
    run_with_history(&g, &failure.history, failure.args.clone()).err()
}

enum CaseResult {
    Done(Result<Value, CallError>),
    Panicked(String),
    TimedOut,
}

type Job = (Arguments, Sender<CaseResult>);

/// Runs cases on a worker thread so a stuck case can be abandoned. The
/// abandoned thread is detached and a new worker takes its place.
struct CaseRunner {
    f: ContractedFunction,
    timeout: Duration,
    worker: Option<Sender<Job>>,
}

impl CaseRunner {
    fn new(f: ContractedFunction, timeout: Duration) -> Self {
        CaseRunner { f, timeout, worker: None }
    }

    fn spawn(&self) -> Sender<Job> {
        let (tx, rx): (Sender<Job>, Receiver<Job>) = mpsc::channel();
        let f = self.f.clone();
        thread::spawn(move || {
            for (args, reply) in rx {
                let r = catch_unwind(AssertUnwindSafe(|| f.call(args)));
                let msg = match r {
                    Ok(r) => CaseResult::Done(r),
                    Err(p) => CaseResult::Panicked(panic_text(p)),
                };
                let _ = reply.send(msg);
            }
        });
        tx
    }

    fn run(&mut self, args: Arguments) -> CaseResult {
        let worker = match self.worker.take() {
            Some(w) => w,
            None => self.spawn(),
        };
        let (reply, result) = mpsc::channel();
        if worker.send((args, reply)).is_err() {
            return CaseResult::Panicked("worker thread exited".into());
        }
        match result.recv_timeout(self.timeout) {
            Ok(r) => {
                self.worker = Some(worker);
                r
            }
            Err(RecvTimeoutError::Timeout) => CaseResult::TimedOut,
            Err(RecvTimeoutError::Disconnected) => CaseResult::Panicked("worker thread exited".into()),
        }
    }
}

fn panic_text(p: Box<dyn Any + Send>) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = p.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-text panic payload".into()
    }
}
