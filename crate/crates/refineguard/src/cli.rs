//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::builder::FalseyValueParser;
use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use refineguard_core::checker::Scope;

use crate::autotest::{run_autotests, TestPlan};
use crate::bench::{run_workload, BenchResult};
use crate::demo::{self, Demo};
use crate::fixtures::SUITES;
use crate::manifest::{Manifest, ManifestError};
use crate::report::{text_bench, text_report, JsonBench, JsonReport, SCHEMA_VERSION};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "refineguard", version, about = "Refinement-type contracts: autotesting, demos and overhead benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate test cases for every function of a suite.
    Test(TestArgs),
    /// Time calls with checking on, off, and without the wrapper.
    Bench(BenchArgs),
    /// Run one of the scripted examples.
    Demo {
        #[arg(value_enum)]
        fixture: Demo,
    },
    /// List the built-in suites.
    Suites,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Built-in suite to load.
    #[arg(long, conflicts_with = "manifest")]
    pub suite: Option<String>,
    /// TOML manifest naming the suite and plan overrides.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Disable all checking (also set by REFINEGUARD_DISABLE=1).
    #[arg(
        long,
        env = "REFINEGUARD_DISABLE",
        action = ArgAction::SetTrue,
        value_parser = FalseyValueParser::new()
    )]
    pub no_checks: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub report: ReportFormat,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub common: SuiteArgs,
    #[arg(long)]
    pub max_cases: Option<usize>,
    #[arg(long)]
    pub timeout_secs: Option<f64>,
    /// Glob over function names; repeatable.
    #[arg(long)]
    pub only: Vec<String>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: SuiteArgs,
    /// Workload to run; repeatable. All workloads by default.
    #[arg(long)]
    pub workload: Vec<String>,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    /// Override the number of calls per run.
    #[arg(long)]
    pub calls: Option<usize>,
}

impl SuiteArgs {
    fn manifest(&self) -> Result<Manifest, ManifestError> {
        match (&self.manifest, &self.suite) {
            (Some(p), _) => Manifest::load(p),
            (None, Some(s)) => Manifest::builtin(s),
            (None, None) => Manifest::builtin("fixtures"),
        }
    }

    fn emit(&self, stdout: &mut dyn Write, text: &str) -> Result<(), String> {
        match &self.out {
            Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
            None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
        }
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    match cli.command {
        Command::Test(a) => cmd_test(&a, stdout, stderr),
        Command::Bench(a) => cmd_bench(&a, stdout, stderr),
        Command::Demo { fixture } => {
            let r = demo::run(fixture);
            let _ = stdout.write_all(r.transcript.as_bytes());
            if r.ok {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Command::Suites => {
            for s in SUITES {
                let _ = writeln!(stdout, "{:<15} {}", s.name, s.description);
            }
            EXIT_OK
        }
    }
}

fn usage(stderr: &mut dyn Write, msg: impl std::fmt::Display) -> u8 {
    let _ = writeln!(stderr, "error: {msg}");
    EXIT_USAGE
}

pub fn cmd_test(a: &TestArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let manifest = match a.common.manifest() {
        Ok(m) => m,
        Err(e) => return usage(stderr, e),
    };
    let mut plan = match manifest.plan.apply(TestPlan::default()) {
        Ok(p) => p,
        Err(e) => return usage(stderr, e),
    };
    if let Some(n) = a.max_cases {
        plan.max_cases = n;
    }
    if let Some(s) = a.timeout_secs {
        match Duration::try_from_secs_f64(s) {
            Ok(d) => plan.case_timeout = d,
            Err(e) => return usage(stderr, format!("--timeout-secs: {e}")),
        }
    }
    if let Some(s) = a.common.seed {
        plan.seed = s;
    }
    if !a.only.is_empty() {
        plan.only = a.only.clone();
    }
    if let Some(j) = a.jobs {
        plan.jobs = j;
    }
    let suite = match manifest.resolve() {
        Ok(s) => s,
        Err(e) => return usage(stderr, e),
    };
    let registry = match suite.registry() {
        Ok(r) => r,
        Err(e) => return usage(stderr, e),
    };
    let checks = !a.common.no_checks;
    if !checks {
        let _ = registry.set_checking(Scope::Global, false);
    }
    let report = match run_autotests(&registry, &plan) {
        Ok(r) => r,
        Err(e) => return usage(stderr, e),
    };
    let text = match a.common.report {
        ReportFormat::Json => JsonReport::new(manifest.name(), &report, checks).to_json() + "\n",
        ReportFormat::Text => text_report(manifest.name(), &report),
    };
    if let Err(e) = a.common.emit(stdout, &text) {
        return usage(stderr, e);
    }
    if report.has_failures() {
        EXIT_FAILED
    } else {
        EXIT_OK
    }
}

pub fn cmd_bench(a: &BenchArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let manifest = match a.common.manifest() {
        Ok(m) => m,
        Err(e) => return usage(stderr, e),
    };
    let suite = match manifest.resolve() {
        Ok(s) => s,
        Err(e) => return usage(stderr, e),
    };
    let registry = match suite.registry() {
        Ok(r) => r,
        Err(e) => return usage(stderr, e),
    };
    let all = suite.workloads();
    let chosen: Vec<_> = if a.workload.is_empty() {
        all
    } else {
        let mut v = Vec::new();
        for name in &a.workload {
            match all.iter().find(|w| &w.name == name) {
                Some(w) => v.push(w.clone()),
                None => return usage(stderr, format!("unknown workload `{name}`")),
            }
        }
        v
    };
    if chosen.is_empty() {
        return usage(stderr, format!("suite `{}` has no workloads", manifest.name()));
    }
    let seed = a.common.seed.unwrap_or(0);
    let mut results: Vec<BenchResult> = Vec::new();
    for w in chosen {
        let w = match a.calls {
            Some(n) => w.with_calls(n),
            None => w,
        };
        match run_workload(&registry, &w, a.runs, seed, !a.common.no_checks) {
            Ok(r) => results.push(r),
            Err(e) => return usage(stderr, e),
        }
    }
    let text = match a.common.report {
        ReportFormat::Json => {
            let doc = JsonBench {
                schema: SCHEMA_VERSION,
                suite: manifest.name().into(),
                seed,
                results,
            };
            serde_json::to_string_pretty(&doc).expect("bench report serializes") + "\n"
        }
        ReportFormat::Text => text_bench(&results),
    };
    if let Err(e) = a.common.emit(stdout, &text) {
        return usage(stderr, e);
    }
    EXIT_OK
}
