//! Scripted walk-throughs of the motivating examples.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use refineguard_core::checker::{Arguments, CallError, ContractedFunction, ViolationKind};
use refineguard_core::{Value, ViolationReport};

use crate::fixtures::{self, monotonic_contract};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Demo {
    Dna,
    Fisher,
    Cube,
}

/// What a demo printed and whether every expected outcome was observed.
pub struct DemoRun {
    pub transcript: String,
    pub ok: bool,
}

struct Log {
    out: String,
    ok: bool,
}

impl Log {
    fn line(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", s.as_ref());
    }

    fn expect(&mut self, cond: bool, what: &str) {
        if !cond {
            self.ok = false;
            self.line(format!("UNEXPECTED: {what}"));
        }
    }

    fn violation<'a>(&mut self, r: &'a Result<Value, CallError>, kind: ViolationKind) -> Option<&'a ViolationReport> {
        match r {
            Err(e) => {
                self.line(format!("  -> {e}"));
                let v = e.violation();
                self.expect(v.is_some_and(|v| v.kind == kind), &format!("expected a {kind} violation"));
                v
            }
            Ok(v) => {
                self.line(format!("  -> returned {}", v.render()));
                self.expect(false, &format!("expected a {kind} violation"));
                None
            }
        }
    }
}

pub fn run(demo: Demo) -> DemoRun {
    let mut log = Log {
        out: String::new(),
        ok: true,
    };
    match demo {
        Demo::Dna => dna(&mut log),
        Demo::Fisher => fisher(&mut log),
        Demo::Cube => cube(&mut log),
    }
    DemoRun {
        transcript: log.out,
        ok: log.ok,
    }
}

fn wrap(name: &str, c: refineguard_core::Contract, body: fixtures::Body) -> ContractedFunction {
    ContractedFunction::new(name, c, body).expect("fixture contract is well formed")
}

fn dna(log: &mut Log) {
    let f = wrap("complement_sequence", fixtures::complement_contract(), fixtures::complement_sequence);
    log.line("complement_sequence(['A', 'T', 'C'])");
    match f.call(Arguments::new().with("seq", Value::chars("ATC"))) {
        Ok(v) => {
            log.line(format!("  -> {}", v.render()));
            log.expect(v.render() == "['G', 'A', 'T']", "DNA complement should be ['G', 'A', 'T']");
        }
        Err(e) => {
            log.line(format!("  -> {e}"));
            log.expect(false, "DNA input should pass");
        }
    }
    log.line("complement_sequence(['U', 'C', 'G'])");
    let r = f.call(Arguments::new().with("seq", Value::chars("UCG")));
    if let Some(v) = log.violation(&r, ViolationKind::ArgumentType) {
        let names_u = v.offender.as_deref().is_some_and(|o| o.contains("'U'"));
        log.expect(names_u, "the offending element should be 'U'");
    }
}

fn fisher(log: &mut Log) {
    let f = wrap("fisher_transform", fixtures::fisher_contract(), fixtures::fisher_transform);
    let corr = Value::NdArray(fixtures::sample_correlations());
    log.line(format!("z = fisher_transform({})", corr.render()));
    let z = match f.call(Arguments::new().with("corr_values", corr.clone())) {
        Ok(z) => {
            log.line(format!("  -> {}", z.render()));
            z
        }
        Err(e) => {
            log.line(format!("  -> {e}"));
            log.expect(false, "first application should pass");
            return;
        }
    };
    log.line("fisher_transform(z)   # applied a second time by mistake");
    let r = f.call(Arguments::new().with("corr_values", z.clone()));
    log.violation(&r, ViolationKind::ArgumentType);

    log.line("without the entry check, the second application reaches the return check:");
    let g = wrap(
        "fisher_transform",
        fixtures::fisher_unguarded_contract(),
        fixtures::fisher_transform,
    );
    let r = g.call(Arguments::new().with("corr_values", z));
    log.violation(&r, ViolationKind::ReturnType);
}

fn cube(log: &mut Log) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let f = wrap("cube", monotonic_contract(), fixtures::cube);
    let mut failed = None;
    for i in 0..100 {
        let t: f64 = rng.random_range(-100.0..100.0);
        if let Err(e) = f.call(Arguments::new().with("t", t)) {
            failed = Some((i, e));
            break;
        }
    }
    match &failed {
        None => log.line(format!("cube: 100 calls, monotonicity held ({} records kept)", f.history_len())),
        Some((i, e)) => log.line(format!("cube: call {i} failed: {e}")),
    }
    log.expect(failed.is_none(), "cube should pass");

    let s = wrap("square", monotonic_contract(), fixtures::square);
    let mut caught = None;
    for i in 0..50 {
        let t: f64 = rng.random_range(-100.0..0.0);
        if let Err(e) = s.call(Arguments::new().with("t", t)) {
            caught = Some((i, e));
            break;
        }
    }
    match &caught {
        Some((i, e)) => {
            log.line(format!("square over negative inputs: caught at call {i}"));
            log.line(format!("  -> {e}"));
        }
        None => log.line("square over negative inputs: 50 calls, no violation"),
    }
    log.expect(
        caught.as_ref().is_some_and(|(_, e)| e.violation().is_some_and(|v| v.hyperproperty)),
        "square should violate monotonicity",
    );
}
