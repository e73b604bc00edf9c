use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicBool, AtomicU64, AtomicU8, Ordering};

use spin::Mutex;

use super::contract::{Arguments, CompiledContract, Condition, Contract, ContractError, ExecutionRecord, RETURN};
use super::reservoir::Reservoir;
use super::violation::{CallError, HostError, ViolationKind, ViolationReport, WitnessFrame};
use crate::lang::{evaluate_condition, Bindings, EvalEnv, EvalError};
use crate::types::Type;
use crate::value::{Map, Value};

pub type Body = Arc<dyn Fn(&mut Arguments) -> Result<Value, HostError> + Send + Sync>;

const INHERIT: u8 = 0;
const FORCE_ON: u8 = 1;
const FORCE_OFF: u8 = 2;

struct Inner {
    name: String,
    contract: CompiledContract,
    body: Body,
    reservoir: Option<Mutex<Reservoir<ExecutionRecord>>>,
    seq: AtomicU64,
    global: Arc<AtomicBool>,
    local: AtomicU8,
}

/// A function wrapped with its contract. Cloning shares the history.
#[derive(Clone)]
pub struct ContractedFunction {
    inner: Arc<Inner>,
}

impl fmt::Debug for ContractedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContractedFunction")
            .field("name", &self.inner.name)
            .field("checking", &self.checking_enabled())
            .finish()
    }
}

impl ContractedFunction {
    /// Wraps `body` with its own global switch, independent of any registry.
    pub fn new(
        name: impl Into<String>,
        contract: Contract,
        body: impl Fn(&mut Arguments) -> Result<Value, HostError> + Send + Sync + 'static,
    ) -> Result<Self, ContractError> {
        Self::with_switch(name.into(), contract, Arc::new(body), Arc::new(AtomicBool::new(true)))
    }

    pub(crate) fn with_switch(
        name: String,
        contract: Contract,
        body: Body,
        global: Arc<AtomicBool>,
    ) -> Result<Self, ContractError> {
        let contract = contract.compile(&name)?;
        Ok(Self::assemble(name, contract, body, global, INHERIT))
    }

    fn assemble(name: String, contract: CompiledContract, body: Body, global: Arc<AtomicBool>, local: u8) -> Self {
        let reservoir = (contract.max_depth >= 1).then(|| Mutex::new(Reservoir::new(contract.capacity, contract.seed)));
        ContractedFunction {
            inner: Arc::new(Inner {
                name,
                contract,
                body,
                reservoir,
                seq: AtomicU64::new(0),
                global,
                local: AtomicU8::new(local),
            }),
        }
    }

    /// Same function and contract with an empty history and call counter.
    pub fn fresh(&self) -> Self {
        self.fresh_seeded(self.inner.contract.seed)
    }

    /// Like [`fresh`](Self::fresh) with a different reservoir seed.
    pub fn fresh_seeded(&self, seed: u64) -> Self {
        let mut contract = self.inner.contract.clone();
        contract.seed = seed;
        Self::assemble(
            self.inner.name.clone(),
            contract,
            self.inner.body.clone(),
            self.inner.global.clone(),
            self.inner.local.load(Ordering::Relaxed),
        )
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn contract(&self) -> &CompiledContract {
        &self.inner.contract
    }

    /// `Some(true)`/`Some(false)` overrides the global switch for this
    /// function; `None` follows it again.
    pub fn set_checking(&self, mode: Option<bool>) {
        let v = match mode {
            None => INHERIT,
            Some(true) => FORCE_ON,
            Some(false) => FORCE_OFF,
        };
        self.inner.local.store(v, Ordering::Relaxed);
    }

    pub fn checking_enabled(&self) -> bool {
        match self.inner.local.load(Ordering::Relaxed) {
            FORCE_ON => true,
            FORCE_OFF => false,
            _ => self.inner.global.load(Ordering::Relaxed),
        }
    }

    /// Number of records currently held for hyperproperty checks.
    pub fn history_len(&self) -> usize {
        self.inner.reservoir.as_ref().map_or(0, |r| r.lock().len())
    }

    /// Total records offered to the history.
    pub fn history_seen(&self) -> u64 {
        self.inner.reservoir.as_ref().map_or(0, |r| r.lock().seen())
    }

    /// Sequence numbers of the records currently held.
    pub fn history_seq_nos(&self) -> Vec<u64> {
        self.inner
            .reservoir
            .as_ref()
            .map_or_else(Vec::new, |r| r.lock().slots().iter().map(|x| x.seq_no).collect())
    }

    /// Calls the body with no checking at all, bypassing the switches.
    pub fn call_bare(&self, args: &mut Arguments) -> Result<Value, HostError> {
        (self.inner.body)(args)
    }

    /// Binds `values` to the declared arguments in order; surplus values go
    /// to the positional rest tuple when one is declared.
    pub fn call_positional(&self, values: Vec<Value>) -> Result<Value, CallError> {
        let c = &self.inner.contract;
        let mut args = Arguments::new();
        let mut it = values.into_iter();
        for p in &c.params {
            match it.next() {
                Some(v) => args.insert(p.name.clone(), v),
                None => return Err(CallError::BadArguments(format!("missing argument `{}`", p.name))),
            }
        }
        let extra: Vec<Value> = it.collect();
        match &c.rest_positional {
            Some(r) => args.insert(r.name.clone(), Value::Tuple(extra)),
            None if !extra.is_empty() => {
                return Err(CallError::BadArguments(format!(
                    "`{}` takes {} argument(s), got {}",
                    self.inner.name,
                    c.params.len(),
                    c.params.len() + extra.len()
                )))
            }
            None => {}
        }
        self.call(args)
    }

    pub fn call(&self, mut args: Arguments) -> Result<Value, CallError> {
        if !self.checking_enabled() {
            return (self.inner.body)(&mut args).map_err(CallError::Host);
        }
        let inner = &*self.inner;
        let c = &inner.contract;
        let seq_no = inner.seq.fetch_add(1, Ordering::Relaxed);
        self.bind(&mut args)?;
        self.check_argument_types(&args)?;
        // Requires see the arguments before the body runs, so the live
        // values are the entry values.
        self.check_requires_on(&args, seq_no)?;
        let (snapshot, shallow) = if c.ensures.is_empty() {
            (Vec::new(), true)
        } else {
            snapshot_args(&args)
        };
        let ret = (inner.body)(&mut args).map_err(CallError::Host)?;
        if let Some(t) = &c.returns {
            if let Err(mut v) = check_value(t, &ret, ViolationKind::ReturnType, &inner.name) {
                v.witness = vec![frame(0, seq_no, true, args.bindings(), Some(&ret))];
                return Err(v.into());
            }
        }
        if c.ensures.is_empty() {
            return Ok(ret);
        }
        let record = ExecutionRecord {
            args: snapshot,
            ret,
            seq_no,
        };
        for cond in c.ensures.iter().filter(|c| c.depth == 0) {
            let frames: [&dyn Bindings; 1] = [&record];
            self.eval_condition(cond, &frames, ViolationKind::ExitCondition)
                .map_err(|mut v| {
                    v.witness = vec![record_frame(0, true, &record)];
                    CallError::from(v)
                })?;
        }
        if let Some(reservoir) = &inner.reservoir {
            let mut guard = reservoir.lock();
            let past: Vec<&ExecutionRecord> = guard.slots().iter().collect();
            for cond in c.ensures.iter().filter(|c| c.depth >= 1) {
                self.check_hyperproperty(cond, &record, &past)?;
            }
            if !shallow {
                guard.offer(record.clone());
            }
            drop(guard);
        }
        Ok(record.ret)
    }

    /// Argument names must match the declaration; missing variadic tails
    /// are bound to empty collections.
    fn bind(&self, args: &mut Arguments) -> Result<(), CallError> {
        let c = &self.inner.contract;
        for p in &c.params {
            if !args.contains(&p.name) {
                return Err(CallError::BadArguments(format!("missing argument `{}`", p.name)));
            }
        }
        if let Some(r) = &c.rest_positional {
            if !args.contains(&r.name) {
                args.insert(r.name.clone(), Value::Tuple(Vec::new()));
            }
        }
        if let Some(r) = &c.rest_keyword {
            if !args.contains(&r.name) {
                args.insert(r.name.clone(), Value::Map(Map::new()));
            }
        }
        let declared = |n: &str| {
            c.params.iter().any(|p| p.name == n)
                || c.rest_positional.iter().chain(&c.rest_keyword).any(|r| r.name == n)
        };
        if let Some((n, _)) = args.iter().find(|(n, _)| !declared(n)) {
            return Err(CallError::BadArguments(format!(
                "`{}` has no argument named `{n}`",
                self.inner.name
            )));
        }
        Ok(())
    }

    /// First argument that is not a member of its declared type.
    pub fn check_argument_types(&self, args: &Arguments) -> Result<(), ViolationReport> {
        let c = &self.inner.contract;
        let name = &self.inner.name;
        for p in &c.params {
            let (Some(t), Some(v)) = (&p.ty, args.get(&p.name)) else {
                continue;
            };
            check_value(t, v, ViolationKind::ArgumentType, name).map_err(|mut r| {
                r.argument = Some(p.name.clone());
                r
            })?;
        }
        if let Some(rest) = &c.rest_positional {
            match args.get(&rest.name) {
                Some(Value::Tuple(items) | Value::Seq(items)) => {
                    for (i, v) in items.iter().enumerate() {
                        check_value(&rest.ty, v, ViolationKind::ArgumentType, name).map_err(|mut r| {
                            r.argument = Some(format!("{}[{i}]", rest.name));
                            r
                        })?;
                    }
                }
                Some(other) => return Err(rest_shape_error(name, &rest.name, "a tuple", other)),
                None => {}
            }
        }
        if let Some(rest) = &c.rest_keyword {
            match args.get(&rest.name) {
                Some(Value::Map(m)) => {
                    for (k, v) in m.iter() {
                        if k.as_text().is_none() {
                            return Err(rest_shape_error(name, &rest.name, "text keys", k));
                        }
                        check_value(&rest.ty, v, ViolationKind::ArgumentType, name).map_err(|mut r| {
                            r.argument = Some(format!("{}[{k}]", rest.name));
                            r
                        })?;
                    }
                }
                Some(other) => return Err(rest_shape_error(name, &rest.name, "a mapping", other)),
                None => {}
            }
        }
        Ok(())
    }

    /// Whether every entry condition holds for `args`; an undecidable
    /// condition is reported as a violation.
    pub fn requires_hold(&self, args: &Arguments) -> Result<bool, ViolationReport> {
        match self.check_requires_on(args, 0) {
            Ok(()) => Ok(true),
            Err(v) if v.kind == ViolationKind::EntryCondition && v.message.is_none() => Ok(false),
            Err(v) => Err(v),
        }
    }

    fn check_requires_on(&self, args: &Arguments, seq_no: u64) -> Result<(), ViolationReport> {
        for cond in &self.inner.contract.requires {
            let frames: [&dyn Bindings; 1] = [args];
            self.eval_condition(cond, &frames, ViolationKind::EntryCondition)
                .map_err(|mut v| {
                    v.witness = vec![frame(0, seq_no, true, args.bindings(), None)];
                    v
                })?;
        }
        Ok(())
    }

    fn eval_condition(
        &self,
        cond: &Condition,
        frames: &[&dyn Bindings],
        kind: ViolationKind,
    ) -> Result<(), ViolationReport> {
        let env = EvalEnv::new(frames, &self.inner.contract.namespace);
        match evaluate_condition(&cond.expr, &env) {
            Ok(true) => Ok(()),
            Ok(false) => Err(ViolationReport::new(kind, &self.inner.name, cond.source.clone())),
            Err(e) => Err(classify_eval_error(e, kind, &self.inner.name, cond)),
        }
    }

    fn check_hyperproperty(
        &self,
        cond: &Condition,
        current: &ExecutionRecord,
        past: &[&ExecutionRecord],
    ) -> Result<(), ViolationReport> {
        let d = cond.depth as usize;
        if past.len() < d {
            return Ok(());
        }
        let fail = |mut v: ViolationReport, bound: &[&ExecutionRecord], current_at: usize| {
            v.hyperproperty = true;
            v.witness = bound
                .iter()
                .enumerate()
                .map(|(depth, r)| record_frame(depth as u32, depth == current_at, r))
                .collect();
            v
        };
        if d == 1 {
            for &p in past {
                for (pair, current_at) in [([current, p], 0), ([p, current], 1)] {
                    let frames: [&dyn Bindings; 2] = [pair[0], pair[1]];
                    self.eval_condition(cond, &frames, ViolationKind::ExitCondition)
                        .map_err(|v| fail(v, &pair, current_at))?;
                }
            }
            return Ok(());
        }
        let mut chosen: Vec<usize> = Vec::with_capacity(d);
        let mut used = vec![false; past.len()];
        self.scan_tuples(cond, current, past, d, &mut chosen, &mut used, &fail)
    }

    #[allow(clippy::too_many_arguments)]
    fn scan_tuples(
        &self,
        cond: &Condition,
        current: &ExecutionRecord,
        past: &[&ExecutionRecord],
        d: usize,
        chosen: &mut Vec<usize>,
        used: &mut [bool],
        fail: &impl Fn(ViolationReport, &[&ExecutionRecord], usize) -> ViolationReport,
    ) -> Result<(), ViolationReport> {
        if chosen.len() == d {
            let bound: Vec<&ExecutionRecord> = core::iter::once(current)
                .chain(chosen.iter().map(|&i| past[i]))
                .collect();
            let frames: Vec<&dyn Bindings> = bound.iter().map(|r| *r as &dyn Bindings).collect();
            return self
                .eval_condition(cond, &frames, ViolationKind::ExitCondition)
                .map_err(|v| fail(v, &bound, 0));
        }
        for i in 0..past.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            chosen.push(i);
            let r = self.scan_tuples(cond, current, past, d, chosen, used, fail);
            chosen.pop();
            used[i] = false;
            r?;
        }
        Ok(())
    }
}

fn rest_shape_error(function: &str, arg: &str, want: &str, got: &Value) -> ViolationReport {
    let mut r = ViolationReport::new(ViolationKind::ArgumentType, function, format!("variadic tail needing {want}"));
    r.argument = Some(arg.to_string());
    r.offender = Some(got.render());
    r
}

/// Membership check producing a report that names the offending element.
fn check_value(t: &Type, v: &Value, kind: ViolationKind, function: &str) -> Result<(), ViolationReport> {
    match t.check(v) {
        Ok(true) => Ok(()),
        Ok(false) => {
            let mut r = ViolationReport::new(kind, function, t.name());
            r.offender = Some(match t.offender(v) {
                Ok(Some(o)) => o.to_string(),
                _ => format!("value {}", v.render()),
            });
            Err(r)
        }
        Err(e) => {
            let mut r = ViolationReport::new(ViolationKind::ContractMalformed, function, e.to_string());
            r.offender = Some(format!("value {}", v.render()));
            Err(r)
        }
    }
}

fn classify_eval_error(e: EvalError, kind: ViolationKind, function: &str, cond: &Condition) -> ViolationReport {
    match e {
        EvalError::Malformed(_) | EvalError::NameUnbound { .. } => {
            let mut r = ViolationReport::new(
                ViolationKind::ContractMalformed,
                function,
                format!("condition `{}` cannot be evaluated", cond.source),
            );
            r.message = Some(e.to_string());
            r
        }
        EvalError::Type(_) | EvalError::IndexOutOfBounds { .. } => {
            let mut r = ViolationReport::new(kind, function, cond.source.clone());
            r.message = Some(e.to_string());
            r
        }
    }
}

fn snapshot_args(args: &Arguments) -> (Vec<(String, Value)>, bool) {
    let mut shallow = false;
    let snap = args
        .iter()
        .map(|(n, v)| {
            let (s, sh) = v.snapshot_or_shallow();
            shallow |= sh;
            (n.to_string(), s)
        })
        .collect();
    (snap, shallow)
}

fn frame(depth: u32, seq_no: u64, current: bool, args: &[(String, Value)], ret: Option<&Value>) -> WitnessFrame {
    let mut values: Vec<(String, String)> = args.iter().map(|(n, v)| (n.clone(), v.render())).collect();
    if let Some(r) = ret {
        values.push((RETURN.to_string(), r.render()));
    }
    WitnessFrame {
        depth,
        seq_no,
        current,
        values,
    }
}

fn record_frame(depth: u32, current: bool, r: &ExecutionRecord) -> WitnessFrame {
    frame(depth, r.seq_no, current, &r.args, Some(&r.ret))
}
