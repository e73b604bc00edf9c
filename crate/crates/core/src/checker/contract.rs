use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use thiserror::Error;

use crate::lang::{parse, Bindings, Expr, Namespace, ParseError};
use crate::types::Type;
use crate::value::Value;

/// Default number of past executions kept per function.
pub const DEFAULT_RESERVOIR_CAPACITY: usize = 10;

/// Reserved name for the return value in exit conditions.
pub const RETURN: &str = "return";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContractError {
    #[error("contract of `{function}` is malformed: {detail}")]
    Malformed { function: String, detail: String },
    #[error("condition `{source_text}` of `{function}` does not parse: {error}")]
    Parse {
        function: String,
        source_text: String,
        error: ParseError,
    },
    #[error("a function named `{0}` is already registered")]
    Duplicate(String),
}

#[derive(Debug, Clone)]
pub struct Param {
    pub name: String,
    /// `None` for an argument declared without a type.
    pub ty: Option<Type>,
}

/// Variadic tail: extra positional values collected into a tuple, or extra
/// keyword values collected into a mapping; every element is checked
/// against `ty`.
#[derive(Debug, Clone)]
pub struct Rest {
    pub name: String,
    pub ty: Type,
}

/// Contract under construction. Condition sources are parsed and checked
/// when the function is registered.
#[derive(Clone, Debug)]
pub struct Contract {
    pub(crate) params: Vec<Param>,
    pub(crate) rest_positional: Option<Rest>,
    pub(crate) rest_keyword: Option<Rest>,
    pub(crate) returns: Option<Type>,
    pub(crate) requires: Vec<String>,
    pub(crate) ensures: Vec<String>,
    pub(crate) namespace: Namespace,
    pub(crate) capacity: usize,
    pub(crate) seed: u64,
}

impl Default for Contract {
    fn default() -> Self {
        Contract::new()
    }
}

impl Contract {
    pub fn new() -> Self {
        Contract {
            params: Vec::new(),
            rest_positional: None,
            rest_keyword: None,
            returns: None,
            requires: Vec::new(),
            ensures: Vec::new(),
            namespace: Namespace::builtins(),
            capacity: DEFAULT_RESERVOIR_CAPACITY,
            seed: 0,
        }
    }

    pub fn accepts(mut self, name: impl Into<String>, ty: impl Into<Type>) -> Self {
        self.params.push(Param {
            name: name.into(),
            ty: Some(ty.into()),
        });
        self
    }

    pub fn accepts_untyped(mut self, name: impl Into<String>) -> Self {
        self.params.push(Param {
            name: name.into(),
            ty: None,
        });
        self
    }

    pub fn rest_positional(mut self, name: impl Into<String>, ty: impl Into<Type>) -> Self {
        self.rest_positional = Some(Rest {
            name: name.into(),
            ty: ty.into(),
        });
        self
    }

    pub fn rest_keyword(mut self, name: impl Into<String>, ty: impl Into<Type>) -> Self {
        self.rest_keyword = Some(Rest {
            name: name.into(),
            ty: ty.into(),
        });
        self
    }

    pub fn returns(mut self, ty: impl Into<Type>) -> Self {
        self.returns = Some(ty.into());
        self
    }

    pub fn requires(mut self, src: impl Into<String>) -> Self {
        self.requires.push(src.into());
        self
    }

    pub fn ensures(mut self, src: impl Into<String>) -> Self {
        self.ensures.push(src.into());
        self
    }

    /// Replaces the helper namespace (the builtins by default).
    pub fn namespace(mut self, ns: Namespace) -> Self {
        self.namespace = ns;
        self
    }

    pub fn reservoir_capacity(mut self, capacity: usize) -> Self {
        self.capacity = capacity;
        self
    }

    pub fn reservoir_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub(crate) fn compile(self, function: &str) -> Result<CompiledContract, ContractError> {
        let malformed = |detail: String| ContractError::Malformed {
            function: function.to_string(),
            detail,
        };
        let mut names: Vec<&str> = Vec::new();
        let rests = self.rest_positional.iter().chain(&self.rest_keyword);
        for name in self.params.iter().map(|p| p.name.as_str()).chain(rests.map(|r| r.name.as_str())) {
            if name == RETURN {
                return Err(malformed(format!("`{RETURN}` cannot name an argument")));
            }
            if names.contains(&name) {
                return Err(malformed(format!("argument `{name}` is declared twice")));
            }
            names.push(name);
        }
        let compile_one = |src: &String, entry: bool| -> Result<Condition, ContractError> {
            let expr = parse(src).map_err(|error| ContractError::Parse {
                function: function.to_string(),
                source_text: src.clone(),
                error,
            })?;
            let which = if entry { "requires" } else { "ensures" };
            for (name, depth) in expr.free_names() {
                if entry && depth > 0 {
                    return Err(malformed(format!(
                        "{which} `{src}` refers to past executions (`{name}` with {depth} backtick(s))"
                    )));
                }
                if name == RETURN {
                    if entry {
                        return Err(malformed(format!("{which} `{src}` uses `{RETURN}`")));
                    }
                    continue;
                }
                if !names.contains(&name.as_str()) {
                    return Err(malformed(format!("{which} `{src}` refers to unknown name `{name}`")));
                }
            }
            for h in expr.called_helpers() {
                if !self.namespace.has_helper(&h) {
                    return Err(malformed(format!("{which} `{src}` calls unknown helper `{h}`")));
                }
            }
            for a in expr.attributes() {
                if !self.namespace.has_attribute(&a) {
                    return Err(malformed(format!("{which} `{src}` reads unregistered attribute `{a}`")));
                }
            }
            let depth = expr.backtick_depth();
            Ok(Condition {
                source: src.clone(),
                expr,
                depth,
            })
        };
        let requires = self
            .requires
            .iter()
            .map(|s| compile_one(s, true))
            .collect::<Result<Vec<_>, _>>()?;
        let ensures = self
            .ensures
            .iter()
            .map(|s| compile_one(s, false))
            .collect::<Result<Vec<_>, _>>()?;
        let max_depth = ensures.iter().map(|c| c.depth).max().unwrap_or(0);
        Ok(CompiledContract {
            params: self.params,
            rest_positional: self.rest_positional,
            rest_keyword: self.rest_keyword,
            returns: self.returns,
            requires,
            ensures,
            namespace: self.namespace,
            capacity: self.capacity,
            seed: self.seed,
            max_depth,
        })
    }
}

/// A parsed condition.
#[derive(Debug, Clone)]
pub struct Condition {
    pub source: String,
    pub expr: Expr,
    pub depth: u32,
}

/// A validated contract.
#[derive(Debug, Clone)]
pub struct CompiledContract {
    pub params: Vec<Param>,
    pub rest_positional: Option<Rest>,
    pub rest_keyword: Option<Rest>,
    pub returns: Option<Type>,
    pub requires: Vec<Condition>,
    pub ensures: Vec<Condition>,
    pub namespace: Namespace,
    pub capacity: usize,
    pub seed: u64,
    /// Deepest backtick count over the exit conditions.
    pub max_depth: u32,
}

impl CompiledContract {
    /// Whether every argument and the return value carry a type.
    pub fn fully_typed(&self) -> bool {
        self.returns.is_some() && self.params.iter().all(|p| p.ty.is_some())
    }

    pub fn param_names(&self) -> impl Iterator<Item = &str> {
        self.params.iter().map(|p| p.name.as_str())
    }
}

/// Named argument values for one call, in the order supplied.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Arguments {
    bindings: Vec<(String, Value)>,
}

impl Arguments {
    pub fn new() -> Self {
        Arguments::default()
    }

    pub fn with(mut self, name: impl Into<String>, v: impl Into<Value>) -> Self {
        self.insert(name, v);
        self
    }

    /// Binds `name`, replacing an earlier binding of the same name.
    pub fn insert(&mut self, name: impl Into<String>, v: impl Into<Value>) {
        let name = name.into();
        let v = v.into();
        match self.bindings.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = v,
            None => self.bindings.push((name, v)),
        }
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Value> {
        self.bindings.iter_mut().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.bindings.iter().map(|(n, v)| (n.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn into_vec(self) -> Vec<(String, Value)> {
        self.bindings
    }

    pub(crate) fn bindings(&self) -> &[(String, Value)] {
        &self.bindings
    }
}

impl From<Vec<(String, Value)>> for Arguments {
    fn from(bindings: Vec<(String, Value)>) -> Self {
        Arguments { bindings }
    }
}

impl<S: Into<String>, V: Into<Value>> FromIterator<(S, V)> for Arguments {
    fn from_iter<I: IntoIterator<Item = (S, V)>>(iter: I) -> Self {
        let mut a = Arguments::new();
        for (n, v) in iter {
            a.insert(n, v);
        }
        a
    }
}

impl Index<usize> for Arguments {
    type Output = Value;

    fn index(&self, i: usize) -> &Value {
        &self.bindings[i].1
    }
}

impl IndexMut<usize> for Arguments {
    fn index_mut(&mut self, i: usize) -> &mut Value {
        &mut self.bindings[i].1
    }
}

impl Index<&str> for Arguments {
    type Output = Value;

    fn index(&self, name: &str) -> &Value {
        self.get(name)
            .unwrap_or_else(|| panic!("no argument named `{name}`"))
    }
}

impl Bindings for Arguments {
    fn lookup(&self, name: &str) -> Option<&Value> {
        self.get(name)
    }
}

/// Entry snapshots and return value of one completed call.
#[derive(Debug, Clone)]
pub struct ExecutionRecord {
    pub args: Vec<(String, Value)>,
    pub ret: Value,
    pub seq_no: u64,
}

impl Bindings for ExecutionRecord {
    fn lookup(&self, name: &str) -> Option<&Value> {
        if name == RETURN {
            Some(&self.ret)
        } else {
            self.args.lookup(name)
        }
    }
}
