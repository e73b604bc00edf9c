use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicBool, Ordering};

use spin::Mutex;
use thiserror::Error;

use super::contract::{Arguments, Contract, ContractError};
use super::function::ContractedFunction;
use super::violation::HostError;
use crate::value::Value;

/// Target of [`Registry::set_checking`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scope {
    Global,
    Function(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("no function named `{0}` is registered")]
    UnknownFunction(String),
}

/// Named contracted functions sharing one global checking switch.
#[derive(Debug, Clone)]
pub struct Registry {
    global: Arc<AtomicBool>,
    functions: Arc<Mutex<BTreeMap<String, ContractedFunction>>>,
}

impl Default for Registry {
    fn default() -> Self {
        Registry::new()
    }
}

impl Registry {
    pub fn new() -> Self {
        Registry {
            global: Arc::new(AtomicBool::new(true)),
            functions: Arc::new(Mutex::new(BTreeMap::new())),
        }
    }

    /// Starts with checking switched off globally.
    pub fn disabled() -> Self {
        let r = Registry::new();
        r.global.store(false, Ordering::Relaxed);
        r
    }

    pub fn register(
        &self,
        name: impl Into<String>,
        contract: Contract,
        body: impl Fn(&mut Arguments) -> Result<Value, HostError> + Send + Sync + 'static,
    ) -> Result<ContractedFunction, ContractError> {
        let name = name.into();
        let mut map = self.functions.lock();
        if map.contains_key(&name) {
            return Err(ContractError::Duplicate(name));
        }
        let f = ContractedFunction::with_switch(name.clone(), contract, Arc::new(body), self.global.clone())?;
        map.insert(name, f.clone());
        Ok(f)
    }

    pub fn get(&self, name: &str) -> Option<ContractedFunction> {
        self.functions.lock().get(name).cloned()
    }

    /// Registered functions in name order.
    pub fn functions(&self) -> Vec<ContractedFunction> {
        self.functions.lock().values().cloned().collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.functions.lock().keys().cloned().collect()
    }

    /// Switching globally also drops every per-function override.
    pub fn set_checking(&self, scope: Scope, on: bool) -> Result<(), RegistryError> {
        match scope {
            Scope::Global => {
                self.global.store(on, Ordering::Relaxed);
                for f in self.functions.lock().values() {
                    f.set_checking(None);
                }
                Ok(())
            }
            Scope::Function(name) => {
                let f = self.get(&name).ok_or(RegistryError::UnknownFunction(name))?;
                f.set_checking(Some(on));
                Ok(())
            }
        }
    }

    pub fn global_checking(&self) -> bool {
        self.global.load(Ordering::Relaxed)
    }
}
