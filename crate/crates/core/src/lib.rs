//! Refinement-type contracts checked at runtime.
//!
//! The crate is `no_std` (it needs `alloc`). It provides the dynamic
//! [`Value`] model, the refinement [`types`] catalogue, the condition
//! expression language in [`lang`], and the runtime [`checker`] that wraps
//! functions with contracts and keeps a reservoir-sampled call history for
//! hyperproperties.

#![no_std]

extern crate alloc;

pub mod checker;
pub mod lang;
pub mod types;
pub mod value;

pub use checker::{Arguments, CallError, Contract, ContractedFunction, Registry, Scope, ViolationKind, ViolationReport};
pub use types::{Refinement, Type};
pub use value::{value_eq, Handle, Map, NdArray, Tag, Value, ValueError};
