//! Runtime contract enforcement.
//!
//! A [`ContractedFunction`] validates argument types and entry conditions,
//! runs the body, then validates the return type and exit conditions.
//! Exit conditions with primed names are checked against executions kept
//! in a per-function reservoir sample.

mod contract;
#[allow(clippy::result_large_err)]
mod function;
mod registry;
mod reservoir;
mod violation;

pub use contract::{
    Arguments, CompiledContract, Condition, Contract, ContractError, ExecutionRecord, Param, Rest,
    DEFAULT_RESERVOIR_CAPACITY, RETURN,
};
pub use function::{Body, ContractedFunction};
pub use registry::{Registry, RegistryError, Scope};
pub use reservoir::Reservoir;
pub use violation::{CallError, HostError, ViolationKind, ViolationReport, WitnessFrame};

#[cfg(test)]
mod tests;
