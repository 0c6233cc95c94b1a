//! EFX allocations of indivisible goods among `n` agents, at least `n − 2` of
//! whom share one valuation.
//!
//! The solver ([`solver::solve`]) runs a potential-driven procedure over
//! *almost EFX-feasible* allocations and certifies its output; the oracle
//! ([`oracle::exists_efx_bruteforce`]) scans every allocation of small
//! instances as an independent check.

pub mod envy;
pub mod error;
pub mod format;
pub mod gen;
pub mod hunt;
pub mod model;
pub mod oracle;
pub mod pr;
pub mod solver;

pub use error::{EfxError, Result};
pub use model::{
    validate_allocation, Agent, Allocation, Bundle, Good, Instance, Valuation, ValuationKind, Value,
};
pub use pr::{Partition, PrLimits, PrStrategy};
pub use solver::{solve, Anchor, CaseLabel, Solution, SolverConfig, TraceEvent};
