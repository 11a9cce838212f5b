//! Compacting QROM data-encoding circuits by reordering the database.
//!
//! The address assignment of a read-only table is treated as a free
//! permutation. Each ordering is scored by minimizing one ESOP cover per
//! output bit and counting specified literals; permutation search then looks
//! for cheap orderings, and the winning covers are emitted as reversible
//! circuits (one multi-controlled X per cube) that are checked classically.

pub mod circuit;
pub mod cost;
pub mod database;
pub mod error;
pub mod esop;
pub mod experiment;
pub mod search;

pub use circuit::{emit_circuit, Circuit, Gate};
pub use cost::{proxy_score, CostReport};
pub use database::{Database, Permutation};
pub use error::{Error, Result};
pub use esop::{minimize, minimize_all, Cover, Cube, TruthTable};
pub use search::{Method, SearchConfig, SearchResult};
