//! Ternary cube algebra and per-output ESOP minimization.

mod cover;
mod cube;
mod minimize;

pub use cover::{extract_truth_tables, Cover, CoverListing, TruthTable};
pub use cube::{Cube, Literal};
pub use minimize::{minimize, minimize_cover, MAX_ITERATIONS};

use crate::database::Database;

/// Minimizes every output bit of `db`.
pub fn minimize_all(db: &Database) -> Vec<Cover> {
    extract_truth_tables(db).iter().map(minimize).collect()
}
