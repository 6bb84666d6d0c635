//! Decision procedures for the bimodal logics K4xS5, S4xS5 and SSL based on
//! tableau clouds.
//!
//! The usual entry point is [`solver::solve`]:
//!
//! ```
//! use bimodal_sat::{formula::parse, solver::{solve, SearchOptions}, tableau::Logic};
//!
//! let f = parse("([]x0 & ~x0)").unwrap();
//! assert!(solve(&f, &SearchOptions::new(Logic::K4xS5)).unwrap().satisfiable);
//! assert!(!solve(&f, &SearchOptions::new(Logic::S4xS5)).unwrap().satisfiable);
//! ```

pub mod formula;
pub mod models;
pub mod oracle;
pub mod relations;
pub mod solver;
pub mod tableau;

pub use formula::{parse, Formula, VarId};
pub use solver::{solve, SearchOptions, Verdict};
pub use tableau::Logic;
