//! Exact search and certification of lens spaces that are isospectral on
//! p-forms for chosen degrees.
//!
//! A lens space is determined by a modulus `q` and a split of the unit
//! residues into two negation-closed halves. The closed/coclosed p-form
//! spectra of two such spaces agree exactly when their comparison Laurent
//! polynomials agree, and those polynomials reduce to weighted subset-sum
//! counts, so everything here is exact integer arithmetic. A floating
//! point oracle evaluates the underlying generating functions directly
//! and cross-checks the exact verdicts.
//!
//! Modules:
//! - [`numtheory`]: totients, unit residues, factor shapes, cyclotomics
//! - [`polynomial`]: dense Laurent polynomials over big integers
//! - [`chartables`]: subset-sum tables and pair-count matrices
//! - [`spectra`]: comparison polynomials and profile comparison
//! - [`search`]: orbit enumeration and the all-pairs driver
//! - [`oracle`]: independent numeric verification suites
//! - [`cli`]: command implementations and result serialization

pub mod chartables;
pub mod cli;
pub mod error;
pub mod numtheory;
pub mod oracle;
pub mod polynomial;
pub mod search;
pub mod spectra;

pub use error::{Error, Result};
