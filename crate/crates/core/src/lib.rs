//! Exact finite-volume lattice spin systems: Gibbs specifications, relative
//! entropy densities, decimation and random-field joint measures.

pub mod disordered;
pub mod energy;
pub mod error;
pub mod lattice;
pub mod measure;
pub mod numeric;
pub mod potential;
pub mod specification;
pub mod table;
pub mod transform;
pub mod transfer;
pub mod unionfind;

pub use error::{Error, Result};
pub use lattice::{boundary_shell, concat, cube, lex_leq, plus_concat, Config, LocalFunction, Site, Volume};
pub use numeric::Extended;
pub use potential::{Alphabet, LocalAlphabet, Potential, Term};
pub use specification::{GibbsSpecification, KernelTable};
pub use table::ProbTable;
pub use transfer::TransferChain;
