//! Pauli-principle-aware uncertainty relations for fermion systems.
//!
//! The crate evaluates spin-dependent lower bounds on the Heisenberg-like
//! product `⟨r^α⟩^{2/α}⟨p²⟩` and on the Fisher-information product
//! `I[ρ]·I[γ]`, computes the corresponding physical quantities for analytic
//! model systems and for neutral atoms, and checks every intermediate
//! inequality used to derive the bounds.

pub mod atom;
pub mod bounds;
pub mod error;
pub mod functionals;
pub mod io;
pub mod models;
pub mod radial;
pub mod special;

pub use atom::config::{ground_configuration, Configuration, Shell};
pub use atom::report::{atom_report, momentum_orbitals, scan_periodic_table, AtomOptions, AtomScanRow, OrbitalSet};
pub use atom::scf::{solve_atom, ExchangeModel, ScfOptions, ScfSolution};
pub use bounds::{BoundKind, BoundQuery, BoundReport};
pub use error::{Error, Result};
pub use functionals::{DensitySummary, InequalityReport, RadialDensity};
pub use models::{ModelReference, ShellFillingResult};
pub use radial::{RadialFunction, RadialGrid};
