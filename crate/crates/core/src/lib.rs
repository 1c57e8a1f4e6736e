//! Extended quantum Ising chains with `M`-neighbour couplings.
//!
//! * [`spectrum`]: free-fermion excitation spectrum, ground energy and gap.
//! * [`perturb`]: perturbative corrections from a weak longitudinal field.
//! * [`oracle`]: exact diagonalization of small chains, used as a cross-check.
//! * [`ec3`]: Exact Cover 3 instances restricted to `M`-local clauses.

pub mod chain;
pub mod ec3;
pub mod error;
pub mod linalg;
pub mod numeric;
pub mod oracle;
pub mod perturb;
pub mod spectrum;

pub use chain::{ChainSpec, CouplingProfile, LongitudinalField, ProfileKind};
pub use error::{Error, Result};
