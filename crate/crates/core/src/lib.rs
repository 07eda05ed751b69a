//! Dense statevector simulation of reflection-based permutation inversion.
//!
//! A permutation `f` on `n`-bit strings is inverted in `n/2` rounds, each of
//! which tags the preimages matching the next two bits of `x` and reflects
//! about the uniform superposition of the survivors. The same rounds can be
//! run with every reflection conjugated by a pseudo-identity `J`, and the
//! [`analysis`] module checks the resulting error bounds numerically.
//!
//! ```
//! use owpinv::{run_inv, Family, Permutation, RunOptions};
//!
//! let perm = Permutation::build(&Family::Random, 6, Some(3)).unwrap();
//! let report = run_inv(&perm, 17, 1, &RunOptions::exact()).unwrap();
//! assert_eq!(report.target, perm.inverse(17));
//! assert!(report.success_prob > 1.0 - 1e-9);
//! ```

pub mod analysis;
pub mod error;
pub mod harness;
pub mod invert;
pub mod ops;
pub mod perm;
pub mod qstate;
pub mod tol;

pub use error::{Error, Result};
pub use invert::{run_av_inv, run_inv, RunOptions, RunReport};
pub use ops::{PseudoIdentity, PseudoIdentitySpec};
pub use perm::{Family, FamilyKind, Permutation};
pub use qstate::StateVector;
