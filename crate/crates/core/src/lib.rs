//! Greedy approximation and greedy convex descent over dictionaries in
//! finite-dimensional `l_p` spaces.
//!
//! The crate is `no_std` (it needs `alloc`) and exposes:
//!
//! * [`spaces`]: `l_p` norms, norming functionals, moduli of smoothness;
//! * [`dictionary`]: dictionary builders, coherence, the `beta` parameter,
//!   atomic-norm brackets and the covering duality;
//! * [`greedy`]: WCGA, WGAFR, WGA, WOGA, the dual greedy expansion and the
//!   orthogonal-then-pure hybrid;
//! * [`descent`]: energies and their greedy minimizers WCGA(co), WGAFR(co);
//! * [`verify`]: rate fits, guarantee checks and brute-force oracles.
//!
//! All randomized routines take an explicit seed and are reproducible.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod descent;
pub mod dictionary;
mod error;
pub mod greedy;
pub mod linalg;
pub mod minimize;
pub mod sampling;
pub mod spaces;
pub mod verify;

pub use dictionary::Dictionary;
pub use error::{Error, Result};
pub use greedy::{GreedyConfig, SignedIndex, Trace};
pub use spaces::{Covector, SmoothSpace};
