//! Quantum message authentication built from a standard-form pre-code
//! composed with a McEliece-style Goppa-code trapdoor.
//!
//! The classical pipeline encodes `s` as `s·G_s·G' ⊕ r` with `G' = S·G·P`;
//! the quantum pipeline runs the same maps as basis permutations on a
//! five-register simulated machine, measuring only message-independent
//! quantities (the Goppa syndrome and the pre-code check).

pub mod classical;
pub mod error;
pub mod experiment;
pub mod gf2;
pub mod gf2m;
pub mod goppa;
pub mod keys;
pub mod protocol;
pub mod qsim;
pub mod sns;

pub use error::{Error, Result};
