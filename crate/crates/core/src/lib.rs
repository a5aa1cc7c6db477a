//! SLAC (non-local, exact-symbol) lattice derivatives and their quantum
//! block-encodings.
//!
//! The crate is organised bottom-up:
//!
//! * [`slac`] builds the classical circulant operators and their spectra. It is
//!   the reference every quantum construction is checked against.
//! * [`qsim`] is a register-addressed statevector simulator with gate tallies.
//! * [`state_prep`] builds the nested-box inequality-test PREP circuits.
//! * [`block_encoding`] assembles LCU unitaries, masked variants and linear
//!   combinations, and extracts their encoded blocks.
//! * [`qswt`] implements the Shannon wavelet transform and its multiscale
//!   recursion.
//! * [`precond`] holds the diagonal wavelet preconditioner, the benchmark
//!   operators, nullspace projection and the emulated linear solve.
//! * [`acceptance`] runs the end-to-end criteria; [`cli`] drives experiments.

pub mod acceptance;
pub mod block_encoding;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod precond;
pub mod qsim;
pub mod qswt;
pub mod slac;
pub mod state_prep;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Dense complex matrix used throughout.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex vector used throughout.
pub type CVec = nalgebra::DVector<C64>;
