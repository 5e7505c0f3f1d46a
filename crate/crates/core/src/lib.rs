//! Time-reversal ("time-flow") evaluation of teleportation-like circuits,
//! checked against an ordinary tensor-product simulator, plus an idealized
//! NMR spin-dynamics engine for the four-spin acausality experiment.

pub mod circuits;
pub mod error;
pub mod linalg;
pub mod nmr;
pub mod random;
pub mod timeflow;

pub use error::{Error, Result};
