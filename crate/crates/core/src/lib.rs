//! Finite compact quantum groupoids: Hilbert bimodules over finite-dimensional
//! C*-algebras, the dual quantum groupoid of a finite groupoid, and numerical
//! verification of the quantum-groupoid axioms.

pub mod algebra;
pub mod bimodule;
pub mod cli;
pub mod corep;
pub mod dual;
pub mod error;
pub mod fixtures;
pub mod groupoid;
pub mod io;
pub mod kernel;
pub mod quantum;
pub mod report;
pub mod selftest;
pub mod verify;

pub use error::{Error, Result};
pub use report::{Check, VerificationReport};
