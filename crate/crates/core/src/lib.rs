//! Exact arithmetic for finitely atomic lattice charges, their square roots
//! under multiplicative convolution, and the weighted shifts they represent.
//!
//! Built on `alloc` only; the `aluthge` crate adds IO and a command line.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod families;
pub mod linalg;
pub mod measure;
pub mod mellin;
pub mod rational;
pub mod sampling;
pub mod shifts;
pub mod sqrt;
pub mod suites;

pub use measure::{AtomicCharge, Exponent, LatticeBase, MeasureError, MomentSequence, Sign};
pub use rational::Rational;
pub use shifts::{certify_diagram, berger_recover, DiagramReport, Verdict};
pub use sqrt::{aluthge_root, charge_sqrt, positive_sqrt, SqrtCertificate, SqrtError};
