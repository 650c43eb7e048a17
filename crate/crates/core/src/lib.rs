//! Exact arithmetic in quadratic fields, symmetric designs, Hadamard matrices
//! and two-level Cretan matrices, with the constructions that move between
//! them.

pub mod cretan;
pub mod designs;
pub mod exactmat;
pub mod formats;
pub mod hadamard;
pub mod numtheory;
pub mod qfield;

pub use cretan::{
    cretan_from_sbibd, cretan_to_incidence, det_bounds, mersenne_level, roundtrip, scan, solve_levels, verify_cretan,
    Convention, CretanError, CretanMatrix, DetBounds, RoundtripReport,
};
pub use designs::{verify_design, Design, DesignError};
pub use exactmat::{ExactMatrix, MatrixError};
pub use hadamard::{sbibd_to_hadamard, verify_hadamard, HadamardError, HadamardMatrix};
pub use qfield::{QuadNum, Rational};
