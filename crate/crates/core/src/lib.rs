//! Syndrome extraction scheduling for quantum LDPC codes.
//!
//! The crate turns a stabilizer code (binary symplectic parity-check matrix)
//! into a schedule assigning every check–qubit interaction a tick, such that
//! qubits are used at most once per tick and every pair of checks sees an
//! even number of order inversions on the qubits where they anticommute.
//! Minimum-depth schedules are found by iterated SAT calls, starting at the
//! Tanner-graph degree bound.
//!
//! Around the scheduler sit the pieces needed to trust and use its output:
//! GF(2) linear algebra, code families and a small catalog, two baseline
//! schedulers, a constraint checker that never touches the solver, an exact
//! stabilizer tableau simulator, and a circuit builder that writes memory
//! experiments in a Stim-compatible text format.

pub mod circuit;
pub mod code;
pub mod error;
pub mod gf2;
pub mod sat;
pub mod schedule;
pub mod symmetry;
pub mod tableau;
pub mod tanner;

pub use error::{Error, Result};
