//! Simulation and analysis of a qubit sealed-message protocol.
//!
//! Bob sends Alice a stream of qubits prepared in one of the four BB84 states;
//! Alice measures each in σ1 or σ3 and publicly announces either her raw
//! result or the message bit XOR-coded with it. An eavesdropper acting on the
//! qubits with a fixed quantum operation learns about the message from the
//! coded announcements, and in doing so produces mismatches that Bob can see
//! in the result announcements.
//!
//! * [`qubit`]: density matrices, Bloch vectors and Kraus channels.
//! * [`protocol`]: the shot-level state machine and a seeded Monte Carlo harness.
//! * [`analysis`]: closed-form mutual information and mismatch probabilities.
//! * [`cli`]: the `qseal` command-line front end.

pub mod analysis;
pub mod cli;
mod error;
pub mod protocol;
pub mod qubit;

pub use error::{Error, Result};
