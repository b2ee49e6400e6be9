//! Entanglement structure of monitored Clifford circuits through their dual
//! classical code, with a stabilizer-tableau oracle to check it against.
//!
//! The crate is organised bottom-up:
//!
//! * [`gf2`] and [`pauli`]: packed GF(2) linear algebra and symplectic Pauli algebra.
//! * [`schedule`] and [`dual_code`]: measurement schedules, codewords, error
//!   vectors, null counts, entropies and decoders.
//! * [`tableau`] and [`clifford`]: an exact mixed-state stabilizer simulator and
//!   Clifford gates, including uniform random Cliffords.
//! * [`groups`]: stabilizer and logical groups built recursively from a schedule.
//! * [`distill`]: the two distillation protocols and their exhaustive averages.
//! * [`circuits`] and [`experiments`]: random monitored circuits, sweeps and fits.
//! * [`verify`]: named executable checks of every structural claim.

pub mod circuits;
pub mod clifford;
pub mod distill;
pub mod dual_code;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod gf2;
pub mod groups;
pub mod pauli;
pub mod schedule;
pub mod tableau;
pub mod verify;

pub use dual_code::{DualCode, EntropyReport, ExtendedDualCode};
pub use error::{Error, Result};
pub use gf2::{BitVec, Gf2RowSpace, SignVector};
pub use groups::PauliGroupGens;
pub use pauli::{Letter, PauliString, SubsystemMask};
pub use schedule::MeasurementSchedule;
pub use tableau::{MeasurementRecord, StabilizerTableau};
