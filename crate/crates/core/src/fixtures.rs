//! Small hand-written schedules with known answers.
//!
//! Qubit 0 plays the role of subsystem A unless stated otherwise.

use rand::Rng;

use crate::pauli::{PauliString, SubsystemMask};
use crate::schedule::MeasurementSchedule;

fn sched(n: usize, ops: &[&str]) -> MeasurementSchedule {
    MeasurementSchedule::from_strs(n, ops).expect("fixture schedules are valid")
}

/// Three mutually commuting measurements on three qubits.
pub fn commuting_triple() -> MeasurementSchedule {
    sched(3, &["XXI", "ZZX", "YZZ"])
}

/// Three measurements whose second and third error vectors coincide.
pub fn anticommuting_triple() -> MeasurementSchedule {
    sched(3, &["XZI", "ZIX", "IXX"])
}

/// Three measurements with a rank-two error space that swallows 𝒞(Y_A).
pub fn lossy_triple() -> MeasurementSchedule {
    sched(3, &["XIZ", "ZZZ", "YZZ"])
}

/// Two qubits, nothing measured.
pub fn no_measurement() -> MeasurementSchedule {
    MeasurementSchedule::empty(2)
}

/// Two qubits, a single Z_A.
pub fn single_z() -> MeasurementSchedule {
    sched(2, &["ZI"])
}

/// Two qubits, a single Z_A Z_B.
pub fn zz_parity() -> MeasurementSchedule {
    sched(2, &["ZZ"])
}

/// Two qubits, X_A X_B then Z_A Z_B: a Bell measurement.
pub fn bell_measurement() -> MeasurementSchedule {
    sched(2, &["XX", "ZZ"])
}

/// Two qubits, X_A Z_B then Z_A Z_B.
pub fn xz_then_zz() -> MeasurementSchedule {
    sched(2, &["XZ", "ZZ"])
}

/// Z_1, …, Z_n on n qubits.
pub fn z_chain(n: usize) -> MeasurementSchedule {
    let ops = (0..n)
        .map(|j| PauliString::single(n, j, crate::pauli::Letter::Z))
        .collect();
    MeasurementSchedule::new(n, ops).expect("valid")
}

/// Z_1, X_1, Z_2, X_2 on three qubits, leaving one logical qubit on qubit 3.
pub fn alternating_pairs() -> MeasurementSchedule {
    sched(3, &["ZII", "XII", "IZI", "IXI"])
}

/// Z_1, Z_2, X_1 X_2 on two qubits.
pub fn parity_pair() -> MeasurementSchedule {
    sched(2, &["ZI", "IZ", "XX"])
}

/// Subsystem made of qubit 0.
pub fn first_qubit(n: usize) -> SubsystemMask {
    SubsystemMask::new(n, [0]).expect("n ≥ 1")
}

/// A uniformly random non-identity Pauli on `n` qubits.
pub fn random_pauli<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PauliString {
    loop {
        let letters: String = (0..n)
            .map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)])
            .collect();
        let p: PauliString = letters.parse().expect("valid letters");
        if !p.is_identity() {
            return p;
        }
    }
}

/// `tau` independent uniformly random non-identity Paulis.
pub fn random_schedule<R: Rng + ?Sized>(n: usize, tau: usize, rng: &mut R) -> MeasurementSchedule {
    let ops = (0..tau).map(|_| random_pauli(n, rng)).collect();
    MeasurementSchedule::new(n, ops).expect("valid")
}

/// Random schedule with random size, n in 1..=n_max and τ in 0..=tau_max.
pub fn random_schedule_up_to<R: Rng + ?Sized>(
    n_max: usize,
    tau_max: usize,
    rng: &mut R,
) -> MeasurementSchedule {
    let n = rng.random_range(1..=n_max);
    let tau = rng.random_range(0..=tau_max);
    random_schedule(n, tau, rng)
}

/// A random nonempty subsystem of `n` qubits (possibly everything).
pub fn random_subsystem<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SubsystemMask {
    loop {
        let members: Vec<usize> = (0..n).filter(|_| rng.random::<bool>()).collect();
        if !members.is_empty() {
            return SubsystemMask::new(n, members).expect("in range");
        }
    }
}
