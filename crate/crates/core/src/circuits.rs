//! Random monitored Clifford circuits and their conversion to measurement schedules.
//!
//! A circuit is a flat list of gates and Pauli measurements. Conjugating each
//! measured operator through every later gate gives the equivalent schedule of
//! time-evolved operators, to be measured on the initial state before the
//! whole unitary is applied.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clifford::{Gate, TwoQubitClifford};
use crate::error::{Error, Result};
use crate::gf2::{BitVec, SignVector};
use crate::pauli::{Letter, PauliString};
use crate::schedule::MeasurementSchedule;
use crate::tableau::{MeasurementRecord, OutcomePolicy, StabilizerTableau};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// A one-dimensional brickwork circuit with random single-site Z measurements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircuitSpec {
    pub n: usize,
    pub depth: usize,
    /// Probability of measuring each site after each layer.
    pub p: f64,
    pub boundary: Boundary,
    pub seed: u64,
}

impl CircuitSpec {
    pub fn new(n: usize, depth: usize, p: f64, boundary: Boundary, seed: u64) -> Result<Self> {
        let spec = CircuitSpec {
            n,
            depth,
            p,
            boundary,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument(
                "circuit needs at least one qubit".into(),
            ));
        }
        if self.depth == 0 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidArgument(format!(
                "measurement probability {} is outside [0, 1]",
                self.p
            )));
        }
        Ok(())
    }

    /// Gate pairs of brickwork layer `t`.
    pub fn layer_pairs(&self, t: usize) -> Vec<(usize, usize)> {
        let n = self.n;
        let mut pairs: Vec<(usize, usize)> = (t % 2..n.saturating_sub(1))
            .step_by(2)
            .map(|a| (a, a + 1))
            .collect();
        if self.boundary == Boundary::Periodic && n > 2 && n.is_multiple_of(2) && t % 2 == 1 {
            pairs.push((n - 1, 0));
        }
        pairs
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CircuitOp {
    Gate(Gate),
    Measure(PauliString),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonitoredCircuit {
    n: usize,
    ops: Vec<CircuitOp>,
    /// `layer_ends[t]` is the number of ops up to and including layer t.
    layer_ends: Vec<usize>,
}

impl MonitoredCircuit {
    pub fn new(n: usize) -> Self {
        MonitoredCircuit {
            n,
            ops: Vec::new(),
            layer_ends: Vec::new(),
        }
    }

    pub fn push(&mut self, op: CircuitOp) -> Result<()> {
        match &op {
            CircuitOp::Gate(g) => g.check(self.n)?,
            CircuitOp::Measure(p) => {
                if p.n() != self.n {
                    return Err(Error::Dimension {
                        expected: self.n,
                        found: p.n(),
                    });
                }
                if !p.is_hermitian() {
                    return Err(Error::NonHermitian);
                }
                if p.is_identity() {
                    return Err(Error::IdentityMeasurement);
                }
            }
        }
        self.ops.push(op);
        Ok(())
    }

    /// Marks the end of a layer.
    pub fn end_layer(&mut self) {
        self.layer_ends.push(self.ops.len());
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn layer_ends(&self) -> &[usize] {
        &self.layer_ends
    }

    pub fn measurement_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, CircuitOp::Measure(_)))
            .count()
    }

    pub fn gates(&self) -> Vec<Gate> {
        self.ops
            .iter()
            .filter_map(|op| match op {
                CircuitOp::Gate(g) => Some(*g),
                CircuitOp::Measure(_) => None,
            })
            .collect()
    }

    /// The equivalent schedule of operators evolved to the end of the circuit.
    pub fn to_schedule(&self) -> MeasurementSchedule {
        time_evolve(self.n, &self.ops).expect("ops validated on push")
    }
}

/// Conjugates each measured operator through all later gates.
pub fn time_evolve(n: usize, ops: &[CircuitOp]) -> Result<MeasurementSchedule> {
    let mut measured: Vec<PauliString> = Vec::new();
    for op in ops {
        match op {
            CircuitOp::Gate(g) => {
                g.check(n)?;
                for p in &mut measured {
                    g.conjugate(p);
                }
            }
            CircuitOp::Measure(p) => measured.push(p.clone()),
        }
    }
    MeasurementSchedule::new(n, measured)
}

/// Builds a random brickwork circuit from `spec`: each layer applies uniform
/// two-qubit Cliffords and then measures every site in Z with probability p.
pub fn random_circuit(spec: &CircuitSpec) -> Result<MonitoredCircuit> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut circuit = MonitoredCircuit::new(spec.n);
    for t in 0..spec.depth {
        for (a, b) in spec.layer_pairs(t) {
            let c = TwoQubitClifford::random(&mut rng);
            circuit.push(CircuitOp::Gate(Gate::Two(a, b, c)))?;
        }
        for q in 0..spec.n {
            if rng.random_bool(spec.p) {
                circuit.push(CircuitOp::Measure(PauliString::single(
                    spec.n,
                    q,
                    Letter::Z,
                )))?;
            }
        }
        circuit.end_layer();
    }
    Ok(circuit)
}

/// The schedule of time-evolved measured operators of a random circuit.
pub fn gen_random_monitored_circuit(spec: &CircuitSpec) -> Result<MeasurementSchedule> {
    Ok(random_circuit(spec)?.to_schedule())
}

/// Runs the circuit directly on qubits `positions` of a tableau, measuring
/// in place. Outcomes are listed in circuit order, matching the schedule.
pub fn simulate_interleaved(
    tableau: &mut StabilizerTableau,
    circuit: &MonitoredCircuit,
    positions: &[usize],
    policy: OutcomePolicy<'_>,
) -> Result<MeasurementRecord> {
    simulate_ops(
        tableau,
        circuit.n(),
        circuit.ops(),
        positions,
        policy,
        |_, _| Ok(()),
    )
}

/// As [`simulate_interleaved`], calling `after_op(index, tableau)` after every op.
pub fn simulate_ops<F>(
    tableau: &mut StabilizerTableau,
    n: usize,
    ops: &[CircuitOp],
    positions: &[usize],
    policy: OutcomePolicy<'_>,
    mut after_op: F,
) -> Result<MeasurementRecord>
where
    F: FnMut(usize, &StabilizerTableau) -> Result<()>,
{
    if positions.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: positions.len(),
        });
    }
    let total = ops
        .iter()
        .filter(|op| matches!(op, CircuitOp::Measure(_)))
        .count();
    if let OutcomePolicy::Forced(m) = policy {
        if m.len() != total {
            return Err(Error::Dimension {
                expected: total,
                found: m.len(),
            });
        }
    }
    let start = tableau.log2_prob();
    let mut outcomes = BitVec::zeros(total);
    let mut j = 0;
    for (i, op) in ops.iter().enumerate() {
        match op {
            CircuitOp::Gate(g) => {
                g.check(n)?;
                let (a, b) = g.qubits();
                let placed = match *g {
                    Gate::H(_) => Gate::H(positions[a]),
                    Gate::S(_) => Gate::S(positions[a]),
                    Gate::Sdg(_) => Gate::Sdg(positions[a]),
                    Gate::X(_) => Gate::X(positions[a]),
                    Gate::Y(_) => Gate::Y(positions[a]),
                    Gate::Z(_) => Gate::Z(positions[a]),
                    Gate::Cnot(..) => Gate::Cnot(positions[a], positions[b.unwrap_or(a)]),
                    Gate::Cz(..) => Gate::Cz(positions[a], positions[b.unwrap_or(a)]),
                    Gate::Swap(..) => Gate::Swap(positions[a], positions[b.unwrap_or(a)]),
                    Gate::Two(_, _, c) => Gate::Two(positions[a], positions[b.unwrap_or(a)], c),
                };
                tableau.apply_gate(&placed)?;
            }
            CircuitOp::Measure(p) => {
                let placed = p.embed(tableau.n(), positions)?;
                let forced = match policy {
                    OutcomePolicy::Sample => None,
                    OutcomePolicy::Forced(m) => Some(m.sign(j)),
                };
                if tableau.measure(&placed, forced)? < 0 {
                    outcomes.set(j, true);
                }
                j += 1;
            }
        }
        after_op(i, tableau)?;
    }
    Ok(MeasurementRecord {
        outcomes: SignVector(outcomes),
        log2_prob: tableau.log2_prob() - start,
    })
}
