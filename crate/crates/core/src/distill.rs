//! Entanglement distillation by reversing the measurement sequence.
//!
//! Three protocols are implemented on top of the tableau simulator:
//!
//! * A–B distillation. A is set aside, fresh Bell pairs are created between a
//!   new copy of A and a mirror Ā, the schedule is measured again in reverse
//!   order on (A_new, B), and the sum vector s = m·m̄ is decoded into a Pauli
//!   feedback on Ā.
//! * System–reference distillation. The conjugated operators are measured on
//!   the reference in chronological order and the reverse error vectors
//!   decode the feedback, leaving the Choi state of the stabilizer code.
//! * The single-reference-qubit variant in which the reference is entangled
//!   with one encoded qubit and the final Bell measurements are skipped.
//!
//! Besides single sampled runs, every outcome branch can be enumerated with
//! exact dyadic probabilities for small instances.

use std::collections::{BTreeMap, HashMap};

use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;

use crate::circuits::{time_evolve, CircuitOp};
use crate::clifford::Gate;
use crate::dual_code::DualCode;
use crate::error::{Error, Result};
use crate::gf2::{BitVec, SignVector};
use crate::groups::{build_logical, build_stabilizer, PauliGroupGens};
use crate::pauli::{Letter, PauliString, SubsystemMask};
use crate::schedule::MeasurementSchedule;
use crate::tableau::StabilizerTableau;

/// Exact probability.
pub type Dyadic = Ratio<i128>;

fn dyadic(log2: i64) -> Dyadic {
    assert!(
        (-126..=0).contains(&log2),
        "probability 2^{log2} out of range"
    );
    Ratio::new(1, 1i128 << (-log2))
}

/// Named contiguous registers in a flat qubit index space.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RegisterLayout {
    registers: Vec<(String, usize, usize)>,
}

impl RegisterLayout {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a register and returns its offset.
    pub fn push(&mut self, name: &str, width: usize) -> usize {
        let offset = self.total();
        self.registers.push((name.to_string(), offset, width));
        offset
    }

    pub fn total(&self) -> usize {
        self.registers.last().map_or(0, |(_, o, w)| o + w)
    }

    /// (offset, width) of a register.
    pub fn get(&self, name: &str) -> Option<(usize, usize)> {
        self.registers
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|&(_, o, w)| (o, w))
    }

    pub fn positions(&self, name: &str) -> Vec<usize> {
        self.get(name)
            .map_or_else(Vec::new, |(o, w)| (o..o + w).collect())
    }

    pub fn registers(&self) -> impl Iterator<Item = (&str, usize, usize)> {
        self.registers.iter().map(|(n, o, w)| (n.as_str(), *o, *w))
    }
}

/// One run of A–B distillation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistillationResult {
    pub m: SignVector,
    pub m_bar: SignVector,
    pub s: SignVector,
    /// Feedback applied on Ā, written on the |A| qubits in mask order.
    pub feedback: PauliString,
    /// log₂ of the fidelity with the ideal Bell pairs; `None` when it is zero.
    pub fidelity_log2: Option<i64>,
    pub seed: u64,
}

impl DistillationResult {
    pub fn fidelity(&self) -> Dyadic {
        self.fidelity_log2.map_or_else(Dyadic::zero, dyadic)
    }

    pub fn is_perfect(&self) -> bool {
        self.fidelity_log2 == Some(0)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DistillOptions {
    /// Keep a purifying reference register R in the simulation.
    pub include_reference: bool,
    /// Reverse only the most recent `depth` measurements.
    pub depth: Option<usize>,
}

/// A step of a protocol: a measurement or a Pauli conjugation.
#[derive(Clone, Debug)]
enum Step {
    Measure(PauliString),
    Apply(PauliString),
}

/// Visits every outcome branch of `steps` with its exact probability.
///
/// Deterministic measurements do not branch. `visit` receives the outcomes
/// of the measurement steps, the log₂ probability of the branch and the
/// final state.
fn enumerate_branches<F>(start: StabilizerTableau, steps: &[Step], visit: &mut F) -> Result<()>
where
    F: FnMut(&[i8], i64, StabilizerTableau) -> Result<()>,
{
    fn go<F>(
        mut t: StabilizerTableau,
        steps: &[Step],
        outcomes: &mut Vec<i8>,
        visit: &mut F,
    ) -> Result<()>
    where
        F: FnMut(&[i8], i64, StabilizerTableau) -> Result<()>,
    {
        let Some((step, rest)) = steps.split_first() else {
            let lp = t.log2_prob();
            return visit(outcomes, lp, t);
        };
        match step {
            Step::Apply(p) => {
                t.apply_pauli(p)?;
                go(t, rest, outcomes, visit)
            }
            Step::Measure(p) => {
                let e = t.expectation(p)?;
                if e != 0 {
                    outcomes.push(e);
                    go(t, rest, outcomes, visit)?;
                    outcomes.pop();
                    return Ok(());
                }
                let mut other = t.clone();
                t.measure(p, Some(1))?;
                outcomes.push(1);
                go(t, rest, outcomes, visit)?;
                outcomes.pop();
                other.measure(p, Some(-1))?;
                outcomes.push(-1);
                go(other, rest, outcomes, visit)?;
                outcomes.pop();
                Ok(())
            }
        }
    }
    let mut t = start;
    t.reset_log2_prob();
    go(t, steps, &mut Vec::new(), visit)
}

fn signs(v: &[i8]) -> SignVector {
    SignVector::from_signs(v).expect("outcomes are ±1")
}

/// Forced +1 measurements of the Bell stabilizers X_aX_b and Z_aZ_b on a
/// copy of the state: the product of their probabilities is the fidelity.
fn bell_fidelity_log2(t: &StabilizerTableau, pairs: &[(usize, usize)]) -> Result<Option<i64>> {
    let mut probe = t.clone();
    probe.reset_log2_prob();
    for &(a, b) in pairs {
        for l in [Letter::X, Letter::Z] {
            let mut g = PauliString::identity(t.n());
            g.set_letter(a, l);
            g.set_letter(b, l);
            match probe.measure(&g, Some(1)) {
                Ok(_) => {}
                Err(Error::ImpossibleOutcome { .. }) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(Some(probe.log2_prob()))
}

/// Probability that measuring each signed operator gives +1, as a log₂.
fn stabilizer_fidelity_log2(t: &StabilizerTableau, ops: &[PauliString]) -> Result<Option<i64>> {
    let mut probe = t.clone();
    probe.reset_log2_prob();
    for g in ops {
        match probe.measure(g, Some(1)) {
            Ok(_) => {}
            Err(Error::ImpossibleOutcome { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some(probe.log2_prob()))
}

/// The A–B protocol laid out on `[R? | S | A_new | A_bar]`.
struct AbProtocol {
    code: DualCode,
    mask: SubsystemMask,
    layout: RegisterLayout,
    start: StabilizerTableau,
    forward: Vec<PauliString>,
    /// Schedule index and placed operator of each reverse measurement, in order.
    reverse: Vec<(usize, PauliString)>,
    a_positions: Vec<usize>,
    abar_positions: Vec<usize>,
}

impl AbProtocol {
    fn new(
        schedule: &MeasurementSchedule,
        mask: &SubsystemMask,
        opts: DistillOptions,
    ) -> Result<Self> {
        let n = schedule.n();
        if mask.n() != n {
            return Err(Error::Dimension {
                expected: n,
                found: mask.n(),
            });
        }
        if mask.is_empty() {
            return Err(Error::InvalidSubsystem("subsystem A is empty".into()));
        }
        let k = mask.len();
        let mut layout = RegisterLayout::new();
        if opts.include_reference {
            layout.push("R", n);
        }
        let s_off = layout.push("S", n);
        let new_off = layout.push("A_new", k);
        let bar_off = layout.push("A_bar", k);
        let total = layout.total();

        let mut start = StabilizerTableau::new_maximally_mixed(total);
        if opts.include_reference {
            let pairs: Vec<(usize, usize)> = (0..n).map(|q| (q, s_off + q)).collect();
            start.push_bell_pairs(&pairs)?;
        }
        let fresh: Vec<(usize, usize)> = (0..k).map(|i| (new_off + i, bar_off + i)).collect();
        start.push_bell_pairs(&fresh)?;

        let s_positions: Vec<usize> = (s_off..s_off + n).collect();
        let forward = schedule
            .ops()
            .iter()
            .map(|p| p.embed(total, &s_positions))
            .collect::<Result<Vec<_>>>()?;
        let mut rev_positions = s_positions.clone();
        for (i, &q) in mask.members().iter().enumerate() {
            rev_positions[q] = new_off + i;
        }
        let tau = schedule.len();
        let first = tau - opts.depth.unwrap_or(tau).min(tau);
        let reverse = (first..tau)
            .rev()
            .map(|j| Ok((j, schedule.ops()[j].embed(total, &rev_positions)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(AbProtocol {
            code: DualCode::build(schedule),
            mask: mask.clone(),
            layout,
            start,
            forward,
            reverse,
            a_positions: mask.members().iter().map(|&q| s_off + q).collect(),
            abar_positions: (bar_off..bar_off + k).collect(),
        })
    }

    fn steps(&self) -> Vec<Step> {
        self.forward
            .iter()
            .cloned()
            .chain(self.reverse.iter().map(|(_, p)| p.clone()))
            .map(Step::Measure)
            .collect()
    }

    /// m and m̄ from the outcomes of all measurement steps.
    fn split(&self, outcomes: &[i8]) -> (SignVector, SignVector) {
        let tau = self.forward.len();
        let m = &outcomes[..tau];
        let mut m_bar = m.to_vec();
        for (&(j, _), &v) in self.reverse.iter().zip(&outcomes[tau..]) {
            m_bar[j] = v;
        }
        (signs(m), signs(&m_bar))
    }

    /// Decodes s and applies the feedback on Ā.
    fn finish(&self, t: &mut StabilizerTableau, s: &SignVector) -> Result<PauliString> {
        let decoded = self.code.decode(s, &self.mask).map_err(|e| match e {
            Error::Undecodable(s) => {
                Error::Invariant(format!("sum vector {s} outside the total error space"))
            }
            e => e,
        })?;
        let placed = decoded.correction.embed(t.n(), &self.abar_positions)?;
        t.apply_pauli(&placed)?;
        Ok(decoded.correction)
    }

    fn pairs(&self) -> Vec<(usize, usize)> {
        self.a_positions
            .iter()
            .copied()
            .zip(self.abar_positions.iter().copied())
            .collect()
    }

    /// Qubits A followed by Ā.
    fn output_mask(&self) -> SubsystemMask {
        SubsystemMask::new(
            self.layout.total(),
            self.a_positions.iter().chain(&self.abar_positions).copied(),
        )
        .expect("positions in range")
    }
}

/// Register layout used by [`distill_ab`].
pub fn ab_layout(n: usize, n_a: usize, include_reference: bool) -> RegisterLayout {
    let mut layout = RegisterLayout::new();
    if include_reference {
        layout.push("R", n);
    }
    layout.push("S", n);
    layout.push("A_new", n_a);
    layout.push("A_bar", n_a);
    layout
}

/// One sampled run of A–B distillation.
pub fn distill_ab(
    schedule: &MeasurementSchedule,
    mask: &SubsystemMask,
    seed: u64,
    opts: DistillOptions,
) -> Result<DistillationResult> {
    let proto = AbProtocol::new(schedule, mask, opts)?;
    let mut t = proto.start.clone().with_seed(seed);
    let mut outcomes = Vec::with_capacity(proto.forward.len() + proto.reverse.len());
    for p in proto
        .forward
        .iter()
        .chain(proto.reverse.iter().map(|(_, p)| p))
    {
        outcomes.push(t.measure(p, None)?);
    }
    let (m, m_bar) = proto.split(&outcomes);
    let s = m.mul(&m_bar);
    let feedback = proto.finish(&mut t, &s)?;
    let fidelity_log2 = bell_fidelity_log2(&t, &proto.pairs())?;
    Ok(DistillationResult {
        m,
        m_bar,
        s,
        feedback,
        fidelity_log2,
        seed,
    })
}

/// Pauli expectation values of an (averaged) state, keyed by unsigned operator.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Characteristic {
    /// Number of qubits of the operators.
    pub n: usize,
    pub values: HashMap<BitVec, Dyadic>,
}

impl Characteristic {
    fn new(n: usize) -> Self {
        Characteristic {
            n,
            values: HashMap::new(),
        }
    }

    /// Adds `weight` times the expectation values of the state restricted to
    /// `mask`. The generators come from [`StabilizerTableau::subgroup_on`].
    fn accumulate(&mut self, group: &[PauliString], weight: Dyadic) {
        let k = group.len();
        for bits in 0u64..(1u64 << k) {
            let mut p = PauliString::identity(self.n);
            for (i, g) in group.iter().enumerate() {
                if bits >> i & 1 == 1 {
                    p.mul_assign(g);
                }
            }
            let sign = p
                .sign()
                .expect("products of commuting Hermitian generators are Hermitian");
            let entry = self
                .values
                .entry(p.symplectic())
                .or_insert_with(Dyadic::zero);
            *entry += weight * Dyadic::from_integer(sign as i128);
        }
    }

    pub fn get(&self, p: &PauliString) -> Dyadic {
        self.values
            .get(&p.symplectic())
            .copied()
            .unwrap_or_else(Dyadic::zero)
    }

    fn prune(&mut self) {
        self.values.retain(|_, v| !v.is_zero());
    }

    /// Whether only terms Q ⊗ Q' with the same letters on both halves survive.
    pub fn is_bell_diagonal(&self) -> bool {
        let half = self.n / 2;
        self.values.iter().all(|(k, v)| {
            let p = PauliString::from_symplectic(k).expect("even width");
            v.is_zero() || (0..half).all(|q| p.letter(q) == p.letter(half + q))
        })
    }

    /// Weights w(P) = ⟨P|ρ|P⟩ of the Bell-basis states |P⟩ = (P ⊗ I)|EPR⟩,
    /// keyed by the letters of P on the first half.
    pub fn bell_weights(&self) -> BTreeMap<String, Dyadic> {
        let half = self.n / 2;
        let d2 = Dyadic::from_integer(1i128 << (2 * half));
        let diag: Vec<(PauliString, Dyadic)> = self
            .values
            .iter()
            .filter_map(|(k, v)| {
                let p = PauliString::from_symplectic(k).expect("even width");
                let q = p
                    .restrict(&SubsystemMask::interval(self.n, 0, half).expect("valid"))
                    .ok()?;
                let same = (0..half).all(|i| p.letter(i) == p.letter(half + i));
                same.then_some((q, *v))
            })
            .collect();
        let mut out = BTreeMap::new();
        for p in all_paulis(half) {
            let mut w = Dyadic::zero();
            for (q, v) in &diag {
                let mut term = *v;
                if q.y_count() % 2 == 1 {
                    term = -term;
                }
                if p.anticommutes(q) {
                    term = -term;
                }
                w += term;
            }
            let w = w / d2;
            if !w.is_zero() {
                out.insert(p.letters_string(), w);
            }
        }
        out
    }
}

/// Every unsigned Pauli on `n` qubits, identity first.
pub fn all_paulis(n: usize) -> Vec<PauliString> {
    assert!(n <= 12, "4^{n} Paulis is too many to list");
    (0..1u64 << (2 * n))
        .map(|bits| {
            let v = BitVec::from_bools((0..2 * n).map(|i| bits >> i & 1 == 1));
            PauliString::from_symplectic(&v).expect("even width")
        })
        .collect()
}

/// Exact statistics of the A–B protocol over all outcome branches.
#[derive(Clone, Debug)]
pub struct AbEnumeration {
    pub branches: usize,
    pub total_probability: Dyadic,
    /// Sum(s): probability of each sum vector.
    pub sum_vector: BTreeMap<SignVector, Dyadic>,
    /// Joint probability of (m, m̄).
    pub joint: BTreeMap<(SignVector, SignVector), Dyadic>,
    /// Probability that s ∈ ℰ, i.e. that no feedback is needed.
    pub no_feedback_mass: Dyadic,
    /// Averaged post-feedback state on A ∪ Ā.
    pub output: Characteristic,
    /// Probability that the output is exactly the Bell state.
    pub perfect_mass: Dyadic,
    /// Probability-weighted mean fidelity.
    pub mean_fidelity: Dyadic,
}

/// Enumerates every branch of A–B distillation.
pub fn enumerate_ab(
    schedule: &MeasurementSchedule,
    mask: &SubsystemMask,
    opts: DistillOptions,
) -> Result<AbEnumeration> {
    let proto = AbProtocol::new(schedule, mask, opts)?;
    let out_mask = proto.output_mask();
    let pairs = proto.pairs();
    let mut res = AbEnumeration {
        branches: 0,
        total_probability: Dyadic::zero(),
        sum_vector: BTreeMap::new(),
        joint: BTreeMap::new(),
        no_feedback_mass: Dyadic::zero(),
        output: Characteristic::new(out_mask.len()),
        perfect_mass: Dyadic::zero(),
        mean_fidelity: Dyadic::zero(),
    };
    let steps = proto.steps();
    enumerate_branches(proto.start.clone(), &steps, &mut |outcomes, lp, mut t| {
        let prob = dyadic(lp);
        let (m, m_bar) = proto.split(outcomes);
        let s = m.mul(&m_bar);
        if proto.code.error_space().contains(s.bits())? {
            res.no_feedback_mass += prob;
        }
        proto.finish(&mut t, &s)?;
        let group = t.subgroup_on(&out_mask)?;
        res.output.accumulate(&group, prob);
        match bell_fidelity_log2(&t, &pairs)? {
            Some(0) => {
                res.perfect_mass += prob;
                res.mean_fidelity += prob;
            }
            Some(f) => res.mean_fidelity += prob * dyadic(f),
            None => {}
        }
        *res.sum_vector.entry(s).or_insert_with(Dyadic::zero) += prob;
        *res.joint.entry((m, m_bar)).or_insert_with(Dyadic::zero) += prob;
        res.total_probability += prob;
        res.branches += 1;
        Ok(())
    })?;
    res.output.prune();
    Ok(res)
}

/// Sum(s) for every reachable sum vector, by exhaustive enumeration.
pub fn sum_vector_histogram(
    schedule: &MeasurementSchedule,
    mask: &SubsystemMask,
) -> Result<BTreeMap<SignVector, Dyadic>> {
    Ok(enumerate_ab(schedule, mask, DistillOptions::default())?.sum_vector)
}

/// The predicted histogram: uniform on the total error space.
pub fn sum_vector_prediction(
    code: &DualCode,
    mask: &SubsystemMask,
) -> Result<BTreeMap<SignVector, Dyadic>> {
    let space = code.total_error_space(mask)?;
    let w = dyadic(-(space.rank() as i64));
    Ok(space
        .elements()
        .into_iter()
        .map(|v| (SignVector(v), w))
        .collect())
}

/// How to average the distilled output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AverageMode {
    Exhaustive,
    Sampled { runs: usize, seed: u64 },
}

/// Outcome-averaged output of A–B distillation in the Bell basis of A Ā.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AveragedOutput {
    pub n_a: usize,
    pub bell_diagonal: bool,
    /// Nonzero weights w(P_A), keyed by the letters of P_A.
    pub weights: BTreeMap<String, Dyadic>,
}

impl AveragedOutput {
    /// S(AĀ) − S(Ā) of the averaged state, assuming it is Bell diagonal.
    pub fn conditional_entropy(&self) -> f64 {
        let h: f64 = self
            .weights
            .values()
            .map(|w| {
                let p = *w.numer() as f64 / *w.denom() as f64;
                if p > 0.0 {
                    -p * p.log2()
                } else {
                    0.0
                }
            })
            .sum();
        h - self.n_a as f64
    }
}

/// Averaged output of A–B distillation, over every branch or over sampled runs.
pub fn distill_ab_average(
    schedule: &MeasurementSchedule,
    mask: &SubsystemMask,
    mode: AverageMode,
) -> Result<AveragedOutput> {
    let output = match mode {
        AverageMode::Exhaustive => enumerate_ab(schedule, mask, DistillOptions::default())?.output,
        AverageMode::Sampled { runs, seed } => {
            if runs == 0 {
                return Err(Error::InvalidArgument("need at least one run".into()));
            }
            let proto = AbProtocol::new(schedule, mask, DistillOptions::default())?;
            let out_mask = proto.output_mask();
            let mut acc = Characteristic::new(out_mask.len());
            let w = Dyadic::new(1, runs as i128);
            for r in 0..runs {
                let mut t = proto.start.clone().with_seed(seed.wrapping_add(r as u64));
                let mut outcomes = Vec::new();
                for p in proto
                    .forward
                    .iter()
                    .chain(proto.reverse.iter().map(|(_, p)| p))
                {
                    outcomes.push(t.measure(p, None)?);
                }
                let (m, m_bar) = proto.split(&outcomes);
                proto.finish(&mut t, &m.mul(&m_bar))?;
                acc.accumulate(&t.subgroup_on(&out_mask)?, w);
            }
            acc.prune();
            acc
        }
    };
    Ok(AveragedOutput {
        n_a: mask.len(),
        bell_diagonal: output.is_bell_diagonal(),
        weights: output.bell_weights(),
    })
}

/// The operators P_A on A with 𝒞(P_A) ∈ ℰ, as letters on the |A| qubits.
pub fn null_operators_on(code: &DualCode, mask: &SubsystemMask) -> Result<Vec<PauliString>> {
    let mut out = Vec::new();
    for p in all_paulis(mask.len()) {
        if code.is_null(&p.embed(code.n(), mask.members())?)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// The predicted averaged output: uniform over the null operators on A.
pub fn averaged_output_prediction(code: &DualCode, mask: &SubsystemMask) -> Result<AveragedOutput> {
    let nulls = null_operators_on(code, mask)?;
    let w = Dyadic::new(1, nulls.len() as i128);
    Ok(AveragedOutput {
        n_a: mask.len(),
        bell_diagonal: true,
        weights: nulls.iter().map(|p| (p.letters_string(), w)).collect(),
    })
}

/// Exact joint distribution of (m, m̄) when P_A is applied between the
/// forward pass and the reversed pass, all on the n system qubits of a
/// maximally mixed state.
pub fn conjugated_joint_distribution(
    schedule: &MeasurementSchedule,
    p_a: &PauliString,
) -> Result<BTreeMap<(SignVector, SignVector), Dyadic>> {
    let n = schedule.n();
    if p_a.n() != n {
        return Err(Error::Dimension {
            expected: n,
            found: p_a.n(),
        });
    }
    let tau = schedule.len();
    let mut steps: Vec<Step> = schedule.ops().iter().cloned().map(Step::Measure).collect();
    steps.push(Step::Apply(p_a.clone()));
    steps.extend(schedule.ops().iter().rev().cloned().map(Step::Measure));
    let mut out = BTreeMap::new();
    enumerate_branches(
        StabilizerTableau::new_maximally_mixed(n),
        &steps,
        &mut |o, lp, _| {
            let m = signs(&o[..tau]);
            let mut mb: Vec<i8> = o[tau..].to_vec();
            mb.reverse();
            *out.entry((m, signs(&mb))).or_insert_with(Dyadic::zero) += dyadic(lp);
            Ok(())
        },
    )?;
    Ok(out)
}

/// Exact distribution of the forward outcomes on a maximally mixed state.
pub fn outcome_distribution(
    schedule: &MeasurementSchedule,
) -> Result<BTreeMap<SignVector, Dyadic>> {
    let steps: Vec<Step> = schedule.ops().iter().cloned().map(Step::Measure).collect();
    let mut out = BTreeMap::new();
    enumerate_branches(
        StabilizerTableau::new_maximally_mixed(schedule.n()),
        &steps,
        &mut |o, lp, _| {
            *out.entry(signs(o)).or_insert_with(Dyadic::zero) += dyadic(lp);
            Ok(())
        },
    )?;
    Ok(out)
}

/// One run of system–reference distillation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChoiResult {
    pub m: SignVector,
    pub m_bar: SignVector,
    pub s: SignVector,
    /// Zero-based indices Λ of the feedback operators.
    pub indices: Vec<usize>,
    pub feedback: PauliString,
    /// Every logical generator P has ⟨P ⊗ P*⟩ = +1.
    pub logical_correlations: bool,
    /// Every checked partner d of a stabilizer has ⟨d ⊗ d*⟩ = 0.
    pub partner_correlations: bool,
    pub seed: u64,
}

/// Layout `[S | R]` with S and R paired by Bell states.
pub fn sysref_layout(n: usize) -> RegisterLayout {
    let mut layout = RegisterLayout::new();
    layout.push("S", n);
    layout.push("R", n);
    layout
}

struct SysRefProtocol {
    code: DualCode,
    n: usize,
    forward: Vec<PauliString>,
    reverse: Vec<PauliString>,
}

impl SysRefProtocol {
    fn new(schedule: &MeasurementSchedule) -> Result<Self> {
        let n = schedule.n();
        let s_pos: Vec<usize> = (0..n).collect();
        let r_pos: Vec<usize> = (n..2 * n).collect();
        Ok(SysRefProtocol {
            code: DualCode::build(schedule),
            n,
            forward: schedule
                .ops()
                .iter()
                .map(|p| p.embed(2 * n, &s_pos))
                .collect::<Result<_>>()?,
            reverse: schedule
                .ops()
                .iter()
                .map(|p| p.conjugate().embed(2 * n, &r_pos))
                .collect::<Result<_>>()?,
        })
    }

    fn steps(&self) -> Vec<Step> {
        self.forward
            .iter()
            .chain(&self.reverse)
            .cloned()
            .map(Step::Measure)
            .collect()
    }

    fn finish(
        &self,
        t: &mut StabilizerTableau,
        s: &SignVector,
    ) -> Result<(Vec<usize>, PauliString)> {
        let dec = self.code.decode_reverse(s).map_err(|e| match e {
            Error::Undecodable(s) => {
                Error::Invariant(format!("sum vector {s} outside the reverse error space"))
            }
            e => e,
        })?;
        let r_pos: Vec<usize> = (self.n..2 * self.n).collect();
        t.apply_pauli(&dec.product.embed(2 * self.n, &r_pos)?)?;
        Ok((dec.indices, dec.product))
    }
}

/// P on S times P* on R.
pub fn mirrored(p: &PauliString) -> PauliString {
    let n = p.n();
    let s_pos: Vec<usize> = (0..n).collect();
    let r_pos: Vec<usize> = (n..2 * n).collect();
    let mut out = p.embed(2 * n, &s_pos).expect("in range");
    out.mul_assign(&p.conjugate().embed(2 * n, &r_pos).expect("in range"));
    out
}

/// A single-qubit Pauli anticommuting with `s`.
fn partner(s: &PauliString) -> Option<PauliString> {
    let n = s.n();
    (0..n).find_map(|q| {
        let l = match s.letter(q) {
            Letter::I => return None,
            Letter::Z => Letter::X,
            _ => Letter::Z,
        };
        Some(PauliString::single(n, q, l))
    })
}

fn unsigned(p: &PauliString) -> PauliString {
    let mut q = p.clone();
    q.set_phase(0);
    q
}

/// Checks the output correlations of a system–reference run.
fn choi_correlations(
    t: &StabilizerTableau,
    stabilizer: &PauliGroupGens,
    logical: &PauliGroupGens,
) -> Result<(bool, bool)> {
    let mut logical_ok = true;
    for g in logical.generators() {
        logical_ok &= t.expectation(&mirrored(&unsigned(g)))? == 1;
    }
    let mut partner_ok = true;
    for s in stabilizer.generators() {
        if let Some(d) = partner(s) {
            partner_ok &= t.expectation(&mirrored(&d))? == 0;
        }
    }
    Ok((logical_ok, partner_ok))
}

/// One sampled run of system–reference distillation on layout `[S | R]`.
pub fn distill_system_reference(schedule: &MeasurementSchedule, seed: u64) -> Result<ChoiResult> {
    let proto = SysRefProtocol::new(schedule)?;
    let n = proto.n;
    let mut t = StabilizerTableau::new_with_reference(n).with_seed(seed);
    let mut m = Vec::new();
    for p in &proto.forward {
        m.push(t.measure(p, None)?);
    }
    let mut mb = Vec::new();
    for p in &proto.reverse {
        mb.push(t.measure(p, None)?);
    }
    let (m, m_bar) = (signs(&m), signs(&mb));
    let s = m.mul(&m_bar);
    let (indices, feedback) = proto.finish(&mut t, &s)?;
    let (logical_correlations, partner_correlations) =
        choi_correlations(&t, &build_stabilizer(schedule), &build_logical(schedule))?;
    Ok(ChoiResult {
        m,
        m_bar,
        s,
        indices,
        feedback,
        logical_correlations,
        partner_correlations,
        seed,
    })
}

/// Exact outcome-averaged statistics of system–reference distillation.
#[derive(Clone, Debug)]
pub struct ChoiEnumeration {
    pub branches: usize,
    pub total_probability: Dyadic,
    /// Every sum vector lies in the reverse error space.
    pub reverse_support: bool,
    /// Every branch passes both correlation checks.
    pub correlations: bool,
    pub output: Characteristic,
}

impl ChoiEnumeration {
    pub fn averaged(&self) -> AveragedOutput {
        AveragedOutput {
            n_a: self.output.n / 2,
            bell_diagonal: self.output.is_bell_diagonal(),
            weights: self.output.bell_weights(),
        }
    }
}

pub fn enumerate_system_reference(schedule: &MeasurementSchedule) -> Result<ChoiEnumeration> {
    let proto = SysRefProtocol::new(schedule)?;
    let n = proto.n;
    let tau = schedule.len();
    let stabilizer = build_stabilizer(schedule);
    let logical = build_logical(schedule);
    let all = SubsystemMask::all(2 * n);
    let mut res = ChoiEnumeration {
        branches: 0,
        total_probability: Dyadic::zero(),
        reverse_support: true,
        correlations: true,
        output: Characteristic::new(2 * n),
    };
    enumerate_branches(
        StabilizerTableau::new_with_reference(n),
        &proto.steps(),
        &mut |o, lp, mut t| {
            let prob = dyadic(lp);
            let s = signs(&o[..tau]).mul(&signs(&o[tau..]));
            res.reverse_support &= proto.code.reverse_error_space().contains(s.bits())?;
            proto.finish(&mut t, &s)?;
            let (a, b) = choi_correlations(&t, &stabilizer, &logical)?;
            res.correlations &= a && b;
            res.output.accumulate(&t.subgroup_on(&all)?, prob);
            res.total_probability += prob;
            res.branches += 1;
            Ok(())
        },
    )?;
    res.output.prune();
    Ok(res)
}

/// The predicted averaged Choi output: uniform over the stabilizer group.
pub fn choi_prediction(schedule: &MeasurementSchedule) -> AveragedOutput {
    let stabilizer = build_stabilizer(schedule);
    let elems = stabilizer.elements();
    let w = Dyadic::new(1, elems.len() as i128);
    AveragedOutput {
        n_a: schedule.n(),
        bell_diagonal: true,
        weights: elems.iter().map(|p| (p.letters_string(), w)).collect(),
    }
}

/// One run of reference-qubit distillation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReferenceQubitResult {
    pub m: SignVector,
    pub m_bar: SignVector,
    pub s: SignVector,
    /// Single-qubit feedback on the reference.
    pub feedback: PauliString,
    /// Whether s could be decoded; if not the feedback is the identity.
    pub decoded: bool,
    pub fidelity_log2: Option<i64>,
    pub seed: u64,
}

impl ReferenceQubitResult {
    pub fn fidelity(&self) -> Dyadic {
        self.fidelity_log2.map_or_else(Dyadic::zero, dyadic)
    }
}

/// The (n + 1)-qubit schedule in which the reference R sits at index n.
///
/// Its first n + 1 operators prepare the initial state from a maximally
/// mixed one: X_{n−1}X_R and Z_{n−1}Z_R, then Z_0 … Z_{n−2}. They are
/// followed by the circuit's own measurements, all evolved to the end.
pub fn reference_qubit_schedule(
    n: usize,
    encoding: &[Gate],
    circuit: &[CircuitOp],
) -> Result<MeasurementSchedule> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "need at least one system qubit".into(),
        ));
    }
    let total = n + 1;
    let sys: Vec<usize> = (0..n).collect();
    let mut ops = Vec::new();
    for l in [Letter::X, Letter::Z] {
        let mut g = PauliString::identity(total);
        g.set_letter(n - 1, l);
        g.set_letter(n, l);
        ops.push(CircuitOp::Measure(g));
    }
    for q in 0..n - 1 {
        ops.push(CircuitOp::Measure(PauliString::single(total, q, Letter::Z)));
    }
    for g in encoding {
        g.check(n)?;
        ops.push(CircuitOp::Gate(*g));
    }
    for op in circuit {
        ops.push(match op {
            CircuitOp::Gate(g) => {
                g.check(n)?;
                CircuitOp::Gate(*g)
            }
            CircuitOp::Measure(p) => {
                if p.n() != n {
                    return Err(Error::Dimension {
                        expected: n,
                        found: p.n(),
                    });
                }
                CircuitOp::Measure(p.embed(total, &sys)?)
            }
        });
    }
    time_evolve(total, &ops)
}

/// Distills a Bell pair between the reference qubit and the encoded qubit.
///
/// The forward run postselects the preparation operators on +1 and samples
/// the circuit's outcomes. The reverse pass measures the circuit operators
/// and then the Z preparation operators, skipping the two Bell operators,
/// so their sum-vector components are +1. Fidelity is measured against the
/// evolved Bell stabilizers.
pub fn distill_reference_qubit(
    n: usize,
    encoding: &[Gate],
    circuit: &[CircuitOp],
    seed: u64,
) -> Result<ReferenceQubitResult> {
    let schedule = reference_qubit_schedule(n, encoding, circuit)?;
    let total = n + 1;
    let prep = total;
    let code = DualCode::build(&schedule);
    let mut t = StabilizerTableau::new_maximally_mixed(total).with_seed(seed);
    let mut m = Vec::with_capacity(schedule.len());
    for (j, p) in schedule.ops().iter().enumerate() {
        let forced = (j < prep).then_some(1);
        m.push(t.measure(p, forced)?);
    }
    let mut m_bar = m.clone();
    for j in (2..schedule.len()).rev() {
        m_bar[j] = t.measure(&schedule.ops()[j], None)?;
    }
    let (m, m_bar) = (signs(&m), signs(&m_bar));
    let s = m.mul(&m_bar);
    let r_mask = SubsystemMask::new(total, [n])?;
    let (feedback, decoded) = match code.decode(&s, &r_mask) {
        Ok(d) => (d.correction, true),
        Err(Error::Undecodable(_)) => (PauliString::identity(1), false),
        Err(e) => return Err(e),
    };
    t.apply_pauli(&feedback.embed(total, &[n])?)?;
    let fidelity_log2 = stabilizer_fidelity_log2(&t, &schedule.ops()[..2])?;
    Ok(ReferenceQubitResult {
        m,
        m_bar,
        s,
        feedback,
        decoded,
        fidelity_log2,
        seed,
    })
}

/// Total probability that (m, m̄) occurs in the A–B protocol, averaged over
/// conjugations: (1/d_A²) Σ_{P_A} Prob(m, m̄; P_A).
pub fn pauli_averaged_joint(
    schedule: &MeasurementSchedule,
    mask: &SubsystemMask,
) -> Result<BTreeMap<(SignVector, SignVector), Dyadic>> {
    let n = schedule.n();
    let paulis = all_paulis(mask.len());
    let norm = Dyadic::from_integer(paulis.len() as i128);
    let mut out: BTreeMap<(SignVector, SignVector), Dyadic> = BTreeMap::new();
    for p in paulis {
        let placed = p.embed(n, mask.members())?;
        for (k, v) in conjugated_joint_distribution(schedule, &placed)? {
            *out.entry(k).or_insert_with(Dyadic::zero) += v / norm;
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}
