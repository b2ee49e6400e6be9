//! Exact simulation of possibly mixed stabilizer states.
//!
//! A state is a list of independent, mutually commuting signed Pauli
//! generators; with g generators on N qubits the density matrix is
//! `2^{-N} Π_k (I + g_k)`. No destabilizers are kept, so a maximally mixed
//! state is simply the empty list.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::{CliffordMap, Gate, TwoQubitClifford};
use crate::error::{Error, Result};
use crate::gf2::{BitVec, Gf2RowSpace, SignVector, TrackedReducer};
use crate::pauli::{Letter, PauliString, SubsystemMask};
use crate::schedule::MeasurementSchedule;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub outcomes: SignVector,
    /// Prob(m) = 2^log2_prob.
    pub log2_prob: i64,
}

/// How measurement outcomes are chosen.
#[derive(Clone, Copy, Debug)]
pub enum OutcomePolicy<'a> {
    Sample,
    Forced(&'a SignVector),
}

#[derive(Clone, Debug)]
pub struct StabilizerTableau {
    n: usize,
    gens: Vec<PauliString>,
    log2_prob: i64,
    seed: u64,
    rng: ChaCha8Rng,
}

/// Result of a single measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub value: i8,
    pub random: bool,
}

impl StabilizerTableau {
    pub fn new_maximally_mixed(n: usize) -> Self {
        Self::with_gens(n, Vec::new())
    }

    /// 2n qubits: system on `0..n`, reference on `n..2n`, paired by X_jX_{n+j} and Z_jZ_{n+j}.
    pub fn new_with_reference(n: usize) -> Self {
        let mut gens = Vec::with_capacity(2 * n);
        for j in 0..n {
            for l in [Letter::X, Letter::Z] {
                let mut g = PauliString::identity(2 * n);
                g.set_letter(j, l);
                g.set_letter(n + j, l);
                gens.push(g);
            }
        }
        Self::with_gens(2 * n, gens)
    }

    /// k EPR pairs, pair j on qubits (2j, 2j + 1).
    pub fn new_epr_pairs(k: usize) -> Self {
        let mut gens = Vec::with_capacity(2 * k);
        for j in 0..k {
            for l in [Letter::X, Letter::Z] {
                let mut g = PauliString::identity(2 * k);
                g.set_letter(2 * j, l);
                g.set_letter(2 * j + 1, l);
                gens.push(g);
            }
        }
        Self::with_gens(2 * k, gens)
    }

    /// Computational basis state; `bits[j] = true` means qubit j is |1⟩.
    pub fn new_computational(bits: &[bool]) -> Self {
        let n = bits.len();
        let gens = bits
            .iter()
            .enumerate()
            .map(|(j, &b)| PauliString::single(n, j, Letter::Z).with_sign(if b { -1 } else { 1 }))
            .collect();
        Self::with_gens(n, gens)
    }

    /// A state from explicit generators, which must be Hermitian, commuting and independent.
    pub fn from_generators(n: usize, gens: Vec<PauliString>) -> Result<Self> {
        let mut space = Gf2RowSpace::new(2 * n);
        for (i, g) in gens.iter().enumerate() {
            if g.n() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: g.n(),
                });
            }
            if !g.is_hermitian() {
                return Err(Error::NonHermitian);
            }
            if gens[..i].iter().any(|h| h.anticommutes(g)) {
                return Err(Error::InvalidArgument("generators must commute".into()));
            }
            if !space.insert(g.symplectic())? {
                return Err(Error::InvalidArgument(
                    "generators must be independent".into(),
                ));
            }
        }
        Ok(Self::with_gens(n, gens))
    }

    fn with_gens(n: usize, gens: Vec<PauliString>) -> Self {
        Self {
            n,
            gens,
            log2_prob: 0,
            seed: 0,
            rng: ChaCha8Rng::seed_from_u64(0),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.reseed(seed);
        self
    }

    pub fn reseed(&mut self, seed: u64) {
        self.seed = seed;
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.gens
    }

    /// Sum of the log-probabilities of every random outcome so far.
    pub fn log2_prob(&self) -> i64 {
        self.log2_prob
    }

    pub fn reset_log2_prob(&mut self) {
        self.log2_prob = 0;
    }

    /// Adds `count` maximally mixed qubits at the end of the register.
    pub fn extend(&mut self, count: usize) {
        let n2 = self.n + count;
        let positions: Vec<usize> = (0..self.n).collect();
        for g in &mut self.gens {
            *g = g.embed(n2, &positions).expect("positions in range");
        }
        self.n = n2;
    }

    /// Adds a stabilizer generator to the state, e.g. to adjoin fresh Bell pairs.
    ///
    /// `g` must commute with every generator and be independent of them.
    /// The accumulated probability is left untouched.
    pub fn push_generator(&mut self, g: PauliString) -> Result<()> {
        self.check_op(&g)?;
        if g.is_identity() {
            return Err(Error::IdentityMeasurement);
        }
        if self.gens.iter().any(|h| h.anticommutes(&g)) {
            return Err(Error::InvalidArgument(format!(
                "{g} anticommutes with the state"
            )));
        }
        if self.group_element(&g).is_some() {
            return Err(Error::InvalidArgument(format!(
                "{g} is already stabilized up to sign"
            )));
        }
        self.gens.push(g);
        Ok(())
    }

    /// Adjoins Bell pairs stabilized by X_aX_b and Z_aZ_b on maximally mixed qubits.
    pub fn push_bell_pairs(&mut self, pairs: &[(usize, usize)]) -> Result<()> {
        for &(a, b) in pairs {
            for l in [Letter::X, Letter::Z] {
                let mut g = PauliString::identity(self.n);
                g.set_letter(a, l);
                g.set_letter(b, l);
                self.push_generator(g)?;
            }
        }
        Ok(())
    }

    fn check_op(&self, p: &PauliString) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: p.n(),
            });
        }
        if !p.is_hermitian() {
            return Err(Error::NonHermitian);
        }
        Ok(())
    }

    /// If ±p (ignoring sign) is in the group, the signed product of generators equal to it.
    fn group_element(&self, p: &PauliString) -> Option<PauliString> {
        let rows: Vec<BitVec> = self.gens.iter().map(PauliString::symplectic).collect();
        let reducer = TrackedReducer::new(2 * self.n, &rows).expect("uniform width");
        let coeffs = reducer.solve(&p.symplectic()).expect("uniform width")?;
        let mut prod = PauliString::identity(self.n);
        for i in coeffs.iter_ones() {
            prod.mul_assign(&self.gens[i]);
        }
        Some(prod)
    }

    /// +1 or −1 if ±p is a stabilizer, 0 otherwise.
    pub fn expectation(&self, p: &PauliString) -> Result<i8> {
        self.check_op(p)?;
        if p.is_identity() {
            return p.sign();
        }
        if self.gens.iter().any(|g| g.anticommutes(p)) {
            return Ok(0);
        }
        Ok(match self.group_element(p) {
            Some(q) => q.sign()? * p.sign()?,
            None => 0,
        })
    }

    /// Projectively measures `p`, returning the outcome and whether it was random.
    pub fn measure_detailed(&mut self, p: &PauliString, forced: Option<i8>) -> Result<Outcome> {
        self.check_op(p)?;
        if let Some(f) = forced {
            if f != 1 && f != -1 {
                return Err(Error::InvalidArgument(format!(
                    "forced outcome {f} is not ±1"
                )));
            }
        }
        if p.is_identity() {
            let v = p.sign()?;
            return match forced {
                Some(f) if f != v => Err(Error::ImpossibleOutcome { requested: f }),
                _ => Ok(Outcome {
                    value: v,
                    random: false,
                }),
            };
        }
        let anti: Vec<usize> = (0..self.gens.len())
            .filter(|&i| self.gens[i].anticommutes(p))
            .collect();
        if let Some((&pivot, rest)) = anti.split_first() {
            let pg = self.gens[pivot].clone();
            for &i in rest {
                self.gens[i].mul_assign(&pg);
            }
            let value = forced.unwrap_or_else(|| self.random_sign());
            let mut g = p.clone();
            if value < 0 {
                g.negate();
            }
            self.gens[pivot] = g;
            self.log2_prob -= 1;
            return Ok(Outcome {
                value,
                random: true,
            });
        }
        if let Some(q) = self.group_element(p) {
            let value = q.sign()? * p.sign()?;
            if let Some(f) = forced {
                if f != value {
                    return Err(Error::ImpossibleOutcome { requested: f });
                }
            }
            return Ok(Outcome {
                value,
                random: false,
            });
        }
        let value = forced.unwrap_or_else(|| self.random_sign());
        let mut g = p.clone();
        if value < 0 {
            g.negate();
        }
        self.gens.push(g);
        self.log2_prob -= 1;
        Ok(Outcome {
            value,
            random: true,
        })
    }

    pub fn measure(&mut self, p: &PauliString, forced: Option<i8>) -> Result<i8> {
        Ok(self.measure_detailed(p, forced)?.value)
    }

    fn random_sign(&mut self) -> i8 {
        if self.rng.random::<bool>() {
            -1
        } else {
            1
        }
    }

    /// Number of independent stabilizers supported on `mask`.
    pub fn log2_group_size_on(&self, mask: &SubsystemMask) -> Result<usize> {
        if mask.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: mask.n(),
            });
        }
        let comp = mask.complement();
        let mut space = Gf2RowSpace::new(2 * comp.len());
        for g in &self.gens {
            let r = g.restrict(&comp)?;
            space.insert(r.symplectic())?;
        }
        Ok(self.gens.len() - space.rank())
    }

    /// Von Neumann (equally, any Rényi) entropy of the reduced state on `mask`, in bits.
    pub fn subsystem_entropy(&self, mask: &SubsystemMask) -> Result<i64> {
        Ok(mask.len() as i64 - self.log2_group_size_on(mask)? as i64)
    }

    /// log₂ Tr ρ_mask².
    pub fn purity_log2(&self, mask: &SubsystemMask) -> Result<i64> {
        Ok(-self.subsystem_entropy(mask)?)
    }

    /// Signed generators of the subgroup supported on `mask`, restricted to it.
    pub fn subgroup_on(&self, mask: &SubsystemMask) -> Result<Vec<PauliString>> {
        let comp = mask.complement();
        let rows: Vec<BitVec> = self
            .gens
            .iter()
            .map(|g| g.restrict(&comp).map(|r| r.symplectic()))
            .collect::<Result<_>>()?;
        let reducer = TrackedReducer::new(2 * comp.len(), &rows)?;
        let mut out = Vec::new();
        let mut span = Gf2RowSpace::new(2 * mask.len());
        for combo in reducer.dependencies() {
            let mut prod = PauliString::identity(self.n);
            for i in combo.iter_ones() {
                prod.mul_assign(&self.gens[i]);
            }
            let r = prod.restrict(mask)?;
            if span.insert(r.symplectic())? {
                out.push(r);
            }
        }
        Ok(out)
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.check(self.n)?;
        for g in &mut self.gens {
            gate.conjugate(g);
        }
        Ok(())
    }

    pub fn apply_gates(&mut self, gates: &[Gate]) -> Result<()> {
        for g in gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// Conjugation by a Pauli operator.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: p.n(),
            });
        }
        for g in &mut self.gens {
            if g.anticommutes(p) {
                g.negate();
            }
        }
        Ok(())
    }

    /// Conjugates the state by a Clifford acting on the qubits `positions`.
    pub fn apply_clifford_on(&mut self, map: &CliffordMap, positions: &[usize]) -> Result<()> {
        if positions.len() != map.n() {
            return Err(Error::Dimension {
                expected: map.n(),
                found: positions.len(),
            });
        }
        let mask = SubsystemMask::new(self.n, positions.iter().copied())?;
        if mask.len() != positions.len() {
            return Err(Error::InvalidArgument("repeated qubit positions".into()));
        }
        for g in &mut self.gens {
            let mut local = PauliString::identity(map.n());
            for (k, &q) in positions.iter().enumerate() {
                local.set_letter(k, g.letter(q));
            }
            let image = map.conjugate(&local);
            let mut rest = g.clone();
            for &q in positions {
                rest.set_letter(q, Letter::I);
            }
            let mut out = image.embed(self.n, positions)?;
            out.mul_assign(&rest);
            *g = out;
        }
        Ok(())
    }

    /// Applies a uniformly random Clifford on `positions`, drawn from the tableau's generator.
    pub fn random_clifford_on(&mut self, positions: &[usize]) -> Result<()> {
        let map = CliffordMap::random(positions.len(), &mut self.rng);
        self.apply_clifford_on(&map, positions)
    }

    /// Applies an independent uniformly random two-qubit Clifford to each pair.
    pub fn random_clifford_layer(&mut self, pairs: &[(usize, usize)]) -> Result<()> {
        for &(a, b) in pairs {
            let c = TwoQubitClifford::random(&mut self.rng);
            self.apply_gate(&Gate::Two(a, b, c))?;
        }
        Ok(())
    }

    /// Measures the schedule's operators placed on `positions`, in order.
    pub fn run_schedule_on(
        &mut self,
        schedule: &MeasurementSchedule,
        positions: &[usize],
        policy: OutcomePolicy<'_>,
    ) -> Result<MeasurementRecord> {
        if positions.len() != schedule.n() {
            return Err(Error::Dimension {
                expected: schedule.n(),
                found: positions.len(),
            });
        }
        if let OutcomePolicy::Forced(m) = policy {
            if m.len() != schedule.len() {
                return Err(Error::Dimension {
                    expected: schedule.len(),
                    found: m.len(),
                });
            }
        }
        let start = self.log2_prob;
        let mut outcomes = BitVec::zeros(schedule.len());
        for (j, op) in schedule.ops().iter().enumerate() {
            let placed = op.embed(self.n, positions)?;
            let forced = match policy {
                OutcomePolicy::Sample => None,
                OutcomePolicy::Forced(m) => Some(m.sign(j)),
            };
            if self.measure(&placed, forced)? < 0 {
                outcomes.set(j, true);
            }
        }
        Ok(MeasurementRecord {
            outcomes: SignVector(outcomes),
            log2_prob: self.log2_prob - start,
        })
    }

    pub fn run_schedule(
        &mut self,
        schedule: &MeasurementSchedule,
        policy: OutcomePolicy<'_>,
    ) -> Result<MeasurementRecord> {
        let positions: Vec<usize> = (0..schedule.n()).collect();
        self.run_schedule_on(schedule, &positions, policy)
    }

    /// Canonical unsigned basis of the group (echelon rows), for group comparisons.
    pub fn unsigned_span(&self) -> Gf2RowSpace {
        Gf2RowSpace::from_rows(
            2 * self.n,
            &self
                .gens
                .iter()
                .map(PauliString::symplectic)
                .collect::<Vec<_>>(),
        )
        .expect("uniform width")
    }

    /// Checks that the generators are Hermitian, commuting and independent.
    pub fn check_invariants(&self) -> Result<()> {
        if self.gens.len() > self.n {
            return Err(Error::Invariant("more generators than qubits".into()));
        }
        for (i, g) in self.gens.iter().enumerate() {
            if !g.is_hermitian() {
                return Err(Error::Invariant(format!("generator {g} is not Hermitian")));
            }
            if self.gens[..i].iter().any(|h| h.anticommutes(g)) {
                return Err(Error::Invariant(format!("generator {g} anticommutes")));
            }
        }
        if self.unsigned_span().rank() != self.gens.len() {
            return Err(Error::Invariant("generators are dependent".into()));
        }
        Ok(())
    }
}
