//! Unsigned Pauli groups: the stabilizer group 𝒮 and the logical group 𝓛 of
//! a schedule, built one measurement at a time.
//!
//! Both groups obey the same update when P_t is measured: keep the elements
//! that commute with P_t, then add P_t. When some generator g anticommutes
//! with P_t, the commuting elements form an index-two subgroup generated by
//! the commuting generators together with g·h for every other anticommuting
//! generator h, so the update can be carried out on generators alone.

use crate::error::{Error, Result};
use crate::gf2::{kernel_basis, BitVec, Gf2RowSpace};
use crate::pauli::{Letter, PauliString, SubsystemMask};
use crate::schedule::MeasurementSchedule;
use crate::tableau::StabilizerTableau;

#[derive(Clone, Debug)]
pub struct PauliGroupGens {
    n: usize,
    gens: Vec<PauliString>,
    echelon: Gf2RowSpace,
}

fn unsigned(p: &PauliString) -> PauliString {
    let mut q = p.clone();
    q.set_phase(0);
    q
}

impl PauliGroupGens {
    pub fn trivial(n: usize) -> Self {
        Self {
            n,
            gens: Vec::new(),
            echelon: Gf2RowSpace::new(2 * n),
        }
    }

    /// The full Pauli group, generated by every X_j and Z_j.
    pub fn full(n: usize) -> Self {
        let mut gens = Vec::with_capacity(2 * n);
        for j in 0..n {
            gens.push(PauliString::single(n, j, Letter::X));
            gens.push(PauliString::single(n, j, Letter::Z));
        }
        Self::from_independent(n, gens)
    }

    /// Group generated by `gens`, dropping dependent entries and signs.
    pub fn from_generators(n: usize, gens: impl IntoIterator<Item = PauliString>) -> Result<Self> {
        let mut g = Self::trivial(n);
        for p in gens {
            if p.n() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: p.n(),
                });
            }
            g.push_if_independent(unsigned(&p));
        }
        Ok(g)
    }

    fn from_independent(n: usize, gens: Vec<PauliString>) -> Self {
        let echelon = Gf2RowSpace::from_rows(
            2 * n,
            &gens.iter().map(PauliString::symplectic).collect::<Vec<_>>(),
        )
        .expect("uniform width");
        debug_assert_eq!(echelon.rank(), gens.len());
        Self { n, gens, echelon }
    }

    fn push_if_independent(&mut self, p: PauliString) -> bool {
        if self.echelon.insert(p.symplectic()).expect("uniform width") {
            self.gens.push(p);
            true
        } else {
            false
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.gens
    }

    /// Number of independent generators (log₂ of the group order up to phases).
    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn contains(&self, p: &PauliString) -> Result<bool> {
        if p.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: p.n(),
            });
        }
        self.echelon.contains(&p.symplectic())
    }

    /// Whether both generator lists generate the same group.
    pub fn same_group(&self, other: &PauliGroupGens) -> bool {
        self.n == other.n
            && self.rank() == other.rank()
            && other
                .gens
                .iter()
                .all(|g| self.echelon.contains(&g.symplectic()).unwrap_or(false))
    }

    /// Whether every element of `self` lies in `other`.
    pub fn is_subgroup_of(&self, other: &PauliGroupGens) -> bool {
        self.n == other.n
            && self
                .gens
                .iter()
                .all(|g| other.echelon.contains(&g.symplectic()).unwrap_or(false))
    }

    /// Keeps the elements commuting with `p`, then adds `p`.
    pub fn update(&mut self, p: &PauliString) {
        let p = unsigned(p);
        let anti: Vec<usize> = (0..self.gens.len())
            .filter(|&i| self.gens[i].anticommutes(&p))
            .collect();
        if let Some((&pivot, rest)) = anti.split_first() {
            let pg = self.gens[pivot].clone();
            for &i in rest {
                self.gens[i].mul_assign(&pg);
                self.gens[i].set_phase(0);
            }
            self.gens.remove(pivot);
            let gens = std::mem::take(&mut self.gens);
            *self = Self::from_independent(self.n, gens);
        }
        self.push_if_independent(p);
    }

    /// Every element of the group as a phase-free operator. Intended for small groups.
    pub fn elements(&self) -> Vec<PauliString> {
        self.echelon
            .elements()
            .iter()
            .map(|v| PauliString::from_symplectic(v).expect("even width"))
            .collect()
    }
}

/// 𝒮: start from the trivial group and apply every measurement.
pub fn build_stabilizer(schedule: &MeasurementSchedule) -> PauliGroupGens {
    let mut g = PauliGroupGens::trivial(schedule.n());
    for p in schedule.ops() {
        g.update(p);
    }
    g
}

/// 𝓛: start from the commutant of P_1 and apply the remaining measurements.
pub fn build_logical(schedule: &MeasurementSchedule) -> PauliGroupGens {
    build_logical_history(schedule)
        .pop()
        .unwrap_or_else(|| PauliGroupGens::full(schedule.n()))
}

/// Stab^(t) for t = 1..τ.
pub fn build_stabilizer_history(schedule: &MeasurementSchedule) -> Vec<PauliGroupGens> {
    let mut g = PauliGroupGens::trivial(schedule.n());
    schedule
        .ops()
        .iter()
        .map(|p| {
            g.update(p);
            g.clone()
        })
        .collect()
}

/// Logic^(t) for t = 1..τ.
pub fn build_logical_history(schedule: &MeasurementSchedule) -> Vec<PauliGroupGens> {
    let n = schedule.n();
    let ops = schedule.ops();
    let Some(first) = ops.first() else {
        return Vec::new();
    };
    let seed = PauliGroupGens::from_generators(n, [first.clone()]).expect("matching n");
    let mut g = commutant(&seed);
    let mut out = vec![g.clone()];
    for p in &ops[1..] {
        g.update(p);
        out.push(g.clone());
    }
    out
}

/// All Paulis commuting with every element of `g`.
pub fn commutant(g: &PauliGroupGens) -> PauliGroupGens {
    let n = g.n;
    // ⟨v, w⟩ = v · J w, so v commutes with g exactly when v is orthogonal to (z_g | x_g).
    let rows: Vec<BitVec> = g.gens.iter().map(|p| p.z().concat(p.x())).collect();
    let ker = kernel_basis(2 * n, &rows).expect("uniform width");
    let gens = ker
        .iter()
        .map(|v| PauliString::from_symplectic(v).expect("even width"))
        .collect();
    PauliGroupGens::from_independent(n, gens)
}

/// k = (|𝓛| − |𝒮|)/2 in generator counts.
pub fn logical_qubit_count(schedule: &MeasurementSchedule) -> usize {
    let s = build_stabilizer(schedule);
    let l = build_logical(schedule);
    (l.rank() - s.rank()) / 2
}

/// Eigenvalue of a stabilizer `p ∈ 𝒮` in the post-measurement state.
pub fn signed_eigenvalue(
    stabilizer: &PauliGroupGens,
    p: &PauliString,
    tableau: &StabilizerTableau,
) -> Result<i8> {
    if !stabilizer.contains(p)? {
        return Err(Error::InvalidArgument(format!(
            "{} is not in the stabilizer group",
            p.letters_string()
        )));
    }
    match tableau.expectation(&unsigned(p))? {
        0 => Err(Error::Invariant(format!(
            "stabilizer {} has no definite value in the simulated state",
            p.letters_string()
        ))),
        v => Ok(v),
    }
}

/// Pairs (X̄_j, Z̄_j) of logical operators: 𝓛 modulo 𝒮 put into symplectic form.
pub fn logical_pairs(
    stabilizer: &PauliGroupGens,
    logical: &PauliGroupGens,
) -> Vec<(PauliString, PauliString)> {
    let reduce = |v: &BitVec| stabilizer.echelon.reduce(v).expect("uniform width");
    let form = |a: &PauliString, b: &PauliString| a.anticommutes(b);
    let mut pool: Vec<PauliString> = Vec::new();
    let mut span = stabilizer.echelon.clone();
    for g in &logical.gens {
        let r = reduce(&g.symplectic());
        if span.insert(r.clone()).expect("uniform width") {
            pool.push(PauliString::from_symplectic(&r).expect("even width"));
        }
    }
    let mut pairs = Vec::new();
    while let Some(u) = pool.first().cloned() {
        let Some(wi) = pool.iter().position(|w| form(&u, w)) else {
            // cannot happen for a logical group whose center is the stabilizer group
            pool.remove(0);
            continue;
        };
        let w = pool[wi].clone();
        let mut rest = Vec::new();
        let mut span = stabilizer.echelon.clone();
        span.insert(u.symplectic()).expect("uniform width");
        span.insert(w.symplectic()).expect("uniform width");
        for (i, v) in pool.iter().enumerate() {
            if i == 0 || i == wi {
                continue;
            }
            let mut v2 = v.clone();
            if form(v, &w) {
                v2.mul_assign(&u);
            }
            if form(v, &u) {
                v2.mul_assign(&w);
            }
            v2.set_phase(0);
            let r = span.reduce(&v2.symplectic()).expect("uniform width");
            if span.insert(r).expect("uniform width") {
                rest.push(v2);
            }
        }
        pairs.push((u, w));
        pool = rest;
    }
    pairs
}

/// g_A from an unsigned stabilizer generating set: logical operators on
/// `mask` counted modulo the stabilizers on `mask`.
pub fn logical_count_on(stabilizer_gens: &[PauliString], mask: &SubsystemMask) -> Result<i64> {
    let restricted_rank = |m: &SubsystemMask| -> Result<usize> {
        let mut space = Gf2RowSpace::new(2 * m.len());
        for g in stabilizer_gens {
            space.insert(g.restrict(m)?.symplectic())?;
        }
        Ok(space.rank())
    };
    let comp = mask.complement();
    Ok(
        2 * mask.len() as i64 - restricted_rank(mask)? as i64 - stabilizer_gens.len() as i64
            + restricted_rank(&comp)? as i64,
    )
}
