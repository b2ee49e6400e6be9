//! The classical code defined by a measurement schedule.
//!
//! For measured operators P_1..P_τ the codeword of a Pauli P is the pattern of
//! commutation signs `(⟨P, P_1⟩, …, ⟨P, P_τ⟩)`, and the error vector of P_i is
//! the same pattern for P_i itself restricted to the past (components j ≤ i).
//! Everything in this module reduces to rank computations over those vectors.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{BitVec, Gf2RowSpace, SignVector, TrackedReducer};
use crate::pauli::{PauliString, SubsystemMask};
use crate::schedule::MeasurementSchedule;

/// Generator rows plus the error space of either the plain or the extended code.
#[derive(Clone, Debug)]
struct CodeCore {
    n: usize,
    width: usize,
    /// Row `q` is the codeword of X_q and row `n + q` the codeword of Z_q.
    generators: Vec<BitVec>,
    error_space: Gf2RowSpace,
}

impl CodeCore {
    fn codeword(&self, p: &PauliString) -> Result<BitVec> {
        if p.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: p.n(),
            });
        }
        let mut out = BitVec::zeros(self.width);
        for q in p.x().iter_ones() {
            out.xor_assign(&self.generators[q]);
        }
        for q in p.z().iter_ones() {
            out.xor_assign(&self.generators[self.n + q]);
        }
        Ok(out)
    }

    fn mask_rows(&self, mask: &SubsystemMask) -> Vec<BitVec> {
        let mut rows: Vec<BitVec> = mask
            .members()
            .iter()
            .map(|&q| self.generators[q].clone())
            .collect();
        rows.extend(
            mask.members()
                .iter()
                .map(|&q| self.generators[self.n + q].clone()),
        );
        rows
    }

    fn log2_null_count(&self, mask: &SubsystemMask) -> Result<usize> {
        if mask.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: mask.n(),
            });
        }
        let mut space = self.error_space.clone();
        let mut grown = 0;
        for row in self.mask_rows(mask) {
            if space.insert(row)? {
                grown += 1;
            }
        }
        Ok(2 * mask.len() - grown)
    }

    fn null_operator(&self, p: &PauliString) -> Result<bool> {
        self.error_space.contains(&self.codeword(p)?)
    }
}

/// The dual code of a schedule: codewords, error vectors and reverse error vectors.
#[derive(Clone, Debug)]
pub struct DualCode {
    schedule: MeasurementSchedule,
    core: CodeCore,
    error_vectors: Vec<BitVec>,
    reverse_error_vectors: Vec<BitVec>,
    reverse_error_space: Gf2RowSpace,
}

/// The dual code with 2n Bell components prepended, one X-type and one
/// Z-type per qubit in ascending qubit order.
#[derive(Clone, Debug)]
pub struct ExtendedDualCode {
    core: CodeCore,
}

/// A correction on the subsystem together with the null operators that make
/// it ambiguous.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    /// Operator on the |A| qubits of the subsystem, in mask order.
    pub correction: PauliString,
    /// Generators (on the same |A| qubits) of the operators indistinguishable from the identity.
    pub null_generators: Vec<PauliString>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReverseDecoded {
    /// Zero-based indices Λ into the schedule, ascending.
    pub indices: Vec<usize>,
    /// Ordered product of the selected operators.
    pub product: PauliString,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EntropyReport {
    #[serde(rename = "S_A")]
    pub s_a: i64,
    #[serde(rename = "S_B")]
    pub s_b: i64,
    #[serde(rename = "S_R")]
    pub s_r: i64,
    #[serde(rename = "S_AB")]
    pub s_ab: i64,
    #[serde(rename = "S_A|B")]
    pub s_a_given_b: i64,
    #[serde(rename = "S_AB|R")]
    pub s_ab_given_r: i64,
    #[serde(rename = "I_AB")]
    pub i_ab: i64,
    #[serde(rename = "I_AR")]
    pub i_ar: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CleaningReport {
    pub g: i64,
    pub g_a: i64,
    pub g_b: i64,
    pub identities_hold: bool,
}

/// The six null counts from which every entropy follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NullCounts {
    pub n: usize,
    pub n_a: usize,
    pub log_i: usize,
    pub log_ia: usize,
    pub log_ib: usize,
    pub log_i_ext: usize,
    pub log_ia_ext: usize,
    pub log_ib_ext: usize,
}

fn sign_vector(bits: &BitVec) -> SignVector {
    SignVector(bits.clone())
}

impl DualCode {
    pub fn build(schedule: &MeasurementSchedule) -> DualCode {
        let n = schedule.n();
        let ops = schedule.ops();
        let tau = ops.len();
        let mut generators = vec![BitVec::zeros(tau); 2 * n];
        for (j, p) in ops.iter().enumerate() {
            for q in p.z().iter_ones() {
                generators[q].set(j, true);
            }
            for q in p.x().iter_ones() {
                generators[n + q].set(j, true);
            }
        }
        let mut error_vectors = vec![BitVec::zeros(tau); tau];
        let mut reverse_error_vectors = vec![BitVec::zeros(tau); tau];
        for i in 0..tau {
            for j in 0..i {
                if ops[i].anticommutes(&ops[j]) {
                    error_vectors[i].set(j, true);
                    reverse_error_vectors[j].set(i, true);
                }
            }
        }
        let error_space = Gf2RowSpace::from_rows(tau, &error_vectors).expect("uniform width");
        let reverse_error_space =
            Gf2RowSpace::from_rows(tau, &reverse_error_vectors).expect("uniform width");
        DualCode {
            schedule: schedule.clone(),
            core: CodeCore {
                n,
                width: tau,
                generators,
                error_space,
            },
            error_vectors,
            reverse_error_vectors,
            reverse_error_space,
        }
    }

    pub fn schedule(&self) -> &MeasurementSchedule {
        &self.schedule
    }

    pub fn n(&self) -> usize {
        self.core.n
    }

    pub fn tau(&self) -> usize {
        self.core.width
    }

    /// Row `q` is the codeword of X_q, row `n + q` that of Z_q.
    pub fn codeword_generators(&self) -> &[BitVec] {
        &self.core.generators
    }

    pub fn error_space(&self) -> &Gf2RowSpace {
        &self.core.error_space
    }

    pub fn reverse_error_space(&self) -> &Gf2RowSpace {
        &self.reverse_error_space
    }

    pub fn codeword(&self, p: &PauliString) -> Result<SignVector> {
        Ok(sign_vector(&self.core.codeword(p)?))
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.tau() {
            return Err(Error::InvalidArgument(format!(
                "measurement index {i} outside 1..={}",
                self.tau()
            )));
        }
        Ok(())
    }

    /// Error vector of the `i`-th measurement (1-based).
    pub fn error_vector(&self, i: usize) -> Result<SignVector> {
        self.check_index(i)?;
        Ok(sign_vector(&self.error_vectors[i - 1]))
    }

    /// Reverse error vector of the `i`-th measurement (1-based).
    pub fn reverse_error_vector(&self, i: usize) -> Result<SignVector> {
        self.check_index(i)?;
        Ok(sign_vector(&self.reverse_error_vectors[i - 1]))
    }

    pub fn error_vectors(&self) -> &[BitVec] {
        &self.error_vectors
    }

    pub fn reverse_error_vectors(&self) -> &[BitVec] {
        &self.reverse_error_vectors
    }

    /// log₂ of the number of Paulis supported on `mask` whose codeword lies in ℰ.
    pub fn log2_null_count(&self, mask: &SubsystemMask) -> Result<usize> {
        self.core.log2_null_count(mask)
    }

    /// Whether `p` is a null operator (codeword in ℰ).
    pub fn is_null(&self, p: &PauliString) -> Result<bool> {
        self.core.null_operator(p)
    }

    pub fn recoverable(&self, mask: &SubsystemMask) -> Result<bool> {
        Ok(self.log2_null_count(mask)? == 0)
    }

    pub fn conditional_entropy(&self, mask: &SubsystemMask) -> Result<i64> {
        Ok(self.log2_null_count(mask)? as i64 - mask.len() as i64)
    }

    /// span(ℰ ∪ {codewords of Paulis on `mask`}): the set of reachable sum vectors.
    pub fn total_error_space(&self, mask: &SubsystemMask) -> Result<Gf2RowSpace> {
        if mask.n() != self.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                found: mask.n(),
            });
        }
        let mut space = self.core.error_space.clone();
        for row in self.core.mask_rows(mask) {
            space.insert(row)?;
        }
        Ok(space)
    }

    /// Whether s·𝒞(p) ∈ ℰ, i.e. `s` lies in the coset labelled by `p`.
    pub fn in_coset(&self, s: &SignVector, p: &PauliString) -> Result<bool> {
        let c = self.core.codeword(p)?;
        self.core.error_space.contains(&s.0.xor(&c))
    }

    /// Finds P_A on `mask` with s·𝒞(P_A) ∈ ℰ.
    ///
    /// Among all solutions the one whose coefficient vector
    /// `(x_{a_1}, …, x_{a_k}, z_{a_1}, …, z_{a_k})` is lexicographically least
    /// is returned.
    pub fn decode(&self, s: &SignVector, mask: &SubsystemMask) -> Result<Decoded> {
        if s.len() != self.tau() {
            return Err(Error::Dimension {
                expected: self.tau(),
                found: s.len(),
            });
        }
        if mask.n() != self.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                found: mask.n(),
            });
        }
        let k = mask.len();
        let ers = &self.core.error_space;
        let rows: Vec<BitVec> = self
            .core
            .mask_rows(mask)
            .into_iter()
            .map(|r| ers.reduce(&r))
            .collect::<Result<_>>()?;
        let target = ers.reduce(&s.0)?;
        let reducer = TrackedReducer::new(self.tau(), &rows)?;
        let coeffs = reducer
            .solve(&target)?
            .ok_or_else(|| Error::Undecodable(s.to_string()))?;
        let kernel = Gf2RowSpace::from_rows(2 * k, reducer.dependencies())?;
        let coeffs = kernel.reduce(&coeffs)?;
        let to_pauli = |c: &BitVec| {
            PauliString::from_parts(c.slice(0, k), c.slice(k, k), 0).expect("equal halves")
        };
        Ok(Decoded {
            correction: to_pauli(&coeffs),
            null_generators: kernel.rows().iter().map(to_pauli).collect(),
        })
    }

    /// Finds Λ with Π_{j∈Λ} ℰ_rev(P_j) = s.
    ///
    /// When several index sets work, the one that avoids the latest
    /// measurements is chosen (lexicographically least with the last index
    /// most significant).
    pub fn decode_reverse(&self, s: &SignVector) -> Result<ReverseDecoded> {
        let tau = self.tau();
        if s.len() != tau {
            return Err(Error::Dimension {
                expected: tau,
                found: s.len(),
            });
        }
        let reversed: Vec<BitVec> = self.reverse_error_vectors.iter().rev().cloned().collect();
        let reducer = TrackedReducer::new(tau, &reversed)?;
        let coeffs = reducer
            .solve(&s.0)?
            .ok_or_else(|| Error::Undecodable(s.to_string()))?;
        let kernel = Gf2RowSpace::from_rows(tau, reducer.dependencies())?;
        let coeffs = kernel.reduce(&coeffs)?;
        let mut indices: Vec<usize> = coeffs.iter_ones().map(|r| tau - 1 - r).collect();
        indices.sort_unstable();
        let mut product = PauliString::identity(self.n());
        for &j in &indices {
            product.mul_assign(&self.schedule.ops()[j]);
        }
        Ok(ReverseDecoded { indices, product })
    }
}

impl ExtendedDualCode {
    pub fn build(schedule: &MeasurementSchedule) -> ExtendedDualCode {
        let n = schedule.n();
        let ops = schedule.ops();
        let tau = ops.len();
        let width = 2 * n + tau;
        let mut generators = vec![BitVec::zeros(width); 2 * n];
        for q in 0..n {
            // X_q anticommutes with the Z-type Bell operator, Z_q with the X-type one
            generators[q].set(2 * q + 1, true);
            generators[n + q].set(2 * q, true);
        }
        for (j, p) in ops.iter().enumerate() {
            for q in p.z().iter_ones() {
                generators[q].set(2 * n + j, true);
            }
            for q in p.x().iter_ones() {
                generators[n + q].set(2 * n + j, true);
            }
        }
        let mut error_space = Gf2RowSpace::new(width);
        for i in 0..tau {
            let mut e = BitVec::zeros(width);
            for q in ops[i].z().iter_ones() {
                e.set(2 * q, true);
            }
            for q in ops[i].x().iter_ones() {
                e.set(2 * q + 1, true);
            }
            for j in 0..i {
                if ops[i].anticommutes(&ops[j]) {
                    e.set(2 * n + j, true);
                }
            }
            error_space.insert(e).expect("uniform width");
        }
        ExtendedDualCode {
            core: CodeCore {
                n,
                width,
                generators,
                error_space,
            },
        }
    }

    pub fn n(&self) -> usize {
        self.core.n
    }

    pub fn width(&self) -> usize {
        self.core.width
    }

    pub fn error_space(&self) -> &Gf2RowSpace {
        &self.core.error_space
    }

    pub fn codeword(&self, p: &PauliString) -> Result<SignVector> {
        Ok(sign_vector(&self.core.codeword(p)?))
    }

    pub fn log2_null_count(&self, mask: &SubsystemMask) -> Result<usize> {
        self.core.log2_null_count(mask)
    }

    /// Whether the extended codeword of `p` lies in ℰ_ext.
    pub fn is_null(&self, p: &PauliString) -> Result<bool> {
        self.core.null_operator(p)
    }
}

/// Null counts of A, B = complement(A) and the whole system, plain and extended.
pub fn null_counts(
    a: &SubsystemMask,
    code: &DualCode,
    ext: &ExtendedDualCode,
) -> Result<NullCounts> {
    let b = a.complement();
    let all = SubsystemMask::all(a.n());
    Ok(NullCounts {
        n: a.n(),
        n_a: a.len(),
        log_i: code.log2_null_count(&all)?,
        log_ia: code.log2_null_count(a)?,
        log_ib: code.log2_null_count(&b)?,
        log_i_ext: ext.log2_null_count(&all)?,
        log_ia_ext: ext.log2_null_count(a)?,
        log_ib_ext: ext.log2_null_count(&b)?,
    })
}

impl NullCounts {
    pub fn entropies(&self) -> EntropyReport {
        let n = self.n as i64;
        let n_a = self.n_a as i64;
        let n_b = n - n_a;
        let [li, lia, lib, lie, liae, libe] = [
            self.log_i,
            self.log_ia,
            self.log_ib,
            self.log_i_ext,
            self.log_ia_ext,
            self.log_ib_ext,
        ]
        .map(|v| v as i64);
        let s_a = n_a - liae;
        let s_b = n_b - libe;
        let s_r = n - lie;
        EntropyReport {
            s_a,
            s_b,
            s_r,
            s_ab: li - n,
            s_a_given_b: lia - n_a,
            s_ab_given_r: n - li,
            i_ab: li - lia - lib,
            i_ar: s_a + s_r - s_b,
        }
    }

    pub fn cleaning(&self) -> CleaningReport {
        let n = self.n as i64;
        let n_a = self.n_a as i64;
        let n_b = n - n_a;
        let [li, lia, lib, lie, liae, libe] = [
            self.log_i,
            self.log_ia,
            self.log_ib,
            self.log_i_ext,
            self.log_ia_ext,
            self.log_ib_ext,
        ]
        .map(|v| v as i64);
        let g = li - lie;
        let g_a = lia - liae;
        let g_b = lib - libe;
        let identities_hold = g_a + g_b == g
            && lia + lib - li == liae + libe - lie
            && lia == 2 * n_a - lie + libe
            && lib == 2 * n_b - lie + liae
            && li + lie == 2 * n;
        CleaningReport {
            g,
            g_a,
            g_b,
            identities_hold,
        }
    }
}

pub fn entropy_suite(a: &SubsystemMask, schedule: &MeasurementSchedule) -> Result<EntropyReport> {
    check_mask(a, schedule)?;
    let code = DualCode::build(schedule);
    let ext = ExtendedDualCode::build(schedule);
    Ok(null_counts(a, &code, &ext)?.entropies())
}

pub fn cleaning_report(
    a: &SubsystemMask,
    schedule: &MeasurementSchedule,
) -> Result<CleaningReport> {
    check_mask(a, schedule)?;
    let code = DualCode::build(schedule);
    let ext = ExtendedDualCode::build(schedule);
    Ok(null_counts(a, &code, &ext)?.cleaning())
}

fn check_mask(a: &SubsystemMask, schedule: &MeasurementSchedule) -> Result<()> {
    if a.n() != schedule.n() {
        return Err(Error::Dimension {
            expected: schedule.n(),
            found: a.n(),
        });
    }
    Ok(())
}

/// Smallest contiguous interval of the qubit line carrying a nontrivial
/// logical operator, or `None` when the schedule leaves no logical qubits.
pub fn code_distance_contiguous(schedule: &MeasurementSchedule) -> Option<usize> {
    let n = schedule.n();
    let code = DualCode::build(schedule);
    let ext = ExtendedDualCode::build(schedule);
    let g_of = |start: usize, end: usize| -> usize {
        let mask = SubsystemMask::interval(n, start, end - start).expect("interval in range");
        code.log2_null_count(&mask).expect("matching n")
            - ext.log2_null_count(&mask).expect("matching n")
    };
    if g_of(0, n) == 0 {
        return None;
    }
    // Minimal right ends are nondecreasing in the left end, so one sweep suffices.
    let mut best = n;
    let mut end = 0;
    for start in 0..n {
        end = end.max(start + 1);
        while end <= n && g_of(start, end) == 0 {
            end += 1;
        }
        if end > n {
            break;
        }
        best = best.min(end - start);
    }
    Some(best)
}
