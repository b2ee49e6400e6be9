//! Named consistency checks of the dual-code predictions against the tableau
//! simulator and against each other.
//!
//! Each check draws its own corpus of random schedules from a base seed, so
//! any check can be rerun in isolation and gives the same verdict.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distill::{
    averaged_output_prediction, choi_prediction, conjugated_joint_distribution, distill_ab,
    distill_ab_average, enumerate_ab, enumerate_system_reference, outcome_distribution,
    pauli_averaged_joint, sum_vector_prediction, AverageMode, DistillOptions, Dyadic,
};
use crate::dual_code::{null_counts, DualCode, ExtendedDualCode};
use crate::error::{Error, Result};
use crate::experiments::derive_seed;
use crate::fixtures::{random_pauli, random_schedule, random_subsystem};
use crate::groups::{build_logical, build_stabilizer, commutant, signed_eigenvalue};
use crate::pauli::SubsystemMask;
use crate::schedule::MeasurementSchedule;
use crate::tableau::{OutcomePolicy, StabilizerTableau};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    /// Description of the first failing case, if any.
    pub detail: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyConfig {
    pub n_max: usize,
    pub tau_max: usize,
    /// Random cases per simulation check.
    pub cases: usize,
    /// Random cases per exhaustive-enumeration check.
    pub exhaustive_cases: usize,
    /// Upper bounds applied to the exhaustive checks.
    pub exhaustive_n_max: usize,
    pub exhaustive_tau_max: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            n_max: 5,
            tau_max: 10,
            cases: 200,
            exhaustive_cases: 40,
            exhaustive_n_max: 3,
            exhaustive_tau_max: 5,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Theorems,
    Lemmas,
    Structure,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "theorems" => Ok(Suite::Theorems),
            "lemmas" => Ok(Suite::Lemmas),
            "structure" => Ok(Suite::Structure),
            other => Err(Error::InvalidArgument(format!(
                "unknown suite {other:?}; expected all, theorems, lemmas or structure"
            ))),
        }
    }
}

pub const THEOREM_CHECKS: &[&str] = &["recoverability", "conditional_entropy"];

pub const LEMMA_CHECKS: &[&str] = &[
    "sum_vector_distribution",
    "averaged_output",
    "pauli_average",
    "commutation_shift",
    "conjugated_sum_vector",
    "stabilizer_eigenvalue",
    "logical_null",
    "reverse_support",
    "choi_output",
    "extended_stabilizer",
];

pub const STRUCTURE_CHECKS: &[&str] = &[
    "commutant",
    "double_commutant",
    "cleaning_identities",
    "probability_flatness",
];

pub fn checks_in(suite: Suite) -> Vec<&'static str> {
    match suite {
        Suite::Theorems => THEOREM_CHECKS.to_vec(),
        Suite::Lemmas => LEMMA_CHECKS.to_vec(),
        Suite::Structure => STRUCTURE_CHECKS.to_vec(),
        Suite::All => THEOREM_CHECKS
            .iter()
            .chain(LEMMA_CHECKS)
            .chain(STRUCTURE_CHECKS)
            .copied()
            .collect(),
    }
}

/// A random schedule and subsystem for case `i` of the check named `name`.
pub fn random_case(
    name: &str,
    i: usize,
    n_max: usize,
    tau_max: usize,
    seed: u64,
) -> (MeasurementSchedule, SubsystemMask) {
    let stream = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(derive_seed(seed, stream), i as u64));
    let n = rand::Rng::random_range(&mut rng, 1..=n_max.max(1));
    let tau = rand::Rng::random_range(&mut rng, 0..=tau_max);
    let schedule = random_schedule(n, tau, &mut rng);
    let mask = random_subsystem(n, &mut rng);
    (schedule, mask)
}

type CaseFn = dyn Fn(usize, &MeasurementSchedule, &SubsystemMask) -> Result<Option<String>> + Sync;

fn run_cases(
    name: &str,
    cases: usize,
    n_max: usize,
    tau_max: usize,
    seed: u64,
    f: &CaseFn,
) -> Result<CheckResult> {
    let failures: Vec<(usize, String)> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let (schedule, mask) = random_case(name, i, n_max, tau_max, seed);
            let outcome = f(i, &schedule, &mask)?;
            Ok(outcome.map(|msg| {
                (
                    i,
                    format!(
                        "case {i}: {msg}; A = {:?}; schedule:\n{}",
                        mask.members(),
                        schedule.to_text()
                    ),
                )
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(CheckResult {
        name: name.to_string(),
        passed: failures.is_empty(),
        cases,
        detail: failures.into_iter().min_by_key(|(i, _)| *i).map(|(_, d)| d),
    })
}

fn fail(cond: bool, msg: impl FnOnce() -> String) -> Option<String> {
    (!cond).then(msg)
}

fn sampled_run(schedule: &MeasurementSchedule, seed: u64) -> Result<StabilizerTableau> {
    let mut t = StabilizerTableau::new_maximally_mixed(schedule.n()).with_seed(seed);
    t.run_schedule(schedule, OutcomePolicy::Sample)?;
    Ok(t)
}

fn sampled_run_with_reference(
    schedule: &MeasurementSchedule,
    seed: u64,
) -> Result<StabilizerTableau> {
    let mut t = StabilizerTableau::new_with_reference(schedule.n()).with_seed(seed);
    t.run_schedule(schedule, OutcomePolicy::Sample)?;
    Ok(t)
}

pub fn run_check(name: &str, cfg: &VerifyConfig) -> Result<CheckResult> {
    let (n, tau, cases, seed) = (cfg.n_max, cfg.tau_max, cfg.cases, cfg.seed);
    let en = cfg.exhaustive_n_max.min(cfg.n_max);
    let et = cfg.exhaustive_tau_max.min(cfg.tau_max);
    let ec = cfg.exhaustive_cases;
    match name {
        "recoverability" => run_cases(name, cases, n, tau, seed, &|i, s, a| {
            let code = DualCode::build(s);
            let t = sampled_run(s, i as u64)?;
            let cond = t.subsystem_entropy(&SubsystemMask::all(s.n()))?
                - t.subsystem_entropy(&a.complement())?;
            let maximal = cond == -(a.len() as i64);
            Ok(fail(code.recoverable(a)? == maximal, || {
                format!(
                    "recoverable = {} but S_A|B = {cond}",
                    code.recoverable(a).unwrap_or(false)
                )
            }))
        }),
        "conditional_entropy" => run_cases(name, cases, n, tau, seed, &|i, s, a| {
            let code = DualCode::build(s);
            let ext = ExtendedDualCode::build(s);
            let e = null_counts(a, &code, &ext)?.entropies();
            let t = sampled_run_with_reference(s, i as u64)?;
            let nn = s.n();
            let sys = |m: &SubsystemMask| SubsystemMask::new(2 * nn, m.members().iter().copied());
            let r = SubsystemMask::interval(2 * nn, nn, nn)?;
            let s_a = t.subsystem_entropy(&sys(a)?)?;
            let s_b = t.subsystem_entropy(&sys(&a.complement())?)?;
            let s_ab = t.subsystem_entropy(&SubsystemMask::interval(2 * nn, 0, nn)?)?;
            let s_r = t.subsystem_entropy(&r)?;
            let ok = e.s_a_given_b == s_ab - s_b
                && e.s_a == s_a
                && e.s_b == s_b
                && e.s_ab == s_ab
                && e.s_r == s_r
                && e.i_ab == s_a + s_b - s_ab
                && e.i_ar == s_a + s_r - s_b;
            Ok(fail(ok, || {
                format!("code {e:?} vs tableau S_A={s_a} S_B={s_b} S_AB={s_ab} S_R={s_r}")
            }))
        }),
        "sum_vector_distribution" => run_cases(name, ec, en, et, seed, &|_, s, a| {
            let code = DualCode::build(s);
            let hist = enumerate_ab(s, a, DistillOptions::default())?.sum_vector;
            let pred = sum_vector_prediction(&code, a)?;
            Ok(fail(hist == pred, || {
                format!("histogram {hist:?} vs {pred:?}")
            }))
        }),
        "averaged_output" => run_cases(name, ec, en, et, seed, &|_, s, a| {
            let code = DualCode::build(s);
            let e = enumerate_ab(s, a, DistillOptions::default())?;
            let avg = distill_ab_average(s, a, AverageMode::Exhaustive)?;
            let pred = averaged_output_prediction(&code, a)?;
            if avg != pred {
                return Ok(Some(format!("averaged {avg:?} vs {pred:?}")));
            }
            let expected = code.conditional_entropy(a)? as f64;
            if (avg.conditional_entropy() - expected).abs() > 1e-12 {
                return Ok(Some(format!(
                    "entropy {} vs {expected}",
                    avg.conditional_entropy()
                )));
            }
            if code.recoverable(a)? {
                let inv = Dyadic::new(1, 1i128 << (2 * a.len()));
                if e.no_feedback_mass != inv || e.perfect_mass != Dyadic::from_integer(1) {
                    return Ok(Some(format!(
                        "no-feedback mass {} perfect mass {}",
                        e.no_feedback_mass, e.perfect_mass
                    )));
                }
            }
            Ok(None)
        }),
        "pauli_average" => run_cases(name, ec, en, et.min(4), seed, &|_, s, a| {
            let joint = enumerate_ab(s, a, DistillOptions::default())?.joint;
            let avg = pauli_averaged_joint(s, a)?;
            Ok(fail(joint == avg, || {
                "Prob(m, m̄) differs from the Pauli average".into()
            }))
        }),
        "commutation_shift" => run_cases(name, ec, en, et, seed, &|i, s, a| {
            let code = DualCode::build(s);
            let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
            let p = random_pauli(a.len(), &mut rng).embed(s.n(), a.members())?;
            let c = code.codeword(&p)?;
            let with_p = conjugated_joint_distribution(s, &p)?;
            let plain =
                conjugated_joint_distribution(s, &crate::pauli::PauliString::identity(s.n()))?;
            let shifted: BTreeMap<_, _> = plain
                .into_iter()
                .map(|((m, mb), v)| ((m, mb.mul(&c)), v))
                .collect();
            Ok(fail(with_p == shifted, || format!("shift by C({p}) fails")))
        }),
        "conjugated_sum_vector" => run_cases(name, ec, en, et, seed, &|i, s, a| {
            let code = DualCode::build(s);
            let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
            let p = random_pauli(a.len(), &mut rng).embed(s.n(), a.members())?;
            let joint = conjugated_joint_distribution(s, &p)?;
            let mut sums: BTreeMap<_, Dyadic> = BTreeMap::new();
            for ((m, mb), v) in joint {
                *sums.entry(m.mul(&mb)).or_insert_with(Dyadic::zero) += v;
            }
            let w = Dyadic::new(1, 1i128 << code.error_space().rank());
            let c = code.codeword(&p)?;
            let expected: BTreeMap<_, _> = code
                .error_space()
                .elements()
                .into_iter()
                .map(|e| (crate::gf2::SignVector(e.xor(c.bits())), w))
                .collect();
            Ok(fail(sums == expected, || {
                format!("Sum(s; {p}) is not uniform on its coset")
            }))
        }),
        "stabilizer_eigenvalue" => run_cases(name, cases, n, tau, seed, &|i, s, _| {
            let stab = build_stabilizer(s);
            let t = sampled_run(s, i as u64)?;
            for g in stab.generators() {
                if let Err(e) = signed_eigenvalue(&stab, g, &t) {
                    return Ok(Some(e.to_string()));
                }
            }
            Ok(None)
        }),
        "logical_null" => run_cases(name, cases, n, tau, seed, &|i, s, _| {
            let code = DualCode::build(s);
            let logic = build_logical(s);
            let all = SubsystemMask::all(s.n());
            if code.log2_null_count(&all)? != logic.rank() {
                return Ok(Some(
                    "null count differs from the logical group size".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
            for _ in 0..20 {
                let p = random_pauli(s.n(), &mut rng);
                if code.is_null(&p)? != logic.contains(&p)? {
                    return Ok(Some(format!("{p} disagrees")));
                }
            }
            Ok(None)
        }),
        "reverse_support" | "choi_output" => {
            let support_only = name == "reverse_support";
            run_cases(name, ec, en, et, seed, &move |_, s, _| {
                let e = enumerate_system_reference(s)?;
                if support_only {
                    return Ok(fail(e.reverse_support, || {
                        "sum vector outside ℰ_rev".into()
                    }));
                }
                let avg = e.averaged();
                let pred = choi_prediction(s);
                Ok(fail(e.correlations && avg == pred, || {
                    format!(
                        "correlations {} averaged {avg:?} vs {pred:?}",
                        e.correlations
                    )
                }))
            })
        }
        "extended_stabilizer" => run_cases(name, cases, n, tau, seed, &|i, s, _| {
            let ext = ExtendedDualCode::build(s);
            let stab = build_stabilizer(s);
            let all = SubsystemMask::all(s.n());
            if ext.log2_null_count(&all)? != stab.rank() {
                return Ok(Some(
                    "extended null count differs from the stabilizer group size".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
            for g in stab.generators() {
                if !ext.is_null(g)? {
                    return Ok(Some(format!("stabilizer {g} is not null")));
                }
            }
            for _ in 0..20 {
                let p = random_pauli(s.n(), &mut rng);
                if ext.is_null(&p)? != stab.contains(&p)? {
                    return Ok(Some(format!("{p} disagrees")));
                }
            }
            Ok(None)
        }),
        "commutant" => run_cases(name, cases, n, tau, seed, &|_, s, _| {
            let stab = build_stabilizer(s);
            let logic = build_logical(s);
            Ok(fail(commutant(&stab).same_group(&logic), || {
                "L ≠ Comm(S)".into()
            }))
        }),
        "double_commutant" => run_cases(name, cases, n, tau, seed, &|_, s, _| {
            let stab = build_stabilizer(s);
            let logic = build_logical(s);
            Ok(fail(
                commutant(&commutant(&stab)).same_group(&stab)
                    && commutant(&logic).same_group(&stab),
                || "Comm(Comm(S)) ≠ S".into(),
            ))
        }),
        "cleaning_identities" => run_cases(name, cases, n, tau, seed, &|_, s, a| {
            let code = DualCode::build(s);
            let ext = ExtendedDualCode::build(s);
            let counts = null_counts(a, &code, &ext)?;
            let c = counts.cleaning();
            Ok(fail(c.identities_hold, || format!("{counts:?}")))
        }),
        "probability_flatness" => run_cases(
            name,
            ec,
            en.max(4).min(n),
            et.max(6).min(tau),
            seed,
            &|_, s, _| {
                let dist = outcome_distribution(s)?;
                let total: Dyadic = dist.values().sum();
                let first = dist.values().next().copied();
                let flat = dist.values().all(|v| Some(*v) == first);
                Ok(fail(flat && total == Dyadic::from_integer(1), || {
                    format!("{dist:?}")
                }))
            },
        ),
        other => Err(Error::InvalidArgument(format!("unknown check {other:?}"))),
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    checks_in(suite)
        .into_iter()
        .map(|c| run_check(c, cfg))
        .collect()
}

/// Deterministic distillation on random recoverable instances: every run
/// has fidelity 1. Returns the number of instances checked and the first
/// failure.
pub fn recoverable_runs(
    instances: usize,
    n_max: usize,
    tau_max: usize,
    seed: u64,
) -> Result<(usize, Option<String>)> {
    let failures: Vec<String> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut attempt = 0u64;
            loop {
                let (s, a) = random_case(
                    "recoverable",
                    i * 1000 + attempt as usize,
                    n_max,
                    tau_max,
                    seed,
                );
                attempt += 1;
                if !DualCode::build(&s).recoverable(&a)? {
                    continue;
                }
                let r = distill_ab(
                    &s,
                    &a,
                    derive_seed(seed, i as u64),
                    DistillOptions::default(),
                )?;
                return Ok(fail(r.is_perfect(), || {
                    format!(
                        "fidelity {} for A = {:?}:\n{}",
                        r.fidelity(),
                        a.members(),
                        s.to_text()
                    )
                }));
            }
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok((instances, failures.into_iter().next()))
}
