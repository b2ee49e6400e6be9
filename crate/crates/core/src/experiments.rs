//! Parameter sweeps over random monitored circuits, decoupling profiles and
//! fits of the entanglement scaling.
//!
//! Every sample is simulated from its own seed, derived from a base seed and
//! the sample's coordinates, so records can be regenerated one at a time and
//! results do not depend on the number of worker threads.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::circuits::{
    random_circuit, simulate_ops, time_evolve, Boundary, CircuitOp, CircuitSpec,
};
use crate::distill::{distill_ab, DistillOptions};
use crate::dual_code::DualCode;
use crate::error::{Error, Result};
use crate::groups::logical_count_on;
use crate::pauli::{Letter, PauliString, SubsystemMask};
use crate::schedule::MeasurementSchedule;
use crate::tableau::{OutcomePolicy, StabilizerTableau};

/// Environment variable holding the default worker-thread count.
pub const THREADS_ENV: &str = "DUALCODE_THREADS";

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent child seed number `stream` of `base`.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(stream.wrapping_add(0x632b_e59b_d9b4_e019)))
}

/// Installs a global thread pool sized by [`THREADS_ENV`], if it is set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let k: usize = v
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("{THREADS_ENV}={v} is not a count")))?;
        // a second call finds the pool already installed, which is fine
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global();
    }
    Ok(())
}

/// Observables of one simulated circuit with a purifying reference.
#[derive(Clone, Debug)]
pub struct SampleObservables {
    /// Half-chain entropy averaged over the final ⌈n/4⌉ layers.
    pub s_half_mean: f64,
    pub s_half_final: i64,
    pub s_r: i64,
    pub i_ar_half: i64,
    /// Number of single sites A with I(A, R) = 0.
    pub decoupled_sites: usize,
    /// Final state on `[S | R]`.
    pub state: StabilizerTableau,
}

fn mutual_information_with_reference(
    t: &StabilizerTableau,
    n: usize,
    a: &SubsystemMask,
) -> Result<i64> {
    let lift = |m: &SubsystemMask| SubsystemMask::new(2 * n, m.members().iter().copied());
    let r = SubsystemMask::interval(2 * n, n, n)?;
    let s_a = t.subsystem_entropy(&lift(a)?)?;
    let s_b = t.subsystem_entropy(&lift(&a.complement())?)?;
    let s_r = t.subsystem_entropy(&r)?;
    Ok(s_a + s_r - s_b)
}

/// Simulates `spec` directly on `[S | R]` and records the observables.
pub fn observe_sample(spec: &CircuitSpec) -> Result<SampleObservables> {
    let n = spec.n;
    let circuit = random_circuit(spec)?;
    let mut t = StabilizerTableau::new_with_reference(n).with_seed(derive_seed(spec.seed, 1));
    let half = SubsystemMask::interval(2 * n, 0, n / 2)?;
    let window = n.div_ceil(4).clamp(1, spec.depth);
    let first_counted = spec.depth - window;
    let ends = circuit.layer_ends().to_vec();
    let mut layer = 0;
    let mut acc = 0i64;
    let positions: Vec<usize> = (0..n).collect();
    simulate_ops(
        &mut t,
        n,
        circuit.ops(),
        &positions,
        OutcomePolicy::Sample,
        |i, t| {
            while layer < ends.len() && ends[layer] == i + 1 {
                if layer >= first_counted {
                    acc += t.subsystem_entropy(&half)?;
                }
                layer += 1;
            }
            Ok(())
        },
    )?;
    // layers without any op end before the first op index
    while layer < ends.len() {
        if layer >= first_counted {
            acc += t.subsystem_entropy(&half)?;
        }
        layer += 1;
    }
    let r = SubsystemMask::interval(2 * n, n, n)?;
    let half_n = SubsystemMask::interval(n, 0, n / 2)?;
    let mut decoupled = 0;
    for q in 0..n {
        if mutual_information_with_reference(&t, n, &SubsystemMask::new(n, [q])?)? == 0 {
            decoupled += 1;
        }
    }
    Ok(SampleObservables {
        s_half_mean: acc as f64 / window as f64,
        s_half_final: t.subsystem_entropy(&half)?,
        s_r: t.subsystem_entropy(&r)?,
        i_ar_half: mutual_information_with_reference(&t, n, &half_n)?,
        decoupled_sites: decoupled,
        state: t,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub ns: Vec<usize>,
    pub ps: Vec<f64>,
    pub samples: usize,
    /// Circuit depth; `None` means 2n.
    pub depth: Option<usize>,
    pub boundary: Boundary,
    pub seed: u64,
}

/// One row of sweep output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub n: usize,
    pub p: f64,
    pub sample: usize,
    pub seed: u64,
    #[serde(rename = "S_half")]
    pub s_half: f64,
    #[serde(rename = "S_half_final")]
    pub s_half_final: i64,
    #[serde(rename = "S_R")]
    pub s_r: i64,
    #[serde(rename = "I_AR_half")]
    pub i_ar_half: i64,
    pub decoupled_sites: usize,
    pub depth: usize,
    pub boundary: Boundary,
    /// Hash of the full circuit spec, seed included.
    pub spec_hash: String,
}

/// Stable FNV-1a hash of every field of a circuit spec.
pub fn spec_hash(spec: &CircuitSpec) -> String {
    let text = format!(
        "n={};depth={};p={:e};boundary={:?};seed={}",
        spec.n, spec.depth, spec.p, spec.boundary, spec.seed
    );
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

/// Seed of sample `sample` at grid point (n, p index).
pub fn sample_seed(base: u64, n: usize, p_index: usize, sample: usize) -> u64 {
    derive_seed(
        base,
        (n as u64) << 40 | (p_index as u64) << 20 | sample as u64,
    )
}

/// Half-chain entropy statistics over a grid of sizes and measurement rates.
pub fn sweep_measurement_rate(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    let mut points = Vec::new();
    for &n in &cfg.ns {
        for (pi, &p) in cfg.ps.iter().enumerate() {
            for sample in 0..cfg.samples {
                points.push((n, pi, p, sample));
            }
        }
    }
    points
        .into_par_iter()
        .map(|(n, pi, p, sample)| {
            let seed = sample_seed(cfg.seed, n, pi, sample);
            let depth = cfg.depth.unwrap_or(2 * n);
            let spec = CircuitSpec::new(n, depth, p, cfg.boundary, seed)?;
            let obs = observe_sample(&spec)?;
            Ok(SweepRecord {
                n,
                p,
                sample,
                seed,
                s_half: obs.s_half_mean,
                s_half_final: obs.s_half_final,
                s_r: obs.s_r,
                i_ar_half: obs.i_ar_half,
                decoupled_sites: obs.decoupled_sites,
                depth,
                boundary: cfg.boundary,
                spec_hash: spec_hash(&spec),
            })
        })
        .collect()
}

/// Averages of one interval length in a decoupling profile.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileRow {
    pub sample: usize,
    pub seed: u64,
    pub len: usize,
    #[serde(rename = "S_A")]
    pub s_a: f64,
    #[serde(rename = "I_AR")]
    pub i_ar: f64,
    /// Fraction of intervals of this length with I(A, R) = 0.
    pub decoupled_fraction: f64,
    pub g_a: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecouplingProfile {
    pub rows: Vec<ProfileRow>,
    /// Per sample, the smallest interval length carrying a logical operator.
    pub d_code: Vec<Option<usize>>,
    pub d_code_median: Option<f64>,
}

fn intervals(n: usize, len: usize, boundary: Boundary) -> Vec<SubsystemMask> {
    let starts = match boundary {
        Boundary::Open => n - len + 1,
        Boundary::Periodic => {
            if len == n {
                1
            } else {
                n
            }
        }
    };
    (0..starts)
        .map(|s| SubsystemMask::new(n, (s..s + len).map(|q| q % n)).expect("in range"))
        .collect()
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let k = v.len();
    Some(if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    })
}

/// I(A, R) and g_A against contiguous interval length, for `samples` circuits.
///
/// g_A is counted from the stabilizer group of the final state, i.e. the
/// subgroup of the joint state supported on the system.
pub fn decoupling_profile(spec: &CircuitSpec, samples: usize) -> Result<DecouplingProfile> {
    let n = spec.n;
    let max_len = (n / 2).max(1);
    let per_sample: Vec<(Vec<ProfileRow>, Option<usize>)> = (0..samples)
        .into_par_iter()
        .map(|sample| {
            let seed = derive_seed(spec.seed, sample as u64);
            let obs = observe_sample(&CircuitSpec { seed, ..*spec })?;
            let t = &obs.state;
            let system = SubsystemMask::interval(2 * n, 0, n)?;
            let stabilizers = t.subgroup_on(&system)?;
            let mut rows = Vec::new();
            let mut d_code = None;
            for len in 1..=max_len {
                let masks = intervals(n, len, spec.boundary);
                let (mut s_a, mut i_ar, mut zero, mut g_a) = (0i64, 0i64, 0usize, 0i64);
                for a in &masks {
                    let lifted = SubsystemMask::new(2 * n, a.members().iter().copied())?;
                    s_a += t.subsystem_entropy(&lifted)?;
                    let i = mutual_information_with_reference(t, n, a)?;
                    i_ar += i;
                    zero += (i == 0) as usize;
                    let g = logical_count_on(&stabilizers, a)?;
                    if g > 0 && d_code.is_none() {
                        d_code = Some(len);
                    }
                    g_a += g;
                }
                let k = masks.len() as f64;
                rows.push(ProfileRow {
                    sample,
                    seed,
                    len,
                    s_a: s_a as f64 / k,
                    i_ar: i_ar as f64 / k,
                    decoupled_fraction: zero as f64 / k,
                    g_a: g_a as f64 / k,
                });
            }
            Ok((rows, d_code))
        })
        .collect::<Result<_>>()?;
    let d_code: Vec<Option<usize>> = per_sample.iter().map(|(_, d)| *d).collect();
    let d_code_median = median(d_code.iter().flatten().map(|&d| d as f64).collect());
    Ok(DecouplingProfile {
        rows: per_sample.into_iter().flat_map(|(r, _)| r).collect(),
        d_code,
        d_code_median,
    })
}

/// Outcome of running one schedule from a mixed and from a product initial state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateIndependenceReport {
    #[serde(rename = "S_A|B_mixed")]
    pub s_cond_mixed: i64,
    #[serde(rename = "S_A|B_product")]
    pub s_cond_product: i64,
    pub fidelity_log2_mixed: Option<i64>,
    pub fidelity_log2_product: Option<i64>,
    #[serde(rename = "I_AR")]
    pub i_ar: i64,
    pub entropy_equal: bool,
    pub fidelity_equal: bool,
}

/// Compares the circuit of `spec` started from the maximally mixed state and
/// from a product state, prepared by Z measurements before the circuit.
pub fn state_independence_check(
    spec: &CircuitSpec,
    a: &SubsystemMask,
) -> Result<StateIndependenceReport> {
    let circuit = random_circuit(spec)?;
    let n = spec.n;
    let mixed = circuit.to_schedule();
    let mut ops: Vec<CircuitOp> = (0..n)
        .map(|q| CircuitOp::Measure(PauliString::single(n, q, Letter::Z)))
        .collect();
    ops.extend(circuit.ops().iter().cloned());
    let product = time_evolve(n, &ops)?;
    let cond = |s: &MeasurementSchedule| DualCode::build(s).conditional_entropy(a);
    let seed = derive_seed(spec.seed, 2);
    let fid = |s: &MeasurementSchedule| -> Result<Option<i64>> {
        Ok(distill_ab(s, a, seed, DistillOptions::default())?.fidelity_log2)
    };
    let report_i_ar = crate::dual_code::entropy_suite(a, &mixed)?.i_ar;
    let (s_cond_mixed, s_cond_product) = (cond(&mixed)?, cond(&product)?);
    let (fidelity_log2_mixed, fidelity_log2_product) = (fid(&mixed)?, fid(&product)?);
    Ok(StateIndependenceReport {
        s_cond_mixed,
        s_cond_product,
        fidelity_log2_mixed,
        fidelity_log2_product,
        i_ar: report_i_ar,
        entropy_equal: s_cond_mixed == s_cond_product,
        fidelity_equal: fidelity_log2_mixed == fidelity_log2_product,
    })
}

/// Sample statistics of the random-projection purity identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PurityReport {
    pub samples: usize,
    pub mean: f64,
    pub std_error: f64,
    /// d/(d+1) (Tr ρ_A² + Tr ρ_B²) of the unprojected state, d = 2^n.
    pub prediction: f64,
    /// (mean − prediction) / std_error, or 0 when both agree exactly.
    pub z_score: f64,
}

/// Projects the reference onto uniformly random stabilizer states and
/// averages the weighted purity of A.
///
/// The state is the output of `schedule` on `[S | R]`. Each sample applies a
/// random Clifford to R and measures R in the Z basis; with Born probability
/// q of the observed outcome, the sample value d·q·Tr ρ_A² is an unbiased
/// estimate of the Haar average of the unnormalized purity.
pub fn purity_swap_check(
    schedule: &MeasurementSchedule,
    a: &SubsystemMask,
    samples: usize,
    seed: u64,
) -> Result<PurityReport> {
    let n = schedule.n();
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    if a.n() != n {
        return Err(Error::Dimension {
            expected: n,
            found: a.n(),
        });
    }
    let mut base = StabilizerTableau::new_with_reference(n).with_seed(derive_seed(seed, u64::MAX));
    base.run_schedule(schedule, OutcomePolicy::Sample)?;
    base.reset_log2_prob();
    let lift = |m: &SubsystemMask| SubsystemMask::new(2 * n, m.members().iter().copied());
    let a2 = lift(a)?;
    let b2 = lift(&a.complement())?;
    let d = (n as f64).exp2();
    let prediction = d / (d + 1.0)
        * ((-(base.subsystem_entropy(&a2)? as f64)).exp2()
            + (-(base.subsystem_entropy(&b2)? as f64)).exp2());
    let r_pos: Vec<usize> = (n..2 * n).collect();
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut t = base.clone();
            t.reseed(derive_seed(seed, i as u64));
            t.random_clifford_on(&r_pos)?;
            for &q in &r_pos {
                t.measure(&PauliString::single(2 * n, q, Letter::Z), None)?;
            }
            let e = n as i64 + t.log2_prob() - t.subsystem_entropy(&a2)?;
            Ok((e as f64).exp2())
        })
        .collect::<Result<_>>()?;
    let k = samples as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let std_error = (var / k).sqrt();
    let diff = mean - prediction;
    let z_score = if diff.abs() < 1e-12 {
        0.0
    } else {
        diff / std_error
    };
    Ok(PurityReport {
        samples,
        mean,
        std_error,
        prediction,
        z_score,
    })
}

/// S(L) = a L + b L^γ + c log₂ L.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SubleadingFit {
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
    pub c: f64,
    /// Root-mean-square residual.
    pub rms: f64,
}

fn linear_part(points: &[(f64, f64)], gamma: f64) -> (DVector<f64>, f64) {
    let m = DMatrix::from_fn(points.len(), 3, |i, j| {
        let l = points[i].0;
        match j {
            0 => l,
            1 => l.powf(gamma),
            _ => l.log2(),
        }
    });
    let y = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let svd = m.clone().svd(true, true);
    let coef = svd.solve(&y, 1e-10).expect("U and V were computed");
    let sse = (&m * &coef - y).norm_squared();
    (coef, sse)
}

/// Least-squares fit of S(L) = a L + b L^γ + c log₂ L with γ in (0, 1).
///
/// The linear coefficients are solved exactly for each γ; γ is scanned on a
/// grid and refined by golden-section search.
pub fn subleading_fit(points: &[(f64, f64)]) -> Result<SubleadingFit> {
    let mut ls: Vec<f64> = points.iter().map(|p| p.0).collect();
    ls.sort_by(|a, b| a.total_cmp(b));
    ls.dedup();
    if ls.len() < 6 {
        return Err(Error::InvalidArgument(format!(
            "insufficient data: {} distinct lengths, need at least 6",
            ls.len()
        )));
    }
    if points
        .iter()
        .any(|p| p.0.is_nan() || p.0 <= 0.0 || !p.1.is_finite())
    {
        return Err(Error::InvalidArgument(
            "lengths must be positive and values finite".into(),
        ));
    }
    let sse = |g: f64| linear_part(points, g).1;
    let step = 0.01;
    let mut best = step;
    let mut best_sse = f64::INFINITY;
    let mut g = step;
    while g < 1.0 - step / 2.0 {
        let v = sse(g);
        if v < best_sse {
            best_sse = v;
            best = g;
        }
        g += step;
    }
    let (mut lo, mut hi) = ((best - step).max(1e-4), (best + step).min(1.0 - 1e-4));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (sse(x1), sse(x2));
    for _ in 0..60 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = sse(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = sse(x2);
        }
    }
    let gamma = (lo + hi) / 2.0;
    let (coef, sse) = linear_part(points, gamma);
    Ok(SubleadingFit {
        a: coef[0],
        b: coef[1],
        gamma,
        c: coef[2],
        rms: (sse / points.len() as f64).sqrt(),
    })
}

/// y = A x^k fitted by linear regression of log y on log x.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub prefactor: f64,
    pub exponent: f64,
    pub r_squared: f64,
}

pub fn power_law_fit(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 > 0.0 && p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    if logs.len() < 2 {
        return Err(Error::InvalidArgument(
            "insufficient data: need two positive points".into(),
        ));
    }
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "insufficient data: all x values are equal".into(),
        ));
    }
    let exponent = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(PowerLawFit {
        prefactor: (my - exponent * mx).exp(),
        exponent,
        r_squared,
    })
}

/// Writes serializable records as CSV with a header row.
pub fn write_csv<T: Serialize, W: Write>(records: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes serializable records as JSON lines.
pub fn write_json_lines<T: Serialize, W: Write>(records: &[T], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
