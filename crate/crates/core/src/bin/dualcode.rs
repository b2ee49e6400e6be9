//! Command-line front end: entropies, groups, distillation runs, the
//! verification suite, circuit sweeps and fits.
//!
//! Exit status is 0 on success, 1 on bad input and 2 when an internal
//! invariant is violated (including a failing verification check).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use dualcode::circuits::{random_circuit, Boundary, CircuitOp, CircuitSpec};
use dualcode::distill::{
    distill_ab, distill_reference_qubit, distill_system_reference, enumerate_ab,
    enumerate_system_reference, DistillOptions, Dyadic,
};
use dualcode::dual_code::{cleaning_report, entropy_suite};
use dualcode::experiments::{
    configure_threads, decoupling_profile, derive_seed, power_law_fit, subleading_fit,
    sweep_measurement_rate, write_csv, write_json_lines, SweepConfig, THREADS_ENV,
};
use dualcode::groups::{build_logical, build_stabilizer, logical_pairs};
use dualcode::verify::{run_suite, Suite, VerifyConfig};
use dualcode::{DualCode, Error, MeasurementSchedule, Result, SubsystemMask};

#[derive(Parser)]
#[command(
    name = "dualcode",
    version,
    about = "Dual-code analysis of monitored Clifford circuits"
)]
#[command(after_help = format!(
    "Schedule files: header `n=<int>`, then one sign-prefixed Pauli per line, earliest first; \
     `#` starts a comment.\n{THREADS_ENV} sets the worker-thread count."
))]
struct Cli {
    /// Base seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format; sweeps and profiles default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Bell pairs between A and a mirror of A.
    Ab,
    /// Choi state between the system and the reference.
    Sysref,
    /// A single reference qubit entangled with an encoded qubit.
    Gh,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    /// S = a L + b L^γ + c log₂ L.
    Subleading,
    /// y = A x^k.
    Power,
}

#[derive(Subcommand)]
enum Command {
    /// Entropies, recoverability and cleaning counts of a subsystem.
    ///
    /// JSON fields: n, n_A, tau, recoverable, S_A, S_B, S_R, S_AB, S_A|B,
    /// S_AB|R, I_AB, I_AR, g, g_A, g_B.
    Analyze {
        #[arg(long)]
        schedule: PathBuf,
        /// Qubit indices of A, e.g. `0,2` or `0-3`.
        #[arg(long)]
        subsystem: String,
    },
    /// Run a distillation protocol; one JSON line per run.
    ///
    /// Record fields: m, m_bar, s, feedback, fidelity_log2, seed and
    /// protocol-specific extras. With --exhaustive a single summary of
    /// exact branch probabilities is written instead.
    Distill {
        #[arg(long)]
        schedule: PathBuf,
        /// Qubit indices of A (ab mode only).
        #[arg(long)]
        subsystem: Option<String>,
        #[arg(long, value_enum, default_value_t = Mode::Ab)]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        /// Enumerate every outcome branch with exact probabilities.
        #[arg(long)]
        exhaustive: bool,
        /// Reverse only the most recent measurements (ab mode).
        #[arg(long)]
        depth: Option<usize>,
        /// Keep a purifying reference in the simulation (ab mode).
        #[arg(long)]
        with_reference: bool,
        /// Brickwork layers of random two-qubit Cliffords encoding the
        /// reference qubit (gh mode).
        #[arg(long, default_value_t = 0)]
        encoding_depth: usize,
    },
    /// Stabilizer and logical generators as sign-free Pauli strings.
    Groups {
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Run the named structural checks against the tableau oracle.
    ///
    /// Record fields: name, passed, cases, detail.
    Verify {
        /// all, theorems, lemmas or structure.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        #[arg(long, default_value_t = 10)]
        tau_max: usize,
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
    /// Half-chain entropy of random monitored circuits over (n, p).
    ///
    /// CSV header: n,p,sample,seed,S_half,S_half_final,S_R,I_AR_half,
    /// decoupled_sites,depth,boundary,spec_hash. S_half is averaged over
    /// the final n/4 layers.
    Sweep {
        /// Comma-separated system sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// `start:stop:step` or a comma-separated list.
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        /// Circuit depth; defaults to 2n.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value_t = Boundary::Open)]
        boundary: Boundary,
    },
    /// I(A,R) and g_A against contiguous interval length.
    ///
    /// CSV header: sample,seed,len,S_A,I_AR,decoupled_fraction,g_A. The
    /// median code distance goes to stderr in csv mode.
    Profile {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value_t = Boundary::Open)]
        boundary: Boundary,
    },
    /// Fit two columns of a CSV file.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, value_enum, default_value_t = Model::Subleading)]
        model: Model,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Invariant(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit<T: Serialize>(records: &[T], format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => write_json_lines(records, out),
        Format::Csv => write_csv(records, out),
    }
}

fn json_only(format: Option<Format>, command: &str) -> Result<()> {
    if format == Some(Format::Csv) {
        return Err(Error::InvalidArgument(format!(
            "{command} writes nested records; use --format json"
        )));
    }
    Ok(())
}

fn ratio(d: &Dyadic) -> String {
    d.to_string()
}

fn read_schedule(path: &Path) -> Result<MeasurementSchedule> {
    MeasurementSchedule::read(path)
}

fn parse_p_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("cannot parse p grid {s:?}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let ps: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, step] = parts[..] else {
            return Err(bad());
        };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if step.is_nan() || step <= 0.0 || b < a {
            return Err(bad());
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|k| ((a + k as f64 * step) * 1e9).round() / 1e9)
            .collect()
    } else {
        s.split(',').map(num).collect::<Result<_>>()?
    };
    if ps.is_empty() || ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidArgument(format!(
            "p values must lie in [0, 1]: {s:?}"
        )));
    }
    Ok(ps)
}

#[derive(Serialize)]
struct AnalyzeReport {
    n: usize,
    #[serde(rename = "n_A")]
    n_a: usize,
    tau: usize,
    recoverable: bool,
    #[serde(rename = "S_A")]
    s_a: i64,
    #[serde(rename = "S_B")]
    s_b: i64,
    #[serde(rename = "S_R")]
    s_r: i64,
    #[serde(rename = "S_AB")]
    s_ab: i64,
    #[serde(rename = "S_A|B")]
    s_a_given_b: i64,
    #[serde(rename = "S_AB|R")]
    s_ab_given_r: i64,
    #[serde(rename = "I_AB")]
    i_ab: i64,
    #[serde(rename = "I_AR")]
    i_ar: i64,
    g: i64,
    #[serde(rename = "g_A")]
    g_a: i64,
    #[serde(rename = "g_B")]
    g_b: i64,
}

fn read_columns(path: &Path, x: &str, y: &str) -> Result<Vec<(f64, f64)>> {
    let csv_err = |e: csv::Error| Error::InvalidArgument(format!("{}: {e}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let headers = r.headers().map_err(csv_err)?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::InvalidArgument(format!("no column {name:?} in {}", path.display()))
        })
    };
    let (ix, iy) = (col(x)?, col(y)?);
    let mut points = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let field = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::Parse {
                    line: line + 2,
                    message: format!("column {} is not a number", headers.get(i).unwrap_or("?")),
                })
        };
        points.push((field(ix)?, field(iy)?));
    }
    Ok(points)
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    let seed = cli.seed;
    let format = cli.format;
    match cli.command {
        Command::Analyze {
            schedule,
            subsystem,
        } => {
            let s = read_schedule(&schedule)?;
            let a = SubsystemMask::parse(s.n(), &subsystem)?;
            let e = entropy_suite(&a, &s)?;
            let c = cleaning_report(&a, &s)?;
            let report = AnalyzeReport {
                n: s.n(),
                n_a: a.len(),
                tau: s.len(),
                recoverable: DualCode::build(&s).recoverable(&a)?,
                s_a: e.s_a,
                s_b: e.s_b,
                s_r: e.s_r,
                s_ab: e.s_ab,
                s_a_given_b: e.s_a_given_b,
                s_ab_given_r: e.s_ab_given_r,
                i_ab: e.i_ab,
                i_ar: e.i_ar,
                g: c.g,
                g_a: c.g_a,
                g_b: c.g_b,
            };
            let mut out = output(&cli.out)?;
            emit(&[report], format.unwrap_or(Format::Json), &mut out)?;
            out.flush()?;
            Ok(true)
        }
        Command::Distill {
            schedule,
            subsystem,
            mode,
            runs,
            exhaustive,
            depth,
            with_reference,
            encoding_depth,
        } => {
            json_only(format, "distill")?;
            let s = read_schedule(&schedule)?;
            let mut out = output(&cli.out)?;
            match mode {
                Mode::Ab => {
                    let spec = subsystem.ok_or_else(|| {
                        Error::InvalidArgument("ab mode needs --subsystem".into())
                    })?;
                    let a = SubsystemMask::parse(s.n(), &spec)?;
                    let opts = DistillOptions {
                        include_reference: with_reference,
                        depth,
                    };
                    if exhaustive {
                        let e = enumerate_ab(&s, &a, opts)?;
                        let sum: serde_json::Map<String, serde_json::Value> = e
                            .sum_vector
                            .iter()
                            .map(|(k, v)| (k.to_string(), json!(ratio(v))))
                            .collect();
                        let summary = json!({
                            "branches": e.branches,
                            "total_probability": ratio(&e.total_probability),
                            "mean_fidelity": ratio(&e.mean_fidelity),
                            "perfect_probability": ratio(&e.perfect_mass),
                            "no_feedback_probability": ratio(&e.no_feedback_mass),
                            "sum_vector": sum,
                        });
                        emit(&[summary], Format::Json, &mut out)?;
                    } else {
                        for r in 0..runs {
                            let res = distill_ab(&s, &a, derive_seed(seed, r as u64), opts)?;
                            emit(&[res], Format::Json, &mut out)?;
                        }
                    }
                }
                Mode::Sysref => {
                    if exhaustive {
                        let e = enumerate_system_reference(&s)?;
                        let avg = e.averaged();
                        let weights: serde_json::Map<String, serde_json::Value> = avg
                            .weights
                            .iter()
                            .map(|(k, v)| (k.clone(), json!(ratio(v))))
                            .collect();
                        let summary = json!({
                            "branches": e.branches,
                            "total_probability": ratio(&e.total_probability),
                            "reverse_support": e.reverse_support,
                            "correlations": e.correlations,
                            "weights": weights,
                        });
                        emit(&[summary], Format::Json, &mut out)?;
                    } else {
                        for r in 0..runs {
                            let res = distill_system_reference(&s, derive_seed(seed, r as u64))?;
                            emit(&[res], Format::Json, &mut out)?;
                        }
                    }
                }
                Mode::Gh => {
                    if exhaustive {
                        return Err(Error::InvalidArgument(
                            "--exhaustive is not available in gh mode".into(),
                        ));
                    }
                    let n = s.n();
                    let encoding = if encoding_depth > 0 && n > 1 {
                        let spec = CircuitSpec::new(n, encoding_depth, 0.0, Boundary::Open, seed)?;
                        random_circuit(&spec)?.gates()
                    } else {
                        Vec::new()
                    };
                    let circuit: Vec<CircuitOp> =
                        s.ops().iter().cloned().map(CircuitOp::Measure).collect();
                    for r in 0..runs {
                        let res = distill_reference_qubit(
                            n,
                            &encoding,
                            &circuit,
                            derive_seed(seed, r as u64),
                        )?;
                        emit(&[res], Format::Json, &mut out)?;
                    }
                }
            }
            out.flush()?;
            Ok(true)
        }
        Command::Groups { schedule } => {
            let s = read_schedule(&schedule)?;
            let stab = build_stabilizer(&s);
            let logic = build_logical(&s);
            let mut out = output(&cli.out)?;
            writeln!(out, "[stabilizer]")?;
            for g in stab.generators() {
                writeln!(out, "{}", g.letters_string())?;
            }
            writeln!(out, "[logical]")?;
            for g in logic.generators() {
                writeln!(out, "{}", g.letters_string())?;
            }
            writeln!(out, "[logical_nontrivial_pairs]")?;
            for (x, z) in logical_pairs(&stab, &logic) {
                writeln!(out, "{} {}", x.letters_string(), z.letters_string())?;
            }
            out.flush()?;
            Ok(true)
        }
        Command::Verify {
            suite,
            n_max,
            tau_max,
            cases,
        } => {
            let suite: Suite = suite.parse()?;
            if n_max == 0 {
                return Err(Error::InvalidArgument("--n-max must be positive".into()));
            }
            let defaults = VerifyConfig::default();
            let cfg = VerifyConfig {
                n_max,
                tau_max,
                cases,
                exhaustive_n_max: defaults.exhaustive_n_max.min(n_max),
                exhaustive_tau_max: defaults.exhaustive_tau_max.min(tau_max),
                seed,
                ..defaults
            };
            let results = run_suite(suite, &cfg)?;
            let mut out = output(&cli.out)?;
            emit(&results, format.unwrap_or(Format::Json), &mut out)?;
            out.flush()?;
            let passed = results.iter().filter(|r| r.passed).count();
            eprintln!("{passed}/{} checks passed", results.len());
            Ok(passed == results.len())
        }
        Command::Sweep {
            n,
            p,
            samples,
            depth,
            boundary,
        } => {
            let cfg = SweepConfig {
                ns: n,
                ps: parse_p_grid(&p)?,
                samples,
                depth,
                boundary,
                seed,
            };
            let records = sweep_measurement_rate(&cfg)?;
            let mut out = output(&cli.out)?;
            emit(&records, format.unwrap_or(Format::Csv), &mut out)?;
            out.flush()?;
            Ok(true)
        }
        Command::Profile {
            n,
            p,
            samples,
            depth,
            boundary,
        } => {
            let spec = CircuitSpec::new(n, depth.unwrap_or(2 * n), p, boundary, seed)?;
            let profile = decoupling_profile(&spec, samples)?;
            let mut out = output(&cli.out)?;
            match format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    write_csv(&profile.rows, &mut out)?;
                    match profile.d_code_median {
                        Some(d) => eprintln!("median d_code = {d}"),
                        None => eprintln!("median d_code undefined: no logical operators"),
                    }
                }
                Format::Json => emit(&[&profile], Format::Json, &mut out)?,
            }
            out.flush()?;
            Ok(true)
        }
        Command::Fit { input, x, y, model } => {
            let points = read_columns(&input, &x, &y)?;
            let mut out = output(&cli.out)?;
            let f = format.unwrap_or(Format::Json);
            match model {
                Model::Subleading => emit(&[subleading_fit(&points)?], f, &mut out)?,
                Model::Power => emit(&[power_law_fit(&points)?], f, &mut out)?,
            }
            out.flush()?;
            Ok(true)
        }
    }
}
