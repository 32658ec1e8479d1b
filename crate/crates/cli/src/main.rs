//! `duality`: sweeps, evaluation, optimization and property checks for
//! multibeam which-way detectors.
//!
//! Exit codes: 0 success, 1 a property or validation check failed, 2 usage
//! or input error.

mod angle;
mod config;
mod manifest;
mod output;

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use duality_core::checks;
use duality_core::coplanar::{self, Branch};
use duality_core::distinguishability::{optimize_refined, OptimizationResult};
use duality_core::measures::{which_way_knowledge, DualityReport};

use crate::angle::parse_angle;
use crate::config::{parse_config, LoadedConfig};
use crate::manifest::{manifest_path_for, RunManifest};

/// Environment variable selecting the worker-thread count.
const THREADS_ENV: &str = "DUALITY_THREADS";
const DEFAULT_TOL: f64 = 1e-12;
const SWEEP_VALIDATION_TOL: f64 = 1e-8;
const COPLANAR_MATCH_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "duality", version, about = "Visibility, predictability and distinguishability for multibeam which-way detectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the three-beam coplanar family over θ and emit CSV and/or SVG.
    Sweep {
        /// Lower end of the θ range (radians, or e.g. `pi/2`).
        #[arg(long, default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
        min: f64,
        /// Upper end of the θ range.
        #[arg(long, default_value = "pi", value_parser = parse_angle, allow_hyphen_values = true)]
        max: f64,
        /// Number of θ samples, endpoints included.
        #[arg(long, default_value_t = coplanar::DEFAULT_SWEEP_STEPS)]
        steps: usize,
        /// CSV output path; CSV goes to stdout when neither --csv nor --svg is given.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// SVG chart output path.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Manifest path (defaults to `<first output>.manifest.json`).
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Recorded in the manifest; the sweep itself is deterministic.
        #[arg(long)]
        seed: Option<u64>,
        /// Cross-check every row against the numeric optimizer.
        #[arg(long)]
        validate: bool,
    },
    /// Evaluate V, P (and D for qubit detectors) for a JSON configuration.
    Eval {
        config: PathBuf,
    },
    /// Maximize the which-way knowledge over qubit observables.
    Optimize {
        config: PathBuf,
        /// Stop when a refinement cycle improves K by less than this.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Run the randomized property suites.
    Check {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

enum Failure {
    /// A property or cross-check did not hold.
    Check(String),
    /// Bad arguments, unreadable or invalid input, unwritable output.
    Usage(String),
}

type CmdResult = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::Sweep {
            min,
            max,
            steps,
            csv,
            svg,
            manifest,
            seed,
            validate,
        } => cmd_sweep(&mut out, min, max, steps, csv, svg, manifest, seed, validate),
        Command::Eval { config } => cmd_eval(&mut out, &config),
        Command::Optimize { config, tol } => cmd_optimize(&mut out, &config, tol),
        Command::Check { seed, trials } => cmd_check(&mut out, seed, trials),
    };
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("{THREADS_ENV}={raw} is not a thread count"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn write_file(path: &Path, contents: &str) -> CmdResult {
    std::fs::write(path, contents).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: &mut impl Write, text: &str) -> CmdResult {
    out.write_all(text.as_bytes()).map_err(usage)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    out: &mut impl Write,
    min: f64,
    max: f64,
    steps: usize,
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
    manifest: Option<PathBuf>,
    seed: Option<u64>,
    validate: bool,
) -> CmdResult {
    let rows = coplanar::sweep(min, max, steps, validate).map_err(usage)?;
    let csv_text = output::sweep_csv(&rows);
    let mut written = Vec::new();
    if let Some(path) = &csv {
        write_file(path, &csv_text)?;
        written.push(path.clone());
    }
    if let Some(path) = &svg {
        write_file(path, &output::sweep_svg(&rows))?;
        written.push(path.clone());
    }
    let csv_on_stdout = written.is_empty();
    if csv_on_stdout {
        emit(out, &csv_text)?;
    } else {
        let inputs = format!("sweep min={min:e} max={max:e} steps={steps} validate={validate}");
        let manifest_path = manifest.unwrap_or_else(|| manifest_path_for(&written[0]));
        RunManifest::new(inputs.as_bytes(), seed, &written)
            .write(&manifest_path)
            .map_err(|e| usage(format!("cannot write {}: {e}", manifest_path.display())))?;
        let mut report = format!("rows={}\n", rows.len());
        for p in written.iter().chain([&manifest_path]) {
            report.push_str(&format!("wrote={}\n", p.display()));
        }
        emit(out, &report)?;
    }

    if validate {
        let worst = rows
            .iter()
            .filter_map(|r| r.numeric.map(|n| (n.max_deviation(r), r.theta)))
            .fold((0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
        let line = format!("max_closed_numeric_deviation={:e}\n", worst.0);
        if csv_on_stdout {
            eprint!("{line}");
        } else {
            emit(out, &line)?;
        }
        if worst.0 > SWEEP_VALIDATION_TOL {
            return Err(Failure::Check(format!(
                "closed forms and optimizer disagree by {} at θ={}",
                worst.0, worst.1
            )));
        }
    }
    Ok(())
}

fn load(path: &Path) -> Result<LoadedConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn kv(report: &mut String, key: &str, value: impl std::fmt::Display) {
    report.push_str(&format!("{key}={value}\n"));
}

fn cmd_eval(out: &mut impl Write, path: &Path) -> CmdResult {
    let loaded = load(path)?;
    let cfg = &loaded.config;
    let mut duality = DualityReport::new(cfg).map_err(usage)?;
    let mut report = String::new();
    kv(&mut report, "n_beams", cfg.beams());
    kv(&mut report, "detector_dim", cfg.detector_dim());
    let optimum = if cfg.detector_dim() == 2 {
        let opt = optimize_refined(cfg, DEFAULT_TOL).map_err(usage)?;
        duality = duality.with_distinguishability(opt.best_k);
        Some(opt)
    } else {
        None
    };
    kv(&mut report, "V", duality.visibility);
    kv(&mut report, "P", duality.predictability);
    kv(&mut report, "P2V2", duality.pv_sum_sq());
    if let (Some(opt), Some(sum)) = (&optimum, duality.sum_sq()) {
        kv(&mut report, "D", opt.best_k);
        kv(&mut report, "beta", opt.best_observable.beta());
        kv(&mut report, "gamma", opt.best_observable.gamma());
        kv(&mut report, "D2V2", sum);
    }
    if let Some(m) = &loaded.measurement {
        let k = which_way_knowledge(cfg, &m.measurement()).map_err(usage)?;
        kv(&mut report, "K", k.total);
        for o in &k.outcomes {
            kv(&mut report, &format!("p_{}", o.label), o.probability);
            match o.partial_knowledge {
                Some(kl) => kv(&mut report, &format!("K_{}", o.label), kl),
                None => kv(&mut report, &format!("K_{}", o.label), "undefined"),
            }
        }
    }
    emit(out, &report)
}

fn numeric_branch(opt: &OptimizationResult) -> Option<Branch> {
    let obs = opt.best_observable;
    if obs.beta().cos().abs() > 1.0 - 1e-6 {
        Some(Branch::SigmaZ)
    } else if obs.beta().cos().abs() < 1e-3 && obs.gamma().sin().abs() < 1e-3 {
        Some(Branch::SigmaX)
    } else {
        None
    }
}

fn cmd_optimize(out: &mut impl Write, path: &Path, tol: f64) -> CmdResult {
    let loaded = load(path)?;
    let cfg = &loaded.config;
    if cfg.detector_dim() != 2 {
        return Err(usage(format!(
            "optimization is only available for two-dimensional detectors; this detector has dimension {} (use `eval` with explicit projectors instead)",
            cfg.detector_dim()
        )));
    }
    let opt = optimize_refined(cfg, tol).map_err(usage)?;
    let mut report = String::new();
    kv(&mut report, "best_K", opt.best_k);
    kv(&mut report, "beta", opt.best_observable.beta());
    kv(&mut report, "gamma", opt.best_observable.gamma());
    kv(&mut report, "tie_set_size", opt.tie_set.len());
    kv(&mut report, "cycles", opt.cycles);
    kv(&mut report, "converged", opt.converged);
    if let Some(theta) = coplanar::recognize(cfg, COPLANAR_MATCH_TOL) {
        let (closed_d, branch) = coplanar::closed_distinguishability(theta);
        let numeric = numeric_branch(&opt);
        let matches = match branch {
            Branch::Crossover => (opt.best_k - closed_d).abs() < SWEEP_VALIDATION_TOL,
            b => numeric == Some(b) && (opt.best_k - closed_d).abs() < SWEEP_VALIDATION_TOL,
        };
        kv(&mut report, "coplanar_theta", theta);
        kv(&mut report, "coplanar_theta_over_pi", theta / PI);
        kv(&mut report, "closed_D", closed_d);
        kv(&mut report, "closed_branch", branch);
        kv(
            &mut report,
            "numeric_branch",
            numeric.map(|b| b.as_str()).unwrap_or("other"),
        );
        kv(&mut report, "branch_match", matches);
    }
    emit(out, &report)
}

fn cmd_check(out: &mut impl Write, seed: u64, trials: usize) -> CmdResult {
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let outcomes = checks::run_all(seed, trials).map_err(usage)?;
    let mut report = String::new();
    let mut failures = Vec::new();
    for o in &outcomes {
        report.push_str(&format!(
            "property={} trials={} passed={} status={}\n",
            o.name,
            o.trials,
            o.passed,
            if o.ok() { "pass" } else { "FAIL" }
        ));
        if let Some(f) = &o.failure {
            report.push_str(&format!("failure[{}]={f}\n", o.name));
            failures.push(o.name);
        }
    }
    let passed = outcomes.len() - failures.len();
    report.push_str(&format!("summary={passed}/{} properties passed\n", outcomes.len()));
    emit(out, &report)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("failing properties: {}", failures.join(", "))))
    }
}
