//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line; the
//! test fails if any criterion does.
//!
//! ```text
//! cargo test -p duality-cli --test acceptance -- --nocapture
//! ```

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use duality_core::checks::{run_property, PROPERTIES};
use duality_core::coplanar::{
    closed_distinguishability, closed_knowledge_sq, closed_visibility, detect_anomaly, make_config,
    sweep, CoMovement, SweepRow, CROSSOVER,
};
use duality_core::distinguishability::{knowledge_of, optimize_refined, TwoOutcomeObservable};
use duality_core::measures::{fringe_visibility_check, visibility};
use duality_core::sampling::Sampler;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{name}={got}, expected {want} ± {tol:e}"))
}

fn landmarks() -> Outcome {
    let start = Instant::now();
    let rows = sweep(0.0, PI, 257, true).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("sweep took {elapsed:?}"))?;

    let tol = 1e-8;
    let expect = [
        (0.0, Some(1.0), Some(0.0), None),
        (CROSSOVER, Some(0.5), Some(0.5), Some(0.5)),
        (PI, Some(1.0 / 3f64.sqrt()), Some(2.0 / 3.0), Some(7.0 / 9.0)),
        (FRAC_PI_2, None, Some(1.0 / 3f64.sqrt()), None),
    ];
    for (theta, v, d, s) in expect {
        // 2π/3 is not a grid point of the 257-point sweep
        let row = SweepRow::closed(theta);
        let cfg = make_config(theta).map_err(|e| e.to_string())?;
        let numeric_v = visibility(&cfg).map_err(|e| e.to_string())?;
        let numeric_d = optimize_refined(&cfg, 1e-12).map_err(|e| e.to_string())?.best_k;
        if let Some(v) = v {
            close("V", row.visibility, v, tol)?;
            close("numeric V", numeric_v, v, tol)?;
        }
        if let Some(d) = d {
            close("D", row.distinguishability, d, tol)?;
            close("numeric D", numeric_d, d, tol)?;
        }
        if let Some(s) = s {
            close("D²+V²", row.sum_sq, s, tol)?;
            close("numeric D²+V²", numeric_d.powi(2) + numeric_v.powi(2), s, tol)?;
        }
    }
    let worst = rows
        .iter()
        .filter_map(|r| r.numeric.map(|n| n.max_deviation(r)))
        .fold(0.0, f64::max);
    ensure(worst <= tol, || format!("closed/numeric deviation {worst:e}"))?;
    Ok(format!("257-point sweep in {elapsed:.2?}, max closed/numeric deviation {worst:.1e}"))
}

fn branches() -> Outcome {
    for k in 0..16 {
        let below = CROSSOVER * (k as f64 + 0.5) / 16.0;
        let above = CROSSOVER + (PI - CROSSOVER) * (k as f64 + 0.5) / 16.0;
        for (theta, want_x) in [(below, true), (above, false)] {
            let cfg = make_config(theta).map_err(|e| e.to_string())?;
            let opt = optimize_refined(&cfg, 1e-12).map_err(|e| e.to_string())?;
            let (beta, gamma) = (opt.best_observable.beta(), opt.best_observable.gamma());
            if want_x {
                ensure((beta - FRAC_PI_2).abs() < 1e-4 && gamma.sin().abs() < 1e-4, || {
                    format!("θ={theta}: expected σx, got β={beta} γ={gamma}")
                })?;
            } else {
                ensure(beta.min(PI - beta) < 1e-4, || {
                    format!("θ={theta}: expected σz, got β={beta}")
                })?;
            }
        }
    }
    let lo = closed_distinguishability(CROSSOVER - 1e-10).0;
    let hi = closed_distinguishability(CROSSOVER + 1e-10).0;
    close("D jump at crossover", hi - lo, 0.0, 1e-9)?;
    Ok("σx below the crossover, σz above, D continuous".into())
}

fn anomaly() -> Outcome {
    let rows = sweep(0.0, PI, 257, false).map_err(|e| e.to_string())?;
    let intervals = detect_anomaly(&rows).map_err(|e| e.to_string())?;
    let has = |kind: CoMovement, lo: f64, hi: f64| intervals.iter().any(|i| i.kind == kind && i.contains(lo, hi));
    ensure(has(CoMovement::CoDecrease, FRAC_PI_2 + 0.02, CROSSOVER - 0.02), || {
        format!("no co-decrease interval in {intervals:?}")
    })?;
    ensure(has(CoMovement::CoIncrease, CROSSOVER + 0.02, PI - 0.02), || {
        format!("no co-increase interval in {intervals:?}")
    })?;
    Ok(format!("{} co-movement interval(s)", intervals.len()))
}

fn inequalities() -> Outcome {
    let wanted = [
        "dv_inequality_equal_populations",
        "dv_inequality_unequal_populations",
        "pv_inequality",
        "pure_beam_equality",
        "knowledge_dominates_predictability",
        "bayes_consistency",
    ];
    let start = Instant::now();
    for name in wanted {
        let index = PROPERTIES
            .iter()
            .position(|(n, _)| *n == name)
            .ok_or_else(|| format!("unknown property {name}"))?;
        let o = run_property(index, 42, 1000).map_err(|e| e.to_string())?;
        ensure(o.ok() && o.passed == 1000, || {
            format!("{name}: {}/{} ({:?})", o.passed, o.trials, o.failure)
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("suite took {elapsed:?}"))?;
    Ok(format!("6 properties × 1000 trials in {elapsed:.2?}"))
}

fn non_saturation() -> Outcome {
    let steps = 10_000;
    let mut worst = 0.0f64;
    for k in 0..=steps {
        let theta = 0.05 + (PI - 0.05) * k as f64 / steps as f64;
        let sum = closed_visibility(theta).powi(2) + closed_distinguishability(theta).0.powi(2);
        worst = worst.max(sum);
    }
    ensure(worst < 1.0 - 1e-6, || format!("max D²+V² = {worst}"))?;
    Ok(format!("max D²+V² on [0.05, π] is {worst:.6}"))
}

fn oracle_equivalence() -> Outcome {
    let mut worst_k = 0.0f64;
    for i in 0..32 {
        let theta = PI * i as f64 / 31.0;
        let cfg = make_config(theta).map_err(|e| e.to_string())?;
        for j in 0..32 {
            let beta = PI * j as f64 / 31.0;
            for l in 0..32 {
                let gamma = 2.0 * PI * l as f64 / 32.0;
                let obs = TwoOutcomeObservable::new(beta, gamma).map_err(|e| e.to_string())?;
                let general = knowledge_of(&cfg, &obs).map_err(|e| e.to_string())?;
                worst_k = worst_k.max((general.powi(2) - closed_knowledge_sq(theta, beta, gamma)).abs());
            }
        }
    }
    ensure(worst_k <= 1e-12, || format!("knowledge lattice deviation {worst_k:e}"))?;

    let mut s = Sampler::new(64);
    let mut worst_v = 0.0f64;
    for _ in 0..64 {
        let theta = s.uniform(0.0, PI);
        let cfg = make_config(theta).map_err(|e| e.to_string())?;
        let v = visibility(&cfg).map_err(|e| e.to_string())?;
        worst_v = worst_v.max((v - closed_visibility(theta)).abs());
    }
    ensure(worst_v <= 1e-12, || format!("visibility deviation {worst_v:e}"))?;

    let mut worst_f = 0.0f64;
    for _ in 0..4 {
        let cfg = s.config(3, 2, false);
        let v = visibility(&cfg).map_err(|e| e.to_string())?;
        let f = fringe_visibility_check(&cfg, 32).map_err(|e| e.to_string())?;
        worst_f = worst_f.max((f - v).abs());
    }
    ensure(worst_f <= 2e-6, || format!("fringe deviation {worst_f:e}"))?;
    Ok(format!("K² {worst_k:.1e}, V {worst_v:.1e}, fringe {worst_f:.1e}"))
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_duality"))
            .args(["sweep", "--min", "0", "--max", "pi", "--steps", "257", "--seed", "7", "--csv"])
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("sweep exited with {status}"))?;
        std::fs::read(&path).map_err(|e| e.to_string())
    };
    let (a, b) = (run("a.csv")?, run("b.csv")?);
    ensure(a == b, || "sweep CSVs differ".into())?;

    let out = Command::new(env!("CARGO_BIN_EXE_duality"))
        .args(["check", "--seed", "42", "--trials", "1000"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("check exited with {}: {}", out.status, String::from_utf8_lossy(&out.stdout))
    })?;
    Ok(format!("identical {}-byte CSVs, check exit 0", a.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 7] = [
        ("landmark values", landmarks),
        ("branch structure", branches),
        ("anomaly intervals", anomaly),
        ("inequality suite", inequalities),
        ("non-saturation", non_saturation),
        ("oracle equivalence", oracle_equivalence),
        ("cli determinism", cli_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                println!("criterion {} {name}: FAIL ({why})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
