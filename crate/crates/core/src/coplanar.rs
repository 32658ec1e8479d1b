//! Closed forms for the three-beam coplanar family.
//!
//! Three equally populated beams tag a qubit detector with the Bloch vectors
//! `n0 = (0, 0, 1)` and `n± = (±sin θ, 0, cos θ)`. Along this family
//!
//! ```text
//! V(θ)  = sqrt((1 + cos θ + cos² θ) / 3)
//! K²    = 4/9 [cos² β sin²(θ/2) + 3 sin² β cos² γ cos²(θ/2)] sin²(θ/2)
//! D(θ)  = sin θ / √3          for θ < 2π/3   (σx read-out)
//!       = 2/3 sin²(θ/2)       for θ > 2π/3   (σz read-out)
//! ```
//!
//! For `θ ∈ (π/2, π)` the visibility and the distinguishability move in the
//! same direction: both fall up to `2π/3` and both rise after it.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use crate::distinguishability::{optimize_refined, TwoOutcomeObservable};
use crate::error::{DualityError, Result};
use crate::measures::visibility;
use crate::qcore::{BeamDetectorConfig, BlochVector, PopulationVector};

/// Where the optimal read-out switches from σx to σz.
pub const CROSSOVER: f64 = 2.0 * PI / 3.0;
/// Angles this close to [`CROSSOVER`] are tagged [`Branch::Crossover`].
pub const CROSSOVER_BAND: f64 = 1e-9;
pub const DEFAULT_SWEEP_STEPS: usize = 257;
/// Forward differences below this magnitude count as flat.
pub const DEAD_BAND: f64 = 1e-12;
pub const MIN_ANOMALY_ROWS: usize = 16;

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(DualityError::Validation(format!(
            "θ = {theta} outside [0, π]"
        )));
    }
    Ok(())
}

/// The detector geometry at one value of `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoplanarFamily {
    theta: f64,
}

impl CoplanarFamily {
    pub fn new(theta: f64) -> Result<Self> {
        check_theta(theta)?;
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `[n0, n+, n-]`.
    pub fn bloch_vectors(&self) -> [BlochVector; 3] {
        let (s, c) = self.theta.sin_cos();
        [
            BlochVector::from_angles(0.0, 0.0),
            unit(s, 0.0, c),
            unit(-s, 0.0, c),
        ]
    }
}

fn unit(x: f64, y: f64, z: f64) -> BlochVector {
    BlochVector::new(x, y, z).expect("sin/cos pair is a unit vector")
}

/// Three equally populated beams carrying the family's detector states.
pub fn make_config(theta: f64) -> Result<BeamDetectorConfig> {
    let family = CoplanarFamily::new(theta)?;
    BeamDetectorConfig::from_bloch(PopulationVector::uniform(3)?, &family.bloch_vectors())
}

/// Recognizes a configuration built like [`make_config`]: three equal
/// populations and Bloch vectors `n0, n+, n-` within `tolerance`.
pub fn recognize(cfg: &BeamDetectorConfig, tolerance: f64) -> Option<f64> {
    if cfg.beams() != 3 || cfg.detector_dim() != 2 {
        return None;
    }
    if cfg
        .populations()
        .as_slice()
        .iter()
        .any(|z| (z - 1.0 / 3.0).abs() > tolerance)
    {
        return None;
    }
    let vs = cfg.bloch_vectors().ok()?;
    let theta = vs[1].z().clamp(-1.0, 1.0).acos();
    let expected = CoplanarFamily::new(theta).ok()?.bloch_vectors();
    let close = vs.iter().zip(&expected).all(|(a, b)| {
        a.components()
            .iter()
            .zip(b.components())
            .all(|(x, y)| (x - y).abs() <= tolerance)
    });
    close.then_some(theta)
}

pub fn closed_visibility(theta: f64) -> f64 {
    let c = theta.cos();
    ((1.0 + c + c * c) / 3.0).sqrt()
}

pub fn closed_knowledge_sq(theta: f64, beta: f64, gamma: f64) -> f64 {
    let s2 = (theta / 2.0).sin().powi(2);
    let c2 = (theta / 2.0).cos().powi(2);
    let cb2 = beta.cos().powi(2);
    let sb2 = beta.sin().powi(2);
    let cg2 = gamma.cos().powi(2);
    4.0 / 9.0 * (cb2 * s2 + 3.0 * sb2 * cg2 * c2) * s2
}

/// Which read-out attains `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    SigmaX,
    SigmaZ,
    Crossover,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::SigmaX => "sigma_x",
            Branch::SigmaZ => "sigma_z",
            Branch::Crossover => "crossover",
        }
    }

    pub fn of(theta: f64) -> Self {
        if (theta - CROSSOVER).abs() <= CROSSOVER_BAND {
            Branch::Crossover
        } else if theta < CROSSOVER {
            Branch::SigmaX
        } else {
            Branch::SigmaZ
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Branch {
    type Err = DualityError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma_x" => Ok(Branch::SigmaX),
            "sigma_z" => Ok(Branch::SigmaZ),
            "crossover" => Ok(Branch::Crossover),
            other => Err(DualityError::Validation(format!("unknown branch `{other}`"))),
        }
    }
}

/// Piecewise `D(θ)` with the branch that attains it.
pub fn closed_distinguishability(theta: f64) -> (f64, Branch) {
    let branch = Branch::of(theta);
    let d = match branch {
        Branch::SigmaX | Branch::Crossover => theta.sin() / 3f64.sqrt(),
        Branch::SigmaZ => 2.0 / 3.0 * (theta / 2.0).sin().powi(2),
    };
    (d, branch)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalObservable {
    pub observable: TwoOutcomeObservable,
    /// Set at the crossover, where `K` is maximal on a whole family of
    /// observables; `observable` is then the `(0, 0)` representative.
    pub degenerate: bool,
}

pub fn optimal_observable(theta: f64) -> OptimalObservable {
    let (beta, degenerate) = match Branch::of(theta) {
        Branch::SigmaX => (FRAC_PI_2, false),
        Branch::SigmaZ => (0.0, false),
        Branch::Crossover => (0.0, true),
    };
    OptimalObservable {
        observable: TwoOutcomeObservable::wrapped(beta, 0.0),
        degenerate,
    }
}

/// General-path values computed alongside the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericCheck {
    pub visibility: f64,
    pub distinguishability: f64,
    pub observable: TwoOutcomeObservable,
}

impl NumericCheck {
    pub fn max_deviation(&self, row: &SweepRow) -> f64 {
        (self.visibility - row.visibility)
            .abs()
            .max((self.distinguishability - row.distinguishability).abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub visibility: f64,
    pub distinguishability: f64,
    /// `D² + V²`.
    pub sum_sq: f64,
    pub branch: Branch,
    pub beta_opt: f64,
    pub gamma_opt: f64,
    pub numeric: Option<NumericCheck>,
}

impl SweepRow {
    pub fn closed(theta: f64) -> Self {
        let visibility = closed_visibility(theta);
        let (distinguishability, branch) = closed_distinguishability(theta);
        let opt = optimal_observable(theta).observable;
        Self {
            theta,
            visibility,
            distinguishability,
            sum_sq: distinguishability * distinguishability + visibility * visibility,
            branch,
            beta_opt: opt.beta(),
            gamma_opt: opt.gamma(),
            numeric: None,
        }
    }
}

/// Tolerance handed to the refined optimizer when validating a sweep.
pub const VALIDATION_OPTIMIZER_TOL: f64 = 1e-12;

/// Uniform sweep over `[theta_min, theta_max]`, ordered by `θ`.
///
/// With `validate`, every row also carries the visibility and the optimized
/// `D` evaluated through the general beam/detector path.
pub fn sweep(theta_min: f64, theta_max: f64, steps: usize, validate: bool) -> Result<Vec<SweepRow>> {
    check_theta(theta_min)?;
    check_theta(theta_max)?;
    if !(theta_min < theta_max) {
        return Err(DualityError::Validation(format!(
            "empty sweep range [{theta_min}, {theta_max}]"
        )));
    }
    if steps < 2 {
        return Err(DualityError::Validation(format!(
            "a sweep needs at least 2 steps, got {steps}"
        )));
    }
    let span = theta_max - theta_min;
    (0..steps)
        .into_par_iter()
        .map(|k| {
            let theta = if k + 1 == steps {
                theta_max
            } else {
                theta_min + span * k as f64 / (steps - 1) as f64
            };
            let mut row = SweepRow::closed(theta);
            if validate {
                let cfg = make_config(theta)?;
                let opt = optimize_refined(&cfg, VALIDATION_OPTIMIZER_TOL)?;
                row.numeric = Some(NumericCheck {
                    visibility: visibility(&cfg)?,
                    distinguishability: opt.best_k,
                    observable: opt.best_observable,
                });
            }
            Ok(row)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoMovement {
    CoIncrease,
    CoDecrease,
}

impl CoMovement {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoMovement::CoIncrease => "co-increase",
            CoMovement::CoDecrease => "co-decrease",
        }
    }
}

/// A maximal `θ` interval on which `V` and `D` move the same way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnomalyInterval {
    pub start: f64,
    pub end: f64,
    pub kind: CoMovement,
}

impl AnomalyInterval {
    pub fn contains(&self, lo: f64, hi: f64) -> bool {
        self.start <= lo && hi <= self.end
    }
}

fn sign(delta: f64) -> i8 {
    if delta > DEAD_BAND {
        1
    } else if delta < -DEAD_BAND {
        -1
    } else {
        0
    }
}

/// Scans forward differences of `V` and `D` along a strictly increasing
/// `θ` grid and merges consecutive segments with matching nonzero signs.
pub fn detect_anomaly(rows: &[SweepRow]) -> Result<Vec<AnomalyInterval>> {
    if rows.len() < MIN_ANOMALY_ROWS {
        return Err(DualityError::Validation(format!(
            "co-movement detection needs at least {MIN_ANOMALY_ROWS} rows, got {}",
            rows.len()
        )));
    }
    if let Some(w) = rows.windows(2).find(|w| !(w[1].theta > w[0].theta)) {
        return Err(DualityError::Validation(format!(
            "θ grid is not strictly increasing at {} → {}",
            w[0].theta, w[1].theta
        )));
    }
    let mut intervals: Vec<AnomalyInterval> = Vec::new();
    let mut open: Option<AnomalyInterval> = None;
    for w in rows.windows(2) {
        let dv = sign(w[1].visibility - w[0].visibility);
        let dd = sign(w[1].distinguishability - w[0].distinguishability);
        let kind = match (dv, dd) {
            (1, 1) => Some(CoMovement::CoIncrease),
            (-1, -1) => Some(CoMovement::CoDecrease),
            _ => None,
        };
        match (open.as_mut(), kind) {
            (Some(cur), Some(k)) if cur.kind == k => cur.end = w[1].theta,
            (_, k) => {
                intervals.extend(open.take());
                open = k.map(|kind| AnomalyInterval {
                    start: w[0].theta,
                    end: w[1].theta,
                    kind,
                });
            }
        }
    }
    intervals.extend(open);
    Ok(intervals)
}
