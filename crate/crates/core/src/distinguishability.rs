//! Distinguishability `D = max_W K(W)` for qubit detectors.
//!
//! A non-trivial projective observable on a two-dimensional detector is fixed
//! by the unit axis `m = (sin β cos γ, sin β sin γ, cos β)` of its projectors
//! `Π± = (1 ± m·σ)/2`. The search runs over `(β, γ)`: an exhaustive grid for
//! reference, and a grid-seeded golden-section coordinate ascent.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{DualityError, Result};
use crate::measures::{which_way_knowledge, Measurement};
use crate::qcore::{BeamDetectorConfig, BlochVector};

const TAU: f64 = 2.0 * PI;

/// Observables whose `K` lies this close to the best are reported as ties.
pub const TIE_TOLERANCE: f64 = 1e-6;
/// Values this close are indistinguishable for picking the representative.
const EXACT_TIE: f64 = 1e-12;
/// Angles are compared on this quantum when ordering ties.
const ANGLE_QUANTUM: f64 = 1e-9;

pub const REFINE_SEED_RESOLUTION: usize = 64;
pub const MAX_REFINE_CYCLES: usize = 200;
const MAX_REFINE_SEEDS: usize = 8;
const SEED_MARGIN: f64 = 1e-2;
const GOLDEN_X_TOL: f64 = 1e-11;

/// Two-outcome qubit observable with projectors `(1 ± m·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoOutcomeObservable {
    beta: f64,
    gamma: f64,
}

impl TwoOutcomeObservable {
    /// `beta ∈ [0, π]`, `gamma ∈ [0, 2π)`.
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&beta) {
            return Err(DualityError::Validation(format!(
                "polar angle {beta} outside [0, π]"
            )));
        }
        if !(0.0..TAU).contains(&gamma) {
            return Err(DualityError::Validation(format!(
                "azimuth {gamma} outside [0, 2π)"
            )));
        }
        Ok(Self { beta, gamma })
    }

    /// Folds arbitrary finite angles into the canonical ranges without
    /// changing the axis `m`.
    pub fn wrapped(beta: f64, gamma: f64) -> Self {
        let mut beta = beta.rem_euclid(TAU);
        let mut gamma = gamma;
        if beta > PI {
            beta = TAU - beta;
            gamma += PI;
        }
        Self {
            beta,
            gamma: wrap_azimuth(gamma),
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn axis(&self) -> BlochVector {
        BlochVector::from_angles(self.beta, self.gamma)
    }

    /// The observable with `m → -m`: same projectors, outcomes swapped.
    pub fn antipode(&self) -> Self {
        Self::wrapped(PI - self.beta, self.gamma + PI)
    }

    fn order_key(&self) -> (i64, i64) {
        (
            (self.beta / ANGLE_QUANTUM).round() as i64,
            (self.gamma / ANGLE_QUANTUM).round() as i64,
        )
    }
}

fn wrap_azimuth(gamma: f64) -> f64 {
    let g = gamma.rem_euclid(TAU);
    if g >= TAU {
        0.0
    } else {
        g
    }
}

/// Projectors `Π± = (1 ± m·σ)/2`, labelled `+` and `-`.
pub fn observable_to_measurement(obs: &TwoOutcomeObservable) -> Measurement {
    let [x, y, z] = obs.axis().components();
    let projector = |sign: f64| {
        DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new((1.0 + sign * z) / 2.0, 0.0),
                Complex64::new(sign * x / 2.0, -sign * y / 2.0),
                Complex64::new(sign * x / 2.0, sign * y / 2.0),
                Complex64::new((1.0 - sign * z) / 2.0, 0.0),
            ],
        )
    };
    Measurement::from_parts_unchecked(
        vec![projector(1.0), projector(-1.0)],
        vec!["+".into(), "-".into()],
    )
}

fn require_qubit(cfg: &BeamDetectorConfig) -> Result<()> {
    if cfg.detector_dim() != 2 {
        return Err(DualityError::Dimension {
            expected: 2,
            found: cfg.detector_dim(),
        });
    }
    Ok(())
}

/// `K(W)` for a qubit detector read out along `obs`.
pub fn knowledge_of(cfg: &BeamDetectorConfig, obs: &TwoOutcomeObservable) -> Result<f64> {
    require_qubit(cfg)?;
    Ok(which_way_knowledge(cfg, &observable_to_measurement(obs))?.total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    Grid,
    Refined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    /// The distinguishability estimate.
    pub best_k: f64,
    /// Lexicographically smallest `(β, γ)` among exact ties.
    pub best_observable: TwoOutcomeObservable,
    pub method: SearchMethod,
    pub grid_resolution: usize,
    /// Observables within [`TIE_TOLERANCE`] of `best_k`, in `(β, γ)` order.
    pub tie_set: Vec<TwoOutcomeObservable>,
    /// Golden-section cycles run (zero for a pure grid scan).
    pub cycles: usize,
    /// False if the refinement hit [`MAX_REFINE_CYCLES`].
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    obs: TwoOutcomeObservable,
    k: f64,
}

fn grid_point(resolution: usize, row: usize, col: usize) -> TwoOutcomeObservable {
    TwoOutcomeObservable {
        beta: PI * row as f64 / (resolution - 1) as f64,
        gamma: TAU * col as f64 / resolution as f64,
    }
}

/// `K` on the `resolution × resolution` lattice, rows `β`, columns `γ`.
fn scan(cfg: &BeamDetectorConfig, resolution: usize) -> Result<Vec<Vec<f64>>> {
    (0..resolution)
        .into_par_iter()
        .map(|row| {
            (0..resolution)
                .map(|col| knowledge_of(cfg, &grid_point(resolution, row, col)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect()
}

fn summarize(
    candidates: &[Candidate],
    method: SearchMethod,
    grid_resolution: usize,
    cycles: usize,
    converged: bool,
) -> OptimizationResult {
    let best_k = candidates
        .iter()
        .map(|c| c.k)
        .fold(f64::NEG_INFINITY, f64::max);
    let best_observable = candidates
        .iter()
        .filter(|c| c.k >= best_k - EXACT_TIE)
        .map(|c| c.obs)
        .min_by_key(|o| o.order_key())
        .expect("at least one candidate");
    let mut tie_set: Vec<TwoOutcomeObservable> = candidates
        .iter()
        .filter(|c| c.k >= best_k - TIE_TOLERANCE)
        .map(|c| c.obs)
        .collect();
    tie_set.sort_by_key(|o| o.order_key());
    tie_set.dedup_by_key(|o| o.order_key());
    OptimizationResult {
        best_k,
        best_observable,
        method,
        grid_resolution,
        tie_set,
        cycles,
        converged,
    }
}

/// Exhaustive scan: `resolution` polar angles spanning `[0, π]` inclusive,
/// `resolution` azimuths spanning `[0, 2π)`.
pub fn optimize_grid(cfg: &BeamDetectorConfig, resolution: usize) -> Result<OptimizationResult> {
    require_qubit(cfg)?;
    if resolution < 16 {
        return Err(DualityError::Domain(format!(
            "grid resolution {resolution} below the minimum of 16"
        )));
    }
    let values = scan(cfg, resolution)?;
    let candidates: Vec<Candidate> = values
        .iter()
        .enumerate()
        .flat_map(|(row, ks)| {
            ks.iter().enumerate().map(move |(col, &k)| Candidate {
                obs: grid_point(resolution, row, col),
                k,
            })
        })
        .collect();
    Ok(summarize(&candidates, SearchMethod::Grid, resolution, 0, true))
}

/// Maximizes a unimodal function on `[lo, hi]`.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > GOLDEN_X_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    // Endpoints matter when the maximum sits on the boundary of [0, π].
    [(x1, f1), (x2, f2), (lo, f(lo)), (hi, f(hi))]
        .into_iter()
        .fold((x1, f1), |best, cur| if cur.1 > best.1 { cur } else { best })
}

/// Alternating golden-section ascent on `β` then `γ`, each within one seed
/// grid step of the current point.
fn refine_from(
    cfg: &BeamDetectorConfig,
    seed: Candidate,
    step_beta: f64,
    step_gamma: f64,
    tol: f64,
) -> Result<(Candidate, usize, bool)> {
    // The qubit check already passed; evaluation cannot fail past this point.
    let k = |beta: f64, gamma: f64| knowledge_of(cfg, &TwoOutcomeObservable::wrapped(beta, gamma)).unwrap_or(f64::NEG_INFINITY);
    let (mut beta, mut gamma, mut best) = (seed.obs.beta, seed.obs.gamma, seed.k);
    let mut cycles = 0;
    let mut converged = false;
    while cycles < MAX_REFINE_CYCLES {
        cycles += 1;
        let start = best;
        let (b, kb) = golden_max(
            |b| k(b, gamma),
            (beta - step_beta).max(0.0),
            (beta + step_beta).min(PI),
        );
        if kb > best {
            beta = b;
            best = kb;
        }
        let (g, kg) = golden_max(|g| k(beta, g), gamma - step_gamma, gamma + step_gamma);
        if kg > best {
            gamma = wrap_azimuth(g);
            best = kg;
        }
        if best - start < tol {
            converged = true;
            break;
        }
    }
    let obs = TwoOutcomeObservable::wrapped(beta, gamma);
    Ok((Candidate { obs, k: best }, cycles, converged))
}

/// Grid seed at resolution 64, then golden-section refinement of the most
/// promising local maxima until a cycle improves `K` by less than `tol`.
pub fn optimize_refined(cfg: &BeamDetectorConfig, tol: f64) -> Result<OptimizationResult> {
    require_qubit(cfg)?;
    if !(tol >= 1e-12) {
        return Err(DualityError::Domain(format!(
            "refinement tolerance {tol} below 1e-12"
        )));
    }
    let res = REFINE_SEED_RESOLUTION;
    let values = scan(cfg, res)?;

    let mut grid = Vec::with_capacity(res * res);
    let mut seeds = Vec::new();
    for row in 0..res {
        for col in 0..res {
            let k = values[row][col];
            let cand = Candidate {
                obs: grid_point(res, row, col),
                k,
            };
            grid.push(cand);
            let is_local_max = (-1i64..=1).all(|dr| {
                (-1i64..=1).all(|dc| {
                    let r = row as i64 + dr;
                    if r < 0 || r >= res as i64 {
                        return true;
                    }
                    let c = (col as i64 + dc).rem_euclid(res as i64) as usize;
                    values[r as usize][c] <= k
                })
            });
            if is_local_max {
                seeds.push(cand);
            }
        }
    }
    let top = seeds.iter().map(|c| c.k).fold(f64::NEG_INFINITY, f64::max);
    // Stable sort keeps grid order among equal values.
    seeds.sort_by(|a, b| b.k.total_cmp(&a.k));
    seeds.retain(|c| c.k >= top - SEED_MARGIN);
    seeds.truncate(MAX_REFINE_SEEDS);

    let step_beta = PI / (res - 1) as f64;
    let step_gamma = TAU / res as f64;
    let mut cycles = 0;
    let mut converged = true;
    let mut candidates = grid;
    for seed in seeds {
        let (cand, c, ok) = refine_from(cfg, seed, step_beta, step_gamma, tol)?;
        cycles += c;
        converged &= ok;
        candidates.push(cand);
    }
    Ok(summarize(
        &candidates,
        SearchMethod::Refined,
        res,
        cycles,
        converged,
    ))
}
