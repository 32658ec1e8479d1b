//! Visibility, predictability and which-way knowledge.
//!
//! All three path measures share the normalized spread
//! `sqrt(n/(n-1) · Σ_i (p_i - 1/n)²)`: applied to the populations it is the
//! predictability `P`, applied to a Bayes posterior it is the partial
//! knowledge `K_l` of the sorted subensemble.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{DualityError, Result};
use crate::qcore::{reduced_beam_density, BeamDetectorConfig, PopulationVector};
use crate::tol;

/// A projective measurement on the detector: orthogonal projectors summing
/// to the identity, one per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    projectors: Vec<DMatrix<Complex64>>,
    labels: Vec<String>,
}

impl Measurement {
    pub fn new(projectors: Vec<DMatrix<Complex64>>, labels: Vec<String>) -> Result<Self> {
        if projectors.is_empty() {
            return Err(DualityError::Validation("measurement has no outcomes".into()));
        }
        if labels.len() != projectors.len() {
            return Err(DualityError::Validation(format!(
                "{} projectors but {} labels",
                projectors.len(),
                labels.len()
            )));
        }
        let d = projectors[0].nrows();
        for p in &projectors {
            if p.nrows() != d || p.ncols() != d {
                return Err(DualityError::Dimension {
                    expected: d,
                    found: p.nrows().max(p.ncols()),
                });
            }
        }
        for (l, p) in projectors.iter().enumerate() {
            let herm = max_abs(&(p - p.adjoint()));
            if herm > tol::VALIDATION {
                return Err(DualityError::Validation(format!(
                    "projector {l} is not Hermitian (deviation {herm:e})"
                )));
            }
            let idem = max_abs(&(p * p - p));
            if idem > tol::VALIDATION {
                return Err(DualityError::Validation(format!(
                    "projector {l} is not idempotent (deviation {idem:e})"
                )));
            }
            for (k, other) in projectors.iter().enumerate().skip(l + 1) {
                let overlap = max_abs(&(p * other));
                if overlap > tol::VALIDATION {
                    return Err(DualityError::Validation(format!(
                        "projectors {l} and {k} are not orthogonal (deviation {overlap:e})"
                    )));
                }
            }
        }
        let total = projectors
            .iter()
            .fold(DMatrix::<Complex64>::zeros(d, d), |acc, p| acc + p);
        let completeness = max_abs(&(total - DMatrix::<Complex64>::identity(d, d)));
        if completeness > tol::VALIDATION {
            return Err(DualityError::Validation(format!(
                "projectors do not sum to the identity (deviation {completeness:e})"
            )));
        }
        Ok(Self { projectors, labels })
    }

    /// Outcomes labelled `0, 1, ...`.
    pub fn unlabeled(projectors: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let labels = (0..projectors.len()).map(|l| l.to_string()).collect();
        Self::new(projectors, labels)
    }

    pub(crate) fn from_parts_unchecked(projectors: Vec<DMatrix<Complex64>>, labels: Vec<String>) -> Self {
        Self { projectors, labels }
    }

    pub fn outcomes(&self) -> usize {
        self.projectors.len()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].nrows()
    }

    pub fn projectors(&self) -> &[DMatrix<Complex64>] {
        &self.projectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// One sorted subensemble: the quantons for which outcome `l` was read.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedOutcome {
    pub label: String,
    pub probability: f64,
    /// `None` when the outcome never occurs (probability below
    /// [`tol::ZERO_PROBABILITY`]).
    pub posterior: Option<PopulationVector>,
    pub partial_knowledge: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeReport {
    pub outcomes: Vec<SortedOutcome>,
    /// `K(W) = Σ_l p_l K_l` over outcomes that occur.
    pub total: f64,
}

impl KnowledgeReport {
    pub fn outcome_probs(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.probability).collect()
    }

    /// Indices of outcomes dropped for having zero probability.
    pub fn dropped(&self) -> Vec<usize> {
        self.outcomes
            .iter()
            .enumerate()
            .filter(|(_, o)| o.posterior.is_none())
            .map(|(l, _)| l)
            .collect()
    }
}

/// Visibility, predictability and, once optimized, distinguishability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityReport {
    pub visibility: f64,
    pub predictability: f64,
    pub distinguishability: Option<f64>,
}

impl DualityReport {
    pub fn new(cfg: &BeamDetectorConfig) -> Result<Self> {
        Ok(Self {
            visibility: visibility(cfg)?,
            predictability: predictability(cfg.populations())?,
            distinguishability: None,
        })
    }

    pub fn with_distinguishability(self, d: f64) -> Self {
        Self {
            distinguishability: Some(d),
            ..self
        }
    }

    /// `P² + V²`.
    pub fn pv_sum_sq(&self) -> f64 {
        self.predictability.powi(2) + self.visibility.powi(2)
    }

    /// `D² + V²`, when `D` is known.
    pub fn sum_sq(&self) -> Option<f64> {
        self.distinguishability
            .map(|d| d * d + self.visibility * self.visibility)
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn require_multibeam(n: usize) -> Result<()> {
    if n < 2 {
        return Err(DualityError::Domain(format!(
            "path measures need at least two beams, got {n}"
        )));
    }
    Ok(())
}

/// Normalized spread of a probability vector around the uniform one.
fn normalized_spread(p: &[f64]) -> f64 {
    let n = p.len() as f64;
    // Shifted mean: exactly zero spread for bitwise-equal entries.
    let shift = p[0];
    let mean = shift + p.iter().map(|x| x - shift).sum::<f64>() / n;
    let ss: f64 = p.iter().map(|x| (x - mean).powi(2)).sum();
    (n / (n - 1.0) * ss).sqrt().min(1.0)
}

/// Generalized fringe visibility
/// `V = sqrt(n/(n-1) · Σ_{i≠j} |ρ'_ij|²)` of the reduced beam state.
pub fn visibility(cfg: &BeamDetectorConfig) -> Result<f64> {
    let n = cfg.beams();
    require_multibeam(n)?;
    let rho = reduced_beam_density(cfg);
    let mut off = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off += rho[(i, j)].norm_sqr();
            }
        }
    }
    let nf = n as f64;
    Ok((nf / (nf - 1.0) * off).sqrt().min(1.0))
}

/// A-priori path predictability from the populations alone.
pub fn predictability(pops: &PopulationVector) -> Result<f64> {
    require_multibeam(pops.len())?;
    Ok(normalized_spread(pops.as_slice()))
}

/// `q[i][l] = ⟨χ_i|Π_l|χ_i⟩`: the probability of outcome `l` when the quanton
/// is certainly in beam `i`. Rows are beams, columns outcomes.
pub fn outcome_likelihoods(cfg: &BeamDetectorConfig, meas: &Measurement) -> Result<DMatrix<f64>> {
    if meas.dim() != cfg.detector_dim() {
        return Err(DualityError::Dimension {
            expected: cfg.detector_dim(),
            found: meas.dim(),
        });
    }
    let states = cfg.detector_states();
    let mut q = DMatrix::zeros(states.len(), meas.outcomes());
    for (i, chi) in states.iter().enumerate() {
        for (l, p) in meas.projectors().iter().enumerate() {
            q[(i, l)] = chi.expectation(p)?.re.clamp(0.0, 1.0);
        }
    }
    Ok(q)
}

/// Outcome probabilities and Bayes posteriors for each outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesSorting {
    pub outcome_probs: Vec<f64>,
    /// `None` for outcomes whose probability is below
    /// [`tol::ZERO_PROBABILITY`].
    pub posteriors: Vec<Option<PopulationVector>>,
}

/// `p_l = Σ_i ζ_i q_{i|l}` and `p_{i|l} = ζ_i q_{i|l} / p_l`.
pub fn bayes_posteriors(pops: &PopulationVector, q: &DMatrix<f64>) -> Result<BayesSorting> {
    let zeta = pops.as_slice();
    if q.nrows() != zeta.len() {
        return Err(DualityError::Dimension {
            expected: zeta.len(),
            found: q.nrows(),
        });
    }
    let mut outcome_probs = Vec::with_capacity(q.ncols());
    let mut posteriors = Vec::with_capacity(q.ncols());
    for l in 0..q.ncols() {
        let joint: Vec<f64> = zeta.iter().enumerate().map(|(i, z)| z * q[(i, l)]).collect();
        let p: f64 = joint.iter().sum();
        outcome_probs.push(p);
        if p < tol::ZERO_PROBABILITY {
            posteriors.push(None);
        } else {
            let posterior = PopulationVector::new(joint.into_iter().map(|j| j / p).collect())?;
            posteriors.push(Some(posterior));
        }
    }
    Ok(BayesSorting {
        outcome_probs,
        posteriors,
    })
}

/// `K_l` for a posterior; the same spread as [`predictability`].
pub fn partial_knowledge(posterior: &PopulationVector) -> Result<f64> {
    require_multibeam(posterior.len())?;
    Ok(normalized_spread(posterior.as_slice()))
}

/// Which-way knowledge `K(W)` delivered by reading the detector with `meas`.
pub fn which_way_knowledge(cfg: &BeamDetectorConfig, meas: &Measurement) -> Result<KnowledgeReport> {
    require_multibeam(cfg.beams())?;
    let q = outcome_likelihoods(cfg, meas)?;
    let sorting = bayes_posteriors(cfg.populations(), &q)?;
    let mut total = 0.0;
    let mut outcomes = Vec::with_capacity(meas.outcomes());
    for ((label, p), posterior) in meas
        .labels()
        .iter()
        .zip(sorting.outcome_probs)
        .zip(sorting.posteriors)
    {
        let partial = posterior.as_ref().map(partial_knowledge).transpose()?;
        if let Some(k) = partial {
            total += p * k;
        }
        outcomes.push(SortedOutcome {
            label: label.clone(),
            probability: p,
            posterior,
            partial_knowledge: partial,
        });
    }
    Ok(KnowledgeReport {
        outcomes,
        total: total.clamp(0.0, 1.0),
    })
}

const MIN_PHASE_GRID: usize = 8;
const MAX_PHASE_POINTS: u64 = 1 << 30;

/// Visibility recomputed from the fringe pattern itself: the intensity
/// `I(φ) = Σ_ij ρ'_ij e^{i(φ_i - φ_j)}` is sampled on a uniform product grid
/// of `phase_grid_size` phases per beam (beam 0 pinned to phase 0), and the
/// result is `sqrt(n/(n-1)) · rms(I) / mean(I)`.
///
/// The reduction is chunked by the phase of beam 1 and summed in index
/// order, so the result does not depend on the thread count.
pub fn fringe_visibility_check(cfg: &BeamDetectorConfig, phase_grid_size: usize) -> Result<f64> {
    let n = cfg.beams();
    require_multibeam(n)?;
    if phase_grid_size < MIN_PHASE_GRID {
        return Err(DualityError::Domain(format!(
            "phase grid of {phase_grid_size} points is too coarse, need at least {MIN_PHASE_GRID}"
        )));
    }
    let g = phase_grid_size;
    let points = (g as u64).checked_pow((n - 1) as u32).filter(|&p| p <= MAX_PHASE_POINTS);
    let Some(points) = points else {
        return Err(DualityError::Domain(format!(
            "phase grid {g}^{} is too large to enumerate",
            n - 1
        )));
    };
    let rho = reduced_beam_density(cfg);
    let roots: Vec<Complex64> = (0..g)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / g as f64))
        .collect();
    let inner_points = points / g as u64;

    let intensity = |first: usize, rest: u64, phasors: &mut [Complex64]| -> f64 {
        phasors[0] = Complex64::new(1.0, 0.0);
        phasors[1] = roots[first];
        let mut idx = rest;
        for ph in phasors.iter_mut().skip(2) {
            *ph = roots[(idx % g as u64) as usize];
            idx /= g as u64;
        }
        let mut acc = 0.0;
        for i in 0..n {
            acc += rho[(i, i)].re;
            for j in (i + 1)..n {
                acc += 2.0 * (rho[(i, j)] * phasors[i] * phasors[j].conj()).re;
            }
        }
        acc
    };

    let chunk_sum = |f: &(dyn Fn(f64) -> f64 + Sync)| -> f64 {
        let partial: Vec<f64> = (0..g)
            .into_par_iter()
            .map(|first| {
                let mut phasors = vec![Complex64::new(0.0, 0.0); n];
                (0..inner_points)
                    .map(|rest| f(intensity(first, rest, &mut phasors)))
                    .sum()
            })
            .collect();
        partial.iter().sum()
    };

    let count = points as f64;
    let mean = chunk_sum(&|i| i) / count;
    let var = chunk_sum(&|i| (i - mean).powi(2)) / count;
    let nf = n as f64;
    Ok((nf / (nf - 1.0)).sqrt() * var.sqrt() / mean)
}
