//! Complex-vector kernel: detector states, Bloch vectors, beam populations
//! and the reduced beam density matrix left behind by the detector.
//!
//! The joint beam-detector state of a pure, fully coherent preparation is
//! rank one, so a configuration is stored as the pair (populations,
//! detector states) and never expanded into the `nd × nd` joint matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{DualityError, Result};
use crate::tol;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Inner product `⟨a|b⟩`, conjugate-linear in the first argument.
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// A normalized detector state `|χ⟩` of dimension `d ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorState {
    amplitudes: Vec<Complex64>,
}

impl DetectorState {
    /// Accepts amplitudes whose norm is 1 within the validation tolerance and
    /// renormalizes away the residual.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(DualityError::Validation(
                "detector state must have dimension at least 1".into(),
            ));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(DualityError::Validation(
                "detector state has non-finite amplitudes".into(),
            ));
        }
        let norm = inner(&amplitudes, &amplitudes).re.sqrt();
        if (norm - 1.0).abs() > tol::VALIDATION {
            return Err(DualityError::Validation(format!(
                "detector state norm is {norm}, expected 1"
            )));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = inner(&amplitudes, &amplitudes).re.sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(DualityError::Validation(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// The computational basis vector `|k⟩` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(DualityError::Dimension {
                expected: dim,
                found: k + 1,
            });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Self::new(amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &DetectorState) -> Result<Complex64> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// Expectation value `⟨χ|A|χ⟩` of a square matrix.
    pub fn expectation(&self, op: &DMatrix<Complex64>) -> Result<Complex64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(DualityError::Dimension {
                expected: self.dim(),
                found: op.nrows(),
            });
        }
        let mut acc = ZERO;
        for (r, ar) in self.amplitudes.iter().enumerate() {
            let row: Complex64 = self
                .amplitudes
                .iter()
                .enumerate()
                .map(|(c, ac)| op[(r, c)] * ac)
                .sum();
            acc += ar.conj() * row;
        }
        Ok(acc)
    }

    fn renormalized(self) -> Self {
        let norm = inner(&self.amplitudes, &self.amplitudes).re.sqrt();
        Self {
            amplitudes: self.amplitudes.into_iter().map(|a| a / norm).collect(),
        }
    }

    /// Projector `|χ⟩⟨χ|`.
    pub fn projector(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |r, c| self.amplitudes[r] * self.amplitudes[c].conj())
    }
}

fn check_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(DualityError::Dimension { expected, found });
    }
    Ok(())
}

/// A unit vector on the Bloch sphere, representing the qubit ray
/// `(1 + n·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > tol::VALIDATION {
            return Err(DualityError::Validation(format!(
                "Bloch vector ({x}, {y}, {z}) has norm {norm}, expected 1"
            )));
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// `(sin β cos γ, sin β sin γ, cos β)`.
    pub fn from_angles(polar: f64, azimuth: f64) -> Self {
        let (sb, cb) = polar.sin_cos();
        let (sg, cg) = azimuth.sin_cos();
        Self {
            x: sb * cg,
            y: sb * sg,
            z: cb,
        }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn neg(&self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// Maps a Bloch vector to the qubit state with `|χ⟩⟨χ| = (1 + n·σ)/2`.
///
/// The global phase makes the first nonzero amplitude real and
/// non-negative.
pub fn bloch_to_state(v: &BlochVector) -> DetectorState {
    let (x, y, z) = (v.x, v.y, v.z);
    // Branch on the hemisphere so the divisor stays >= 1/sqrt(2).
    let (a, b) = if z >= 0.0 {
        let a = ((1.0 + z) / 2.0).sqrt();
        (Complex64::new(a, 0.0), Complex64::new(x, y) / (2.0 * a))
    } else {
        let b = ((1.0 - z) / 2.0).sqrt();
        (Complex64::new(x, -y) / (2.0 * b), Complex64::new(b, 0.0))
    };
    let (a, b) = if a != ZERO {
        let phase = a.conj() / a.norm();
        (Complex64::new(a.norm(), 0.0), b * phase)
    } else {
        (ZERO, Complex64::new(b.norm(), 0.0))
    };
    DetectorState { amplitudes: vec![a, b] }.renormalized()
}

/// Inverse of [`bloch_to_state`] on rays.
pub fn state_to_bloch(s: &DetectorState) -> Result<BlochVector> {
    check_same_dim(2, s.dim())?;
    let (a, b) = (s.amplitudes[0], s.amplitudes[1]);
    let coherence = a.conj() * b;
    BlochVector::new(
        2.0 * coherence.re,
        2.0 * coherence.im,
        a.norm_sqr() - b.norm_sqr(),
    )
}

/// `|⟨a|b⟩|²`, clamped into `[0, 1]`.
pub fn overlap_sq(a: &DetectorState, b: &DetectorState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}

/// Gram matrix `G_ij = ⟨χ_i|χ_j⟩`.
pub fn gram_matrix(states: &[DetectorState]) -> Result<DMatrix<Complex64>> {
    let n = states.len();
    if let Some(first) = states.first() {
        for s in states {
            check_same_dim(first.dim(), s.dim())?;
        }
    }
    let mut g = DMatrix::from_element(n, n, ZERO);
    for i in 0..n {
        g[(i, i)] = Complex64::new(1.0, 0.0);
        for j in (i + 1)..n {
            let v = inner(&states[i].amplitudes, &states[j].amplitudes);
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(g)
}

/// Beam populations `ζ_i`: a probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationVector {
    zeta: Vec<f64>,
}

impl PopulationVector {
    /// Accepts entries in `[0, 1]` summing to 1 within the validation
    /// tolerance; the residual is divided out.
    pub fn new(zeta: Vec<f64>) -> Result<Self> {
        if zeta.is_empty() {
            return Err(DualityError::Validation(
                "population vector must be non-empty".into(),
            ));
        }
        for (i, &z) in zeta.iter().enumerate() {
            if !(-tol::VALIDATION..=1.0 + tol::VALIDATION).contains(&z) {
                return Err(DualityError::Validation(format!(
                    "population {i} is {z}, expected a value in [0, 1]"
                )));
            }
        }
        let total: f64 = zeta.iter().sum();
        if (total - 1.0).abs() > tol::VALIDATION {
            return Err(DualityError::Validation(format!(
                "populations sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            zeta: zeta.into_iter().map(|z| z.max(0.0) / total).collect(),
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(DualityError::Validation(
                "population vector must be non-empty".into(),
            ));
        }
        Ok(Self {
            zeta: vec![1.0 / n as f64; n],
        })
    }

    pub fn len(&self) -> usize {
        self.zeta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeta.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.zeta
    }
}

/// `n` beams with populations and the detector state each beam imprints.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamDetectorConfig {
    populations: PopulationVector,
    detector_states: Vec<DetectorState>,
}

impl BeamDetectorConfig {
    pub fn new(populations: PopulationVector, detector_states: Vec<DetectorState>) -> Result<Self> {
        if detector_states.len() != populations.len() {
            return Err(DualityError::Validation(format!(
                "{} populations but {} detector states",
                populations.len(),
                detector_states.len()
            )));
        }
        let d = detector_states[0].dim();
        for s in &detector_states {
            check_same_dim(d, s.dim())?;
        }
        Ok(Self {
            populations,
            detector_states,
        })
    }

    /// Qubit detector given by Bloch vectors.
    pub fn from_bloch(populations: PopulationVector, vectors: &[BlochVector]) -> Result<Self> {
        Self::new(populations, vectors.iter().map(bloch_to_state).collect())
    }

    pub fn beams(&self) -> usize {
        self.populations.len()
    }

    pub fn detector_dim(&self) -> usize {
        self.detector_states[0].dim()
    }

    pub fn populations(&self) -> &PopulationVector {
        &self.populations
    }

    pub fn detector_states(&self) -> &[DetectorState] {
        &self.detector_states
    }

    /// Bloch vectors of the detector states; qubit detectors only.
    pub fn bloch_vectors(&self) -> Result<Vec<BlochVector>> {
        self.detector_states.iter().map(state_to_bloch).collect()
    }
}

/// Beam density matrix after tracing out the detector:
/// `ρ'_ij = √(ζ_i ζ_j) ⟨χ_j|χ_i⟩`.
///
/// Hermitian by construction, with the populations on the diagonal.
pub fn reduced_beam_density(cfg: &BeamDetectorConfig) -> DMatrix<Complex64> {
    let n = cfg.beams();
    let zeta = cfg.populations.as_slice();
    let states = &cfg.detector_states;
    let mut rho = DMatrix::from_element(n, n, ZERO);
    for i in 0..n {
        rho[(i, i)] = Complex64::new(zeta[i], 0.0);
        for j in (i + 1)..n {
            let v = inner(&states[j].amplitudes, &states[i].amplitudes) * (zeta[i] * zeta[j]).sqrt();
            rho[(i, j)] = v;
            rho[(j, i)] = v.conj();
        }
    }
    rho
}

/// Structural checks on a density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityReport {
    /// Exact (bitwise) Hermiticity.
    pub hermitian: bool,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

pub fn density_report(rho: &DMatrix<Complex64>) -> DensityReport {
    let n = rho.nrows();
    let hermitian = (0..n).all(|i| (0..n).all(|j| rho[(i, j)] == rho[(j, i)].conj()));
    let trace = rho.trace().re;
    let min_eigenvalue = rho
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    DensityReport {
        hermitian,
        trace,
        min_eigenvalue,
    }
}

/// [`density_report`] of the [`reduced_beam_density`].
pub fn reduced_density_report(cfg: &BeamDetectorConfig) -> DensityReport {
    density_report(&reduced_beam_density(cfg))
}
