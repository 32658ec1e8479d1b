//! Seeded random configurations for the property suites.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::distinguishability::TwoOutcomeObservable;
use crate::measures::Measurement;
use crate::qcore::{BeamDetectorConfig, BlochVector, DetectorState, PopulationVector};

const TAU: f64 = 2.0 * std::f64::consts::PI;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn int(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.random_range(lo..=hi_inclusive)
    }

    fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    fn complex_gaussian(&mut self) -> Complex64 {
        Complex64::new(self.gaussian(), self.gaussian())
    }

    /// Uniform on the sphere.
    pub fn bloch(&mut self) -> BlochVector {
        loop {
            let v = [self.gaussian(), self.gaussian(), self.gaussian()];
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if norm > 1e-6 {
                return BlochVector::new(v[0] / norm, v[1] / norm, v[2] / norm)
                    .expect("normalized");
            }
        }
    }

    /// Haar-random pure state of dimension `dim`.
    pub fn state(&mut self, dim: usize) -> DetectorState {
        loop {
            let amps: Vec<Complex64> = (0..dim).map(|_| self.complex_gaussian()).collect();
            if let Ok(s) = DetectorState::normalized(amps) {
                return s;
            }
        }
    }

    /// Uniform on the simplex.
    pub fn simplex(&mut self, n: usize) -> PopulationVector {
        let w: Vec<f64> = (0..n).map(|_| self.rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = w.iter().sum();
        PopulationVector::new(w.into_iter().map(|x| x / total).collect()).expect("normalized")
    }

    pub fn config(&mut self, n: usize, dim: usize, equal_populations: bool) -> BeamDetectorConfig {
        let pops = if equal_populations {
            PopulationVector::uniform(n).expect("n >= 1")
        } else {
            self.simplex(n)
        };
        let states = (0..n).map(|_| self.state(dim)).collect();
        BeamDetectorConfig::new(pops, states).expect("consistent dimensions")
    }

    /// Identical detector states: no which-way marking at all.
    pub fn unmarked_config(&mut self, n: usize, dim: usize) -> BeamDetectorConfig {
        let pops = self.simplex(n);
        let s = self.state(dim);
        BeamDetectorConfig::new(pops, vec![s; n]).expect("consistent dimensions")
    }

    /// A random projective measurement with between 2 and `dim` outcomes
    /// (one outcome when `dim == 1`).
    pub fn measurement(&mut self, dim: usize) -> Measurement {
        let basis = self.unitary_columns(dim);
        let outcomes = if dim < 2 { 1 } else { self.int(2, dim) };
        // every outcome gets at least one basis vector
        let mut owner: Vec<usize> = (0..outcomes).collect();
        owner.extend((outcomes..dim).map(|_| self.int(0, outcomes - 1)));
        owner.shuffle(&mut self.rng);
        let mut projectors = vec![DMatrix::<Complex64>::zeros(dim, dim); outcomes];
        for (v, &l) in basis.iter().zip(&owner) {
            projectors[l] += DMatrix::from_fn(dim, dim, |r, c| v[r] * v[c].conj());
        }
        Measurement::unlabeled(projectors).expect("orthonormal basis yields valid projectors")
    }

    fn unitary_columns(&mut self, dim: usize) -> Vec<Vec<Complex64>> {
        loop {
            let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
            let mut ok = true;
            for _ in 0..dim {
                let mut v: Vec<Complex64> = (0..dim).map(|_| self.complex_gaussian()).collect();
                // two Gram-Schmidt passes keep the basis orthonormal to rounding
                for _ in 0..2 {
                    for u in &basis {
                        let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                        for (x, y) in v.iter_mut().zip(u) {
                            *x -= proj * y;
                        }
                    }
                }
                let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                if norm < 1e-6 {
                    ok = false;
                    break;
                }
                basis.push(v.into_iter().map(|x| x / norm).collect());
            }
            if ok {
                return basis;
            }
        }
    }

    pub fn observable(&mut self) -> TwoOutcomeObservable {
        let beta = self.uniform(0.0, std::f64::consts::PI);
        let gamma = self.uniform(0.0, TAU);
        TwoOutcomeObservable::wrapped(beta, gamma)
    }
}
