//! Randomized property suites over seeded configurations.
//!
//! Every property is a theorem about the measures, so any failure points at
//! an implementation defect. Each property draws from its own generator
//! derived from the run seed; results do not depend on scheduling.

use rayon::prelude::*;

use crate::coplanar::{closed_distinguishability, closed_knowledge_sq, closed_visibility, make_config};
use crate::distinguishability::{knowledge_of, optimize_refined};
use crate::error::{DualityError, Result};
use crate::measures::{fringe_visibility_check, predictability, visibility, which_way_knowledge};
use crate::qcore::{
    bloch_to_state, overlap_sq, reduced_density_report, state_to_bloch, BeamDetectorConfig,
};
use crate::sampling::Sampler;

pub const INEQUALITY_SLACK: f64 = 1e-9;
pub const CLOSED_FORM_D_TOL: f64 = 1e-8;
pub const FRINGE_TOL: f64 = 2e-6;
const CHECK_FRINGE_GRID: usize = 8;
const CHECK_OPTIMIZER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub trials: usize,
    pub passed: usize,
    /// First failing input, with enough detail to reproduce it.
    pub failure: Option<String>,
}

impl PropertyOutcome {
    pub fn ok(&self) -> bool {
        self.failure.is_none() && self.passed == self.trials
    }
}

type Trial = fn(&mut Sampler) -> Result<std::result::Result<(), String>>;

/// Names and trial bodies, in reporting order.
pub const PROPERTIES: &[(&str, Trial)] = &[
    ("bloch_round_trip", bloch_round_trip),
    ("bloch_overlap", bloch_overlap),
    ("reduced_density_valid", reduced_density_valid),
    ("pv_inequality", pv_inequality),
    ("pure_beam_equality", pure_beam_equality),
    ("knowledge_dominates_predictability", knowledge_dominates_predictability),
    ("bayes_consistency", bayes_consistency),
    ("dv_inequality_equal_populations", dv_inequality_equal),
    ("dv_inequality_unequal_populations", dv_inequality_unequal),
    ("antipodal_symmetry", antipodal_symmetry),
    ("closed_form_agreement", closed_form_agreement),
    ("fringe_visibility", fringe_visibility),
];

fn property_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs one property for `trials` draws, stopping at the first failure.
pub fn run_property(index: usize, seed: u64, trials: usize) -> Result<PropertyOutcome> {
    let (name, trial) = PROPERTIES[index];
    let mut sampler = Sampler::new(property_seed(seed, index));
    let mut passed = 0;
    for t in 0..trials {
        if let Err(detail) = trial(&mut sampler)? {
            return Ok(PropertyOutcome {
                name,
                trials,
                passed,
                failure: Some(format!("seed={seed} trial={t}: {detail}")),
            });
        }
        passed += 1;
    }
    Ok(PropertyOutcome {
        name,
        trials,
        passed,
        failure: None,
    })
}

pub fn run_all(seed: u64, trials: usize) -> Result<Vec<PropertyOutcome>> {
    if trials == 0 {
        return Err(DualityError::Validation("at least one trial is required".into()));
    }
    (0..PROPERTIES.len())
        .into_par_iter()
        .map(|i| run_property(i, seed, trials))
        .collect()
}

fn describe(cfg: &BeamDetectorConfig) -> String {
    let states: Vec<Vec<(f64, f64)>> = cfg
        .detector_states()
        .iter()
        .map(|s| s.amplitudes().iter().map(|a| (a.re, a.im)).collect())
        .collect();
    format!("populations={:?} states={:?}", cfg.populations().as_slice(), states)
}

fn expect(cond: bool, detail: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(detail())
    }
}

fn bloch_round_trip(s: &mut Sampler) -> Result<std::result::Result<(), String>> {
    let v = s.bloch();
    let back = state_to_bloch(&bloch_to_state(&v))?;
    let err = v
        .components()
        .iter()
        .zip(back.components())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if err > 1e-12 {
        return Ok(Err(format!("bloch {:?} came back as {:?}", v.components(), back.components())));
    }
    let st = s.state(2);
    let ray = overlap_sq(&st, &bloch_to_state(&state_to_bloch(&st)?))?;
    Ok(expect((ray - 1.0).abs() <= 1e-12, || {
        format!("state {:?} lost its ray: overlap {ray}", st.amplitudes())
    }))
}

fn bloch_overlap(s: &mut Sampler) -> Result<std::result::Result<(), String>> {
    let (u, v) = (s.bloch(), s.bloch());
    let lhs = overlap_sq(&bloch_to_state(&u), &bloch_to_state(&v))?;
    let rhs = (1.0 + u.dot(&v)) / 2.0;
    Ok(expect((lhs - rhs).abs() <= 1e-12, || {
        format!("u={:?} v={:?}: overlap {lhs} vs {rhs}", u.components(), v.components())
    }))
}

fn random_config(s: &mut Sampler) -> BeamDetectorConfig {
    let n = s.int(2, 5);
    let d = s.int(2, 3);
    s.config(n, d, false)
}

fn reduced_density_valid(s: &mut Sampler) -> Result<std::result::Result<(), String>> {
    let cfg = random_config(s);
    let report = reduced_density_report(&cfg);
    Ok(expect(
        report.hermitian && (report.trace - 1.0).abs() <= 1e-12 && report.min_eigenvalue >= -1e-9,
        || format!("{report:?} for {}", describe(&cfg)),
    ))
}

fn pv_inequality(s: &mut Sampler) -> Result<std::result::Result<(), String>> {
    let cfg = random_config(s);
    let v = visibility(&cfg)?;
    let p = predictability(cfg.populations())?;
    let meas = s.measurement(cfg.detector_dim());
    let k = which_way_knowledge(&cfg, &meas)?.total;
    let in_range = [v, p, k].iter().all(|x| (0.0..=1.0).contains(x));
    Ok(expect(in_range && p * p + v * v <= 1.0 + INEQUALITY_SLACK, || {
        format!("V={v} P={p} K={k} for {}", describe(&cfg))
    }))
}

fn pure_beam_equality(s: &mut Sampler) -> Result<std::result::Result<(), String>> {
    let n = s.int(2, 5);
    let d = s.int(1, 3);
    let cfg = s.unmarked_config(n, d);
    let v = visibility(&cfg)?;
    let p = predictability(cfg.populations())?;
    Ok(expect((p * p + v * v - 1.0).abs() <= INEQUALITY_SLACK, || {
        format!("P²+V²={} for {}", p * p + v * v, describe(&cfg))
    }))
}

fn knowledge_dominates_predictability(s: &mut Sampler) -> Result<std::result::Result<(), String>> {
    let cfg = random_config(s);
    let meas = s.measurement(cfg.detector_dim());
    let report = which_way_knowledge(&cfg, &meas)?;
    let p = predictability(cfg.populations())?;
    let prob_sum: f64 = report.outcome_probs().iter().sum();
    let weighted: f64 = report
        .outcomes
        .iter()
        .filter_map(|o| o.partial_knowledge.map(|k| o.probability * k))
        .sum();
    Ok(expect(
        report.total >= p - INEQUALITY_SLACK
            && (prob_sum - 1.0).abs() <= 1e-9
            && (weighted - report.total).abs() <= 1e-12,
        || format!("K={} P={p} Σp={prob_sum} for {} with {meas:?}", report.total, describe(&cfg)),
    ))
}

fn bayes_consistency(s: &mut Sampler) -> Result<std::result::Result<(), String>> {
    let cfg = random_config(s);
    let meas = s.measurement(cfg.detector_dim());
    let report = which_way_knowledge(&cfg, &meas)?;
    let zeta = cfg.populations().as_slice();
    let mut recon = vec![0.0; zeta.len()];
    for o in &report.outcomes {
        if let Some(post) = &o.posterior {
            for (r, p) in recon.iter_mut().zip(post.as_slice()) {
                *r += o.probability * p;
            }
        }
    }
    let err = recon
        .iter()
        .zip(zeta)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(expect(err <= 1e-9, || {
        format!("Σ p_l posterior_l deviates by {err} for {}", describe(&cfg))
    }))
}

fn dv_inequality(s: &mut Sampler, equal: bool) -> Result<std::result::Result<(), String>> {
    let n = s.int(2, 5);
    let cfg = s.config(n, 2, equal);
    let v = visibility(&cfg)?;
    let d = optimize_refined(&cfg, CHECK_OPTIMIZER_TOL)?.best_k;
    Ok(expect(
        (0.0..=1.0).contains(&d) && d * d + v * v <= 1.0 + INEQUALITY_SLACK,
        || format!("D={d} V={v} D²+V²={} for {}", d * d + v * v, describe(&cfg)),
    ))
}

fn dv_inequality_equal(s: &mut Sampler) -> Result<std::result::Result<(), String>> {
    dv_inequality(s, true)
}

fn dv_inequality_unequal(s: &mut Sampler) -> Result<std::result::Result<(), String>> {
    dv_inequality(s, false)
}

fn antipodal_symmetry(s: &mut Sampler) -> Result<std::result::Result<(), String>> {
    let n = s.int(2, 5);
    let cfg = s.config(n, 2, false);
    let obs = s.observable();
    let a = knowledge_of(&cfg, &obs)?;
    let b = knowledge_of(&cfg, &obs.antipode())?;
    Ok(expect((a - b).abs() <= 1e-12, || {
        format!("K={a} vs antipodal K={b} at {obs:?} for {}", describe(&cfg))
    }))
}

fn closed_form_agreement(s: &mut Sampler) -> Result<std::result::Result<(), String>> {
    let theta = s.uniform(0.0, std::f64::consts::PI);
    let obs = s.observable();
    let cfg = make_config(theta)?;
    let dv = (closed_visibility(theta) - visibility(&cfg)?).abs();
    let dk = (closed_knowledge_sq(theta, obs.beta(), obs.gamma()).sqrt() - knowledge_of(&cfg, &obs)?).abs();
    let dd = (closed_distinguishability(theta).0 - optimize_refined(&cfg, CHECK_OPTIMIZER_TOL)?.best_k).abs();
    Ok(expect(dv < 1e-12 && dk < 1e-12 && dd < CLOSED_FORM_D_TOL, || {
        format!("θ={theta} {obs:?}: |ΔV|={dv:e} |ΔK|={dk:e} |ΔD|={dd:e}")
    }))
}

fn fringe_visibility(s: &mut Sampler) -> Result<std::result::Result<(), String>> {
    let n = s.int(2, 4);
    let d = s.int(2, 3);
    let cfg = s.config(n, d, false);
    let v = visibility(&cfg)?;
    let f = fringe_visibility_check(&cfg, CHECK_FRINGE_GRID)?;
    Ok(expect((v - f).abs() <= FRINGE_TOL, || {
        format!("fringe V={f} vs algebraic V={v} for {}", describe(&cfg))
    }))
}
