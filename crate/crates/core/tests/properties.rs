use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use duality_core::coplanar::{closed_distinguishability, closed_visibility, make_config};
use duality_core::distinguishability::{knowledge_of, optimize_refined, TwoOutcomeObservable};
use duality_core::measures::{
    bayes_posteriors, fringe_visibility_check, outcome_likelihoods, predictability, visibility,
    which_way_knowledge,
};
use duality_core::qcore::{
    bloch_to_state, overlap_sq, reduced_density_report, state_to_bloch, BlochVector,
};
use duality_core::sampling::Sampler;
use proptest::prelude::*;

fn bloch() -> impl Strategy<Value = BlochVector> {
    (-1.0f64..=1.0, 0.0f64..(2.0 * PI)).prop_map(|(z, phi)| {
        let r = (1.0 - z * z).max(0.0).sqrt();
        BlochVector::new(r * phi.cos(), r * phi.sin(), z).unwrap()
    })
}

fn seed() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bloch_round_trip(v in bloch()) {
        let back = state_to_bloch(&bloch_to_state(&v)).unwrap();
        for (a, b) in v.components().iter().zip(back.components()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn overlap_from_bloch_dot(a in bloch(), b in bloch()) {
        let ov = overlap_sq(&bloch_to_state(&a), &bloch_to_state(&b)).unwrap();
        prop_assert!((ov - (1.0 + a.dot(&b)) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_density_is_a_state(s in seed(), n in 2usize..=6, d in 1usize..=4) {
        let cfg = Sampler::new(s).config(n, d, false);
        let rep = reduced_density_report(&cfg);
        prop_assert!(rep.hermitian);
        prop_assert!((rep.trace - 1.0).abs() < 1e-12);
        prop_assert!(rep.min_eigenvalue >= -1e-12);
    }

    #[test]
    fn predictability_visibility_bound(s in seed(), n in 2usize..=6, d in 1usize..=4) {
        let cfg = Sampler::new(s).config(n, d, false);
        let p = predictability(cfg.populations()).unwrap();
        let v = visibility(&cfg).unwrap();
        prop_assert!(p * p + v * v <= 1.0 + 1e-9);
    }

    #[test]
    fn unmarked_beams_saturate(s in seed(), n in 2usize..=6, d in 1usize..=4) {
        let cfg = Sampler::new(s).unmarked_config(n, d);
        let p = predictability(cfg.populations()).unwrap();
        let v = visibility(&cfg).unwrap();
        assert_abs_diff_eq!(p * p + v * v, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn knowledge_dominates_predictability(s in seed(), n in 2usize..=5, d in 2usize..=4) {
        let mut smp = Sampler::new(s);
        let cfg = smp.config(n, d, false);
        let meas = smp.measurement(d);
        let k = which_way_knowledge(&cfg, &meas).unwrap().total;
        prop_assert!(k >= predictability(cfg.populations()).unwrap() - 1e-9);
    }

    #[test]
    fn bayes_is_consistent(s in seed(), n in 2usize..=5, d in 2usize..=4) {
        let mut smp = Sampler::new(s);
        let cfg = smp.config(n, d, false);
        let meas = smp.measurement(d);
        let q = outcome_likelihoods(&cfg, &meas).unwrap();
        let sorting = bayes_posteriors(cfg.populations(), &q).unwrap();
        assert_abs_diff_eq!(sorting.outcome_probs.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        // Σ_l p_l p_{i|l} recovers ζ_i
        let mut recovered = vec![0.0; n];
        for (p, post) in sorting.outcome_probs.iter().zip(&sorting.posteriors) {
            if let Some(post) = post {
                assert_abs_diff_eq!(post.as_slice().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
                for (r, x) in recovered.iter_mut().zip(post.as_slice()) {
                    *r += p * x;
                }
            }
        }
        for (r, z) in recovered.iter().zip(cfg.populations().as_slice()) {
            prop_assert!((r - z).abs() < 1e-9);
        }
    }

    #[test]
    fn antipodal_observables_agree(s in seed(), n in 2usize..=5, beta in 0.0f64..=PI, gamma in 0.0f64..(2.0 * PI)) {
        let cfg = Sampler::new(s).config(n, 2, false);
        let obs = TwoOutcomeObservable::new(beta, gamma).unwrap();
        let a = knowledge_of(&cfg, &obs).unwrap();
        let b = knowledge_of(&cfg, &obs.antipode()).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn fringe_visibility_matches_density(s in seed(), n in 2usize..=3, d in 1usize..=3) {
        let cfg = Sampler::new(s).config(n, d, false);
        let v = visibility(&cfg).unwrap();
        prop_assert!((fringe_visibility_check(&cfg, 8).unwrap() - v).abs() < 2e-6);
    }

    #[test]
    fn coplanar_closed_forms_hold(theta in 0.0f64..=PI) {
        let (d, _) = closed_distinguishability(theta);
        let v = closed_visibility(theta);
        prop_assert!(d * d + v * v <= 1.0 + 1e-12);
        let cfg = make_config(theta).unwrap();
        prop_assert!((visibility(&cfg).unwrap() - v).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn duality_inequality(s in seed(), n in 2usize..=5, equal in any::<bool>()) {
        let cfg = Sampler::new(s).config(n, 2, equal);
        let d = optimize_refined(&cfg, 1e-12).unwrap().best_k;
        let v = visibility(&cfg).unwrap();
        prop_assert!(d * d + v * v <= 1.0 + 1e-9, "D²+V² = {}", d * d + v * v);
    }
}
