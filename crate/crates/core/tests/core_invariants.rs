//! Invariants of the analytic core, Jordan products and the lemma engine.

use locspec::lemma::affine::AffineComboResult;
use locspec::lemma::{affine_combo_recover, proportionality_test, ProportionalityResult};
use locspec::linalg::{image_basis, kernel_basis};
use locspec::local::{local_spectrum, Tolerances};
use locspec::sample::Sampler;
use locspec::spectral::{analytic_core, core_chain_certificate, jordan_product, rank_one};
use locspec::{Error, GaussianRational, Matrix};
use proptest::prelude::*;

/// Mixed operator families in dimensions 2–6 from a seed.
fn operator() -> impl Strategy<Value = Matrix> {
    (2usize..=6, any::<u64>()).prop_map(|(n, seed)| Sampler::new(seed).mixed_operator(n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn core_is_range_of_nth_power(t in operator()) {
        // Independent of the iterated chain: K(T) = R(Tⁿ).
        let n = t.dim();
        prop_assert_eq!(analytic_core(&t), image_basis(&t.pow(n as u32)));
    }

    #[test]
    fn core_inside_range_and_invariant(t in operator()) {
        let core = analytic_core(&t);
        prop_assert!(core.is_subspace_of(&image_basis(&t)).unwrap());
        prop_assert_eq!(core.image_under(&t).unwrap(), core);
    }

    #[test]
    fn core_ignores_nonzero_scaling(t in operator(), seed in any::<u64>()) {
        let c = Sampler::new(seed).nonzero_scalar();
        prop_assert_eq!(analytic_core(&t.scale(&c)), analytic_core(&t));
    }

    #[test]
    fn nilpotent_core_is_trivial(n in 1usize..=6, seed in any::<u64>(), conj in any::<bool>()) {
        let t = Sampler::new(seed).nilpotent(n, conj);
        prop_assert!(analytic_core(&t).is_zero());
    }

    #[test]
    fn eigenspaces_of_nonzero_eigenvalues_in_core(seed in any::<u64>()) {
        let mut rng = Sampler::new(seed);
        let lambda = rng.nonzero_scalar();
        let blocks = [(lambda.clone(), rng.usize_in(1, 2)), (GaussianRational::from_int(0), rng.usize_in(1, 3))];
        let (t, _) = rng.planted(&blocks);
        let eigenspace = kernel_basis(&t.shift(&lambda));
        prop_assert!(!eigenspace.is_zero());
        prop_assert!(eigenspace.is_subspace_of(&analytic_core(&t)).unwrap());
    }

    #[test]
    fn chain_certificates_for_core_vectors(t in operator(), seed in any::<u64>()) {
        let core = analytic_core(&t);
        let mut rng = Sampler::new(seed);
        let x = core
            .basis()
            .iter()
            .fold(locspec::Vector::zeros(t.dim()), |acc, b| &acc + &b.scale(&rng.scalar()));
        match core_chain_certificate(&t, &x, 6) {
            Ok(cert) => {
                prop_assert_eq!(cert.chain.len(), 7);
                cert.verify().unwrap();
            }
            Err(e) => prop_assert_eq!(e, Error::ZeroVector),
        }
    }

    #[test]
    fn jordan_products_with_rank_one_have_small_cores(n in 3usize..=6, seed in any::<u64>()) {
        let mut rng = Sampler::new(seed);
        let a = rng.rank_exactly(n, 1);
        let t = rng.mixed_operator(n);
        prop_assert!(analytic_core(&jordan_product(&t, &a).unwrap()).dim() <= 2);
    }

    #[test]
    fn proportional_pairs_share_cores(n in 3usize..=5, seed in any::<u64>()) {
        let mut rng = Sampler::new(seed);
        let a = rng.mixed_operator(n);
        let b = a.scale(&rng.nonzero_scalar());
        let f = rank_one(&rng.nonzero_vector(n), &rng.functional(n)).unwrap();
        prop_assert_eq!(
            analytic_core(&jordan_product(&a, &f).unwrap()),
            analytic_core(&jordan_product(&b, &f).unwrap())
        );
    }

    #[test]
    fn affine_results_verify(n in 3usize..=5, seed in any::<u64>(), planted in any::<bool>()) {
        let mut rng = Sampler::new(seed);
        let s = rng.matrix(n);
        let t = if planted {
            &Matrix::scalar(n, &rng.scalar()) + &s.scale(&rng.scalar())
        } else {
            rng.matrix(n)
        };
        let r = affine_combo_recover(&t, &s).unwrap();
        r.verify(&t, &s).unwrap();
        if planted {
            let is_coefficients = matches!(r, AffineComboResult::Coefficients { .. });
            prop_assert!(is_coefficients);
        }
    }

    #[test]
    fn proportionality_results_verify(n in 3usize..=4, seed in any::<u64>()) {
        let mut rng = Sampler::new(seed);
        let a = rng.mixed_operator(n);
        let b = rng.mixed_operator(n);
        let r = proportionality_test(&a, &b, 500, seed).unwrap();
        r.verify(&a, &b).unwrap();
        let inconclusive = matches!(r, ProportionalityResult::Inconclusive { .. });
        prop_assert!(!inconclusive);
    }

    #[test]
    fn numeric_local_spectrum_matches_exact_core(seed in any::<u64>()) {
        let mut rng = Sampler::new(seed);
        // Semisimple spectrum: conjugated Jordan blocks split by about
        // sqrt(machine epsilon), which is the clustering tolerance itself.
        let zeros = rng.usize_in(1, 2);
        let mut blocks = vec![(GaussianRational::from_int(0), 1); zeros];
        for k in 1..=rng.usize_in(1, 3) {
            blocks.push((GaussianRational::from_ints(k as i64, rng.usize_in(0, 1) as i64), 1));
        }
        let (t, _) = rng.planted(&blocks);
        let x = rng.small_vector(t.dim());
        prop_assume!(!x.is_zero());
        let tol = Tolerances::default();
        let spectrum = local_spectrum(&t, &x, tol).unwrap();
        let in_core = analytic_core(&t).contains(&x).unwrap();
        prop_assert_eq!(in_core, !spectrum.contains_zero(tol, 1.0));
    }
}
