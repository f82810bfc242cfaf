//! Property-based invariants for the algebra and similarity layers: norm
//! and radius behavior under unitaries and similarities, quotient-norm
//! algebra, and Stein solution ordering. Inputs are seeded through proptest
//! so shrinking yields a reproducible counterexample.

use num_complex::Complex64;
use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use specrad::algebra::{
    quotient_norm, random_commuting_family, random_matrix, random_unitary, AlgebraElement,
    AlgebraSignature, IdealSpec, Polynomial,
};
use specrad::linalg::{self, CMatrix};

fn seeded_matrix(seed: u64, dim: usize) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_matrix(&mut rng, dim)
}

fn two_two_instance(seed: u64) -> (IdealSpec, AlgebraElement) {
    let signature = AlgebraSignature::new(vec![2, 2]).unwrap();
    let ideal = IdealSpec::new(signature.clone(), [0].into()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = vec![random_matrix(&mut rng, 2), random_matrix(&mut rng, 2)];
    (ideal, AlgebraElement::new(signature, blocks).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn op_norm_is_unitarily_invariant(seed in 0u64..10_000, dim in 2usize..6) {
        let m = seeded_matrix(seed, dim);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xFACE);
        let u = random_unitary(&mut rng, dim);
        let rotated = u.dot(&m).dot(&linalg::adjoint(&u));
        let n1 = linalg::op_norm(&m).unwrap();
        let n2 = linalg::op_norm(&rotated).unwrap();
        prop_assert!((n1 - n2).abs() <= 1e-10 * (1.0 + n1));
    }

    #[test]
    fn spec_radius_is_similarity_invariant(seed in 0u64..10_000, dim in 2usize..5) {
        let m = seeded_matrix(seed, dim);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xBEEF);
        let mut s = random_matrix(&mut rng, dim);
        s.mapv_inplace(|z| z * Complex64::from(0.3));
        let s = s + linalg::identity(dim);
        let conj = linalg::conjugate(&s, &m).unwrap();
        let r1 = linalg::spec_radius(&m).unwrap();
        let r2 = linalg::spec_radius(&conj).unwrap();
        prop_assert!((r1 - r2).abs() <= 1e-7 * (1.0 + r1));
    }

    #[test]
    fn spec_radius_bounded_by_op_norm(seed in 0u64..10_000, dim in 1usize..6) {
        let m = seeded_matrix(seed, dim);
        let r = linalg::spec_radius(&m).unwrap();
        let n = linalg::op_norm(&m).unwrap();
        prop_assert!(r <= n + 1e-10 * (1.0 + n));
    }

    #[test]
    fn quotient_norm_is_submultiplicative(sa in 0u64..10_000, sb in 0u64..10_000) {
        let (ideal, a) = two_two_instance(sa);
        let (_, b) = two_two_instance(sb);
        let ab = a.mul(&b).unwrap();
        let qa = quotient_norm(&a, &ideal).unwrap();
        let qb = quotient_norm(&b, &ideal).unwrap();
        let qab = quotient_norm(&ab, &ideal).unwrap();
        prop_assert!(qab <= qa * qb + 1e-10 * (1.0 + qa * qb));
    }

    #[test]
    fn quotient_norm_ignores_ideal_perturbations(sa in 0u64..10_000, sk in 0u64..10_000) {
        let (ideal, a) = two_two_instance(sa);
        // k supported on the ideal block only
        let mut k = AlgebraElement::zero(&ideal.signature);
        k.blocks[0] = seeded_matrix(sk, 2);
        let shifted = a.add(&k).unwrap();
        let q1 = quotient_norm(&a, &ideal).unwrap();
        let q2 = quotient_norm(&shifted, &ideal).unwrap();
        prop_assert_eq!(q1, q2);
    }

    #[test]
    fn quotient_norm_survives_ideal_similarity(sa in 0u64..10_000, se in 0u64..10_000) {
        let (ideal, a) = two_two_instance(sa);
        // 1 + e with e in the ideal: the quotient image is untouched
        let mut e = AlgebraElement::zero(&ideal.signature);
        let mut block = seeded_matrix(se, 2);
        block.mapv_inplace(|z| z * Complex64::from(0.3));
        e.blocks[0] = block;
        let one_e = AlgebraElement::identity(&ideal.signature).add(&e).unwrap();
        let conj = one_e.conjugate_of(&a).unwrap();
        let q1 = quotient_norm(&a, &ideal).unwrap();
        let q2 = quotient_norm(&conj, &ideal).unwrap();
        prop_assert!((q1 - q2).abs() <= 1e-10 * (1.0 + q1));
    }

    #[test]
    fn stein_solution_dominates_inhomogeneity(seed in 0u64..10_000, dim in 2usize..5) {
        let mut a = seeded_matrix(seed, dim);
        let r = linalg::spec_radius(&a).unwrap();
        prop_assume!(r > 1e-9);
        a.mapv_inplace(|z| z * Complex64::from(0.8 / r));
        let g = seeded_matrix(seed ^ 0xD00D, dim);
        // q = g g* is PSD, so X = q + a* X a >= q >= 0
        let q = g.dot(&linalg::adjoint(&g));
        let sol = linalg::stein_solve_auto(&a, &q).unwrap();
        let diff = &sol.z - &q;
        let min_eig = linalg::eigenvalues(&diff)
            .unwrap()
            .into_iter()
            .map(|z| z.re)
            .fold(f64::INFINITY, f64::min);
        prop_assert!(min_eig >= -1e-9 * (1.0 + linalg::op_norm(&q).unwrap()));
    }

    #[test]
    fn polynomial_evaluation_commutes_with_quotient(sa in 0u64..10_000, c0 in -1.0f64..1.0, c2 in -1.0f64..1.0) {
        let (ideal, a) = two_two_instance(sa);
        let p = Polynomial::from_real(&[c0, 0.5, c2]);
        let pa = p.eval_element(&a).unwrap();
        // evaluating then deleting the ideal blocks equals deleting first:
        // compare quotient norms computed both ways
        let direct = quotient_norm(&pa, &ideal).unwrap();
        let mut quotient_only = AlgebraElement::zero(&ideal.signature);
        quotient_only.blocks[1] = a.blocks[1].clone();
        let via_quotient = quotient_norm(&p.eval_element(&quotient_only).unwrap(), &ideal).unwrap();
        prop_assert!((direct - via_quotient).abs() <= 1e-10 * (1.0 + direct));
    }

    #[test]
    fn generated_families_commute(seed in 0u64..2_000, n in 1usize..4) {
        let signature = AlgebraSignature::new(vec![2, 3]).unwrap();
        let ideal = IdealSpec::new(signature, [0].into()).unwrap();
        let family = random_commuting_family(&ideal, n, seed, 0.4, Some(0.8)).unwrap();
        let defect = specrad::algebra::commutation_defect(&family).unwrap();
        prop_assert!(defect <= 1e-12);
    }
}
