use proptest::prelude::*;

use spin_core::checks::{
    random_conjugate, random_inflated_conjugate, random_pair, random_pair_with_radius,
    random_triple,
};
use spin_core::dilation::{dilate_triple, reverse_dilate};
use spin_core::matcore::{
    eigvalsh, gaussian_matrix, haar_unitary, hermitian_eig, is_psd, kron, random_hermitian,
    rng_from_seed, sigma_x, sigma_y, sigma_z, CMatrix,
};
use spin_core::order_iso::{
    choi_of_triple_map, inverse_map_check, pencil_psd, ucp_between, HermitianPencil,
};
use spin_core::spectrahedra::{
    ando_certificate, certify_trials, in_spin_ball, joint_numerical_range_sample, numerical_radius,
    AndoOutcome, SelfadjointTuple, ANDO_MAX_ITER, RADIUS_GRID,
};
use spin_core::spin_construct::{canonical_spin, extend_by_one, pair_from_witness, SpinTuple};
use spin_core::spin_pairs::{analyze_x, canonicalize_pair};
use spin_core::spin_verify::{intertwiner, is_irreducible, verify_spin};

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig::with_cases(cases)
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn eig_reconstructs_hermitian(seed in any::<u64>(), n in 1usize..9) {
        let a = random_hermitian(&mut rng_from_seed(seed), n, 2.0);
        let e = hermitian_eig(&a, 1e-12).unwrap();
        prop_assert!(e.reconstruct().distance(&a) <= 1e-10 * a.frobenius_norm().max(1.0));
        prop_assert!(e.vectors.unitarity_residual() <= 1e-10);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eig_of_planted_spectrum(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = rng_from_seed(seed);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let p = haar_unitary(n, seed.wrapping_add(1));
        let a = p.matmul(&CMatrix::diag_real(&values)).matmul(&p.adjoint()).hermitian_part();
        let mut expected = values.clone();
        expected.sort_by(f64::total_cmp);
        let got = eigvalsh(&a, 1e-10).unwrap();
        for (g, e) in got.iter().zip(&expected) {
            prop_assert!((g - e).abs() <= 1e-10);
        }
    }

    #[test]
    fn kron_mixed_product(seed in any::<u64>(), n in 1usize..4, m in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        let (a, c) = (gaussian_matrix(&mut rng, n, n), gaussian_matrix(&mut rng, n, n));
        let (b, d) = (gaussian_matrix(&mut rng, m, m), gaussian_matrix(&mut rng, m, m));
        let lhs = kron(&a, &b).matmul(&kron(&c, &d));
        let rhs = kron(&a.matmul(&c), &b.matmul(&d));
        prop_assert!(lhs.distance(&rhs) <= 1e-10 * rhs.frobenius_norm().max(1.0));
    }

    #[test]
    fn gram_is_psd(seed in any::<u64>(), r in 1usize..6, c in 1usize..6) {
        let x = gaussian_matrix(&mut rng_from_seed(seed), r, c);
        prop_assert!(is_psd(&x.adjoint().matmul(&x), 1e-9).unwrap().psd);
    }

    #[test]
    fn haar_is_deterministic_and_unitary(seed in any::<u64>(), d in 1usize..10) {
        let u = haar_unitary(d, seed);
        prop_assert_eq!(&u, &haar_unitary(d, seed));
        prop_assert!(u.unitarity_residual() <= 1e-12);
    }

    #[test]
    fn json_round_trip_is_exact(seed in any::<u64>(), r in 1usize..5, c in 1usize..5) {
        let x = gaussian_matrix(&mut rng_from_seed(seed), r, c);
        let back: CMatrix = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn canonical_and_derived_tuples_are_spin(m in 2usize..10, seed in any::<u64>(), r in 1usize..3) {
        let base = canonical_spin(m).unwrap();
        prop_assert!(is_irreducible(&base) || base.dim() > 16);
        let mut rng = rng_from_seed(seed);
        for s in [base.clone(), random_conjugate(&base, &mut rng), random_inflated_conjugate(&base, r, &mut rng)] {
            let rep = verify_spin(&s, 1e-9);
            prop_assert!(rep.passes(1e-9));
            prop_assert!(rep.gram_min_eig > 1e-6);
        }
    }

    #[test]
    fn tower_step_is_spin(m in 2usize..8) {
        let s = canonical_spin(m).unwrap();
        let t = extend_by_one(&s).unwrap();
        prop_assert_eq!(t.arity(), m + 2);
        prop_assert_eq!(t.dim(), 2 * s.dim());
        prop_assert!(verify_spin(&t, 1e-9).passes(1e-9));
    }

    #[test]
    fn planted_conjugation_is_recovered(m in 2usize..7, seed in any::<u64>()) {
        let u = canonical_spin(m).unwrap();
        let v = random_conjugate(&u, &mut rng_from_seed(seed));
        let q = intertwiner(&u, &v).unwrap().expect("conjugate tuples intertwine");
        for (a, b) in u.unitaries().iter().zip(v.unitaries()) {
            prop_assert!(q.adjoint().matmul(a).matmul(&q).distance(b) <= 1e-8);
        }
    }

    #[test]
    fn pairs_reduce_to_nilpotent_blocks(n in 1usize..5, seed in any::<u64>()) {
        let p = random_pair(n, &mut rng_from_seed(seed));
        let a = analyze_x(p.get(0), p.get(1)).unwrap();
        prop_assert!((a.norm - 2.0).abs() <= 1e-9);
        prop_assert!(a.nilpotency_residual <= 1e-9);
        prop_assert!(a.reduction.reduction_residual <= 1e-8);
        prop_assert!(a.gram_spectrum_residual <= 1e-8);
    }

    #[test]
    fn canonical_form_round_trips(n in 1usize..5, seed in any::<u64>()) {
        let p = random_pair(n, &mut rng_from_seed(seed));
        let cf = canonicalize_pair(p.get(0), p.get(1)).unwrap();
        let again = pair_from_witness(n, &cf.w, &cf.y).unwrap();
        prop_assert!(again.get(0).distance(p.get(0)) <= 1e-8);
        prop_assert!(again.get(1).distance(p.get(1)) <= 1e-8);
    }

    #[test]
    fn pencil_verdicts_agree_across_realizations(
        m in 2usize..6, level in 1usize..5, seed in any::<u64>(), shift in -1.0f64..4.0,
    ) {
        let mut rng = rng_from_seed(seed);
        let base = canonical_spin(m).unwrap();
        let others = [random_conjugate(&base, &mut rng), random_inflated_conjugate(&base, 2, &mut rng)];
        let p = HermitianPencil::random(&mut rng, level, m, shift);
        let v0 = pencil_psd(&p, &base, 1e-9).unwrap();
        prop_assume!(v0.min_eig.abs() >= 1e-6);
        for s in &others {
            let v = pencil_psd(&p, s, 1e-9).unwrap();
            prop_assert_eq!(v.psd, v0.psd);
        }
    }

    #[test]
    fn single_unitary_pencils(level in 1usize..5, seed in any::<u64>()) {
        // b₀⊗1 + b₁⊗u ⪰ 0 iff b₀ ± b₁ ⪰ 0
        let mut rng = rng_from_seed(seed);
        let u = SpinTuple::new(vec![sigma_z()]).unwrap();
        let p = HermitianPencil::random(&mut rng, level, 1, 1.5);
        let (b0, b1) = (&p.coeffs()[0], &p.coeffs()[1]);
        let plus = is_psd(&(b0 + b1), 1e-9).unwrap();
        let minus = is_psd(&(b0 - b1), 1e-9).unwrap();
        prop_assume!(plus.min_eig.abs() >= 1e-9 && minus.min_eig.abs() >= 1e-9);
        prop_assert_eq!(pencil_psd(&p, &u, 1e-9).unwrap().psd, plus.psd && minus.psd);
    }

    #[test]
    fn span_maps_invert(m in 2usize..6, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let base = canonical_spin(m).unwrap();
        let other = random_inflated_conjugate(&base, 2, &mut rng);
        let forth = ucp_between(&base, &other).unwrap();
        let back = ucp_between(&other, &base).unwrap();
        prop_assert!(forth.round_trip_residual(&back).unwrap() <= 1e-9);
    }

    #[test]
    fn triple_maps_are_cp_and_dilate(n in 1usize..5, seed in any::<u64>()) {
        let t = random_triple(n, &mut rng_from_seed(seed));
        let cp = choi_of_triple_map(&t).unwrap();
        prop_assert!(cp.choi_min_eig >= -1e-9);
        prop_assert!(cp.kraus_residual.unwrap() <= 1e-8);
        let inv = inverse_map_check(&t, cp.kraus.as_ref().unwrap(), 10, seed).unwrap();
        prop_assert!(inv.identity_residual <= 1e-8);
        let d = dilate_triple(&t).unwrap();
        prop_assert_eq!(d.ell, cp.kraus_rank());
        prop_assert!(2 * d.ell >= t.dim());
        prop_assert!(d.isometry_residual <= 1e-9 && d.max_residual() <= 1e-8);
        let r = reverse_dilate(&t).unwrap();
        prop_assert!(r.isometry_residual <= 1e-9 && r.max_residual() <= 1e-8);
    }

    #[test]
    fn m1_spin_ball_is_norm_ball(level in 1usize..5, seed in any::<u64>(), target in 0.5f64..1.5) {
        let mut rng = rng_from_seed(seed);
        let h = SelfadjointTuple::random(&mut rng, level, 1);
        let h = h.scaled(target / h.mats()[0].op_norm());
        let norm = h.mats()[0].op_norm();
        prop_assume!((norm - 1.0).abs() >= 1e-6);
        prop_assert_eq!(in_spin_ball(1, &h, 1e-9).unwrap(), norm <= 1.0);
    }

    #[test]
    fn pauli_sphere(seed in any::<u64>()) {
        let pts = joint_numerical_range_sample(&[sigma_x(), sigma_y(), sigma_z()], 200, seed).unwrap();
        for p in pts {
            let r = p.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!((r - 1.0).abs() <= 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(cfg(12))]

    #[test]
    fn ando_feasibility_matches_radius(
        ell in 1usize..4, seed in any::<u64>(), radius in prop_oneof![0.5f64..0.95, 1.05f64..1.5],
    ) {
        let a = random_pair_with_radius(&mut rng_from_seed(seed), ell, radius);
        let (a1, a2) = (&a.mats()[0], &a.mats()[1]);
        let w = numerical_radius(&(a1 + &a2.scale(spin_core::matcore::I)), RADIUS_GRID);
        prop_assert!((w - radius).abs() <= 1e-9);
        let outcome = ando_certificate(a1, a2, ANDO_MAX_ITER).unwrap();
        match outcome {
            AndoOutcome::Feasible(c) => {
                prop_assert!(radius < 1.0);
                prop_assert!(c.feasibility_residual <= 1e-7);
            }
            AndoOutcome::Infeasible { .. } => prop_assert!(radius > 1.0),
        }
    }

    #[test]
    fn certified_maps_are_unital_cp(ell in 1usize..4, seed in any::<u64>(), radius in 0.2f64..0.95) {
        let a = random_pair_with_radius(&mut rng_from_seed(seed), ell, radius);
        let certs = certify_trials(&[a], ANDO_MAX_ITER).unwrap();
        let c = certs[0].certified.as_ref().expect("radius below 1");
        prop_assert!(c.map.unital_residual <= 1e-12);
        prop_assert!(c.map.choi_min_eig >= -1e-7);
        prop_assert!(c.span_residual <= 1e-9);
    }
}

use rand::Rng;
