//! Invariants over seeded random inputs.

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use torsion_core::complex::FiniteComplex;
use torsion_core::family::ScatteringFamily;
use torsion_core::gluing::{circle_gluing_check, CircleGeometry};
use torsion_core::linalg::{
    block_diag, c, det_star, det_star_std, hermitian_part, identity, max_abs, null_space, orth, rank, CMat,
    HermitianSpace, C64,
};
use torsion_core::mayer_vietoris::{build_l_sequence, log_mv_asymptotic_rhs, mv_torsion_scaled, torsion_l, ScaledDiagram};
use torsion_core::report::{CheckRecord, Report};
use torsion_core::sample::{exact_complex, gaussian, gram, hermitian, lagrangian, rng, subspace_pair, unitary, ymodel};
use torsion_core::scattering::{chi_prime_top, GluedScattering};
use torsion_core::spectra::{lambda_roots, lambda_roots_with, Mode, Solver};
use torsion_core::zeta::{hurwitz_zeta, model_zeta_prime0};

const MAX_H: [usize; 3] = [3, 2, 3];

fn phases(p: &[f64]) -> CMat {
    CMat::from_diagonal(&nalgebra::DVector::from_iterator(p.len(), p.iter().map(|&t| C64::from_polar(1.0, t))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn det_star_is_metric_covariant(seed in any::<u64>(), n in 1usize..6) {
        // det* of A on (V, G) equals det* of the whitened matrix
        let mut g = rng(seed);
        let space = HermitianSpace::new(gram(&mut g, n)).unwrap();
        let h = hermitian(&mut g, n);
        // A = G⁻¹H is G-self-adjoint
        let a = space.gram().clone().try_inverse().unwrap() * &h;
        let w = hermitian_part(&space.whiten_operator(&a));
        let x = det_star(&space, &a).unwrap();
        let y = det_star_std(&w).unwrap();
        prop_assert!((x / y - 1.0).abs() < 1e-9, "{x} vs {y}");
    }

    #[test]
    fn subspace_bases_of_rank_deficient_matrices(seed in any::<u64>(), m in 1usize..9, n in 1usize..9, k in 0usize..9) {
        let mut g = rng(seed);
        let k = k.min(m).min(n);
        let a = gaussian(&mut g, m, k) * gaussian(&mut g, k, n);
        prop_assert_eq!(rank(&a), k);
        let q = orth(&a);
        prop_assert!(max_abs(&(q.adjoint() * &q - identity(q.ncols()))) < 1e-12);
        prop_assert!(max_abs(&(&q * (q.adjoint() * &a) - &a)) < 1e-10 * max_abs(&a).max(1.0));
        let z = null_space(&a);
        prop_assert_eq!(z.ncols(), n - k);
        prop_assert!(max_abs(&(&a * &z)) < 1e-10 * max_abs(&a).max(1.0));
    }

    #[test]
    fn torsion_routes_agree(seed in any::<u64>(), len in 2usize..6, offset in -3i64..3) {
        let mut g = rng(seed);
        let cx = exact_complex(&mut g, len, 3, offset);
        let a = cx.log_torsion().unwrap();
        let b = cx.log_torsion_singular().unwrap();
        prop_assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
        prop_assert!((cx.canonical_section_norm().unwrap().ln() - a).abs() < 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn torsion_inverts_under_odd_shift(seed in any::<u64>(), shift in -3i64..4) {
        let mut g = rng(seed);
        let cx = exact_complex(&mut g, 3, 2, 0);
        let t = cx.log_torsion().unwrap();
        let s = cx.shift(shift).log_torsion().unwrap();
        let expected = if shift % 2 == 0 { t } else { -t };
        prop_assert!((s - expected).abs() < 1e-9 * t.abs().max(1.0));
    }

    #[test]
    fn short_complex_is_determinant(seed in any::<u64>(), n in 1usize..5) {
        let mut g = rng(seed);
        let a = gaussian(&mut g, n, n) + unitary(&mut g, n).scale(3.0);
        let det = a.determinant().norm();
        let t = FiniteComplex::short(a).unwrap().torsion().unwrap();
        prop_assert!((t / det - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sampled_subspaces_are_lagrangian(seed in any::<u64>()) {
        let mut g = rng(seed);
        let y = ymodel(&mut g, &MAX_H);
        let l = lagrangian(&mut g, &y);
        prop_assert!(l.check_lagrangian().is_ok());
    }

    #[test]
    fn glued_matrices_are_unitary_involutions(seed in any::<u64>()) {
        let (l1, l2) = subspace_pair(seed, &MAX_H);
        let g = GluedScattering::new(&l1, &l2).unwrap();
        for m in [&g.c1, &g.c2, &g.c1_bd, &g.c2_bd] {
            prop_assert!(m.unitarity_defect() < 1e-10);
            prop_assert!(m.involution_defect() < 1e-10);
        }
        prop_assert!(g.c12.unitarity_defect() < 1e-10);
    }

    #[test]
    fn l_sequence_identities(seed in any::<u64>()) {
        let (l1, l2) = subspace_pair(seed, &MAX_H);
        let seq = build_l_sequence(&l1, &l2).unwrap();
        prop_assert_eq!(seq.euler_sum(), 0);
        prop_assert_eq!(seq.chi_prime(), chi_prime_top(&l1, &l2).unwrap());
        prop_assert!(seq.cap_rank_failures().is_empty());
        let t = torsion_l(&seq).unwrap();
        prop_assert!(t.is_finite() && t > 0.0);
    }

    #[test]
    fn equal_pair_has_unit_torsion(seed in any::<u64>()) {
        // the pair (𝓛, 𝓛) is exact with zero maps
        let (l1, _) = subspace_pair(seed, &MAX_H);
        let seq = build_l_sequence(&l1, &l1).unwrap();
        prop_assert!((torsion_l(&seq).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn unperturbed_diagram_equals_rhs(seed in any::<u64>(), r in 1.0f64..1e3) {
        let (l1, l2) = subspace_pair(seed, &MAX_H);
        let n = l1.ymodel().top_degree();
        let d = ScaledDiagram::new(l1.clone(), l2.clone(), r).with_l2_parts(vec![1; n + 1], vec![2; n + 1]);
        let t = mv_torsion_scaled(&d).unwrap().ln();
        let rhs = log_mv_asymptotic_rhs(&l1, &l2, r).unwrap();
        prop_assert!((t - rhs).abs() < 1e-9 * rhs.abs().max(1.0), "{t} vs {rhs}");
    }

    #[test]
    fn model_zeta_is_conjugation_invariant(seed in any::<u64>(), r in 0.5f64..50.0) {
        let mut g = rng(seed);
        let alpha = g_phase(&mut g);
        let c = phases(&[alpha, -alpha, PI, 0.0]);
        let u = unitary(&mut g, 4);
        let a = model_zeta_prime0(&c, r).unwrap();
        let b = model_zeta_prime0(&(&u * &c * u.adjoint()), r).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn model_zeta_is_additive(r in 0.5f64..50.0, a in 0.1f64..3.0, b in 0.1f64..3.0) {
        let ca = phases(&[a, -a]);
        let cb = phases(&[b, -b, PI]);
        let sum = model_zeta_prime0(&block_diag(&[&ca, &cb]), r).unwrap();
        let parts = model_zeta_prime0(&ca, r).unwrap() + model_zeta_prime0(&cb, r).unwrap();
        prop_assert!((sum - parts).abs() < 1e-10);
    }

    #[test]
    fn hurwitz_shift_relation(s_re in -3.0f64..6.0, s_im in -2.0f64..2.0, a in 0.05f64..4.0) {
        prop_assume!((s_re - 1.0).abs() > 0.05 || s_im.abs() > 0.05);
        let s = c(s_re, s_im);
        let lhs = hurwitz_zeta(s, a).unwrap() - hurwitz_zeta(s, a + 1.0).unwrap();
        let rhs = (-s * a.ln()).exp();
        prop_assert!((lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn constant_roots_match_iterative_solver(seed in any::<u64>(), r in 0.5f64..20.0) {
        let mut g = rng(seed);
        let n = 1 + (seed % 3) as usize;
        let ph: Vec<f64> = (0..n).map(|_| g_phase(&mut g)).collect();
        let u = unitary(&mut g, n);
        let fam = ScatteringFamily::constant(&u * phases(&ph) * u.adjoint());
        let a = lambda_roots(&fam, r, (-1.0, 1.5), Mode::Full).unwrap();
        let b = lambda_roots_with(&fam, r, (-1.0, 1.5), Mode::Full, Solver::Iterative).unwrap();
        prop_assert_eq!(a.count(), b.count());
        for (x, y) in a.roots.iter().zip(&b.roots) {
            prop_assert!((x.lambda - y.lambda).abs() < 1e-12);
        }
    }

    #[test]
    fn root_count_matches_progressions(seed in any::<u64>(), r in 0.5f64..20.0) {
        // each eigenphase contributes one root per 2π/κ of window
        let mut g = rng(seed);
        let ph: Vec<f64> = (0..2).map(|_| g_phase(&mut g)).collect();
        let fam = ScatteringFamily::constant(phases(&ph));
        let w = (0.0, 3.0);
        let set = lambda_roots(&fam, r, w, Mode::Full).unwrap();
        let kappa = 4.0 * r;
        let expected: usize = ph
            .iter()
            .map(|&t| {
                let lo = ((kappa * w.0 + t) / TAU).floor() as i64 + 1;
                let hi = ((kappa * w.1 + t) / TAU).ceil() as i64 - 1;
                (lo..=hi).filter(|&k| (TAU * k as f64 - t).abs() > 1e-9).count()
            })
            .sum();
        prop_assert_eq!(set.count(), expected);
    }

    #[test]
    fn circle_combination_is_log_two(a in 0.2f64..4.0, b in 0.2f64..4.0, r in 0.2f64..5.0) {
        let g = CircleGeometry::new(a, b).unwrap();
        let rep = circle_gluing_check(&g, r).unwrap();
        prop_assert!((rep.combination - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn report_round_trips(residual in 0.0f64..1.0, name in "[a-z_]{1,12}") {
        let mut rep = Report::default();
        rep.checks.push(CheckRecord::numeric(name.clone(), residual, 0.5, "test"));
        rep.fitted.insert(name, residual);
        prop_assert_eq!(Report::from_json(&rep.to_json()).unwrap(), rep);
    }
}

fn g_phase(g: &mut impl rand::Rng) -> f64 {
    g.random_range(-PI + 1e-3..PI)
}
