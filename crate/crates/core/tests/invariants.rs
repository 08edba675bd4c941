use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use walker_curvature::affine::{affine_ricci_at, riemannian_extension, AffineConnection2};
use walker_curvature::fields::{fd_jet2_oracle, lemma14_pq, lemma14_residuals};
use walker_curvature::operators::{jacobi, jacobi_polarized, ricci, skew_curvature, weyl_split};
use walker_curvature::suites::random_polynomial;
use walker_curvature::walker::{curvature_table_1b, point_curvature};
use walker_curvature::{BasePoint, Matrix4, Point4, ScalarField, WalkerMetric};

fn poly(seed: u64, coords: &[u8], degree: u32) -> ScalarField {
    random_polynomial(&mut ChaCha8Rng::seed_from_u64(seed), coords, degree)
}

fn general_metric(seed: u64) -> WalkerMetric {
    let all = [1, 2, 3, 4];
    WalkerMetric::new(poly(seed, &all, 2), poly(seed ^ 0x55, &all, 2), poly(seed ^ 0xaa, &all, 3))
}

fn point() -> impl Strategy<Value = Point4> {
    prop::array::uniform4(-1.0f64..1.0).prop_map(|x| Point4::new(x).unwrap())
}

fn vector() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0f64..1.0)
}

fn rel(a: &Matrix4, b: &Matrix4) -> f64 {
    (*a - *b).max_abs() / (1.0 + a.max_abs().max(b.max_abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn curvature_symmetries_hold(seed in any::<u64>(), p in point()) {
        let pc = point_curvature(&general_metric(seed), &p).unwrap();
        let scale = 1.0 + pc.tensor.max_abs();
        prop_assert!(pc.tensor.symmetry_residual() / scale < 1e-10);
        prop_assert!(pc.tensor.bianchi_residual() / scale < 1e-10);
    }

    #[test]
    fn restricted_table_matches_pipeline(seed in any::<u64>(), p in point()) {
        let m = WalkerMetric::restricted(poly(seed, &[1, 2, 3, 4], 3));
        let pc = point_curvature(&m, &p).unwrap();
        let table = curvature_table_1b(&m, &p).unwrap();
        prop_assert!(pc.tensor.max_diff(&table) / (1.0 + table.max_abs()) < 1e-10);
    }

    #[test]
    fn polarization_is_sound(seed in any::<u64>(), p in point(), x in vector(), y in vector()) {
        let pc = point_curvature(&general_metric(seed), &p).unwrap();
        let sum: [f64; 4] = std::array::from_fn(|i| x[i] + y[i]);
        let lhs = jacobi(&pc, &sum) - jacobi(&pc, &x) - jacobi(&pc, &y);
        let rhs = jacobi_polarized(&pc, &x, &y).scale(2.0);
        prop_assert!(rel(&lhs, &rhs) < 1e-10);
        prop_assert!(rel(&jacobi_polarized(&pc, &x, &x), &jacobi(&pc, &x)) < 1e-14);
    }

    #[test]
    fn jacobi_trace_is_ricci(seed in any::<u64>(), p in point(), x in vector()) {
        let pc = point_curvature(&general_metric(seed), &p).unwrap();
        let rho = ricci(&pc).tensor;
        let rx = rho.mul_vec(&x).iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
        let j = jacobi(&pc, &x);
        prop_assert!((j.trace() - rx).abs() / (1.0 + j.max_abs() + rho.max_abs()) < 1e-10);
    }

    #[test]
    fn skew_operator_is_antisymmetric_in_its_arguments(seed in any::<u64>(), p in point(), x in vector(), y in vector()) {
        let pc = point_curvature(&general_metric(seed), &p).unwrap();
        let a = skew_curvature(&pc, &x, &y);
        let b = skew_curvature(&pc, &y, &x);
        prop_assert!(rel(&a, &(-b)) < 1e-12);
        // g(R(x,y)u, v) = -g(u, R(x,y)v)
        let g = pc.metric;
        let ga = g * a;
        prop_assert!(rel(&ga, &(-ga.transpose())) < 1e-10);
    }

    #[test]
    fn weyl_is_trace_free(seed in any::<u64>(), p in point()) {
        let pc = point_curvature(&general_metric(seed), &p).unwrap();
        let w = weyl_split(&pc);
        prop_assert!(w.trace_residual / (1.0 + pc.tensor.max_abs()) < 1e-10);
        prop_assert!(w.star_residual < 1e-12);
    }

    #[test]
    fn jets_match_finite_differences(seed in any::<u64>(), p in point()) {
        let f = poly(seed, &[1, 2, 3, 4], 3);
        let exact = f.eval_jet2(&p).unwrap();
        let fd = fd_jet2_oracle(|q| f.eval(q), &p, 1e-4).unwrap();
        for i in 0..4 {
            prop_assert!((exact.grad[i] - fd.grad[i]).abs() < 1e-5);
            for j in 0..4 {
                prop_assert!((exact.hess[i][j] - fd.hess[i][j]).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn rational_family_solves_the_system(
        a0 in -3.0f64..3.0,
        a3 in -3.0f64..3.0,
        a4 in -3.0f64..3.0,
        x in prop::array::uniform2(-1.5f64..1.5),
    ) {
        let l = a0 + a3 * x[0] + a4 * x[1];
        prop_assume!(l.abs() > 0.2);
        let (p, q) = lemma14_pq(a0, a3, a4).unwrap();
        let r = lemma14_residuals(&p, &q, &BasePoint::new(x).unwrap()).unwrap();
        prop_assert!(r.normalized() < 1e-10);
    }

    #[test]
    fn rational_family_is_ricci_flat(
        a0 in 1.0f64..3.0,
        a3 in -0.5f64..0.5,
        a4 in -0.5f64..0.5,
        seed in any::<u64>(),
        p in point(),
    ) {
        let (pf, qf) = lemma14_pq(a0, a3, a4).unwrap();
        let g34 = ScalarField::coord(1) * pf + ScalarField::coord(2) * qf + poly(seed, &[3, 4], 3);
        let pc = point_curvature(&WalkerMetric::restricted(g34), &p).unwrap();
        let rho = ricci(&pc).tensor;
        prop_assert!(rho.max_abs() / (1.0 + pc.tensor.max_abs()) < 1e-10);
    }

    #[test]
    fn extension_is_restricted_iff_null_lines_parallel(seed in any::<u64>(), flags in prop::array::uniform6(any::<bool>())) {
        let symbols: [ScalarField; 6] = std::array::from_fn(|k| {
            if flags[k] { poly(seed ^ k as u64, &[3, 4], 2) } else { ScalarField::zero() }
        });
        let a = AffineConnection2::new(symbols).unwrap();
        let z = ScalarField::zero;
        let m = riemannian_extension(&a, [z(), z(), z()]).unwrap();
        prop_assert_eq!(m.is_restricted(), a.has_parallel_null_lines());
    }

    #[test]
    fn affine_ricci_splits(seed in any::<u64>(), x in prop::array::uniform2(-1.0f64..1.0)) {
        let symbols: [ScalarField; 6] = std::array::from_fn(|k| poly(seed ^ (k as u64 * 7919), &[3, 4], 2));
        let a = AffineConnection2::new(symbols).unwrap();
        let r = affine_ricci_at(&a, &BasePoint::new(x).unwrap()).unwrap();
        let back = r.sym + r.anti;
        prop_assert!((back - r.full).max_abs() <= 1e-12 * (1.0 + r.full.max_abs()));
        prop_assert!((r.sym - r.sym.transpose()).max_abs() == 0.0);
        prop_assert!((r.anti + r.anti.transpose()).max_abs() == 0.0);
    }
}
