use num_complex::Complex64;
use proptest::prelude::*;

use csverify::bounds::{coherence, dct_forward, dct_inverse, max_sparsity, required_measurements, sparsify, BoundQuery};
use csverify::constructions::{
    gram_blocks, make_symmetric_omega, partial_fourier, primes_between, realifier_q, realify, FrequencySet,
};
use csverify::cyclotomic::CycloInt;
use csverify::linalg::singular_values;
use csverify::recovery::{p0_solve, shrink, uniqueness_check, P0Options, SparseSignal, Uniqueness};
use csverify::robustness::{maximal_robustness, spark, verify_witness, EnumerationOptions, Mode, Verdict};
use csverify::subsets::{binomial, next_colex, rank_colex, unrank_colex};
use csverify::DenseMatrix;

fn small_prime() -> impl Strategy<Value = usize> {
    proptest::sample::select(primes_between(3, 61).into_iter().map(|p| p as usize).collect::<Vec<_>>())
}

proptest! {
    #[test]
    fn symmetric_omega_invariants(n in small_prime()) {
        let omega = make_symmetric_omega(n).unwrap();
        prop_assert!(omega.is_symmetric());
        prop_assert!(omega.indices().windows(2).all(|w| w[0] < w[1]));
        let k = (n - 1) / 2;
        prop_assert_eq!(omega.size(), if k % 2 == 0 { k + 1 } else { k + 2 });
        let phi = realify(&partial_fourier::<f64>(n, &omega).unwrap(), &realifier_q(n).unwrap()).unwrap();
        prop_assert!(gram_blocks(&phi, k).unwrap().offdiag_max <= 1e-12);
    }

    #[test]
    fn partial_fourier_rows_orthonormal(n in 2usize..40, mask in any::<u64>()) {
        let mut idx: Vec<usize> = (0..n).filter(|i| mask >> (i % 64) & 1 == 1).collect();
        if idx.is_empty() { idx.push(0); }
        let omega = FrequencySet::new(n, idx).unwrap();
        let psi = partial_fourier::<f64>(n, &omega).unwrap();
        prop_assert!(psi.matmul(&psi.adjoint()).unwrap().identity_defect().unwrap() <= 1e-12);
    }

    #[test]
    fn colex_rank_roundtrip(n in 1usize..20, k in 0usize..6, pick in any::<u64>()) {
        let total = binomial(n, k).unwrap();
        prop_assume!(total > 0);
        let r = u128::from(pick) % total;
        let s = unrank_colex(r, k);
        prop_assert_eq!(rank_colex(&s), r);
        let mut t = s.clone();
        if next_colex(&mut t, n) {
            prop_assert_eq!(rank_colex(&t), r + 1);
        } else {
            prop_assert_eq!(r + 1, total);
        }
    }

    #[test]
    fn shrink_is_soft_threshold_on_reals(v in -10.0f64..10.0, kappa in 0.0f64..5.0) {
        let soft = v.signum() * (v.abs() - kappa).max(0.0);
        let z = shrink(Complex64::new(v, 0.0), kappa);
        prop_assert!((z.re - soft).abs() <= 1e-15 && z.im == 0.0);
    }

    #[test]
    fn dct_roundtrip_and_parseval(x in proptest::collection::vec(-100.0f64..100.0, 1..700)) {
        let c = dct_forward(&x).unwrap();
        let back = dct_inverse(&c).unwrap();
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(x.iter().zip(&back).all(|(a, b)| (a - b).abs() <= 1e-12 * scale));
        let nx: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let nc: f64 = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((nx - nc).abs() <= 1e-12 * nx.max(1.0));
    }

    #[test]
    fn psnr_monotone_in_keep_fraction(x in proptest::collection::vec(-1.0f64..1.0, 2..200), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let p = sparsify(&x, lo).unwrap();
        let q = sparsify(&x, hi).unwrap();
        prop_assert!(q.kept >= p.kept);
        prop_assert!(q.mse <= p.mse + 1e-12);
    }

    #[test]
    fn bound_monotonicity_and_inversion(n in 2.0f64..1e6, frac in 0.01f64..1.0, mu_frac in 0.0f64..1.0, c in 1.0f64..100.0) {
        let m = (frac * n).max(1.0).min(n);
        let mu = 1.0 + mu_frac * (n.sqrt() - 1.0);
        let base = max_sparsity(&BoundQuery { n, m, mu, c_const: c }).unwrap().s;
        let more_m = max_sparsity(&BoundQuery { n, m: (m * 1.5).min(n), mu, c_const: c }).unwrap().s;
        let more_c = max_sparsity(&BoundQuery { n, m, mu, c_const: c * 2.0 }).unwrap().s;
        prop_assert!(more_m >= base && more_c <= base);
        let s = base.ceil().max(1.0) as u64;
        if base < s as f64 {
            prop_assert!(required_measurements(s, n, mu, c).unwrap().m as f64 >= m);
        }
    }

    #[test]
    fn coherence_in_range_for_dft_pairs(n in 2usize..24, shift in 0usize..24) {
        let full = FrequencySet::full(n);
        let f = partial_fourier::<f64>(n, &full).unwrap();
        // cyclically shifted rows form another orthonormal basis
        let rows: Vec<Complex64> = (0..n).flat_map(|i| f.row((i + shift) % n).to_vec()).collect();
        let g = DenseMatrix::new("shifted", n, n, rows).unwrap();
        let id = DenseMatrix::<f64>::identity(n);
        for (u, v) in [(&id, &f), (&f, &g), (&id, &id)] {
            let mu = coherence(u, v).unwrap();
            prop_assert!(mu >= 1.0 - 1e-9 && mu <= (n as f64).sqrt() + 1e-9);
        }
    }

    #[test]
    fn cyclotomic_arithmetic_matches_complex(p in proptest::sample::select(vec![3usize, 5, 7, 11, 13]),
                                              a in proptest::collection::vec(-5i64..5, 13),
                                              b in proptest::collection::vec(-5i64..5, 13)) {
        let build = |c: &[i64]| (0..p).fold(CycloInt::zero(p), |acc, e| {
            acc.add(&CycloInt::root_power(p, e).mul(&CycloInt::from_integer(p, c[e])))
        });
        let (x, y) = (build(&a), build(&b));
        let lhs = x.mul(&y).to_complex();
        let rhs = x.to_complex() * y.to_complex();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
        prop_assert!((x.sub(&y).to_complex() - (x.to_complex() - y.to_complex())).norm() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Small integer matrices: floating and exact ranks agree subset by subset,
    /// witnesses re-verify, and spark agrees with robustness.
    #[test]
    fn integer_matrices_floating_matches_exact(rows in 1usize..4, extra in 0usize..4,
                                               entries in proptest::collection::vec(-2i64..3, 28)) {
        let cols = rows + extra;
        let data: Vec<Vec<f64>> = (0..rows).map(|i| (0..cols).map(|j| entries[i * cols + j] as f64).collect()).collect();
        let a = DenseMatrix::<f64>::from_real_rows("int", &data).unwrap();
        let r = maximal_robustness(&a, &EnumerationOptions::new(Mode::Both)).unwrap();
        let s = spark(&a, &EnumerationOptions::new(Mode::Both)).unwrap();
        prop_assert_eq!(s.spark == rows + 1, r.verdict == Verdict::Robust);
        if let Some(w) = &r.witness {
            prop_assert!(verify_witness(&a, w, Mode::Exact).unwrap());
            prop_assert!(verify_witness(&a, w, Mode::Floating).unwrap());
        }
        if r.verdict == Verdict::Robust {
            prop_assert_eq!(r.subsets_checked, binomial(cols, rows).unwrap());
        }
    }

    #[test]
    fn p0_solutions_feasible_and_spark_sufficient(n in proptest::sample::select(vec![5usize, 7, 11]),
                                                  support in proptest::collection::btree_set(0usize..11, 0..3),
                                                  vals in proptest::collection::vec((0.3f64..3.0, 0.0f64..6.28), 2)) {
        let support: Vec<usize> = support.into_iter().filter(|&i| i < n).collect();
        let values: Vec<Complex64> = vals.iter().take(support.len()).map(|&(m, t)| Complex64::from_polar(m, t)).collect();
        let f = SparseSignal::new(n, support, values).unwrap();
        let omega = make_symmetric_omega(n).unwrap();
        let psi = partial_fourier::<f64>(n, &omega).unwrap();
        let y = psi.mul_vec(&f.to_dense()).unwrap();
        let r = p0_solve(&psi, &y, &P0Options::new(f.l0())).unwrap();
        let s_star = r.sparsity_found.unwrap();
        prop_assert!(s_star <= f.l0());
        for g in &r.solutions {
            prop_assert_eq!(g.l0(), s_star);
            let gy = psi.mul_vec(&g.to_dense()).unwrap();
            let res: f64 = gy.iter().zip(&y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(res <= 1e-8);
        }
        for log in r.enumeration_log.iter().filter(|l| l.size < s_star) {
            prop_assert_eq!(log.feasible, 0);
        }
        let sp = spark(&psi, &EnumerationOptions::new(Mode::Exact)).unwrap().spark;
        if 2 * f.l0() < sp {
            prop_assert_eq!(uniqueness_check(&psi, &f, &P0Options::new(0)).unwrap().verdict, Uniqueness::Unique);
        }
    }

    #[test]
    fn singular_values_match_nalgebra(rows in 1usize..6, cols in 1usize..6, seed in proptest::collection::vec(-3.0f64..3.0, 72)) {
        let a = DenseMatrix::<f64>::from_fn("r", rows, cols, |i, j| {
            Complex64::new(seed[2 * (i * cols + j)], seed[2 * (i * cols + j) + 1])
        }).unwrap();
        let ours = singular_values(&a).unwrap();
        let mut theirs: Vec<f64> = a.to_nalgebra().singular_values().iter().copied().collect();
        theirs.sort_by(|x, y| y.total_cmp(x));
        for (o, t) in ours.iter().zip(&theirs) {
            prop_assert!((o - t).abs() <= 1e-10 * (1.0 + t));
        }
    }
}
