//! Values produced once by the exact oracle or a seeded run, frozen here.

use csverify::constructions::{make_random_omega, make_symmetric_omega, partial_fourier, realifier_q, realify};
use csverify::harness::Frame;
use csverify::recovery::{dft_measure, p0_solve, uniqueness_check, P0Options, SparseSignal, Uniqueness};
use csverify::robustness::{exact_subset_rank, maximal_robustness, spark, EnumerationOptions, Mode, Verdict};
use csverify::subsets::next_colex;
use num_complex::Complex64;

#[test]
fn random_omega_n11_m5_seed7() {
    assert_eq!(make_random_omega(11, 5, 7).unwrap().indices(), &[0, 1, 7, 8, 9]);
    assert_eq!(make_random_omega(1024, 512, 42).unwrap().indices()[..8], [1, 2, 3, 4, 6, 9, 10, 13]);
}

#[test]
fn spark_and_witness_table() {
    // (N, frame, spark, robustness witness, spark witness)
    let table: [(usize, Frame, usize, Option<&[usize]>, Option<&[usize]>); 8] = [
        (5, Frame::Psi, 4, None, None),
        (5, Frame::Phi, 2, Some(&[0, 1, 2]), Some(&[3, 4])),
        (7, Frame::Psi, 6, None, None),
        (7, Frame::Phi, 3, Some(&[0, 1, 2, 3, 4]), None),
        (11, Frame::Psi, 8, None, None),
        (11, Frame::Phi, 4, Some(&[0, 1, 2, 3, 4, 5, 6]), None),
        (13, Frame::Psi, 8, None, None),
        (13, Frame::Phi, 4, Some(&[0, 1, 2, 3, 4, 5, 6]), None),
    ];
    for (n, frame, expect_spark, witness, spark_witness) in table {
        let a = frame.build::<f64>(n).unwrap();
        let s = spark(&a, &EnumerationOptions::new(Mode::Exact)).unwrap();
        assert_eq!(s.spark, expect_spark, "N={n} {frame}");
        if let Some(w) = spark_witness {
            assert_eq!(s.witness.as_deref(), Some(w));
        }
        if let Some(w) = &s.witness {
            assert_eq!(exact_subset_rank(&a, w).unwrap(), w.len() - 1, "N={n} {frame}");
        }
        let r = maximal_robustness(&a, &EnumerationOptions::new(Mode::Exact)).unwrap();
        assert_eq!(r.witness.as_deref(), witness, "N={n} {frame}");
        assert_eq!(r.verdict == Verdict::Robust, s.full);
    }
}

#[test]
fn psi_n5_every_three_columns_have_exact_rank_three() {
    let psi = partial_fourier::<f64>(5, &make_symmetric_omega(5).unwrap()).unwrap();
    let mut cols = vec![0, 1, 2];
    let mut seen = 0;
    loop {
        assert_eq!(exact_subset_rank(&psi, &cols).unwrap(), 3, "{cols:?}");
        seen += 1;
        if !next_colex(&mut cols, 5) {
            break;
        }
    }
    assert_eq!(seen, 10);
}

#[test]
fn psi_n5_spike_at_two_is_unique() {
    let omega = make_symmetric_omega(5).unwrap();
    let psi = partial_fourier::<f64>(5, &omega).unwrap();
    let f = SparseSignal::new(5, vec![2], vec![Complex64::new(3.0, 0.0)]).unwrap();
    let y = dft_measure(&f, &omega).unwrap();
    let r = p0_solve(&psi, &y, &P0Options::new(2)).unwrap();
    assert_eq!(r.sparsity_found, Some(1));
    assert_eq!(r.solutions.len(), 1);
    assert!(r.solutions[0].approx_eq(&f, 1e-8));
    assert_eq!(uniqueness_check(&psi, &f, &P0Options::new(1)).unwrap().verdict, Uniqueness::Unique);
}

#[test]
fn phi_witness_gives_competing_sparse_solutions() {
    let n = 5;
    let omega = make_symmetric_omega(n).unwrap();
    let phi = realify(&partial_fourier::<f64>(n, &omega).unwrap(), &realifier_q(n).unwrap()).unwrap();
    let f = SparseSignal::new(n, vec![1, 2], vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
    let u = uniqueness_check(&phi, &f, &P0Options::new(2).real_only(true)).unwrap();
    assert_eq!(u.verdict, Uniqueness::NotUnique);
    let cert = u.certificate.unwrap();
    assert_eq!(cert.support(), &[0, 1]);
    let y = phi.mul_vec(&f.to_dense()).unwrap();
    let g = phi.mul_vec(&cert.to_dense()).unwrap();
    let gap: f64 = y.iter().zip(&g).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    assert!(gap <= 1e-8);
}
