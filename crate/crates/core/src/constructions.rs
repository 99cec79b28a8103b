//! Frequency sets, the partial DFT, the cosine/sine realifier and the Gram
//! blocks of the realified frame.

use num_complex::Complex;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, ExactForm};
use crate::scalar::Real;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Sampled DFT row indices Ω ⊂ {0, …, N-1}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencySet {
    modulus: usize,
    indices: Vec<usize>,
}

impl FrequencySet {
    pub fn new(modulus: usize, indices: Vec<usize>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidInput("modulus must be positive".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("indices must be strictly increasing".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= modulus) {
            return Err(Error::InvalidInput(format!("index {bad} outside [0, {modulus})")));
        }
        Ok(Self { modulus, indices })
    }

    pub fn full(modulus: usize) -> Self {
        Self { modulus, indices: (0..modulus).collect() }
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn size(&self) -> usize {
        self.indices.len()
    }

    /// `k` with `N = 2k + 1`.
    pub fn half_order(&self) -> usize {
        (self.modulus - 1) / 2
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Contains 0 and is closed under `i -> N - i`.
    pub fn is_symmetric(&self) -> bool {
        self.contains(0)
            && self
                .indices
                .iter()
                .all(|&i| self.contains((self.modulus - i) % self.modulus))
    }
}

/// How the half of a symmetric set below `k` is chosen. The other half is
/// always the mirror image and 0 is always present.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipRule {
    /// Odd `i` with `1 <= i <= k`.
    #[default]
    OddMirrored,
    /// Explicit indices in `[1, k]`.
    FromHalf(Vec<usize>),
}

pub fn check_odd_prime(n: usize) -> Result<()> {
    if n < 3 || !is_prime(n as u64) {
        return Err(Error::NotOddPrime(n as u64));
    }
    Ok(())
}

pub fn make_symmetric_omega(n: usize) -> Result<FrequencySet> {
    make_symmetric_omega_with(n, &MembershipRule::OddMirrored)
}

pub fn make_symmetric_omega_with(n: usize, rule: &MembershipRule) -> Result<FrequencySet> {
    check_odd_prime(n)?;
    let k = (n - 1) / 2;
    let half: Vec<usize> = match rule {
        MembershipRule::OddMirrored => (1..=k).filter(|i| i % 2 == 1).collect(),
        MembershipRule::FromHalf(h) => {
            if let Some(&bad) = h.iter().find(|&&i| i == 0 || i > k) {
                return Err(Error::InvalidInput(format!("half index {bad} outside [1, {k}]")));
            }
            h.clone()
        }
    };
    let mut indices: Vec<usize> = std::iter::once(0)
        .chain(half.iter().copied())
        .chain(half.iter().map(|&i| n - i))
        .collect();
    indices.sort_unstable();
    indices.dedup();
    FrequencySet::new(n, indices)
}

/// Expected `|Ω|` for the default rule: `k+1` for even `k`, `k+2` for odd `k`.
pub fn symmetric_omega_size(n: usize) -> usize {
    let k = (n - 1) / 2;
    if k % 2 == 0 {
        k + 1
    } else {
        k + 2
    }
}

/// `m` distinct indices drawn uniformly without replacement.
pub fn make_random_omega(n: usize, m: usize, seed: u64) -> Result<FrequencySet> {
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!("need 1 <= m <= N, got m={m}, N={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices = index::sample(&mut rng, n, m).into_vec();
    indices.sort_unstable();
    FrequencySet::new(n, indices)
}

/// `e^(2πj·e/N)` for `e` in `0..N`.
fn roots_of_unity<T: Real>(n: usize) -> Vec<Complex<T>> {
    let two_pi = T::from_i64(2) * T::pi();
    (0..n)
        .map(|e| {
            let angle = two_pi.clone() * T::from_i64(e as i64) / T::from_i64(n as i64);
            Complex::new(angle.cos(), angle.sin())
        })
        .collect()
}

/// Rows Ω of the unitary N×N DFT, `ω^(t·x)/√N`, rows in ascending frequency.
pub fn partial_fourier<T: Real>(n: usize, omega: &FrequencySet) -> Result<DenseMatrix<T>> {
    if omega.modulus() != n {
        return Err(Error::Dimension(format!(
            "frequency set has modulus {}, expected {n}",
            omega.modulus()
        )));
    }
    if omega.size() == 0 {
        return Err(Error::InvalidInput("empty frequency set".into()));
    }
    let roots = roots_of_unity::<T>(n);
    let scale = T::one() / T::from_i64(n as i64).sqrt();
    let m = DenseMatrix::from_fn(format!("Psi(N={n})"), omega.size(), n, |r, x| {
        let t = omega.indices()[r];
        roots[t * x % n].clone().scale(scale.clone())
    })?;
    Ok(m.with_exact(ExactForm::PartialFourier { modulus: n, rows: omega.indices().to_vec() }))
}

/// The unitary realifier `[[1,0,0],[0,I/√2,J/√2],[0,jI/√2,-jJ/√2]]`.
pub fn realifier_q<T: Real>(n: usize) -> Result<DenseMatrix<T>> {
    if n % 2 == 0 || n < 3 {
        return Err(Error::InvalidInput(format!("realifier needs odd N >= 3, got {n}")));
    }
    let k = (n - 1) / 2;
    let h = T::one() / T::from_i64(2).sqrt();
    let zero = || Complex::new(T::zero(), T::zero());
    let m = DenseMatrix::from_fn(format!("Q(N={n})"), n, n, |r, c| {
        if r == 0 || c == 0 {
            return if r == c { Complex::new(T::one(), T::zero()) } else { zero() };
        }
        // block row (0 = cosine rows 1..=k, 1 = sine rows k+1..), block column likewise
        let (br, i) = if r <= k { (0, r) } else { (1, r - k) };
        let (bc, j) = if c <= k { (0, c) } else { (1, c - k) };
        let hit = if bc == 0 { i == j } else { j == k + 1 - i };
        if !hit {
            return zero();
        }
        match (br, bc) {
            (0, _) => Complex::new(h.clone(), T::zero()),
            (_, 0) => Complex::new(T::zero(), h.clone()),
            _ => Complex::new(T::zero(), -h.clone()),
        }
    })?;
    Ok(m.with_exact(ExactForm::Realifier { modulus: n }))
}

/// `Φ = Ψ Q*`, checked real.
pub fn realify<T: Real>(psi: &DenseMatrix<T>, q: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    if psi.cols() != q.rows() || q.rows() != q.cols() {
        return Err(Error::Dimension(format!(
            "Psi is {}x{}, Q is {}x{}",
            psi.rows(),
            psi.cols(),
            q.rows(),
            q.cols()
        )));
    }
    let n = psi.cols();
    let phi = psi.matmul(&q.adjoint())?.with_label(format!("Phi(N={n})"));
    let phi = phi.into_real()?;
    match (psi.exact_form(), q.exact_form()) {
        (
            Some(ExactForm::PartialFourier { modulus, rows }),
            Some(ExactForm::Realifier { modulus: qm }),
        ) if modulus == qm => {
            let form = ExactForm::Realified { modulus: *modulus, rows: rows.clone() };
            Ok(phi.with_exact(form))
        }
        _ => Ok(phi),
    }
}

/// Φ written directly in its cosine/sine layout:
/// `√(2/N) [√(1/2) | c(t·i) | s(t·i)]`.
pub fn phi_closed_form<T: Real>(n: usize, omega: &FrequencySet) -> Result<DenseMatrix<T>> {
    if n % 2 == 0 || n < 3 {
        return Err(Error::InvalidInput(format!("closed form needs odd N >= 3, got {n}")));
    }
    if omega.modulus() != n {
        return Err(Error::Dimension("frequency set modulus".into()));
    }
    let k = (n - 1) / 2;
    let two_pi = T::from_i64(2) * T::pi();
    let scale = (T::from_i64(2) / T::from_i64(n as i64)).sqrt();
    let half = T::one() / T::from_i64(2).sqrt();
    let m = DenseMatrix::from_fn(format!("Phi_closed(N={n})"), omega.size(), n, |r, col| {
        let t = omega.indices()[r];
        let v = if col == 0 {
            half.clone()
        } else {
            let i = if col <= k { col } else { col - k };
            let angle = two_pi.clone() * T::from_i64((t * i % n) as i64) / T::from_i64(n as i64);
            if col <= k {
                angle.cos()
            } else {
                angle.sin()
            }
        };
        Complex::new(scale.clone() * v, T::zero())
    })?;
    m.into_real()
}

/// Largest violation of `c(i(N-l)) = c(il)` and `s(i(N-l)) = -s(il)` over
/// mirrored row pairs of Φ.
pub fn symmetry_defect<T: Real>(phi: &DenseMatrix<T>, omega: &FrequencySet) -> Result<T> {
    let n = omega.modulus();
    if phi.rows() != omega.size() || phi.cols() != n {
        return Err(Error::Dimension("Phi does not match the frequency set".into()));
    }
    let k = (n - 1) / 2;
    let row_of = |t: usize| omega.indices().binary_search(&t).ok();
    let mut worst = T::zero();
    for (r, &l) in omega.indices().iter().enumerate() {
        if l == 0 {
            continue;
        }
        let Some(mirror) = row_of(n - l) else { continue };
        for i in 1..=k {
            let cos_gap = phi.get(r, i).re.clone() - phi.get(mirror, i).re.clone();
            let sin_sum = phi.get(r, k + i).re.clone() + phi.get(mirror, k + i).re.clone();
            worst = worst.max_of(cos_gap.abs()).max_of(sin_sum.abs());
        }
    }
    Ok(worst)
}

/// `M = ΦᵀΦ` with its diagonal blocks and the coupling between the constant
/// and cosine columns `C₂` and the sine columns `S₂`.
#[derive(Debug, Clone)]
pub struct GramBlocks<T: Real> {
    pub m: DenseMatrix<T>,
    pub m1: DenseMatrix<T>,
    pub m2: DenseMatrix<T>,
    pub offdiag_max: T,
}

pub fn gram_blocks<T: Real>(phi: &DenseMatrix<T>, k: usize) -> Result<GramBlocks<T>> {
    if !phi.is_real() {
        return Err(Error::InvalidInput("gram blocks need a real-tagged matrix".into()));
    }
    if phi.cols() != 2 * k + 1 {
        return Err(Error::Dimension(format!("expected {} columns, got {}", 2 * k + 1, phi.cols())));
    }
    let c2 = phi.column_block(0, k + 1)?;
    let m = phi.transpose().matmul(phi)?.with_label("M");
    let m1 = c2.transpose().matmul(&c2)?.with_label("M1");
    let (m2, offdiag_max) = if k == 0 {
        (DenseMatrix::identity(1).with_label("M2(empty)"), T::zero())
    } else {
        let s2 = phi.column_block(k + 1, 2 * k + 1)?;
        let cross = c2.transpose().matmul(&s2)?;
        (s2.transpose().matmul(&s2)?.with_label("M2"), cross.max_abs())
    };
    Ok(GramBlocks { m, m1, m2, offdiag_max })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_omega_examples() {
        assert_eq!(make_symmetric_omega(5).unwrap().indices(), &[0, 1, 4]);
        assert_eq!(make_symmetric_omega(7).unwrap().indices(), &[0, 1, 3, 4, 6]);
        assert_eq!(make_symmetric_omega(3).unwrap().indices(), &[0, 1, 2]);
        assert_eq!(make_symmetric_omega(11).unwrap().indices(), &[0, 1, 3, 5, 6, 8, 10]);
    }

    #[test]
    fn symmetric_omega_rejects_bad_modulus() {
        for n in [0, 1, 2, 4, 9, 15, 21] {
            assert!(matches!(make_symmetric_omega(n), Err(Error::NotOddPrime(_))), "N={n}");
        }
    }

    #[test]
    fn pluggable_membership_rule() {
        let o = make_symmetric_omega_with(11, &MembershipRule::FromHalf(vec![2, 5])).unwrap();
        assert_eq!(o.indices(), &[0, 2, 5, 6, 9]);
        assert!(o.is_symmetric());
        assert!(make_symmetric_omega_with(11, &MembershipRule::FromHalf(vec![6])).is_err());
    }

    #[test]
    fn frequency_set_validation() {
        assert!(FrequencySet::new(5, vec![0, 0]).is_err());
        assert!(FrequencySet::new(5, vec![3, 1]).is_err());
        assert!(FrequencySet::new(5, vec![5]).is_err());
        assert!(!FrequencySet::new(5, vec![0, 1]).unwrap().is_symmetric());
        assert!(!FrequencySet::new(5, vec![1, 4]).unwrap().is_symmetric());
    }

    #[test]
    fn random_omega_contract() {
        assert_eq!(make_random_omega(8, 8, 3).unwrap().indices(), (0..8).collect::<Vec<_>>().as_slice());
        let a = make_random_omega(1024, 512, 42).unwrap();
        let b = make_random_omega(1024, 512, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.size(), 512);
        assert!(make_random_omega(4, 5, 0).is_err());
        assert!(make_random_omega(4, 0, 0).is_err());
    }

    #[test]
    fn partial_fourier_entry_formula() {
        let omega = make_symmetric_omega(5).unwrap();
        let psi = partial_fourier::<f64>(5, &omega).unwrap();
        let w2 = Complex::from_polar(1.0, 4.0 * std::f64::consts::PI / 5.0);
        let z = psi.get(1, 2);
        assert!((z - w2 / 5f64.sqrt()).norm() < 1e-15);
        assert!(partial_fourier::<f64>(7, &omega).is_err());
    }

    #[test]
    fn realifier_small_case() {
        let q = realifier_q::<f64>(3).unwrap();
        let h = 0.5f64.sqrt();
        let expect = [
            [(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
            [(0.0, 0.0), (h, 0.0), (h, 0.0)],
            [(0.0, 0.0), (0.0, h), (0.0, -h)],
        ];
        for (i, row) in expect.iter().enumerate() {
            for (j, &(re, im)) in row.iter().enumerate() {
                assert!((q.get(i, j) - Complex::new(re, im)).norm() < 1e-15, "({i},{j})");
            }
        }
        assert!(realifier_q::<f64>(4).is_err());
    }

    #[test]
    fn realifier_reversal_block_for_n5() {
        // rows 1..=2 pair e_i with e_{N-i}: row 1 -> columns 1 and 4, row 2 -> 2 and 3
        let q = realifier_q::<f64>(5).unwrap();
        let nz = |r: usize| (0..5).filter(|&c| q.get(r, c).norm() > 0.0).collect::<Vec<_>>();
        assert_eq!(nz(1), vec![1, 4]);
        assert_eq!(nz(2), vec![2, 3]);
        assert_eq!(nz(3), vec![1, 4]);
        assert_eq!(nz(4), vec![2, 3]);
        let qq = q.matmul(&q.adjoint()).unwrap();
        assert!(qq.identity_defect().unwrap() < 1e-15);
    }

    #[test]
    fn realify_entries_and_zero_row() {
        let omega = make_symmetric_omega(5).unwrap();
        let psi = partial_fourier::<f64>(5, &omega).unwrap();
        let phi = realify(&psi, &realifier_q(5).unwrap()).unwrap();
        assert!(phi.is_real());
        let expect = (2.0f64 / 5.0).sqrt() * (2.0 * std::f64::consts::PI / 5.0).cos();
        assert!((phi.get(1, 1).re - expect).abs() < 1e-15);
        // frequency 0 row: √(1/N), then √(2/N) cosines, then zero sines
        let row0: Vec<f64> = phi.row(0).iter().map(|z| z.re).collect();
        let s = (2.0f64 / 5.0).sqrt();
        let want = [(0.2f64).sqrt(), s, s, 0.0, 0.0];
        for (a, b) in row0.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(
            phi.exact_form(),
            Some(&ExactForm::Realified { modulus: 5, rows: vec![0, 1, 4] })
        );
    }

    #[test]
    fn realify_flags_imaginary_residue() {
        // cosine/sine realification is real for any row set, symmetric or not
        let omega = FrequencySet::new(5, vec![0, 1]).unwrap();
        let psi = partial_fourier::<f64>(5, &omega).unwrap();
        let q = realifier_q::<f64>(5).unwrap();
        let phi = realify(&psi, &q).unwrap();
        assert!(phi.is_real());
        // corrupt Q so the product picks up an imaginary part
        let bad_q = DenseMatrix::from_fn("Qbad", 5, 5, |i, j| {
            let z = *q.get(i, j);
            if i == 1 && j == 1 { z + Complex::new(0.0, 0.3) } else { z }
        })
        .unwrap();
        assert!(matches!(realify(&psi, &bad_q), Err(Error::ImaginaryResidue { .. })));
    }

    #[test]
    fn gram_blocks_full_dft_n3_is_identity() {
        let omega = make_symmetric_omega(3).unwrap();
        let psi = partial_fourier::<f64>(3, &omega).unwrap();
        let phi = realify(&psi, &realifier_q(3).unwrap()).unwrap();
        let g = gram_blocks(&phi, 1).unwrap();
        assert!(g.m.identity_defect().unwrap() < 1e-15);
        assert!(g.offdiag_max < 1e-15);
        assert_eq!(g.m1.shape(), (2, 2));
        assert_eq!(g.m2.shape(), (1, 1));
    }

    #[test]
    fn primes_helper() {
        assert_eq!(primes_between(2, 20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(!is_prime(1) && !is_prime(91) && is_prime(199));
    }
}
