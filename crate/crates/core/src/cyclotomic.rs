//! Exact arithmetic in the ring of integers `Z[ω]` of a prime cyclotomic field
//! and an exact rank oracle over `Q(ω)`.
//!
//! An element is stored by its `p - 1` integer coordinates in the power basis
//! `1, ω, …, ω^(p-2)`, reduced modulo `1 + x + … + x^(p-1)`. Coordinates in
//! this basis are unique, so an element is zero exactly when every
//! coordinate is zero.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::constructions::is_prime;
use crate::error::{Error, Result};
use crate::matrix::ExactForm;

/// Largest prime order accepted for DFT-derived matrices.
pub const MAX_EXACT_MODULUS: usize = 13;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloInt {
    coeffs: Vec<BigInt>,
}

impl CycloInt {
    pub fn zero(p: usize) -> Self {
        Self { coeffs: vec![BigInt::zero(); p - 1] }
    }

    pub fn from_integer(p: usize, v: i64) -> Self {
        let mut z = Self::zero(p);
        z.coeffs[0] = BigInt::from(v);
        z
    }

    /// `ω^e` with the exponent taken mod `p`.
    pub fn root_power(p: usize, e: usize) -> Self {
        let e = e % p;
        let mut z = Self::zero(p);
        if e == p - 1 {
            // ω^(p-1) = -(1 + ω + … + ω^(p-2))
            for c in &mut z.coeffs {
                *c = -BigInt::one();
            }
        } else {
            z.coeffs[e] = BigInt::one();
        }
        z
    }

    pub fn modulus(&self) -> usize {
        self.coeffs.len() + 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let p = self.modulus();
        // product modulo x^p - 1, then fold the x^(p-1) coordinate away
        let mut wide = vec![BigInt::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                wide[(i + j) % p] += a * b;
            }
        }
        let top = wide.pop().expect("p >= 2");
        Self {
            coeffs: wide.into_iter().map(|c| c - &top).collect(),
        }
    }

    fn content_gcd(&self, acc: BigInt) -> BigInt {
        self.coeffs.iter().fold(acc, |g, c| g.gcd(c))
    }

    fn div_exact(&mut self, d: &BigInt) {
        for c in &mut self.coeffs {
            *c = &*c / d;
        }
    }

    /// Numeric value as a complex pair, for cross-checks.
    pub fn to_complex(&self) -> num_complex::Complex<f64> {
        let p = self.modulus();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(e, c)| {
                let angle = 2.0 * std::f64::consts::PI * e as f64 / p as f64;
                num_complex::Complex::from_polar(bigint_to_f64(c), angle)
            })
            .sum()
    }
}

fn bigint_to_f64(v: &BigInt) -> f64 {
    num_traits::ToPrimitive::to_f64(v).unwrap_or(if v.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Matrix over `Z[ω]`, row-major.
#[derive(Debug, Clone)]
pub struct CycloMatrix {
    modulus: usize,
    rows: usize,
    cols: usize,
    entries: Vec<CycloInt>,
}

impl CycloMatrix {
    /// Builds the exact matrix for a symbolic description. Columns are
    /// rescaled by nonzero constants so that every entry is an algebraic
    /// integer; rescaling never changes the rank of any column subset.
    pub fn from_form(form: &ExactForm) -> Result<Self> {
        match form {
            ExactForm::PartialFourier { modulus, rows } => {
                let p = check_modulus(*modulus)?;
                check_rows(p, rows)?;
                let entries = rows
                    .iter()
                    .flat_map(|&t| (0..p).map(move |x| CycloInt::root_power(p, t * x)))
                    .collect();
                Ok(Self { modulus: p, rows: rows.len(), cols: p, entries })
            }
            ExactForm::Realified { modulus, rows } => {
                let p = check_modulus(*modulus)?;
                check_rows(p, rows)?;
                let k = (p - 1) / 2;
                let mut entries = Vec::with_capacity(rows.len() * p);
                for &t in rows {
                    entries.push(CycloInt::from_integer(p, 1));
                    for i in 1..=k {
                        // 2·cos column: ω^(ti) + ω^(-ti)
                        let e = t * i % p;
                        entries.push(CycloInt::root_power(p, e).add(&CycloInt::root_power(p, p - e)));
                    }
                    for i in 1..=k {
                        // 2j·sin column: ω^(ti) - ω^(-ti)
                        let e = t * i % p;
                        entries.push(CycloInt::root_power(p, e).sub(&CycloInt::root_power(p, p - e)));
                    }
                }
                Ok(Self { modulus: p, rows: rows.len(), cols: p, entries })
            }
            ExactForm::Integer { rows, cols, entries } => {
                if entries.len() != rows * cols {
                    return Err(Error::Dimension("integer matrix entry count".into()));
                }
                // Q(ω_2) = Q, so integers live in the modulus-2 ring
                Ok(Self {
                    modulus: 2,
                    rows: *rows,
                    cols: *cols,
                    entries: entries.iter().map(|&v| CycloInt::from_integer(2, v)).collect(),
                })
            }
            ExactForm::Realifier { .. } => Err(Error::NotRepresentable("realifier".into())),
        }
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloInt {
        &self.entries[i * self.cols + j]
    }

    pub fn rank(&self) -> usize {
        let all: Vec<usize> = (0..self.cols).collect();
        self.rank_of_columns(&all)
    }

    /// Exact rank of the submatrix formed by `columns`, by fraction-free
    /// elimination with row content removal.
    pub fn rank_of_columns(&self, columns: &[usize]) -> usize {
        let mut m: Vec<Vec<CycloInt>> = (0..self.rows)
            .map(|i| columns.iter().map(|&j| self.get(i, j).clone()).collect())
            .collect();
        let width = columns.len();
        let mut rank = 0;
        for col in 0..width {
            if rank == m.len() {
                break;
            }
            let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, pivot);
            let (head, tail) = m.split_at_mut(rank + 1);
            let pivot_row = &head[rank];
            for row in tail.iter_mut() {
                if row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone();
                for j in col..width {
                    row[j] = pivot_row[col].mul(&row[j]).sub(&factor.mul(&pivot_row[j]));
                }
                let g = row.iter().fold(BigInt::zero(), |g, e| e.content_gcd(g));
                if !g.is_zero() && !g.is_one() {
                    for e in row.iter_mut() {
                        e.div_exact(&g);
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

fn check_modulus(p: usize) -> Result<usize> {
    if !(3..=MAX_EXACT_MODULUS).contains(&p) || !is_prime(p as u64) {
        return Err(Error::InvalidInput(format!(
            "exact oracle supports odd primes up to {MAX_EXACT_MODULUS}, got {p}"
        )));
    }
    Ok(p)
}

fn check_rows(p: usize, rows: &[usize]) -> Result<()> {
    if rows.is_empty() || rows.iter().any(|&t| t >= p) {
        return Err(Error::InvalidInput(format!("row indices must be in [0, {p})")));
    }
    Ok(())
}

/// Exact rank of a symbolically described matrix.
pub fn exact_rank_cyclotomic(form: &ExactForm) -> Result<usize> {
    Ok(CycloMatrix::from_form(form)?.rank())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_powers_sum_to_zero() {
        for p in [3usize, 5, 7, 13] {
            let total = (0..p).fold(CycloInt::zero(p), |acc, e| acc.add(&CycloInt::root_power(p, e)));
            assert!(total.is_zero(), "p={p}");
        }
    }

    #[test]
    fn multiplication_matches_exponent_addition() {
        let p = 7;
        for a in 0..p {
            for b in 0..p {
                let prod = CycloInt::root_power(p, a).mul(&CycloInt::root_power(p, b));
                assert_eq!(prod, CycloInt::root_power(p, a + b), "{a}+{b}");
            }
        }
    }

    #[test]
    fn numeric_value_matches_root_of_unity() {
        let z = CycloInt::root_power(5, 4).add(&CycloInt::root_power(5, 1));
        let expect = 2.0 * (2.0 * std::f64::consts::PI / 5.0).cos();
        assert!((z.to_complex().re - expect).abs() < 1e-12);
        assert!(z.to_complex().im.abs() < 1e-12);
    }

    #[test]
    fn full_dft_has_full_rank() {
        let rank = exact_rank_cyclotomic(&ExactForm::PartialFourier { modulus: 5, rows: (0..5).collect() }).unwrap();
        assert_eq!(rank, 5);
    }

    #[test]
    fn integer_matrix_rank() {
        let form = ExactForm::Integer { rows: 3, cols: 4, entries: vec![1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 1, 0] };
        let m = CycloMatrix::from_form(&form).unwrap();
        assert_eq!(m.rank(), 3);
        assert_eq!(m.rank_of_columns(&[0, 3]), 1);
        let singular = ExactForm::Integer { rows: 2, cols: 2, entries: vec![2, 4, 3, 6] };
        assert_eq!(exact_rank_cyclotomic(&singular).unwrap(), 1);
    }

    #[test]
    fn rejects_out_of_range_modulus() {
        for p in [2usize, 9, 17] {
            let form = ExactForm::PartialFourier { modulus: p, rows: vec![0] };
            assert!(exact_rank_cyclotomic(&form).is_err(), "p={p}");
        }
        assert!(exact_rank_cyclotomic(&ExactForm::Realifier { modulus: 5 }).is_err());
    }
}
