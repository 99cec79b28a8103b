//! Singular values by one-sided (Hestenes) Jacobi rotations.
//!
//! Works at any [`Real`] precision, which is what lets the rank checks run at
//! 256 bits. Only singular values are produced; the rotations applied to the
//! columns are discarded.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::{modulus, DenseMatrix};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Singular values in descending order. Length is `min(rows, cols)`.
pub fn singular_values<T: Real>(a: &DenseMatrix<T>) -> Result<Vec<T>> {
    // rotate whichever side has fewer vectors
    let mut cols: Vec<Vec<Complex<T>>> = if a.cols() <= a.rows() {
        (0..a.cols()).map(|j| a.column(j)).collect()
    } else {
        (0..a.rows()).map(|i| a.row(i).iter().map(|z| z.conj()).collect()).collect()
    };
    let k = cols.len();
    let tol = T::epsilon() * T::from_i64(cols[0].len() as i64).sqrt();
    // columns reduced to roundoff are treated as zero
    let frob_sq = cols.iter().flatten().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    let floor = T::from_i64(64 * (k as i64 + 1)) * T::epsilon();
    let negligible = floor.clone() * floor * frob_sq;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let (alpha, beta, gamma) = gram_entries(&cols[p], &cols[q]);
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let g = modulus(&gamma);
                if g <= tol.clone() * (alpha.clone() * beta.clone()).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = Complex::new(gamma.re.clone() / g.clone(), -(gamma.im.clone() / g.clone()));
                let zeta = (beta - alpha) / (T::from_i64(2) * g);
                let root = (T::one() + zeta.clone() * zeta.clone()).sqrt();
                let t = if zeta < T::zero() {
                    -(T::one() / (zeta.abs() + root))
                } else {
                    T::one() / (zeta + root)
                };
                let c = T::one() / (T::one() + t.clone() * t.clone()).sqrt();
                let s = c.clone() * t;
                let (left, right) = cols.split_at_mut(q);
                let wp = &mut left[p];
                let wq = &mut right[0];
                for (x, y) in wp.iter_mut().zip(wq.iter_mut()) {
                    let yh = y.clone() * phase.clone();
                    let new_x = x.clone().scale(c.clone()) - yh.clone().scale(s.clone());
                    let new_y = x.clone().scale(s.clone()) + yh.scale(c.clone());
                    *x = new_x;
                    *y = new_y;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdNoConvergence(a.label().to_string()));
    }

    let mut sv: Vec<T> = cols
        .iter()
        .map(|c| c.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt())
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).expect("finite singular values"));
    Ok(sv)
}

fn gram_entries<T: Real>(p: &[Complex<T>], q: &[Complex<T>]) -> (T, T, Complex<T>) {
    let mut alpha = T::zero();
    let mut beta = T::zero();
    let mut gamma = Complex::new(T::zero(), T::zero());
    for (x, y) in p.iter().zip(q) {
        alpha = alpha + x.norm_sqr();
        beta = beta + y.norm_sqr();
        gamma = gamma + x.conj() * y.clone();
    }
    (alpha, beta, gamma)
}

/// Number of singular values above `tau_rank` times the largest one.
pub fn numeric_rank<T: Real>(a: &DenseMatrix<T>, tau_rank: &T) -> Result<usize> {
    let sv = singular_values(a)?;
    Ok(rank_from_singular_values(&sv, tau_rank))
}

pub fn rank_from_singular_values<T: Real>(sv: &[T], tau_rank: &T) -> usize {
    let Some(top) = sv.first() else { return 0 };
    if top.is_zero() {
        return 0;
    }
    let cutoff = tau_rank.clone() * top.clone();
    sv.iter().filter(|s| **s > cutoff).count()
}
