//! Dense complex matrices at a declared precision.

use num_complex::Complex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Precision, Real};

/// Symbolic description of a matrix whose entries live in a cyclotomic ring,
/// up to a nonzero scale per column. Used by the exact rank oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExactForm {
    /// Rows `rows` of the unnormalized DFT of order `modulus`: entry `ω^(t·x)`.
    PartialFourier { modulus: usize, rows: Vec<usize> },
    /// Cosine/sine realification of the partial DFT on `rows`.
    Realified { modulus: usize, rows: Vec<usize> },
    /// The unitary realifier itself. Not rank-representable; only tracked so
    /// that the product with a partial DFT can be recognized.
    Realifier { modulus: usize },
    /// Plain integer matrix, row-major.
    Integer {
        rows: usize,
        cols: usize,
        entries: Vec<i64>,
    },
}

/// Row-major complex matrix. Immutable once built.
#[derive(Debug, Clone)]
pub struct DenseMatrix<T: Real> {
    label: String,
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
    real: bool,
    exact: Option<ExactForm>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn new(label: impl Into<String>, rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("matrix must be nonempty".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self {
            label: label.into(),
            rows,
            cols,
            data,
            real: false,
            exact: None,
        })
    }

    pub fn from_fn(
        label: impl Into<String>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex<T>,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(label, rows, cols, data)
    }

    /// Real matrix from rows of doubles. Integer-valued input also gets an
    /// exact form, so the cyclotomic oracle can check it.
    pub fn from_real_rows(label: impl Into<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let data = flat
            .iter()
            .map(|&v| Complex::new(T::from_f64(v), T::zero()))
            .collect();
        let mut m = Self::new(label, n_rows, n_cols, data)?;
        m.real = true;
        if flat.iter().all(|v| v.fract() == 0.0 && v.abs() < 2f64.powi(53)) {
            m.exact = Some(ExactForm::Integer {
                rows: n_rows,
                cols: n_cols,
                entries: flat.iter().map(|&v| v as i64).collect(),
            });
        }
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::from_real_rows(format!("I{n}"), &rows).expect("identity is well formed")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_exact(mut self, exact: ExactForm) -> Self {
        self.exact = Some(exact);
        self
    }

    /// Tags the matrix as real after checking the imaginary residue.
    pub fn into_real(mut self) -> Result<Self> {
        let residue = self.max_imag();
        if residue > T::realness_tolerance() {
            return Err(Error::ImaginaryResidue {
                residue: residue.to_f64(),
                tolerance: T::realness_tolerance().to_f64(),
            });
        }
        self.real = true;
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn precision(&self) -> Precision {
        T::PRECISION
    }

    pub fn exact_form(&self) -> Option<&ExactForm> {
        self.exact.as_ref()
    }

    pub fn get(&self, i: usize, j: usize) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn max_imag(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc.max_of(z.im.abs()))
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc.max_of(modulus(z)))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::from_fn(format!("{}*", self.label), self.cols, self.rows, |i, j| {
            self.get(j, i).conj()
        })
        .expect("nonempty");
        out.real = self.real;
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::from_fn(format!("{}^T", self.label), self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
        .expect("nonempty");
        out.real = self.real;
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut data = vec![Complex::new(T::zero(), T::zero()); self.rows * rhs.cols];
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.re.is_zero() && a.im.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    data[idx] = data[idx].clone() + a.clone() * rhs.get(l, j).clone();
                }
            }
        }
        let mut out = Self::new(format!("{}·{}", self.label, rhs.label), self.rows, rhs.cols, data)?;
        out.real = self.real && rhs.real;
        Ok(out)
    }

    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        if let Some(&bad) = columns.iter().find(|&&c| c >= self.cols) {
            return Err(Error::Dimension(format!("column {bad} out of range for {} columns", self.cols)));
        }
        let mut out = Self::from_fn(format!("{}[:,{columns:?}]", self.label), self.rows, columns.len(), |i, j| {
            self.get(i, columns[j]).clone()
        })?;
        out.real = self.real;
        Ok(out)
    }

    /// Contiguous column block `start..end`.
    pub fn column_block(&self, start: usize, end: usize) -> Result<Self> {
        let cols: Vec<usize> = (start..end).collect();
        self.select_columns(&cols)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension("shape mismatch in comparison".into()));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max_of(modulus(&(a.clone() - b.clone())))))
    }

    /// `max |self - I|` for a square matrix.
    pub fn identity_defect(&self) -> Result<T> {
        if self.rows != self.cols {
            return Err(Error::Dimension("identity defect needs a square matrix".into()));
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let mut z = self.get(i, j).clone();
                if i == j {
                    z.re = z.re - T::one();
                }
                worst = worst.max_of(modulus(&z));
            }
        }
        Ok(worst)
    }

    /// Same matrix rounded to double precision.
    pub fn to_f64(&self) -> DenseMatrix<f64> {
        DenseMatrix {
            label: self.label.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(z.re.to_f64(), z.im.to_f64()))
                .collect(),
            real: self.real,
            exact: self.exact.clone(),
        }
    }
}

impl DenseMatrix<f64> {
    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex<f64>> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn mul_vec(&self, x: &[Complex<f64>]) -> Result<Vec<Complex<f64>>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }
}

pub fn modulus<T: Real>(z: &Complex<T>) -> T {
    (z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()).sqrt()
}
