//! Real scalar types used by the matrix constructions and the rank machinery.
//!
//! Two precisions are supported: IEEE double (53-bit significand) and an
//! extended type with a 256-bit significand backed by `astro-float`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_traits::{Num, One, Zero};
use serde::{Deserialize, Serialize};

/// Arithmetic mode selectable at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    Extended,
}

impl Precision {
    pub fn significand_bits(self) -> u32 {
        match self {
            Precision::Double => <f64 as Real>::SIGNIFICAND_BITS,
            Precision::Extended => <Ext as Real>::SIGNIFICAND_BITS,
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Double => f.write_str("double"),
            Precision::Extended => f.write_str("extended"),
        }
    }
}

/// The operations the constructions and the Jacobi SVD need from a real field.
pub trait Real:
    Clone + fmt::Debug + PartialOrd + Send + Sync + Num + Neg<Output = Self> + 'static
{
    const SIGNIFICAND_BITS: u32;
    const PRECISION: Precision;

    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
    fn pi() -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    /// Unit roundoff.
    fn epsilon() -> Self;
    /// Largest imaginary part tolerated in a matrix tagged real.
    fn realness_tolerance() -> Self;
    /// Relative singular value cutoff used by numeric rank.
    fn rank_tolerance() -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_f64(v as f64)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    const SIGNIFICAND_BITS: u32 = 53;
    const PRECISION: Precision = Precision::Double;

    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn epsilon() -> Self {
        f64::EPSILON / 2.0
    }
    fn realness_tolerance() -> Self {
        1e-12
    }
    fn rank_tolerance() -> Self {
        1e-10
    }
}

const EXT_BITS: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

/// Extended precision real with a 256-bit significand.
#[derive(Clone)]
pub struct Ext(BigFloat);

impl Ext {
    pub fn inner(&self) -> &BigFloat {
        &self.0
    }

    pub fn from_i64_exact(v: i64) -> Self {
        Ext(BigFloat::from_i64(v, EXT_BITS))
    }
}

impl fmt::Debug for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ext({})", self.0)
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl PartialEq for Ext {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! ext_binop {
    ($tr:ident, $method:ident, $call:ident) => {
        impl $tr for Ext {
            type Output = Ext;
            fn $method(self, rhs: Ext) -> Ext {
                Ext(self.0.$call(&rhs.0, EXT_BITS, RM))
            }
        }
        impl<'a> $tr<&'a Ext> for &'a Ext {
            type Output = Ext;
            fn $method(self, rhs: &'a Ext) -> Ext {
                Ext(self.0.$call(&rhs.0, EXT_BITS, RM))
            }
        }
    };
}

ext_binop!(Add, add, add);
ext_binop!(Sub, sub, sub);
ext_binop!(Mul, mul, mul);
ext_binop!(Div, div, div);

impl Rem for Ext {
    type Output = Ext;
    fn rem(self, rhs: Ext) -> Ext {
        Ext(self.0.rem(&rhs.0))
    }
}

impl Neg for Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        Ext(self.0.neg())
    }
}

impl Zero for Ext {
    fn zero() -> Self {
        Ext(BigFloat::from_word(0, EXT_BITS))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Ext {
    fn one() -> Self {
        Ext(BigFloat::from_word(1, EXT_BITS))
    }
}

impl Num for Ext {
    type FromStrRadixErr = String;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, String> {
        if radix != 10 {
            return Err(format!("unsupported radix {radix}"));
        }
        let v = CONSTS.with(|cc| {
            BigFloat::parse(s, astro_float::Radix::Dec, EXT_BITS, RM, &mut cc.borrow_mut())
        });
        if v.is_nan() {
            Err(format!("cannot parse `{s}`"))
        } else {
            Ok(Ext(v))
        }
    }
}

impl Real for Ext {
    const SIGNIFICAND_BITS: u32 = EXT_BITS as u32;
    const PRECISION: Precision = Precision::Extended;

    fn from_f64(v: f64) -> Self {
        Ext(BigFloat::from_f64(v, EXT_BITS))
    }

    fn from_i64(v: i64) -> Self {
        Ext::from_i64_exact(v)
    }

    fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        let Some((words, _, sign, exponent, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        // mantissa is normalized with its top bit set; value = 0.mantissa * 2^exponent
        let top = words.len();
        let mut frac = 0.0;
        for (depth, w) in words[top.saturating_sub(2)..].iter().rev().enumerate() {
            frac += (*w as f64) * 2f64.powi(-64 * (depth as i32 + 1));
        }
        let v = frac * 2f64.powi(exponent);
        if sign == Sign::Neg {
            -v
        } else {
            v
        }
    }

    fn sqrt(&self) -> Self {
        Ext(self.0.sqrt(EXT_BITS, RM))
    }

    fn abs(&self) -> Self {
        Ext(self.0.abs())
    }

    fn pi() -> Self {
        CONSTS.with(|cc| Ext(cc.borrow_mut().pi(EXT_BITS, RM)))
    }

    fn sin(&self) -> Self {
        CONSTS.with(|cc| Ext(self.0.sin(EXT_BITS, RM, &mut cc.borrow_mut())))
    }

    fn cos(&self) -> Self {
        CONSTS.with(|cc| Ext(self.0.cos(EXT_BITS, RM, &mut cc.borrow_mut())))
    }

    fn epsilon() -> Self {
        Ext(BigFloat::from_word(1, EXT_BITS).div(
            &BigFloat::from_word(2, EXT_BITS).powi(EXT_BITS, EXT_BITS, RM),
            EXT_BITS,
            RM,
        ))
    }

    fn realness_tolerance() -> Self {
        Ext::from_f64(1e-60)
    }

    fn rank_tolerance() -> Self {
        Ext::from_f64(1e-40)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_roundtrips_through_f64() {
        for v in [1.0, -1.5, 0.1, 3.0e-70, 12345.678, -2.0f64.powi(-40)] {
            assert_eq!(Ext::from_f64(v).to_f64(), v);
        }
        assert_eq!(Ext::zero().to_f64(), 0.0);
    }

    #[test]
    fn ext_trig_matches_double() {
        let x = Ext::from_f64(0.7);
        assert!((x.sin().to_f64() - 0.7f64.sin()).abs() < 1e-15);
        assert!((x.cos().to_f64() - 0.7f64.cos()).abs() < 1e-15);
        assert!((Ext::pi().to_f64() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn ext_carries_more_than_double() {
        // (1 + 2^-100) - 1 vanishes in double but not at 256 bits
        let tiny = Ext::from_f64(2f64.powi(-100));
        let diff = (Ext::one() + tiny.clone()) - Ext::one();
        assert_eq!(diff, tiny);
        let two = Ext::from_i64(2);
        let r = two.sqrt();
        let back = &r * &r - two;
        assert!(back.abs() < Ext::from_f64(1e-70));
    }
}
