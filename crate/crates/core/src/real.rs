//! Scalar abstraction for the numeric kernels.
//!
//! Everything geometric is generic over [`Real`], implemented for `f64` and
//! for the double-double type [`DoubleDouble`]. The second one is the
//! higher-precision mode: roughly 105 bits of mantissa, at a 10-20x cost.

use std::fmt::Debug;
use std::ops::{AddAssign, Neg};
use std::str::FromStr;

use num_complex::Complex;
use num_traits::Num;

/// Unevaluated sum of two doubles.
pub type DoubleDouble = qd::Quad;

/// Default slack used by the invariant checks on doubles.
pub const DEFAULT_TOL: f64 = 1e-9;

pub trait Real:
    Scalar<Real = Self> + Copy + PartialOrd + Neg<Output = Self> + AddAssign
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn ln_1p(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn is_finite(self) -> bool;

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// `arcosh(1 + c)` for `c >= 0`, accurate when `c` is tiny.
    fn acosh_1p(self) -> Self {
        let c = self;
        let two = Self::from_f64(2.0);
        (c + (c * (c + two)).sqrt()).ln_1p()
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn ln_1p(self) -> Self {
        f64::ln_1p(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Real for DoubleDouble {
    fn from_f64(x: f64) -> Self {
        qd::Quad::from(x)
    }
    fn to_f64(self) -> f64 {
        self.0 + self.1
    }
    fn abs(self) -> Self {
        if self.0 < 0.0 {
            -self
        } else {
            self
        }
    }
    fn sqrt(self) -> Self {
        qd::Quad::sqrt(self)
    }
    fn exp(self) -> Self {
        qd::Quad::exp(self)
    }
    fn ln(self) -> Self {
        qd::Quad::ln(self)
    }
    fn ln_1p(self) -> Self {
        // ln(u) * x / (u - 1) with u = 1 + x cancels the rounding of u.
        let u = Self::from(1.0) + self;
        let d = u - Self::from(1.0);
        if d.0 == 0.0 {
            self
        } else {
            qd::Quad::ln(u) * self / d
        }
    }
    fn sinh(self) -> Self {
        if Real::abs(self).0 < 0.5 {
            let x2 = self * self;
            let mut term = self;
            let mut sum = self;
            let mut k = 1.0;
            while Real::abs(term).0 > 1e-34 * Real::abs(sum).0 {
                term = term * x2 / Self::from((k + 1.0) * (k + 2.0));
                sum += term;
                k += 2.0;
            }
            sum
        } else {
            let e = qd::Quad::exp(self);
            (e - e.recip()) / Self::from(2.0)
        }
    }
    fn cosh(self) -> Self {
        let e = qd::Quad::exp(self);
        (e + e.recip()) / Self::from(2.0)
    }
    fn is_finite(self) -> bool {
        self.0.is_finite() && self.1.is_finite()
    }
}

/// Matrix entry type: a real or a complex number over some [`Real`].
pub trait Scalar: Clone + Debug + Num + Send + Sync + 'static {
    type Real: Real;
    fn modulus(&self) -> Self::Real;
    fn from_real(x: Self::Real) -> Self;
}

macro_rules! real_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type Real = $t;
            fn modulus(&self) -> $t {
                Real::abs(*self)
            }
            fn from_real(x: $t) -> Self {
                x
            }
        }
    };
}

impl<S: Real> Scalar for Complex<S> {
    type Real = S;
    fn modulus(&self) -> S {
        Real::sqrt(self.re * self.re + self.im * self.im)
    }
    fn from_real(x: S) -> Self {
        Complex::new(x, S::zero())
    }
}

real_scalar!(f64);
real_scalar!(DoubleDouble);

/// Which [`Real`] the numeric kernels run in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    #[default]
    Double,
    DoubleDouble,
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "" | "double" | "f64" => Ok(Precision::Double),
            "double-double" | "dd" | "high" => Ok(Precision::DoubleDouble),
            other => Err(format!("unknown precision mode `{other}`")),
        }
    }
}

pub const PRECISION_ENV: &str = "SYSTOLE_PRECISION";

impl Precision {
    /// Reads [`PRECISION_ENV`]; unset means [`Precision::Double`].
    pub fn from_env() -> Result<Self, String> {
        match std::env::var(PRECISION_ENV) {
            Ok(v) => v.parse(),
            Err(std::env::VarError::NotPresent) => Ok(Precision::Double),
            Err(e) => Err(e.to_string()),
        }
    }
}

/// `x` rounded to `digits` significant digits, positional for moderate
/// exponents and scientific otherwise, without trailing zeros.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}
