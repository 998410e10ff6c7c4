//! Exact scalar types: rationals and complex rationals.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Complex rational coefficient `re + im*i`.
pub type Coeff = Complex<Rational>;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn real(r: Rational) -> Coeff {
    Complex::new(r, Rational::zero())
}

pub fn imag(r: Rational) -> Coeff {
    Complex::new(Rational::zero(), r)
}

pub fn coeff_int(n: i64) -> Coeff {
    real(int(n))
}

/// The imaginary unit.
pub fn i_unit() -> Coeff {
    Complex::new(Rational::zero(), Rational::one())
}

pub fn coeff_pow(c: &Coeff, k: u32) -> Coeff {
    let mut out = Coeff::one();
    for _ in 0..k {
        out = &out * c;
    }
    out
}

pub fn coeff_inv(c: &Coeff) -> Coeff {
    let norm = &c.re * &c.re + &c.im * &c.im;
    Complex::new(&c.re / &norm, -&c.im / &norm)
}

/// Renders a rational as `n` or `n/d`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats a coefficient magnitude so that it can prefix a product in the
/// expression grammar. Returns `(negative, text)` where `text` is empty for a
/// unit real coefficient.
pub(crate) fn fmt_coeff_parts(c: &Coeff) -> (bool, String) {
    if c.im.is_zero() {
        let neg = c.re.is_negative();
        let mag = c.re.abs();
        if mag.is_one() {
            (neg, String::new())
        } else {
            (neg, fmt_rational(&mag))
        }
    } else if c.re.is_zero() {
        let neg = c.im.is_negative();
        let mag = c.im.abs();
        if mag.is_one() {
            (neg, "im".to_string())
        } else {
            (neg, format!("{}*im", fmt_rational(&mag)))
        }
    } else {
        let sign = if c.im.is_negative() { "-" } else { "+" };
        (
            false,
            format!("({} {} {}*im)", fmt_rational(&c.re), sign, fmt_rational(&c.im.abs())),
        )
    }
}

pub struct DisplayCoeff<'a>(pub &'a Coeff);

impl fmt::Display for DisplayCoeff<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (neg, text) = fmt_coeff_parts(self.0);
        let text = if text.is_empty() { "1".to_string() } else { text };
        if neg {
            write!(f, "-{text}")
        } else {
            write!(f, "{text}")
        }
    }
}
