use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact complex number with rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl RationalComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den` as a real rational. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn i() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    /// `(-i)^k`
    pub fn neg_i_pow(k: u32) -> Self {
        match k % 4 {
            0 => Self::one(),
            1 => -Self::i(),
            2 => -Self::one(),
            _ => Self::i(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Exact division; `None` when `rhs` is zero.
    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        let den = rhs.norm_sqr();
        if den.is_zero() {
            return None;
        }
        let num = self * &rhs.conj();
        Some(Self {
            re: num.re / &den,
            im: num.im / den,
        })
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self {
            re: &self.re * r,
            im: &self.im * r,
        }
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Zero for RationalComplex {
    fn zero() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for RationalComplex {
    fn one() -> Self {
        Self::real(BigRational::one())
    }
}

impl From<BigRational> for RationalComplex {
    fn from(r: BigRational) -> Self {
        Self::real(r)
    }
}

impl Add for RationalComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl<'a> Add<&'a RationalComplex> for &'a RationalComplex {
    type Output = RationalComplex;
    fn add(self, rhs: &RationalComplex) -> RationalComplex {
        RationalComplex {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl AddAssign<&RationalComplex> for RationalComplex {
    fn add_assign(&mut self, rhs: &RationalComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for RationalComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl<'a> Sub<&'a RationalComplex> for &'a RationalComplex {
    type Output = RationalComplex;
    fn sub(self, rhs: &RationalComplex) -> RationalComplex {
        RationalComplex {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for RationalComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<'a> Mul<&'a RationalComplex> for &'a RationalComplex {
    type Output = RationalComplex;
    fn mul(self, rhs: &RationalComplex) -> RationalComplex {
        RationalComplex {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for RationalComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &RationalComplex {
    type Output = RationalComplex;
    fn neg(self) -> RationalComplex {
        RationalComplex {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

fn write_rational(f: &mut impl fmt::Write, r: &BigRational) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Standalone form `a/b + c/d*i`, with zero parts omitted.
impl fmt::Display for RationalComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(&mut s, self, "", true)?;
        if s.is_empty() {
            s.push('0');
        }
        f.write_str(&s)
    }
}

/// Appends one signed term `coef*factors` to a sum being built in `out`.
///
/// Real coefficients print as `n`, `n/d` or `(n/d)*factors`; purely imaginary
/// ones as `i`, `k*i`, `(n/d)*i`; mixed ones as `(a/b + c/d*i)`. A unit
/// magnitude is dropped in front of factors. Joining signs are ` + `/` - `,
/// and a leading negative term gets a bare `-`.
pub(crate) fn write_term(
    out: &mut String,
    coef: &RationalComplex,
    factors: &str,
    first: bool,
) -> fmt::Result {
    use fmt::Write;
    if coef.is_zero() {
        return Ok(());
    }
    let (negative, body) = if coef.im.is_zero() || coef.re.is_zero() {
        let imaginary = coef.re.is_zero();
        let value = if imaginary { &coef.im } else { &coef.re };
        let mag = value.abs();
        let mut body = String::new();
        let unit = mag.is_one();
        match (imaginary, factors.is_empty()) {
            (false, true) => write_rational(&mut body, &mag)?,
            (false, false) => {
                if unit {
                    body.push_str(factors);
                } else if mag.is_integer() {
                    write!(body, "{}*{}", mag.numer(), factors)?;
                } else {
                    write!(body, "({}/{})*{}", mag.numer(), mag.denom(), factors)?;
                }
            }
            (true, _) => {
                if unit {
                    body.push('i');
                } else if mag.is_integer() {
                    write!(body, "{}*i", mag.numer())?;
                } else {
                    write!(body, "({}/{})*i", mag.numer(), mag.denom())?;
                }
                if !factors.is_empty() {
                    body.push('*');
                    body.push_str(factors);
                }
            }
        }
        (value.is_negative(), body)
    } else {
        let mut body = String::from("(");
        write_rational(&mut body, &coef.re)?;
        body.push_str(if coef.im.is_negative() { " - " } else { " + " });
        write_rational(&mut body, &coef.im.abs())?;
        body.push_str("*i)");
        if !factors.is_empty() {
            body.push('*');
            body.push_str(factors);
        }
        (false, body)
    };
    match (first, negative) {
        (true, true) => out.push('-'),
        (true, false) => {}
        (false, true) => out.push_str(" - "),
        (false, false) => out.push_str(" + "),
    }
    out.push_str(&body);
    Ok(())
}
