use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::element::{WeylMonomial, WeylSeriesElement};
use super::param::ParamPolynomial;
use super::scalar::{write_term, RationalComplex};
use super::WeylError;

/// Truncated power series in the central variable `theta = mu * nu`.
///
/// `degree` counts powers of `theta`; when lifted into a
/// [`WeylSeriesElement`] each `theta^k` becomes `mu^k nu^k` of total degree `2k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarSeries {
    degree: u32,
    coeffs: BTreeMap<u32, RationalComplex>,
}

pub(crate) fn inverse_factorial(n: u32) -> BigRational {
    let f: BigInt = (1..=n).map(BigInt::from).product();
    BigRational::new(BigInt::one(), f)
}

impl ScalarSeries {
    pub fn zero(degree: u32) -> Self {
        Self {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// Builds a series from `coeff(k)` for `k = 0..=degree`.
    pub fn from_fn(degree: u32, mut coeff: impl FnMut(u32) -> RationalComplex) -> Self {
        let mut s = Self::zero(degree);
        for k in 0..=degree {
            s.set(k, coeff(k));
        }
        s
    }

    fn set(&mut self, k: u32, c: RationalComplex) {
        if k > self.degree || c.is_zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, c);
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeff(&self, k: u32) -> RationalComplex {
        self.coeffs
            .get(&k)
            .cloned()
            .unwrap_or_else(RationalComplex::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&u32, &RationalComplex)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let degree = self.degree.min(rhs.degree);
        let mut out = Self::zero(degree);
        for k in 0..=degree {
            let mut acc = RationalComplex::zero();
            for j in 0..=k {
                acc += &(&self.coeff(j) * &rhs.coeff(k - j));
            }
            out.set(k, acc);
        }
        out
    }

    /// Power-series division; the divisor needs a nonzero constant term.
    pub fn div(&self, rhs: &Self) -> Result<Self, WeylError> {
        let lead = rhs.coeff(0);
        if lead.is_zero() {
            return Err(WeylError::SingularDivisor);
        }
        let degree = self.degree.min(rhs.degree);
        let mut out = Self::zero(degree);
        let mut quotient: Vec<RationalComplex> = Vec::with_capacity(degree as usize + 1);
        for k in 0..=degree {
            let mut acc = self.coeff(k);
            for (j, q) in quotient.iter().enumerate() {
                acc = &acc - &(q * &rhs.coeff(k - j as u32));
            }
            let qk = acc.checked_div(&lead).expect("nonzero lead");
            quotient.push(qk.clone());
            out.set(k, qk);
        }
        Ok(out)
    }

    /// Lifts `sum_k c_k theta^k` to the scalar element `sum_k c_k mu^k nu^k`.
    pub fn to_element(&self, degree: u32) -> WeylSeriesElement {
        let mut poly = ParamPolynomial::zero();
        for (&k, c) in &self.coeffs {
            if 2 * k <= degree {
                poly.add_term((k, k), c.clone());
            }
        }
        WeylSeriesElement::term(degree, WeylMonomial::ONE, poly)
    }

    /// `exp(z * theta)` truncated at `theta^degree`.
    pub fn exp_scaled(z: &RationalComplex, degree: u32) -> Self {
        let mut power = RationalComplex::one();
        Self::from_fn(degree, |k| {
            if k > 0 {
                power = &power * z;
            }
            power.scale(&inverse_factorial(k))
        })
    }
}

/// `sin(theta)/theta` to `theta^degree`.
fn sinc_series(degree: u32) -> ScalarSeries {
    ScalarSeries::from_fn(degree, |k| {
        if k % 2 == 1 {
            return RationalComplex::zero();
        }
        let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
        RationalComplex::real(inverse_factorial(k + 1) * BigInt::from(sign))
    })
}

/// `1 + cos(theta)` to `theta^degree`.
fn one_plus_cos_series(degree: u32) -> ScalarSeries {
    ScalarSeries::from_fn(degree, |k| {
        if k == 0 {
            return RationalComplex::from_integer(2);
        }
        if k % 2 == 1 {
            return RationalComplex::zero();
        }
        let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
        RationalComplex::real(inverse_factorial(k) * BigInt::from(sign))
    })
}

/// Taylor series of `sin(theta) / (theta (1 + cos theta))` about `theta = 0`,
/// through `theta^degree`.
pub fn prefactor_series(degree: u32) -> ScalarSeries {
    sinc_series(degree)
        .div(&one_plus_cos_series(degree))
        .expect("1 + cos 0 = 2")
}

/// Odd Taylor coefficients of `tan(u)`: entry `k` is the coefficient of
/// `u^(2k+1)`, for `k = 0..=terms-1`.
pub fn tan_coefficients(terms: u32) -> Vec<BigRational> {
    if terms == 0 {
        return Vec::new();
    }
    let degree = 2 * terms - 1;
    let sin = ScalarSeries::from_fn(degree, |k| {
        if k % 2 == 0 {
            return RationalComplex::zero();
        }
        let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
        RationalComplex::real(inverse_factorial(k) * BigInt::from(sign))
    });
    let cos = ScalarSeries::from_fn(degree, |k| {
        if k % 2 == 1 {
            return RationalComplex::zero();
        }
        let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
        RationalComplex::real(inverse_factorial(k) * BigInt::from(sign))
    });
    let tan = sin.div(&cos).expect("cos 0 = 1");
    (0..terms).map(|k| tan.coeff(2 * k + 1).re).collect()
}

impl fmt::Display for ScalarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (&k, c) in &self.coeffs {
            let factor = match k {
                0 => String::new(),
                1 => "theta".to_string(),
                _ => format!("theta^{k}"),
            };
            let first = out.is_empty();
            write_term(&mut out, c, &factor, first)?;
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}
