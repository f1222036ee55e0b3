use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::param::ParamPolynomial;
use super::scalar::{write_term, RationalComplex};
use super::WeylError;

/// Normal-ordered monomial `x^x_pow p^p_pow` (all positions left of all momenta).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeylMonomial {
    pub x_pow: u32,
    pub p_pow: u32,
}

impl WeylMonomial {
    pub const ONE: Self = Self { x_pow: 0, p_pow: 0 };

    pub fn new(x_pow: u32, p_pow: u32) -> Self {
        Self { x_pow, p_pow }
    }
}

/// Which bracket to take in [`WeylSeriesElement::bracket`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketKind {
    Commutator,
    Anticommutator,
}

/// Element of the Weyl algebra `[p, x] = -i` with coefficients that are
/// polynomials in `(mu, nu)` truncated at total degree `degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylSeriesElement {
    degree: u32,
    terms: BTreeMap<WeylMonomial, ParamPolynomial>,
}

/// `C(b,k) C(c,k) k! (-i)^k`, the weight of the `k`-fold contraction when
/// moving `p^b` past `x^c`.
fn reorder_weight(b: u32, c: u32, k: u32) -> RationalComplex {
    let binom = |n: u32, r: u32| -> BigInt {
        let mut acc = BigInt::one();
        for j in 0..r {
            acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
        }
        acc
    };
    let fact: BigInt = (1..=k).map(BigInt::from).product();
    let w = binom(b, k) * binom(c, k) * fact;
    RationalComplex::neg_i_pow(k).scale(&BigRational::from_integer(w))
}

impl WeylSeriesElement {
    pub fn zero(degree: u32) -> Self {
        Self {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(degree: u32) -> Self {
        Self::scalar(degree, RationalComplex::one())
    }

    pub fn scalar(degree: u32, c: RationalComplex) -> Self {
        Self::term(degree, WeylMonomial::ONE, ParamPolynomial::constant(c))
    }

    pub fn x(degree: u32) -> Self {
        Self::monomial(degree, 1, 0, RationalComplex::one())
    }

    pub fn p(degree: u32) -> Self {
        Self::monomial(degree, 0, 1, RationalComplex::one())
    }

    /// `c * x^x_pow p^p_pow` with a constant coefficient.
    pub fn monomial(degree: u32, x_pow: u32, p_pow: u32, c: RationalComplex) -> Self {
        Self::term(
            degree,
            WeylMonomial::new(x_pow, p_pow),
            ParamPolynomial::constant(c),
        )
    }

    pub fn term(degree: u32, mono: WeylMonomial, coef: ParamPolynomial) -> Self {
        let mut out = Self::zero(degree);
        out.add_poly(mono, &coef);
        out
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WeylMonomial, &ParamPolynomial)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.values().map(|p| p.terms().count()).sum()
    }

    pub fn coefficient(&self, mono: WeylMonomial) -> ParamPolynomial {
        self.terms.get(&mono).cloned().unwrap_or_default()
    }

    /// Lowest total `(mu, nu)`-degree among all stored coefficients.
    pub fn min_param_degree(&self) -> Option<u32> {
        self.terms
            .values()
            .filter_map(ParamPolynomial::min_degree)
            .min()
    }

    pub(crate) fn add_poly(&mut self, mono: WeylMonomial, coef: &ParamPolynomial) {
        let coef = coef.truncated(self.degree);
        if coef.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&mono) {
            Some(existing) => existing.add(&coef),
            None => coef,
        };
        if !merged.is_zero() {
            self.terms.insert(mono, merged);
        }
    }

    fn check_degree(&self, rhs: &Self) -> Result<(), WeylError> {
        if self.degree != rhs.degree {
            return Err(WeylError::DegreeMismatch {
                left: self.degree,
                right: rhs.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, WeylError> {
        self.check_degree(rhs)?;
        let mut out = self.clone();
        for (&m, c) in &rhs.terms {
            out.add_poly(m, c);
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, WeylError> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            degree: self.degree,
            terms: self.terms.iter().map(|(&m, c)| (m, c.neg())).collect(),
        }
    }

    pub fn scale(&self, s: &RationalComplex) -> Self {
        let mut out = Self::zero(self.degree);
        for (&m, c) in &self.terms {
            out.add_poly(m, &c.scale(s));
        }
        out
    }

    /// Multiplies every coefficient by the parameter polynomial `s`.
    pub fn scale_param(&self, s: &ParamPolynomial) -> Self {
        let mut out = Self::zero(self.degree);
        for (&m, c) in &self.terms {
            out.add_poly(m, &c.mul_truncated(s, self.degree));
        }
        out
    }

    /// Exact normal-ordered product, using
    /// `x^a p^b x^c p^d = sum_k C(b,k) C(c,k) k! (-i)^k x^(a+c-k) p^(b+d-k)`.
    pub fn normal_product(&self, rhs: &Self) -> Result<Self, WeylError> {
        self.check_degree(rhs)?;
        let mut out = Self::zero(self.degree);
        for (&m1, c1) in &self.terms {
            for (&m2, c2) in &rhs.terms {
                let coef = c1.mul_truncated(c2, self.degree);
                if coef.is_zero() {
                    continue;
                }
                for k in 0..=m1.p_pow.min(m2.x_pow) {
                    let w = reorder_weight(m1.p_pow, m2.x_pow, k);
                    let mono = WeylMonomial::new(m1.x_pow + m2.x_pow - k, m1.p_pow + m2.p_pow - k);
                    out.add_poly(mono, &coef.scale(&w));
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.degree);
        for _ in 0..n {
            acc = acc.normal_product(self).expect("same degree");
        }
        acc
    }

    /// `ab - ba` or `ab + ba`.
    pub fn bracket(&self, rhs: &Self, kind: BracketKind) -> Result<Self, WeylError> {
        let ab = self.normal_product(rhs)?;
        let ba = rhs.normal_product(self)?;
        match kind {
            BracketKind::Commutator => ab.sub(&ba),
            BracketKind::Anticommutator => ab.add(&ba),
        }
    }

    pub fn commutator(&self, rhs: &Self) -> Result<Self, WeylError> {
        self.bracket(rhs, BracketKind::Commutator)
    }

    pub fn anticommutator(&self, rhs: &Self) -> Result<Self, WeylError> {
        self.bracket(rhs, BracketKind::Anticommutator)
    }

    /// Drops every coefficient term above `degree` and relabels the element.
    pub fn truncate(&self, degree: u32) -> Self {
        let mut out = Self::zero(degree);
        for (&m, c) in &self.terms {
            out.add_poly(m, c);
        }
        out
    }

    /// Keeps only the coefficient terms `mu^a nu^b` accepted by `keep`.
    pub fn filter_params(&self, mut keep: impl FnMut(u32, u32) -> bool) -> Self {
        let mut out = Self::zero(self.degree);
        for (&m, c) in &self.terms {
            out.add_poly(m, &c.filter(&mut keep));
        }
        out
    }

    /// The `nu^0` slice, i.e. the element at `nu = 0`.
    pub fn at_nu_zero(&self) -> Self {
        self.filter_params(|_, b| b == 0)
    }

    pub fn at_mu_zero(&self) -> Self {
        self.filter_params(|a, _| a == 0)
    }

    /// Formal adjoint: `x† = x`, `p† = p`, `i† = -i`, `(ab)† = b† a†`, with
    /// `mu`, `nu` real.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.degree);
        for (&m, c) in &self.terms {
            let p_part = Self::monomial(self.degree, 0, m.p_pow, RationalComplex::one());
            let x_part = Self::monomial(self.degree, m.x_pow, 0, RationalComplex::one());
            let reordered = p_part.normal_product(&x_part).expect("same degree");
            let conj = c.conj();
            for (&m2, c2) in &reordered.terms {
                out.add_poly(m2, &c2.mul_truncated(&conj, self.degree));
            }
        }
        out
    }

    /// True when every monomial is a pure power of `p` (no `x`).
    pub fn is_momentum_only(&self) -> bool {
        self.terms.keys().all(|m| m.x_pow == 0)
    }

    pub fn is_position_only(&self) -> bool {
        self.terms.keys().all(|m| m.p_pow == 0)
    }

    /// Term-by-term `d/dp` of an element in `p` alone.
    pub fn momentum_derivative(&self) -> Result<Self, WeylError> {
        if !self.is_momentum_only() {
            return Err(WeylError::ContainsPosition);
        }
        let mut out = Self::zero(self.degree);
        for (&m, c) in &self.terms {
            if m.p_pow == 0 {
                continue;
            }
            let k = RationalComplex::from_integer(i64::from(m.p_pow));
            out.add_poly(WeylMonomial::new(0, m.p_pow - 1), &c.scale(&k));
        }
        Ok(out)
    }

    /// Coefficients at numeric `(mu, nu)`.
    pub fn evaluate(&self, mu: f64, nu: f64) -> BTreeMap<WeylMonomial, Complex64> {
        self.terms
            .iter()
            .map(|(&m, c)| (m, c.evaluate(mu, nu)))
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }
}

fn factor_string(mu_pow: u32, nu_pow: u32, mono: WeylMonomial) -> String {
    let mut parts = Vec::new();
    for (name, pow) in [
        ("mu", mu_pow),
        ("nu", nu_pow),
        ("x", mono.x_pow),
        ("p", mono.p_pow),
    ] {
        match pow {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{pow}")),
        }
    }
    parts.join("*")
}

/// Canonical text form: terms sorted by `(x_pow, p_pow)` and then by
/// `(mu_pow, nu_pow)`, e.g. `p + (1/6)*mu^2*p^3`.
impl fmt::Display for WeylSeriesElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (&mono, coef) in &self.terms {
            for (&(a, b), c) in coef.terms() {
                let first = out.is_empty();
                write_term(&mut out, c, &factor_string(a, b, mono), first)?;
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}
