use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::Zero;

use super::scalar::RationalComplex;

/// Exponents `(mu_pow, nu_pow)` of a deformation-parameter monomial.
pub type ParamExponent = (u32, u32);

/// Polynomial in the commuting deformation parameters `mu`, `nu` with exact
/// coefficients. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParamPolynomial {
    terms: BTreeMap<ParamExponent, RationalComplex>,
}

impl ParamPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: RationalComplex) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(mu_pow: u32, nu_pow: u32, c: RationalComplex) -> Self {
        let mut p = Self::default();
        p.add_term((mu_pow, nu_pow), c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ParamExponent, &RationalComplex)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mu_pow: u32, nu_pow: u32) -> RationalComplex {
        self.terms
            .get(&(mu_pow, nu_pow))
            .cloned()
            .unwrap_or_else(RationalComplex::zero)
    }

    /// Lowest total degree `mu_pow + nu_pow` of a stored term.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).min()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    pub(crate) fn add_term(&mut self, exp: ParamExponent, c: RationalComplex) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(existing) => {
                *existing += &c;
                if existing.is_zero() {
                    self.terms.remove(&exp);
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&e, c)| (e, -c)).collect(),
        }
    }

    pub fn scale(&self, s: &RationalComplex) -> Self {
        let mut out = Self::default();
        for (&e, c) in &self.terms {
            out.add_term(e, c * s);
        }
        out
    }

    /// Product with every term of total degree above `max_degree` dropped.
    pub fn mul_truncated(&self, rhs: &Self, max_degree: u32) -> Self {
        let mut out = Self::default();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                if a1 + b1 + a2 + b2 <= max_degree {
                    out.add_term((a1 + a2, b1 + b2), c1 * c2);
                }
            }
        }
        out
    }

    pub fn truncated(&self, max_degree: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|((a, b), _)| a + b <= max_degree)
                .map(|(&e, c)| (e, c.clone()))
                .collect(),
        }
    }

    /// Keeps only the terms accepted by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(u32, u32) -> bool) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|((a, b), _)| keep(*a, *b))
                .map(|(&e, c)| (e, c.clone()))
                .collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&e, c)| (e, c.conj())).collect(),
        }
    }

    pub fn evaluate(&self, mu: f64, nu: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(a, b), c)| c.to_complex64() * mu.powi(a as i32) * nu.powi(b as i32))
            .sum()
    }
}
