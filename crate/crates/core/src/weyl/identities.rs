//! The deformed operators and the identities they satisfy, all in natural
//! units (`hbar = m = c = 1`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::element::{WeylMonomial, WeylSeriesElement};
use super::param::ParamPolynomial;
use super::scalar::RationalComplex;
use super::series::{inverse_factorial, prefactor_series, tan_coefficients, ScalarSeries};
use super::WeylError;

/// Which generator a single-variable series is built from: `p` paired with
/// `mu`, or `x` paired with `nu`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Momentum,
    Position,
}

impl Side {
    fn param(self, pow: u32) -> (u32, u32) {
        match self {
            Side::Momentum => (pow, 0),
            Side::Position => (0, pow),
        }
    }

    fn generator(self, pow: u32) -> WeylMonomial {
        match self {
            Side::Momentum => WeylMonomial::new(0, pow),
            Side::Position => WeylMonomial::new(pow, 0),
        }
    }
}

/// `sum_k coeff(k) * param^k * gen^(k + gen_offset)` over `k <= degree`.
fn single_side_series(
    side: Side,
    degree: u32,
    gen_offset: u32,
    coeff: impl Fn(u32) -> BigRational,
) -> WeylSeriesElement {
    let mut out = WeylSeriesElement::zero(degree);
    for k in 0..=degree {
        let c = coeff(k);
        if c.is_zero() {
            continue;
        }
        let (a, b) = side.param(k);
        out.add_poly(
            side.generator(k + gen_offset),
            &ParamPolynomial::monomial(a, b, RationalComplex::real(c)),
        );
    }
    out
}

fn even_only(k: u32, f: impl Fn(u32) -> BigRational) -> BigRational {
    if k.is_multiple_of(2) {
        f(k)
    } else {
        BigRational::zero()
    }
}

/// `sinh(mu p) / mu` or `sinh(nu x) / nu`.
pub fn sinh_over_param(side: Side, degree: u32) -> WeylSeriesElement {
    single_side_series(side, degree, 1, |k| {
        even_only(k, |k| inverse_factorial(k + 1))
    })
}

/// `X = sinh(nu x) / nu`.
pub fn deformed_position(degree: u32) -> WeylSeriesElement {
    sinh_over_param(Side::Position, degree)
}

/// `P = sinh(mu p) / mu`.
pub fn deformed_momentum(degree: u32) -> WeylSeriesElement {
    sinh_over_param(Side::Momentum, degree)
}

/// `cosh(mu p)` or `cosh(nu x)`.
pub fn cosh_series(side: Side, degree: u32) -> WeylSeriesElement {
    single_side_series(side, degree, 0, |k| even_only(k, inverse_factorial))
}

/// `exp(mu p)` or `exp(nu x)`.
pub fn exp_series(side: Side, degree: u32) -> WeylSeriesElement {
    single_side_series(side, degree, 0, inverse_factorial)
}

/// `tan(mu p) / mu`, whose commutator with `x` is `-i (1 + mu^2 P^2)`.
pub fn tan_momentum(degree: u32) -> WeylSeriesElement {
    let coeffs = tan_coefficients(degree / 2 + 1);
    single_side_series(Side::Momentum, degree, 1, |k| {
        if k % 2 == 0 {
            coeffs[(k / 2) as usize].clone()
        } else {
            BigRational::zero()
        }
    })
}

/// `C(1/2, k)`.
fn half_binomial(k: u32) -> BigRational {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut acc = BigRational::one();
    for j in 0..k {
        acc = acc * (&half - BigRational::from_integer(BigInt::from(j)))
            / BigRational::from_integer(BigInt::from(j + 1));
    }
    acc
}

/// Principal square root `sqrt(1 + arg)` as the binomial series
/// `sum_k C(1/2, k) arg^k`.
///
/// `arg` must live in a single generator (so all its powers commute) and have
/// no parameter-free part, otherwise the series is not a finite sum.
pub fn binomial_sqrt(arg: &WeylSeriesElement) -> Result<WeylSeriesElement, WeylError> {
    if !(arg.is_momentum_only() || arg.is_position_only()) {
        return Err(WeylError::NotSingleGenerator);
    }
    if arg.min_param_degree() == Some(0) {
        return Err(WeylError::NotNilpotent);
    }
    let degree = arg.degree();
    let mut out = WeylSeriesElement::one(degree);
    let mut power = WeylSeriesElement::one(degree);
    for k in 1..=degree {
        power = power.normal_product(arg)?;
        if power.is_zero() {
            break;
        }
        out = out.add(&power.scale(&RationalComplex::real(half_binomial(k))))?;
    }
    Ok(out)
}

/// `sqrt(1 + mu^2 P^2)` (momentum) or `sqrt(1 + nu^2 X^2)` (position), built
/// from the deformed operators through the binomial series.
pub fn sqrt_one_plus_square(side: Side, degree: u32) -> Result<WeylSeriesElement, WeylError> {
    let op = sinh_over_param(side, degree);
    let (a, b) = side.param(2);
    let arg = op
        .normal_product(&op)?
        .scale_param(&ParamPolynomial::monomial(a, b, RationalComplex::one()));
    binomial_sqrt(&arg)
}

/// Right-hand side `-i c(mu nu) {sqrt(1 + mu^2 P^2), sqrt(1 + nu^2 X^2)}`.
pub fn central_identity_rhs(degree: u32) -> Result<WeylSeriesElement, WeylError> {
    let prefactor = prefactor_series(degree / 2).to_element(degree);
    let anti = sqrt_one_plus_square(Side::Momentum, degree)?
        .anticommutator(&sqrt_one_plus_square(Side::Position, degree)?)?;
    Ok(prefactor
        .normal_product(&anti)?
        .scale(&(-RationalComplex::i())))
}

/// Residual `[P, X] - rhs` of the central identity. Zero when it holds.
pub fn central_identity_residual(degree: u32) -> Result<WeylSeriesElement, WeylError> {
    let lhs = deformed_momentum(degree).commutator(&deformed_position(degree))?;
    lhs.sub(&central_identity_rhs(degree)?)
}

/// First-order form `-i (1 + mu^2 p^2 / 2 + nu^2 x^2 / 2)`.
pub fn first_order_form(degree: u32) -> WeylSeriesElement {
    let half = RationalComplex::ratio(1, 2);
    let inner = WeylSeriesElement::one(degree)
        .add(&WeylSeriesElement::term(
            degree,
            WeylMonomial::new(0, 2),
            ParamPolynomial::monomial(2, 0, half.clone()),
        ))
        .and_then(|e| {
            e.add(&WeylSeriesElement::term(
                degree,
                WeylMonomial::new(2, 0),
                ParamPolynomial::monomial(0, 2, half),
            ))
        })
        .expect("same degree");
    inner.scale(&(-RationalComplex::i()))
}

/// Outcome of comparing the full right-hand side with its first-order form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstOrderCheck {
    pub residual: WeylSeriesElement,
    /// Lowest `(mu, nu)`-degree left in the residual; `None` when it is zero.
    pub lowest_degree: Option<u32>,
}

pub fn first_order_check(degree: u32) -> Result<FirstOrderCheck, WeylError> {
    let residual = central_identity_rhs(degree)?.sub(&first_order_form(degree))?;
    let lowest_degree = residual.min_param_degree();
    Ok(FirstOrderCheck {
        residual,
        lowest_degree,
    })
}

/// Residual of `e^{mu p} e^{nu x} = e^{-i mu nu} e^{nu x} e^{mu p}`.
pub fn weyl_exchange_check(degree: u32) -> Result<WeylSeriesElement, WeylError> {
    let ep = exp_series(Side::Momentum, degree);
    let ex = exp_series(Side::Position, degree);
    let phase = ScalarSeries::exp_scaled(&(-RationalComplex::i()), degree / 2).to_element(degree);
    let lhs = ep.normal_product(&ex)?;
    let rhs = phase.normal_product(&ex.normal_product(&ep)?)?;
    lhs.sub(&rhs)
}

/// `[f(p), x]` and `-i f'(p)` for an `f` in `p` alone.
pub fn free_particle_rule(
    f: &WeylSeriesElement,
) -> Result<(WeylSeriesElement, WeylSeriesElement), WeylError> {
    if !f.is_momentum_only() {
        return Err(WeylError::ContainsPosition);
    }
    let lhs = f.commutator(&WeylSeriesElement::x(f.degree()))?;
    let rhs = f.momentum_derivative()?.scale(&(-RationalComplex::i()));
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deformed_operators_low_degree() {
        assert_eq!(deformed_position(0).to_string(), "x");
        assert_eq!(deformed_position(1).to_string(), "x");
        assert_eq!(deformed_position(2).to_string(), "x + (1/6)*nu^2*x^3");
        assert_eq!(
            deformed_position(4).to_string(),
            "x + (1/6)*nu^2*x^3 + (1/120)*nu^4*x^5"
        );
        assert_eq!(deformed_momentum(0).to_string(), "p");
        assert_eq!(deformed_momentum(2).to_string(), "p + (1/6)*mu^2*p^3");
        assert_eq!(
            deformed_momentum(4).to_string(),
            "p + (1/6)*mu^2*p^3 + (1/120)*mu^4*p^5"
        );
    }

    #[test]
    fn square_roots_low_degree() {
        assert_eq!(
            sqrt_one_plus_square(Side::Momentum, 2).unwrap().to_string(),
            "1 + (1/2)*mu^2*p^2"
        );
        assert_eq!(
            sqrt_one_plus_square(Side::Position, 4).unwrap().to_string(),
            "1 + (1/2)*nu^2*x^2 + (1/24)*nu^4*x^4"
        );
    }

    #[test]
    fn binomial_sqrt_rejects_mixed_arguments() {
        let xp = WeylSeriesElement::term(
            4,
            WeylMonomial::new(1, 1),
            ParamPolynomial::monomial(1, 1, RationalComplex::one()),
        );
        assert_eq!(binomial_sqrt(&xp), Err(WeylError::NotSingleGenerator));
        let mixed = WeylSeriesElement::term(
            4,
            WeylMonomial::new(2, 0),
            ParamPolynomial::monomial(0, 2, RationalComplex::one()),
        )
        .add(&WeylSeriesElement::term(
            4,
            WeylMonomial::new(0, 2),
            ParamPolynomial::monomial(2, 0, RationalComplex::one()),
        ))
        .unwrap();
        assert_eq!(binomial_sqrt(&mixed), Err(WeylError::NotSingleGenerator));
        let unscaled = WeylSeriesElement::monomial(4, 0, 2, RationalComplex::one());
        assert_eq!(binomial_sqrt(&unscaled), Err(WeylError::NotNilpotent));
    }

    #[test]
    fn heisenberg_corner() {
        assert!(central_identity_residual(0).unwrap().is_zero());
        let comm = deformed_momentum(0)
            .commutator(&deformed_position(0))
            .unwrap();
        assert_eq!(comm.to_string(), "-i");
    }

    #[test]
    fn central_identity_low_degrees() {
        assert!(central_identity_residual(2).unwrap().is_zero());
        assert!(central_identity_residual(6).unwrap().is_zero());
    }

    #[test]
    fn first_order_truncated_at_two_is_exact() {
        let check = first_order_check(2).unwrap();
        assert!(check.residual.is_zero());
        assert_eq!(check.lowest_degree, None);
    }

    #[test]
    fn first_order_mu_slice_is_quartic_cosh_term() {
        let check = first_order_check(4).unwrap();
        assert_eq!(check.lowest_degree, Some(4));
        let slice = check.residual.at_nu_zero();
        let expected = WeylSeriesElement::term(
            4,
            WeylMonomial::new(0, 4),
            ParamPolynomial::monomial(4, 0, RationalComplex::ratio(-1, 24) * RationalComplex::i()),
        );
        assert_eq!(slice, expected);
    }

    #[test]
    fn exchange_linear_order() {
        assert!(weyl_exchange_check(1).unwrap().is_zero());
        let ep = exp_series(Side::Momentum, 2);
        let ex = exp_series(Side::Position, 2);
        let diff = ep
            .normal_product(&ex)
            .unwrap()
            .sub(&ex.normal_product(&ep).unwrap())
            .unwrap();
        assert_eq!(
            diff.coefficient(WeylMonomial::ONE).coefficient(1, 1),
            -RationalComplex::i()
        );
    }

    #[test]
    fn free_particle_on_p() {
        let (lhs, rhs) = free_particle_rule(&WeylSeriesElement::p(0)).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.to_string(), "-i");
        assert_eq!(
            free_particle_rule(&WeylSeriesElement::x(0)),
            Err(WeylError::ContainsPosition)
        );
    }

    #[test]
    fn tan_momentum_degree_four() {
        let f = tan_momentum(4);
        assert_eq!(f.to_string(), "p + (1/3)*mu^2*p^3 + (2/15)*mu^4*p^5");
        let (lhs, rhs) = free_particle_rule(&f).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(rhs.to_string(), "-i - i*mu^2*p^2 - (2/3)*i*mu^4*p^4");
    }

    #[test]
    fn half_binomials() {
        assert_eq!(half_binomial(0), BigRational::one());
        assert_eq!(half_binomial(1), BigRational::new(1.into(), 2.into()));
        assert_eq!(half_binomial(2), BigRational::new((-1).into(), 8.into()));
        assert_eq!(half_binomial(3), BigRational::new(1.into(), 16.into()));
    }
}
