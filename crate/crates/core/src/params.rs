//! Physical constants, deformation parameters and the maps between them.
//!
//! Every `q` returned here is the leading-order value only; the higher
//! powers of the small parameter are not modelled.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::clock_shift::{scaling_path, ScalingPoint};

/// Expansion parameters above this are flagged as outside the small-parameter
/// regime of a leading-order `q`.
pub const SMALL_PARAMETER_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be non-negative and finite, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("omega ratio nu/mu is undefined at mu = 0")]
    ZeroMu,
    #[error("unknown contraction path `{0}` (expected q-to-1, hbar-to-0 or omega-to-0)")]
    UnknownPath(String),
    #[error("path variable t = {0} is outside (0, 1]")]
    PathVariable(f64),
    #[error("bad quantity `{text}` for {name}: {reason}")]
    Quantity {
        name: &'static str,
        text: String,
        reason: String,
    },
    #[error(transparent)]
    Scaling(#[from] crate::clock_shift::ClockShiftError),
}

fn positive(name: &'static str, value: f64) -> Result<f64, ParamsError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ParamsError::NonPositive { name, value })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<f64, ParamsError> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ParamsError::Negative { name, value })
    }
}

/// Physical constants with the two dimensionless deformation parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParameterSet {
    pub hbar: f64,
    pub m: f64,
    pub c: f64,
    pub omega: Option<f64>,
    pub mu: f64,
    pub nu: f64,
}

impl ParameterSet {
    pub fn new(hbar: f64, m: f64, c: f64, mu: f64, nu: f64) -> Result<Self, ParamsError> {
        Ok(Self {
            hbar: positive("hbar", hbar)?,
            m: positive("m", m)?,
            c: positive("c", c)?,
            omega: None,
            mu: non_negative("mu", mu)?,
            nu: non_negative("nu", nu)?,
        })
    }

    /// `hbar = m = c = 1`.
    pub fn natural(mu: f64, nu: f64) -> Result<Self, ParamsError> {
        Self::new(1.0, 1.0, 1.0, mu, nu)
    }

    pub fn with_omega(mut self, omega: f64) -> Result<Self, ParamsError> {
        self.omega = Some(non_negative("omega", omega)?);
        Ok(self)
    }

    /// Momentum-space scale `delta = mu hbar / (m c)`.
    pub fn delta(&self) -> f64 {
        self.mu * self.hbar / (self.m * self.c)
    }

    /// Position deformation scale `tau = nu m c`, a momentum.
    pub fn tau(&self) -> f64 {
        self.nu * self.m * self.c
    }

    pub fn theta(&self) -> f64 {
        self.mu * self.nu
    }

    /// Leading-order `q = 1 + theta / 2`.
    pub fn q_leading(&self) -> f64 {
        1.0 + self.theta() / 2.0
    }
}

/// `(delta, tau)` for the given parameters.
pub fn derive_scales(
    mu: f64,
    nu: f64,
    hbar: f64,
    m: f64,
    c: f64,
) -> Result<(f64, f64), ParamsError> {
    let p = ParameterSet::new(hbar, m, c, mu, nu)?;
    Ok((p.delta(), p.tau()))
}

/// Leading-order `q` together with the parameter it was expanded in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeadingQ {
    pub q: f64,
    pub expansion_parameter: f64,
    /// Always true: the returned `q` omits every higher-order term.
    pub truncated: bool,
}

impl LeadingQ {
    fn new(q: f64, expansion_parameter: f64) -> Self {
        Self {
            q,
            expansion_parameter,
            truncated: true,
        }
    }

    pub fn in_small_regime(&self) -> bool {
        self.expansion_parameter.abs() <= SMALL_PARAMETER_LIMIT
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Correspondence {
    /// `nu / mu = hbar omega / (m c^2)`.
    pub omega_ratio: f64,
    /// `1 + mu nu / 2`, expanded in `mu nu`.
    pub q: LeadingQ,
}

/// Matches the first-order deformed commutator to the q-oscillator.
pub fn correspondence(mu: f64, nu: f64) -> Result<Correspondence, ParamsError> {
    let nu = non_negative("nu", nu)?;
    let mu = non_negative("mu", mu)?;
    if mu == 0.0 {
        return Err(ParamsError::ZeroMu);
    }
    let theta = mu * nu;
    Ok(Correspondence {
        omega_ratio: nu / mu,
        q: LeadingQ::new(1.0 + theta / 2.0, theta),
    })
}

/// `q = 1 + hbar omega / (m c^2)` to leading order.
pub fn q_of_omega(hbar: f64, omega: f64, m: f64, c: f64) -> Result<LeadingQ, ParamsError> {
    let hbar = positive("hbar", hbar)?;
    let m = positive("m", m)?;
    let c = positive("c", c)?;
    let omega = non_negative("omega", omega)?;
    let ratio = hbar * omega / (m * c * c);
    Ok(LeadingQ::new(1.0 + ratio, ratio))
}

/// Oscillator rescaling of dimensionless `(Q, P)`: `Q -> sqrt(m omega / hbar) Q`,
/// `P -> sqrt(m omega hbar) P`.
pub fn oscillator_replacement(hbar: f64, m: f64, omega: f64) -> Result<(f64, f64), ParamsError> {
    let hbar = positive("hbar", hbar)?;
    let m = positive("m", m)?;
    let omega = positive("omega", omega)?;
    Ok(((m * omega / hbar).sqrt(), (m * omega * hbar).sqrt()))
}

/// Boxes of the deformation diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagramNode {
    Classical,
    Quantum,
    QClassical,
    QQuantum,
    DeltaDeformed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PathName {
    QToOne,
    HbarToZero,
    OmegaToZero,
}

impl PathName {
    pub const ALL: [PathName; 3] = [
        PathName::QToOne,
        PathName::HbarToZero,
        PathName::OmegaToZero,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PathName::QToOne => "q-to-1",
            PathName::HbarToZero => "hbar-to-0",
            PathName::OmegaToZero => "omega-to-0",
        }
    }
}

impl fmt::Display for PathName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PathName {
    type Err = ParamsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PathName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| ParamsError::UnknownPath(s.to_string()))
    }
}

/// A sample on a contraction path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathPoint {
    pub t: f64,
    pub mu: f64,
    pub nu: f64,
    /// Set on the hbar-to-0 path.
    pub scaling: Option<ScalingPoint>,
}

/// One executable arrow of the deformation diagram.
///
/// * `q-to-1`: `(mu, nu) = t (mu0, nu0)`, ending at the Heisenberg algebra.
/// * `hbar-to-0`: the scaling path with `n = round(1/t) - 1`, ending at the
///   q-plane.
/// * `omega-to-0`: `nu = t nu0` at fixed `mu0`, ending at the free
///   relativistic particle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionPath {
    pub name: PathName,
    pub mu0: f64,
    pub nu0: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl ContractionPath {
    pub fn source(&self) -> DiagramNode {
        DiagramNode::DeltaDeformed
    }

    /// Diagram box reached at `t -> 0`; `None` for the free-particle limit,
    /// which has no box of its own.
    pub fn target(&self) -> Option<DiagramNode> {
        match self.name {
            PathName::QToOne => Some(DiagramNode::Quantum),
            PathName::HbarToZero => Some(DiagramNode::QClassical),
            PathName::OmegaToZero => None,
        }
    }

    pub fn endpoint_label(&self) -> &'static str {
        match self.name {
            PathName::QToOne => "Heisenberg algebra [P, X] = -i hbar",
            PathName::HbarToZero => "q-plane PX = qXP",
            PathName::OmegaToZero => "free relativistic particle",
        }
    }

    pub fn at(&self, t: f64) -> Result<PathPoint, ParamsError> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(ParamsError::PathVariable(t));
        }
        match self.name {
            PathName::QToOne => Ok(PathPoint {
                t,
                mu: t * self.mu0,
                nu: t * self.nu0,
                scaling: None,
            }),
            PathName::OmegaToZero => Ok(PathPoint {
                t,
                mu: self.mu0,
                nu: t * self.nu0,
                scaling: None,
            }),
            PathName::HbarToZero => {
                let n = ((1.0 / t).round() as u64).saturating_sub(1);
                let point = scaling_path(self.alpha, self.beta, 0)?[0];
                let point = ScalingPoint { n, ..point };
                Ok(PathPoint {
                    t,
                    mu: point.mu().unwrap_or(f64::NAN),
                    nu: point.nu().unwrap_or(f64::NAN),
                    scaling: Some(point),
                })
            }
        }
    }

    /// The point at scaling index `n` (hbar-to-0 only; `t = 1/(n+1)`).
    pub fn at_index(&self, n: u64) -> Result<PathPoint, ParamsError> {
        self.at(1.0 / (n as f64 + 1.0))
    }
}

/// Path with default base point `mu0 = nu0 = 0.5`, `alpha = beta = 1`.
pub fn contraction_path(name: &str) -> Result<ContractionPath, ParamsError> {
    Ok(ContractionPath {
        name: name.parse()?,
        mu0: 0.5,
        nu0: 0.5,
        alpha: 1.0,
        beta: 1.0,
    })
}

/// Unit tag accepted for each physical input.
pub fn unit_tag(name: &str) -> Option<&'static str> {
    match name {
        "hbar" => Some("J.s"),
        "m" => Some("kg"),
        "c" => Some("m/s"),
        "omega" => Some("1/s"),
        _ => None,
    }
}

/// Parses `"<number>"` or `"<number> <unit>"`, where the unit, if present,
/// must be the one [`unit_tag`] gives for `name`.
pub fn parse_quantity(name: &'static str, text: &str) -> Result<f64, ParamsError> {
    let err = |reason: String| ParamsError::Quantity {
        name,
        text: text.to_string(),
        reason,
    };
    let mut parts = text.split_whitespace();
    let number = parts.next().ok_or_else(|| err("empty".into()))?;
    let value: f64 = number
        .parse()
        .map_err(|_| err(format!("`{number}` is not a number")))?;
    match (parts.next(), parts.next()) {
        (None, _) => Ok(value),
        (Some(unit), None) => match unit_tag(name) {
            Some(expected) if expected == unit => Ok(value),
            Some(expected) => Err(err(format!("expected unit `{expected}`, got `{unit}`"))),
            None => Err(err(format!("{name} is dimensionless"))),
        },
        _ => Err(err("trailing input".into())),
    }
}

/// Formats a quantity with its unit tag, the inverse of [`parse_quantity`].
pub fn format_quantity(name: &str, value: f64) -> String {
    match unit_tag(name) {
        Some(unit) => format!("{value:e} {unit}"),
        None => format!("{value:e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn scales_from_definitions() {
        assert_eq!(derive_scales(1.0, 0.0, 1.0, 1.0, 1.0).unwrap(), (1.0, 0.0));
        assert_eq!(derive_scales(0.0, 1.0, 1.0, 1.0, 1.0).unwrap().0, 0.0);
        assert_eq!(derive_scales(0.0, 7.0, 2.0, 3.0, 5.0).unwrap().1, 105.0);
        assert_eq!(derive_scales(0.0, 0.0, 2.0, 3.0, 5.0).unwrap(), (0.0, 0.0));
        assert!(matches!(
            derive_scales(1.0, 1.0, 0.0, 1.0, 1.0),
            Err(ParamsError::NonPositive { name: "hbar", .. })
        ));
        assert!(derive_scales(1.0, 1.0, 1.0, -1.0, 1.0).is_err());
        assert!(derive_scales(1.0, 1.0, 1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn correspondence_examples() {
        let sym = correspondence(0.3, 0.3).unwrap();
        assert_eq!(sym.omega_ratio, 1.0);
        let c = correspondence(0.2, 0.01).unwrap();
        assert_relative_eq!(c.omega_ratio, 0.05, max_relative = 1e-15);
        assert_relative_eq!(c.q.q, 1.001, max_relative = 1e-15);
        assert!(c.q.truncated);
        let off = correspondence(0.7, 0.0).unwrap();
        assert_eq!(off.omega_ratio, 0.0);
        assert_eq!(off.q.q, 1.0);
        assert_eq!(correspondence(0.0, 0.2), Err(ParamsError::ZeroMu));
    }

    #[test]
    fn q_of_omega_examples() {
        assert_eq!(q_of_omega(1.0, 0.0, 1.0, 1.0).unwrap().q, 1.0);
        let unit = q_of_omega(2.0, 4.5, 1.0, 3.0).unwrap();
        assert_eq!(unit.q, 2.0);
        assert!(!unit.in_small_regime());
        let small = q_of_omega(1.0, 0.01, 1.0, 1.0).unwrap();
        assert_relative_eq!(small.q, 1.01, max_relative = 1e-15);
        assert!(small.in_small_regime());
        assert!(q_of_omega(1.0, 0.01, 0.0, 1.0).is_err());
    }

    #[test]
    fn oscillator_replacement_scales() {
        let (qs, ps) = oscillator_replacement(1.0, 4.0, 1.0).unwrap();
        assert_eq!((qs, ps), (2.0, 2.0));
        let (qs, ps) = oscillator_replacement(4.0, 1.0, 1.0).unwrap();
        assert_eq!((qs, ps), (0.5, 2.0));
    }

    #[test]
    fn path_names_round_trip() {
        for p in PathName::ALL {
            assert_eq!(p.as_str().parse::<PathName>().unwrap(), p);
        }
        assert!(matches!(
            contraction_path("c-to-inf"),
            Err(ParamsError::UnknownPath(_))
        ));
    }

    #[test]
    fn path_parameterizations() {
        let q1 = contraction_path("q-to-1").unwrap();
        let pt = q1.at(0.5).unwrap();
        assert_eq!((pt.mu, pt.nu), (0.25, 0.25));
        assert_eq!(q1.target(), Some(DiagramNode::Quantum));

        let om = contraction_path("omega-to-0").unwrap();
        let pt = om.at(0.1).unwrap();
        assert_eq!(pt.mu, 0.5);
        assert_relative_eq!(pt.nu, 0.05, max_relative = 1e-15);
        assert_eq!(om.target(), None);

        let hb = contraction_path("hbar-to-0").unwrap();
        assert_eq!(hb.at(1.0).unwrap().scaling.unwrap().n, 0);
        assert_eq!(hb.at_index(3).unwrap().scaling.unwrap().n, 3);
        assert_eq!(hb.target(), Some(DiagramNode::QClassical));
        assert_eq!(hb.source(), DiagramNode::DeltaDeformed);

        assert!(matches!(q1.at(0.0), Err(ParamsError::PathVariable(_))));
        assert!(matches!(q1.at(1.5), Err(ParamsError::PathVariable(_))));
    }

    #[test]
    fn quantities_with_units() {
        assert_eq!(
            parse_quantity("hbar", "1.054571817e-34 J.s").unwrap(),
            1.054571817e-34
        );
        assert_eq!(parse_quantity("m", "2").unwrap(), 2.0);
        assert!(parse_quantity("c", "3e8 kg").is_err());
        assert!(parse_quantity("mu", "0.1 kg").is_err());
        assert!(parse_quantity("omega", "").is_err());
        assert!(parse_quantity("omega", "1 1/s extra").is_err());
        for (name, v) in [
            ("hbar", 1.054571817e-34),
            ("m", 9.1093837e-31),
            ("c", 299792458.0),
            ("omega", 0.0),
        ] {
            assert_eq!(parse_quantity(name, &format_quantity(name, v)).unwrap(), v);
        }
    }
}
