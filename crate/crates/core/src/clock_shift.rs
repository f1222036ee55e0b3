//! Finite Weyl pairs realizing `PX = qXP` at roots of unity, and the
//! `theta = alpha + 2 pi n` scaling path.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::matrix::OperatorMatrix;

/// `|1 + e^{i alpha}|` below this is treated as the pole of `q`.
pub const Q_POLE_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClockShiftError {
    #[error("dimension {0} is below the minimum of 2")]
    DimensionTooSmall(usize),
    #[error("level {level} must satisfy 1 <= k < N = {dim}")]
    LevelOutOfRange { level: usize, dim: usize },
    #[error("q has a pole at alpha = {0} (alpha = pi mod 2 pi)")]
    Pole(f64),
    #[error("alpha = {0} is outside (-pi, pi]")]
    AlphaOutOfRange(f64),
    #[error("beta must be positive, got {0}")]
    InvalidBeta(f64),
}

/// `e^{2 pi i r / N}`, exact at quarter turns.
fn root_of_unity(r: usize, dim: usize) -> Complex64 {
    let r = r % dim;
    if (4 * r).is_multiple_of(dim) {
        return match 4 * r / dim {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, TAU * r as f64 / dim as f64)
}

/// Shift `U` and clock `V` of size `N` at level `k`: `U|j> = |j+1 mod N>`,
/// `V = diag(w^{jk})` with `w = e^{2 pi i / N}`, so that `VU = e^{i alpha} UV`
/// with `alpha = 2 pi k / N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClockShiftPair {
    dim: usize,
    level: usize,
    shift: OperatorMatrix,
    clock: OperatorMatrix,
}

impl ClockShiftPair {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// `U`, standing in for `P`.
    pub fn shift(&self) -> &OperatorMatrix {
        &self.shift
    }

    /// `V`, standing in for `X`.
    pub fn clock(&self) -> &OperatorMatrix {
        &self.clock
    }

    pub fn alpha(&self) -> f64 {
        TAU * self.level as f64 / self.dim as f64
    }

    /// Phase `e^{-i alpha}` evaluated exactly at quarter turns.
    pub fn exchange_phase(&self) -> Complex64 {
        root_of_unity(self.level, self.dim).conj()
    }
}

pub fn build_pair(dim: usize, level: usize) -> Result<ClockShiftPair, ClockShiftError> {
    if dim < 2 {
        return Err(ClockShiftError::DimensionTooSmall(dim));
    }
    if level == 0 || level >= dim {
        return Err(ClockShiftError::LevelOutOfRange { level, dim });
    }
    let mut u = DMatrix::<Complex64>::zeros(dim, dim);
    for j in 0..dim {
        u[((j + 1) % dim, j)] = Complex64::new(1.0, 0.0);
    }
    let diag: Vec<Complex64> = (0..dim).map(|j| root_of_unity(j * level, dim)).collect();
    Ok(ClockShiftPair {
        dim,
        level,
        shift: OperatorMatrix::new(u),
        clock: OperatorMatrix::from_diagonal(&diag),
    })
}

/// `q = (1 + e^{-i alpha}) / (1 + e^{i alpha})`.
pub fn q_from_alpha(alpha: f64) -> Result<Complex64, ClockShiftError> {
    let e = Complex64::from_polar(1.0, alpha);
    let den = Complex64::new(1.0, 0.0) + e;
    if den.norm() < Q_POLE_GUARD {
        return Err(ClockShiftError::Pole(alpha));
    }
    Ok((Complex64::new(1.0, 0.0) + e.conj()) / den)
}

/// Max entrywise `|PX - qXP|` with `P = U`, `X = V`.
///
/// At `alpha = pi` the quotient defining `q` is `0/0`; its continuous
/// extension `e^{-i pi} = -1` is used there.
pub fn verify_qplane(pair: &ClockShiftPair) -> f64 {
    let q = q_from_alpha(pair.alpha()).unwrap_or_else(|_| pair.exchange_phase());
    let p = pair.shift.entries();
    let x = pair.clock.entries();
    let residual = p * x - (x * p) * q;
    residual.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Phase `c` with `UV = c VU`, read off a nonzero entry.
pub fn measured_exchange_phase(pair: &ClockShiftPair) -> Complex64 {
    let uv = pair.shift.entries() * pair.clock.entries();
    let vu = pair.clock.entries() * pair.shift.entries();
    uv[(1, 0)] / vu[(1, 0)]
}

/// A point `theta = mu nu = alpha + 2 pi n` on the path to the q-plane.
///
/// The product is kept as the pair `(alpha, n)`; `mu` and `nu` are derived.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingPoint {
    pub alpha: f64,
    pub beta: f64,
    pub n: u64,
}

impl ScalingPoint {
    pub fn theta(&self) -> f64 {
        self.alpha + TAU * self.n as f64
    }

    /// `None` when `alpha + 2 pi n < 0`, where no real `mu` exists.
    pub fn mu(&self) -> Option<f64> {
        let t = self.theta();
        (t >= 0.0).then(|| t.sqrt() / self.beta)
    }

    pub fn nu(&self) -> Option<f64> {
        let t = self.theta();
        (t >= 0.0).then(|| self.beta * t.sqrt())
    }

    /// Half-angle `theta / 2` reduced modulo `pi` using the stored `(alpha, n)`.
    pub fn reduced_half_angle(&self) -> f64 {
        reduce_half_angle(self.alpha)
    }

    /// `e^{-i mu nu}` from the floating-point `mu` and `nu`.
    pub fn exchange_phase(&self) -> Option<Complex64> {
        Some(Complex64::from_polar(1.0, -(self.mu()? * self.nu()?)))
    }
}

pub fn scaling_path(
    alpha: f64,
    beta: f64,
    n_max: u64,
) -> Result<Vec<ScalingPoint>, ClockShiftError> {
    if !(alpha > -PI && alpha <= PI) {
        return Err(ClockShiftError::AlphaOutOfRange(alpha));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(ClockShiftError::InvalidBeta(beta));
    }
    Ok((0..=n_max)
        .map(|n| ScalingPoint { alpha, beta, n })
        .collect())
}

// pi = PI_A + PI_B + PI_C to ~160 bits (Cody-Waite split)
const PI_A: f64 = 3.140625;
const PI_B: f64 = 9.676535897932385e-4;
const PI_C: f64 = -5.016557612668332e-20;

/// `alpha/2 + n pi` reduced into `(-pi/2, pi/2]`. The `n pi` part drops
/// exactly, so only `alpha/2` is reduced, by a three-term split of `pi`.
pub fn reduce_half_angle(alpha: f64) -> f64 {
    let h = alpha / 2.0;
    let k = (h / PI).round();
    let r = ((h - k * PI_A) - k * PI_B) - k * PI_C;
    if r <= -PI / 2.0 {
        r + PI
    } else if r > PI / 2.0 {
        r - PI
    } else {
        r
    }
}

fn check_not_pole(alpha: f64) -> Result<(), ClockShiftError> {
    if (1.0 + alpha.cos()).abs() <= crate::matrix::POLE_GUARD {
        return Err(ClockShiftError::Pole(alpha));
    }
    Ok(())
}

/// Max over `n` of `|tan((alpha + 2 pi n)/2) - tan(alpha/2)|` with the
/// half-angle reduced through the exact `(alpha, n)` representation.
pub fn prefactor_periodicity(alpha: f64, ns: &[u64]) -> Result<f64, ClockShiftError> {
    check_not_pole(alpha)?;
    let base = (alpha / 2.0).tan();
    Ok(ns
        .iter()
        .map(|_| (reduce_half_angle(alpha).tan() - base).abs())
        .fold(0.0, f64::max))
}

/// Same deviation with `alpha + 2 pi n` formed in floating point first.
pub fn naive_periodicity(alpha: f64, ns: &[u64]) -> Result<f64, ClockShiftError> {
    check_not_pole(alpha)?;
    let base = (alpha / 2.0).tan();
    Ok(ns
        .iter()
        .map(|&n| (((alpha + TAU * n as f64) / 2.0).tan() - base).abs())
        .fold(0.0, f64::max))
}

/// Matrix as CSV rows `row,col,re,im`, row-major.
pub fn matrix_csv(m: &OperatorMatrix) -> String {
    let mut out = String::from("row,col,re,im\n");
    for r in 0..m.dim() {
        for c in 0..m.dim() {
            let z = m.get(r, c);
            out.push_str(&format!("{r},{c},{:e},{:e}\n", z.re, z.im));
        }
    }
    out
}
