//! Floating-point engine on the truncated harmonic-oscillator basis.
//!
//! Position and momentum are the usual ladder combinations
//! `x = (a + a†)/√2`, `p = i(a† − a)/√2` cut to the lowest `N` number states.
//! Functions of Hermitian matrices go through a full eigendecomposition.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

/// Relative Hermiticity tolerance, scaled by the largest entry magnitude.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Largest admissible `|param| * sqrt(2N)` before exponentiating.
pub const OVERFLOW_GUARD: f64 = 25.0;
/// Refuse the prefactor once `1 + cos(theta)` drops below this.
pub const POLE_GUARD: f64 = 1e-9;
/// Eigenvalue floor for the principal square root.
pub const POSITIVITY_TOL: f64 = 1e-12;

const POWER_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("dimension {0} is below the minimum of 2")]
    DimensionTooSmall(usize),
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("deformation parameters must be non-negative (mu = {mu}, nu = {nu})")]
    NegativeParameter { mu: f64, nu: f64 },
    #[error("sinh argument bound {0} exceeds the overflow guard")]
    OverflowGuard(f64),
    #[error("prefactor pole: 1 + cos({0}) is numerically zero")]
    PrefactorPole(f64),
    #[error("interior dimension {interior} must satisfy 2 <= M < N = {dim}")]
    InteriorOutOfRange { interior: usize, dim: usize },
    #[error(
        "scan dimensions must be non-empty, strictly increasing and above the interior dimension"
    )]
    InvalidScan,
}

/// Dense complex matrix with a Hermiticity flag.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<Complex64>,
    hermitian: bool,
}

impl OperatorMatrix {
    /// Wraps `entries`, setting the flag by checking Hermiticity.
    pub fn new(entries: DMatrix<Complex64>) -> Self {
        let hermitian = entries.is_square() && hermiticity_defect(&entries) <= tolerance(&entries);
        Self { entries, hermitian }
    }

    /// Wraps `entries`, failing when they are not Hermitian.
    pub fn hermitian(entries: DMatrix<Complex64>) -> Result<Self, MatrixError> {
        let m = Self::new(entries);
        if !m.hermitian {
            return Err(MatrixError::NotHermitian(hermiticity_defect(&m.entries)));
        }
        Ok(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
            hermitian: true,
        }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.norm()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::new(&self.entries * &rhs.entries)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(&self.entries + &rhs.entries)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::new(&self.entries - &rhs.entries)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(&self.entries * s)
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        Self::new(&self.entries * &rhs.entries - &rhs.entries * &self.entries)
    }

    pub fn anticommutator(&self, rhs: &Self) -> Self {
        Self::new(&self.entries * &rhs.entries + &rhs.entries * &self.entries)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            hermitian: self.hermitian,
        }
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Top-left `m x m` block (the projection onto the lowest `m` states).
    pub fn interior(&self, m: usize) -> Self {
        Self::new(self.entries.view((0, 0), (m, m)).into_owned())
    }
}

fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn tolerance(m: &DMatrix<Complex64>) -> f64 {
    HERMITICITY_TOL * m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Truncated oscillator position and momentum, returned as `(x, p)`.
pub fn oscillator_xp(dim: usize) -> Result<(OperatorMatrix, OperatorMatrix), MatrixError> {
    if dim < 2 {
        return Err(MatrixError::DimensionTooSmall(dim));
    }
    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let ad = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = (&a + &ad) * Complex64::new(s, 0.0);
    let p = (&ad - &a) * Complex64::new(0.0, s);
    Ok((
        OperatorMatrix {
            entries: x,
            hermitian: true,
        },
        OperatorMatrix {
            entries: p,
            hermitian: true,
        },
    ))
}

/// Scalar function applied through [`hermitian_function`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralFunction {
    Sinh,
    Cosh,
    PrincipalSqrt,
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub struct Eigensystem {
    pub values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl Eigensystem {
    pub fn new(h: &OperatorMatrix) -> Result<Self, MatrixError> {
        if !h.hermitian {
            return Err(MatrixError::NotHermitian(hermiticity_defect(&h.entries)));
        }
        let eig = SymmetricEigen::new(h.entries.clone());
        let mut order: Vec<usize> = (0..h.dim()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(h.dim(), h.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Self { values, vectors })
    }

    /// `V diag(f(λ)) V†`, symmetrized so the result is Hermitian to the bit.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> OperatorMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (c, &lambda) in self.values.iter().enumerate() {
            let fl = f(lambda);
            for r in 0..n {
                scaled[(r, c)] *= fl;
            }
        }
        let m = &scaled * self.vectors.adjoint();
        let sym = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        OperatorMatrix {
            entries: sym,
            hermitian: true,
        }
    }
}

/// Spectral calculus `f(H)` for Hermitian `H`.
pub fn hermitian_function(
    h: &OperatorMatrix,
    f: SpectralFunction,
) -> Result<OperatorMatrix, MatrixError> {
    let eig = Eigensystem::new(h)?;
    match f {
        SpectralFunction::Sinh => Ok(eig.apply(f64::sinh)),
        SpectralFunction::Cosh => Ok(eig.apply(f64::cosh)),
        SpectralFunction::PrincipalSqrt => {
            let min = eig.values.first().copied().unwrap_or(0.0);
            if min <= POSITIVITY_TOL {
                return Err(MatrixError::NotPositiveDefinite(min));
            }
            Ok(eig.apply(f64::sqrt))
        }
    }
}

fn check_guard(param: f64, dim: usize) -> Result<(), MatrixError> {
    let bound = param * (2.0 * dim as f64).sqrt();
    if bound > OVERFLOW_GUARD {
        return Err(MatrixError::OverflowGuard(bound));
    }
    Ok(())
}

/// `sinh(param * H) / param`, or `H` itself at `param = 0`.
fn sinh_deform(h: &OperatorMatrix, param: f64) -> Result<OperatorMatrix, MatrixError> {
    if param == 0.0 {
        return Ok(h.clone());
    }
    Ok(Eigensystem::new(h)?.apply(|l| (param * l).sinh() / param))
}

/// Deformed momentum and position `(P, X)` with `P = sinh(mu p)/mu`,
/// `X = sinh(nu x)/nu`.
pub fn deformed_ops(
    dim: usize,
    mu: f64,
    nu: f64,
) -> Result<(OperatorMatrix, OperatorMatrix), MatrixError> {
    if !(mu >= 0.0 && nu >= 0.0) {
        return Err(MatrixError::NegativeParameter { mu, nu });
    }
    check_guard(mu, dim)?;
    check_guard(nu, dim)?;
    let (x, p) = oscillator_xp(dim)?;
    Ok((sinh_deform(&p, mu)?, sinh_deform(&x, nu)?))
}

/// `sin θ / (θ (1 + cos θ))`, continued to `1/2` at `θ = 0`.
pub fn prefactor(theta: f64) -> Result<f64, MatrixError> {
    if theta == 0.0 {
        return Ok(0.5);
    }
    let denom = 1.0 + theta.cos();
    if denom <= POLE_GUARD {
        return Err(MatrixError::PrefactorPole(theta));
    }
    Ok(theta.sin() / (theta * denom))
}

/// Finite-dimensional residual of the central commutator identity.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub dim: usize,
    pub interior_dim: usize,
    pub mu: f64,
    pub nu: f64,
    pub residual_frobenius: f64,
    pub residual_spectral: f64,
    /// `‖sqrt(1 + mu² P²) − cosh(mu p)‖_F`.
    pub sqrt_cosh_xcheck: f64,
    /// `‖cosh(mu p)‖_F`, the scale for the cross-check above.
    pub cosh_frobenius: f64,
}

impl ResidualReport {
    pub const CSV_HEADER: &'static str = "N,M,mu,nu,res_fro,res_spec,sqrt_cosh_xcheck";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:e},{:e},{:e}",
            self.dim,
            self.interior_dim,
            self.mu,
            self.nu,
            self.residual_frobenius,
            self.residual_spectral,
            self.sqrt_cosh_xcheck
        )
    }
}

/// Largest singular value of `m` by power iteration on `m† m`.
pub fn spectral_norm_estimate(m: &OperatorMatrix) -> f64 {
    let a = m.entries();
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    let gram = a.adjoint() * a;
    let mut v = DVector::from_element(n, Complex64::new(1.0 / (n as f64).sqrt(), 0.0));
    let mut lambda = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let w = &gram * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm;
        v = w / Complex64::new(norm, 0.0);
    }
    lambda.sqrt()
}

/// Default interior dimension `max(4, N/4)`.
pub fn default_interior(dim: usize) -> usize {
    (dim / 4).max(4)
}

/// Residual of `[P, X] = −i c(μν) {√(1+μ²P²), √(1+ν²X²)}` projected onto the
/// lowest `interior` basis states.
pub fn projected_residual(
    dim: usize,
    interior: usize,
    mu: f64,
    nu: f64,
) -> Result<ResidualReport, MatrixError> {
    if interior < 2 || interior >= dim {
        return Err(MatrixError::InteriorOutOfRange { interior, dim });
    }
    let c = prefactor(mu * nu)?;
    let (big_p, big_x) = deformed_ops(dim, mu, nu)?;
    let (_, p) = oscillator_xp(dim)?;

    let sqrt_side = |op: &OperatorMatrix, param: f64| -> Result<OperatorMatrix, MatrixError> {
        if param == 0.0 {
            return Ok(OperatorMatrix::identity(dim));
        }
        let arg = OperatorMatrix::identity(dim)
            .add(&op.mul(op).scale(Complex64::new(param * param, 0.0)));
        hermitian_function(
            &OperatorMatrix::hermitian(arg.into_entries())?,
            SpectralFunction::PrincipalSqrt,
        )
    };
    let sqrt_p = sqrt_side(&big_p, mu)?;
    let sqrt_x = sqrt_side(&big_x, nu)?;

    let lhs = big_p.commutator(&big_x);
    let rhs = sqrt_p
        .anticommutator(&sqrt_x)
        .scale(Complex64::new(0.0, -c));
    let projected = lhs.sub(&rhs).interior(interior);

    let cosh_p = Eigensystem::new(&p)?.apply(|l| (mu * l).cosh());
    Ok(ResidualReport {
        dim,
        interior_dim: interior,
        mu,
        nu,
        residual_frobenius: projected.frobenius(),
        residual_spectral: spectral_norm_estimate(&projected),
        sqrt_cosh_xcheck: sqrt_p.sub(&cosh_p).frobenius(),
        cosh_frobenius: cosh_p.frobenius(),
    })
}

/// Rows of a convergence study and its verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceScan {
    pub rows: Vec<ResidualReport>,
    pub threshold: f64,
    pub passed: bool,
}

/// Evaluates [`projected_residual`] over increasing dimensions. Passes when the
/// residual at the largest dimension is below `threshold` and no larger
/// than at the smallest.
pub fn convergence_scan(
    mu: f64,
    nu: f64,
    interior: usize,
    dims: &[usize],
    threshold: f64,
) -> Result<ConvergenceScan, MatrixError> {
    if dims.is_empty() || dims.windows(2).any(|w| w[0] >= w[1]) || dims[0] <= interior {
        return Err(MatrixError::InvalidScan);
    }
    let rows = std::thread::scope(|s| {
        let handles: Vec<_> = dims
            .iter()
            .map(|&n| s.spawn(move || projected_residual(n, interior, mu, nu)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("residual worker panicked"))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let first = rows[0].residual_frobenius;
    let last = rows[rows.len() - 1].residual_frobenius;
    let passed = last <= threshold && (rows.len() == 1 || last <= first);
    Ok(ConvergenceScan {
        rows,
        threshold,
        passed,
    })
}
