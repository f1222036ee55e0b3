use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qdeform_core::matrix::{
    convergence_scan, deformed_ops, hermitian_function, oscillator_xp, projected_residual,
    Eigensystem, OperatorMatrix, SpectralFunction,
};
use qdeform_core::weyl::{deformed_momentum, deformed_position};

#[test]
fn truncation_defect_lives_on_the_top_state() {
    for n in 2..=16 {
        let (x, p) = oscillator_xp(n).unwrap();
        let defect = p
            .commutator(&x)
            .add(&OperatorMatrix::identity(n).scale(Complex64::new(0.0, 1.0)));
        for r in 0..n {
            for c in 0..n {
                if r != n - 1 && c != n - 1 {
                    assert!(defect.get(r, c).norm() < 1e-14, "N={n} ({r},{c})");
                }
            }
        }
        // the top diagonal entry carries the whole trace defect: i(1 - N) + i
        let top = defect.get(n - 1, n - 1);
        assert!((top.im - n as f64).abs() < 1e-12, "N={n}: {top}");
    }
}

#[test]
fn undeformed_residual_vanishes_on_every_interior() {
    for n in 3..=16 {
        for m in 2..n {
            let r = projected_residual(n, m, 0.0, 0.0).unwrap();
            assert!(
                r.residual_frobenius <= 1e-12,
                "N={n} M={m}: {}",
                r.residual_frobenius
            );
            assert!(r.sqrt_cosh_xcheck == 0.0 || r.sqrt_cosh_xcheck < 1e-12);
        }
    }
}

#[test]
fn deformed_operators_stay_hermitian() {
    for &(mu, nu) in &[(0.1, 0.3), (0.3, 0.0), (0.25, 0.25)] {
        let (big_p, big_x) = deformed_ops(32, mu, nu).unwrap();
        assert!(big_p.is_hermitian() && big_x.is_hermitian());
        let i_comm = big_p.commutator(&big_x).scale(Complex64::new(0.0, 1.0));
        assert!(i_comm.is_hermitian(), "i[P,X] at mu={mu} nu={nu}");
        let ch = hermitian_function(&big_p, SpectralFunction::Cosh).unwrap();
        assert!(ch.is_hermitian());
    }
}

#[test]
fn sqrt_of_one_plus_square_matches_cosh() {
    for n in [16, 32, 64, 128] {
        for mu in [0.05, 0.1, 0.2, 0.3] {
            let r = projected_residual(n, 8, mu, mu).unwrap();
            let rel = r.sqrt_cosh_xcheck / r.cosh_frobenius;
            assert!(rel <= 1e-10, "N={n} mu={mu}: {rel:e}");
        }
    }
    let r = projected_residual(32, 8, 0.3, 0.3).unwrap();
    assert!(r.sqrt_cosh_xcheck <= 1e-10 * r.cosh_frobenius);
}

#[test]
fn small_mu_deformation_is_quartic() {
    // P - p - mu^2 p^3 / 6 = O(mu^4): halving mu shrinks it by ~16.
    let n = 24;
    let (_, p) = oscillator_xp(n).unwrap();
    let p3 = p.mul(&p).mul(&p);
    let remainder = |mu: f64| {
        let (big_p, _) = deformed_ops(n, mu, 0.0).unwrap();
        big_p
            .sub(&p)
            .sub(&p3.scale(Complex64::new(mu * mu / 6.0, 0.0)))
            .frobenius()
    };
    let ratio = remainder(0.02) / remainder(0.01);
    assert!((ratio - 16.0).abs() < 0.1, "ratio {ratio}");
}

#[test]
fn truncation_error_decays_where_it_is_resolvable() {
    // At mu = nu = 0.6 the N = 16 basis still shows truncation error; by
    // N = 24 the interior block is at round-off.
    let coarse = projected_residual(16, 8, 0.6, 0.6)
        .unwrap()
        .residual_frobenius;
    let fine = projected_residual(24, 8, 0.6, 0.6)
        .unwrap()
        .residual_frobenius;
    assert!(coarse > 1e-9, "{coarse:e}");
    assert!(fine < 1e-3 * coarse, "{fine:e} vs {coarse:e}");
}

#[test]
fn moderate_deformation_residual_is_at_round_off() {
    let scan = convergence_scan(0.2, 0.2, 8, &[16, 32, 64, 128], 1e-12).unwrap();
    for row in &scan.rows {
        assert!(
            row.residual_frobenius < 1e-12,
            "N={}: {:e}",
            row.dim,
            row.residual_frobenius
        );
        assert!(row.residual_spectral <= row.residual_frobenius * (1.0 + 1e-9));
    }
    let undeformed = convergence_scan(0.0, 0.0, 8, &[16, 32, 64, 128], 1e-12).unwrap();
    assert!(undeformed.passed);
    assert!(undeformed
        .rows
        .iter()
        .all(|r| r.residual_frobenius <= 1e-12));
}

/// `<j| x^a p^b |k>` from truncated matrices; exact for `j, k + a + b < N`.
fn monomial_matrix(x: &OperatorMatrix, p: &OperatorMatrix, a: u32, b: u32) -> OperatorMatrix {
    let n = x.dim();
    let mut acc = OperatorMatrix::identity(n);
    for _ in 0..a {
        acc = acc.mul(x);
    }
    for _ in 0..b {
        acc = acc.mul(p);
    }
    acc
}

#[test]
fn matrix_commutator_agrees_with_symbolic_series() {
    let degree = 10;
    let symbolic = deformed_momentum(degree)
        .commutator(&deformed_position(degree))
        .unwrap();
    let n = 64;
    let (x, p) = oscillator_xp(n).unwrap();
    for mu in [0.05, 0.1] {
        let (big_p, big_x) = deformed_ops(n, mu, mu).unwrap();
        let numeric = big_p.commutator(&big_x);
        let mut predicted = DMatrix::<Complex64>::zeros(4, 4);
        for (mono, coef) in symbolic.evaluate(mu, mu) {
            let m = monomial_matrix(&x, &p, mono.x_pow, mono.p_pow);
            for j in 0..4 {
                for k in 0..4 {
                    predicted[(j, k)] += coef * m.get(j, k);
                }
            }
        }
        for j in 0..4 {
            for k in 0..4 {
                let diff = (numeric.get(j, k) - predicted[(j, k)]).norm();
                assert!(diff < 1e-9, "mu={mu} <{j}|.|{k}>: {diff:e}");
            }
        }
    }
}

fn well_conditioned_spd() -> impl Strategy<Value = OperatorMatrix> {
    (2usize..=8)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n),
                prop::collection::vec(0.5f64..50.0, n),
            )
        })
        .prop_map(|(n, raw, spectrum)| {
            // Q from the eigenvectors of a random Hermitian matrix, then Q D Q†.
            let a = DMatrix::from_fn(n, n, |r, c| {
                Complex64::new(raw[r * n + c].0, raw[r * n + c].1)
            });
            let h =
                OperatorMatrix::hermitian((&a + a.adjoint()) * Complex64::new(0.5, 0.0)).unwrap();
            let eig = Eigensystem::new(&h).unwrap();
            let mut sorted = eig.values.clone();
            sorted.sort_by(f64::total_cmp);
            let lookup = |l: f64| spectrum[sorted.iter().position(|&v| v == l).unwrap()];
            eig.apply(lookup)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn principal_sqrt_squares_back(h in well_conditioned_spd()) {
        let r = hermitian_function(&h, SpectralFunction::PrincipalSqrt).unwrap();
        let err = r.mul(&r).sub(&h).frobenius() / h.frobenius();
        prop_assert!(err <= 1e-10, "relative error {:e}", err);
        let eig = Eigensystem::new(&r).unwrap();
        prop_assert!(eig.values[0] > 0.0);
    }

    #[test]
    fn cosh_squared_minus_sinh_squared_is_identity(
        n in 2usize..=24,
        mu in 0.0f64..0.3,
    ) {
        let (_, p) = oscillator_xp(n).unwrap();
        let scaled = p.scale(Complex64::new(mu, 0.0));
        let scaled = OperatorMatrix::hermitian(scaled.into_entries()).unwrap();
        let s = hermitian_function(&scaled, SpectralFunction::Sinh).unwrap();
        let c = hermitian_function(&scaled, SpectralFunction::Cosh).unwrap();
        let err = c.mul(&c).sub(&s.mul(&s)).sub(&OperatorMatrix::identity(n)).frobenius();
        prop_assert!(err <= 1e-10 * c.mul(&c).frobenius());
    }
}
