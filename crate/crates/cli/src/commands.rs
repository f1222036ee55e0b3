use std::collections::BTreeMap;

use qdeform_core::clock_shift::{
    build_pair, measured_exchange_phase, naive_periodicity, prefactor_periodicity, q_from_alpha,
    verify_qplane,
};
use qdeform_core::matrix::{
    convergence_scan, default_interior, prefactor, projected_residual, OperatorMatrix,
    ResidualReport,
};
use qdeform_core::params::{correspondence, q_of_omega, ContractionPath, ParameterSet, PathName};
use qdeform_core::weyl::{
    central_identity_residual, central_identity_rhs, cosh_series, deformed_momentum,
    deformed_position, first_order_check, free_particle_rule, prefactor_series,
    sqrt_one_plus_square, tan_momentum, weyl_exchange_check, ParamPolynomial, RationalComplex,
    Side, WeylSeriesElement,
};
use serde_json::{json, Value};

use crate::cli::{ExpandArgs, Format, ScanArgs, Target, VerifyArgs};
use crate::config::Config;
use crate::error::{usage, CliError};
use crate::report::{fmt_f64, Engine, Metric, Table, VerificationReport};

/// Largest accepted truncation degree; exact arithmetic grows fast beyond it.
pub const MAX_DEGREE: u32 = 24;
pub const MAX_DIM: usize = 1024;
pub const MAX_SCAN_POINTS: u64 = 1_000_000;

pub enum Output {
    Report(VerificationReport),
    /// Canonical series text, with a report for `--format json|csv`.
    Expansion {
        text: String,
        report: VerificationReport,
    },
}

impl Output {
    pub fn report(&self) -> &VerificationReport {
        match self {
            Output::Report(r) | Output::Expansion { report: r, .. } => r,
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.report().verdict.exit_code()
    }

    pub fn render(&self, format: Option<Format>) -> String {
        match (self, format) {
            (Output::Expansion { text, .. }, None | Some(Format::Text)) => format!("{text}\n"),
            (_, Some(Format::Csv)) => self.report().to_csv(),
            (_, Some(Format::Text)) => self.report().to_text(),
            (_, None | Some(Format::Json)) => self.report().to_json(),
        }
    }
}

pub type Failure = (CliError, Option<Box<VerificationReport>>);

fn fail(
    engine: Engine,
    command: &str,
    params: &BTreeMap<String, Value>,
) -> impl Fn(CliError) -> Failure {
    let report = Box::new(VerificationReport::error(engine, command, params.clone()));
    move |e| (e, Some(report.clone()))
}

fn check_degree(d: u32) -> Result<u32, CliError> {
    if d > MAX_DEGREE {
        return Err(usage(format!(
            "degree {d} exceeds the limit of {MAX_DEGREE}"
        )));
    }
    Ok(d)
}

fn check_dim(n: usize) -> Result<usize, CliError> {
    if n > MAX_DIM {
        return Err(usage(format!(
            "dimension {n} exceeds the limit of {MAX_DIM}"
        )));
    }
    Ok(n)
}

fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("--{name} must be finite")))
    }
}

/// `"a..b"` or `"a..=b"` (both inclusive) or `"n"` meaning `0..n`.
pub fn parse_range(text: &str) -> Result<Vec<u64>, CliError> {
    let bad = || usage(format!("bad index range `{text}` (expected a..b or n)"));
    let text = text.trim();
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            (
                a.trim().parse::<u64>().map_err(|_| bad())?,
                b.trim().parse::<u64>().map_err(|_| bad())?,
            )
        }
        None => (0, text.parse::<u64>().map_err(|_| bad())?),
    };
    if lo > hi {
        return Err(usage(format!("empty index range `{text}`")));
    }
    if hi - lo >= MAX_SCAN_POINTS {
        return Err(usage(format!(
            "index range `{text}` exceeds {MAX_SCAN_POINTS} points"
        )));
    }
    Ok((lo..=hi).collect())
}

/// Comma-separated positive integers; empty input is an error.
pub fn parse_dims(text: &str) -> Result<Vec<usize>, CliError> {
    let dims = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| usage(format!("bad dimension `{s}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if dims.is_empty() {
        return Err(usage("--dims must list at least one dimension"));
    }
    if dims.len() > 64 {
        return Err(usage("--dims lists more than 64 dimensions"));
    }
    for &n in &dims {
        check_dim(n)?;
    }
    Ok(dims)
}

fn terms(e: &WeylSeriesElement) -> f64 {
    e.num_terms() as f64
}

fn relative(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a / b
    }
}

// ---------------------------------------------------------------- verify

pub fn verify(args: &VerifyArgs, config: &Config) -> Result<Output, Failure> {
    let engine = args.engine.ok_or_else(|| {
        (
            usage("verify needs --engine symbolic|matrix|clock-shift|params"),
            None,
        )
    })?;
    let d = &config.defaults;
    let mut params = BTreeMap::new();
    let report = match engine {
        Engine::Symbolic => {
            let degree = args.degree.unwrap_or(d.degree);
            params.insert("degree".into(), json!(degree));
            verify_symbolic(degree, config).map_err(fail(engine, "verify", &params))?
        }
        Engine::Matrix => {
            let dim = args.dim.unwrap_or(d.dim);
            let interior = args
                .interior
                .or(d.interior)
                .unwrap_or_else(|| default_interior(dim));
            let mu = args.mu.unwrap_or(d.mu);
            let nu = args.nu.unwrap_or(d.nu);
            params.insert("dim".into(), json!(dim));
            params.insert("interior".into(), json!(interior));
            params.insert("mu".into(), json!(mu));
            params.insert("nu".into(), json!(nu));
            verify_matrix(dim, interior, mu, nu, config).map_err(fail(engine, "verify", &params))?
        }
        Engine::ClockShift => {
            let dim = args.dim.unwrap_or(d.dim);
            let level = args.level.unwrap_or(d.level);
            params.insert("dim".into(), json!(dim));
            params.insert("level".into(), json!(level));
            verify_clock_shift(dim, level, config).map_err(fail(engine, "verify", &params))?
        }
        Engine::Params => {
            let mu = args.mu.unwrap_or(d.mu);
            let nu = args.nu.unwrap_or(d.nu);
            params.insert("mu".into(), json!(mu));
            params.insert("nu".into(), json!(nu));
            verify_params(mu, nu, config, &mut params).map_err(fail(engine, "verify", &params))?
        }
    };
    let (metrics, table) = report;
    Ok(Output::Report(VerificationReport::new(
        engine, "verify", params, metrics, table,
    )))
}

type Checks = (Vec<Metric>, Option<Table>);

fn verify_symbolic(degree: u32, config: &Config) -> Result<Checks, CliError> {
    let degree = check_degree(degree)?;
    let thr = config.thresholds.residual_terms;
    let residual = central_identity_residual(degree)?;
    let first_order = first_order_check(degree)?;
    let low_order = first_order.residual.filter_params(|a, b| a + b < 4);

    let sqrt_gap = |side| -> Result<f64, CliError> {
        Ok(terms(
            &sqrt_one_plus_square(side, degree)?.sub(&cosh_series(side, degree))?,
        ))
    };
    let sqrt_terms = sqrt_gap(Side::Momentum)? + sqrt_gap(Side::Position)?;

    let f = tan_momentum(degree);
    let (lhs, _) = free_particle_rule(&f)?;
    let mu_sq = ParamPolynomial::monomial(2, 0, RationalComplex::from_integer(1));
    let one_plus_square = WeylSeriesElement::one(degree)
        .add(&f.normal_product(&f)?.scale_param(&mu_sq))?
        .scale(&(-RationalComplex::i()));

    let metrics = vec![
        Metric::check("residual_terms", terms(&residual), thr),
        Metric::check("first_order_low_terms", terms(&low_order), thr),
        Metric::info(
            "first_order_lowest_degree",
            first_order.lowest_degree.map_or(-1.0, f64::from),
        ),
        Metric::check("sqrt_cosh_residual_terms", sqrt_terms, thr),
        Metric::check(
            "exchange_residual_terms",
            terms(&weyl_exchange_check(degree)?),
            thr,
        ),
        Metric::check(
            "tan_rule_residual_terms",
            terms(&lhs.sub(&one_plus_square)?),
            thr,
        ),
    ];
    Ok((metrics, None))
}

fn residual_table(rows: &[ResidualReport]) -> Table {
    let mut t = Table::from_header(ResidualReport::CSV_HEADER);
    for r in rows {
        t.push_csv(&r.csv_row());
    }
    t
}

fn verify_matrix(
    dim: usize,
    interior: usize,
    mu: f64,
    nu: f64,
    config: &Config,
) -> Result<Checks, CliError> {
    let dim = check_dim(dim)?;
    let (mu, nu) = (finite("mu", mu)?, finite("nu", nu)?);
    let thr = &config.thresholds;
    let r = projected_residual(dim, interior, mu, nu)?;
    let metrics = vec![
        Metric::check("res_fro", r.residual_frobenius, thr.matrix_residual),
        Metric::info("res_spec", r.residual_spectral),
        Metric::check(
            "sqrt_cosh_relative",
            relative(r.sqrt_cosh_xcheck, r.cosh_frobenius),
            thr.sqrt_cosh_relative,
        ),
    ];
    Ok((metrics, Some(residual_table(&[r]))))
}

fn unitarity_defect(u: &OperatorMatrix) -> f64 {
    u.mul(&u.adjoint())
        .sub(&OperatorMatrix::identity(u.dim()))
        .max_abs()
}

fn verify_clock_shift(dim: usize, level: usize, config: &Config) -> Result<Checks, CliError> {
    let dim = check_dim(dim)?;
    let thr = &config.thresholds;
    let pair = build_pair(dim, level)?;
    let expected = q_from_alpha(pair.alpha()).unwrap_or(pair.exchange_phase());
    let phase_error = (measured_exchange_phase(&pair) - expected).norm();
    let unitarity = unitarity_defect(pair.shift()).max(unitarity_defect(pair.clock()));
    let metrics = vec![
        Metric::info("alpha", pair.alpha()),
        Metric::check("max_residual", verify_qplane(&pair), thr.qplane_residual),
        Metric::check("phase_error", phase_error, thr.phase),
        Metric::check("unitarity_defect", unitarity, thr.unitarity),
    ];
    Ok((metrics, None))
}

fn verify_params(
    mu: f64,
    nu: f64,
    config: &Config,
    params: &mut BTreeMap<String, Value>,
) -> Result<Checks, CliError> {
    let phys = config.params.resolve()?;
    params.insert("hbar".into(), json!(phys.hbar));
    params.insert("m".into(), json!(phys.m));
    params.insert("c".into(), json!(phys.c));
    if let Some(w) = phys.omega {
        params.insert("omega".into(), json!(w));
    }
    let limit = config.thresholds.small_parameter;
    let set = ParameterSet::new(phys.hbar, phys.m, phys.c, mu, nu)?;
    let corr = correspondence(mu, nu)?;
    let mut metrics = vec![
        Metric::info("delta", set.delta()),
        Metric::info("tau", set.tau()),
        Metric::info("theta", set.theta()),
        Metric::info("omega_ratio", corr.omega_ratio),
        Metric::info("q_leading", corr.q.q),
        Metric::check("expansion_parameter", corr.q.expansion_parameter, limit),
    ];
    if let Some(omega) = phys.omega {
        let q = q_of_omega(phys.hbar, omega, phys.m, phys.c)?;
        metrics.push(Metric::info("q_of_omega", q.q));
        metrics.push(Metric::check(
            "omega_expansion_parameter",
            q.expansion_parameter,
            limit,
        ));
    }
    Ok((metrics, None))
}

// ---------------------------------------------------------------- scan

pub fn scan(args: &ScanArgs, config: &Config) -> Result<Output, Failure> {
    let path = match &args.path {
        Some(p) => Some(
            p.parse::<PathName>()
                .map_err(|e| (CliError::from(e), None))?,
        ),
        None => None,
    };
    let engine = match (args.engine, path) {
        (Some(e), _) => e,
        (None, Some(PathName::HbarToZero)) => Engine::ClockShift,
        (None, Some(_)) => Engine::Params,
        (None, None) => return Err((usage("scan needs --engine or --path"), None)),
    };
    let mut params = BTreeMap::new();
    let result = match (engine, path) {
        (_, Some(name)) => scan_path(name, args, config, &mut params),
        (Engine::Matrix, None) => scan_matrix(args, config, &mut params),
        (Engine::ClockShift, None) => scan_periodicity(args, config, &mut params),
        (Engine::Symbolic, None) => scan_symbolic(args, config, &mut params),
        (Engine::Params, None) => Err(usage(
            "params scans need --path q-to-1|hbar-to-0|omega-to-0",
        )),
    };
    let (metrics, table) = result.map_err(fail(engine, "scan", &params))?;
    Ok(Output::Report(VerificationReport::new(
        engine, "scan", params, metrics, table,
    )))
}

fn scan_matrix(
    args: &ScanArgs,
    config: &Config,
    params: &mut BTreeMap<String, Value>,
) -> Result<Checks, CliError> {
    let d = &config.defaults;
    let dims_text = args.dims.as_deref().unwrap_or(&d.dims);
    params.insert("dims".into(), json!(dims_text));
    let dims = parse_dims(dims_text)?;
    let mu = finite("mu", args.mu.unwrap_or(d.mu))?;
    let nu = finite("nu", args.nu.unwrap_or(d.nu))?;
    let interior = args
        .interior
        .or(d.interior)
        .unwrap_or_else(|| default_interior(dims[0]));
    params.insert("interior".into(), json!(interior));
    params.insert("mu".into(), json!(mu));
    params.insert("nu".into(), json!(nu));
    let threshold = config.thresholds.matrix_residual;
    let scan = convergence_scan(mu, nu, interior, &dims, threshold)?;
    let first = scan.rows[0].residual_frobenius;
    let last = scan.rows[scan.rows.len() - 1].residual_frobenius;
    let mut metrics = vec![Metric::check("res_fro_last", last, threshold)];
    if scan.rows.len() > 1 {
        metrics.push(Metric::check("res_fro_growth", last - first, 0.0));
    }
    Ok((metrics, Some(residual_table(&scan.rows))))
}

fn scan_periodicity(
    args: &ScanArgs,
    config: &Config,
    params: &mut BTreeMap<String, Value>,
) -> Result<Checks, CliError> {
    let d = &config.defaults;
    let alpha = finite("alpha", args.alpha.unwrap_or(d.alpha))?;
    let n_text = args.n.as_deref().unwrap_or(&d.n);
    params.insert("alpha".into(), json!(alpha));
    params.insert("n".into(), json!(n_text));
    let ns = parse_range(n_text)?;
    let mut table = Table::new(&["alpha", "n", "deviation"]);
    let mut max = 0.0f64;
    for &n in &ns {
        let dev = prefactor_periodicity(alpha, &[n])?;
        max = max.max(dev);
        table.push(vec![fmt_f64(alpha), n.to_string(), fmt_f64(dev)]);
    }
    let metrics = vec![
        Metric::check("max_deviation", max, config.thresholds.periodicity),
        Metric::info("naive_max_deviation", naive_periodicity(alpha, &ns)?),
    ];
    Ok((metrics, Some(table)))
}

fn scan_symbolic(
    args: &ScanArgs,
    config: &Config,
    params: &mut BTreeMap<String, Value>,
) -> Result<Checks, CliError> {
    let max_degree = check_degree(args.degree.unwrap_or(config.defaults.degree))?;
    params.insert("degree".into(), json!(max_degree));
    let thr = config.thresholds.residual_terms;
    let mut table = Table::new(&[
        "degree",
        "residual_terms",
        "first_order_lowest_degree",
        "exchange_residual_terms",
    ]);
    let (mut worst, mut worst_exchange) = (0.0f64, 0.0f64);
    for degree in 0..=max_degree {
        let r = terms(&central_identity_residual(degree)?);
        let ex = terms(&weyl_exchange_check(degree)?);
        let low = first_order_check(degree)?
            .lowest_degree
            .map_or("none".to_string(), |l| l.to_string());
        worst = worst.max(r);
        worst_exchange = worst_exchange.max(ex);
        table.push(vec![degree.to_string(), r.to_string(), low, ex.to_string()]);
    }
    let metrics = vec![
        Metric::check("max_residual_terms", worst, thr),
        Metric::check("max_exchange_residual_terms", worst_exchange, thr),
    ];
    Ok((metrics, Some(table)))
}

fn scan_path(
    name: PathName,
    args: &ScanArgs,
    config: &Config,
    params: &mut BTreeMap<String, Value>,
) -> Result<Checks, CliError> {
    let d = &config.defaults;
    let base = qdeform_core::params::contraction_path(name.as_str())?;
    let path = ContractionPath {
        name,
        mu0: finite("mu", args.mu.unwrap_or(base.mu0))?,
        nu0: finite("nu", args.nu.unwrap_or(base.nu0))?,
        alpha: finite("alpha", args.alpha.unwrap_or(d.alpha))?,
        beta: finite("beta", args.beta.unwrap_or(d.beta))?,
    };
    let n_text = args.n.as_deref().unwrap_or(&d.n);
    params.insert("path".into(), json!(name.as_str()));
    params.insert("n".into(), json!(n_text));
    match name {
        PathName::HbarToZero => {
            params.insert("alpha".into(), json!(path.alpha));
            params.insert("beta".into(), json!(path.beta));
        }
        _ => {
            params.insert("mu0".into(), json!(path.mu0));
            params.insert("nu0".into(), json!(path.nu0));
        }
    }
    let ns = parse_range(n_text)?;
    match name {
        PathName::HbarToZero => scan_hbar(&path, &ns, config),
        PathName::QToOne => scan_q_to_one(&path, &ns, args, config, params),
        PathName::OmegaToZero => scan_omega(&path, &ns, args, config, params),
    }
}

fn scan_hbar(path: &ContractionPath, ns: &[u64], config: &Config) -> Result<Checks, CliError> {
    let thr = &config.thresholds;
    let reference = q_from_alpha(path.alpha)?;
    let mut table = Table::new(&[
        "n",
        "t",
        "mu",
        "nu",
        "theta",
        "phase_re",
        "phase_im",
        "phase_deviation",
    ]);
    let mut max_dev = 0.0f64;
    for &n in ns {
        let pt = path.at_index(n)?;
        let s = pt.scaling.expect("hbar-to-0 points carry a scaling point");
        let phase = s.exchange_phase().ok_or_else(|| {
            usage(format!(
                "alpha + 2 pi n = {} < 0 at n = {n}: no real (mu, nu)",
                s.theta()
            ))
        })?;
        let dev = (phase - reference).norm();
        max_dev = max_dev.max(dev);
        table.push(vec![
            n.to_string(),
            fmt_f64(pt.t),
            fmt_f64(pt.mu),
            fmt_f64(pt.nu),
            fmt_f64(s.theta()),
            fmt_f64(phase.re),
            fmt_f64(phase.im),
            fmt_f64(dev),
        ]);
    }
    let metrics = vec![
        Metric::check("max_phase_deviation", max_dev, thr.phase),
        Metric::check(
            "max_periodicity_deviation",
            prefactor_periodicity(path.alpha, ns)?,
            thr.periodicity,
        ),
    ];
    Ok((metrics, Some(table)))
}

fn scan_q_to_one(
    path: &ContractionPath,
    ns: &[u64],
    args: &ScanArgs,
    config: &Config,
    params: &mut BTreeMap<String, Value>,
) -> Result<Checks, CliError> {
    let degree = check_degree(args.degree.unwrap_or(config.defaults.degree))?;
    params.insert("degree".into(), json!(degree));
    let thr = &config.thresholds;
    let mut table = Table::new(&["n", "t", "mu", "nu", "theta", "prefactor", "prefactor_gap"]);
    let mut gaps = Vec::new();
    for &n in ns {
        let pt = path.at_index(n)?;
        let theta = pt.mu * pt.nu;
        let c = prefactor(theta)?;
        gaps.push((c - 0.5).abs());
        table.push(vec![
            n.to_string(),
            fmt_f64(pt.t),
            fmt_f64(pt.mu),
            fmt_f64(pt.nu),
            fmt_f64(theta),
            fmt_f64(c),
            fmt_f64((c - 0.5).abs()),
        ]);
    }
    // parameter-free part of [P, X] against -i
    let comm = deformed_momentum(degree).commutator(&deformed_position(degree))?;
    let heisenberg = comm
        .filter_params(|a, b| a == 0 && b == 0)
        .sub(&WeylSeriesElement::scalar(degree, -RationalComplex::i()))?;
    let endpoint = projected_residual(16, 8, 0.0, 0.0)?;
    let mut metrics = vec![
        Metric::check(
            "heisenberg_residual_terms",
            terms(&heisenberg),
            thr.residual_terms,
        ),
        Metric::check(
            "endpoint_res_fro",
            endpoint.residual_frobenius,
            thr.matrix_residual,
        ),
    ];
    if gaps.len() > 1 {
        metrics.push(Metric::check(
            "prefactor_gap_growth",
            gaps[gaps.len() - 1] - gaps[0],
            0.0,
        ));
    }
    Ok((metrics, Some(table)))
}

fn scan_omega(
    path: &ContractionPath,
    ns: &[u64],
    args: &ScanArgs,
    config: &Config,
    params: &mut BTreeMap<String, Value>,
) -> Result<Checks, CliError> {
    let degree = check_degree(args.degree.unwrap_or(config.defaults.degree))?;
    params.insert("degree".into(), json!(degree));
    let mut table = Table::new(&["n", "t", "mu", "nu", "omega_ratio", "q_leading"]);
    for &n in ns {
        let pt = path.at_index(n)?;
        let c = correspondence(pt.mu, pt.nu)?;
        table.push(vec![
            n.to_string(),
            fmt_f64(pt.t),
            fmt_f64(pt.mu),
            fmt_f64(pt.nu),
            fmt_f64(c.omega_ratio),
            fmt_f64(c.q.q),
        ]);
    }
    let comm = deformed_momentum(degree).commutator(&deformed_position(degree))?;
    let expected = cosh_series(Side::Momentum, degree).scale(&(-RationalComplex::i()));
    let metrics = vec![Metric::check(
        "cosh_variant_residual_terms",
        terms(&comm.at_nu_zero().sub(&expected)?),
        config.thresholds.residual_terms,
    )];
    Ok((metrics, Some(table)))
}

// ---------------------------------------------------------------- expand

/// Canonical text of the requested truncated series.
pub fn expansion(target: Target, degree: u32) -> Result<String, CliError> {
    let degree = check_degree(degree)?;
    Ok(match target {
        Target::P => deformed_momentum(degree).to_string(),
        Target::X => deformed_position(degree).to_string(),
        Target::Prefactor => prefactor_series(degree).to_string(),
        Target::CentralRhs => central_identity_rhs(degree)?.to_string(),
        Target::FirstOrder => format!(
            "-i*({})",
            central_identity_rhs(degree)?.scale(&RationalComplex::i())
        ),
    })
}

pub fn expand(args: &ExpandArgs, config: &Config) -> Result<Output, CliError> {
    let degree = args.degree.unwrap_or(config.defaults.degree);
    let text = expansion(args.target, degree)?;
    let mut params = BTreeMap::new();
    params.insert("target".into(), json!(args.target.name()));
    params.insert("degree".into(), json!(degree));
    let mut table = Table::new(&["expansion"]);
    table.push(vec![text.clone()]);
    let report =
        VerificationReport::new(Engine::Symbolic, "expand", params, Vec::new(), Some(table));
    Ok(Output::Expansion { text, report })
}
