use std::io::Write;
use std::path::Path;

use serde::Serialize;

use opcalc_core::besov::{besov_norm_estimate, Grid, MAX_GRID_SIZE};
use opcalc_core::divdiff::Axis;
use opcalc_core::doi::apply_doi;
use opcalc_core::family::{self, band_limited_family, test_family};
use opcalc_core::helton_howe::run_experiment;
use opcalc_core::linalg::{eig_hermitian, ComplexMatrix, HermitianMatrix};
use opcalc_core::random::{index, random_complex, random_hermitian, seeded};
use opcalc_core::sinc::{build_sinc_haagerup, probe_points, sinc_partition_defect};
use opcalc_core::trials::{rows_to_csv, run_trials, summarize, Partner, TrialConfig};
use opcalc_core::trioi::{triple_oi, triple_oi_dual, triple_oi_projection_sum, TripleIntegrand};
use opcalc_core::Function2D;

use crate::args::*;
use crate::{io_error, CliError, FailureRecord};

pub(crate) fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    let name = command.name();
    let failures = match command {
        Command::Doi(a) => doi(a, stdout)?,
        Command::TrioiCheck(a) => trioi_check(a, stdout)?,
        Command::CommutatorCheck(a) => commutator_check(a, stdout)?,
        Command::S1Bound(a) => s1_bound(a, stdout)?,
        Command::Besov(a) => besov(a, stdout)?,
        Command::SincCheck(a) => sinc_check(a, stdout)?,
        Command::HeltonHowe(a) => helton_howe(a, stdout)?,
    };
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(
            failures
                .into_iter()
                .map(|f| FailureRecord {
                    subcommand: name.to_string(),
                    ..f
                })
                .collect(),
        ))
    }
}

fn failure(check: &str, observed: f64, tolerance: f64, detail: impl Into<String>) -> FailureRecord {
    FailureRecord {
        subcommand: String::new(),
        check: check.to_string(),
        observed,
        tolerance,
        detail: detail.into(),
    }
}

fn in_range<T: PartialOrd + std::fmt::Display>(name: &str, v: T, lo: T, hi: T) -> Result<T, CliError> {
    if v < lo || v > hi {
        return Err(CliError::Usage(format!("--{name} must be in {lo}..={hi}, got {v}")));
    }
    Ok(v)
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if !(v.is_finite() && v > 0.0) {
        return Err(CliError::Usage(format!("--{name} must be a positive number, got {v}")));
    }
    Ok(v)
}

fn parse_phi(src: &str) -> Result<Function2D, CliError> {
    Function2D::parse(src).map_err(|e| CliError::Usage(format!("cannot parse {src:?}: {e}")))
}

/// Writes `text` to `out`, or to stdout when no path is given.
fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_error(path, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| io_error(Path::new("<stdout>"), e)),
    }
}

fn summary<T: Serialize>(value: &T, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    if out.is_some() {
        let text = serde_json::to_string_pretty(value).expect("summary serializes") + "\n";
        stdout
            .write_all(text.as_bytes())
            .map_err(|e| io_error(Path::new("<stdout>"), e))?;
    }
    Ok(())
}

fn doi(a: DoiArgs, stdout: &mut dyn Write) -> Result<Vec<FailureRecord>, CliError> {
    let phi = parse_phi(a.phi.as_deref().unwrap_or("sin(x)*cos(y)"))?;
    let dim = in_range("dim", a.dim.unwrap_or(4), 1, 512)?;
    let mut rng = seeded(a.seed.unwrap_or(0));
    let mut load = |path: &Option<std::path::PathBuf>| -> Result<HermitianMatrix, CliError> {
        Ok(match path {
            Some(p) => HermitianMatrix::new(ComplexMatrix::read_json(p)?),
            None => random_hermitian(&mut rng, dim),
        })
    };
    let ma = load(&a.a)?;
    let mb = load(&a.b)?;
    let result = apply_doi(&phi, &eig_hermitian(&ma)?, &eig_hermitian(&mb)?)?;
    emit(&(result.to_json() + "\n"), a.out.as_deref(), stdout)?;
    Ok(Vec::new())
}

#[derive(Serialize)]
struct TrioiRow {
    seed: u64,
    dim: usize,
    integrand: String,
    dual_error: f64,
    projection_sum_error: Option<f64>,
}

fn trioi_check(a: TrioiCheckArgs, stdout: &mut dyn Write) -> Result<Vec<FailureRecord>, CliError> {
    let dim = in_range("dim", a.dim.unwrap_or(4), 1, 16)?;
    let trials = in_range("trials", a.trials.unwrap_or(25), 1, 10_000)?;
    let base = a.seed.unwrap_or(0);
    let tolerance = positive("tolerance", a.tolerance.unwrap_or(1e-11))?;
    let fam = test_family();
    let mut rows = Vec::with_capacity(trials);
    for t in 0..trials {
        let seed = base.wrapping_add(t as u64);
        let mut rng = seeded(seed);
        let f = family::draw(&mut rng, &fam);
        let axis = if index(&mut rng, 2) == 0 { Axis::First } else { Axis::Second };
        let integrand = TripleIntegrand::divided_difference(&f, axis);
        let e1 = eig_hermitian(&random_hermitian(&mut rng, dim))?;
        let e2 = eig_hermitian(&random_hermitian(&mut rng, dim))?;
        let e3 = eig_hermitian(&random_hermitian(&mut rng, dim))?;
        let tm = random_complex(&mut rng, dim);
        let rm = random_complex(&mut rng, dim);
        let direct = triple_oi(&integrand, &e1, &tm, &e2, &rm, &e3)?;
        let scale = direct.op_norm().max(f64::MIN_POSITIVE);
        let rel = |x: ComplexMatrix| -> Result<f64, CliError> { Ok(x.try_sub(&direct)?.op_norm() / scale) };
        let dual_error = rel(triple_oi_dual(&integrand, &e1, &tm, &e2, &rm, &e3)?)?;
        let projection_sum_error = if dim <= 4 {
            Some(rel(triple_oi_projection_sum(&integrand, &e1, &tm, &e2, &rm, &e3)?)?)
        } else {
            None
        };
        rows.push(TrioiRow {
            seed,
            dim,
            integrand: format!("{axis:?} divided difference of {}", f.descriptor()),
            dual_error,
            projection_sum_error,
        });
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        writer.serialize(r).expect("in-memory write");
    }
    let text = String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8");
    emit(&text, a.out.as_deref(), stdout)?;

    let worst = rows
        .iter()
        .map(|r| r.dual_error.max(r.projection_sum_error.unwrap_or(0.0)))
        .fold(0.0_f64, f64::max);
    summary(&serde_json::json!({ "trials": trials, "max_relative_error": worst }), a.out.as_deref(), stdout)?;
    let mut failures = Vec::new();
    if worst.is_nan() || worst > tolerance {
        failures.push(failure("triple integral evaluators agree", worst, tolerance, format!("{trials} trials at dim {dim}")));
    }
    Ok(failures)
}

fn commutator_check(a: CommutatorCheckArgs, stdout: &mut dyn Write) -> Result<Vec<FailureRecord>, CliError> {
    let dim = in_range("dim", a.dim.unwrap_or(6), 1, 128)?;
    let trials = in_range("trials", a.trials.unwrap_or(20), 1, 10_000)?;
    let tolerance = positive("tolerance", a.tolerance.unwrap_or(1e-10))?;
    let config = TrialConfig {
        base_seed: a.seed.unwrap_or(1),
        trials,
        min_dim: dim,
        max_dim: dim,
        partner: match a.partner.unwrap_or(PartnerArg::Random) {
            PartnerArg::Random => Partner::Random,
            PartnerArg::Product => Partner::FamilyProduct,
        },
    };
    let rows = run_trials(&config, &test_family())?;
    emit(&rows_to_csv(&rows), a.out.as_deref(), stdout)?;
    let s = summarize(&rows);
    summary(&s, a.out.as_deref(), stdout)?;
    let mut failures = Vec::new();
    if s.max_identity_error.is_nan() || s.max_identity_error > tolerance {
        failures.push(failure("commutator identity", s.max_identity_error, tolerance, format!("{trials} trials at dim {dim}")));
    }
    if s.violations > 0 {
        failures.push(failure("zero right side forces zero left side", s.violations as f64, 0.0, "trials with rhs_core = 0 and lhs > 1e-12"));
    }
    Ok(failures)
}

fn s1_bound(a: S1BoundArgs, stdout: &mut dyn Write) -> Result<Vec<FailureRecord>, CliError> {
    let min_dim = in_range("min-dim", a.min_dim.unwrap_or(2), 1, 128)?;
    let max_dim = in_range("max-dim", a.max_dim.unwrap_or(10), min_dim, 128)?;
    let trials = in_range("trials", a.trials.unwrap_or(100), 1, 10_000)?;
    let family = match &a.phi {
        Some(src) => vec![parse_phi(src)?],
        None => test_family(),
    };
    let besov_estimate = match &a.phi {
        Some(_) => {
            let size = in_range("grid-size", a.grid_size.unwrap_or(128), 2, MAX_GRID_SIZE)?;
            let half_width = positive("half-width", a.half_width.unwrap_or(4.0))?;
            Some(besov_norm_estimate(&Grid::from_function(&family[0], size, half_width)?).estimate)
        }
        None => None,
    };
    let config = TrialConfig {
        base_seed: a.seed.unwrap_or(0),
        trials,
        min_dim,
        max_dim,
        partner: Partner::Random,
    };
    let rows = run_trials(&config, &family)?;
    emit(&rows_to_csv(&rows), a.out.as_deref(), stdout)?;
    let s = summarize(&rows);
    summary(&serde_json::json!({ "summary": s, "besov_estimate": besov_estimate }), a.out.as_deref(), stdout)?;
    let mut failures = Vec::new();
    if !s.all_ratios_finite {
        failures.push(failure("ratios finite", f64::NAN, 0.0, "a trial produced a non-finite ratio"));
    }
    if s.violations > 0 {
        failures.push(failure("zero right side forces zero left side", s.violations as f64, 0.0, "trials with rhs_core = 0 and lhs > 1e-12"));
    }
    Ok(failures)
}

fn besov(a: BesovArgs, stdout: &mut dyn Write) -> Result<Vec<FailureRecord>, CliError> {
    let grid = match &a.input {
        Some(path) => Grid::read(path)?,
        None => {
            let phi = parse_phi(a.phi.as_deref().unwrap_or("sin(x)*cos(y)"))?;
            let size = in_range("grid-size", a.grid_size.unwrap_or(128), 2, MAX_GRID_SIZE)?;
            let half_width = positive("half-width", a.half_width.unwrap_or(4.0))?;
            Grid::from_function(&phi, size, half_width)?
        }
    };
    emit(&(besov_norm_estimate(&grid).to_json() + "\n"), a.out.as_deref(), stdout)?;
    Ok(Vec::new())
}

#[derive(Serialize)]
struct SincRow {
    function: String,
    truncation: usize,
    max_reconstruction_error: f64,
    max_partition_defect: f64,
    defect_bound: f64,
}

fn sinc_check(a: SincCheckArgs, stdout: &mut dyn Write) -> Result<Vec<FailureRecord>, CliError> {
    let ladder = a.truncations.unwrap_or_else(|| vec![50, 100, 200, 400, 500]);
    if ladder.is_empty() {
        return Err(CliError::Usage("--truncations must not be empty".into()));
    }
    for &j in &ladder {
        in_range("truncations", j, 1, 5000)?;
    }
    let probes = in_range("probes", a.probes.unwrap_or(60), 1, 10_000)?;
    let seed = a.seed.unwrap_or(43);
    let tolerance = positive("tolerance", a.tolerance.unwrap_or(1e-2))?;

    let xs = probe_points(8.0, 9, 20, seed);
    let ys = probe_points(2.0, 3, 5, seed.wrapping_add(1));
    let mut rng = seeded(seed.wrapping_add(2));
    let triples: Vec<(f64, f64, f64)> = (0..probes)
        .map(|_| (xs[index(&mut rng, xs.len())], xs[index(&mut rng, xs.len())], ys[index(&mut rng, ys.len())]))
        .collect();
    let defect_probes = probe_points(10.0, 201, 100, seed);

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for phi in band_limited_family() {
        let mut previous: Option<f64> = None;
        for &j in &ladder {
            let rep = build_sinc_haagerup(&phi, j)?;
            let err = triples
                .iter()
                .map(|&(p, q, r)| rep.reconstruction_error(p, q, r))
                .fold(0.0_f64, f64::max);
            let defect = defect_probes.iter().map(|&x| sinc_partition_defect(x, j)).fold(0.0_f64, f64::max);
            let bound = 4.0 / (std::f64::consts::PI.powi(2) * j as f64) + 1e-12;
            if defect > bound {
                failures.push(failure("sinc partition defect", defect, bound, format!("J = {j}")));
            }
            if let Some(prev) = previous {
                if err > prev + 1e-12 {
                    failures.push(failure("reconstruction error nonincreasing", err, prev, format!("{} at J = {j}", phi.descriptor())));
                }
            }
            previous = Some(err);
            rows.push(SincRow {
                function: phi.descriptor(),
                truncation: j,
                max_reconstruction_error: err,
                max_partition_defect: defect,
                defect_bound: bound,
            });
        }
        let last = previous.expect("ladder is nonempty");
        if last.is_nan() || last > tolerance {
            failures.push(failure("reconstruction error at largest J", last, tolerance, phi.descriptor()));
        }
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        writer.serialize(r).expect("in-memory write");
    }
    let text = String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8");
    emit(&text, a.out.as_deref(), stdout)?;
    summary(&serde_json::json!({ "rows": rows.len(), "failures": failures.len() }), a.out.as_deref(), stdout)?;
    Ok(failures)
}

fn helton_howe(a: HeltonHoweArgs, stdout: &mut dyn Write) -> Result<Vec<FailureRecord>, CliError> {
    let phi = parse_phi(a.phi.as_deref().unwrap_or("x"))?;
    let psi = parse_phi(a.psi.as_deref().unwrap_or("y"))?;
    let ladder = a.n.unwrap_or_else(|| vec![8, 16]);
    let ratio = in_range("ratio", a.ratio.unwrap_or(4), 2, 64)?;
    if ladder.is_empty() {
        return Err(CliError::Usage("--N must not be empty".into()));
    }
    for &n in &ladder {
        in_range("N", n.saturating_mul(ratio), 2, 2048)
            .map_err(|_| CliError::Usage(format!("--N {n} with --ratio {ratio} exceeds M = 2048")))?;
    }
    let quad_points = in_range("quad-points", a.quad_points.unwrap_or(16), 1, 4096)?;
    let tolerance = positive("tolerance", a.tolerance.unwrap_or(1e-6))?;

    let report = run_experiment(&phi, &psi, &ladder, ratio, quad_points, None)?;
    match &a.out {
        Some(stem) => {
            report.write(stem).map_err(|e| match e {
                opcalc_core::Error::Io { path, source } => CliError::Io { path, source },
                other => other.into(),
            })?;
        }
        None => emit(&report.to_csv(), None, stdout)?,
    }
    summary(
        &serde_json::json!({ "max_abs_error": report.max_abs_error(), "max_lhs_imag": report.max_lhs_imag() }),
        a.out.as_deref(),
        stdout,
    )?;

    let mut failures = Vec::new();
    let worst = report.max_abs_error();
    if worst.is_nan() || worst > tolerance {
        failures.push(failure("trace formula", worst, tolerance, format!("phi = {}, psi = {}", phi.descriptor(), psi.descriptor())));
    }
    for r in &report.rows {
        if let Some(next) = report.rows.iter().find(|s| s.n == 2 * r.n) {
            if next.abs_error > r.abs_error + 1e-6 {
                failures.push(failure(
                    "error nonincreasing as N doubles",
                    next.abs_error,
                    r.abs_error + 1e-6,
                    format!("N = {} -> {}", r.n, next.n),
                ));
            }
        }
    }
    Ok(failures)
}
