//! Named verification suites. Each suite runs a self-contained experiment,
//! measures a family of identities or inequalities against closed-form
//! oracles, and emits a Report; the acceptance matrix drives them over the
//! standard parameter points.

use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::barenblatt::SourceProfile;
use crate::config::{AutoOr, ExperimentConfig, GridConfig, InitConfig, OutputConfig, RegularizationConfig, TimeConfig};
use crate::error::{Error, Result};
use crate::functionals::{
    self, debruijn_defect, derivative_nonuniform, entropies, entropy_curvature_form,
    entropy_power_curvature, entropy_power_slope_defect, entropy_slope_forms, gn_ratio,
    gradient_lp_norm, lp_norm, production, second_derivative_nonuniform, sobolev_check,
    DiagRecord,
};
use crate::grid::RadialGrid;
use crate::params::Params;
use crate::report::{Check, Report};
use crate::solver::{build_initial, EvolveOptions, InitialData, Regularization, Stepper};
use crate::special::{
    gamma, gn_constant, gn_exponents, isoperimetric_constant, isoperimetric_constant_forms,
    sharp_sobolev, sobolev_from_isoperimetric,
};
use crate::tolerances as tol;

pub const SUITE_NAMES: &[&str] = &[
    "constants",
    "quadrature",
    "self_similar",
    "debruijn",
    "concavity",
    "isoperimetric",
    "sobolev",
    "gn",
    "remainder",
];

/// The standard parameter matrix every evolution suite is exercised over.
pub const PARAMETER_MATRIX: [(u32, f64, f64); 4] =
    [(1, 2.0, 2.0), (3, 2.0, 2.0), (3, 3.0, 1.0), (3, 2.0, 0.75)];

pub const FUZZ_TRIALS: usize = 10_000;
pub const FUZZ_SEED: u64 = 0x0dd5_eed5;

pub fn run_suite(name: &str, cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let mut report = match name {
        "constants" => constants_suite(cfg),
        "quadrature" => quadrature_suite(cfg),
        "self_similar" => self_similar_suite(cfg),
        "debruijn" => debruijn_suite(cfg),
        "concavity" => concavity_suite(cfg),
        "isoperimetric" => isoperimetric_suite(cfg),
        "sobolev" => sobolev_suite(cfg),
        "gn" => gn_suite(cfg),
        "remainder" => remainder_suite(cfg),
        other => Err(Error::BadConfig(format!(
            "unknown suite {other:?}; expected one of {SUITE_NAMES:?}"
        ))),
    }?;
    report.wallclock_s = start.elapsed().as_secs_f64();
    report.write_json(&Path::new(&cfg.output.dir).join("report.json"))?;
    Ok(report)
}

/// Run every config through one suite. Configs are validated as a batch
/// first (must be nonempty with pairwise distinct output dirs); after that,
/// failures of individual runs are isolated into failing reports so the
/// remaining runs still execute. Reports come back in input order.
pub fn sweep(suite: &str, configs: &[ExperimentConfig]) -> Result<Vec<Report>> {
    if configs.is_empty() {
        return Err(Error::BadConfig("sweep needs at least one config".into()));
    }
    for (i, cfg) in configs.iter().enumerate() {
        cfg.validate()
            .map_err(|e| Error::BadConfig(format!("sweep config #{i}: {e}")))?;
        cfg.params()
            .map_err(|e| Error::BadConfig(format!("sweep config #{i}: {e}")))?;
        for other in &configs[..i] {
            if other.output.dir == cfg.output.dir {
                return Err(Error::BadConfig(format!(
                    "sweep output dirs must be distinct; {:?} repeats",
                    cfg.output.dir
                )));
            }
        }
    }
    let mut reports = Vec::with_capacity(configs.len());
    for cfg in configs {
        match run_suite(suite, cfg) {
            Ok(r) => reports.push(r),
            Err(e) => {
                // params() validated above, so the echo is available
                let mut r = Report::new(suite, cfg.params()?);
                r.push(Check {
                    name: "run_aborted".into(),
                    value: 1.0,
                    expected: 0.0,
                    tolerance: 0.0,
                    pass: false,
                    paper_anchor: format!("orchestration: {e}"),
                });
                let _ = r.write_json(&Path::new(&cfg.output.dir).join("report.json"));
                reports.push(r);
            }
        }
    }
    Ok(reports)
}

/// Canonical configuration for each suite: the settings the acceptance gate
/// runs at for the (n=1, p=2, gamma=2) point (or the suite's fixed point).
pub fn default_config(suite: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig {
        dimension: 1,
        p: 2.0,
        gamma: 2.0,
        grid: GridConfig { r_max: AutoOr::Auto, cells: 2000 },
        time: TimeConfig { t0: 1.0, t_end: 2.0, cfl: 0.25, max_steps: 5_000_000, save_every: 0 },
        init: InitConfig { kind: "barenblatt".into(), options: [("t0".to_string(), 1.0)].into() },
        regularization: RegularizationConfig::default(),
        output: OutputConfig {
            dir: format!("out/{suite}"),
            emit_csv: true,
            emit_snapshots: false,
        },
        tolerances: Default::default(),
    };
    match suite {
        "constants" | "quadrature" => {
            cfg.grid.cells = 4000;
        }
        "self_similar" | "debruijn" | "concavity" | "isoperimetric" => {}
        "sobolev" => {
            // quadrature-only; the extremal's gradient tail decays like 1/R,
            // so the domain must be deep and the mesh fine near the core
            cfg.dimension = 3;
            cfg.p = 2.0;
            cfg.gamma = 2.0 / 3.0;
            cfg.grid = GridConfig { r_max: AutoOr::Value(6000.0), cells: 600_000 };
        }
        "gn" => {
            cfg.grid.cells = 200_000;
        }
        "remainder" => {
            cfg.time = TimeConfig {
                t0: 0.0,
                t_end: 1.6,
                cfl: 0.25,
                max_steps: 5_000_000,
                save_every: 2000,
            };
            cfg.init = InitConfig {
                kind: "gaussian_bump".into(),
                options: [("width".to_string(), 0.6)].into(),
            };
            cfg.grid.cells = 1500;
        }
        other => {
            return Err(Error::BadConfig(format!(
                "unknown suite {other:?}; expected one of {SUITE_NAMES:?}"
            )))
        }
    }
    // advance exactly one unit of family parameter on evolution suites
    if matches!(suite, "self_similar" | "debruijn" | "concavity" | "isoperimetric" | "gn") {
        let c = cfg.params()?.similarity_speed()?;
        cfg.time.t_end = cfg.time.t0 + 1.0 / c;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// `default_config` moved to another point of the parameter matrix, with the
/// time window rescaled to that point's similarity speed and a distinct
/// output dir.
pub fn matrix_config(suite: &str, n: u32, p: f64, gamma_: f64) -> Result<ExperimentConfig> {
    let mut cfg = default_config(suite)?;
    cfg.dimension = n;
    cfg.p = p;
    cfg.gamma = gamma_;
    if matches!(suite, "self_similar" | "debruijn" | "concavity" | "isoperimetric" | "gn") {
        let c = cfg.params()?.similarity_speed()?;
        cfg.time.t_end = cfg.time.t0 + 1.0 / c;
    }
    cfg.output.dir = format!("out/{suite}_n{n}_p{p}_g{gamma_}");
    cfg.validate()?;
    Ok(cfg)
}

// ---------------------------------------------------------------------------
// shared run machinery

pub struct RunOutput {
    pub records: Vec<DiagRecord>,
    /// Defect of the discrete pressure equation over one extra step taken
    /// from the final state.
    pub pressure_residual: f64,
    pub series_file: Option<String>,
    pub steps: u64,
}

struct Execution {
    stepper: Stepper,
    initial_u: Vec<f64>,
    /// Per record: the two integral forms of dE_b/dt.
    slope_forms: Vec<(f64, f64)>,
    /// Per record: the integral form of d^2E_b/dt^2.
    curvature_forms: Vec<f64>,
    out: RunOutput,
}

/// Evolve per the config, collecting diagnostics at every emitted snapshot,
/// and write the series/snapshot artifacts the output block asks for.
fn execute(cfg: &ExperimentConfig) -> Result<Execution> {
    let params = cfg.params()?;
    let r_max = cfg.resolve_r_max()?;
    let grid = RadialGrid::new(cfg.dimension, r_max, cfg.grid.cells)?;
    let init = cfg.initial_data()?;
    let mut u = build_initial(&grid, &params, &init)?;
    let initial_u = u.clone();
    let mut st = Stepper::new(grid, params, &u, cfg.time.cfl, Regularization::default())?;
    if let AutoOr::Value(e) = cfg.regularization.eps_rule {
        st.eps = e;
    }
    if let AutoOr::Value(f) = cfg.regularization.u_floor_rule {
        st.u_floor = f;
    }
    let opts = EvolveOptions {
        t0: cfg.time.t0,
        t_end: cfg.time.t_end,
        max_steps: cfg.time.max_steps,
        save_every: cfg.time.save_every,
    };
    let mut saved: Vec<(f64, f64, u64, Vec<f64>)> = Vec::new();
    let steps = st.evolve(&mut u, &opts, |snap| {
        saved.push((snap.t, snap.dt, snap.step, snap.u.to_vec()));
    })?;

    // exact self-similar reference only when the data is exactly on the family
    let profile = SourceProfile::new(params)?;
    let s0 = cfg.initial_family_parameter();
    let track = cfg.init.kind == "barenblatt";

    let outdir = Path::new(&cfg.output.dir);
    if cfg.output.emit_csv || cfg.output.emit_snapshots {
        std::fs::create_dir_all(outdir)?;
    }
    let mut records = Vec::with_capacity(saved.len());
    let mut slope_forms = Vec::with_capacity(saved.len());
    let mut curvature_forms = Vec::with_capacity(saved.len());
    let mut csv = String::from(functionals::CSV_HEADER);
    csv.push('\n');
    for (t, dt, step, state) in &saved {
        let snap = crate::solver::Snapshot { t: *t, dt: *dt, step: *step, u: state };
        let reference = if track {
            Some((&profile, profile.flow_time(s0, opts.t0, *t)?))
        } else {
            None
        };
        let rec = DiagRecord::compute(&st, &snap, reference)?;
        csv.push_str(&rec.csv_row());
        csv.push('\n');
        records.push(rec);
        slope_forms.push(entropy_slope_forms(&st, state)?);
        curvature_forms.push(entropy_curvature_form(&st, state)?);
        if cfg.output.emit_snapshots {
            let mut body = String::from("r,u\n");
            for (r, x) in st.grid.centers().iter().zip(state) {
                body.push_str(&format!("{r:.12e},{x:.12e}\n"));
            }
            std::fs::write(outdir.join(format!("snapshot_{step:08}.csv")), body)?;
        }
    }
    let series_file = if cfg.output.emit_csv {
        let path = outdir.join("series.csv");
        std::fs::write(&path, csv)?;
        Some(path.to_string_lossy().into_owned())
    } else {
        None
    };

    // one extra step for the two-state pressure-equation defect
    let dt = st.stable_dt(&u, cfg.time.t_end - cfg.time.t0)?;
    let mut after = u.clone();
    st.step(&mut after, dt);
    let pressure_residual = st.pressure_residual(&u, &after, dt)?;

    Ok(Execution {
        stepper: st,
        initial_u,
        slope_forms,
        curvature_forms,
        out: RunOutput { records, pressure_residual, series_file, steps },
    })
}

/// Public face of `execute` for the CLI's plain `evolve` verb.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    Ok(execute(cfg)?.out)
}

fn trapezoid(t: &[f64], f: &[f64]) -> f64 {
    t.windows(2)
        .zip(f.windows(2))
        .map(|(ts, fs)| 0.5 * (fs[0] + fs[1]) * (ts[1] - ts[0]))
        .sum()
}

fn linear_fit_r2(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|&v| (v - mx) * (v - mx)).sum();
    let syy: f64 = y.iter().map(|&v| (v - my) * (v - my)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    (sxy * sxy) / (sxx * syy)
}

/// Max residual of the radial decomposition
///   |grad v|^{2p-4} |Hess v|^2_A = (Delta_p v)^2 / n + |T|^2_A
/// over random quadratic pressures on random grids, evaluated through the
/// discrete pointwise kernels. Cells with a near-degenerate gradient are
/// skipped: there the p-weight is cut off by convention and both sides
/// vanish together.
pub fn decomposition_fuzz_residual(trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.gen_range(1..=6u32);
        let p = rng.gen_range(1.2..4.5);
        let r_max = rng.gen_range(0.5..4.0);
        let c0 = rng.gen_range(-2.0..2.0);
        let c1 = rng.gen_range(-2.0..2.0);
        let c2 = rng.gen_range(-2.0..2.0);
        let grid = RadialGrid::new(n, r_max, 16).expect("valid fuzz grid");
        let v: Vec<f64> = grid.centers().iter().map(|&r| c0 + c1 * r + c2 * r * r).collect();
        let lap = grid.p_laplacian_pointwise(&v, p, 0.0);
        let t2 = grid.traceless_norm_sq(&v, p, 0.0);
        let vr = grid.cell_gradient(&v);
        let vrr = grid.cell_second_derivative(&v);
        let nf = f64::from(n);
        for i in 1..grid.cells - 1 {
            if vr[i].abs() < 1e-2 {
                continue;
            }
            let r = grid.centers()[i];
            let weight = (vr[i] * vr[i]).powf((p - 2.0) / 2.0);
            let angular = vr[i] / r;
            let hess = weight
                * weight
                * ((p - 1.0) * (p - 1.0) * vrr[i] * vrr[i] + (nf - 1.0) * angular * angular);
            let lhs = lap[i] * lap[i] / nf + t2[i];
            let scale = lhs.abs().max(hess.abs());
            if scale > 1e-30 {
                worst = worst.max((lhs - hess).abs() / scale);
            }
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// suites

fn constants_suite(cfg: &ExperimentConfig) -> Result<Report> {
    let params = cfg.params()?;
    let mut report = Report::new("constants", params);

    let (shifted_form, unshifted_form) = isoperimetric_constant_forms(&params)?;
    report.push(Check::close_rel(
        "C_iso_two_forms",
        shifted_form,
        unshifted_form,
        cfg.tolerance("C_iso_two_forms", tol::ISOPERIMETRIC_TWO_FORMS_REL),
        "sharp constant of the entropy-power isoperimetric inequality",
    ));

    // closure by quadrature: N_b * I_b of the sampled exact profile
    let profile = SourceProfile::new(params)?;
    let r_max = cfg.resolve_r_max()?;
    let grid = RadialGrid::new(cfg.dimension, r_max, cfg.grid.cells)?;
    let edge = profile.support_radius_at(1.0);
    let u = grid.sample_cell_averages(|r| profile.solution(r, 1.0).expect("s > 0"), edge);
    let st = Stepper::new(grid, params, &u, cfg.time.cfl, Regularization::default())?;
    let ent = entropies(&st, &u)?;
    report.push(Check::close_rel(
        "C_iso_quadrature",
        ent.product,
        isoperimetric_constant(&params)?,
        cfg.tolerance("C_iso_quadrature", tol::ISOPERIMETRIC_QUADRATURE_REL),
        "sharp constant attained by the source profile",
    ));

    // independent simplification of the three-dimensional p = 2 constant
    let s32 = sharp_sobolev(3, 2.0)?;
    report.push(Check::close_rel(
        "sobolev_value_3_2",
        s32,
        3.0 * (std::f64::consts::PI / 2.0).powf(4.0 / 3.0),
        cfg.tolerance("sobolev_value_3_2", tol::SOBOLEV_VALUE_REL),
        "critical Sobolev constant, three dimensions",
    ));

    // classical closed form for p = 2 across dimensions
    for n in 3u32..=6 {
        let nf = f64::from(n);
        let classical = nf * (nf - 2.0) * std::f64::consts::PI
            * (gamma(nf / 2.0)? / gamma(nf)?).powf(2.0 / nf);
        report.push(Check::close_rel(
            &format!("sobolev_classical_n{n}"),
            sharp_sobolev(n, 2.0)?,
            classical,
            cfg.tolerance("sobolev_classical", tol::SOBOLEV_CLASSICAL_REL),
            "classical sharp Sobolev constant",
        ));
    }

    // the critical-exponent constant reproduces the Sobolev constant
    for (n, p) in [(3u32, 2.0f64), (4, 2.0), (5, 3.0)] {
        report.push(Check::close_rel(
            &format!("sobolev_chain_{n}_{p:.0}"),
            sobolev_from_isoperimetric(n, p)?,
            sharp_sobolev(n, p)?,
            cfg.tolerance("sobolev_chain", tol::SOBOLEV_CHAIN_REL),
            "Sobolev constant recovered from the critical sharp product",
        ));
    }
    Ok(report)
}

fn quadrature_suite(cfg: &ExperimentConfig) -> Result<Report> {
    let params = cfg.params()?;
    let mut report = Report::new("quadrature", params);
    let profile = SourceProfile::new(params)?;
    let exact = profile.functionals(1.0)?;
    let r_max = cfg.resolve_r_max()?;
    let grid = RadialGrid::new(cfg.dimension, r_max, cfg.grid.cells)?;
    let edge = profile.support_radius_at(1.0);
    // raw conservative sampling; the unit-mass defect is the thing measured
    let u = grid.sample_cell_averages(|r| profile.solution(r, 1.0).expect("s > 0"), edge);
    let st = Stepper::new(grid, params, &u, cfg.time.cfl, Regularization::default())?;
    let ent = entropies(&st, &u)?;

    report.push(Check::at_most(
        "mass_error",
        (ent.mass - 1.0).abs(),
        cfg.tolerance("mass_error", tol::SAMPLED_MASS_ABS),
        "unit-mass normalization of the source profile",
    ));
    let rel = cfg.tolerance("functional_error", tol::SAMPLED_FUNCTIONAL_REL);
    report.push(Check::close_rel(
        "entropy_integral",
        ent.entropy_integral,
        exact.entropy_integral,
        rel,
        "closed-form entropy integral of the source profile",
    ));
    report.push(Check::close_rel(
        "q_moment",
        ent.q_moment,
        exact.q_moment,
        rel,
        "closed-form q-moment of the source profile",
    ));
    report.push(Check::close_rel(
        "fisher_information",
        ent.fisher,
        exact.fisher,
        rel,
        "closed-form weighted Fisher information of the source profile",
    ));
    report.push(Check::at_most(
        "decomposition_residual",
        decomposition_fuzz_residual(FUZZ_TRIALS, FUZZ_SEED),
        cfg.tolerance("decomposition_residual", tol::DECOMPOSITION_REL),
        "radial decomposition of the weighted Hessian norm",
    ));
    Ok(report)
}

fn self_similar_suite(cfg: &ExperimentConfig) -> Result<Report> {
    let params = cfg.params()?;
    if cfg.init.kind != "barenblatt" {
        return Err(Error::BadConfig(
            "self_similar suite needs init.kind = \"barenblatt\"".into(),
        ));
    }
    let mut report = Report::new("self_similar", params);
    let run = execute(cfg)?;
    let fine_err = run
        .out
        .records
        .last()
        .and_then(|r| r.err_exact_l1)
        .ok_or_else(|| Error::BadConfig("self-similar run tracked no reference".into()))?;
    report.series_file = run.out.series_file.clone();

    report.push(Check::at_most(
        "l1_error",
        fine_err,
        cfg.tolerance("l1_error", tol::SELF_SIMILAR_L1),
        "source solution evolved along its own family",
    ));

    // halve the mesh, rerun, and read off the observed order
    let mut coarse_cfg = cfg.clone();
    coarse_cfg.grid.cells = cfg.grid.cells / 2;
    coarse_cfg.output.dir = format!("{}/coarse", cfg.output.dir);
    let coarse = execute(&coarse_cfg)?;
    let coarse_err = coarse
        .out
        .records
        .last()
        .and_then(|r| r.err_exact_l1)
        .ok_or_else(|| Error::BadConfig("coarse run tracked no reference".into()))?;
    let order = (coarse_err / fine_err).log2();
    report.push(Check::at_least(
        "convergence_order",
        order,
        cfg.tolerance("convergence_order", tol::SELF_SIMILAR_ORDER_MIN),
        "first-order convergence of the front-capturing scheme",
    ));

    let masses: Vec<f64> = run.out.records.iter().map(|r| r.mass).collect();
    let drift = masses
        .iter()
        .map(|m| (m - masses[0]).abs())
        .fold(0.0, f64::max);
    report.push(Check::at_most(
        "mass_drift",
        drift,
        cfg.tolerance("mass_drift", tol::MASS_DRIFT_ABS),
        "conservative discretization",
    ));
    report.push(Check::at_most(
        "pressure_residual",
        run.out.pressure_residual,
        cfg.tolerance("pressure_residual", tol::PRESSURE_RESIDUAL_MAX),
        "pressure form of the evolution equation",
    ));
    Ok(report)
}

fn debruijn_suite(cfg: &ExperimentConfig) -> Result<Report> {
    let params = cfg.params()?;
    let mut report = Report::new("debruijn", params);
    let exec = execute(cfg)?;
    let recs = &exec.out.records;
    report.series_file = exec.out.series_file.clone();

    // smooth bump data has no free boundary and earns the tighter bound
    let smooth = matches!(cfg.init.kind.as_str(), "gaussian_bump" | "double_bump");
    let default_tol = if smooth { tol::DEBRUIJN_SMOOTH_REL } else { tol::DEBRUIJN_REL };
    report.push(Check::at_most(
        "max_residual",
        debruijn_defect(recs)?,
        cfg.tolerance("max_residual", default_tol),
        "entropy dissipation identity dR/dt = I",
    ));
    report.push(Check::at_most(
        "entropy_power_slope",
        entropy_power_slope_defect(recs, &params)?,
        cfg.tolerance("entropy_power_slope", tol::DEBRUIJN_REL),
        "entropy power growth rate dN/dt = -sigma b N I",
    ));

    // dE/dt: finite difference vs both integral forms at interior records
    let t: Vec<f64> = recs.iter().map(|r| r.t).collect();
    let e: Vec<f64> = recs.iter().map(|r| r.entropy_integral).collect();
    let fd = derivative_nonuniform(&t, &e)?;
    let mut worst = 0.0f64;
    for (k, slope) in fd.iter().enumerate() {
        let (conservative, closed) = exec.slope_forms[k + 1];
        let denom = slope.abs().max(1e-300);
        worst = worst.max((slope - conservative).abs() / denom);
        worst = worst.max((slope - closed).abs() / denom);
    }
    report.push(Check::at_most(
        "entropy_slope_identity",
        worst,
        cfg.tolerance("entropy_slope_identity", tol::ENTROPY_SLOPE_FORMS_REL),
        "two integral forms of the entropy dissipation rate",
    ));
    Ok(report)
}

fn concavity_suite(cfg: &ExperimentConfig) -> Result<Report> {
    let params = cfg.params()?;
    let mut report = Report::new("concavity", params);
    let exec = execute(cfg)?;
    let recs = &exec.out.records;
    report.series_file = exec.out.series_file.clone();

    let t: Vec<f64> = recs.iter().map(|r| r.t).collect();
    let n_series: Vec<f64> = recs.iter().map(|r| r.entropy_power).collect();
    let min_gain = n_series
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    report.push(Check {
        name: "entropy_power_increasing".into(),
        value: min_gain,
        expected: 0.0,
        tolerance: 0.0,
        pass: min_gain > 0.0,
        paper_anchor: "entropy power strictly increasing along the flow".into(),
    });

    if cfg.init.kind != "barenblatt" {
        // d2N/dt2 is genuinely negative away from the family, so the noise in
        // the centered differences is buried under the signal.  On the family
        // itself N is exactly linear and the differences are symmetric
        // round-off, making this ratio ~1 at any resolution; there the
        // linearity fit and the production null below carry the statement.
        let dd = second_derivative_nonuniform(&t, &n_series)?;
        let max_dd = dd.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let max_abs = dd.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
        report.push(Check::at_most(
            "concavity_slack",
            max_dd / max_abs,
            cfg.tolerance("concavity_slack", tol::CONCAVITY_SLACK_FRACTION),
            "concavity of the entropy power",
        ));
    }

    if cfg.init.kind == "barenblatt" {
        // on the family, N grows exactly linearly in the family parameter
        let profile = SourceProfile::new(params)?;
        let s0 = cfg.initial_family_parameter();
        let s_values: Vec<f64> = recs
            .iter()
            .map(|r| profile.flow_time(s0, cfg.time.t0, r.t))
            .collect::<Result<_>>()?;
        report.push(Check::at_least(
            "linearity_r2",
            linear_fit_r2(&s_values, &n_series),
            cfg.tolerance("linearity_r2", tol::LINEARITY_R2_MIN),
            "linear growth of the entropy power on the source family",
        ));

        // production at the exact profile is pure discretization noise;
        // a 5%-perturbed state sets the scale
        let w_source = production(&exec.stepper, &exec.initial_u)?.total;
        let perturbed = build_initial(
            &exec.stepper.grid,
            &params,
            &InitialData::PerturbedBarenblatt { s0, amplitude: 0.05, mode: 2 },
        )?;
        let w_perturbed = production(&exec.stepper, &perturbed)?.total;
        report.push(Check::at_most(
            "production_null_ratio",
            w_source / w_perturbed,
            cfg.tolerance("production_null_ratio", tol::PRODUCTION_NULL_FRACTION),
            "entropy-power production vanishes exactly on the source family",
        ));
    } else if params.b > 0.0 {
        // away from the family the production is genuinely nonzero and must
        // reproduce the finite-difference curvature of N.  Compactly
        // supported runs only: with an algebraic tail (b < 0) the domain
        // truncation feeds a smooth spurious curvature into N that sits two
        // orders above the production signal at any affordable radius, so
        // those runs verify the entropy-curvature integral form below
        // instead.
        let pairs = entropy_power_curvature(recs, &params)?;
        let scale = pairs
            .iter()
            .map(|(_, _, f)| f.abs())
            .fold(0.0, f64::max)
            .max(1e-300);
        let mismatch = pairs
            .iter()
            .map(|(_, fd, f)| (fd - f).abs())
            .fold(0.0, f64::max)
            / scale;
        report.push(Check::at_most(
            "curvature_identity",
            mismatch,
            cfg.tolerance("curvature_identity", tol::CURVATURE_MISMATCH_REL),
            "second derivative of the entropy power equals the production",
        ));
    }

    if params.b < 0.0 {
        // smooth (no front) runs also expose the second-derivative integral
        // form of the entropy itself
        let e_series: Vec<f64> = recs.iter().map(|r| r.entropy_integral).collect();
        let fd = second_derivative_nonuniform(&t, &e_series)?;
        let scale = exec.curvature_forms[1..exec.curvature_forms.len() - 1]
            .iter()
            .map(|f| f.abs())
            .fold(0.0, f64::max)
            .max(1e-300);
        let mismatch = fd
            .iter()
            .enumerate()
            .map(|(k, d)| (d - exec.curvature_forms[k + 1]).abs())
            .fold(0.0, f64::max)
            / scale;
        report.push(Check::at_most(
            "entropy_curvature_identity",
            mismatch,
            cfg.tolerance("entropy_curvature_identity", tol::CURVATURE_MISMATCH_REL),
            "integral form of the entropy second derivative",
        ));
    }
    Ok(report)
}

fn isoperimetric_suite(cfg: &ExperimentConfig) -> Result<Report> {
    let params = cfg.params()?;
    let mut report = Report::new("isoperimetric", params);
    let exec = execute(cfg)?;
    let recs = &exec.out.records;
    report.series_file = exec.out.series_file.clone();
    let c_iso = isoperimetric_constant(&params)?;

    let q: Vec<f64> = recs.iter().map(|r| r.product).collect();
    let max_increase = q.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    report.push(Check::at_most(
        "q_increase_fraction",
        max_increase / q[0],
        cfg.tolerance("q_increase_fraction", tol::PRODUCT_INCREASE_SLACK),
        "monotonicity of the entropy-power/information product",
    ));
    let min_q = q.iter().cloned().fold(f64::INFINITY, f64::min);
    report.push(Check::at_least(
        "q_lower_fraction",
        min_q / c_iso,
        cfg.tolerance("q_lower_fraction", tol::PRODUCT_LOWER_FRACTION),
        "sharp lower bound of the product",
    ));
    if cfg.init.kind == "barenblatt" {
        let worst = q
            .iter()
            .map(|x| (x - c_iso).abs())
            .fold(0.0, f64::max);
        report.push(Check::at_most(
            "q_constant_on_source",
            worst / c_iso,
            cfg.tolerance("q_constant_on_source", tol::PRODUCT_CONSTANT_REL),
            "equality case of the product inequality on the source family",
        ));
    }
    Ok(report)
}

fn sobolev_suite(cfg: &ExperimentConfig) -> Result<Report> {
    let n = cfg.dimension;
    let p = cfg.p;
    let nf = f64::from(n);
    if !(p < nf) {
        return Err(Error::BadConfig(format!(
            "sobolev suite needs p < n, got p = {p}, n = {n}"
        )));
    }
    let params = cfg.params()?;
    let mut report = Report::new("sobolev", params);

    // the extremal is the critical-exponent profile raised to 1/p*
    let critical = Params::new(n, p, -1.0 / nf + 1.0 / (p - 1.0))?;
    let profile = SourceProfile::new(critical)?;
    let p_star = p * nf / (nf - p);
    let r_max = cfg.resolve_r_max()?;
    let grid = RadialGrid::new(n, r_max, cfg.grid.cells)?;
    let w = grid.sample_cell_averages(
        |r| profile.solution(r, 1.0).expect("s > 0").powf(1.0 / p_star),
        None,
    );
    let extremal = sobolev_check(&grid, &w, n, p)?;
    report.push(Check::close(
        "extremal_ratio",
        extremal.ratio,
        1.0,
        cfg.tolerance("extremal_ratio", tol::EXTREMAL_RATIO_REL),
        "equality case of the sharp Sobolev inequality",
    ));

    let gauss = grid.sample_cell_averages(|r| (-r * r / 2.0).exp(), None);
    let gaussian = sobolev_check(&grid, &gauss, n, p)?;
    report.push(Check::at_least(
        "gaussian_ratio",
        gaussian.ratio,
        cfg.tolerance("gaussian_ratio", tol::GAUSSIAN_SOBOLEV_RATIO_MIN),
        "strictness of the Sobolev inequality off the extremal family",
    ));

    // w -> lambda^{n/p*} w(lambda .) maps the mesh onto a 1/lambda mesh with
    // scaled values; with lambda = 2 the rescaling is exact in floating point
    let lambda = 2.0f64;
    let half_grid = RadialGrid::new(n, r_max / lambda, cfg.grid.cells)?;
    let w_scaled: Vec<f64> = w.iter().map(|&x| lambda.powf(nf / p_star) * x).collect();
    let dilated = sobolev_check(&half_grid, &w_scaled, n, p)?;
    report.push(Check::close(
        "scaling_invariance",
        dilated.ratio / extremal.ratio,
        1.0,
        cfg.tolerance("scaling_invariance", tol::SCALING_INVARIANCE_REL),
        "homogeneity of both sides of the Sobolev inequality",
    ));
    Ok(report)
}

fn gn_suite(cfg: &ExperimentConfig) -> Result<Report> {
    let params = cfg.params()?;
    let mut report = Report::new("gn", params);
    let s = params.gn_s()?;
    let profile = SourceProfile::new(params)?;
    let r_max = cfg.resolve_r_max()?;
    let grid = RadialGrid::new(cfg.dimension, r_max, cfg.grid.cells)?;
    let edge = profile.support_radius_at(1.0);
    let ps = params.p * s;

    let w = grid.sample_cell_averages(
        |r| profile.solution(r, 1.0).expect("s > 0").powf(1.0 / ps),
        edge,
    );
    report.push(Check::close(
        "extremal_ratio",
        gn_ratio(&grid, &w, &params, s)?,
        1.0,
        cfg.tolerance("extremal_ratio", tol::EXTREMAL_RATIO_REL),
        "equality case of the sharp interpolation inequality",
    ));
    let (lhs_extremal, c_term) = remainder_deficit(&grid, &w, &params, s)?;
    report.push(Check::close(
        "remainder_extremal",
        lhs_extremal / c_term,
        0.0,
        cfg.tolerance("remainder_extremal", tol::EXTREMAL_RATIO_REL),
        "remainder of the interpolation inequality vanishes at the extremal",
    ));

    let gauss = grid.sample_cell_averages(|r| (-r * r / 2.0).exp(), None);
    let gauss_ratio = gn_ratio(&grid, &gauss, &params, s)?;
    report.push(Check::at_most(
        "gaussian_ratio",
        gauss_ratio,
        cfg.tolerance("gaussian_ratio", 1.0),
        "interpolation inequality for non-extremal data",
    ));
    let (lhs_gauss, _) = remainder_deficit(&grid, &gauss, &params, s)?;
    report.push(Check {
        name: "remainder_positive_gaussian".into(),
        value: lhs_gauss / c_term,
        expected: 0.0,
        tolerance: 0.0,
        pass: lhs_gauss > 0.0,
        paper_anchor: "strictly positive remainder off the extremal family".into(),
    });
    Ok(report)
}

/// Deficit of the power-raised interpolation inequality for w normalized so
/// that u0 = w^{ps} is a probability density:
///   ||grad w||_p^p * E0^{sigma-1} - C^{-p/e},
/// where E0 = ||w||_{(p-1)s+1}^{(p-1)s+1} is the entropy integral of u0.
/// Returns (deficit, the constant term) so callers can normalize.
fn remainder_deficit(
    grid: &RadialGrid,
    w: &[f64],
    params: &Params,
    s: f64,
) -> Result<(f64, f64)> {
    let ps = params.p * s;
    let norm = lp_norm(grid, w, ps);
    if !(norm > 0.0) {
        return Err(Error::EmptyDensity);
    }
    let scaled: Vec<f64> = w.iter().map(|&x| x / norm).collect();
    let (_, e) = gn_exponents(params, s)?;
    let (_, c) = gn_constant(params, s)?;
    let lo = (params.p - 1.0) * s + 1.0;
    let e0 = lp_norm(grid, &scaled, lo).powf(lo);
    let grad = gradient_lp_norm(grid, &scaled, params.p).powf(params.p);
    let c_term = c.powf(-params.p / e);
    Ok((grad * e0.powf(params.sigma - 1.0) - c_term, c_term))
}

fn remainder_suite(cfg: &ExperimentConfig) -> Result<Report> {
    let params = cfg.params()?;
    let mut report = Report::new("remainder", params);
    let exec = execute(cfg)?;
    let recs = &exec.out.records;
    report.series_file = exec.out.series_file.clone();

    let front = params.gamma / (params.b + 1.0);
    let j_limit = front * isoperimetric_constant(&params)?;
    let j: Vec<f64> = recs.iter().map(|r| front * r.product).collect();
    let t: Vec<f64> = recs.iter().map(|r| r.t).collect();
    let w_series: Vec<f64> = recs.iter().map(|r| r.production).collect();
    let j0 = j[0];

    let max_j_increase = j.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    report.push(Check::at_most(
        "j_monotone",
        max_j_increase / j0,
        cfg.tolerance("j_monotone", tol::PRODUCT_INCREASE_SLACK),
        "the scaled product decays at exactly the production rate",
    ));

    // truncate where the certified tail bound J(u_T) - J_inf drops under the
    // stop fraction; J is monotone, so the gap at T bounds the tail integral
    let tail_cap = cfg.tolerance("tail_fraction", tol::REMAINDER_TAIL_FRACTION);
    let stop = j
        .iter()
        .position(|&jk| jk - j_limit <= tail_cap * j0)
        .unwrap_or(j.len() - 1);
    let tail_fraction = (j[stop] - j_limit) / j0;
    report.push(Check::at_most(
        "tail_fraction",
        tail_fraction,
        tail_cap,
        "truncation bound for the improper production integral",
    ));

    let delta_j = j0 - j[stop];
    let integral = trapezoid(&t[..=stop], &w_series[..=stop]);
    report.push(Check::close_rel(
        "remainder_identity",
        integral,
        delta_j,
        cfg.tolerance("remainder_identity", tol::REMAINDER_IDENTITY_REL),
        "entropy production remainder identity",
    ));

    // the norm form of the deficit must agree with the entropy form
    let s = params.gn_s()?;
    let ps = params.p * s;
    let w0: Vec<f64> = exec.initial_u.iter().map(|&x| x.max(0.0).powf(1.0 / ps)).collect();
    let (norm_form, _) = remainder_deficit(&exec.stepper.grid, &w0, &params, s)?;
    let entropy_form = (ps * params.gamma).powf(-params.p) * (j0 - j_limit);
    report.push(Check::close_rel(
        "remainder_norm_form",
        norm_form,
        entropy_form,
        cfg.tolerance("remainder_norm_form", tol::REMAINDER_NORM_FORM_REL),
        "norm form of the interpolation deficit",
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_has_a_default_config() {
        for name in SUITE_NAMES {
            let cfg = default_config(name).unwrap();
            cfg.validate().unwrap();
            cfg.params().unwrap();
        }
        assert!(default_config("nope").is_err());
    }

    #[test]
    fn matrix_configs_are_valid_and_distinct() {
        let mut dirs = std::collections::BTreeSet::new();
        for &(n, p, g) in &PARAMETER_MATRIX {
            let cfg = matrix_config("concavity", n, p, g).unwrap();
            assert!(dirs.insert(cfg.output.dir.clone()), "dir {} repeats", cfg.output.dir);
            // one similarity unit per run
            let c = cfg.params().unwrap().similarity_speed().unwrap();
            assert!((cfg.time.t_end - cfg.time.t0 - 1.0 / c).abs() < 1e-12);
        }
    }

    #[test]
    fn decomposition_identity_fuzz_is_tight() {
        let worst = decomposition_fuzz_residual(2000, FUZZ_SEED);
        assert!(worst <= 1e-12, "fuzz residual {worst}");
        // deterministic under the same seed
        assert_eq!(worst, decomposition_fuzz_residual(2000, FUZZ_SEED));
    }

    #[test]
    fn sweep_rejects_bad_batches() {
        let cfg = default_config("quadrature").unwrap();
        assert!(matches!(sweep("quadrature", &[]), Err(Error::BadConfig(_))));
        let dup = cfg.clone();
        assert!(matches!(
            sweep("quadrature", &[cfg, dup]),
            Err(Error::BadConfig(_))
        ));
    }

    #[test]
    fn linear_fit_and_trapezoid_helpers() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v + 1.0).collect();
        assert!((linear_fit_r2(&x, &y) - 1.0).abs() < 1e-12);
        let bent: Vec<f64> = x.iter().map(|v| v * v).collect();
        assert!(linear_fit_r2(&x, &bent) < 0.97);
        // exact for piecewise-linear integrands
        assert!((trapezoid(&[0.0, 1.0, 3.0], &[0.0, 2.0, 6.0]) - 9.0).abs() < 1e-12);
    }
}
