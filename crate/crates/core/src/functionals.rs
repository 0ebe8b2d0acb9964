//! Discrete entropy diagnostics along a run: Renyi entropy power, Fisher
//! information, the isoperimetric product, the production functional that
//! drives concavity, and the functional-inequality ratios evaluated on
//! arbitrary radial fields.
//!
//! Everything here is a quadrature over the finite-volume grid. Pointwise
//! (non-conservative) quantities -- pressure Laplacian, traceless Hessian --
//! are only trusted on the `Stepper::interior_mask`; the masked front layer
//! contributes O(dr) cells with vanishing weight u^{b+1}.

use crate::barenblatt::SourceProfile;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::params::Params;
use crate::solver::{Snapshot, Stepper};
use crate::special::{gn_constant, gn_exponents, sharp_sobolev, GnForm};

/// Scalar functionals of one state.
#[derive(Debug, Clone, Copy)]
pub struct Entropies {
    pub mass: f64,
    /// E_b = integral of u^{b+1}.
    pub entropy_integral: f64,
    /// R_b = -(1/b) ln E_b.
    pub renyi_entropy: f64,
    /// N_b = E_b^sigma.
    pub entropy_power: f64,
    /// I_b = (b+1)/(gamma E_b) * integral of |grad v|^p u.
    pub fisher: f64,
    /// integral of |x|^q u.
    pub q_moment: f64,
    /// Q_b = N_b I_b.
    pub product: f64,
    /// J_b = gamma/(b+1) * Q_b; decays at rate -W along the flow.
    pub j_functional: f64,
}

pub fn entropies(st: &Stepper, u: &[f64]) -> Result<Entropies> {
    let pr = &st.params;
    let grid = &st.grid;
    if u.len() != grid.cells {
        return Err(Error::LengthMismatch { got: u.len(), want: grid.cells });
    }
    let mass = grid.integrate(u);
    if !(mass > 0.0) {
        return Err(Error::EmptyDensity);
    }
    let e_cells: Vec<f64> = u.iter().map(|&x| x.max(0.0).powf(pr.b + 1.0)).collect();
    let entropy_integral = grid.integrate(&e_cells);
    let v = st.pressure(u);
    let vr = grid.cell_gradient(&v);
    // |grad v|^p u, skipping floored cells (their pressure is synthetic)
    let fisher_cells: Vec<f64> = (0..u.len())
        .map(|i| {
            if u[i] <= st.u_floor {
                0.0
            } else {
                vr[i].abs().powf(pr.p) * u[i]
            }
        })
        .collect();
    let fisher_num = grid.integrate(&fisher_cells);
    let fisher = (pr.b + 1.0) / (pr.gamma * entropy_integral) * fisher_num;
    let qm_cells: Vec<f64> = u
        .iter()
        .zip(grid.centers())
        .map(|(&x, &r)| r.powf(pr.q) * x.max(0.0))
        .collect();
    let q_moment = grid.integrate(&qm_cells);
    let renyi_entropy = -(1.0 / pr.b) * entropy_integral.ln();
    let entropy_power = entropy_integral.powf(pr.sigma);
    let product = entropy_power * fisher;
    let j_functional = pr.gamma / (pr.b + 1.0) * product;
    Ok(Entropies {
        mass,
        entropy_integral,
        renyi_entropy,
        entropy_power,
        fisher,
        q_moment,
        product,
        j_functional,
    })
}

/// The entropy-power production functional
///   W = gamma/(b+1) E^{sigma-1} int [ p |T|^2_A
///        + b(1-sigma) (Delta_p v + I_b)^2 ] u^{b+1},
/// restricted to the trusted interior. Both parts are nonnegative for
/// b > -1/n, and W vanishes exactly on the self-similar family.
#[derive(Debug, Clone, Copy)]
pub struct Production {
    pub total: f64,
    pub hessian_part: f64,
    pub variance_part: f64,
}

pub fn production(st: &Stepper, u: &[f64]) -> Result<Production> {
    let pr = &st.params;
    let grid = &st.grid;
    let ent = entropies(st, u)?;
    let mask = st.interior_mask(u);
    let v = st.pressure(u);
    let lap_v = grid.p_laplacian_pointwise(&v, pr.p, st.eps);
    let t2 = grid.traceless_norm_sq(&v, pr.p, st.eps);
    let coeff = pr.b * (1.0 - pr.sigma);
    let mut hessian = vec![0.0; u.len()];
    let mut variance = vec![0.0; u.len()];
    for i in 0..u.len() {
        if !mask[i] {
            continue;
        }
        let weight = u[i].max(0.0).powf(pr.b + 1.0);
        hessian[i] = pr.p * t2[i] * weight;
        variance[i] = coeff * (lap_v[i] + ent.fisher).powi(2) * weight;
    }
    let front = pr.gamma / (pr.b + 1.0) * ent.entropy_integral.powf(pr.sigma - 1.0);
    let hessian_part = front * grid.integrate(&hessian);
    let variance_part = front * grid.integrate(&variance);
    Ok(Production {
        total: hessian_part + variance_part,
        hessian_part,
        variance_part,
    })
}

/// One row of the diagnostic series written next to every run.
#[derive(Debug, Clone, Copy)]
pub struct DiagRecord {
    pub t: f64,
    pub dt: f64,
    pub mass: f64,
    pub entropy_integral: f64,
    pub renyi_entropy: f64,
    pub entropy_power: f64,
    pub fisher: f64,
    pub product: f64,
    pub production: f64,
    /// L1 distance to the exact self-similar reference, when one is tracked.
    pub err_exact_l1: Option<f64>,
}

pub const CSV_HEADER: &str = "t,dt,mass,E_b,R_b,N_b,I_b,Q_b,W_b,err_exact_l1";

impl DiagRecord {
    pub fn compute(
        st: &Stepper,
        snap: &Snapshot,
        reference: Option<(&SourceProfile, f64)>,
    ) -> Result<DiagRecord> {
        let ent = entropies(st, snap.u)?;
        let prod = production(st, snap.u)?;
        let err_exact_l1 = match reference {
            None => None,
            Some((sp, s)) => {
                let edge = sp.support_radius_at(s);
                let exact = st
                    .grid
                    .sample_cell_averages(|r| sp.solution(r, s).expect("s > 0"), edge);
                let diff: Vec<f64> =
                    snap.u.iter().zip(&exact).map(|(&a, &b)| (a - b).abs()).collect();
                Some(st.grid.integrate(&diff))
            }
        };
        Ok(DiagRecord {
            t: snap.t,
            dt: snap.dt,
            mass: ent.mass,
            entropy_integral: ent.entropy_integral,
            renyi_entropy: ent.renyi_entropy,
            entropy_power: ent.entropy_power,
            fisher: ent.fisher,
            product: ent.product,
            production: prod.total,
            err_exact_l1,
        })
    }

    pub fn csv_row(&self) -> String {
        let tail = self
            .err_exact_l1
            .map(|e| format!("{e:.12e}"))
            .unwrap_or_default();
        format!(
            "{:.12e},{:.6e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{}",
            self.t,
            self.dt,
            self.mass,
            self.entropy_integral,
            self.renyi_entropy,
            self.entropy_power,
            self.fisher,
            self.product,
            self.production,
            tail
        )
    }
}

/// First derivative of f(t) on a nonuniform time series, at the interior
/// points t[1..len-1] (three-point formula, second order).
pub fn derivative_nonuniform(t: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    if t.len() != f.len() {
        return Err(Error::LengthMismatch { got: f.len(), want: t.len() });
    }
    if t.len() < 3 {
        return Err(Error::TooFewRecords { got: t.len(), want: 3 });
    }
    Ok((1..t.len() - 1)
        .map(|k| {
            let hm = t[k] - t[k - 1];
            let hp = t[k + 1] - t[k];
            (hm * hm * f[k + 1] - hp * hp * f[k - 1] + (hp * hp - hm * hm) * f[k])
                / (hm * hp * (hm + hp))
        })
        .collect())
}

/// Second derivative on a nonuniform series, interior points.
pub fn second_derivative_nonuniform(t: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    if t.len() != f.len() {
        return Err(Error::LengthMismatch { got: f.len(), want: t.len() });
    }
    if t.len() < 3 {
        return Err(Error::TooFewRecords { got: t.len(), want: 3 });
    }
    Ok((1..t.len() - 1)
        .map(|k| {
            let hm = t[k] - t[k - 1];
            let hp = t[k + 1] - t[k];
            2.0 * (f[k - 1] * hp - f[k] * (hp + hm) + f[k + 1] * hm) / (hm * hp * (hm + hp))
        })
        .collect())
}

/// Largest relative defect of dR/dt = I over the interior record points.
pub fn debruijn_defect(recs: &[DiagRecord]) -> Result<f64> {
    let t: Vec<f64> = recs.iter().map(|r| r.t).collect();
    let r: Vec<f64> = recs.iter().map(|r| r.renyi_entropy).collect();
    let slopes = derivative_nonuniform(&t, &r)?;
    let mut worst = 0.0f64;
    for (k, slope) in slopes.iter().enumerate() {
        let fisher = recs[k + 1].fisher;
        worst = worst.max((slope - fisher).abs() / fisher.abs());
    }
    Ok(worst)
}

/// Largest relative defect of dN/dt = -sigma b N I (always positive).
pub fn entropy_power_slope_defect(recs: &[DiagRecord], params: &Params) -> Result<f64> {
    let t: Vec<f64> = recs.iter().map(|r| r.t).collect();
    let n: Vec<f64> = recs.iter().map(|r| r.entropy_power).collect();
    let slopes = derivative_nonuniform(&t, &n)?;
    let mut worst = 0.0f64;
    for (k, slope) in slopes.iter().enumerate() {
        let want = -params.sigma * params.b * recs[k + 1].entropy_power * recs[k + 1].fisher;
        worst = worst.max((slope - want).abs() / want.abs());
    }
    Ok(worst)
}

/// Interior second differences of the entropy power, paired with the exact
/// production formula N'' = (sigma b (b+1)/gamma) W at the same times.
pub fn entropy_power_curvature(
    recs: &[DiagRecord],
    params: &Params,
) -> Result<Vec<(f64, f64, f64)>> {
    let t: Vec<f64> = recs.iter().map(|r| r.t).collect();
    let n: Vec<f64> = recs.iter().map(|r| r.entropy_power).collect();
    let dd = second_derivative_nonuniform(&t, &n)?;
    Ok(dd
        .into_iter()
        .enumerate()
        .map(|(k, curv)| {
            let formula = params.sigma * params.b * (params.b + 1.0) / params.gamma
                * recs[k + 1].production;
            (t[k + 1], curv, formula)
        })
        .collect())
}

/// The two integral forms of dE_b/dt along the flow:
///   b int Delta_p(v) u^{b+1}   and   -(b(b+1)/gamma) int |grad v|^p u.
/// Both must match the finite-difference slope of E_b on a run. The first
/// uses the conservative p-Laplacian (the discrete analogue of the
/// integration by parts that links them).
pub fn entropy_slope_forms(st: &Stepper, u: &[f64]) -> Result<(f64, f64)> {
    let pr = &st.params;
    let v = st.pressure(u);
    let lap_v = st.grid.p_laplacian(&v, pr.p, st.eps);
    let cells: Vec<f64> = (0..u.len())
        .map(|i| {
            if u[i] <= st.u_floor {
                0.0
            } else {
                lap_v[i] * u[i].powf(pr.b + 1.0)
            }
        })
        .collect();
    let first = pr.b * st.grid.integrate(&cells);
    let ent = entropies(st, u)?;
    // I_b = (b+1)/(gamma E) int |grad v|^p u, so the second form is
    // -(b(b+1)/gamma) int |grad v|^p u = -b E I.
    let second = -pr.b * ent.entropy_integral * ent.fisher;
    Ok((first, second))
}

/// Integral form of d^2 E_b/dt^2:
///   p b int [ |grad v|^{2p-4} |Hess v|^2_A + b (Delta_p v)^2 ] u^{b+1},
/// assembled from the pointwise operators on the trusted interior via
/// |grad v|^{2p-4}|Hess v|^2_A = (Delta_p v)^2/n + |T|^2_A.
pub fn entropy_curvature_form(st: &Stepper, u: &[f64]) -> Result<f64> {
    let pr = &st.params;
    let mask = st.interior_mask(u);
    let v = st.pressure(u);
    let lap_v = st.grid.p_laplacian_pointwise(&v, pr.p, st.eps);
    let t2 = st.grid.traceless_norm_sq(&v, pr.p, st.eps);
    let cells: Vec<f64> = (0..u.len())
        .map(|i| {
            if !mask[i] {
                return 0.0;
            }
            let hess = lap_v[i] * lap_v[i] / pr.nf() + t2[i];
            (hess + pr.b * lap_v[i] * lap_v[i]) * u[i].max(0.0).powf(pr.b + 1.0)
        })
        .collect();
    Ok(pr.p * pr.b * st.grid.integrate(&cells))
}

/// L^p norm of a cell field.
pub fn lp_norm(grid: &RadialGrid, f: &[f64], p: f64) -> f64 {
    let cells: Vec<f64> = f.iter().map(|&x| x.abs().powf(p)).collect();
    grid.integrate(&cells).powf(1.0 / p)
}

/// L^p norm of the discrete radial gradient of a cell field.
pub fn gradient_lp_norm(grid: &RadialGrid, f: &[f64], p: f64) -> f64 {
    let g = grid.cell_gradient(f);
    let cells: Vec<f64> = g.iter().map(|&x| x.abs().powf(p)).collect();
    grid.integrate(&cells).powf(1.0 / p)
}

/// Both sides of the critical Sobolev inequality for one field, with w
/// rescaled so that w^{p*} has unit mass (the ratio is scale-invariant;
/// the normalization makes lhs/rhs directly comparable across fields).
#[derive(Debug, Clone, Copy)]
pub struct SobolevCheck {
    /// ||grad w||_p^p after normalization.
    pub lhs: f64,
    /// S_{n,p} ||w||_{p*}^p = S_{n,p} after normalization.
    pub rhs: f64,
    /// lhs / rhs: >= 1 for every admissible w, = 1 on the extremal family.
    pub ratio: f64,
}

pub fn sobolev_check(grid: &RadialGrid, w: &[f64], n: u32, p: f64) -> Result<SobolevCheck> {
    let sharp = sharp_sobolev(n, p)?;
    let p_star = p * f64::from(n) / (f64::from(n) - p);
    let norm = lp_norm(grid, w, p_star);
    if !(norm > 0.0) {
        return Err(Error::EmptyDensity);
    }
    let scaled: Vec<f64> = w.iter().map(|&x| x / norm).collect();
    let lhs = gradient_lp_norm(grid, &scaled, p).powf(p);
    let rhs = sharp;
    Ok(SobolevCheck { lhs, rhs, ratio: lhs / rhs })
}

/// Gagliardo-Nirenberg ratio of a field against the sharp constant:
/// fast-diffusion family  ||w||_{ps} / (C ||grad w||_p^e ||w||_{(p-1)s+1}^{1-e}),
/// slow-diffusion family  ||w||_{(p-1)s+1} / (C ||grad w||_p^e ||w||_{ps}^{1-e}).
/// <= 1 always, = 1 exactly on the profile powers.
pub fn gn_ratio(grid: &RadialGrid, w: &[f64], params: &Params, s: f64) -> Result<f64> {
    let (form, e) = gn_exponents(params, s)?;
    let (_, c) = gn_constant(params, s)?;
    let grad = gradient_lp_norm(grid, w, params.p);
    let n_ps = lp_norm(grid, w, params.p * s);
    let n_lo = lp_norm(grid, w, (params.p - 1.0) * s + 1.0);
    if !(grad > 0.0 && n_ps > 0.0 && n_lo > 0.0) {
        return Err(Error::EmptyDensity);
    }
    Ok(match form {
        GnForm::FastDiffusion => n_ps / (c * grad.powf(e) * n_lo.powf(1.0 - e)),
        GnForm::SlowDiffusion => n_lo / (c * grad.powf(e) * n_ps.powf(1.0 - e)),
    })
}
