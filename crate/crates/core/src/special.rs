//! Gamma-function machinery and the closed-form sharp constants built from it:
//! profile mass integrals, the isoperimetric constant for the p-Renyi entropy
//! power, the sharp L^p-Sobolev constant, and the Gagliardo-Nirenberg
//! exponents/constants of both interpolation families.
//!
//! Everything is evaluated in log space first; Gamma arguments stay positive
//! in every admissible regime, so no reflection formula is needed.

use crate::error::{Error, Result};
use crate::params::{Params, Regime};
use serde::Serialize;

/// Lanczos-type rational approximation (shift r = 10.900511, 11 terms).
/// Gives ~1e-15 relative accuracy for Gamma on the positive axis in f64.
const LANCZOS_R: f64 = 10.900511;
const LANCZOS_D: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];
/// ln(2 * sqrt(e / pi))
const LN_2_SQRT_E_OVER_PI: f64 = 0.6207822376352452223455184457816472122518527279025978;

/// Natural log of the Gamma function for x > 0.
///
/// For x < 0.5 the recurrence ln G(x) = ln G(x+1) - ln x keeps the argument
/// of the rational approximation away from the pole at 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::NonPositiveArgument(x));
    }
    if x < 0.5 {
        return Ok(ln_gamma_lanczos(x + 1.0) - x.ln());
    }
    Ok(ln_gamma_lanczos(x))
}

fn ln_gamma_lanczos(x: f64) -> f64 {
    debug_assert!(x >= 0.5);
    let mut s = LANCZOS_D[0];
    for (i, d) in LANCZOS_D.iter().enumerate().skip(1) {
        s += d / (x + i as f64 - 1.0);
    }
    s.ln() + LN_2_SQRT_E_OVER_PI + (x - 0.5) * ((x - 0.5 + LANCZOS_R) / std::f64::consts::E).ln()
}

/// Gamma function for x > 0.
pub fn gamma(x: f64) -> Result<f64> {
    Ok(ln_gamma(x)?.exp())
}

/// Euler beta function B(x, y) = G(x) G(y) / G(x+y) for x, y > 0.
pub fn beta(x: f64, y: f64) -> Result<f64> {
    Ok((ln_gamma(x)? + ln_gamma(y)? - ln_gamma(x + y)?).exp())
}

/// Surface measure of the unit sphere S^{n-1} in R^n: 2 pi^{n/2} / G(n/2).
/// For n = 1 this is 2 (two endpoints), consistent with integrating even
/// functions over the whole line.
pub fn sphere_area(n: u32) -> f64 {
    let nf = f64::from(n);
    let ln = std::f64::consts::LN_2 + (nf / 2.0) * std::f64::consts::PI.ln()
        - ln_gamma(nf / 2.0).expect("n/2 > 0");
    ln.exp()
}

/// Mass of the unnormalized profile:
/// b > 0: integral over R^n of (1 - |x|^q)_+^{1/b},
/// b < 0: integral over R^n of (1 + |x|^q)^{1/b} (finite iff b > -q/n).
pub fn profile_mass_integral(params: &Params) -> Result<f64> {
    if !params.has_finite_mass() {
        return Err(Error::OutOfRangeRegime {
            n: params.n,
            p: params.p,
            b: params.b,
            what: "profile mass integral",
        });
    }
    let n = params.nf();
    let q = params.q;
    let b = params.b;
    let ln = if b > 0.0 {
        // radial slice gives a Beta integral in t = r^q
        (2.0 / q).ln() + (n / 2.0) * std::f64::consts::PI.ln() - ln_gamma(n / 2.0)?
            + ln_gamma(n / q)?
            + ln_gamma(1.0 / b + 1.0)?
            - ln_gamma(n / q + 1.0 / b + 1.0)?
    } else {
        (2.0 / q).ln() + (n / 2.0) * std::f64::consts::PI.ln() + ln_gamma(n / q)?
            + ln_gamma(-n / q - 1.0 / b)?
            - ln_gamma(n / 2.0)?
            - ln_gamma(-1.0 / b)?
    };
    Ok(ln.exp())
}

/// Height constant C that normalizes the profile to unit mass:
/// C = D^{-b q / (n b + q)} where D = `profile_mass_integral`.
pub fn profile_height(params: &Params) -> Result<f64> {
    let d = profile_mass_integral(params)?;
    let expo = -params.b * params.q / (params.nf() * params.b + params.q);
    Ok((expo * d.ln()).exp())
}

/// Scale-invariant isoperimetric constant C_iso = N_b(B) * I_b(B): the sharp
/// lower bound of the product (entropy power) x (Fisher information), attained
/// by the source-type profile. Two algebraically equal closed forms are
/// evaluated and cross-checked; the first is returned.
pub fn isoperimetric_constant(params: &Params) -> Result<f64> {
    let (primary, alternate) = isoperimetric_constant_forms(params)?;
    debug_assert!(
        (primary - alternate).abs() <= 1e-12 * primary.abs().max(1.0),
        "the two closed forms must agree"
    );
    Ok(primary)
}

/// Both closed forms of C_iso.
///
/// Common part: (q gamma / |b|)^{p-1} pi^{p/2} n (q(b+1)/(nb + q(b+1)))^sigma.
/// Form 1 multiplies (G(n/q+1) G(e1) / (G(n/2+1) G(e2)))^{p/n}; form 2 uses
/// the unshifted G(n/q), G(n/2) and compensates with (2/q)^{p/n}. Here
/// (e1, e2) = (1/b+1, n/q+1/b+1) for b > 0 and (-n/q-1/b, -1/b) for b < 0.
pub fn isoperimetric_constant_forms(params: &Params) -> Result<(f64, f64)> {
    if !params.has_finite_fisher() {
        return Err(Error::OutOfRangeRegime {
            n: params.n,
            p: params.p,
            b: params.b,
            what: "isoperimetric constant",
        });
    }
    let n = params.nf();
    let (p, q, b, sigma, gamma) = (params.p, params.q, params.b, params.sigma, params.gamma);
    let nb_qb1 = n * b + q * (b + 1.0);
    debug_assert!(nb_qb1 > 0.0, "finite-Fisher regimes have nb + q(b+1) > 0");

    let ln_common = (p - 1.0) * (q * gamma / b.abs()).ln()
        + (p / 2.0) * std::f64::consts::PI.ln()
        + n.ln()
        + sigma * (q * (b + 1.0) / nb_qb1).ln();
    let (e1, e2) = if b > 0.0 {
        (1.0 / b + 1.0, n / q + 1.0 / b + 1.0)
    } else {
        (-n / q - 1.0 / b, -1.0 / b)
    };
    let ln_form1 = ln_common
        + (p / n) * (ln_gamma(n / q + 1.0)? + ln_gamma(e1)? - ln_gamma(n / 2.0 + 1.0)? - ln_gamma(e2)?);
    let ln_form2 = ln_common
        + (p / n)
            * ((2.0 / q).ln() + ln_gamma(n / q)? + ln_gamma(e1)?
                - ln_gamma(n / 2.0)?
                - ln_gamma(e2)?);
    Ok((ln_form1.exp(), ln_form2.exp()))
}

/// Sharp constant of the L^p-Sobolev inequality
/// ||grad w||_p^p >= S_{n,p} (||w||_{p*}^{p*})^{p/p*}, 1 < p < n:
/// S_{n,p} = n pi^{p/2} ((n-p)/(p-1))^{p-1} (G(n/q+1) G(n/p) / (G(n/2+1) G(n)))^{p/n}.
pub fn sharp_sobolev(n: u32, p: f64) -> Result<f64> {
    let nf = f64::from(n);
    if !(p > 1.0 && p < nf) {
        return Err(Error::BadExponent(format!(
            "sharp Sobolev constant needs 1 < p < n, got p={p}, n={n}"
        )));
    }
    let q = p / (p - 1.0);
    let ln = nf.ln()
        + (p / 2.0) * std::f64::consts::PI.ln()
        + (p - 1.0) * ((nf - p) / (p - 1.0)).ln()
        + (p / nf)
            * (ln_gamma(nf / q + 1.0)? + ln_gamma(nf / p)?
                - ln_gamma(nf / 2.0 + 1.0)?
                - ln_gamma(nf)?);
    Ok(ln.exp())
}

/// The Sobolev constant recovered from the critical isoperimetric constant:
/// the substitution u = w^{p*} turns the entropy-power inequality at b = -1/n
/// into the Sobolev inequality with
/// S_{n,p} = (gamma/(b+1)) ((p-1)(n-p) / (p(n-p+1)))^p C_iso(b = -1/n).
pub fn sobolev_from_isoperimetric(n: u32, p: f64) -> Result<f64> {
    let nf = f64::from(n);
    if !(p > 1.0 && p < nf) {
        return Err(Error::BadExponent(format!(
            "critical regime needs 1 < p < n, got p={p}, n={n}"
        )));
    }
    let params = Params::from_b(n, p, -1.0 / nf)?;
    debug_assert_eq!(params.regime(), Regime::SobolevCritical);
    let c_iso = isoperimetric_constant(&params)?;
    let factor = (params.gamma / (params.b + 1.0))
        * (((p - 1.0) * (nf - p)) / (p * (nf - p + 1.0))).powf(p);
    Ok(factor * c_iso)
}

/// Which of the two Gagliardo-Nirenberg interpolation families applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GnForm {
    /// b < 0, s > 1: ||w||_{ps} <= C ||grad w||_p^e ||w||_{(p-1)s+1}^{1-e}.
    FastDiffusion,
    /// b > 0, s < 1: ||w||_{(p-1)s+1} <= C ||grad w||_p^e ||w||_{ps}^{1-e}.
    SlowDiffusion,
}

/// Interpolation exponent for the (b, s) pair. Two independent closed forms
/// are evaluated and must agree to 1e-12; their common value is returned
/// together with which inequality it belongs to.
pub fn gn_exponents(params: &Params, s: f64) -> Result<(GnForm, f64)> {
    let s_expected = params.gn_s()?;
    if (s - s_expected).abs() > 1e-9 * s_expected.abs() {
        return Err(Error::RangeMismatch(format!(
            "s = {s} is not the interpolation parameter 1/(p b + 1) = {s_expected} of b = {}",
            params.b
        )));
    }
    let n = params.nf();
    let (p, sigma, gamma, b) = (params.p, params.sigma, params.gamma, params.b);
    match params.regime() {
        Regime::SlowDiffusion => {
            // 0 < s < 1
            let e1 = (1.0 / ((p - 1.0) * s + 1.0)) * n * (1.0 - s) / (n * (1.0 - s) + p * s);
            let e2 = p / ((1.0 - sigma) * ((p - 1.0) * s + 1.0));
            check_two_forms(e1, e2)?;
            Ok((GnForm::SlowDiffusion, e1))
        }
        Regime::FastDiffusionFisherRange if params.b > -1.0 / n => {
            // 1 < s < n/(n-p); requires p < n for a nonempty range
            let e1 = (1.0 / s) * n * (s - 1.0)
                / ((p - 1.0) * n * (1.0 - s) + p * ((p - 1.0) * s + 1.0));
            let e2 = (1.0 / s) / ((sigma + 1.0) * gamma - 1.0);
            check_two_forms(e1, e2)?;
            Ok((GnForm::FastDiffusion, e1))
        }
        _ => Err(Error::OutOfRangeRegime {
            n: params.n,
            p,
            b,
            what: "Gagliardo-Nirenberg exponent",
        }),
    }
}

fn check_two_forms(e1: f64, e2: f64) -> Result<()> {
    if (e1 - e2).abs() > 1e-12 * e1.abs().max(1.0) {
        return Err(Error::RangeMismatch(format!(
            "interpolation exponent closed forms disagree: {e1} vs {e2}"
        )));
    }
    Ok(())
}

/// Sharp Gagliardo-Nirenberg constant for the family selected by the sign
/// of b: C = [(b+1) gamma^{p-1} C_iso^{-1} (p s)^p]^{e/p} with e the
/// interpolation exponent.
pub fn gn_constant(params: &Params, s: f64) -> Result<(GnForm, f64)> {
    let (form, e) = gn_exponents(params, s)?;
    let c_iso = isoperimetric_constant(params)?;
    let inner = (params.b + 1.0) * params.gamma.powf(params.p - 1.0) / c_iso
        * (params.p * s).powf(params.p);
    Ok((form, inner.powf(e / params.p)))
}

/// Bundle of the sharp constants attached to one parameter point.
#[derive(Debug, Clone, Serialize)]
pub struct SharpConstants {
    pub mass_integral: f64,
    pub height: f64,
    pub c_iso: f64,
    /// Present iff 1 < p < n.
    pub s_sobolev: Option<f64>,
    /// Interpolation parameter s = 1/(p b + 1) when admissible.
    pub gn_s: Option<f64>,
    pub gn_form: Option<GnForm>,
    pub gn_exponent: Option<f64>,
    pub gn_constant: Option<f64>,
}

impl SharpConstants {
    pub fn compute(params: &Params) -> Result<Self> {
        let mass_integral = profile_mass_integral(params)?;
        let height = profile_height(params)?;
        let c_iso = isoperimetric_constant(params)?;
        let s_sobolev = if params.p < params.nf() { Some(sharp_sobolev(params.n, params.p)?) } else { None };
        let (gn_s, gn_form, gn_exponent, gn_constant) = match params.gn_s() {
            Ok(s) => match gn_constant(params, s) {
                Ok((form, c)) => {
                    let (_, e) = gn_exponents(params, s)?;
                    (Some(s), Some(form), Some(e), Some(c))
                }
                Err(_) => (Some(s), None, None, None),
            },
            Err(_) => (None, None, None, None),
        };
        Ok(SharpConstants {
            mass_integral,
            height,
            c_iso,
            s_sobolev,
            gn_s,
            gn_form,
            gn_exponent,
            gn_constant,
        })
    }
}
