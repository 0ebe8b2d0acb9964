//! Exponent algebra for the doubly nonlinear diffusion equation
//! du/dt = div(|grad(u^gamma)|^{p-2} grad(u^gamma)) on R^n.
//!
//! Everything downstream is phrased in terms of the combination
//! b = gamma - 1/(p-1); the sign of b separates slow (b > 0) from fast
//! (b < 0) diffusion, and b = -1/n is the Sobolev-critical point.

use crate::error::{Error, Result};
use serde::Serialize;

/// Degeneracy threshold for b and for the distance to the critical value -1/n.
pub const B_EPS: f64 = 1e-12;

/// Validated parameter point with its derived exponents.
///
/// Invariants maintained by `Params::new`:
/// * `q = p/(p-1)` (Hoelder conjugate),
/// * `sigma = -(p-1) - p/(n b)`,
/// * `a = n b / ((p-1) n b + p)` and `a * sigma = -1`,
/// * `b != 0` (within `B_EPS`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    pub n: u32,
    pub p: f64,
    pub gamma: f64,
    pub b: f64,
    pub q: f64,
    pub sigma: f64,
    pub a: f64,
}

/// Parameter regime, ordered from most to least structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// b > 0: compactly supported profiles, finite propagation speed.
    SlowDiffusion,
    /// b = -1/n with p < n: the endpoint where the entropy power is linear
    /// for every solution and the isoperimetric constant collapses to the
    /// sharp Sobolev constant.
    SobolevCritical,
    /// -q/(n+q) < b < 0 (excluding the critical point): algebraic tails with
    /// finite mass, finite q-moment and finite Fisher information.
    FastDiffusionFisherRange,
    /// -q/n < b <= -q/(n+q): the profile still has finite mass but the
    /// q-moment and the Fisher information diverge.
    MassRangeOnly,
    /// Everything else: no integrable source-type profile.
    OutOfRange,
}

impl Params {
    pub fn new(n: u32, p: f64, gamma: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::BadExponent(format!("dimension must be >= 1, got {n}")));
        }
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::BadExponent(format!("p must satisfy p > 1, got {p}")));
        }
        if !gamma.is_finite() {
            return Err(Error::BadExponent(format!("gamma must be finite, got {gamma}")));
        }
        let b = gamma - 1.0 / (p - 1.0);
        if b.abs() <= B_EPS {
            return Err(Error::DegenerateB { gamma, p });
        }
        let q = p / (p - 1.0);
        let nb = f64::from(n) * b;
        let sigma = -(p - 1.0) - p / nb;
        let a = nb / ((p - 1.0) * nb + p);
        // a blows up at the mass edge b = -q/n (no mass-preserving scaling
        // there); the identity only makes sense when a is finite.
        debug_assert!(
            !(a * sigma).is_finite() || (a * sigma + 1.0).abs() <= 1e-12 * (1.0 + (a * sigma).abs()),
            "a*sigma = -1 must hold by construction"
        );
        Ok(Params { n, p, gamma, b, q, sigma, a })
    }

    /// Construct from (n, p, b) instead of (n, p, gamma).
    pub fn from_b(n: u32, p: f64, b: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::BadExponent(format!("p must satisfy p > 1, got {p}")));
        }
        Self::new(n, p, b + 1.0 / (p - 1.0))
    }

    pub fn nf(&self) -> f64 {
        f64::from(self.n)
    }

    pub fn regime(&self) -> Regime {
        let n = self.nf();
        let b = self.b;
        let critical = -1.0 / n;
        if (b - critical).abs() <= B_EPS && self.p < n {
            return Regime::SobolevCritical;
        }
        if b > 0.0 {
            return Regime::SlowDiffusion;
        }
        let fisher_edge = -self.q / (n + self.q);
        let mass_edge = -self.q / n; // = -p/(n(p-1))
        if b > fisher_edge {
            Regime::FastDiffusionFisherRange
        } else if b > mass_edge {
            Regime::MassRangeOnly
        } else {
            Regime::OutOfRange
        }
    }

    /// True when the profile has finite mass (unit-mass normalization exists).
    pub fn has_finite_mass(&self) -> bool {
        !matches!(self.regime(), Regime::OutOfRange)
    }

    /// True when the q-moment and Fisher information of the profile are finite.
    pub fn has_finite_fisher(&self) -> bool {
        matches!(
            self.regime(),
            Regime::SlowDiffusion | Regime::SobolevCritical | Regime::FastDiffusionFisherRange
        )
    }

    /// The Gagliardo-Nirenberg interpolation parameter paired with b:
    /// s = 1/(p b + 1). Fails when p b + 1 <= 0 (no admissible s).
    pub fn gn_s(&self) -> Result<f64> {
        let d = self.p * self.b + 1.0;
        if d <= 0.0 {
            return Err(Error::RangeMismatch(format!(
                "p*b + 1 = {d} <= 0: no interpolation parameter for (p={}, b={})",
                self.p, self.b
            )));
        }
        Ok(1.0 / d)
    }

    /// Rate at which the diffusion flow traverses the normalized
    /// self-similar family: if U_s denotes the unit-mass profile dilated
    /// with similarity exponent a (see `barenblatt`), then the solution with
    /// data U_{s0} is U_{s0 + c (t - t0)}. Equivalently the normalized
    /// profile satisfies dU_s/ds = (1/c) * div(|grad U^gamma|^{p-2} grad U^gamma).
    ///
    /// c = (p-1) * (q*gamma/|b|)^{p-1} * (n*b + q).
    pub fn similarity_speed(&self) -> Result<f64> {
        let nb_q = self.nf() * self.b + self.q;
        if nb_q <= 0.0 || self.gamma <= 0.0 {
            return Err(Error::OutOfRangeRegime {
                n: self.n,
                p: self.p,
                b: self.b,
                what: "similarity speed",
            });
        }
        let base = self.q * self.gamma / self.b.abs();
        Ok((self.p - 1.0) * base.powf(self.p - 1.0) * nb_q)
    }
}

/// b for a given Gagliardo-Nirenberg parameter s: b = (1 - s)/(p s).
pub fn b_of_gn_s(p: f64, s: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::BadExponent(format!("p must satisfy p > 1, got {p}")));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::RangeMismatch(format!("s must be positive and finite, got {s}")));
    }
    Ok((1.0 - s) / (p * s))
}
