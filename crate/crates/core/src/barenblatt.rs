//! Closed-form source-type (Barenblatt) solutions: the exact oracle every
//! discrete computation is measured against.
//!
//! The unit-mass profile is
//!   B(xi) = (C - |xi|^q)_+^{1/b}   for b > 0 (compact support),
//!   B(xi) = (C + |xi|^q)^{1/b}     for -q/n < b < 0 (algebraic tail),
//! with C = `special::profile_height`. The self-similar family
//!   U_s(x) = s^{-a/b} B(s^{-a/(nb)} x),  s > 0,
//! consists of mutually dilated unit-mass states. The diffusion flow
//! traverses it affinely: data U_{s0} at time t0 evolves to
//! U_{s0 + c (t - t0)} with c = `Params::similarity_speed`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::Params;
use crate::special::{isoperimetric_constant, profile_height};

/// A normalized source-type solution for one parameter point.
#[derive(Debug, Clone)]
pub struct SourceProfile {
    pub params: Params,
    /// Height constant C normalizing the profile to unit mass.
    pub height: f64,
}

/// Exact values of the entropy functionals on a family member U_s.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExactFunctionals {
    pub mass: f64,
    /// E_b = integral of u^{b+1}.
    pub entropy_integral: f64,
    /// R_b = -(1/b) ln E_b.
    pub renyi_entropy: f64,
    /// N_b = E_b^sigma.
    pub entropy_power: f64,
    /// integral of |x|^q u.
    pub q_moment: f64,
    /// I_b = (b+1)/(gamma E_b) * integral of |grad v|^p u.
    pub fisher: f64,
    /// Q_b = N_b * I_b; equal to the isoperimetric constant, independent of s.
    pub product: f64,
}

impl SourceProfile {
    pub fn new(params: Params) -> Result<Self> {
        let height = profile_height(&params)?;
        Ok(SourceProfile { params, height })
    }

    /// Profile value at similarity coordinate |xi|.
    pub fn profile(&self, xi: f64) -> f64 {
        let r = xi.abs();
        let b = self.params.b;
        if b > 0.0 {
            let base = self.height - r.powf(self.params.q);
            if base <= 0.0 {
                0.0
            } else {
                base.powf(1.0 / b)
            }
        } else {
            (self.height + r.powf(self.params.q)).powf(1.0 / b)
        }
    }

    /// Support radius of the profile: C^{1/q} for b > 0, none for b < 0.
    pub fn support_radius(&self) -> Option<f64> {
        (self.params.b > 0.0).then(|| self.height.powf(1.0 / self.params.q))
    }

    /// Spatial dilation factor of the family member U_s: x = lambda(s) * xi.
    pub fn dilation(&self, s: f64) -> f64 {
        s.powf(self.params.a / (self.params.nf() * self.params.b))
    }

    /// U_s at radius r (s is the family parameter).
    pub fn solution(&self, r: f64, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::NonPositiveTime(s));
        }
        let lambda = self.dilation(s);
        Ok(s.powf(-self.params.a / self.params.b) * self.profile(r / lambda))
    }

    /// Support radius of U_s for b > 0.
    pub fn support_radius_at(&self, s: f64) -> Option<f64> {
        self.support_radius().map(|r0| self.dilation(s) * r0)
    }

    /// Exact pressure v = (gamma/b) U_s^b at radius r. The pressure is a
    /// multiple of C -+ |xi|^q: positive and concave on the support for
    /// b > 0 (error outside), negative with quadratic-type growth for b < 0.
    pub fn pressure(&self, r: f64, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::NonPositiveTime(s));
        }
        let pr = &self.params;
        let lambda = self.dilation(s);
        let xi = r.abs() / lambda;
        let xiq = xi.powf(pr.q);
        let scale = (pr.gamma / pr.b) * s.powf(-pr.a);
        if pr.b > 0.0 {
            if xiq >= self.height {
                let radius = self.support_radius_at(s).expect("b > 0 has a support radius");
                return Err(Error::OutsideSupport { r: r.abs(), radius });
            }
            Ok(scale * (self.height - xiq))
        } else {
            Ok(scale * (self.height + xiq))
        }
    }

    /// Family parameter reached at solver time t by the run that started at
    /// time t0 on the member U_{s0}.
    pub fn flow_time(&self, s0: f64, t0: f64, t: f64) -> Result<f64> {
        let c = self.params.similarity_speed()?;
        Ok(s0 + c * (t - t0))
    }

    /// Computational radius large enough to hold U_s for every s up to
    /// `s_end`. Compactly supported profiles get three times the final
    /// support radius so the front never feels the wall; fat-tailed profiles
    /// get a radius at which the truncated relative mass is below 1e-7.
    pub fn suggested_radius(&self, s_end: f64) -> Result<f64> {
        if !(s_end > 0.0) {
            return Err(Error::NonPositiveTime(s_end));
        }
        if let Some(edge) = self.support_radius_at(s_end) {
            return Ok(3.0 * edge);
        }
        let pr = &self.params;
        if !pr.has_finite_mass() {
            return Err(Error::OutOfRangeRegime {
                n: pr.n,
                p: pr.p,
                b: pr.b,
                what: "domain radius for a fat-tailed profile",
            });
        }
        // tail mass of B beyond rho ~ omega_n rho^{n + q/b} / |n + q/b|
        let expo = pr.nf() + pr.q / pr.b;
        debug_assert!(expo < 0.0);
        let omega = crate::special::sphere_area(pr.n);
        let rho = (1e-7 * expo.abs() / omega).powf(1.0 / expo);
        Ok(self.dilation(s_end) * rho)
    }

    /// Closed-form functionals on U_s. The q-moment and Fisher information
    /// require the Fisher-finite regime.
    pub fn functionals(&self, s: f64) -> Result<ExactFunctionals> {
        if !(s > 0.0) {
            return Err(Error::NonPositiveTime(s));
        }
        let pr = &self.params;
        if !pr.has_finite_fisher() {
            return Err(Error::OutOfRangeRegime {
                n: pr.n,
                p: pr.p,
                b: pr.b,
                what: "profile functionals",
            });
        }
        let n = pr.nf();
        let (b, q) = (pr.b, pr.q);
        let denom = n * b + q * (b + 1.0);
        debug_assert!(denom > 0.0);
        let e1 = q * (b + 1.0) / denom * self.height;
        let qm1 = (n * b).abs() / denom * self.height;
        let fisher1 = n * (q * pr.gamma / b.abs()).powf(pr.p - 1.0);
        // scalings along the family: E ~ s^{-a}, q-moment ~ dilation^q,
        // I ~ 1/s, N ~ s, Q invariant.
        let e = e1 * s.powf(-pr.a);
        let renyi = -(1.0 / b) * e.ln();
        let power = e.powf(pr.sigma);
        let fisher = fisher1 / s;
        let product = power * fisher; // invariant along the family: N ~ s, I ~ 1/s
        debug_assert!(
            (product - isoperimetric_constant(pr)?).abs() <= 1e-10 * product.abs(),
            "profile product must equal the closed-form sharp constant"
        );
        Ok(ExactFunctionals {
            mass: 1.0,
            entropy_integral: e,
            renyi_entropy: renyi,
            entropy_power: power,
            q_moment: qm1 * self.dilation(s).powf(q),
            fisher,
            product,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, m: usize) -> f64 {
        let h = (b - a) / m as f64;
        let mut acc = f(a) + f(b);
        for i in 1..m {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    fn profile(n: u32, p: f64, gamma: f64) -> SourceProfile {
        SourceProfile::new(Params::new(n, p, gamma).unwrap()).unwrap()
    }

    #[test]
    fn profile_values() {
        let sp = profile(1, 2.0, 2.0);
        assert_relative_eq!(sp.profile(0.0), (0.75f64).powf(2.0 / 3.0), max_relative = 1e-13);
        assert_eq!(sp.profile(2.0), 0.0);
        let spf = profile(3, 2.0, 2.0 / 3.0);
        let c = (PI * PI / 4.0).powf(2.0 / 3.0);
        assert_relative_eq!(spf.profile(1.0), (c + 1.0).powi(-3), max_relative = 1e-13);
    }

    #[test]
    fn unit_mass_by_quadrature() {
        use crate::special::sphere_area;
        for (n, p, g, rmax) in [
            (1, 2.0, 2.0, 1.0),
            (3, 2.0, 2.0, 1.0),
            (3, 3.0, 1.0, 1.0),
            (3, 2.0, 0.75, 4000.0),
            (3, 2.0, 2.0 / 3.0, 40000.0),
        ] {
            let sp = profile(n, p, g);
            let r_edge = sp.support_radius().map(|r| r * (1.0 - 1e-12)).unwrap_or(rmax);
            let omega = sphere_area(n);
            let mass = simpson(
                |r| omega * r.powi(n as i32 - 1) * sp.profile(r),
                0.0,
                r_edge,
                800_000,
            );
            assert!((mass - 1.0).abs() < 2e-4, "mass for ({n},{p},{g}) = {mass}");
        }
    }

    #[test]
    fn solution_is_dilation_of_profile() {
        let sp = profile(1, 2.0, 2.0);
        // a/b = a/(nb) = 1/3 here
        let s = 8.0f64;
        let lam = s.powf(1.0 / 3.0);
        for x in [0.0, 0.3, 0.9, 1.4] {
            assert_relative_eq!(
                sp.solution(x, s).unwrap(),
                sp.profile(x / lam) / lam,
                max_relative = 1e-13
            );
        }
        assert_relative_eq!(sp.solution(0.4, 1.0).unwrap(), sp.profile(0.4));
        assert!(sp.solution(0.4, 0.0).is_err());
        assert!(sp.solution(0.4, -1.0).is_err());
    }

    #[test]
    fn mass_is_preserved_along_family() {
        use crate::special::sphere_area;
        let sp = profile(3, 2.0, 2.0);
        let s = 2.0;
        let edge = sp.support_radius_at(s).unwrap() * (1.0 - 1e-12);
        let mass = simpson(
            |r| sphere_area(3) * r * r * sp.solution(r, s).unwrap(),
            0.0,
            edge,
            400_000,
        );
        assert!((mass - 1.0).abs() < 1e-6, "mass at s=2: {mass}");
    }

    #[test]
    fn pressure_values() {
        let sp = profile(1, 2.0, 2.0);
        let c = sp.height;
        assert_relative_eq!(sp.pressure(0.0, 1.0).unwrap(), 2.0 * c, max_relative = 1e-13);
        // beyond the support
        assert!(matches!(
            sp.pressure(1.5, 1.0),
            Err(Error::OutsideSupport { .. })
        ));
        // fast diffusion: globally defined, negative
        let spf = profile(3, 2.0, 0.75);
        let v0 = spf.pressure(0.0, 1.0).unwrap();
        let v5 = spf.pressure(5.0, 1.0).unwrap();
        assert!(v0 < 0.0 && v5 < v0);
        // quadratic growth: v(r) - v(0) = (gamma/b) r^q
        assert_relative_eq!(v5 - v0, -3.0 * 25.0, max_relative = 1e-13);
    }

    #[test]
    fn exact_functionals_slow_diffusion() {
        let sp = profile(1, 2.0, 2.0);
        let f = sp.functionals(1.0).unwrap();
        let c = sp.height;
        assert_relative_eq!(f.entropy_integral, 0.8 * c, max_relative = 1e-13);
        assert_relative_eq!(f.fisher, 4.0, max_relative = 1e-13);
        assert_relative_eq!(f.entropy_power, (0.8 * c).powi(-3), max_relative = 1e-13);
        assert_relative_eq!(f.product, 125.0 / 9.0, max_relative = 1e-12);
        assert_relative_eq!(f.q_moment, c / 5.0, max_relative = 1e-13);
        // brute-force cross-checks
        let e_quad = simpson(|x| sp.profile(x).powi(2), -1.0, 1.0, 200_000);
        assert_relative_eq!(f.entropy_integral, e_quad, max_relative = 1e-9);
        let qm_quad = simpson(|x| x * x * sp.profile(x), -1.0, 1.0, 200_000);
        assert_relative_eq!(f.q_moment, qm_quad, max_relative = 1e-9);
        // Fisher: v = 2u on the support, |v'|^2 u integrated
        let edge = sp.support_radius().unwrap() * (1.0 - 1e-9);
        let fisher_quad = simpson(
            |x| {
                let u = sp.profile(x);
                16.0 * x * x * u
            },
            -edge,
            edge,
            200_000,
        ) / (sp.params.gamma * f.entropy_integral)
            * (sp.params.b + 1.0);
        assert_relative_eq!(f.fisher, fisher_quad, max_relative = 1e-8);
    }

    #[test]
    fn exact_functionals_fast_diffusion() {
        let sp = profile(3, 2.0, 0.75);
        let f = sp.functionals(1.0).unwrap();
        // I = n (q gamma/|b|)^{p-1} = 3 * 6 = 18
        assert_relative_eq!(f.fisher, 18.0, max_relative = 1e-13);
        let denom = 3.0 * (-0.25) + 2.0 * 0.75;
        assert_relative_eq!(
            f.entropy_integral,
            2.0 * 0.75 / denom * sp.height,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            f.q_moment,
            0.75 / denom * sp.height,
            max_relative = 1e-13
        );
    }

    #[test]
    fn entropy_power_is_linear_in_family_parameter() {
        for (n, p, g) in [(1, 2.0, 2.0), (3, 2.0, 2.0), (3, 3.0, 1.0), (3, 2.0, 0.75)] {
            let sp = profile(n, p, g);
            let n1 = sp.functionals(1.0).unwrap().entropy_power;
            for s in [0.5, 2.0, 7.5] {
                let ns = sp.functionals(s).unwrap().entropy_power;
                assert_relative_eq!(ns, n1 * s, max_relative = 1e-12);
                // product is invariant, Fisher scales like 1/s
                let f = sp.functionals(s).unwrap();
                assert_relative_eq!(f.product, n1 * sp.functionals(1.0).unwrap().fisher, max_relative = 1e-12);
                assert_relative_eq!(f.fisher, sp.functionals(1.0).unwrap().fisher / s, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn functionals_rejected_outside_fisher_range() {
        let sp = SourceProfile::new(Params::from_b(3, 2.0, -0.5).unwrap()).unwrap();
        assert!(sp.functionals(1.0).is_err());
        // but the profile itself is well-defined
        assert!(sp.profile(1.0) > 0.0);
    }

    #[test]
    fn suggested_radius_contains_the_mass() {
        use crate::special::sphere_area;
        let sp = profile(3, 2.0, 2.0);
        assert_relative_eq!(
            sp.suggested_radius(1.0).unwrap(),
            3.0 * sp.support_radius().unwrap(),
            max_relative = 1e-13
        );
        let spf = profile(3, 2.0, 0.75);
        let rho = spf.suggested_radius(1.0).unwrap();
        let inside = simpson(
            |r| sphere_area(3) * r * r * spf.profile(r),
            0.0,
            rho,
            400_000,
        );
        assert!(1.0 - inside < 2e-7, "tail mass {}", 1.0 - inside);
        assert!(1.0 - inside > 0.0);
        // radius scales with the family dilation
        assert_relative_eq!(
            spf.suggested_radius(32.0).unwrap(),
            rho * spf.dilation(32.0),
            max_relative = 1e-13
        );
    }

    #[test]
    fn flow_time_is_affine() {
        let sp = profile(1, 2.0, 2.0);
        assert_relative_eq!(sp.flow_time(1.0, 1.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(sp.flow_time(1.0, 1.0, 2.0).unwrap(), 13.0); // c = 12
    }
}
