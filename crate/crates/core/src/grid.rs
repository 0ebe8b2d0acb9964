//! Uniform radial finite-volume mesh on the ball of radius `r_max` in
//! dimension n, with the discrete gradient / p-Laplacian / integration
//! operators every other module builds on.
//!
//! Cells are the shells between faces r_i = i * dr; unknowns live at cell
//! centers (i + 1/2) dr and carry exact shell volumes, so summing
//! `volumes[i] * u[i]` is the exact integral of the piecewise-constant
//! field. Both boundary faces carry zero gradient: the center by radial
//! symmetry, the outer wall making the domain mass-tight.

use crate::error::{Error, Result};
use crate::special::sphere_area;

#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub n: u32,
    pub r_max: f64,
    pub cells: usize,
    pub dr: f64,
    centers: Vec<f64>,
    volumes: Vec<f64>,
    /// omega_n r_i^{n-1} for faces i = 0..=cells.
    areas: Vec<f64>,
}

/// Regularized p-flux phi(g) = (g^2 + eps^2)^{(p-2)/2} g. With eps = 0 this
/// is the exact |g|^{p-2} g (and 0 at g = 0, also for p < 2).
pub fn p_flux(g: f64, p: f64, eps: f64) -> f64 {
    if g == 0.0 && eps == 0.0 {
        return 0.0;
    }
    (g * g + eps * eps).powf((p - 2.0) / 2.0) * g
}

impl RadialGrid {
    pub fn new(n: u32, r_max: f64, cells: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadMesh(format!("dimension must be >= 1, got {n}")));
        }
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::BadMesh(format!("radius must be positive, got {r_max}")));
        }
        if cells < 8 {
            return Err(Error::BadMesh(format!("need at least 8 cells, got {cells}")));
        }
        let dr = r_max / cells as f64;
        let omega = sphere_area(n);
        let nf = f64::from(n);
        let centers: Vec<f64> = (0..cells).map(|i| (i as f64 + 0.5) * dr).collect();
        let volumes: Vec<f64> = (0..cells)
            .map(|i| {
                let r0 = i as f64 * dr;
                let r1 = (i as f64 + 1.0) * dr;
                omega * (r1.powi(n as i32) - r0.powi(n as i32)) / nf
            })
            .collect();
        let areas: Vec<f64> = (0..=cells)
            .map(|i| omega * (i as f64 * dr).powi(n as i32 - 1))
            .collect();
        Ok(RadialGrid { n, r_max, cells, dr, centers, volumes, areas })
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn face_areas(&self) -> &[f64] {
        &self.areas
    }

    /// Exact integral over the ball of a piecewise-constant cell field.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.cells, "cell field length mismatch");
        f.iter().zip(&self.volumes).map(|(v, w)| v * w).sum()
    }

    /// Face-centered radial gradient of a cell field; both boundary faces
    /// are zero (symmetry at the origin, no-flux at the wall).
    pub fn face_gradient(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.cells, "cell field length mismatch");
        let mut g = vec![0.0; self.cells + 1];
        for i in 1..self.cells {
            g[i] = (f[i] - f[i - 1]) / self.dr;
        }
        g
    }

    /// Cell-centered divergence of a face flux field:
    /// (A_{i+1} F_{i+1} - A_i F_i) / vol_i.
    pub fn divergence(&self, face_flux: &[f64]) -> Vec<f64> {
        assert_eq!(face_flux.len(), self.cells + 1, "face field length mismatch");
        (0..self.cells)
            .map(|i| (self.areas[i + 1] * face_flux[i + 1] - self.areas[i] * face_flux[i]) / self.volumes[i])
            .collect()
    }

    /// Conservative discrete p-Laplacian of a cell field:
    /// div(phi_eps(grad w)) with phi the regularized p-flux.
    pub fn p_laplacian(&self, w: &[f64], p: f64, eps: f64) -> Vec<f64> {
        let g = self.face_gradient(w);
        let flux: Vec<f64> = g.iter().map(|&gi| p_flux(gi, p, eps)).collect();
        self.divergence(&flux)
    }

    /// Cell-centered first derivative: average of the two adjacent face
    /// gradients (exact for quadratics).
    pub fn cell_gradient(&self, f: &[f64]) -> Vec<f64> {
        let g = self.face_gradient(f);
        (0..self.cells).map(|i| 0.5 * (g[i] + g[i + 1])).collect()
    }

    /// Cell-centered second derivative: difference of adjacent face
    /// gradients (exact for quadratics; one-sided zero faces make the two
    /// outermost values and the center value boundary-polluted).
    pub fn cell_second_derivative(&self, f: &[f64]) -> Vec<f64> {
        let g = self.face_gradient(f);
        (0..self.cells).map(|i| (g[i + 1] - g[i]) / self.dr).collect()
    }

    /// Pointwise (non-conservative) radial p-Laplacian built from the
    /// cell-centered derivatives:
    ///   (p-1)|w_r|^{p-2} w_rr + (n-1)|w_r|^{p-2} w_r / r.
    /// Used where an algebraic identity must hold cell by cell.
    pub fn p_laplacian_pointwise(&self, w: &[f64], p: f64, eps: f64) -> Vec<f64> {
        let wr = self.cell_gradient(w);
        let wrr = self.cell_second_derivative(w);
        (0..self.cells)
            .map(|i| {
                let m = (wr[i] * wr[i] + eps * eps).powf((p - 2.0) / 2.0);
                let m = if wr[i] == 0.0 && eps == 0.0 && p < 2.0 { 0.0 } else { m };
                (p - 1.0) * m * wrr[i] + f64::from(self.n - 1) * m * wr[i] / self.centers[i]
            })
            .collect()
    }

    /// Squared A-norm of the traceless part of the weighted pressure
    /// Hessian, cell by cell:
    ///   (p-1)^2 (|w_r|^{p-2} w_rr - L/(n(p-1)))^2
    ///   + (n-1) (|w_r|^{p-2} w_r/r - L/n)^2,
    /// with L the pointwise p-Laplacian above. Vanishes exactly on fields
    /// whose flux |w_r|^{p-2} w_r is linear in r (the self-similar pressure).
    pub fn traceless_norm_sq(&self, w: &[f64], p: f64, eps: f64) -> Vec<f64> {
        let wr = self.cell_gradient(w);
        let wrr = self.cell_second_derivative(w);
        let nf = f64::from(self.n);
        (0..self.cells)
            .map(|i| {
                let m = (wr[i] * wr[i] + eps * eps).powf((p - 2.0) / 2.0);
                let m = if wr[i] == 0.0 && eps == 0.0 && p < 2.0 { 0.0 } else { m };
                let radial = m * wrr[i];
                let angular = m * wr[i] / self.centers[i];
                let lap = (p - 1.0) * radial + (nf - 1.0) * angular;
                let t_rr = (p - 1.0) * (radial - lap / (nf * (p - 1.0)));
                t_rr * t_rr + (nf - 1.0) * (angular - lap / nf).powi(2)
            })
            .collect()
    }

    /// Conservative cell averages of a radial function: per-cell Gauss
    /// quadrature of omega_n r^{n-1} f(r), optionally split at one known
    /// breakpoint (a free boundary) so the kink never sits inside a
    /// quadrature panel.
    pub fn sample_cell_averages<F: Fn(f64) -> f64>(&self, f: F, breakpoint: Option<f64>) -> Vec<f64> {
        // 5-point Gauss-Legendre on [0, 1]
        const GX: [f64; 5] = [
            0.046910077030668,
            0.230765344947158,
            0.5,
            0.769234655052842,
            0.953089922969332,
        ];
        const GW: [f64; 5] = [
            0.118463442528095,
            0.239314335249683,
            0.284444444444444,
            0.239314335249683,
            0.118463442528095,
        ];
        let omega = sphere_area(self.n);
        let e = self.n as i32 - 1;
        let panel = |a: f64, b: f64| -> f64 {
            let h = b - a;
            GX.iter()
                .zip(&GW)
                .map(|(&x, &w)| {
                    let r = a + x * h;
                    w * omega * r.powi(e) * f(r)
                })
                .sum::<f64>()
                * h
        };
        (0..self.cells)
            .map(|i| {
                let a = i as f64 * self.dr;
                let b = (i as f64 + 1.0) * self.dr;
                let integral = match breakpoint {
                    Some(c) if c > a && c < b => panel(a, c) + panel(c, b),
                    _ => panel(a, b),
                };
                integral / self.volumes[i]
            })
            .collect()
    }
}
