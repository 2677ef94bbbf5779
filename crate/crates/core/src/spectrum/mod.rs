//! Eigenvalues and eigenfunctions from the Bessel-series representation.

mod bessel;

pub use bessel::{bessel_backward, fill_spherical_bessel, SphericalBesselBlock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{weighted_integral, GridFunction};
use crate::model::SlCoefficients;
use crate::nsbf::NsbfCoefficients;

/// Equally spaced search grid for the characteristic function in `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootGrid {
    pub omega_lo: f64,
    pub omega_hi: f64,
    pub count: usize,
}

impl RootGrid {
    /// `(0, 15)` with 100 points.
    pub const MEDIUM: RootGrid = RootGrid { omega_lo: 0.0, omega_hi: 15.0, count: 100 };
    /// `(0, 100)` with 1000 points.
    pub const SHORT: RootGrid = RootGrid { omega_lo: 0.0, omega_hi: 100.0, count: 1000 };

    pub fn step(&self) -> f64 {
        (self.omega_hi - self.omega_lo) / self.count as f64
    }

    /// Grid nodes, excluding `ω = 0`.
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..=self.count).map(|i| self.omega_lo + h * i as f64).filter(|&w| w > 0.0).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_lo >= 0.0 && self.omega_hi > self.omega_lo && self.count >= 2) {
            return Err(Error::config("numerics.root_grid", "need 0 <= omega_lo < omega_hi and count >= 2"));
        }
        Ok(())
    }
}

/// Sorted positive roots of the characteristic function.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSearch {
    pub omegas: Vec<f64>,
    pub warnings: Vec<String>,
}

impl RootSearch {
    pub fn possible_missed_roots(&self) -> bool {
        !self.warnings.is_empty()
    }
}

/// `sin(ω l(U))/ρ(U) + 2 Σ (−1)^m α_{2m+1}(U) j_{2m+1}(ω l(U))`.
pub fn characteristic(omega: f64, coeffs: &NsbfCoefficients, c: &SlCoefficients) -> f64 {
    let last = c.mesh().len() - 1;
    let alphas = coeffs.odd_alpha_at(last);
    let mut buf = vec![0.0; coeffs.m_trunc + 1];
    series_value(omega * c.l().last(), c.rho().last(), &alphas, &mut buf)
}

/// `sin(x)/ρ + 2 Σ (−1)^m c_m j_{2m+1}(x)` with `c` indexed by `m`.
fn series_value(x: f64, rho: f64, odd: &[f64], buf: &mut [f64]) -> f64 {
    fill_spherical_bessel(x, buf);
    x.sin() / rho + 2.0 * alternating_odd_sum(odd, buf)
}

fn alternating_odd_sum(odd: &[f64], bessel: &[f64]) -> f64 {
    let mut s = 0.0;
    for (m, c) in odd.iter().enumerate() {
        let t = c * bessel[2 * m + 1];
        if m % 2 == 0 {
            s += t;
        } else {
            s -= t;
        }
    }
    s
}

/// Brackets sign changes on the grid and bisects each to `|Δω| < refine_tol`.
pub fn find_eigenvalues(coeffs: &NsbfCoefficients, c: &SlCoefficients, grid: &RootGrid, refine_tol: f64) -> Result<RootSearch> {
    grid.validate()?;
    let f = |w: f64| characteristic(w, coeffs, c);
    let nodes = grid.nodes();
    let values: Vec<f64> = nodes.par_iter().map(|&w| f(w)).collect();
    let brackets: Vec<(f64, f64, f64)> = nodes
        .windows(2)
        .zip(values.windows(2))
        .filter_map(|(w, v)| {
            if v[0] == 0.0 {
                Some((w[0], w[0], v[0]))
            } else if v[0] * v[1] < 0.0 {
                Some((w[0], w[1], v[0]))
            } else {
                None
            }
        })
        .collect();
    let mut omegas: Vec<f64> = brackets.par_iter().map(|&(a, b, fa)| bisect(&f, a, b, fa, refine_tol)).collect();
    if let (Some(&w), Some(&v)) = (nodes.last(), values.last()) {
        if v == 0.0 {
            omegas.push(w);
        }
    }
    omegas.dedup();

    let mut warnings = Vec::new();
    let spacing = std::f64::consts::PI / c.l().last();
    if spacing < 2.0 * grid.step() {
        warnings
            .push(format!("asymptotic root spacing {spacing:.4} is below two grid steps ({:.4}); roots may be missed", 2.0 * grid.step()));
    }
    for pair in omegas.windows(2) {
        if pair[1] - pair[0] < 2.0 * grid.step() {
            warnings.push(format!("roots {:.6} and {:.6} are closer than two grid steps", pair[0], pair[1]));
        }
    }
    Ok(RootSearch { omegas, warnings })
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    if fa == 0.0 {
        return a;
    }
    for _ in 0..200 {
        if b - a < tol {
            break;
        }
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// One term of the pricing series.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub n: usize,
    pub omega: f64,
    pub lambda: f64,
    pub phi: GridFunction,
    pub phi_prime: Option<GridFunction>,
    pub norm_sq: f64,
    /// Fourier coefficient of the active payoff; zero until set.
    pub f_n: f64,
}

impl EigenPair {
    pub fn value_at(&self, y: f64) -> Result<f64> {
        self.phi.interpolate(y)
    }

    pub fn derivative_at(&self, y: f64) -> Option<Result<f64>> {
        self.phi_prime.as_ref().map(|d| d.interpolate(y))
    }
}

/// Evaluates `φ` (and `φ′` when `β_n` are available) on the mesh.
fn eigen_values_on_mesh(omega: f64, coeffs: &NsbfCoefficients, c: &SlCoefficients, derivative: bool) -> (Vec<f64>, Option<Vec<f64>>) {
    let n = c.mesh().len();
    let (l, rho, rp, p, w) = (c.l().values(), c.rho().values(), c.rho_prime().values(), c.p().values(), c.w().values());
    let g2 = coeffs.g2.values();
    let derivative = derivative && coeffs.has_derivatives();
    let mut buf = vec![0.0; coeffs.m_trunc + 1];
    let odd: Vec<usize> = (1..=coeffs.m_trunc).step_by(2).collect();
    let mut phi = vec![0.0; n];
    let mut dphi = if derivative { vec![0.0; n] } else { Vec::new() };
    let mut a = vec![0.0; odd.len()];
    let mut b = vec![0.0; odd.len()];
    for i in 0..n {
        let x = omega * l[i];
        fill_spherical_bessel(x, &mut buf);
        for (k, &m) in odd.iter().enumerate() {
            a[k] = coeffs.alpha[m].at(i);
        }
        let (s, co) = x.sin_cos();
        phi[i] = s / rho[i] + 2.0 * alternating_odd_sum(&a, &buf);
        if derivative {
            for (k, &m) in odd.iter().enumerate() {
                b[k] = coeffs.beta[m].at(i);
            }
            let bracket = (g2[i] * s + omega * co) / rho[i] + 2.0 * alternating_odd_sum(&b, &buf);
            dphi[i] = (w[i] / p[i]).sqrt() * bracket - rp[i] / rho[i] * phi[i];
        }
    }
    (phi, derivative.then_some(dphi))
}

/// Builds `φ_n`, optionally `φ_n′`, and `‖φ_n‖²_w`, checking `φ_n(U) ≈ 0`.
pub fn build_eigenfunction(n: usize, omega: f64, coeffs: &NsbfCoefficients, c: &SlCoefficients, derivative: bool) -> Result<EigenPair> {
    let mesh = c.mesh();
    let (phi, dphi) = eigen_values_on_mesh(omega, coeffs, c, derivative);
    let sup = phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let residual = phi[phi.len() - 1].abs() / sup;
    if !(residual <= 1e-6) {
        return Err(Error::BoundaryViolation { n, residual });
    }
    let norm_sq = weighted_integral(&phi, &phi, c.w().values(), mesh.step());
    Ok(EigenPair {
        n,
        omega,
        lambda: omega * omega,
        phi: GridFunction::new(mesh, phi)?,
        phi_prime: dphi.map(|d| GridFunction::new(mesh, d)).transpose()?,
        norm_sq,
        f_n: 0.0,
    })
}

/// `φ_n′` on the mesh for an existing pair.
pub fn build_eigenfunction_derivative(pair: &EigenPair, coeffs: &NsbfCoefficients, c: &SlCoefficients) -> Result<GridFunction> {
    if !coeffs.has_derivatives() {
        return Err(Error::AssumptionViolated("derivative coefficients were not computed".into()));
    }
    let (_, d) = eigen_values_on_mesh(pair.omega, coeffs, c, true);
    GridFunction::new(c.mesh(), d.expect("derivative requested"))
}

/// Builds all pairs for the given roots in parallel.
pub fn build_eigenpairs(omegas: &[f64], coeffs: &NsbfCoefficients, c: &SlCoefficients, derivative: bool) -> Result<Vec<EigenPair>> {
    omegas.par_iter().enumerate().map(|(k, &w)| build_eigenfunction(k + 1, w, coeffs, c, derivative)).collect()
}
