//! Non-vanishing particular solution of `(p g′)′ − q g = 0` by the spectral
//! parameter power series at zero spectral parameter, and the associated
//! formal powers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{cumulative_integral, differentiate, GridFunction};
use crate::model::SlCoefficients;

/// Truncation controls for the series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SppsSettings {
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for SppsSettings {
    fn default() -> Self {
        Self { tol: 1e-14, max_terms: 64 }
    }
}

/// `g` with `g(L) = 1/ρ(L)`, `g′(L) = 0`.
#[derive(Debug, Clone)]
pub struct ParticularSolution {
    pub g: GridFunction,
    pub g_prime: GridFunction,
    /// Number of even-order terms `X^(2k)` that contributed above tolerance.
    pub series_order: usize,
    /// Sup norm of the last computed even-order term.
    pub tail_norm: f64,
}

/// Sums `g = (1/ρ(L)) Σ X^(2k)` and `p g′ = (1/ρ(L)) Σ X^(2k+1)`.
pub fn solve_particular(c: &SlCoefficients, tol: f64, max_terms: usize) -> Result<ParticularSolution> {
    let mesh = c.mesh();
    let h = mesh.step();
    let q = c.q().values();
    let inv_p: Vec<f64> = c.p().values().iter().map(|p| 1.0 / p).collect();
    let n = mesh.len();

    let mut even = vec![1.0; n];
    let mut g_sum = even.clone();
    let mut gp_sum = vec![0.0; n];
    let mut terms = 1;
    let mut tail;
    loop {
        let odd_integrand: Vec<f64> = even.iter().zip(q).map(|(x, q)| x * q).collect();
        let odd = cumulative_integral(&odd_integrand, h);
        let even_integrand: Vec<f64> = odd.iter().zip(&inv_p).map(|(x, ip)| x * ip).collect();
        even = cumulative_integral(&even_integrand, h);
        for i in 0..n {
            gp_sum[i] += odd[i];
            g_sum[i] += even[i];
        }
        tail = sup(&even);
        if tail <= tol * sup(&g_sum) {
            break;
        }
        terms += 1;
        if terms >= max_terms {
            return Err(Error::NoConvergence { terms, tail: tail / sup(&g_sum) });
        }
    }

    let scale = 1.0 / c.rho().first();
    let g: Vec<f64> = g_sum.iter().map(|v| v * scale).collect();
    if let Some(i) = g.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NotPositive { y: mesh.points()[i] });
    }
    let g_prime: Vec<f64> = gp_sum.iter().zip(&inv_p).map(|(v, ip)| v * ip * scale).collect();
    Ok(ParticularSolution {
        g: GridFunction::new(mesh, g)?,
        g_prime: GridFunction::new(mesh, g_prime)?,
        series_order: terms,
        tail_norm: tail * scale,
    })
}

/// Solves with default settings.
pub fn solve_particular_default(c: &SlCoefficients) -> Result<ParticularSolution> {
    let s = SppsSettings::default();
    solve_particular(c, s.tol, s.max_terms)
}

/// `‖(p g′)′ − q g‖∞ / (1 + ‖q g‖∞)` with `(p g′)′` differentiated numerically.
pub fn ode_residual(sol: &ParticularSolution, c: &SlCoefficients) -> f64 {
    let flux: Vec<f64> = sol.g_prime.values().iter().zip(c.p().values()).map(|(d, p)| d * p).collect();
    let dflux = differentiate(&flux, c.mesh().step());
    let qg: Vec<f64> = sol.g.values().iter().zip(c.q().values()).map(|(g, q)| g * q).collect();
    let res = dflux.iter().zip(&qg).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    res / (1.0 + sup(&qg))
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Formal powers `Φ_k` with their auxiliary families.
#[derive(Debug, Clone)]
pub struct FormalPowerTable {
    pub phi: Vec<GridFunction>,
    pub y: Vec<GridFunction>,
    pub y_tilde: Vec<GridFunction>,
}

impl FormalPowerTable {
    pub fn max_order(&self) -> usize {
        self.phi.len() - 1
    }
}

/// Builds `Φ_0..Φ_K`.
///
/// `Y^(k) = k ∫ Y^(k−1) / (g²p)` for odd `k` and `k ∫ Y^(k−1) g²w` for even `k`;
/// `Ỹ^(k)` swaps the two integrands. `Φ_k = g Y^(k)` for odd `k`, `g Ỹ^(k)` for even `k`.
pub fn build_formal_powers(sol: &ParticularSolution, c: &SlCoefficients, k_max: usize) -> FormalPowerTable {
    let mesh = c.mesh();
    let h = mesh.step();
    let g = sol.g.values();
    let inv_g2p: Vec<f64> = g.iter().zip(c.p().values()).map(|(g, p)| 1.0 / (g * g * p)).collect();
    let g2w: Vec<f64> = g.iter().zip(c.w().values()).map(|(g, w)| g * g * w).collect();

    let one = GridFunction::constant(mesh, 1.0);
    let mut y = vec![one.clone()];
    let mut y_tilde = vec![one];
    let mut phi = vec![sol.g.clone()];
    for k in 1..=k_max {
        let (fy, ft) = if k % 2 == 1 { (&inv_g2p, &g2w) } else { (&g2w, &inv_g2p) };
        let step = |prev: &GridFunction, weight: &[f64]| {
            let integrand: Vec<f64> = prev.values().iter().zip(weight).map(|(a, b)| k as f64 * a * b).collect();
            GridFunction::from_vec(mesh, cumulative_integral(&integrand, h))
        };
        let yk = step(&y[k - 1], fy);
        let tk = step(&y_tilde[k - 1], ft);
        let base = if k % 2 == 1 { &yk } else { &tk };
        let pk: Vec<f64> = base.values().iter().zip(g).map(|(a, g)| a * g).collect();
        phi.push(GridFunction::from_vec(mesh, pk));
        y.push(yk);
        y_tilde.push(tk);
    }
    FormalPowerTable { phi, y, y_tilde }
}
