//! Coefficients of the Neumann series of Bessel functions representation
//!
//! ```text
//! φ(ω, y) = sin(ω l)/ρ + 2 Σ (−1)^m α_{2m+1}(y) j_{2m+1}(ω l)
//! ```
//!
//! and of its derivative, obtained by a quadrature-driven recurrence for
//! `A_n = l^n α_n` and `B_n = l^n β_n`, followed by division by `l^n` with
//! zeroing of the round-off dominated neighbourhood of the left endpoint.
//! Four summation identities serve as self-tests and select the truncation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{cumulative_integral, differentiate, GridFunction};
use crate::model::SlCoefficients;
use crate::spps::{build_formal_powers, FormalPowerTable, ParticularSolution};

/// Controls for coefficient generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NsbfSettings {
    /// Highest order computed by the recurrence.
    pub max_order: usize,
    /// Width of the left-endpoint neighbourhood as a fraction of `U − L`.
    pub neighborhood_fraction: f64,
    /// Whether to compute `β_n` (needed for `φ′`).
    pub with_derivatives: bool,
}

impl Default for NsbfSettings {
    fn default() -> Self {
        Self { max_order: 60, neighborhood_fraction: 0.01, with_derivatives: true }
    }
}

/// Intermediate integrals of one recurrence step.
#[derive(Debug, Clone)]
pub struct RecurrenceIntermediates {
    pub theta_tilde: GridFunction,
    pub eta_tilde: GridFunction,
}

/// Residuals of the four summation identities.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    /// Pointwise residuals at the accepted truncation, in the order
    /// `Σα`, `Σ(−1)^m α`, `Σβ`, `Σ(−1)^m β`. The last two are absent when
    /// derivatives were not requested.
    pub residuals: Vec<GridFunction>,
    /// `sup_by_order[m][k]` is the sup residual of identity `k` truncated at order `m`.
    pub sup_by_order: Vec<Vec<f64>>,
    /// Smallest order whose alpha residual is within a factor two of the best.
    pub suggested_order: usize,
}

impl IdentityReport {
    /// Sup-norm of each identity residual at the accepted truncation.
    pub fn sup(&self) -> Vec<f64> {
        self.residuals.iter().map(GridFunction::sup_norm).collect()
    }

    pub fn max_sup(&self) -> f64 {
        self.sup().into_iter().fold(0.0, f64::max)
    }
}

/// Full coefficient set.
#[derive(Debug, Clone)]
pub struct NsbfCoefficients {
    pub alpha: Vec<GridFunction>,
    pub beta: Vec<GridFunction>,
    pub a: Vec<GridFunction>,
    pub b: Vec<GridFunction>,
    pub g1: GridFunction,
    pub g2: GridFunction,
    pub h_tilde: f64,
    pub m_trunc: usize,
    pub check: IdentityReport,
}

impl NsbfCoefficients {
    pub fn has_derivatives(&self) -> bool {
        !self.beta.is_empty()
    }

    /// Odd-order coefficients `α_1, α_3, …` at mesh index `i`, up to the truncation.
    pub fn odd_alpha_at(&self, i: usize) -> Vec<f64> {
        (1..=self.m_trunc).step_by(2).map(|n| self.alpha[n].at(i)).collect()
    }

    pub fn odd_beta_at(&self, i: usize) -> Vec<f64> {
        (1..=self.m_trunc).step_by(2).map(|n| self.beta[n].at(i)).collect()
    }
}

/// `G₂ = [ρρ′/(2w)]_L^y + ½ ∫_L^y (q/ρ² + ρ′²/w)`.
pub fn compute_g2(c: &SlCoefficients) -> GridFunction {
    let (rho, rp, w, q) = (c.rho().values(), c.rho_prime().values(), c.w().values(), c.q().values());
    let integrand: Vec<f64> = (0..rho.len()).map(|i| q[i] / (rho[i] * rho[i]) + rp[i] * rp[i] / w[i]).collect();
    let integral = cumulative_integral(&integrand, c.mesh().step());
    let bound = |i: usize| rho[i] * rp[i] / (2.0 * w[i]);
    let b0 = bound(0);
    let values = (0..rho.len()).map(|i| bound(i) - b0 + 0.5 * integral[i]).collect();
    GridFunction::from_vec(c.mesh(), values)
}

/// `G₂ = ½ ∫_L^y ρ^{-1} (q/ρ − [p (1/ρ)′]′)`, with one numeric derivative.
pub fn compute_g2_unintegrated(c: &SlCoefficients) -> GridFunction {
    let inner = flux_of_inverse_rho_derivative(c);
    let (rho, q) = (c.rho().values(), c.q().values());
    let integrand: Vec<f64> = (0..rho.len()).map(|i| (q[i] / rho[i] - inner[i]) / rho[i]).collect();
    let values = cumulative_integral(&integrand, c.mesh().step()).into_iter().map(|v| 0.5 * v).collect();
    GridFunction::from_vec(c.mesh(), values)
}

/// `[p (1/ρ)′]′`, differentiating `−pρ′/ρ²` once.
fn flux_of_inverse_rho_derivative(c: &SlCoefficients) -> Vec<f64> {
    let (p, rho, rp) = (c.p().values(), c.rho().values(), c.rho_prime().values());
    let flux: Vec<f64> = (0..p.len()).map(|i| -p[i] * rp[i] / (rho[i] * rho[i])).collect();
    differentiate(&flux, c.mesh().step())
}

/// `h̃ = √(p(L)/w(L)) (g′(L)/g(L) + ρ′(L)/ρ(L))`.
pub fn compute_h_tilde(sol: &ParticularSolution, c: &SlCoefficients) -> f64 {
    (c.p().first() / c.w().first()).sqrt() * (sol.g_prime.first() / sol.g.first() + c.rho_prime().first() / c.rho().first())
}

/// Starting coefficients of both recurrences.
#[derive(Debug, Clone)]
pub struct InitialCoefficients {
    pub alpha0: GridFunction,
    pub alpha1: GridFunction,
    pub beta0: GridFunction,
    pub beta1: GridFunction,
    pub a0: GridFunction,
    pub a1: GridFunction,
    pub b0: GridFunction,
    pub b1: GridFunction,
}

/// `α₀ = ½(g − 1/ρ)`, `A₁ = (3/2)(Φ₁ − l/ρ)`, and the matching `β₀`, `B₁ = l β₁`.
///
/// `phi1_y` is `Y^(1) = ∫ 1/(g²p)`, so that `Φ₁ = g Y^(1)`.
pub fn initial_coefficients(
    sol: &ParticularSolution,
    c: &SlCoefficients,
    phi1_y: &GridFunction,
    g1: &GridFunction,
    g2: &GridFunction,
) -> InitialCoefficients {
    let mesh = c.mesh();
    let n = mesh.len();
    let (g, gp) = (sol.g.values(), sol.g_prime.values());
    let (p, w, l, rho, rp) = (c.p().values(), c.w().values(), c.l().values(), c.rho().values(), c.rho_prime().values());
    let y1 = phi1_y.values();
    let mut a0 = vec![0.0; n];
    let mut a1 = vec![0.0; n];
    let mut b0 = vec![0.0; n];
    let mut b1 = vec![0.0; n];
    for i in 0..n {
        let spw = (p[i] / w[i]).sqrt();
        let swp = 1.0 / spw;
        let r = rp[i] / rho[i];
        a0[i] = 0.5 * (g[i] - 1.0 / rho[i]);
        a1[i] = 1.5 * (g[i] * y1[i] - l[i] / rho[i]);
        let a0p = 0.5 * (gp[i] + rp[i] / (rho[i] * rho[i]));
        b0[i] = spw * (a0p + r * a0[i]) - g1.at(i) / (2.0 * rho[i]);
        let a1p = 1.5 * (gp[i] * y1[i] + 1.0 / (g[i] * p[i]) - swp / rho[i] + l[i] * rp[i] / (rho[i] * rho[i]));
        b1[i] = if l[i] > 0.0 { spw * (a1p + r * a1[i]) - 1.5 * g2.at(i) * l[i] / rho[i] } else { 0.0 };
    }
    let alpha1 = divide_by_power(&a1, l, 1);
    let beta1 = divide_by_power(&b1, l, 1);
    let gf = |v| GridFunction::from_vec(mesh, v);
    InitialCoefficients {
        alpha0: gf(a0.clone()),
        alpha1: gf(alpha1),
        beta0: gf(b0.clone()),
        beta1: gf(beta1),
        a0: gf(a0),
        a1: gf(a1),
        b0: gf(b0),
        b1: gf(b1),
    }
}

/// Precomputed mesh data shared by every recurrence step.
struct StepData {
    /// `l (g′ρ + gρ′)`
    f: Vec<f64>,
    /// `ρ g √(w/p)`
    rgs: Vec<f64>,
    /// `√(w/p) / (ρ² g²)`
    eta_w: Vec<f64>,
    /// `l √(w/p) / g`
    a_w: Vec<f64>,
    /// `√(p/w) (g′ρ + gρ′) / ρ`
    theta_b: Vec<f64>,
    /// `1 / (ρ² g)`
    eta_b: Vec<f64>,
}

impl StepData {
    fn new(sol: &ParticularSolution, c: &SlCoefficients) -> Self {
        let (g, gp) = (sol.g.values(), sol.g_prime.values());
        let (p, w, l, rho, rp) = (c.p().values(), c.w().values(), c.l().values(), c.rho().values(), c.rho_prime().values());
        let n = g.len();
        let mut d =
            Self { f: vec![0.0; n], rgs: vec![0.0; n], eta_w: vec![0.0; n], a_w: vec![0.0; n], theta_b: vec![0.0; n], eta_b: vec![0.0; n] };
        for i in 0..n {
            let swp = (w[i] / p[i]).sqrt();
            let s = gp[i] * rho[i] + g[i] * rp[i];
            d.f[i] = l[i] * s;
            d.rgs[i] = rho[i] * g[i] * swp;
            d.eta_w[i] = swp / (rho[i] * rho[i] * g[i] * g[i]);
            d.a_w[i] = l[i] * swp / g[i];
            d.theta_b[i] = s / (swp * rho[i]);
            d.eta_b[i] = 1.0 / (rho[i] * rho[i] * g[i]);
        }
        d
    }
}

/// One step of the recurrence: `A_n` (and `B_n` when `b_prev2` is given) from order `n − 2`.
pub fn recurrence_step(
    n: usize,
    a_prev2: &GridFunction,
    b_prev2: Option<&GridFunction>,
    sol: &ParticularSolution,
    c: &SlCoefficients,
) -> (GridFunction, Option<GridFunction>, RecurrenceIntermediates) {
    let data = StepData::new(sol, c);
    step_with(n, a_prev2.values(), b_prev2.map(GridFunction::values), sol, c, &data)
}

fn step_with(
    n: usize,
    a2: &[f64],
    b2: Option<&[f64]>,
    sol: &ParticularSolution,
    c: &SlCoefficients,
    d: &StepData,
) -> (GridFunction, Option<GridFunction>, RecurrenceIntermediates) {
    assert!(n >= 2, "recurrence starts at order 2");
    let mesh = c.mesh();
    let h = mesh.step();
    let (g, l, rho) = (sol.g.values(), c.l().values(), c.rho().values());
    let len = g.len();
    let nm1 = (n - 1) as f64;
    let eta_integrand: Vec<f64> = (0..len).map(|i| (d.f[i] + nm1 * d.rgs[i]) * rho[i] * a2[i]).collect();
    let eta = cumulative_integral(&eta_integrand, h);
    let theta_integrand: Vec<f64> = (0..len).map(|i| eta[i] * d.eta_w[i] - d.a_w[i] * a2[i]).collect();
    let theta = cumulative_integral(&theta_integrand, h);

    let fac = (2 * n + 1) as f64 / (2 * n - 3) as f64;
    let k = (2 * n - 1) as f64;
    let a: Vec<f64> = (0..len).map(|i| fac * (l[i] * l[i] * a2[i] + 2.0 * k * g[i] * theta[i])).collect();
    let b = b2.map(|b2| {
        let v: Vec<f64> = (0..len)
            .map(|i| fac * (l[i] * l[i] * b2[i] + 2.0 * k * (d.theta_b[i] * theta[i] + eta[i] * d.eta_b[i]) - k * l[i] * a2[i]))
            .collect();
        GridFunction::from_vec(mesh, v)
    });
    (
        GridFunction::from_vec(mesh, a),
        b,
        RecurrenceIntermediates { theta_tilde: GridFunction::from_vec(mesh, theta), eta_tilde: GridFunction::from_vec(mesh, eta) },
    )
}

fn divide_by_power(a: &[f64], l: &[f64], n: usize) -> Vec<f64> {
    a.iter()
        .zip(l)
        .map(|(&a, &l)| {
            if l > 0.0 {
                let v = a / l.powi(n as i32);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            } else {
                0.0
            }
        })
        .collect()
}

/// Index below which values are zeroed: the smallest-index argmin of `|f|`
/// over mesh indices `1..=window`.
fn zeroing_index(f: &[f64], window: usize) -> usize {
    let mut best = 1;
    let mut best_val = f64::INFINITY;
    for (i, v) in f.iter().enumerate().take(window.min(f.len() - 1) + 1).skip(1) {
        if v.abs() < best_val {
            best_val = v.abs();
            best = i;
        }
    }
    best
}

/// `α_n = A_n / l^n` for `n ≥ 1`, zeroed below the argmin of `|α_n|` inside
/// `[L, L + ε]`. Order zero is copied unchanged.
pub fn recover_alpha_beta(coeffs: &[GridFunction], l: &GridFunction, epsilon: f64) -> Vec<GridFunction> {
    let mesh = l.mesh();
    let window = ((epsilon / mesh.step()).floor() as usize).max(1);
    coeffs
        .iter()
        .enumerate()
        .map(|(n, a)| {
            if n == 0 {
                return a.clone();
            }
            let mut v = divide_by_power(a.values(), l.values(), n);
            let k0 = zeroing_index(&v, window);
            v[..k0].iter_mut().for_each(|x| *x = 0.0);
            GridFunction::from_vec(mesh, v)
        })
        .collect()
}

/// Right-hand sides of the four identities.
fn identity_targets(c: &SlCoefficients, g1: &GridFunction, g2: &GridFunction, h_tilde: f64, with_beta: bool) -> Vec<Vec<f64>> {
    let (q, w, l, rho) = (c.q().values(), c.w().values(), c.l().values(), c.rho().values());
    let n = l.len();
    let g1 = g1.values();
    let g2 = g2.values();
    let mut out = vec![
        (0..n).map(|i| (g1[i] + g2[i]) * l[i] / (2.0 * rho[i])).collect::<Vec<_>>(),
        (0..n).map(|i| h_tilde * l[i] / (2.0 * rho[i])).collect(),
    ];
    if with_beta {
        let inner = flux_of_inverse_rho_derivative(c);
        let at_l = q[0] / w[0] - rho[0] / w[0] * inner[0];
        out.push(
            (0..n)
                .map(|i| {
                    l[i] * (q[i] / (4.0 * rho[i] * w[i]) - inner[i] / (4.0 * w[i]) + (h_tilde * g2[i] + g2[i] * g2[i]) / (2.0 * rho[i]))
                })
                .collect(),
        );
        out.push((0..n).map(|i| l[i] * (at_l / (4.0 * rho[i]) + h_tilde * g2[i] / (2.0 * rho[i]))).collect());
    }
    out
}

/// Evaluates the identities for every truncation order and suggests one.
pub fn check_identities(
    alpha: &[GridFunction],
    beta: &[GridFunction],
    c: &SlCoefficients,
    g1: &GridFunction,
    g2: &GridFunction,
    h_tilde: f64,
) -> IdentityReport {
    let with_beta = !beta.is_empty();
    let targets = identity_targets(c, g1, g2, h_tilde, with_beta);
    let n = c.mesh().len();
    let mut sums = vec![vec![0.0; n]; targets.len()];
    let mut sup_by_order = Vec::with_capacity(alpha.len());
    for m in 0..alpha.len() {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let a = alpha[m].values();
        for i in 0..n {
            sums[0][i] += a[i];
            sums[1][i] += sign * a[i];
        }
        if with_beta {
            let b = beta[m].values();
            for i in 0..n {
                sums[2][i] += b[i];
                sums[3][i] += sign * b[i];
            }
        }
        sup_by_order
            .push(sums.iter().zip(&targets).map(|(s, t)| s.iter().zip(t).fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))).collect());
    }
    let suggested_order = plateau_order(&sup_by_order);
    let residuals = residuals_at(alpha, beta, &targets, suggested_order, c);
    IdentityReport { residuals, sup_by_order, suggested_order }
}

/// Smallest order whose alpha residual is within a factor two of the minimum.
fn plateau_order(sup_by_order: &[Vec<f64>]) -> usize {
    let r: Vec<f64> = sup_by_order.iter().map(|v| v[0].max(v[1])).collect();
    let best = r.iter().copied().fold(f64::INFINITY, f64::min);
    r.iter().position(|&v| v <= 2.0 * best).unwrap_or(r.len() - 1).max(1)
}

fn residuals_at(
    alpha: &[GridFunction],
    beta: &[GridFunction],
    targets: &[Vec<f64>],
    order: usize,
    c: &SlCoefficients,
) -> Vec<GridFunction> {
    let n = c.mesh().len();
    let mut out = Vec::with_capacity(targets.len());
    for (k, t) in targets.iter().enumerate() {
        let family = if k < 2 { alpha } else { beta };
        let alternating = k % 2 == 1;
        let mut s = vec![0.0; n];
        for (m, f) in family.iter().enumerate().take(order + 1) {
            let sign = if alternating && m % 2 == 1 { -1.0 } else { 1.0 };
            for (acc, v) in s.iter_mut().zip(f.values()) {
                *acc += sign * v;
            }
        }
        let r: Vec<f64> = s.iter().zip(t).map(|(a, b)| a - b).collect();
        out.push(GridFunction::from_vec(c.mesh(), r));
    }
    out
}

/// Runs the whole coefficient generation.
pub fn compute(sol: &ParticularSolution, c: &SlCoefficients, settings: &NsbfSettings) -> Result<NsbfCoefficients> {
    let max_order = settings.max_order.max(1);
    let g2 = compute_g2(c);
    let h_tilde = compute_h_tilde(sol, c);
    let g1 = g2.map(|v| v + h_tilde);
    let powers = build_formal_powers(sol, c, 1);
    let init = initial_coefficients(sol, c, &powers.y[1], &g1, &g2);

    let data = StepData::new(sol, c);
    let want_b = settings.with_derivatives;
    let mut a = vec![init.a0, init.a1];
    let mut b = if want_b { vec![init.b0, init.b1] } else { Vec::new() };
    for n in 2..=max_order {
        let b2 = if want_b { Some(b[n - 2].values()) } else { None };
        let (an, bn, _) = step_with(n, a[n - 2].values(), b2, sol, c, &data);
        a.push(an);
        if let Some(bn) = bn {
            b.push(bn);
        }
    }
    a.truncate(max_order + 1);
    b.truncate(if want_b { max_order + 1 } else { 0 });

    let mesh = c.mesh();
    let epsilon = settings.neighborhood_fraction * (mesh.upper() - mesh.lower());
    let alpha = recover_alpha_beta(&a, c.l(), epsilon);
    let beta = recover_alpha_beta(&b, c.l(), epsilon);
    if let Some((n, _)) = alpha.iter().chain(&beta).enumerate().find(|(_, f)| !f.all_finite()) {
        return Err(Error::NonFinite(n));
    }
    let check = check_identities(&alpha, &beta, c, &g1, &g2, h_tilde);
    let m_trunc = check.suggested_order;
    Ok(NsbfCoefficients { alpha, beta, a, b, g1, g2, h_tilde, m_trunc, check })
}

/// Coefficients of the Legendre polynomials: `coeff(k, n)` is the
/// coefficient of `x^k` in `P_n`.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    rows: Vec<Vec<f64>>,
}

impl LegendreTable {
    pub fn new(max_degree: usize) -> Self {
        let mut rows: Vec<Vec<f64>> = vec![vec![1.0]];
        if max_degree >= 1 {
            rows.push(vec![0.0, 1.0]);
        }
        for n in 1..max_degree {
            let mut next = vec![0.0; n + 2];
            let nf = n as f64;
            for (k, &c) in rows[n].iter().enumerate() {
                next[k + 1] += (2.0 * nf + 1.0) * c / (nf + 1.0);
            }
            for (k, &c) in rows[n - 1].iter().enumerate() {
                next[k] -= nf * c / (nf + 1.0);
            }
            rows.push(next);
        }
        Self { rows }
    }

    pub fn max_degree(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn coeff(&self, k: usize, n: usize) -> f64 {
        self.rows.get(n).and_then(|r| r.get(k)).copied().unwrap_or(0.0)
    }
}

/// `α_n = (2n+1)/2 (Σ_k l_{k,n} Φ_k / l^k − 1/ρ)` for `n ≤ 8`; zero at `L`.
pub fn direct_alpha(n: usize, table: &LegendreTable, powers: &FormalPowerTable, c: &SlCoefficients) -> Result<GridFunction> {
    if n > 8 || n > table.max_degree() || n > powers.max_order() {
        return Err(Error::OrderTooLarge(n));
    }
    let (l, rho) = (c.l().values(), c.rho().values());
    let values = (0..l.len())
        .map(|i| {
            if l[i] <= 0.0 {
                return if n == 0 { 0.5 * (powers.phi[0].at(i) - 1.0 / rho[i]) } else { 0.0 };
            }
            let s: f64 = (0..=n).map(|k| table.coeff(k, n) * powers.phi[k].at(i) / l[i].powi(k as i32)).sum();
            (2 * n + 1) as f64 / 2.0 * (s - 1.0 / rho[i])
        })
        .collect();
    Ok(GridFunction::from_vec(c.mesh(), values))
}
