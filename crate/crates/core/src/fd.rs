//! Crank-Nicolson reference solver for the knock-out pricing equation
//! `v_t + ½σ²y² v_yy + μ y v_y − (r̄+h) v = 0` on `[L, U]` with
//! `v(L, t) = 0`, `v(U, t) = R`, `v(y, T) = f(y)`.
//!
//! Independent of the spectral machinery: it reads only the model callables
//! and the contract payoff.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DiffusionSpec;
use crate::pricing::OptionContract;

/// Space-time grid and startup damping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FdGrid {
    pub y_count: usize,
    pub t_count: usize,
    /// Fully implicit sub-steps replacing the first Crank-Nicolson step.
    pub damping_steps: usize,
}

impl Default for FdGrid {
    fn default() -> Self {
        Self { y_count: 1201, t_count: 1000, damping_steps: 4 }
    }
}

impl FdGrid {
    pub fn validate(&self) -> Result<()> {
        if self.y_count < 201 {
            return Err(Error::config("fd.y_count", "must be at least 201"));
        }
        if self.t_count < 200 {
            return Err(Error::config("fd.t_count", "must be at least 200"));
        }
        Ok(())
    }

    /// Both steps halved.
    pub fn refined(&self) -> Self {
        Self { y_count: 2 * self.y_count - 1, t_count: 2 * self.t_count, damping_steps: self.damping_steps }
    }
}

/// Grid solution; `values[k][j]` is `v(prices[j], times[k])`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdSolution {
    pub prices: Vec<f64>,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl FdSolution {
    /// Value at time zero, linearly interpolated in `y`.
    pub fn price_at(&self, y: f64) -> f64 {
        let row = &self.values[0];
        let h = self.prices[1] - self.prices[0];
        let x = ((y - self.prices[0]) / h).clamp(0.0, (self.prices.len() - 1) as f64);
        let j = (x.floor() as usize).min(self.prices.len() - 2);
        let t = x - j as f64;
        row[j] * (1.0 - t) + row[j + 1] * t
    }
}

/// Solves backward from maturity.
pub fn solve_pde(spec: &DiffusionSpec, contract: &OptionContract, grid: &FdGrid) -> Result<FdSolution> {
    grid.validate()?;
    contract.validate()?;
    let (lo, hi) = (contract.lower, contract.upper);
    let ny = grid.y_count;
    let dy = (hi - lo) / (ny - 1) as f64;
    let dt = contract.maturity / grid.t_count as f64;
    let prices: Vec<f64> = (0..ny).map(|j| if j == ny - 1 { hi } else { lo + dy * j as f64 }).collect();

    // Interior operator rows: a_j v_{j-1} + b_j v_j + c_j v_{j+1}.
    let mut sub = vec![0.0; ny];
    let mut diag = vec![0.0; ny];
    let mut sup = vec![0.0; ny];
    for j in 1..ny - 1 {
        let y = prices[j];
        let s = (spec.sigma)(y);
        let diff = 0.5 * s * s * y * y / (dy * dy);
        let conv = spec.drift(y) * y / (2.0 * dy);
        sub[j] = diff - conv;
        diag[j] = -2.0 * diff - spec.killing_rate(y);
        sup[j] = diff + conv;
    }

    let mut v: Vec<f64> = prices.iter().map(|&y| contract.payoff_at(y)).collect();
    v[0] = 0.0;
    v[ny - 1] = contract.rebate;
    let bound = 10.0 * contract.payoff_bound().max(f64::MIN_POSITIVE);

    let mut values = vec![v.clone()];
    let mut times = vec![contract.maturity];
    for step in 0..grid.t_count {
        if step == 0 && grid.damping_steps > 0 {
            let sub_dt = dt / grid.damping_steps as f64;
            for _ in 0..grid.damping_steps {
                v = theta_step(&v, &sub, &diag, &sup, sub_dt, 1.0, contract.rebate);
            }
        } else {
            v = theta_step(&v, &sub, &diag, &sup, dt, 0.5, contract.rebate);
        }
        let t = contract.maturity - dt * (step + 1) as f64;
        if let Some(&worst) = v.iter().find(|x| !(x.abs() <= bound)) {
            return Err(Error::Instability { value: worst.abs(), bound });
        }
        values.push(v.clone());
        times.push(t.max(0.0));
    }
    values.reverse();
    times.reverse();
    Ok(FdSolution { prices, times, values })
}

/// `(I − θΔt A) v_new = (I + (1−θ)Δt A) v_old` with Dirichlet ends.
fn theta_step(v: &[f64], sub: &[f64], diag: &[f64], sup: &[f64], dt: f64, theta: f64, upper: f64) -> Vec<f64> {
    let n = v.len();
    let explicit = (1.0 - theta) * dt;
    let implicit = theta * dt;
    let mut rhs = vec![0.0; n];
    let mut a = vec![0.0; n];
    let mut b = vec![1.0; n];
    let mut c = vec![0.0; n];
    rhs[0] = 0.0;
    rhs[n - 1] = upper;
    for j in 1..n - 1 {
        rhs[j] = v[j] + explicit * (sub[j] * v[j - 1] + diag[j] * v[j] + sup[j] * v[j + 1]);
        a[j] = -implicit * sub[j];
        b[j] = 1.0 - implicit * diag[j];
        c[j] = -implicit * sup[j];
    }
    thomas(&a, &b, &c, &rhs)
}

/// Tridiagonal solve; `a` is the sub-diagonal, `c` the super-diagonal.
fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for i in 1..n {
        let m = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / m;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}
