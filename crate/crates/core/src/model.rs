//! Diffusion models and their Sturm-Liouville form.
//!
//! The generator `½σ²y²∂yy + μy∂y − (r̄+h)` is rewritten as
//! `(1/w)[(p v′)′ − q v]` with
//! `p = exp ∫_L^y 2μ/(sσ²)`, `w = 2p/(σ²y²)`, `q = (r̄+h)w`.
//! The Liouville variable is `l = √2 ∫_L^y ds/(sσ)` and `ρ = (pw)^{1/4}`,
//! which equals `(√2 p/(σy))^{1/2}`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{GridFunction, Mesh};

/// Scalar coefficient function of the state variable.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Time-homogeneous diffusion with jump-to-default.
#[derive(Clone)]
pub struct DiffusionSpec {
    pub sigma: ScalarFn,
    pub sigma_prime: Option<ScalarFn>,
    pub rbar: ScalarFn,
    pub qbar: ScalarFn,
    pub hazard: ScalarFn,
}

impl fmt::Debug for DiffusionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffusionSpec").field("analytic_sigma_prime", &self.sigma_prime.is_some()).finish_non_exhaustive()
    }
}

fn constant(c: f64) -> ScalarFn {
    Arc::new(move |_| c)
}

impl DiffusionSpec {
    pub fn new(
        sigma: impl Fn(f64) -> f64 + Send + Sync + 'static,
        rbar: impl Fn(f64) -> f64 + Send + Sync + 'static,
        qbar: impl Fn(f64) -> f64 + Send + Sync + 'static,
        hazard: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { sigma: Arc::new(sigma), sigma_prime: None, rbar: Arc::new(rbar), qbar: Arc::new(qbar), hazard: Arc::new(hazard) }
    }

    /// Constant rate, dividend yield and hazard.
    pub fn with_constant_rates(sigma: impl Fn(f64) -> f64 + Send + Sync + 'static, rbar: f64, qbar: f64, hazard: f64) -> Self {
        Self { sigma: Arc::new(sigma), sigma_prime: None, rbar: constant(rbar), qbar: constant(qbar), hazard: constant(hazard) }
    }

    pub fn with_sigma_prime(mut self, sigma_prime: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.sigma_prime = Some(Arc::new(sigma_prime));
        self
    }

    /// Risk-neutral drift `μ = r̄ − q̄ + h`.
    pub fn drift(&self, y: f64) -> f64 {
        (self.rbar)(y) - (self.qbar)(y) + (self.hazard)(y)
    }

    /// Killing rate `r̄ + h`.
    pub fn killing_rate(&self, y: f64) -> f64 {
        (self.rbar)(y) + (self.hazard)(y)
    }

    /// `σ′(y)`, analytic when supplied, otherwise a central difference.
    pub fn sigma_derivative(&self, y: f64) -> f64 {
        match &self.sigma_prime {
            Some(d) => d(y),
            None => {
                let h = 1e-4 * y.abs().max(1.0);
                let s = &self.sigma;
                (s(y - 2.0 * h) - 8.0 * s(y - h) + 8.0 * s(y + h) - s(y + 2.0 * h)) / (12.0 * h)
            }
        }
    }
}

/// Returns `y ↦ μ(y)` for a diffusion.
pub fn drift_of(spec: &DiffusionSpec) -> impl Fn(f64) -> f64 + '_ {
    move |y| spec.drift(y)
}

/// Scale `δ` such that `δ y0^β = σ0`.
pub fn calibrate_delta(sigma0: f64, y0: f64, beta: f64) -> f64 {
    sigma0 * y0.powf(-beta)
}

/// Extended jump-to-default CEV model: `σ = δ y^β`, `h = b + c σ^γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EjdcevParams {
    pub delta: f64,
    pub beta: f64,
    pub b: f64,
    pub c: f64,
    pub gamma: f64,
    pub rbar: f64,
    pub qbar: f64,
    pub sigma0: f64,
    pub y0: f64,
}

impl EjdcevParams {
    /// Reference parameter set: `y0 = 100`, `σ0 = 0.25`, `r̄ = 0.1`, `q̄ = 0`,
    /// `b = 0.02`, `c = 0.5`, with `δ` calibrated to `σ0`.
    pub fn reference(beta: f64, gamma: f64) -> Self {
        Self::calibrated(beta, gamma, 0.25, 100.0, 0.02, 0.5, 0.1, 0.0)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn calibrated(beta: f64, gamma: f64, sigma0: f64, y0: f64, b: f64, c: f64, rbar: f64, qbar: f64) -> Self {
        Self { delta: calibrate_delta(sigma0, y0, beta), beta, b, c, gamma, rbar, qbar, sigma0, y0 }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("delta", self.delta > 0.0, "must be positive"),
            ("b", self.b >= 0.0, "must be non-negative"),
            ("c", self.c >= 0.0, "must be non-negative"),
            ("gamma", self.gamma >= 0.0, "must be non-negative"),
            ("sigma0", self.sigma0 > 0.0, "must be positive"),
            ("y0", self.y0 > 0.0, "must be positive"),
        ];
        for (field, ok, reason) in checks {
            if !ok {
                return Err(Error::config(format!("model.{field}"), reason));
            }
        }
        for (field, v) in [("beta", self.beta), ("rbar", self.rbar), ("qbar", self.qbar)] {
            if !v.is_finite() {
                return Err(Error::config(format!("model.{field}"), "must be finite"));
            }
        }
        Ok(())
    }

    pub fn sigma(&self, y: f64) -> f64 {
        self.delta * y.powf(self.beta)
    }

    pub fn sigma_prime(&self, y: f64) -> f64 {
        self.delta * self.beta * y.powf(self.beta - 1.0)
    }

    pub fn hazard(&self, y: f64) -> f64 {
        self.b + self.c * self.sigma(y).powf(self.gamma)
    }

    pub fn spec(&self) -> DiffusionSpec {
        let p = *self;
        DiffusionSpec {
            sigma: Arc::new(move |y| p.sigma(y)),
            sigma_prime: Some(Arc::new(move |y| p.sigma_prime(y))),
            rbar: constant(p.rbar),
            qbar: constant(p.qbar),
            hazard: Arc::new(move |y| p.hazard(y)),
        }
    }
}

/// Sturm-Liouville coefficients sampled on a mesh.
#[derive(Debug, Clone)]
pub struct SlCoefficients {
    mesh: Arc<Mesh>,
    p: GridFunction,
    q: GridFunction,
    w: GridFunction,
    l: GridFunction,
    rho: GridFunction,
    rho_prime: GridFunction,
}

/// Relative residuals of the defining relations of `w` and `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub weight: f64,
    pub potential: f64,
}

impl ConsistencyReport {
    pub fn max(&self) -> f64 {
        self.weight.max(self.potential)
    }
}

fn violated(what: &str, y: f64) -> Error {
    Error::AssumptionViolated(format!("{what} at y={y}"))
}

impl SlCoefficients {
    /// Builds `p, q, w, l, ρ, ρ′` for a diffusion on the mesh, with `p(L) = 1`.
    pub fn build(spec: &DiffusionSpec, mesh: &Arc<Mesh>) -> Result<Self> {
        let ys = mesh.points();
        let h = mesh.step();
        let sigma: Vec<f64> = ys.iter().map(|&y| (spec.sigma)(y)).collect();
        for (&y, &s) in ys.iter().zip(&sigma) {
            if !(s.is_finite() && s > 0.0) {
                return Err(violated("sigma must be positive and finite", y));
            }
        }
        let mu: Vec<f64> = ys.iter().map(|&y| spec.drift(y)).collect();
        let kill: Vec<f64> = ys.iter().map(|&y| spec.killing_rate(y)).collect();

        let log_p_rate: Vec<f64> = ys.iter().zip(&sigma).zip(&mu).map(|((&y, &s), &m)| 2.0 * m / (y * s * s)).collect();
        let p: Vec<f64> = crate::mesh::cumulative_integral(&log_p_rate, h).into_iter().map(f64::exp).collect();
        let w: Vec<f64> = p.iter().zip(ys).zip(&sigma).map(|((&p, &y), &s)| 2.0 * p / (s * s * y * y)).collect();
        for (&y, (&wi, &pi)) in ys.iter().zip(w.iter().zip(&p)) {
            if !(wi.is_finite() && wi > 0.0 && pi.is_finite() && pi > 0.0) {
                return Err(violated("p and w must be positive and finite", y));
            }
        }
        let q: Vec<f64> = kill.iter().zip(&w).map(|(k, w)| k * w).collect();
        let inv_ys: Vec<f64> = ys.iter().zip(&sigma).map(|(&y, &s)| std::f64::consts::SQRT_2 / (y * s)).collect();
        let l = crate::mesh::cumulative_integral(&inv_ys, h);
        let rho: Vec<f64> = p.iter().zip(&w).map(|(p, w)| (p * w).powf(0.25)).collect();
        let rho_prime = match &spec.sigma_prime {
            Some(dsigma) => rho
                .iter()
                .zip(ys)
                .zip(sigma.iter().zip(&mu))
                .map(|((&r, &y), (&s, &m))| r * (m / (y * s * s) - dsigma(y) / (2.0 * s) - 0.5 / y))
                .collect(),
            None => crate::mesh::differentiate(&rho, h),
        };
        let gf = |v: Vec<f64>| GridFunction::new(mesh, v);
        Ok(Self { mesh: Arc::clone(mesh), p: gf(p)?, q: gf(q)?, w: gf(w)?, l: gf(l)?, rho: gf(rho)?, rho_prime: gf(rho_prime)? })
    }

    /// Coefficients given directly as `p, q, w`; `ρ′` is differentiated numerically when absent.
    pub fn from_parts(p: GridFunction, q: GridFunction, w: GridFunction, rho_prime: Option<GridFunction>) -> Result<Self> {
        p.same_mesh(&q)?;
        p.same_mesh(&w)?;
        let mesh = Arc::clone(p.mesh());
        for (i, (&pi, &wi)) in p.values().iter().zip(w.values()).enumerate() {
            if !(pi > 0.0 && wi > 0.0) {
                return Err(violated("p and w must be positive", mesh.points()[i]));
            }
        }
        let l = p.zip_map(&w, |p, w| (w / p).sqrt())?.antiderivative();
        let rho = p.zip_map(&w, |p, w| (p * w).powf(0.25))?;
        let rho_prime = match rho_prime {
            Some(r) => {
                r.same_mesh(&p)?;
                r
            }
            None => rho.derivative(),
        };
        Ok(Self { mesh, p, q, w, l, rho, rho_prime })
    }

    /// Same problem with `p, q, w` multiplied by `kappa`.
    pub fn rescaled(&self, kappa: f64) -> Self {
        let s = kappa.sqrt();
        Self {
            mesh: Arc::clone(&self.mesh),
            p: self.p.map(|v| v * kappa),
            q: self.q.map(|v| v * kappa),
            w: self.w.map(|v| v * kappa),
            l: self.l.clone(),
            rho: self.rho.map(|v| v * s),
            rho_prime: self.rho_prime.map(|v| v * s),
        }
    }

    /// Checks `w = 2p/(σ²y²)` and `q = (r̄+h)w` against the model.
    pub fn consistency(&self, spec: &DiffusionSpec) -> ConsistencyReport {
        let mut weight = 0.0f64;
        let mut potential = 0.0f64;
        for (i, &y) in self.mesh.points().iter().enumerate() {
            let s = (spec.sigma)(y);
            let w_ref = 2.0 * self.p.at(i) / (s * s * y * y);
            let q_ref = spec.killing_rate(y) * self.w.at(i);
            weight = weight.max((self.w.at(i) - w_ref).abs() / w_ref.abs());
            potential = potential.max((self.q.at(i) - q_ref).abs() / q_ref.abs().max(f64::MIN_POSITIVE));
        }
        ConsistencyReport { weight, potential }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }
    pub fn p(&self) -> &GridFunction {
        &self.p
    }
    pub fn q(&self) -> &GridFunction {
        &self.q
    }
    pub fn w(&self) -> &GridFunction {
        &self.w
    }
    pub fn l(&self) -> &GridFunction {
        &self.l
    }
    pub fn rho(&self) -> &GridFunction {
        &self.rho
    }
    pub fn rho_prime(&self) -> &GridFunction {
        &self.rho_prime
    }

    /// `√(w/p)`, the derivative of `l`.
    pub fn l_prime(&self) -> Vec<f64> {
        self.w.values().iter().zip(self.p.values()).map(|(w, p)| (w / p).sqrt()).collect()
    }
}
