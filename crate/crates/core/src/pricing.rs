//! Eigenfunction-expansion pricing, Greeks, contribution bands and rebates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{split_panel_correction, weighted_integral, GridFunction, Mesh};
use crate::model::{DiffusionSpec, SlCoefficients};
use crate::spectrum::EigenPair;
use crate::spps::{build_formal_powers, ParticularSolution};

/// Default exponent cutoff: pairs with `λ (T − t) > 35` contribute below `e^{-35}`.
pub const DEFAULT_LAMBDA_CUTOFF: f64 = 35.0;

/// Vanilla payoff styles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionStyle {
    Call,
    Put,
}

/// Terminal payoff.
#[derive(Debug, Clone)]
pub enum Payoff {
    Vanilla(OptionStyle),
    Custom(GridFunction),
}

/// Double-barrier knock-out contract.
#[derive(Debug, Clone)]
pub struct OptionContract {
    pub payoff: Payoff,
    pub strike: f64,
    pub lower: f64,
    pub upper: f64,
    pub maturity: f64,
    /// Amount paid when the upper barrier is hit.
    pub rebate: f64,
}

impl OptionContract {
    pub fn new(style: OptionStyle, strike: f64, lower: f64, upper: f64, maturity: f64) -> Self {
        Self { payoff: Payoff::Vanilla(style), strike, lower, upper, maturity, rebate: 0.0 }
    }

    pub fn call(strike: f64, lower: f64, upper: f64, maturity: f64) -> Self {
        Self::new(OptionStyle::Call, strike, lower, upper, maturity)
    }

    pub fn put(strike: f64, lower: f64, upper: f64, maturity: f64) -> Self {
        Self::new(OptionStyle::Put, strike, lower, upper, maturity)
    }

    pub fn custom(payoff: GridFunction, maturity: f64) -> Self {
        let (lower, upper) = (payoff.mesh().lower(), payoff.mesh().upper());
        Self { payoff: Payoff::Custom(payoff), strike: f64::NAN, lower, upper, maturity, rebate: 0.0 }
    }

    pub fn with_rebate(mut self, rebate: f64) -> Self {
        self.rebate = rebate;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lower > 0.0 && self.upper > self.lower) {
            return Err(Error::InvalidContract(format!("need 0 < L < U, got L={} U={}", self.lower, self.upper)));
        }
        if let Payoff::Vanilla(_) = self.payoff {
            if !(self.strike > self.lower && self.strike < self.upper) {
                return Err(Error::InvalidContract(format!(
                    "strike {} must lie strictly inside ({}, {})",
                    self.strike, self.lower, self.upper
                )));
            }
        }
        if !(self.maturity > 0.0 && self.maturity.is_finite()) {
            return Err(Error::InvalidContract(format!("maturity must be positive, got {}", self.maturity)));
        }
        if !(self.rebate >= 0.0 && self.rebate.is_finite()) {
            return Err(Error::InvalidContract(format!("rebate must be non-negative, got {}", self.rebate)));
        }
        Ok(())
    }

    /// Terminal payoff at `y`.
    pub fn payoff_at(&self, y: f64) -> f64 {
        match &self.payoff {
            Payoff::Vanilla(OptionStyle::Call) => (y - self.strike).max(0.0),
            Payoff::Vanilla(OptionStyle::Put) => (self.strike - y).max(0.0),
            Payoff::Custom(f) => f.interpolate(y).unwrap_or(0.0),
        }
    }

    /// Payoff sampled on the mesh.
    pub fn payoff_on(&self, mesh: &std::sync::Arc<Mesh>) -> Result<GridFunction> {
        match &self.payoff {
            Payoff::Custom(f) => {
                if **f.mesh() != **mesh {
                    return Err(Error::MeshMismatch);
                }
                Ok(f.clone())
            }
            Payoff::Vanilla(_) => Ok(GridFunction::from_fn(mesh, |y| self.payoff_at(y))),
        }
    }

    /// Location of the payoff kink for vanilla styles.
    pub fn kink(&self) -> Option<f64> {
        match self.payoff {
            Payoff::Vanilla(_) => Some(self.strike),
            Payoff::Custom(_) => None,
        }
    }

    /// Largest absolute terminal or boundary value.
    pub fn payoff_bound(&self) -> f64 {
        let sup = match &self.payoff {
            Payoff::Vanilla(OptionStyle::Call) => self.upper - self.strike,
            Payoff::Vanilla(OptionStyle::Put) => self.strike - self.lower,
            Payoff::Custom(f) => f.sup_norm(),
        };
        sup.max(self.rebate)
    }
}

/// Sets `f_n = ⟨f, φ_n⟩_w / ‖φ_n‖²_w` on every pair.
pub fn fourier_coefficients(payoff: &GridFunction, pairs: &mut [EigenPair], c: &SlCoefficients) -> Result<()> {
    for pair in pairs.iter_mut() {
        pair.f_n = projection(payoff, pair, c, None)?;
    }
    Ok(())
}

/// As [`fourier_coefficients`] for a contract; vanilla payoffs are integrated
/// exactly across the kink at the strike.
pub fn contract_coefficients(contract: &OptionContract, pairs: &mut [EigenPair], c: &SlCoefficients) -> Result<()> {
    let payoff = contract.payoff_on(c.mesh())?;
    let exact = |y: f64| contract.payoff_at(y);
    let kink = contract.kink().map(|k| (k, &exact as &dyn Fn(f64) -> f64));
    for pair in pairs.iter_mut() {
        pair.f_n = projection(&payoff, pair, c, kink)?;
    }
    Ok(())
}

type Kink<'a> = Option<(f64, &'a dyn Fn(f64) -> f64)>;

fn projection(f: &GridFunction, pair: &EigenPair, c: &SlCoefficients, kink: Kink) -> Result<f64> {
    f.same_mesh(&pair.phi)?;
    let step = c.mesh().step();
    let mut ip = weighted_integral(f.values(), pair.phi.values(), c.w().values(), step);
    if let Some((at, exact)) = kink {
        let g: Vec<f64> = pair.phi.values().iter().zip(c.w().values()).map(|(a, b)| a * b).collect();
        ip += split_panel_correction(f.values(), &g, c.mesh().lower(), step, at, exact);
    }
    Ok(ip / pair.norm_sq)
}

/// Number of leading pairs with `λ_n · horizon ≤ cutoff`.
pub fn retained_count(pairs: &[EigenPair], horizon: f64, cutoff: f64) -> usize {
    pairs.iter().take_while(|p| p.lambda * horizon <= cutoff).count()
}

fn check_y(pairs: &[EigenPair], y: f64) -> Result<()> {
    if let Some(p) = pairs.first() {
        let m = p.phi.mesh();
        if !m.contains(y) {
            return Err(Error::OutOfRange { y, lower: m.lower(), upper: m.upper() });
        }
    }
    Ok(())
}

/// `Σ coef_n e^{−λ_n τ} φ_n(y)` in index order.
fn series(pairs: &[EigenPair], coef: impl Fn(&EigenPair) -> f64, tau: f64, y: f64) -> Result<f64> {
    let mut s = 0.0;
    for p in pairs {
        s += coef(p) * (-p.lambda * tau).exp() * p.value_at(y)?;
    }
    Ok(s)
}

/// `v(y, t) = Σ f_n φ_n(y) e^{−λ_n (T − t)}` over the given pairs.
pub fn value(y: f64, t: f64, pairs: &[EigenPair], maturity: f64) -> Result<f64> {
    check_y(pairs, y)?;
    series(pairs, |p| p.f_n, maturity - t, y)
}

/// `Δ = Σ f_n φ_n′(y0) e^{−λ_n T}`.
pub fn delta(y0: f64, pairs: &[EigenPair], maturity: f64) -> Result<f64> {
    check_y(pairs, y0)?;
    let mut s = 0.0;
    for p in pairs {
        let d = p.derivative_at(y0).ok_or_else(|| Error::AssumptionViolated("eigenfunction derivatives were not built".into()))??;
        s += p.f_n * (-p.lambda * maturity).exp() * d;
    }
    Ok(s)
}

/// `ν = Δ / σ′(y0)`.
pub fn vega(y0: f64, delta_value: f64, spec: &DiffusionSpec) -> Result<f64> {
    let ds = spec.sigma_derivative(y0);
    if ds == 0.0 || !ds.is_finite() {
        return Err(Error::VegaUndefined);
    }
    Ok(delta_value / ds)
}

/// `θ = Σ f_n λ_n φ_n(y0) e^{−λ_n T}`.
pub fn theta(y0: f64, pairs: &[EigenPair], maturity: f64) -> Result<f64> {
    check_y(pairs, y0)?;
    series(pairs, |p| p.f_n * p.lambda, maturity, y0)
}

/// One partial-sum band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub n1: usize,
    pub n2: usize,
    pub value: f64,
}

/// Contribution bands of the pricing series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContributionReport {
    pub bands: Vec<Band>,
}

impl ContributionReport {
    pub fn total(&self) -> f64 {
        self.bands.iter().map(|b| b.value).sum()
    }
}

/// `Σ_{n=n1}^{n2} f_n φ_n(y0) e^{−λ_n (T − t)}` with 1-based indices.
pub fn contribution(n1: usize, n2: usize, pairs: &[EigenPair], y0: f64, t: f64, maturity: f64) -> Result<f64> {
    if n1 == 0 || n1 > n2 || n2 > pairs.len() {
        return Err(Error::BandOutOfRange { n1, n2, available: pairs.len() });
    }
    value(y0, t, &pairs[n1 - 1..n2], maturity)
}

/// Value on a uniform `t × y` grid; row `k` is time `k T/(t_count − 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueSurface {
    pub times: Vec<f64>,
    pub prices: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

/// Surface of the series; the slice at `t = T` is the truncated terminal reconstruction.
pub fn value_surface(pairs: &[EigenPair], maturity: f64, t_count: usize, y_count: usize) -> Result<ValueSurface> {
    let mesh = pairs.first().map(|p| p.phi.mesh().clone()).ok_or_else(|| Error::AssumptionViolated("no eigenpairs".into()))?;
    let t_count = t_count.max(2);
    let y_count = y_count.max(2);
    let times: Vec<f64> = (0..t_count).map(|k| maturity * k as f64 / (t_count - 1) as f64).collect();
    let prices: Vec<f64> = (0..y_count).map(|j| mesh.lower() + (mesh.upper() - mesh.lower()) * j as f64 / (y_count - 1) as f64).collect();
    let phis: Vec<Vec<f64>> =
        pairs.iter().map(|p| prices.iter().map(|&y| p.value_at(y)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    let values = times
        .iter()
        .map(|&t| {
            (0..y_count)
                .map(|j| {
                    let mut s = 0.0;
                    for (p, phi) in pairs.iter().zip(&phis) {
                        s += p.f_n * (-p.lambda * (maturity - t)).exp() * phi[j];
                    }
                    s
                })
                .collect()
        })
        .collect();
    Ok(ValueSurface { times, prices, values })
}

/// `‖f − Σ_{n≤N} f_n φ_n‖_w` for the pairs given.
pub fn terminal_l2_error(payoff: &GridFunction, pairs: &[EigenPair], c: &SlCoefficients) -> Result<f64> {
    let mut recon = vec![0.0; payoff.len()];
    for p in pairs {
        payoff.same_mesh(&p.phi)?;
        for (r, v) in recon.iter_mut().zip(p.phi.values()) {
            *r += p.f_n * v;
        }
    }
    let diff: Vec<f64> = payoff.values().iter().zip(&recon).map(|(f, r)| f - r).collect();
    Ok(weighted_integral(&diff, &diff, c.w().values(), c.mesh().step()).sqrt())
}

/// Homogenized expansion for a contract paying `R` on the upper barrier.
///
/// With `ℓ = (y − L)/(U − L)`, the function `ṽ = v − ℓR` has zero boundary
/// values, terminal data `d = f − ℓR` and constant source `s = 𝒜(ℓR)`.
/// Expanding, `ṽ = Σ [d_n e^{−λτ} + (s_n/λ_n)(1 − e^{−λτ})] φ_n`.
/// The time-independent part `ℓR + Σ (s_n/λ_n) φ_n` is the steady state
/// `R Φ₁/Φ₁(U)`, which is used in closed form so that only the exponentially
/// damped terms are truncated.
#[derive(Debug, Clone)]
pub struct RebateExpansion {
    pub rebate: f64,
    /// `d_n − s_n/λ_n` per pair.
    pub transient: Vec<f64>,
    pub d_n: Vec<f64>,
    pub s_n: Vec<f64>,
    /// Steady state on the mesh.
    pub steady: GridFunction,
    /// Its derivative on the mesh.
    pub steady_prime: GridFunction,
    pub maturity: f64,
}

/// Builds the rebate expansion over `pairs` (plain coefficients stay in `f_n`).
pub fn price_with_rebate(
    contract: &OptionContract,
    pairs: &[EigenPair],
    c: &SlCoefficients,
    spec: &DiffusionSpec,
    sol: &ParticularSolution,
) -> Result<RebateExpansion> {
    contract.validate()?;
    let mesh = c.mesh();
    let r = contract.rebate;
    let (lo, hi) = (mesh.lower(), mesh.upper());
    let ell = |y: f64| (y - lo) / (hi - lo);
    let f = contract.payoff_on(mesh)?;
    let d = GridFunction::from_vec(mesh, f.values().iter().zip(mesh.points()).map(|(&v, &y)| v - ell(y) * r).collect());
    let s = GridFunction::from_fn(mesh, |y| r / (hi - lo) * spec.drift(y) * y - spec.killing_rate(y) * ell(y) * r);
    let mut d_n = Vec::with_capacity(pairs.len());
    let mut s_n = Vec::with_capacity(pairs.len());
    let mut transient = Vec::with_capacity(pairs.len());
    let d_exact = |y: f64| contract.payoff_at(y) - ell(y) * r;
    let kink = contract.kink().map(|k| (k, &d_exact as &dyn Fn(f64) -> f64));
    for p in pairs {
        let dn = projection(&d, p, c, kink)?;
        let sn = projection(&s, p, c, None)?;
        d_n.push(dn);
        s_n.push(sn);
        transient.push(dn - sn / p.lambda);
    }
    let powers = build_formal_powers(sol, c, 1);
    let phi1 = &powers.phi[1];
    let scale = r / phi1.last();
    let steady = phi1.map(|v| v * scale);
    let steady_prime = GridFunction::from_vec(
        mesh,
        (0..mesh.len())
            .map(|i| {
                let (g, gp, y1, p) = (sol.g.at(i), sol.g_prime.at(i), powers.y[1].at(i), c.p().at(i));
                scale * (gp * y1 + 1.0 / (g * p))
            })
            .collect(),
    );
    Ok(RebateExpansion { rebate: r, transient, d_n, s_n, steady, steady_prime, maturity: contract.maturity })
}

impl RebateExpansion {
    fn coef<'a>(&'a self, pairs: &'a [EigenPair]) -> impl Fn(&EigenPair) -> f64 + 'a {
        move |p: &EigenPair| self.transient[p.n - pairs[0].n]
    }

    /// `v(y, t)` using the first `pairs.len()` transient terms.
    pub fn value(&self, y: f64, t: f64, pairs: &[EigenPair]) -> Result<f64> {
        check_y(pairs, y)?;
        let s = series(pairs, self.coef(pairs), self.maturity - t, y)?;
        Ok(self.steady.interpolate(y)? + s)
    }

    pub fn delta(&self, y0: f64, pairs: &[EigenPair]) -> Result<f64> {
        let mut s = 0.0;
        for (p, c) in pairs.iter().zip(&self.transient) {
            let d = p.derivative_at(y0).ok_or_else(|| Error::AssumptionViolated("eigenfunction derivatives were not built".into()))??;
            s += c * (-p.lambda * self.maturity).exp() * d;
        }
        Ok(self.steady_prime.interpolate(y0)? + s)
    }

    pub fn theta(&self, y0: f64, pairs: &[EigenPair]) -> Result<f64> {
        let coef = self.coef(pairs);
        series(pairs, |p| coef(p) * p.lambda, self.maturity, y0)
    }

    /// `‖f − v_N(·, T)‖_w` for the truncated terminal reconstruction.
    pub fn terminal_l2_error(&self, payoff: &GridFunction, pairs: &[EigenPair], c: &SlCoefficients) -> Result<f64> {
        let mut recon = self.steady.values().to_vec();
        for (p, k) in pairs.iter().zip(&self.transient) {
            for (r, v) in recon.iter_mut().zip(p.phi.values()) {
                *r += k * v;
            }
        }
        let diff: Vec<f64> = payoff.values().iter().zip(&recon).map(|(f, r)| f - r).collect();
        Ok(weighted_integral(&diff, &diff, c.w().values(), c.mesh().step()).sqrt())
    }
}

/// Solver diagnostics attached to every result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Diagnostics {
    /// Sup residual of each summation identity at the accepted truncation.
    pub identity_residuals: Vec<f64>,
    /// Largest `|φ_n(U)| / sup|φ_n|` over retained pairs.
    pub boundary_residual_max: f64,
    pub spps_terms: usize,
    pub eigenpairs_found: usize,
    pub root_warnings: Vec<String>,
}

/// Price, Greeks and diagnostics for one contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricingResult {
    pub price: f64,
    pub delta: Option<f64>,
    pub vega: Option<f64>,
    pub theta: Option<f64>,
    pub n_used: usize,
    pub m_used: usize,
    pub contributions: Option<ContributionReport>,
    pub diagnostics: Diagnostics,
}
