//! End-to-end pricing runs: coefficients, spectrum, expansion, sweeps.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{BandSpec, EjdcevConfig, ModelConfig, NumericsConfig, RunConfig};
use crate::error::{Error, Result};
use crate::fd::{solve_pde, FdGrid};
use crate::mesh::Mesh;
use crate::model::{DiffusionSpec, SlCoefficients};
use crate::nsbf::{compute, NsbfCoefficients};
use crate::pricing::{
    contract_coefficients, contribution, delta, price_with_rebate, retained_count, theta, value, value_surface, vega, Band,
    ContributionReport, Diagnostics, OptionContract, OptionStyle, PricingResult, ValueSurface,
};
use crate::spectrum::{build_eigenpairs, find_eigenvalues, EigenPair, RootSearch};
use crate::spps::{solve_particular, ParticularSolution};

/// Everything derived from a model on `[L, U]`, independent of the payoff.
#[derive(Debug, Clone)]
pub struct SpectralModel {
    pub spec: DiffusionSpec,
    pub sl: SlCoefficients,
    pub solution: ParticularSolution,
    pub coeffs: NsbfCoefficients,
    pub roots: RootSearch,
    /// Eigenpairs for every root in the search window.
    pub pairs: Vec<EigenPair>,
}

impl SpectralModel {
    pub fn build(spec: &DiffusionSpec, lower: f64, upper: f64, numerics: &NumericsConfig, derivatives: bool) -> Result<Self> {
        let mesh = Mesh::new(lower, upper, numerics.mesh_points).map_err(|e| e.in_stage("mesh"))?;
        let sl = SlCoefficients::build(spec, &mesh).map_err(|e| e.in_stage("model"))?;
        Self::from_coefficients(spec, sl, numerics, derivatives)
    }

    /// Same as [`SpectralModel::build`] with precomputed coefficients.
    pub fn from_coefficients(spec: &DiffusionSpec, sl: SlCoefficients, numerics: &NumericsConfig, derivatives: bool) -> Result<Self> {
        let s = numerics.spps_settings();
        let solution = solve_particular(&sl, s.tol, s.max_terms).map_err(|e| e.in_stage("spps"))?;
        let coeffs = compute(&solution, &sl, &numerics.nsbf_settings(derivatives)).map_err(|e| e.in_stage("nsbf"))?;
        let roots = find_eigenvalues(&coeffs, &sl, &numerics.root_grid(), numerics.refine_tol).map_err(|e| e.in_stage("spectrum"))?;
        let pairs = build_eigenpairs(&roots.omegas, &coeffs, &sl, derivatives).map_err(|e| e.in_stage("spectrum"))?;
        Ok(Self { spec: spec.clone(), sl, solution, coeffs, roots, pairs })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        self.sl.mesh()
    }

    /// Leading pairs kept by the `λ · horizon ≤ cutoff` rule.
    pub fn retained(&self, horizon: f64, cutoff: f64) -> &[EigenPair] {
        &self.pairs[..retained_count(&self.pairs, horizon, cutoff)]
    }

    /// Copy of the retained pairs with Fourier coefficients of `contract` set.
    pub fn expansion(&self, contract: &OptionContract, cutoff: f64) -> Result<Vec<EigenPair>> {
        let mut pairs = self.retained(contract.maturity, cutoff).to_vec();
        contract_coefficients(contract, &mut pairs, &self.sl)?;
        Ok(pairs)
    }

    pub fn boundary_residual_max(&self, pairs: &[EigenPair]) -> f64 {
        pairs.iter().map(|p| p.phi.last().abs() / p.phi.sup_norm()).fold(0.0, f64::max)
    }

    pub fn diagnostics(&self, pairs: &[EigenPair]) -> Diagnostics {
        Diagnostics {
            identity_residuals: self.coeffs.check.sup(),
            boundary_residual_max: self.boundary_residual_max(pairs),
            spps_terms: self.solution.series_order,
            eigenpairs_found: self.pairs.len(),
            root_warnings: self.roots.warnings.clone(),
        }
    }

    /// Prices one contract at spot `y0`, with Greeks when requested.
    pub fn price(&self, contract: &OptionContract, y0: f64, greeks: bool, cutoff: f64, bands: &[BandSpec]) -> Result<PricingResult> {
        contract.validate()?;
        let pairs = self.expansion(contract, cutoff).map_err(|e| e.in_stage("pricing"))?;
        let t = contract.maturity;
        let (price, d, th) = if contract.rebate > 0.0 {
            let r = price_with_rebate(contract, &pairs, &self.sl, &self.spec, &self.solution)?;
            let price = r.value(y0, 0.0, &pairs)?;
            if greeks {
                (price, Some(r.delta(y0, &pairs)?), Some(r.theta(y0, &pairs)?))
            } else {
                (price, None, None)
            }
        } else {
            let price = value(y0, 0.0, &pairs, t)?;
            if greeks {
                (price, Some(delta(y0, &pairs, t)?), Some(theta(y0, &pairs, t)?))
            } else {
                (price, None, None)
            }
        };
        let v = match d {
            Some(d) => match vega(y0, d, &self.spec) {
                Ok(v) => Some(v),
                Err(Error::VegaUndefined) => None,
                Err(e) => return Err(e),
            },
            None => None,
        };
        let contributions = if bands.is_empty() {
            None
        } else {
            let mut out = Vec::with_capacity(bands.len());
            for b in bands {
                let n2 = b.to.unwrap_or(pairs.len());
                let value = if b.to.is_none() && b.from > pairs.len() { 0.0 } else { contribution(b.from, n2, &pairs, y0, 0.0, t)? };
                out.push(Band { n1: b.from, n2, value });
            }
            Some(ContributionReport { bands: out })
        };
        Ok(PricingResult {
            price,
            delta: d,
            vega: v,
            theta: th,
            n_used: pairs.len(),
            m_used: self.coeffs.m_trunc,
            contributions,
            diagnostics: self.diagnostics(&pairs),
        })
    }

    pub fn surface(&self, contract: &OptionContract, cutoff: f64, t_count: usize, y_count: usize) -> Result<ValueSurface> {
        let pairs = self.expansion(contract, cutoff)?;
        value_surface(&pairs, contract.maturity, t_count, y_count)
    }
}

fn model_of(cfg: &RunConfig) -> Result<SpectralModel> {
    SpectralModel::build(&cfg.model.spec(), cfg.contract.lower, cfg.contract.upper, &cfg.numerics, true)
}

/// Price only, skipping the derivative coefficients and eigenfunction derivatives.
pub fn run_price(cfg: &RunConfig) -> Result<PricingResult> {
    cfg.validate()?;
    let m = SpectralModel::build(&cfg.model.spec(), cfg.contract.lower, cfg.contract.upper, &cfg.numerics, false)?;
    m.price(&cfg.contract.contract(), cfg.model.spot(), false, cfg.numerics.lambda_cutoff, &[])
}

/// Price with Delta, Vega and Theta.
pub fn run_greeks(cfg: &RunConfig) -> Result<PricingResult> {
    cfg.validate()?;
    let bands = cfg.sweep.as_ref().map(|s| s.bands.clone()).unwrap_or_default();
    model_of(cfg)?.price(&cfg.contract.contract(), cfg.model.spot(), true, cfg.numerics.lambda_cutoff, &bands)
}

/// Value surface over `[0, T] × [L, U]`.
pub fn run_surface(cfg: &RunConfig) -> Result<ValueSurface> {
    cfg.validate()?;
    let m = SpectralModel::build(&cfg.model.spec(), cfg.contract.lower, cfg.contract.upper, &cfg.numerics, false)?;
    m.surface(&cfg.contract.contract(), cfg.numerics.lambda_cutoff, cfg.numerics.surface_t, cfg.numerics.surface_y)
}

/// One eigenvalue line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n: usize,
    pub omega: f64,
    pub lambda: f64,
    pub norm_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub rows: Vec<SpectrumRow>,
    pub m_used: usize,
    pub warnings: Vec<String>,
}

pub fn run_spectrum(cfg: &RunConfig) -> Result<SpectrumReport> {
    cfg.validate()?;
    let m = SpectralModel::build(&cfg.model.spec(), cfg.contract.lower, cfg.contract.upper, &cfg.numerics, false)?;
    Ok(SpectrumReport {
        rows: m.pairs.iter().map(|p| SpectrumRow { n: p.n, omega: p.omega, lambda: p.lambda, norm_sq: p.norm_sq }).collect(),
        m_used: m.coeffs.m_trunc,
        warnings: m.roots.warnings.clone(),
    })
}

/// Contribution bands; defaults to width-five bands over all retained pairs.
pub fn run_contributions(cfg: &RunConfig) -> Result<PricingResult> {
    cfg.validate()?;
    let m = SpectralModel::build(&cfg.model.spec(), cfg.contract.lower, cfg.contract.upper, &cfg.numerics, false)?;
    let contract = cfg.contract.contract();
    let bands = match cfg.sweep.as_ref().map(|s| s.bands.clone()).filter(|b| !b.is_empty()) {
        Some(b) => b,
        None => {
            let n = m.retained(contract.maturity, cfg.numerics.lambda_cutoff).len();
            (0..n.div_ceil(5)).map(|k| BandSpec { from: 5 * k + 1, to: Some((5 * k + 5).min(n)) }).collect()
        }
    };
    m.price(&contract, cfg.model.spot(), false, cfg.numerics.lambda_cutoff, &bands)
}

/// Identity residual curves at the accepted truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientCheck {
    pub prices: Vec<f64>,
    /// `Σα`, `Σ(−1)^m α`, `Σβ`, `Σ(−1)^m β` residuals.
    pub residuals: Vec<Vec<f64>>,
    pub sup: Vec<f64>,
    pub m_used: usize,
}

pub fn run_check_coefficients(cfg: &RunConfig) -> Result<CoefficientCheck> {
    cfg.validate()?;
    let mesh = Mesh::new(cfg.contract.lower, cfg.contract.upper, cfg.numerics.mesh_points)?;
    let sl = SlCoefficients::build(&cfg.model.spec(), &mesh)?;
    let s = cfg.numerics.spps_settings();
    let sol = solve_particular(&sl, s.tol, s.max_terms).map_err(|e| e.in_stage("spps"))?;
    let k = compute(&sol, &sl, &cfg.numerics.nsbf_settings(true)).map_err(|e| e.in_stage("nsbf"))?;
    Ok(CoefficientCheck {
        prices: mesh.points().to_vec(),
        residuals: k.check.residuals.iter().map(|r| r.values().to_vec()).collect(),
        sup: k.check.sup(),
        m_used: k.m_trunc,
    })
}

/// Spectral and finite-difference prices side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub nsbf: f64,
    pub fd: f64,
    pub gap: f64,
    pub fd_grid: FdGrid,
}

pub fn run_oracle_compare(cfg: &RunConfig) -> Result<OracleComparison> {
    let r = run_price(cfg)?;
    let fd = solve_pde(&cfg.model.spec(), &cfg.contract.contract(), &cfg.numerics.fd).map_err(|e| e.in_stage("fd_oracle"))?;
    let f = fd.price_at(cfg.model.spot());
    Ok(OracleComparison { nsbf: r.price, fd: f, gap: (r.price - f).abs(), fd_grid: cfg.numerics.fd })
}

/// One `(K, β, γ)` line of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub strike: f64,
    pub beta: f64,
    pub gamma: f64,
    pub results: Vec<(OptionStyle, PricingResult)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableOutput {
    pub rows: Vec<TableRow>,
    pub decimals: usize,
    pub band_labels: Vec<String>,
    pub greeks: bool,
}

/// Runs the cross product of the sweep, models in parallel.
pub fn run_table(cfg: &RunConfig) -> Result<TableOutput> {
    cfg.validate()?;
    let sweep = cfg.sweep.clone().ok_or_else(|| Error::config("sweep", "table needs a sweep block"))?;
    let base = match &cfg.model {
        ModelConfig::Ejdcev(e) => *e,
        ModelConfig::Heat { .. } => return Err(Error::config("model.kind", "sweeps need an ejdcev model")),
    };
    let models: Vec<(f64, f64)> = sweep.betas.iter().flat_map(|&b| sweep.gammas.iter().map(move |&g| (b, g))).collect();
    let per_model: Vec<Vec<TableRow>> = models
        .par_iter()
        .map(|&(beta, gamma)| {
            let e = EjdcevConfig { beta, gamma, delta: None, ..base };
            let spec = ModelConfig::Ejdcev(e).spec();
            let m = SpectralModel::build(&spec, cfg.contract.lower, cfg.contract.upper, &cfg.numerics, sweep.greeks)?;
            sweep
                .strikes
                .iter()
                .map(|&k| {
                    let results = sweep
                        .styles
                        .iter()
                        .map(|&style| {
                            let c = crate::config::ContractConfig { style, strike: k, ..cfg.contract };
                            c.contract().validate()?;
                            let r = m.price(&c.contract(), e.y0, sweep.greeks, cfg.numerics.lambda_cutoff, &sweep.bands)?;
                            Ok((style, r))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(TableRow { strike: k, beta, gamma, results })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<TableRow> = per_model.into_iter().flatten().collect();
    let order = |x: &f64, list: &[f64]| list.iter().position(|v| v == x).unwrap_or(usize::MAX);
    rows.sort_by_key(|r| (order(&r.strike, &sweep.strikes), order(&r.beta, &sweep.betas), order(&r.gamma, &sweep.gammas)));
    Ok(TableOutput { rows, decimals: sweep.decimals, band_labels: sweep.bands.iter().map(BandSpec::label).collect(), greeks: sweep.greeks })
}

/// Fixed-point rendering without negative zero.
pub fn fmt_fixed(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

impl TableOutput {
    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["K".to_string(), "beta".to_string(), "gamma".to_string()];
        if let Some(first) = self.rows.first() {
            for (style, _) in &first.results {
                let s = match style {
                    OptionStyle::Call => "call",
                    OptionStyle::Put => "put",
                };
                h.push(format!("{s}_price"));
                if self.greeks {
                    for g in ["delta", "vega", "theta"] {
                        h.push(format!("{s}_{g}"));
                    }
                }
                for b in &self.band_labels {
                    h.push(format!("{s}_contrib_{b}"));
                }
            }
        }
        h
    }

    /// CSV rounded to the configured number of decimals; undefined vega is blank.
    pub fn to_csv(&self) -> String {
        let d = self.decimals;
        let mut out = self.header().join(",");
        out.push('\n');
        for r in &self.rows {
            let mut cells = vec![format!("{}", r.strike), format!("{}", r.beta), format!("{}", r.gamma)];
            for (_, p) in &r.results {
                cells.push(fmt_fixed(p.price, d));
                if self.greeks {
                    cells.push(p.delta.map(|v| fmt_fixed(v, d)).unwrap_or_default());
                    cells.push(p.vega.map(|v| fmt_fixed(v, d)).unwrap_or_default());
                    cells.push(p.theta.map(|v| fmt_fixed(v, d)).unwrap_or_default());
                }
                if let Some(c) = &p.contributions {
                    cells.extend(c.bands.iter().map(|b| fmt_fixed(b.value, d)));
                }
            }
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}
