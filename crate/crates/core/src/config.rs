//! Run configuration with named presets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::FdGrid;
use crate::mesh::DEFAULT_POINTS;
use crate::model::{DiffusionSpec, EjdcevParams};
use crate::nsbf::NsbfSettings;
use crate::pricing::{OptionContract, OptionStyle, DEFAULT_LAMBDA_CUTOFF};
use crate::spectrum::RootGrid;
use crate::spps::SppsSettings;

/// EJDCEV parameters; `delta` is calibrated from `sigma0` when absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EjdcevConfig {
    pub beta: f64,
    pub gamma: f64,
    #[serde(default = "defaults::sigma0")]
    pub sigma0: f64,
    #[serde(default = "defaults::y0")]
    pub y0: f64,
    #[serde(default = "defaults::b")]
    pub b: f64,
    #[serde(default = "defaults::c")]
    pub c: f64,
    #[serde(default = "defaults::rbar")]
    pub rbar: f64,
    #[serde(default)]
    pub qbar: f64,
    #[serde(default)]
    pub delta: Option<f64>,
}

mod defaults {
    pub fn sigma0() -> f64 {
        0.25
    }
    pub fn y0() -> f64 {
        100.0
    }
    pub fn b() -> f64 {
        0.02
    }
    pub fn c() -> f64 {
        0.5
    }
    pub fn rbar() -> f64 {
        0.1
    }
}

impl EjdcevConfig {
    pub fn reference(beta: f64, gamma: f64) -> Self {
        Self { beta, gamma, sigma0: 0.25, y0: 100.0, b: 0.02, c: 0.5, rbar: 0.1, qbar: 0.0, delta: None }
    }

    pub fn params(&self) -> EjdcevParams {
        let mut p = EjdcevParams::calibrated(self.beta, self.gamma, self.sigma0, self.y0, self.b, self.c, self.rbar, self.qbar);
        if let Some(d) = self.delta {
            p.delta = d;
        }
        p
    }
}

/// Diffusion selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelConfig {
    Ejdcev(EjdcevConfig),
    /// Constant-coefficient test case: `σ = δ/y` with zero rates and hazard,
    /// so the eigenfunctions are pure sines in `l`.
    Heat {
        delta: f64,
        y0: f64,
    },
}

impl ModelConfig {
    pub fn spec(&self) -> DiffusionSpec {
        match self {
            ModelConfig::Ejdcev(e) => e.params().spec(),
            ModelConfig::Heat { delta, .. } => {
                let d = *delta;
                DiffusionSpec::with_constant_rates(move |y| d / y, 0.0, 0.0, 0.0).with_sigma_prime(move |y| -d / (y * y))
            }
        }
    }

    pub fn spot(&self) -> f64 {
        match self {
            ModelConfig::Ejdcev(e) => e.y0,
            ModelConfig::Heat { y0, .. } => *y0,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ModelConfig::Ejdcev(e) => e.params().validate(),
            ModelConfig::Heat { delta, y0 } => {
                if !(*delta > 0.0) {
                    return Err(Error::config("model.delta", "must be positive"));
                }
                if !(*y0 > 0.0) {
                    return Err(Error::config("model.y0", "must be positive"));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractConfig {
    pub style: OptionStyle,
    pub strike: f64,
    pub lower: f64,
    pub upper: f64,
    pub maturity: f64,
    #[serde(default)]
    pub rebate: f64,
}

impl ContractConfig {
    pub fn contract(&self) -> OptionContract {
        OptionContract::new(self.style, self.strike, self.lower, self.upper, self.maturity).with_rebate(self.rebate)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lower > 0.0) {
            return Err(Error::config("contract.lower", "must be positive"));
        }
        if !(self.upper > self.lower) {
            return Err(Error::config("contract.upper", format!("must exceed contract.lower ({})", self.lower)));
        }
        if !(self.strike > self.lower && self.strike < self.upper) {
            return Err(Error::config("contract.strike", "must lie strictly between the barriers"));
        }
        if !(self.maturity > 0.0 && self.maturity.is_finite()) {
            return Err(Error::config("contract.maturity", "must be positive"));
        }
        if !(self.rebate >= 0.0 && self.rebate.is_finite()) {
            return Err(Error::config("contract.rebate", "must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub mesh_points: usize,
    pub nsbf_order: usize,
    pub neighborhood_fraction: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_grid: usize,
    pub refine_tol: f64,
    pub lambda_cutoff: f64,
    pub spps_tol: f64,
    pub spps_max_terms: usize,
    pub surface_t: usize,
    pub surface_y: usize,
    pub fd: FdGrid,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        let spps = SppsSettings::default();
        let nsbf = NsbfSettings::default();
        Self {
            mesh_points: DEFAULT_POINTS,
            nsbf_order: nsbf.max_order,
            neighborhood_fraction: nsbf.neighborhood_fraction,
            omega_min: RootGrid::MEDIUM.omega_lo,
            omega_max: RootGrid::MEDIUM.omega_hi,
            omega_grid: RootGrid::MEDIUM.count,
            refine_tol: 1e-12,
            lambda_cutoff: DEFAULT_LAMBDA_CUTOFF,
            spps_tol: spps.tol,
            spps_max_terms: spps.max_terms,
            surface_t: 101,
            surface_y: 101,
            fd: FdGrid::default(),
        }
    }
}

impl NumericsConfig {
    pub fn short_horizon() -> Self {
        Self {
            omega_min: RootGrid::SHORT.omega_lo,
            omega_max: RootGrid::SHORT.omega_hi,
            omega_grid: RootGrid::SHORT.count,
            ..Self::default()
        }
    }

    pub fn root_grid(&self) -> RootGrid {
        RootGrid { omega_lo: self.omega_min, omega_hi: self.omega_max, count: self.omega_grid }
    }

    pub fn nsbf_settings(&self, with_derivatives: bool) -> NsbfSettings {
        NsbfSettings { max_order: self.nsbf_order, neighborhood_fraction: self.neighborhood_fraction, with_derivatives }
    }

    pub fn spps_settings(&self) -> SppsSettings {
        SppsSettings { tol: self.spps_tol, max_terms: self.spps_max_terms }
    }

    fn validate(&self) -> Result<()> {
        if self.mesh_points < 6 || self.mesh_points % 5 != 1 {
            return Err(Error::config("numerics.mesh_points", "need at least 6 points and mesh_points % 5 == 1"));
        }
        if self.nsbf_order < 1 {
            return Err(Error::config("numerics.nsbf_order", "must be at least 1"));
        }
        if !(self.omega_min >= 0.0 && self.omega_max > self.omega_min) {
            return Err(Error::config("numerics.omega_max", "need 0 <= omega_min < omega_max"));
        }
        if self.omega_grid < 2 {
            return Err(Error::config("numerics.omega_grid", "must be at least 2"));
        }
        if !(self.lambda_cutoff > 0.0) {
            return Err(Error::config("numerics.lambda_cutoff", "must be positive"));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::config("numerics.refine_tol", "must be positive"));
        }
        if !(self.neighborhood_fraction > 0.0 && self.neighborhood_fraction < 1.0) {
            return Err(Error::config("numerics.neighborhood_fraction", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: OutputFormat,
    pub path: Option<String>,
}

/// Contribution band `from..=to`; an absent `to` runs to the last retained pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSpec {
    pub from: usize,
    #[serde(default)]
    pub to: Option<usize>,
}

impl BandSpec {
    pub fn label(&self) -> String {
        match self.to {
            Some(t) => format!("{}-{}", self.from, t),
            None => format!(">{}", self.from - 1),
        }
    }
}

/// Cross-product sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub strikes: Vec<f64>,
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
    #[serde(default = "default_styles")]
    pub styles: Vec<OptionStyle>,
    #[serde(default)]
    pub greeks: bool,
    #[serde(default)]
    pub bands: Vec<BandSpec>,
    #[serde(default = "default_decimals")]
    pub decimals: usize,
}

fn default_styles() -> Vec<OptionStyle> {
    vec![OptionStyle::Call]
}

fn default_decimals() -> usize {
    4
}

impl SweepConfig {
    fn validate(&self) -> Result<()> {
        for (field, v) in [("sweep.strikes", &self.strikes), ("sweep.betas", &self.betas), ("sweep.gammas", &self.gammas)] {
            if v.is_empty() {
                return Err(Error::config(field, "must not be empty"));
            }
        }
        if self.styles.is_empty() {
            return Err(Error::config("sweep.styles", "must not be empty"));
        }
        for b in &self.bands {
            if b.from == 0 || b.to.is_some_and(|t| t < b.from) {
                return Err(Error::config("sweep.bands", format!("invalid band {}", b.label())));
            }
        }
        Ok(())
    }
}

/// Full run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub contract: ContractConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

/// Names accepted by [`RunConfig::preset`].
pub const PRESETS: [&str; 2] = ["table1-medium", "table3-short"];

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::config("<json>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Built-in parameter sets.
    ///
    /// `table1-medium`: half-year calls and puts, strikes 95/100/105,
    /// `β ∈ {0.5, 0, −1, −2}`, `γ ∈ {0, 1, 2}`, root window `(0, 15)` with 100 points.
    /// `table3-short`: one-day calls at strike 100, `β ∈ {−2, 1}`,
    /// `γ ∈ {3, 2, 1, 0}`, root window `(0, 100)` with 1000 points and
    /// contribution bands of width five.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "table1-medium" => Ok(Self {
                model: ModelConfig::Ejdcev(EjdcevConfig::reference(-1.0, 2.0)),
                contract: ContractConfig { style: OptionStyle::Call, strike: 100.0, lower: 90.0, upper: 120.0, maturity: 0.5, rebate: 0.0 },
                numerics: NumericsConfig::default(),
                output: OutputConfig::default(),
                sweep: Some(SweepConfig {
                    strikes: vec![95.0, 100.0, 105.0],
                    betas: vec![0.5, 0.0, -1.0, -2.0],
                    gammas: vec![0.0, 1.0, 2.0],
                    styles: vec![OptionStyle::Call, OptionStyle::Put],
                    greeks: true,
                    bands: Vec::new(),
                    decimals: 4,
                }),
            }),
            "table3-short" => {
                let mut bands: Vec<BandSpec> = (0..9).map(|k| BandSpec { from: 5 * k + 1, to: Some(5 * k + 5) }).collect();
                bands.push(BandSpec { from: 46, to: None });
                Ok(Self {
                    model: ModelConfig::Ejdcev(EjdcevConfig::reference(1.0, 3.0)),
                    contract: ContractConfig {
                        style: OptionStyle::Call,
                        strike: 100.0,
                        lower: 90.0,
                        upper: 120.0,
                        maturity: 1.0 / 360.0,
                        rebate: 0.0,
                    },
                    numerics: NumericsConfig::short_horizon(),
                    output: OutputConfig::default(),
                    sweep: Some(SweepConfig {
                        strikes: vec![100.0],
                        betas: vec![-2.0, 1.0],
                        gammas: vec![3.0, 2.0, 1.0, 0.0],
                        styles: vec![OptionStyle::Call],
                        greeks: false,
                        bands,
                        decimals: 5,
                    }),
                })
            }
            other => Err(Error::config("preset", format!("unknown preset `{other}`; expected one of {PRESETS:?}"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.contract.validate()?;
        self.numerics.validate()?;
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        let y0 = self.model.spot();
        if !(y0 > self.contract.lower && y0 < self.contract.upper) {
            return Err(Error::config("model.y0", "spot must lie strictly between the barriers"));
        }
        Ok(())
    }
}
