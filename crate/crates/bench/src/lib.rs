//! Shared fixtures for the benchmarks.

use nsbf_core::config::NumericsConfig;
use nsbf_core::{EjdcevParams, Mesh, SlCoefficients, SpectralModel};

pub const LOWER: f64 = 90.0;
pub const UPPER: f64 = 120.0;

pub fn coefficients(beta: f64, gamma: f64, points: usize) -> SlCoefficients {
    let mesh = Mesh::new(LOWER, UPPER, points).expect("valid mesh");
    SlCoefficients::build(&EjdcevParams::reference(beta, gamma).spec(), &mesh).expect("valid model")
}

pub fn medium_model(beta: f64, gamma: f64, derivatives: bool) -> SpectralModel {
    let spec = EjdcevParams::reference(beta, gamma).spec();
    SpectralModel::build(&spec, LOWER, UPPER, &NumericsConfig::default(), derivatives).expect("model builds")
}
