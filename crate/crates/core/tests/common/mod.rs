//! Published reference values and shared fixtures for the integration tests.
#![allow(dead_code)]

use nsbf_core::config::NumericsConfig;
use nsbf_core::{EjdcevParams, SpectralModel};

pub const LOWER: f64 = 90.0;
pub const UPPER: f64 = 120.0;
pub const SPOT: f64 = 100.0;
pub const MEDIUM_T: f64 = 0.5;
pub const SHORT_T: f64 = 1.0 / 360.0;

#[derive(Debug, Clone, Copy)]
pub struct Quote {
    pub price: f64,
    pub delta: f64,
    pub vega: Option<f64>,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct QuoteRow {
    pub strike: f64,
    pub beta: f64,
    pub gamma: f64,
    pub call: Quote,
    pub put: Quote,
}

/// Half-year prices and Greeks, 4 decimals.
#[rustfmt::skip]
pub const MEDIUM_QUOTES: [QuoteRow; 36] = [
    QuoteRow { strike: 95.0, beta: 0.5, gamma: 0.0, call: Quote { price: 0.7314, delta: -0.0332, vega: Some(-26.5669), theta: 4.9860 }, put: Quote { price: 0.0029, delta: -0.0001, vega: Some(-0.1101), theta: 0.0201 } },
    QuoteRow { strike: 95.0, beta: 0.5, gamma: 1.0, call: Quote { price: 1.5057, delta: 0.0179, vega: Some(14.3442), theta: 6.5544 }, put: Quote { price: 0.0168, delta: 0.0002, vega: Some(0.1364), theta: 0.0744 } },
    QuoteRow { strike: 95.0, beta: 0.5, gamma: 2.0, call: Quote { price: 1.5572, delta: 0.0417, vega: Some(33.3312), theta: 6.3003 }, put: Quote { price: 0.0222, delta: 0.0006, vega: Some(0.4438), theta: 0.0912 } },
    QuoteRow { strike: 95.0, beta: 0.0, gamma: 0.0, call: Quote { price: 0.7163, delta: -0.0319, vega: None, theta: 5.0712 }, put: Quote { price: 0.0023, delta: -0.0001, vega: None, theta: 0.0166 } },
    QuoteRow { strike: 95.0, beta: 0.0, gamma: 1.0, call: Quote { price: 1.6417, delta: 0.0251, vega: None, theta: 7.0686 }, put: Quote { price: 0.0148, delta: 0.0002, vega: None, theta: 0.0652 } },
    QuoteRow { strike: 95.0, beta: 0.0, gamma: 2.0, call: Quote { price: 1.7117, delta: 0.0518, vega: None, theta: 6.7849 }, put: Quote { price: 0.0198, delta: 0.0006, vega: None, theta: 0.0802 } },
    QuoteRow { strike: 95.0, beta: -1.0, gamma: 0.0, call: Quote { price: 0.6905, delta: -0.0300, vega: Some(12.0097), theta: 5.2996 }, put: Quote { price: 0.0014, delta: -0.0001, vega: Some(0.0263), theta: 0.0111 } },
    QuoteRow { strike: 95.0, beta: -1.0, gamma: 1.0, call: Quote { price: 1.9733, delta: 0.0432, vega: Some(-17.2851), theta: 8.2401 }, put: Quote { price: 0.0114, delta: 0.0002, vega: Some(-0.0865), theta: 0.0496 } },
    QuoteRow { strike: 95.0, beta: -1.0, gamma: 2.0, call: Quote { price: 2.0860, delta: 0.0771, vega: Some(-30.8585), theta: 7.8538 }, put: Quote { price: 0.0157, delta: 0.0005, vega: Some(-0.2135), theta: 0.0615 } },
    QuoteRow { strike: 95.0, beta: -2.0, gamma: 0.0, call: Quote { price: 0.6421, delta: -0.0280, vega: Some(5.5973), theta: 5.3842 }, put: Quote { price: 0.0008, delta: 0.0000, vega: Some(0.0078), theta: 0.0071 } },
    QuoteRow { strike: 95.0, beta: -2.0, gamma: 1.0, call: Quote { price: 2.3959, delta: 0.0675, vega: Some(-13.5059), theta: 9.5993 }, put: Quote { price: 0.0087, delta: 0.0002, vega: Some(-0.0419), theta: 0.0375 } },
    QuoteRow { strike: 95.0, beta: -2.0, gamma: 2.0, call: Quote { price: 2.5570, delta: 0.1107, vega: Some(-22.1395), theta: 9.0265 }, put: Quote { price: 0.0123, delta: 0.0005, vega: Some(-0.0964), theta: 0.0469 } },
    QuoteRow { strike: 100.0, beta: 0.5, gamma: 0.0, call: Quote { price: 0.4568, delta: -0.0207, vega: Some(-16.5434), theta: 3.1114 }, put: Quote { price: 0.0270, delta: -0.0013, vega: Some(-1.0175), theta: 0.1860 } },
    QuoteRow { strike: 100.0, beta: 0.5, gamma: 1.0, call: Quote { price: 0.8695, delta: 0.0105, vega: Some(8.4109), theta: 3.7784 }, put: Quote { price: 0.1307, delta: 0.0014, vega: Some(1.0802), theta: 0.5772 } },
    QuoteRow { strike: 100.0, beta: 0.5, gamma: 2.0, call: Quote { price: 0.8778, delta: 0.0237, vega: Some(18.9282), theta: 3.5444 }, put: Quote { price: 0.1655, delta: 0.0042, vega: Some(3.3387), theta: 0.6801 } },
    QuoteRow { strike: 100.0, beta: 0.0, gamma: 0.0, call: Quote { price: 0.4561, delta: -0.0202, vega: None, theta: 3.2256 }, put: Quote { price: 0.0218, delta: -0.0010, vega: None, theta: 0.1563 } },
    QuoteRow { strike: 100.0, beta: 0.0, gamma: 1.0, call: Quote { price: 0.9700, delta: 0.0150, vega: None, theta: 4.1676 }, put: Quote { price: 0.1181, delta: 0.0016, vega: None, theta: 0.5189 } },
    QuoteRow { strike: 100.0, beta: 0.0, gamma: 2.0, call: Quote { price: 0.9881, delta: 0.0301, vega: None, theta: 3.9064 }, put: Quote { price: 0.1517, delta: 0.0043, vega: None, theta: 0.6143 } },
    QuoteRow { strike: 100.0, beta: -1.0, gamma: 0.0, call: Quote { price: 0.4571, delta: -0.0198, vega: Some(7.9187), theta: 3.5041 }, put: Quote { price: 0.0137, delta: -0.0006, vega: Some(0.2535), theta: 0.1071 } },
    QuoteRow { strike: 100.0, beta: -1.0, gamma: 1.0, call: Quote { price: 1.2159, delta: 0.0269, vega: Some(-10.7784), theta: 5.0594 }, put: Quote { price: 0.0962, delta: 0.0018, vega: Some(-0.7382), theta: 0.4167 } },
    QuoteRow { strike: 100.0, beta: -1.0, gamma: 2.0, call: Quote { price: 1.2574, delta: 0.0469, vega: Some(-18.7457), theta: 4.7137 }, put: Quote { price: 0.1272, delta: 0.0044, vega: Some(-1.7458), theta: 0.4979 } },
    QuoteRow { strike: 100.0, beta: -2.0, gamma: 0.0, call: Quote { price: 0.4385, delta: -0.0190, vega: Some(3.8045), theta: 3.6716 }, put: Quote { price: 0.0082, delta: -0.0004, vega: Some(0.0781), theta: 0.0709 } },
    QuoteRow { strike: 100.0, beta: -2.0, gamma: 1.0, call: Quote { price: 1.5313, delta: 0.0437, vega: Some(-8.7342), theta: 6.1011 }, put: Quote { price: 0.0779, delta: 0.0019, vega: Some(-0.3774), theta: 0.3328 } },
    QuoteRow { strike: 100.0, beta: -2.0, gamma: 2.0, call: Quote { price: 1.6006, delta: 0.0699, vega: Some(-13.9770), theta: 5.6109 }, put: Quote { price: 0.1059, delta: 0.0042, vega: Some(-0.8350), theta: 0.4012 } },
    QuoteRow { strike: 105.0, beta: 0.5, gamma: 0.0, call: Quote { price: 0.2314, delta: -0.0104, vega: Some(-8.3529), theta: 1.5750 }, put: Quote { price: 0.1004, delta: -0.0047, vega: Some(-3.7580), theta: 0.6899 } },
    QuoteRow { strike: 105.0, beta: 0.5, gamma: 1.0, call: Quote { price: 0.4019, delta: 0.0049, vega: Some(3.9499), theta: 1.7435 }, put: Quote { price: 0.4133, delta: 0.0044, vega: Some(3.4963), theta: 1.8212 } },
    QuoteRow { strike: 105.0, beta: 0.5, gamma: 2.0, call: Quote { price: 0.3948, delta: 0.0107, vega: Some(8.5777), theta: 1.5909 }, put: Quote { price: 0.5054, delta: 0.0129, vega: Some(10.2860), theta: 2.0713 } },
    QuoteRow { strike: 105.0, beta: 0.0, gamma: 0.0, call: Quote { price: 0.2373, delta: -0.0105, vega: None, theta: 1.6764 }, put: Quote { price: 0.0828, delta: -0.0038, vega: None, theta: 0.5924 } },
    QuoteRow { strike: 105.0, beta: 0.0, gamma: 1.0, call: Quote { price: 0.4611, delta: 0.0073, vega: None, theta: 1.9763 }, put: Quote { price: 0.3842, delta: 0.0053, vega: None, theta: 1.6823 } },
    QuoteRow { strike: 105.0, beta: 0.0, gamma: 2.0, call: Quote { price: 0.4570, delta: 0.0140, vega: None, theta: 1.8016 }, put: Quote { price: 0.4762, delta: 0.0137, vega: None, theta: 1.9220 } },
    QuoteRow { strike: 105.0, beta: -1.0, gamma: 0.0, call: Quote { price: 0.2522, delta: -0.0109, vega: Some(4.3457), theta: 1.9300 }, put: Quote { price: 0.0544, delta: -0.0025, vega: Some(0.9987), theta: 0.4244 } },
    QuoteRow { strike: 105.0, beta: -1.0, gamma: 1.0, call: Quote { price: 0.6092, delta: 0.0137, vega: Some(-5.4756), theta: 2.5241 }, put: Quote { price: 0.3317, delta: 0.0065, vega: Some(-2.5939), theta: 1.4293 } },
    QuoteRow { strike: 105.0, beta: -1.0, gamma: 2.0, call: Quote { price: 0.6129, delta: 0.0230, vega: Some(-9.2182), theta: 2.2859 }, put: Quote { price: 0.4227, delta: 0.0147, vega: Some(-5.8633), theta: 1.6465 } },
    QuoteRow { strike: 105.0, beta: -2.0, gamma: 0.0, call: Quote { price: 0.2536, delta: -0.0109, vega: Some(2.1851), theta: 2.1184 }, put: Quote { price: 0.0342, delta: -0.0016, vega: Some(0.3217), theta: 0.2940 } },
    QuoteRow { strike: 105.0, beta: -2.0, gamma: 1.0, call: Quote { price: 0.8049, delta: 0.0233, vega: Some(-4.6594), theta: 3.1840 }, put: Quote { price: 0.2853, delta: 0.0070, vega: Some(-1.4099), theta: 1.2092 } },
    QuoteRow { strike: 105.0, beta: -2.0, gamma: 2.0, call: Quote { price: 0.8184, delta: 0.0361, vega: Some(-7.2223), theta: 2.8436 }, put: Quote { price: 0.3736, delta: 0.0149, vega: Some(-2.9815), theta: 1.4039 } },
];

pub type EigenvalueRow = (f64, f64, [(usize, f64); 9]);

/// `(β, γ, [(n, λ_n)])`, 4 decimals.
#[rustfmt::skip]
pub const SHORT_EIGENVALUES: [EigenvalueRow; 4] = [
    (1.0, 1.0, [(1, 4.4047), (6, 144.3068), (11, 484.0679), (16, 1023.6885), (21, 1763.1687), (26, 2702.5083), (31, 3841.7073), (36, 5180.7659), (41, 6719.684)]),
    (1.0, 2.0, [(1, 4.1314), (6, 144.0338), (11, 483.7949), (16, 1023.4155), (21, 1762.8956), (26, 2702.2352), (31, 3841.4343), (36, 5180.4929), (41, 6719.411)]),
    (-2.0, 1.0, [(1, 4.0997), (6, 112.8959), (11, 377.105), (16, 796.731), (21, 1371.7741), (26, 2102.2343), (31, 2988.1115), (36, 4029.4057), (41, 5226.117)]),
    (-2.0, 2.0, [(1, 3.6155), (6, 112.4098), (11, 376.6189), (16, 796.2449), (21, 1371.288), (26, 2101.7481), (31, 2987.6253), (36, 4028.9196), (41, 5225.6309)]),
];

/// One-day call prices `(β, γ, price)`, 5 decimals.
#[rustfmt::skip]
pub const ONE_DAY_PRICES: [(f64, f64, f64); 8] = [
    (-2.0, 3.0, 0.54297), (-2.0, 2.0, 0.54622), (-2.0, 1.0, 0.55950), (-2.0, 0.0, 0.61518),
    (1.0, 3.0, 0.54300), (1.0, 2.0, 0.54634), (1.0, 1.0, 0.55976), (1.0, 0.0, 0.61516),
];

/// Bands `1-5, 6-10, ..., 41-45, >45`.
pub const ONE_DAY_BAND_LIMITS: [(usize, Option<usize>); 10] = [
    (1, Some(5)),
    (6, Some(10)),
    (11, Some(15)),
    (16, Some(20)),
    (21, Some(25)),
    (26, Some(30)),
    (31, Some(35)),
    (36, Some(40)),
    (41, Some(45)),
    (46, None),
];

/// One-day contributions `(β, γ, bands, price)`, 5 decimals.
#[rustfmt::skip]
pub const ONE_DAY_BANDS: [(f64, f64, [f64; 10], f64); 4] = [
    (-2.0, 2.0, [-0.94494, 1.81670, -0.23014, -0.10622, 0.00934, 0.00157, -0.00010, -0.00001, 0.0, 0.0], 0.54622),
    (-2.0, 1.0, [-1.60020, 2.60534, -0.31208, -0.14909, 0.01343, 0.00224, -0.00014, -0.00001, 0.0, 0.0], 0.55950),
    (1.0, 2.0, [1.54180, -1.15441, 0.19023, -0.03420, 0.00311, -0.00021, 0.00001, 0.0, 0.0, 0.0], 0.54634),
    (1.0, 1.0, [1.77004, -1.41771, 0.24668, -0.04298, 0.00400, -0.00026, 0.00001, 0.0, 0.0, 0.0], 0.55976),
];

pub fn medium(beta: f64, gamma: f64, derivatives: bool) -> SpectralModel {
    let spec = EjdcevParams::reference(beta, gamma).spec();
    SpectralModel::build(&spec, LOWER, UPPER, &NumericsConfig::default(), derivatives).expect("medium model")
}

pub fn short(beta: f64, gamma: f64, derivatives: bool) -> SpectralModel {
    let spec = EjdcevParams::reference(beta, gamma).spec();
    SpectralModel::build(&spec, LOWER, UPPER, &NumericsConfig::short_horizon(), derivatives).expect("short model")
}
