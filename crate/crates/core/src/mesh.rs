//! Uniform mesh on `[L, U]` with composite six-point Newton-Cotes quadrature,
//! fourth-order differentiation and local quintic interpolation.
//!
//! Every function of the state variable is carried as a [`GridFunction`]
//! sampled on a shared [`Mesh`]. Cumulative integrals are exact for
//! polynomials of degree five on each panel of five subintervals, including
//! the interior nodes of a panel.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Panel weights (in units of `h / 1440`) integrating the quintic through
/// six equispaced nodes from node 0 to node `k`, `k = 1..=5`.
const PANEL_WEIGHTS: [[f64; 6]; 5] = [
    [475.0, 1427.0, -798.0, 482.0, -173.0, 27.0],
    [448.0, 2064.0, 224.0, 224.0, -96.0, 16.0],
    [459.0, 1971.0, 1026.0, 1026.0, -189.0, 27.0],
    [448.0, 2048.0, 768.0, 2048.0, 448.0, 0.0],
    [475.0, 1875.0, 1250.0, 1250.0, 1875.0, 475.0],
];

/// Default number of mesh points.
pub const DEFAULT_POINTS: usize = 10001;

/// Uniform discretization of `[lower, upper]`.
#[derive(Debug, Clone)]
pub struct Mesh {
    lower: f64,
    upper: f64,
    step: f64,
    points: Vec<f64>,
}

impl PartialEq for Mesh {
    fn eq(&self, other: &Self) -> bool {
        self.lower == other.lower && self.upper == other.upper && self.points.len() == other.points.len()
    }
}

impl Mesh {
    /// Builds the mesh. `count` must satisfy `count >= 6` and `count % 5 == 1`.
    pub fn new(lower: f64, upper: f64, count: usize) -> Result<Arc<Self>> {
        if !(lower.is_finite() && upper.is_finite() && lower > 0.0 && upper > lower) {
            return Err(Error::InvalidBounds { lower, upper });
        }
        if count < 6 || count % 5 != 1 {
            return Err(Error::InvalidCount(count));
        }
        Ok(Arc::new(Self::unchecked(lower, upper, count)))
    }

    /// Same as [`Mesh::new`] but allows `lower <= 0`, for test problems on `[0, 1]`.
    pub fn on_interval(lower: f64, upper: f64, count: usize) -> Result<Arc<Self>> {
        if !(lower.is_finite() && upper.is_finite() && upper > lower) {
            return Err(Error::InvalidBounds { lower, upper });
        }
        if count < 6 || count % 5 != 1 {
            return Err(Error::InvalidCount(count));
        }
        Ok(Arc::new(Self::unchecked(lower, upper, count)))
    }

    fn unchecked(lower: f64, upper: f64, count: usize) -> Self {
        let step = (upper - lower) / (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| lower + step * i as f64).collect();
        points[count - 1] = upper;
        Self { lower, upper, step, points }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn contains(&self, y: f64) -> bool {
        y >= self.lower && y <= self.upper
    }

    fn check_range(&self, y: f64) -> Result<()> {
        if self.contains(y) {
            Ok(())
        } else {
            Err(Error::OutOfRange { y, lower: self.lower, upper: self.upper })
        }
    }

    /// Index of the mesh node nearest to `y`.
    pub fn nearest_index(&self, y: f64) -> usize {
        let i = ((y - self.lower) / self.step).round();
        (i.max(0.0) as usize).min(self.len() - 1)
    }
}

/// Real function sampled on a mesh.
#[derive(Debug, Clone)]
pub struct GridFunction {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
}

impl GridFunction {
    /// Wraps sampled values, checking length and finiteness.
    pub fn new(mesh: &Arc<Mesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::LengthMismatch { expected: mesh.len(), got: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { mesh: Arc::clone(mesh), values })
    }

    pub(crate) fn from_vec(mesh: &Arc<Mesh>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), mesh.len());
        Self { mesh: Arc::clone(mesh), values }
    }

    pub fn from_fn(mesh: &Arc<Mesh>, f: impl Fn(f64) -> f64) -> Self {
        let values = mesh.points().iter().map(|&y| f(y)).collect();
        Self::from_vec(mesh, values)
    }

    pub fn constant(mesh: &Arc<Mesh>, c: f64) -> Self {
        Self::from_vec(mesh, vec![c; mesh.len()])
    }

    pub fn zeros(mesh: &Arc<Mesh>) -> Self {
        Self::constant(mesh, 0.0)
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_vec(&self.mesh, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination of two functions on the same mesh.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.same_mesh(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self::from_vec(&self.mesh, values))
    }

    pub(crate) fn same_mesh(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.mesh, &other.mesh) || *self.mesh == *other.mesh {
            Ok(())
        } else {
            Err(Error::MeshMismatch)
        }
    }

    /// Cumulative integral from the lower endpoint.
    pub fn antiderivative(&self) -> Self {
        Self::from_vec(&self.mesh, cumulative_integral(&self.values, self.mesh.step()))
    }

    /// Integral over the whole mesh.
    pub fn integral(&self) -> f64 {
        definite_integral(&self.values, self.mesh.step())
    }

    pub fn derivative(&self) -> Self {
        Self::from_vec(&self.mesh, differentiate(&self.values, self.mesh.step()))
    }

    /// Local quintic interpolation at `y`.
    pub fn interpolate(&self, y: f64) -> Result<f64> {
        self.mesh.check_range(y)?;
        Ok(interpolate_slice(&self.values, self.mesh.lower(), self.mesh.step(), y))
    }
}

/// `∫ g1 g2 w` over the mesh.
pub fn inner_product(g1: &GridFunction, g2: &GridFunction, w: &GridFunction) -> Result<f64> {
    g1.same_mesh(g2)?;
    g1.same_mesh(w)?;
    Ok(weighted_integral(g1.values(), g2.values(), w.values(), g1.mesh().step()))
}

pub(crate) fn weighted_integral(a: &[f64], b: &[f64], w: &[f64], step: f64) -> f64 {
    let prod: Vec<f64> = a.iter().zip(b).zip(w).map(|((x, y), z)| x * y * z).collect();
    definite_integral(&prod, step)
}

/// Cumulative composite six-point Newton-Cotes integral, zero at index 0.
///
/// `values.len()` must be `1 (mod 5)`.
pub fn cumulative_integral(values: &[f64], step: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 6 && n % 5 == 1, "cumulative_integral needs 5k+1 samples, got {n}");
    let scale = step / 1440.0;
    let mut out = vec![0.0; n];
    let mut base = 0.0;
    for start in (0..n - 1).step_by(5) {
        let f = &values[start..start + 6];
        for (k, weights) in PANEL_WEIGHTS.iter().enumerate() {
            let s: f64 = weights.iter().zip(f).map(|(w, v)| w * v).sum();
            out[start + k + 1] = base + scale * s;
        }
        base = out[start + 5];
    }
    out
}

/// Composite six-point Newton-Cotes integral over all samples.
pub fn definite_integral(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    assert!(n >= 6 && n % 5 == 1, "definite_integral needs 5k+1 samples, got {n}");
    let w = &PANEL_WEIGHTS[4];
    let mut total = 0.0;
    for start in (0..n - 1).step_by(5) {
        total += w.iter().zip(&values[start..start + 6]).map(|(a, b)| a * b).sum::<f64>();
    }
    total * step / 1440.0
}

/// Fourth-order finite-difference derivative.
pub fn differentiate(values: &[f64], step: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5, "differentiate needs at least 5 samples");
    let f = values;
    let d = 12.0 * step;
    let mut out = vec![0.0; n];
    for i in 2..n - 2 {
        out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / d;
    }
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / d;
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / d;
    let m = n - 1;
    out[m] = (25.0 * f[m] - 48.0 * f[m - 1] + 36.0 * f[m - 2] - 16.0 * f[m - 3] + 3.0 * f[m - 4]) / d;
    out[m - 1] = (3.0 * f[m] + 10.0 * f[m - 1] - 18.0 * f[m - 2] + 6.0 * f[m - 3] - f[m - 4]) / d;
    out
}

/// Lagrange quintic through the six nodes surrounding `y`.
/// Four-point Gauss-Legendre nodes and weights on `[-1, 1]`.
const GAUSS4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_86),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_86),
];

/// Correction to `definite_integral(f·g)` when `f` has a kink at `split`.
///
/// On the panel containing `split`, `g` is replaced by its interpolating
/// quintic and `f` by the exact callable, integrated separately on each side.
/// Returns the accurate panel integral minus the Newton-Cotes one.
pub(crate) fn split_panel_correction(f: &[f64], g: &[f64], lower: f64, step: f64, split: f64, exact: impl Fn(f64) -> f64) -> f64 {
    let n = g.len();
    let t = (split - lower) / step;
    if !(t > 0.0 && t < (n - 1) as f64) {
        return 0.0;
    }
    let start = ((t / 5.0).floor() as usize * 5).min(n - 6);
    let a = lower + step * start as f64;
    let b = a + 5.0 * step;
    if split <= a || split >= b {
        return 0.0;
    }
    let panel = &g[start..start + 6];
    let quintic = |y: f64| {
        let s = (y - a) / step;
        (0..6)
            .map(|j| {
                let basis: f64 = (0..6).filter(|&k| k != j).map(|k| (s - k as f64) / (j as f64 - k as f64)).product();
                basis * panel[j]
            })
            .sum::<f64>()
    };
    let gauss = |x0: f64, x1: f64| {
        let (mid, half) = (0.5 * (x0 + x1), 0.5 * (x1 - x0));
        GAUSS4.iter().map(|&(x, w)| w * exact(mid + half * x) * quintic(mid + half * x)).sum::<f64>() * half
    };
    let accurate = gauss(a, split) + gauss(split, b);
    let nc = PANEL_WEIGHTS[4].iter().zip(&f[start..start + 6]).zip(panel).map(|((w, x), y)| w * x * y).sum::<f64>() * step / 1440.0;
    accurate - nc
}

pub(crate) fn interpolate_slice(values: &[f64], lower: f64, step: f64, y: f64) -> f64 {
    let n = values.len();
    let t = (y - lower) / step;
    let i = (t.floor().max(0.0) as usize).min(n - 1);
    if (t - i as f64).abs() == 0.0 {
        return values[i];
    }
    let start = i.saturating_sub(2).min(n - 6);
    let mut sum = 0.0;
    for j in 0..6 {
        let xj = (start + j) as f64;
        let mut basis = 1.0;
        for k in 0..6 {
            if k != j {
                let xk = (start + k) as f64;
                basis *= (t - xk) / (xj - xk);
            }
        }
        sum += basis * values[start + j];
    }
    sum
}
