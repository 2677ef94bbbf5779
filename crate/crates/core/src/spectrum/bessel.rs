//! Spherical Bessel functions of the first kind by Miller's backward recursion.

/// `j_0(x) ..= j_{M}(x)` for one argument.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalBesselBlock {
    pub x: f64,
    pub values: Vec<f64>,
}

impl SphericalBesselBlock {
    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, m: usize) -> f64 {
        self.values[m]
    }
}

const RESCALE_AT: f64 = 1e200;

/// Block of `j_0(x)..=j_{m_max}(x)` for `x ≥ 0`.
pub fn bessel_backward(x: f64, m_max: usize) -> SphericalBesselBlock {
    let mut values = vec![0.0; m_max + 1];
    fill_spherical_bessel(x, &mut values);
    SphericalBesselBlock { x, values }
}

/// Fills `out[m] = j_m(x)` for `m < out.len()`.
///
/// Recurs `j_m = (2m+3)/x j_{m+1} − j_{m+2}` downward from order
/// `M + max(20, ⌈x⌉)` and normalizes by the closed form of `j_0` or `j_1`,
/// whichever is larger in magnitude. Arguments below `1e−8` use the leading
/// series term `x^m/(2m+1)!!`.
pub fn fill_spherical_bessel(x: f64, out: &mut [f64]) {
    let m_max = out.len().saturating_sub(1);
    if out.is_empty() {
        return;
    }
    if x < 1e-8 {
        let mut t = 1.0;
        out[0] = 1.0;
        for (m, o) in out.iter_mut().enumerate().skip(1) {
            t *= x / (2 * m + 1) as f64;
            *o = t;
        }
        return;
    }
    let start = m_max + 20usize.max(x.ceil() as usize);
    let inv_x = 1.0 / x;
    let mut above = 0.0;
    let mut current = 1e-30;
    for m in (0..start).rev() {
        let next = (2 * m + 3) as f64 * inv_x * current - above;
        above = current;
        current = next;
        if m <= m_max {
            out[m] = current;
        }
        if current.abs() > RESCALE_AT {
            above /= RESCALE_AT;
            current /= RESCALE_AT;
            for v in out.iter_mut().skip(m) {
                *v /= RESCALE_AT;
            }
        }
    }
    let (s, c) = x.sin_cos();
    let j0 = s * inv_x;
    let j1 = (s * inv_x - c) * inv_x;
    let scale = if j0.abs() >= j1.abs() || m_max == 0 { j0 / out[0] } else { j1 / out[1] };
    for v in out.iter_mut() {
        *v *= scale;
    }
}
