use crate::error::{Error, Result};
use crate::radial::quadrature::first_derivative_weights;
use std::sync::Arc;

/// Smallest grid accepted by [`make_log_grid`].
pub const MIN_GRID_POINTS: usize = 64;

const STENCIL: usize = 7;

/// Exponential grid `r_i = r_min·e^{i h}` with weights for `∫_0^∞ f(r) dr`.
///
/// The weights are composite Simpson in `x = ln r` (a 3/8 panel closes an
/// odd interval count) multiplied by the Jacobian `r`.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    r_min: f64,
    r_max: f64,
    h: f64,
    r: Vec<f64>,
    weights: Vec<f64>,
    // first-derivative stencils in x for the leading and trailing three points
    edge: Vec<[f64; STENCIL]>,
    central: [f64; STENCIL],
}

pub fn make_log_grid(r_min: f64, r_max: f64, n_points: usize) -> Result<Arc<RadialGrid>> {
    RadialGrid::new(r_min, r_max, n_points).map(Arc::new)
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, n_points: usize) -> Result<Self> {
        if !(r_min > 0.0) || !(r_max > r_min) || !r_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need 0 < r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if n_points < MIN_GRID_POINTS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_GRID_POINTS} points, got {n_points}"
            )));
        }
        let h = (r_max / r_min).ln() / (n_points - 1) as f64;
        let mut r: Vec<f64> = (0..n_points).map(|i| r_min * (i as f64 * h).exp()).collect();
        r[n_points - 1] = r_max;

        let mut simpson = vec![0.0; n_points];
        let intervals = n_points - 1;
        let simpson_end = if intervals % 2 == 0 { intervals } else { intervals - 3 };
        for i in (0..simpson_end).step_by(2) {
            simpson[i] += h / 3.0;
            simpson[i + 1] += 4.0 * h / 3.0;
            simpson[i + 2] += h / 3.0;
        }
        if simpson_end != intervals {
            let s = simpson_end;
            for (k, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
                simpson[s + k] += 3.0 * h / 8.0 * c;
            }
        }
        let weights = simpson.iter().zip(&r).map(|(w, r)| w * r).collect();

        let offsets: Vec<f64> = (0..STENCIL).map(|k| k as f64).collect();
        let mut edge = Vec::with_capacity(6);
        for i in 0..3 {
            edge.push(to_array(first_derivative_weights(i as f64, &offsets)));
        }
        for i in 0..3 {
            edge.push(to_array(first_derivative_weights((STENCIL - 3 + i) as f64, &offsets)));
        }
        let central = to_array(first_derivative_weights(3.0, &offsets));

        Ok(Self {
            r_min,
            r_max,
            h,
            r,
            weights,
            edge,
            central,
        })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Step in `ln r`.
    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.r
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn same_as(&self, other: &RadialGrid) -> bool {
        std::ptr::eq(self, other)
            || (self.len() == other.len() && self.r_min == other.r_min && self.r_max == other.r_max)
    }

    /// `∫_0^∞ f(r) dr` for samples `f(r_i)`.
    ///
    /// Besides the Simpson sum, the stretch `[0, r_min]` and the tail beyond
    /// `r_max` are added assuming local power-law behaviour estimated from the
    /// two outermost samples at each end.
    pub fn integrate_values(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        let body: f64 = self.weights.iter().zip(f).map(|(w, v)| w * v).sum();
        body + self.head(f[0], f[1]) + self.tail(f[f.len() - 2], f[f.len() - 1])
    }

    fn head(&self, f0: f64, f1: f64) -> f64 {
        if f0 == 0.0 || f0.signum() != f1.signum() {
            return 0.0;
        }
        let k = (f1 / f0).ln() / self.h;
        if k > -1.0 {
            f0 * self.r[0] / (k + 1.0)
        } else {
            0.0
        }
    }

    /// Uncertainty of the beyond-the-grid contribution to
    /// [`RadialGrid::integrate_values`]. The power-law extrapolation is
    /// off by roughly how far its exponent drifts over the tail; without a
    /// decaying power law the whole `r f(r)` edge estimate counts.
    pub fn tail_uncertainty(&self, f: &[f64]) -> f64 {
        let n = f.len();
        let edge = (f[n - 1] * self.r_max).abs();
        let exponent = |a: f64, b: f64| {
            if a != 0.0 && a.signum() == b.signum() {
                Some((b / a).ln() / self.h)
            } else {
                None
            }
        };
        match (exponent(f[n - 2], f[n - 1]), exponent(f[n - 3], f[n - 2])) {
            (Some(k1), Some(k2)) if k1 < -1.0 => {
                let fitted = self.tail(f[n - 2], f[n - 1]);
                let drift = (k1 - k2).abs() / self.h;
                (fitted * drift / (-k1 - 1.0)).abs()
            }
            _ => edge,
        }
    }

    fn tail(&self, f_prev: f64, f_last: f64) -> f64 {
        if f_last == 0.0 || f_prev.signum() != f_last.signum() {
            return 0.0;
        }
        let k = (f_last / f_prev).ln() / self.h;
        if k < -1.0 {
            f_last * self.r_max / (-k - 1.0)
        } else {
            0.0
        }
    }

    /// `df/dr` from a seven-point finite-difference stencil in `ln r`.
    pub fn differentiate_values(&self, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let (start, w) = if i < 3 {
                (0, &self.edge[i])
            } else if i + 3 >= n {
                (n - STENCIL, &self.edge[3 + (i + 3 - n)])
            } else {
                (i - 3, &self.central)
            };
            let dfdx: f64 = w.iter().zip(&f[start..start + STENCIL]).map(|(w, v)| w * v).sum();
            out[i] = dfdx / (self.h * self.r[i]);
        }
        out
    }
}

fn to_array(v: Vec<f64>) -> [f64; STENCIL] {
    let mut a = [0.0; STENCIL];
    a.copy_from_slice(&v);
    a
}

/// Samples of a function on a shared radial grid.
#[derive(Debug, Clone)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite value at r = {}", grid.abscissae()[i])));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every abscissa.
    pub fn from_fn(grid: &Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.abscissae().iter().map(|&r| f(r)).collect();
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Pointwise map keeping the grid.
    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self
            .grid
            .abscissae()
            .iter()
            .zip(&self.values)
            .map(|(&r, &v)| f(r, v))
            .collect();
        Self {
            grid: Arc::clone(&self.grid),
            values,
        }
    }

    /// Pointwise combination with another function on the same grid.
    pub fn zip_map(&self, other: &RadialFunction, f: impl Fn(f64, f64, f64) -> f64) -> Result<Self> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let values = self
            .grid
            .abscissae()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(&r, (&a, &b))| f(r, a, b))
            .collect();
        Ok(Self {
            grid: Arc::clone(&self.grid),
            values,
        })
    }

    /// `∫_0^∞ f(r) dr`.
    pub fn integrate(&self) -> f64 {
        self.grid.integrate_values(&self.values)
    }

    /// `∫ f(r) g(r) dr`.
    pub fn inner(&self, other: &RadialFunction) -> Result<f64> {
        Ok(self.zip_map(other, |_, a, b| a * b)?.integrate())
    }

    /// `df/dr`; needs at least five samples.
    pub fn differentiate(&self) -> Result<Self> {
        if self.values.len() < 5 {
            return Err(Error::InvalidGrid("differentiation needs at least 5 points".into()));
        }
        Ok(Self {
            grid: Arc::clone(&self.grid),
            values: self.grid.differentiate_values(&self.values),
        })
    }
}
