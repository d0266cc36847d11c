//! B-spline basis on `[0, R]` with exponentially graded breakpoints and a
//! per-interval Gauss–Legendre quadrature.

use crate::error::{Error, Result};
use crate::radial::quadrature::{gauss_integration_matrix, gauss_legendre};
use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct BSplineBasis {
    order: usize,
    breaks: Vec<f64>,
    knots: Vec<f64>,
    nodes_per_interval: usize,
    /// `[-1, 1]` Gauss weights and the matching partial-integral matrix.
    ref_weights: Vec<f64>,
    partial: Vec<Vec<f64>>,
    half_width: Vec<f64>,
    points: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

/// Breakpoints `b_j = r0 (e^{δ j} - 1)`, `j = 0..=m`, with `b_1 = first` and
/// `b_m = r_max`.
pub fn graded_breakpoints(first: f64, r_max: f64, m: usize) -> Result<Vec<f64>> {
    if !(first > 0.0 && first < r_max) || m < 2 {
        return Err(Error::InvalidGrid(format!(
            "breakpoints need 0 < first < r_max and m >= 2 (first = {first}, r_max = {r_max}, m = {m})"
        )));
    }
    let target = r_max / first;
    let mf = m as f64;
    if target <= mf {
        return Ok((0..=m).map(|j| r_max * j as f64 / mf).collect());
    }
    // (e^{mδ} - 1)/(e^δ - 1) is increasing in δ
    let ratio = |d: f64| (mf * d).exp_m1() / d.exp_m1();
    let (mut lo, mut hi) = (1e-12, 1.0);
    while ratio(hi) < target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let delta = 0.5 * (lo + hi);
    let r0 = r_max / (mf * delta).exp_m1();
    let mut b: Vec<f64> = (0..=m).map(|j| r0 * (j as f64 * delta).exp_m1()).collect();
    b[m] = r_max;
    Ok(b)
}

impl BSplineBasis {
    pub fn new(breaks: Vec<f64>, order: usize, nodes_per_interval: usize) -> Result<Self> {
        if order < 2 || breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) || breaks[0] != 0.0 {
            return Err(Error::InvalidGrid("breakpoints must start at 0 and increase".into()));
        }
        let m = breaks.len() - 1;
        let r_max = breaks[m];
        let mut knots = vec![0.0; order - 1];
        knots.extend_from_slice(&breaks);
        knots.extend(std::iter::repeat(r_max).take(order - 1));

        let (t, w) = gauss_legendre(nodes_per_interval);
        let partial = gauss_integration_matrix(&t, &w);
        let mut basis = Self {
            order,
            breaks,
            knots,
            nodes_per_interval,
            ref_weights: w.clone(),
            partial,
            half_width: Vec::with_capacity(m),
            points: Vec::with_capacity(m * nodes_per_interval),
            weights: Vec::with_capacity(m * nodes_per_interval),
            values: Vec::with_capacity(m * nodes_per_interval * order),
            derivs: Vec::with_capacity(m * nodes_per_interval * order),
        };
        let mut vals = vec![0.0; order];
        let mut ders = vec![0.0; order];
        for j in 0..m {
            let (a, b) = (basis.breaks[j], basis.breaks[j + 1]);
            let hw = 0.5 * (b - a);
            basis.half_width.push(hw);
            for (ti, wi) in t.iter().zip(&w) {
                let x = a + hw * (ti + 1.0);
                basis.points.push(x);
                basis.weights.push(hw * wi);
                basis.eval_in(j, x, &mut vals, &mut ders);
                basis.values.extend_from_slice(&vals);
                basis.derivs.extend_from_slice(&ders);
            }
        }
        Ok(basis)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.breaks.len() - 1 + self.order - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn intervals(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn r_max(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn nodes_per_interval(&self) -> usize {
        self.nodes_per_interval
    }

    /// Quadrature abscissae, interval by interval.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Values of the `order` splines nonzero at quadrature point `p`; the
    /// first of them has index `p / nodes_per_interval`.
    #[inline]
    pub fn values_at(&self, p: usize) -> &[f64] {
        &self.values[p * self.order..(p + 1) * self.order]
    }

    #[inline]
    pub fn derivs_at(&self, p: usize) -> &[f64] {
        &self.derivs[p * self.order..(p + 1) * self.order]
    }

    /// Intervals on which spline `i` is nonzero.
    #[inline]
    pub fn support(&self, i: usize) -> (usize, usize) {
        (i.saturating_sub(self.order - 1), i.min(self.intervals() - 1))
    }

    /// Interval containing `x`, clamped to the basis range.
    pub fn interval_of(&self, x: f64) -> usize {
        let m = self.intervals();
        match self.breaks.partition_point(|&b| b <= x) {
            0 => 0,
            p if p > m => m - 1,
            p => p - 1,
        }
    }

    /// Cox–de Boor evaluation of the splines `j..j+order` and their first
    /// derivatives at `x` inside interval `j`.
    pub fn eval_in(&self, j: usize, x: f64, vals: &mut [f64], ders: &mut [f64]) {
        let k = self.order;
        let t = &self.knots;
        let mu = j + k - 1;
        let mut left = vec![0.0; k];
        let mut right = vec![0.0; k];
        vals[0] = 1.0;
        for d in 1..k {
            if d == k - 1 {
                // order k-1 values feed the derivative formula
                for r in 0..k {
                    let lower = if r >= 1 {
                        vals[r - 1] / (t[j + r + k - 1] - t[j + r])
                    } else {
                        0.0
                    };
                    let upper = if r + 1 < k {
                        vals[r] / (t[j + r + k] - t[j + r + 1])
                    } else {
                        0.0
                    };
                    ders[r] = (k - 1) as f64 * (lower - upper);
                }
            }
            left[d] = x - t[mu + 1 - d];
            right[d] = t[mu + d] - x;
            let mut saved = 0.0;
            for r in 0..d {
                let temp = vals[r] / (right[r + 1] + left[d - r]);
                vals[r] = saved + right[r + 1] * temp;
                saved = left[d - r] * temp;
            }
            vals[d] = saved;
        }
    }

    /// `Σ c_i B_i(x)` and its derivative.
    pub fn evaluate(&self, coefficients: &[f64], x: f64) -> (f64, f64) {
        if x < 0.0 || x > self.r_max() {
            return (0.0, 0.0);
        }
        let j = self.interval_of(x);
        let mut vals = vec![0.0; self.order];
        let mut ders = vec![0.0; self.order];
        self.eval_in(j, x, &mut vals, &mut ders);
        let c = &coefficients[j..j + self.order];
        let v = c.iter().zip(&vals).map(|(c, b)| c * b).sum();
        let d = c.iter().zip(&ders).map(|(c, b)| c * b).sum();
        (v, d)
    }

    /// `Σ c_i B_i` at every quadrature point.
    pub fn at_points(&self, coefficients: &[f64]) -> Vec<f64> {
        let ng = self.nodes_per_interval;
        (0..self.points.len())
            .map(|p| {
                let j = p / ng;
                let c = &coefficients[j..j + self.order];
                c.iter().zip(self.values_at(p)).map(|(c, b)| c * b).sum()
            })
            .collect()
    }

    /// `M_ab = ∫ B_a V B_b` for `V` sampled at the quadrature points.
    pub fn local_matrix(&self, v: &[f64]) -> DMatrix<f64> {
        let n = self.len();
        let k = self.order;
        let ng = self.nodes_per_interval;
        let mut m = DMatrix::zeros(n, n);
        for p in 0..self.points.len() {
            let j = p / ng;
            let b = self.values_at(p);
            let wv = self.weights[p] * v[p];
            for r in 0..k {
                let x = wv * b[r];
                for s in r..k {
                    m[(j + r, j + s)] += x * b[s];
                }
            }
        }
        symmetrize_upper(&mut m);
        m
    }

    /// `∫ B_a' B_b'`.
    pub fn derivative_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let k = self.order;
        let ng = self.nodes_per_interval;
        let mut m = DMatrix::zeros(n, n);
        for p in 0..self.points.len() {
            let j = p / ng;
            let d = self.derivs_at(p);
            for r in 0..k {
                let x = self.weights[p] * d[r];
                for s in r..k {
                    m[(j + r, j + s)] += x * d[s];
                }
            }
        }
        symmetrize_upper(&mut m);
        m
    }

    /// Running integrals `∫_0^{x_p} g` at every quadrature point of the
    /// intervals `lo..=hi`, for `g` sampled at those points. Returns the
    /// values and the integral over the whole range.
    pub fn cumulative(&self, g: &[f64], lo: usize, hi: usize, out: &mut Vec<f64>) -> f64 {
        let ng = self.nodes_per_interval;
        out.clear();
        let mut acc = 0.0;
        for (jj, j) in (lo..=hi).enumerate() {
            let gj = &g[jj * ng..(jj + 1) * ng];
            let hw = self.half_width[j];
            for row in &self.partial {
                out.push(acc + hw * row.iter().zip(gj).map(|(q, v)| q * v).sum::<f64>());
            }
            acc += hw * self.ref_weights.iter().zip(gj).map(|(w, v)| w * v).sum::<f64>();
        }
        acc
    }
}

pub(crate) fn symmetrize_upper(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            m[(i, j)] = m[(j, i)];
        }
    }
}
