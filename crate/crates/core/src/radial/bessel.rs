//! Order-`l` spherical Bessel (Hankel-type) transform between position and
//! momentum space.
//!
//! For a radial function `u(r) = r R(r)` the transform returns
//! `w(p) = p φ(p)` with `φ(p) = √(2/π) ∫ R(r) j_l(pr) r² dr`, so that
//! `∫ w² dp = ∫ u² dr`.
//!
//! The samples of `r² u` are interpolated by local cubics in `ln r`. Where
//! the oscillation per grid interval is small the grid Simpson rule is used
//! directly; elsewhere each interval is split into panels of bounded phase
//! and integrated with a six-point Gauss–Legendre rule.

use crate::error::{Error, Result};
use crate::radial::grid::{RadialFunction, RadialGrid};
use crate::radial::quadrature::gauss_legendre;
use std::f64::consts::PI;
use std::sync::Arc;

/// Phase per grid interval below which plain Simpson weights are used.
const SIMPSON_PHASE: f64 = 0.05;
/// Largest phase covered by one Gauss panel.
const PANEL_PHASE: f64 = 2.0;
const PANEL_NODES: usize = 6;
/// Samples below this fraction of the peak are treated as zero.
const NEGLIGIBLE: f64 = 1e-14;
/// Parseval tolerance beyond which a transform is reported as failed.
const NORM_TOLERANCE: f64 = 1e-4;

/// Spherical Bessel function of the first kind, `j_l(x)` for `x >= 0`.
pub fn spherical_bessel_j(l: u32, x: f64) -> f64 {
    let mut out = vec![0.0; l as usize + 1];
    bessel_upto(l as usize, x, &mut out);
    out[l as usize]
}

/// Fills `out[k] = j_k(x)` for `k = 0..=lmax`.
fn bessel_upto(lmax: usize, x: f64, out: &mut [f64]) {
    if x >= lmax as f64 + 1.0 {
        let (s, c) = x.sin_cos();
        let inv = 1.0 / x;
        out[0] = s * inv;
        if lmax >= 1 {
            out[1] = (out[0] - c) * inv;
        }
        for k in 1..lmax {
            out[k + 1] = (2 * k + 1) as f64 * inv * out[k] - out[k - 1];
        }
    } else {
        for (k, o) in out.iter_mut().enumerate().take(lmax + 1) {
            *o = bessel_series(k, x);
        }
    }
}

fn bessel_series(l: usize, x: f64) -> f64 {
    // x^l/(2l+1)!! Σ_k (-x²/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
    let mut lead = 1.0;
    for k in 0..l {
        lead *= x / (2 * k + 3) as f64;
    }
    let half_x2 = 0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= -half_x2 / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Transforms `u = rR` of angular momentum `l` onto `p_grid`.
pub fn spherical_bessel_transform(
    u: &RadialFunction,
    l: u32,
    p_grid: &Arc<RadialGrid>,
) -> Result<RadialFunction> {
    spherical_bessel_transform_many(&[(u, l)], p_grid).map(|mut v| v.remove(0))
}

struct Prepared<'a> {
    // r² u samples
    weighted: Vec<f64>,
    l: usize,
    hi: usize,
    source: &'a RadialFunction,
}

/// Transforms several functions sharing one position grid; quadrature nodes
/// and Bessel values are reused across them.
pub fn spherical_bessel_transform_many(
    inputs: &[(&RadialFunction, u32)],
    p_grid: &Arc<RadialGrid>,
) -> Result<Vec<RadialFunction>> {
    transform_labelled(inputs, p_grid, |i| format!("input {i} (l = {})", inputs[i].1))
}

/// As [`spherical_bessel_transform_many`], naming failed inputs with `label`.
pub(crate) fn transform_labelled(
    inputs: &[(&RadialFunction, u32)],
    p_grid: &Arc<RadialGrid>,
    label: impl Fn(usize) -> String,
) -> Result<Vec<RadialFunction>> {
    if inputs.is_empty() {
        return Ok(Vec::new());
    }
    let grid = Arc::clone(inputs[0].0.grid());
    if inputs.iter().any(|(u, _)| !u.grid().same_as(&grid)) {
        return Err(Error::GridMismatch);
    }
    let r = grid.abscissae();
    let n = r.len();
    let h = grid.step();

    let mut prepared: Vec<Prepared> = inputs
        .iter()
        .map(|&(u, l)| {
            let vals = u.values();
            let peak = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let hi = vals
                .iter()
                .rposition(|v| v.abs() > NEGLIGIBLE * peak)
                .map_or(0, |i| (i + 3).min(n - 1));
            Prepared {
                weighted: vals.iter().zip(r).map(|(v, r)| v * r * r).collect(),
                l: l as usize,
                hi,
                source: u,
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..prepared.len()).collect();
    order.sort_by(|&a, &b| prepared[b].hi.cmp(&prepared[a].hi));
    let lmax = prepared.iter().map(|p| p.l).max().unwrap_or(0);
    let range_end = prepared[order[0]].hi;

    let (gx, gw) = gauss_legendre(PANEL_NODES);
    let gt: Vec<f64> = gx.iter().map(|x| 0.5 * (x + 1.0)).collect();
    let gw: Vec<f64> = gw.iter().map(|w| 0.5 * w).collect();

    let norm = (2.0 / PI).sqrt();
    let ratio = h.exp() - 1.0;
    let mut out = vec![vec![0.0; p_grid.len()]; prepared.len()];
    let mut jl = vec![0.0; lmax + 1];
    let mut acc = vec![0.0; prepared.len()];

    for (ip, &p) in p_grid.abscissae().iter().enumerate() {
        acc.iter_mut().for_each(|a| *a = 0.0);
        // intervals [i, i+1] with phase below SIMPSON_PHASE start the range
        let cut = ((SIMPSON_PHASE / (p * ratio * r[0])).ln() / h).floor();
        let mut split = if cut <= 0.0 { 0 } else { (cut as usize).min(range_end) };
        split -= split % 2;

        if split > 0 {
            for i in 0..=split {
                let w = h / 3.0
                    * if i == 0 || i == split {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                bessel_upto(lmax, p * r[i], &mut jl);
                for &k in &order {
                    let f = &prepared[k];
                    if f.hi < i {
                        break;
                    }
                    acc[k] += w * f.weighted[i] * jl[f.l];
                }
            }
        }

        for i in split..range_end {
            let phase = p * (r[i + 1] - r[i]);
            let panels = (phase / PANEL_PHASE).ceil().max(1.0) as usize;
            let s = i.saturating_sub(1).min(n - 4);
            let width = 1.0 / panels as f64;
            for panel in 0..panels {
                for (t0, w0) in gt.iter().zip(&gw) {
                    let t = (panel as f64 + t0) * width;
                    let tau = (i - s) as f64 + t;
                    let lw = cubic_weights(tau);
                    let x = r[i] * (t * h).exp();
                    bessel_upto(lmax, p * x, &mut jl);
                    let w = w0 * width * h;
                    for &k in &order {
                        let f = &prepared[k];
                        if f.hi <= i {
                            break;
                        }
                        let v = &f.weighted[s..s + 4];
                        let interp = lw[0] * v[0] + lw[1] * v[1] + lw[2] * v[2] + lw[3] * v[3];
                        acc[k] += w * interp * jl[f.l];
                    }
                }
            }
        }
        for (k, a) in acc.iter().enumerate() {
            out[k][ip] = p * norm * a;
        }
    }

    let mut results = Vec::with_capacity(prepared.len());
    for (i, (f, values)) in prepared.iter_mut().zip(out).enumerate() {
        let w = RadialFunction::new(Arc::clone(p_grid), values)?;
        let norm_in = f.source.map(|_, v| v * v).integrate();
        let norm_out = w.map(|_, v| v * v).integrate();
        if (norm_out - norm_in).abs() > NORM_TOLERANCE * norm_in.max(f64::MIN_POSITIVE) {
            return Err(Error::Parseval {
                orbital: label(i),
                norm_in,
                norm_out,
            });
        }
        results.push(w);
    }
    Ok(results)
}

/// Lagrange weights for nodes 0, 1, 2, 3 evaluated at `t`.
#[inline]
fn cubic_weights(t: f64) -> [f64; 4] {
    let a = t;
    let b = t - 1.0;
    let c = t - 2.0;
    let d = t - 3.0;
    [
        -b * c * d / 6.0,
        a * c * d / 2.0,
        -a * b * d / 2.0,
        a * b * c / 6.0,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::make_log_grid;
    use approx::assert_relative_eq;

    #[test]
    fn bessel_reference_values() {
        // closed forms
        for &x in &[1e-6, 0.01, 0.3, 1.0, 2.5, 7.0, 40.0, 1234.5] {
            let (s, c) = (f64::sin(x), f64::cos(x));
            let j0 = s / x;
            let j1 = s / (x * x) - c / x;
            let j2 = (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x);
            let j3 = (15.0 / x.powi(3) - 6.0 / x) * s / x - (15.0 / (x * x) - 1.0) * c / x;
            let tol = |v: f64| if x < 0.1 { 1e-6 * v.abs() + 1e-14 } else { 1e-11 * v.abs().max(1e-3) };
            assert!((spherical_bessel_j(0, x) - j0).abs() < tol(j0), "j0({x})");
            if x >= 0.1 {
                assert!((spherical_bessel_j(1, x) - j1).abs() < tol(j1), "j1({x})");
                assert!((spherical_bessel_j(2, x) - j2).abs() < tol(j2), "j2({x})");
            }
            if x >= 1.0 {
                assert!((spherical_bessel_j(3, x) - j3).abs() < tol(j3), "j3({x})");
            }
        }
        // small-argument limit j_l(x) ≈ x^l/(2l+1)!!
        assert_relative_eq!(spherical_bessel_j(3, 1e-3), 1e-9 / 105.0, max_relative = 1e-6);
        assert_eq!(spherical_bessel_j(0, 0.0), 1.0);
        assert_eq!(spherical_bessel_j(2, 0.0), 0.0);
    }

    #[test]
    fn bessel_continuity_at_switch() {
        for l in 0..6u32 {
            let x = l as f64 + 1.0;
            let mut rec = vec![0.0; l as usize + 1];
            bessel_upto(l as usize, x, &mut rec);
            let series = bessel_series(l as usize, x);
            assert!((series - rec[l as usize]).abs() < 1e-12 * series.abs(), "l = {l}");
        }
    }

    #[test]
    fn hydrogen_ground_state() {
        let rg = make_log_grid(1e-6, 60.0, 4000).unwrap();
        let pg = make_log_grid(1e-4, 10.0, 2000).unwrap();
        let u = RadialFunction::from_fn(&rg, |r| 2.0 * r * (-r).exp());
        let w = spherical_bessel_transform(&u, 0, &pg).unwrap();
        // momentum wavefunction including Y_00
        for (&p, &v) in pg.abscissae().iter().zip(w.values()) {
            let psi = v / p / (4.0 * PI).sqrt();
            let exact = 2.0 * 2f64.sqrt() / PI / (1.0 + p * p).powi(2);
            assert!((psi - exact).abs() < 1e-5, "p = {p}");
        }
        let norm = w.map(|_, v| v * v).integrate();
        assert!((norm - 1.0).abs() < 1e-6, "norm {norm}");
    }

    #[test]
    fn oscillator_ground_state_is_self_reciprocal() {
        let rg = make_log_grid(1e-6, 60.0, 4000).unwrap();
        let pg = make_log_grid(1e-4, 20.0, 2000).unwrap();
        let c = 2.0 / PI.powf(0.25);
        let u = RadialFunction::from_fn(&rg, |r| c * r * (-0.5 * r * r).exp());
        let w = spherical_bessel_transform(&u, 0, &pg).unwrap();
        for (&p, &v) in pg.abscissae().iter().zip(w.values()) {
            assert!((v - c * p * (-0.5 * p * p).exp()).abs() < 1e-8);
        }
        let p2 = w.map(|p, v| p * p * v * v).integrate();
        assert!((p2 - 1.5).abs() < 1e-6);
    }

    #[test]
    fn higher_angular_momentum_preserves_norm_and_shape() {
        // hydrogen 2p: u = r² e^{-r/2} / (2√6); φ(p) ∝ p/(1/4 + p²)³
        let rg = make_log_grid(1e-6, 80.0, 4000).unwrap();
        let pg = make_log_grid(1e-4, 10.0, 2000).unwrap();
        let u = RadialFunction::from_fn(&rg, |r| r * r * (-0.5 * r).exp() / (2.0 * 6f64.sqrt()));
        let w = spherical_bessel_transform(&u, 1, &pg).unwrap();
        let norm = w.map(|_, v| v * v).integrate();
        assert!((norm - 1.0).abs() < 1e-6);
        let shape: Vec<f64> =
            pg.abscissae().iter().map(|&p| p * p / (0.25 + p * p).powi(3)).collect();
        let scale = w.values()[1000] / shape[1000];
        for (v, s) in w.values().iter().zip(&shape) {
            assert!((v - scale * s).abs() < 1e-6);
        }
    }

    #[test]
    fn large_momenta_stay_quiet() {
        // A diffuse function must not leak spurious amplitude at large p.
        let rg = make_log_grid(1e-8, 60.0, 4000).unwrap();
        let pg = make_log_grid(1e-4, 1000.0, 800).unwrap();
        let a = 0.7f64;
        let u = RadialFunction::from_fn(&rg, |r| r * (-a * r).exp());
        let w = spherical_bessel_transform(&u, 0, &pg).unwrap();
        let norm_u = u.map(|_, v| v * v).integrate().sqrt();
        for (&p, &v) in pg.abscissae().iter().zip(w.values()) {
            // exact: √(2/π) 2a p / (a²+p²)² · p / p
            let exact = (2.0 / PI).sqrt() * 2.0 * a * p / (a * a + p * p).powi(2);
            assert!((v - exact).abs() < 1e-9 * norm_u + 1e-6 * exact.abs(), "p = {p}: {v} vs {exact}");
        }
    }
}
