//! Small quadrature and finite-difference helpers.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `P_n(x)` and `P_n'(x)`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Legendre polynomials `P_0..=P_n` at `x`.
fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = x;
    }
    for k in 2..=n {
        p[k] = ((2 * k - 1) as f64 * x * p[k - 1] - (k - 1) as f64 * p[k - 2]) / k as f64;
    }
    p
}

/// Indefinite-integration matrix for the Gauss–Legendre rule of size `n`:
/// `Σ_p Q[q][p] f(t_p) ≈ ∫_{-1}^{t_q} f(t) dt`, exact for polynomials of
/// degree `< n`.
pub fn gauss_integration_matrix(nodes: &[f64], weights: &[f64]) -> Vec<Vec<f64>> {
    let n = nodes.len();
    // ∫_{-1}^{t} P_j for j = 0..n-1
    let antiderivatives: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&t| {
            let p = legendre_all(n, t);
            (0..n)
                .map(|j| {
                    if j == 0 {
                        t + 1.0
                    } else {
                        (p[j + 1] - p[j - 1]) / (2 * j + 1) as f64
                    }
                })
                .collect()
        })
        .collect();
    let basis: Vec<Vec<f64>> = nodes.iter().map(|&t| legendre_all(n - 1, t)).collect();
    let mut q = vec![vec![0.0; n]; n];
    for (qi, row) in q.iter_mut().enumerate() {
        for (p, out) in row.iter_mut().enumerate() {
            // Lagrange basis L_p = Σ_j (2j+1)/2 w_p P_j(t_p) P_j
            *out = (0..n)
                .map(|j| 0.5 * (2 * j + 1) as f64 * weights[p] * basis[p][j] * antiderivatives[qi][j])
                .sum();
        }
    }
    q
}

/// Finite-difference weights for the first derivative at `x0` on the
/// stencil `xs` (Fornberg's algorithm).
pub fn first_derivative_weights(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let m = 1;
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] *= c4 / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[1]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_rule_integrates_polynomials() {
        for n in [1, 2, 5, 8, 14, 20] {
            let (x, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            for deg in 0..2 * n {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg + 1) as f64 };
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn integration_matrix_is_exact_for_low_degree() {
        let (x, w) = gauss_legendre(10);
        let q = gauss_integration_matrix(&x, &w);
        for deg in 0..10 {
            for (i, &t) in x.iter().enumerate() {
                let got: f64 = (0..10).map(|p| q[i][p] * x[p].powi(deg)).sum();
                let exact = (t.powi(deg + 1) - (-1f64).powi(deg + 1)) / (deg + 1) as f64;
                assert!((got - exact).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn fornberg_central_stencil() {
        let xs = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
        let w = first_derivative_weights(0.0, &xs);
        let expected = [-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0].map(|v| v / 60.0);
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
