//! Density functionals of spherically symmetric densities and the
//! inequalities linking them.
//!
//! Densities are normalized to the particle number `N`, so every
//! expectation value here is a system total.

use crate::bounds::{self, BoundQuery};
use crate::error::{domain, Error, Result};
use crate::radial::RadialFunction;
use crate::special::omega_d;

/// Relative tolerance for the normalization of a [`RadialDensity`].
pub const NORM_TOLERANCE: f64 = 1e-6;
/// Points where the density falls below this fraction of its peak are left
/// out of the Fisher integrand.
pub const FISHER_MASK: f64 = 1e-30;
/// A tail beyond the grid larger than this fraction triggers a warning.
pub const TAIL_WARNING: f64 = 1e-6;
/// Negative slack down to `-SLACK_TOLERANCE · max(1, |lhs|)` is quadrature
/// noise, not a violation.
pub const SLACK_TOLERANCE: f64 = 1e-9;

/// A spherically symmetric density `ρ(r)` in `d` dimensions.
#[derive(Debug, Clone)]
pub struct RadialDensity {
    d: u32,
    f: RadialFunction,
    norm_target: f64,
}

impl RadialDensity {
    /// Validates non-negativity and `Ω_d ∫ ρ r^{d-1} dr = norm_target`.
    pub fn new(d: u32, f: RadialFunction, norm_target: f64) -> Result<Self> {
        if d == 0 {
            return Err(domain("RadialDensity", "dimension must be >= 1"));
        }
        if !(norm_target > 0.0) || !norm_target.is_finite() {
            return Err(Error::InvalidDensity(format!("norm target must be positive, got {norm_target}")));
        }
        if let Some((i, v)) = f.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
            let r = f.grid().abscissae()[i];
            return Err(Error::InvalidDensity(format!("negative value {v:e} at r = {r:e}")));
        }
        let rho = Self { d, f, norm_target };
        let actual = rho.moment_integral(0.0);
        if !((actual - norm_target).abs() <= NORM_TOLERANCE * norm_target) {
            return Err(Error::Normalization {
                expected: norm_target,
                actual,
            });
        }
        Ok(rho)
    }

    /// Like [`RadialDensity::new`] but rescales `f` to integrate to
    /// `norm_target` instead of requiring it already does.
    pub fn normalized(d: u32, f: RadialFunction, norm_target: f64) -> Result<Self> {
        let probe = Self { d, f, norm_target };
        let actual = probe.moment_integral(0.0);
        if !(actual > 0.0) || !actual.is_finite() {
            return Err(Error::Normalization {
                expected: norm_target,
                actual,
            });
        }
        let scale = norm_target / actual;
        Self::new(d, probe.f.map(|_, v| v * scale), norm_target)
    }

    pub fn dimension(&self) -> u32 {
        self.d
    }

    pub fn function(&self) -> &RadialFunction {
        &self.f
    }

    pub fn norm_target(&self) -> f64 {
        self.norm_target
    }

    fn omega(&self) -> f64 {
        omega_d(self.d as f64).expect("d >= 1 checked at construction")
    }

    fn moment_integral(&self, alpha: f64) -> f64 {
        integrate_with_tail(&self.f, self.omega(), |r, v| v * r.powf(alpha + self.d as f64 - 1.0)).0
    }
}

/// Integrates `scale · g(r, ρ)` and returns it with the relative
/// uncertainty of the part extrapolated beyond the outer edge.
fn integrate_with_tail(f: &RadialFunction, scale: f64, g: impl Fn(f64, f64) -> f64) -> (f64, f64) {
    let integrand = f.map(g);
    let total = scale * integrand.integrate();
    let last = scale * f.grid().tail_uncertainty(integrand.values());
    let tail = if total != 0.0 { (last / total).abs() } else { 0.0 };
    (total, tail)
}

fn warn_tail(what: &str, tail: f64) {
    if tail > TAIL_WARNING {
        log::warn!("{what}: contribution beyond the grid is uncertain to {tail:.2e} of the total; result may be truncated");
    }
}

/// `⟨r^α⟩ = Ω_d ∫ ρ r^{α+d-1} dr`.
pub fn radial_moment(rho: &RadialDensity, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(domain("radial_moment", format!("order must be >= 0, got {alpha}")));
    }
    let d = rho.d as f64;
    let (value, tail) = integrate_with_tail(&rho.f, rho.omega(), |r, v| v * r.powf(alpha + d - 1.0));
    warn_tail("radial moment", tail);
    Ok(value)
}

/// Entropic (frequency) moment `W_a = Ω_d ∫ ρ^a r^{d-1} dr`.
pub fn entropic_moment(rho: &RadialDensity, a: f64) -> Result<f64> {
    if !(a >= 1.0) || !a.is_finite() {
        return Err(domain("entropic_moment", format!("exponent must be >= 1, got {a}")));
    }
    let d = rho.d as f64;
    let (value, tail) = integrate_with_tail(&rho.f, rho.omega(), |r, v| v.powf(a) * r.powf(d - 1.0));
    warn_tail("entropic moment", tail);
    Ok(value)
}

/// Fisher information together with an audit of the masked region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherInformation {
    pub value: f64,
    /// Particle number carried by the masked points.
    pub excluded_mass: f64,
    pub masked_points: usize,
}

/// `I[ρ] = Ω_d ∫ (dρ/dr)² / ρ · r^{d-1} dr`.
pub fn fisher_spherical(rho: &RadialDensity) -> Result<FisherInformation> {
    let d = rho.d as f64;
    let values = rho.f.values();
    let peak = values.iter().fold(0.0f64, |m, v| m.max(*v));
    let threshold = FISHER_MASK * peak;
    let deriv = rho.f.differentiate()?;
    let r = rho.f.grid().abscissae();
    let mut masked = Vec::with_capacity(values.len());
    let mut count = 0;
    let integrand: Vec<f64> = values
        .iter()
        .zip(deriv.values())
        .zip(r)
        .map(|((&v, &dv), &x)| {
            if v < threshold || v <= 0.0 {
                count += 1;
                masked.push(v * x.powf(d - 1.0));
                0.0
            } else {
                masked.push(0.0);
                dv * dv / v * x.powf(d - 1.0)
            }
        })
        .collect();
    let grid = rho.f.grid();
    let omega = rho.omega();
    let value = omega * grid.integrate_values(&integrand);
    let excluded_mass = omega * grid.integrate_values(&masked);
    if count > 0 {
        log::debug!("fisher: {count} points masked, excluded mass {excluded_mass:.3e}");
    }
    Ok(FisherInformation {
        value,
        excluded_mass,
        masked_points: count,
    })
}

/// One side-by-side comparison `lhs >= rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityReport {
    pub label: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`.
    pub slack: f64,
    /// `lhs / rhs`.
    pub ratio: f64,
    pub holds: bool,
}

impl InequalityReport {
    pub fn new(label: &'static str, lhs: f64, rhs: f64) -> Self {
        let slack = lhs - rhs;
        Self {
            label,
            lhs,
            rhs,
            slack,
            ratio: lhs / rhs,
            holds: slack >= -SLACK_TOLERANCE * lhs.abs().max(1.0),
        }
    }
}

/// Spin-resolved Lieb–Thirring check
/// `⟨p²⟩ >= K(d) (q C_d)^{-2/d} W_{1+2/d}[ρ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiebThirringReport {
    pub check: InequalityReport,
    /// `W_{1+2/d}[ρ]`.
    pub entropic: f64,
    pub q: u32,
    pub c_d: f64,
}

pub fn lieb_thirring_check(rho: &RadialDensity, p2: f64, q: u32, c_d: f64) -> Result<LiebThirringReport> {
    if q == 0 {
        return Err(domain("lieb_thirring_check", "q must be >= 1"));
    }
    if !(1.0..=2.0).contains(&c_d) {
        return Err(domain("lieb_thirring_check", format!("C_d must lie in [1, 2], got {c_d}")));
    }
    let d = rho.d as f64;
    let w = entropic_moment(rho, 1.0 + 2.0 / d)?;
    let rhs = bounds::k_const(d)? * (q as f64 * c_d).powf(-2.0 / d) * w;
    Ok(LiebThirringReport {
        check: InequalityReport::new("lieb-thirring", p2, rhs),
        entropic: w,
        q,
        c_d,
    })
}

/// Check of `W_a[ρ] >= F(α,a,d) N^{a + d(a-1)/α} / ⟨r^α⟩^{d(a-1)/α}`.
///
/// The power of `N` makes both sides scale identically under `ρ → cρ`; at
/// `a = 1 + 2/d` it equals `1 + 2/d + 2/α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentBoundReport {
    pub check: InequalityReport,
    /// `⟨r^α⟩`.
    pub moment: f64,
    pub a: f64,
    pub alpha: f64,
}

pub fn moment_bound_check(rho: &RadialDensity, a: f64, alpha: f64) -> Result<MomentBoundReport> {
    let d = rho.d as f64;
    let f = bounds::f_var(alpha, a, d)?;
    let w = entropic_moment(rho, a)?;
    let moment = radial_moment(rho, alpha)?;
    let n = rho.norm_target;
    let power = d * (a - 1.0) / alpha;
    let rhs = f * n.powf(a + power) / moment.powf(power);
    Ok(MomentBoundReport {
        check: InequalityReport::new("entropic-moment", w, rhs),
        moment,
        a,
        alpha,
    })
}

/// Heisenberg bound `A(α,d) q^{-2/d} N^{…}` rebuilt by chaining a
/// Lieb–Thirring report with a moment-bound report taken at `a = 1 + 2/d`.
pub fn chained_heisenberg_bound(
    lt: &LiebThirringReport,
    mb: &MomentBoundReport,
    d: u32,
) -> Result<f64> {
    let a = 1.0 + 2.0 / d as f64;
    if (mb.a - a).abs() > 1e-12 {
        return Err(domain("chained_heisenberg_bound", format!("moment bound must use a = {a}, got {}", mb.a)));
    }
    Ok(lt.check.rhs / lt.entropic * mb.check.rhs * mb.moment.powf(2.0 / mb.alpha))
}

/// `⟨r^α⟩^{2/α}⟨p²⟩ >= heisenberg_lower_bound(query)`.
pub fn heisenberg_check(r_alpha: f64, p2: f64, query: &BoundQuery) -> Result<InequalityReport> {
    let bound = bounds::heisenberg_lower_bound(query)?;
    Ok(InequalityReport::new("heisenberg", r_alpha.powf(2.0 / query.alpha) * p2, bound))
}

/// `I[ρ] I[γ] >= fisher_lower_bound(query)`.
pub fn fisher_check(i_rho: f64, i_gamma: f64, query: &BoundQuery) -> Result<InequalityReport> {
    let bound = bounds::fisher_lower_bound(query)?;
    Ok(InequalityReport::new("fisher", i_rho * i_gamma, bound))
}

/// Functionals of one system in both spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySummary {
    /// `(α, ⟨r^α⟩)` pairs.
    pub r_alpha_moments: Vec<(f64, f64)>,
    pub p2: f64,
    /// `(a, W_a)` pairs.
    pub entropic: Vec<(f64, f64)>,
    pub fisher_position: f64,
    pub fisher_momentum: f64,
}

impl DensitySummary {
    pub fn compute(
        position: &RadialDensity,
        momentum: &RadialDensity,
        alphas: &[f64],
        entropic_orders: &[f64],
    ) -> Result<Self> {
        let r_alpha_moments = alphas
            .iter()
            .map(|&a| radial_moment(position, a).map(|v| (a, v)))
            .collect::<Result<_>>()?;
        let entropic = entropic_orders
            .iter()
            .map(|&a| entropic_moment(position, a).map(|v| (a, v)))
            .collect::<Result<_>>()?;
        Ok(Self {
            r_alpha_moments,
            p2: radial_moment(momentum, 2.0)?,
            entropic,
            fisher_position: fisher_spherical(position)?.value,
            fisher_momentum: fisher_spherical(momentum)?.value,
        })
    }

    pub fn moment(&self, alpha: f64) -> Option<f64> {
        self.r_alpha_moments.iter().find(|(a, _)| *a == alpha).map(|(_, v)| *v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::make_log_grid;
    use std::f64::consts::PI;

    fn hydrogen() -> RadialDensity {
        let g = make_log_grid(1e-6, 60.0, 4000).unwrap();
        RadialDensity::new(3, RadialFunction::from_fn(&g, |r| (-2.0 * r).exp() / PI), 1.0).unwrap()
    }

    #[test]
    fn validation() {
        let g = make_log_grid(1e-6, 60.0, 400).unwrap();
        let neg = RadialFunction::from_fn(&g, |r| (-2.0 * r).exp() / PI - if r > 5.0 { 1e-3 } else { 0.0 });
        assert!(matches!(RadialDensity::new(3, neg, 1.0), Err(Error::InvalidDensity(_))));
        let zero = RadialFunction::from_fn(&g, |_| 0.0);
        assert!(matches!(RadialDensity::new(3, zero.clone(), 1.0), Err(Error::Normalization { .. })));
        assert!(matches!(RadialDensity::normalized(3, zero, 1.0), Err(Error::Normalization { .. })));
        let twice = RadialFunction::from_fn(&g, |r| 2.0 * (-2.0 * r).exp() / PI);
        assert!(RadialDensity::new(3, twice.clone(), 1.0).is_err());
        let rho = RadialDensity::normalized(3, twice, 5.0).unwrap();
        assert!((radial_moment(&rho, 0.0).unwrap() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn hydrogen_functionals() {
        let rho = hydrogen();
        assert!((radial_moment(&rho, 0.0).unwrap() - 1.0).abs() < 1e-9);
        assert!((radial_moment(&rho, 2.0).unwrap() - 3.0).abs() < 1e-6);
        let w = entropic_moment(&rho, 5.0 / 3.0).unwrap();
        // (1/π)^{5/3} 4π Γ(3) / (10/3)³
        let exact = PI.powf(-5.0 / 3.0) * 4.0 * PI * 2.0 * 0.027;
        assert!((w - exact).abs() < 1e-9);
        assert!((w - 0.10070).abs() < 1e-4);
        let fisher = fisher_spherical(&rho).unwrap();
        assert!((fisher.value - 4.0).abs() < 1e-6, "{fisher:?}");
        assert!(fisher.excluded_mass < 1e-20);
    }

    #[test]
    fn gaussian_functionals() {
        let g = make_log_grid(1e-6, 20.0, 4000).unwrap();
        let rho = RadialDensity::new(3, RadialFunction::from_fn(&g, |r| PI.powf(-1.5) * (-r * r).exp()), 1.0).unwrap();
        assert!((radial_moment(&rho, 2.0).unwrap() - 1.5).abs() < 1e-9);
        let w2 = entropic_moment(&rho, 2.0).unwrap();
        assert!((w2 - PI.powi(-3) * (PI / 2.0).powf(1.5)).abs() < 1e-10);
        assert!((fisher_spherical(&rho).unwrap().value - 6.0).abs() < 1e-6);
    }

    #[test]
    fn momentum_fisher_of_hydrogen() {
        let g = make_log_grid(1e-4, 100.0, 4000).unwrap();
        let f = RadialFunction::from_fn(&g, |p| 8.0 / (PI * PI) * (1.0 + p * p).powi(-4));
        let gamma = RadialDensity::new(3, f, 1.0).unwrap();
        assert!((radial_moment(&gamma, 2.0).unwrap() - 1.0).abs() < 1e-6);
        assert!((fisher_spherical(&gamma).unwrap().value - 12.0).abs() < 1e-4);
    }

    #[test]
    fn fisher_masks_underflowing_tail() {
        let g = make_log_grid(1e-6, 60.0, 4000).unwrap();
        let f = RadialFunction::from_fn(&g, |r| (-4.0 * r * r).exp() * (8.0 / PI).powf(1.5) / 1.0);
        let rho = RadialDensity::normalized(3, f, 1.0).unwrap();
        let fi = fisher_spherical(&rho).unwrap();
        assert!(fi.masked_points > 0);
        assert!(fi.excluded_mass < 1e-25);
        // 2d·ω for e^{-ωr²} with ω = 4
        assert!((fi.value - 24.0).abs() < 1e-5);
    }

    #[test]
    fn lieb_thirring_for_hydrogen() {
        let rho = hydrogen();
        let spin = lieb_thirring_check(&rho, 1.0, 2, 1.0).unwrap();
        assert!((spin.check.rhs - 0.5782).abs() < 1e-3);
        assert!(spin.check.holds);
        let spinless = lieb_thirring_check(&rho, 1.0, 1, 1.0).unwrap();
        assert!((spinless.check.rhs - 0.9180).abs() < 1e-3);
        assert!(spinless.check.holds);
        assert!(lieb_thirring_check(&rho, 1.0, 2, 2.5).is_err());
    }

    #[test]
    fn moment_bound_for_hydrogen() {
        let rho = hydrogen();
        let mb = moment_bound_check(&rho, 5.0 / 3.0, 2.0).unwrap();
        assert!((mb.check.rhs - 0.0679).abs() < 1e-3);
        assert!((mb.check.lhs - 0.1007).abs() < 1e-3);
        assert!(mb.check.holds);
    }

    #[test]
    fn moment_bound_scales_homogeneously() {
        let g = make_log_grid(1e-6, 60.0, 4000).unwrap();
        let one = hydrogen();
        let two = RadialDensity::new(3, RadialFunction::from_fn(&g, |r| 2.0 * (-2.0 * r).exp() / PI), 2.0).unwrap();
        let a = moment_bound_check(&one, 5.0 / 3.0, 2.0).unwrap();
        let b = moment_bound_check(&two, 5.0 / 3.0, 2.0).unwrap();
        let factor = 2f64.powf(5.0 / 3.0);
        assert!((b.check.lhs / a.check.lhs / factor - 1.0).abs() < 1e-9);
        assert!((b.check.rhs / a.check.rhs / factor - 1.0).abs() < 1e-9);
        assert_eq!(a.check.slack.signum(), b.check.slack.signum());
        // other exponents stay homogeneous too
        for (aa, alpha) in [(1.5, 1.0), (2.0, 3.0), (3.0, 0.5)] {
            let a = moment_bound_check(&one, aa, alpha).unwrap();
            let b = moment_bound_check(&two, aa, alpha).unwrap();
            let factor = 2f64.powf(aa);
            assert!((b.check.rhs / a.check.rhs / factor - 1.0).abs() < 1e-9);
            assert!(a.check.holds && b.check.holds);
        }
    }

    #[test]
    fn chain_reproduces_heisenberg_bound() {
        let g = make_log_grid(1e-6, 60.0, 4000).unwrap();
        for (n, alpha) in [(1.0, 2.0), (3.0, 1.0), (7.0, 4.0)] {
            let f = RadialFunction::from_fn(&g, |r| n * (-2.0 * r).exp() / PI);
            let rho = RadialDensity::new(3, f, n).unwrap();
            let lt = lieb_thirring_check(&rho, 1.0, 2, 1.0).unwrap();
            let mb = moment_bound_check(&rho, 5.0 / 3.0, alpha).unwrap();
            let chained = chained_heisenberg_bound(&lt, &mb, 3).unwrap();
            let direct = bounds::heisenberg_lower_bound(&BoundQuery::new(3.0, n as u64, 2).with_alpha(alpha)).unwrap();
            assert!((chained / direct - 1.0).abs() < 1e-8);
        }
        let rho = hydrogen();
        let lt = lieb_thirring_check(&rho, 1.0, 2, 1.0).unwrap();
        let mb = moment_bound_check(&rho, 2.0, 2.0).unwrap();
        assert!(chained_heisenberg_bound(&lt, &mb, 3).is_err());
    }

    #[test]
    fn scaling_covariance() {
        let g = make_log_grid(1e-7, 60.0, 4000).unwrap();
        let base = |r: f64| (-r * r).exp() * (1.0 + r) / 1.0;
        let lambda = 2.0f64;
        let a = RadialDensity::normalized(3, RadialFunction::from_fn(&g, base), 1.0).unwrap();
        let scale = a.function().values()[0] / base(g.abscissae()[0]);
        let b = RadialDensity::new(
            3,
            RadialFunction::from_fn(&g, |r| scale * lambda.powi(3) * base(lambda * r)),
            1.0,
        )
        .unwrap();
        for alpha in [1.0, 2.0, 3.0] {
            let ra = radial_moment(&a, alpha).unwrap();
            let rb = radial_moment(&b, alpha).unwrap();
            assert!((rb / ra * lambda.powf(alpha) - 1.0).abs() < 1e-6);
        }
        let fa = fisher_spherical(&a).unwrap().value;
        let fb = fisher_spherical(&b).unwrap().value;
        assert!((fb / fa / (lambda * lambda) - 1.0).abs() < 1e-6);
        for aa in [5.0 / 3.0, 2.0] {
            let wa = entropic_moment(&a, aa).unwrap();
            let wb = entropic_moment(&b, aa).unwrap();
            assert!((wb / wa / lambda.powf(3.0 * (aa - 1.0)) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn summary_and_product_checks() {
        let rho = hydrogen();
        let pg = make_log_grid(1e-4, 100.0, 4000).unwrap();
        let gamma = RadialDensity::new(3, RadialFunction::from_fn(&pg, |p| 8.0 / (PI * PI) * (1.0 + p * p).powi(-4)), 1.0).unwrap();
        let s = DensitySummary::compute(&rho, &gamma, &[0.0, 2.0], &[5.0 / 3.0]).unwrap();
        assert!((s.moment(0.0).unwrap() - 1.0).abs() < 1e-9);
        assert!((s.p2 - 1.0).abs() < 1e-6);
        // nodeless s state: I[ρ] = 4⟨p²⟩, I[γ] = 4⟨r²⟩
        assert!((s.fisher_position / (4.0 * s.p2) - 1.0).abs() < 1e-3);
        assert!((s.fisher_momentum / (4.0 * s.moment(2.0).unwrap()) - 1.0).abs() < 1e-3);
        let q = BoundQuery::electrons(1);
        let h = heisenberg_check(s.moment(2.0).unwrap(), s.p2, &q).unwrap();
        assert!(h.holds && (h.lhs - 3.0).abs() < 1e-5);
        let f = fisher_check(s.fisher_position, s.fisher_momentum, &q).unwrap();
        assert!(f.holds && (f.lhs - 48.0).abs() < 1e-3);
    }

    #[test]
    fn report_tolerance() {
        assert!(InequalityReport::new("x", 1.0, 1.0 + 5e-10).holds);
        assert!(!InequalityReport::new("x", 1.0, 1.0 + 5e-9).holds);
        assert!(InequalityReport::new("x", 1e6, 1e6 + 1e-4).holds);
    }
}
