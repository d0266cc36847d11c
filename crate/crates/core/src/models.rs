//! Closed-form reference systems: the hydrogenic ground state, the
//! isotropic harmonic-oscillator ground state, and fermionic shell filling
//! of the three-dimensional oscillator.

use crate::bounds::{self, BoundQuery};
use crate::error::{domain, Result};
use crate::functionals::{fisher_spherical, radial_moment, RadialDensity};
use crate::radial::{RadialFunction, RadialGrid};
use crate::special::log_gamma;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    Hydrogenic { z: f64 },
    Oscillator { omega: f64 },
}

/// Exact single-particle functionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactValues {
    pub r2: f64,
    pub p2: f64,
    pub fisher_position: f64,
    pub fisher_momentum: f64,
}

impl ExactValues {
    pub fn heisenberg_product(&self) -> f64 {
        self.r2 * self.p2
    }

    pub fn fisher_product(&self) -> f64 {
        self.fisher_position * self.fisher_momentum
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelReference {
    pub kind: ModelKind,
    pub d: u32,
    pub exact: ExactValues,
}

/// Hydrogenic 1s state of nuclear charge `z` in three dimensions.
pub fn hydrogenic_reference(z: f64) -> Result<ModelReference> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain("hydrogenic_reference", format!("Z must be > 0, got {z}")));
    }
    Ok(ModelReference {
        kind: ModelKind::Hydrogenic { z },
        d: 3,
        exact: ExactValues {
            r2: 3.0 / (z * z),
            p2: z * z,
            fisher_position: 4.0 * z * z,
            fisher_momentum: 12.0 / (z * z),
        },
    })
}

/// Ground state of the `d`-dimensional isotropic oscillator of frequency
/// `omega` (unit mass).
pub fn oscillator_reference(omega: f64, d: u32) -> Result<ModelReference> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(domain("oscillator_reference", format!("omega must be > 0, got {omega}")));
    }
    if d == 0 {
        return Err(domain("oscillator_reference", "dimension must be >= 1"));
    }
    let d_f = d as f64;
    Ok(ModelReference {
        kind: ModelKind::Oscillator { omega },
        d,
        exact: ExactValues {
            r2: d_f / (2.0 * omega),
            p2: d_f * omega / 2.0,
            fisher_position: 2.0 * d_f * omega,
            fisher_momentum: 2.0 * d_f / omega,
        },
    })
}

impl ModelReference {
    /// `ρ(r)` on `grid`, normalized to one particle.
    pub fn position_density(&self, grid: &Arc<RadialGrid>) -> Result<RadialDensity> {
        let f = match self.kind {
            ModelKind::Hydrogenic { z } => {
                let c = z.powi(3) / PI;
                RadialFunction::from_fn(grid, |r| c * (-2.0 * z * r).exp())
            }
            ModelKind::Oscillator { omega } => {
                let c = (omega / PI).powf(0.5 * self.d as f64);
                RadialFunction::from_fn(grid, |r| c * (-omega * r * r).exp())
            }
        };
        RadialDensity::new(self.d, f, 1.0)
    }

    /// `γ(p)` on `grid`, normalized to one particle.
    pub fn momentum_density(&self, grid: &Arc<RadialGrid>) -> Result<RadialDensity> {
        let f = match self.kind {
            ModelKind::Hydrogenic { z } => {
                let c = 8.0 * z.powi(5) / (PI * PI);
                let z2 = z * z;
                RadialFunction::from_fn(grid, |p| c * (z2 + p * p).powi(-4))
            }
            ModelKind::Oscillator { omega } => {
                let c = (PI * omega).powf(-0.5 * self.d as f64);
                RadialFunction::from_fn(grid, |p| c * (-p * p / omega).exp())
            }
        };
        RadialDensity::new(self.d, f, 1.0)
    }

    /// The four functionals recomputed from the gridded densities.
    pub fn numeric_values(&self) -> Result<ExactValues> {
        let rho = self.position_density(&self.position_grid()?)?;
        let gamma = self.momentum_density(&self.momentum_grid()?)?;
        Ok(ExactValues {
            r2: radial_moment(&rho, 2.0)?,
            p2: radial_moment(&gamma, 2.0)?,
            fisher_position: fisher_spherical(&rho)?.value,
            fisher_momentum: fisher_spherical(&gamma)?.value,
        })
    }

    /// A position grid resolving the state: fine near the origin, ending
    /// where the density is negligible.
    pub fn position_grid(&self) -> Result<Arc<RadialGrid>> {
        let scale = match self.kind {
            ModelKind::Hydrogenic { z } => 1.0 / z,
            ModelKind::Oscillator { omega } => 1.0 / omega.sqrt(),
        };
        let extent = match self.kind {
            ModelKind::Hydrogenic { .. } => 60.0,
            ModelKind::Oscillator { .. } => 12.0 + (self.d as f64).sqrt(),
        };
        crate::radial::make_log_grid(1e-6 * scale, extent * scale, 4000)
    }

    /// Momentum-space counterpart of [`ModelReference::position_grid`].
    pub fn momentum_grid(&self) -> Result<Arc<RadialGrid>> {
        match self.kind {
            // γ decays only as p^-8; the grid tail correction handles the rest
            ModelKind::Hydrogenic { z } => crate::radial::make_log_grid(1e-4 * z, 400.0 * z, 4000),
            ModelKind::Oscillator { omega } => {
                let s = omega.sqrt();
                crate::radial::make_log_grid(1e-6 * s, (12.0 + (self.d as f64).sqrt()) * s, 4000)
            }
        }
    }
}

/// Filling of every three-dimensional oscillator shell `n <= M` with `q`
/// fermions per orbital (`ω = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellFillingResult {
    pub m: u32,
    pub q: u32,
    pub n: u64,
    pub r2_total: f64,
    pub p2_total: f64,
    pub product: f64,
    pub bound: f64,
    pub ratio: f64,
}

pub fn oscillator_shell_filling(m: u32, q: u32) -> Result<ShellFillingResult> {
    if q == 0 {
        return Err(domain("oscillator_shell_filling", "q must be >= 1"));
    }
    let mm = m as u64;
    let n = q as u64 * (mm + 1) * (mm + 2) * (mm + 3) / 6;
    // Σ (n + 3/2)(n+1)(n+2)/2 = Σ (2n+3)(n+1)(n+2) / 4, summed in integers
    let twice_four: u128 = (0..=mm as u128).map(|k| (2 * k + 3) * (k + 1) * (k + 2)).sum();
    let r2_total = q as f64 * twice_four as f64 / 4.0;
    let p2_total = r2_total;
    let product = r2_total * p2_total;
    let bound = bounds::heisenberg_lower_bound(&BoundQuery::new(3.0, n, q))?;
    Ok(ShellFillingResult {
        m,
        q,
        n,
        r2_total,
        p2_total,
        product,
        bound,
        ratio: product / bound,
    })
}

/// Degeneracy `(n + d - 1)! / (n! (d - 1)!)` of oscillator shell `n` in
/// `d` dimensions.
pub fn oscillator_shell_degeneracy(n: u32, d: u32) -> Result<f64> {
    if d == 0 {
        return Err(domain("oscillator_shell_degeneracy", "dimension must be >= 1"));
    }
    let (n, d) = (n as f64, d as f64);
    Ok((log_gamma(n + d)? - log_gamma(n + 1.0)? - log_gamma(d)?).exp().round())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_reject_bad_parameters() {
        assert!(hydrogenic_reference(0.0).is_err());
        assert!(hydrogenic_reference(-1.0).is_err());
        assert!(oscillator_reference(0.0, 3).is_err());
        assert!(oscillator_reference(1.0, 0).is_err());
        assert!(oscillator_shell_filling(0, 0).is_err());
    }

    #[test]
    fn exact_products() {
        for z in [1.0, 2.0, 7.5] {
            let h = hydrogenic_reference(z).unwrap().exact;
            assert!((h.heisenberg_product() - 3.0).abs() < 1e-12);
            assert!((h.fisher_product() - 48.0).abs() < 1e-12);
        }
        for omega in [0.5, 1.0, 3.0] {
            let o = oscillator_reference(omega, 3).unwrap().exact;
            assert!((o.heisenberg_product() - 2.25).abs() < 1e-12);
            assert!((o.fisher_product() - 36.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gridded_values_match() {
        for m in [hydrogenic_reference(1.0).unwrap(), oscillator_reference(1.0, 3).unwrap()] {
            let (e, v) = (m.exact, m.numeric_values().unwrap());
            for (a, b) in [(e.r2, v.r2), (e.p2, v.p2), (e.fisher_position, v.fisher_position), (e.fisher_momentum, v.fisher_momentum)] {
                assert!((b / a - 1.0).abs() < 1e-6, "{a} {b}");
            }
        }
    }

    #[test]
    fn filling_counts() {
        let first = oscillator_shell_filling(0, 2).unwrap();
        assert_eq!(first.n, 2);
        assert!((first.product - 9.0).abs() < 1e-12);
        let last = oscillator_shell_filling(20, 2).unwrap();
        assert_eq!(last.n, 3542);
        assert!((last.r2_total - 2.0 * 58443.0 / 2.0).abs() < 1e-9);
        for m in 0..10 {
            let total: f64 = (0..=m).map(|n| oscillator_shell_degeneracy(n, 3).unwrap()).sum();
            assert_eq!(oscillator_shell_filling(m, 1).unwrap().n as f64, total);
        }
    }
}
