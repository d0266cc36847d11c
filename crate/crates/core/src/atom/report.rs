//! Orbitals on radial grids, momentum-space orbitals, and the per-atom
//! uncertainty report.

use super::config::{ground_configuration, MAX_Z};
use super::scf::{solve_atom, BasisOrbital, ScfOptions, ScfSolution, Spin};
use crate::bounds::{self, BoundQuery};
use crate::error::{Error, Result};
use crate::functionals::{
    fisher_check, fisher_spherical, heisenberg_check, lieb_thirring_check, moment_bound_check, radial_moment,
    InequalityReport, RadialDensity,
};
use crate::radial::{make_log_grid, transform_labelled, RadialFunction, RadialGrid};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::ops::RangeInclusive;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Position,
    Momentum,
}

/// One occupied orbital sampled on a grid: `u = rR(r)` in position space,
/// `w = pφ(p)` in momentum space.
#[derive(Debug, Clone)]
pub struct Orbital {
    pub n: u32,
    pub l: u32,
    pub spin: Option<Spin>,
    pub occupation: f64,
    pub eigenvalue: f64,
    pub u: RadialFunction,
}

impl Orbital {
    pub fn label(&self) -> String {
        BasisOrbital {
            n: self.n,
            l: self.l,
            spin: self.spin,
            occupation: self.occupation,
            eigenvalue: self.eigenvalue,
            coefficients: Vec::new(),
        }
        .label()
    }
}

#[derive(Debug, Clone)]
pub struct OrbitalSet {
    pub space: Space,
    pub orbitals: Vec<Orbital>,
    pub total_energy: f64,
    pub kinetic_energy: f64,
}

impl OrbitalSet {
    /// Samples the SCF orbitals on `grid`; points beyond the basis box get 0.
    pub fn from_solution(solution: &ScfSolution, grid: &Arc<RadialGrid>) -> Result<Self> {
        let basis = &solution.basis;
        let orbitals = solution
            .orbitals
            .iter()
            .map(|o| {
                let values = grid.abscissae().iter().map(|&r| basis.evaluate(&o.coefficients, r).0).collect();
                Ok(Orbital {
                    n: o.n,
                    l: o.l,
                    spin: o.spin,
                    occupation: o.occupation,
                    eigenvalue: o.eigenvalue,
                    u: RadialFunction::new(Arc::clone(grid), values)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            space: Space::Position,
            orbitals,
            total_energy: solution.total_energy,
            kinetic_energy: solution.kinetic_energy,
        })
    }

    pub fn grid(&self) -> Option<&Arc<RadialGrid>> {
        self.orbitals.first().map(|o| o.u.grid())
    }

    pub fn electrons(&self) -> f64 {
        self.orbitals.iter().map(|o| o.occupation).sum()
    }

    /// Spherically averaged density `Σ occ · u² / (4π x²)` normalized to N.
    pub fn density(&self) -> Result<RadialDensity> {
        let grid = self.grid().ok_or_else(|| Error::InvalidDensity("no orbitals".into()))?;
        let x = grid.abscissae();
        let mut rho = vec![0.0; x.len()];
        for o in &self.orbitals {
            for ((r, u), xi) in rho.iter_mut().zip(o.u.values()).zip(x) {
                *r += o.occupation * u * u / (4.0 * PI * xi * xi);
            }
        }
        RadialDensity::new(3, RadialFunction::new(Arc::clone(grid), rho)?, self.electrons())
    }

    /// Largest `|⟨u_i|u_j⟩ - δ_ij|` over pairs sharing `l` and spin.
    pub fn orthonormality_error(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for (i, a) in self.orbitals.iter().enumerate() {
            for b in &self.orbitals[i..] {
                let same_spin = a.spin.is_none() || b.spin.is_none() || a.spin == b.spin;
                if a.l != b.l || !same_spin {
                    continue;
                }
                let target = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
                worst = worst.max((a.u.inner(&b.u)? - target).abs());
            }
        }
        Ok(worst)
    }
}

/// Transforms every orbital to momentum space on `p_grid`.
pub fn momentum_orbitals(position: &OrbitalSet, p_grid: &Arc<RadialGrid>) -> Result<OrbitalSet> {
    if position.space != Space::Position {
        return Err(Error::InvalidDensity("orbitals are already in momentum space".into()));
    }
    let inputs: Vec<(&RadialFunction, u32)> = position.orbitals.iter().map(|o| (&o.u, o.l)).collect();
    let transformed = transform_labelled(&inputs, p_grid, |i| position.orbitals[i].label())?;
    let orbitals = position
        .orbitals
        .iter()
        .zip(transformed)
        .map(|(o, w)| Orbital { u: w, ..o.clone() })
        .collect();
    Ok(OrbitalSet {
        space: Space::Momentum,
        orbitals,
        total_energy: position.total_energy,
        kinetic_energy: position.kinetic_energy,
    })
}

/// Grids, solver and bound parameters of an atom report.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomOptions {
    pub scf: ScfOptions,
    /// The position grid starts at `r_min_scale / Z`.
    pub r_min_scale: f64,
    pub r_max: f64,
    pub n_points: usize,
    pub p_min: f64,
    /// The momentum grid ends at `p_max_scale · Z`.
    pub p_max_scale: f64,
    pub n_p_points: usize,
    pub q: u32,
    pub c_d: f64,
    pub l: u32,
    pub m_abs: u32,
    pub alpha: f64,
    /// Entropic exponent of the moment-bound check.
    pub entropic_a: f64,
}

impl Default for AtomOptions {
    fn default() -> Self {
        Self {
            scf: ScfOptions::default(),
            r_min_scale: 1e-6,
            r_max: 60.0,
            n_points: 4000,
            p_min: 1e-4,
            p_max_scale: 40.0,
            n_p_points: 1200,
            q: 2,
            c_d: 1.0,
            l: 0,
            m_abs: 0,
            alpha: 2.0,
            entropic_a: 5.0 / 3.0,
        }
    }
}

impl AtomOptions {
    pub fn position_grid(&self, z: u32) -> Result<Arc<RadialGrid>> {
        make_log_grid(self.r_min_scale / z as f64, self.r_max, self.n_points)
    }

    pub fn momentum_grid(&self, z: u32) -> Result<Arc<RadialGrid>> {
        make_log_grid(self.p_min, self.p_max_scale * z as f64, self.n_p_points)
    }

    pub fn query(&self, n: u64) -> BoundQuery {
        BoundQuery::new(3.0, n, self.q)
            .with_alpha(self.alpha)
            .with_angular(self.l, self.m_abs)
            .with_c_d(self.c_d)
    }
}

/// Every per-atom quantity behind the Heisenberg and Fisher studies.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomScanRow {
    pub z: u32,
    pub n: u64,
    pub r2: f64,
    /// `⟨p²⟩` from the momentum density.
    pub p2: f64,
    /// `⟨p²⟩ = 2T` from the position-space kinetic energy.
    pub p2_kinetic: f64,
    pub heisenberg_product: f64,
    pub heisenberg_bound: f64,
    pub heisenberg_ratio: f64,
    pub fisher_rho: f64,
    pub fisher_gamma: f64,
    pub fisher_product: f64,
    pub fisher_bound: f64,
    /// `log10(I[ρ] I[γ] / N^{8/3})`.
    pub fisher_log10_scaled: f64,
    pub total_energy: f64,
    pub virial_ratio: f64,
    pub converged: bool,
    pub iterations: usize,
    pub lieb_thirring: Option<InequalityReport>,
    pub moment_bound: Option<InequalityReport>,
    pub heisenberg: Option<InequalityReport>,
    pub fisher: Option<InequalityReport>,
    pub orthonormality_error: f64,
    pub failure: Option<String>,
}

impl AtomScanRow {
    /// Row for an atom whose pipeline failed.
    pub fn failed(z: u32, error: &Error) -> Self {
        let nan = f64::NAN;
        Self {
            z,
            n: z as u64,
            r2: nan,
            p2: nan,
            p2_kinetic: nan,
            heisenberg_product: nan,
            heisenberg_bound: nan,
            heisenberg_ratio: nan,
            fisher_rho: nan,
            fisher_gamma: nan,
            fisher_product: nan,
            fisher_bound: nan,
            fisher_log10_scaled: nan,
            total_energy: match error {
                Error::NotConverged { last_energy, .. } => *last_energy,
                _ => nan,
            },
            virial_ratio: nan,
            converged: false,
            iterations: match error {
                Error::NotConverged { iterations, .. } => *iterations,
                _ => 0,
            },
            lieb_thirring: None,
            moment_bound: None,
            heisenberg: None,
            fisher: None,
            orthonormality_error: nan,
            failure: Some(error.to_string()),
        }
    }

    /// Relative gap between the two `⟨p²⟩` routes.
    pub fn p2_route_gap(&self) -> f64 {
        (self.p2 / self.p2_kinetic - 1.0).abs()
    }

    /// True when a converged row breaks one of the checked inequalities.
    pub fn violates_bound(&self) -> bool {
        self.converged
            && [&self.heisenberg, &self.fisher, &self.lieb_thirring, &self.moment_bound]
                .iter()
                .any(|r| r.map_or(false, |r| !r.holds))
    }
}

/// Full pipeline for one atom: SCF, both densities, functionals, checks.
pub fn atom_report(z: u32, options: &AtomOptions) -> Result<AtomScanRow> {
    let config = ground_configuration(z)?;
    let solution = solve_atom(&config, &options.scf)?;
    report_from_solution(&solution, options)
}

/// Functionals and checks for an already converged solution.
pub fn report_from_solution(solution: &ScfSolution, options: &AtomOptions) -> Result<AtomScanRow> {
    let z = solution.configuration.z;
    let position = OrbitalSet::from_solution(solution, &options.position_grid(z)?)?;
    let momentum = momentum_orbitals(&position, &options.momentum_grid(z)?)?;
    let rho = position.density()?;
    let gamma = momentum.density()?;
    let n = position.electrons().round() as u64;
    let query = options.query(n);

    let r2 = radial_moment(&rho, 2.0)?;
    let r_alpha = radial_moment(&rho, options.alpha)?;
    let p2 = radial_moment(&gamma, 2.0)?;
    let fisher_rho = fisher_spherical(&rho)?.value;
    let fisher_gamma = fisher_spherical(&gamma)?.value;

    let heisenberg = heisenberg_check(r_alpha, p2, &query)?;
    let fisher = fisher_check(fisher_rho, fisher_gamma, &query)?;
    let lt = lieb_thirring_check(&rho, p2, options.q, options.c_d)?;
    let mb = moment_bound_check(&rho, options.entropic_a, options.alpha)?;
    let nf = n as f64;

    Ok(AtomScanRow {
        z,
        n,
        r2,
        p2,
        p2_kinetic: 2.0 * solution.kinetic_energy,
        heisenberg_product: heisenberg.lhs,
        heisenberg_bound: heisenberg.rhs,
        heisenberg_ratio: heisenberg.ratio,
        fisher_rho,
        fisher_gamma,
        fisher_product: fisher.lhs,
        fisher_bound: fisher.rhs,
        fisher_log10_scaled: (fisher.lhs / nf.powf(8.0 / 3.0)).log10(),
        total_energy: solution.total_energy,
        virial_ratio: solution.virial_ratio(),
        converged: true,
        iterations: solution.iterations,
        lieb_thirring: Some(lt.check),
        moment_bound: Some(mb.check),
        heisenberg: Some(heisenberg),
        fisher: Some(fisher),
        orthonormality_error: position.orthonormality_error()?,
        failure: None,
    })
}

/// Reports for every atom in `z_range`, in order of Z. Atoms run in
/// parallel; a failed atom yields a non-converged row instead of an error.
pub fn scan_periodic_table(z_range: RangeInclusive<u32>, options: &AtomOptions) -> Result<Vec<AtomScanRow>> {
    if *z_range.start() < 1 || *z_range.end() > MAX_Z || z_range.is_empty() {
        return Err(Error::InvalidConfiguration(format!(
            "Z range {}..={} must lie within 1..={MAX_Z}",
            z_range.start(),
            z_range.end()
        )));
    }
    let zs: Vec<u32> = z_range.collect();
    Ok(zs
        .par_iter()
        .map(|&z| match atom_report(z, options) {
            Ok(row) => row,
            Err(e) => {
                log::warn!("Z = {z}: {e}");
                AtomScanRow::failed(z, &e)
            }
        })
        .collect())
}

/// Constant Heisenberg bound divided by `N^{8/3}` (independent of N for
/// `α = 2`, `d = 3`).
pub fn scaled_heisenberg_bound(options: &AtomOptions) -> Result<f64> {
    bounds::heisenberg_lower_bound(&options.query(1))
}
