//! Spin-polarized central-field self-consistent field for neutral atoms.
//!
//! Orbitals `u_{nl}(r) = r R_{nl}(r)` are expanded in B-splines on `[0, R]`.
//! Each `(l, σ)` channel has its own Fock matrix
//! `F = T_l - Z/r + J[ρ] - K_σ`, where `J` is the Hartree potential of the
//! spherically averaged total density and `K_σ` is the spherically averaged
//! exchange with the same-spin electrons. Subshells are split over spins by
//! Hund's rule. For closed-shell atoms this is restricted Hartree–Fock; for
//! one electron it is exact. A local Slater exchange is available instead of
//! `K_σ`.

use super::basis::{graded_breakpoints, symmetrize_upper, BSplineBasis};
use super::config::Configuration;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use std::collections::VecDeque;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Up => "up",
            Spin::Down => "down",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeModel {
    /// Nonlocal exchange with the same-spin orbitals.
    HartreeFock,
    /// Local exchange `v_σ = -(6ρ_σ/π)^{1/3}`.
    Slater,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScfOptions {
    pub exchange: ExchangeModel,
    /// Fraction of the new Fock matrix taken in a damped step.
    pub mixing: f64,
    pub max_iter: usize,
    /// Convergence threshold on successive total energies (hartree).
    pub energy_tol: f64,
    /// Convergence threshold on the largest element of the orthogonalized
    /// commutator `FD - DF`.
    pub residual_tol: f64,
    /// Number of stored iterates for DIIS extrapolation; 0 disables it.
    pub diis_depth: usize,
    /// Box radius; orbitals vanish at and beyond it.
    pub r_max: f64,
    pub intervals: usize,
    pub order: usize,
    pub nodes_per_interval: usize,
    /// First breakpoint is `first_break / Z`.
    pub first_break: f64,
}

impl Default for ScfOptions {
    fn default() -> Self {
        Self {
            exchange: ExchangeModel::HartreeFock,
            mixing: 0.3,
            max_iter: 300,
            energy_tol: 1e-7,
            residual_tol: 1e-6,
            diis_depth: 8,
            r_max: 60.0,
            intervals: 110,
            order: 8,
            nodes_per_interval: 14,
            first_break: 0.01,
        }
    }
}

impl ScfOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfiguration(format!("SCF options: {m}")));
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return bad("mixing must lie in (0, 1]");
        }
        if !(self.energy_tol > 0.0) || !(self.residual_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be >= 1");
        }
        if !(self.r_max > 0.0) || !(self.first_break > 0.0) {
            return bad("r_max and first_break must be positive");
        }
        if self.order < 6 || self.intervals < 10 || self.nodes_per_interval < self.order {
            return bad("basis too small (order >= 6, intervals >= 10, nodes >= order)");
        }
        Ok(())
    }
}

/// A converged orbital in the B-spline basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisOrbital {
    pub n: u32,
    pub l: u32,
    /// `None` when both spins share the spatial orbital.
    pub spin: Option<Spin>,
    pub occupation: f64,
    pub eigenvalue: f64,
    /// Coefficients over the full basis.
    pub coefficients: Vec<f64>,
}

impl BasisOrbital {
    pub fn label(&self) -> String {
        let letter = ['s', 'p', 'd', 'f', 'g'].get(self.l as usize).copied().unwrap_or('?');
        match self.spin {
            Some(s) => format!("{}{}({s})", self.n, letter),
            None => format!("{}{}", self.n, letter),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScfSolution {
    pub configuration: Configuration,
    pub basis: Arc<BSplineBasis>,
    pub orbitals: Vec<BasisOrbital>,
    pub total_energy: f64,
    pub kinetic_energy: f64,
    pub potential_energy: f64,
    pub iterations: usize,
    pub energy_change: f64,
    pub residual: f64,
    pub exchange: ExchangeModel,
}

impl ScfSolution {
    /// `⟨V⟩ / ⟨T⟩`, equal to `-2` for an exact stationary state.
    pub fn virial_ratio(&self) -> f64 {
        self.potential_energy / self.kinetic_energy
    }
}

/// Builds the default basis for nuclear charge `z`.
pub fn atom_basis(z: u32, options: &ScfOptions) -> Result<BSplineBasis> {
    let first = options.first_break / z as f64;
    let breaks = graded_breakpoints(first, options.r_max, options.intervals)?;
    BSplineBasis::new(breaks, options.order, options.nodes_per_interval)
}

struct Occupied {
    n: u32,
    /// position among the channel's eigenvectors
    index: usize,
    occupation: f64,
}

struct Channel {
    l: u32,
    spin: Spin,
    offset: usize,
    dim: usize,
    /// `L^{-1}` for `S = L Lᵀ`
    linv: DMatrix<f64>,
    core: DMatrix<f64>,
    kinetic: DMatrix<f64>,
    occupied: Vec<Occupied>,
    /// position in `occupied` of the one partially filled shell, if any
    open: Option<usize>,
    /// orthonormal eigenvectors and eigenvalues of the last diagonalization
    vectors: DMatrix<f64>,
    eigenvalues: Vec<f64>,
}

impl Channel {
    fn coefficients(&self, index: usize) -> DVector<f64> {
        self.linv.tr_mul(&self.vectors.column(index).into_owned())
    }

    fn full_coefficients(&self, index: usize, nb: usize) -> Vec<f64> {
        let c = self.coefficients(index);
        let mut full = vec![0.0; nb];
        full[self.offset..self.offset + self.dim].copy_from_slice(c.as_slice());
        full
    }

    /// Projector on the occupied orbitals, with the open shell at half
    /// weight so that its rotations against closed shells show up in the
    /// commutator.
    fn density_projector(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.dim, self.dim);
        for (i, o) in self.occupied.iter().enumerate() {
            let y = self.vectors.column(o.index);
            let w = if self.open == Some(i) { 0.5 } else { 1.0 };
            d.ger(w, &y, &y, 1.0);
        }
        d
    }

    fn diagonalize(&mut self, f_orth: &DMatrix<f64>) -> Result<()> {
        let eig = SymmetricEigen::new(f_orth.clone());
        let mut idx: Vec<usize> = (0..self.dim).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut vectors = DMatrix::zeros(self.dim, self.dim);
        for (col, &i) in idx.iter().enumerate() {
            let mut v = eig.eigenvectors.column(i).into_owned();
            // fix the sign: positive near the origin
            let c = self.linv.tr_mul(&v);
            if let Some(first) = c.iter().find(|x| x.abs() > 1e-12 * c.amax()) {
                if *first < 0.0 {
                    v.neg_mut();
                }
            }
            vectors.set_column(col, &v);
        }
        if vectors.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical("eigenvectors are not finite".into()));
        }
        self.eigenvalues = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
        self.vectors = vectors;
        Ok(())
    }
}

/// `(l1 l2 l3; 0 0 0)²`.
pub fn three_j_zero_squared(l1: u32, l2: u32, l3: u32) -> f64 {
    let big = l1 + l2 + l3;
    if big % 2 == 1 || l3 > l1 + l2 || l1 > l2 + l3 || l2 > l1 + l3 {
        return 0.0;
    }
    let fact = |n: u32| (1..=n).fold(1.0f64, |a, k| a * k as f64);
    let g = big / 2;
    let ratio = fact(g) / (fact(g - l1) * fact(g - l2) * fact(g - l3));
    fact(big - 2 * l1) * fact(big - 2 * l2) * fact(big - 2 * l3) / fact(big + 1) * ratio * ratio
}

/// Thomas–Fermi screened potential with the `-1/r` tail, used as the
/// starting point.
fn screened_potential(z: f64, r: f64) -> f64 {
    let x = r * z.cbrt() / 0.885_341_377;
    let s = x.sqrt();
    let phi = 1.0
        / (1.0 + 0.02747 * s + 1.243 * x - 0.1486 * x * s + 0.2302 * x * x + 0.007298 * x * x * s
            + 0.006944 * x * x * x);
    -(1.0 + (z - 1.0) * phi) / r
}

struct Workspace<'a> {
    basis: &'a BSplineBasis,
    gin: Vec<f64>,
    gout: Vec<f64>,
    cin: Vec<f64>,
    cout: Vec<f64>,
}

impl<'a> Workspace<'a> {
    fn new(basis: &'a BSplineBasis) -> Self {
        Self {
            basis,
            gin: Vec::new(),
            gout: Vec::new(),
            cin: Vec::new(),
            cout: Vec::new(),
        }
    }

    /// `V_H(r) = (1/r) ∫_0^r P + ∫_r^∞ P/s` at the quadrature points.
    fn hartree(&mut self, density: &[f64]) -> Vec<f64> {
        let b = self.basis;
        let x = b.points();
        let last = b.intervals() - 1;
        self.gout.clear();
        self.gout.extend(density.iter().zip(x).map(|(p, x)| p / x));
        let inner = b.cumulative(density, 0, last, &mut self.cin);
        let _ = inner;
        let outer = b.cumulative(&self.gout, 0, last, &mut self.cout);
        (0..x.len())
            .map(|p| self.cin[p] / x[p] + (outer - self.cout[p]))
            .collect()
    }

    /// `Y^k(r)/r = r^{-k-1} ∫_0^r s^k P + r^k ∫_r^∞ s^{-k-1} P` at the
    /// quadrature points.
    fn multipole(&mut self, density: &[f64], k: i32) -> Vec<f64> {
        let b = self.basis;
        let x = b.points();
        let last = b.intervals() - 1;
        self.gin.clear();
        self.gin.extend(density.iter().zip(x).map(|(p, x)| p * x.powi(k)));
        self.gout.clear();
        self.gout.extend(density.iter().zip(x).map(|(p, x)| p * x.powi(-k - 1)));
        b.cumulative(&self.gin, 0, last, &mut self.cin);
        let outer = b.cumulative(&self.gout, 0, last, &mut self.cout);
        (0..x.len())
            .map(|p| self.cin[p] * x[p].powi(-k - 1) + x[p].powi(k) * (outer - self.cout[p]))
            .collect()
    }

    /// `K_ab = ∫∫ B_a(r) P(r) r_<^k / r_>^{k+1} P(s) B_b(s) dr ds`.
    fn exchange(&mut self, pj: &[f64], k: i32) -> DMatrix<f64> {
        let b = self.basis;
        let nb = b.len();
        let ord = b.order();
        let ng = b.nodes_per_interval();
        let x = b.points();
        let w = b.weights();
        let rk: Vec<f64> = x.iter().map(|x| x.powi(k)).collect();
        let rk1: Vec<f64> = x.iter().map(|x| x.powi(-k - 1)).collect();
        let mut tin = vec![0.0; nb];
        let mut tout = vec![0.0; nb];
        let mut ys: Vec<Vec<f64>> = Vec::with_capacity(nb);
        for s in 0..nb {
            let (lo, hi) = b.support(s);
            self.gin.clear();
            self.gout.clear();
            for p in lo * ng..(hi + 1) * ng {
                let f = b.values_at(p)[s - p / ng] * pj[p];
                self.gin.push(rk[p] * f);
                self.gout.push(rk1[p] * f);
            }
            tin[s] = b.cumulative(&self.gin, lo, hi, &mut self.cin);
            tout[s] = b.cumulative(&self.gout, lo, hi, &mut self.cout);
            let base = lo * ng;
            ys.push(
                (0..self.cin.len())
                    .map(|i| rk1[base + i] * self.cin[i] + rk[base + i] * (tout[s] - self.cout[i]))
                    .collect(),
            );
        }
        let mut m = DMatrix::zeros(nb, nb);
        for s in 0..nb {
            let (slo, shi) = b.support(s);
            for a in s..(s + ord).min(nb) {
                let (alo, ahi) = b.support(a);
                let mut acc = 0.0;
                for p in alo * ng..(ahi + 1) * ng {
                    let j = p / ng;
                    let y = if j > shi {
                        rk1[p] * tin[s]
                    } else if j < slo {
                        rk[p] * tout[s]
                    } else {
                        ys[s][p - slo * ng]
                    };
                    acc += w[p] * b.values_at(p)[a - j] * pj[p] * y;
                }
                m[(s, a)] = acc;
            }
            for a in s + ord..nb {
                m[(s, a)] = tin[s] * tout[a];
            }
        }
        symmetrize_upper(&mut m);
        m
    }
}

struct Solver<'a> {
    z: u32,
    config: &'a Configuration,
    basis: &'a BSplineBasis,
    options: &'a ScfOptions,
    channels: Vec<Channel>,
    /// closed-shell atoms solve only the spin-up channels
    restricted: bool,
}

struct Evaluated {
    fock: Vec<DMatrix<f64>>,
    energy: f64,
    kinetic: f64,
}

impl<'a> Solver<'a> {
    fn new(config: &'a Configuration, basis: &'a BSplineBasis, options: &'a ScfOptions) -> Result<Self> {
        let z = config.z;
        let nb = basis.len();
        let ones = vec![1.0; basis.points().len()];
        let inv: Vec<f64> = basis.points().iter().map(|x| 1.0 / x).collect();
        let inv2: Vec<f64> = inv.iter().map(|v| v * v).collect();
        let overlap = basis.local_matrix(&ones);
        let grad = basis.derivative_matrix();
        let nuclear = basis.local_matrix(&inv) * (-(z as f64));
        let centrifugal = basis.local_matrix(&inv2);

        let restricted = config.shells.iter().all(|s| {
            let (u, d) = s.spin_occupations();
            u == d
        });
        let spins: &[Spin] = if restricted { &[Spin::Up] } else { &[Spin::Up, Spin::Down] };
        let mut channels = Vec::new();
        for &spin in spins {
            for l in 0..=config.max_l() {
                let occupied: Vec<Occupied> = config
                    .shells
                    .iter()
                    .filter(|s| s.l == l)
                    .filter_map(|s| {
                        let (u, d) = s.spin_occupations();
                        let w = if spin == Spin::Up { u } else { d };
                        (w > 0.0).then(|| Occupied {
                            n: s.n,
                            index: (s.n - l - 1) as usize,
                            occupation: w,
                        })
                    })
                    .collect();
                if occupied.is_empty() {
                    continue;
                }
                let offset = l as usize + 1;
                let dim = nb - 1 - offset;
                if occupied.iter().any(|o| o.index >= dim) {
                    return Err(Error::InvalidConfiguration(format!("basis too small for Z = {z}")));
                }
                let range = |m: &DMatrix<f64>| m.view((offset, offset), (dim, dim)).into_owned();
                let s = range(&overlap);
                let chol = s
                    .cholesky()
                    .ok_or_else(|| Error::Numerical("overlap matrix is not positive definite".into()))?;
                let linv = chol
                    .l()
                    .solve_lower_triangular(&DMatrix::identity(dim, dim))
                    .ok_or_else(|| Error::Numerical("singular overlap factor".into()))?;
                let capacity = (2 * l + 1) as f64;
                let partial: Vec<usize> = (0..occupied.len())
                    .filter(|&i| occupied[i].occupation < capacity - 1e-12)
                    .collect();
                // the per-spin average needs a single open shell per channel
                let open = match (options.exchange, partial.as_slice()) {
                    (ExchangeModel::HartreeFock, [i]) if l > 0 => Some(*i),
                    (ExchangeModel::HartreeFock, [_, _, ..]) => {
                        return Err(Error::InvalidConfiguration(format!(
                            "Z = {z}: more than one open shell with l = {l}"
                        )))
                    }
                    _ => None,
                };
                let ll = (l * (l + 1)) as f64;
                let kinetic = range(&(&grad * 0.5 + &centrifugal * (0.5 * ll)));
                let core = &kinetic + range(&nuclear);
                channels.push(Channel {
                    l,
                    spin,
                    offset,
                    dim,
                    linv,
                    core,
                    kinetic,
                    occupied,
                    open,
                    vectors: DMatrix::zeros(dim, dim),
                    eigenvalues: Vec::new(),
                });
            }
        }
        Ok(Self {
            z,
            config,
            basis,
            options,
            channels,
            restricted,
        })
    }

    fn orthogonalize(&self, c: usize, m: &DMatrix<f64>) -> DMatrix<f64> {
        let li = &self.channels[c].linv;
        li * m * li.transpose()
    }

    fn guess(&self) -> Vec<DMatrix<f64>> {
        let v: Vec<f64> = self
            .basis
            .points()
            .iter()
            .map(|&r| screened_potential(self.z as f64, r) + self.z as f64 / r)
            .collect();
        let m = self.basis.local_matrix(&v);
        self.channels
            .iter()
            .enumerate()
            .map(|(i, ch)| {
                let f = &ch.core + m.view((ch.offset, ch.offset), (ch.dim, ch.dim));
                self.orthogonalize(i, &f)
            })
            .collect()
    }

    fn spin_factor(&self) -> f64 {
        if self.restricted {
            2.0
        } else {
            1.0
        }
    }

    /// Fock matrices (orthogonalized), total and kinetic energy of the
    /// current orbitals.
    fn evaluate(&self, ws: &mut Workspace) -> Evaluated {
        let basis = self.basis;
        let nb = basis.len();
        let npts = basis.points().len();
        let factor = self.spin_factor();

        // occupied orbitals at the quadrature points
        let mut samples: Vec<Vec<(Vec<f64>, f64, u32)>> = Vec::with_capacity(self.channels.len());
        let mut density = vec![0.0; npts];
        let mut spin_density = [vec![0.0; npts], vec![0.0; npts]];
        for ch in &self.channels {
            let mut list = Vec::new();
            for o in &ch.occupied {
                let u = basis.at_points(&ch.full_coefficients(o.index, nb));
                let sd = &mut spin_density[ch.spin as usize];
                for p in 0..npts {
                    let v = o.occupation * u[p] * u[p];
                    density[p] += factor * v;
                    sd[p] += v;
                }
                list.push((u, o.occupation, ch.l));
            }
            samples.push(list);
        }
        let hartree = basis.local_matrix(&ws.hartree(&density));

        let mut exchange: Vec<DMatrix<f64>> =
            self.channels.iter().map(|ch| DMatrix::zeros(ch.dim, ch.dim)).collect();
        let mut exchange_energy = 0.0;
        match self.options.exchange {
            ExchangeModel::HartreeFock => {
                for (src, src_ch) in self.channels.iter().enumerate() {
                    for (u, w, lj) in &samples[src] {
                        let kmax = lj + self.config.max_l();
                        for k in 0..=kmax {
                            let targets: Vec<(usize, f64)> = self
                                .channels
                                .iter()
                                .enumerate()
                                .filter(|(_, ch)| ch.spin == src_ch.spin)
                                .map(|(i, ch)| (i, w * three_j_zero_squared(ch.l, k, *lj)))
                                .filter(|(_, c)| *c > 0.0)
                                .collect();
                            if targets.is_empty() {
                                continue;
                            }
                            let kmat = ws.exchange(u, k as i32);
                            for (i, c) in targets {
                                let ch = &self.channels[i];
                                exchange[i] += kmat.view((ch.offset, ch.offset), (ch.dim, ch.dim)) * c;
                            }
                        }
                    }
                }
                exchange.iter_mut().for_each(|m| m.neg_mut());
            }
            ExchangeModel::Slater => {
                let x = basis.points();
                let c = -(6.0 / PI).cbrt();
                for (s, sd) in spin_density.iter().enumerate() {
                    if self.channels.iter().all(|ch| ch.spin as usize != s) {
                        continue;
                    }
                    let rho: Vec<f64> = sd.iter().zip(x).map(|(p, x)| p / (4.0 * PI * x * x)).collect();
                    let v: Vec<f64> = rho.iter().map(|r| c * r.cbrt()).collect();
                    let m = basis.local_matrix(&v);
                    exchange_energy += factor
                        * 0.75
                        * rho
                            .iter()
                            .zip(x)
                            .zip(basis.weights())
                            .map(|((r, x), w)| w * 4.0 * PI * x * x * c * r.powf(4.0 / 3.0))
                            .sum::<f64>();
                    for (i, ch) in self.channels.iter().enumerate() {
                        if ch.spin as usize == s {
                            exchange[i] = m.view((ch.offset, ch.offset), (ch.dim, ch.dim)).into_owned();
                        }
                    }
                }
            }
        }

        let mut energy = 0.0;
        let mut kinetic = 0.0;
        let mut fock = Vec::with_capacity(self.channels.len());
        for (i, ch) in self.channels.iter().enumerate() {
            let j = hartree.view((ch.offset, ch.offset), (ch.dim, ch.dim));
            let f = &ch.core + j + &exchange[i];
            for o in &ch.occupied {
                let c = ch.coefficients(o.index);
                let h = c.dot(&(&ch.core * &c));
                let jj = c.dot(&(j * &c));
                let t = c.dot(&(&ch.kinetic * &c));
                kinetic += factor * o.occupation * t;
                energy += factor * o.occupation * (h + 0.5 * jj);
                if self.options.exchange == ExchangeModel::HartreeFock {
                    energy += factor * o.occupation * 0.5 * c.dot(&(&exchange[i] * &c));
                }
            }
            let mut f = self.orthogonalize(i, &f);
            if let Some(k) = ch.open {
                energy += self.open_shell_correction(ws, i, k, &samples[i][k].0, &mut f);
            }
            fock.push(f);
        }
        energy += exchange_energy;
        Evaluated { fock, energy, kinetic }
    }

    /// Removes the excess self-interaction of a partially filled spin
    /// shell. Density scaling gives the `n` electrons of the shell a pair
    /// energy `n²/2 · S`; averaging over the determinants of `n` electrons
    /// in `2l + 1` spin orbitals gives `n(n-1)/2 · (2l+1)/(2l) · S` with
    /// `S = Σ_k a_k F^k`, `a_0 = 2l/(2l+1)` and `a_k = -(l k l; 0 0 0)²`.
    /// The difference acts on the open orbital as a local potential; the
    /// Fock matrix is coupled so that its eigenvectors make the energy
    /// stationary against rotations into closed and virtual orbitals.
    /// Returns the energy correction.
    fn open_shell_correction(
        &self,
        ws: &mut Workspace,
        c: usize,
        k: usize,
        u: &[f64],
        fock: &mut DMatrix<f64>,
    ) -> f64 {
        let ch = &self.channels[c];
        let l = ch.l;
        let n = ch.occupied[k].occupation;
        let capacity = (2 * l + 1) as f64;
        let density: Vec<f64> = u.iter().map(|v| v * v).collect();
        let scale = -(capacity - n) / (2.0 * l as f64);
        let mut v = vec![0.0; density.len()];
        for kk in (0..=2 * l).step_by(2) {
            let a = if kk == 0 {
                2.0 * l as f64 / capacity
            } else {
                -three_j_zero_squared(l, kk, l)
            };
            for (acc, y) in v.iter_mut().zip(ws.multipole(&density, kk as i32)) {
                *acc += scale * a * y;
            }
        }
        let full = self.basis.local_matrix(&v);
        let delta = self.orthogonalize(c, &full.view((ch.offset, ch.offset), (ch.dim, ch.dim)).into_owned());

        let o = ch.vectors.column(ch.occupied[k].index).into_owned();
        let g = &delta * &o;
        let diag = o.dot(&g);
        let mut closed = DVector::zeros(ch.dim);
        for (i, occ) in ch.occupied.iter().enumerate() {
            if i != k {
                let y = ch.vectors.column(occ.index);
                closed += &y * y.dot(&g);
            }
        }
        let virt = &g - &closed - &o * diag;
        let beta = n / (n - capacity);
        let coupling = virt + closed * beta;
        *fock += &o * o.transpose() * diag;
        *fock += &coupling * o.transpose();
        *fock += &o * coupling.transpose();
        0.5 * n * diag
    }

    fn commutators(&self, fock: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
        self.channels
            .iter()
            .zip(fock)
            .map(|(ch, f)| {
                let d = ch.density_projector();
                f * &d - &d * f
            })
            .collect()
    }

    fn diagonalize(&mut self, fock: &[DMatrix<f64>]) -> Result<()> {
        for (ch, f) in self.channels.iter_mut().zip(fock) {
            ch.diagonalize(f)?;
        }
        Ok(())
    }

    fn run(mut self) -> Result<ScfSolution> {
        let opts = self.options;
        let mut ws = Workspace::new(self.basis);
        let mut used = self.guess();
        self.diagonalize(&used)?;
        let mut history: VecDeque<(Vec<DMatrix<f64>>, Vec<DMatrix<f64>>)> = VecDeque::new();
        let mut previous: Option<f64> = None;
        let mut last = (f64::NAN, f64::INFINITY, f64::INFINITY);
        for iteration in 1..=opts.max_iter {
            let eval = self.evaluate(&mut ws);
            let errors = self.commutators(&eval.fock);
            let residual = errors.iter().map(|e| e.amax()).fold(0.0, f64::max);
            let change = previous.map_or(f64::INFINITY, |p| (eval.energy - p).abs());
            log::trace!(
                "Z={} iter {iteration}: E = {:.10} dE = {change:.2e} residual = {residual:.2e}",
                self.z,
                eval.energy
            );
            if !eval.energy.is_finite() {
                break;
            }
            last = (eval.energy, change, residual);
            if change < opts.energy_tol && residual < opts.residual_tol {
                return Ok(self.finish(eval, iteration, change, residual));
            }
            previous = Some(eval.energy);

            if opts.diis_depth > 0 {
                history.push_back((eval.fock.clone(), errors));
                while history.len() > opts.diis_depth {
                    history.pop_front();
                }
            }
            // damped steps only until DIIS has two iterates to work with
            let next = if history.len() >= 2 {
                diis(&history).unwrap_or_else(|| damp(&used, &eval.fock, opts.mixing))
            } else {
                damp(&used, &eval.fock, opts.mixing)
            };
            self.diagonalize(&next)?;
            used = next;
        }
        Err(Error::NotConverged {
            z: self.z,
            iterations: opts.max_iter,
            last_energy: last.0,
            energy_change: last.1,
            residual: last.2,
        })
    }

    fn finish(self, eval: Evaluated, iterations: usize, change: f64, residual: f64) -> ScfSolution {
        let nb = self.basis.len();
        let mut orbitals = Vec::new();
        for ch in &self.channels {
            for o in &ch.occupied {
                orbitals.push(BasisOrbital {
                    n: o.n,
                    l: ch.l,
                    spin: if self.restricted { None } else { Some(ch.spin) },
                    occupation: o.occupation * self.spin_factor(),
                    eigenvalue: ch.eigenvalues[o.index],
                    coefficients: ch.full_coefficients(o.index, nb),
                });
            }
        }
        orbitals.sort_by(|a, b| (a.n, a.l, a.spin).cmp(&(b.n, b.l, b.spin)));
        ScfSolution {
            configuration: self.config.clone(),
            basis: Arc::new(self.basis.clone()),
            orbitals,
            total_energy: eval.energy,
            kinetic_energy: eval.kinetic,
            potential_energy: eval.energy - eval.kinetic,
            iterations,
            energy_change: change,
            residual,
            exchange: self.options.exchange,
        }
    }
}

fn damp(old: &[DMatrix<f64>], new: &[DMatrix<f64>], mixing: f64) -> Vec<DMatrix<f64>> {
    old.iter().zip(new).map(|(o, n)| o * (1.0 - mixing) + n * mixing).collect()
}

/// Pulay extrapolation; `None` if the system is too ill-conditioned.
fn diis(history: &VecDeque<(Vec<DMatrix<f64>>, Vec<DMatrix<f64>>)>) -> Option<Vec<DMatrix<f64>>> {
    let n = history.len();
    let mut b = DMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = history[i].1.iter().zip(&history[j].1).map(|(a, c)| a.dot(c)).sum();
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
        b[(i, n)] = -1.0;
        b[(n, i)] = -1.0;
    }
    // scale for conditioning
    let scale = (0..n).map(|i| b[(i, i)]).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return None;
    }
    for i in 0..n {
        for j in 0..n {
            b[(i, j)] /= scale;
        }
    }
    let mut rhs = DVector::zeros(n + 1);
    rhs[n] = -1.0;
    let c = b.lu().solve(&rhs)?;
    if c.iter().any(|v| !v.is_finite()) || c.iter().take(n).map(|v| v.abs()).sum::<f64>() > 1e3 {
        return None;
    }
    let mut out: Vec<DMatrix<f64>> = history[0].0.iter().map(|m| m * 0.0).collect();
    for (i, (f, _)) in history.iter().enumerate() {
        for (o, m) in out.iter_mut().zip(f) {
            *o += m * c[i];
        }
    }
    Some(out)
}

/// Solves the SCF equations for `config` in the default basis.
pub fn solve_atom(config: &Configuration, options: &ScfOptions) -> Result<ScfSolution> {
    options.validate()?;
    config.validate()?;
    let basis = atom_basis(config.z, options)?;
    solve_atom_in(config, &basis, options)
}

/// Solves the SCF equations for `config` in a given basis.
pub fn solve_atom_in(config: &Configuration, basis: &BSplineBasis, options: &ScfOptions) -> Result<ScfSolution> {
    options.validate()?;
    config.validate()?;
    Solver::new(config, basis, options)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::config::ground_configuration;

    #[test]
    fn three_j_values() {
        assert!((three_j_zero_squared(0, 0, 0) - 1.0).abs() < 1e-15);
        assert!((three_j_zero_squared(1, 0, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((three_j_zero_squared(1, 1, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((three_j_zero_squared(1, 2, 1) - 2.0 / 15.0).abs() < 1e-15);
        assert!((three_j_zero_squared(2, 2, 2) - 2.0 / 35.0).abs() < 1e-15);
        assert_eq!(three_j_zero_squared(1, 1, 1), 0.0);
        assert_eq!(three_j_zero_squared(0, 3, 1), 0.0);
        // Σ_k (2k+1)(l k l';000)² = 1
        for (l, lp) in [(1, 2), (2, 3), (3, 3)] {
            let s: f64 = (0..=l + lp).map(|k| (2 * k + 1) as f64 * three_j_zero_squared(l, k, lp)).sum();
            assert!((s - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn hydrogen_is_exact() {
        let sol = solve_atom(&ground_configuration(1).unwrap(), &ScfOptions::default()).unwrap();
        assert!((sol.total_energy + 0.5).abs() < 1e-9, "{}", sol.total_energy);
        assert!((sol.kinetic_energy - 0.5).abs() < 1e-8);
        assert!((sol.orbitals[0].eigenvalue + 0.5).abs() < 1e-8);
    }

    #[test]
    fn options_are_validated() {
        let mut o = ScfOptions::default();
        o.mixing = 0.0;
        assert!(o.validate().is_err());
        let mut o = ScfOptions::default();
        o.order = 3;
        assert!(o.validate().is_err());
    }
}
