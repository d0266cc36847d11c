//! Spin-dependent lower bounds on the Heisenberg-like product
//! `⟨r^α⟩^{2/α}⟨p²⟩` and on the Fisher-information product `I[ρ]·I[γ]`
//! for `N` fermions of spin multiplicity `q = 2s + 1` in `d` dimensions.
//!
//! Every constant is assembled as a sum of logarithms and exponentiated
//! once, so the evaluators stay finite for dimensions up to `10^4` and
//! beyond. Dimensions are accepted as reals `>= 1`; the physical pipelines
//! only ever pass integers.

use crate::error::{domain, Result};
use crate::special::{log_beta, log_gamma, log_omega_d};
use std::f64::consts::PI;
use std::fmt;

/// Parameters shared by every bound formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery {
    /// Spatial dimension.
    pub d: f64,
    /// Number of fermions.
    pub n: u64,
    /// Spin multiplicity `2s + 1`.
    pub q: u32,
    /// Order of the radial moment.
    pub alpha: f64,
    /// Leading hyperangular quantum number.
    pub l: Option<u32>,
    /// Magnitude of the trailing hyperangular quantum number.
    pub m_abs: Option<u32>,
    /// Lieb–Thirring constant, `1 <= c_d <= 2`.
    pub c_d: f64,
}

impl BoundQuery {
    /// Electrons-in-three-dimensions defaults for `n` particles:
    /// `d = 3`, `q = 2`, `α = 2`, `l = |m| = 0`, `C_d = 1`.
    pub fn electrons(n: u64) -> Self {
        Self::new(3.0, n, 2)
    }

    pub fn new(d: f64, n: u64, q: u32) -> Self {
        Self {
            d,
            n,
            q,
            alpha: 2.0,
            l: Some(0),
            m_abs: Some(0),
            c_d: 1.0,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_angular(mut self, l: u32, m_abs: u32) -> Self {
        self.l = Some(l);
        self.m_abs = Some(m_abs);
        self
    }

    pub fn without_angular(mut self) -> Self {
        self.l = None;
        self.m_abs = None;
        self
    }

    pub fn with_c_d(mut self, c_d: f64) -> Self {
        self.c_d = c_d;
        self
    }

    /// Checks everything except the angular numbers, which only the Fisher
    /// bound consumes.
    pub fn validate(&self) -> Result<()> {
        check_dimension("BoundQuery", self.d)?;
        if self.n < 1 {
            return Err(domain("BoundQuery", "N must be >= 1"));
        }
        if self.q < 1 {
            return Err(domain("BoundQuery", "q = 2s+1 must be >= 1"));
        }
        check_alpha("BoundQuery", self.alpha)?;
        if !(1.0..=2.0).contains(&self.c_d) {
            return Err(domain("BoundQuery", format!("C_d must lie in [1, 2], got {}", self.c_d)));
        }
        if let (Some(l), Some(m)) = (self.l, self.m_abs) {
            if m > l {
                return Err(domain("BoundQuery", format!("|m| = {m} exceeds l = {l}")));
            }
        }
        Ok(())
    }

    fn angular(&self) -> Result<(u32, u32)> {
        match (self.l, self.m_abs) {
            (Some(l), Some(m)) => Ok((l, m)),
            _ => Err(domain("fisher_lower_bound", "requires both l and |m|")),
        }
    }
}

/// Which relation a reported constant belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    LogGamma,
    SphereSurface,
    LiebThirringKinetic,
    MomentConstant,
    VariationalMomentConstant,
    GeneralizedHeisenbergConstant,
    HeisenbergConstant,
    FisherConstant,
    GeneralizedHeisenbergBound,
    FisherBound,
    HeisenbergAsymptotic,
    FisherAsymptotic,
}

impl Formula {
    pub fn id(self) -> &'static str {
        match self {
            Formula::LogGamma => "log-gamma",
            Formula::SphereSurface => "sphere-surface",
            Formula::LiebThirringKinetic => "lieb-thirring-kinetic",
            Formula::MomentConstant => "moment-constant",
            Formula::VariationalMomentConstant => "variational-moment-constant",
            Formula::GeneralizedHeisenbergConstant => "generalized-heisenberg-constant",
            Formula::HeisenbergConstant => "heisenberg-constant",
            Formula::FisherConstant => "fisher-constant",
            Formula::GeneralizedHeisenbergBound => "generalized-heisenberg-bound",
            Formula::FisherBound => "fisher-bound",
            Formula::HeisenbergAsymptotic => "heisenberg-large-d-ratio",
            Formula::FisherAsymptotic => "fisher-large-d-ratio",
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// One evaluated constant, tagged with the inputs that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub constant_name: String,
    pub value: f64,
    pub inputs: BoundQuery,
    pub formula: Formula,
}

fn check_dimension(what: &'static str, d: f64) -> Result<()> {
    if !(d >= 1.0) || !d.is_finite() {
        return Err(domain(what, format!("dimension must be >= 1, got {d}")));
    }
    Ok(())
}

fn check_alpha(what: &'static str, alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(domain(what, format!("moment order must be > 0, got {alpha}")));
    }
    Ok(())
}

/// `ln K(d)` with `K(d) = 4πd/(d+2) · Γ(d/2 + 1)^{2/d}`.
pub fn log_k_const(d: f64) -> Result<f64> {
    check_dimension("k_const", d)?;
    Ok((4.0 * PI).ln() + d.ln() - (d + 2.0).ln() + 2.0 / d * log_gamma(0.5 * d + 1.0)?)
}

/// Kinetic-energy constant of the spin-resolved Lieb–Thirring inequality.
pub fn k_const(d: f64) -> Result<f64> {
    Ok(log_k_const(d)?.exp())
}

/// `ln F(α, d)`, the moment constant obtained from the variational
/// entropic-moment bound at exponent `a = 1 + 2/d`.
pub fn log_f_const(alpha: f64, d: f64) -> Result<f64> {
    check_alpha("f_const", alpha)?;
    check_dimension("f_const", d)?;
    let e = 1.0 + 2.0 / d;
    let prefactor = (2.0 / d + 2.0 / alpha) * std::f64::consts::LN_2
        + (1.0 + 4.0 / d) * alpha.ln()
        + e * e.ln()
        - PI.ln()
        - (e + 2.0 / alpha) * (alpha * e + 2.0).ln();
    let gammas = log_gamma(d / alpha + 0.5 * d + 2.0)? - (d * (d + 2.0)).ln() - log_gamma(d / alpha)?;
    Ok(prefactor + 2.0 / d * gammas)
}

pub fn f_const(alpha: f64, d: f64) -> Result<f64> {
    Ok(log_f_const(alpha, d)?.exp())
}

/// `ln F(α, a, d)`, the constant of the lower bound on the entropic moment
/// `W_a[ρ]` in terms of the normalization and `⟨r^α⟩`.
pub fn log_f_var(alpha: f64, a: f64, d: f64) -> Result<f64> {
    check_alpha("f_var", alpha)?;
    check_dimension("f_var", d)?;
    if !(a > 1.0) || !a.is_finite() {
        return Err(domain("f_var", format!("entropic exponent must be > 1, got {a}")));
    }
    let am1 = a - 1.0;
    let ad_d = d * am1;
    let outer = a * (alpha + d) - d;
    let lead = a * a.ln() + (2.0 * a - 1.0) * alpha.ln();
    let beta = log_beta(ad_d / (alpha * am1), (2.0 * a - 1.0) / am1)?;
    let sphere = log_omega_d(d)?;
    let powers = (ad_d * ad_d.ln() - outer * outer.ln()) / alpha;
    Ok(lead - am1 * (sphere + beta) + powers)
}

pub fn f_var(alpha: f64, a: f64, d: f64) -> Result<f64> {
    Ok(log_f_var(alpha, a, d)?.exp())
}

/// `A(α, d) = K(d) · F(α, d) · C_d^{-2/d}`.
pub fn a_general(alpha: f64, d: f64, c_d: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&c_d) {
        return Err(domain("a_general", format!("C_d must lie in [1, 2], got {c_d}")));
    }
    Ok((log_k_const(d)? + log_f_const(alpha, d)? - 2.0 / d * c_d.ln()).exp())
}

fn log_a_2(d: f64) -> Result<f64> {
    check_dimension("a_2", d)?;
    Ok(2.0 * (d.ln() - (d + 1.0).ln() + log_gamma(d + 1.0)? / d))
}

/// Closed form of `A(2, d) = {d/(d+1) · Γ(d+1)^{1/d}}²`.
pub fn a_2(d: f64) -> Result<f64> {
    Ok(log_a_2(d)?.exp())
}

/// `C(l, m, d) = 16 (1 − 2|m|/(2l + d − 2))² A(2, d)`.
pub fn fisher_constant(l: u32, m_abs: u32, d: f64) -> Result<f64> {
    check_dimension("fisher_constant", d)?;
    if d < 2.0 {
        return Err(domain("fisher_constant", format!("central-potential bound needs d >= 2, got {d}")));
    }
    if m_abs > l {
        return Err(domain("fisher_constant", format!("|m| = {m_abs} exceeds l = {l}")));
    }
    let denom = 2.0 * l as f64 + d - 2.0;
    if !(denom > 0.0) {
        return Err(domain("fisher_constant", format!("2l + d - 2 must be > 0 (l = {l}, d = {d})")));
    }
    let angular = 1.0 - 2.0 * m_abs as f64 / denom;
    if angular == 0.0 {
        return Err(domain("fisher_constant", "angular prefactor vanishes"));
    }
    Ok(16.0 * angular * angular * a_2(d)?)
}

/// Generalized Heisenberg bound
/// `A(α,d) q^{-2/d} N^{2/d + 2/α + 1}` on `⟨r^α⟩^{2/α}⟨p²⟩`.
pub fn heisenberg_lower_bound(query: &BoundQuery) -> Result<f64> {
    query.validate()?;
    let d = query.d;
    let log_a = log_k_const(d)? + log_f_const(query.alpha, d)? - 2.0 / d * query.c_d.ln();
    let log_value = log_a - 2.0 / d * (query.q as f64).ln()
        + (2.0 / d + 2.0 / query.alpha + 1.0) * (query.n as f64).ln();
    Ok(log_value.exp())
}

/// Fisher-information bound `C(l,m,d) q^{-2/d} N^{2/d + 2}` on `I[ρ]·I[γ]`.
pub fn fisher_lower_bound(query: &BoundQuery) -> Result<f64> {
    query.validate()?;
    let (l, m) = query.angular()?;
    let d = query.d;
    let c = fisher_constant(l, m, d)?;
    Ok((c.ln() - 2.0 / d * (query.q as f64).ln() + (2.0 / d + 2.0) * (query.n as f64).ln()).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Heisenberg,
    Fisher,
}

/// Ratio of the exact `α = 2` coefficient to its large-dimension form:
/// `A(2,d) / (d²/e²)` for the Heisenberg bound and `16 A(2,d) / (16 d²/e²)`
/// for the Fisher bound at `l = m = 0`. Tends to 1 as `d → ∞`.
pub fn asymptotic_ratio(kind: BoundKind, d: f64) -> Result<f64> {
    if d < 2.0 {
        return Err(domain("asymptotic_ratio", format!("needs d >= 2, got {d}")));
    }
    let log_limit = 2.0 * d.ln() - 2.0;
    match kind {
        BoundKind::Heisenberg => Ok((log_a_2(d)? - log_limit).exp()),
        BoundKind::Fisher => Ok((fisher_constant(0, 0, d)?.ln() - (16f64.ln() + log_limit)).exp()),
    }
}

/// Every constant relevant to `query`, in a fixed order.
///
/// The Fisher entries are included only when the query carries angular
/// numbers valid for a central potential.
pub fn report_all(query: &BoundQuery) -> Result<Vec<BoundReport>> {
    query.validate()?;
    let d = query.d;
    let mk = |name: &str, value: f64, formula| BoundReport {
        constant_name: name.to_string(),
        value,
        inputs: *query,
        formula,
    };
    let mut out = vec![
        mk("K(d)", k_const(d)?, Formula::LiebThirringKinetic),
        mk("F(alpha,d)", f_const(query.alpha, d)?, Formula::MomentConstant),
        mk(
            "F(alpha,1+2/d,d)",
            f_var(query.alpha, 1.0 + 2.0 / d, d)?,
            Formula::VariationalMomentConstant,
        ),
        mk("A(alpha,d)", a_general(query.alpha, d, query.c_d)?, Formula::GeneralizedHeisenbergConstant),
        mk("A(2,d)", a_2(d)?, Formula::HeisenbergConstant),
        mk("heisenberg_bound", heisenberg_lower_bound(query)?, Formula::GeneralizedHeisenbergBound),
    ];
    if let (Some(l), Some(m)) = (query.l, query.m_abs) {
        if d >= 2.0 && 2.0 * l as f64 + d - 2.0 > 0.0 {
            let c = fisher_constant(l, m, d)?;
            let bound = fisher_lower_bound(query)?;
            out.push(mk("C(l,m,d)", c, Formula::FisherConstant));
            out.push(mk("fisher_bound", bound, Formula::FisherBound));
            out.push(mk("log10_fisher_bound", bound.log10(), Formula::FisherBound));
        }
    }
    if d >= 2.0 {
        out.push(mk(
            "heisenberg_large_d_ratio",
            asymptotic_ratio(BoundKind::Heisenberg, d)?,
            Formula::HeisenbergAsymptotic,
        ));
        out.push(mk(
            "fisher_large_d_ratio",
            asymptotic_ratio(BoundKind::Fisher, d)?,
            Formula::FisherAsymptotic,
        ));
    }
    Ok(out)
}
