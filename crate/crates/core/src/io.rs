//! Text formats: scan CSV, figure data, density files and run
//! configuration.

use crate::atom::report::{AtomOptions, AtomScanRow};
use crate::atom::scf::ExchangeModel;
use crate::error::{Error, Result};
use crate::functionals::RadialDensity;
use crate::radial::{make_log_grid, RadialFunction, MIN_GRID_POINTS};
use std::fmt::Write as _;
use std::path::PathBuf;

pub const CSV_HEADER: &str = "Z,N,r2,p2,heis_product,heis_bound,heis_ratio,I_rho,I_gamma,\
fisher_product,fisher_bound,fisher_log10_scaled,E_total,virial,converged";

/// `printf("%.6g")`.
pub fn format_g6(x: f64) -> String {
    format_g(x, 6)
}

fn format_g(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn csv_row(row: &AtomScanRow) -> String {
    let g = format_g6;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        row.z,
        row.n,
        g(row.r2),
        g(row.p2),
        g(row.heisenberg_product),
        g(row.heisenberg_bound),
        g(row.heisenberg_ratio),
        g(row.fisher_rho),
        g(row.fisher_gamma),
        g(row.fisher_product),
        g(row.fisher_bound),
        g(row.fisher_log10_scaled),
        g(row.total_energy),
        g(row.virial_ratio),
        u8::from(row.converged)
    )
}

pub fn write_csv(rows: &[AtomScanRow]) -> String {
    let mut out = String::with_capacity(128 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

/// `N`, `heis_product / N^{8/3}` and the bound on the same scale, which
/// is constant for `α = 2`.
pub fn fig1_data(rows: &[AtomScanRow]) -> String {
    let mut out = String::from("# N heis_product/N^(8/3) bound/N^(8/3)\n");
    for r in rows.iter().filter(|r| r.converged) {
        let s = (r.n as f64).powf(8.0 / 3.0);
        let _ = writeln!(
            out,
            "{} {} {}",
            r.n,
            format_g6(r.heisenberg_product / s),
            format_g6(r.heisenberg_bound / s)
        );
    }
    out
}

/// `N`, `fisher_log10_scaled` and `log10(fisher_bound / N^{8/3})`.
pub fn fig2_data(rows: &[AtomScanRow]) -> String {
    let mut out = String::from("# N log10(fisher_product/N^(8/3)) log10(bound/N^(8/3))\n");
    for r in rows.iter().filter(|r| r.converged) {
        let s = (r.n as f64).powf(8.0 / 3.0);
        let _ = writeln!(
            out,
            "{} {} {}",
            r.n,
            format_g6(r.fisher_log10_scaled),
            format_g6((r.fisher_bound / s).log10())
        );
    }
    out
}

/// Writes a density in the exchange format: `# d=<int> norm=<real>` then
/// `r value` pairs.
pub fn write_density(rho: &RadialDensity) -> String {
    let mut out = format!("# d={} norm={:e}\n", rho.dimension(), rho.norm_target());
    let f = rho.function();
    for (r, v) in f.grid().abscissae().iter().zip(f.values()) {
        let _ = writeln!(out, "{r:e} {v:e}");
    }
    out
}

/// Reads a density file. The abscissae must form a logarithmic grid.
pub fn parse_density(text: &str) -> Result<RadialDensity> {
    let mut d: Option<u32> = None;
    let mut norm: Option<f64> = None;
    let mut r = Vec::new();
    let mut v = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |m: String| Error::Parse { line, message: m };
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(header) = t.strip_prefix('#') {
            for token in header.split_whitespace() {
                if let Some((k, val)) = token.split_once('=') {
                    match k {
                        "d" => d = Some(val.parse().map_err(|_| err(format!("bad dimension {val:?}")))?),
                        "norm" => norm = Some(val.parse().map_err(|_| err(format!("bad norm {val:?}")))?),
                        _ => {}
                    }
                }
            }
            continue;
        }
        let mut fields = t.split_whitespace();
        let mut next = |what: &str| -> Result<f64> {
            fields
                .next()
                .ok_or_else(|| err(format!("missing {what}")))?
                .parse()
                .map_err(|_| err(format!("bad {what}")))
        };
        let rv = next("radius")?;
        let vv = next("value")?;
        if fields.next().is_some() {
            return Err(err("expected two columns".into()));
        }
        r.push(rv);
        v.push(vv);
    }
    let d = d.ok_or_else(|| Error::Parse {
        line: 1,
        message: "missing `# d=` header".into(),
    })?;
    let norm = norm.ok_or_else(|| Error::Parse {
        line: 1,
        message: "missing `norm=` header".into(),
    })?;
    if r.len() < MIN_GRID_POINTS {
        return Err(Error::InvalidGrid(format!("{} points, need at least {MIN_GRID_POINTS}", r.len())));
    }
    let n = r.len();
    let grid = make_log_grid(r[0], r[n - 1], n)?;
    let worst = grid
        .abscissae()
        .iter()
        .zip(&r)
        .map(|(a, b)| (a / b - 1.0).abs())
        .fold(0.0, f64::max);
    if !(worst < 1e-5) {
        return Err(Error::InvalidGrid(format!(
            "abscissae are not logarithmically spaced (relative deviation {worst:.1e})"
        )));
    }
    RadialDensity::new(d, RadialFunction::new(grid, v)?, norm)
}

/// Where the CLI writes its results.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub fig1: Option<PathBuf>,
    pub fig2: Option<PathBuf>,
}

/// Settings read from a `key = value` file with optional `[section]`
/// headers and `#` comments.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub atom: AtomOptions,
    pub output: OutputPaths,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.split('#').next().unwrap_or("").trim();
            if t.is_empty() {
                continue;
            }
            if let Some(name) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_ascii_lowercase();
                continue;
            }
            let (k, v) = t.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected key = value, got {t:?}"),
            })?;
            let key = k.trim().to_ascii_lowercase();
            let full = if key.contains('.') || section.is_empty() {
                key
            } else {
                format!("{section}.{key}")
            };
            cfg.set(&full, v.trim()).map_err(|message| Error::Parse { line, message })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("invalid value {v:?} for {key}"))
        }
        let a = &mut self.atom;
        match key {
            "grid.r_min_scale" => a.r_min_scale = num(key, value)?,
            "grid.r_max" => a.r_max = num(key, value)?,
            "grid.n_points" => a.n_points = num(key, value)?,
            "grid.p_min" => a.p_min = num(key, value)?,
            "grid.p_max_scale" => a.p_max_scale = num(key, value)?,
            "grid.n_p_points" => a.n_p_points = num(key, value)?,
            "scf.mixing" => a.scf.mixing = num(key, value)?,
            "scf.max_iter" => a.scf.max_iter = num(key, value)?,
            "scf.energy_tol" => a.scf.energy_tol = num(key, value)?,
            "scf.residual_tol" => a.scf.residual_tol = num(key, value)?,
            "scf.diis_depth" => a.scf.diis_depth = num(key, value)?,
            "scf.intervals" => a.scf.intervals = num(key, value)?,
            "scf.order" => a.scf.order = num(key, value)?,
            "scf.exchange" => {
                a.scf.exchange = match value.to_ascii_lowercase().as_str() {
                    "hf" | "hartree-fock" => ExchangeModel::HartreeFock,
                    "slater" | "local" => ExchangeModel::Slater,
                    _ => return Err(format!("unknown exchange model {value:?}")),
                }
            }
            "bounds.q" => a.q = num(key, value)?,
            "bounds.c_d" => a.c_d = num(key, value)?,
            "bounds.l" => a.l = num(key, value)?,
            "bounds.m" => a.m_abs = num(key, value)?,
            "bounds.alpha" => a.alpha = num(key, value)?,
            "output.csv" => self.output.csv = Some(value.into()),
            "output.fig1" => self.output.fig1 = Some(value.into()),
            "output.fig2" => self.output.fig2 = Some(value.into()),
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let a = &self.atom;
        let bad = |m: &str| Err(Error::InvalidConfiguration(m.to_string()));
        if !(a.r_min_scale > 0.0 && a.r_max > 0.0 && a.p_min > 0.0 && a.p_max_scale > 0.0) {
            return bad("grid extents must be positive");
        }
        if a.n_points < MIN_GRID_POINTS || a.n_p_points < MIN_GRID_POINTS {
            return bad("grids need at least 64 points");
        }
        if a.q == 0 {
            return bad("q must be >= 1");
        }
        if !(1.0..=2.0).contains(&a.c_d) {
            return bad("c_d must lie in [1, 2]");
        }
        if a.m_abs > a.l {
            return bad("|m| must not exceed l");
        }
        if !(a.alpha > 0.0) {
            return bad("alpha must be positive");
        }
        a.scf.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::hydrogenic_reference;

    #[test]
    fn g_format_matches_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-0.5, "-0.5"),
            (3.0000001, "3"),
            (1.170047150466696, "1.17005"),
            (123456.7, "123457"),
            (1234567.0, "1.23457e+06"),
            (0.0001234567, "0.000123457"),
            (0.00001234567, "1.23457e-05"),
            (-21866.77224087, "-21866.8"),
            (999999.5, "1e+06"),
            (1e100, "1e+100"),
            (f64::NAN, "nan"),
        ];
        for (x, s) in cases {
            assert_eq!(format_g6(x), s, "{x}");
        }
    }

    #[test]
    fn density_round_trip() {
        let h = hydrogenic_reference(1.0).unwrap();
        let rho = h.position_density(&h.position_grid().unwrap()).unwrap();
        let back = parse_density(&write_density(&rho)).unwrap();
        assert_eq!(back.dimension(), 3);
        assert_eq!(back.function().values().len(), rho.function().values().len());
    }

    #[test]
    fn density_errors() {
        let mut text = String::from("# d=3 norm=1\n");
        for i in 0..100 {
            let r = 1e-3 * 1.1f64.powi(i);
            text += &format!("{r:e} {}\n", -1.0);
        }
        assert!(matches!(parse_density(&text), Err(Error::InvalidDensity(_))));
        let zero = text.replace(" -1\n", " 0\n");
        assert!(matches!(parse_density(&zero), Err(Error::Normalization { .. })));
        assert!(parse_density("1 2\n").is_err());
        let linear: String = std::iter::once("# d=3 norm=1\n".to_string())
            .chain((1..100).map(|i| format!("{} 1\n", i as f64 * 0.1)))
            .collect();
        assert!(matches!(parse_density(&linear), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn run_config() {
        let cfg = RunConfig::parse(
            "# comment\n[grid]\nn_points = 3000\n[scf]\nmixing=0.5\nexchange = slater\n[bounds]\nq=1\n\
             [output]\ncsv = out.csv\n",
        )
        .unwrap();
        assert_eq!(cfg.atom.n_points, 3000);
        assert_eq!(cfg.atom.scf.mixing, 0.5);
        assert_eq!(cfg.atom.scf.exchange, ExchangeModel::Slater);
        assert_eq!(cfg.atom.q, 1);
        assert_eq!(cfg.output.csv, Some(PathBuf::from("out.csv")));
        assert!(RunConfig::parse("grid.n_points = 10\n").is_err());
        assert!(RunConfig::parse("bogus = 1\n").is_err());
        assert!(matches!(RunConfig::parse("[scf]\nmixing 0.3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(RunConfig::parse("scf.energy_tol = -1\n").is_err());
    }
}
