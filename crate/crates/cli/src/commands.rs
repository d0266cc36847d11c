use crate::{AtomArgs, AuditArgs, BoundsArgs, Command, ExchangeArg, ModelArgs, ModelKindArg, RunArgs, ScanArgs};
use anyhow::{bail, Context, Result};
use pauli_bounds::bounds::{self, BoundQuery};
use pauli_bounds::functionals::{
    entropic_moment, fisher_check, fisher_spherical, heisenberg_check, lieb_thirring_check, moment_bound_check,
    radial_moment, InequalityReport,
};
use pauli_bounds::io::{self, format_g6, RunConfig};
use pauli_bounds::models::{self, ModelReference};
use pauli_bounds::{scan_periodic_table, AtomScanRow, Error, ExchangeModel};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_SCF_FAILURE: u8 = 2;
pub const EXIT_VIOLATION: u8 = 3;

pub fn run(command: Command) -> Result<u8> {
    match command {
        Command::Bounds(a) => bounds_cmd(&a),
        Command::Model(a) => model_cmd(&a),
        Command::Atom(a) => atom_cmd(&a),
        Command::Scan(a) => scan_cmd(&a),
        Command::Audit(a) => audit_cmd(&a),
    }
}

fn bounds_cmd(a: &BoundsArgs) -> Result<u8> {
    let query = BoundQuery::new(a.d, a.n, a.q)
        .with_alpha(a.alpha)
        .with_angular(a.l, a.m)
        .with_c_d(a.c_d);
    let reports = bounds::report_all(&query)?;
    let mut out = String::new();
    if a.csv {
        out.push_str("quantity,value,formula\n");
        for r in &reports {
            let _ = writeln!(out, "{},{},{}", r.constant_name, format_g6(r.value), r.formula);
        }
    } else {
        let _ = writeln!(
            out,
            "# d={} N={} q={} alpha={} l={} m={} c_d={}",
            a.d, a.n, a.q, a.alpha, a.l, a.m, a.c_d
        );
        for r in &reports {
            let _ = writeln!(out, "{:<26} {:>14}  {}", r.constant_name, format_g6(r.value), r.formula);
        }
    }
    print!("{out}");
    Ok(0)
}

fn model_cmd(a: &ModelArgs) -> Result<u8> {
    let reference = match a.kind {
        ModelKindArg::Hydrogen => models::hydrogenic_reference(a.z)?,
        ModelKindArg::Oscillator => models::oscillator_reference(a.omega, a.d)?,
    };
    if let Some(m) = a.fill {
        if a.kind != ModelKindArg::Oscillator {
            bail!("--fill applies to the oscillator model only");
        }
        println!("M,N,r2,p2,product,bound,ratio");
        for shell in 0..=m {
            let s = models::oscillator_shell_filling(shell, a.q)?;
            println!(
                "{},{},{},{},{},{},{}",
                s.m,
                s.n,
                format_g6(s.r2_total),
                format_g6(s.p2_total),
                format_g6(s.product),
                format_g6(s.bound),
                format_g6(s.ratio)
            );
        }
        return Ok(0);
    }
    print!("{}", model_table(&reference, a.q)?);
    if let Some(prefix) = &a.write_density {
        let rho = reference.position_density(&reference.position_grid()?)?;
        let gamma = reference.momentum_density(&reference.momentum_grid()?)?;
        write_file(&suffixed(prefix, "_position.dat"), &io::write_density(&rho))?;
        write_file(&suffixed(prefix, "_momentum.dat"), &io::write_density(&gamma))?;
    }
    Ok(0)
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    s.into()
}

fn model_table(reference: &ModelReference, q: u32) -> Result<String> {
    let exact = reference.exact;
    let numeric = reference.numeric_values()?;
    let mut out = String::from("quantity,exact,numeric,rel_error\n");
    let rows = [
        ("r2", exact.r2, numeric.r2),
        ("p2", exact.p2, numeric.p2),
        ("I_rho", exact.fisher_position, numeric.fisher_position),
        ("I_gamma", exact.fisher_momentum, numeric.fisher_momentum),
        ("heis_product", exact.heisenberg_product(), numeric.heisenberg_product()),
        ("fisher_product", exact.fisher_product(), numeric.fisher_product()),
    ];
    for (name, e, v) in rows {
        let _ = writeln!(out, "{name},{},{},{}", format_g6(e), format_g6(v), format_g6((v / e - 1.0).abs()));
    }
    let rho = reference.position_density(&reference.position_grid()?)?;
    let d = reference.d;
    let query = BoundQuery::new(d as f64, 1, q);
    let mut checks = vec![
        lieb_thirring_check(&rho, numeric.p2, q, 1.0)?.check,
        moment_bound_check(&rho, 1.0 + 2.0 / d as f64, 2.0)?.check,
        heisenberg_check(numeric.r2, numeric.p2, &query)?,
    ];
    if d >= 2 {
        checks.push(fisher_check(numeric.fisher_position, numeric.fisher_momentum, &query)?);
    }
    let _ = writeln!(out, "W_{{1+2/d}},,{},", format_g6(entropic_moment(&rho, 1.0 + 2.0 / d as f64)?));
    out.push_str(&checks_table(&checks));
    Ok(out)
}

fn checks_table(checks: &[InequalityReport]) -> String {
    let mut out = String::from("check,lhs,rhs,slack,ratio,holds\n");
    for c in checks {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            c.label,
            format_g6(c.lhs),
            format_g6(c.rhs),
            format_g6(c.slack),
            format_g6(c.ratio),
            if c.holds { "yes" } else { "NO" }
        );
    }
    out
}

fn run_config(args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            RunConfig::parse(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    let o = &mut cfg.atom;
    if let Some(q) = args.q {
        o.q = q;
    }
    if let Some(c) = args.c_d {
        o.c_d = c;
    }
    if let Some(l) = args.l {
        o.l = l;
    }
    if let Some(m) = args.m {
        o.m_abs = m;
    }
    if let Some(alpha) = args.alpha {
        o.alpha = alpha;
    }
    if let Some(x) = args.exchange {
        o.scf.exchange = match x {
            ExchangeArg::Hf => ExchangeModel::HartreeFock,
            ExchangeArg::Slater => ExchangeModel::Slater,
        };
    }
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        cfg.output.csv.get_or_insert_with(|| dir.join("scan.csv"));
        cfg.output.fig1.get_or_insert_with(|| dir.join("fig1.dat"));
        cfg.output.fig2.get_or_insert_with(|| dir.join("fig2.dat"));
    }
    if let Some(csv) = &args.csv {
        cfg.output.csv = Some(csv.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn atom_cmd(a: &AtomArgs) -> Result<u8> {
    run_rows(a.z..=a.z, &a.run)
}

fn scan_cmd(a: &ScanArgs) -> Result<u8> {
    run_rows(parse_range(&a.range)?, &a.run)
}

/// `a..b`, `a..=b`, `a-b` or a single number, all inclusive.
pub fn parse_range(s: &str) -> Result<RangeInclusive<u32>> {
    let s = s.trim();
    let (lo, hi) = if let Some((l, h)) = s.split_once("..") {
        (l, h.strip_prefix('=').unwrap_or(h))
    } else if let Some((l, h)) = s.split_once('-') {
        (l, h)
    } else {
        (s, s)
    };
    let parse = |t: &str| t.trim().parse::<u32>().with_context(|| format!("invalid Z range {s:?}"));
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo > hi {
        bail!("empty Z range {s:?}");
    }
    Ok(lo..=hi)
}

fn run_rows(range: RangeInclusive<u32>, args: &RunArgs) -> Result<u8> {
    let cfg = run_config(args)?;
    let rows = scan_periodic_table(range, &cfg.atom)?;
    let csv = io::write_csv(&rows);
    match &cfg.output.csv {
        Some(path) => write_file(path, &csv)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(csv.as_bytes())?;
            stdout.flush()?;
        }
    }
    if let Some(path) = &cfg.output.fig1 {
        write_file(path, &io::fig1_data(&rows))?;
    }
    if let Some(path) = &cfg.output.fig2 {
        write_file(path, &io::fig2_data(&rows))?;
    }
    eprint!("{}", summary(&rows));
    Ok(exit_code(&rows))
}

fn exit_code(rows: &[AtomScanRow]) -> u8 {
    if rows.iter().any(AtomScanRow::violates_bound) {
        EXIT_VIOLATION
    } else if rows.iter().any(|r| !r.converged) {
        EXIT_SCF_FAILURE
    } else {
        0
    }
}

fn summary(rows: &[AtomScanRow]) -> String {
    let converged: Vec<_> = rows.iter().filter(|r| r.converged).collect();
    let mut out = format!("{} of {} atoms converged\n", converged.len(), rows.len());
    for r in rows.iter().filter(|r| !r.converged) {
        let _ = writeln!(out, "  Z={} failed: {}", r.z, r.failure.as_deref().unwrap_or("unknown"));
    }
    let violations: Vec<_> = rows.iter().filter(|r| r.violates_bound()).collect();
    let _ = writeln!(out, "{} bound violations", violations.len());
    for r in violations {
        for c in [&r.lieb_thirring, &r.moment_bound, &r.heisenberg, &r.fisher].into_iter().flatten() {
            if !c.holds {
                let _ = writeln!(out, "  Z={} {}: {} < {}", r.z, c.label, format_g6(c.lhs), format_g6(c.rhs));
            }
        }
    }
    if !converged.is_empty() {
        let virial = converged.iter().map(|r| (r.virial_ratio + 2.0).abs()).fold(0.0, f64::max);
        let gap = converged.iter().map(|r| r.p2_route_gap()).fold(0.0, f64::max);
        let min_h = converged.iter().map(|r| r.heisenberg_ratio).fold(f64::INFINITY, f64::min);
        let min_f = converged.iter().map(|r| r.fisher_product / r.fisher_bound).fold(f64::INFINITY, f64::min);
        let _ = writeln!(out, "max |V/T + 2| = {}", format_g6(virial));
        let _ = writeln!(out, "max <p2> route gap = {}", format_g6(gap));
        let _ = writeln!(out, "min heisenberg ratio = {}", format_g6(min_h));
        let _ = writeln!(out, "min fisher ratio = {}", format_g6(min_f));
    }
    out
}

fn audit_cmd(a: &AuditArgs) -> Result<u8> {
    let rho = read_density(&a.file)?;
    let gamma = a.momentum.as_deref().map(read_density).transpose()?;
    let d = rho.dimension();
    if let Some(g) = &gamma {
        if g.dimension() != d {
            bail!("position and momentum files disagree on the dimension");
        }
    }
    let norm = rho.norm_target();
    let n = norm.round();
    if n < 1.0 || (norm - n).abs() > 1e-6 * n {
        bail!("particle number {norm} is not an integer");
    }
    let query = BoundQuery::new(d as f64, n as u64, a.q)
        .with_alpha(a.alpha)
        .with_angular(a.l, a.m);
    let p2 = match (a.p2, &gamma) {
        (Some(p2), _) => Some(p2),
        (None, Some(g)) => Some(radial_moment(g, 2.0)?),
        (None, None) => None,
    };

    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    match p2 {
        Some(p2) => checks.push(lieb_thirring_check(&rho, p2, a.q, a.c_d)?.check),
        None => skipped.push("lieb-thirring"),
    }
    checks.push(moment_bound_check(&rho, 1.0 + 2.0 / d as f64, a.alpha)?.check);
    match p2 {
        Some(p2) => checks.push(heisenberg_check(radial_moment(&rho, a.alpha)?, p2, &query)?),
        None => skipped.push("heisenberg"),
    }
    match &gamma {
        Some(g) if d >= 2 => {
            let (fr, fg) = (fisher_spherical(&rho)?, fisher_spherical(g)?);
            checks.push(fisher_check(fr.value, fg.value, &query)?);
        }
        _ => skipped.push("fisher"),
    }
    print!("{}", checks_table(&checks));
    for s in skipped {
        println!("{s},,,,,skipped");
    }
    Ok(if checks.iter().all(|c| c.holds) { 0 } else { EXIT_VIOLATION })
}

fn read_density(path: &Path) -> Result<pauli_bounds::RadialDensity> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    io::parse_density(&text).map_err(|e: Error| anyhow::Error::new(e).context(format!("in {}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1..103").unwrap(), 1..=103);
        assert_eq!(parse_range("3..=5").unwrap(), 3..=5);
        assert_eq!(parse_range("7").unwrap(), 7..=7);
        assert_eq!(parse_range("2-4").unwrap(), 2..=4);
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("a..b").is_err());
    }
}
