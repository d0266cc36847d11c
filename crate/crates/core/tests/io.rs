use pauli_bounds::io::*;
use pauli_bounds::models::hydrogenic_reference;
use pauli_bounds::{atom_report, AtomOptions, Error};

#[test]
fn csv_layout() {
    let row = atom_report(1, &AtomOptions::default()).unwrap();
    let text = write_csv(&[row.clone(), row]);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "Z,N,r2,p2,heis_product,heis_bound,heis_ratio,I_rho,I_gamma,fisher_product,fisher_bound,fisher_log10_scaled,E_total,virial,converged"
    );
    let fields: Vec<_> = lines.next().unwrap().split(',').collect();
    assert_eq!(fields.len(), 15);
    assert_eq!(&fields[..3], ["1", "1", "3"]);
    assert_eq!(fields[5], "1.17005");
    assert_eq!(fields[12], "-0.5");
    assert_eq!(fields[14], "1");
}

#[test]
fn failed_rows_are_marked() {
    let row = pauli_bounds::AtomScanRow::failed(
        7,
        &Error::NotConverged {
            z: 7,
            iterations: 3,
            last_energy: -54.0,
            energy_change: 1.0,
            residual: 1.0,
        },
    );
    let line = csv_row(&row);
    assert!(line.starts_with("7,7,nan,"));
    assert!(line.ends_with(",-54,nan,0"));
    assert_eq!(fig1_data(&[row]).lines().count(), 1);
}

#[test]
fn density_files_round_trip() {
    let h = hydrogenic_reference(2.0).unwrap();
    let rho = h.momentum_density(&h.momentum_grid().unwrap()).unwrap();
    let text = write_density(&rho);
    assert!(text.starts_with("# d=3 norm="));
    let back = parse_density(&text).unwrap();
    assert_eq!(back.norm_target(), rho.norm_target());
    for (a, b) in back.function().values().iter().zip(rho.function().values()) {
        assert_eq!(a, b);
    }
}

#[test]
fn config_files() {
    let cfg = RunConfig::parse("[bounds]\nq = 1\nl = 1\nm = 1\n[output]\nfig1 = a.dat\n").unwrap();
    assert_eq!((cfg.atom.q, cfg.atom.l, cfg.atom.m_abs), (1, 1, 1));
    assert!(RunConfig::parse("[bounds]\nl = 0\nm = 1\n").is_err());
    assert!(RunConfig::parse("[bounds]\nc_d = 3\n").is_err());
    assert!(RunConfig::parse("[scf]\nmax_iter = zero\n").is_err());
}
