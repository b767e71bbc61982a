use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qwi::oracle::{delta_well_energy, square_well_levels};
use qwi::Material;

fn qwi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwi")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Rows of a CSV file without the header and comment lines.
fn rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn f(cell: &str) -> f64 {
    cell.parse().unwrap_or_else(|_| panic!("not a number: `{cell}`"))
}

const LEADS0: &str = "[material]\nm_rel = 0.1\n\n[leads]\nu_left = 0.0\nu_right = 0.0\n";

#[test]
fn free_particle_transmits_fully() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "free.toml",
        &format!("{LEADS0}\n[[piece]]\nx_lo = 0.0\nx_hi = 10.0\nu = 0.0\n\n[sweep]\ne_min = 0.01\ne_max = 2.0\npoints = 50\n"),
    );
    let out = dir.path().join("t.csv");
    let res = qwi(&["transmit", s(&cfg), "--out", s(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("energy_eV,r_re,r_im,R,T,n_regions\n"));
    assert!(text.ends_with("# gaps: 0\n"));
    let rows = rows(&out);
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| f(&r[4]) == 1.0));
}

#[test]
fn barrier_matches_oracle_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "barrier.toml",
        &format!("{LEADS0}\n[[piece]]\nx_lo = 0.0\nx_hi = 30.0\nu = 0.956\n\n[sweep]\ne_min = 0.05\ne_max = 2.0\npoints = 100\n"),
    );
    let out = dir.path().join("t.csv");
    assert!(qwi(&["transmit", s(&cfg), "--with-oracle", "--out", s(&out)]).status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("energy_eV,r_re,r_im,R,T,n_regions,T_tm,T_analytic\n"));
    for r in rows(&out) {
        assert!((f(&r[4]) - f(&r[7])).abs() < 1e-10, "{r:?}");
        assert!((f(&r[4]) - f(&r[6])).abs() < 1e-9, "{r:?}");
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert!(qwi(&["transmit", "--scenario", "fig1", "--alpha", "0.25", "--out", s(&a)]).status.success());
    assert!(qwi(&["transmit", "--scenario", "fig1", "--alpha", "0.25", "--out", s(&b)]).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn exported_scenario_reproduces_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fig1.toml");
    assert!(qwi(&["scenario", "fig1", "--alpha", "0.25", "--out", s(&cfg)]).status.success());
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert!(qwi(&["transmit", s(&cfg), "--out", s(&a)]).status.success());
    assert!(qwi(&["transmit", "--scenario", "fig1", "--alpha", "0.25", "--out", s(&b)]).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn delta_well_bound_state() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "delta.toml", "[material]\nm_rel = 1.0\n\n[leads]\nu_left = 0.0\nu_right = 0.0\n\n[[delta]]\nx = 0.0\ng = -1.0\n");
    let out = dir.path().join("levels.csv");
    let res = qwi(&["bound", s(&cfg), "--out", s(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let rows = rows(&out);
    assert_eq!(rows.len(), 1);
    let expected = delta_well_energy(-1.0, Material::electron()).unwrap();
    assert!((f(&rows[0][1]) / expected - 1.0).abs() < 1e-8);
    assert_eq!(rows[0][3], "true");
    let trace = std::fs::read_to_string(dir.path().join("levels.trace.csv")).unwrap();
    assert!(trace.starts_with("N,level,energy_eV\n"));
}

#[test]
fn square_well_bound_states() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "well.toml",
        "[material]\nm_rel = 0.067\n\n[leads]\nu_left = 0.0\nu_right = 0.0\n\n[[piece]]\nx_lo = -5.0\nx_hi = 5.0\nu = -0.3\n",
    );
    let out = dir.path().join("levels.csv");
    assert!(qwi(&["bound", s(&cfg), "--out", s(&out)]).status.success());
    let oracle = square_well_levels(0.3, 10.0, Material::new(0.067).unwrap()).unwrap();
    let rows = rows(&out);
    assert_eq!(rows.len(), oracle.len());
    for (r, e) in rows.iter().zip(&oracle) {
        assert!((f(&r[1]) - e).abs() < 1e-6);
    }
}

#[test]
fn scattering_only_model_has_no_bound_states() {
    let res = qwi(&["bound", "--scenario", "fig2"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("no bound window"));
}

#[test]
fn fig2_convergence_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eps.csv");
    assert!(qwi(&["converge", "--scenario", "fig2", "--out", s(&out)]).status.success());
    let rows = rows(&out);
    let n: Vec<f64> = rows.iter().map(|r| f(&r[0])).collect();
    assert_eq!(n, vec![4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0]);
    let eps: Vec<f64> = rows.iter().map(|r| f(&r[2])).collect();
    assert!(eps[2..].windows(2).all(|w| w[1] < w[0]), "{eps:?}");
    // least-squares slope of log2 eps against log2 N for N >= 64
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| f(&r[0]) >= 64.0).map(|r| (f(&r[1]), f(&r[2]).log2())).collect();
    let k = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x * x, b + x * y));
    let slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    assert!(slope <= -1.5, "slope {slope}");
}

#[test]
fn constant_model_converges_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "step.toml",
        &format!("{LEADS0}\n[[piece]]\nx_lo = 0.0\nx_hi = 5.0\nu = 0.3\n\n[sweep]\ne_min = 0.05\ne_max = 1.0\npoints = 40\n\n[converge]\nn0 = 4\nepsilon = 1e-6\nn_max = 64\n"),
    );
    let out = dir.path().join("eps.csv");
    assert!(qwi(&["converge", s(&cfg), "--out", s(&out)]).status.success());
    let rows = rows(&out);
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| f(&r[2]) == 0.0));
}

#[test]
fn profile_of_free_and_matched_systems_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "flat.toml",
        &format!("{LEADS0}\n[[piece]]\nx_lo = 0.0\nx_hi = 3.0\nu = 0.0\n\n[[piece]]\nx_lo = 3.0\nx_hi = 8.0\nu = 0.0\n"),
    );
    let out = dir.path().join("z.csv");
    assert!(qwi(&["profile", s(&cfg), "--energy", "0.4", "--samples", "5", "--out", s(&out)]).status.success());
    let rows = rows(&out);
    assert_eq!(rows.len(), 3 + 2 * 5);
    let z0 = (f(&rows[0][1]), f(&rows[0][2]));
    assert!(rows.iter().all(|r| (f(&r[1]), f(&r[2])) == z0 && r[3] == "R"));
}

#[test]
fn resonance_profile_oscillates_at_half_wavelength() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z.csv");
    let peaks = dir.path().join("peaks.csv");
    assert!(qwi(&["transmit", "--scenario", "fig1", "--peaks", s(&peaks), "--out", s(&dir.path().join("t.csv"))])
        .status
        .success());
    let e = f(&rows(&peaks)[0][0]);
    let energy = format!("{e}");
    assert!(qwi(&["profile", "--scenario", "fig1", "--energy", &energy, "--samples", "4000", "--out", s(&out)])
        .status
        .success());
    // local maxima of |Z| between the barriers
    let pts: Vec<(f64, f64)> = rows(&out)
        .iter()
        .map(|r| (f(&r[0]), f(&r[1]).hypot(f(&r[2]))))
        .filter(|(x, _)| x.abs() < 45.0)
        .collect();
    let maxima: Vec<f64> = pts.windows(3).filter(|w| w[1].1 > w[0].1 && w[1].1 >= w[2].1).map(|w| w[1].0).collect();
    assert!(maxima.len() > 10);
    let period = (maxima[maxima.len() - 1] - maxima[0]) / (maxima.len() - 1) as f64;
    let k = (0.1 * e / qwi::H2_OVER_2M0).sqrt();
    assert!((period / (std::f64::consts::PI / k) - 1.0).abs() < 1e-3, "period {period}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.toml", "[material\nm_rel = 0.1\n");
    let res = qwi(&["transmit", s(&broken)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 1"));

    let no_sweep = write(dir.path(), "nosweep.toml", LEADS0);
    assert_eq!(qwi(&["transmit", s(&no_sweep)]).status.code(), Some(1));

    let asym = write(
        dir.path(),
        "asym.toml",
        "[material]\nm_rel = 0.1\n\n[leads]\nu_left = 0.0\nu_right = 0.2\n\n[sweep]\ne_min = 0.5\ne_max = 1.0\npoints = 5\n",
    );
    let res = qwi(&["transmit", s(&asym)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("u_right"));

    let below = write(
        dir.path(),
        "below.toml",
        "[material]\nm_rel = 0.1\n\n[leads]\nu_left = 0.3\nu_right = 0.3\n\n[sweep]\ne_min = 0.1\ne_max = 1.0\npoints = 5\n",
    );
    let res = qwi(&["transmit", s(&below)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("u_left"));

    assert_eq!(qwi(&["transmit", "--scenario", "nope"]).status.code(), Some(1));
    assert_eq!(qwi(&["transmit", s(&broken), "--bogus"]).status.code(), Some(1));
    assert_eq!(qwi(&["profile", "--scenario", "fig1"]).status.code(), Some(1));
    assert_eq!(qwi(&["transmit", "/nonexistent/file.toml"]).status.code(), Some(1));
    assert_eq!(qwi(&["--help"]).status.code(), Some(0));
}
