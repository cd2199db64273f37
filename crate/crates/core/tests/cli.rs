use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kinetic_lift::io::read_snapshot;
use kinetic_lift::scenario::Scenario;

fn klift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_klift"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn desk() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/helium_desk.cfg")
}

fn write_cfg(dir: &Path, name: &str, extra: &str) -> PathBuf {
    let path = dir.join(name);
    let text = std::fs::read_to_string(desk()).unwrap() + extra;
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn zero_steps_reproduces_initial_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f0.klift");
    let o = klift(&[
        "run-reference",
        "--config",
        s(&desk()),
        "--steps",
        "0",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let f = read_snapshot(&out).unwrap();
    let expected = Scenario::from_path(desk())
        .unwrap()
        .initial_field()
        .unwrap();
    assert_eq!(f.values, expected.values);
    assert_eq!(f.time, 0.0);
}

#[test]
fn reference_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.klift"), dir.path().join("b.klift"));
    for (out, threads) in [(&a, "1"), (&b, "3")] {
        let o = klift(&[
            "run-reference",
            "--config",
            s(&desk()),
            "--cells",
            "50",
            "--steps",
            "10",
            "--threads",
            threads,
            "--out",
            s(out),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn lift_writes_reports_with_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    let reference = dir.path().join("ref.klift");
    let cfg = write_cfg(dir.path(), "c.cfg", "grid.N = 40\nreference.steps = 100\n");
    assert!(
        klift(&["run-reference", "--config", s(&cfg), "--out", s(&reference)])
            .status
            .success()
    );
    let prefix = dir.path().join("lift");
    let o = klift(&[
        "lift",
        "--config",
        s(&cfg),
        "--reference",
        s(&reference),
        "--order",
        "1",
        "--out",
        s(&prefix),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("|f - f_c|"));

    let hash = {
        let mut sc = Scenario::from_path(&cfg).unwrap();
        sc.cr_order = 1;
        sc.config_hash()
    };
    let summary = std::fs::read_to_string(dir.path().join("lift_summary.csv")).unwrap();
    assert!(summary.starts_with(&format!("# config_hash = {hash}\n")));
    assert!(summary.contains("# mass_rescale = true"));
    let data: Vec<&str> = summary.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(
        data[0],
        "order,solver,error_lift,error_equilibrium,iterations,gmres_iterations,moment_drift,converged"
    );
    let fields: Vec<&str> = data[1].split(',').collect();
    let (e_lift, e_eq): (f64, f64) = (fields[2].parse().unwrap(), fields[3].parse().unwrap());
    assert!(e_lift < e_eq);

    let cells = std::fs::read_to_string(dir.path().join("lift_cells.csv")).unwrap();
    assert_eq!(cells.lines().filter(|l| !l.starts_with('#')).count(), 41);
    let relerr = std::fs::read_to_string(dir.path().join("lift_relerr.csv")).unwrap();
    assert!(relerr.contains("cell,x,v,log10_rel_error,exact"));
    let lifted = read_snapshot(dir.path().join("lift.klift")).unwrap();
    assert_eq!(lifted.n_cells(), 40);
}

#[test]
fn equilibrium_steady_state_lifts_with_zero_error() {
    let dir = tempfile::tempdir().unwrap();
    // surface equal to ambient: the uniform equilibrium is a steady state
    let cfg = write_cfg(
        dir.path(),
        "eq.cfg",
        "surface.p_ratio = 1\nsurface.T_ratio = 1\ngrid.N = 20\n",
    );
    let reference = dir.path().join("eq.klift");
    assert!(klift(&[
        "run-reference",
        "--config",
        s(&cfg),
        "--steps",
        "5",
        "--out",
        s(&reference)
    ])
    .status
    .success());
    let prefix = dir.path().join("l");
    let o = klift(&[
        "lift",
        "--config",
        s(&cfg),
        "--reference",
        s(&reference),
        "--out",
        s(&prefix),
    ]);
    assert!(o.status.success());
    let summary = std::fs::read_to_string(dir.path().join("l_summary.csv")).unwrap();
    let row = summary.lines().last().unwrap();
    let err: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    let peak = read_snapshot(&reference)
        .unwrap()
        .values
        .iter()
        .fold(0.0f64, |m, v| m.max(*v));
    assert!(err <= 1e-12 * peak, "{err}");
}

#[test]
fn spectrum_csv_for_qr_projector() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = klift(&[
        "spectrum",
        "--config",
        s(&desk()),
        "--velocities",
        "56",
        "--operator",
        "projector-qr",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let eig: Vec<(f64, f64)> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("re"))
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(eig.len(), 56);
    assert!(eig
        .iter()
        .all(|(re, im)| im.abs() < 1e-10 && (re.abs() < 1e-10 || (re - 1.0).abs() < 1e-10)));
    assert!(text.contains("# operator = projector-qr"));
}

#[test]
fn dense_jacobian_beyond_cap_is_an_argument_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = klift(&[
        "spectrum",
        "--config",
        s(&desk()),
        "--operator",
        "jacobian-qr",
        "--out",
        s(&dir.path().join("j.csv")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_and_restrict() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "c.cfg", "reference.steps = 20\n");
    let out = dir.path().join("sweep.csv");
    let o = klift(&[
        "sweep",
        "--config",
        s(&cfg),
        "--grid-sizes",
        "10,20",
        "--orders",
        "0,1",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<String> = std::fs::read_to_string(&out)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(String::from)
        .collect();
    assert_eq!(
        rows[0],
        "N,m,gmres_iterations,newton_iterations,converged,error"
    );
    assert_eq!(rows.len(), 5);
    assert!(rows[1..].iter().all(|r| r.contains(",true,")));

    let reference = dir.path().join("r.klift");
    assert!(
        klift(&["run-reference", "--config", s(&cfg), "--out", s(&reference)])
            .status
            .success()
    );
    let mac = dir.path().join("mac.csv");
    assert!(klift(&[
        "restrict",
        "--config",
        s(&cfg),
        "--reference",
        s(&reference),
        "--out",
        s(&mac)
    ])
    .status
    .success());
    let text = std::fs::read_to_string(&mac).unwrap();
    assert!(text.contains("cell,x,n,u,T"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 101);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // missing --config
    let o = klift(&["run-reference", "--out", s(&dir.path().join("x"))]);
    assert_eq!(o.status.code(), Some(2));
    // unknown subcommand and bad flag value
    assert_eq!(klift(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        klift(&[
            "lift",
            "--solver",
            "jacobi",
            "--reference",
            "a",
            "--out",
            "b"
        ])
        .status
        .code(),
        Some(2)
    );
    // malformed config
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "grid.N = many\n").unwrap();
    let o = klift(&[
        "run-reference",
        "--config",
        s(&bad),
        "--out",
        s(&dir.path().join("x")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));

    // an unstable time step blows up: numerical failure, no snapshot left
    let cfg = write_cfg(
        dir.path(),
        "unstable.cfg",
        "time.cfl = 40\ngrid.N = 20\nflux.scheme = centered\n",
    );
    let out = dir.path().join("blown.klift");
    let o = klift(&[
        "run-reference",
        "--config",
        s(&cfg),
        "--steps",
        "200",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
    assert!(!dir.path().join("blown.klift.partial").exists());
}
