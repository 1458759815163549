use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use quasicrystal::io::{parse_diagnostics_csv, read_snapshot};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasicrystal"))
        .args(args)
        .output()
        .expect("spawn quasicrystal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn turing_reports_the_onset() {
    let out = bin(&["turing", "--a", "2", "--d1", "0.25", "--d2", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("B_c = 4\n"), "{text}");
    assert!(text.contains("k_c = 2\n"), "{text}");
    assert!(text.contains("eta = 0.5\n"), "{text}");
}

#[test]
fn bad_invocations_fail() {
    assert_eq!(bin(&["no-such-command"]).status.code(), Some(2));
    let out = bin(&["turing", "--a=-1", "--d1", "0.25", "--d2", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.txt", "symmetry = dihedral:12\nlambda = 0.2\nt = 1\nwobble = 3\n");
    let out = bin(&["simulate-sh", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("wobble"));

    // Equation mismatch between subcommand and file.
    let cfg = write_config(dir.path(), "sh.txt", "symmetry = dihedral:8\nlambda = 0.2\nt = 0.1\nn = 1\n");
    assert_eq!(bin(&["simulate-bruss", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn simulate_sh_writes_outputs_and_renders() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let cfg = write_config(
        dir.path(),
        "run.txt",
        "symmetry = dihedral:8\nn = 2\nlambda = 0.2\nt = 0.5\ndt = 0.05\n\
         diag_every = 2\nsnapshot_every = 5\nperturbation = 1e-3\nseed = 4\n",
    );
    let out = bin(&["simulate-sh", "--config", &cfg, "--output", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    assert!(out_dir.join("config.txt").exists());
    let records = parse_diagnostics_csv(&fs::read_to_string(out_dir.join("diagnostics.csv")).unwrap()).unwrap();
    assert_eq!(records.len(), 6);
    assert!((records.last().unwrap().t - 0.5).abs() < 1e-12);
    assert!(records.iter().all(|r| r.sym_drift < 1e-10));

    let final_snap = out_dir.join("final.snap");
    let snap = read_snapshot(&final_snap).unwrap();
    assert!((snap.t - 0.5).abs() < 1e-12);
    assert_eq!(snap.fields.len(), 1);
    // Step 5 gets a periodic snapshot; the last step only writes final.snap.
    assert!(out_dir.join("snapshot_00000005.snap").exists());
    assert!(!out_dir.join("snapshot_00000010.snap").exists());

    let image = dir.path().join("u.pgm");
    let out = bin(&[
        "render",
        "--snapshot",
        final_snap.to_str().unwrap(),
        "--output",
        image.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = fs::read(&image).unwrap();
    let header = b"P5\n512 512\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len(), header.len() + 512 * 512);

    // Only one component in a Swift-Hohenberg snapshot.
    let out = bin(&[
        "render",
        "--snapshot",
        final_snap.to_str().unwrap(),
        "--output",
        image.to_str().unwrap(),
        "--component",
        "v",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "run.txt",
        "symmetry = dihedral:12\nn = 1\nlambda = 0.3\nt = 0.2\nic = random\nseed = 9\n",
    );
    let run = |name: &str| {
        let o = dir.path().join(name);
        assert!(bin(&["simulate-sh", "--config", &cfg, "--output", o.to_str().unwrap()]).status.success());
        // The manifest records the output directory, so compare payloads.
        let snap = fs::read(o.join("final.snap")).unwrap();
        let at = snap.windows(4).position(|w| w == b"\n---").unwrap();
        (fs::read(o.join("diagnostics.csv")).unwrap(), snap[at..].to_vec())
    };
    let (a, b) = (run("a"), run("b"));
    assert!(a == b, "runs differ");
}

#[test]
fn simulate_bruss_writes_two_components() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("bruss");
    let cfg = write_config(
        dir.path(),
        "bruss.txt",
        "symmetry = dihedral:12\nequation = brusselator\nn = 1\nb = 4.1\nt = 0.2\n\
         ic = steady-plus-critical\nic_amplitude = 1e-3\n",
    );
    let out = bin(&["simulate-bruss", "--config", &cfg, "--output", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("diagnostics.csv")).unwrap();
    assert!(csv.lines().next().unwrap().ends_with(",min_v,max_v"));
    let records = parse_diagnostics_csv(&csv).unwrap();
    assert!(records.iter().all(|r| r.min_u > 0.0 && r.v_range.unwrap().0 > 0.0));
    let snap = read_snapshot(&out_dir.join("final.snap")).unwrap();
    assert_eq!(snap.fields.len(), 2);

    let image = dir.path().join("v.pgm");
    let out = bin(&[
        "render",
        "--snapshot",
        out_dir.join("final.snap").to_str().unwrap(),
        "--output",
        image.to_str().unwrap(),
        "--resolution",
        "64",
        "--component",
        "v",
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read(&image).unwrap().len(), b"P5\n64 64\n255\n".len() + 64 * 64);
}
