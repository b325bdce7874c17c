//! Subcommand behavior, exit codes and file formats.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use starswitch_cli::execute;
use starswitch_cli::files::{read_trace, DesignFile};
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["starswitch"];
    argv.extend_from_slice(args);
    let code = execute(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn design_file(dir: &TempDir, name: &str, m: &str, eta: &str, extra: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut args = vec![
        "design",
        "--bystanders",
        m,
        "--eta",
        eta,
        "--out",
        path_str(&path),
    ];
    args.extend_from_slice(extra);
    let r = run(&args);
    assert_eq!(r.code, 0, "{}", r.stderr);
    path
}

#[test]
fn design_to_stdout() {
    let r = run(&["design", "--bystanders", "2", "--eta", "4"]);
    assert_eq!(r.code, 0);
    let file: DesignFile = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(file.schema_version, 1);
    assert!((file.e - 0.516398).abs() < 1e-6);
    assert!(file.a.abs() < 1e-9);
    assert!((file.d + file.e).abs() < 1e-9);
    assert_eq!(file.b, 2f64.sqrt());
    assert_eq!(file.c, 1.0);
    assert_eq!(file.potentials.len(), 5);
}

#[test]
fn design_options() {
    let r = run(&[
        "design",
        "--bystanders",
        "2",
        "--eta",
        "4",
        "--root",
        "largest",
        "--cubic",
        "companion",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let file: DesignFile = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(file.root_choice, "largest");
    assert!((file.e - 0.766_387_616_284).abs() < 1e-9);

    let r = run(&[
        "design",
        "--bystanders",
        "2",
        "--eta",
        "4",
        "--root",
        "index:1",
    ]);
    assert_eq!(r.code, 0);

    let r = run(&[
        "design",
        "--bystanders",
        "2",
        "--eta",
        "4",
        "--cubic",
        "bogus",
    ]);
    assert_eq!(r.code, 1);
    assert!(
        r.stderr.contains("companion, trigonometric"),
        "{}",
        r.stderr
    );
}

#[test]
fn infeasible_design_exits_two() {
    let r = run(&["design", "--bystanders", "1000", "--eta", "2"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("g_min"), "{}", r.stderr);
    assert!(r.stderr.contains("feasible   = no"), "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&[]).code, 1);
    assert_eq!(run(&["design", "--bystanders", "2"]).code, 1);
    assert_eq!(run(&["design", "--bystanders", "2", "--eta", "5"]).code, 1);
    assert_eq!(
        run(&[
            "design",
            "--bystanders",
            "2",
            "--eta",
            "4",
            "--root",
            "middle"
        ])
        .code,
        1
    );
    assert_eq!(run(&["design", "--bystanders", "0", "--eta", "4"]).code, 1);
    assert_eq!(run(&["sweep", "--m-min", "5", "--m-max", "2"]).code, 1);
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn verify_reports_pass_and_fail() {
    let dir = TempDir::new().unwrap();
    let path = design_file(&dir, "d.json", "2", "4", &[]);
    let r = run(&["verify", "--design", path_str(&path)]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.contains("verification PASSED"));

    let mut file = DesignFile::read(&path).unwrap();
    file.potentials[2] += 1e-3;
    let broken = dir.path().join("broken.json");
    file.write(&broken).unwrap();
    let r = run(&["verify", "--design", path_str(&broken)]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains("verification FAILED"));
}

#[test]
fn unreadable_files_exit_one_with_field_names() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.json");
    let r = run(&["verify", "--design", path_str(&missing)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("nope.json"));

    let path = design_file(&dir, "d.json", "2", "4", &[]);
    let mut file = DesignFile::read(&path).unwrap();
    file.potentials.push(0.0);
    file.write(&path).unwrap();
    let r = run(&["verify", "--design", path_str(&path)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("`potentials`"), "{}", r.stderr);

    fs::write(&path, "{ not json").unwrap();
    let r = run(&[
        "simulate",
        "--design",
        path_str(&path),
        "--out",
        path_str(&dir.path().join("t.csv")),
    ]);
    assert_eq!(r.code, 1);
}

#[test]
fn simulate_defaults() {
    let dir = TempDir::new().unwrap();
    let path = design_file(&dir, "d.json", "2", "4", &[]);
    let out = dir.path().join("trace.csv");
    let r = run(&[
        "simulate",
        "--design",
        path_str(&path),
        "--out",
        path_str(&out),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("t,fidelity\n"));
    let trace = read_trace(&out).unwrap();
    assert_eq!(trace.len(), 1000);
    let tau = DesignFile::read(&path).unwrap().tau;
    let last = *trace.times().last().unwrap();
    assert!((last / (1.2 * tau) - 1.0).abs() < 1e-3);
    let (i, peak) = trace.peak();
    assert_eq!(trace.times()[i], tau);
    assert!(peak >= 1.0 - 1e-9);
}

#[test]
fn simulate_models_agree() {
    let dir = TempDir::new().unwrap();
    let path = design_file(&dir, "d.json", "3", "6", &[]);
    let mut traces = Vec::new();
    for flag in [
        &["--reduced"][..],
        &["--full"],
        &["--model", "dense"],
        &["--model", "spin"],
    ] {
        let out = dir.path().join(format!("trace{}.csv", traces.len()));
        let mut args = vec![
            "simulate",
            "--design",
            path_str(&path),
            "--steps",
            "200",
            "--out",
            path_str(&out),
        ];
        args.extend_from_slice(flag);
        let r = run(&args);
        assert_eq!(r.code, 0, "{flag:?}: {}", r.stderr);
        traces.push(read_trace(&out).unwrap());
    }
    for t in &traces[1..] {
        for (x, y) in t.values().iter().zip(traces[0].values()) {
            assert!((x - y).abs() < 1e-10);
        }
    }
    let r = run(&[
        "simulate",
        "--design",
        path_str(&path),
        "--full",
        "--reduced",
        "--out",
        "x.csv",
    ]);
    assert_eq!(r.code, 1);
    let r = run(&[
        "simulate",
        "--design",
        path_str(&path),
        "--model",
        "magic",
        "--out",
        path_str(&dir.path().join("m.csv")),
    ]);
    assert_eq!(r.code, 1);
}

#[test]
fn simulate_custom_route_and_window() {
    let dir = TempDir::new().unwrap();
    let path = design_file(&dir, "d.json", "2", "4", &[]);
    let out = dir.path().join("trace.csv");
    // the bystanders 3 and 4 see each other through the hub but not perfectly
    let r = run(&[
        "simulate",
        "--design",
        path_str(&path),
        "--source",
        "3",
        "--target",
        "4",
        "--t-max",
        "5",
        "--steps",
        "11",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let trace = read_trace(&out).unwrap();
    assert_eq!(trace.len(), 11);
    assert!(trace.values()[0] < 1e-28);

    let r = run(&[
        "simulate",
        "--design",
        path_str(&path),
        "--source",
        "1",
        "--target",
        "3",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(r.code, 1, "reduced model needs the route to be symmetric");
    let r = run(&[
        "simulate",
        "--design",
        path_str(&path),
        "--source",
        "1",
        "--target",
        "3",
        "--full",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(r.code, 0);
}

#[test]
fn retarget_round_trip() {
    let dir = TempDir::new().unwrap();
    let path = design_file(&dir, "d.json", "2", "4", &[]);
    let moved = dir.path().join("moved.json");
    let r = run(&[
        "retarget",
        "--design",
        path_str(&path),
        "--target",
        "3",
        "--out",
        path_str(&moved),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let original = DesignFile::read(&path).unwrap();
    let file = DesignFile::read(&moved).unwrap();
    assert_eq!(file.target, 3);
    assert_eq!(file.potentials[2], original.potentials[3]);
    assert_eq!(file.potentials[3], original.potentials[2]);
    let r = run(&["verify", "--design", path_str(&moved)]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.contains("route 1 -> 3"));

    let back = dir.path().join("back.json");
    let r = run(&[
        "retarget",
        "--design",
        path_str(&moved),
        "--target",
        "2",
        "--out",
        path_str(&back),
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(fs::read(&back).unwrap(), fs::read(&path).unwrap());

    let r = run(&[
        "retarget",
        "--design",
        path_str(&path),
        "--target",
        "1",
        "--out",
        path_str(&back),
    ]);
    assert_eq!(r.code, 1);
    let r = run(&[
        "retarget",
        "--design",
        path_str(&path),
        "--target",
        "9",
        "--out",
        path_str(&back),
    ]);
    assert_eq!(r.code, 1);

    let r = run(&[
        "retarget",
        "--design",
        path_str(&path),
        "--source",
        "4",
        "--target",
        "3",
        "--out",
        path_str(&back),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(run(&["verify", "--design", path_str(&back)]).code, 0);
}

#[test]
fn sweep_table() {
    let r = run(&["sweep", "--m-min", "1", "--m-max", "6"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(
        lines[0],
        "m,eta,e,a,d,tau,abs_a_over_sqrt_m,abs_d_over_sqrt_m,note"
    );
    assert_eq!(lines.len(), 7);
    for (k, line) in lines[1..].iter().enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 9);
        assert_eq!(cols[0], (k + 1).to_string());
        let eta: u64 = cols[1].parse().unwrap();
        assert_eq!(eta, starswitch::min_feasible_even_eta(k + 1));
    }

    let r = run(&["sweep", "--m-min", "1", "--m-max", "20", "--eta-max", "10"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.lines().last().unwrap().contains("infeasible"));

    let a = run(&["sweep", "--m-min", "1", "--m-max", "40"]).stdout;
    let b = run(&["sweep", "--m-min", "1", "--m-max", "40"]).stdout;
    assert_eq!(a, b);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_starswitch");
    let ok = Command::new(bin)
        .args(["design", "--bystanders", "2", "--eta", "4"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let infeasible = Command::new(bin)
        .args(["design", "--bystanders", "1000", "--eta", "2"])
        .output()
        .unwrap();
    assert_eq!(infeasible.status.code(), Some(2));
    let usage = Command::new(bin).args(["design"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(1));
}
