use std::path::Path;
use std::process::{Command, Output};

fn dichotomy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dichotomy")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const MG: &str = "a = 1.0\ntau = 1.0\nt_end = 100.0\nhistories = [0.3, 1.8]\n[map]\nfamily = \"mackey_glass\"\nparams = { p = 2.0, n = 20.0 }\n";

#[test]
fn certify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write_config(dir.path(), "ok.toml", MG);
    let out = dichotomy(&["certify", &ok, "--out", &dir.path().join("cert").to_string_lossy()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("certified: true"));
    let csv = std::fs::read_to_string(dir.path().join("cert/certification.csv")).unwrap();
    assert!(csv.starts_with("history,t_end,min,max,final,slack_lo,slack_hi,contained"));
    assert_eq!(csv.lines().count(), 3);

    let loose = write_config(dir.path(), "loose.toml", &MG.replace("t_end = 100.0", "t_end = 10.0\ntail_fraction = 0.99"));
    assert_eq!(dichotomy(&["certify", &loose]).status.code(), Some(1));

    let bad = write_config(dir.path(), "bad.toml", &MG.replace("p = 2.0", "p = -2.0"));
    let out = dichotomy(&["certify", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert_eq!(dichotomy(&["certify", "/nonexistent/config.toml"]).status.code(), Some(2));
    assert_eq!(dichotomy(&["certify"]).status.code(), Some(2));
}

#[test]
fn analyze_and_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "mg.toml", MG);
    let out = String::from_utf8(dichotomy(&["analyze", &cfg]).stdout).unwrap();
    assert!(out.contains("class: SMap") && out.contains("K = 1\n") && out.contains("f'(K) = -10"));
    assert!(out.contains("2-cycle: alpha = "));

    let out = String::from_utf8(dichotomy(&["bounds", "--csv", &cfg]).stdout).unwrap();
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines[0], "pipeline,verdict,lo,hi,margin");
    assert!(lines[1].starts_with("f_cycle,bounded_by_interval,"));
    assert!(lines.last().unwrap().starts_with("best,bounded_by_interval,3.67949"));
}

#[test]
fn simulate_writes_one_csv_per_history() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "mg.toml", MG);
    let out_dir = dir.path().join("sim");
    let out = dichotomy(&["simulate", &cfg, "--out", &out_dir.to_string_lossy()]);
    assert!(out.status.success());
    for i in 0..2 {
        let csv = std::fs::read_to_string(out_dir.join(format!("trajectory_{i}.csv"))).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x"));
        assert_eq!(lines.next().unwrap().split(',').next(), Some("-1.0000000000000000e0"));
        // 100 steps per delay from -1 to 100
        assert_eq!(csv.lines().count(), 1 + 101 * 100 + 1);
    }
}

#[test]
fn stability_subcommand() {
    let out = dichotomy(&["stability", "--a", "1", "--b", "-10", "--tau", "0.2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("N = 1") && text.contains("locally stable: false"));
    let out = dichotomy(&["stability", "--a", "1", "--b", "-10", "--tau", "0.1"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("locally stable: true"));
    assert_eq!(dichotomy(&["stability", "--a", "1", "--b", "10", "--tau", "0.1"]).status.code(), Some(2));
}

#[test]
fn reproduce_and_taylor_demo() {
    let dir = tempfile::tempdir().unwrap();
    let out = dichotomy(&["reproduce", "--example", "ex1", "--out", &dir.path().to_string_lossy()]);
    assert!(out.status.success());
    assert!(dir.path().join("ex1_summary.txt").exists());
    assert_eq!(dichotomy(&["reproduce", "--example", "ex9", "--out", "x"]).status.code(), Some(2));

    let out = dichotomy(&["taylor", "--t-end", "20", "--history", "0.5", "--out", &dir.path().to_string_lossy()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("SUMap") && text.contains("history 0.5: tail"));
    let csv = std::fs::read_to_string(dir.path().join("taylor_0.csv")).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap().split(',').next(), Some("-1.0000000000000000e0"));
}

#[test]
fn shipped_configs_certify() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().unwrap();
    let mut seen = 0;
    for entry in std::fs::read_dir(configs).unwrap() {
        let path = entry.unwrap().path();
        let out = dichotomy(&["certify", &path.to_string_lossy(), "--out", &dir.path().to_string_lossy()]);
        assert_eq!(out.status.code(), Some(0), "{}", path.display());
        seen += 1;
    }
    assert_eq!(seen, 3);
}
