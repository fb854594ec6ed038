use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_leaklab"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

/// Runs `args` three times (twice on one thread count, once on another) and
/// compares every output file byte for byte.
fn assert_reproducible(args: &[&str]) {
    let dirs: Vec<tempfile::TempDir> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    for (dir, threads) in dirs.iter().zip(["1", "1", "4"]) {
        let mut a = args.to_vec();
        a.extend(["--threads", threads]);
        let out = run(&a, dir.path());
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let first = read_all(dirs[0].path());
    assert!(!first.is_empty());
    for d in &dirs[1..] {
        assert_eq!(first, read_all(d.path()), "{args:?}");
    }
}

#[test]
fn run_is_byte_identical_across_reruns_and_threads() {
    let cfg = scenario("video-vs-web.toml");
    assert_reproducible(&["run", cfg.to_str().unwrap(), "--trials", "300", "--dump-layers"]);
}

#[test]
fn other_subcommands_are_reproducible() {
    let cfg = scenario("video-vs-web.toml");
    let cfg = cfg.to_str().unwrap();
    assert_reproducible(&["sweep", cfg, "--trials", "150"]);
    assert_reproducible(&["dpi", cfg, "--trials", "200"]);
    assert_reproducible(&["certify", cfg, "--pairs", "200"]);
    assert_reproducible(&["oracle", "--trials", "50"]);
    let bsc = scenario("bsc-oracle.toml");
    assert_reproducible(&["multisession", bsc.to_str().unwrap(), "--trials", "400"]);
}

#[test]
fn run_writes_result_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["run", "--trials", "200", "--format", "csv"], dir.path());
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("result.csv")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), csv);
    assert!(csv.lines().next().unwrap().contains("mi_lb_bits"));
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("condition_v_ok = true"));
}

#[test]
fn sweep_has_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("video-vs-web.toml");
    let out = run(&["sweep", cfg.to_str().unwrap(), "--trials", "150"], dir.path());
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("pareto.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.split(',').any(|c| c == "feasible"));
    assert_eq!(csv.lines().count(), 1 + 7);
}

#[test]
fn oracle_exit_code_reflects_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["oracle", "--trials", "100"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("oracle.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn oracle_reports_a_channel_file() {
    let dir = tempfile::tempdir().unwrap();
    let ch = dir.path().join("bsc.txt");
    fs::write(&ch, "priors 0.5 0.5\n0.9 0.1\n0.1 0.9\n").unwrap();
    let out = run(&["oracle", "--channel", ch.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let pe: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("bayes_error = "))
        .expect("bayes_error line")
        .parse()
        .unwrap();
    assert!((pe - 0.1).abs() < 1e-12, "{text}");
    fs::write(&ch, "priors 0.5 0.5\n0.9 0.2\n").unwrap();
    let out = run(&["oracle", "--channel", ch.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_key_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[network]\nbase_latncy_s = 0.01\n").unwrap();
    let out = run(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("base_latncy_s") && err.contains("did you mean `base_latency_s`"), "{err}");
}

#[test]
fn too_few_trials_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["run", "--trials", "10"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn shipped_scenarios_load() {
    for name in ["video-vs-web.toml", "chat-vs-web-updown.toml", "null-video.toml", "high-c.toml", "bsc-oracle.toml"] {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&["run", scenario(name).to_str().unwrap(), "--trials", "150"], dir.path());
        assert!(out.status.code() != Some(1), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
