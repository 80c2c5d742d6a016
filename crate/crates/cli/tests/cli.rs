use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ssls::model::{Dataset, PenaltySpec};
use ssls::solvers::{brute_force_fit, initial_estimator, NoiseLevel};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn ssls(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssls"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str], out: &Path) {
    let o = ssls(args, out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

fn config(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn read(path: PathBuf) -> String {
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn fixture() -> String {
    configs().join("../data/p4.csv").to_string_lossy().into_owned()
}

#[test]
fn fit_matches_exhaustive_search_on_fixture() {
    let out = tempfile::tempdir().unwrap();
    run_ok(&["fit", "--config", &config("fit_p4.cfg")], out.path());
    let ds = Dataset::read_csv(Path::new(&fixture())).unwrap();
    let init = initial_estimator(&ds, NoiseLevel::Known(0.5)).unwrap();
    let spec = PenaltySpec::adaptive(1.0, 0.5, 1.0, &init).unwrap();
    let oracle = brute_force_fit(&ds, &spec).unwrap();
    let text = read(out.path().join("coefficients.csv"));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,name,value"));
    for (j, line) in lines.enumerate() {
        let value: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((value - oracle.beta.get(j)).abs() <= 1e-6, "coefficient {j}: {value} vs {}", oracle.beta.get(j));
    }
    let summary = read(out.path().join("fit_summary.txt"));
    assert!(summary.contains("objective = ") && summary.contains("kkt_max_violation = "));
    assert!(read(out.path().join("support.csv")).starts_with("index,name\n0,x1\n"));
}

#[test]
fn huge_penalty_gives_zero_coefficients_and_repeats_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("[fit]\ndata = \"{}\"\nmethod = \"lasso\"\nlambda1 = 1e6\n", fixture()),
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_ok(&["fit", "--config", &cfg], &a);
    run_ok(&["fit", "--config", &cfg], &b);
    let coefs = read(a.join("coefficients.csv"));
    assert!(coefs.lines().skip(1).all(|l| l.ends_with(",0")), "{coefs}");
    for f in ["coefficients.csv", "support.csv", "fit_summary.txt"] {
        assert_eq!(read(a.join(f)), read(b.join(f)));
    }
}

#[test]
fn path_command_writes_breakpoints() {
    let out = tempfile::tempdir().unwrap();
    run_ok(&["path", "--config", &config("path_p4.cfg")], out.path());
    let path = read(out.path().join("path.csv"));
    assert!(path.starts_with("step,lambda1,coefficient,value\n"));
    assert!(read(out.path().join("path_summary.txt")).contains("max_support = 4"));
}

#[test]
fn smoke_benchmark_is_fast_and_seed_changes_values_only() {
    let dir = tempfile::tempdir().unwrap();
    let start = std::time::Instant::now();
    run_ok(&["benchmark", "--config", &config("smoke.cfg")], &dir.path().join("a"));
    assert!(start.elapsed().as_secs_f64() < 10.0);
    run_ok(&["benchmark", "--config", &config("smoke.cfg"), "--seed", "99"], &dir.path().join("b"));
    let (a, b) = (read(dir.path().join("a/benchmark.csv")), read(dir.path().join("b/benchmark.csv")));
    assert_ne!(a, b);
    let layout = |s: &str| -> Vec<String> {
        s.lines().map(|l| l.split(',').take(3).collect::<Vec<_>>().join(",")).collect()
    };
    assert_eq!(layout(&a), layout(&b));
    let table = read(dir.path().join("a/benchmark.txt"));
    assert!(table.contains("Low dimension") && table.contains("High dimension"));
}

#[test]
fn table1_manifest_has_four_settings() {
    let text = std::fs::read_to_string(configs().join("table1.cfg")).unwrap();
    assert_eq!(text.matches("[[benchmark.designs]]").count(), 4);
    assert!(text.contains("replications = 100"));
}

#[test]
fn track_bundled_panel_reports_descending_budget_columns() {
    let out = tempfile::tempdir().unwrap();
    run_ok(&["track", "--config", &config("track.cfg")], out.path());
    let table = read(out.path().join("tracking.txt"));
    assert!(table.contains("Method |   50 |   30 |   20"), "{table}");
    assert!(table.contains("Fitted(20)") && table.contains("Pred(50)"));
    let report = read(out.path().join("tracking.csv"));
    assert!(report.starts_with("window_start,window_end,method,k,fitted_te,predicted_te,status\n"));
    assert!(read(out.path().join("weights.csv")).starts_with("window_start,method,k,asset,weight\n"));
}

#[test]
fn noiseless_panel_tracks_exactly() {
    let out = tempfile::tempdir().unwrap();
    run_ok(&["track", "--config", &config("track_noiseless.cfg")], out.path());
    let report = read(out.path().join("tracking.csv"));
    for line in report.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[6], "ok");
        let (fitted, predicted): (f64, f64) = (cells[4].parse().unwrap(), cells[5].parse().unwrap());
        assert!(fitted <= 1e-8 && predicted <= 1e-8, "{line}");
    }
}

#[test]
fn missing_panel_file_exits_with_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[track]\npanel = \"no_such_panel.csv\"\n");
    let o = ssls(&["track", "--config", &cfg], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("no_such_panel.csv") && err.starts_with("error[missing_input]"), "{err}");
}

#[test]
fn unknown_keys_and_missing_sections_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("[fit]\ndata = \"{}\"\nlambda = 1.0\n", fixture()));
    let o = ssls(&["fit", "--config", &cfg], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown field `lambda`"));
    let cfg = write_config(dir.path(), &format!("[fit]\ndata = \"{}\"\nlambda1 = 1.0\n", fixture()));
    let o = ssls(&["benchmark", "--config", &cfg], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no [benchmark] section"));
    let o = ssls(&["fit"], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn solver_errors_are_structured() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[simulate]\nexperiment = \"consistency\"\nn = 20\np = 5\nbeta = [1.0]\nsigma = 1.0\nreplications = 2\n",
    );
    let o = ssls(&["simulate", "--config", &cfg], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_grid"));
    let cfg = write_config(
        dir.path(),
        "[simulate]\nexperiment = \"decay\"\nn = 20\np = 5\nbeta = [1.0]\nsigma = 1.0\ncovariance = \"ar1(3)\"\nreplications = 2\nn_grid = [20]\n",
    );
    let o = ssls(&["simulate", "--config", &cfg], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ar1"));
}
