use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fairmax_cli::manifest::{manifest_value, MANIFEST_FILE};
use fairmax_cli::source::fingerprint;
use fairmax_core::data::load_dataset_dir;
use fairmax_core::FairnessReport;

fn fairmax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairmax"))
        .args(args)
        .env_remove("FAIRMAX_SEED")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = fairmax(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    fairmax(args).status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, n: usize, seed: u64) -> PathBuf {
    let d = dir.join(format!("data-{n}-{seed}"));
    ok(&["synth", "--n", &n.to_string(), "--bias", "0.8", "--seed", &seed.to_string(), "--out", s(&d)]);
    d
}

fn section(report: &str, name: &str) -> FairnessReport {
    let body = report.split(&format!("[{name}]\n")).nth(1).unwrap();
    let body = body.split("\n[").next().unwrap();
    FairnessReport::from_kv(body).unwrap()
}

#[test]
fn synth_is_deterministic_and_reports_bias() {
    let t = tempfile::tempdir().unwrap();
    let (a, b) = (t.path().join("a"), t.path().join("b"));
    let stdout = ok(&["synth", "--n", "5000", "--bias", "0.8", "--seed", "1", "--out", s(&a)]);
    ok(&["synth", "--n", "5000", "--bias", "0.8", "--seed", "1", "--out", s(&b)]);
    assert_eq!(fs::read(a.join("features.csv")).unwrap(), fs::read(b.join("features.csv")).unwrap());
    assert!(a.join(MANIFEST_FILE).is_file());

    let rate: f64 = stdout
        .split("statistical rate ")
        .nth(1)
        .and_then(|r| r.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(rate < 80.0, "{stdout}");
}

#[test]
fn seed_env_is_a_default() {
    let t = tempfile::tempdir().unwrap();
    let run = |env: Option<&str>, extra: &[&str], out: &str| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_fairmax"));
        c.args(["synth", "--n", "100", "--out", s(&t.path().join(out))]).args(extra);
        match env {
            Some(v) => c.env("FAIRMAX_SEED", v),
            None => c.env_remove("FAIRMAX_SEED"),
        };
        assert!(c.output().unwrap().status.success());
        fs::read_to_string(t.path().join(out).join(MANIFEST_FILE)).unwrap()
    };
    assert_eq!(manifest_value(&run(Some("17"), &[], "a"), "seed"), Some("17"));
    assert_eq!(manifest_value(&run(Some("17"), &["--seed", "3"], "b"), "seed"), Some("3"));
    assert_eq!(manifest_value(&run(None, &[], "c"), "seed"), Some("0"));
    let bad = Command::new(env!("CARGO_BIN_EXE_fairmax"))
        .args(["synth", "--n", "100", "--out", s(&t.path().join("d"))])
        .env("FAIRMAX_SEED", "x")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn train_writes_run_and_debiases() {
    let t = tempfile::tempdir().unwrap();
    let data = synth(t.path(), 5000, 1);
    let base = t.path().join("base");
    let adv = t.path().join("adv");
    ok(&["train", "--algo", "baseline", "--data", s(&data), "--seed", "1", "--out", s(&base)]);
    ok(&["train", "--algo", "adversarial", "--lambda", "1", "--data", s(&data), "--seed", "1", "--out", s(&adv)]);
    for f in [
        MANIFEST_FILE,
        "trace.csv",
        "config.txt",
        "selection.txt",
        "final.params",
        "final_adversary.params",
        "selected.params",
        "selected_adversary.params",
        "report.txt",
        "scores.csv",
    ] {
        assert!(adv.join(f).is_file(), "{f}");
    }

    let base_report = fs::read_to_string(base.join("report.txt")).unwrap();
    let adv_report = fs::read_to_string(adv.join("report.txt")).unwrap();
    let b = section(&base_report, "selected.test");
    let a = section(&adv_report, "selected.test");
    assert!(b.statistical_rate < 80.0 && !b.passes_80_rule);
    assert!(a.statistical_rate > b.statistical_rate);

    let manifest = fs::read_to_string(adv.join(MANIFEST_FILE)).unwrap();
    let (ds, _) = load_dataset_dir(&data).unwrap();
    assert_eq!(manifest_value(&manifest, "dataset_sha256"), Some(fingerprint(&ds).as_str()));
    assert_eq!(manifest_value(&manifest, "algorithm"), Some("adversarial"));
    assert!(manifest.contains("[config]\n"));
}

#[test]
fn rerun_from_echoed_config_is_byte_identical() {
    let t = tempfile::tempdir().unwrap();
    let data = synth(t.path(), 800, 2);
    let first = t.path().join("first");
    let second = t.path().join("second");
    ok(&["train", "--algo", "gda-modified", "--data", s(&data), "--seed", "9", "--epochs", "25", "--noise", "--out", s(&first)]);
    let cfg = first.join("config.txt");
    ok(&["train", "--algo", "gda-modified", "--data", s(&data), "--config", s(&cfg), "--out", s(&second)]);
    assert_eq!(fs::read(first.join("trace.csv")).unwrap(), fs::read(second.join("trace.csv")).unwrap());
}

#[test]
fn exit_codes() {
    let t = tempfile::tempdir().unwrap();
    let data = synth(t.path(), 300, 3);
    let out = t.path().join("x");
    let d = s(&data);
    assert_eq!(code(&["train", "--algo", "nope", "--data", d, "--out", s(&out)]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["train", "--algo", "baseline", "--data", d, "--set", "nokey=1", "--out", s(&out)]), 2);
    assert_eq!(code(&["train", "--algo", "baseline", "--data", d, "--eta2", "0", "--out", s(&out)]), 2);

    let cfg = t.path().join("bad.txt");
    fs::write(&cfg, "# fine\nepochs = 3\nlambda = abc\n").unwrap();
    let o = fairmax(&["train", "--algo", "baseline", "--data", d, "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("lambda"), "{err}");

    let missing = t.path().join("missing");
    assert_eq!(code(&["train", "--algo", "baseline", "--data", s(&missing), "--out", s(&out)]), 3);
    let bad_csv = t.path().join("bad.csv");
    fs::write(&bad_csv, "a,y,z\n1,0,0\n2,1\n").unwrap();
    let args = ["train", "--algo", "baseline", "--csv", s(&bad_csv), "--label-col", "y", "--sensitive-col", "z", "--out", s(&out)];
    assert_eq!(code(&args), 3);

    let o = fairmax(&["train", "--algo", "baseline", "--data", d, "--model", "mlp", "--eta2", "1e300", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("iteration"));
}

#[test]
fn csv_input_runs_end_to_end() {
    let t = tempfile::tempdir().unwrap();
    let path = t.path().join("people.csv");
    let mut text = String::from("age,priors,charge,race,recid\n");
    for i in 0..300 {
        let race = if i % 3 == 0 { "A" } else { "B" };
        let priors = (i * 7) % 11;
        let recid = u8::from(priors > 5 || (race == "A" && i % 4 == 0));
        let charge = if i % 2 == 0 { "F" } else { "M" };
        text.push_str(&format!("{},{priors},{charge},{race},{recid}\n", 18 + i % 50));
    }
    fs::write(&path, text).unwrap();
    let out = t.path().join("run");
    let stdout = ok(&[
        "train", "--algo", "adversarial", "--csv", s(&path), "--label-col", "recid", "--sensitive-col", "race",
        "--positive", "1", "--protected", "A", "--epochs", "10", "--out", s(&out),
    ]);
    assert!(stdout.contains("selected epoch"));
    let eval = ok(&[
        "evaluate", "--run", s(&out), "--csv", s(&path), "--label-col", "recid", "--sensitive-col", "race",
        "--protected", "A",
    ]);
    let report = FairnessReport::from_kv(&eval).unwrap();
    assert_eq!(report.n_samples, 300);
}

#[test]
fn compare_single_seed_matches_single_run() {
    let t = tempfile::tempdir().unwrap();
    let data = synth(t.path(), 1000, 4);
    let cmp = t.path().join("cmp");
    ok(&["compare", "--data", s(&data), "--seeds", "6", "--epochs", "15", "--out", s(&cmp)]);
    let table = fs::read_to_string(cmp.join("comparison.csv")).unwrap();
    assert_eq!(table.lines().count(), 5);
    for algo in ["baseline", "adversarial", "gda-normal", "gda-modified"] {
        let single = t.path().join(algo);
        ok(&["train", "--algo", algo, "--data", s(&data), "--seed", "6", "--epochs", "15", "--out", s(&single)]);
        assert_eq!(
            fs::read(single.join("trace.csv")).unwrap(),
            fs::read(cmp.join(algo).join("seed-6").join("trace.csv")).unwrap()
        );
        let selection = fs::read_to_string(single.join("selection.txt")).unwrap();
        let epoch: usize = manifest_value(&selection, "selected_epoch").unwrap().parse().unwrap();
        let trace = fairmax_core::train::read_trace_csv(single.join("trace.csv")).unwrap();
        let rec = trace[epoch - 1];
        let row: Vec<&str> = table.lines().find(|l| l.starts_with(&format!("{algo},"))).unwrap().split(',').collect();
        assert_eq!(row[1], "1");
        assert_eq!(row[2].parse::<f64>().unwrap(), rec.test_accuracy);
        assert_eq!(row[4].parse::<f64>().unwrap(), rec.statistical_rate_test);
    }
    assert_eq!(code(&["compare", "--data", s(&data), "--seeds", "", "--out", s(&cmp)]), 2);
    assert_eq!(code(&["compare", "--data", s(&data), "--out", s(&cmp)]), 2);
}

#[test]
fn compare_orders_descent_ascent_updates() {
    let t = tempfile::tempdir().unwrap();
    let data = synth(t.path(), 5000, 1);
    let cmp = t.path().join("cmp");
    ok(&["compare", "--data", s(&data), "--seeds", "1,2,3,4,5", "--out", s(&cmp)]);
    let table = fs::read_to_string(cmp.join("comparison.csv")).unwrap();
    let row = |algo: &str| -> Vec<f64> {
        let line = table.lines().find(|l| l.starts_with(&format!("{algo},"))).unwrap();
        line.split(',').skip(2).take(4).map(|v| v.parse().unwrap()).collect()
    };
    let (normal, modified) = (row("gda-normal"), row("gda-modified"));
    assert!(modified[0] >= normal[0], "{table}");
    assert!(modified[1] >= 80.0 && normal[1] >= 80.0, "{table}");
}

/// Group means of the emitted histogram, from bin centres.
fn histogram_means(csv: &str) -> (f64, f64, u64, u64) {
    let (mut s0, mut s1, mut n0, mut n1) = (0.0, 0.0, 0u64, 0u64);
    for line in csv.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let centre = 0.5 * (f[1] + f[2]);
        s0 += centre * f[3];
        s1 += centre * f[4];
        n0 += f[3] as u64;
        n1 += f[4] as u64;
    }
    (s0 / n0 as f64, s1 / n1 as f64, n0, n1)
}

#[test]
fn plot_data_conserves_counts_and_shows_gap() {
    let t = tempfile::tempdir().unwrap();
    let data = synth(t.path(), 5000, 1);
    let run = t.path().join("base");
    ok(&["train", "--algo", "baseline", "--data", s(&data), "--seed", "1", "--out", s(&run)]);
    ok(&["plot-data", "--run", s(&run)]);
    let plots = run.join("plots");
    let hist = fs::read_to_string(plots.join("histogram.csv")).unwrap();
    assert_eq!(hist.lines().count(), 51);
    let (m0, m1, n0, n1) = histogram_means(&hist);
    let scores = fs::read_to_string(run.join("scores.csv")).unwrap();
    let z1 = scores.lines().skip(1).filter(|l| l.ends_with(",1")).count() as u64;
    let total = scores.lines().count() as u64 - 1;
    assert_eq!((n0, n1), (total - z1, z1));
    assert!((m1 - m0).abs() > 0.05, "{m0} {m1}");

    let metrics = fs::read_to_string(plots.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 2);
    let svg = fs::read_to_string(plots.join("figure.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("</svg>"));
    assert!(plots.join(MANIFEST_FILE).is_file());
}

#[test]
fn constant_scores_fill_one_bin() {
    let t = tempfile::tempdir().unwrap();
    let data = synth(t.path(), 400, 5);
    let run = t.path().join("const");
    ok(&["train", "--algo", "baseline", "--data", s(&data), "--set", "pretrain_clf_epochs=0", "--out", s(&run)]);
    let out = t.path().join("plots");
    ok(&["plot-data", "--run", s(&run), "--out", s(&out)]);
    let hist = fs::read_to_string(out.join("histogram.csv")).unwrap();
    let nonzero: Vec<&str> = hist.lines().skip(1).filter(|l| !l.ends_with(",0,0")).collect();
    assert_eq!(nonzero.len(), 1, "{hist}");
    assert!(nonzero[0].starts_with("25,"));
}

#[test]
fn plot_data_rejects_incomplete_run() {
    let t = tempfile::tempdir().unwrap();
    assert_eq!(code(&["plot-data", "--run", s(&t.path().join("nothing"))]), 3);
    fs::write(t.path().join("trace.csv"), "x\n").unwrap();
    assert_eq!(code(&["plot-data", "--run", s(t.path())]), 3);
}
