use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_convden-bench"))
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn generate_denoise_certify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(bin().args(["generate", "--kind", "ransin", "--s", "2", "--n", "16", "--seed", "4"]).args([
        "-o",
        &p(d, "x.csv"),
        "--snr",
        "8",
        "--noisy-output",
        &p(d, "y.csv"),
    ]));
    let x = std::fs::read_to_string(d.join("x.csv")).unwrap();
    assert!(x.starts_with("tau,re,im\n-16,"));
    assert_eq!(x.lines().count(), 1 + 33);

    for est in ["con-uf", "con-ls-star"] {
        run_ok(bin().args(["denoise", "-i", &p(d, "y.csv"), "-o", &p(d, "xh.csv")]).args([
            "--estimator",
            est,
            "--r-bar",
            "4",
            "--max-iter",
            "100",
            "--solution",
            &p(d, "sol.json"),
        ]));
        let xh = std::fs::read_to_string(d.join("xh.csv")).unwrap();
        assert_eq!(xh.lines().count(), 1 + 17);
        let report = run_ok(bin().args(["certify", "-s", &p(d, "sol.json")]));
        assert!(report.contains("\"valid\": true"), "{report}");
    }
}

#[test]
fn bench_writes_outputs_and_reports_bad_keys() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("c.toml"),
        "name = \"b\"\ntrials = 2\n[scenario]\nkind = \"modsin\"\ns = 1\nm = 1\nn = 12\nsnr = 4.0\n[solver]\nestimators = [\"con-ls\"]\nmax_iter = 20\n",
    )
    .unwrap();
    let out = run_ok(bin().args(["bench", "-c", &p(d, "c.toml"), "--threads", "2", "--output-dir", &p(d, "out")]).args([
        "--seed=9",
        "--scenario.snr=2",
    ]));
    assert!(out.contains("\"scenario\": \"modsin-1-1\""));
    assert!(out.contains("\"snr\": 2.0"));
    let trials = std::fs::read_to_string(d.join("out/b_trials.csv")).unwrap();
    assert!(trials.starts_with(
        "scenario,estimator,setup,trial,iteration,objective,certificate,rel_accuracy,l2_loss,linf_fourier_loss\n"
    ));
    let agg = std::fs::read_to_string(d.join("out/b_aggregate.csv")).unwrap();
    assert!(agg.contains(",agg95,") && agg.contains(",median,"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("out/b_summary.json")).unwrap()).unwrap();
    for key in ["scenario", "estimator", "n", "snr", "trials", "mean_l2_loss", "p95_l2_loss", "mean_stop_iter", "mean_solver_seconds"] {
        assert!(summary[0].get(key).is_some(), "missing {key}");
    }

    let bad = bin().args(["bench", "-c", &p(d, "c.toml"), "--scenario.snrr=2"]).output().unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("snrr"));
}
