use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pdns_core::evaluator::{exhaustive_pareto, LoadOptions, TabularBenchmark};
use pdns_core::experiments::{ExperimentSummary, RunConfig};

fn pdns(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdns"))
        .current_dir(dir)
        .env_remove("PDNS_WORKERS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: Output) -> String {
    assert!(
        out.status.success(),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn synth(dir: &Path, name: &str, seed: &str) -> PathBuf {
    ok(pdns(
        dir,
        &["synth", "--cardinalities", "3,3,3,3", "--seed", seed, "-o", name],
    ));
    dir.join(name)
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn synth_validate_oracle() {
    let tmp = tempfile::tempdir().unwrap();
    let bench = synth(tmp.path(), "b.jsonl", "4");
    let report = ok(pdns(tmp.path(), &["validate", "b.jsonl", "--metrics", "synflow,flops"]));
    assert!(report.contains("81 genotypes"), "{report}");
    assert!(report.contains("repairs: 0"), "{report}");

    let front = ok(pdns(tmp.path(), &["oracle", "b.jsonl"]));
    let rows: Vec<&str> = front.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    let table = TabularBenchmark::load(&bench, &LoadOptions::default()).unwrap();
    let expected = exhaustive_pareto(&table, &["test_acc", "flops"]).unwrap();
    assert_eq!(rows.len(), expected.len());
    for (row, (g, _)) in rows.iter().zip(&expected) {
        assert_eq!(row.split('\t').next().unwrap(), g.key());
    }
    assert!(front.contains("# hypervolume: "));
}

#[test]
fn validate_rejects_incomplete_files() {
    let tmp = tempfile::tempdir().unwrap();
    let bench = synth(tmp.path(), "b.jsonl", "4");
    let text = std::fs::read_to_string(&bench).unwrap();
    let cut: Vec<&str> = text.lines().take(40).collect();
    std::fs::write(tmp.path().join("cut.jsonl"), cut.join("\n")).unwrap();
    let out = pdns(tmp.path(), &["validate", "cut.jsonl"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not in the benchmark"));
    let report = ok(pdns(tmp.path(), &["validate", "cut.jsonl", "--allow-partial"]));
    assert!(report.contains("records: 39"), "{report}");
}

#[test]
fn config_file_with_flag_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path(), "b.jsonl", "4");
    std::fs::write(
        tmp.path().join("exp.toml"),
        "algorithm = \"pdns\"\nbenchmark = \"b.jsonl\"\nmetrics = [\"synflow\", \"jacov\", \"snip\", \"flops\"]\ngenerations = 5\n",
    )
    .unwrap();
    let printed = ok(pdns(
        tmp.path(),
        &[
            "run",
            "exp.toml",
            "--algorithm",
            "moenas",
            "--population-size",
            "12",
            "--no-dedup-cost",
            "--reference-point",
            "1.1,1.2",
            "--print-config",
        ],
    ));
    let c = RunConfig::from_toml(&printed).unwrap();
    assert_eq!(c.population_size, 12);
    assert_eq!(c.generations, Some(5));
    assert_eq!(c.reference_point, [1.1, 1.2]);
    assert_eq!(c.cost_mode, pdns_core::evaluator::CostMode::EveryCall);
    assert_eq!(c.algorithm, pdns_core::experiments::Algorithm::Moenas);
    assert_eq!(c.benchmark, Path::new("b.jsonl"));

    let out = pdns(tmp.path(), &["run", "exp.toml", "--population-size", "7"]);
    assert!(!out.status.success());
}

#[test]
fn runs_are_byte_identical_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path(), "b.jsonl", "9");
    let mut outputs = Vec::new();
    for (i, workers) in [None, Some("1"), Some("2")].into_iter().enumerate() {
        let dir = format!("out{i}");
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_pdns"));
        cmd.current_dir(tmp.path()).env_remove("PDNS_WORKERS");
        if let Some(w) = workers {
            cmd.env("PDNS_WORKERS", w);
        }
        ok(cmd
            .args([
                "run",
                "--algorithm",
                "pdns",
                "--benchmark",
                "b.jsonl",
                "--metrics",
                "synflow,jacov,snip,flops",
                "--generations",
                "8",
                "--repeats",
                "3",
                "--seed",
                "5",
                "--output-dir",
                &dir,
            ])
            .output()
            .unwrap());
        outputs.push(listing(&tmp.path().join(&dir)));
    }
    assert_eq!(outputs[0].len(), 10);
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn bad_worker_count_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path(), "b.jsonl", "1");
    let out = Command::new(env!("CARGO_BIN_EXE_pdns"))
        .current_dir(tmp.path())
        .env("PDNS_WORKERS", "zero")
        .args([
            "run",
            "--algorithm",
            "pdns",
            "--benchmark",
            "b.jsonl",
            "--metrics",
            "snip,flops",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("PDNS_WORKERS"));
}

#[test]
fn compare_and_plot_from_run_directories() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path(), "b.jsonl", "3");
    for (alg, metrics, dir) in [
        ("pdns", "synflow,jacov,snip,flops", "a"),
        ("moenas", "synflow,jacov,snip,flops", "b"),
        ("pdns", "snip,flops", "c"),
    ] {
        ok(pdns(
            tmp.path(),
            &[
                "run",
                "--algorithm",
                alg,
                "--benchmark",
                "b.jsonl",
                "--metrics",
                metrics,
                "--generations",
                "6",
                "--repeats",
                "4",
                "--output-dir",
                dir,
            ],
        ));
    }
    let table = ok(pdns(tmp.path(), &["compare", "a", "b", "c/summary.json"]));
    for label in ["MTF-PDNS", "MTF-MOENAS", "PDNS-snip"] {
        assert!(table.contains(label), "{table}");
    }
    assert!(table.contains("rank-sum p-values"));

    let json = ok(pdns(tmp.path(), &["compare", "a", "b", "--json"]));
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(parsed["pairs"].as_array().unwrap().len(), 1);

    ok(pdns(tmp.path(), &["plot-data", "a", "c", "-o", "curve.tsv"]));
    let curve = std::fs::read_to_string(tmp.path().join("curve.tsv")).unwrap();
    let methods: std::collections::BTreeSet<&str> =
        curve.lines().skip(1).map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(methods.into_iter().collect::<Vec<_>>(), vec!["MTF-PDNS", "PDNS-snip"]);

    let summary = ExperimentSummary::load(tmp.path().join("a/summary.json")).unwrap();
    assert_eq!(summary.runs.len(), 4);
}

#[test]
fn compare_rejects_different_benchmarks() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path(), "b1.jsonl", "1");
    synth(tmp.path(), "b2.jsonl", "2");
    for (bench, dir) in [("b1.jsonl", "x"), ("b2.jsonl", "y")] {
        ok(pdns(
            tmp.path(),
            &[
                "run",
                "--algorithm",
                "pdns",
                "--benchmark",
                bench,
                "--metrics",
                "snip,flops",
                "--generations",
                "2",
                "--repeats",
                "2",
                "--output-dir",
                dir,
            ],
        ));
    }
    let out = pdns(tmp.path(), &["compare", "x", "y"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not comparable"));
}

#[test]
fn empty_plot_input_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::create_dir(tmp.path().join("empty")).unwrap();
    let out = pdns(tmp.path(), &["plot-data", "empty"]);
    assert!(!out.status.success());
}
