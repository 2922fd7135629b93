//! End-to-end runs of the command-line binary: generate, train, classify,
//! sweep — checking the artifacts on disk, the layering of settings, the
//! exit-code contract, and byte-level determinism across reruns.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hdcsim"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should spawn")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn expect_exit(args: &[&str], code: i32) -> String {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "command {:?}:\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Generate a small, trivially separable corpus and return its manifest path.
fn small_corpus(dir: &Path) -> PathBuf {
    ok(&[
        "synth-gen",
        "--out",
        dir.to_str().unwrap(),
        "--classes",
        "3",
        "--seed",
        "7",
        "--train-len",
        "4000",
        "--query-len",
        "300",
        "--queries",
        "6",
        "--mixing",
        "0",
    ]);
    dir.join("manifest.json")
}

#[test]
fn generate_train_classify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = small_corpus(dir.path());
    assert!(manifest.exists());
    for class in ["class00", "class01", "class02"] {
        assert!(dir.path().join(format!("train/{class}.txt")).exists());
        assert!(dir.path().join(format!("test/{class}.txt")).exists());
    }

    let model = dir.path().join("model.hdc");
    let stdout = ok(&[
        "train",
        "--task",
        "synth",
        "--data",
        manifest.to_str().unwrap(),
        "--out",
        model.to_str().unwrap(),
        "--dim",
        "2048",
    ]);
    assert!(stdout.contains("3 classes"));
    assert!(stdout.contains("d=2048"));
    assert!(stdout.contains("sha256"));
    assert!(model.exists());

    let out = dir.path().join("reports");
    let stdout = ok(&[
        "infer",
        "--model",
        model.to_str().unwrap(),
        "--data",
        manifest.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(stdout.contains("accuracy"));
    for name in ["metrics.csv", "confusion.csv", "predictions.csv", "report.json"] {
        assert!(out.join(name).exists(), "{name} missing");
    }

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], "hdcsim-report-v1");
    assert_eq!(report["evaluated"], 18);
    assert_eq!(report["config"]["dim"], 2048);
    // Disjoint letter statistics and sentence-length queries: nothing to miss.
    assert_eq!(report["accuracy"], 1.0);
    let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert!(metrics.lines().count() >= 5); // header + 3 classes + total
    assert!(metrics.contains("TOTAL"));
}

#[test]
fn noisy_crossbar_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = small_corpus(dir.path());
    let model = dir.path().join("model.hdc");
    ok(&[
        "train",
        "--task",
        "synth",
        "--data",
        manifest.to_str().unwrap(),
        "--out",
        model.to_str().unwrap(),
        "--dim",
        "2048",
    ]);
    // Train again into a second file: the model bytes must match exactly.
    let model2 = dir.path().join("model2.hdc");
    ok(&[
        "train",
        "--task",
        "synth",
        "--data",
        manifest.to_str().unwrap(),
        "--out",
        model2.to_str().unwrap(),
        "--dim",
        "2048",
    ]);
    assert_eq!(std::fs::read(&model).unwrap(), std::fs::read(&model2).unwrap());

    let infer = |out: &Path| {
        ok(&[
            "infer",
            "--model",
            model.to_str().unwrap(),
            "--data",
            manifest.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--backend",
            "crossbar",
            "--partitions",
            "2",
        ]);
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    infer(&a);
    infer(&b);
    for name in ["metrics.csv", "confusion.csv", "predictions.csv", "report.json"] {
        assert_eq!(
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(b.join(name)).unwrap(),
            "{name} differs between identical runs"
        );
    }
}

#[test]
fn config_file_layers_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = small_corpus(dir.path());
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"dim": 1024, "seed": 9, "metric": "inv_hamm"}"#).unwrap();

    let model = dir.path().join("model.hdc");
    let stdout = ok(&[
        "train",
        "--task",
        "synth",
        "--data",
        manifest.to_str().unwrap(),
        "--out",
        model.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--dim",
        "2048", // flag beats the config file
    ]);
    assert!(stdout.contains("d=2048"), "{stdout}");

    let out = dir.path().join("reports");
    ok(&[
        "infer",
        "--model",
        model.to_str().unwrap(),
        "--data",
        manifest.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--dim",
        "2048",
    ]);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["dim"], 2048);
    assert_eq!(report["config"]["seed"], 9);
    assert_eq!(report["config"]["metric"], "inv_hamm");

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dimension": 9}"#).unwrap();
    let stderr = expect_exit(
        &[
            "train",
            "--task",
            "synth",
            "--data",
            manifest.to_str().unwrap(),
            "--out",
            model.to_str().unwrap(),
            "--config",
            bad.to_str().unwrap(),
        ],
        3,
    );
    assert!(stderr.contains("error:"), "{stderr}");
}

#[test]
fn data_root_redirects_relative_manifest_entries() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let manifest = small_corpus(&corpus);
    // A manifest moved away from its files only works with the root flag.
    let moved = dir.path().join("manifest.json");
    std::fs::copy(&manifest, &moved).unwrap();
    let model = dir.path().join("model.hdc");
    expect_exit(
        &[
            "train",
            "--task",
            "synth",
            "--data",
            moved.to_str().unwrap(),
            "--out",
            model.to_str().unwrap(),
            "--dim",
            "1024",
        ],
        2,
    );
    ok(&[
        "train",
        "--task",
        "synth",
        "--data",
        moved.to_str().unwrap(),
        "--out",
        model.to_str().unwrap(),
        "--dim",
        "1024",
        "--data-root",
        corpus.to_str().unwrap(),
    ]);
    // The environment variable carries the same setting.
    let out = bin()
        .args([
            "train",
            "--task",
            "synth",
            "--data",
            moved.to_str().unwrap(),
            "--out",
            model.to_str().unwrap(),
            "--dim",
            "1024",
        ])
        .env("HDCSIM_DATA_ROOT", corpus.as_os_str())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = small_corpus(dir.path());
    let model = dir.path().join("model.hdc");
    ok(&[
        "train",
        "--task",
        "synth",
        "--data",
        manifest.to_str().unwrap(),
        "--out",
        model.to_str().unwrap(),
        "--dim",
        "1024",
    ]);

    // 2: unreadable inputs.
    expect_exit(
        &["train", "--task", "synth", "--data", "/nonexistent/m.json", "--out", "/tmp/x"],
        2,
    );
    expect_exit(
        &["infer", "--model", "/nonexistent/model", "--data", "x", "--out", "/tmp/x"],
        2,
    );

    // 3: a structurally broken model file.
    let broken = dir.path().join("broken.hdc");
    let mut bytes = std::fs::read(&model).unwrap();
    bytes[0] ^= 0xFF;
    std::fs::write(&broken, &bytes).unwrap();
    let stderr = expect_exit(
        &[
            "infer",
            "--model",
            broken.to_str().unwrap(),
            "--data",
            manifest.to_str().unwrap(),
            "--out",
            dir.path().join("r").to_str().unwrap(),
        ],
        3,
    );
    assert!(stderr.contains("error:"), "{stderr}");

    // 3: settings the model cannot serve.
    expect_exit(
        &[
            "infer",
            "--model",
            model.to_str().unwrap(),
            "--data",
            manifest.to_str().unwrap(),
            "--out",
            dir.path().join("r").to_str().unwrap(),
            "--dim",
            "2048",
        ],
        3,
    );

    // 2: domain errors caught before any work.
    expect_exit(
        &[
            "infer",
            "--model",
            model.to_str().unwrap(),
            "--data",
            manifest.to_str().unwrap(),
            "--out",
            dir.path().join("r").to_str().unwrap(),
            "--export-conductance",
            dir.path().join("g").to_str().unwrap(),
        ],
        2, // digital backend has no conductances to export
    );
    expect_exit(
        &[
            "sweep",
            "--task",
            "synth",
            "--data",
            manifest.to_str().unwrap(),
            "--out",
            dir.path().join("s").to_str().unwrap(),
            "--param",
            "read-noise",
            "--values",
            "0,0.1",
        ],
        2, // noise sweeps need the crossbar backend
    );

    // 2: command-line parse errors, straight from the argument parser.
    assert_eq!(run(&["train", "--task", "synth"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn sweep_writes_tables_and_export_dumps_arrays() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = small_corpus(dir.path());

    let sweep_out = dir.path().join("sweep");
    let stdout = ok(&[
        "sweep",
        "--task",
        "synth",
        "--data",
        manifest.to_str().unwrap(),
        "--out",
        sweep_out.to_str().unwrap(),
        "--param",
        "partitions",
        "--values",
        "1,2",
        "--dim",
        "1024",
        "--partitions",
        "2", // base config must validate before the sweep takes over
        "--backend",
        "crossbar",
        "--noise",
        "ideal",
    ]);
    assert!(stdout.contains("partitions = 1"));
    assert!(stdout.contains("partitions = 2"));
    let csv = std::fs::read_to_string(sweep_out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3); // header + one row per value
    assert!(csv.starts_with("param,value,analog_seed,evaluated,correct,accuracy"));
    assert!(sweep_out.join("sweep.json").exists());

    // Two-minterm plain models also run their encoder on simulated arrays,
    // so the export carries both array pairs.
    let model = dir.path().join("model.hdc");
    ok(&[
        "train",
        "--task",
        "synth",
        "--data",
        manifest.to_str().unwrap(),
        "--out",
        model.to_str().unwrap(),
        "--dim",
        "1024",
        "--encoder",
        "two-minterm",
        "--perm",
        "plain",
    ]);
    let gdir = dir.path().join("conductances");
    ok(&[
        "infer",
        "--model",
        model.to_str().unwrap(),
        "--data",
        manifest.to_str().unwrap(),
        "--out",
        dir.path().join("r2").to_str().unwrap(),
        "--backend",
        "crossbar",
        "--partitions",
        "4",
        "--export-conductance",
        gdir.to_str().unwrap(),
    ]);
    let lines = |name: &str| {
        std::fs::read_to_string(gdir.join(name)).unwrap().lines().count()
    };
    assert_eq!(lines("am_main.csv"), 256); // dim / partitions rows
    assert_eq!(lines("am_complement.csv"), 256);
    assert_eq!(lines("im_direct.csv"), 27); // one row per alphabet symbol
    assert_eq!(lines("im_complement.csv"), 27);
}

#[test]
fn synth_generation_is_reproducible_and_seed_sensitive() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    let gen = |out: &Path, seed: &str| {
        ok(&[
            "synth-gen",
            "--out",
            out.to_str().unwrap(),
            "--classes",
            "3",
            "--seed",
            seed,
            "--train-len",
            "500",
            "--query-len",
            "50",
            "--queries",
            "2",
        ]);
    };
    gen(&a, "5");
    gen(&b, "5");
    gen(&c, "6");
    let read = |root: &Path, rel: &str| std::fs::read(root.join(rel)).unwrap();
    for rel in ["manifest.json", "train/class00.txt", "test/class02.txt"] {
        assert_eq!(read(&a, rel), read(&b, rel), "{rel}");
    }
    assert_ne!(read(&a, "train/class00.txt"), read(&c, "train/class00.txt"));
}
