use std::path::Path;
use std::process::{Command, Output};

use topocon::{io, Norm};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topocon"))
        .args(args)
        .current_dir(dir)
        .env_remove("TOPOCON_THREADS")
        .env_remove("RUST_LOG")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn no_arguments_prints_usage_and_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&[], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn unknown_subcommand_and_flag_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(&["frobnicate"], tmp.path()).status.code(), Some(1));
    assert_eq!(
        run(&["barcode", "--bogus"], tmp.path()).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["barcode", "--norm", "l3", "--in", "x"], tmp.path())
            .status
            .code(),
        Some(1)
    );
    // missing required option
    assert_eq!(run(&["barcode"], tmp.path()).status.code(), Some(1));
}

#[test]
fn help_and_version_exit_0() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(&["--help"], tmp.path()).status.code(), Some(0));
    assert_eq!(run(&["--version"], tmp.path()).status.code(), Some(0));
}

#[test]
fn data_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(
        run(&["barcode", "--in", "missing.csv"], d).status.code(),
        Some(2)
    );
    write(d, "ragged.csv", "1,2\n3\n");
    assert_eq!(
        run(&["barcode", "--in", "ragged.csv"], d).status.code(),
        Some(2)
    );
    write(d, "one.csv", "1,2\n");
    assert_eq!(run(&["loss", "--in", "one.csv"], d).status.code(), Some(2));
}

#[test]
fn barcode_lines() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "c.csv", "x,y\n0,0\n1,0\n3,0\n3,1.5\n");
    let o = run(&["barcode", "--in", "c.csv", "--norm", "l1"], d);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "0\t0.5\t0\t1\n0\t0.75\t2\t3\n0\t1\t1\t2\n0\tinf\tessential\n"
    );
    // every engine prints the same bars
    for engine in ["standard", "parallel"] {
        let e = run(&["barcode", "--in", "c.csv", "--engine", engine], d);
        assert_eq!(stdout(&e), stdout(&o));
    }
}

#[test]
fn bounds_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "bounds", "--alpha", "2", "--beta", "2", "--eps", "2", "--n", "2",
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("entropy_bound\t8\n"));
    let o = run(
        &[
            "bounds", "--alpha", "1", "--beta", "1", "--eta", "1", "--b", "2", "--n", "1",
        ],
        tmp.path(),
    );
    assert!(stdout(&o).contains("separation_threshold\t4\n"));
    let bad = run(
        &["bounds", "--alpha", "3", "--beta", "2", "--n", "1"],
        tmp.path(),
    );
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn loss_and_gradient_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "c.csv", "0,0\n1,0\n3,0\n3,1.5\n");
    let o = run(
        &["loss", "--in", "c.csv", "--eta", "1", "--grad-out", "g.csv"],
        d,
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1.5\n");
    let g = io::read_rows(std::fs::File::open(d.join("g.csv")).unwrap()).unwrap();
    assert_eq!(
        g,
        vec![
            vec![0.0, 0.0],
            vec![-1.0, 0.0],
            vec![1.0, -1.0],
            vec![0.0, 1.0]
        ]
    );
    assert!(d.join("g.csv.config.toml").exists());
}

#[test]
fn config_file_layering() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "c.csv", "0,0\n3,4\n");
    write(
        d,
        "cfg.toml",
        "[loss]\nin = \"c.csv\"\neta = 1.0\nnorm = \"l2\"\n",
    );
    // file supplies everything
    assert_eq!(stdout(&run(&["--config", "cfg.toml", "loss"], d)), "4\n");
    // flags win over the file
    assert_eq!(
        stdout(&run(&["--config", "cfg.toml", "loss", "--norm", "l1"], d)),
        "6\n"
    );
    assert_eq!(
        stdout(&run(&["--config", "cfg.toml", "loss", "--eta", "5"], d)),
        "0\n"
    );
}

#[test]
fn unknown_config_keys_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "top.toml", "sed = 3\n");
    write(d, "nested.toml", "[loss]\netaa = 1.0\n");
    write(d, "section.toml", "[lossy]\neta = 1.0\n");
    for f in ["top.toml", "nested.toml", "section.toml"] {
        let o = run(
            &[
                "--config", f, "bounds", "--alpha", "1", "--beta", "1", "--n", "1",
            ],
            d,
        );
        assert_eq!(o.status.code(), Some(1), "{f}");
    }
}

#[test]
fn resolved_config_is_written_and_reusable() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "c.csv", "0\n1\n5\n");
    let o = run(
        &[
            "--seed", "4", "barcode", "--in", "c.csv", "--out", "bars.tsv",
        ],
        d,
    );
    assert_eq!(o.status.code(), Some(0));
    let cfg = std::fs::read_to_string(d.join("bars.tsv.config.toml")).unwrap();
    assert!(cfg.contains("seed = 4"));
    assert!(cfg.contains("engine = \"union-find\""));
    assert!(cfg.contains("norm = \"l1\""));
    // replaying the written config reproduces the output
    std::fs::rename(d.join("bars.tsv"), d.join("first.tsv")).unwrap();
    let again = run(&["--config", "bars.tsv.config.toml", "barcode"], d);
    assert_eq!(
        again.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&again.stderr)
    );
    assert_eq!(
        std::fs::read(d.join("first.tsv")).unwrap(),
        std::fs::read(d.join("bars.tsv")).unwrap()
    );
}

#[test]
fn thread_count_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "c.csv", "0\n1\n5\n");
    let o = Command::new(env!("CARGO_BIN_EXE_topocon"))
        .args(["barcode", "--in", "c.csv"])
        .current_dir(d)
        .env("TOPOCON_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_lemma1_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        &["verify-lemma1", "--m", "5", "--b", "3", "--trials", "30"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("violations\t0\n"));
    let too_big = run(
        &["verify-lemma1", "--m", "40", "--b", "20", "--trials", "1"],
        tmp.path(),
    );
    assert_eq!(too_big.status.code(), Some(2));
    let no_beta = run(&["verify-lemma1", "--alpha", "1"], tmp.path());
    assert_eq!(no_beta.status.code(), Some(1));
}

#[test]
fn grad_check_command() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["grad-check", "--trials", "10", "--seed", "1"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("trials\t10\n"));
    let net = run(&["grad-check", "--network", "--trials", "5"], tmp.path());
    assert_eq!(
        net.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&net.stderr)
    );
}

#[test]
fn train_score_and_evaluate() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    // two well separated labeled blobs in 3-D
    let mut text = String::from("a,b,c,label\n");
    for k in 0..80 {
        let c = k % 2;
        let off = if c == 0 { -2.0 } else { 2.0 };
        let j = (k / 2) as f64 * 0.01;
        text.push_str(&format!("{},{},{},{c}\n", off + j, off - j, off + 0.5 * j));
    }
    write(d, "data.csv", &text);
    let o = run(
        &[
            "--out-dir",
            "run",
            "train-ae",
            "--data",
            "data.csv",
            "--labeled",
            "--hidden",
            "6",
            "--branches",
            "2",
            "--branch-dim",
            "2",
            "--epochs",
            "5",
            "--batch-size",
            "20",
            "--eta",
            "0.5",
        ],
        d,
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    for f in ["model.json", "ae_curve.csv", "config.toml"] {
        assert!(d.join("run").join(f).exists(), "{f}");
    }
    let curve = io::read_rows(std::fs::File::open(d.join("run/ae_curve.csv")).unwrap()).unwrap();
    assert_eq!(curve.len(), 5 * 4);

    let o = run(
        &[
            "score",
            "--model",
            "run/model.json",
            "--fit",
            "data.csv",
            "--labeled",
            "--query",
            "data.csv",
            "--eta",
            "0.5",
            "--out",
            "s.csv",
            "--save-oneclass",
            "oc.json",
        ],
        d,
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let scores = io::read_values_file(&d.join("s.csv")).unwrap();
    assert_eq!(scores.len(), 80);
    // every query is also a stored sample
    assert!(scores.iter().all(|&s| s >= 2.0));
    let again = run(
        &[
            "score",
            "--model",
            "run/model.json",
            "--oneclass",
            "oc.json",
            "--labeled",
            "--query",
            "data.csv",
        ],
        d,
    );
    assert_eq!(io::read_values(again.stdout.as_slice()).unwrap(), scores);

    write(d, "pos.csv", "3\n2\n2\n");
    write(d, "neg.csv", "1\n2\n");
    let auc = run(
        &["eval-auc", "--positive", "pos.csv", "--negative", "neg.csv"],
        d,
    );
    assert_eq!(stdout(&auc).trim().parse::<f64>().unwrap(), 5.0 / 6.0);

    let o = run(
        &[
            "oneclass-eval",
            "--model",
            "run/model.json",
            "--data",
            "data.csv",
            "--m",
            "10",
            "--runs",
            "2",
            "--out",
            "auc.csv",
            "--eta",
            "0.5",
        ],
        d,
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let table = std::fs::read_to_string(d.join("auc.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "class,mean_auc,run_1,run_2");
    assert!(lines[1].starts_with("0,"));
    assert!(lines[3].starts_with("mean,"));
}

#[test]
fn toy_outputs_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let o = run(
        &[
            "--out-dir",
            "toy",
            "--seed",
            "2",
            "train-toy",
            "--samples",
            "150",
            "--epochs",
            "2",
            "--eval-batches",
            "20",
            "--snapshot-epochs",
            "0,2",
        ],
        d,
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let dir = d.join("toy");
    let curve = io::read_rows(std::fs::File::open(dir.join("loss_curve.csv")).unwrap()).unwrap();
    assert_eq!(curve.len(), 2 * 3);
    let stats = io::read_rows(std::fs::File::open(dir.join("stats.csv")).unwrap()).unwrap();
    assert_eq!(
        stats.iter().map(|r| r[0]).collect::<Vec<_>>(),
        vec![0.0, 2.0]
    );
    let cloud = io::read_cloud_file(&dir.join("inputs.csv"), Norm::L1, false).unwrap();
    assert_eq!((cloud.len(), cloud.dim()), (150, 3));
    for e in [0, 2] {
        let (out, labels) =
            io::read_labeled_file(&dir.join(format!("outputs_epoch_{e}.csv")), false).unwrap();
        assert_eq!((out.rows(), out.cols(), labels.len()), (150, 2, 150));
    }
    let cfg = std::fs::read_to_string(dir.join("config.toml")).unwrap();
    assert!(cfg.contains("command = \"train-toy\""));
}

#[test]
fn bench_reduce_small() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        &["bench-reduce", "--sizes", "8,16", "--repetitions", "2"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("size,engine,trials,mean_seconds,max_iterations,mean_iterations\n"));
}
