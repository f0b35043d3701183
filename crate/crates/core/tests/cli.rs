use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use jel::linker::{write_predictions, Prediction};
use jel::weaklabel::write_gold;

fn jel(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jel"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) {
    let out = jel(dir, args);
    assert!(
        out.status.success(),
        "jel {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read(dir: &Path, file: &str) -> String {
    fs::read_to_string(dir.join(file)).unwrap()
}

#[test]
fn synth_is_deterministic_per_seed() {
    let t = tempfile::tempdir().unwrap();
    let args = |out: &'static str, seed: &'static str| {
        [
            "synth",
            "--out",
            out,
            "--entities",
            "100",
            "--industries",
            "5",
            "--ambiguity",
            "0.2",
            "--seed",
            seed,
        ]
    };
    ok(t.path(), &args("a", "7"));
    ok(t.path(), &args("b", "7"));
    ok(t.path(), &args("c", "8"));
    for f in [
        "entities.tsv",
        "mentions.tsv",
        "gold.tsv",
        "word_vectors.txt",
        "synth_report.txt",
    ] {
        assert_eq!(
            read(t.path(), &format!("a/{f}")),
            read(t.path(), &format!("b/{f}")),
            "{f}"
        );
    }
    assert_ne!(read(t.path(), "a/mentions.tsv"), read(t.path(), "c/mentions.tsv"));
    let report = read(t.path(), "a/synth_report.txt");
    assert!(report.contains("entities=100") && report.contains("seed=7"), "{report}");
    assert!(report.contains("entities\t100"), "{report}");
}

#[test]
fn flags_override_config_file() {
    let t = tempfile::tempdir().unwrap();
    fs::write(t.path().join("synth.conf"), "# corpus\nentities = 20\nindustries=4\n").unwrap();
    ok(
        t.path(),
        &["synth", "--out", "d", "--config", "synth.conf", "--entities", "25"],
    );
    let report = read(t.path(), "d/synth_report.txt");
    assert!(report.contains("entities=25 industries=4"), "{report}");
}

#[test]
fn full_pipeline_runs_for_every_method() {
    let t = tempfile::tempdir().unwrap();
    let dir = t.path();
    ok(
        dir,
        &[
            "synth",
            "--out",
            ".",
            "--entities",
            "30",
            "--mentions-per-entity",
            "3",
            "--word-dim",
            "12",
        ],
    );
    ok(dir, &["ingest", "--kb", "entities.tsv", "--out", "."]);
    ok(
        dir,
        &[
            "train-embed",
            "--kb",
            "entities.tsv",
            "--words",
            "word_vectors.txt",
            "--out",
            ".",
            "--epochs",
            "20",
        ],
    );
    ok(
        dir,
        &[
            "label",
            "--kb",
            "entities.tsv",
            "--mentions",
            "mentions.tsv",
            "--out",
            ".",
            "--gold",
            "gold.tsv",
        ],
    );
    let res = [
        "--kb",
        "entities.tsv",
        "--words",
        "word_vectors.txt",
        "--entity-vectors",
        "entity_vectors.txt",
        "--vocab",
        "char_vocab.tsv",
        "--tfidf",
        "tfidf.tsv",
    ];
    let with = |head: &[&'static str]| -> Vec<&'static str> { head.iter().chain(&res).copied().collect() };
    ok(
        dir,
        &with(&["train-link", "--pairs", "train.tsv", "--out", ".", "--epochs", "3"]),
    );
    ok(
        dir,
        &with(&["train-link", "--method", "lr", "--pairs", "train.tsv", "--out", "."]),
    );
    for method in ["jel", "bigram", "trigram", "jaccard-ctx", "cosine-ctx", "lr"] {
        let pred = format!("pred_{method}.tsv");
        let report = format!("eval_{method}.txt");
        let mut link = with(&[
            "link",
            "--method",
            method,
            "--mentions",
            "test_mentions.tsv",
            "--checkpoint",
            "linker.ckpt",
        ]);
        link.extend(["--lr-model", "lr_model.tsv", "--out", pred.as_str()]);
        ok(dir, &link);
        ok(
            dir,
            &[
                "eval",
                "--predictions",
                &pred,
                "--gold",
                "gold.tsv",
                "--out",
                &report,
                "--pairs",
                "test.tsv",
            ],
        );
        let text = read(dir, &report);
        assert!(
            text.contains("method\ttp\ttn\tfp\tfn\tprecision\trecall\tf1\taccuracy"),
            "{text}"
        );
        assert!(text.contains(&format!("{method}\t1\t")), "{text}");
        assert!(text.contains(&format!("# method={method}")), "{text}");
    }
    let label = read(dir, "label_report.txt");
    assert!(label.contains("review_open\t0"), "{label}");
    assert!(read(dir, "link_loss.tsv").lines().count() > 3);
    assert!(read(dir, "embed_report.txt").contains("industry_purity_at_10"));
}

#[test]
fn eval_reproduces_reference_jel_row() {
    let t = tempfile::tempdir().unwrap();
    let mut preds = Vec::new();
    let mut gold = Vec::new();
    let pred = |m: &str, e: &str, d_w: f64, rank: usize| Prediction {
        mention_id: m.to_string(),
        entity_id: e.to_string(),
        d_syx: None,
        d_smc: None,
        d_w,
        rank,
    };
    for i in 0..5000 {
        let m = format!("m{i}");
        gold.push((m.clone(), format!("E{i}")));
        preds.push(pred(&m, &format!("E{i}"), 0.2, 1));
        // 9 of the 5000 wrong candidates fall under the threshold
        let d_w = if i < 9 { 0.9 } else { 3.0 };
        preds.push(pred(&m, "EX", d_w, 2));
    }
    let header = [
        ("method".to_string(), "jel".to_string()),
        ("threshold".to_string(), "1".to_string()),
    ];
    fs::write(t.path().join("pred.tsv"), write_predictions(&preds, &header)).unwrap();
    fs::write(t.path().join("gold.tsv"), write_gold(&gold)).unwrap();
    ok(
        t.path(),
        &[
            "eval",
            "--predictions",
            "pred.tsv",
            "--gold",
            "gold.tsv",
            "--out",
            "eval.txt",
            "--k",
            "1,2",
        ],
    );
    let text = read(t.path(), "eval.txt");
    assert!(
        text.contains("jel\t0.5\t0.4991\t0.0009\t0\t0.9982\t1\t0.9991\t0.9991"),
        "{text}"
    );
    assert!(text.contains("jel\t1\t1\n"), "{text}");
}

#[test]
fn missing_input_fails_without_outputs() {
    let t = tempfile::tempdir().unwrap();
    let out = jel(t.path(), &["ingest", "--kb", "nope.tsv", "--out", "o"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert!(!t.path().join("o/tfidf.tsv").exists());

    let out = jel(t.path(), &["synth", "--out", "o", "--no-such-flag"]);
    assert!(!out.status.success());
}

#[test]
fn failed_write_removes_partial_outputs() {
    let t = tempfile::tempdir().unwrap();
    // a directory where a file should go makes one write fail
    fs::create_dir_all(t.path().join("d/word_vectors.txt")).unwrap();
    let out = jel(t.path(), &["synth", "--out", "d", "--entities", "20"]);
    assert!(!out.status.success());
    for f in ["entities.tsv", "mentions.tsv", "gold.tsv", "synth_report.txt"] {
        assert!(!t.path().join("d").join(f).exists(), "{f} left behind");
    }
}

#[test]
fn help_documents_flags() {
    let t = tempfile::tempdir().unwrap();
    let out = jel(t.path(), &["link", "--help"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for flag in ["--method", "--block-threshold", "--checkpoint"] {
        assert!(text.contains(flag), "{flag} missing from {text}");
    }
}
