//! Black-box tests for the `behavdt` binary: exit-code contract, flag
//! parsing, and the end-to-end train/export/predict flows.

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use behavdt::dataset::write_csv;

struct Cli {
    dir: tempfile::TempDir,
}

impl Cli {
    fn new() -> Self {
        Cli {
            dir: tempfile::tempdir().expect("temp dir"),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, content: impl AsRef<[u8]>) -> PathBuf {
        let path = self.path(name);
        std::fs::write(&path, content).expect("write fixture");
        path
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_behavdt"))
            .args(args)
            .current_dir(self.dir.path())
            .output()
            .expect("spawn CLI")
    }

    fn expect_success(&self, args: &[&str]) -> Output {
        let output = self.run(args);
        assert_eq!(
            output.status.code(),
            Some(0),
            "`{}` failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&output.stderr)
        );
        output
    }
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn worked_example_csv(cli: &Cli) -> PathBuf {
    let mut buf = Vec::new();
    write_csv(&common::worked_example_dataset(), &mut buf).expect("encode CSV");
    cli.write("toy.csv", buf)
}

#[test]
fn usage_errors_exit_one() {
    let cli = Cli::new();
    let unknown_cmd = cli.run(&["frobnicate"]);
    assert_eq!(unknown_cmd.status.code(), Some(1));
    assert!(!stderr(&unknown_cmd).is_empty());

    let unknown_flag = cli.run(&["train", "--nonsense"]);
    assert_eq!(unknown_flag.status.code(), Some(1));

    let bare = cli.run(&[]);
    assert_eq!(bare.status.code(), Some(1));
}

#[test]
fn out_of_range_threshold_exits_one_and_names_the_flag() {
    let cli = Cli::new();
    let data = worked_example_csv(&cli);
    let data = data.to_str().unwrap();

    let sweep = cli.run(&["sweep", "--data", data, "--thresholds", "150"]);
    assert_eq!(sweep.status.code(), Some(1));
    assert!(
        stderr(&sweep).contains("--thresholds"),
        "message does not name the flag: {}",
        stderr(&sweep)
    );

    let train = cli.run(&["train", "--data", data, "--model", "m.toml", "--threshold=-3"]);
    assert_eq!(train.status.code(), Some(1));
    assert!(stderr(&train).contains("--threshold"));

    let not_a_number = cli.run(&["train", "--data", data, "--model", "m.toml", "--threshold", "abc"]);
    assert_eq!(not_a_number.status.code(), Some(1));
}

#[test]
fn single_fold_count_is_rejected() {
    let cli = Cli::new();
    let data = worked_example_csv(&cli);
    let output = cli.run(&["evaluate", "--data", data.to_str().unwrap(), "--k", "1"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("--k"));
}

#[test]
fn data_and_model_errors_exit_two() {
    let cli = Cli::new();
    let missing = cli.run(&["train", "--data", "no-such.csv", "--model", "m.toml"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("no-such.csv"));

    let junk_model = cli.write("junk.toml", "not = 'a model'\n");
    let data = worked_example_csv(&cli);
    let predict = cli.run(&[
        "predict",
        "--model",
        junk_model.to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
    ]);
    assert_eq!(predict.status.code(), Some(2));

    let export = cli.run(&["export", "--model", "junk.toml", "--format", "rules"]);
    assert_eq!(export.status.code(), Some(2));
}

#[test]
fn help_and_version_exit_zero() {
    let cli = Cli::new();
    assert_eq!(cli.run(&["--help"]).status.code(), Some(0));
    assert_eq!(cli.run(&["train", "--help"]).status.code(), Some(0));
    assert_eq!(cli.run(&["--version"]).status.code(), Some(0));
}

#[test]
fn percent_and_fraction_thresholds_build_identical_models() {
    let cli = Cli::new();
    let data = worked_example_csv(&cli);
    let data = data.to_str().unwrap();
    cli.expect_success(&["train", "--data", data, "--model", "pct.toml", "--threshold", "80"]);
    cli.expect_success(&["train", "--data", data, "--model", "frac.toml", "--threshold", "0.8"]);
    let pct = std::fs::read(cli.path("pct.toml")).unwrap();
    let frac = std::fs::read(cli.path("frac.toml")).unwrap();
    assert_eq!(pct, frac);
}

#[test]
fn trained_worked_example_exports_seven_rules() {
    let cli = Cli::new();
    let data = worked_example_csv(&cli);
    cli.expect_success(&[
        "train",
        "--data",
        data.to_str().unwrap(),
        "--model",
        "m.tree",
        "--threshold",
        "0.8",
    ]);
    cli.expect_success(&["export", "--model", "m.tree", "--format", "rules", "--out", "rules.txt"]);
    let rules = std::fs::read_to_string(cli.path("rules.txt")).unwrap();
    let lines: Vec<&str> = rules.lines().collect();
    assert_eq!(lines.len(), 7, "expected seven rules, got:\n{rules}");
    assert!(lines.iter().all(|l| l.starts_with("IF ") && l.contains(" THEN ")));
    assert!(lines.iter().any(|l| l.contains("situation=Meeting AND relationship=Boss")));
}

#[test]
fn model_document_styles_are_stable() {
    let cli = Cli::new();
    let data = worked_example_csv(&cli);
    cli.expect_success(&[
        "train",
        "--data",
        data.to_str().unwrap(),
        "--model",
        "m.toml",
    ]);
    let doc = std::fs::read_to_string(cli.path("m.toml")).unwrap();
    assert!(doc.starts_with("version = 1\n"));
    assert!(doc.contains("model = \"behavdt\""));
    assert!(doc.contains("[[nodes]]"));
}

#[test]
fn baseline_flag_selects_the_learner() {
    let cli = Cli::new();
    let data = worked_example_csv(&cli);
    let data = data.to_str().unwrap();

    cli.expect_success(&["train", "--data", data, "--model", "zr.toml", "--baseline", "zeror"]);
    cli.expect_success(&["export", "--model", "zr.toml", "--format", "rules", "--out", "zr.txt"]);
    let rules = std::fs::read_to_string(cli.path("zr.txt")).unwrap();
    assert!(rules.starts_with("IF TRUE THEN "), "unexpected zero-r rules: {rules}");
    assert_eq!(rules.lines().count(), 1);

    cli.expect_success(&["train", "--data", data, "--model", "dt.toml", "--baseline", "dt"]);
    let doc = std::fs::read_to_string(cli.path("dt.toml")).unwrap();
    assert!(doc.contains("model = \"traditional-dt\""));

    let bad = cli.run(&["train", "--data", data, "--model", "x.toml", "--baseline", "behavdt"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn predict_reports_truth_only_when_the_data_carries_labels() {
    let cli = Cli::new();
    let data = worked_example_csv(&cli);
    cli.expect_success(&[
        "train",
        "--data",
        data.to_str().unwrap(),
        "--model",
        "m.toml",
    ]);

    let labeled = cli.expect_success(&["predict", "--model", "m.toml", "--data", "toy.csv"]);
    let text = String::from_utf8(labeled.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("index\tlabel\tsource_node\tdepth\tfallback_used\ttruth")
    );
    let first = lines.next().expect("at least one prediction");
    assert!(first.ends_with("\tAnswer") || first.ends_with("\tDecline"));

    let bare = cli.write(
        "bare.csv",
        "situation,relationship,location,time\nMeeting,Boss,Home,Mon[Eve]\nOffice,Friend,Home,Mon[Mor]\n",
    );
    let unlabeled = cli.expect_success(&["predict", "--model", "m.toml", "--data", bare.to_str().unwrap()]);
    let text = String::from_utf8(unlabeled.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.ends_with("\t-")));
    assert!(rows[0].starts_with("0\tAnswer\t"));
    assert!(rows[1].starts_with("1\tDecline\t"));

    let mismatched = cli.write("bad.csv", "foo,bar\nx,y\n");
    let output = cli.run(&["predict", "--model", "m.toml", "--data", mismatched.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn gen_honours_and_overrides_the_spec_seed() {
    let cli = Cli::new();
    cli.write("spec.toml", common::REFERENCE_SPEC);
    cli.expect_success(&["gen", "--spec", "spec.toml", "--out", "a.csv"]);
    cli.expect_success(&["gen", "--spec", "spec.toml", "--out", "b.csv"]);
    cli.expect_success(&["gen", "--spec", "spec.toml", "--out", "c.csv", "--seed", "99"]);
    let a = std::fs::read(cli.path("a.csv")).unwrap();
    let b = std::fs::read(cli.path("b.csv")).unwrap();
    let c = std::fs::read(cli.path("c.csv")).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c, "a different seed should move the sample");
}

#[test]
fn discretize_runs_with_defaults_and_flags() {
    let cli = Cli::new();
    cli.write(
        "raw.csv",
        "timestamp,contact_id,location,label\n\
         1609459200,alice,Home,Answer\n\
         1609502400,bob,Office,Decline\n\
         1609545600,carol,Market,Ignore\n",
    );
    cli.expect_success(&["discretize", "--input", "raw.csv", "--out", "plain.csv"]);
    let plain = std::fs::read_to_string(cli.path("plain.csv")).unwrap();
    assert!(plain.lines().next().unwrap().contains("relationship"));

    cli.expect_success(&[
        "discretize",
        "--input",
        "raw.csv",
        "--out",
        "weekday.csv",
        "--include-weekday",
    ]);
    let weekday = std::fs::read_to_string(cli.path("weekday.csv")).unwrap();
    assert_ne!(plain, weekday);
    assert!(weekday.contains('['), "weekday-prefixed bins expected: {weekday}");
}

#[test]
fn failed_commands_leave_existing_outputs_untouched() {
    let cli = Cli::new();
    let out = cli.write("results.tsv", "precious\n");
    let output = cli.run(&[
        "evaluate",
        "--data",
        "missing.csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "precious\n");

    let target = cli.path("nested/never/made.toml");
    let data = worked_example_csv(&cli);
    let output = cli.run(&[
        "train",
        "--data",
        data.to_str().unwrap(),
        "--model",
        target.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(!target.exists());
    assert!(!Path::new("nested").exists());
}

#[test]
fn logging_env_does_not_change_outputs() {
    let cli = Cli::new();
    let data = worked_example_csv(&cli);
    let quiet = cli.expect_success(&["compare", "--data", data.to_str().unwrap(), "--k", "5"]);

    let verbose = Command::new(env!("CARGO_BIN_EXE_behavdt"))
        .args(["compare", "--data", data.to_str().unwrap(), "--k", "5"])
        .env("BEHAVDT_LOG", "debug")
        .current_dir(cli.dir.path())
        .output()
        .expect("spawn CLI");
    assert_eq!(verbose.status.code(), Some(0));
    assert_eq!(quiet.stdout, verbose.stdout);
    assert!(
        !verbose.stderr.is_empty(),
        "debug logging should emit diagnostics on stderr"
    );
}
