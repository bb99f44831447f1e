use std::path::Path;
use std::process::{Command, Output};

use opsq_cli::{parse_dims, run, Command as Cmd, Outcome, Overrides, RunConfig, RunReport};

fn opsq(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_opsq"));
    c.args(args).env_remove("OPSQ_SEED");
    if let Some(s) = env_seed {
        c.env("OPSQ_SEED", s);
    }
    c.output().expect("binary runs")
}

fn report_at(path: &Path) -> RunReport {
    RunReport::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn without_wall_time(mut r: RunReport) -> String {
    r.summary.wall_time_seconds = 0.0;
    r.config.output_path = None;
    r.to_json()
}

#[test]
fn square_classifies_as_claimed() {
    let out = opsq(
        &[
            "classify",
            "--function",
            "square",
            "--trials",
            "500",
            "--seed",
            "7",
            "--restarts",
            "20",
        ],
        None,
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = RunReport::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let Outcome::Classification {
        verdict, witnesses, ..
    } = &r.outcome
    else {
        panic!("not a classification")
    };
    assert_eq!(verdict.name(), "supported-quadratic");
    assert!(witnesses.is_empty());
    assert_eq!(r.summary.trials_run, 500);
    assert_eq!(r.summary.counts.values().sum::<usize>(), 500);
}

#[test]
fn cube_is_refuted_with_the_fixed_pair_first() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cube.json");
    let out = opsq(
        &[
            "classify",
            "--function",
            "cube",
            "--trials",
            "10",
            "--seed",
            "7",
            "--restarts",
            "20",
            "--out",
            path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
    let r = report_at(&path);
    assert_eq!(r.records[0].digest.fixture.as_deref(), Some("cube-pair"));
    let Outcome::Classification {
        verdict, witnesses, ..
    } = &r.outcome
    else {
        panic!("not a classification")
    };
    assert_eq!(verdict.name(), "refuted");
    assert!(!witnesses.is_empty());
    let f = opsq_core::funclass::cube();
    for w in witnesses {
        w.verify(&f).unwrap();
    }
}

#[test]
fn reproduce_passes() {
    let out = opsq(&["reproduce"], None);
    assert_eq!(out.status.code(), Some(0));
    let r = RunReport::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let Outcome::Reproduction(rep) = r.outcome else {
        panic!("not a reproduction")
    };
    assert!(rep.all_passed);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["classify", "--function", "sqrt"][..],
        &["verify", "--function", "square"],
        &["verify", "--function", "square", "--inequality", "nope"],
        &["classify", "--function", "square", "--tol", "-1"],
        &["classify", "--function", "square", "--trials", "0"],
        &["classify", "--function", "square", "--dims", "3-1"],
        &["falsify", "--function", "recip", "--inequality", "map"],
        &["launch"],
        &[],
    ] {
        let out = opsq(args, None);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    let out = opsq(&["reproduce"], Some("seven"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_and_falsify_report_refutations() {
    let ok = opsq(
        &[
            "verify",
            "--function",
            "square",
            "--inequality",
            "projection",
            "--trials",
            "50",
            "--dims",
            "1-4",
        ],
        None,
    );
    assert_eq!(ok.status.code(), Some(0));
    let bad = opsq(
        &[
            "verify",
            "--function",
            "cube",
            "--inequality",
            "weighted",
            "--trials",
            "20",
        ],
        None,
    );
    assert_eq!(bad.status.code(), Some(1));
    let found = opsq(
        &[
            "falsify",
            "--function",
            "cube",
            "--inequality",
            "two-point",
            "--restarts",
            "10",
        ],
        None,
    );
    assert_eq!(found.status.code(), Some(1));
    let r = RunReport::from_json(std::str::from_utf8(&found.stdout).unwrap()).unwrap();
    assert!(matches!(
        r.outcome,
        Outcome::Falsification {
            witness: Some(_),
            ..
        }
    ));
}

#[test]
fn same_config_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<String> = (0..3)
        .map(|i| {
            let path = dir.path().join(format!("run{i}.json"));
            let out = opsq(
                &[
                    "classify",
                    "--function",
                    "cube",
                    "--trials",
                    "40",
                    "--seed",
                    "3",
                    "--restarts",
                    "16",
                    "--out",
                    path.to_str().unwrap(),
                ],
                None,
            );
            assert_eq!(out.status.code(), Some(1));
            without_wall_time(report_at(&path))
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[1], runs[2]);
}

#[test]
fn thread_count_does_not_change_results() {
    let mut cfg = RunConfig::new(Cmd::Verify, "tlogt");
    cfg.inequality_id = Some("map".into());
    cfg.trials = 60;
    cfg.threads = Some(1);
    let one = run(&cfg).unwrap();
    cfg.threads = Some(3);
    let three = run(&cfg).unwrap();
    assert_eq!(one.records, three.records);
    assert_eq!(one.outcome, three.outcome);
}

#[test]
fn seed_environment_overrides_flag() {
    let out = opsq(
        &[
            "verify",
            "--function",
            "square",
            "--inequality",
            "weighted",
            "--trials",
            "5",
            "--seed",
            "1",
        ],
        Some("99"),
    );
    let r = RunReport::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(r.config.seed, 99);
}

#[test]
fn config_document_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("run.json");
    std::fs::write(
        &doc,
        r#"{"command": "verify", "function_id": "square", "inequality_id": "convex:contraction", "trials": 12, "seed": 5, "dims": [2, 3]}"#,
    )
    .unwrap();
    let out = opsq(&["--config", doc.to_str().unwrap(), "--trials", "8"], None);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = RunReport::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(r.config.trials, 8);
    assert_eq!(r.config.seed, 5);
    assert_eq!(r.config.dims, vec![2, 3]);
    assert_eq!(r.summary.trials_run, 8);

    std::fs::write(&doc, r#"{"command": "verify", "colour": "blue"}"#).unwrap();
    assert_eq!(
        opsq(&["--config", doc.to_str().unwrap()], None)
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn report_round_trips() {
    let mut cfg = RunConfig::new(Cmd::Classify, "cube");
    cfg.trials = 25;
    cfg.restarts = 8;
    let r = run(&cfg).unwrap();
    let text = r.to_json();
    let back = RunReport::from_json(&text).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.to_json(), text);
}

#[test]
fn refuted_records_regenerate_from_their_digest() {
    let mut cfg = RunConfig::new(Cmd::Verify, "cube");
    cfg.inequality_id = Some("two-point".into());
    cfg.trials = 60;
    let r = run(&cfg).unwrap();
    let f = opsq_core::funclass::cube();
    let mut campaign = opsq_core::jensen::CampaignConfig::new(
        "two-point".parse().unwrap(),
        cfg.dims.clone(),
        cfg.trials,
        cfg.seed,
    );
    campaign.tol = cfg.tolerance;
    let mut seen = 0;
    for rec in r.records.iter().filter(|t| !t.verdict.holds_psd()) {
        let inst = opsq_core::jensen::regenerate(&f, &campaign, &rec.digest).unwrap();
        let again = inst
            .evaluate(&f)
            .unwrap()
            .verdict
            .with_tolerance(cfg.tolerance);
        assert_eq!(again, rec.verdict);
        seen += 1;
    }
    assert!(seen > 0);
}

#[test]
fn overrides_resolve_defaults_and_seed() {
    let o = Overrides {
        command: Some(Cmd::Falsify),
        function_id: Some("cube".into()),
        ..Overrides::default()
    };
    let cfg = o.clone().resolve(Some("12")).unwrap();
    assert_eq!(cfg.seed, 12);
    assert_eq!(cfg.dims, (1..=6).collect::<Vec<_>>());
    assert!(o.resolve(Some("-3")).is_err());
}

#[test]
fn dims_syntax() {
    assert_eq!(parse_dims("1-3,8").unwrap(), vec![1, 2, 3, 8]);
    assert_eq!(parse_dims("4").unwrap(), vec![4]);
    assert!(parse_dims("").is_err());
    assert!(parse_dims("a").is_err());
}
