use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use proptest::prelude::*;
use shiftcouple::cli::{self, EXIT_INPUT_ERROR, EXIT_NEGATIVE, EXIT_SUCCESS};
use shiftcouple::format::{Mode, ProblemFile, ProblemOptions};
use shiftcouple::Rational;

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn run(args: &[&str], stdin: Option<&str>) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_shiftcouple"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn path(name: &str) -> String {
    golden(name).to_str().unwrap().to_string()
}

#[test]
fn golden_documents_match_byte_for_byte() {
    let cases = [
        ("couple", "swap", "swap.couple.json", 0),
        ("oracle", "rotation3", "rotation3.oracle.json", 0),
        ("check", "fixed_points", "fixed_points.check.json", 1),
        ("sets", "fixed_points_sets", "fixed_points_sets.sets.json", 1),
    ];
    for (command, problem, expected, code) in cases {
        let (status, stdout, _) = run(&[command, &path(&format!("{problem}.problem.json"))], None);
        assert_eq!(status, code, "{command} {problem}");
        assert_eq!(stdout, std::fs::read_to_string(golden(expected)).unwrap(), "{command} {problem}");
    }
}

#[test]
fn emitted_documents_reverify() {
    for (command, problem) in [
        ("couple", "swap"),
        ("oracle", "swap"),
        ("oracle", "rotation3"),
        ("couple", "rotation3"),
        ("check", "fixed_points"),
        ("couple", "fixed_points"),
        ("sets", "fixed_points_sets"),
        ("sets", "rotation4_sets"),
    ] {
        let problem = path(&format!("{problem}.problem.json"));
        let (_, document, _) = run(&[command, &problem], None);
        let (status, verdict, _) = run(&["verify", &problem, "-"], Some(&document));
        assert_eq!(status, 0, "{command} {problem}: {verdict}");
    }
}

#[test]
fn tampered_documents_fail_verification() {
    let problem = path("swap.problem.json");
    let document = std::fs::read_to_string(golden("swap.couple.json")).unwrap();
    let tampered = document.replace("\"0\": \"1/5\"", "\"1\": \"1/5\"");
    assert_ne!(tampered, document);
    let (status, verdict, _) = run(&["verify", &problem, "-"], Some(&tampered));
    assert_eq!(status, 1, "{verdict}");
    assert!(verdict.contains("\"verified\": false"));
}

#[test]
fn exit_codes() {
    let swap = path("swap.problem.json");
    assert_eq!(run(&["check", &swap], None).0, 0);
    assert_eq!(run(&["couple", &path("fixed_points.problem.json")], None).0, 1);
    assert_eq!(run(&["oracle", &path("fixed_points.problem.json")], None).0, 1);
    assert_eq!(run(&["sets", &path("rotation4_sets.problem.json")], None).0, 0);
    assert_eq!(run(&["sets", &swap], None).0, 3);
    assert_eq!(run(&["check", "/nonexistent/problem.json"], None).0, 3);
    assert_eq!(run(&["couple", "--epsilon", "1/0", &swap], None).0, 3);
    assert_eq!(run(&["frobnicate"], None).0, 3);
    assert_eq!(run(&["axioms", "nosuch"], None).0, 3);
    assert_eq!(run(&["axioms", "measure", "--cases", "50"], None).0, 0);
    assert_eq!(run(&["axioms", "extnat", "--seed", "7", "--cases", "200", "--action", &swap], None).0, 0);
}

#[test]
fn input_errors_name_field_and_line_on_stderr() {
    let text = std::fs::read_to_string(golden("swap.problem.json")).unwrap().replace("\"3/5\"", "\"1/0\"");
    let (status, stdout, stderr) = run(&["check", "-"], Some(&text));
    assert_eq!(status, 3);
    assert!(stdout.is_empty());
    assert!(stderr.contains("mu.0") && stderr.contains("line 5"), "{stderr}");

    let base = std::fs::read_to_string(golden("rotation4_sets.problem.json")).unwrap().replace("\"0\": \"1/4\"", "\"0\": \"1/2\"");
    let (status, _, stderr) = run(&["sets", "-"], Some(&base));
    assert_eq!(status, 3);
    assert!(stderr.contains("group[0]"), "{stderr}");
}

#[test]
fn couple_equal_measures_uses_identity_only() {
    let text = std::fs::read_to_string(golden("swap.problem.json")).unwrap().replace("\"nu\": {\"0\": \"2/5\", \"1\": \"3/5\"}", "\"nu\": {\"0\": \"3/5\", \"1\": \"2/5\"}");
    let problem = ProblemFile::from_json(&text).unwrap().validate().unwrap();
    let out = cli::cmd_couple(&problem, &problem.tarski_config(None, None).unwrap()).unwrap();
    assert_eq!(out.exit_code, EXIT_SUCCESS);
    let pieces = out.document["pieces"].as_array().unwrap();
    assert_eq!(pieces.len(), 1);
    assert_eq!(pieces[0]["element"], 0);
    let oracle = cli::cmd_oracle(&problem).unwrap();
    assert_eq!(oracle.document["pieces"].as_array().unwrap().len(), 1);
    assert_eq!(oracle.document["pieces"][0]["element"], 0);
}

#[test]
fn library_and_binary_agree() {
    let text = std::fs::read_to_string(golden("rotation3.problem.json")).unwrap();
    let problem = ProblemFile::from_json(&text).unwrap().validate().unwrap();
    let out = cli::cmd_oracle(&problem).unwrap();
    assert_eq!(out.render(), std::fs::read_to_string(golden("rotation3.oracle.json")).unwrap());
    let check = cli::cmd_check(&ProblemFile::from_json(&std::fs::read_to_string(golden("fixed_points.problem.json")).unwrap()).unwrap().validate().unwrap()).unwrap();
    assert_eq!(check.exit_code, EXIT_NEGATIVE);
    assert_eq!(cli::cmd_axioms("nosuch", 1, 1, None).unwrap_err().field.as_deref(), Some("instance"));
    assert_eq!(EXIT_INPUT_ERROR, 3);
}

fn rational() -> impl Strategy<Value = Rational> {
    (0u64..50, 1u64..12).prop_map(|(n, d)| Rational::new(n, d))
}

fn problem_file() -> impl Strategy<Value = ProblemFile> {
    (1usize..6).prop_flat_map(|n| {
        let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let masses = || proptest::collection::btree_map(proptest::sample::select(labels.clone()), rational(), 0..=n);
        let perm = Just((0..n).collect::<Vec<usize>>()).prop_shuffle();
        (
            Just(labels.clone()),
            proptest::collection::vec(perm, 0..3),
            masses(),
            masses(),
            proptest::option::of(1usize..200),
            proptest::option::of(rational()),
        )
            .prop_map(|(space, group, mu, nu, max_passes, epsilon)| ProblemFile {
                space,
                group,
                mode: Mode::Measures,
                mu: Some(mu),
                nu: Some(nu),
                set_a: None,
                set_b: None,
                base: None,
                options: ProblemOptions { max_passes, epsilon },
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn problem_files_round_trip(file in problem_file()) {
        let again = ProblemFile::from_json(&file.to_json()).unwrap();
        prop_assert_eq!(&again, &file);
        prop_assert!(again.validate().is_ok());
    }

    #[test]
    fn couple_and_oracle_outputs_reverify(file in problem_file()) {
        let problem = file.validate().unwrap();
        let config = problem.tarski_config(None, None).unwrap();
        for out in [cli::cmd_couple(&problem, &config).unwrap(), cli::cmd_oracle(&problem).unwrap(), cli::cmd_check(&problem).unwrap()] {
            let verdict = cli::cmd_verify(&problem, &out.render()).unwrap();
            prop_assert_eq!(verdict.exit_code, EXIT_SUCCESS, "{}", out.render());
        }
    }
}
