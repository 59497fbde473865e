//! End-to-end checks of the command-line surface: exit codes, file round
//! trips, and report structure.

use serde_json::Value;

fn run(args: &[&str]) -> treecodes::cli::CliOutcome {
    let mut full = vec!["treecodes"];
    full.extend_from_slice(args);
    treecodes::cli::run(full)
}

fn report(args: &[&str]) -> Value {
    let outcome = run(args);
    assert_eq!(outcome.code, 0, "{args:?}: {}", outcome.stderr);
    serde_json::from_str(&outcome.stdout).expect("report is JSON")
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["no-such-command"]).code, 2);
    assert_eq!(run(&["gen", "--n", "3"]).code, 2); // missing --q
    assert_eq!(run(&["gen", "--n", "3", "--q", "6"]).code, 2); // composite
    assert_eq!(run(&["verify", "--in", "/nonexistent", "--shape", "2x1"]).code, 2);
    assert_eq!(run(&["gen", "--n", "3", "--q", "5", "--shape", "bogus"]).code, 2);
}

#[test]
fn help_exits_0() {
    let outcome = run(&["--help"]);
    assert_eq!(outcome.code, 0);
    assert!(outcome.stderr.contains("Usage"));
}

#[test]
fn gen_verify_round_trip() {
    let dir = std::env::temp_dir().join("treecodes-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let matrix = dir.join("m.txt");
    let matrix = matrix.to_str().unwrap();

    let doc = report(&[
        "gen", "--n", "3", "--q", "5", "--until-verified", "--matrix-out", matrix,
    ]);
    assert_eq!(doc["command"], "gen");
    assert_eq!(doc["result"]["found"], true);
    assert_eq!(doc["result"]["verification"]["verified"], true);

    let doc = report(&["verify", "--in", matrix, "--shape", "2x1"]);
    assert_eq!(doc["result"]["verified"], true);
    assert_eq!(doc["result"]["failure"], Value::Null);

    // Corrupt the diagonal block: verification now fails with exit 1.
    let text = std::fs::read_to_string(matrix).unwrap();
    let mut lines: Vec<String> = text.lines().map(|l| l.to_string()).collect();
    lines[1] = "0 0 0".to_string();
    lines[2] = "0 0 0".to_string();
    std::fs::write(matrix, lines.join("\n") + "\n").unwrap();
    let outcome = run(&["verify", "--in", matrix, "--shape", "2x1"]);
    assert_eq!(outcome.code, 1);
    let doc: Value = serde_json::from_str(&outcome.stdout).unwrap();
    assert_eq!(doc["result"]["verified"], false);
    assert_eq!(doc["result"]["failure"]["rows"], serde_json::json!([1]));
}

#[test]
fn gen_is_seed_deterministic() {
    let a = run(&["gen", "--n", "3", "--q", "7", "--seed", "42"]);
    let b = run(&["gen", "--n", "3", "--q", "7", "--seed", "42"]);
    let c = run(&["gen", "--n", "3", "--q", "7", "--seed", "43"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn pascal_commands() {
    let doc = report(&["pascal", "--n", "4", "--kind", "triangular"]);
    let m = &doc["result"]["matrix"];
    assert_eq!(m[3][1], "3"); // C(3,1), integer entries rendered as strings
    assert_eq!(run(&["pascal", "--n", "2", "--kind", "odd-columns"]).code, 2); // needs --q
    let doc = report(&["pascal", "--n", "2", "--kind", "odd-columns", "--q", "5"]);
    assert_eq!(doc["result"]["shape"], "2x1");
}

#[test]
fn verify_int_matrix() {
    let dir = std::env::temp_dir().join("treecodes-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("pascal.txt");
    let path = path.to_str().unwrap();
    report(&["pascal", "--n", "4", "--kind", "triangular", "--matrix-out", path]);
    let doc = report(&["verify", "--in", path, "--shape", "1x1"]);
    assert_eq!(doc["result"]["verified"], true);
}

#[test]
fn code_pipeline() {
    let dir = std::env::temp_dir().join("treecodes-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let matrix = dir.join("gen-code.txt");
    let matrix = matrix.to_str().unwrap();
    let code = dir.join("code.json");
    let code = code.to_str().unwrap();

    report(&["gen", "--n", "3", "--q", "5", "--until-verified", "--matrix-out", matrix]);
    let doc = report(&["code", "build", "--in", matrix, "--code-out", code]);
    assert_eq!(doc["result"]["s"], 3);
    assert_eq!(doc["result"]["t"], 1);
    assert_eq!(doc["result"]["rate"], "1/3");

    let doc = report(&["code", "encode", "--code", code, "--message", "1,0,2"]);
    assert_eq!(doc["result"]["blocks"].as_array().unwrap().len(), 3);

    let doc = report(&["code", "distance", "--code", code]);
    // (5^3-1)/4 = 31 projective representatives.
    assert_eq!(doc["result"]["representatives_enumerated"], 31);

    // Witness requires the normal-form construction.
    let nmatrix = dir.join("gen-n5.txt");
    let nmatrix = nmatrix.to_str().unwrap();
    report(&["gen", "--n", "5", "--q", "5", "--until-verified", "--matrix-out", nmatrix]);
    let ncode = dir.join("ncode.json");
    let ncode = ncode.to_str().unwrap();
    report(&["code", "build", "--in", nmatrix, "--construction", "normal", "--code-out", ncode]);
    let doc = report(&["code", "singleton-witness", "--code", ncode, "--k", "3"]);
    assert_eq!(doc["result"]["l"], 1);
}

#[test]
fn sweep_csv_output() {
    let outcome = run(&[
        "exp", "kl", "--n", "2", "--m", "5", "--m", "50", "--trials", "500", "--format", "csv",
    ]);
    assert_eq!(outcome.code, 0);
    let mut lines = outcome.stdout.lines();
    assert_eq!(lines.next(), Some("m,trials,successes,estimate,sigma"));
    assert_eq!(outcome.stdout.lines().count(), 3);

    let outcome = run(&["exp", "pascal-prime", "--n", "3", "--format", "csv"]);
    assert_eq!(outcome.code, 0);
    assert!(outcome.stdout.starts_with("n,smallest_prime\n"));
    assert_eq!(outcome.stdout.lines().count(), 4);
}

#[test]
fn experiment_reports() {
    let doc = report(&["exp", "claim1", "--q", "2", "--k", "2", "--exhaustive"]);
    assert_eq!(doc["result"]["estimate"], "1/8");
    assert_eq!(doc["result"]["verdict"], "pass");

    let doc = report(&["exp", "prop2", "--n", "5", "--q", "53"]);
    assert_eq!(doc["result"]["less_than_one"], true);

    let doc = report(&["exp", "st", "--t", "2", "--k", "1", "--q", "3", "--exhaustive"]);
    assert_eq!(doc["result"]["single_block"]["estimate"], "35/243");
}
