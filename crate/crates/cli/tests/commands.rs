use casas::filters::{restricted_list, FilterConfig, FilterToggles};
use casas::scenario::{counts_by_type, enumerate};
use casas_cli::run;

fn call(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut argv = vec!["casas"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn scenario_counts() {
    let (code, out) = call(&["scenarios", "--degree", "7", "--count-by-type"]);
    assert_eq!(code, 0);
    let all: Vec<_> = enumerate(7).unwrap().collect();
    let counts: Vec<String> = counts_by_type(&all, 7)
        .iter()
        .map(|c| c.to_string())
        .collect();
    assert!(
        out.contains(&format!("counts: {}", counts.join(","))),
        "{out}"
    );
    assert!(out.contains("total: 203"));

    let (_, listed) = call(&["scenarios", "--degree", "4"]);
    assert_eq!(listed.lines().filter(|l| !l.starts_with('#')).count(), 5);
}

#[test]
fn filter_matches_library() {
    let (code, out) = call(&[
        "--format",
        "jsonl",
        "filter",
        "--degree",
        "12",
        "--filters",
        "delta,divisibility",
        "--close",
    ]);
    assert_eq!(code, 0);
    let cfg = FilterConfig {
        degree: 12,
        toggles: FilterToggles::standard(),
    };
    let list = restricted_list(&cfg, true).unwrap();
    let expected = counts_by_type(&list, 12);
    let got: Vec<usize> = out
        .lines()
        .filter_map(|l| serde_json::from_str::<serde_json::Value>(l).ok())
        .filter_map(|v| v.get("count").and_then(|c| c.as_u64()))
        .map(|c| c as usize)
        .collect();
    assert_eq!(got, expected);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("list.txt");
    let (code, _) = call(&[
        "filter",
        "--degree",
        "12",
        "--filters",
        "delta",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        casas::scenario::parse_scenario_file(&text).unwrap().len(),
        29392
    );
}

#[test]
fn delta_pairs_and_determinants() {
    let (code, out) = call(&["delta", "--degree", "12", "--pairs"]);
    assert_eq!(code, 0);
    assert_eq!(
        out.lines().collect::<Vec<_>>(),
        ["(3,8)", "(5,6)", "(6,8)", "(6,9)", "(7,9)"]
    );
    let (_, out) = call(&["delta", "--degree", "12", "--indices", "4"]);
    assert!(out.starts_with("det = 3, mod 11 = 3"), "{out}");
    assert_eq!(call(&["delta", "--degree", "10", "--pairs"]).0, 64);
}

#[test]
fn check_poly_worked_example() {
    let (code, out) = call(&[
        "check-poly",
        "--char",
        "23",
        "--roots",
        "0:1,1:4,8:1,18:1",
        "--scenario",
        "0,1,0,2,1,0",
    ]);
    assert_eq!(code, 0);
    for line in [
        "R_1 = {1}",
        "R_2 = {1,18}",
        "R_3 = {1}",
        "R_4 = {0}",
        "R_5 = {18}",
        "R_6 = {1}",
        "type: 2",
    ] {
        assert!(out.contains(line), "{line} missing from {out}");
    }
    assert!(out.contains("scen: 0,0,0,1,2,0"));
    assert!(out.contains("matches 0,1,0,2,1,0: yes"));
    let (_, out) = call(&[
        "check-poly",
        "--char",
        "23",
        "--roots",
        "0:1,1:4,8:1,18:1",
        "--scenario",
        "0,1,2,3,4,5",
    ]);
    assert!(out.contains("matches 0,1,2,3,4,5: no"));

    // x^4 - x^3 over F3, leading coefficient first
    let (_, out) = call(&["check-poly", "--char", "3", "--coeffs", "1,-1,0,0,0"]);
    assert!(
        out.contains("CA: yes") && out.contains("scen: 0,0,1"),
        "{out}"
    );

    let (_, out) = call(&["check-poly", "--char", "0", "--roots", "0:2,1:1"]);
    assert!(out.contains("R_2 = {}") && out.contains("CA: no"), "{out}");
    assert_eq!(
        call(&["check-poly", "--char", "0", "--coeffs", "1,0,-2"]).0,
        2
    );
}

#[test]
fn verify_exit_codes() {
    assert_eq!(call(&["verify", "--degree", "5", "--char", "0"]).0, 0);
    let (code, out) = call(&["verify", "--degree", "4", "--char", "3"]);
    assert_eq!(code, 1);
    assert!(
        out.contains("CA exists") && out.contains("witness point: A1="),
        "{out}"
    );
    let (code, out) = call(&[
        "verify",
        "--degree",
        "5",
        "--char",
        "0",
        "--budget-pairs",
        "0",
    ]);
    assert!(code == 2 || code == 0, "{out}");
    assert_eq!(call(&["verify", "--degree", "5", "--char", "4"]).0, 64);
    assert_eq!(
        call(&[
            "verify",
            "--degree",
            "12",
            "--char",
            "11",
            "--filters",
            "delta"
        ])
        .0,
        64
    );
    assert_eq!(call(&["nonsense"]).0, 64);
}

#[test]
fn verify_with_checkpoint_and_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let journal = dir.path().join("run.jsonl");
    let j = journal.to_str().unwrap();
    let (code, _) = call(&[
        "verify",
        "--degree",
        "6",
        "--char",
        "0",
        "--checkpoint",
        j,
        "--jobs",
        "2",
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&journal).unwrap();
    assert_eq!(text.lines().count(), 1 + 52);
    let rec: serde_json::Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    assert!(rec["scenario"].is_string() && rec["status"] == "trivial" && rec["ms"].is_u64());
    let (code, _) = call(&["verify", "--degree", "6", "--char", "0", "--checkpoint", j]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&journal).unwrap(), text);

    let list = dir.path().join("list.txt");
    std::fs::write(&list, "# closed\n0,0,0,0\n0,1,0,1\n0,0,1,0\n0,1,2,1\n").unwrap();
    let l = list.to_str().unwrap();
    assert_eq!(
        call(&[
            "verify",
            "--degree",
            "5",
            "--char",
            "0",
            "--scenario-file",
            l
        ])
        .0,
        0
    );
    std::fs::write(&list, "0,1,2,1\n").unwrap();
    let (code, out) = call(&[
        "verify",
        "--degree",
        "5",
        "--char",
        "0",
        "--scenario-file",
        l,
    ]);
    assert_eq!(code, 64);
    assert!(out.contains("not closed"), "{out}");
}

#[test]
fn bad_primes_and_smallest_nonbad() {
    let (code, out) = call(&["bad-primes", "--degree", "4"]);
    assert_eq!(code, 0);
    assert!(out.contains("bad primes (3): 3,5,7"), "{out}");
    let (_, lines) = call(&["--format", "jsonl", "bad-primes", "--degree", "3"]);
    let first: serde_json::Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(first["prime"], "2");
    assert_eq!(first["status"], "bad");
    let (code, out) = call(&["smallest-nonbad", "--degree", "5"]);
    assert_eq!(code, 0);
    assert!(
        out.contains("smallest non-bad prime for degree 5: 13"),
        "{out}"
    );
}

#[test]
fn version_lists_the_configuration() {
    let (code, out) = call(&["--version"]);
    assert_eq!(code, 0);
    assert!(out.contains("grevlex") && out.contains("Gebauer-Moller") && out.contains("budgets"));
}
