use std::path::Path;
use std::process::{Command, Output};

fn onionlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onionlab"))
        .args(args)
        .env_remove("ONIONLAB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn keygen_writes_a_reproducible_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let o = onionlab(&["keygen", "--nodes", "5", "--seed", "9", "--out", path_str(dir)]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let dir_a = std::fs::read(a.join("directory.json")).unwrap();
    assert_eq!(dir_a, std::fs::read(b.join("directory.json")).unwrap());
    let json: serde_json::Value = serde_json::from_slice(&dir_a).unwrap();
    assert_eq!(json["routers"].as_array().unwrap().len(), 5);
    assert_eq!(std::fs::read_dir(a.join("secrets")).unwrap().count(), 5);
}

#[test]
fn keygen_rejects_duplicate_names() {
    let tmp = tempfile::tempdir().unwrap();
    let o = onionlab(&["keygen", "--names", "X,Y,X", "--out", path_str(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("duplicate router name `X`"), "{}", stderr(&o));
}

#[test]
fn roundtrip_delivers_with_generated_and_loaded_keys() {
    let o = onionlab(&["roundtrip", "--path", "P03,P01,P05", "--message", "over three hops"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("receive \"over three hops\""));

    let tmp = tempfile::tempdir().unwrap();
    let k = onionlab(&["keygen", "--names", "alpha,beta,gamma", "--out", path_str(tmp.path())]);
    assert!(k.status.success());
    let o = onionlab(&["roundtrip", "--scheme", "oi(sphinx-ae)", "--keys", path_str(tmp.path()), "--path", "gamma,alpha,beta"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn tampered_roundtrip_reports_the_drop() {
    // Byte 40 lies in the routing information of the second layer.
    let o = onionlab(&["roundtrip", "--tamper", "2:40"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("drop: BadTag"), "{}", stdout(&o));
}

#[test]
fn overlong_path_is_refused() {
    let o = onionlab(&["roundtrip", "--path", "P00,P01,P02,P03,P04,P05"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("exceeds the maximum of 5"), "{}", stderr(&o));
}

#[test]
fn game_summary_flags_expected_failures() {
    let pass = onionlab(&["game", "LU", "--scheme", "sphinx-ae", "--trials", "200"]);
    assert!(pass.status.success(), "{}", stderr(&pass));
    let text = stdout(&pass);
    assert!(text.lines().any(|l| l == "PASS"), "{text}");
    assert!(text.contains("tag-and-query"));

    let fail = onionlab(&["game", "lu", "--scheme", "broken2", "--adversary", "id-scan", "--trials", "200"]);
    let text = stdout(&fail);
    assert!(text.contains("FAIL (expected: identifier shared by all layers)"), "{text}");
}

#[test]
fn unknown_ids_are_errors() {
    assert_eq!(onionlab(&["game", "XX"]).status.code(), Some(2));
    assert_eq!(onionlab(&["notion", "nope"]).status.code(), Some(2));
    assert_eq!(onionlab(&["game", "LU", "--adversary", "oracle"]).status.code(), Some(2));
    assert_eq!(onionlab(&["attack", "path-length", "--scheme", "broken1"]).status.code(), Some(2));
}

#[test]
fn path_length_attack_prints_a_table_over_lengths() {
    let o = onionlab(&["attack", "path-length", "--scheme", "sphinx-flawed", "--trials", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("probe output depends on the path length"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("5 ") && l.contains("20") && l.ends_with("1.0000")), "{text}");
}

#[test]
fn notion_attack_breaks_under_path_replacement() {
    let o = onionlab(&["notion", "SRL", "--class", "cp", "--trials", "100"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("attack breaks the notion"), "{}", stdout(&o));
}

#[test]
fn config_file_env_seed_and_flags_combine() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "scheme = \"sphinx-fixed\"\ntrials = 50\nseed = 4\n").unwrap();
    let log = |name: &str, extra: &[&str], env_seed: Option<&str>| -> serde_json::Value {
        let path = tmp.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_onionlab"));
        cmd.args(["attack", "wrap", "--log", path_str(&path)]).args(extra).env_remove("ONIONLAB_SEED");
        if let Some(s) = env_seed {
            cmd.env("ONIONLAB_SEED", s);
        }
        let o = cmd.output().unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        serde_json::from_str(std::fs::read_to_string(path).unwrap().trim()).unwrap()
    };
    let from_file = log("a.jsonl", &["--config", path_str(&cfg)], Some("77"));
    assert_eq!(from_file["config"]["scheme"], "sphinx-fixed");
    assert_eq!(from_file["config"]["seed"], 4);
    assert_eq!(from_file["report"]["trials"], 50);
    let flags = log("b.jsonl", &["--config", path_str(&cfg), "--trials", "10", "--seed", "5"], None);
    assert_eq!((flags["config"]["trials"].as_u64(), flags["config"]["seed"].as_u64()), (Some(10), Some(5)));
    let env = log("c.jsonl", &["--trials", "10"], Some("77"));
    assert_eq!(env["config"]["seed"], 77);
    assert_eq!(env["config"]["scheme"], "sphinx-ae");
}

#[test]
fn identical_configs_give_identical_logs() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = tmp.path().join(name);
        let o = onionlab(&["game", "TI", "--scheme", "broken1", "--trials", "60", "--seed", "3", "--log", path_str(&path)]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(path).unwrap()
    };
    let (a, b) = (run("one.jsonl"), run("two.jsonl"));
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 8);
}

#[test]
fn vectors_match_the_golden_file() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/wire_vectors.json");
    let o = onionlab(&["vectors", "--seed", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(o.stdout, std::fs::read(golden).unwrap());
}

#[test]
fn scenario_file_replaces_parties() {
    let tmp = tempfile::tempdir().unwrap();
    let good = tmp.path().join("good.toml");
    std::fs::write(
        &good,
        "notion = \"SRL\"\nclass = \"c\"\ntrials = 400\nseed = 8\nusers = [\"A\", \"B\", \"C\", \"D\", \"E\"]\n\
         relays = [\"R0\", \"R1\", \"R2\", \"R3\", \"R4\", \"R5\", \"R6\"]\ncorrupted = [\"R5\", \"R6\"]\nmax_path = 3\n",
    )
    .unwrap();
    let log = tmp.path().join("n.jsonl");
    let o = onionlab(&["notion", "--scenario", path_str(&good), "--log", path_str(&log)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("advantage within 3 sigma of 0"), "{}", stdout(&o));
    let record: serde_json::Value = serde_json::from_str(std::fs::read_to_string(&log).unwrap().trim()).unwrap();
    assert_eq!((record["config"]["seed"].as_u64(), record["report"]["trials"].as_u64()), (Some(8), Some(400)));

    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "notion = \"SRL\"\nusers = [\"A\", \"B\"]\n").unwrap();
    let o = onionlab(&["notion", "--scenario", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("user `C`"), "{}", stderr(&o));
}
