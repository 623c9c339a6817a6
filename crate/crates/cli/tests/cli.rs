use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fkr_core::graphcore::Graph;
use fkr_core::lift::KWebIso;
use fkr_core::posetblock::BlockMatrix;
use fkr_core::random::{random_equivalence, random_glp};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tempfile::TempDir;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn fkr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fkr")).args(args).env_remove("FKR_BUDGET").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn o3_invariant_is_z2_with_unit_generator() {
    let o = fkr(&["invariant", path(&corpus().join("o3.json"))]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["total"]["invariant_factors"], json!([2]));
    assert_eq!(v["unit"]["snf_coordinates"], json!([1]));
}

#[test]
fn two_block_chain_has_z2_z4_z2() {
    let v = stdout_json(&fkr(&["invariant", path(&corpus().join("chain_z4.json"))]));
    let opens: Vec<&Value> = v["opens"].as_array().unwrap().iter().map(|o| &o["k0"]["invariant_factors"]).collect();
    assert_eq!(opens, [&json!([]), &json!([2]), &json!([4])]);
    let quotient = &v["simple"][1]["k0"]["invariant_factors"];
    assert_eq!(quotient, &json!([2]));
}

#[test]
fn corpus_invariants_are_byte_stable() {
    let dir = corpus();
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let stem = p.file_stem().unwrap().to_str().unwrap().to_string();
        let expected = fs::read(dir.join("expected").join(format!("{stem}.invariant.json"))).unwrap();
        let a = fkr(&["invariant", path(&p)]);
        let b = fkr(&["invariant", path(&p)]);
        assert_eq!(code(&a), 0, "{stem}");
        assert_eq!(a.stdout, b.stdout, "{stem} differs between runs");
        assert_eq!(a.stdout, expected, "{stem} differs from the frozen dump");
        seen += 1;
    }
    assert!(seen >= 8);
}

#[test]
fn bad_inputs_exit_65() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"vertices\": [\"a\"], \"edges\": [[\"a\", ").unwrap();
    assert_eq!(code(&fkr(&["invariant", path(&bad)])), 65);
    // a single loop violates Condition (K)
    let cycle = dir.path().join("cycle.json");
    fs::write(&cycle, r#"{"vertices": ["a"], "edges": [["a", "a", 1]]}"#).unwrap();
    let o = fkr(&["invariant", path(&cycle)]);
    assert_eq!(code(&o), 65);
    assert!(!o.stderr.is_empty());
    let inf = dir.path().join("inf.json");
    fs::write(&inf, r#"{"vertices": ["a"], "edges": [["a", "a", "inf"]]}"#).unwrap();
    assert_eq!(code(&fkr(&["invariant", path(&inf)])), 65);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&fkr(&[])), 64);
    assert_eq!(code(&fkr(&["compare", "a.json"])), 64);
    assert_eq!(code(&fkr(&["compare", "a.json", "b.json", "--budget", "lots"])), 64);
    assert_eq!(code(&fkr(&["move", "g.json", "--row-add", "x", "y", "--splice", "x"])), 64);
    assert_eq!(code(&fkr(&["--help"])), 0);
}

#[test]
fn move_writes_a_verifiable_certificate() {
    let dir = TempDir::new().unwrap();
    let (out, cert) = (dir.path().join("t.json"), dir.path().join("c.json"));
    let g = corpus().join("standard.json");
    let o = fkr(&["move", path(&g), "--row-add", "x", "y", "--out", path(&out), "--cert", path(&cert)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let target: Graph = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let c: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(c["kind"], "row_add");
    for key in ["params", "padding", "U", "V", "source", "target", "unital"] {
        assert!(c.get(key).is_some(), "certificate lacks {key}");
    }
    assert_eq!(serde_json::from_value::<Graph>(c["target"].clone()).unwrap(), target);
    assert_eq!(code(&fkr(&["verify", path(&cert)])), 0);

    let mut tampered = c.clone();
    tampered["U"]["entries"][0][1] = json!(7);
    let bad = dir.path().join("tampered.json");
    fs::write(&bad, tampered.to_string()).unwrap();
    let o = fkr(&["verify", path(&bad)]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout_json(&o)["valid"], json!(false));

    let schema = dir.path().join("schema.json");
    fs::write(&schema, r#"{"kind": "row_add", "U": 3}"#).unwrap();
    assert_eq!(code(&fkr(&["verify", path(&schema)])), 65);
}

#[test]
fn every_move_subcommand_certifies() {
    let dir = TempDir::new().unwrap();
    let g = corpus().join("standard.json");
    let runs: [&[&str]; 6] = [
        &["move", path(&g), "--col-add", "x", "z"],
        &["move", path(&g), "--splice", "y"],
        &["move", path(&g), "--splice-twice", "y"],
        &["splice", path(&g), "z"],
        &["expand", path(&g), "x", "y"],
        &["enlarge", path(&g), "0"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let cert = dir.path().join(format!("c{i}.json"));
        let mut full = args.to_vec();
        full.extend(["--cert", path(&cert)]);
        let o = fkr(&full);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(code(&fkr(&["verify", path(&cert)])), 0, "{args:?}");
    }
}

#[test]
fn illegal_moves_exit_65() {
    let o2 = corpus().join("o2.json");
    assert_eq!(code(&fkr(&["move", path(&o2), "--row-add", "a", "a"])), 65);
    assert_eq!(code(&fkr(&["move", path(&o2), "--splice", "nobody"])), 65);
    let chain = corpus().join("chain_z4.json");
    // a → b has no edge
    assert_eq!(code(&fkr(&["move", path(&chain), "--row-add", "a", "b"])), 65);
}

#[test]
fn uncertified_splice_is_flagged() {
    let dir = TempDir::new().unwrap();
    let g = corpus().join("o3.json");
    let out = dir.path().join("s.json");
    let o = fkr(&["splice", path(&g), "a", "--uncertified", "--out", path(&out)]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("uncertified"));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["uncertified"], json!(true));
    let cert = dir.path().join("c.json");
    assert_eq!(code(&fkr(&["splice", path(&g), "a", "--uncertified", "--cert", path(&cert)])), 64);
    let r = fkr(&["compare", path(&g), path(&out), "--no-certify"]);
    assert_eq!(code(&r), 0);
    let log = stdout_json(&r)["log"].to_string();
    assert!(log.contains("uncertified"));
}

#[test]
fn compare_exit_codes() {
    let c = corpus();
    let o = fkr(&["compare", path(&c.join("o2.json")), path(&c.join("o3.json"))]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout_json(&o)["verdict"], "not_isomorphic");

    let g = c.join("fork.json");
    let o = fkr(&["compare", path(&g), path(&g)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["verdict"], "isomorphic_certified");

    let o = fkr(&["compare", path(&c.join("o2.json")), path(&c.join("o2_matrix.json")), "--no-certify"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["verdict"], "isomorphic_invariant_only");
}

#[test]
fn compare_is_deterministic_and_reads_the_budget_variable() {
    let c = corpus();
    let (g, h) = (c.join("standard.json"), c.join("standard_spliced.json"));
    let args = ["compare", path(&g), path(&h), "--unital"];
    let a = fkr(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_fkr")).args(args).env("FKR_BUDGET", "400").output().unwrap();
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["verdict"], "isomorphic_certified");
    assert!(v["unital_verdict"].is_boolean());
    assert!(v["fk_iso"].is_object());
    let bad = Command::new(env!("CARGO_BIN_EXE_fkr")).args(args).env("FKR_BUDGET", "-3").output().unwrap();
    assert_eq!(code(&bad), 64);
}

#[test]
fn lift_request_round_trip() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = fkr_cli::commands::load_graph(&corpus().join("two_block.json")).unwrap();
    let e = random_equivalence(&mut rng, &g, 8);
    let kweb = KWebIso::induced(&e).unwrap();
    let req = json!({"B": e.source, "Bprime": e.target, "kweb": kweb, "budget": 400});
    let file = dir.path().join("req.json");
    fs::write(&file, req.to_string()).unwrap();
    let o = fkr(&["lift", path(&file)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["status"], "found");
    let u: fkr_core::intlin::IntMatrix = serde_json::from_value(v["U"].clone()).unwrap();
    let w: fkr_core::intlin::IntMatrix = serde_json::from_value(v["V"].clone()).unwrap();
    assert_eq!(&(&u * e.source.matrix()) * &w, *e.target.matrix());
}

#[test]
fn factor_reproduces_the_matrix() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = fkr_cli::commands::load_graph(&corpus().join("two_block.json")).unwrap();
    let b = BlockMatrix::from_graph(&g).unwrap();
    let m = random_glp(&mut rng, b.poset(), b.row_comp(), 10, false);
    let u = b.with_matrix(m.clone()).unwrap();
    let file = dir.path().join("u.json");
    fs::write(&file, serde_json::to_string(&u).unwrap()).unwrap();
    let o = fkr(&["factor", path(&file)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let ts: Vec<fkr_core::lift::Transvection> = serde_json::from_value(stdout_json(&o)["transvections"].clone()).unwrap();
    let n = m.rows();
    let prod = ts.iter().fold(fkr_core::intlin::IntMatrix::identity(n), |acc, t| &acc * &t.matrix(n));
    assert_eq!(prod, m);

    let mut flipped = m.clone();
    for c in 0..n {
        flipped[(0, c)] = -flipped[(0, c)].clone();
    }
    fs::write(&file, serde_json::to_string(&b.with_matrix(flipped).unwrap()).unwrap()).unwrap();
    assert_eq!(code(&fkr(&["factor", path(&file)])), 65);
}
