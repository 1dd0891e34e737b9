mod common;

use std::path::PathBuf;
use std::process::Command;

use catmod::cli::*;
use catmod::exactla::FieldSpec;
use catmod::modrep::Presentation;
use clap::Parser;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn axes_path() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data/axes.pres"))
}

fn catmod(args: &[&str], threads: &str) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_catmod")).args(args).env("CATMOD_THREADS", threads).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("catmod-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn random_presentation(family: usize, seed: u64) -> Presentation {
    let spec = common::sweep_specs()[family];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = if rng.gen_bool(0.5) { FieldSpec::Rationals } else { FieldSpec::Prime(7) };
    let mut p = common::random_presentation(spec, field, &mut rng, 3, 3, 3);
    for rel in &mut p.relations {
        for t in &mut rel.terms {
            if rng.gen_bool(0.3) {
                t.coeff = (t.coeff.0, 3);
            }
        }
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn serialize_then_parse_is_identity(family in 0usize..7, seed in any::<u64>()) {
        let p = random_presentation(family, seed);
        let text = serialize_presentation(&p);
        let q = parse_presentation(&text).map_err(|e| TestCaseError::fail(format!("{}\n{}", e, text)))?;
        prop_assert_eq!(&q, &p);
        prop_assert_eq!(serialize_presentation(&q), text);
    }
}

#[test]
fn axes_invariants_match_the_golden_values() {
    let (code, out, _) = catmod(&["invariants", axes_path().to_str().unwrap(), "--window", "6", "--format", "kv"], "2");
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    for want in ["gd=0", "reg=1", "reg.certified=true", "h1.(1,1)=1", "hd.1=2", "hd.2=-1"] {
        assert!(lines.contains(&want), "missing {} in\n{}", want, out);
    }
    assert_eq!(lines.iter().filter(|l| l.starts_with("h1.")).count(), 1);
}

#[test]
fn output_is_deterministic_across_runs_and_thread_counts() {
    let path = axes_path();
    let file = path.to_str().unwrap();
    for cmd in ["invariants", "tree", "resolve", "check"] {
        let (c1, a, _) = catmod(&[cmd, file, "--window", "5", "--format", "kv"], "1");
        let (c2, b, _) = catmod(&[cmd, file, "--window", "5", "--format", "kv"], "4");
        assert_eq!(c1, 0, "{} failed", cmd);
        assert_eq!(c2, 0);
        assert_eq!(a, b, "{} output depends on the thread count", cmd);
    }
    let p = temp_file("fi.pres", "category FI\nfield F 5\ngenerator a at (1)\nrelation: 1 * [morph to=(2) inj=(1)] a + (-1) * [morph to=(2) inj=(2)] a\n");
    let job = JobConfig::try_parse_from(["catmod", "invariants", p.to_str().unwrap(), "--window", "4"]).unwrap();
    let first = run(&job);
    assert_eq!(first.0, 0, "{}", first.1);
    assert_eq!(first, run(&job));
}

#[test]
fn exit_codes() {
    let axes = axes_path();
    let axes = axes.to_str().unwrap();
    assert_eq!(catmod(&["selftest", "--window", "5"], "2").0, 0);
    let (code, _, err) = catmod(&["resolve", axes, "--n", "0"], "2");
    assert_eq!(code, 1, "{}", err);
    assert!(err.contains("refused"));
    let bad = temp_file("bad.pres", "category FI\nfield Q\ngenerator g0 at (x)\n");
    let (code, _, err) = catmod(&["invariants", bad.to_str().unwrap()], "2");
    assert_eq!(code, 2);
    assert!(err.contains("line 3"), "{}", err);
    let unknown = temp_file("unknown.pres", "category FI\nfield Q\ngenerator g0 at (1)\nrelation: 1 * [morph inj=(2)] g9\n");
    assert_eq!(catmod(&["invariants", unknown.to_str().unwrap()], "2").0, 2);
}
