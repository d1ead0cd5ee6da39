use std::path::PathBuf;
use std::process::Command as Process;

use weightlab_cli::sweep::{corpus, generate, Family};
use weightlab_cli::{load, run_command, Command, OrbitSpec, Params, Report};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn weightlab(args: &[&str]) -> (i32, String, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_weightlab")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn specs_round_trip() {
    for e in corpus(7).unwrap() {
        let spec = OrbitSpec::from_orbit(&e.orbit, e.multiplicities.clone());
        let parsed = OrbitSpec::from_json(&spec.to_json()).unwrap().parse().unwrap();
        assert_eq!(parsed.orbit, e.orbit, "{}", e.name);
        assert_eq!(parsed.multiplicities, e.multiplicities);
    }
    let shipped = load(&fixture("tensor22.json")).unwrap();
    assert_eq!(shipped.orbit, generate(Family::Tensor, &[2, 2], None).unwrap());
    assert_eq!(shipped.orbit.dim(), 4);
    let zero = load(&fixture("zero.json")).unwrap();
    assert!(zero.orbit.nilpotent(0).is_zero());
}

#[test]
fn invalid_specs_are_rejected_with_location() {
    let e = load(&fixture("bad_noncommuting.json")).unwrap_err().to_string();
    assert!(e.contains("(N1, N2)"), "{e}");
    let e = load(&fixture("bad_rational.json")).unwrap_err().to_string();
    assert!(e.contains("nilpotents[0][0][1]"), "{e}");
    let e = load(&fixture("bad_shape.json")).unwrap_err().to_string();
    assert!(e.contains("nilpotents[0]"), "{e}");
}

#[test]
fn reports_are_deterministic() {
    let parsed = load(&fixture("tensor22.json")).unwrap();
    let run = || {
        let recs = run_command(Command::All, &parsed.orbit, None, &Params::default()).unwrap();
        Report::new("all", OrbitSpec::digest(&parsed), recs).to_json()
    };
    assert_eq!(run(), run());
}

#[test]
fn documented_examples() {
    let t = fixture("tensor22.json");
    let t = t.to_str().unwrap();
    let (code, out, _) = weightlab(&["purity", t, "-K", "1,2", "--r", "4"]);
    assert_eq!(code, 0);
    assert!(out.contains("H^2 dim 1, formula dim 1"), "{out}");
    let (code, out, _) = weightlab(&["graded", t, "--r", "0"]);
    assert_eq!(code, 0);
    assert!(out.contains("Gr acyclic"), "{out}");
    let j = fixture("jordan2.json");
    let (code, out, _) = weightlab(&["psi-monodromy", j.to_str().unwrap(), "--multiplicities", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("r=1 rank 1/1"), "{out}");
}

#[test]
fn exit_codes() {
    let t = fixture("tensor22.json");
    let t = t.to_str().unwrap();
    assert_eq!(weightlab(&["weight", t]).0, 0);
    assert_eq!(weightlab(&["frobnicate", t]).0, 2);
    assert_eq!(weightlab(&["weight", fixture("bad_noncommuting.json").to_str().unwrap()]).0, 2);
    assert_eq!(weightlab(&["weight", fixture("bad_rational.json").to_str().unwrap()]).0, 2);
    assert_eq!(weightlab(&["weight", "/nonexistent.json"]).0, 2);
    assert_eq!(weightlab(&["purity", t, "-K", "3"]).0, 2);
    assert_eq!(weightlab(&["purity", t, "--r", "40"]).0, 2);
    assert_eq!(weightlab(&["psi-build", t, "--multiplicities", "1,0"]).0, 2);
}

#[test]
fn corrupted_filtration_fails_the_weight_check() {
    let parsed = load(&fixture("jordan2.json")).unwrap();
    let params = Params { corrupt_filtration: true, ..Params::default() };
    let recs = run_command(Command::Weight, &parsed.orbit, None, &params).unwrap();
    assert!(recs.iter().any(|r| !r.passed()));
}

#[test]
fn gen_prints_a_loadable_spec() {
    let dir = std::env::temp_dir().join(format!("weightlab-gen-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("j.json");
    let (code, _, _) = weightlab(&["gen", "jordan", "3,1", "--seed", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let parsed = load(&path).unwrap();
    assert_eq!(parsed.orbit, generate(Family::Jordan, &[3, 1], Some(5)).unwrap());
    std::fs::remove_dir_all(dir).ok();
}
