//! One pass/fail line per acceptance criterion. Arithmetic is exact, so every
//! comparison is an equality.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command as Process;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weightlab_cli::sweep::corpus;
use weightlab_cli::{load, run_command, Command, OrbitSpec, Params, Report};
use weightlab_core::complexes::{
    decomposition_check, elementary, elementary_cohomology_expected, embed_t_complex, kk_check, purity_check,
    support_box, CohomologyProfile, OmegaContext,
};
use weightlab_core::orbit::{gen_jordan, gen_sl2_tensor, random_nilpotent, NilpotentOrbit};
use weightlab_core::psi::{a_complex, monodromy_weight_check, PsiComplex, PsiMode};
use weightlab_core::qlinalg::{Matrix, Rat};
use weightlab_core::scat::{subsets_of, Subset};
use weightlab_core::weightcore::{key_lemma_check, verify_weight_axioms, weight_filtration, weight_from_jordan_basis};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("{what} took {t:.1?}, limit {limit:?}"))
}

fn nonempty(o: &NilpotentOrbit) -> Vec<Subset> {
    subsets_of(o.index_set()).into_iter().filter(|&s| s != 0).collect()
}

fn tensor_shapes(max_factors: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for n in 1..=max_factors {
        // nondecreasing size lists over {2, 3}
        for threes in 0..=n {
            let mut v = vec![2; n - threes];
            v.extend(vec![3; threes]);
            out.push(v);
        }
    }
    out
}

fn weight_axioms() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..50 {
        let dim = rng.gen_range(1..=12);
        let (n, sizes, g) = random_nilpotent(dim, &mut rng);
        let w = weight_filtration(&n).map_err(|e| e.to_string())?;
        ensure(verify_weight_axioms(&n, &w).holds, || format!("trial {trial}: axioms fail for {sizes:?}"))?;
        ensure(w == weight_from_jordan_basis(&sizes, &g), || format!("trial {trial}: differs from Jordan chains"))?;
    }
    within(start, Duration::from_secs(10), "50 weight filtrations")?;
    Ok(format!("50 random maps match the Jordan-chain oracle in {:.2?}", start.elapsed()))
}

fn lambda_independence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut count = 0;
    for sizes in tensor_shapes(3) {
        let o = gen_sl2_tensor(&sizes).map_err(|e| e.to_string())?;
        for j in nonempty(&o) {
            let reference = o.w(j);
            for _ in 0..5 {
                let mut comb = Matrix::zeros(o.dim(), o.dim());
                for i in weightlab_core::scat::elements(j) {
                    comb = &comb + &o.nilpotent(i).scale(&Rat::int(rng.gen_range(1..=20)));
                }
                let w = weight_filtration(&comb).map_err(|e| e.to_string())?;
                ensure(&w == reference.as_ref(), || format!("{sizes:?} J={j}: depends on coefficients"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} coefficient tuples agree"))
}

fn key_lemma() -> Outcome {
    let mut orbits = 0;
    for sizes in tensor_shapes(3) {
        let o = gen_sl2_tensor(&sizes).map_err(|e| e.to_string())?;
        let rep = key_lemma_check(&o, o.index_set(), 11).map_err(|e| e.to_string())?;
        let failed: Vec<_> = rep.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
        ensure(failed.is_empty(), || format!("{sizes:?}: {failed:?}"))?;
        orbits += 1;
    }
    Ok(format!("{orbits} tensor orbits up to dim 27, all parts and orderings"))
}

fn purity_orbits() -> Vec<NilpotentOrbit> {
    vec![
        gen_jordan(&[3]).unwrap(),
        gen_jordan(&[3, 2]).unwrap(),
        gen_sl2_tensor(&[2, 2]).unwrap(),
        gen_sl2_tensor(&[2, 3]).unwrap(),
        gen_sl2_tensor(&[2, 2, 2]).unwrap(),
        gen_sl2_tensor(&[2, 2, 3]).unwrap(),
    ]
}

fn window(ctx: &OmegaContext) -> Result<Vec<i64>, String> {
    let i0 = ctx.support_radius().map_err(|e| e.to_string())?;
    Ok((-i0 - 2..=i0 + 2).collect())
}

fn purity() -> Outcome {
    let mut checks = 0;
    let mut slowest = Duration::ZERO;
    for o in purity_orbits() {
        let start = Instant::now();
        let ctx = OmegaContext::new(&o);
        for k in nonempty(&o) {
            for r in window(&ctx)? {
                let rep = purity_check(&ctx, k, r).map_err(|e| e.to_string())?;
                ensure(rep.passed, || format!("dim {} K={k} r={r}: {:?}", o.dim(), rep))?;
                if r == 0 {
                    ensure(rep.profile.is_acyclic(), || format!("K={k}: C_0 not acyclic"))?;
                }
                checks += 1;
            }
        }
        if o.n_indices() == 3 {
            within(start, Duration::from_secs(60), "three-factor purity")?;
        }
        slowest = slowest.max(start.elapsed());
    }
    Ok(format!("{checks} (K, r) pairs concentrated as predicted, slowest orbit {slowest:.2?}"))
}

fn decomposition() -> Outcome {
    let mut checks = 0;
    for o in purity_orbits() {
        let ctx = OmegaContext::new(&o);
        for r in window(&ctx)? {
            let rep = decomposition_check(&ctx, r).map_err(|e| e.to_string())?;
            ensure(rep.passed(), || format!("dim {} r={r}: {rep:?}", o.dim()))?;
            if r == 0 {
                ensure(rep.graded.is_acyclic(), || "Gr_0 not acyclic".into())?;
            }
            for k in nonempty(&o) {
                if r == 0 {
                    continue;
                }
                let m = embed_t_complex(&ctx, k, r).map_err(|e| e.to_string())?;
                ensure(m.is_quasi_iso(), || format!("dim {} K={k} r={r}: cone {}", o.dim(), m.cone))?;
                checks += 1;
            }
        }
    }
    Ok(format!("graded sums hold for every r; {checks} T-embeddings are quasi-isomorphisms"))
}

fn kashiwara_kawai() -> Outcome {
    let entries = corpus(0).map_err(|e| e.to_string())?;
    for e in &entries {
        let rep = kk_check(&e.orbit).map_err(|e| e.to_string())?;
        ensure(rep.w_minus1 == rep.ic, || format!("{}: W_-1 {} vs IC {}", e.name, rep.w_minus1, rep.ic))?;
    }
    Ok(format!("W_-1 matches IC on {} corpus orbits", entries.len()))
}

fn elementary_complexes() -> Outcome {
    let mut checks = 0;
    let mut zero_cases = 0;
    for o in purity_orbits() {
        let ctx = OmegaContext::new(&o);
        for k in nonempty(&o) {
            for m in support_box(&o, k) {
                let got = elementary(&ctx, k, &m).map_err(|e| e.to_string())?.profile().map_err(|e| e.to_string())?;
                let (deg, dim) = elementary_cohomology_expected(&ctx, k, &m);
                let ok = if dim == 0 { got.is_acyclic() } else { got.concentrated() == Some((deg, dim)) };
                ensure(ok, || format!("dim {} K={k} m={m:?}: got {got}, predicted ({deg}, {dim})", o.dim()))?;
                if m.contains(&1) {
                    ensure(got.is_acyclic(), || format!("m={m:?} has an entry 1 but {got}"))?;
                    zero_cases += 1;
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} m-vectors match, {zero_cases} with some m_i = 1 vanish"))
}

fn shape(p: &CohomologyProfile) -> Vec<usize> {
    match (p.dims.keys().next(), p.dims.keys().next_back()) {
        (Some(&lo), Some(&hi)) => (lo..=hi).map(|k| p.get(k)).collect(),
        _ => Vec::new(),
    }
}

fn nearby_cycles() -> Outcome {
    let entries = corpus(0).map_err(|e| e.to_string())?;
    let mut a_checks = 0;
    for e in &entries {
        let ctx = OmegaContext::new(&e.orbit);
        let i0 = ctx.support_radius().map_err(|e| e.to_string())?;
        let mults = e.multiplicities.clone().unwrap_or_else(|| vec![1; e.orbit.n_indices()]);
        for k in nonempty(&e.orbit) {
            for i in 1..=i0 {
                let p = a_complex(&ctx, k, i, &mults).and_then(|c| c.profile()).map_err(|e| e.to_string())?;
                ensure(p.is_acyclic(), || format!("{}: A^K_i K={k} i={i} has {p}", e.name))?;
                a_checks += 1;
            }
        }
        for mode in [PsiMode::Cokernel, PsiMode::Kernel] {
            let psi = PsiComplex::build(&ctx, &mults, mode, None).map_err(|e| e.to_string())?;
            let (a, b) = psi.stabilization().map_err(|e| e.to_string())?;
            ensure(a == b, || format!("{}: not stable at p_max {}", e.name, psi.p_max()))?;
            let m = monodromy_weight_check(&psi).map_err(|e| e.to_string())?;
            ensure(m.passed(), || format!("{} {mode:?}: {m:?}", e.name))?;
        }
    }
    let trivial = NilpotentOrbit::new(1, vec![Matrix::zeros(1, 1); 2], 0).unwrap();
    let ctx = OmegaContext::new(&trivial);
    let psi = PsiComplex::build(&ctx, &[1, 1], PsiMode::Cokernel, None).map_err(|e| e.to_string())?;
    let p = psi.total_profile().map_err(|e| e.to_string())?;
    ensure(shape(&p) == vec![1, 1], || format!("f = z1 z2 gives {p}"))?;
    Ok(format!("{a_checks} A-complexes acyclic; monodromy checks pass on {} orbits; z1 z2 gives {p}", entries.len()))
}

fn weightlab(args: &[&str]) -> Result<(i32, Vec<u8>), String> {
    let out = Process::new(env!("CARGO_BIN_EXE_weightlab")).args(args).output().map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn cli_contract() -> Outcome {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let f = |n: &str| fixtures.join(n).to_string_lossy().into_owned();
    for e in corpus(3).map_err(|e| e.to_string())? {
        let spec = OrbitSpec::from_orbit(&e.orbit, e.multiplicities.clone());
        let back = OrbitSpec::from_json(&spec.to_json()).and_then(|s| s.parse()).map_err(|e| e.to_string())?;
        ensure(back.orbit == e.orbit, || format!("{} does not round-trip", e.name))?;
    }
    let parsed = load(&fixtures.join("tensor22.json")).map_err(|e| e.to_string())?;
    let report = || -> Result<String, String> {
        let recs = run_command(Command::All, &parsed.orbit, None, &Params::default()).map_err(|e| e.to_string())?;
        Ok(Report::new("all", OrbitSpec::digest(&parsed), recs).to_json())
    };
    ensure(report()? == report()?, || "reports differ between runs".into())?;
    let dir = std::env::temp_dir().join(format!("weightlab-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let (r1, r2) = (dir.join("a.json"), dir.join("b.json"));
    for r in [&r1, &r2] {
        let (code, _) = weightlab(&["all", &f("jordan2.json"), "--report", &r.to_string_lossy()])?;
        ensure(code == 0, || format!("all on jordan2 exited {code}"))?;
    }
    let same = std::fs::read(&r1).map_err(|e| e.to_string())? == std::fs::read(&r2).map_err(|e| e.to_string())?;
    ensure(same, || "report files differ".into())?;
    for (args, want) in [
        (vec!["weight".to_string(), f("bad_noncommuting.json")], 2),
        (vec!["weight".to_string(), f("bad_rational.json")], 2),
        (vec!["weight".to_string(), f("bad_shape.json")], 2),
        (vec!["bogus".to_string(), f("zero.json")], 2),
        (vec!["weight".to_string(), f("zero.json")], 0),
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, _) = weightlab(&args)?;
        ensure(code == want, || format!("{args:?} exited {code}, expected {want}"))?;
    }
    let start = Instant::now();
    let (code, _) = weightlab(&["sweep", "--report", &dir.join("sweep.json").to_string_lossy()])?;
    let sweep_time = start.elapsed();
    ensure(code == 0, || format!("sweep exited {code}"))?;
    within(start, Duration::from_secs(300), "full sweep")?;
    let (code, _) = weightlab(&["sweep", "--corrupt-filtration"])?;
    ensure(code == 1, || format!("corrupted sweep exited {code}, expected 1"))?;
    std::fs::remove_dir_all(&dir).ok();
    Ok(format!("round trips, identical reports, exit codes 0/1/2; sweep {sweep_time:.1?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("weight axioms and Jordan oracle", weight_axioms),
        ("independence of cone coefficients", lambda_independence),
        ("key lemma decompositions", key_lemma),
        ("purity of C-complexes", purity),
        ("graded decomposition and T-embeddings", decomposition),
        ("W_-1 against the intersection complex", kashiwara_kawai),
        ("elementary complexes", elementary_complexes),
        ("nearby cycles and monodromy weight", nearby_cycles),
        ("command-line contract", cli_contract),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
