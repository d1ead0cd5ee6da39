//! One checker per command. Every check becomes a [`Record`]; only bad input
//! or an exceeded resource guard aborts the run.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use weightlab_core::complexes::{
    decomposition_check, elementary, elementary_cohomology_expected, embed_t_complex, kk_check,
    koszul, omega_star, purity_check, support_box, OmegaContext,
};
use weightlab_core::orbit::NilpotentOrbit;
use weightlab_core::psi::{
    a_complex, ker_coker_bridge_check, monodromy_weight_check, psi_decomposition_check, PsiComplex, PsiMode,
};
use weightlab_core::qlinalg::{IncFiltration, Rat};
use weightlab_core::scat::{elements, fmt_subset, subsets_of, Subset};
use weightlab_core::weightcore::{key_lemma_check, verify_relative, verify_weight_axioms, weight_filtration};

use crate::report::{profile_json, profile_text, Record};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Weight,
    KeyLemma,
    Omega,
    Graded,
    Purity,
    Decompose,
    Ic,
    PsiBuild,
    PsiMonodromy,
    PsiAcyclic,
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Weight => "weight",
            Command::KeyLemma => "keylemma",
            Command::Omega => "omega",
            Command::Graded => "graded",
            Command::Purity => "purity",
            Command::Decompose => "decompose",
            Command::Ic => "ic",
            Command::PsiBuild => "psi-build",
            Command::PsiMonodromy => "psi-monodromy",
            Command::PsiAcyclic => "psi-acyclic",
            Command::All => "all",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Params {
    pub subset: Option<Subset>,
    pub r: Option<i64>,
    pub k: Option<Subset>,
    pub multiplicities: Option<Vec<i64>>,
    pub mode: Option<PsiMode>,
    pub seed: u64,
    /// Test hook: replace every computed weight filtration by a shifted copy.
    pub corrupt_filtration: bool,
}

type Outcome = Result<Vec<Record>, CliError>;

/// Turns a library result into records: contract and linear-algebra errors are
/// check failures, input and resource errors abort.
fn guard(name: &str, f: impl FnOnce() -> weightlab_core::Result<Vec<Record>>) -> Outcome {
    match f() {
        Ok(r) => Ok(r),
        Err(e @ (weightlab_core::Error::Contract(_) | weightlab_core::Error::Linalg(_))) => {
            Ok(vec![Record::new(name, false, json!({ "summary": e.to_string() }))])
        }
        Err(e) => Err(e.into()),
    }
}

fn nonempty_subsets(orbit: &NilpotentOrbit) -> Vec<Subset> {
    subsets_of(orbit.index_set()).into_iter().filter(|&s| s != 0).collect()
}

struct Setup<'a> {
    ctx: OmegaContext<'a>,
    i0: i64,
    params: &'a Params,
    mults: Vec<i64>,
}

impl<'a> Setup<'a> {
    fn new(orbit: &'a NilpotentOrbit, params: &'a Params, spec_mults: Option<&[i64]>) -> Result<Setup<'a>, CliError> {
        let ctx = OmegaContext::new(orbit);
        let i0 = ctx.support_radius()?;
        let all = orbit.index_set();
        for (flag, s) in [("--subset", params.subset), ("-K", params.k)] {
            if let Some(s) = s {
                if s == 0 || s & !all != 0 {
                    return Err(CliError::Input(format!("{flag}: subset out of range 1..={}", orbit.n_indices())));
                }
            }
        }
        if let Some(r) = params.r {
            if r.abs() > i0 + 2 {
                return Err(CliError::Input(format!("--r {r} outside the window ±{}", i0 + 2)));
            }
        }
        let mults = params
            .multiplicities
            .clone()
            .or_else(|| spec_mults.map(<[i64]>::to_vec))
            .unwrap_or_else(|| vec![1; orbit.n_indices()]);
        if mults.len() != orbit.n_indices() || mults.iter().any(|&m| m < 1) {
            return Err(CliError::Input(format!("--multiplicities: need {} positive integers", orbit.n_indices())));
        }
        Ok(Setup { ctx, i0, params, mults })
    }

    fn orbit(&self) -> &'a NilpotentOrbit {
        self.ctx.orbit
    }

    fn rs(&self) -> Vec<i64> {
        match self.params.r {
            Some(r) => vec![r],
            None => (-self.i0 - 2..=self.i0 + 2).collect(),
        }
    }

    fn ks(&self) -> Vec<Subset> {
        match self.params.k {
            Some(k) => vec![k],
            None => nonempty_subsets(self.orbit()),
        }
    }
}

/// Runs every [`Record`]-producing task, in parallel, keeping the order.
fn collect<T: Sync>(items: &[T], f: impl Fn(&T) -> Outcome + Sync + Send) -> Outcome {
    let parts: Vec<Outcome> = items.par_iter().map(f).collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn weight_records(s: &Setup) -> Outcome {
    let orbit = s.orbit();
    let js = match s.params.subset {
        Some(j) => vec![j],
        None => nonempty_subsets(orbit),
    };
    collect(&js, |&j| {
        guard("weight", || {
            let n = orbit.n_sum(j);
            let mut w: IncFiltration = orbit.w(j).as_ref().clone();
            if s.params.corrupt_filtration {
                w = w.shift(1);
            }
            let axioms = verify_weight_axioms(&n, &w);
            let mut relative = true;
            for i in elements(j) {
                relative &= verify_relative(orbit.nilpotent(i), &orbit.w(j & !(1 << i)), &w)?;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(s.params.seed ^ u64::from(j));
            let mut lambda_ok = true;
            let mut tuples = Vec::new();
            for _ in 0..5 {
                let lambdas: Vec<i64> = elements(j).iter().map(|_| rng.gen_range(1..=9)).collect();
                let mut comb = weightlab_core::qlinalg::Matrix::zeros(orbit.dim(), orbit.dim());
                for (i, l) in elements(j).into_iter().zip(&lambdas) {
                    comb = &comb + &orbit.nilpotent(i).scale(&Rat::int(*l));
                }
                lambda_ok &= weight_filtration(&comb)? == w;
                tuples.push(lambdas);
            }
            let dims: BTreeMap<String, usize> = w.graded_dims().into_iter().map(|(k, d)| (k.to_string(), d)).collect();
            let passed = axioms.holds && relative && lambda_ok;
            let summary = match &axioms.failure {
                Some(f) => format!("axioms fail: {f:?}"),
                None if !relative => "not relative to the smaller cone".into(),
                None if !lambda_ok => "depends on the coefficients".into(),
                None => format!("graded dims {dims:?}"),
            };
            Ok(vec![Record::new(
                "weight",
                passed,
                json!({
                    "summary": summary,
                    "graded_dims": dims,
                    "axioms": axioms.holds,
                    "relative": relative,
                    "lambda_independent": lambda_ok,
                    "lambda_tuples": tuples,
                    "witnesses": axioms.witnesses,
                }),
            )
            .with("J", fmt_subset(j))])
        })
    })
}

fn keylemma_records(s: &Setup) -> Outcome {
    let a = s.params.subset.unwrap_or(s.orbit().index_set());
    guard("keylemma", || {
        let rep = key_lemma_check(s.orbit(), a, s.params.seed)?;
        Ok(rep
            .checks
            .into_iter()
            .map(|c| {
                Record::new("keylemma", c.passed, json!({ "summary": c.detail }))
                    .with("A", fmt_subset(a))
                    .with("part", c.name)
            })
            .collect())
    })
}

fn omega_records(s: &Setup) -> Outcome {
    let orbit = s.orbit();
    guard("omega", || {
        let om = omega_star(orbit)?.profile()?;
        let ko = koszul(orbit, orbit.index_set()).profile()?;
        let ok = om == ko;
        Ok(vec![Record::new(
            "omega",
            ok,
            json!({
                "summary": format!("Omega {}; Koszul {}", profile_text(&om), profile_text(&ko)),
                "omega": profile_json(&om),
                "koszul": profile_json(&ko),
            }),
        )])
    })
}

fn graded_records(s: &Setup) -> Outcome {
    collect(&s.rs(), |&r| {
        guard("graded", || {
            let rep = decomposition_check(&s.ctx, r)?;
            let acyclic_at_zero = r != 0 || rep.graded.is_acyclic();
            let parts: BTreeMap<String, Value> =
                rep.parts.iter().map(|(k, p)| (fmt_subset(*k), profile_json(p))).collect();
            Ok(vec![Record::new(
                "graded",
                rep.passed() && acyclic_at_zero,
                json!({
                    "summary": format!("Gr {}; sum over K {}", profile_text(&rep.graded), profile_text(&rep.sum())),
                    "graded": profile_json(&rep.graded),
                    "parts": parts,
                }),
            )
            .with("r", r)])
        })
    })
}

fn purity_records(s: &Setup) -> Outcome {
    let pairs: Vec<(Subset, i64)> = s.ks().into_iter().flat_map(|k| s.rs().into_iter().map(move |r| (k, r))).collect();
    collect(&pairs, |&(k, r)| {
        guard("purity", || {
            let rep = purity_check(&s.ctx, k, r)?;
            let summary = if rep.expected_dim == 0 && rep.profile.is_acyclic() {
                "acyclic, formula dim 0".to_string()
            } else {
                format!(
                    "H^{} dim {}, formula dim {}",
                    rep.expected_degree,
                    rep.profile.get(rep.expected_degree),
                    rep.expected_dim
                )
            };
            Ok(vec![Record::new(
                "purity",
                rep.passed,
                json!({
                    "summary": summary,
                    "profile": profile_json(&rep.profile),
                    "expected_degree": rep.expected_degree,
                    "expected_dim": rep.expected_dim,
                }),
            )
            .with("K", fmt_subset(k))
            .with("r", r)])
        })
    })
}

fn embedding_records(s: &Setup) -> Outcome {
    // T(0) is empty; acyclicity at r = 0 is covered by the graded check
    let rs: Vec<i64> = s.rs().into_iter().filter(|&r| r != 0).collect();
    let pairs: Vec<(Subset, i64)> = s.ks().into_iter().flat_map(|k| rs.iter().map(move |&r| (k, r))).collect();
    collect(&pairs, |&(k, r)| {
        guard("embedding", || {
            let m = embed_t_complex(&s.ctx, k, r)?;
            Ok(vec![Record::new(
                "embedding",
                m.is_quasi_iso(),
                json!({
                    "summary": format!("C(T) {}; cone {}", profile_text(&m.source), profile_text(&m.cone)),
                    "source": profile_json(&m.source),
                    "target": profile_json(&m.target),
                    "cone": profile_json(&m.cone),
                }),
            )
            .with("K", fmt_subset(k))
            .with("r", r)])
        })
    })
}

fn elementary_records(s: &Setup) -> Outcome {
    let orbit = s.orbit();
    let items: Vec<(Subset, Vec<i64>)> =
        s.ks().into_iter().flat_map(|k| support_box(orbit, k).into_iter().map(move |m| (k, m))).collect();
    collect(&items, |(k, m)| {
        guard("elementary", || {
            let got = elementary(&s.ctx, *k, m)?.profile()?;
            let (deg, dim) = elementary_cohomology_expected(&s.ctx, *k, m);
            let ok = if dim == 0 { got.is_acyclic() } else { got.concentrated() == Some((deg, dim)) };
            let has_one = m.contains(&1);
            let mv: Vec<String> = m.iter().map(i64::to_string).collect();
            Ok(vec![Record::new(
                "elementary",
                ok && (!has_one || got.is_acyclic()),
                json!({
                    "summary": format!("{}, predicted degree {deg} dim {dim}", profile_text(&got)),
                    "profile": profile_json(&got),
                    "expected": [deg, dim],
                }),
            )
            .with("K", fmt_subset(*k))
            .with("m", format!("({})", mv.join(",")))])
        })
    })
}

fn ic_records(s: &Setup) -> Outcome {
    guard("ic", || {
        let rep = kk_check(s.orbit())?;
        Ok(vec![Record::new(
            "ic",
            rep.passed(),
            json!({
                "summary": format!("W_-1 {}; IC {}", profile_text(&rep.w_minus1), profile_text(&rep.ic)),
                "w_minus1": profile_json(&rep.w_minus1),
                "ic": profile_json(&rep.ic),
                "w_zero": profile_json(&rep.w_zero),
            }),
        )])
    })
}

fn with_psi<'a>(s: &'a Setup<'a>, f: impl Fn(&PsiComplex) -> weightlab_core::Result<Vec<Record>>) -> Outcome {
    let modes = match s.params.mode {
        Some(m) => vec![m],
        None => vec![PsiMode::Cokernel, PsiMode::Kernel],
    };
    let mut out = Vec::new();
    for mode in modes {
        let psi = PsiComplex::build(&s.ctx, &s.mults, mode, None).map_err(CliError::from)?;
        let mode_name = match mode {
            PsiMode::Cokernel => "cokernel",
            PsiMode::Kernel => "kernel",
        };
        let recs = guard("psi", || f(&psi))?;
        out.extend(recs.into_iter().map(|r| r.with("mode", mode_name)));
    }
    Ok(out)
}

fn psi_build_records(s: &Setup) -> Outcome {
    with_psi(s, |psi| {
        let mut out = Vec::new();
        let (a, b) = psi.stabilization()?;
        out.push(Record::new(
            "psi_stabilization",
            a == b,
            json!({
                "summary": format!("p_max {}: {}", psi.p_max(), profile_text(&a)),
                "p_max": psi.p_max(),
                "i0": psi.i0(),
                "profile": profile_json(&a),
                "next": profile_json(&b),
            }),
        ));
        let nil = psi.nu_power(psi.p_max() + 1)?;
        out.push(Record::new(
            "psi_nu_nilpotent",
            nil.induced_ranks.values().all(|&r| r == 0),
            json!({ "summary": format!("nu^{} induces zero", psi.p_max() + 1) }),
        ));
        for r in s.rs() {
            let window = psi.window_check(r)?;
            out.push(Record::new("psi_window", window, json!({})).with("r", r));
            let d = psi_decomposition_check(psi, r)?;
            let parts: BTreeMap<String, Value> = d.parts.iter().map(|(k, p)| (fmt_subset(*k), profile_json(p))).collect();
            out.push(
                Record::new(
                    "psi_decomposition",
                    d.passed(),
                    json!({ "summary": format!("Gr {}", profile_text(&d.graded)), "graded": profile_json(&d.graded), "parts": parts }),
                )
                .with("r", r),
            );
        }
        for (r, (got, want)) in ker_coker_bridge_check(psi)? {
            out.push(
                Record::new(
                    "psi_bridge",
                    got == want,
                    json!({ "summary": format!("{} vs {}", profile_text(&got), profile_text(&want)), "computed": profile_json(&got), "expected": profile_json(&want) }),
                )
                .with("r", r),
            );
        }
        Ok(out)
    })
}

fn psi_monodromy_records(s: &Setup) -> Outcome {
    with_psi(s, |psi| {
        let rep = monodromy_weight_check(psi)?;
        let witnesses: BTreeMap<String, Value> = rep
            .bijections
            .iter()
            .map(|(r, (dim, rank, ok))| (r.to_string(), json!({ "dim": dim, "rank": rank, "bijective": ok })))
            .collect();
        let text: Vec<String> = rep.bijections.iter().map(|(r, (d, k, _))| format!("r={r} rank {k}/{d}")).collect();
        Ok(vec![Record::new(
            "psi_monodromy",
            rep.passed(),
            json!({
                "summary": text.join(", "),
                "nu_chain_map": rep.nu_is_chain_map,
                "lowers_weight": rep.lowers_weight,
                "symmetric": rep.symmetric,
                "bijections": witnesses,
            }),
        )])
    })
}

fn psi_acyclic_records(s: &Setup) -> Outcome {
    let items: Vec<(Subset, i64)> =
        s.ks().into_iter().flat_map(|k| (1..=s.i0.max(1)).map(move |i| (k, i))).collect();
    collect(&items, |&(k, i)| {
        guard("psi_acyclic", || {
            let p = a_complex(&s.ctx, k, i, &s.mults)?.profile()?;
            Ok(vec![Record::new("psi_acyclic", p.is_acyclic(), json!({ "summary": profile_text(&p) }))
                .with("K", fmt_subset(k))
                .with("i", i)])
        })
    })
}

/// Runs `command` on a parsed orbit.
pub fn run_command(command: Command, orbit: &NilpotentOrbit, spec_mults: Option<&[i64]>, params: &Params) -> Outcome {
    let s = Setup::new(orbit, params, spec_mults)?;
    match command {
        Command::Weight => weight_records(&s),
        Command::KeyLemma => keylemma_records(&s),
        Command::Omega => omega_records(&s),
        Command::Graded => graded_records(&s),
        Command::Purity => purity_records(&s),
        Command::Decompose => {
            let mut out = graded_records(&s)?;
            out.extend(embedding_records(&s)?);
            out.extend(elementary_records(&s)?);
            Ok(out)
        }
        Command::Ic => ic_records(&s),
        Command::PsiBuild => psi_build_records(&s),
        Command::PsiMonodromy => psi_monodromy_records(&s),
        Command::PsiAcyclic => psi_acyclic_records(&s),
        Command::All => {
            let mut out = Vec::new();
            for c in [
                Command::Weight,
                Command::KeyLemma,
                Command::Omega,
                Command::Purity,
                Command::Decompose,
                Command::Ic,
                Command::PsiBuild,
                Command::PsiMonodromy,
                Command::PsiAcyclic,
            ] {
                out.extend(run_command(c, orbit, spec_mults, params)?);
            }
            Ok(out)
        }
    }
}
