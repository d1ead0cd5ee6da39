//! Corpus generation and the `sweep` command.

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use weightlab_core::orbit::{gen_conjugated, gen_jordan, gen_sl2_tensor, NilpotentOrbit};

use crate::commands::{run_command, Command, Params};
use crate::report::{Record, Report};
use crate::spec::{OrbitSpec, Parsed};
use crate::CliError;

/// Largest orbit dimension a sweep accepts.
pub const MAX_SWEEP_DIM: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Jordan,
    Tensor,
}

impl std::str::FromStr for Family {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Family, CliError> {
        match s {
            "jordan" => Ok(Family::Jordan),
            "tensor" => Ok(Family::Tensor),
            _ => Err(CliError::Input(format!("unknown family {s:?}, expected jordan or tensor"))),
        }
    }
}

/// Builds a corpus orbit, conjugated by a seeded basis change when `seed` is set.
pub fn generate(family: Family, sizes: &[usize], seed: Option<u64>) -> Result<NilpotentOrbit, CliError> {
    let o = match family {
        Family::Jordan => gen_jordan(sizes)?,
        Family::Tensor => gen_sl2_tensor(sizes)?,
    };
    Ok(match seed {
        Some(s) => gen_conjugated(&o, s)?,
        None => o,
    })
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub orbit: NilpotentOrbit,
    pub multiplicities: Option<Vec<i64>>,
}

/// The standard corpus: Jordan types, sl₂ tensor products and scrambled copies.
pub fn corpus(seed: u64) -> Result<Vec<CorpusEntry>, CliError> {
    let mut out = Vec::new();
    let mut push = |family: Family, sizes: &[usize], conj: Option<u64>, mults: Option<Vec<i64>>| -> Result<(), CliError> {
        let kind = match family {
            Family::Jordan => "jordan",
            Family::Tensor => "tensor",
        };
        let s: Vec<String> = sizes.iter().map(usize::to_string).collect();
        let mut name = format!("{kind}[{}]", s.join(","));
        if conj.is_some() {
            name.push_str("~conj");
        }
        if let Some(m) = &mults {
            let m: Vec<String> = m.iter().map(i64::to_string).collect();
            name.push_str(&format!("*n({})", m.join(",")));
        }
        out.push(CorpusEntry { name, orbit: generate(family, sizes, conj)?, multiplicities: mults });
        Ok(())
    };
    push(Family::Jordan, &[2], None, None)?;
    push(Family::Jordan, &[3], None, None)?;
    push(Family::Jordan, &[2, 1], None, None)?;
    push(Family::Jordan, &[3, 2], Some(seed), None)?;
    push(Family::Tensor, &[2, 2], None, None)?;
    push(Family::Tensor, &[2, 3], None, Some(vec![1, 2]))?;
    push(Family::Tensor, &[2, 2], Some(seed.wrapping_add(1)), None)?;
    push(Family::Tensor, &[2, 2, 2], None, None)?;
    Ok(out)
}

fn corrupt_params(params: &Params, index: usize) -> Params {
    let mut p = params.clone();
    // the test hook only damages the first orbit
    p.corrupt_filtration = params.corrupt_filtration && index == 0;
    p
}

/// Runs `all` over the corpus. Records carry the orbit name as a parameter.
pub fn sweep(entries: &[CorpusEntry], params: &Params) -> Result<Report, CliError> {
    if let Some(e) = entries.iter().find(|e| e.orbit.dim() > MAX_SWEEP_DIM) {
        return Err(CliError::Resource(format!("{} has dimension {} > {MAX_SWEEP_DIM}", e.name, e.orbit.dim())));
    }
    let runs: Vec<Result<Vec<Record>, CliError>> = entries
        .par_iter()
        .enumerate()
        .map(|(i, e)| {
            let recs = run_command(Command::All, &e.orbit, e.multiplicities.as_deref(), &corrupt_params(params, i))?;
            Ok(recs.into_iter().map(|r| r.with("orbit", &e.name)).collect())
        })
        .collect();
    let mut records = Vec::new();
    let mut hasher = Sha256::new();
    hasher.update(params.seed.to_le_bytes());
    for (e, run) in entries.iter().zip(runs) {
        records.extend(run?);
        let parsed = Parsed { orbit: e.orbit.clone(), multiplicities: e.multiplicities.clone() };
        hasher.update(OrbitSpec::digest(&parsed).as_bytes());
    }
    Ok(Report::new("sweep", hex::encode(hasher.finalize()), records))
}
