//! The orbit-spec document: a JSON object with exact rationals written as
//! strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use weightlab_core::orbit::{validate, NilpotentOrbit};
use weightlab_core::qlinalg::{Direction, IncFiltration, Matrix, Rat, Subspace, Vector};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSpec {
    pub dim: usize,
    pub nilpotents: Vec<Vec<Vec<String>>>,
    pub weight: i64,
    /// `F^p` as spanning vectors, keyed by `p`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hodge: Option<BTreeMap<i64, Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<i64>>,
}

/// A parsed and validated spec.
#[derive(Debug)]
pub struct Parsed {
    pub orbit: NilpotentOrbit,
    pub multiplicities: Option<Vec<i64>>,
}

fn parse_vector(v: &[String], dim: usize, at: &str) -> Result<Vector, CliError> {
    if v.len() != dim {
        return Err(CliError::Input(format!("{at}: expected {dim} entries, found {}", v.len())));
    }
    v.iter()
        .enumerate()
        .map(|(j, s)| s.parse::<Rat>().map_err(|e| CliError::Input(format!("{at}[{j}]: {e}"))))
        .collect()
}

fn parse_matrix(rows: &[Vec<String>], dim: usize, at: &str) -> Result<Matrix, CliError> {
    if rows.len() != dim {
        return Err(CliError::Input(format!("{at}: expected {dim} rows, found {}", rows.len())));
    }
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, r)| parse_vector(r, dim, &format!("{at}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Matrix::from_rows(rows).map_err(|e| CliError::Input(format!("{at}: {e}")))
}

fn print_vector(v: &[Rat]) -> Vec<String> {
    v.iter().map(Rat::to_string).collect()
}

fn print_matrix(m: &Matrix) -> Vec<Vec<String>> {
    m.row_vectors().iter().map(|r| print_vector(r)).collect()
}

impl OrbitSpec {
    pub fn from_json(text: &str) -> Result<OrbitSpec, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("orbit spec: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("specs serialize")
    }

    /// Builds the orbit and runs every validation; all violations are listed.
    pub fn parse(&self) -> Result<Parsed, CliError> {
        let dim = self.dim;
        let ns = self
            .nilpotents
            .iter()
            .enumerate()
            .map(|(i, m)| parse_matrix(m, dim, &format!("nilpotents[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let mut orbit = NilpotentOrbit::new(dim, ns, self.weight).map_err(CliError::from)?;
        if let Some(h) = &self.hodge {
            let mut f = IncFiltration::new(dim, Direction::Decreasing);
            let mut prev: Option<(i64, Subspace)> = None;
            for (p, vs) in h.iter().rev() {
                let vs = vs
                    .iter()
                    .enumerate()
                    .map(|(j, v)| parse_vector(v, dim, &format!("hodge[{p}][{j}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                let s = Subspace::span(&vs, dim);
                if let Some((q, above)) = &prev {
                    if !above.is_subspace_of(&s) {
                        return Err(CliError::Input(format!("hodge: F^{q} is not contained in F^{p}")));
                    }
                }
                f.insert(*p, s.clone());
                prev = Some((*p, s));
            }
            orbit = orbit.with_hodge(f).map_err(CliError::from)?;
        }
        if let Some(p) = &self.pairing {
            orbit = orbit.with_pairing(parse_matrix(p, dim, "pairing")?).map_err(CliError::from)?;
        }
        if let Some(m) = &self.multiplicities {
            if m.len() != orbit.n_indices() || m.iter().any(|&x| x < 1) {
                return Err(CliError::Input(format!(
                    "multiplicities: expected {} positive integers",
                    orbit.n_indices()
                )));
            }
        }
        let report = validate(&orbit);
        if !report.passed() {
            return Err(CliError::Input(format!("invalid orbit: {}", report.failures().join("; "))));
        }
        Ok(Parsed { orbit, multiplicities: self.multiplicities.clone() })
    }

    pub fn from_orbit(orbit: &NilpotentOrbit, multiplicities: Option<Vec<i64>>) -> OrbitSpec {
        OrbitSpec {
            dim: orbit.dim(),
            nilpotents: orbit.nilpotents().iter().map(print_matrix).collect(),
            weight: orbit.weight(),
            hodge: orbit.hodge().map(|f| {
                f.jumps().iter().map(|(p, s)| (*p, s.basis().iter().map(|v| print_vector(v)).collect())).collect()
            }),
            pairing: orbit.pairing().map(print_matrix),
            multiplicities,
        }
    }

    /// SHA-256 of the canonical form of the parsed spec.
    pub fn digest(parsed: &Parsed) -> String {
        let canonical = OrbitSpec::from_orbit(&parsed.orbit, parsed.multiplicities.clone());
        let bytes = serde_json::to_vec(&canonical).expect("specs serialize");
        hex::encode(Sha256::digest(&bytes))
    }
}

pub fn load(path: &std::path::Path) -> Result<Parsed, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    OrbitSpec::from_json(&text)?.parse()
}
