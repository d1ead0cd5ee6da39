//! Browser bindings: three small computations that return JSON strings.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;
use weightlab_core::complexes::{decomposition_check, CohomologyProfile, OmegaContext};
use weightlab_core::orbit::{gen_jordan, gen_sl2_tensor, NilpotentOrbit};
use weightlab_core::psi::{monodromy_weight_check, PsiComplex, PsiMode};
use weightlab_core::qlinalg::{kernel, Matrix, Rat};
use weightlab_core::scat::fmt_subset;
use weightlab_core::weightcore::weight_filtration;

/// Keeps the page responsive.
const MAX_DIM: usize = 12;

fn profile(p: &CohomologyProfile) -> Value {
    Value::Array(p.dims.iter().map(|(k, d)| json!([k, d])).collect())
}

fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>, String> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().map_err(|_| format!("cannot parse {:?}", s.trim())))
        .collect()
}

fn orbit(family: &str, sizes: &str) -> Result<NilpotentOrbit, String> {
    let sizes: Vec<usize> = parse_list(sizes)?;
    let o = match family {
        "jordan" => gen_jordan(&sizes),
        "tensor" => gen_sl2_tensor(&sizes),
        _ => return Err(format!("unknown family {family:?}")),
    }
    .map_err(|e| e.to_string())?;
    if o.dim() > MAX_DIM {
        return Err(format!("dimension {} is above the demo limit {MAX_DIM}", o.dim()));
    }
    Ok(o)
}

/// Parses rows separated by newlines or `;`, entries by spaces or commas.
pub fn parse_matrix(text: &str) -> Result<Matrix, String> {
    let rows = text
        .split(['\n', ';'])
        .filter(|r| !r.trim().is_empty())
        .map(|r| {
            r.split([' ', ',', '\t'])
                .filter(|e| !e.is_empty())
                .map(|e| e.parse::<Rat>().map_err(|err| err.to_string()))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let m = Matrix::from_rows(rows).map_err(|e| e.to_string())?;
    if !m.is_square() || m.rows() == 0 || m.rows() > MAX_DIM {
        return Err(format!("need a square matrix of size 1..={MAX_DIM}"));
    }
    Ok(m)
}

/// Weight filtration of one nilpotent matrix: graded dimensions and Jordan type.
pub fn weight_json(matrix: &str) -> Result<String, String> {
    let n = parse_matrix(matrix)?;
    let w = weight_filtration(&n).map_err(|e| e.to_string())?;
    // blocks of size ≥ k number dim ker N^k − dim ker N^{k−1}
    let dim = n.rows();
    let kers: Vec<usize> = (0..=dim as u32).map(|k| kernel(&n.pow(k)).dim()).collect();
    let mut blocks = Vec::new();
    for k in 1..=dim {
        let at_least = kers[k] - kers[k - 1];
        let above = if k < dim { kers[k + 1] - kers[k] } else { 0 };
        blocks.extend(std::iter::repeat_n(k, at_least - above));
    }
    blocks.reverse();
    let graded: Vec<Value> = w.graded_dims().into_iter().map(|(k, d)| json!([k, d])).collect();
    Ok(json!({ "graded": graded, "jordan": blocks }).to_string())
}

/// `Gr_r` of the logarithmic complex across its window, with the per-K parts.
pub fn graded_json(family: &str, sizes: &str) -> Result<String, String> {
    let o = orbit(family, sizes)?;
    let ctx = OmegaContext::new(&o);
    let i0 = ctx.support_radius().map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    for r in -i0 - 1..=i0 + 1 {
        let rep = decomposition_check(&ctx, r).map_err(|e| e.to_string())?;
        let parts: serde_json::Map<String, Value> =
            rep.parts.iter().map(|(k, p)| (fmt_subset(*k), profile(p))).collect();
        rows.push(json!({ "r": r, "graded": profile(&rep.graded), "parts": parts, "passed": rep.passed() }));
    }
    Ok(json!({ "dim": o.dim(), "i0": i0, "rows": rows }).to_string())
}

/// Total cohomology of the nearby-cycles model and the monodromy ranks.
pub fn psi_json(family: &str, sizes: &str, multiplicities: &str, mode: &str) -> Result<String, String> {
    let o = orbit(family, sizes)?;
    let mults: Vec<i64> = if multiplicities.trim().is_empty() {
        vec![1; o.n_indices()]
    } else {
        parse_list(multiplicities)?
    };
    let mode: PsiMode = mode.parse().map_err(|e: weightlab_core::Error| e.to_string())?;
    let ctx = OmegaContext::new(&o);
    let psi = PsiComplex::build(&ctx, &mults, mode, None).map_err(|e| e.to_string())?;
    let total = psi.total_profile().map_err(|e| e.to_string())?;
    let mono = monodromy_weight_check(&psi).map_err(|e| e.to_string())?;
    let ranks: Vec<Value> = mono.bijections.iter().map(|(r, (d, k, ok))| json!({ "r": r, "dim": d, "rank": k, "bijective": ok })).collect();
    Ok(json!({ "p_max": psi.p_max(), "total": profile(&total), "monodromy": ranks, "passed": mono.passed() }).to_string())
}

#[wasm_bindgen]
pub fn weight(matrix: &str) -> Result<String, JsError> {
    weight_json(matrix).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn graded(family: &str, sizes: &str) -> Result<String, JsError> {
    graded_json(family, sizes).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn psi(family: &str, sizes: &str, multiplicities: &str, mode: &str) -> Result<String, JsError> {
    psi_json(family, sizes, multiplicities, mode).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jordan_type_and_weights() {
        let v: Value = serde_json::from_str(&weight_json("0 1 0; 0 0 1; 0 0 0").unwrap()).unwrap();
        assert_eq!(v["jordan"], json!([3]));
        assert_eq!(v["graded"], json!([[-2, 1], [0, 1], [2, 1]]));
        let v: Value = serde_json::from_str(&weight_json("0 1 0\n0 0 0\n0 0 0").unwrap()).unwrap();
        assert_eq!(v["jordan"], json!([2, 1]));
        assert!(weight_json("1 0; 0 1").is_err());
        assert!(weight_json("1 2 3").is_err());
    }

    #[test]
    fn graded_rows_pass() {
        let v: Value = serde_json::from_str(&graded_json("tensor", "2,2").unwrap()).unwrap();
        assert!(v["rows"].as_array().unwrap().iter().all(|r| r["passed"] == json!(true)));
        assert!(graded_json("tensor", "3,3,3").is_err());
    }

    #[test]
    fn psi_of_jordan_two() {
        let v: Value = serde_json::from_str(&psi_json("jordan", "2", "", "cokernel").unwrap()).unwrap();
        assert_eq!(v["passed"], json!(true));
        assert_eq!(v["monodromy"][0]["rank"], json!(1));
    }
}
