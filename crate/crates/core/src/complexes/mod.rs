//! Cochain complexes built from a nilpotent orbit and the checks of the
//! purity, decomposition and intersection-complex statements.

mod ccomplex;
mod engine;
mod omega;

pub use ccomplex::{
    basic_lemma_check, c_complex, c_complex_on, coker_graded, decomposition_check, elementary,
    elementary_cohomology_expected, elementary_decomposition_check, embed_t_complex, iterated, purity_check,
    support_box, t_set, w_minus1_fiber_check, DecompositionReport, FiberReport, PurityReport,
};
pub use engine::{
    Assembled, ChainMap, CohomologyProfile, Edge, MapCheck, MapRef, Term, TermComplex, TermLabel,
};
pub use omega::{
    a_index, graded_weight, hodge_numbers, ic_complex, kk_check, koszul, mhc_shift_check, omega_hodge, omega_star,
    omega_weight, weight_bound, KkReport, OmegaContext,
};
