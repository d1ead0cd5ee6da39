use weightlab_core::complexes::{graded_weight, CohomologyProfile, OmegaContext};
use weightlab_core::orbit::{gen_jordan, gen_sl2_tensor, NilpotentOrbit};
use weightlab_core::psi::*;
use weightlab_core::qlinalg::Matrix;
use weightlab_core::scat::subsets_of;

fn trivial(n: usize) -> NilpotentOrbit {
    NilpotentOrbit::new(1, vec![Matrix::zeros(1, 1); n], 0).unwrap()
}

fn shape(p: &CohomologyProfile) -> Vec<usize> {
    match (p.dims.keys().next(), p.dims.keys().next_back()) {
        (Some(&lo), Some(&hi)) => (lo..=hi).map(|k| p.get(k)).collect(),
        _ => Vec::new(),
    }
}

#[test]
fn milnor_fibers_of_monomials() {
    for mode in [PsiMode::Cokernel, PsiMode::Kernel] {
        let o = trivial(1);
        let ctx = OmegaContext::new(&o);
        let psi = PsiComplex::build(&ctx, &[1], mode, None).unwrap();
        assert_eq!(shape(&psi.total_profile().unwrap()), vec![1]);

        let o = trivial(2);
        let ctx = OmegaContext::new(&o);
        let psi = PsiComplex::build(&ctx, &[1, 1], mode, None).unwrap();
        assert_eq!(shape(&psi.total_profile().unwrap()), vec![1, 1]);
        let (a, b) = psi.stabilization().unwrap();
        assert_eq!(a, b);
        // ν acts by zero on the cohomology of a torus fiber
        let nu = psi.nu_power(1).unwrap();
        assert!(nu.induced_ranks.values().all(|&r| r == 0), "{:?}", nu.induced_ranks);

        let o = trivial(3);
        let ctx = OmegaContext::new(&o);
        let psi = PsiComplex::build(&ctx, &[1, 1, 1], mode, None).unwrap();
        assert_eq!(shape(&psi.total_profile().unwrap()), vec![1, 2, 1]);
    }
}

#[test]
fn jordan_two_nearby_cycles() {
    let o = gen_jordan(&[2]).unwrap();
    let ctx = OmegaContext::new(&o);
    for mode in [PsiMode::Cokernel, PsiMode::Kernel] {
        let psi = PsiComplex::build(&ctx, &[1], mode, None).unwrap();
        assert!(psi.p_max() >= psi.i0());
        assert_eq!(psi.total_profile().unwrap().concentrated().map(|c| c.1), Some(2));
        let nu = psi.nu_power(1).unwrap();
        assert_eq!(nu.induced_ranks.values().sum::<usize>(), 1);
        assert!(psi.nu_power(psi.p_max() + 1).unwrap().induced_ranks.values().all(|&r| r == 0));
        let m = monodromy_weight_check(&psi).unwrap();
        assert!(m.passed(), "{m:?}");
        assert_eq!(m.bijections[&1].0, 1);
        for r in -psi.i0() - 2..=psi.i0() + 2 {
            assert!(psi.window_check(r).unwrap(), "window r={r}");
            let d = psi_decomposition_check(&psi, r).unwrap();
            assert!(d.passed(), "{d:?}");
            if r.abs() > psi.i0() {
                assert!(d.graded.is_acyclic());
            }
        }
        for (r, (got, want)) in ker_coker_bridge_check(&psi).unwrap() {
            assert_eq!(got, want, "bridge r={r} {mode:?}");
        }
    }
}

#[test]
fn tensor_orbits_nearby_cycles() {
    let o = gen_sl2_tensor(&[2, 2]).unwrap();
    let ctx = OmegaContext::new(&o);
    for mode in [PsiMode::Cokernel, PsiMode::Kernel] {
        let psi = PsiComplex::build(&ctx, &[1, 1], mode, None).unwrap();
        let m = monodromy_weight_check(&psi).unwrap();
        assert!(m.passed(), "{m:?}");
        for r in -psi.i0() - 1..=psi.i0() + 1 {
            assert!(psi.window_check(r).unwrap());
            assert!(psi_decomposition_check(&psi, r).unwrap().passed());
        }
        for (r, (got, want)) in ker_coker_bridge_check(&psi).unwrap() {
            assert_eq!(got, want, "bridge r={r} {mode:?}");
        }
    }
    let o = gen_sl2_tensor(&[2, 3]).unwrap();
    let ctx = OmegaContext::new(&o);
    let psi = PsiComplex::build(&ctx, &[1, 2], PsiMode::Cokernel, None).unwrap();
    assert!(monodromy_weight_check(&psi).unwrap().passed());
}

#[test]
fn basic_lemma_acyclicity() {
    for o in [gen_jordan(&[3]).unwrap(), gen_sl2_tensor(&[2, 2]).unwrap()] {
        let ctx = OmegaContext::new(&o);
        let i0 = ctx.support_radius().unwrap();
        let mults = vec![1; o.n_indices()];
        for k in subsets_of(o.index_set()).into_iter().filter(|&k| k != 0) {
            for i in 1..=i0 + 1 {
                let a = a_complex(&ctx, k, i, &mults).unwrap();
                assert!(a.profile().unwrap().is_acyclic(), "K={k} i={i}");
            }
        }
    }
    let o = gen_jordan(&[2]).unwrap();
    let ctx = OmegaContext::new(&o);
    assert!(a_complex(&ctx, 1, 0, &[1]).is_err());
}

#[test]
fn primitive_parts_and_gamma() {
    let t = gen_sl2_tensor(&[2, 3]).unwrap();
    for m1 in 2..=4 {
        for m2 in 2..=5 {
            let p = primitive_part(&t, 0b11, &[m1, m2]).unwrap();
            assert!(gamma_check(&t, 0b11, &[m1, m2]).unwrap(), "m=({m1},{m2}) dim {}", p.dim());
        }
    }
    assert!(primitive_part(&t, 0b11, &[1, 3]).is_err());
}

#[test]
fn top_graded_piece_is_the_top_of_omega() {
    for o in [gen_jordan(&[2]).unwrap(), gen_sl2_tensor(&[2, 2]).unwrap()] {
        let ctx = OmegaContext::new(&o);
        let mults = vec![1; o.n_indices()];
        let psi = PsiComplex::build(&ctx, &mults, PsiMode::Cokernel, None).unwrap();
        let i0 = psi.i0();
        let top = psi.graded(i0 - 1).unwrap().profile().unwrap();
        assert_eq!(top, graded_weight(&ctx, i0).unwrap().profile().unwrap());
        assert!(!top.is_acyclic());
    }
}
