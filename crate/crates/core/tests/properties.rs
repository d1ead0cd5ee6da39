use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use weightlab_core::complexes::{koszul, omega_weight, OmegaContext};
use weightlab_core::orbit::{gen_jordan, gen_sl2_tensor, monodromy_log, random_invertible, random_nilpotent, unipotent_exp};
use weightlab_core::qlinalg::{kernel, image, Matrix, Rat, Subspace, Vector};
use weightlab_core::weightcore::{verify_relative, verify_weight_axioms, weight_filtration, weight_from_jordan_basis};

fn small_vectors(n: usize, k: usize) -> impl Strategy<Value = Vec<Vector>> {
    prop::collection::vec(prop::collection::vec((-3i64..=3).prop_map(Rat::int), n), 0..=k)
}

fn small_matrix(r: usize, c: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop::collection::vec((-3i64..=3).prop_map(Rat::int), c), r)
        .prop_map(|rows| Matrix::from_rows(rows).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn modular_dimension_formula(a in small_vectors(5, 4), b in small_vectors(5, 4)) {
        let a = Subspace::span(&a, 5);
        let b = Subspace::span(&b, 5);
        prop_assert_eq!(a.plus(&b).dim() + a.meet(&b).dim(), a.dim() + b.dim());
        prop_assert!(a.meet(&b).is_subspace_of(&a));
        prop_assert!(a.is_subspace_of(&a.plus(&b)));
    }

    #[test]
    fn canonical_form_ignores_generators(a in small_vectors(4, 4), seed in any::<u64>()) {
        let s = Subspace::span(&a, 4);
        let g = random_invertible(s.dim().max(1), &mut ChaCha8Rng::seed_from_u64(seed));
        // recombine the basis by an invertible matrix
        let basis = s.basis();
        let mixed: Vec<Vector> = (0..basis.len())
            .map(|i| {
                let mut v = vec![Rat::int(0); 4];
                for (j, b) in basis.iter().enumerate() {
                    for (x, y) in v.iter_mut().zip(b) {
                        *x += &(g.get(i, j) * y);
                    }
                }
                v
            })
            .collect();
        prop_assert_eq!(Subspace::span(&mixed, 4), s);
    }

    #[test]
    fn rank_nullity(m in small_matrix(4, 6)) {
        prop_assert_eq!(kernel(&m).dim() + image(&m).dim(), 6);
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn weight_matches_jordan_basis(dim in 1usize..=9, seed in any::<u64>()) {
        let (n, sizes, g) = random_nilpotent(dim, &mut ChaCha8Rng::seed_from_u64(seed));
        let w = weight_filtration(&n).unwrap();
        prop_assert!(verify_weight_axioms(&n, &w).holds);
        prop_assert_eq!(w, weight_from_jordan_basis(&sizes, &g));
    }

    #[test]
    fn weight_is_conjugation_equivariant(dim in 1usize..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, _, _) = random_nilpotent(dim, &mut rng);
        let g = random_invertible(dim, &mut rng);
        let gi = g.inverse().unwrap();
        let conj = g.compose(&n.compose(&gi));
        prop_assert_eq!(weight_filtration(&conj).unwrap(), weight_filtration(&n).unwrap().transform(&g));
    }

    #[test]
    fn log_inverts_exp(dim in 1usize..=7, seed in any::<u64>()) {
        let (n, _, _) = random_nilpotent(dim, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(monodromy_log(&unipotent_exp(&n).unwrap()).unwrap(), n);
    }

    #[test]
    fn cone_weight_independent_of_coefficients(l1 in 1i64..=6, l2 in 1i64..=6, m1 in 1i64..=6, m2 in 1i64..=6) {
        let o = gen_sl2_tensor(&[2, 3]).unwrap();
        let comb = |a: i64, b: i64| &o.nilpotent(0).scale(&Rat::int(a)) + &o.nilpotent(1).scale(&Rat::int(b));
        let w1 = weight_filtration(&comb(l1, l2)).unwrap();
        prop_assert_eq!(&w1, &weight_filtration(&comb(m1, m2)).unwrap());
        let cached = o.w(0b11);
        prop_assert_eq!(&w1, cached.as_ref());
    }
}

#[test]
fn relative_weight_of_tensor_factors() {
    let o = gen_sl2_tensor(&[2, 2, 3]).unwrap();
    for j in [0b011u32, 0b101, 0b111] {
        for i in 0..3 {
            if j & (1 << i) == 0 {
                continue;
            }
            // W^J is the relative weight filtration of N_i with respect to W^{J−i}
            let base = o.w(j & !(1 << i));
            assert!(verify_relative(o.nilpotent(i), &base, &o.w(j)).unwrap(), "J={j} i={i}");
        }
    }
}

fn euler_of_terms(dims: &std::collections::BTreeMap<i64, usize>) -> i64 {
    dims.iter().map(|(k, d)| if k % 2 == 0 { *d as i64 } else { -(*d as i64) }).sum()
}

#[test]
fn complexes_square_to_zero_and_preserve_euler() {
    for o in [gen_jordan(&[3, 2]).unwrap(), gen_sl2_tensor(&[2, 2, 2]).unwrap()] {
        let ctx = OmegaContext::new(&o);
        let full = koszul(&o, o.index_set()).assemble().unwrap();
        assert_eq!(euler_of_terms(full.dims()), full.profile().euler());
        let mut prev: Option<std::collections::BTreeMap<i64, usize>> = None;
        for r in -4..=4 {
            // assembly checks d² = 0 and that every edge respects the subspaces
            let a = omega_weight(&ctx, r).unwrap().assemble().unwrap();
            assert_eq!(euler_of_terms(a.dims()), a.profile().euler());
            if let Some(p) = &prev {
                assert!(p.iter().all(|(k, d)| a.dim(*k) >= *d), "𝒲 increases with r");
            }
            prev = Some(a.dims().clone());
        }
    }
}
