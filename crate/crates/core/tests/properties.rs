use amensweep_core::chains::{alt, boundary, is_alternating, Chain};
use amensweep_core::cover::{multiplicity, multiplicity_brute_force, Cover, CoverMember};
use amensweep_core::diffusion::{convolve, diffuse};
use amensweep_core::models::circle::{canonicalize, circle_generators, lifts_id, parse_id, LiftMap};
use amensweep_core::models::random::{random_chain, random_measure, random_multicomplex};
use amensweep_core::models::synthetic::gen_synthetic;
use amensweep_core::multicomplex::Multicomplex;
use amensweep_core::rational::{parse_q, q};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn complex(seed: u64) -> (ChaCha8Rng, Multicomplex) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = random_multicomplex(&mut rng, 30, 3).unwrap();
    (rng, k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rationals_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let x = q(n, d);
        prop_assert_eq!(parse_q(&x.to_string()).unwrap(), x);
    }

    #[test]
    fn boundary_squares_to_zero(seed in any::<u64>()) {
        let (mut rng, k) = complex(seed);
        for d in 2..=k.max_dim().unwrap_or(0) {
            let c = random_chain(&mut rng, &k, d, 5);
            prop_assert!(boundary(&k, &boundary(&k, &c).unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn alt_is_a_norm_contracting_projection(seed in any::<u64>()) {
        let (mut rng, k) = complex(seed);
        for d in 0..=k.max_dim().unwrap_or(0) {
            let c = random_chain(&mut rng, &k, d, 5);
            let a = alt(&c);
            prop_assert!(is_alternating(&a));
            prop_assert_eq!(alt(&a), a.clone());
            prop_assert!(a.l1_norm() <= c.l1_norm());
        }
    }

    #[test]
    fn diffusion_contracts_and_composes(seed in any::<u64>(), which in 0u64..6) {
        let inst = gen_synthetic(which, 3).unwrap();
        let (k, g) = (&inst.complex, &inst.action);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_chain(&mut rng, k, 1, 5);
        let (m1, m2) = (random_measure(&mut rng, g), random_measure(&mut rng, g));
        let once = diffuse(k, g, &m2, &c).unwrap();
        prop_assert!(once.l1_norm() <= c.l1_norm());
        let both = diffuse(k, g, &convolve(g, &m1, &m2).unwrap(), &c).unwrap();
        prop_assert_eq!(both, diffuse(k, g, &m1, &once).unwrap());
    }

    #[test]
    fn multiplicity_matches_brute_force(masks in proptest::collection::vec(1u8..=255, 1..=10)) {
        let members = masks
            .iter()
            .enumerate()
            .map(|(i, m)| CoverMember {
                id: format!("U{i}"),
                vertices: (0..8).filter(|b| m & (1 << b) != 0).map(|b| format!("v{b}")).collect(),
                amenable: true,
            })
            .collect();
        let c = Cover { members };
        prop_assert_eq!(multiplicity(&c).unwrap(), multiplicity_brute_force(&c).unwrap());
    }

    #[test]
    fn lift_ids_are_shift_invariant(xs in proptest::collection::vec(-50i64..50, 1..=3), shift in -20i64..20) {
        let m = 3;
        if let Some(c) = canonicalize(&xs, m) {
            let moved: Vec<i64> = xs.iter().map(|x| x + shift * m as i64).collect();
            prop_assert_eq!(canonicalize(&moved, m).unwrap(), c.clone());
            prop_assert_eq!(parse_id(&lifts_id(&c, m), m).unwrap(), c);
        }
    }

    #[test]
    fn lift_maps_invert(e in -40i64..40, which in 0usize..9) {
        let (_, phi) = circle_generators(3).swap_remove(which);
        let p = phi.pow(e);
        prop_assert!(p.compose(&p.inverse()).is_identity());
        prop_assert_eq!(p.compose(&phi), phi.pow(e + 1));
        prop_assert!(LiftMap::identity(3).compose(&p) == p);
    }
}

#[test]
fn zero_chain_is_a_cycle() {
    let (_, k) = complex(0);
    assert!(boundary(&k, &Chain::zero(1)).unwrap().is_zero());
}
