//! Properties of morphisms on generated instances.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use dbcat::category::{
    compose, eta, factorize, identity, invert, is_epi, is_iso, is_mono, lift_t, morphism_equiv, same_arrow, skeletalize,
    te_arrow, CommSquare, Morphism,
};
use dbcat::closure::{closure, Bound};
use dbcat::gen::{random_instance, random_morphism, random_pair, rng};
use dbcat::kleisli::{check_computation_arrow, internalize, theta};
use dbcat::View;
use proptest::prelude::*;

fn k2() -> Bound {
    Bound::new(2)
}

fn views(f: &Morphism) -> BTreeSet<View> {
    f.flux().views().iter().cloned().collect()
}

fn morphism(seed: u64) -> Morphism {
    let mut r = rng(seed);
    let a = Arc::new(random_instance(&mut r, "A"));
    random_morphism(&mut r, &a, "B", k2()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn flux_is_pointed_and_bounded_by_both_ends(seed in any::<u64>()) {
        let f = morphism(seed);
        prop_assert!(f.flux().contains(&View::Bottom));
        let src = closure(f.src(), k2()).unwrap();
        let tgt = closure(f.tgt(), k2()).unwrap();
        prop_assert!(f.flux().is_subset(&src) && f.flux().is_subset(&tgt));
        prop_assert!(closure(&f.flux().as_instance(), k2()).unwrap().same_views(f.flux()));
    }

    #[test]
    fn composition_intersects_fluxes(seed in any::<u64>()) {
        let (f, g) = random_pair(&mut rng(seed), k2()).unwrap();
        let gf = compose(&g, &f).unwrap();
        let expected: BTreeSet<View> = views(&f).intersection(&views(&g)).cloned().collect();
        prop_assert_eq!(views(&gf), expected);
        let id = identity(f.src().clone(), k2()).unwrap();
        prop_assert!(same_arrow(&compose(&f, &id).unwrap(), &f).unwrap());
    }

    #[test]
    fn equivalence_is_an_equivalence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Arc::new(random_instance(&mut r, "A"));
        let fs: Vec<Morphism> = (0..3).map(|_| random_morphism(&mut r, &a, "B", k2()).unwrap()).collect();
        for f in &fs {
            prop_assert!(morphism_equiv(f, f));
            for g in &fs {
                prop_assert_eq!(morphism_equiv(f, g), morphism_equiv(g, f));
                for h in &fs {
                    if morphism_equiv(f, g) && morphism_equiv(g, h) {
                        prop_assert!(morphism_equiv(f, h));
                    }
                }
            }
        }
    }

    #[test]
    fn duality_and_factorization(seed in any::<u64>()) {
        let f = morphism(seed);
        let inv = invert(&f).unwrap();
        prop_assert_eq!(views(&inv), views(&f));
        prop_assert_eq!(is_epi(&f).unwrap(), is_mono(&inv).unwrap());
        let fac = factorize(&f).unwrap();
        prop_assert!(is_epi(&fac.epi).unwrap() && is_mono(&fac.mono).unwrap());
        prop_assert_eq!(views(&fac.epi), views(&f));
        prop_assert_eq!(views(&fac.mono), views(&f));
        prop_assert!(same_arrow(&compose(&fac.mono, &fac.epi).unwrap(), &f).unwrap());
    }

    #[test]
    fn lifting_preserves_flux_and_properties(seed in any::<u64>()) {
        let f = morphism(seed);
        let tf = lift_t(&f).unwrap();
        prop_assert_eq!(views(&tf), views(&f));
        prop_assert_eq!(is_epi(&f).unwrap(), is_epi(&tf).unwrap());
        prop_assert_eq!(is_mono(&f).unwrap(), is_mono(&tf).unwrap());
        prop_assert_eq!(is_iso(&f).unwrap(), is_iso(&tf).unwrap());
        let id = identity(f.src().clone(), k2()).unwrap();
        let tid = lift_t(&id).unwrap();
        prop_assert!(is_iso(&tid).unwrap());
        prop_assert!(Arc::ptr_eq(tid.src(), tid.tgt()));
    }

    #[test]
    fn skeleton_kernels_match_equivalence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Arc::new(random_instance(&mut r, "A"));
        let f = random_morphism(&mut r, &a, "B", k2()).unwrap();
        let g = random_morphism(&mut r, &a, "C", k2()).unwrap();
        let (sf, sg) = (skeletalize(&f).unwrap(), skeletalize(&g).unwrap());
        let kernel = |s: &BTreeMap<View, View>| -> BTreeSet<View> {
            s.iter().filter(|(x, y)| x == y).map(|(x, _)| x.clone()).collect()
        };
        prop_assert_eq!(kernel(&sf) == kernel(&sg), morphism_equiv(&f, &g));
        prop_assert!(sf.iter().all(|(x, y)| y == x || y.is_bottom()));
    }

    #[test]
    fn eta_is_an_isomorphism(seed in any::<u64>()) {
        let a = random_instance(&mut rng(seed), "A");
        let (e, _) = eta(a.clone(), k2()).unwrap();
        prop_assert!(is_iso(&e).unwrap());
        prop_assert!(same_arrow(&compose(&invert(&e).unwrap(), &e).unwrap(), &identity(a, k2()).unwrap()).unwrap());
    }

    #[test]
    fn computation_arrows(seed in any::<u64>()) {
        let f = morphism(seed);
        prop_assert!(check_computation_arrow(&f).unwrap().iter().all(|l| l.pass));
    }

    #[test]
    fn internalization_is_faithful(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Arc::new(random_instance(&mut r, "A"));
        let f = random_morphism(&mut r, &a, "B", k2()).unwrap();
        let g = random_morphism(&mut r, &a, "B", k2()).unwrap();
        let b = f.tgt().clone();
        // the same target for both programs
        let g = dbcat::category::make_morphism(a.clone(), b.clone(), g.maps().iter().filter(|m| b.relation_named_for(m.result()).is_some()).cloned().collect(), k2()).unwrap();
        let lift = |m: &Morphism| {
            let (e, _) = eta(b.clone(), k2()).unwrap();
            theta(&compose(&e, m).unwrap(), b.clone()).unwrap()
        };
        let (kf, kg) = (lift(&f), lift(&g));
        let same_program = morphism_equiv(kf.program(), kg.program());
        prop_assert_eq!(morphism_equiv(&internalize(&kf).unwrap(), &internalize(&kg).unwrap()), same_program);
    }
}

/// Stacked commuting squares built from identities and `f`, `g`.
#[test]
fn te_arrow_respects_stacking() {
    for seed in 0..24 {
        let (f, g) = random_pair(&mut rng(seed), k2()).unwrap();
        let id = |m: &Morphism, src: bool| identity(if src { m.src().clone() } else { m.tgt().clone() }, k2()).unwrap();
        // f -> f and f -> (g . f) via (id, g)
        let sq1 = CommSquare {
            f: f.clone(),
            g: f.clone(),
            h1: id(&f, true),
            h2: id(&f, false),
        };
        let gf = compose(&g, &f).unwrap();
        let sq2 = CommSquare {
            f: f.clone(),
            g: gf.clone(),
            h1: id(&f, true),
            h2: g.clone(),
        };
        let t1 = te_arrow(&sq1).unwrap();
        assert!(is_iso(&t1).unwrap());
        let t2 = te_arrow(&sq2).unwrap();
        let expected: BTreeSet<View> = views(&g).intersection(&views(&f)).cloned().collect();
        assert_eq!(views(&t2), expected);
        // pasting sq1 on top of sq2 is sq2 again
        let pasted = compose(&t2, &t1).unwrap();
        assert!(same_arrow(&pasted, &t2).unwrap());
    }
}
