mod common;

use std::sync::Arc;

use common::harness::suite;
use common::{element_orders, minimal_parts, ConstantComplex};
use gerbex_core::cech::{
    classes_equal, coboundary0, coboundary1, cohomology_group, is_coboundary, is_cocycle, refine_cochain, Backend, Cochain, CohClass,
};
use gerbex_core::group::FiniteGroup;
use gerbex_core::obstruction::{cl1, cl2, Axes, Chooser, LiftProblem1};
use gerbex_core::sheaf::SheafOfGroups;
use gerbex_core::space::{minimal_open_cover, point_cover, FiniteSpace, RefinementMap};
use proptest::prelude::*;

/// A random poset on `2..=5` points; relations only go up in index order.
fn space() -> impl Strategy<Value = FiniteSpace> {
    (2usize..=5).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let names: Vec<String> = (0..n).map(|i| format!("x{}", i)).collect();
            let mut rel = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if bits[k] {
                        rel.push((i, j));
                    }
                    k += 1;
                }
            }
            FiniteSpace::new(&names, &rel).unwrap()
        })
    })
}

fn random_cochain(s: &SheafOfGroups, cover: &gerbex_core::space::Cover, degree: usize, seed: &[u32]) -> Cochain {
    let mut k = 0;
    Cochain::from_fn(s, cover, degree, |_, u| {
        let n = s.sections(u)?.len() as u32;
        k += 1;
        Ok(seed[k % seed.len()] % n)
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coboundary_squares_to_identity(sp in space(), m in 2usize..=4, seed in proptest::collection::vec(any::<u32>(), 1..40)) {
        let s = SheafOfGroups::constant(Arc::new(sp), &FiniteGroup::cyclic(m));
        let sp = s.space().clone();
        let cover = point_cover(&sp, sp.whole()).unwrap();
        let b = random_cochain(&s, &cover, 0, &seed);
        let d = coboundary0(&b).unwrap();
        prop_assert!(is_cocycle(&d).unwrap());
        prop_assert!(coboundary1(&d).unwrap().is_identity());
        prop_assert!(is_coboundary(&d).unwrap());
    }

    #[test]
    fn refinement_keeps_coboundaries(sp in space(), seed in proptest::collection::vec(any::<u32>(), 1..40)) {
        let s = SheafOfGroups::constant(Arc::new(sp), &FiniteGroup::cyclic(3));
        let sp = s.space().clone();
        let coarse = minimal_open_cover(&sp, sp.whole()).unwrap();
        let fine = point_cover(&sp, sp.whole()).unwrap();
        let r = RefinementMap::find(&fine, &coarse).unwrap();
        let d = coboundary0(&random_cochain(&s, &coarse, 0, &seed)).unwrap();
        let rd = refine_cochain(&d, &r).unwrap();
        prop_assert!(is_coboundary(&rd).unwrap());
        let c = random_cochain(&s, &coarse, 1, &seed);
        if is_cocycle(&c).unwrap() {
            let a = CohClass::new(c.clone()).unwrap();
            let b = CohClass::new(refine_cochain(&c, &r).unwrap()).unwrap();
            prop_assert!(classes_equal(&a, &b).unwrap());
            prop_assert_eq!(a.is_trivial().unwrap(), b.is_trivial().unwrap());
        }
    }

    #[test]
    fn backends_agree_with_rank_oracle(sp in space(), p in 0usize..=2) {
        let s = SheafOfGroups::constant(Arc::new(sp.clone()), &FiniteGroup::cyclic(2));
        let cover = minimal_open_cover(s.space(), s.space().whole()).unwrap();
        let snf = cohomology_group(&s, &cover, p, Backend::Snf).unwrap().invariant_factors;
        let en = cohomology_group(&s, &cover, p, Backend::Enumeration).unwrap().invariant_factors;
        prop_assert_eq!(&snf, &en);
        let dim = ConstantComplex::new(&sp, &minimal_parts(&sp), 2).dimension_over_prime_field(p);
        prop_assert_eq!(element_orders(&snf).len(), 1usize << dim);
    }

    #[test]
    fn cl1_is_independent_of_choices(k in 0usize..21, seed in any::<u64>()) {
        let inst = &suite()[k];
        let ext = &inst.ext;
        let u = ext.total().space().whole();
        let reps = ext.total().object_reps(u).unwrap();
        let (i, j) = (&reps[0], &reps[reps.len() - 1]);
        for h in ext.base().homs(&ext.proj().apply_object(i), &ext.proj().apply_object(j)).unwrap().into_iter().take(4) {
            let p = LiftProblem1 { i: i.clone(), j: j.clone(), h };
            let a = cl1(ext, &p, &mut Chooser::canonical()).unwrap().class;
            let b = cl1(ext, &p, &mut Chooser::random(seed, Axes::ALL)).unwrap().class;
            prop_assert!(classes_equal(&a, &b).unwrap());
        }
    }

    #[test]
    fn cl2_is_independent_of_choices(k in 0usize..21, seed in any::<u64>()) {
        let inst = &suite()[k];
        let ext = &inst.ext;
        let u = ext.base().space().whole();
        for j in ext.base().object_reps(u).unwrap().iter() {
            let a = cl2(ext, j, &mut Chooser::canonical()).unwrap();
            let b = cl2(ext, j, &mut Chooser::random(seed, Axes::ALL)).unwrap();
            match (a.class(), b.class()) {
                (Some(a), Some(b)) => prop_assert!(classes_equal(a, b).unwrap()),
                (a, b) => prop_assert_eq!(a.is_some(), b.is_some()),
            }
        }
    }
}
