mod common;

use std::sync::Arc;

use common::{element_orders, minimal_parts, point_parts, ConstantComplex};
use gerbex_core::cech::{cohomology_group, Backend};
use gerbex_core::group::FiniteGroup;
use gerbex_core::sheaf::SheafOfGroups;
use gerbex_core::space::{minimal_open_cover, models, point_cover, FiniteSpace};

fn orders_from_library(sp: &FiniteSpace, m: usize, p: usize, points: bool, backend: Backend) -> Vec<u64> {
    let s = SheafOfGroups::constant(Arc::new(sp.clone()), &FiniteGroup::cyclic(m));
    let sp = s.space().clone();
    let cover = if points { point_cover(&sp, sp.whole()) } else { minimal_open_cover(&sp, sp.whole()) }.unwrap();
    element_orders(&cohomology_group(&s, &cover, p, backend).unwrap().invariant_factors)
}

#[test]
fn pseudocircle_h1_matches_enumeration_oracle() {
    let sp = models::pseudocircle();
    for m in 2..=4u64 {
        let cx = ConstantComplex::new(&sp, &minimal_parts(&sp), m);
        let oracle = cx.element_orders_by_enumeration(1);
        assert_eq!(oracle, element_orders(&[m]));
        for backend in [Backend::Enumeration, Backend::Snf] {
            assert_eq!(orders_from_library(&sp, m as usize, 1, false, backend), oracle, "m = {}", m);
        }
    }
}

#[test]
fn degree_zero_counts_components() {
    for sp in [models::vee(), models::zigzag(), models::pseudocircle(), models::chain(3)] {
        let cx = ConstantComplex::new(&sp, &minimal_parts(&sp), 3);
        assert_eq!(cx.element_orders_by_enumeration(0), element_orders(&[3]));
        assert_eq!(orders_from_library(&sp, 3, 0, false, Backend::Snf), element_orders(&[3]));
    }
}

#[test]
fn contractible_spaces_are_acyclic() {
    for sp in [models::vee(), models::zigzag(), models::chain(3), models::one_point()] {
        for p in 1..=2 {
            let cx = ConstantComplex::new(&sp, &minimal_parts(&sp), 2);
            assert_eq!(cx.element_orders_by_enumeration(p), vec![1]);
            for backend in [Backend::Enumeration, Backend::Snf] {
                assert_eq!(orders_from_library(&sp, 2, p, false, backend), vec![1]);
            }
        }
    }
}

#[test]
fn pseudosphere_cech_h2_vanishes_on_both_covers() {
    let sp = models::pseudosphere();
    let cx = ConstantComplex::new(&sp, &minimal_parts(&sp), 2);
    assert_eq!(cx.element_orders_by_enumeration(2), vec![1]);
    assert_eq!(ConstantComplex::new(&sp, &point_parts(&sp), 2).dimension_over_prime_field(2), 0);
    for backend in [Backend::Enumeration, Backend::Snf] {
        assert_eq!(orders_from_library(&sp, 2, 2, false, backend), vec![1]);
    }
    assert_eq!(orders_from_library(&sp, 2, 2, true, Backend::Snf), vec![1]);
}

#[test]
fn tetra_sphere_h2_matches_rank_oracle() {
    let sp = models::tetra_sphere();
    let cx = ConstantComplex::new(&sp, &minimal_parts(&sp), 2);
    assert_eq!(cx.dimension_over_prime_field(1), 0);
    assert_eq!(cx.dimension_over_prime_field(2), 1);
    for backend in [Backend::Enumeration, Backend::Snf] {
        assert_eq!(orders_from_library(&sp, 2, 2, false, backend), element_orders(&[2]));
    }
    let cx3 = ConstantComplex::new(&sp, &minimal_parts(&sp), 3);
    assert_eq!(cx3.dimension_over_prime_field(2), 1);
    assert_eq!(orders_from_library(&sp, 3, 2, false, Backend::Snf), element_orders(&[3]));
}

#[test]
fn point_cover_agrees_with_minimal_cover_in_degree_one() {
    for sp in [models::pseudocircle(), models::pseudosphere(), models::zigzag()] {
        for m in [2u64, 3] {
            let oracle = ConstantComplex::new(&sp, &point_parts(&sp), m).dimension_over_prime_field(1);
            let lib = orders_from_library(&sp, m as usize, 1, true, Backend::Snf);
            assert_eq!(lib.len() as u64, m.pow(oracle as u32));
            assert_eq!(lib, orders_from_library(&sp, m as usize, 1, false, Backend::Snf));
        }
    }
}
