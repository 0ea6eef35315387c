mod common;

use std::time::Instant;

use common::harness::{compare_all, compare_isomorphism_lifting, compare_object_lifting, suite};
use common::{class_reps, global_objects};

#[test]
fn suite_has_twenty_one_gerbe_extensions() {
    let s = suite();
    assert_eq!(s.len(), 21);
    for inst in &s {
        assert!(inst.ext.total().is_gerbe().unwrap(), "{}", inst.name);
        assert!(inst.ext.proj().is_weak_epi(), "{}", inst.name);
    }
}

#[test]
fn oracle_class_counts_match_library_representatives() {
    for inst in suite() {
        for p in [inst.ext.total(), inst.ext.base()] {
            let brute = class_reps(p, &global_objects(p)).len();
            let lib = p.object_reps(p.space().whole()).unwrap().len();
            assert_eq!(brute, lib, "{}", inst.name);
        }
    }
}

#[test]
fn isomorphism_lifting_agrees_with_oracle() {
    let start = Instant::now();
    let t = compare_all(&suite(), compare_isomorphism_lifting);
    assert!(t.discrepancies.is_empty(), "{:#?}", t.discrepancies);
    assert!(t.lifted > 0 && t.lifted < t.cases, "{} of {}", t.lifted, t.cases);
    eprintln!("{} cases in {:?}", t.cases, start.elapsed());
}

#[test]
fn object_lifting_agrees_with_oracle() {
    let t = compare_all(&suite(), compare_object_lifting);
    assert!(t.discrepancies.is_empty(), "{:#?}", t.discrepancies);
    assert!(t.cases > 0);
}

#[test]
fn every_pseudocircle_torsor_lifts_to_z4() {
    let inst = suite().into_iter().find(|i| i.name == "z4/pseudocircle").unwrap();
    let t = compare_object_lifting(&inst);
    assert!(t.discrepancies.is_empty());
    assert_eq!(t.undefined, 0);
    assert_eq!((t.cases, t.lifted), (16, 16));
}
