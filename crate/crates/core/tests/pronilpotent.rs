mod common;

use std::collections::HashMap;
use std::sync::Arc;

use common::{global_objects, isomorphic, RawObject};
use gerbex_core::gerbe::chain_cocycle_gerbe;
use gerbex_core::group::{Elem, FiniteGroup};
use gerbex_core::pronilpotent::{
    check_acyclic_open, check_acyclic_open_gerbe, connect, glue_object, Connect, FilteredGerbe, FilteredSheafGroup, Glue,
};
use gerbex_core::sheaf::SheafOfGroups;
use gerbex_core::space::{models, FiniteSpace};

fn constant_filtration(space: FiniteSpace, g: &FiniteGroup, levels: &[Vec<Elem>]) -> FilteredSheafGroup {
    let sheaf = SheafOfGroups::constant(Arc::new(space), g);
    let n = sheaf.space().len();
    FilteredSheafGroup::new(sheaf, levels.iter().map(|l| vec![l.clone(); n]).collect()).unwrap()
}

fn heisenberg(space: FiniteSpace) -> FilteredSheafGroup {
    let g = FiniteGroup::heisenberg();
    constant_filtration(space, &g, &[g.elements().collect(), g.center(), vec![g.id()]])
}

fn glued_is_an_object(fg: &FilteredGerbe) {
    let u = fg.ambient().space().whole();
    match glue_object(fg, u).unwrap() {
        Glue::Glued(i) => fg.ambient().check_object(&i).unwrap(),
        other => panic!("{:?}", other),
    }
}

#[test]
fn heisenberg_connects_every_pair_on_contractible_spaces() {
    for sp in [models::chain(3), models::vee()] {
        let f = heisenberg(sp);
        let fg = FilteredGerbe::from_sheaf_filtration(&f).unwrap();
        let p = fg.ambient();
        let u = p.space().whole();
        assert!(check_acyclic_open(&f, u).unwrap().holds());
        assert!(check_acyclic_open_gerbe(&fg, u).unwrap().holds());
        let objs = global_objects(p);
        assert_eq!(objs.len(), 64);
        for ri in &objs {
            for rj in &objs {
                let (i, j) = (ri.to_local(p), rj.to_local(p));
                match connect(&fg, u, &i, &j).unwrap() {
                    Connect::Connected(m) => assert!(p.is_morphism(&m, &i, &j)),
                    Connect::LayerObstructed { layer, reason } => panic!("layer {}: {}", layer, reason),
                }
            }
        }
        glued_is_an_object(&fg);
    }
}

#[test]
fn connections_are_sound_on_the_pseudocircle() {
    let f = constant_filtration(models::pseudocircle(), &FiniteGroup::cyclic(4), &[vec![0, 1, 2, 3], vec![0, 2], vec![0]]);
    let fg = FilteredGerbe::from_sheaf_filtration(&f).unwrap();
    let p = fg.ambient();
    let u = p.space().whole();
    let objs: Vec<RawObject> = global_objects(p);
    let mut obstructed = 0;
    for ri in &objs {
        for rj in objs.iter().step_by(5) {
            let (i, j) = (ri.to_local(p), rj.to_local(p));
            match connect(&fg, u, &i, &j).unwrap() {
                Connect::Connected(m) => assert!(p.is_morphism(&m, &i, &j)),
                Connect::LayerObstructed { .. } => {
                    obstructed += 1;
                    assert!(!isomorphic(p, ri, rj));
                }
            }
        }
    }
    assert!(obstructed > 0);
    glued_is_an_object(&fg);
}

#[test]
fn twisted_pseudosphere_gerbe_has_no_global_object() {
    let sp = Arc::new(models::pseudosphere());
    let band = SheafOfGroups::constant(sp.clone(), &FiniteGroup::cyclic(4));
    let pt = |s: &str| sp.point(s).unwrap();
    let gamma: HashMap<_, _> = [((pt("e"), pt("c"), pt("a")), 1)].into_iter().collect();
    let ext = chain_cocycle_gerbe(&band, &gamma).unwrap();
    let n = sp.len();
    let fg = FilteredGerbe::from_band_filtration(&ext, &[vec![vec![0, 1, 2, 3]; n], vec![vec![0, 2]; n], vec![vec![0]; n]]).unwrap();
    assert!(matches!(glue_object(&fg, sp.whole()).unwrap(), Glue::LayerObstructed { layer: 0, .. }));
    assert!(global_objects(ext.total()).is_empty());
    let flat = chain_cocycle_gerbe(&band, &HashMap::new()).unwrap();
    assert!(!global_objects(flat.total()).is_empty());
}

#[test]
fn truncation_is_a_quotient_with_image_levels() {
    let f = heisenberg(models::zigzag());
    let t = f.truncate(1).unwrap();
    assert_eq!(t.p_max(), 1);
    assert_eq!(t.ambient().stalk(0).order(), 4);
    let fg = FilteredGerbe::from_sheaf_filtration(&f).unwrap();
    let (tg, proj) = fg.truncate(1).unwrap();
    assert_eq!(tg.p_max(), 1);
    let p = fg.ambient();
    let u = p.space().whole();
    let objs = global_objects(p);
    for ri in objs.iter().step_by(9) {
        for rj in objs.iter().step_by(13) {
            let (i, j) = (ri.to_local(p), rj.to_local(p));
            if let Connect::Connected(_) = connect(&fg, u, &i, &j).unwrap() {
                let (pi, pj) = (proj.apply_object(&i), proj.apply_object(&j));
                assert!(matches!(connect(&tg, u, &pi, &pj).unwrap(), Connect::Connected(_)));
            }
        }
    }
    assert!(f.truncate(0).is_err());
    assert!(f.truncate(3).is_err());
}
