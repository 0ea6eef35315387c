//! The extension suite and the comparisons of the lifting algorithms
//! against the oracles.

use std::sync::Arc;

use gerbex_core::gerbe::{extension_of_torsor_gerbes, CentralExtensionOfGerbes};
use gerbex_core::group::FiniteGroup;
use gerbex_core::obstruction::{cl1, cl2, lift_isomorphism, lift_object, Chooser, Lift1, Lift2, LiftProblem1};
use gerbex_core::sheaf::CentralExtension;
use gerbex_core::space::{models, FiniteSpace};

use super::{apply_object, class_reps, global_objects, has_morphism_over, homs, isomorphic, RawObject};

/// One central extension of torsor gerbes with its name.
pub struct Instance {
    pub name: String,
    pub sheaves: CentralExtension,
    pub ext: CentralExtensionOfGerbes,
}

/// Twenty-one extensions: `ℤ/2 → ℤ/4 → ℤ/2`, the split `ℤ/2 → ℤ/2 × ℤ/2 →
/// ℤ/2` and `ℤ/2 → ℤ/2 → 1`, each over seven spaces.
pub fn suite() -> Vec<Instance> {
    let spaces: Vec<(&str, FiniteSpace)> = vec![
        ("one_point", models::one_point()),
        ("chain2", models::chain(2)),
        ("chain3", models::chain(3)),
        ("vee", models::vee()),
        ("zigzag", models::zigzag()),
        ("pseudocircle", models::pseudocircle()),
        ("pseudosphere", models::pseudosphere()),
    ];
    let v4 = FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2)).expect("product");
    let groups: Vec<(&str, FiniteGroup, Vec<u32>)> =
        vec![("z4", FiniteGroup::cyclic(4), vec![0, 2]), ("v4", v4, vec![0, 1]), ("z2", FiniteGroup::cyclic(2), vec![0, 1])];
    let mut out = Vec::new();
    for (gname, g, central) in &groups {
        for (sname, sp) in &spaces {
            let sheaves = CentralExtension::constant(Arc::new(sp.clone()), g, central).expect("extension");
            let ext = extension_of_torsor_gerbes(&sheaves).expect("gerbes");
            out.push(Instance { name: format!("{}/{}", gname, sname), sheaves, ext });
        }
    }
    out
}

#[derive(Debug, Default)]
pub struct Tally {
    pub cases: usize,
    pub lifted: usize,
    pub undefined: usize,
    pub discrepancies: Vec<String>,
}

impl Tally {
    fn merge(&mut self, other: Tally) {
        self.cases += other.cases;
        self.lifted += other.lifted;
        self.undefined += other.undefined;
        self.discrepancies.extend(other.discrepancies);
    }
}

/// Every `(i, j, h)` with `h : F(i) → F(j)`: the algorithm, the class and
/// the oracle must agree.  `i, j` run over all global objects of the total
/// gerbe when there are at most 64 of them, else over class representatives.
pub fn compare_isomorphism_lifting(inst: &Instance) -> Tally {
    let ext = &inst.ext;
    let (total, base, proj) = (ext.total(), ext.base(), ext.proj());
    let all = global_objects(total);
    let reps = if all.len() <= 64 { all } else { class_reps(total, &all) };
    let mut t = Tally::default();
    for ri in &reps {
        for rj in &reps {
            let (i, j) = (ri.to_local(total), rj.to_local(total));
            let (fi, fj) = (apply_object(proj, ri), apply_object(proj, rj));
            for hc in homs(base, &fi, &fj) {
                t.cases += 1;
                let h = base.morphism_from_comps(&proj.apply_object(&i), &proj.apply_object(&j), hc.clone()).expect("morphism");
                let p = LiftProblem1 { i: i.clone(), j: j.clone(), h: h.clone() };
                let oracle = has_morphism_over(proj, ri, rj, &hc);
                let trivial = cl1(ext, &p, &mut Chooser::canonical()).expect("cl1").class.is_trivial().expect("class");
                let lifted = match lift_isomorphism(ext, &p, &mut Chooser::canonical()).expect("lift") {
                    Lift1::Lifted { g, .. } => {
                        if proj.apply_morphism(&g) != h || !total.is_morphism(&g, &i, &j) {
                            t.discrepancies.push(format!("{}: returned lift is wrong for h = {:?}", inst.name, hc));
                        }
                        true
                    }
                    Lift1::Obstructed { .. } => false,
                };
                t.lifted += lifted as usize;
                if lifted != trivial || trivial != oracle {
                    t.discrepancies
                        .push(format!("{}: h = {:?}: algorithm {}, class trivial {}, oracle {}", inst.name, hc, lifted, trivial, oracle));
                }
            }
        }
    }
    t
}

/// Every global base object `j` with `cl2(j)` defined: the algorithm, the
/// class and the oracle must agree.  Objects whose class is undefined are
/// counted separately.
pub fn compare_object_lifting(inst: &Instance) -> Tally {
    let ext = &inst.ext;
    let (total, base, proj) = (ext.total(), ext.base(), ext.proj());
    let images: Vec<RawObject> = class_reps(base, &global_objects(total).iter().map(|i| apply_object(proj, i)).collect::<Vec<_>>());
    let mut t = Tally::default();
    for rj in global_objects(base) {
        let j = rj.to_local(base);
        let class = match cl2(ext, &j, &mut Chooser::canonical()).expect("cl2").class() {
            Some(c) => c.is_trivial().expect("class"),
            None => {
                t.undefined += 1;
                continue;
            }
        };
        t.cases += 1;
        let oracle = images.iter().any(|fi| isomorphic(base, fi, &rj));
        let lifted = match lift_object(ext, &j, &mut Chooser::canonical()).expect("lift") {
            Lift2::Lifted { i, e, .. } => {
                if !base.is_morphism(&e, &j, &proj.apply_object(&i)) {
                    t.discrepancies.push(format!("{}: returned object does not cover j", inst.name));
                }
                true
            }
            Lift2::Obstructed { .. } => false,
            Lift2::Undefined { reason } => {
                t.discrepancies.push(format!("{}: defined class but lift undefined: {}", inst.name, reason));
                false
            }
        };
        t.lifted += lifted as usize;
        if lifted != class || class != oracle {
            t.discrepancies
                .push(format!("{}: j = {:?}: algorithm {}, class trivial {}, oracle {}", inst.name, rj.obj, lifted, class, oracle));
        }
    }
    t
}

pub fn compare_all(instances: &[Instance], f: fn(&Instance) -> Tally) -> Tally {
    let mut t = Tally::default();
    for inst in instances {
        t.merge(f(inst));
    }
    t
}
