//! Finite groupoids with dense composition tables, functors between them,
//! and strict diagrams of groupoids over the specialization poset.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::space::{FiniteSpace, Point};

/// Largest number of morphisms a groupoid may have.
pub const GROUPOID_CAP: usize = 2048;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupoid {
    obj_labels: Vec<String>,
    src: Vec<u32>,
    tgt: Vec<u32>,
    labels: Vec<String>,
    hom: Vec<Vec<Vec<u32>>>,
    /// `comp[g * m + f] = g ∘ f`.
    comp: Vec<u32>,
    inv: Vec<u32>,
    ident: Vec<u32>,
}

impl FiniteGroupoid {
    /// `morphisms` lists `(source, target, label)`; `compose(g, f)` must
    /// return `g ∘ f` whenever the target of `f` is the source of `g`.
    pub fn new(obj_labels: Vec<String>, morphisms: Vec<(u32, u32, String)>, compose: impl Fn(u32, u32) -> u32) -> Result<Self> {
        let m = morphisms.len();
        let n = obj_labels.len();
        if m > GROUPOID_CAP {
            return Err(Error::CapExceeded(format!("groupoid with {} morphisms", m)));
        }
        let mut hom = vec![vec![Vec::new(); n]; n];
        let mut src = Vec::with_capacity(m);
        let mut tgt = Vec::with_capacity(m);
        let mut labels = Vec::with_capacity(m);
        for (id, (s, t, l)) in morphisms.into_iter().enumerate() {
            if s as usize >= n || t as usize >= n {
                return Err(Error::BadGroupoid(format!("morphism `{}` has an unknown endpoint", l)));
            }
            hom[s as usize][t as usize].push(id as u32);
            src.push(s);
            tgt.push(t);
            labels.push(l);
        }
        let mut comp = vec![NONE; m * m];
        for g in 0..m as u32 {
            for f in 0..m as u32 {
                if tgt[f as usize] != src[g as usize] {
                    continue;
                }
                let h = compose(g, f);
                if h as usize >= m || src[h as usize] != src[f as usize] || tgt[h as usize] != tgt[g as usize] {
                    return Err(Error::BadGroupoid(format!("`{}` ∘ `{}` has the wrong endpoints", labels[g as usize], labels[f as usize])));
                }
                comp[g as usize * m + f as usize] = h;
            }
        }
        let at = |g: u32, f: u32| comp[g as usize * m + f as usize];
        let mut ident = Vec::with_capacity(n);
        for o in 0..n {
            let e = hom[o][o].iter().copied().find(|&e| {
                (0..m as u32).all(|f| (tgt[f as usize] as usize != o || at(e, f) == f) && (src[f as usize] as usize != o || at(f, e) == f))
            });
            match e {
                Some(e) => ident.push(e),
                None => return Err(Error::BadGroupoid(format!("object `{}` has no identity", obj_labels[o]))),
            }
        }
        for h in 0..m as u32 {
            let b = src[h as usize] as usize;
            for a in 0..n {
                for &g in &hom[a][b] {
                    let hg = at(h, g);
                    for row in &hom {
                        for &f in &row[a] {
                            if at(hg, f) != at(h, at(g, f)) {
                                return Err(Error::NotAssociative(
                                    labels[h as usize].clone(),
                                    labels[g as usize].clone(),
                                    labels[f as usize].clone(),
                                ));
                            }
                        }
                    }
                }
            }
        }
        let mut inv = Vec::with_capacity(m);
        for f in 0..m {
            let (s, t) = (src[f] as usize, tgt[f] as usize);
            let g = hom[t][s].iter().copied().find(|&g| at(g, f as u32) == ident[s] && at(f as u32, g) == ident[t]);
            match g {
                Some(g) => inv.push(g),
                None => return Err(Error::NoInverse(labels[f].clone())),
            }
        }
        Ok(FiniteGroupoid { obj_labels, src, tgt, labels, hom, comp, inv, ident })
    }

    /// The one-object groupoid of a group; morphism ids are element ids.
    pub fn from_group(g: &FiniteGroup) -> Self {
        let mors = g.elements().map(|a| (0, 0, g.label(a).to_string())).collect();
        FiniteGroupoid::new(vec!["*".into()], mors, |a, b| g.mul(a, b)).expect("a group is a groupoid")
    }

    pub fn terminal() -> Self {
        FiniteGroupoid::from_group(&FiniteGroup::trivial())
    }

    pub fn n_objects(&self) -> usize {
        self.obj_labels.len()
    }

    pub fn n_morphisms(&self) -> usize {
        self.src.len()
    }

    pub fn obj_label(&self, o: u32) -> &str {
        &self.obj_labels[o as usize]
    }

    pub fn object(&self, label: &str) -> Option<u32> {
        self.obj_labels.iter().position(|l| l == label).map(|i| i as u32)
    }

    pub fn label(&self, f: u32) -> &str {
        &self.labels[f as usize]
    }

    /// Morphism `s → t` with the given label.
    pub fn morphism(&self, s: u32, t: u32, label: &str) -> Option<u32> {
        self.hom(s, t).iter().copied().find(|&f| self.label(f) == label)
    }

    pub fn src(&self, f: u32) -> u32 {
        self.src[f as usize]
    }

    pub fn tgt(&self, f: u32) -> u32 {
        self.tgt[f as usize]
    }

    pub fn hom(&self, s: u32, t: u32) -> &[u32] {
        &self.hom[s as usize][t as usize]
    }

    pub fn aut(&self, o: u32) -> &[u32] {
        self.hom(o, o)
    }

    /// `g ∘ f`.
    pub fn compose(&self, g: u32, f: u32) -> u32 {
        let h = self.comp[g as usize * self.n_morphisms() + f as usize];
        debug_assert!(h != NONE, "composing non-composable morphisms");
        h
    }

    pub fn inv(&self, f: u32) -> u32 {
        self.inv[f as usize]
    }

    pub fn identity(&self, o: u32) -> u32 {
        self.ident[o as usize]
    }

    /// `Ad(g)(h) = g ∘ h ∘ g⁻¹`.
    pub fn ad(&self, g: u32, h: u32) -> u32 {
        self.compose(self.compose(g, h), self.inv(g))
    }

    /// `Aut(o)` as a group, with element `k` being morphism `ids[k]`.
    pub fn aut_group(&self, o: u32) -> (FiniteGroup, Vec<u32>) {
        let ids = self.aut(o).to_vec();
        let pos: HashMap<u32, usize> = ids.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let table: Vec<Vec<usize>> = ids.iter().map(|&a| ids.iter().map(|&b| pos[&self.compose(a, b)]).collect()).collect();
        let labels = ids.iter().map(|&f| self.label(f).to_string()).collect();
        (FiniteGroup::from_table(labels, table).expect("automorphisms form a group"), ids)
    }

    /// Component index of every object.
    pub fn components(&self) -> Vec<usize> {
        let n = self.n_objects();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for o in 0..n {
            if comp[o] != usize::MAX {
                continue;
            }
            for p in 0..n {
                if !self.hom(o as u32, p as u32).is_empty() {
                    comp[p] = next;
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.n_objects() > 0 && self.components().iter().all(|&c| c == 0)
    }

    /// Quotient by a normal family of subgroups `normal[o] ⊆ Aut(o)`:
    /// morphisms are cosets `f ∘ N(src f)`, labelled by their first member.
    pub fn quotient(&self, normal: &[Vec<u32>]) -> Result<(FiniteGroupoid, Functor)> {
        let m = self.n_morphisms();
        let mut class = vec![NONE; m];
        let mut reps = Vec::new();
        for f in 0..m as u32 {
            if class[f as usize] != NONE {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(f);
            for &n in &normal[self.src(f) as usize] {
                class[self.compose(f, n) as usize] = id;
            }
        }
        let mors = reps.iter().map(|&f| (self.src(f), self.tgt(f), self.label(f).to_string())).collect();
        let q =
            FiniteGroupoid::new(self.obj_labels.clone(), mors, |g, f| class[self.compose(reps[g as usize], reps[f as usize]) as usize])?;
        let functor = Functor { obj: (0..self.n_objects() as u32).collect(), mor: class };
        Ok((q, functor))
    }
}

/// A functor given by its object and morphism maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functor {
    pub obj: Vec<u32>,
    pub mor: Vec<u32>,
}

impl Functor {
    pub fn identity(g: &FiniteGroupoid) -> Self {
        Functor { obj: (0..g.n_objects() as u32).collect(), mor: (0..g.n_morphisms() as u32).collect() }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Functor) -> Functor {
        Functor {
            obj: self.obj.iter().map(|&o| next.obj[o as usize]).collect(),
            mor: self.mor.iter().map(|&f| next.mor[f as usize]).collect(),
        }
    }

    pub fn check(&self, a: &FiniteGroupoid, b: &FiniteGroupoid) -> Result<()> {
        if self.obj.len() != a.n_objects() || self.mor.len() != a.n_morphisms() {
            return Err(Error::BadFunctor("maps have the wrong size".into()));
        }
        if self.obj.iter().any(|&o| o as usize >= b.n_objects()) || self.mor.iter().any(|&f| f as usize >= b.n_morphisms()) {
            return Err(Error::BadFunctor("maps leave the target".into()));
        }
        for f in 0..a.n_morphisms() as u32 {
            let g = self.mor[f as usize];
            if b.src(g) != self.obj[a.src(f) as usize] || b.tgt(g) != self.obj[a.tgt(f) as usize] {
                return Err(Error::BadFunctor(format!("`{}` goes to the wrong hom-set", a.label(f))));
            }
        }
        for o in 0..a.n_objects() as u32 {
            if self.mor[a.identity(o) as usize] != b.identity(self.obj[o as usize]) {
                return Err(Error::BadFunctor(format!("identity of `{}` is not preserved", a.obj_label(o))));
            }
        }
        for g in 0..a.n_morphisms() as u32 {
            for f in 0..a.n_morphisms() as u32 {
                if a.tgt(f) != a.src(g) {
                    continue;
                }
                if self.mor[a.compose(g, f) as usize] != b.compose(self.mor[g as usize], self.mor[f as usize]) {
                    return Err(Error::BadFunctor(format!("composition `{}` ∘ `{}` is not preserved", a.label(g), a.label(f))));
                }
            }
        }
        Ok(())
    }
}

/// Groupoids `G_x` on the points with strict restriction functors
/// `r_xy : G_x → G_y` for `x ≤ y`.  `G_x` plays the role of the groupoid
/// over the minimal open `U_x`.
#[derive(Clone, Debug)]
pub struct GroupoidDiagram {
    space: Arc<FiniteSpace>,
    stalks: Vec<FiniteGroupoid>,
    res: Vec<Vec<Option<Functor>>>,
}

impl PartialEq for GroupoidDiagram {
    fn eq(&self, other: &Self) -> bool {
        self.space.id() == other.space.id() && self.stalks == other.stalks && self.res == other.res
    }
}

impl GroupoidDiagram {
    /// Functors are given on the covering relations; composites must agree
    /// along every path.
    pub fn new(space: Arc<FiniteSpace>, stalks: Vec<FiniteGroupoid>, hasse: Vec<((Point, Point), Functor)>) -> Result<Self> {
        let n = space.len();
        if stalks.len() != n {
            return Err(Error::BadDiagram("one groupoid per point is required".into()));
        }
        let mut res: Vec<Vec<Option<Functor>>> = vec![vec![None; n]; n];
        for x in 0..n {
            res[x][x] = Some(Functor::identity(&stalks[x]));
        }
        let given: HashMap<(Point, Point), Functor> = hasse.into_iter().collect();
        for &(x, y) in space.hasse() {
            let f = given.get(&(x, y)).ok_or_else(|| Error::BadDiagram(format!("no functor for {} ≤ {}", space.name(x), space.name(y))))?;
            f.check(&stalks[x], &stalks[y]).map_err(|e| Error::BadDiagram(format!("{} ≤ {}: {}", space.name(x), space.name(y), e)))?;
            res[x][y] = Some(f.clone());
        }
        let order = space.linear_order().to_vec();
        for &z in &order {
            for &x in &order {
                if !space.lt(x, z) {
                    continue;
                }
                for &(y, zz) in space.hasse() {
                    if zz != z || !space.leq(x, y) {
                        continue;
                    }
                    let a = res[x][y].clone().expect("smaller pair is set");
                    let b = res[y][z].clone().expect("covering pair is set");
                    let c = a.then(&b);
                    match &res[x][z] {
                        None => res[x][z] = Some(c),
                        Some(d) if *d != c => {
                            return Err(Error::NonFunctorial(format!(
                                "restrictions {} → {} disagree along different paths",
                                space.name(x),
                                space.name(z)
                            )))
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(GroupoidDiagram { space, stalks, res })
    }

    /// The same group at every point with the given hom on covering relations.
    pub fn from_sheaf(sheaf: &crate::sheaf::SheafOfGroups) -> Self {
        let space = sheaf.space().clone();
        let stalks = (0..space.len()).map(|x| FiniteGroupoid::from_group(sheaf.stalk(x))).collect();
        let hasse = space.hasse().iter().map(|&(x, y)| ((x, y), Functor { obj: vec![0], mor: sheaf.comp(x, y).to_vec() })).collect();
        GroupoidDiagram::new(space, stalks, hasse).expect("a sheaf of groups is a diagram")
    }

    pub fn terminal(space: Arc<FiniteSpace>) -> Self {
        let n = space.len();
        let stalks = vec![FiniteGroupoid::terminal(); n];
        let hasse = space.hasse().iter().map(|&(x, y)| ((x, y), Functor { obj: vec![0], mor: vec![0] })).collect();
        GroupoidDiagram::new(space, stalks, hasse).expect("terminal diagram")
    }

    pub fn space(&self) -> &Arc<FiniteSpace> {
        &self.space
    }

    pub fn stalk(&self, x: Point) -> &FiniteGroupoid {
        &self.stalks[x]
    }

    pub fn stalks(&self) -> &[FiniteGroupoid] {
        &self.stalks
    }

    /// `r_xy` for `x ≤ y`.
    pub fn res(&self, x: Point, y: Point) -> &Functor {
        self.res[x][y].as_ref().expect("x <= y")
    }

    pub fn hasse_functors(&self) -> Vec<((Point, Point), Functor)> {
        self.space.hasse().iter().map(|&(x, y)| ((x, y), self.res(x, y).clone())).collect()
    }

    /// Per-point quotient by `normal[x][o] ⊆ Aut_x(o)`; restrictions must
    /// carry each subgroup into the one of the restricted object.
    pub fn quotient(&self, normal: &[Vec<Vec<u32>>]) -> Result<(GroupoidDiagram, Vec<Functor>)> {
        let mut stalks = Vec::new();
        let mut projs = Vec::new();
        for x in 0..self.space.len() {
            let (q, p) = self.stalks[x].quotient(&normal[x])?;
            stalks.push(q);
            projs.push(p);
        }
        let mut hasse = Vec::new();
        for &(x, y) in self.space.hasse() {
            let r = self.res(x, y);
            let g = &self.stalks[x];
            let mut mor = vec![NONE; stalks[x].n_morphisms()];
            for f in 0..g.n_morphisms() {
                let qf = projs[x].mor[f] as usize;
                let img = projs[y].mor[r.mor[f] as usize];
                if mor[qf] != NONE && mor[qf] != img {
                    return Err(Error::NotNormal(format!(
                        "restriction {} → {} does not preserve the subgroups",
                        self.space.name(x),
                        self.space.name(y)
                    )));
                }
                mor[qf] = img;
            }
            hasse.push(((x, y), Functor { obj: r.obj.clone(), mor }));
        }
        Ok((GroupoidDiagram::new(self.space.clone(), stalks, hasse)?, projs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_as_groupoid() {
        let g = FiniteGroupoid::from_group(&FiniteGroup::symmetric3());
        assert_eq!(g.n_objects(), 1);
        assert_eq!(g.n_morphisms(), 6);
        assert!(g.is_connected());
        let (a, ids) = g.aut_group(0);
        assert_eq!(a.order(), 6);
        assert_eq!(ids.len(), 6);
    }

    #[test]
    fn non_associative_groupoid_is_rejected() {
        // A loop of order 5 in which every element squares to the identity.
        let t = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]];
        let mors = (0..5).map(|i| (0, 0, format!("e{}", i))).collect();
        let err = FiniteGroupoid::new(vec!["*".into()], mors, |g, f| t[g as usize][f as usize]).unwrap_err();
        assert!(matches!(err, Error::NotAssociative(..)));
    }

    #[test]
    fn quotient_of_cyclic() {
        let g = FiniteGroupoid::from_group(&FiniteGroup::cyclic(4));
        let (q, p) = g.quotient(&[vec![0, 2]]).unwrap();
        assert_eq!(q.n_morphisms(), 2);
        assert_eq!(p.mor, vec![0, 1, 0, 1]);
    }
}
