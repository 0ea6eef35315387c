//! Strict prestacks of groupoids, presented by their groupoids over the
//! minimal opens.  Over an arbitrary open `U` the groupoid is the strict
//! pseudo-limit of the diagram restricted to `U`: a local object picks an
//! object `i_x` of `G_x` for every `x ∈ U` together with isomorphisms
//! `φ_xy : r_xy(i_x) → i_y` satisfying `φ_xz = φ_yz ∘ r_yz(φ_xy)`.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex};

use crate::cech::Cochain;
use crate::error::{Error, Result};
use crate::group::{Elem, FiniteGroup};
use crate::groupoid::{FiniteGroupoid, Functor, GroupoidDiagram};
use crate::sheaf::{CentralExtension, SheafOfGroups};
use crate::space::{minimal_open_cover, Cover, FiniteSpace, Open, Point};
use crate::torsor::Torsor;

/// Largest number of isomorphism classes of objects over one open.
pub const OBJECT_CLASS_CAP: usize = 8;
/// Largest number of raw objects produced by one enumeration.
pub const OBJECT_ENUM_CAP: usize = 1 << 18;
/// Largest number of descent data inspected per cover.
pub const DESCENT_CAP: usize = 1 << 18;

const NONE: u32 = u32::MAX;

/// An object over an open.  Entries outside the open are `u32::MAX`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalObject {
    open: Open,
    obj: Vec<u32>,
    phi: Vec<u32>,
}

impl LocalObject {
    pub fn open(&self) -> Open {
        self.open
    }

    pub fn obj(&self, x: Point) -> u32 {
        self.obj[x]
    }

    /// `φ_xy` for `x ≤ y` in the open.
    pub fn phi(&self, x: Point, y: Point) -> u32 {
        self.phi[x * self.obj.len() + y]
    }
}

/// A morphism over an open, given by its components at the points.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalMorphism {
    open: Open,
    comps: Vec<u32>,
}

impl LocalMorphism {
    pub fn open(&self) -> Open {
        self.open
    }

    pub fn at(&self, x: Point) -> u32 {
        self.comps[x]
    }

    pub fn comps(&self) -> &[u32] {
        &self.comps
    }
}

struct Inner {
    diagram: GroupoidDiagram,
    filter: Option<LocalObject>,
    reps: Mutex<HashMap<u32, Arc<Vec<LocalObject>>>>,
}

/// A strict prestack of groupoids.  With a filter, only objects isomorphic
/// to restrictions of one fixed global object are admitted.
#[derive(Clone)]
pub struct PrestackGroupoid {
    inner: Arc<Inner>,
}

impl std::fmt::Debug for PrestackGroupoid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrestackGroupoid").field("points", &self.space().len()).field("filtered", &self.inner.filter.is_some()).finish()
    }
}

impl PrestackGroupoid {
    pub fn new(diagram: GroupoidDiagram) -> Self {
        PrestackGroupoid { inner: Arc::new(Inner { diagram, filter: None, reps: Mutex::new(HashMap::new()) }) }
    }

    /// Sub-prestack of objects locally isomorphic to restrictions of `global`.
    pub fn restrictions_of(diagram: GroupoidDiagram, global: LocalObject) -> Result<Self> {
        let p = PrestackGroupoid::new(diagram);
        p.check_object(&global)?;
        if global.open != p.space().whole() {
            return Err(Error::BadObject("the generating object must be global".into()));
        }
        Ok(PrestackGroupoid {
            inner: Arc::new(Inner { diagram: p.inner.diagram.clone(), filter: Some(global), reps: Mutex::new(HashMap::new()) }),
        })
    }

    pub fn terminal(space: Arc<FiniteSpace>) -> Self {
        PrestackGroupoid::new(GroupoidDiagram::terminal(space))
    }

    pub fn diagram(&self) -> &GroupoidDiagram {
        &self.inner.diagram
    }

    pub fn space(&self) -> &Arc<FiniteSpace> {
        self.inner.diagram.space()
    }

    pub fn stalk(&self, x: Point) -> &FiniteGroupoid {
        self.inner.diagram.stalk(x)
    }

    pub fn is_filtered(&self) -> bool {
        self.inner.filter.is_some()
    }

    pub fn same_as(&self, other: &PrestackGroupoid) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || (self.inner.filter == other.inner.filter && self.inner.diagram == other.inner.diagram)
    }

    fn n(&self) -> usize {
        self.space().len()
    }

    fn res(&self, x: Point, y: Point) -> &Functor {
        self.inner.diagram.res(x, y)
    }

    fn check_open(&self, u: Open) -> Result<()> {
        self.space().check(u)
    }

    /// Validity in the underlying pseudo-limit, ignoring any filter.
    pub fn check_raw_object(&self, i: &LocalObject) -> Result<()> {
        let n = self.n();
        self.check_open(i.open)?;
        if i.obj.len() != n || i.phi.len() != n * n {
            return Err(Error::BadObject("object tables have the wrong size".into()));
        }
        let sp = self.space();
        for x in 0..n {
            if !i.open.contains(x) {
                if i.obj[x] != NONE {
                    return Err(Error::BadObject(format!("object given outside the open at `{}`", sp.name(x))));
                }
                continue;
            }
            if i.obj[x] as usize >= self.stalk(x).n_objects() {
                return Err(Error::BadObject(format!("unknown object at `{}`", sp.name(x))));
            }
        }
        for x in i.open.points() {
            for y in i.open.points() {
                if !sp.leq(x, y) {
                    continue;
                }
                let f = i.phi(x, y);
                let g = self.stalk(y);
                let s = self.res(x, y).obj[i.obj[x] as usize];
                if f as usize >= g.n_morphisms() || g.src(f) != s || g.tgt(f) != i.obj[y] {
                    return Err(Error::BadObject(format!(
                        "φ({}, {}) is not a morphism r(i_{}) → i_{}",
                        sp.name(x),
                        sp.name(y),
                        sp.name(x),
                        sp.name(y)
                    )));
                }
                if x == y && f != g.identity(i.obj[y]) {
                    return Err(Error::BadObject(format!("φ({0}, {0}) is not the identity", sp.name(x))));
                }
            }
        }
        for x in i.open.points() {
            for y in i.open.points() {
                if !sp.lt(x, y) {
                    continue;
                }
                for z in i.open.points() {
                    if !sp.lt(y, z) {
                        continue;
                    }
                    let g = self.stalk(z);
                    let rhs = g.compose(i.phi(y, z), self.res(y, z).mor[i.phi(x, y) as usize]);
                    if i.phi(x, z) != rhs {
                        return Err(Error::BadObject(format!(
                            "cocycle condition fails on {} < {} < {}",
                            sp.name(x),
                            sp.name(y),
                            sp.name(z)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check_object(&self, i: &LocalObject) -> Result<()> {
        self.check_raw_object(i)?;
        if !self.admits(i)? {
            return Err(Error::BadObject("object is not isomorphic to a restriction of the generating object".into()));
        }
        Ok(())
    }

    /// Whether a valid raw object passes the filter.
    pub fn admits(&self, i: &LocalObject) -> Result<bool> {
        match &self.inner.filter {
            None => Ok(true),
            Some(g) => {
                let r = self.restrict_object(g, i.open)?;
                Ok(self.first_hom(&r, i)?.is_some())
            }
        }
    }

    /// Builds an object from its values and the `φ` on covering relations.
    pub fn object_from_hasse(&self, u: Open, obj: Vec<u32>, hasse_phi: &HashMap<(Point, Point), u32>) -> Result<LocalObject> {
        self.check_open(u)?;
        let n = self.n();
        let sp = self.space().clone();
        if obj.len() != n {
            return Err(Error::BadObject("object table has the wrong size".into()));
        }
        let mut obj = obj;
        for x in 0..n {
            if !u.contains(x) {
                obj[x] = NONE;
            } else if obj[x] as usize >= self.stalk(x).n_objects() {
                return Err(Error::BadObject(format!("unknown object at `{}`", sp.name(x))));
            }
        }
        let mut phi = vec![NONE; n * n];
        for x in u.points() {
            phi[x * n + x] = self.stalk(x).identity(obj[x]);
        }
        let preds = self.hasse_preds(u);
        for &y in sp.linear_order() {
            if !u.contains(y) {
                continue;
            }
            for &w in &preds[y] {
                let f = *hasse_phi.get(&(w, y)).ok_or_else(|| Error::BadObject(format!("missing φ({}, {})", sp.name(w), sp.name(y))))?;
                phi[w * n + y] = f;
            }
            for x in u.points() {
                if !sp.lt(x, y) || preds[y].contains(&x) {
                    continue;
                }
                let mut val = NONE;
                for &w in &preds[y] {
                    if !sp.lt(x, w) {
                        continue;
                    }
                    let g = self.stalk(y);
                    let (a, b) = (phi[w * n + y], phi[x * n + w]);
                    if a as usize >= g.n_morphisms() || b as usize >= self.stalk(w).n_morphisms() {
                        return Err(Error::BadObject(format!("bad φ below `{}`", sp.name(y))));
                    }
                    if g.src(a) != self.res(w, y).obj[obj[w] as usize] {
                        return Err(Error::BadObject(format!("φ({}, {}) has the wrong source", sp.name(w), sp.name(y))));
                    }
                    let v = g.compose(a, self.res(w, y).mor[b as usize]);
                    if val != NONE && val != v {
                        return Err(Error::BadObject(format!("composites {} → {} disagree along different paths", sp.name(x), sp.name(y))));
                    }
                    val = v;
                }
                phi[x * n + y] = val;
            }
        }
        let i = LocalObject { open: u, obj, phi };
        self.check_object(&i)?;
        Ok(i)
    }

    /// Covering relations `w ⋖ y` inside `u`, indexed by `y`.
    fn hasse_preds(&self, u: Open) -> Vec<Vec<Point>> {
        let mut preds = vec![Vec::new(); self.n()];
        for &(w, y) in self.space().hasse() {
            if u.contains(w) && u.contains(y) {
                preds[y].push(w);
            }
        }
        preds
    }

    pub fn restrict_object(&self, i: &LocalObject, v: Open) -> Result<LocalObject> {
        if !v.is_subset(&i.open) {
            return Err(Error::NotOpen(format!("{:?} is not inside {:?}", v, i.open)));
        }
        let n = self.n();
        let mut r = LocalObject { open: v, obj: vec![NONE; n], phi: vec![NONE; n * n] };
        for x in v.points() {
            r.obj[x] = i.obj[x];
            for y in v.points() {
                r.phi[x * n + y] = i.phi[x * n + y];
            }
        }
        Ok(r)
    }

    pub fn restrict_morphism(&self, f: &LocalMorphism, v: Open) -> Result<LocalMorphism> {
        if !v.is_subset(&f.open) {
            return Err(Error::NotOpen(format!("{:?} is not inside {:?}", v, f.open)));
        }
        let comps = (0..self.n()).map(|x| if v.contains(x) { f.comps[x] } else { NONE }).collect();
        Ok(LocalMorphism { open: v, comps })
    }

    pub fn identity(&self, i: &LocalObject) -> LocalMorphism {
        let comps = (0..self.n()).map(|x| if i.open.contains(x) { self.stalk(x).identity(i.obj[x]) } else { NONE }).collect();
        LocalMorphism { open: i.open, comps }
    }

    /// `g ∘ f`.
    pub fn compose(&self, g: &LocalMorphism, f: &LocalMorphism) -> Result<LocalMorphism> {
        if g.open != f.open {
            return Err(Error::BadMorphism("composing morphisms over different opens".into()));
        }
        let mut comps = vec![NONE; self.n()];
        for x in f.open.points() {
            let s = self.stalk(x);
            if s.tgt(f.comps[x]) != s.src(g.comps[x]) {
                return Err(Error::BadMorphism(format!("morphisms are not composable at `{}`", self.space().name(x))));
            }
            comps[x] = s.compose(g.comps[x], f.comps[x]);
        }
        Ok(LocalMorphism { open: f.open, comps })
    }

    pub fn inverse(&self, f: &LocalMorphism) -> LocalMorphism {
        let comps = (0..self.n()).map(|x| if f.open.contains(x) { self.stalk(x).inv(f.comps[x]) } else { NONE }).collect();
        LocalMorphism { open: f.open, comps }
    }

    pub fn morphism_from_comps(&self, i: &LocalObject, j: &LocalObject, comps: Vec<u32>) -> Result<LocalMorphism> {
        let mut comps = comps;
        for (x, c) in comps.iter_mut().enumerate() {
            if !i.open.contains(x) {
                *c = NONE;
            }
        }
        let f = LocalMorphism { open: i.open, comps };
        if !self.is_morphism(&f, i, j) {
            return Err(Error::BadMorphism("components do not form a morphism".into()));
        }
        Ok(f)
    }

    pub fn is_morphism(&self, f: &LocalMorphism, i: &LocalObject, j: &LocalObject) -> bool {
        let u = i.open;
        if j.open != u || f.open != u || f.comps.len() != self.n() {
            return false;
        }
        for x in u.points() {
            let s = self.stalk(x);
            let c = f.comps[x];
            if c as usize >= s.n_morphisms() || s.src(c) != i.obj[x] || s.tgt(c) != j.obj[x] {
                return false;
            }
        }
        let sp = self.space();
        for x in u.points() {
            for y in u.points() {
                if !sp.lt(x, y) {
                    continue;
                }
                let s = self.stalk(y);
                let r = self.res(x, y).mor[f.comps[x] as usize];
                if s.compose(j.phi(x, y), r) != s.compose(f.comps[y], i.phi(x, y)) {
                    return false;
                }
            }
        }
        true
    }

    /// All morphisms `i → j`, in lexicographic order of their components at
    /// the minimal points of the open.
    pub fn homs(&self, i: &LocalObject, j: &LocalObject) -> Result<Vec<LocalMorphism>> {
        let mut out = Vec::new();
        self.hom_search(i, j, &mut |f| {
            out.push(f);
            true
        })?;
        Ok(out)
    }

    pub fn first_hom(&self, i: &LocalObject, j: &LocalObject) -> Result<Option<LocalMorphism>> {
        let mut out = None;
        self.hom_search(i, j, &mut |f| {
            out = Some(f);
            false
        })?;
        Ok(out)
    }

    /// Calls `visit` on each morphism until it returns false.
    fn hom_search(&self, i: &LocalObject, j: &LocalObject, visit: &mut dyn FnMut(LocalMorphism) -> bool) -> Result<()> {
        if i.open != j.open {
            return Err(Error::BadMorphism("objects live over different opens".into()));
        }
        let u = i.open;
        let sp = self.space().clone();
        let roots = sp.minimal_points(u);
        let mut comps = vec![NONE; self.n()];
        self.hom_rec(i, j, &roots, 0, &mut comps, visit, &sp);
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn hom_rec(
        &self,
        i: &LocalObject,
        j: &LocalObject,
        roots: &[Point],
        k: usize,
        comps: &mut Vec<u32>,
        visit: &mut dyn FnMut(LocalMorphism) -> bool,
        sp: &FiniteSpace,
    ) -> bool {
        if k == roots.len() {
            let f = LocalMorphism { open: i.open, comps: comps.clone() };
            debug_assert!(self.is_morphism(&f, i, j));
            return visit(f);
        }
        let r = roots[k];
        let g = self.stalk(r);
        for &m in g.hom(i.obj[r], j.obj[r]) {
            let saved = comps.clone();
            let mut ok = true;
            comps[r] = m;
            for y in i.open.points() {
                if !sp.lt(r, y) {
                    continue;
                }
                let s = self.stalk(y);
                let v = s.compose(s.compose(j.phi(r, y), self.res(r, y).mor[m as usize]), s.inv(i.phi(r, y)));
                if comps[y] != NONE && comps[y] != v {
                    ok = false;
                    break;
                }
                comps[y] = v;
            }
            if ok && !self.hom_rec(i, j, roots, k + 1, comps, visit, sp) {
                return false;
            }
            *comps = saved;
        }
        true
    }

    /// Raw objects over `u`.  With `gauge` set, roots take one object per
    /// component of their groupoid and `φ` is the identity along a spanning
    /// forest of covering relations, so that every isomorphism class is hit.
    /// Filters are not applied.
    pub fn raw_objects(&self, u: Open, gauge: bool) -> Result<Vec<LocalObject>> {
        self.check_open(u)?;
        let sp = self.space().clone();
        let pts: Vec<Point> = sp.linear_order().iter().copied().filter(|&x| u.contains(x)).collect();
        let preds = self.hasse_preds(u);
        let n = self.n();
        let mut s =
            ObjSearch { p: self, sp: &sp, pts, preds, gauge, n, obj: vec![NONE; n], phi: vec![NONE; n * n], open: u, out: Vec::new() };
        s.point(0)?;
        Ok(s.out)
    }

    /// Every object over `u` admitted by the filter.
    pub fn all_objects(&self, u: Open) -> Result<Vec<LocalObject>> {
        let mut out = Vec::new();
        for i in self.raw_objects(u, false)? {
            if self.admits(&i)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// One object per isomorphism class over `u`, cached.
    pub fn object_reps(&self, u: Open) -> Result<Arc<Vec<LocalObject>>> {
        if let Some(r) = self.inner.reps.lock().expect("cache lock").get(&u.bits()) {
            return Ok(r.clone());
        }
        let mut reps: Vec<LocalObject> = Vec::new();
        for i in self.raw_objects(u, true)? {
            let mut new = true;
            for r in &reps {
                if self.first_hom(r, &i)?.is_some() {
                    new = false;
                    break;
                }
            }
            if new && self.admits(&i)? {
                reps.push(i);
                if reps.len() > OBJECT_CLASS_CAP {
                    return Err(Error::CapExceeded(format!(
                        "more than {} isomorphism classes of objects over {}",
                        OBJECT_CLASS_CAP,
                        self.space().describe(u)
                    )));
                }
            }
        }
        let reps = Arc::new(reps);
        self.inner.reps.lock().expect("cache lock").insert(u.bits(), reps.clone());
        Ok(reps)
    }

    /// The representative isomorphic to `i`, with an isomorphism `i → rep`.
    pub fn find_rep(&self, i: &LocalObject) -> Result<Option<(usize, LocalMorphism)>> {
        for (k, r) in self.object_reps(i.open)?.iter().enumerate() {
            if let Some(f) = self.first_hom(i, r)? {
                return Ok(Some((k, f)));
            }
        }
        Ok(None)
    }

    /// Morphisms of `G_x` with source `o`.
    pub fn morphisms_from(&self, x: Point, o: u32) -> Vec<u32> {
        let g = self.stalk(x);
        (0..g.n_objects() as u32).flat_map(|t| g.hom(o, t).iter().copied()).collect()
    }

    /// Moves `i` along pointwise morphisms `m_x` out of `i_x`, returning the
    /// new object and the isomorphism `i → i'`.
    pub fn transport(&self, i: &LocalObject, m: &[u32]) -> Result<(LocalObject, LocalMorphism)> {
        let n = self.n();
        let mut j = LocalObject { open: i.open, obj: vec![NONE; n], phi: vec![NONE; n * n] };
        for x in i.open.points() {
            let s = self.stalk(x);
            if m[x] as usize >= s.n_morphisms() || s.src(m[x]) != i.obj[x] {
                return Err(Error::BadMorphism(format!("component at `{}` leaves the wrong object", self.space().name(x))));
            }
            j.obj[x] = s.tgt(m[x]);
        }
        let sp = self.space();
        for x in i.open.points() {
            for y in i.open.points() {
                if !sp.leq(x, y) {
                    continue;
                }
                let s = self.stalk(y);
                let back = s.inv(self.res(x, y).mor[m[x] as usize]);
                j.phi[x * n + y] = s.compose(s.compose(m[y], i.phi(x, y)), back);
            }
        }
        let f = LocalMorphism { open: i.open, comps: (0..n).map(|x| if i.open.contains(x) { m[x] } else { NONE }).collect() };
        debug_assert!(self.is_morphism(&f, i, &j));
        Ok((j, f))
    }

    /// Glues a descent datum: objects `i_k` over the parts and transitions
    /// `t(k0, k1) : i_{k0} → i_{k1}` over the overlaps.  Returns the glued
    /// raw object and isomorphisms `ε_k : i|U_k → i_k`.
    pub fn glue_objects(
        &self,
        cover: &Cover,
        objs: &[LocalObject],
        t: &dyn Fn(usize, usize) -> LocalMorphism,
    ) -> Result<(LocalObject, Vec<LocalMorphism>)> {
        let u = cover.target();
        let n = self.n();
        let sp = self.space();
        let chart: Vec<usize> = (0..n).map(|x| cover.parts().iter().position(|p| p.contains(x)).unwrap_or(usize::MAX)).collect();
        let tr = |a: usize, b: usize, x: Point| -> u32 {
            if a == b {
                self.stalk(x).identity(objs[a].obj[x])
            } else {
                t(a, b).comps[x]
            }
        };
        let mut g = LocalObject { open: u, obj: vec![NONE; n], phi: vec![NONE; n * n] };
        for x in u.points() {
            g.obj[x] = objs[chart[x]].obj[x];
        }
        for x in u.points() {
            for y in u.points() {
                if !sp.leq(x, y) {
                    continue;
                }
                let (kx, ky) = (chart[x], chart[y]);
                let s = self.stalk(y);
                g.phi[x * n + y] = s.compose(tr(kx, ky, y), objs[kx].phi(x, y));
            }
        }
        self.check_raw_object(&g).map_err(|e| Error::BadObject(format!("descent datum does not glue: {}", e)))?;
        let mut eps = Vec::with_capacity(cover.len());
        for (k, part) in cover.parts().iter().enumerate() {
            let comps = (0..n).map(|x| if part.contains(x) { tr(chart[x], k, x) } else { NONE }).collect();
            let e = LocalMorphism { open: *part, comps };
            let gi = self.restrict_object(&g, *part)?;
            if !self.is_morphism(&e, &gi, &objs[k]) {
                return Err(Error::BadObject(format!("transition data fail the cocycle condition on part {}", k)));
            }
            eps.push(e);
        }
        Ok((g, eps))
    }

    /// Glues morphisms `f_k : i|U_k → j|U_k` that agree on overlaps.
    pub fn glue_morphisms(&self, i: &LocalObject, j: &LocalObject, cover: &Cover, parts: &[LocalMorphism]) -> Result<LocalMorphism> {
        let mut comps = vec![NONE; self.n()];
        for (k, f) in parts.iter().enumerate() {
            for x in cover.parts()[k].points() {
                if comps[x] != NONE && comps[x] != f.comps[x] {
                    return Err(Error::BadMorphism(format!("local morphisms disagree at `{}`", self.space().name(x))));
                }
                comps[x] = f.comps[x];
            }
        }
        self.morphism_from_comps(i, j, comps)
    }

    /// The automorphism sheaf of `i` (trivial off its open), with the
    /// morphism id of every stalk element.
    pub fn aut_sheaf(&self, i: &LocalObject) -> Result<(SheafOfGroups, Vec<Vec<u32>>)> {
        let n = self.n();
        let mut stalks = Vec::with_capacity(n);
        let mut ids = Vec::with_capacity(n);
        for x in 0..n {
            if i.open.contains(x) {
                let (g, id) = self.stalk(x).aut_group(i.obj[x]);
                stalks.push(g);
                ids.push(id);
            } else {
                stalks.push(FiniteGroup::trivial());
                ids.push(Vec::new());
            }
        }
        let pos: Vec<HashMap<u32, Elem>> = ids.iter().map(|v| v.iter().enumerate().map(|(k, &f)| (f, k as Elem)).collect()).collect();
        let mut maps = Vec::new();
        for &(x, y) in self.space().hasse() {
            let m: Vec<Elem> = match (i.open.contains(x), i.open.contains(y)) {
                (true, _) => {
                    let s = self.stalk(y);
                    let f = i.phi(x, y);
                    ids[x].iter().map(|&a| pos[y][&s.compose(s.compose(f, self.res(x, y).mor[a as usize]), s.inv(f))]).collect()
                }
                (false, true) => vec![pos[y][&self.stalk(y).identity(i.obj[y])]],
                (false, false) => vec![0],
            };
            maps.push(((x, y), m));
        }
        Ok((SheafOfGroups::from_stalks(self.space().clone(), stalks, &maps)?, ids))
    }

    /// Reason the prestack is not a gerbe, checked on minimal opens.
    pub fn gerbe_failure(&self) -> Result<Option<String>> {
        let sp = self.space().clone();
        for x in 0..sp.len() {
            let reps = self.object_reps(sp.minimal_open(x)?)?;
            if reps.is_empty() {
                return Ok(Some(format!("no object over U_{}", sp.name(x))));
            }
            if reps.len() > 1 {
                return Ok(Some(format!("{} non-isomorphic objects over U_{}", reps.len(), sp.name(x))));
            }
        }
        Ok(None)
    }

    pub fn is_gerbe(&self) -> Result<bool> {
        Ok(self.gerbe_failure()?.is_none())
    }

    /// Descent for morphisms and objects over the minimal-open cover of
    /// every open.
    pub fn is_stack(&self) -> Result<StackReport> {
        let sp = self.space().clone();
        let covers: Vec<Cover> =
            sp.opens().into_iter().filter(|u| !u.is_empty()).map(|u| minimal_open_cover(&sp, u)).collect::<Result<_>>()?;
        self.is_stack_on(&covers)
    }

    pub fn is_stack_on(&self, covers: &[Cover]) -> Result<StackReport> {
        for cover in covers {
            if let Some(w) = self.morphism_descent_failure(cover)? {
                return Ok(StackReport { holds: false, witness: Some(w) });
            }
            if let Some(w) = self.object_descent_failure(cover)? {
                return Ok(StackReport { holds: false, witness: Some(w) });
            }
        }
        Ok(StackReport { holds: true, witness: None })
    }

    fn morphism_descent_failure(&self, cover: &Cover) -> Result<Option<String>> {
        let u = cover.target();
        let sp = self.space().clone();
        let reps = self.object_reps(u)?;
        for i in reps.iter() {
            for j in reps.iter() {
                let global = self.homs(i, j)?;
                let mut seen = HashSet::new();
                for f in &global {
                    let parts: Vec<LocalMorphism> = cover.parts().iter().map(|&p| self.restrict_morphism(f, p)).collect::<Result<_>>()?;
                    if !seen.insert(parts) {
                        return Ok(Some(format!("two morphisms over {} agree on every part", sp.describe(u))));
                    }
                }
                let locals: Vec<Vec<LocalMorphism>> = cover
                    .parts()
                    .iter()
                    .map(|&p| self.homs(&self.restrict_object(i, p)?, &self.restrict_object(j, p)?))
                    .collect::<Result<_>>()?;
                let mut count = 0usize;
                let mut failure = None;
                self.families(cover, &locals, 0, &mut Vec::new(), &mut |fam| {
                    count += 1;
                    if failure.is_none() && self.glue_morphisms(i, j, cover, fam).is_err() {
                        failure = Some(format!("compatible local morphisms over {} do not glue", sp.describe(u)));
                    }
                })?;
                if let Some(w) = failure {
                    return Ok(Some(w));
                }
                if count != global.len() {
                    return Ok(Some(format!("{} compatible families but {} morphisms over {}", count, global.len(), sp.describe(u))));
                }
            }
        }
        Ok(None)
    }

    fn families(
        &self,
        cover: &Cover,
        locals: &[Vec<LocalMorphism>],
        k: usize,
        chosen: &mut Vec<LocalMorphism>,
        visit: &mut dyn FnMut(&[LocalMorphism]),
    ) -> Result<()> {
        if k == locals.len() {
            visit(chosen);
            return Ok(());
        }
        for f in &locals[k] {
            let ok = chosen
                .iter()
                .enumerate()
                .all(|(l, g)| cover.parts()[l].points().all(|x| !cover.parts()[k].contains(x) || g.comps[x] == f.comps[x]));
            if ok {
                chosen.push(f.clone());
                self.families(cover, locals, k + 1, chosen, visit)?;
                chosen.pop();
            }
        }
        Ok(())
    }

    fn object_descent_failure(&self, cover: &Cover) -> Result<Option<String>> {
        let sp = self.space().clone();
        let mut failure = None;
        let mut count = 0usize;
        self.descent_data(cover, &mut |objs, trans| {
            count += 1;
            if count > DESCENT_CAP {
                return Err(Error::CapExceeded(format!("more than {} descent data", DESCENT_CAP)));
            }
            let t = |a: usize, b: usize| trans[&(a, b)].clone();
            let (g, _) = self.glue_objects(cover, objs, &t)?;
            if !self.admits(&g)? {
                failure = Some(format!(
                    "descent datum over {} with parts {} glues to an object outside the prestack",
                    sp.describe(cover.target()),
                    cover.parts().iter().map(|p| sp.describe(*p)).collect::<Vec<_>>().join(", ")
                ));
                return Ok(false);
            }
            Ok(true)
        })?;
        Ok(failure)
    }

    /// Enumerates descent data over `cover` whose objects are class
    /// representatives.  `visit` returns false to stop.
    pub fn descent_data(
        &self,
        cover: &Cover,
        visit: &mut dyn FnMut(&[LocalObject], &HashMap<(usize, usize), LocalMorphism>) -> Result<bool>,
    ) -> Result<()> {
        let parts = cover.parts().to_vec();
        let reps: Vec<Arc<Vec<LocalObject>>> = parts.iter().map(|&p| self.object_reps(p)).collect::<Result<_>>()?;
        let mut choice = vec![0usize; parts.len()];
        if reps.iter().any(|r| r.is_empty()) {
            return Ok(());
        }
        loop {
            let objs: Vec<LocalObject> = choice.iter().enumerate().map(|(k, &c)| reps[k][c].clone()).collect();
            let pairs: Vec<(usize, usize)> = (0..parts.len())
                .flat_map(|a| ((a + 1)..parts.len()).map(move |b| (a, b)))
                .filter(|&(a, b)| !cover.face(&[a, b]).map(|o| o.is_empty()).unwrap_or(true))
                .collect();
            let mut options = Vec::with_capacity(pairs.len());
            for &(a, b) in &pairs {
                let v = cover.face(&[a, b])?;
                options.push(self.homs(&self.restrict_object(&objs[a], v)?, &self.restrict_object(&objs[b], v)?)?);
            }
            let mut trans = HashMap::new();
            if !self.transitions(cover, &objs, &pairs, &options, 0, &mut trans, visit)? {
                return Ok(());
            }
            let mut k = 0;
            loop {
                if k == parts.len() {
                    return Ok(());
                }
                choice[k] += 1;
                if choice[k] < reps[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn transitions(
        &self,
        cover: &Cover,
        objs: &[LocalObject],
        pairs: &[(usize, usize)],
        options: &[Vec<LocalMorphism>],
        k: usize,
        trans: &mut HashMap<(usize, usize), LocalMorphism>,
        visit: &mut dyn FnMut(&[LocalObject], &HashMap<(usize, usize), LocalMorphism>) -> Result<bool>,
    ) -> Result<bool> {
        if k == pairs.len() {
            let mut full = trans.clone();
            for (a, o) in objs.iter().enumerate() {
                full.insert((a, a), self.identity(o));
                for b in 0..objs.len() {
                    let v = cover.face(&[a, b])?;
                    if v.is_empty() {
                        let e = LocalMorphism { open: v, comps: vec![NONE; self.n()] };
                        full.insert((a, b), e);
                    }
                }
            }
            for &(a, b) in pairs {
                let inv = self.inverse(&trans[&(a, b)]);
                full.insert((b, a), inv);
            }
            return visit(objs, &full);
        }
        let (a, b) = pairs[k];
        for g in &options[k] {
            let mut ok = true;
            for c in 0..a {
                let w = cover.face(&[c, a, b])?;
                if w.is_empty() {
                    continue;
                }
                let (ca, cb) = (&trans[&(c, a)], &trans[&(c, b)]);
                for x in w.points() {
                    let s = self.stalk(x);
                    if s.compose(g.comps[x], ca.comps[x]) != cb.comps[x] {
                        ok = false;
                    }
                }
            }
            if ok {
                trans.insert((a, b), g.clone());
                if !self.transitions(cover, objs, pairs, options, k + 1, trans, visit)? {
                    return Ok(false);
                }
                trans.remove(&(a, b));
            }
        }
        Ok(true)
    }

    /// Whether `Hom(i, j)` is a bitorsor: `Aut(j)` acts simply transitively
    /// on the left and `Aut(i)` on the right whenever morphisms exist.
    pub fn is_bitorsor(&self, i: &LocalObject, j: &LocalObject) -> Result<bool> {
        let homs = self.homs(i, j)?;
        if homs.is_empty() {
            return Ok(true);
        }
        let (ai, aj) = (self.homs(i, i)?, self.homs(j, j)?);
        let set: HashSet<&LocalMorphism> = homs.iter().collect();
        let f = &homs[0];
        let mut left = HashSet::new();
        for a in &aj {
            let g = self.compose(a, f)?;
            if !set.contains(&g) {
                return Ok(false);
            }
            left.insert(g);
        }
        let mut right = HashSet::new();
        for a in &ai {
            let g = self.compose(f, a)?;
            if !set.contains(&g) {
                return Ok(false);
            }
            right.insert(g);
        }
        Ok(left.len() == homs.len() && right.len() == homs.len() && aj.len() == homs.len() && ai.len() == homs.len())
    }

    /// `Ad(g) : Aut(i) → Aut(j)` as a table of indices into `homs(i, i)`
    /// and `homs(j, j)`.
    pub fn ad_table(&self, g: &LocalMorphism, i: &LocalObject, j: &LocalObject) -> Result<Vec<usize>> {
        if !self.is_morphism(g, i, j) {
            return Err(Error::BadMorphism("Ad needs a morphism i → j".into()));
        }
        let (ai, aj) = (self.homs(i, i)?, self.homs(j, j)?);
        let gi = self.inverse(g);
        ai.iter()
            .map(|h| {
                let c = self.compose(&self.compose(g, h)?, &gi)?;
                aj.iter().position(|k| *k == c).ok_or_else(|| Error::BadMorphism("conjugate is not an automorphism".into()))
            })
            .collect()
    }
}

struct ObjSearch<'a> {
    p: &'a PrestackGroupoid,
    sp: &'a FiniteSpace,
    pts: Vec<Point>,
    preds: Vec<Vec<Point>>,
    gauge: bool,
    n: usize,
    obj: Vec<u32>,
    phi: Vec<u32>,
    open: Open,
    out: Vec<LocalObject>,
}

impl ObjSearch<'_> {
    fn point(&mut self, k: usize) -> Result<()> {
        if k == self.pts.len() {
            if self.out.len() >= OBJECT_ENUM_CAP {
                return Err(Error::CapExceeded(format!("more than {} objects", OBJECT_ENUM_CAP)));
            }
            self.out.push(LocalObject { open: self.open, obj: self.obj.clone(), phi: self.phi.clone() });
            return Ok(());
        }
        let y = self.pts[k];
        let g = self.p.stalk(y);
        let choices: Vec<u32> = match (self.gauge, self.preds[y].first()) {
            (true, Some(&w)) => vec![self.p.res(w, y).obj[self.obj[w] as usize]],
            (true, None) => {
                let comp = g.components();
                let mut seen = HashSet::new();
                (0..g.n_objects() as u32).filter(|&o| seen.insert(comp[o as usize])).collect()
            }
            (false, _) => (0..g.n_objects() as u32).collect(),
        };
        for o in choices {
            self.obj[y] = o;
            self.phi[y * self.n + y] = g.identity(o);
            self.edge(k, 0)?;
        }
        self.obj[y] = NONE;
        self.phi[y * self.n + y] = NONE;
        Ok(())
    }

    fn edge(&mut self, k: usize, e: usize) -> Result<()> {
        let y = self.pts[k];
        if e == self.preds[y].len() {
            if self.fill(k) {
                self.point(k + 1)?;
            }
            return Ok(());
        }
        let w = self.preds[y][e];
        let g = self.p.stalk(y);
        let src = self.p.res(w, y).obj[self.obj[w] as usize];
        if self.gauge && e == 0 {
            self.phi[w * self.n + y] = g.identity(self.obj[y]);
            return self.edge(k, e + 1);
        }
        for &f in g.hom(src, self.obj[y]) {
            self.phi[w * self.n + y] = f;
            self.edge(k, e + 1)?;
        }
        Ok(())
    }

    /// Fills `φ_xy` for non-covering `x < y` and checks path independence.
    fn fill(&mut self, k: usize) -> bool {
        let y = self.pts[k];
        let g = self.p.stalk(y);
        for &x in &self.pts[..k] {
            if !self.sp.lt(x, y) || self.preds[y].contains(&x) {
                continue;
            }
            let mut val = NONE;
            for &w in &self.preds[y] {
                if !self.sp.lt(x, w) {
                    continue;
                }
                let v = g.compose(self.phi[w * self.n + y], self.p.res(w, y).mor[self.phi[x * self.n + w] as usize]);
                if val != NONE && val != v {
                    return false;
                }
                val = v;
            }
            self.phi[x * self.n + y] = val;
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackReport {
    pub holds: bool,
    pub witness: Option<String>,
}

/// A strict morphism of prestacks: functors `F_x : G_x → H_x` commuting
/// with the restriction functors on the nose.
#[derive(Clone, Debug)]
pub struct GerbeMorphism {
    source: PrestackGroupoid,
    target: PrestackGroupoid,
    functors: Vec<Functor>,
}

impl GerbeMorphism {
    pub fn new(source: PrestackGroupoid, target: PrestackGroupoid, functors: Vec<Functor>) -> Result<Self> {
        let sp = source.space().clone();
        if sp.id() != target.space().id() {
            return Err(Error::SpaceMismatch);
        }
        if functors.len() != sp.len() {
            return Err(Error::BadFunctor("one functor per point is required".into()));
        }
        for (x, f) in functors.iter().enumerate() {
            f.check(source.stalk(x), target.stalk(x)).map_err(|e| Error::BadFunctor(format!("at `{}`: {}", sp.name(x), e)))?;
        }
        for &(x, y) in sp.hasse() {
            let a = source.res(x, y).then(&functors[y]);
            let b = functors[x].then(target.res(x, y));
            if a != b {
                return Err(Error::BadFunctor(format!("functors do not commute with restriction {} → {}", sp.name(x), sp.name(y))));
            }
        }
        Ok(GerbeMorphism { source, target, functors })
    }

    pub fn identity(p: &PrestackGroupoid) -> Self {
        let functors = p.diagram().stalks().iter().map(Functor::identity).collect();
        GerbeMorphism { source: p.clone(), target: p.clone(), functors }
    }

    pub fn to_terminal(p: &PrestackGroupoid) -> Self {
        let t = PrestackGroupoid::terminal(p.space().clone());
        let functors =
            p.diagram().stalks().iter().map(|g| Functor { obj: vec![0; g.n_objects()], mor: vec![0; g.n_morphisms()] }).collect();
        GerbeMorphism { source: p.clone(), target: t, functors }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &GerbeMorphism) -> Result<GerbeMorphism> {
        let functors = self.functors.iter().zip(&next.functors).map(|(a, b)| a.then(b)).collect();
        GerbeMorphism::new(self.source.clone(), next.target.clone(), functors)
    }

    pub fn source(&self) -> &PrestackGroupoid {
        &self.source
    }

    pub fn target(&self) -> &PrestackGroupoid {
        &self.target
    }

    pub fn functor(&self, x: Point) -> &Functor {
        &self.functors[x]
    }

    pub fn apply_object(&self, i: &LocalObject) -> LocalObject {
        let n = i.obj.len();
        let mut j = LocalObject { open: i.open, obj: vec![NONE; n], phi: vec![NONE; n * n] };
        for x in i.open.points() {
            j.obj[x] = self.functors[x].obj[i.obj[x] as usize];
            for y in i.open.points() {
                let f = i.phi[x * n + y];
                if f != NONE {
                    j.phi[x * n + y] = self.functors[y].mor[f as usize];
                }
            }
        }
        j
    }

    pub fn apply_morphism(&self, f: &LocalMorphism) -> LocalMorphism {
        let comps = f.comps.iter().enumerate().map(|(x, &c)| if c == NONE { NONE } else { self.functors[x].mor[c as usize] }).collect();
        LocalMorphism { open: f.open, comps }
    }

    /// Reason the morphism is not a weak epimorphism, tested on minimal
    /// opens: local essential surjectivity and surjectivity on stalks of
    /// hom sheaves.
    pub fn weak_epi_failure(&self) -> Option<String> {
        let sp = self.source.space();
        for x in 0..sp.len() {
            let (g, h, f) = (self.source.stalk(x), self.target.stalk(x), &self.functors[x]);
            for q in 0..h.n_objects() as u32 {
                if !(0..g.n_objects()).any(|o| !h.hom(f.obj[o], q).is_empty()) {
                    return Some(format!("object `{}` over U_{} is not locally in the image", h.obj_label(q), sp.name(x)));
                }
            }
            for a in 0..g.n_objects() as u32 {
                for b in 0..g.n_objects() as u32 {
                    let img: HashSet<u32> = g.hom(a, b).iter().map(|&m| f.mor[m as usize]).collect();
                    if img.len() != h.hom(f.obj[a as usize], f.obj[b as usize]).len() {
                        return Some(format!("Hom({}, {}) over U_{} does not surject", g.obj_label(a), g.obj_label(b), sp.name(x)));
                    }
                }
            }
        }
        None
    }

    pub fn is_weak_epi(&self) -> bool {
        self.weak_epi_failure().is_none()
    }

    /// Whether the map on hom sets over `u` is surjective for every pair of
    /// objects over `u`.  Surjectivity is invariant under isomorphism, so
    /// class representatives suffice.
    pub fn homs_surjective_over(&self, u: Open) -> Result<bool> {
        let objs = self.source.object_reps(u)?;
        for i in objs.iter() {
            for j in objs.iter() {
                let img: HashSet<LocalMorphism> = self.source.homs(i, j)?.iter().map(|f| self.apply_morphism(f)).collect();
                let all = self.target.homs(&self.apply_object(i), &self.apply_object(j))?;
                if img.len() != all.len() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Fully faithful and essentially surjective on every minimal open.
    pub fn is_weak_equivalence(&self) -> bool {
        if self.weak_epi_failure().is_some() {
            return false;
        }
        let sp = self.source.space();
        (0..sp.len()).all(|x| {
            let (g, h, f) = (self.source.stalk(x), self.target.stalk(x), &self.functors[x]);
            (0..g.n_objects() as u32)
                .all(|a| (0..g.n_objects() as u32).all(|b| g.hom(a, b).len() == h.hom(f.obj[a as usize], f.obj[b as usize]).len()))
        })
    }

    /// Object-wise kernel.
    pub fn kernel(&self) -> NormalSubgroupoid {
        let members = (0..self.source.space().len())
            .map(|x| {
                let (g, h, f) = (self.source.stalk(x), self.target.stalk(x), &self.functors[x]);
                (0..g.n_objects() as u32)
                    .map(|o| {
                        let id = h.identity(f.obj[o as usize]);
                        g.aut(o).iter().copied().filter(|&m| f.mor[m as usize] == id).collect()
                    })
                    .collect()
            })
            .collect();
        NormalSubgroupoid::new(&self.source, members).expect("kernels are normal")
    }
}

/// Per point and object, a subgroup of automorphisms (as sorted morphism ids).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalSubgroupoid {
    members: Vec<Vec<Vec<u32>>>,
}

impl NormalSubgroupoid {
    pub fn new(p: &PrestackGroupoid, members: Vec<Vec<Vec<u32>>>) -> Result<Self> {
        let sp = p.space();
        let mut members = members;
        if members.len() != sp.len() {
            return Err(Error::NotNormal("one family per point is required".into()));
        }
        for (x, fam) in members.iter_mut().enumerate() {
            let g = p.stalk(x);
            if fam.len() != g.n_objects() {
                return Err(Error::NotNormal(format!("one subgroup per object is required over U_{}", sp.name(x))));
            }
            for (o, sub) in fam.iter_mut().enumerate() {
                sub.sort_unstable();
                sub.dedup();
                let set: HashSet<u32> = sub.iter().copied().collect();
                let o = o as u32;
                if !set.contains(&g.identity(o)) || sub.iter().any(|&m| g.src(m) != o || g.tgt(m) != o) {
                    return Err(Error::NotSubgroup(format!("N({}) over U_{}", g.obj_label(o), sp.name(x))));
                }
                for &a in sub.iter() {
                    if !set.contains(&g.inv(a)) || sub.iter().any(|&b| !set.contains(&g.compose(a, b))) {
                        return Err(Error::NotSubgroup(format!("N({}) over U_{}", g.obj_label(o), sp.name(x))));
                    }
                }
            }
        }
        for x in 0..sp.len() {
            let g = p.stalk(x);
            for a in 0..g.n_objects() as u32 {
                for b in 0..g.n_objects() as u32 {
                    for &h in g.hom(a, b) {
                        let mut img: Vec<u32> = members[x][a as usize].iter().map(|&n| g.ad(h, n)).collect();
                        img.sort_unstable();
                        if img != members[x][b as usize] {
                            return Err(Error::NotNormal(format!(
                                "Ad({}) does not carry N({}) onto N({}) over U_{}",
                                g.label(h),
                                g.obj_label(a),
                                g.obj_label(b),
                                sp.name(x)
                            )));
                        }
                    }
                }
            }
        }
        for &(x, y) in sp.hasse() {
            let r = p.res(x, y);
            for o in 0..p.stalk(x).n_objects() {
                let target = &members[y][r.obj[o] as usize];
                if members[x][o].iter().any(|&m| target.binary_search(&r.mor[m as usize]).is_err()) {
                    return Err(Error::NotNormal(format!(
                        "restriction {} → {} leaves the subgroup of `{}`",
                        sp.name(x),
                        sp.name(y),
                        p.stalk(x).obj_label(o as u32)
                    )));
                }
            }
        }
        Ok(NormalSubgroupoid { members })
    }

    pub fn trivial(p: &PrestackGroupoid) -> Self {
        let members = p.diagram().stalks().iter().map(|g| (0..g.n_objects() as u32).map(|o| vec![g.identity(o)]).collect()).collect();
        NormalSubgroupoid { members }
    }

    pub fn members(&self, x: Point, o: u32) -> &[u32] {
        &self.members[x][o as usize]
    }

    pub fn all_members(&self) -> &[Vec<Vec<u32>>] {
        &self.members
    }

    pub fn contains(&self, x: Point, o: u32, m: u32) -> bool {
        self.members[x][o as usize].binary_search(&m).is_ok()
    }

    pub fn is_subset(&self, other: &NormalSubgroupoid) -> bool {
        self.members.iter().zip(&other.members).all(|(a, b)| a.iter().zip(b).all(|(s, t)| s.iter().all(|m| t.binary_search(m).is_ok())))
    }
}

/// Automorphisms whose restrictions to every smaller minimal open are central.
pub fn center(p: &PrestackGroupoid) -> NormalSubgroupoid {
    let sp = p.space().clone();
    let members = (0..sp.len())
        .map(|x| {
            let g = p.stalk(x);
            (0..g.n_objects() as u32)
                .map(|o| {
                    g.aut(o)
                        .iter()
                        .copied()
                        .filter(|&a| {
                            (0..sp.len()).filter(|&y| sp.leq(x, y)).all(|y| {
                                let (s, r) = (p.stalk(y), p.res(x, y));
                                let b = r.mor[a as usize];
                                s.aut(r.obj[o as usize]).iter().all(|&c| s.compose(b, c) == s.compose(c, b))
                            })
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    NormalSubgroupoid::new(p, members).expect("the center is normal")
}

/// A central subgroupoid presented as an abelian band with identifications
/// `χ_{x,o} : N_x → Aut_x(o)`.
#[derive(Clone, Debug)]
pub struct CentralBand {
    band: SheafOfGroups,
    chi: Vec<Vec<Vec<u32>>>,
    chi_inv: Vec<Vec<HashMap<u32, Elem>>>,
}

impl CentralBand {
    pub fn new(p: &PrestackGroupoid, band: SheafOfGroups, chi: Vec<Vec<Vec<u32>>>) -> Result<Self> {
        let sp = p.space().clone();
        if band.space().id() != sp.id() {
            return Err(Error::SpaceMismatch);
        }
        if !band.is_abelian() {
            return Err(Error::NotAbelian);
        }
        if chi.len() != sp.len() {
            return Err(Error::NotCentral("one identification per point is required".into()));
        }
        let mut chi_inv = Vec::with_capacity(sp.len());
        for x in 0..sp.len() {
            let (g, nx) = (p.stalk(x), band.stalk(x));
            if chi[x].len() != g.n_objects() {
                return Err(Error::NotCentral(format!("one identification per object over U_{}", sp.name(x))));
            }
            let mut invs = Vec::new();
            for o in 0..g.n_objects() as u32 {
                let c = &chi[x][o as usize];
                if c.len() != nx.order() || c.iter().any(|&m| m as usize >= g.n_morphisms() || g.src(m) != o || g.tgt(m) != o) {
                    return Err(Error::NotCentral(format!("χ at `{}` over U_{} is malformed", g.obj_label(o), sp.name(x))));
                }
                for a in nx.elements() {
                    for b in nx.elements() {
                        if c[nx.mul(a, b) as usize] != g.compose(c[a as usize], c[b as usize]) {
                            return Err(Error::NotHomomorphism(format!("χ at `{}` over U_{}", g.obj_label(o), sp.name(x))));
                        }
                    }
                    if g.aut(o).iter().any(|&h| g.compose(h, c[a as usize]) != g.compose(c[a as usize], h)) {
                        return Err(Error::NotCentral(format!(
                            "χ({}) is not central in Aut({}) over U_{}",
                            nx.label(a),
                            g.obj_label(o),
                            sp.name(x)
                        )));
                    }
                }
                let inv: HashMap<u32, Elem> = c.iter().enumerate().map(|(k, &m)| (m, k as Elem)).collect();
                if inv.len() != c.len() {
                    return Err(Error::NotCentral(format!("χ at `{}` over U_{} is not injective", g.obj_label(o), sp.name(x))));
                }
                invs.push(inv);
            }
            for a in 0..g.n_objects() as u32 {
                for b in 0..g.n_objects() as u32 {
                    for &h in g.hom(a, b) {
                        for k in nx.elements() {
                            if g.ad(h, chi[x][a as usize][k as usize]) != chi[x][b as usize][k as usize] {
                                return Err(Error::NotCentral(format!(
                                    "Ad({}) moves χ({}) over U_{}",
                                    g.label(h),
                                    nx.label(k),
                                    sp.name(x)
                                )));
                            }
                        }
                    }
                }
            }
            chi_inv.push(invs);
        }
        for &(x, y) in sp.hasse() {
            let r = p.res(x, y);
            let rho = band.comp(x, y);
            for o in 0..p.stalk(x).n_objects() {
                for k in band.stalk(x).elements() {
                    if r.mor[chi[x][o][k as usize] as usize] != chi[y][r.obj[o] as usize][rho[k as usize] as usize] {
                        return Err(Error::NotCentral(format!("χ does not commute with restriction {} → {}", sp.name(x), sp.name(y))));
                    }
                }
            }
        }
        Ok(CentralBand { band, chi, chi_inv })
    }

    pub fn band(&self) -> &SheafOfGroups {
        &self.band
    }

    pub fn chi(&self, x: Point, o: u32, k: Elem) -> u32 {
        self.chi[x][o as usize][k as usize]
    }

    pub fn chi_inv(&self, x: Point, o: u32, m: u32) -> Option<Elem> {
        self.chi_inv[x][o as usize].get(&m).copied()
    }

    /// Image subgroups as a normal subgroupoid.
    pub fn image(&self, p: &PrestackGroupoid) -> NormalSubgroupoid {
        let members = self.chi.iter().map(|fam| fam.to_vec()).collect();
        NormalSubgroupoid::new(p, members).expect("central images are normal")
    }

    /// `χ_i(s)` for a band section `s` over `v ⊆ open(i)`.
    pub fn local(&self, i: &LocalObject, v: Open, s: u32) -> Result<LocalMorphism> {
        let sec = self.band.sections(v)?;
        let comps = (0..i.obj.len()).map(|x| if v.contains(x) { self.chi(x, i.obj[x], sec.at(s, x)) } else { NONE }).collect();
        Ok(LocalMorphism { open: v, comps })
    }

    /// `χ_i⁻¹(f)` as a band section over the open of `f`, if `f` lies in the
    /// central subgroupoid.
    pub fn local_inv(&self, i: &LocalObject, f: &LocalMorphism) -> Result<Option<u32>> {
        let v = f.open;
        let mut comps = Vec::new();
        for x in v.points() {
            match self.chi_inv(x, i.obj[x], f.comps[x]) {
                Some(k) => comps.push(k),
                None => return Ok(None),
            }
        }
        Ok(self.band.sections(v)?.find(&comps))
    }
}

/// Transports `n(o⁰)` at a base object of each point to a band sheaf.
pub fn central_as_sheaf(p: &PrestackGroupoid, n: &NormalSubgroupoid) -> Result<CentralBand> {
    let sp = p.space().clone();
    if !n.is_subset(&center(p)) {
        return Err(Error::NotCentral("the subgroupoid is not contained in the center".into()));
    }
    let mut stalks = Vec::new();
    let mut chi: Vec<Vec<Vec<u32>>> = Vec::new();
    for x in 0..sp.len() {
        let g = p.stalk(x);
        if !g.is_connected() {
            return Err(Error::BadDiagram(format!("the groupoid over U_{} is not connected", sp.name(x))));
        }
        let (aut, ids) = g.aut_group(0);
        let pos: Vec<Elem> = n.members(x, 0).iter().map(|m| ids.iter().position(|i| i == m).expect("member") as Elem).collect();
        let (sub, emb) = aut.subgroup(&pos)?;
        let base: Vec<u32> = emb.iter().map(|&e| ids[e as usize]).collect();
        let fam = (0..g.n_objects() as u32)
            .map(|o| {
                let h = g.hom(0, o)[0];
                base.iter().map(|&m| g.ad(h, m)).collect()
            })
            .collect();
        stalks.push(sub);
        chi.push(fam);
    }
    let mut maps = Vec::new();
    for &(x, y) in sp.hasse() {
        let r = p.res(x, y);
        let o = r.obj[0] as usize;
        let m: Vec<Elem> = chi[x][0]
            .iter()
            .map(|&a| {
                let b = r.mor[a as usize];
                chi[y][o].iter().position(|&c| c == b).map(|k| k as Elem)
            })
            .collect::<Option<_>>()
            .ok_or_else(|| Error::NotNormal(format!("restriction {} → {} leaves the subgroupoid", sp.name(x), sp.name(y))))?;
        maps.push(((x, y), m));
    }
    let band = SheafOfGroups::from_stalks(sp, stalks, &maps)?;
    CentralBand::new(p, band, chi)
}

/// A weak epimorphism `F : G → H` whose kernel is the image of a band.
#[derive(Clone, Debug)]
pub struct CentralExtensionOfGerbes {
    band: CentralBand,
    proj: GerbeMorphism,
}

impl CentralExtensionOfGerbes {
    pub fn new(band: CentralBand, proj: GerbeMorphism) -> Result<Self> {
        let p = proj.source();
        let sp = p.space().clone();
        let ker = proj.kernel();
        for x in 0..sp.len() {
            for o in 0..p.stalk(x).n_objects() as u32 {
                let mut img: Vec<u32> = band.chi[x][o as usize].clone();
                img.sort_unstable();
                if img != ker.members(x, o) {
                    return Err(Error::NotCentralExtension(format!(
                        "kernel at `{}` over U_{} differs from the band",
                        p.stalk(x).obj_label(o),
                        sp.name(x)
                    )));
                }
            }
        }
        if let Some(w) = proj.weak_epi_failure() {
            return Err(Error::NotCentralExtension(format!("not a weak epimorphism: {}", w)));
        }
        Ok(CentralExtensionOfGerbes { band, proj })
    }

    pub fn band(&self) -> &CentralBand {
        &self.band
    }

    pub fn total(&self) -> &PrestackGroupoid {
        self.proj.source()
    }

    pub fn base(&self) -> &PrestackGroupoid {
        self.proj.target()
    }

    pub fn proj(&self) -> &GerbeMorphism {
        &self.proj
    }
}

/// The gerbe of torsors under a sheaf of groups.
pub fn torsor_gerbe(g: &SheafOfGroups) -> PrestackGroupoid {
    PrestackGroupoid::new(GroupoidDiagram::from_sheaf(g))
}

/// The global object of a torsor gerbe corresponding to a torsor.
pub fn object_from_torsor(p: &PrestackGroupoid, t: &Torsor) -> Result<LocalObject> {
    let sp = p.space().clone();
    let hasse: HashMap<(Point, Point), u32> = t.hasse_phi().into_iter().collect();
    p.object_from_hasse(sp.whole(), vec![0; sp.len()], &hasse)
}

/// The torsor corresponding to a global object of a torsor gerbe.
pub fn torsor_from_object(g: &SheafOfGroups, i: &LocalObject) -> Result<Torsor> {
    let hasse: HashMap<(Point, Point), Elem> = g.space().hasse().iter().map(|&(x, y)| ((x, y), i.phi(x, y))).collect();
    Torsor::new(g, &hasse)
}

/// `1 → N → Tors G → Tors H → 1` from a central extension of sheaves.
pub fn extension_of_torsor_gerbes(ext: &CentralExtension) -> Result<CentralExtensionOfGerbes> {
    let total = torsor_gerbe(&ext.g);
    let base = torsor_gerbe(&ext.h);
    let sp = ext.g.space().clone();
    let functors = (0..sp.len()).map(|x| Functor { obj: vec![0], mor: ext.proj.at(x).to_vec() }).collect();
    let proj = GerbeMorphism::new(total.clone(), base, functors)?;
    let chi = (0..sp.len()).map(|x| vec![ext.inc.at(x).to_vec()]).collect();
    let band = CentralBand::new(&total, ext.n.clone(), chi)?;
    CentralExtensionOfGerbes::new(band, proj)
}

/// The abelian gerbe glued from trivial pieces over `cover` along the
/// 2-cocycle `c`, as a central extension of the terminal gerbe.
pub fn gerbe_from_2cocycle(band: &SheafOfGroups, cover: &Cover, c: &Cochain) -> Result<CentralExtensionOfGerbes> {
    if !band.is_abelian() {
        return Err(Error::NotAbelian);
    }
    if c.degree() != 2 || !crate::cech::is_cocycle(c)? {
        return Err(Error::NotCocycle);
    }
    let sp = band.space().clone();
    let charts: Vec<Vec<usize>> = (0..sp.len()).map(|x| (0..cover.len()).filter(|&k| cover.parts()[k].contains(x)).collect()).collect();
    let value = |x: Point, k: usize, l: usize, m: usize| -> Elem {
        let t = [k, l, m];
        let sec = band.sections(c.face(&t)).expect("face is open");
        sec.at(c.value(&t), x)
    };
    let mut stalks = Vec::new();
    for x in 0..sp.len() {
        let nx = band.stalk(x);
        let ks = &charts[x];
        let (q, m) = (ks.len() as u32, nx.order() as u32);
        let id = |a: u32, b: u32, e: u32| (a * q + b) * m + e;
        let mut mors = Vec::new();
        for a in 0..q {
            for b in 0..q {
                for e in nx.elements() {
                    mors.push((a, b, nx.label(e).to_string()));
                }
            }
        }
        let labels = ks.iter().map(|k| k.to_string()).collect();
        let g = FiniteGroupoid::new(labels, mors, |g, f| {
            let (fa, fb, fe) = (f / m / q, (f / m) % q, f % m);
            let (_, gb, ge) = (g / m / q, (g / m) % q, g % m);
            let v = value(x, ks[fa as usize], ks[fb as usize], ks[gb as usize]);
            id(fa, gb, nx.mul(nx.mul(ge, fe), v))
        })?;
        stalks.push(g);
    }
    let mut hasse = Vec::new();
    for &(x, y) in sp.hasse() {
        let (kx, ky) = (&charts[x], &charts[y]);
        let (qy, my) = (ky.len() as u32, band.stalk(y).order() as u32);
        let pos = |k: usize| ky.iter().position(|&l| l == k).expect("charts grow upward") as u32;
        let obj = kx.iter().map(|&k| pos(k)).collect();
        let rho = band.comp(x, y);
        let mx = band.stalk(x).order() as u32;
        let qx = kx.len() as u32;
        let mor = (0..qx * qx * mx)
            .map(|f| {
                let (a, b, e) = (f / mx / qx, (f / mx) % qx, f % mx);
                (pos(kx[a as usize]) * qy + pos(kx[b as usize])) * my + rho[e as usize]
            })
            .collect();
        hasse.push(((x, y), Functor { obj, mor }));
    }
    let total = PrestackGroupoid::new(GroupoidDiagram::new(sp.clone(), stalks, hasse)?);
    let proj = GerbeMorphism::to_terminal(&total);
    let chi = (0..sp.len())
        .map(|x| {
            let nx = band.stalk(x);
            let ks = &charts[x];
            let (q, m) = (ks.len() as u32, nx.order() as u32);
            (0..q)
                .map(|a| {
                    let k = ks[a as usize];
                    let ckkk = value(x, k, k, k);
                    nx.elements().map(|e| (a * q + a) * m + nx.mul(e, nx.inv(ckkk))).collect()
                })
                .collect()
        })
        .collect();
    let band = CentralBand::new(&total, band.clone(), chi)?;
    CentralExtensionOfGerbes::new(band, proj)
}

/// An abelian gerbe from a normalized 2-cochain `γ` on chains `z < x ⋖ y`
/// of the order.  Objects over `U_x` are the points `z ≤ x`, every hom set
/// is `A_x`, and restriction along `x ⋖ y` shifts `m : z → w` by
/// `γ(w, x, y) − γ(z, x, y)`.  Packaged as a central extension of the
/// terminal gerbe.
pub fn chain_cocycle_gerbe(band: &SheafOfGroups, gamma: &HashMap<(Point, Point, Point), Elem>) -> Result<CentralExtensionOfGerbes> {
    if !band.is_abelian() {
        return Err(Error::NotAbelian);
    }
    let sp = band.space().clone();
    let below: Vec<Vec<Point>> = (0..sp.len()).map(|x| sp.linear_order().iter().copied().filter(|&z| sp.leq(z, x)).collect()).collect();
    let mut stalks = Vec::new();
    for x in 0..sp.len() {
        let a = band.stalk(x);
        let (q, m) = (below[x].len() as u32, a.order() as u32);
        let mut mors = Vec::new();
        for s in 0..q {
            for t in 0..q {
                for e in a.elements() {
                    mors.push((s, t, a.label(e).to_string()));
                }
            }
        }
        let labels = below[x].iter().map(|&z| sp.name(z).to_string()).collect();
        let g = FiniteGroupoid::new(labels, mors, |g, f| {
            let (fs, fe) = (f / m / q, f % m);
            let (gt, ge) = ((g / m) % q, g % m);
            (fs * q + gt) * m + a.mul(ge, fe)
        })?;
        stalks.push(g);
    }
    let gam = |z: Point, x: Point, y: Point| -> Elem {
        if z == x {
            return band.stalk(y).id();
        }
        gamma.get(&(z, x, y)).copied().unwrap_or_else(|| band.stalk(y).id())
    };
    for (&(z, x, y), &v) in gamma {
        if !(sp.lt(z, x) && sp.hasse().contains(&(x, y))) || v as usize >= band.stalk(y).order() {
            return Err(Error::BadCochain(format!("γ({}, {}, {}) is not on a chain z < x ⋖ y", sp.name(z), sp.name(x), sp.name(y))));
        }
    }
    let mut hasse = Vec::new();
    for &(x, y) in sp.hasse() {
        let (bx, by) = (&below[x], &below[y]);
        let pos = |z: Point| by.iter().position(|&w| w == z).expect("down-sets grow") as u32;
        let ay = band.stalk(y);
        let (qx, mx) = (bx.len() as u32, band.stalk(x).order() as u32);
        let (qy, my) = (by.len() as u32, ay.order() as u32);
        let rho = band.comp(x, y);
        let obj = bx.iter().map(|&z| pos(z)).collect();
        let mor = (0..qx * qx * mx)
            .map(|f| {
                let (s, t, e) = (f / mx / qx, (f / mx) % qx, f % mx);
                let (zs, zt) = (bx[s as usize], bx[t as usize]);
                let v = ay.mul(ay.mul(rho[e as usize], ay.inv(gam(zs, x, y))), gam(zt, x, y));
                (pos(zs) * qy + pos(zt)) * my + v
            })
            .collect();
        hasse.push(((x, y), Functor { obj, mor }));
    }
    let total = PrestackGroupoid::new(GroupoidDiagram::new(sp.clone(), stalks, hasse)?);
    let proj = GerbeMorphism::to_terminal(&total);
    let chi = (0..sp.len())
        .map(|x| {
            let a = band.stalk(x);
            let (q, m) = (below[x].len() as u32, a.order() as u32);
            (0..q).map(|s| a.elements().map(|e| (s * q + s) * m + e).collect()).collect()
        })
        .collect();
    let band = CentralBand::new(&total, band.clone(), chi)?;
    CentralExtensionOfGerbes::new(band, proj)
}

/// `G/N` with its projection.  Computed on minimal opens; over larger opens
/// the pseudo-limit supplies the stackified values.
pub fn quotient_gerbe(p: &PrestackGroupoid, n: &NormalSubgroupoid) -> Result<(PrestackGroupoid, GerbeMorphism)> {
    NormalSubgroupoid::new(p, n.members.clone())?;
    let (d, projs) = p.diagram().quotient(&n.members)?;
    let q = PrestackGroupoid::new(d);
    let f = GerbeMorphism::new(p.clone(), q.clone(), projs)?;
    Ok((q, f))
}

/// `1 → N → G → G/N → 1` for a central normal subgroupoid.
pub fn quotient_extension(p: &PrestackGroupoid, n: &NormalSubgroupoid) -> Result<CentralExtensionOfGerbes> {
    let band = central_as_sheaf(p, n)?;
    let (_, f) = quotient_gerbe(p, n)?;
    CentralExtensionOfGerbes::new(band, f)
}

/// `1 → Z(G) → G → G/Z(G) → 1`.
pub fn center_extension(p: &PrestackGroupoid) -> Result<CentralExtensionOfGerbes> {
    quotient_extension(p, &center(p))
}

/// The morphism `E : G/N → G'/N'` induced by `D : G → G'` with
/// `D(N) ⊆ N'`, so that `E ∘ F = F' ∘ D` on the nose.
pub fn induced_on_quotients(d: &GerbeMorphism, f: &GerbeMorphism, f2: &GerbeMorphism) -> Result<GerbeMorphism> {
    if !d.source().same_as(f.source()) || !d.target().same_as(f2.source()) {
        return Err(Error::BadFunctor("morphisms do not form a square".into()));
    }
    let sp = d.source().space().clone();
    let mut functors = Vec::new();
    for x in 0..sp.len() {
        let (q, q2) = (f.target().stalk(x), f2.target().stalk(x));
        let (fx, f2x, dx) = (&f.functors[x], &f2.functors[x], &d.functors[x]);
        let mut obj = vec![NONE; q.n_objects()];
        let mut mor = vec![NONE; q.n_morphisms()];
        for o in 0..fx.obj.len() {
            let v = f2x.obj[dx.obj[o] as usize];
            let slot = &mut obj[fx.obj[o] as usize];
            if *slot != NONE && *slot != v {
                return Err(Error::BadFunctor(format!("D does not descend on objects over U_{}", sp.name(x))));
            }
            *slot = v;
        }
        for m in 0..fx.mor.len() {
            let v = f2x.mor[dx.mor[m] as usize];
            let slot = &mut mor[fx.mor[m] as usize];
            if *slot != NONE && *slot != v {
                return Err(Error::BadFunctor(format!("D does not carry the kernel into the kernel over U_{}", sp.name(x))));
            }
            *slot = v;
        }
        if obj.contains(&NONE) || mor.contains(&NONE) || q2.n_objects() == 0 {
            return Err(Error::BadFunctor(format!("quotient map is not surjective over U_{}", sp.name(x))));
        }
        functors.push(Functor { obj, mor });
    }
    GerbeMorphism::new(f.target().clone(), f2.target().clone(), functors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sheaf::SheafOfGroups;
    use crate::space::models;

    fn constant(space: FiniteSpace, g: &FiniteGroup) -> SheafOfGroups {
        SheafOfGroups::constant(Arc::new(space), g)
    }

    #[test]
    fn torsor_gerbe_classes() {
        let g = constant(models::pseudocircle(), &FiniteGroup::cyclic(2));
        let p = torsor_gerbe(&g);
        assert!(p.is_gerbe().unwrap());
        assert_eq!(p.object_reps(p.space().whole()).unwrap().len(), 2);
        let s3 = constant(models::pseudocircle(), &FiniteGroup::symmetric3());
        let p3 = torsor_gerbe(&s3);
        assert_eq!(p3.object_reps(p3.space().whole()).unwrap().len(), 3);
        let one = constant(models::one_point(), &FiniteGroup::cyclic(2));
        let p1 = torsor_gerbe(&one);
        assert_eq!(p1.object_reps(p1.space().whole()).unwrap().len(), 1);
    }

    #[test]
    fn gauge_reps_cover_all_objects() {
        let g = constant(models::pseudocircle(), &FiniteGroup::cyclic(3));
        let p = torsor_gerbe(&g);
        let all = p.all_objects(p.space().whole()).unwrap();
        assert_eq!(all.len(), 81);
        for i in &all {
            assert!(p.find_rep(i).unwrap().is_some());
        }
    }

    #[test]
    fn hom_counts_match_brute_force() {
        let g = constant(models::pseudocircle(), &FiniteGroup::cyclic(2));
        let p = torsor_gerbe(&g);
        let u = p.space().whole();
        let all = p.all_objects(u).unwrap();
        for i in &all {
            for j in &all {
                let homs = p.homs(i, j).unwrap();
                let mut brute = 0;
                for bits in 0..16u32 {
                    let comps: Vec<u32> = (0..4).map(|x| (bits >> x) & 1).collect();
                    let f = LocalMorphism { open: u, comps };
                    if p.is_morphism(&f, i, j) {
                        brute += 1;
                    }
                }
                assert_eq!(homs.len(), brute);
            }
        }
    }

    #[test]
    fn stack_checks() {
        let g = constant(models::pseudocircle(), &FiniteGroup::cyclic(2));
        let p = torsor_gerbe(&g);
        assert!(p.is_stack().unwrap().holds);
        assert!(PrestackGroupoid::terminal(p.space().clone()).is_stack().unwrap().holds);
        let triv = object_from_torsor(&p, &Torsor::trivial(&g)).unwrap();
        let q = PrestackGroupoid::restrictions_of(p.diagram().clone(), triv).unwrap();
        let report = q.is_stack().unwrap();
        assert!(!report.holds);
        assert!(report.witness.unwrap().contains("glues"));
    }

    #[test]
    fn torsor_extension_and_center() {
        let sp = Arc::new(models::pseudocircle());
        let ext = CentralExtension::constant(sp.clone(), &FiniteGroup::cyclic(4), &[0, 2]).unwrap();
        let e = extension_of_torsor_gerbes(&ext).unwrap();
        assert!(e.proj().is_weak_epi());
        let z = center(e.total());
        assert_eq!(z.members(0, 0).len(), 4);
        let s3 = torsor_gerbe(&SheafOfGroups::constant(sp, &FiniteGroup::symmetric3()));
        let band = central_as_sheaf(&s3, &center(&s3)).unwrap();
        assert_eq!(band.band().stalk(0).order(), 1);
    }

    #[test]
    fn cocycle_gerbe_with_trivial_cocycle_has_global_object() {
        let sp = Arc::new(models::pseudosphere());
        let band = SheafOfGroups::constant(sp.clone(), &FiniteGroup::cyclic(2));
        let cover = minimal_open_cover(&sp, sp.whole()).unwrap();
        let c = Cochain::identity(&band, &cover, 2).unwrap();
        let e = gerbe_from_2cocycle(&band, &cover, &c).unwrap();
        assert!(e.total().is_gerbe().unwrap());
        assert_eq!(e.total().object_reps(sp.whole()).unwrap().len(), 1);
        let q = center_extension(e.total()).unwrap();
        assert!(GerbeMorphism::to_terminal(q.base()).is_weak_equivalence());
    }

    #[test]
    fn chain_cocycle_gerbe_on_pseudosphere_has_no_global_object() {
        let sp = Arc::new(models::pseudosphere());
        let band = SheafOfGroups::constant(sp.clone(), &FiniteGroup::cyclic(2));
        let pt = |s: &str| sp.point(s).unwrap();
        let gamma: HashMap<_, _> = [((pt("e"), pt("c"), pt("a")), 1)].into_iter().collect();
        let e = chain_cocycle_gerbe(&band, &gamma).unwrap();
        assert!(e.total().is_gerbe().unwrap());
        assert!(e.total().object_reps(sp.whole()).unwrap().is_empty());
        let flat = chain_cocycle_gerbe(&band, &HashMap::new()).unwrap();
        assert_eq!(flat.total().object_reps(sp.whole()).unwrap().len(), 1);
    }

    #[test]
    fn disjoint_terminal_gerbes_are_not_a_gerbe() {
        let sp = Arc::new(models::vee());
        let two = FiniteGroupoid::new(vec!["p".into(), "q".into()], vec![(0, 0, "1p".into()), (1, 1, "1q".into())], |g, _| g).unwrap();
        let stalks = vec![two; sp.len()];
        let hasse = sp.hasse().iter().map(|&e| (e, Functor { obj: vec![0, 1], mor: vec![0, 1] })).collect();
        let p = PrestackGroupoid::new(GroupoidDiagram::new(sp, stalks, hasse).unwrap());
        assert!(!p.is_gerbe().unwrap());
    }

    #[test]
    fn bitorsor_and_ad() {
        let g = constant(models::chain(2), &FiniteGroup::heisenberg());
        let p = torsor_gerbe(&g);
        let reps = p.object_reps(p.space().whole()).unwrap();
        let all = p.all_objects(p.space().whole()).unwrap();
        for j in all.iter().take(6) {
            assert!(p.is_bitorsor(&reps[0], j).unwrap());
            let f = p.first_hom(&reps[0], j).unwrap().unwrap();
            let t = p.ad_table(&f, &reps[0], j).unwrap();
            let mut s = t.clone();
            s.sort_unstable();
            s.dedup();
            assert_eq!(s.len(), t.len());
        }
    }
}
