//! Sheaves of groups on finite spaces, stored as functors on the
//! specialization poset.  Section groups over an open are computed as
//! limits on demand and memoized.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::group::{check_hom, Elem, FiniteGroup};
use crate::space::{FiniteSpace, Open, Point};

/// Upper bound on the size of a materialized section group.
pub const SECTION_CAP: usize = 1 << 18;

/// The group of sections over one open.  A section is the family of its
/// stalk components at the points of the open, in point order.
#[derive(Debug)]
pub struct SectionGroup {
    open: Open,
    points: Vec<Point>,
    elems: Vec<Vec<Elem>>,
    index: HashMap<Vec<Elem>, u32>,
    stalks: Vec<FiniteGroup>,
    identity: u32,
}

impl SectionGroup {
    pub fn open(&self) -> Open {
        self.open
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn id(&self) -> u32 {
        self.identity
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.elems.len() as u32
    }

    pub fn components(&self, s: u32) -> &[Elem] {
        &self.elems[s as usize]
    }

    /// Component of `s` at the point `x`.
    pub fn at(&self, s: u32, x: Point) -> Elem {
        let i = self.points.iter().position(|&p| p == x).expect("point of the open");
        self.elems[s as usize][i]
    }

    pub fn find(&self, comps: &[Elem]) -> Option<u32> {
        self.index.get(comps).copied()
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let ea = &self.elems[a as usize];
        let eb = &self.elems[b as usize];
        let c: Vec<Elem> = (0..ea.len()).map(|i| self.stalks[i].mul(ea[i], eb[i])).collect();
        self.index[&c]
    }

    pub fn inv(&self, a: u32) -> u32 {
        let ea = &self.elems[a as usize];
        let c: Vec<Elem> = (0..ea.len()).map(|i| self.stalks[i].inv(ea[i])).collect();
        self.index[&c]
    }

    pub fn is_central(&self, a: u32) -> bool {
        self.elements().all(|b| self.mul(a, b) == self.mul(b, a))
    }

    pub fn element_order(&self, a: u32) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Text form `x:g,y:h,...`.
    pub fn label(&self, space: &FiniteSpace, s: u32) -> String {
        let comps = &self.elems[s as usize];
        let parts: Vec<String> = self
            .points
            .iter()
            .zip(comps)
            .enumerate()
            .map(|(i, (&x, &g))| format!("{}:{}", space.name(x), self.stalks[i].label(g)))
            .collect();
        parts.join(",")
    }
}

struct SheafInner {
    space: Arc<FiniteSpace>,
    stalks: Vec<FiniteGroup>,
    /// `comp[x][y]` for `x <= y`.
    comp: Vec<Vec<Option<Vec<Elem>>>>,
    abelian: bool,
    sections: Mutex<HashMap<u32, Arc<SectionGroup>>>,
    restrictions: Mutex<HashMap<(u32, u32), Arc<Vec<u32>>>>,
}

/// A sheaf of groups; cheap to clone.
#[derive(Clone)]
pub struct SheafOfGroups {
    inner: Arc<SheafInner>,
}

impl fmt::Debug for SheafOfGroups {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SheafOfGroups")
            .field("points", &self.inner.space.names())
            .field("stalk_orders", &self.inner.stalks.iter().map(|g| g.order()).collect::<Vec<_>>())
            .finish()
    }
}

impl PartialEq for SheafOfGroups {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.space == other.inner.space && self.inner.stalks == other.inner.stalks && self.inner.comp == other.inner.comp)
    }
}

impl SheafOfGroups {
    /// Builds a sheaf from stalks and comparison maps.  Maps must be given
    /// at least for every covering relation; any other supplied map must
    /// agree with the composite.
    pub fn from_stalks(space: Arc<FiniteSpace>, stalks: Vec<FiniteGroup>, maps: &[((Point, Point), Vec<Elem>)]) -> Result<Self> {
        let n = space.len();
        if stalks.len() != n {
            return Err(Error::SheafMismatch(format!("{} stalks for {} points", stalks.len(), n)));
        }
        let mut given: HashMap<(Point, Point), Vec<Elem>> = HashMap::new();
        for ((x, y), m) in maps {
            if !space.leq(*x, *y) {
                return Err(Error::NonFunctorial(format!(
                    "map given for `{}` -> `{}`, which are not related",
                    space.name(*x),
                    space.name(*y)
                )));
            }
            check_hom(&stalks[*x], &stalks[*y], m)
                .map_err(|e| Error::NonFunctorial(format!("{} -> {}: {}", space.name(*x), space.name(*y), e)))?;
            given.insert((*x, *y), m.clone());
        }
        let mut comp: Vec<Vec<Option<Vec<Elem>>>> = vec![vec![None; n]; n];
        for x in 0..n {
            comp[x][x] = Some(stalks[x].elements().collect());
            if let Some(m) = given.get(&(x, x)) {
                if m != comp[x][x].as_ref().expect("set") {
                    return Err(Error::NonFunctorial(format!("map at `{}` is not the identity", space.name(x))));
                }
            }
        }
        for &(x, y) in space.hasse() {
            let m = given
                .get(&(x, y))
                .ok_or_else(|| Error::NonFunctorial(format!("missing map for `{}` <= `{}`", space.name(x), space.name(y))))?;
            comp[x][y] = Some(m.clone());
        }
        // Fill by increasing distance; check path independence.
        let order = space.linear_order().to_vec();
        for &y in &order {
            for &x in order.iter().rev() {
                if !space.lt(x, y) {
                    continue;
                }
                for &(a, b) in space.hasse() {
                    if a == x && space.leq(b, y) {
                        let first = comp[x][b].clone().expect("hasse map");
                        let rest = match &comp[b][y] {
                            Some(r) => r.clone(),
                            None => continue,
                        };
                        let composite: Vec<Elem> = first.iter().map(|&g| rest[g as usize]).collect();
                        match &comp[x][y] {
                            None => comp[x][y] = Some(composite),
                            Some(existing) if *existing != composite => {
                                return Err(Error::NonFunctorial(format!("paths `{}` -> `{}` disagree", space.name(x), space.name(y))))
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        for ((x, y), m) in &given {
            if comp[*x][*y].as_ref() != Some(m) {
                return Err(Error::NonFunctorial(format!("map `{}` -> `{}` disagrees with the composite", space.name(*x), space.name(*y))));
            }
        }
        for x in 0..n {
            for y in 0..n {
                if space.leq(x, y) && comp[x][y].is_none() {
                    return Err(Error::NonFunctorial(format!("no map for `{}` <= `{}`", space.name(x), space.name(y))));
                }
            }
        }
        let abelian = stalks.iter().all(|g| g.is_abelian());
        Ok(SheafOfGroups {
            inner: Arc::new(SheafInner {
                space,
                stalks,
                comp,
                abelian,
                sections: Mutex::new(HashMap::new()),
                restrictions: Mutex::new(HashMap::new()),
            }),
        })
    }

    pub fn constant(space: Arc<FiniteSpace>, g: &FiniteGroup) -> Self {
        let stalks = vec![g.clone(); space.len()];
        let id: Vec<Elem> = g.elements().collect();
        let maps: Vec<_> = space.hasse().iter().map(|&e| (e, id.clone())).collect();
        SheafOfGroups::from_stalks(space, stalks, &maps).expect("constant sheaf")
    }

    pub fn trivial(space: Arc<FiniteSpace>) -> Self {
        SheafOfGroups::constant(space, &FiniteGroup::trivial())
    }

    pub fn space(&self) -> &Arc<FiniteSpace> {
        &self.inner.space
    }

    pub fn stalk(&self, x: Point) -> &FiniteGroup {
        &self.inner.stalks[x]
    }

    pub fn stalks(&self) -> &[FiniteGroup] {
        &self.inner.stalks
    }

    /// Comparison map `G_x -> G_y` for `x <= y`.
    pub fn comp(&self, x: Point, y: Point) -> &[Elem] {
        self.inner.comp[x][y].as_deref().expect("related points")
    }

    pub fn is_abelian(&self) -> bool {
        self.inner.abelian
    }

    /// Maps for all covering relations, as accepted by [`Self::from_stalks`].
    pub fn hasse_maps(&self) -> Vec<((Point, Point), Vec<Elem>)> {
        self.inner.space.hasse().iter().map(|&(x, y)| ((x, y), self.comp(x, y).to_vec())).collect()
    }

    /// The section group over `u`.
    pub fn sections(&self, u: Open) -> Result<Arc<SectionGroup>> {
        self.inner.space.check(u)?;
        if let Some(s) = self.inner.sections.lock().expect("lock").get(&u.bits()) {
            return Ok(s.clone());
        }
        let built = Arc::new(self.build_sections(u)?);
        let mut cache = self.inner.sections.lock().expect("lock");
        Ok(cache.entry(u.bits()).or_insert(built).clone())
    }

    fn build_sections(&self, u: Open) -> Result<SectionGroup> {
        let space = &self.inner.space;
        let points: Vec<Point> = u.points().collect();
        let mins = space.minimal_points(u);
        let mut elems = Vec::new();
        let mut choice = vec![0 as Elem; mins.len()];
        // For each point, the minimal points below it.
        let below: Vec<Vec<usize>> = points.iter().map(|&y| (0..mins.len()).filter(|&i| space.leq(mins[i], y)).collect()).collect();
        // Depth-first over the minimal points with early consistency checks.
        fn rec(
            sheaf: &SheafOfGroups,
            mins: &[Point],
            points: &[Point],
            below: &[Vec<usize>],
            depth: usize,
            choice: &mut Vec<Elem>,
            out: &mut Vec<Vec<Elem>>,
        ) -> Result<()> {
            if depth == mins.len() {
                let fam: Vec<Elem> = points.iter().zip(below).map(|(&y, b)| sheaf.comp(mins[b[0]], y)[choice[b[0]] as usize]).collect();
                out.push(fam);
                if out.len() > SECTION_CAP {
                    return Err(Error::CapExceeded(format!("more than {} sections", SECTION_CAP)));
                }
                return Ok(());
            }
            let x = mins[depth];
            for g in sheaf.stalk(x).elements() {
                choice[depth] = g;
                let ok = points.iter().zip(below).all(|(&y, b)| {
                    if !b.contains(&depth) {
                        return true;
                    }
                    let v = sheaf.comp(x, y)[g as usize];
                    b.iter().filter(|&&i| i < depth).all(|&i| sheaf.comp(mins[i], y)[choice[i] as usize] == v)
                });
                if ok {
                    rec(sheaf, mins, points, below, depth + 1, choice, out)?;
                }
            }
            Ok(())
        }
        rec(self, &mins, &points, &below, 0, &mut choice, &mut elems)?;
        elems.sort();
        let index: HashMap<Vec<Elem>, u32> = elems.iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect();
        let ident: Vec<Elem> = points.iter().map(|&x| self.stalk(x).id()).collect();
        let identity = index[&ident];
        let stalks = points.iter().map(|&x| self.stalk(x).clone()).collect();
        Ok(SectionGroup { open: u, points, elems, index, stalks, identity })
    }

    /// Restriction map `Γ(u) -> Γ(v)` for `v ⊆ u`, as a table on section ids.
    pub fn restriction(&self, u: Open, v: Open) -> Result<Arc<Vec<u32>>> {
        if !v.is_subset(&u) {
            return Err(Error::SheafMismatch("restriction to a non-subset".into()));
        }
        if let Some(r) = self.inner.restrictions.lock().expect("lock").get(&(u.bits(), v.bits())) {
            return Ok(r.clone());
        }
        let su = self.sections(u)?;
        let sv = self.sections(v)?;
        let keep: Vec<usize> = su.points().iter().enumerate().filter(|(_, &x)| v.contains(x)).map(|(i, _)| i).collect();
        let table: Vec<u32> = su
            .elements()
            .map(|s| {
                let comps: Vec<Elem> = keep.iter().map(|&i| su.components(s)[i]).collect();
                sv.find(&comps).expect("restriction of a section is a section")
            })
            .collect();
        let table = Arc::new(table);
        self.inner.restrictions.lock().expect("lock").insert((u.bits(), v.bits()), table.clone());
        Ok(table)
    }

    pub fn restrict(&self, u: Open, v: Open, s: u32) -> Result<u32> {
        Ok(self.restriction(u, v)?[s as usize])
    }

    /// Section over `u` with the given components at every point, if it is one.
    pub fn section_from_fn(&self, u: Open, f: impl Fn(Point) -> Elem) -> Result<Option<u32>> {
        let sg = self.sections(u)?;
        let comps: Vec<Elem> = sg.points().iter().map(|&x| f(x)).collect();
        Ok(sg.find(&comps))
    }

    /// Parses `x:g,y:h,...`, or a bare stalk label meaning that label at
    /// every point.
    pub fn parse_section(&self, u: Open, text: &str) -> Result<u32> {
        let space = self.space().clone();
        let sg = self.sections(u)?;
        let text = text.trim();
        let mut comps = Vec::with_capacity(sg.points().len());
        if text.contains(':') {
            let mut map = HashMap::new();
            for part in text.split(',') {
                let (p, l) = part.split_once(':').ok_or_else(|| Error::BadCochain(format!("bad component `{}`", part)))?;
                map.insert(space.point(p.trim())?, l.trim().to_string());
            }
            for &x in sg.points() {
                let l = map.get(&x).ok_or_else(|| Error::BadCochain(format!("missing component at `{}`", space.name(x))))?;
                comps.push(
                    self.stalk(x).element(l).ok_or_else(|| Error::BadCochain(format!("unknown label `{}` at `{}`", l, space.name(x))))?,
                );
            }
        } else {
            for &x in sg.points() {
                comps.push(
                    self.stalk(x)
                        .element(text)
                        .ok_or_else(|| Error::BadCochain(format!("unknown label `{}` at `{}`", text, space.name(x))))?,
                );
            }
        }
        sg.find(&comps).ok_or_else(|| Error::BadCochain(format!("`{}` is not a section over {}", text, space.describe(u))))
    }

    /// Short label: a bare stalk label when all components carry the same
    /// label, the full `x:g,...` form otherwise.
    pub fn section_label(&self, u: Open, s: u32) -> Result<String> {
        let sg = self.sections(u)?;
        let labels: Vec<&str> = sg.points().iter().zip(sg.components(s)).map(|(&x, &g)| self.stalk(x).label(g)).collect();
        if labels.is_empty() {
            return Ok("1".into());
        }
        if labels.iter().all(|l| *l == labels[0]) {
            if let Ok(back) = self.parse_section(u, labels[0]) {
                if back == s {
                    return Ok(labels[0].to_string());
                }
            }
        }
        Ok(sg.label(self.space(), s))
    }

    /// Checks, for every open, that restriction identifies `Γ(U)` with the
    /// equalizer of `∏ Γ(U_k) ⇉ ∏ Γ(U_k ∩ U_l)` over the minimal-open cover,
    /// and that restriction is functorial.
    pub fn check_sheaf_condition(&self) -> Result<()> {
        let space = self.space().clone();
        for u in space.opens() {
            let su = self.sections(u)?;
            let parts: Vec<Open> = space.minimal_points(u).into_iter().map(|x| space.minimal_open(x).expect("point")).collect();
            let groups: Vec<Arc<SectionGroup>> = parts.iter().map(|&p| self.sections(p)).collect::<Result<_>>()?;
            let mut equalizer = 0usize;
            let mut stack: Vec<Vec<u32>> = vec![Vec::new()];
            while let Some(fam) = stack.pop() {
                let d = fam.len();
                if d == parts.len() {
                    equalizer += 1;
                    continue;
                }
                for s in groups[d].elements() {
                    let mut ok = true;
                    for (i, &t) in fam.iter().enumerate() {
                        let w = parts[i].intersect(&parts[d])?;
                        if self.restrict(parts[i], w, t)? != self.restrict(parts[d], w, s)? {
                            ok = false;
                            break;
                        }
                    }
                    if ok {
                        let mut next = fam.clone();
                        next.push(s);
                        stack.push(next);
                    }
                }
            }
            let mut images = std::collections::HashSet::new();
            for s in su.elements() {
                let fam: Vec<u32> = parts.iter().map(|&p| self.restrict(u, p, s)).collect::<Result<_>>()?;
                images.insert(fam);
            }
            if equalizer != su.len() || images.len() != su.len() {
                return Err(Error::SheafMismatch(format!(
                    "equalizer over {} has {} elements but Γ has {}",
                    space.describe(u),
                    equalizer,
                    su.len()
                )));
            }
            for v in space.sub_opens(u) {
                for w in space.sub_opens(v) {
                    let a = self.restriction(u, v)?;
                    let b = self.restriction(v, w)?;
                    let c = self.restriction(u, w)?;
                    if (0..su.len()).any(|s| b[a[s] as usize] != c[s]) {
                        return Err(Error::NonFunctorial(format!(
                            "restriction {} -> {} -> {}",
                            space.describe(u),
                            space.describe(v),
                            space.describe(w)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A homomorphism of sheaves, given stalk-wise.
#[derive(Clone, Debug)]
pub struct SheafHom {
    source: SheafOfGroups,
    target: SheafOfGroups,
    maps: Vec<Vec<Elem>>,
}

impl SheafHom {
    pub fn new(source: SheafOfGroups, target: SheafOfGroups, maps: Vec<Vec<Elem>>) -> Result<Self> {
        let space = source.space().clone();
        if **target.space() != *space {
            return Err(Error::SpaceMismatch);
        }
        if maps.len() != space.len() {
            return Err(Error::NotHomomorphism("one map per point is required".into()));
        }
        for x in 0..space.len() {
            check_hom(source.stalk(x), target.stalk(x), &maps[x])
                .map_err(|e| Error::NotHomomorphism(format!("at `{}`: {}", space.name(x), e)))?;
        }
        for &(x, y) in space.hasse() {
            for g in source.stalk(x).elements() {
                let a = maps[y][source.comp(x, y)[g as usize] as usize];
                let b = target.comp(x, y)[maps[x][g as usize] as usize];
                if a != b {
                    return Err(Error::NotHomomorphism(format!("does not commute with `{}` <= `{}`", space.name(x), space.name(y))));
                }
            }
        }
        Ok(SheafHom { source, target, maps })
    }

    /// The same group map at every point.
    pub fn constant(source: SheafOfGroups, target: SheafOfGroups, map: Vec<Elem>) -> Result<Self> {
        let n = source.space().len();
        SheafHom::new(source, target, vec![map; n])
    }

    pub fn identity(g: &SheafOfGroups) -> Self {
        let maps = g.stalks().iter().map(|s| s.elements().collect()).collect();
        SheafHom { source: g.clone(), target: g.clone(), maps }
    }

    pub fn source(&self) -> &SheafOfGroups {
        &self.source
    }

    pub fn target(&self) -> &SheafOfGroups {
        &self.target
    }

    pub fn at(&self, x: Point) -> &[Elem] {
        &self.maps[x]
    }

    pub fn maps(&self) -> &[Vec<Elem>] {
        &self.maps
    }

    /// Image of a section over `u`.
    pub fn apply(&self, u: Open, s: u32) -> Result<u32> {
        let src = self.source.sections(u)?;
        let tgt = self.target.sections(u)?;
        let comps: Vec<Elem> = src.points().iter().zip(src.components(s)).map(|(&x, &g)| self.maps[x][g as usize]).collect();
        Ok(tgt.find(&comps).expect("image of a section is a section"))
    }

    pub fn compose(&self, next: &SheafHom) -> Result<SheafHom> {
        if self.target != next.source {
            return Err(Error::SheafMismatch("homomorphisms do not compose".into()));
        }
        let maps = self.maps.iter().zip(&next.maps).map(|(f, g)| f.iter().map(|&a| g[a as usize]).collect()).collect();
        SheafHom::new(self.source.clone(), next.target.clone(), maps)
    }

    pub fn is_injective(&self) -> bool {
        self.maps.iter().all(|m| {
            let mut v = m.clone();
            v.sort_unstable();
            v.dedup();
            v.len() == m.len()
        })
    }
}

/// Sub-functor given by stalk-wise member lists.
pub fn subsheaf(g: &SheafOfGroups, members: &[Vec<Elem>]) -> Result<(SheafOfGroups, SheafHom)> {
    let space = g.space().clone();
    let mut stalks = Vec::with_capacity(space.len());
    for x in 0..space.len() {
        let mut m = members[x].clone();
        m.sort_unstable();
        let (sub, _) = g.stalk(x).subgroup(&m).map_err(|e| Error::NotSubgroup(format!("at `{}`: {}", space.name(x), e)))?;
        stalks.push((sub, m));
    }
    let mut maps = Vec::new();
    for &(x, y) in space.hasse() {
        let (_, mx) = &stalks[x];
        let (_, my) = &stalks[y];
        let mut table = Vec::with_capacity(mx.len());
        for &a in mx {
            let b = g.comp(x, y)[a as usize];
            let k = my
                .iter()
                .position(|&e| e == b)
                .ok_or_else(|| Error::NotSubgroup(format!("not stable under `{}` <= `{}`", space.name(x), space.name(y))))?;
            table.push(k as Elem);
        }
        maps.push(((x, y), table));
    }
    let groups: Vec<FiniteGroup> = stalks.iter().map(|(s, _)| s.clone()).collect();
    let sub = SheafOfGroups::from_stalks(space, groups, &maps)?;
    let inc = SheafHom::new(sub.clone(), g.clone(), stalks.into_iter().map(|(_, m)| m).collect())?;
    Ok((sub, inc))
}

/// Stalk-wise members of the center subsheaf: `a ∈ G_x` with `ρ_xy(a)`
/// central in `G_y` for all `y >= x`.
pub fn center_members(g: &SheafOfGroups) -> Vec<Vec<Elem>> {
    let space = g.space();
    (0..space.len())
        .map(|x| {
            g.stalk(x)
                .elements()
                .filter(|&a| (0..space.len()).filter(|&y| space.leq(x, y)).all(|y| g.stalk(y).is_central(g.comp(x, y)[a as usize])))
                .collect()
        })
        .collect()
}

/// The center subsheaf and its inclusion.
pub fn center_of_sheaf(g: &SheafOfGroups) -> (SheafOfGroups, SheafHom) {
    subsheaf(g, &center_members(g)).expect("center is a subsheaf")
}

/// Central sections over `u` by the full definition: `s|_V` central in
/// `Γ(V)` for every open `V ⊆ u`.
pub fn center_sections_full(g: &SheafOfGroups, u: Open) -> Result<Vec<u32>> {
    let space = g.space().clone();
    let su = g.sections(u)?;
    let subs = space.sub_opens(u);
    let mut out = Vec::new();
    for s in su.elements() {
        let mut ok = true;
        for &v in &subs {
            let sv = g.sections(v)?;
            let r = g.restrict(u, v, s)?;
            if !sv.is_central(r) {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(s);
        }
    }
    Ok(out)
}

/// Central sections over `u` quantifying over minimal opens only.
pub fn center_sections_minimal(g: &SheafOfGroups, u: Open) -> Result<Vec<u32>> {
    let space = g.space().clone();
    let su = g.sections(u)?;
    let mut out = Vec::new();
    for s in su.elements() {
        let mut ok = true;
        for x in u.points() {
            let v = space.minimal_open(x)?;
            let sv = g.sections(v)?;
            if !sv.is_central(g.restrict(u, v, s)?) {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(s);
        }
    }
    Ok(out)
}

/// Stalk-wise kernel of `f`.
pub fn kernel_sheaf(f: &SheafHom) -> (SheafOfGroups, SheafHom) {
    let g = f.source();
    let members: Vec<Vec<Elem>> = (0..g.space().len())
        .map(|x| {
            let id = f.target().stalk(x).id();
            g.stalk(x).elements().filter(|&a| f.at(x)[a as usize] == id).collect()
        })
        .collect();
    subsheaf(g, &members).expect("kernel is a subsheaf")
}

/// Quotient by a normal subsheaf given by stalk-wise members.  Sections of
/// the result over `U` are compatible families of cosets, which is the
/// sheafification of `U ↦ G(U)/N(U)`.
pub fn quotient_sheaf(g: &SheafOfGroups, members: &[Vec<Elem>]) -> Result<(SheafOfGroups, SheafHom)> {
    let space = g.space().clone();
    let mut stalks = Vec::new();
    let mut projs = Vec::new();
    for x in 0..space.len() {
        let (q, p) = g.stalk(x).quotient(&members[x]).map_err(|_| Error::NotNormal(format!("at `{}`", space.name(x))))?;
        stalks.push(q);
        projs.push(p);
    }
    let mut maps = Vec::new();
    for &(x, y) in space.hasse() {
        for &n in &members[x] {
            if !members[y].contains(&g.comp(x, y)[n as usize]) {
                return Err(Error::NotNormal(format!("not stable under `{}` <= `{}`", space.name(x), space.name(y))));
            }
        }
        let mut table = vec![0 as Elem; stalks[x].order()];
        for a in g.stalk(x).elements() {
            table[projs[x][a as usize] as usize] = projs[y][g.comp(x, y)[a as usize] as usize];
        }
        maps.push(((x, y), table));
    }
    let q = SheafOfGroups::from_stalks(space, stalks, &maps)?;
    let proj = SheafHom::new(g.clone(), q.clone(), projs)?;
    Ok((q, proj))
}

/// `1 -> N -> G -> H -> 1` with `N` central.
#[derive(Clone, Debug)]
pub struct CentralExtension {
    pub n: SheafOfGroups,
    pub g: SheafOfGroups,
    pub h: SheafOfGroups,
    pub inc: SheafHom,
    pub proj: SheafHom,
}

/// Why a candidate triple is not a central extension, if it is not.
pub fn central_extension_failure(
    n: &SheafOfGroups,
    g: &SheafOfGroups,
    h: &SheafOfGroups,
    inc: &SheafHom,
    proj: &SheafHom,
) -> Option<String> {
    if inc.source() != n || inc.target() != g || proj.source() != g || proj.target() != h {
        return Some("homomorphisms do not match the sheaves".into());
    }
    let space = g.space();
    if !inc.is_injective() {
        return Some("inclusion is not injective".into());
    }
    for x in 0..space.len() {
        let name = space.name(x);
        let gx = g.stalk(x);
        let image: Vec<Elem> = inc.at(x).to_vec();
        let kernel: Vec<Elem> = gx.elements().filter(|&a| proj.at(x)[a as usize] == h.stalk(x).id()).collect();
        let mut im = image.clone();
        im.sort_unstable();
        if im != kernel {
            return Some(format!("image of the inclusion differs from the kernel at `{}`", name));
        }
        let mut hit = vec![false; h.stalk(x).order()];
        for a in gx.elements() {
            hit[proj.at(x)[a as usize] as usize] = true;
        }
        if hit.iter().any(|b| !b) {
            return Some(format!("projection is not surjective at `{}`", name));
        }
        if let Some(&a) = image.iter().find(|&&a| !gx.is_central(a)) {
            return Some(format!("`{}` is not central at `{}`", gx.label(a), name));
        }
    }
    None
}

pub fn is_central_extension(n: &SheafOfGroups, g: &SheafOfGroups, h: &SheafOfGroups, inc: &SheafHom, proj: &SheafHom) -> bool {
    central_extension_failure(n, g, h, inc, proj).is_none()
}

impl CentralExtension {
    pub fn new(n: SheafOfGroups, g: SheafOfGroups, h: SheafOfGroups, inc: SheafHom, proj: SheafHom) -> Result<Self> {
        if let Some(why) = central_extension_failure(&n, &g, &h, &inc, &proj) {
            return Err(Error::NotCentralExtension(why));
        }
        Ok(CentralExtension { n, g, h, inc, proj })
    }

    /// The constant extension built from a central subgroup of `g`.
    pub fn constant(space: Arc<FiniteSpace>, g: &FiniteGroup, central: &[Elem]) -> Result<Self> {
        let gs = SheafOfGroups::constant(space.clone(), g);
        let members = vec![central.to_vec(); space.len()];
        let (n, inc) = subsheaf(&gs, &members)?;
        let (h, proj) = quotient_sheaf(&gs, &members)?;
        CentralExtension::new(n, gs, h, inc, proj)
    }

    /// Preimages of a section of `H` over `u` under the projection.
    pub fn lifts(&self, u: Open, s: u32) -> Result<Vec<u32>> {
        let gs = self.g.sections(u)?;
        let mut out = Vec::new();
        for a in gs.elements() {
            if self.proj.apply(u, a)? == s {
                out.push(a);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::models;

    fn arc(s: FiniteSpace) -> Arc<FiniteSpace> {
        Arc::new(s)
    }

    #[test]
    fn constant_z2_on_pseudocircle() {
        let s = arc(models::pseudocircle());
        let z2 = SheafOfGroups::constant(s.clone(), &FiniteGroup::cyclic(2));
        let ab = s.open_from_names(&["a", "b"]).unwrap();
        assert_eq!(z2.sections(ab).unwrap().len(), 4);
        assert_eq!(z2.sections(s.whole()).unwrap().len(), 2);
        assert_eq!(z2.sections(s.empty()).unwrap().len(), 1);
        z2.check_sheaf_condition().unwrap();
    }

    #[test]
    fn constant_on_space_with_minimum() {
        let s = arc(models::vee());
        let g = SheafOfGroups::constant(s.clone(), &FiniteGroup::symmetric3());
        assert_eq!(g.sections(s.whole()).unwrap().len(), 6);
    }

    #[test]
    fn centers() {
        let s = arc(models::vee());
        let s3 = SheafOfGroups::constant(s.clone(), &FiniteGroup::symmetric3());
        let (z, _) = center_of_sheaf(&s3);
        assert_eq!(z.sections(s.whole()).unwrap().len(), 1);
        let h = SheafOfGroups::constant(s.clone(), &FiniteGroup::heisenberg());
        let (zh, _) = center_of_sheaf(&h);
        assert_eq!(zh.sections(s.whole()).unwrap().len(), 2);
        let a = SheafOfGroups::constant(s.clone(), &FiniteGroup::cyclic(4));
        let (za, _) = center_of_sheaf(&a);
        assert_eq!(za.sections(s.whole()).unwrap().len(), 4);
    }

    /// `ℤ/2` at the bottom of a chain, included into `S₃` at the top: the
    /// center stalk at the bottom is trivial although `ℤ/2` is abelian.
    fn non_functorial_center_sheaf() -> SheafOfGroups {
        let s = arc(models::chain(2));
        let s3 = FiniteGroup::symmetric3();
        let t = s3.element("213").unwrap();
        SheafOfGroups::from_stalks(s, vec![FiniteGroup::cyclic(2), s3.clone()], &[((0, 1), vec![s3.id(), t])]).unwrap()
    }

    #[test]
    fn center_stalk_is_not_stalk_center() {
        let g = non_functorial_center_sheaf();
        let m = center_members(&g);
        assert_eq!(m[0].len(), 1);
        assert_eq!(m[1].len(), 1);
    }

    #[test]
    fn center_definitions_agree() {
        let mut sheaves = vec![non_functorial_center_sheaf()];
        for space in [models::pseudocircle(), models::zigzag(), models::pseudosphere()] {
            let s = arc(space);
            sheaves.push(SheafOfGroups::constant(s.clone(), &FiniteGroup::heisenberg()));
            sheaves.push(SheafOfGroups::constant(s, &FiniteGroup::symmetric3()));
        }
        for g in sheaves {
            let (z, inc) = center_of_sheaf(&g);
            for u in g.space().opens() {
                let full = center_sections_full(&g, u).unwrap();
                let minimal = center_sections_minimal(&g, u).unwrap();
                assert_eq!(full, minimal);
                let mut via_sub: Vec<u32> = z.sections(u).unwrap().elements().map(|s| inc.apply(u, s).unwrap()).collect();
                via_sub.sort_unstable();
                assert_eq!(via_sub, full);
            }
        }
    }

    #[test]
    fn kernels_and_quotients() {
        let s = arc(models::pseudocircle());
        let ext = CentralExtension::constant(s.clone(), &FiniteGroup::cyclic(4), &[0, 2]).unwrap();
        let (k, _) = kernel_sheaf(&ext.proj);
        assert_eq!(k.stalk(0).order(), 2);
        assert_eq!(ext.h.sections(s.whole()).unwrap().len(), 2);
        let gx = ext.g.sections(s.whole()).unwrap();
        let images: std::collections::BTreeSet<u32> = gx.elements().map(|a| ext.proj.apply(s.whole(), a).unwrap()).collect();
        assert_eq!(images.len(), 2);
        let id = SheafHom::identity(&ext.g);
        let (k1, _) = kernel_sheaf(&id);
        assert_eq!(k1.sections(s.whole()).unwrap().len(), 1);
    }

    #[test]
    fn central_extension_checks() {
        let s = arc(models::pseudocircle());
        assert!(CentralExtension::constant(s.clone(), &FiniteGroup::cyclic(4), &[0, 2]).is_ok());
        let k4 = FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2)).unwrap();
        let n = k4.generated(&[k4.element("(1,0)").unwrap()]);
        assert!(CentralExtension::constant(s.clone(), &k4, &n).is_ok());
        let s3 = FiniteGroup::symmetric3();
        let a3 = s3.generated(&[s3.element("231").unwrap()]);
        let r = CentralExtension::constant(s, &s3, &a3);
        assert!(matches!(r, Err(Error::NotCentralExtension(_))));
    }

    #[test]
    fn rejects_non_functorial_maps() {
        let s = arc(FiniteSpace::from_names(&["x", "y", "z"], &[("x", "y"), ("y", "z")]).unwrap());
        let z2 = FiniteGroup::cyclic(2);
        let id = vec![0, 1];
        let zero = vec![0, 0];
        let r = SheafOfGroups::from_stalks(s, vec![z2.clone(), z2.clone(), z2], &[((0, 1), id.clone()), ((1, 2), id), ((0, 2), zero)]);
        assert!(matches!(r, Err(Error::NonFunctorial(_))));
    }

    #[test]
    fn section_labels_round_trip() {
        let s = arc(models::pseudocircle());
        let z2 = SheafOfGroups::constant(s.clone(), &FiniteGroup::cyclic(2));
        let ab = s.open_from_names(&["a", "b"]).unwrap();
        for sec in z2.sections(ab).unwrap().elements() {
            let l = z2.section_label(ab, sec).unwrap();
            assert_eq!(z2.parse_section(ab, &l).unwrap(), sec);
        }
    }
}
