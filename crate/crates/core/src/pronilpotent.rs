//! Central filtrations truncated at a finite depth, on sheaves of groups
//! and on gerbes, and the level-by-level algorithms that connect local
//! objects and glue global ones.

use std::collections::{HashMap, HashSet};

use crate::cech::{is_coboundary, solve_coboundary, Cochain};
use crate::error::{Error, Result};
use crate::gerbe::{
    central_as_sheaf, quotient_gerbe, CentralExtensionOfGerbes, GerbeMorphism, LocalMorphism, LocalObject, NormalSubgroupoid,
    PrestackGroupoid,
};
use crate::group::Elem;
use crate::obstruction::is_acyclic_open;
use crate::sheaf::{quotient_sheaf, subsheaf, SheafOfGroups};
use crate::space::{minimal_open_cover, point_cover, Open, RefinementMap};

/// `G = N_0 ⊇ N_1 ⊇ … ⊇ N_{p_max} = 1`, each level a normal subsheaf with
/// `[G, N_p] ⊆ N_{p+1}`.
#[derive(Clone, Debug)]
pub struct FilteredSheafGroup {
    ambient: SheafOfGroups,
    levels: Vec<Vec<Vec<Elem>>>,
}

impl FilteredSheafGroup {
    pub fn new(ambient: SheafOfGroups, levels: Vec<Vec<Vec<Elem>>>) -> Result<Self> {
        let sp = ambient.space().clone();
        if levels.len() < 2 {
            return Err(Error::BadFiltration("at least two levels are required".into()));
        }
        let mut levels = levels;
        for lv in levels.iter_mut() {
            if lv.len() != sp.len() {
                return Err(Error::BadFiltration("one member list per point is required".into()));
            }
            for m in lv.iter_mut() {
                m.sort_unstable();
                m.dedup();
            }
        }
        for x in 0..sp.len() {
            let g = ambient.stalk(x);
            let all: Vec<Elem> = g.elements().collect();
            if levels[0][x] != all {
                return Err(Error::BadFiltration(format!("N_0 is not everything at `{}`", sp.name(x))));
            }
            if levels.last().expect("nonempty")[x] != vec![g.id()] {
                return Err(Error::BadFiltration(format!("the last level is not trivial at `{}`", sp.name(x))));
            }
            for (p, lv) in levels.iter().enumerate() {
                if !g.is_subgroup(&lv[x]) || !g.is_normal(&lv[x]) {
                    return Err(Error::BadFiltration(format!("N_{} is not normal at `{}`", p, sp.name(x))));
                }
                if p + 1 < levels.len() {
                    let next: HashSet<Elem> = levels[p + 1][x].iter().copied().collect();
                    if !next.iter().all(|a| lv[x].contains(a)) {
                        return Err(Error::BadFiltration(format!("N_{} ⊄ N_{} at `{}`", p + 1, p, sp.name(x))));
                    }
                    for a in g.elements() {
                        for &n in &lv[x] {
                            let comm = g.mul(g.mul(a, n), g.mul(g.inv(a), g.inv(n)));
                            if !next.contains(&comm) {
                                return Err(Error::BadFiltration(format!("layer {} is not central at `{}`", p, sp.name(x))));
                            }
                        }
                    }
                }
            }
        }
        for lv in &levels {
            subsheaf(&ambient, lv).map_err(|e| Error::BadFiltration(e.to_string()))?;
        }
        Ok(FilteredSheafGroup { ambient, levels })
    }

    pub fn ambient(&self) -> &SheafOfGroups {
        &self.ambient
    }

    pub fn p_max(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, p: usize) -> &[Vec<Elem>] {
        &self.levels[p]
    }

    /// The subsheaf `N_p`.
    pub fn level_sheaf(&self, p: usize) -> Result<SheafOfGroups> {
        Ok(subsheaf(&self.ambient, &self.levels[p])?.0)
    }

    /// `N_p / N_q` as a quotient of `N_p`, with the projection.
    fn sub_quotient(&self, p: usize, q: usize) -> Result<(SheafOfGroups, crate::sheaf::SheafHom)> {
        let (np, inc) = subsheaf(&self.ambient, &self.levels[p])?;
        let members: Vec<Vec<Elem>> = (0..self.ambient.space().len())
            .map(|x| {
                let emb = inc.at(x);
                self.levels[q][x].iter().map(|a| emb.iter().position(|b| b == a).expect("nested") as Elem).collect()
            })
            .collect();
        quotient_sheaf(&np, &members)
    }

    /// The layer `N_p / N_{p+1}`.
    pub fn layer(&self, p: usize) -> Result<SheafOfGroups> {
        if p >= self.p_max() {
            return Err(Error::InvalidLevel(p));
        }
        Ok(self.sub_quotient(p, p + 1)?.0)
    }

    /// Keeps `N_0 … N_{q-1}` and ends with the trivial level.
    /// `G/N_q` filtered by the images of `N_0 … N_q`.
    pub fn truncate(&self, q: usize) -> Result<FilteredSheafGroup> {
        if q == 0 || q > self.p_max() {
            return Err(Error::InvalidLevel(q));
        }
        let (quot, proj) = quotient_sheaf(&self.ambient, &self.levels[q])?;
        let levels = self.levels[..=q]
            .iter()
            .map(|lv| lv.iter().enumerate().map(|(x, m)| m.iter().map(|&a| proj.at(x)[a as usize]).collect()).collect())
            .collect();
        FilteredSheafGroup::new(quot, levels)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcyclicReport {
    /// Layers whose first or second cohomology over the open is nontrivial.
    pub cohomology_failures: Vec<usize>,
    /// Pairs `(p, q)` with `Γ(U, N_p) → Γ(U, N_p/N_q)` not surjective.
    pub surjectivity_failures: Vec<(usize, usize)>,
}

impl AcyclicReport {
    pub fn holds(&self) -> bool {
        self.cohomology_failures.is_empty() && self.surjectivity_failures.is_empty()
    }
}

/// Layer cohomology in degrees one and two, and section surjectivity.
pub fn check_acyclic_open(f: &FilteredSheafGroup, u: Open) -> Result<AcyclicReport> {
    let mut report = AcyclicReport { cohomology_failures: Vec::new(), surjectivity_failures: Vec::new() };
    for p in 0..f.p_max() {
        if !is_acyclic_open(&f.layer(p)?, u)? {
            report.cohomology_failures.push(p);
        }
        for q in (p + 1)..=f.p_max() {
            let (quot, proj) = f.sub_quotient(p, q)?;
            let src = proj.source().sections(u)?;
            let img: HashSet<u32> = src.elements().map(|s| proj.apply(u, s)).collect::<Result<_>>()?;
            if img.len() != quot.sections(u)?.len() {
                report.surjectivity_failures.push((p, q));
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletenessReport {
    pub holds: bool,
    pub witness: Option<String>,
}

/// `1 → Γ(U, N_p) → Γ(U, G) → Γ(U, G/N_p) → 1` is exact for every `p`.
pub fn completeness_check(f: &FilteredSheafGroup, u: Open) -> Result<CompletenessReport> {
    let g = f.ambient();
    let sections = g.sections(u)?;
    for p in 1..=f.p_max() {
        let (q, proj) = quotient_sheaf(g, f.level(p))?;
        let qs = q.sections(u)?;
        let id = qs.id();
        let mut img = HashSet::new();
        let mut kernel = Vec::new();
        for s in sections.elements() {
            let t = proj.apply(u, s)?;
            img.insert(t);
            if t == id {
                kernel.push(s);
            }
        }
        if img.len() != qs.len() {
            return Ok(CompletenessReport {
                holds: false,
                witness: Some(format!("Γ(G) → Γ(G/N_{}) misses {} sections", p, qs.len() - img.len())),
            });
        }
        let level: Vec<HashSet<Elem>> = f.level(p).iter().map(|m| m.iter().copied().collect()).collect();
        let in_level = |s: u32| u.points().all(|x| level[x].contains(&sections.at(s, x)));
        let size = f.level_sheaf(p)?.sections(u)?.len();
        if kernel.len() != size || !kernel.iter().all(|&s| in_level(s)) {
            return Ok(CompletenessReport { holds: false, witness: Some(format!("kernel of Γ(G) → Γ(G/N_{}) is not Γ(N_{})", p, p)) });
        }
    }
    Ok(CompletenessReport { holds: true, witness: None })
}

/// A gerbe with a central filtration of its automorphism groups by normal
/// subgroupoids.
#[derive(Clone, Debug)]
pub struct FilteredGerbe {
    ambient: PrestackGroupoid,
    levels: Vec<NormalSubgroupoid>,
}

impl FilteredGerbe {
    pub fn new(ambient: PrestackGroupoid, levels: Vec<NormalSubgroupoid>) -> Result<Self> {
        let sp = ambient.space().clone();
        if levels.len() < 2 {
            return Err(Error::BadFiltration("at least two levels are required".into()));
        }
        for x in 0..sp.len() {
            let g = ambient.stalk(x);
            for o in 0..g.n_objects() as u32 {
                let mut all = g.aut(o).to_vec();
                all.sort_unstable();
                if levels[0].members(x, o) != all.as_slice() {
                    return Err(Error::BadFiltration(format!("N_0 is not everything over U_{}", sp.name(x))));
                }
                if levels.last().expect("nonempty").members(x, o) != [g.identity(o)] {
                    return Err(Error::BadFiltration(format!("the last level is not trivial over U_{}", sp.name(x))));
                }
                for p in 0..levels.len() - 1 {
                    let (cur, next) = (levels[p].members(x, o), &levels[p + 1]);
                    if !next.members(x, o).iter().all(|m| cur.binary_search(m).is_ok()) {
                        return Err(Error::BadFiltration(format!("N_{} ⊄ N_{} over U_{}", p + 1, p, sp.name(x))));
                    }
                    for &a in g.aut(o) {
                        for &n in cur {
                            let comm = g.compose(g.compose(a, n), g.compose(g.inv(a), g.inv(n)));
                            if !next.contains(x, o, comm) {
                                return Err(Error::BadFiltration(format!("layer {} is not central over U_{}", p, sp.name(x))));
                            }
                        }
                    }
                }
            }
        }
        Ok(FilteredGerbe { ambient, levels })
    }

    /// The torsor gerbe of a filtered sheaf of groups.
    pub fn from_sheaf_filtration(f: &FilteredSheafGroup) -> Result<Self> {
        let p = crate::gerbe::torsor_gerbe(f.ambient());
        let levels =
            f.levels.iter().map(|lv| NormalSubgroupoid::new(&p, lv.iter().map(|m| vec![m.clone()]).collect())).collect::<Result<_>>()?;
        FilteredGerbe::new(p, levels)
    }

    /// Filtration of an abelian-banded gerbe by subgroups of the band.
    pub fn from_band_filtration(ext: &CentralExtensionOfGerbes, levels: &[Vec<Vec<Elem>>]) -> Result<Self> {
        let p = ext.total().clone();
        let sp = p.space().clone();
        let lv = levels
            .iter()
            .map(|lv| {
                let members = (0..sp.len())
                    .map(|x| (0..p.stalk(x).n_objects() as u32).map(|o| lv[x].iter().map(|&n| ext.band().chi(x, o, n)).collect()).collect())
                    .collect();
                NormalSubgroupoid::new(&p, members)
            })
            .collect::<Result<_>>()?;
        FilteredGerbe::new(p, lv)
    }

    pub fn ambient(&self) -> &PrestackGroupoid {
        &self.ambient
    }

    pub fn p_max(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, p: usize) -> &NormalSubgroupoid {
        &self.levels[p]
    }

    /// `G/N_q` filtered by the images of `N_0 … N_q`, with the projection.
    pub fn truncate(&self, q: usize) -> Result<(FilteredGerbe, GerbeMorphism)> {
        if q == 0 || q > self.p_max() {
            return Err(Error::InvalidLevel(q));
        }
        let (quot, proj) = quotient_gerbe(&self.ambient, &self.levels[q])?;
        let levels = self.levels[..=q].iter().map(|lv| self.image_in(lv, &quot, &proj)).collect::<Result<_>>()?;
        Ok((FilteredGerbe::new(quot, levels)?, proj))
    }

    fn image_in(&self, lv: &NormalSubgroupoid, quot: &PrestackGroupoid, proj: &GerbeMorphism) -> Result<NormalSubgroupoid> {
        let members = (0..quot.space().len())
            .map(|x| {
                (0..quot.stalk(x).n_objects() as u32)
                    .map(|o| lv.members(x, o).iter().map(|&m| proj.functor(x).mor[m as usize]).collect())
                    .collect()
            })
            .collect();
        NormalSubgroupoid::new(quot, members)
    }

    /// `1 → N_p/N_{p+1} → G/N_{p+1} → G/N_p → 1`, with `G → G/N_{p+1}`.
    pub fn layer_extension(&self, p: usize) -> Result<Layer> {
        if p >= self.p_max() {
            return Err(Error::InvalidLevel(p));
        }
        let (q1, to_q1) = quotient_gerbe(&self.ambient, &self.levels[p + 1])?;
        let image = self.image_in(&self.levels[p], &q1, &to_q1)?;
        let band = central_as_sheaf(&q1, &image)?;
        let (_, proj) = quotient_gerbe(&q1, &image)?;
        Ok(Layer { ext: CentralExtensionOfGerbes::new(band, proj)?, to_total: to_q1, level: p })
    }

    /// Whether a local morphism lies in `N_p` at every point.
    fn in_level(&self, p: usize, i: &LocalObject, f: &LocalMorphism) -> bool {
        f.open().points().all(|x| self.levels[p].contains(x, i.obj(x), f.at(x)))
    }
}

/// Layer cohomology in degrees one and two, and surjectivity of
/// `Aut_U(i) ∩ N_p → Aut_U(i) ∩ N_p/N_q` for every object over the open.
pub fn check_acyclic_open_gerbe(fg: &FilteredGerbe, u: Open) -> Result<AcyclicReport> {
    let mut report = AcyclicReport { cohomology_failures: Vec::new(), surjectivity_failures: Vec::new() };
    let p = fg.ambient();
    let reps = p.object_reps(u)?;
    for level in 0..fg.p_max() {
        let layer = fg.layer_extension(level)?;
        if !is_acyclic_open(layer.ext.band().band(), u)? {
            report.cohomology_failures.push(level);
        }
        for q in (level + 1)..=fg.p_max() {
            let (quot, proj) = quotient_gerbe(p, &fg.levels[q])?;
            let image = fg.image_in(&fg.levels[level], &quot, &proj)?;
            let onto = reps.iter().try_fold(true, |ok, i| -> Result<bool> {
                if !ok {
                    return Ok(false);
                }
                let qi = proj.apply_object(i);
                let hit: HashSet<LocalMorphism> =
                    p.homs(i, i)?.into_iter().filter(|n| fg.in_level(level, i, n)).map(|n| proj.apply_morphism(&n)).collect();
                let target =
                    quot.homs(&qi, &qi)?.into_iter().filter(|n| n.open().points().all(|x| image.contains(x, qi.obj(x), n.at(x)))).count();
                Ok(hit.len() == target)
            })?;
            if !onto {
                report.surjectivity_failures.push((level, q));
            }
        }
    }
    Ok(report)
}

/// One layer: the central extension and the map from the ambient gerbe
/// onto its total gerbe.
#[derive(Clone, Debug)]
pub struct Layer {
    pub ext: CentralExtensionOfGerbes,
    pub to_total: GerbeMorphism,
    pub level: usize,
}

impl Layer {
    /// The band section under `a ∈ N_p(i, i)`.
    fn section(&self, i: &LocalObject, a: &LocalMorphism) -> Result<u32> {
        let qi = self.to_total.apply_object(i);
        let qa = self.to_total.apply_morphism(a);
        self.ext
            .band()
            .local_inv(&qi, &qa)?
            .ok_or_else(|| Error::BadFiltration(format!("element outside N_{} met at layer {}", self.level, self.level)))
    }
}

#[derive(Clone, Debug)]
pub enum Connect {
    Connected(LocalMorphism),
    LayerObstructed { layer: usize, reason: String },
}

#[derive(Clone, Debug)]
pub enum Glue {
    Glued(LocalObject),
    LayerObstructed { layer: usize, reason: String },
    NotLocallyNonempty(String),
}

/// An element `n ∈ N_p(V)(i, i)` mapping to `χ(s)` in the layer.
fn lift_section(fg: &FilteredGerbe, layer: &Layer, i: &LocalObject, v: Open, s: u32) -> Result<Option<LocalMorphism>> {
    let p = fg.ambient();
    let qi = layer.to_total.apply_object(i);
    let target = layer.ext.band().local(&qi, v, s)?;
    let iv = p.restrict_object(i, v)?;
    for n in p.homs(&iv, &iv)? {
        if fg.in_level(layer.level, &iv, &n) && layer.to_total.apply_morphism(&n) == target {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Builds a morphism `i → j` over `u` level by level.
pub fn connect(fg: &FilteredGerbe, u: Open, i: &LocalObject, j: &LocalObject) -> Result<Connect> {
    let p = fg.ambient();
    let sp = p.space().clone();
    if i.open() != u || j.open() != u {
        return Err(Error::BadObject("objects must live over the open".into()));
    }
    let mut cover = minimal_open_cover(&sp, u)?;
    let mut g = Vec::with_capacity(cover.len());
    for &part in cover.parts() {
        match p.first_hom(&p.restrict_object(i, part)?, &p.restrict_object(j, part)?)? {
            Some(f) => g.push(f),
            None => {
                return Ok(Connect::LayerObstructed { layer: 0, reason: format!("objects are not isomorphic over {}", sp.describe(part)) })
            }
        }
    }
    let mut refined = false;
    for level in 0..fg.p_max() {
        let layer = fg.layer_extension(level)?;
        let band = layer.ext.band().band().clone();
        loop {
            let c = Cochain::from_fn(&band, &cover, 1, |t, w| {
                if w.is_empty() {
                    return Ok(band.sections(w)?.id());
                }
                let a = p.compose(&p.inverse(&p.restrict_morphism(&g[t[1]], w)?), &p.restrict_morphism(&g[t[0]], w)?)?;
                layer.section(&p.restrict_object(i, w)?, &a)
            })?;
            if is_coboundary(&c)? {
                let f = solve_coboundary(&c)?.ok_or(Error::NotCocycle)?;
                for (k, &part) in cover.parts().iter().enumerate() {
                    let Some(n) = lift_section(fg, &layer, i, part, f.value(&[k]))? else {
                        return Ok(Connect::LayerObstructed {
                            layer: level,
                            reason: format!("a layer section over {} does not lift to N_{}", sp.describe(part), level),
                        });
                    };
                    g[k] = p.compose(&g[k], &p.inverse(&n))?;
                }
                break;
            }
            if refined {
                return Ok(Connect::LayerObstructed {
                    layer: level,
                    reason: format!("the layer 1-cocycle over {} is not a coboundary", sp.describe(u)),
                });
            }
            let pc = point_cover(&sp, u)?;
            let r = RefinementMap::find(&pc, &cover)?;
            g = pc.parts().iter().zip(r.phi()).map(|(&v, &k)| p.restrict_morphism(&g[k], v)).collect::<Result<_>>()?;
            cover = pc;
            refined = true;
        }
    }
    let f = p.glue_morphisms(i, j, &cover, &g)?;
    if !p.is_morphism(&f, i, j) {
        return Err(Error::BadMorphism("glued morphism fails verification".into()));
    }
    Ok(Connect::Connected(f))
}

/// Builds an object over `u` level by level.
pub fn glue_object(fg: &FilteredGerbe, u: Open) -> Result<Glue> {
    let p = fg.ambient();
    let sp = p.space().clone();
    let mut cover = minimal_open_cover(&sp, u)?;
    let mut objs = Vec::with_capacity(cover.len());
    for &part in cover.parts() {
        match p.object_reps(part)?.first() {
            Some(i) => objs.push(i.clone()),
            None => return Ok(Glue::NotLocallyNonempty(format!("no object over {}", sp.describe(part)))),
        }
    }
    let mut g: HashMap<(usize, usize), LocalMorphism> = HashMap::new();
    for a in 0..cover.len() {
        for b in 0..cover.len() {
            let w = cover.face(&[a, b])?;
            if w.is_empty() {
                continue;
            }
            let (ia, ib) = (p.restrict_object(&objs[a], w)?, p.restrict_object(&objs[b], w)?);
            if a == b {
                g.insert((a, b), p.identity(&ia));
                continue;
            }
            match connect(fg, w, &ia, &ib)? {
                Connect::Connected(f) => {
                    g.insert((a, b), f);
                }
                Connect::LayerObstructed { layer, reason } => {
                    return Ok(Glue::LayerObstructed { layer, reason: format!("connecting over {}: {}", sp.describe(w), reason) })
                }
            }
        }
    }
    let mut refined = false;
    for level in 0..fg.p_max() {
        let layer = fg.layer_extension(level)?;
        let band = layer.ext.band().band().clone();
        loop {
            let c = Cochain::from_fn(&band, &cover, 2, |t, w| {
                if w.is_empty() {
                    return Ok(band.sections(w)?.id());
                }
                let r = |a: usize, b: usize| p.restrict_morphism(&g[&(t[a], t[b])], w);
                let a = p.compose(&p.inverse(&r(0, 2)?), &p.compose(&r(1, 2)?, &r(0, 1)?)?)?;
                layer.section(&p.restrict_object(&objs[t[0]], w)?, &a)
            })?;
            if is_coboundary(&c)? {
                let b = solve_coboundary(&c)?.ok_or(Error::NotCocycle)?;
                let keys: Vec<(usize, usize)> = g.keys().copied().collect();
                for (k0, k1) in keys {
                    let w = cover.face(&[k0, k1])?;
                    let Some(n) = lift_section(fg, &layer, &objs[k0], w, b.value(&[k0, k1]))? else {
                        return Ok(Glue::LayerObstructed {
                            layer: level,
                            reason: format!("a layer section over {} does not lift to N_{}", sp.describe(w), level),
                        });
                    };
                    let cur = g[&(k0, k1)].clone();
                    g.insert((k0, k1), p.compose(&cur, &p.inverse(&n))?);
                }
                break;
            }
            if refined {
                return Ok(Glue::LayerObstructed {
                    layer: level,
                    reason: format!("the layer 2-cocycle over {} is not a coboundary", sp.describe(u)),
                });
            }
            let pc = point_cover(&sp, u)?;
            let r = RefinementMap::find(&pc, &cover)?;
            let phi = r.phi().to_vec();
            objs = pc.parts().iter().enumerate().map(|(k, &v)| p.restrict_object(&objs[phi[k]], v)).collect::<Result<_>>()?;
            let mut fine = HashMap::new();
            for a in 0..pc.len() {
                for b in 0..pc.len() {
                    let w = pc.face(&[a, b])?;
                    if !w.is_empty() {
                        fine.insert((a, b), p.restrict_morphism(&g[&(phi[a], phi[b])], w)?);
                    }
                }
            }
            g = fine;
            cover = pc;
            refined = true;
        }
    }
    let (i, _) = p.glue_objects(&cover, &objs, &|a, b| g[&(a, b)].clone())?;
    p.check_object(&i)?;
    Ok(Glue::Glued(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gerbe::chain_cocycle_gerbe;
    use crate::group::FiniteGroup;
    use crate::space::models;
    use std::sync::Arc;

    fn heisenberg_filtration(space: crate::space::FiniteSpace) -> FilteredSheafGroup {
        let g = FiniteGroup::heisenberg();
        let sheaf = SheafOfGroups::constant(Arc::new(space), &g);
        let n = sheaf.space().len();
        let all: Vec<Elem> = g.elements().collect();
        let z = g.center();
        FilteredSheafGroup::new(sheaf, vec![vec![all; n], vec![z; n], vec![vec![g.id()]; n]]).unwrap()
    }

    #[test]
    fn heisenberg_layers() {
        let f = heisenberg_filtration(models::chain(3));
        assert_eq!(f.layer(0).unwrap().stalk(0).order(), 4);
        assert_eq!(f.layer(1).unwrap().stalk(0).order(), 2);
        let u = f.ambient().space().whole();
        assert!(check_acyclic_open(&f, u).unwrap().holds());
        assert!(completeness_check(&f, u).unwrap().holds);
    }

    #[test]
    fn connect_and_glue_on_contractible_space() {
        let f = heisenberg_filtration(models::chain(3));
        let fg = FilteredGerbe::from_sheaf_filtration(&f).unwrap();
        let p = fg.ambient().clone();
        let u = p.space().whole();
        let all = p.all_objects(u).unwrap();
        for i in all.iter().step_by(7) {
            for j in all.iter().step_by(11) {
                match connect(&fg, u, i, j).unwrap() {
                    Connect::Connected(m) => assert!(p.is_morphism(&m, i, j)),
                    Connect::LayerObstructed { layer, reason } => panic!("layer {}: {}", layer, reason),
                }
            }
        }
        assert!(matches!(glue_object(&fg, u).unwrap(), Glue::Glued(_)));
    }

    #[test]
    fn pseudocircle_layer_blocks_connection() {
        let g = FiniteGroup::cyclic(4);
        let sheaf = SheafOfGroups::constant(Arc::new(models::pseudocircle()), &g);
        let n = sheaf.space().len();
        let f = FilteredSheafGroup::new(sheaf, vec![vec![vec![0, 1, 2, 3]; n], vec![vec![0, 2]; n], vec![vec![0]; n]]).unwrap();
        let fg = FilteredGerbe::from_sheaf_filtration(&f).unwrap();
        let p = fg.ambient().clone();
        let u = p.space().whole();
        let reps = p.object_reps(u).unwrap();
        assert_eq!(reps.len(), 4);
        let r = connect(&fg, u, &reps[0], &reps[1]).unwrap();
        assert!(matches!(r, Connect::LayerObstructed { .. }));
        assert!(!check_acyclic_open(&f, u).unwrap().holds());
        let g = check_acyclic_open_gerbe(&fg, u).unwrap();
        assert_eq!(g.cohomology_failures, check_acyclic_open(&f, u).unwrap().cohomology_failures);
    }

    #[test]
    fn pseudosphere_twisted_gerbe_is_obstructed_at_the_first_layer() {
        let sp = Arc::new(models::pseudosphere());
        let band = SheafOfGroups::constant(sp.clone(), &FiniteGroup::cyclic(4));
        let pt = |s: &str| sp.point(s).unwrap();
        let gamma: HashMap<_, _> = [((pt("e"), pt("c"), pt("a")), 1)].into_iter().collect();
        let ext = chain_cocycle_gerbe(&band, &gamma).unwrap();
        let n = sp.len();
        let fg = FilteredGerbe::from_band_filtration(&ext, &[vec![vec![0, 1, 2, 3]; n], vec![vec![0, 2]; n], vec![vec![0]; n]]).unwrap();
        match glue_object(&fg, sp.whole()).unwrap() {
            Glue::LayerObstructed { layer, .. } => assert_eq!(layer, 0),
            other => panic!("expected an obstruction, got {:?}", other),
        }
    }

    /// ℤ/4 with one restriction twisted by `-1`: global sections are `{0, 2}`
    /// and miss the nonzero global section of the quotient.
    fn twisted_z4() -> FilteredSheafGroup {
        let sp = Arc::new(models::pseudocircle());
        let pt = |s: &str| sp.point(s).unwrap();
        let z4 = FiniteGroup::cyclic(4);
        let id = vec![0, 1, 2, 3];
        let neg = vec![0, 3, 2, 1];
        let maps =
            [((pt("c"), pt("a")), id.clone()), ((pt("c"), pt("b")), id.clone()), ((pt("d"), pt("a")), id), ((pt("d"), pt("b")), neg)];
        let sheaf = SheafOfGroups::from_stalks(sp.clone(), vec![z4; 4], &maps).unwrap();
        FilteredSheafGroup::new(sheaf, vec![vec![vec![0, 1, 2, 3]; 4], vec![vec![0, 2]; 4], vec![vec![0]; 4]]).unwrap()
    }

    #[test]
    fn completeness_fails_with_witness() {
        let f = twisted_z4();
        let u = f.ambient().space().whole();
        let r = completeness_check(&f, u).unwrap();
        assert!(!r.holds);
        assert!(r.witness.unwrap().contains("misses"));
        let a = f.ambient().space().minimal_open(0).unwrap();
        assert!(completeness_check(&f, a).unwrap().holds);
    }

    #[test]
    fn truncation_keeps_connections() {
        let f = heisenberg_filtration(models::zigzag());
        let fg = FilteredGerbe::from_sheaf_filtration(&f).unwrap();
        let (t, proj) = fg.truncate(1).unwrap();
        assert_eq!(t.p_max(), 1);
        assert_eq!(f.truncate(1).unwrap().ambient().stalk(0).order(), 4);
        let p = fg.ambient().clone();
        let u = p.space().whole();
        let all = p.all_objects(u).unwrap();
        for i in all.iter().step_by(5).take(20) {
            for j in all.iter().step_by(13).take(20) {
                let full = matches!(connect(&fg, u, i, j).unwrap(), Connect::Connected(_));
                let (pi, pj) = (proj.apply_object(i), proj.apply_object(j));
                let short = matches!(connect(&t, u, &pi, &pj).unwrap(), Connect::Connected(_));
                assert!(!full || short);
            }
        }
        assert!(f.truncate(0).is_err());
    }
}
