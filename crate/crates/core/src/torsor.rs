//! Left torsors over sheaves of groups.
//!
//! Every torsor on a finite space is isomorphic to one whose stalk at `x`
//! is `G_x` with left translation, and whose restriction `x ≤ y` is
//! `t ↦ ρ(t) · φ_xy⁻¹` for elements `φ_xy ∈ G_y` satisfying
//! `φ_xz = φ_yz · ρ(φ_xy)`.  Torsors are stored in that form.

use std::collections::HashMap;

use crate::cech::{all_one_cocycles, connecting_cocycle, twisted_equivalence, Cochain, CohClass};
use crate::error::{Error, Result};
use crate::group::Elem;
use crate::sheaf::{CentralExtension, SheafHom, SheafOfGroups};
use crate::space::{minimal_open_cover, Cover, Open, Point};

/// Cap on the acting stalks for isomorphism search.
pub const TORSOR_ISO_CAP: usize = 16;

#[derive(Clone, Debug)]
pub struct Torsor {
    group: SheafOfGroups,
    /// `phi[x][y]` for `x ≤ y`.
    phi: Vec<Vec<Option<Elem>>>,
}

impl PartialEq for Torsor {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.phi == other.phi
    }
}

impl Torsor {
    /// From transition elements on the covering relations; the rest is
    /// composed and checked for consistency.
    pub fn new(group: &SheafOfGroups, hasse_phi: &HashMap<(Point, Point), Elem>) -> Result<Self> {
        let space = group.space().clone();
        let n = space.len();
        let mut phi: Vec<Vec<Option<Elem>>> = vec![vec![None; n]; n];
        for x in 0..n {
            phi[x][x] = Some(group.stalk(x).id());
        }
        for &(x, y) in space.hasse() {
            let e = *hasse_phi
                .get(&(x, y))
                .ok_or_else(|| Error::BadTorsor(format!("missing transition {}→{}", space.name(x), space.name(y))))?;
            if e as usize >= group.stalk(y).order() {
                return Err(Error::BadTorsor("transition element out of range".into()));
            }
            phi[x][y] = Some(e);
        }
        let order = space.linear_order().to_vec();
        for &z in &order {
            for &x in &order {
                if !space.lt(x, z) {
                    continue;
                }
                // φ_xz = φ_yz · ρ_yz(φ_xy) for every covering y ⋖ z above x
                for &(y, zz) in space.hasse() {
                    if zz != z || !space.leq(x, y) {
                        continue;
                    }
                    let a = phi[x][y].expect("smaller pair is set");
                    let b = phi[y][z].expect("covering pair is set");
                    let v = group.stalk(z).mul(b, group.comp(y, z)[a as usize]);
                    match phi[x][z] {
                        None => phi[x][z] = Some(v),
                        Some(w) if w != v => {
                            return Err(Error::BadTorsor(format!("transitions are inconsistent on {} < {}", space.name(x), space.name(z))))
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(Torsor { group: group.clone(), phi })
    }

    /// The trivial torsor `G` acting on itself.
    pub fn trivial(group: &SheafOfGroups) -> Self {
        let space = group.space();
        let map = space.hasse().iter().map(|&(x, y)| ((x, y), group.stalk(y).id())).collect();
        Torsor::new(group, &map).expect("identity transitions are consistent")
    }

    pub fn group(&self) -> &SheafOfGroups {
        &self.group
    }

    /// `φ_xy`, for `x ≤ y`.
    pub fn phi(&self, x: Point, y: Point) -> Elem {
        self.phi[x][y].expect("x <= y")
    }

    pub fn hasse_phi(&self) -> Vec<((Point, Point), Elem)> {
        self.group.space().hasse().iter().map(|&(x, y)| ((x, y), self.phi(x, y))).collect()
    }

    /// Restriction of the stalk element `t ∈ T_x` to `T_y`.
    pub fn restrict_stalk(&self, x: Point, y: Point, t: Elem) -> Elem {
        let g = &self.group;
        g.stalk(y).mul(g.comp(x, y)[t as usize], g.stalk(y).inv(self.phi(x, y)))
    }

    /// Sections over `u`: compatible families in point order.
    pub fn sections(&self, u: Open) -> Result<Vec<Vec<Elem>>> {
        let space = self.group.space();
        space.check(u)?;
        let points: Vec<Point> = u.points().collect();
        let mins = space.minimal_points(u);
        let mut out = Vec::new();
        let mut choice = vec![0 as Elem; mins.len()];
        self.sections_rec(&points, &mins, 0, &mut choice, &mut out);
        Ok(out)
    }

    fn sections_rec(&self, points: &[Point], mins: &[Point], depth: usize, choice: &mut Vec<Elem>, out: &mut Vec<Vec<Elem>>) {
        let space = self.group.space();
        if depth == mins.len() {
            let fam: Vec<Elem> = points
                .iter()
                .map(|&y| {
                    let i = (0..mins.len()).find(|&i| space.leq(mins[i], y)).expect("below some minimal point");
                    self.restrict_stalk(mins[i], y, choice[i])
                })
                .collect();
            out.push(fam);
            return;
        }
        let x = mins[depth];
        for t in self.group.stalk(x).elements() {
            choice[depth] = t;
            let ok = points.iter().all(|&y| {
                if !space.leq(x, y) {
                    return true;
                }
                let v = self.restrict_stalk(x, y, t);
                (0..depth).all(|i| !space.leq(mins[i], y) || self.restrict_stalk(mins[i], y, choice[i]) == v)
            });
            if ok {
                self.sections_rec(points, mins, depth + 1, choice, out);
            }
        }
    }

    pub fn has_global_section(&self) -> Result<bool> {
        let x = self.group.space().whole();
        Ok(!self.sections(x)?.is_empty())
    }

    /// Transition cocycle on `cover`: with the first section `s_k` over
    /// each part, `s_{k1} = g_{k0k1} · s_{k0}` on overlaps.
    pub fn cocycle(&self, cover: &Cover) -> Result<Cochain> {
        let mut local = Vec::new();
        for (k, part) in cover.parts().iter().enumerate() {
            let s = self.sections(*part)?;
            let first = s.into_iter().next().ok_or_else(|| Error::BadTorsor(format!("part {} does not trivialize the torsor", k)))?;
            let pts: Vec<Point> = part.points().collect();
            local.push((pts, first));
        }
        let g = &self.group;
        Cochain::from_fn(g, cover, 1, |t, w| {
            let at = |k: usize, x: Point| {
                let (pts, s) = &local[k];
                s[pts.iter().position(|&p| p == x).expect("point of the part")]
            };
            g.section_from_fn(w, |x| g.stalk(x).mul(at(t[1], x), g.stalk(x).inv(at(t[0], x))))?
                .ok_or_else(|| Error::BadTorsor("transition is not a section".into()))
        })
    }
}

/// Glues trivial torsors along `c`: `T_x = G_x` through the first part
/// `k(x)` containing `x`, restriction `t ↦ ρ(t) · c_{k(x)k(y)}(y)⁻¹`.
pub fn torsor_from_cocycle(g: &SheafOfGroups, cover: &Cover, c: &Cochain) -> Result<Torsor> {
    if c.degree() != 1 || c.cover() != cover || c.sheaf() != g {
        return Err(Error::BadCochain("expected a 1-cochain of the sheaf on the cover".into()));
    }
    if !crate::cech::is_cocycle(c)? {
        return Err(Error::NotCocycle);
    }
    let space = g.space();
    let chart: Vec<Option<usize>> = (0..space.len()).map(|x| cover.parts().iter().position(|p| p.contains(x))).collect();
    let mut map = HashMap::new();
    for &(x, y) in space.hasse() {
        match (chart[x], chart[y]) {
            (Some(kx), Some(ky)) => {
                let w = cover.face(&[kx, ky])?;
                let sg = g.sections(w)?;
                map.insert((x, y), sg.at(c.value(&[kx, ky]), y));
            }
            _ => {
                map.insert((x, y), g.stalk(y).id());
            }
        }
    }
    Torsor::new(g, &map)
}

/// Class of the torsor on the minimal-open cover of the whole space.
pub fn classify(t: &Torsor) -> Result<CohClass> {
    let space = t.group.space();
    let cover = minimal_open_cover(space, space.whole())?;
    CohClass::new(t.cocycle(&cover)?)
}

/// Contracted product `H ×_G T`: transitions pushed along `f`.
pub fn induce(f: &SheafHom, t: &Torsor) -> Result<Torsor> {
    if f.source() != &t.group {
        return Err(Error::SheafMismatch("homomorphism does not act on the torsor's group".into()));
    }
    let map = t.group.space().hasse().iter().map(|&(x, y)| ((x, y), f.at(y)[t.phi(x, y) as usize])).collect();
    Torsor::new(f.target(), &map)
}

/// An isomorphism `s → s2`, as the elements `m_x` with
/// `φ2_xy = m_y · φ_xy · ρ(m_x)⁻¹` (the map `t ↦ t · m_x⁻¹` on stalks).
pub fn find_isomorphism(s: &Torsor, s2: &Torsor) -> Result<Option<Vec<Elem>>> {
    if s.group != s2.group {
        return Err(Error::SheafMismatch("torsors over different groups".into()));
    }
    let g = &s.group;
    let space = g.space();
    if (0..space.len()).any(|x| g.stalk(x).order() > TORSOR_ISO_CAP) {
        return Err(Error::CapExceeded(format!("acting stalks above {} elements", TORSOR_ISO_CAP)));
    }
    let order = space.linear_order().to_vec();
    let mut m = vec![0 as Elem; space.len()];
    fn rec(depth: usize, order: &[Point], m: &mut Vec<Elem>, s: &Torsor, s2: &Torsor) -> bool {
        if depth == order.len() {
            return true;
        }
        let g = &s.group;
        let space = g.space();
        let y = order[depth];
        for a in g.stalk(y).elements() {
            m[y] = a;
            let ok = order[..depth].iter().all(|&x| {
                if !space.lt(x, y) {
                    return true;
                }
                let gy = g.stalk(y);
                let rhs = gy.mul(gy.mul(a, s.phi(x, y)), gy.inv(g.comp(x, y)[m[x] as usize]));
                rhs == s2.phi(x, y)
            });
            if ok && rec(depth + 1, order, m, s, s2) {
                return true;
            }
        }
        false
    }
    Ok(if rec(0, &order, &mut m, s, s2) { Some(m) } else { None })
}

/// `∂(t) ∈ Ȟ²(X, N)`: lift the transition cocycle of `t` to `G` and take
/// `g_{k0k2}⁻¹ · g_{k1k2} · g_{k0k1}`.  The minimal-open cover is tried
/// first, then the supplied covers.
pub fn connecting_class(ext: &CentralExtension, t: &Torsor, covers: &[Cover]) -> Result<CohClass> {
    if t.group != ext.h {
        return Err(Error::SheafMismatch("torsor is not over the quotient sheaf".into()));
    }
    let space = ext.h.space();
    let mut family = vec![minimal_open_cover(space, space.whole())?];
    family.extend(covers.iter().cloned());
    for cover in &family {
        let Ok(h) = t.cocycle(cover) else { continue };
        if let Some(c) = connecting_cocycle(ext, &h)? {
            return CohClass::new(c);
        }
    }
    Err(Error::NoLiftableCover)
}

/// A `G`-torsor inducing `t` along the projection, found by searching all
/// `G`-valued 1-cocycles on the minimal-open cover (which trivializes
/// every torsor).
pub fn inducing_torsor(ext: &CentralExtension, t: &Torsor) -> Result<Option<Torsor>> {
    let space = ext.g.space();
    let cover = minimal_open_cover(space, space.whole())?;
    let target = t.cocycle(&cover)?;
    for g in all_one_cocycles(&ext.g, &cover)? {
        if twisted_equivalence(&g.push(&ext.proj)?, &target)?.is_some() {
            return Ok(Some(torsor_from_cocycle(&ext.g, &cover, &g)?));
        }
    }
    Ok(None)
}

/// All torsors up to isomorphism, one per class of `Ȟ¹` on the
/// minimal-open cover.
pub fn torsor_classes(g: &SheafOfGroups) -> Result<Vec<Torsor>> {
    let space = g.space();
    let cover = minimal_open_cover(space, space.whole())?;
    let h1 = crate::cech::nonabelian_h1(g, &cover)?;
    (0..h1.len()).map(|c| torsor_from_cocycle(g, &cover, h1.representative(c))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::{classes_equal, cohomology_group, Backend};
    use crate::group::FiniteGroup;
    use crate::space::models;
    use std::sync::Arc;

    #[test]
    fn nontrivial_torsor_on_pseudocircle() {
        let g = SheafOfGroups::constant(Arc::new(models::pseudocircle()), &FiniteGroup::cyclic(2));
        let cover = minimal_open_cover(g.space(), g.space().whole()).unwrap();
        let gen = cohomology_group(&g, &cover, 1, Backend::Snf).unwrap().generators[0].clone();
        let t = torsor_from_cocycle(&g, &cover, &gen).unwrap();
        assert!(!t.has_global_section().unwrap());
        let back = classify(&t).unwrap();
        assert!(classes_equal(&back, &CohClass::new(gen).unwrap()).unwrap());
        let triv = Torsor::trivial(&g);
        assert!(triv.has_global_section().unwrap());
        assert!(find_isomorphism(&t, &triv).unwrap().is_none());
        assert!(find_isomorphism(&t, &t).unwrap().is_some());
        assert_eq!(torsor_classes(&g).unwrap().len(), 2);
    }

    #[test]
    fn induced_torsor_from_reduction() {
        let sp = Arc::new(models::pseudocircle());
        let ext = CentralExtension::constant(sp.clone(), &FiniteGroup::cyclic(4), &[0, 2]).unwrap();
        let cover = minimal_open_cover(&sp, sp.whole()).unwrap();
        let gen = cohomology_group(&ext.g, &cover, 1, Backend::Snf).unwrap().generators[0].clone();
        let t = torsor_from_cocycle(&ext.g, &cover, &gen).unwrap();
        let s = induce(&ext.proj, &t).unwrap();
        let pushed = CohClass::new(gen.push(&ext.proj).unwrap()).unwrap();
        assert!(classes_equal(&classify(&s).unwrap(), &pushed).unwrap());
        // Every ℤ/2-torsor on the pseudocircle lifts.
        for h in torsor_classes(&ext.h).unwrap() {
            assert!(connecting_class(&ext, &h, &[]).unwrap().is_trivial().unwrap());
            assert!(inducing_torsor(&ext, &h).unwrap().is_some());
        }
    }
}
