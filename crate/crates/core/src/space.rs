//! Finite topological spaces as finite posets.
//!
//! A point `x` specializes to `y` when `x <= y`; the open sets are the
//! up-sets, and the smallest open containing `x` is the principal up-set
//! `U_x`.  Opens are stored as bit masks over the point indices.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

/// Largest supported number of points.
pub const MAX_POINTS: usize = 16;

pub type Point = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSpace {
    names: Vec<String>,
    /// `up[x]` is the mask of all `y >= x`.
    up: Vec<u32>,
    /// `down[y]` is the mask of all `x <= y`.
    down: Vec<u32>,
    /// Strict covering relations `x < y` with nothing in between.
    hasse: Vec<(Point, Point)>,
    /// Points sorted so that `x < y` implies `x` comes first.
    linear: Vec<Point>,
    id: u64,
}

/// An up-set of a particular finite space.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Open {
    space: u64,
    bits: u32,
}

impl fmt::Debug for Open {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Open({:#b})", self.bits)
    }
}

impl FiniteSpace {
    /// Builds a space from point names and generating relations `p <= q`.
    /// The reflexive-transitive closure is taken; antisymmetry is checked.
    pub fn new<S: AsRef<str>>(names: &[S], leq: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        if n > MAX_POINTS {
            return Err(Error::TooManyPoints(n, MAX_POINTS));
        }
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::DuplicatePoint(a.clone()));
            }
        }
        let mut rel = vec![vec![false; n]; n];
        for (x, row) in rel.iter_mut().enumerate() {
            row[x] = true;
        }
        for &(p, q) in leq {
            if p >= n {
                return Err(Error::PointOutOfRange(p));
            }
            if q >= n {
                return Err(Error::PointOutOfRange(q));
            }
            rel[p][q] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if rel[i][k] {
                    for j in 0..n {
                        if rel[k][j] {
                            rel[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rel[i][j] && rel[j][i] {
                    return Err(Error::NotAntisymmetric(names[i].clone(), names[j].clone()));
                }
            }
        }
        let mut up = vec![0u32; n];
        let mut down = vec![0u32; n];
        for i in 0..n {
            for j in 0..n {
                if rel[i][j] {
                    up[i] |= 1 << j;
                    down[j] |= 1 << i;
                }
            }
        }
        let mut hasse = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x != y && rel[x][y] {
                    let between = (0..n).any(|z| z != x && z != y && rel[x][z] && rel[z][y]);
                    if !between {
                        hasse.push((x, y));
                    }
                }
            }
        }
        let mut linear: Vec<Point> = (0..n).collect();
        linear.sort_by_key(|&x| (down[x].count_ones(), x));

        let mut h = DefaultHasher::new();
        names.hash(&mut h);
        up.hash(&mut h);
        let id = h.finish();
        Ok(FiniteSpace { names, up, down, hasse, linear, id })
    }

    /// Same as [`FiniteSpace::new`] with relations given by point names.
    pub fn from_names<S: AsRef<str>, T: AsRef<str>>(names: &[S], leq: &[(T, T)]) -> Result<Self> {
        let idx = |s: &str| names.iter().position(|n| n.as_ref() == s).ok_or_else(|| Error::UnknownPoint(s.to_string()));
        let mut rel = Vec::with_capacity(leq.len());
        for (p, q) in leq {
            rel.push((idx(p.as_ref())?, idx(q.as_ref())?));
        }
        FiniteSpace::new(names, &rel)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn name(&self, x: Point) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn point(&self, name: &str) -> Result<Point> {
        self.names.iter().position(|n| n == name).ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    pub fn leq(&self, x: Point, y: Point) -> bool {
        self.up[x] >> y & 1 == 1
    }

    pub fn lt(&self, x: Point, y: Point) -> bool {
        x != y && self.leq(x, y)
    }

    /// Covering relations of the order.
    pub fn hasse(&self) -> &[(Point, Point)] {
        &self.hasse
    }

    /// All points in an order-compatible sequence (smaller points first).
    pub fn linear_order(&self) -> &[Point] {
        &self.linear
    }

    /// All strict relations `x < y`, ordered by `(x, y)`.
    pub fn strict_relations(&self) -> Vec<(Point, Point)> {
        let mut out = Vec::new();
        for x in 0..self.len() {
            for y in 0..self.len() {
                if self.lt(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    fn mask_all(&self) -> u32 {
        if self.len() == 32 {
            u32::MAX
        } else {
            (1u32 << self.len()) - 1
        }
    }

    pub fn whole(&self) -> Open {
        Open { space: self.id, bits: self.mask_all() }
    }

    pub fn empty(&self) -> Open {
        Open { space: self.id, bits: 0 }
    }

    /// The principal up-set at `x`.
    pub fn minimal_open(&self, x: Point) -> Result<Open> {
        if x >= self.len() {
            return Err(Error::PointOutOfRange(x));
        }
        Ok(Open { space: self.id, bits: self.up[x] })
    }

    pub fn up_mask(&self, x: Point) -> u32 {
        self.up[x]
    }

    pub fn down_mask(&self, x: Point) -> u32 {
        self.down[x]
    }

    pub fn is_up_set(&self, bits: u32) -> bool {
        if bits & !self.mask_all() != 0 {
            return false;
        }
        (0..self.len()).all(|x| bits >> x & 1 == 0 || self.up[x] & !bits == 0)
    }

    /// Wraps a mask as an open, checking the up-set condition.
    pub fn open(&self, bits: u32) -> Result<Open> {
        if self.is_up_set(bits) {
            Ok(Open { space: self.id, bits })
        } else {
            Err(Error::NotOpen(self.describe_bits(bits)))
        }
    }

    pub fn open_from_points(&self, pts: &[Point]) -> Result<Open> {
        let mut bits = 0u32;
        for &p in pts {
            if p >= self.len() {
                return Err(Error::PointOutOfRange(p));
            }
            bits |= 1 << p;
        }
        self.open(bits)
    }

    pub fn open_from_names<S: AsRef<str>>(&self, pts: &[S]) -> Result<Open> {
        let mut idx = Vec::with_capacity(pts.len());
        for p in pts {
            idx.push(self.point(p.as_ref())?);
        }
        self.open_from_points(&idx)
    }

    /// The smallest open containing the given points.
    pub fn open_hull(&self, pts: &[Point]) -> Open {
        let bits = pts.iter().fold(0u32, |acc, &p| acc | self.up[p]);
        Open { space: self.id, bits }
    }

    /// The smallest open containing the named points.
    pub fn open_hull_of_names<S: AsRef<str>>(&self, pts: &[S]) -> Result<Open> {
        let idx = pts.iter().map(|p| self.point(p.as_ref())).collect::<Result<Vec<_>>>()?;
        Ok(self.open_hull(&idx))
    }

    /// Every open of the space, in increasing mask order.
    pub fn opens(&self) -> Vec<Open> {
        let mut out = Vec::new();
        for bits in 0..=self.mask_all() {
            if self.is_up_set(bits) {
                out.push(Open { space: self.id, bits });
            }
            if bits == self.mask_all() {
                break;
            }
        }
        out
    }

    /// Every open contained in `u`.
    pub fn sub_opens(&self, u: Open) -> Vec<Open> {
        let mut out = Vec::new();
        let mut sub = u.bits;
        loop {
            if self.is_up_set(sub) {
                out.push(Open { space: self.id, bits: sub });
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & u.bits;
        }
        out.sort();
        out
    }

    pub fn check(&self, u: Open) -> Result<()> {
        if u.space != self.id {
            Err(Error::SpaceMismatch)
        } else {
            Ok(())
        }
    }

    /// Minimal points of an open, in index order.
    pub fn minimal_points(&self, u: Open) -> Vec<Point> {
        u.points().filter(|&x| self.down[x] & u.bits == 1 << x).collect()
    }

    /// Connected components of the subposet on `u`, as opens.
    pub fn components(&self, u: Open) -> Vec<Open> {
        let mut left = u.bits;
        let mut out = Vec::new();
        while left != 0 {
            let start = left.trailing_zeros() as usize;
            let mut comp = 1u32 << start;
            loop {
                let mut grown = comp;
                for x in 0..self.len() {
                    if comp >> x & 1 == 1 {
                        grown |= (self.up[x] | self.down[x]) & u.bits;
                    }
                }
                if grown == comp {
                    break;
                }
                comp = grown;
            }
            out.push(Open { space: self.id, bits: comp });
            left &= !comp;
        }
        out
    }

    pub fn describe(&self, u: Open) -> String {
        self.describe_bits(u.bits)
    }

    fn describe_bits(&self, bits: u32) -> String {
        let pts: Vec<&str> = (0..self.len()).filter(|&x| bits >> x & 1 == 1).map(|x| self.names[x].as_str()).collect();
        format!("{{{}}}", pts.join(","))
    }

    pub fn names_of(&self, u: Open) -> Vec<String> {
        u.points().map(|x| self.names[x].clone()).collect()
    }
}

impl Open {
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn space_id(&self) -> u64 {
        self.space
    }

    pub fn contains(&self, x: Point) -> bool {
        x < 32 && self.bits >> x & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_subset(&self, other: &Open) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        let bits = self.bits;
        (0..32).filter(move |&x| bits >> x & 1 == 1)
    }

    pub fn intersect(&self, other: &Open) -> Result<Open> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(Open { space: self.space, bits: self.bits & other.bits })
    }

    pub fn union(&self, other: &Open) -> Result<Open> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(Open { space: self.space, bits: self.bits | other.bits })
    }
}

/// Set intersection of two opens.
pub fn intersect(a: &Open, b: &Open) -> Result<Open> {
    a.intersect(b)
}

/// An ordered open cover of `target`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cover {
    target: Open,
    parts: Vec<Open>,
}

impl Cover {
    pub fn new(target: Open, parts: Vec<Open>) -> Result<Self> {
        let mut union = 0u32;
        for p in &parts {
            if p.space != target.space {
                return Err(Error::SpaceMismatch);
            }
            if !p.is_subset(&target) {
                return Err(Error::NotACover(format!("part {:#b} is not inside the target", p.bits)));
            }
            union |= p.bits;
        }
        if union != target.bits {
            return Err(Error::NotACover(format!("union {:#b} differs from target {:#b}", union, target.bits)));
        }
        Ok(Cover { target, parts })
    }

    pub fn target(&self) -> Open {
        self.target
    }

    pub fn parts(&self) -> &[Open] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn part(&self, k: usize) -> Result<Open> {
        self.parts.get(k).copied().ok_or(Error::InvalidIndex(k))
    }

    /// `U_{k0,...,km}`; repeated indices are allowed.
    pub fn face(&self, tuple: &[usize]) -> Result<Open> {
        let mut bits = self.target.bits;
        for &k in tuple {
            bits &= self.part(k)?.bits;
        }
        Ok(Open { space: self.target.space, bits })
    }

    /// Sort key used when searching cover families.
    pub fn search_key(&self) -> (usize, Vec<u32>) {
        (self.parts.len(), self.parts.iter().map(|p| p.bits).collect())
    }
}

/// Iterated intersection of the parts named by `tuple`.
pub fn nerve_face(cover: &Cover, tuple: &[usize]) -> Result<Open> {
    cover.face(tuple)
}

/// A refinement `fine -> coarse` given by an index map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementMap {
    fine: Cover,
    coarse: Cover,
    phi: Vec<usize>,
}

impl RefinementMap {
    pub fn new(fine: Cover, coarse: Cover, phi: Vec<usize>) -> Result<Self> {
        if fine.target != coarse.target {
            return Err(Error::TargetMismatch);
        }
        if phi.len() != fine.len() {
            return Err(Error::BadRefinement("index map has the wrong length".into()));
        }
        for (l, &k) in phi.iter().enumerate() {
            let c = coarse.part(k)?;
            if !fine.parts[l].is_subset(&c) {
                return Err(Error::BadRefinement(format!("part {} is not inside part {}", l, k)));
            }
        }
        Ok(RefinementMap { fine, coarse, phi })
    }

    /// Finds a refinement map by sending each fine part to the first coarse
    /// part containing it.
    pub fn find(fine: &Cover, coarse: &Cover) -> Result<Self> {
        let mut phi = Vec::with_capacity(fine.len());
        for (l, p) in fine.parts.iter().enumerate() {
            let k = coarse
                .parts
                .iter()
                .position(|c| p.is_subset(c))
                .ok_or_else(|| Error::BadRefinement(format!("part {} lies in no coarse part", l)))?;
            phi.push(k);
        }
        RefinementMap::new(fine.clone(), coarse.clone(), phi)
    }

    pub fn identity(cover: &Cover) -> Self {
        RefinementMap { fine: cover.clone(), coarse: cover.clone(), phi: (0..cover.len()).collect() }
    }

    pub fn fine(&self) -> &Cover {
        &self.fine
    }

    pub fn coarse(&self) -> &Cover {
        &self.coarse
    }

    pub fn phi(&self) -> &[usize] {
        &self.phi
    }

    /// Composition `self` followed by `next` (both refinements of the same target).
    pub fn then(&self, next: &RefinementMap) -> Result<RefinementMap> {
        if next.fine != self.coarse {
            return Err(Error::BadRefinement("covers do not chain".into()));
        }
        let phi = self.phi.iter().map(|&k| next.phi[k]).collect();
        RefinementMap::new(self.fine.clone(), next.coarse.clone(), phi)
    }
}

/// The cover `{U_k ∩ V_l}` indexed by pairs in lexicographic order, empty
/// parts dropped, with both projections.
pub fn common_refinement(u: &Cover, v: &Cover) -> Result<(Cover, RefinementMap, RefinementMap)> {
    if u.target != v.target {
        return Err(Error::TargetMismatch);
    }
    let mut parts = Vec::new();
    let mut pu = Vec::new();
    let mut pv = Vec::new();
    for (k, a) in u.parts.iter().enumerate() {
        for (l, b) in v.parts.iter().enumerate() {
            let w = a.intersect(b)?;
            if !w.is_empty() {
                parts.push(w);
                pu.push(k);
                pv.push(l);
            }
        }
    }
    let cover = Cover::new(u.target, parts)?;
    let ru = RefinementMap::new(cover.clone(), u.clone(), pu)?;
    let rv = RefinementMap::new(cover.clone(), v.clone(), pv)?;
    Ok((cover, ru, rv))
}

/// Cover of `u` by the minimal opens of its minimal points.
pub fn minimal_open_cover(space: &FiniteSpace, u: Open) -> Result<Cover> {
    space.check(u)?;
    let parts = space.minimal_points(u).into_iter().map(|x| space.minimal_open(x)).collect::<Result<Vec<_>>>()?;
    Cover::new(u, parts)
}

/// Cover of `u` by the minimal opens of all its points.  It refines every
/// open cover of `u`.
pub fn point_cover(space: &FiniteSpace, u: Open) -> Result<Cover> {
    space.check(u)?;
    let parts = u.points().map(|x| space.minimal_open(x)).collect::<Result<Vec<_>>>()?;
    Cover::new(u, parts)
}

/// Standard small spaces.
pub mod models {
    use super::FiniteSpace;

    pub fn one_point() -> FiniteSpace {
        FiniteSpace::new(&["x"], &[]).expect("valid")
    }

    /// Chain `p0 < p1 < ... < p(n-1)`.
    pub fn chain(n: usize) -> FiniteSpace {
        let names: Vec<String> = (0..n).map(|i| format!("p{}", i)).collect();
        let rel: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        FiniteSpace::new(&names, &rel).expect("valid")
    }

    /// `o` below `a` and `b`: a minimum with two maximal points.
    pub fn vee() -> FiniteSpace {
        FiniteSpace::from_names(&["o", "a", "b"], &[("o", "a"), ("o", "b")]).expect("valid")
    }

    /// Zigzag `a < b > c < d`; contractible, no minimum and no maximum.
    pub fn zigzag() -> FiniteSpace {
        FiniteSpace::from_names(&["a", "b", "c", "d"], &[("a", "b"), ("c", "b"), ("c", "d")]).expect("valid")
    }

    /// Four points, `c` and `d` below both `a` and `b`.
    pub fn pseudocircle() -> FiniteSpace {
        FiniteSpace::from_names(&["a", "b", "c", "d"], &[("c", "a"), ("c", "b"), ("d", "a"), ("d", "b")]).expect("valid")
    }

    /// Non-Hausdorff suspension of the pseudocircle: `e,f < c,d < a,b`.
    pub fn pseudosphere() -> FiniteSpace {
        FiniteSpace::from_names(
            &["a", "b", "c", "d", "e", "f"],
            &[("c", "a"), ("c", "b"), ("d", "a"), ("d", "b"), ("e", "c"), ("e", "d"), ("f", "c"), ("f", "d")],
        )
        .expect("valid")
    }

    /// Face poset of the boundary of a tetrahedron, faces below their
    /// sub-faces, so the four triangles are the minimal points.  Every
    /// nonempty intersection of minimal opens is again a minimal open.
    pub fn tetra_sphere() -> FiniteSpace {
        let mut names = Vec::new();
        let mut faces: Vec<Vec<usize>> = Vec::new();
        for v in 0..4 {
            names.push(format!("v{}", v));
            faces.push(vec![v]);
        }
        for a in 0..4 {
            for b in (a + 1)..4 {
                names.push(format!("e{}{}", a, b));
                faces.push(vec![a, b]);
            }
        }
        for a in 0..4 {
            for b in (a + 1)..4 {
                for c in (b + 1)..4 {
                    names.push(format!("t{}{}{}", a, b, c));
                    faces.push(vec![a, b, c]);
                }
            }
        }
        let mut rel = Vec::new();
        for (i, big) in faces.iter().enumerate() {
            for (j, small) in faces.iter().enumerate() {
                if i != j && small.iter().all(|v| big.contains(v)) {
                    rel.push((i, j));
                }
            }
        }
        FiniteSpace::new(&names, &rel).expect("valid")
    }
}

#[cfg(test)]
mod tests {
    use super::models::*;
    use super::*;

    #[test]
    fn pseudocircle_opens() {
        let s = pseudocircle();
        let c = s.point("c").unwrap();
        let uc = s.minimal_open(c).unwrap();
        assert_eq!(s.describe(uc), "{a,b,c}");
        assert_eq!(s.opens().len(), 7);
        let ud = s.minimal_open(s.point("d").unwrap()).unwrap();
        assert_eq!(s.describe(uc.intersect(&ud).unwrap()), "{a,b}");
    }

    #[test]
    fn pseudosphere_has_ten_opens() {
        assert_eq!(pseudosphere().opens().len(), 10);
    }

    #[test]
    fn tetra_sphere_is_leray() {
        let s = tetra_sphere();
        let cover = minimal_open_cover(&s, s.whole()).unwrap();
        assert_eq!(cover.len(), 4);
        for k0 in 0..4 {
            for k1 in 0..4 {
                let f = cover.face(&[k0, k1]).unwrap();
                assert_eq!(s.minimal_points(f).len(), 1);
            }
        }
        let all = cover.face(&[0, 1, 2, 3]).unwrap();
        assert!(all.is_empty());
    }

    #[test]
    fn maximal_point_is_its_own_open() {
        let s = chain(2);
        let y = s.minimal_open(1).unwrap();
        assert_eq!(s.describe(y), "{p1}");
        let x = one_point();
        assert_eq!(x.describe(x.minimal_open(0).unwrap()), "{x}");
    }

    #[test]
    fn rejects_cycles() {
        let r = FiniteSpace::from_names(&["a", "b"], &[("a", "b"), ("b", "a")]);
        assert!(matches!(r, Err(Error::NotAntisymmetric(..))));
    }

    #[test]
    fn nerve_faces() {
        let s = pseudocircle();
        let cover = minimal_open_cover(&s, s.whole()).unwrap();
        assert_eq!(cover.face(&[1, 1]).unwrap(), cover.part(1).unwrap());
        assert_eq!(s.describe(cover.face(&[0, 1]).unwrap()), "{a,b}");
        assert!(cover.face(&[2]).is_err());
    }

    #[test]
    fn common_refinement_of_pseudocircle_covers() {
        let s = pseudocircle();
        let u = minimal_open_cover(&s, s.whole()).unwrap();
        let ab = s.open_from_names(&["a", "b"]).unwrap();
        let mut parts = u.parts().to_vec();
        parts.push(ab);
        let v = Cover::new(s.whole(), parts).unwrap();
        let (w, ru, rv) = common_refinement(&u, &v).unwrap();
        assert_eq!(w.len(), 6);
        assert_eq!(ru.phi(), &[0, 0, 0, 1, 1, 1]);
        assert_eq!(rv.phi(), &[0, 1, 2, 0, 1, 2]);

        let trivial = Cover::new(s.whole(), vec![s.whole()]).unwrap();
        let (w2, r1, _) = common_refinement(&trivial, &u).unwrap();
        assert_eq!(w2.parts(), u.parts());
        assert!(r1.phi().iter().all(|&k| k == 0));
    }

    #[test]
    fn point_cover_refines_everything() {
        let s = pseudosphere();
        let fine = point_cover(&s, s.whole()).unwrap();
        for coarse in [minimal_open_cover(&s, s.whole()).unwrap(), Cover::new(s.whole(), vec![s.whole()]).unwrap()] {
            assert!(RefinementMap::find(&fine, &coarse).is_ok());
        }
    }

    #[test]
    fn components_of_intersection() {
        let s = pseudocircle();
        let ab = s.open_from_names(&["a", "b"]).unwrap();
        assert_eq!(s.components(ab).len(), 2);
        assert_eq!(s.components(s.whole()).len(), 1);
    }
}
