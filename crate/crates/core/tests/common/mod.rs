//! Brute-force oracles shared by the integration and acceptance tests.
//!
//! Everything here works from raw tables (stalk groupoids, restriction
//! functors, order relations) and never calls the library's enumeration,
//! cohomology or lifting code.

#![allow(dead_code, clippy::needless_range_loop)]

pub mod harness;

use std::collections::{HashMap, HashSet};

use gerbex_core::gerbe::{GerbeMorphism, LocalObject, PrestackGroupoid};
use gerbex_core::space::{FiniteSpace, Point};

/// A global object in raw form: one object per point and `φ_xy` for every
/// strict relation `x < y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RawObject {
    pub obj: Vec<u32>,
    pub phi: Vec<((Point, Point), u32)>,
}

impl RawObject {
    pub fn phi(&self, x: Point, y: Point) -> u32 {
        self.phi.iter().find(|(e, _)| *e == (x, y)).map(|&(_, m)| m).expect("relation")
    }

    pub fn to_local(&self, p: &PrestackGroupoid) -> LocalObject {
        let sp = p.space();
        let hasse: HashMap<(Point, Point), u32> = sp.hasse().iter().map(|&(x, y)| ((x, y), self.phi(x, y))).collect();
        p.object_from_hasse(sp.whole(), self.obj.clone(), &hasse).expect("object")
    }

    pub fn from_local(sp: &FiniteSpace, i: &LocalObject) -> Self {
        RawObject {
            obj: (0..sp.len()).map(|x| i.obj(x)).collect(),
            phi: relations(sp).into_iter().map(|(x, y)| ((x, y), i.phi(x, y))).collect(),
        }
    }
}

/// Strict relations `x < y`, shorter intervals first, so both halves of a
/// chain `x < y < z` come before `x < z`.
pub fn relations(sp: &FiniteSpace) -> Vec<(Point, Point)> {
    let mut out = Vec::new();
    for y in 0..sp.len() {
        for x in 0..sp.len() {
            if sp.lt(x, y) {
                out.push((x, y));
            }
        }
    }
    let between = |&(x, z): &(Point, Point)| (0..sp.len()).filter(|&y| sp.lt(x, y) && sp.lt(y, z)).count();
    out.sort_by_key(|r| (between(r), *r));
    out
}

/// Every global object of `p`, by backtracking over all object choices and
/// all `φ` with the composition law checked on every chain `x < y < z`.
pub fn global_objects(p: &PrestackGroupoid) -> Vec<RawObject> {
    let sp = p.space().clone();
    let n = sp.len();
    let rels = relations(&sp);
    let mut out = Vec::new();
    let mut obj = vec![0u32; n];
    objects_rec(p, &sp, &rels, 0, &mut obj, &mut out);
    out
}

fn objects_rec(p: &PrestackGroupoid, sp: &FiniteSpace, rels: &[(Point, Point)], x: usize, obj: &mut Vec<u32>, out: &mut Vec<RawObject>) {
    if x == sp.len() {
        let mut phi: Vec<((Point, Point), u32)> = Vec::new();
        phi_rec(p, sp, rels, 0, obj, &mut phi, out);
        return;
    }
    for o in 0..p.stalk(x).n_objects() as u32 {
        obj[x] = o;
        objects_rec(p, sp, rels, x + 1, obj, out);
    }
}

fn phi_rec(
    p: &PrestackGroupoid,
    sp: &FiniteSpace,
    rels: &[(Point, Point)],
    k: usize,
    obj: &[u32],
    phi: &mut Vec<((Point, Point), u32)>,
    out: &mut Vec<RawObject>,
) {
    if k == rels.len() {
        out.push(RawObject { obj: obj.to_vec(), phi: phi.clone() });
        return;
    }
    let (x, z) = rels[k];
    let gz = p.stalk(z);
    let src = p.diagram().res(x, z).obj[obj[x] as usize];
    for &m in gz.hom(src, obj[z]) {
        // φ_xz = φ_yz ∘ r_yz(φ_xy) for every y strictly between.
        let ok = (0..sp.len()).filter(|&y| sp.lt(x, y) && sp.lt(y, z)).all(|y| {
            let find = |e: (Point, Point)| phi.iter().find(|(r, _)| *r == e).map(|&(_, v)| v).expect("shorter interval first");
            gz.compose(find((y, z)), p.diagram().res(y, z).mor[find((x, y)) as usize]) == m
        });
        if ok {
            phi.push(((x, z), m));
            phi_rec(p, sp, rels, k + 1, obj, phi, out);
            phi.pop();
        }
    }
}

/// Every morphism `i → j` as its family of components.
pub fn homs(p: &PrestackGroupoid, i: &RawObject, j: &RawObject) -> Vec<Vec<u32>> {
    let sp = p.space().clone();
    let order: Vec<Point> = sp.linear_order().to_vec();
    let mut out = Vec::new();
    let mut comps = vec![u32::MAX; sp.len()];
    homs_rec(p, &sp, &order, 0, i, j, &mut comps, &mut out, usize::MAX);
    out
}

/// Whether some morphism `i → j` exists.
pub fn isomorphic(p: &PrestackGroupoid, i: &RawObject, j: &RawObject) -> bool {
    let sp = p.space().clone();
    let order: Vec<Point> = sp.linear_order().to_vec();
    let mut out = Vec::new();
    let mut comps = vec![u32::MAX; sp.len()];
    homs_rec(p, &sp, &order, 0, i, j, &mut comps, &mut out, 1);
    !out.is_empty()
}

#[allow(clippy::too_many_arguments)]
fn homs_rec(
    p: &PrestackGroupoid,
    sp: &FiniteSpace,
    order: &[Point],
    k: usize,
    i: &RawObject,
    j: &RawObject,
    comps: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if k == order.len() {
        out.push(comps.clone());
        return;
    }
    let y = order[k];
    let gy = p.stalk(y);
    for &f in gy.hom(i.obj[y], j.obj[y]) {
        let natural = order[..k].iter().filter(|&&x| sp.lt(x, y)).all(|&x| {
            let rf = p.diagram().res(x, y).mor[comps[x] as usize];
            gy.compose(j.phi(x, y), rf) == gy.compose(f, i.phi(x, y))
        });
        if natural {
            comps[y] = f;
            homs_rec(p, sp, order, k + 1, i, j, comps, out, limit);
        }
    }
    comps[y] = u32::MAX;
}

/// Class index of each object under isomorphism, and the class count.
pub fn iso_classes(p: &PrestackGroupoid, objs: &[RawObject]) -> (Vec<usize>, usize) {
    let mut reps: Vec<usize> = Vec::new();
    let mut class = vec![0; objs.len()];
    for (k, o) in objs.iter().enumerate() {
        match reps.iter().position(|&r| isomorphic(p, &objs[r], o)) {
            Some(c) => class[k] = c,
            None => {
                class[k] = reps.len();
                reps.push(k);
            }
        }
    }
    (class, reps.len())
}

/// The image of an object under a strict morphism of prestacks.
pub fn apply_object(f: &GerbeMorphism, i: &RawObject) -> RawObject {
    RawObject {
        obj: i.obj.iter().enumerate().map(|(x, &o)| f.functor(x).obj[o as usize]).collect(),
        phi: i.phi.iter().map(|&((x, y), m)| ((x, y), f.functor(y).mor[m as usize])).collect(),
    }
}

/// Whether `j` is isomorphic to the image of some global object.
pub fn has_lift(f: &GerbeMorphism, total_objects: &[RawObject], j: &RawObject) -> bool {
    let images: HashSet<RawObject> = total_objects.iter().map(|i| apply_object(f, i)).collect();
    images.iter().any(|fi| isomorphic(f.target(), fi, j))
}

/// Whether some morphism `i → j` maps to the components `h`.
pub fn has_morphism_over(f: &GerbeMorphism, i: &RawObject, j: &RawObject, h: &[u32]) -> bool {
    homs(f.source(), i, j).iter().any(|g| g.iter().enumerate().all(|(x, &gx)| f.functor(x).mor[gx as usize] == h[x]))
}

/// Connected components of an open, as point lists.
fn components(sp: &FiniteSpace, pts: &[Point]) -> Vec<Vec<Point>> {
    let mut comp: Vec<usize> = (0..pts.len()).collect();
    fn root(c: &mut [usize], a: usize) -> usize {
        let mut a = a;
        while c[a] != a {
            c[a] = c[c[a]];
            a = c[a];
        }
        a
    }
    for a in 0..pts.len() {
        for b in 0..pts.len() {
            if sp.leq(pts[a], pts[b]) {
                let (ra, rb) = (root(&mut comp, a), root(&mut comp, b));
                comp[ra] = rb;
            }
        }
    }
    let mut groups: HashMap<usize, Vec<Point>> = HashMap::new();
    for a in 0..pts.len() {
        let r = root(&mut comp, a);
        groups.entry(r).or_default().push(pts[a]);
    }
    let mut out: Vec<Vec<Point>> = groups.into_values().collect();
    out.sort();
    out
}

/// The Čech complex of the constant sheaf `ℤ/m` on a cover given as point
/// masks, over ordered tuples with repeats.  Coordinates of a `p`-cochain
/// are indexed by (tuple, component of its face).
pub struct ConstantComplex {
    pub m: u64,
    parts: Vec<Vec<Point>>,
    sp: FiniteSpace,
}

impl ConstantComplex {
    pub fn new(sp: &FiniteSpace, parts: &[Vec<Point>], m: u64) -> Self {
        ConstantComplex { m, parts: parts.to_vec(), sp: sp.clone() }
    }

    fn face(&self, t: &[usize]) -> Vec<Point> {
        (0..self.sp.len()).filter(|x| t.iter().all(|&k| self.parts[k].contains(x))).collect()
    }

    fn tuples(&self, len: usize) -> Vec<Vec<usize>> {
        let k = self.parts.len();
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out.into_iter().flat_map(|t| (0..k).map(move |a| [t.clone(), vec![a]].concat())).collect();
        }
        out
    }

    /// `(tuple, component)` coordinates in degree `p`.
    pub fn coords(&self, p: usize) -> Vec<(Vec<usize>, Vec<Point>)> {
        let mut out = Vec::new();
        for t in self.tuples(p + 1) {
            for c in components(&self.sp, &self.face(&t)) {
                out.push((t.clone(), c));
            }
        }
        out
    }

    /// The integer matrix of `δ : C^p → C^{p+1}`, rows indexed by target
    /// coordinates.
    pub fn coboundary(&self, p: usize) -> Vec<Vec<i64>> {
        let src = self.coords(p);
        let tgt = self.coords(p + 1);
        let mut mat = vec![vec![0i64; src.len()]; tgt.len()];
        for (r, (t, comp)) in tgt.iter().enumerate() {
            for drop in 0..t.len() {
                let face: Vec<usize> = t.iter().enumerate().filter(|&(k, _)| k != drop).map(|(_, &a)| a).collect();
                let col = src.iter().position(|(s, c)| *s == face && comp.iter().all(|x| c.contains(x))).expect("component");
                mat[r][col] += if drop % 2 == 0 { 1 } else { -1 };
            }
        }
        mat
    }

    /// Element orders of `H^p`, sorted, by enumerating all cochains.
    pub fn element_orders_by_enumeration(&self, p: usize) -> Vec<u64> {
        let m = self.m;
        let dp = self.coords(p).len();
        let d_up = self.coboundary(p);
        let d_down = if p == 0 { None } else { Some(self.coboundary(p - 1)) };
        let apply = |mat: &Vec<Vec<i64>>, v: &[u64]| -> Vec<u64> {
            mat.iter().map(|row| row.iter().zip(v).map(|(&a, &b)| a * b as i64).sum::<i64>().rem_euclid(m as i64) as u64).collect()
        };
        let all = |d: usize| -> Vec<Vec<u64>> {
            let total = (m as usize).pow(d as u32);
            (0..total)
                .map(|mut k| {
                    (0..d)
                        .map(|_| {
                            let v = (k % m as usize) as u64;
                            k /= m as usize;
                            v
                        })
                        .collect()
                })
                .collect()
        };
        let cocycles: Vec<Vec<u64>> = all(dp).into_iter().filter(|c| apply(&d_up, c).iter().all(|&v| v == 0)).collect();
        let boundaries: HashSet<Vec<u64>> = match &d_down {
            None => std::iter::once(vec![0; dp]).collect(),
            Some(d) => all(d[0].len()).into_iter().map(|b| apply(d, &b)).collect(),
        };
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let mut orders = Vec::new();
        for z in &cocycles {
            if seen.contains(z) {
                continue;
            }
            let coset: Vec<Vec<u64>> = boundaries.iter().map(|b| z.iter().zip(b).map(|(a, c)| (a + c) % m).collect()).collect();
            let mut k = 1u64;
            let mut acc = z.clone();
            while !boundaries.contains(&acc) {
                acc = acc.iter().zip(z).map(|(a, b)| (a + b) % m).collect();
                k += 1;
            }
            orders.push(k);
            seen.extend(coset);
        }
        orders.sort_unstable();
        orders
    }

    /// `dim H^p` over `𝔽_m` for prime `m`, by Gaussian elimination.
    pub fn dimension_over_prime_field(&self, p: usize) -> usize {
        let dp = self.coords(p).len();
        let r_up = rank_mod(&self.coboundary(p), self.m);
        let r_down = if p == 0 { 0 } else { rank_mod(&self.coboundary(p - 1), self.m) };
        dp - r_up - r_down
    }
}

fn rank_mod(mat: &[Vec<i64>], m: u64) -> usize {
    if mat.is_empty() {
        return 0;
    }
    let m = m as i64;
    let mut a: Vec<Vec<i64>> = mat.iter().map(|r| r.iter().map(|v| v.rem_euclid(m)).collect()).collect();
    let cols = a[0].len();
    let inv = |v: i64| (1..m).find(|w| (v * w) % m == 1).expect("prime modulus");
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, piv);
        let s = inv(a[rank][c]);
        for v in a[rank].iter_mut() {
            *v = (*v * s) % m;
        }
        for r in 0..a.len() {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c];
                for k in 0..cols {
                    a[r][k] = (a[r][k] - f * a[rank][k]).rem_euclid(m);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Element orders of the finite abelian group with these invariant factors.
pub fn element_orders(factors: &[u64]) -> Vec<u64> {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let mut out = vec![1u64];
    for &d in factors {
        let mut next = Vec::new();
        for &o in &out {
            for k in 0..d {
                let ok = d / gcd(d, k);
                next.push(o / gcd(o, ok) * ok);
            }
        }
        out = next;
    }
    out.sort_unstable();
    out
}

/// Minimal-open cover parts as point lists.
pub fn minimal_parts(sp: &FiniteSpace) -> Vec<Vec<Point>> {
    let whole = sp.whole();
    sp.minimal_points(whole).into_iter().map(|x| (0..sp.len()).filter(|&y| sp.leq(x, y)).collect()).collect()
}

/// Point cover parts as point lists.
pub fn point_parts(sp: &FiniteSpace) -> Vec<Vec<Point>> {
    (0..sp.len()).map(|x| (0..sp.len()).filter(|&y| sp.leq(x, y)).collect()).collect()
}

/// One representative per isomorphism class of the given objects.
pub fn class_reps(p: &PrestackGroupoid, objs: &[RawObject]) -> Vec<RawObject> {
    let mut reps: Vec<RawObject> = Vec::new();
    for o in objs {
        if !reps.iter().any(|r| isomorphic(p, r, o)) {
            reps.push(o.clone());
        }
    }
    reps
}
