//! Čech cochains of a sheaf of groups over an ordered cover.
//!
//! Cochains are indexed by all ordered tuples of cover indices, repeats
//! included.  Conventions:
//!
//! * `δ(b)_{k0 k1} = b_{k1}⁻¹ · b_{k0}`
//! * `δ(b)_{k0 k1 k2} = b_{k0 k2}⁻¹ · b_{k0 k1} · b_{k1 k2}`
//! * a 2-cochain is a cocycle when
//!   `c_{k1k2k3} · c_{k0k2k3}⁻¹ · c_{k0k1k3} · c_{k0k1k2}⁻¹ = 1`.
//!
//! Two backends compute cohomology: exhaustive enumeration with group
//! operations, and integer linear algebra on the strictly increasing
//! tuples (Smith normal form).

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::abelian_invariants_by_counting;
use crate::sheaf::{CentralExtension, SectionGroup, SheafHom, SheafOfGroups};
use crate::snf::{self, AbelianCoords, Int, Matrix};
use crate::space::{common_refinement, point_cover, Cover, Open, RefinementMap};

/// Cap on the number of cochains the enumeration backend will visit.
pub const ENUMERATION_CAP: u128 = 1 << 22;

/// All tuples of length `len` over `0..k`, in lexicographic order.
pub fn tuples(k: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = k.checked_pow(len as u32).unwrap_or(0);
    for mut r in 0..total {
        let mut t = vec![0; len];
        for i in (0..len).rev() {
            t[i] = r % k;
            r /= k;
        }
        out.push(t);
    }
    if len == 0 {
        out.push(Vec::new());
    }
    out
}

/// Strictly increasing tuples of length `len` over `0..k`.
pub fn increasing_tuples(k: usize, len: usize) -> Vec<Vec<usize>> {
    tuples(k, len).into_iter().filter(|t| t.windows(2).all(|w| w[0] < w[1])).collect()
}

fn tuple_index(k: usize, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &i| acc * k + i)
}

/// A Čech `p`-cochain: one section over `U_{k0..kp}` per ordered tuple.
#[derive(Clone, Debug)]
pub struct Cochain {
    degree: usize,
    cover: Cover,
    sheaf: SheafOfGroups,
    values: Vec<u32>,
}

impl PartialEq for Cochain {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.cover == other.cover && self.sheaf == other.sheaf && self.values == other.values
    }
}

impl Eq for Cochain {}

impl Cochain {
    pub fn new(sheaf: &SheafOfGroups, cover: &Cover, degree: usize, values: Vec<u32>) -> Result<Self> {
        let faces = tuples(cover.len(), degree + 1);
        if values.len() != faces.len() {
            return Err(Error::BadCochain(format!("expected {} values, got {}", faces.len(), values.len())));
        }
        for (t, &v) in faces.iter().zip(&values) {
            let sg = sheaf.sections(cover.face(t)?)?;
            if v as usize >= sg.len() {
                return Err(Error::BadCochain(format!("value {} out of range on tuple {:?}", v, t)));
            }
        }
        Ok(Cochain { degree, cover: cover.clone(), sheaf: sheaf.clone(), values })
    }

    pub fn from_fn(sheaf: &SheafOfGroups, cover: &Cover, degree: usize, mut f: impl FnMut(&[usize], Open) -> Result<u32>) -> Result<Self> {
        let mut values = Vec::new();
        for t in tuples(cover.len(), degree + 1) {
            values.push(f(&t, cover.face(&t)?)?);
        }
        Cochain::new(sheaf, cover, degree, values)
    }

    pub fn identity(sheaf: &SheafOfGroups, cover: &Cover, degree: usize) -> Result<Self> {
        Cochain::from_fn(sheaf, cover, degree, |_, u| Ok(sheaf.sections(u)?.id()))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn sheaf(&self) -> &SheafOfGroups {
        &self.sheaf
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn tuples(&self) -> Vec<Vec<usize>> {
        tuples(self.cover.len(), self.degree + 1)
    }

    pub fn value(&self, t: &[usize]) -> u32 {
        self.values[tuple_index(self.cover.len(), t)]
    }

    pub fn set(&mut self, t: &[usize], v: u32) {
        let i = tuple_index(self.cover.len(), t);
        self.values[i] = v;
    }

    pub fn face(&self, t: &[usize]) -> Open {
        self.cover.face(t).expect("tuple of the cover")
    }

    fn check_same(&self, other: &Cochain) -> Result<()> {
        if self.degree != other.degree || self.cover != other.cover || self.sheaf != other.sheaf {
            return Err(Error::BadCochain("cochains live on different complexes".into()));
        }
        Ok(())
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Cochain) -> Result<Cochain> {
        self.check_same(other)?;
        let mut values = Vec::with_capacity(self.values.len());
        for (t, (&a, &b)) in self.tuples().iter().zip(self.values.iter().zip(&other.values)) {
            values.push(self.sheaf.sections(self.face(t))?.mul(a, b));
        }
        Ok(Cochain { values, ..self.clone() })
    }

    pub fn inv(&self) -> Result<Cochain> {
        let mut values = Vec::with_capacity(self.values.len());
        for (t, &a) in self.tuples().iter().zip(&self.values) {
            values.push(self.sheaf.sections(self.face(t))?.inv(a));
        }
        Ok(Cochain { values, ..self.clone() })
    }

    pub fn is_identity(&self) -> bool {
        self.tuples().iter().zip(&self.values).all(|(t, &v)| self.sheaf.sections(self.face(t)).map(|s| s.id() == v).unwrap_or(false))
    }

    /// `(tuple "k0,k1,..", section label)` pairs in tuple order.
    pub fn labels(&self) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        for (t, &v) in self.tuples().iter().zip(&self.values) {
            let key = t.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",");
            out.push((key, self.sheaf.section_label(self.face(t), v)?));
        }
        Ok(out)
    }

    /// Inverse of [`Cochain::labels`]; tuples not listed get the identity.
    pub fn parse(sheaf: &SheafOfGroups, cover: &Cover, degree: usize, entries: &[(String, String)]) -> Result<Self> {
        let mut c = Cochain::identity(sheaf, cover, degree)?;
        for (key, label) in entries {
            let t: Vec<usize> = key
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|_| Error::BadCochain(format!("bad tuple `{}`", key))))
                .collect::<Result<_>>()?;
            if t.len() != degree + 1 || t.iter().any(|&k| k >= cover.len()) {
                return Err(Error::BadCochain(format!("tuple `{}` does not fit degree {}", key, degree)));
            }
            let v = sheaf.parse_section(cover.face(&t)?, label)?;
            c.set(&t, v);
        }
        Ok(c)
    }

    /// Image under a sheaf homomorphism, open by open.
    pub fn push(&self, f: &SheafHom) -> Result<Cochain> {
        if f.source() != &self.sheaf {
            return Err(Error::SheafMismatch("homomorphism source differs from the cochain sheaf".into()));
        }
        let mut values = Vec::with_capacity(self.values.len());
        for (t, &v) in self.tuples().iter().zip(&self.values) {
            values.push(f.apply(self.face(t), v)?);
        }
        Cochain::new(f.target(), &self.cover, self.degree, values)
    }
}

fn require_abelian(sheaf: &SheafOfGroups) -> Result<()> {
    if sheaf.is_abelian() {
        Ok(())
    } else {
        Err(Error::NotAbelian)
    }
}

/// `ρ(s)` from the face of `from` to the face of `to`.
fn res(c: &Cochain, from: &[usize], to: Open) -> Result<u32> {
    c.sheaf.restrict(c.face(from), to, c.value(from))
}

/// The coboundary formula evaluated on one tuple of length `p + 2`.
fn delta_at(c: &Cochain, tau: &[usize]) -> Result<u32> {
    let w = c.cover.face(tau)?;
    let sg = c.sheaf.sections(w)?;
    Ok(match tau.len() {
        2 => {
            let (k0, k1) = (tau[0], tau[1]);
            sg.mul(sg.inv(res(c, &[k1], w)?), res(c, &[k0], w)?)
        }
        3 => {
            let (k0, k1, k2) = (tau[0], tau[1], tau[2]);
            let a = sg.inv(res(c, &[k0, k2], w)?);
            sg.mul(sg.mul(a, res(c, &[k0, k1], w)?), res(c, &[k1, k2], w)?)
        }
        4 => {
            let (k0, k1, k2, k3) = (tau[0], tau[1], tau[2], tau[3]);
            let a = res(c, &[k1, k2, k3], w)?;
            let b = sg.inv(res(c, &[k0, k2, k3], w)?);
            let d = res(c, &[k0, k1, k3], w)?;
            let e = sg.inv(res(c, &[k0, k1, k2], w)?);
            sg.mul(sg.mul(sg.mul(a, b), d), e)
        }
        _ => return Err(Error::UnsupportedDegree(tau.len() - 1)),
    })
}

fn coboundary(c: &Cochain) -> Result<Cochain> {
    let k = c.cover.len();
    let mut values = Vec::new();
    for t in tuples(k, c.degree + 2) {
        values.push(delta_at(c, &t)?);
    }
    Ok(Cochain { degree: c.degree + 1, cover: c.cover.clone(), sheaf: c.sheaf.clone(), values })
}

pub fn coboundary0(b: &Cochain) -> Result<Cochain> {
    if b.degree != 0 {
        return Err(Error::UnsupportedDegree(b.degree));
    }
    coboundary(b)
}

/// Requires an abelian sheaf.
pub fn coboundary1(b: &Cochain) -> Result<Cochain> {
    if b.degree != 1 {
        return Err(Error::UnsupportedDegree(b.degree));
    }
    require_abelian(&b.sheaf)?;
    coboundary(b)
}

/// Degree 0: agreement on overlaps.  Degree 1:
/// `g_{k1k2} · g_{k0k1} = g_{k0k2}`.  Degree 2 (abelian): the 2-cocycle
/// identity.
pub fn is_cocycle(c: &Cochain) -> Result<bool> {
    let k = c.cover.len();
    match c.degree {
        0 | 1 => {
            for t in tuples(k, c.degree + 2) {
                let w = c.cover.face(&t)?;
                let id = c.sheaf.sections(w)?.id();
                let v = if c.degree == 0 {
                    delta_at(c, &t)?
                } else {
                    let sg = c.sheaf.sections(w)?;
                    let lhs = sg.mul(res(c, &[t[1], t[2]], w)?, res(c, &[t[0], t[1]], w)?);
                    sg.mul(sg.inv(res(c, &[t[0], t[2]], w)?), lhs)
                };
                if v != id {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        2 => {
            require_abelian(&c.sheaf)?;
            for t in tuples(k, 4) {
                let w = c.cover.face(&t)?;
                if delta_at(c, &t)? != c.sheaf.sections(w)?.id() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        d => Err(Error::UnsupportedDegree(d)),
    }
}

// ---------------------------------------------------------------------------
// Linear algebra backend

/// One degree of a Čech complex, linearized: every face group written as
/// `⊕ ℤ/d_i`.
struct Level {
    faces: Vec<Vec<usize>>,
    opens: Vec<Open>,
    coords: Vec<Arc<AbelianCoords>>,
    offset: Vec<usize>,
    total: usize,
}

impl Level {
    fn moduli(&self) -> Vec<Int> {
        self.coords.iter().flat_map(|c| c.moduli.iter().copied()).collect()
    }
}

struct Linearized<'a> {
    sheaf: &'a SheafOfGroups,
    cover: &'a Cover,
    increasing: bool,
    cache: HashMap<u32, Arc<AbelianCoords>>,
}

impl<'a> Linearized<'a> {
    fn new(sheaf: &'a SheafOfGroups, cover: &'a Cover, increasing: bool) -> Result<Self> {
        require_abelian(sheaf)?;
        Ok(Linearized { sheaf, cover, increasing, cache: HashMap::new() })
    }

    fn coords(&mut self, u: Open) -> Result<Arc<AbelianCoords>> {
        if let Some(c) = self.cache.get(&u.bits()) {
            return Ok(c.clone());
        }
        let sg = self.sheaf.sections(u)?;
        let c = Arc::new(AbelianCoords::decompose(sg.len(), sg.id(), |a, b| sg.mul(a, b))?);
        self.cache.insert(u.bits(), c.clone());
        Ok(c)
    }

    fn level(&mut self, p: usize) -> Result<Level> {
        let k = self.cover.len();
        let faces = if self.increasing { increasing_tuples(k, p + 1) } else { tuples(k, p + 1) };
        let mut opens = Vec::new();
        let mut coords = Vec::new();
        let mut offset = Vec::new();
        let mut total = 0;
        for t in &faces {
            let u = self.cover.face(t)?;
            let c = self.coords(u)?;
            offset.push(total);
            total += c.rank();
            opens.push(u);
            coords.push(c);
        }
        Ok(Level { faces, opens, coords, offset, total })
    }

    /// Matrix of `δ` from level `p` to level `p + 1` (rows = targets).
    fn matrix(&mut self, from: &Level, to: &Level) -> Result<Matrix> {
        let index: HashMap<&[usize], usize> = from.faces.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
        let mut m = snf::zeros(to.total, from.total);
        for (ti, tau) in to.faces.iter().enumerate() {
            let w = to.opens[ti];
            let tc = &to.coords[ti];
            if tc.rank() == 0 {
                continue;
            }
            for (sign, sub) in delta_terms(tau) {
                let si = index[sub.as_slice()];
                let sc = &from.coords[si];
                let table = self.sheaf.restriction(from.opens[si], w)?;
                for (j, &e) in sc.basis.iter().enumerate() {
                    let img = tc.coords(table[e as usize]);
                    for (i, &v) in img.iter().enumerate() {
                        let r = to.offset[ti] + i;
                        let col = from.offset[si] + j;
                        m[r][col] += sign * v;
                    }
                }
            }
        }
        Ok(m)
    }

    fn encode(&self, level: &Level, c: &Cochain) -> Vec<Int> {
        let mut x = Vec::with_capacity(level.total);
        for (i, t) in level.faces.iter().enumerate() {
            x.extend_from_slice(level.coords[i].coords(c.value(t)));
        }
        x
    }

    /// Values of the cochain with coordinates `x`, one per face of `level`.
    fn decode(&self, level: &Level, x: &[Int]) -> Vec<u32> {
        level.coords.iter().enumerate().map(|(i, c)| c.element(&x[level.offset[i]..level.offset[i] + c.rank()])).collect()
    }
}

/// `(sign, sub-tuple)` terms of the additive coboundary on `tau`.
fn delta_terms(tau: &[usize]) -> Vec<(Int, Vec<usize>)> {
    let drop = |i: usize| -> Vec<usize> { tau.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &k)| k).collect() };
    match tau.len() {
        2 => vec![(1, drop(1)), (-1, drop(0))],
        3 => vec![(-1, drop(1)), (1, drop(2)), (1, drop(0))],
        4 => vec![(1, drop(0)), (-1, drop(1)), (1, drop(2)), (-1, drop(3))],
        _ => Vec::new(),
    }
}

/// `[D | diag(d)]` for the level `to`.
fn with_moduli(d: &Matrix, from_total: usize, to: &Level) -> Matrix {
    let moduli = to.moduli();
    let mut m = snf::zeros(to.total, from_total + to.total);
    for (r, row) in m.iter_mut().enumerate() {
        row[..from_total].copy_from_slice(&d[r][..from_total]);
        row[from_total + r] = moduli[r];
    }
    m
}

fn solve_linear(c: &Cochain, increasing: bool) -> Result<Option<Vec<Int>>> {
    let mut lin = Linearized::new(&c.sheaf, &c.cover, increasing)?;
    let lower = lin.level(c.degree - 1)?;
    let upper = lin.level(c.degree)?;
    let d = lin.matrix(&lower, &upper)?;
    let a = with_moduli(&d, lower.total, &upper);
    let rhs = lin.encode(&upper, c);
    Ok(snf::solve(&a, lower.total + upper.total, &rhs)?.map(|x| x[..lower.total].to_vec()))
}

/// Whether the cocycle `c` (degree 1 or 2, abelian sheaf) is a coboundary,
/// decided on the strictly increasing tuples.
pub fn is_coboundary(c: &Cochain) -> Result<bool> {
    if c.degree == 0 {
        return Ok(c.is_identity());
    }
    if !c.sheaf.is_abelian() {
        return Ok(solve_coboundary_enum(c)?.is_some());
    }
    Ok(solve_linear(c, true)?.is_some())
}

/// A cochain `b` of one degree lower with `δ(b) = c`, if one exists.
/// Abelian sheaves use the linear-algebra path; degree-1 cocycles of
/// nonabelian sheaves use enumeration.
pub fn solve_coboundary(c: &Cochain) -> Result<Option<Cochain>> {
    if !is_cocycle(c)? {
        return Err(Error::NotCocycle);
    }
    if c.degree == 0 {
        return Err(Error::UnsupportedDegree(0));
    }
    if !c.sheaf.is_abelian() {
        return solve_coboundary_enum(c);
    }
    let Some(x) = solve_linear(c, false)? else { return Ok(None) };
    let mut lin = Linearized::new(&c.sheaf, &c.cover, false)?;
    let lower = lin.level(c.degree - 1)?;
    let values = lin.decode(&lower, &x);
    let b = Cochain::new(&c.sheaf, &c.cover, c.degree - 1, values)?;
    debug_assert!(coboundary(&b)? == *c);
    Ok(Some(b))
}

/// Depth-first search for `b` with `δ(b) = c`, lexicographically first.
pub fn solve_coboundary_enum(c: &Cochain) -> Result<Option<Cochain>> {
    if c.degree == 0 || c.degree > 2 {
        return Err(Error::UnsupportedDegree(c.degree));
    }
    if c.degree == 2 {
        require_abelian(&c.sheaf)?;
    }
    let k = c.cover.len();
    let lower = tuples(k, c.degree);
    let targets = tuples(k, c.degree + 1);
    let mut b = Cochain::identity(&c.sheaf, &c.cover, c.degree - 1)?;
    // Each target is checked once all of its sub-tuples are assigned.
    let pos = |t: &[usize]| tuple_index(k, t);
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); lower.len()];
    for (ti, tau) in targets.iter().enumerate() {
        let last = delta_terms(tau).iter().map(|(_, s)| pos(s)).max().expect("terms");
        ready[last].push(ti);
    }
    let sizes: Vec<usize> = lower.iter().map(|t| c.sheaf.sections(c.cover.face(t)?).map(|s| s.len())).collect::<Result<_>>()?;
    fn rec(
        depth: usize,
        b: &mut Cochain,
        c: &Cochain,
        lower: &[Vec<usize>],
        targets: &[Vec<usize>],
        ready: &[Vec<usize>],
        sizes: &[usize],
    ) -> Result<bool> {
        if depth == lower.len() {
            return Ok(true);
        }
        for v in 0..sizes[depth] as u32 {
            b.set(&lower[depth], v);
            let mut ok = true;
            for &ti in &ready[depth] {
                if delta_at(b, &targets[ti])? != c.value(&targets[ti]) {
                    ok = false;
                    break;
                }
            }
            if ok && rec(depth + 1, b, c, lower, targets, ready, sizes)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    if rec(0, &mut b, c, &lower, &targets, &ready, &sizes)? {
        Ok(Some(b))
    } else {
        Ok(None)
    }
}

/// Which cochain complex a computation ran on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TupleMode {
    Ordered,
    Increasing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Enumeration,
    Snf,
}

/// `Ȟᵖ` of a cover as invariant factors, with generating cocycles when the
/// linear backend produced them.
#[derive(Clone, Debug)]
pub struct CohomologyGroup {
    pub degree: usize,
    pub invariant_factors: Vec<u64>,
    pub generators: Vec<Cochain>,
    pub mode: TupleMode,
}

impl CohomologyGroup {
    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// Text form like `ℤ/2 ⊕ ℤ/4`, or `0`.
    pub fn describe(&self) -> String {
        if self.invariant_factors.is_empty() {
            return "0".into();
        }
        self.invariant_factors.iter().map(|d| format!("ℤ/{}", d)).collect::<Vec<_>>().join(" ⊕ ")
    }
}

pub fn cohomology_group(sheaf: &SheafOfGroups, cover: &Cover, p: usize, backend: Backend) -> Result<CohomologyGroup> {
    require_abelian(sheaf)?;
    if p > 2 {
        return Err(Error::UnsupportedDegree(p));
    }
    match backend {
        Backend::Snf => cohomology_snf(sheaf, cover, p),
        Backend::Enumeration => cohomology_enum(sheaf, cover, p),
    }
}

fn cohomology_snf(sheaf: &SheafOfGroups, cover: &Cover, p: usize) -> Result<CohomologyGroup> {
    let mut lin = Linearized::new(sheaf, cover, true)?;
    let here = lin.level(p)?;
    let empty = CohomologyGroup { degree: p, invariant_factors: Vec::new(), generators: Vec::new(), mode: TupleMode::Increasing };
    if here.total == 0 {
        return Ok(empty);
    }
    let n = here.total;
    // Cocycle lattice: x with δx ≡ 0 modulo the next level's moduli.
    let next = lin.level(p + 1)?;
    let d_next = lin.matrix(&here, &next)?;
    let m = with_moduli(&d_next, n, &next);
    let cocycle_gens: Vec<Vec<Int>> = if next.total == 0 {
        (0..n).map(|i| (0..n).map(|j| Int::from(i == j)).collect()).collect()
    } else {
        snf::kernel(&m, n + next.total)?.into_iter().map(|v| v[..n].to_vec()).collect()
    };
    // A basis of the cocycle lattice.
    let mut g = snf::zeros(n, cocycle_gens.len());
    for (j, v) in cocycle_gens.iter().enumerate() {
        for i in 0..n {
            g[i][j] = v[i];
        }
    }
    let sg = snf::smith(&g, cocycle_gens.len())?;
    if sg.rank != n {
        return Err(Error::BadCochain("cocycle lattice is not of full rank".into()));
    }
    let mut basis = snf::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            basis[i][j] = sg.u_inv[i][j] * sg.diag[j];
        }
    }
    // Coboundary lattice generators: δ of the lower level plus the moduli.
    let moduli = here.moduli();
    let mut bgens: Vec<Vec<Int>> = (0..n).map(|i| (0..n).map(|j| if i == j { moduli[i] } else { 0 }).collect()).collect();
    if p > 0 {
        let lower = lin.level(p - 1)?;
        let d = lin.matrix(&lower, &here)?;
        for j in 0..lower.total {
            bgens.push((0..n).map(|i| d[i][j]).collect());
        }
    }
    // Express the coboundary generators in the cocycle basis.
    let sb = snf::smith(&basis, n)?;
    let mut t = snf::zeros(n, bgens.len());
    for (j, w) in bgens.iter().enumerate() {
        let uw = snf::mat_vec(&sb.u, w)?;
        let y: Vec<Int> = uw
            .iter()
            .zip(&sb.diag)
            .map(|(a, d)| if a % d != 0 { Err(Error::BadCochain("coboundary outside the cocycle lattice".into())) } else { Ok(a / d) })
            .collect::<Result<_>>()?;
        let col = snf::mat_vec(&sb.v, &y)?;
        for i in 0..n {
            t[i][j] = col[i];
        }
    }
    let st = snf::smith(&t, bgens.len())?;
    let mut factors = Vec::new();
    let mut generators = Vec::new();
    for i in 0..n {
        let d = st.diag[i];
        if d == 1 {
            continue;
        }
        factors.push(d as u64);
        let ti: Vec<Int> = (0..n).map(|r| st.u_inv[r][i]).collect();
        let x = snf::mat_vec(&basis, &ti)?;
        let inc = lin.decode(&here, &x);
        generators.push(alternating_extension(sheaf, cover, p, &here.faces, &inc)?);
    }
    Ok(CohomologyGroup { degree: p, invariant_factors: factors, generators, mode: TupleMode::Increasing })
}

/// The ordered cochain that vanishes on tuples with a repeated index and
/// is `±` the value on the sorted tuple otherwise.
fn alternating_extension(sheaf: &SheafOfGroups, cover: &Cover, p: usize, faces: &[Vec<usize>], values: &[u32]) -> Result<Cochain> {
    let lookup: HashMap<&[usize], u32> = faces.iter().map(|t| t.as_slice()).zip(values.iter().copied()).collect();
    Cochain::from_fn(sheaf, cover, p, |t, u| {
        let sg = sheaf.sections(u)?;
        let mut sorted = t.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Ok(sg.id());
        }
        let v = lookup[sorted.as_slice()];
        let mut inversions = 0;
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                if t[i] > t[j] {
                    inversions += 1;
                }
            }
        }
        Ok(if inversions % 2 == 0 { v } else { sg.inv(v) })
    })
}

/// Every cochain of the given tuples, as value vectors, in lexicographic
/// order; `None` when there are more than the cap.
fn all_values(groups: &[Arc<SectionGroup>]) -> Option<Vec<Vec<u32>>> {
    let total = groups.iter().fold(1u128, |acc, g| acc.saturating_mul(g.len() as u128));
    if total > ENUMERATION_CAP {
        return None;
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut cur = vec![0u32; groups.len()];
    loop {
        out.push(cur.clone());
        let mut i = groups.len();
        loop {
            if i == 0 {
                return Some(out);
            }
            i -= 1;
            cur[i] += 1;
            if (cur[i] as usize) < groups[i].len() {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Cochain complex restricted to a tuple family, evaluated with group
/// operations only.
struct Enumerated<'a> {
    sheaf: &'a SheafOfGroups,
    cover: &'a Cover,
    faces: Vec<Vec<Vec<usize>>>,
    groups: Vec<Vec<Arc<SectionGroup>>>,
}

impl<'a> Enumerated<'a> {
    fn new(sheaf: &'a SheafOfGroups, cover: &'a Cover, top: usize, mode: TupleMode) -> Result<Self> {
        let mut faces = Vec::new();
        let mut groups = Vec::new();
        for p in 0..=top {
            let f = match mode {
                TupleMode::Ordered => tuples(cover.len(), p + 1),
                TupleMode::Increasing => increasing_tuples(cover.len(), p + 1),
            };
            groups.push(f.iter().map(|t| sheaf.sections(cover.face(t)?)).collect::<Result<Vec<_>>>()?);
            faces.push(f);
        }
        Ok(Enumerated { sheaf, cover, faces, groups })
    }

    /// δ of the level-`p` values `x`, as level-`p+1` values.
    fn delta(&self, p: usize, x: &[u32]) -> Result<Vec<u32>> {
        let index: HashMap<&[usize], usize> = self.faces[p].iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
        let mut out = Vec::with_capacity(self.faces[p + 1].len());
        for (ti, tau) in self.faces[p + 1].iter().enumerate() {
            let sg = &self.groups[p + 1][ti];
            let w = sg.open();
            let mut acc = sg.id();
            for (sign, sub) in delta_terms(tau) {
                let si = index[sub.as_slice()];
                let v = self.sheaf.restrict(self.groups[p][si].open(), w, x[si])?;
                let v = if sign < 0 { sg.inv(v) } else { v };
                acc = sg.mul(acc, v);
            }
            out.push(acc);
        }
        Ok(out)
    }

    fn is_zero(&self, p: usize, x: &[u32]) -> bool {
        self.groups[p].iter().zip(x).all(|(g, &v)| g.id() == v)
    }

    fn mul(&self, p: usize, x: &[u32], y: &[u32]) -> Vec<u32> {
        self.groups[p].iter().zip(x.iter().zip(y)).map(|(g, (&a, &b))| g.mul(a, b)).collect()
    }
}

fn cohomology_enum(sheaf: &SheafOfGroups, cover: &Cover, p: usize) -> Result<CohomologyGroup> {
    let mut mode = TupleMode::Ordered;
    let mut cx = Enumerated::new(sheaf, cover, p + 1, mode)?;
    let too_big = |cx: &Enumerated| {
        let size = |gs: &[Arc<SectionGroup>]| gs.iter().fold(1u128, |acc, g| acc.saturating_mul(g.len() as u128));
        size(&cx.groups[p]) > ENUMERATION_CAP || (p > 0 && size(&cx.groups[p - 1]) > ENUMERATION_CAP)
    };
    if too_big(&cx) {
        mode = TupleMode::Increasing;
        cx = Enumerated::new(sheaf, cover, p + 1, mode)?;
        if too_big(&cx) {
            return Err(Error::CapExceeded("cochain group too large to enumerate".into()));
        }
    }
    let _ = cx.cover;
    let cochains = all_values(&cx.groups[p]).expect("checked size");
    let mut cocycles = Vec::new();
    for x in cochains {
        if cx.is_zero(p + 1, &cx.delta(p, &x)?) {
            cocycles.push(x);
        }
    }
    let mut boundaries: HashSet<Vec<u32>> = HashSet::new();
    if p == 0 {
        boundaries.insert(cx.groups[0].iter().map(|g| g.id()).collect());
    } else {
        for b in all_values(&cx.groups[p - 1]).expect("checked size") {
            boundaries.insert(cx.delta(p - 1, &b)?);
        }
    }
    // Order of each cocycle's class, then one entry per class.
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for z in &cocycles {
        let mut acc = z.clone();
        let mut k = 1;
        while !boundaries.contains(&acc) {
            acc = cx.mul(p, &acc, z);
            k += 1;
        }
        *counts.entry(k).or_default() += 1;
    }
    let nb = boundaries.len();
    let mut orders = Vec::new();
    let mut keys: Vec<usize> = counts.keys().copied().collect();
    keys.sort_unstable();
    for k in keys {
        let c = counts[&k];
        if !c.is_multiple_of(nb) {
            return Err(Error::BadCochain("coboundaries do not partition the cocycles".into()));
        }
        orders.extend(std::iter::repeat_n(k, c / nb));
    }
    let factors: Vec<u64> = abelian_invariants_by_counting(&orders).into_iter().filter(|&d| d != 1).collect();
    Ok(CohomologyGroup { degree: p, invariant_factors: factors, generators: Vec::new(), mode })
}

/// Pullback along a refinement, restricting each value to the finer face.
pub fn refine_cochain(c: &Cochain, r: &RefinementMap) -> Result<Cochain> {
    if r.coarse() != &c.cover {
        return Err(Error::BadRefinement("refinement does not start at the cochain's cover".into()));
    }
    let phi = r.phi();
    Cochain::from_fn(&c.sheaf, r.fine(), c.degree, |t, u| {
        let s: Vec<usize> = t.iter().map(|&l| phi[l]).collect();
        res(c, &s, u)
    })
}

/// A cohomology class carried by a cocycle representative.
#[derive(Clone, Debug)]
pub struct CohClass {
    rep: Cochain,
}

impl CohClass {
    pub fn new(rep: Cochain) -> Result<Self> {
        if !is_cocycle(&rep)? {
            return Err(Error::NotCocycle);
        }
        Ok(CohClass { rep })
    }

    pub fn representative(&self) -> &Cochain {
        &self.rep
    }

    pub fn degree(&self) -> usize {
        self.rep.degree
    }

    pub fn cover(&self) -> &Cover {
        &self.rep.cover
    }

    pub fn sheaf(&self) -> &SheafOfGroups {
        &self.rep.sheaf
    }

    /// Whether the class is the basepoint.  Nonabelian degree-1 classes
    /// are tested up to twisted coboundaries.
    pub fn is_trivial(&self) -> Result<bool> {
        if self.rep.degree == 0 {
            return Ok(self.rep.is_identity());
        }
        let triv = class_is_trivial_on(&self.rep)?;
        if triv || !self.rep.sheaf.is_abelian() && self.rep.degree == 1 {
            return Ok(triv);
        }
        // A class can die only after refinement; the point cover is final.
        let pc = point_cover(self.rep.sheaf.space(), self.rep.cover.target())?;
        let r = RefinementMap::find(&pc, &self.rep.cover)?;
        class_is_trivial_on(&refine_cochain(&self.rep, &r)?)
    }

    pub fn push(&self, f: &SheafHom) -> Result<CohClass> {
        CohClass::new(self.rep.push(f)?)
    }
}

fn class_is_trivial_on(c: &Cochain) -> Result<bool> {
    if c.sheaf.is_abelian() {
        is_coboundary(c)
    } else if c.degree == 1 {
        Ok(twisted_equivalence(&Cochain::identity(&c.sheaf, &c.cover, 1)?, c)?.is_some())
    } else {
        Err(Error::NotAbelian)
    }
}

fn equal_on(a: &Cochain, b: &Cochain) -> Result<bool> {
    if a.sheaf.is_abelian() {
        is_coboundary(&a.mul(&b.inv()?)?)
    } else {
        Ok(twisted_equivalence(a, b)?.is_some())
    }
}

/// Equality of classes: compare on a common refinement, and on the point
/// cover (which refines every cover and is final among covers of a
/// finite space) before answering no.
pub fn classes_equal(a: &CohClass, b: &CohClass) -> Result<bool> {
    if a.sheaf() != b.sheaf() || a.degree() != b.degree() {
        return Err(Error::SheafMismatch("classes of different sheaves or degrees".into()));
    }
    if a.cover().target() != b.cover().target() {
        return Err(Error::TargetMismatch);
    }
    let (common, ra, rb) = common_refinement(a.cover(), b.cover())?;
    let fa = refine_cochain(&a.rep, &ra)?;
    let fb = refine_cochain(&b.rep, &rb)?;
    if equal_on(&fa, &fb)? {
        return Ok(true);
    }
    let pc = point_cover(a.sheaf().space(), a.cover().target())?;
    let r = RefinementMap::find(&pc, &common)?;
    equal_on(&refine_cochain(&fa, &r)?, &refine_cochain(&fb, &r)?)
}

/// A 0-cochain `f` with `g2_{k0k1} = f_{k1}⁻¹ · g_{k0k1} · f_{k0}`.
pub fn twisted_equivalence(g: &Cochain, g2: &Cochain) -> Result<Option<Cochain>> {
    if g.degree != 1 || g2.degree != 1 {
        return Err(Error::UnsupportedDegree(g.degree.max(g2.degree)));
    }
    g.check_same(g2)?;
    let k = g.cover.len();
    let mut f = Cochain::identity(&g.sheaf, &g.cover, 0)?;
    let sizes: Vec<usize> = (0..k).map(|i| g.sheaf.sections(g.cover.part(i)?).map(|s| s.len())).collect::<Result<_>>()?;
    fn rec(depth: usize, f: &mut Cochain, g: &Cochain, g2: &Cochain, sizes: &[usize]) -> Result<bool> {
        if depth == sizes.len() {
            return Ok(true);
        }
        for v in 0..sizes[depth] as u32 {
            f.set(&[depth], v);
            let mut ok = true;
            'pairs: for a in 0..=depth {
                for &(k0, k1) in &[(a, depth), (depth, a)] {
                    let w = g.face(&[k0, k1]);
                    let sg = g.sheaf.sections(w)?;
                    let lhs = sg.mul(sg.mul(sg.inv(res(f, &[k1], w)?), g.value(&[k0, k1])), res(f, &[k0], w)?);
                    if lhs != g2.value(&[k0, k1]) {
                        ok = false;
                        break 'pairs;
                    }
                }
            }
            if ok && rec(depth + 1, f, g, g2, sizes)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    Ok(if rec(0, &mut f, g, g2, &sizes)? { Some(f) } else { None })
}

/// All 1-cocycles of a cover, lexicographically, by depth-first search.
pub fn all_one_cocycles(sheaf: &SheafOfGroups, cover: &Cover) -> Result<Vec<Cochain>> {
    let k = cover.len();
    let pairs = tuples(k, 2);
    let sizes: Vec<usize> = pairs.iter().map(|t| sheaf.sections(cover.face(t)?).map(|s| s.len())).collect::<Result<_>>()?;
    let triples = tuples(k, 3);
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); pairs.len()];
    for (ti, t) in triples.iter().enumerate() {
        let last = [tuple_index(k, &t[0..2]), tuple_index(k, &t[1..3]), tuple_index(k, &[t[0], t[2]])].into_iter().max().expect("three");
        ready[last].push(ti);
    }
    let mut g = Cochain::identity(sheaf, cover, 1)?;
    let mut out = Vec::new();
    fn rec(
        depth: usize,
        g: &mut Cochain,
        pairs: &[Vec<usize>],
        triples: &[Vec<usize>],
        ready: &[Vec<usize>],
        sizes: &[usize],
        out: &mut Vec<Cochain>,
    ) -> Result<()> {
        if depth == pairs.len() {
            out.push(g.clone());
            if out.len() as u128 > ENUMERATION_CAP {
                return Err(Error::CapExceeded("too many 1-cocycles".into()));
            }
            return Ok(());
        }
        for v in 0..sizes[depth] as u32 {
            g.set(&pairs[depth], v);
            let mut ok = true;
            for &ti in &ready[depth] {
                let t = &triples[ti];
                let w = g.face(t);
                let sg = g.sheaf.sections(w)?;
                let lhs = sg.mul(res(g, &[t[1], t[2]], w)?, res(g, &[t[0], t[1]], w)?);
                if lhs != res(g, &[t[0], t[2]], w)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                rec(depth + 1, g, pairs, triples, ready, sizes, out)?;
            }
        }
        Ok(())
    }
    rec(0, &mut g, &pairs, &triples, &ready, &sizes, &mut out)?;
    Ok(out)
}

/// `Ȟ¹` of a cover as a pointed set: cocycles modulo twisted coboundaries.
/// Class 0 is the basepoint.
#[derive(Clone, Debug)]
pub struct PointedH1 {
    pub cocycles: Vec<Cochain>,
    pub class_of: Vec<usize>,
    /// Index into `cocycles` of each class's first member.
    pub representatives: Vec<usize>,
}

impl PointedH1 {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    /// Class index of a cocycle of the same cover.
    pub fn classify(&self, g: &Cochain) -> Result<usize> {
        let i = self.cocycles.iter().position(|c| c.values == g.values).ok_or(Error::NotCocycle)?;
        Ok(self.class_of[i])
    }

    pub fn representative(&self, class: usize) -> &Cochain {
        &self.cocycles[self.representatives[class]]
    }
}

pub fn nonabelian_h1(sheaf: &SheafOfGroups, cover: &Cover) -> Result<PointedH1> {
    let cocycles = all_one_cocycles(sheaf, cover)?;
    let index: HashMap<Vec<u32>, usize> = cocycles.iter().enumerate().map(|(i, c)| (c.values.clone(), i)).collect();
    let zero_groups: Vec<Arc<SectionGroup>> = (0..cover.len()).map(|k| sheaf.sections(cover.part(k)?)).collect::<Result<_>>()?;
    let gauges = all_values(&zero_groups).ok_or_else(|| Error::CapExceeded("too many 0-cochains".into()))?;
    let mut class_of = vec![usize::MAX; cocycles.len()];
    let mut representatives = Vec::new();
    // Start from the identity cocycle so that class 0 is the basepoint.
    let ident = Cochain::identity(sheaf, cover, 1)?;
    let mut order: Vec<usize> = vec![index[&ident.values]];
    order.extend((0..cocycles.len()).filter(|&i| cocycles[i].values != ident.values));
    for i in order {
        if class_of[i] != usize::MAX {
            continue;
        }
        let cls = representatives.len();
        representatives.push(i);
        let g = &cocycles[i];
        for f in &gauges {
            let f = Cochain::new(sheaf, cover, 0, f.clone())?;
            let twisted = twist(g, &f)?;
            class_of[index[&twisted.values]] = cls;
        }
    }
    Ok(PointedH1 { cocycles, class_of, representatives })
}

/// `f_{k1}⁻¹ · g_{k0k1} · f_{k0}`.
pub fn twist(g: &Cochain, f: &Cochain) -> Result<Cochain> {
    Cochain::from_fn(&g.sheaf, &g.cover, 1, |t, w| {
        let sg = g.sheaf.sections(w)?;
        Ok(sg.mul(sg.mul(sg.inv(res(f, &[t[1]], w)?), g.value(t)), res(f, &[t[0]], w)?))
    })
}

/// The connecting class of an `H`-valued 1-cocycle: lift each
/// `h_{k0k1}` to `g_{k0k1}` and form `g_{k0k2}⁻¹ · g_{k1k2} · g_{k0k1}`
/// in `N`.  `None` when some `h_{k0k1}` has no lift over its face.
pub fn connecting_cocycle(ext: &CentralExtension, h: &Cochain) -> Result<Option<Cochain>> {
    let cover = h.cover.clone();
    let k = cover.len();
    let mut lifts = Vec::new();
    for t in tuples(k, 2) {
        let w = cover.face(&t)?;
        match ext.lifts(w, h.value(&t))?.first() {
            Some(&a) => lifts.push(a),
            None => return Ok(None),
        }
    }
    let g = Cochain::new(&ext.g, &cover, 1, lifts)?;
    let c = Cochain::from_fn(&ext.n, &cover, 2, |t, w| {
        let sg = ext.g.sections(w)?;
        let a = sg.inv(res(&g, &[t[0], t[2]], w)?);
        let v = sg.mul(sg.mul(a, res(&g, &[t[1], t[2]], w)?), res(&g, &[t[0], t[1]], w)?);
        preimage(&ext.inc, w, v)
    })?;
    Ok(Some(c))
}

/// The unique section of the source mapping to `v` under an injective
/// homomorphism.
pub fn preimage(f: &SheafHom, w: Open, v: u32) -> Result<u32> {
    let src = f.source().sections(w)?;
    for a in src.elements() {
        if f.apply(w, a)? == v {
            return Ok(a);
        }
    }
    Err(Error::NotCentralExtension("element outside the image of the inclusion".into()))
}

/// One term of the six-term sequence.
#[derive(Clone, Debug)]
pub struct Term {
    pub name: String,
    pub size: usize,
}

/// Outcome of the exactness check at one joint.
#[derive(Clone, Debug)]
pub struct Joint {
    pub at: String,
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct SixTermReport {
    pub terms: Vec<Term>,
    pub joints: Vec<Joint>,
    /// `∂` on `Ȟ¹(H)`, as the class index in `Ȟ¹(H)` and whether its
    /// image in `Ȟ²(N)` is trivial; `None` when lifts fail on the cover.
    pub connecting: Vec<(usize, Option<bool>)>,
    pub h2_n: CohomologyGroup,
}

impl SixTermReport {
    pub fn is_exact(&self) -> bool {
        self.joints.iter().all(|j| j.exact)
    }
}

/// `N(X) → G(X) → H(X) → Ȟ¹(N) → Ȟ¹(G) → Ȟ¹(H) → Ȟ²(N)` on one cover,
/// with exactness checked at every joint by enumeration.
pub fn six_term_sequence(ext: &CentralExtension, cover: &Cover) -> Result<SixTermReport> {
    let x = cover.target();
    let (n, g, h) = (&ext.n, &ext.g, &ext.h);
    let nx = n.sections(x)?;
    let gx = g.sections(x)?;
    let hx = h.sections(x)?;
    let inc_x: Vec<u32> = nx.elements().map(|a| ext.inc.apply(x, a)).collect::<Result<_>>()?;
    let proj_x: Vec<u32> = gx.elements().map(|a| ext.proj.apply(x, a)).collect::<Result<_>>()?;
    let h1n = nonabelian_h1(n, cover)?;
    let h1g = nonabelian_h1(g, cover)?;
    let h1h = nonabelian_h1(h, cover)?;
    let h2n = cohomology_group(n, cover, 2, Backend::Snf)?;

    let mut joints = Vec::new();
    // N(X): the inclusion is injective.
    let mut seen = HashSet::new();
    joints.push(Joint { at: "N(X)".into(), exact: inc_x.iter().all(|a| seen.insert(*a)) });
    // G(X): image of N(X) equals the kernel of the projection.
    let kernel: HashSet<u32> = gx.elements().filter(|&a| proj_x[a as usize] == hx.id()).collect();
    let image: HashSet<u32> = inc_x.iter().copied().collect();
    joints.push(Joint { at: "G(X)".into(), exact: kernel == image });
    // H(X): image of G(X) equals the preimage of the basepoint under ∂.
    let image_g: HashSet<u32> = proj_x.iter().copied().collect();
    let mut boundary_of_h = Vec::new();
    for s in hx.elements() {
        let mut lifts = Vec::new();
        for k in 0..cover.len() {
            let u = cover.part(k)?;
            let hs = h.restrict(x, u, s)?;
            let l = ext.lifts(u, hs)?;
            let Some(&a) = l.first() else {
                return Err(Error::NoLiftableCover);
            };
            lifts.push(a);
        }
        let b = Cochain::new(g, cover, 0, lifts)?;
        let d = coboundary0(&b)?;
        let c = Cochain::from_fn(n, cover, 1, |t, w| preimage(&ext.inc, w, d.value(t)))?;
        boundary_of_h.push(h1n.classify(&c)?);
    }
    let ker_d: HashSet<u32> = hx.elements().filter(|&s| boundary_of_h[s as usize] == 0).collect();
    joints.push(Joint { at: "H(X)".into(), exact: ker_d == image_g });
    // Ȟ¹(N): image of ∂ equals the kernel of Ȟ¹(N) → Ȟ¹(G).
    let n_to_g: Vec<usize> = (0..h1n.len()).map(|c| h1g.classify(&h1n.representative(c).push(&ext.inc)?)).collect::<Result<_>>()?;
    let im_d: HashSet<usize> = boundary_of_h.iter().copied().collect();
    let ker_ng: HashSet<usize> = (0..h1n.len()).filter(|&c| n_to_g[c] == 0).collect();
    joints.push(Joint { at: "Ȟ¹(N)".into(), exact: im_d == ker_ng });
    // Ȟ¹(G): image of Ȟ¹(N) equals the preimage of the basepoint.
    let g_to_h: Vec<usize> = (0..h1g.len()).map(|c| h1h.classify(&h1g.representative(c).push(&ext.proj)?)).collect::<Result<_>>()?;
    let im_ng: HashSet<usize> = n_to_g.iter().copied().collect();
    let ker_gh: HashSet<usize> = (0..h1g.len()).filter(|&c| g_to_h[c] == 0).collect();
    joints.push(Joint { at: "Ȟ¹(G)".into(), exact: im_ng == ker_gh });
    // Ȟ¹(H): image of Ȟ¹(G) equals the preimage of 0 under ∂.
    let im_gh: HashSet<usize> = g_to_h.iter().copied().collect();
    let mut connecting = Vec::new();
    let mut exact_h = true;
    for c in 0..h1h.len() {
        let triv = match connecting_cocycle(ext, h1h.representative(c))? {
            Some(nc) => Some(is_coboundary(&nc)?),
            None => None,
        };
        match triv {
            Some(t) => exact_h &= t == im_gh.contains(&c),
            None => exact_h = false,
        }
        connecting.push((c, triv));
    }
    joints.push(Joint { at: "Ȟ¹(H)".into(), exact: exact_h });

    let terms = vec![
        Term { name: "N(X)".into(), size: nx.len() },
        Term { name: "G(X)".into(), size: gx.len() },
        Term { name: "H(X)".into(), size: hx.len() },
        Term { name: "Ȟ¹(N)".into(), size: h1n.len() },
        Term { name: "Ȟ¹(G)".into(), size: h1g.len() },
        Term { name: "Ȟ¹(H)".into(), size: h1h.len() },
        Term { name: "Ȟ²(N)".into(), size: h2n.order() as usize },
    ];
    Ok(SixTermReport { terms, joints, connecting, h2_n: h2n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::space::{minimal_open_cover, models, FiniteSpace};

    fn constant(space: FiniteSpace, g: &FiniteGroup) -> SheafOfGroups {
        SheafOfGroups::constant(Arc::new(space), g)
    }

    #[test]
    fn pseudocircle_h1_is_cyclic() {
        for m in 2..=4 {
            let s = constant(models::pseudocircle(), &FiniteGroup::cyclic(m));
            let cover = minimal_open_cover(s.space(), s.space().whole()).unwrap();
            for backend in [Backend::Snf, Backend::Enumeration] {
                let h1 = cohomology_group(&s, &cover, 1, backend).unwrap();
                assert_eq!(h1.invariant_factors, vec![m as u64], "{:?}", backend);
                let h0 = cohomology_group(&s, &cover, 0, backend).unwrap();
                assert_eq!(h0.invariant_factors, vec![m as u64]);
            }
            let h1 = cohomology_group(&s, &cover, 1, Backend::Snf).unwrap();
            let gen = &h1.generators[0];
            assert!(is_cocycle(gen).unwrap());
            assert!(solve_coboundary(gen).unwrap().is_none());
            assert!(solve_coboundary_enum(gen).unwrap().is_none());
        }
    }

    #[test]
    fn double_coboundary_is_identity() {
        let s = constant(models::pseudocircle(), &FiniteGroup::cyclic(2));
        let sp = s.space().clone();
        let cover = point_cover(&sp, sp.whole()).unwrap();
        let b = Cochain::from_fn(&s, &cover, 0, |t, u| Ok((t[0] as u32) % s.sections(u)?.len() as u32)).unwrap();
        let d = coboundary0(&b).unwrap();
        assert!(is_cocycle(&d).unwrap());
        let dd = coboundary1(&d).unwrap();
        assert!(dd.is_identity());
        let w = solve_coboundary(&d).unwrap().unwrap();
        assert_eq!(coboundary0(&w).unwrap(), d);
    }

    #[test]
    fn tetra_sphere_h2() {
        let s = constant(models::tetra_sphere(), &FiniteGroup::cyclic(2));
        let cover = minimal_open_cover(s.space(), s.space().whole()).unwrap();
        for backend in [Backend::Snf, Backend::Enumeration] {
            assert_eq!(cohomology_group(&s, &cover, 2, backend).unwrap().invariant_factors, vec![2]);
            assert!(cohomology_group(&s, &cover, 1, backend).unwrap().is_trivial());
        }
        let gen = cohomology_group(&s, &cover, 2, Backend::Snf).unwrap().generators[0].clone();
        assert!(is_cocycle(&gen).unwrap());
        assert!(!is_coboundary(&gen).unwrap());
        let cls = CohClass::new(gen).unwrap();
        assert!(!cls.is_trivial().unwrap());
    }

    #[test]
    fn classes_across_covers() {
        let s = constant(models::pseudocircle(), &FiniteGroup::cyclic(2));
        let sp = s.space().clone();
        let small = minimal_open_cover(&sp, sp.whole()).unwrap();
        let big = point_cover(&sp, sp.whole()).unwrap();
        let gen = cohomology_group(&s, &small, 1, Backend::Snf).unwrap().generators[0].clone();
        let r = RefinementMap::find(&big, &small).unwrap();
        let fine = refine_cochain(&gen, &r).unwrap();
        let a = CohClass::new(gen).unwrap();
        let b = CohClass::new(fine).unwrap();
        assert!(classes_equal(&a, &b).unwrap());
        let triv = CohClass::new(Cochain::identity(&s, &small, 1).unwrap()).unwrap();
        assert!(!classes_equal(&a, &triv).unwrap());
    }

    #[test]
    fn nonabelian_h1_of_pseudocircle() {
        let s = constant(models::pseudocircle(), &FiniteGroup::symmetric3());
        let cover = minimal_open_cover(s.space(), s.space().whole()).unwrap();
        let h1 = nonabelian_h1(&s, &cover).unwrap();
        // Conjugacy classes of pairs in S3 modulo simultaneous conjugation
        // and one-sided twists: classes of S3 itself.
        assert_eq!(h1.len(), 3);
    }

    #[test]
    fn six_terms_on_pseudocircle() {
        let sp = Arc::new(models::pseudocircle());
        let ext = CentralExtension::constant(sp.clone(), &FiniteGroup::cyclic(4), &[0, 2]).unwrap();
        let cover = minimal_open_cover(&sp, sp.whole()).unwrap();
        let rep = six_term_sequence(&ext, &cover).unwrap();
        assert!(rep.is_exact(), "{:?}", rep.joints);
        assert!(rep.h2_n.is_trivial());
    }
}
