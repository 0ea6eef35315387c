//! Obstruction classes for lifting isomorphisms (degree one) and objects
//! (degree two) along a central extension of gerbes, and the constructive
//! lifting algorithms that go with them.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cech::{cohomology_group, is_coboundary, refine_cochain, solve_coboundary, Backend, Cochain, CohClass};
use crate::error::{Error, Result};
use crate::gerbe::{CentralExtensionOfGerbes, GerbeMorphism, LocalMorphism, LocalObject};
use crate::sheaf::{SheafHom, SheafOfGroups};
use crate::space::{minimal_open_cover, point_cover, Cover, FiniteSpace, Open, RefinementMap};

/// Which choices are drawn at random.  Unset axes take the first option
/// in the canonical order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Axes {
    pub cover: bool,
    pub lifts: bool,
    pub isos: bool,
    pub objects: bool,
}

impl Axes {
    pub const NONE: Axes = Axes { cover: false, lifts: false, isos: false, objects: false };
    pub const ALL: Axes = Axes { cover: true, lifts: true, isos: true, objects: true };
}

/// Source of the choices made while building a class.
pub struct Chooser {
    rng: ChaCha8Rng,
    axes: Axes,
}

impl Chooser {
    pub fn canonical() -> Self {
        Chooser { rng: ChaCha8Rng::seed_from_u64(0), axes: Axes::NONE }
    }

    pub fn random(seed: u64, axes: Axes) -> Self {
        Chooser { rng: ChaCha8Rng::seed_from_u64(seed), axes }
    }

    pub fn axes(&self) -> Axes {
        self.axes
    }

    fn pick<'a, T>(&mut self, random: bool, options: &'a [T]) -> Option<&'a T> {
        if random {
            options.choose(&mut self.rng)
        } else {
            options.first()
        }
    }

    fn shuffle<T>(&mut self, random: bool, v: &mut [T]) {
        if random {
            v.shuffle(&mut self.rng);
        }
    }

    /// Covers to try, in order.  With a random cover axis a random cover by
    /// minimal opens comes first, its parts in random order.
    pub fn covers(&mut self, space: &FiniteSpace, u: Open) -> Result<Vec<Cover>> {
        let mut out = Vec::new();
        if self.axes.cover {
            let mins = space.minimal_points(u);
            let mut pts: Vec<_> = mins.clone();
            for x in u.points() {
                if !mins.contains(&x) && self.rng.gen_bool(0.5) {
                    pts.push(x);
                }
            }
            pts.shuffle(&mut self.rng);
            let parts = pts.iter().map(|&x| space.minimal_open(x)).collect::<Result<_>>()?;
            out.push(Cover::new(u, parts)?);
        }
        for c in cover_family(space, u)? {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        Ok(out)
    }
}

/// The scenario cover family of `u`: the minimal-open cover and the point
/// cover, sorted by part count and then lexicographically.
pub fn cover_family(space: &FiniteSpace, u: Open) -> Result<Vec<Cover>> {
    let mut v = vec![minimal_open_cover(space, u)?, point_cover(space, u)?];
    v.sort_by_key(|c| c.search_key());
    v.dedup();
    Ok(v)
}

fn describe_cover(space: &FiniteSpace, c: &Cover) -> String {
    let parts: Vec<String> = c.parts().iter().map(|p| space.describe(*p)).collect();
    format!("[{}]", parts.join(", "))
}

/// Lifting an isomorphism `h : F(i) → F(j)` of global objects.
#[derive(Clone, Debug)]
pub struct LiftProblem1 {
    pub i: LocalObject,
    pub j: LocalObject,
    pub h: LocalMorphism,
}

impl LiftProblem1 {
    pub fn check(&self, ext: &CentralExtensionOfGerbes) -> Result<()> {
        let whole = ext.total().space().whole();
        if self.i.open() != whole || self.j.open() != whole {
            return Err(Error::BadObject("lifting problems need global objects".into()));
        }
        ext.total().check_object(&self.i)?;
        ext.total().check_object(&self.j)?;
        let (fi, fj) = (ext.proj().apply_object(&self.i), ext.proj().apply_object(&self.j));
        if !ext.base().is_morphism(&self.h, &fi, &fj) {
            return Err(Error::BadMorphism("h is not a morphism F(i) → F(j)".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Cl1 {
    pub class: CohClass,
    /// Local lifts `g_k : i|U_k → j|U_k` of `h`.
    pub lifts: Vec<LocalMorphism>,
}

fn local_lifts(ext: &CentralExtensionOfGerbes, i: &LocalObject, j: &LocalObject, h: &LocalMorphism) -> Result<Vec<LocalMorphism>> {
    let total = ext.total();
    Ok(total.homs(i, j)?.into_iter().filter(|g| ext.proj().apply_morphism(g) == *h).collect())
}

fn band_section(ext: &CentralExtensionOfGerbes, i: &LocalObject, a: &LocalMorphism) -> Result<u32> {
    ext.band().local_inv(i, a)?.ok_or_else(|| Error::NotCentralExtension("a difference of lifts is not in the band".into()))
}

/// `c_{k0k1} = χ_i⁻¹(g_{k1}⁻¹ ∘ g_{k0})` from local lifts.
fn cl1_cocycle(ext: &CentralExtensionOfGerbes, cover: &Cover, i: &LocalObject, lifts: &[LocalMorphism]) -> Result<Cochain> {
    let total = ext.total();
    let band = ext.band().band();
    Cochain::from_fn(band, cover, 1, |t, w| {
        if w.is_empty() {
            return Ok(band.sections(w)?.id());
        }
        let g0 = total.restrict_morphism(&lifts[t[0]], w)?;
        let g1 = total.restrict_morphism(&lifts[t[1]], w)?;
        band_section(ext, i, &total.compose(&total.inverse(&g1), &g0)?)
    })
}

/// The obstruction class to lifting `h`.
pub fn cl1(ext: &CentralExtensionOfGerbes, p: &LiftProblem1, ch: &mut Chooser) -> Result<Cl1> {
    p.check(ext)?;
    let total = ext.total();
    let base = ext.base();
    let sp = total.space().clone();
    'covers: for cover in ch.covers(&sp, sp.whole())? {
        let mut lifts = Vec::with_capacity(cover.len());
        for &part in cover.parts() {
            let hk = base.restrict_morphism(&p.h, part)?;
            let ik = total.restrict_object(&p.i, part)?;
            let jk = total.restrict_object(&p.j, part)?;
            let options = local_lifts(ext, &ik, &jk, &hk)?;
            match ch.pick(ch.axes.lifts, &options) {
                Some(g) => lifts.push(g.clone()),
                None => continue 'covers,
            }
        }
        let c = cl1_cocycle(ext, &cover, &p.i, &lifts)?;
        return Ok(Cl1 { class: CohClass::new(c)?, lifts });
    }
    Err(Error::NoLiftingCover)
}

#[derive(Clone, Debug)]
pub enum Lift1 {
    Lifted { g: LocalMorphism, class: CohClass },
    Obstructed { class: CohClass },
}

impl Lift1 {
    pub fn class(&self) -> &CohClass {
        match self {
            Lift1::Lifted { class, .. } | Lift1::Obstructed { class } => class,
        }
    }
}

/// Refines cochain and per-part data to the point cover.
fn refine_to_points(c: &Cochain) -> Result<(Cochain, RefinementMap)> {
    let pc = point_cover(c.sheaf().space(), c.cover().target())?;
    let r = RefinementMap::find(&pc, c.cover())?;
    Ok((refine_cochain(c, &r)?, r))
}

/// Lifts `h` to a global `g` with `F(g) = h`, or certifies that none exists.
pub fn lift_isomorphism(ext: &CentralExtensionOfGerbes, p: &LiftProblem1, ch: &mut Chooser) -> Result<Lift1> {
    let Cl1 { class, lifts } = cl1(ext, p, ch)?;
    if !class.is_trivial()? {
        return Ok(Lift1::Obstructed { class });
    }
    let total = ext.total();
    let mut c = class.representative().clone();
    let mut lifts = lifts;
    if !is_coboundary(&c)? {
        let (fine, r) = refine_to_points(&c)?;
        lifts = r
            .fine()
            .parts()
            .iter()
            .enumerate()
            .map(|(k, &part)| total.restrict_morphism(&lifts[r.phi()[k]], part))
            .collect::<Result<_>>()?;
        c = fine;
    }
    let f = solve_coboundary(&c)?.ok_or(Error::NotCocycle)?;
    let cover = c.cover().clone();
    let mut parts = Vec::with_capacity(cover.len());
    for (k, &part) in cover.parts().iter().enumerate() {
        let chi = ext.band().local(&p.i, part, f.value(&[k]))?;
        parts.push(total.compose(&lifts[k], &total.inverse(&chi))?);
    }
    let g = total.glue_morphisms(&p.i, &p.j, &cover, &parts)?;
    if ext.proj().apply_morphism(&g) != p.h {
        return Err(Error::BadMorphism("glued lift does not map to h".into()));
    }
    Ok(Lift1::Lifted { g, class })
}

/// The choices behind a degree-two class.
#[derive(Clone, Debug)]
pub struct Cl2Data {
    pub class: CohClass,
    /// Local objects `i_k` of the total gerbe.
    pub objects: Vec<LocalObject>,
    /// Isomorphisms `h_k : F(i_k) → j|U_k`.
    pub isos: Vec<LocalMorphism>,
    /// Lifts `g_{k0k1} : i_{k0} → i_{k1}` of `h_{k1}⁻¹ ∘ h_{k0}` on nonempty overlaps.
    pub lifts: HashMap<(usize, usize), LocalMorphism>,
}

#[derive(Clone, Debug)]
pub enum Cl2 {
    Defined(Box<Cl2Data>),
    Undefined { reason: String },
}

impl Cl2 {
    pub fn class(&self) -> Option<&CohClass> {
        match self {
            Cl2::Defined(d) => Some(&d.class),
            Cl2::Undefined { .. } => None,
        }
    }
}

/// `c_{k0k1k2} = χ_{i_{k0}}⁻¹(g_{k0k2}⁻¹ ∘ g_{k1k2} ∘ g_{k0k1})`.
pub fn cl2_cocycle(
    ext: &CentralExtensionOfGerbes,
    cover: &Cover,
    objects: &[LocalObject],
    lifts: &HashMap<(usize, usize), LocalMorphism>,
) -> Result<Cochain> {
    let total = ext.total();
    let band = ext.band().band();
    Cochain::from_fn(band, cover, 2, |t, w| {
        if w.is_empty() {
            return Ok(band.sections(w)?.id());
        }
        let g = |a: usize, b: usize| total.restrict_morphism(&lifts[&(t[a], t[b])], w);
        let a = total.compose(&total.inverse(&g(0, 2)?), &total.compose(&g(1, 2)?, &g(0, 1)?)?)?;
        band_section(ext, &objects[t[0]], &a)
    })
}

fn cl2_on(
    ext: &CentralExtensionOfGerbes,
    j: &LocalObject,
    cover: &Cover,
    ch: &mut Chooser,
) -> Result<std::result::Result<Cl2Data, String>> {
    let total = ext.total();
    let base = ext.base();
    let f = ext.proj();
    let sp = total.space().clone();
    let mut objects = Vec::with_capacity(cover.len());
    let mut isos = Vec::with_capacity(cover.len());
    for (k, &part) in cover.parts().iter().enumerate() {
        let jk = base.restrict_object(j, part)?;
        let mut reps: Vec<LocalObject> = total.object_reps(part)?.to_vec();
        ch.shuffle(ch.axes.objects, &mut reps);
        let mut found = None;
        for r in reps {
            let r = if ch.axes.objects {
                let m: Vec<u32> = (0..sp.len())
                    .map(|x| {
                        if part.contains(x) {
                            *ch.pick(true, &total.morphisms_from(x, r.obj(x))).expect("identities exist")
                        } else {
                            u32::MAX
                        }
                    })
                    .collect();
                total.transport(&r, &m)?.0
            } else {
                r
            };
            let options = base.homs(&f.apply_object(&r), &jk)?;
            if let Some(h) = ch.pick(ch.axes.isos, &options) {
                found = Some((r, h.clone()));
                break;
            }
        }
        match found {
            Some((r, h)) => {
                objects.push(r);
                isos.push(h);
            }
            None => {
                return Ok(Err(format!(
                    "step objects: no local object over part {} = {} of cover {} maps isomorphically onto j",
                    k,
                    sp.describe(part),
                    describe_cover(&sp, cover)
                )))
            }
        }
    }
    let mut lifts = HashMap::new();
    for k0 in 0..cover.len() {
        for k1 in 0..cover.len() {
            let w = cover.face(&[k0, k1])?;
            if w.is_empty() {
                continue;
            }
            let h0 = base.restrict_morphism(&isos[k0], w)?;
            let h1 = base.restrict_morphism(&isos[k1], w)?;
            let target = base.compose(&base.inverse(&h1), &h0)?;
            let i0 = total.restrict_object(&objects[k0], w)?;
            let i1 = total.restrict_object(&objects[k1], w)?;
            let options = local_lifts(ext, &i0, &i1, &target)?;
            match ch.pick(ch.axes.lifts, &options) {
                Some(g) => {
                    lifts.insert((k0, k1), g.clone());
                }
                None => {
                    return Ok(Err(format!(
                        "step lifts: no lift of h_{1}⁻¹ ∘ h_{0} over U_{0} ∩ U_{1} = {2} of cover {3} for pair ({0}, {1})",
                        k0,
                        k1,
                        sp.describe(w),
                        describe_cover(&sp, cover)
                    )))
                }
            }
        }
    }
    let c = cl2_cocycle(ext, cover, &objects, &lifts)?;
    Ok(Ok(Cl2Data { class: CohClass::new(c)?, objects, isos, lifts }))
}

/// The obstruction class to lifting the global base object `j`, or the
/// reason it is undefined on every cover tried.
pub fn cl2(ext: &CentralExtensionOfGerbes, j: &LocalObject, ch: &mut Chooser) -> Result<Cl2> {
    let base = ext.base();
    let sp = base.space().clone();
    if j.open() != sp.whole() {
        return Err(Error::BadObject("j must be a global object".into()));
    }
    base.check_object(j)?;
    let mut reasons = Vec::new();
    for cover in ch.covers(&sp, sp.whole())? {
        match cl2_on(ext, j, &cover, ch)? {
            Ok(d) => return Ok(Cl2::Defined(Box::new(d))),
            Err(r) => reasons.push(r),
        }
    }
    Ok(Cl2::Undefined { reason: reasons.join("; ") })
}

#[derive(Clone, Debug)]
pub enum Lift2 {
    /// A global object `i` with an isomorphism `e : j → F(i)`.
    Lifted {
        i: LocalObject,
        e: LocalMorphism,
        class: CohClass,
    },
    Obstructed {
        class: CohClass,
    },
    Undefined {
        reason: String,
    },
}

/// Lifts `j` to a global object of the total gerbe up to isomorphism.
pub fn lift_object(ext: &CentralExtensionOfGerbes, j: &LocalObject, ch: &mut Chooser) -> Result<Lift2> {
    let data = match cl2(ext, j, ch)? {
        Cl2::Undefined { reason } => return Ok(Lift2::Undefined { reason }),
        Cl2::Defined(d) => *d,
    };
    if !data.class.is_trivial()? {
        return Ok(Lift2::Obstructed { class: data.class });
    }
    let total = ext.total();
    let base = ext.base();
    let Cl2Data { class, mut objects, mut isos, mut lifts } = data;
    let mut c = class.representative().clone();
    if !is_coboundary(&c)? {
        let (fine, r) = refine_to_points(&c)?;
        let parts = r.fine().parts().to_vec();
        let phi = r.phi().to_vec();
        objects = parts.iter().enumerate().map(|(k, &p)| total.restrict_object(&objects[phi[k]], p)).collect::<Result<_>>()?;
        isos = parts.iter().enumerate().map(|(k, &p)| base.restrict_morphism(&isos[phi[k]], p)).collect::<Result<_>>()?;
        let mut fl = HashMap::new();
        for k0 in 0..parts.len() {
            for k1 in 0..parts.len() {
                let w = r.fine().face(&[k0, k1])?;
                if !w.is_empty() {
                    fl.insert((k0, k1), total.restrict_morphism(&lifts[&(phi[k0], phi[k1])], w)?);
                }
            }
        }
        lifts = fl;
        c = fine;
    }
    let b = solve_coboundary(&c)?.ok_or(Error::NotCocycle)?;
    let cover = c.cover().clone();
    let mut corrected = HashMap::new();
    for (&(k0, k1), g) in &lifts {
        let chi = ext.band().local(&objects[k0], g.open(), b.value(&[k0, k1]))?;
        corrected.insert((k0, k1), total.compose(g, &total.inverse(&chi))?);
    }
    let (i, eps) = total.glue_objects(&cover, &objects, &|a, b| corrected[&(a, b)].clone())?;
    total.check_object(&i)?;
    let fi = ext.proj().apply_object(&i);
    let mut parts = Vec::with_capacity(cover.len());
    for k in 0..cover.len() {
        let fe = base.inverse(&ext.proj().apply_morphism(&eps[k]));
        parts.push(base.compose(&fe, &base.inverse(&isos[k]))?);
    }
    let e = base.glue_morphisms(j, &fi, &cover, &parts)?;
    Ok(Lift2::Lifted { i, e, class })
}

/// Whether isomorphic base objects get equal classes.
pub fn cl2_iso_invariance(ext: &CentralExtensionOfGerbes, j: &LocalObject, j2: &LocalObject, ch: &mut Chooser) -> Result<bool> {
    if ext.base().first_hom(j, j2)?.is_none() {
        return Err(Error::BadMorphism("the objects are not isomorphic".into()));
    }
    match (cl2(ext, j, ch)?, cl2(ext, j2, ch)?) {
        (Cl2::Defined(a), Cl2::Defined(b)) => crate::cech::classes_equal(&a.class, &b.class),
        _ => Err(Error::BadObject("an obstruction class is undefined".into())),
    }
}

/// A morphism of central extensions: `D` on totals, `E` on bases and a
/// band map, forming strictly commuting squares.
#[derive(Clone, Debug)]
pub struct MorphismOfExtensions {
    pub source: CentralExtensionOfGerbes,
    pub target: CentralExtensionOfGerbes,
    pub d: GerbeMorphism,
    pub e: GerbeMorphism,
    pub band_map: SheafHom,
}

impl MorphismOfExtensions {
    pub fn new(
        source: CentralExtensionOfGerbes,
        target: CentralExtensionOfGerbes,
        d: GerbeMorphism,
        e: GerbeMorphism,
        band_map: SheafHom,
    ) -> Result<Self> {
        if !d.source().same_as(source.total()) || !d.target().same_as(target.total()) {
            return Err(Error::BadFunctor("D does not connect the total gerbes".into()));
        }
        if !e.source().same_as(source.base()) || !e.target().same_as(target.base()) {
            return Err(Error::BadFunctor("E does not connect the base gerbes".into()));
        }
        if band_map.source() != source.band().band() || band_map.target() != target.band().band() {
            return Err(Error::SheafMismatch("band map does not connect the bands".into()));
        }
        let sp = source.total().space().clone();
        for x in 0..sp.len() {
            if source.proj().functor(x).then(e.functor(x)) != d.functor(x).then(target.proj().functor(x)) {
                return Err(Error::BadFunctor(format!("square fails to commute over U_{}", sp.name(x))));
            }
            let dx = d.functor(x);
            for o in 0..source.total().stalk(x).n_objects() as u32 {
                for n in source.band().band().stalk(x).elements() {
                    let lhs = dx.mor[source.band().chi(x, o, n) as usize];
                    let rhs = target.band().chi(x, dx.obj[o as usize], band_map.at(x)[n as usize]);
                    if lhs != rhs {
                        return Err(Error::BadFunctor(format!("D does not restrict to the band map over U_{}", sp.name(x))));
                    }
                }
            }
        }
        Ok(MorphismOfExtensions { source, target, d, e, band_map })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorialityReport {
    pub upstream_defined: bool,
    /// The pushed choices reproduce the pushed cocycle exactly.
    pub pushed_choices_agree: Option<bool>,
    pub downstream_defined: bool,
    /// The pushed class equals the class computed downstream.
    pub classes_match: Option<bool>,
}

/// Pushes the choices behind `cl2(j)` along the morphism and compares
/// with the class computed downstream for `E(j)`.
pub fn cl2_functoriality(m: &MorphismOfExtensions, j: &LocalObject, ch: &mut Chooser) -> Result<FunctorialityReport> {
    let down_j = m.e.apply_object(j);
    let down = cl2(&m.target, &down_j, &mut Chooser::canonical())?;
    let up = cl2(&m.source, j, ch)?;
    let Cl2::Defined(data) = up else {
        return Ok(FunctorialityReport {
            upstream_defined: false,
            pushed_choices_agree: None,
            downstream_defined: down.class().is_some(),
            classes_match: None,
        });
    };
    let pushed = data.class.push(&m.band_map)?;
    let objects: Vec<LocalObject> = data.objects.iter().map(|i| m.d.apply_object(i)).collect();
    let lifts: HashMap<(usize, usize), LocalMorphism> = data.lifts.iter().map(|(&k, g)| (k, m.d.apply_morphism(g))).collect();
    let direct = cl2_cocycle(&m.target, data.class.cover(), &objects, &lifts)?;
    let agree = direct == *pushed.representative();
    let classes_match = match down.class() {
        Some(c) => Some(crate::cech::classes_equal(&pushed, c)?),
        None => None,
    };
    Ok(FunctorialityReport {
        upstream_defined: true,
        pushed_choices_agree: Some(agree),
        downstream_defined: down.class().is_some(),
        classes_match,
    })
}

/// The same comparison for `cl1(h)` against `cl1(E(h))`.
pub fn cl1_functoriality(m: &MorphismOfExtensions, p: &LiftProblem1, ch: &mut Chooser) -> Result<FunctorialityReport> {
    let up = cl1(&m.source, p, ch)?;
    let q = LiftProblem1 { i: m.d.apply_object(&p.i), j: m.d.apply_object(&p.j), h: m.e.apply_morphism(&p.h) };
    let down = cl1(&m.target, &q, &mut Chooser::canonical())?;
    let pushed = up.class.push(&m.band_map)?;
    let lifts: Vec<LocalMorphism> = up.lifts.iter().map(|g| m.d.apply_morphism(g)).collect();
    let direct = cl1_cocycle(&m.target, up.class.cover(), &q.i, &lifts)?;
    Ok(FunctorialityReport {
        upstream_defined: true,
        pushed_choices_agree: Some(direct == *pushed.representative()),
        downstream_defined: true,
        classes_match: Some(crate::cech::classes_equal(&pushed, &down.class)?),
    })
}

/// Whether `Ȟ¹(V, band)` and `Ȟ²(V, band)` vanish, computed on the point
/// cover of `V`.
pub fn is_acyclic_open(band: &SheafOfGroups, v: Open) -> Result<bool> {
    if v.is_empty() {
        return Ok(true);
    }
    let pc = point_cover(band.space(), v)?;
    for p in [1, 2] {
        if !cohomology_group(band, &pc, p, Backend::Snf)?.is_trivial() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `Ȟ¹(V, band)` vanishes.
pub fn h1_vanishes(band: &SheafOfGroups, v: Open) -> Result<bool> {
    if v.is_empty() {
        return Ok(true);
    }
    let pc = point_cover(band.space(), v)?;
    Ok(cohomology_group(band, &pc, 1, Backend::Snf)?.is_trivial())
}

/// Whether every part and every double and triple overlap is acyclic.
pub fn cover_is_acyclic(band: &SheafOfGroups, cover: &Cover) -> Result<bool> {
    let k = cover.len();
    for a in 0..k {
        for b in a..k {
            for c in b..k {
                if !is_acyclic_open(band, cover.face(&[a, b, c])?)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `None` when `Ȟ¹(U, band)` is nontrivial; otherwise whether `F` is
/// surjective on hom sets over `U`.
pub fn acyclic_surjectivity(ext: &CentralExtensionOfGerbes, u: Open) -> Result<Option<bool>> {
    if !h1_vanishes(ext.band().band(), u)? {
        return Ok(None);
    }
    Ok(Some(ext.proj().homs_surjective_over(u)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlwaysDefinedReport {
    pub acyclic_family: bool,
    pub objects_checked: usize,
    pub all_defined: bool,
}

/// Whether `cl2` is defined for every global base object up to isomorphism.
pub fn cl2_always_defined_check(ext: &CentralExtensionOfGerbes) -> Result<AlwaysDefinedReport> {
    let sp = ext.base().space().clone();
    let band = ext.band().band();
    let mut acyclic = true;
    for c in cover_family(&sp, sp.whole())? {
        acyclic &= cover_is_acyclic(band, &c)?;
    }
    let reps = ext.base().object_reps(sp.whole())?;
    let mut all = true;
    for j in reps.iter() {
        all &= cl2(ext, j, &mut Chooser::canonical())?.class().is_some();
    }
    Ok(AlwaysDefinedReport { acyclic_family: acyclic, objects_checked: reps.len(), all_defined: all })
}

/// Two isomorphisms `F(i) → F(j)` whose degree-one classes differ.
#[derive(Clone, Debug)]
pub struct HDependence {
    pub i: LocalObject,
    pub j: LocalObject,
    pub h1: LocalMorphism,
    pub h2: LocalMorphism,
}

/// Searches all pairs of global representatives and all `h` for a pair
/// `(i, j)` whose class depends on `h`.
pub fn h_dependence_search(ext: &CentralExtensionOfGerbes) -> Result<Option<HDependence>> {
    let sp = ext.total().space().clone();
    let reps = ext.total().object_reps(sp.whole())?;
    for i in reps.iter() {
        for j in reps.iter() {
            let hs = ext.base().homs(&ext.proj().apply_object(i), &ext.proj().apply_object(j))?;
            let mut first: Option<(LocalMorphism, CohClass)> = None;
            for h in hs {
                let p = LiftProblem1 { i: i.clone(), j: j.clone(), h: h.clone() };
                let c = match cl1(ext, &p, &mut Chooser::canonical()) {
                    Ok(c) => c.class,
                    Err(Error::NoLiftingCover) => continue,
                    Err(e) => return Err(e),
                };
                match &first {
                    None => first = Some((h, c)),
                    Some((h0, c0)) => {
                        if !crate::cech::classes_equal(c0, &c)? {
                            return Ok(Some(HDependence { i: i.clone(), j: j.clone(), h1: h0.clone(), h2: h }));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// How global objects of `G` map to global objects of the base.
#[derive(Clone, Debug)]
pub struct FakeObjectReport {
    pub total_classes: usize,
    pub base_classes: usize,
    pub h1_trivial: bool,
    pub h2_trivial: bool,
    pub injective: bool,
    pub surjective: bool,
    /// Base objects not isomorphic to any `F(i)`, with their class status.
    pub fake: Vec<(LocalObject, Lift2)>,
}

/// Compares isomorphism classes of global objects upstairs and downstairs.
pub fn fake_objects(ext: &CentralExtensionOfGerbes) -> Result<FakeObjectReport> {
    let sp = ext.total().space().clone();
    let u = sp.whole();
    let band = ext.band().band();
    let pc = point_cover(&sp, u)?;
    let h1 = cohomology_group(band, &pc, 1, Backend::Snf)?.is_trivial();
    let h2 = cohomology_group(band, &pc, 2, Backend::Snf)?.is_trivial();
    let total = ext.total().object_reps(u)?;
    let base = ext.base().object_reps(u)?;
    let mut hit = vec![0usize; base.len()];
    for i in total.iter() {
        let fi = ext.proj().apply_object(i);
        let (k, _) = ext.base().find_rep(&fi)?.ok_or_else(|| Error::BadObject("image has no representative".into()))?;
        hit[k] += 1;
    }
    let mut fake = Vec::new();
    for (k, j) in base.iter().enumerate() {
        if hit[k] == 0 {
            fake.push((j.clone(), lift_object(ext, j, &mut Chooser::canonical())?));
        }
    }
    Ok(FakeObjectReport {
        total_classes: total.len(),
        base_classes: base.len(),
        h1_trivial: h1,
        h2_trivial: h2,
        injective: hit.iter().all(|&h| h <= 1),
        surjective: fake.is_empty(),
        fake,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::classes_equal;
    use crate::gerbe::{chain_cocycle_gerbe, extension_of_torsor_gerbes, gerbe_from_2cocycle};
    use crate::group::FiniteGroup;
    use crate::sheaf::CentralExtension;
    use crate::space::models;
    use std::sync::Arc;

    fn z4_over(space: FiniteSpace) -> CentralExtensionOfGerbes {
        let ext = CentralExtension::constant(Arc::new(space), &FiniteGroup::cyclic(4), &[0, 2]).unwrap();
        extension_of_torsor_gerbes(&ext).unwrap()
    }

    #[test]
    fn cl1_nontrivial_on_pseudocircle() {
        let e = z4_over(models::pseudocircle());
        let u = e.total().space().whole();
        let reps = e.total().object_reps(u).unwrap();
        let mut obstructed = 0;
        let mut lifted = 0;
        for i in reps.iter() {
            for j in reps.iter() {
                let (fi, fj) = (e.proj().apply_object(i), e.proj().apply_object(j));
                for h in e.base().homs(&fi, &fj).unwrap() {
                    let p = LiftProblem1 { i: i.clone(), j: j.clone(), h: h.clone() };
                    match lift_isomorphism(&e, &p, &mut Chooser::canonical()).unwrap() {
                        Lift1::Lifted { g, .. } => {
                            assert_eq!(e.proj().apply_morphism(&g), h);
                            lifted += 1;
                        }
                        Lift1::Obstructed { class } => {
                            assert!(!class.is_trivial().unwrap());
                            obstructed += 1;
                        }
                    }
                }
            }
        }
        assert!(obstructed > 0 && lifted > 0);
    }

    #[test]
    fn cl1_is_choice_independent() {
        let e = z4_over(models::pseudocircle());
        let u = e.total().space().whole();
        let reps = e.total().object_reps(u).unwrap();
        let (i, j) = (&reps[0], &reps[reps.len() - 1]);
        for h in e.base().homs(&e.proj().apply_object(i), &e.proj().apply_object(j)).unwrap() {
            let p = LiftProblem1 { i: i.clone(), j: j.clone(), h };
            let c0 = cl1(&e, &p, &mut Chooser::canonical()).unwrap().class;
            for seed in 0..10 {
                let c = cl1(&e, &p, &mut Chooser::random(seed, Axes::ALL)).unwrap().class;
                assert!(classes_equal(&c0, &c).unwrap());
            }
        }
    }

    #[test]
    fn lift_object_on_contractible_and_split() {
        let e = z4_over(models::chain(3));
        let u = e.total().space().whole();
        for j in e.base().all_objects(u).unwrap() {
            match lift_object(&e, &j, &mut Chooser::random(3, Axes::ALL)).unwrap() {
                Lift2::Lifted { i, e: iso, .. } => {
                    assert!(e.base().is_morphism(&iso, &j, &e.proj().apply_object(&i)));
                }
                other => panic!("expected a lift, got {:?}", other),
            }
        }
    }

    #[test]
    fn chain_gerbe_class_is_undefined() {
        let sp = Arc::new(models::pseudosphere());
        let band = SheafOfGroups::constant(sp.clone(), &FiniteGroup::cyclic(2));
        let pt = |s: &str| sp.point(s).unwrap();
        let gamma: HashMap<_, _> = [((pt("e"), pt("c"), pt("a")), 1)].into_iter().collect();
        let e = chain_cocycle_gerbe(&band, &gamma).unwrap();
        let j = e.base().object_reps(sp.whole()).unwrap()[0].clone();
        match lift_object(&e, &j, &mut Chooser::canonical()).unwrap() {
            Lift2::Undefined { reason } => assert!(reason.contains("step lifts")),
            other => panic!("expected undefined, got {:?}", other),
        }
    }

    #[test]
    fn cocycle_gerbe_reproduces_its_class() {
        let sp = Arc::new(models::tetra_sphere());
        let band = SheafOfGroups::constant(sp.clone(), &FiniteGroup::cyclic(2));
        let cover = minimal_open_cover(&sp, sp.whole()).unwrap();
        let h2 = cohomology_group(&band, &cover, 2, Backend::Snf).unwrap();
        let c = h2.generators[0].clone();
        let e = gerbe_from_2cocycle(&band, &cover, &c).unwrap();
        let j = e.base().object_reps(sp.whole()).unwrap()[0].clone();
        let cl = cl2(&e, &j, &mut Chooser::canonical()).unwrap();
        let got = cl.class().expect("defined");
        assert!(classes_equal(got, &CohClass::new(c).unwrap()).unwrap());
        assert!(matches!(lift_object(&e, &j, &mut Chooser::canonical()).unwrap(), Lift2::Obstructed { .. }));
    }
}
