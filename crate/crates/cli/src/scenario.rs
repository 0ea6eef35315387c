//! Scenario files, schema 1.
//!
//! A scenario carries one space and every algebraic object built on it,
//! each section keyed by name.  Entries may refer to entries defined
//! earlier in the file, and to any entry of an earlier section.  Loading
//! never stops at the first bad entry: each entry yields a [`Check`], and
//! entries depending on a failed one fail with a pointer to it.

use std::collections::HashMap;
use std::sync::Arc;

use gerbex_core::cech::{Cochain, CohClass};
use gerbex_core::gerbe::{
    center_extension, chain_cocycle_gerbe, extension_of_torsor_gerbes, gerbe_from_2cocycle, quotient_extension, quotient_gerbe,
    torsor_gerbe, CentralExtensionOfGerbes, LocalMorphism, LocalObject, NormalSubgroupoid, PrestackGroupoid,
};
use gerbex_core::group::{Elem, FiniteGroup};
use gerbex_core::groupoid::{FiniteGroupoid, Functor, GroupoidDiagram};
use gerbex_core::pronilpotent::{FilteredGerbe, FilteredSheafGroup};
use gerbex_core::sheaf::{quotient_sheaf, subsheaf, CentralExtension, SheafOfGroups};
use gerbex_core::space::{models, Cover, FiniteSpace, Open, Point};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema: u32,
    space: RawSpace,
    #[serde(default)]
    groups: Map<String, Value>,
    #[serde(default)]
    sheaves: Map<String, Value>,
    #[serde(default)]
    sheaf_extensions: Map<String, Value>,
    #[serde(default)]
    gerbes: Map<String, Value>,
    #[serde(default)]
    normals: Map<String, Value>,
    #[serde(default)]
    extensions: Map<String, Value>,
    #[serde(default)]
    filtrations: Map<String, Value>,
    #[serde(default)]
    cover_family: Vec<Vec<Vec<String>>>,
    #[serde(default)]
    problems: Vec<Value>,
    #[serde(default)]
    options: Options,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSpace {
    Model { model: String },
    Poset { points: Vec<String>, leq: Vec<(String, String)> },
}

#[derive(Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum RawGroup {
    Cyclic { cyclic: usize },
    Named { named: String },
    Table { order: usize, mul: Vec<Vec<usize>>, labels: Vec<String> },
}

#[derive(Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum RawSheaf {
    Constant {
        constant: String,
    },
    Stalks {
        stalks: Map<String, Value>,
        #[serde(default)]
        maps: Map<String, Value>,
    },
}

/// Subgroup members, either one list for every point or one per point.
#[derive(Clone, Deserialize)]
#[serde(untagged)]
enum Members {
    Everywhere(Vec<String>),
    PerPoint(HashMap<String, Vec<String>>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSheafExtension {
    sheaf: String,
    central: Members,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroupoid {
    objects: Vec<String>,
    morphisms: Vec<(String, String, String)>,
    compose: Vec<(String, String, String)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunctor {
    objects: HashMap<String, String>,
    morphisms: HashMap<String, String>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawGerbe {
    TorsorGerbe {
        sheaf: String,
    },
    Explicit {
        stalks: HashMap<String, RawGroupoid>,
        #[serde(default)]
        restrictions: HashMap<String, RawFunctor>,
    },
    Quotient {
        gerbe: String,
        normal: String,
    },
    #[serde(rename = "from_2cocycle")]
    From2cocycle {
        band: String,
        cover: Vec<Vec<String>>,
        cocycle: HashMap<String, String>,
    },
    ChainCocycle {
        band: String,
        gamma: Vec<(String, String, String, String)>,
    },
    RestrictionsOf {
        gerbe: String,
        object: RawObject,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNormal {
    gerbe: String,
    members: HashMap<String, HashMap<String, Vec<String>>>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawExtension {
    Torsor {
        sheaf_extension: String,
    },
    #[serde(rename = "from_2cocycle")]
    From2cocycle {
        band: String,
        cover: Vec<Vec<String>>,
        cocycle: HashMap<String, String>,
    },
    ChainCocycle {
        band: String,
        gamma: Vec<(String, String, String, String)>,
    },
    Center {
        gerbe: String,
    },
    Quotient {
        gerbe: String,
        normal: String,
    },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawFiltration {
    Sheaf { sheaf: String, p_max: usize, levels: Vec<Members> },
    Band { extension: String, p_max: usize, levels: Vec<Members> },
    Gerbe { gerbe: String, p_max: usize, levels: Vec<String> },
}

/// A global object: an index into the isomorphism-class representatives,
/// or explicit values with `φ` on covering relations `"x<y"`.
#[derive(Clone, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum RawObject {
    Rep {
        rep: usize,
    },
    Explicit {
        objects: HashMap<String, String>,
        #[serde(default)]
        phi: HashMap<String, String>,
    },
}

/// A global morphism: an index into the hom set, or explicit components.
#[derive(Clone, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum RawMorphism {
    Index { index: usize },
    Components { components: HashMap<String, String> },
}

#[derive(Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawProblem {
    Cohomology {
        name: String,
        sheaf: String,
        degree: usize,
        #[serde(default)]
        cover: Option<Vec<Vec<String>>>,
    },
    LiftIsomorphism {
        name: String,
        extension: String,
        i: RawObject,
        j: RawObject,
        h: RawMorphism,
    },
    LiftObject {
        name: String,
        extension: String,
        j: RawObject,
    },
    Connect {
        name: String,
        filtration: String,
        i: RawObject,
        j: RawObject,
    },
    GlueObject {
        name: String,
        filtration: String,
    },
    Acyclic {
        name: String,
        filtration: String,
    },
}

impl RawProblem {
    pub fn name(&self) -> &str {
        match self {
            RawProblem::Cohomology { name, .. }
            | RawProblem::LiftIsomorphism { name, .. }
            | RawProblem::LiftObject { name, .. }
            | RawProblem::Connect { name, .. }
            | RawProblem::GlueObject { name, .. }
            | RawProblem::Acyclic { name, .. } => name,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Outcome of one structural check.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub witness: Option<String>,
}

#[derive(Clone)]
pub enum Filtration {
    Sheaf(FilteredSheafGroup, FilteredGerbe),
    Gerbe(FilteredGerbe),
}

impl Filtration {
    pub fn gerbe(&self) -> &FilteredGerbe {
        match self {
            Filtration::Sheaf(_, g) | Filtration::Gerbe(g) => g,
        }
    }
}

pub struct Resolved {
    pub space: Arc<FiniteSpace>,
    pub sheaves: HashMap<String, SheafOfGroups>,
    pub extensions: HashMap<String, CentralExtensionOfGerbes>,
    pub filtrations: HashMap<String, Filtration>,
    pub covers: Vec<Cover>,
    pub problems: Vec<RawProblem>,
    pub options: Options,
}

/// Everything loaded, with one check per entry.
pub struct Scenario {
    pub resolved: Resolved,
    pub checks: Vec<Check>,
}

impl Scenario {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.ok)
    }
}

type Res<T> = std::result::Result<T, String>;

fn core<T>(r: gerbex_core::Result<T>) -> Res<T> {
    r.map_err(|e| e.to_string())
}

struct Loader {
    space: Arc<FiniteSpace>,
    groups: HashMap<String, FiniteGroup>,
    sheaves: HashMap<String, SheafOfGroups>,
    sheaf_extensions: HashMap<String, CentralExtension>,
    gerbes: HashMap<String, PrestackGroupoid>,
    normals: HashMap<String, (String, NormalSubgroupoid)>,
    extensions: HashMap<String, CentralExtensionOfGerbes>,
    filtrations: HashMap<String, Filtration>,
    failed: HashMap<String, String>,
    checks: Vec<Check>,
    deep: bool,
}

/// Parses and builds a scenario.  With `deep`, gerbes also get the stack
/// and gerbe checks, which enumerate descent data.
pub fn load(text: &str, deep: bool) -> Result<Scenario, CliError> {
    let raw: RawScenario = serde_json::from_str(text).map_err(CliError::Parse)?;
    if raw.schema != SCHEMA {
        return Err(CliError::Schema(raw.schema));
    }
    let space = Arc::new(build_space(&raw.space).map_err(CliError::Resolve)?);
    let mut l = Loader {
        space,
        groups: HashMap::new(),
        sheaves: HashMap::new(),
        sheaf_extensions: HashMap::new(),
        gerbes: HashMap::new(),
        normals: HashMap::new(),
        extensions: HashMap::new(),
        filtrations: HashMap::new(),
        failed: HashMap::new(),
        checks: vec![Check { name: "space".into(), ok: true, witness: None }],
        deep,
    };
    for (name, v) in &raw.groups {
        let r = parse::<RawGroup>(v).and_then(|g| build_group(&g));
        l.record("group", name, r, |l, g| {
            l.groups.insert(name.clone(), g);
        });
    }
    for (name, v) in &raw.sheaves {
        let r = parse::<RawSheaf>(v).and_then(|s| l.build_sheaf(&s));
        l.record("sheaf", name, r, |l, s| {
            l.sheaves.insert(name.clone(), s);
        });
    }
    for (name, v) in &raw.sheaf_extensions {
        let r = parse::<RawSheafExtension>(v).and_then(|e| l.build_sheaf_extension(&e));
        l.record("sheaf extension", name, r, |l, e| {
            l.sheaf_extensions.insert(name.clone(), e);
        });
    }
    // Gerbes and normal subgroupoids may refer to each other through
    // quotients, so they share one pass in file order.
    let mut pending: Vec<(bool, &String, &Value)> = Vec::new();
    for (name, v) in &raw.gerbes {
        pending.push((true, name, v));
    }
    for (name, v) in &raw.normals {
        pending.push((false, name, v));
    }
    let mut progress = true;
    while progress && !pending.is_empty() {
        progress = false;
        let mut rest = Vec::new();
        for (is_gerbe, name, v) in pending {
            if !l.ready(is_gerbe, v) {
                rest.push((is_gerbe, name, v));
                continue;
            }
            progress = true;
            if is_gerbe {
                let r = parse::<RawGerbe>(v).and_then(|g| l.build_gerbe(&g));
                l.record("gerbe", name, r, |l, g| {
                    l.gerbes.insert(name.clone(), g);
                });
                if l.deep && l.gerbes.contains_key(name.as_str()) {
                    l.deep_checks(name);
                }
            } else {
                let r = parse::<RawNormal>(v).and_then(|n| l.build_normal(&n));
                l.record("normal subgroupoid", name, r, |l, n| {
                    l.normals.insert(name.clone(), n);
                });
            }
        }
        pending = rest;
    }
    for (is_gerbe, name, _) in pending {
        let kind = if is_gerbe { "gerbe" } else { "normal subgroupoid" };
        l.record::<()>(kind, name, Err("unresolved or cyclic reference".into()), |_, _| {});
    }
    for (name, v) in &raw.extensions {
        let r = parse::<RawExtension>(v).and_then(|e| l.build_extension(&e));
        l.record("extension", name, r, |l, e| {
            l.extensions.insert(name.clone(), e);
        });
    }
    for (name, v) in &raw.filtrations {
        let r = parse::<RawFiltration>(v).and_then(|f| l.build_filtration(&f));
        l.record("filtration", name, r, |l, f| {
            l.filtrations.insert(name.clone(), f);
        });
    }
    let mut covers = Vec::new();
    for (k, c) in raw.cover_family.iter().enumerate() {
        let r = l.build_cover(c, l.space.whole());
        l.record("cover", &k.to_string(), r, |_, c| covers.push(c));
    }
    let mut problems = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (k, v) in raw.problems.iter().enumerate() {
        let r = parse::<RawProblem>(v).and_then(|p| {
            if !seen.insert(p.name().to_string()) {
                return Err(format!("duplicate problem name `{}`", p.name()));
            }
            l.check_problem(&p)?;
            Ok(p)
        });
        let label = v.get("name").and_then(Value::as_str).map(String::from).unwrap_or_else(|| format!("#{}", k));
        l.record("problem", &label, r, |_, p| problems.push(p));
    }
    Ok(Scenario {
        resolved: Resolved {
            space: l.space,
            sheaves: l.sheaves,
            extensions: l.extensions,
            filtrations: l.filtrations,
            covers,
            problems,
            options: raw.options,
        },
        checks: l.checks,
    })
}

fn parse<T: serde::de::DeserializeOwned>(v: &Value) -> Res<T> {
    T::deserialize(v).map_err(|e| format!("malformed entry: {}", e))
}

fn build_space(raw: &RawSpace) -> Res<FiniteSpace> {
    match raw {
        RawSpace::Model { model } => match model.as_str() {
            "one_point" => Ok(models::one_point()),
            "vee" => Ok(models::vee()),
            "zigzag" => Ok(models::zigzag()),
            "pseudocircle" => Ok(models::pseudocircle()),
            "pseudosphere" => Ok(models::pseudosphere()),
            "tetra_sphere" => Ok(models::tetra_sphere()),
            m => match m.strip_prefix("chain").and_then(|n| n.parse().ok()) {
                Some(n) => Ok(models::chain(n)),
                None => Err(format!("unknown model `{}`", m)),
            },
        },
        RawSpace::Poset { points, leq } => core(FiniteSpace::from_names(points, leq)),
    }
}

fn build_group(raw: &RawGroup) -> Res<FiniteGroup> {
    match raw {
        RawGroup::Cyclic { cyclic } if *cyclic > 0 => Ok(FiniteGroup::cyclic(*cyclic)),
        RawGroup::Cyclic { .. } => Err("cyclic group of order 0".into()),
        RawGroup::Named { named } => match named.as_str() {
            "trivial" => Ok(FiniteGroup::trivial()),
            "symmetric3" => Ok(FiniteGroup::symmetric3()),
            "heisenberg" => Ok(FiniteGroup::heisenberg()),
            "quaternion" => Ok(FiniteGroup::quaternion()),
            "dihedral4" => Ok(FiniteGroup::dihedral(4)),
            n => Err(format!("unknown group `{}`", n)),
        },
        RawGroup::Table { order, mul, labels } => {
            if labels.len() != *order || mul.len() != *order {
                return Err(format!("order {} does not match the table", order));
            }
            core(FiniteGroup::from_table(labels.clone(), mul.clone()))
        }
    }
}

/// Splits `"x<y"` into two points.
fn relation(space: &FiniteSpace, key: &str) -> Res<(Point, Point)> {
    let (a, b) = key.split_once("<=").or_else(|| key.split_once('<')).ok_or_else(|| format!("`{}` is not of the form x<y", key))?;
    let (x, y) = (core(space.point(a.trim()))?, core(space.point(b.trim()))?);
    if !space.leq(x, y) {
        return Err(format!("`{}` is not a relation of the space", key));
    }
    Ok((x, y))
}

fn label_of(g: &FiniteGroup, l: &str, at: &str) -> Res<Elem> {
    g.element(l).ok_or_else(|| format!("unknown label `{}` at `{}`", l, at))
}

impl Loader {
    fn record<T>(&mut self, kind: &str, name: &str, r: Res<T>, store: impl FnOnce(&mut Self, T)) {
        let full = format!("{} `{}`", kind, name);
        match r {
            Ok(v) => {
                store(self, v);
                self.checks.push(Check { name: full, ok: true, witness: None });
            }
            Err(w) => {
                self.failed.insert(name.to_string(), full.clone());
                self.checks.push(Check { name: full, ok: false, witness: Some(w) });
            }
        }
    }

    fn missing(&self, kind: &str, name: &str) -> String {
        match self.failed.get(name) {
            Some(f) => format!("depends on failed {}", f),
            None => format!("unknown {} `{}`", kind, name),
        }
    }

    fn group(&self, name: &str) -> Res<&FiniteGroup> {
        self.groups.get(name).ok_or_else(|| self.missing("group", name))
    }

    fn sheaf(&self, name: &str) -> Res<&SheafOfGroups> {
        self.sheaves.get(name).ok_or_else(|| self.missing("sheaf", name))
    }

    fn gerbe(&self, name: &str) -> Res<&PrestackGroupoid> {
        self.gerbes.get(name).ok_or_else(|| self.missing("gerbe", name))
    }

    fn normal(&self, name: &str) -> Res<&(String, NormalSubgroupoid)> {
        self.normals.get(name).ok_or_else(|| self.missing("normal subgroupoid", name))
    }

    fn extension(&self, name: &str) -> Res<&CentralExtensionOfGerbes> {
        self.extensions.get(name).ok_or_else(|| self.missing("extension", name))
    }

    fn filtration(&self, name: &str) -> Res<&Filtration> {
        self.filtrations.get(name).ok_or_else(|| self.missing("filtration", name))
    }

    /// Whether the gerbes and normals an entry names are settled.
    fn ready(&self, is_gerbe: bool, v: &Value) -> bool {
        let settled = |n: &str| self.gerbes.contains_key(n) || self.normals.contains_key(n) || self.failed.contains_key(n);
        let names: Vec<&str> = if is_gerbe {
            ["gerbe", "normal"].iter().filter_map(|k| v.get(*k).and_then(Value::as_str)).collect()
        } else {
            v.get("gerbe").and_then(Value::as_str).into_iter().collect()
        };
        names.into_iter().all(settled)
    }

    fn build_sheaf(&self, raw: &RawSheaf) -> Res<SheafOfGroups> {
        let sp = self.space.clone();
        match raw {
            RawSheaf::Constant { constant } => Ok(SheafOfGroups::constant(sp, self.group(constant)?)),
            RawSheaf::Stalks { stalks, maps } => {
                let mut groups = Vec::with_capacity(sp.len());
                for x in 0..sp.len() {
                    let name = stalks.get(sp.name(x)).and_then(Value::as_str).ok_or_else(|| format!("no stalk at `{}`", sp.name(x)))?;
                    groups.push(self.group(name)?.clone());
                }
                if let Some(k) = stalks.keys().find(|k| sp.point(k).is_err()) {
                    return Err(format!("unknown point `{}`", k));
                }
                let mut comps = Vec::new();
                for (key, v) in maps {
                    let (x, y) = relation(&sp, key)?;
                    let labels: Vec<String> = parse(v)?;
                    if labels.len() != groups[x].order() {
                        return Err(format!("map `{}` needs {} labels", key, groups[x].order()));
                    }
                    let m = labels.iter().map(|l| label_of(&groups[y], l, sp.name(y))).collect::<Res<Vec<_>>>()?;
                    comps.push(((x, y), m));
                }
                let s = core(SheafOfGroups::from_stalks(sp, groups, &comps))?;
                core(s.check_sheaf_condition())?;
                Ok(s)
            }
        }
    }

    fn members(&self, m: &Members, stalk: impl Fn(Point) -> Res<FiniteGroup>) -> Res<Vec<Vec<Elem>>> {
        let sp = &self.space;
        if let Members::PerPoint(map) = m {
            if let Some(k) = map.keys().find(|k| sp.point(k).is_err()) {
                return Err(format!("unknown point `{}`", k));
            }
        }
        (0..sp.len())
            .map(|x| {
                let g = stalk(x)?;
                let labels = match m {
                    Members::Everywhere(l) => l.clone(),
                    Members::PerPoint(map) => map.get(sp.name(x)).cloned().unwrap_or_else(|| vec![g.label(g.id()).to_string()]),
                };
                labels.iter().map(|l| label_of(&g, l, sp.name(x))).collect()
            })
            .collect()
    }

    fn build_sheaf_extension(&self, raw: &RawSheafExtension) -> Res<CentralExtension> {
        let g = self.sheaf(&raw.sheaf)?;
        let members = self.members(&raw.central, |x| Ok(g.stalk(x).clone()))?;
        let (n, inc) = core(subsheaf(g, &members))?;
        let (h, proj) = core(quotient_sheaf(g, &members))?;
        core(CentralExtension::new(n, g.clone(), h, inc, proj))
    }

    fn build_cover(&self, parts: &[Vec<String>], target: Open) -> Res<Cover> {
        let opens = parts.iter().map(|p| core(self.space.open_hull_of_names(p))).collect::<Res<Vec<_>>>()?;
        core(Cover::new(target, opens))
    }

    fn cocycle_extension(&self, band: &str, cover: &[Vec<String>], cocycle: &HashMap<String, String>) -> Res<CentralExtensionOfGerbes> {
        let band = self.sheaf(band)?;
        let cover = self.build_cover(cover, self.space.whole())?;
        let mut entries: Vec<(String, String)> = cocycle.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        entries.sort();
        let c = core(Cochain::parse(band, &cover, 2, &entries))?;
        core(gerbe_from_2cocycle(band, &cover, &c))
    }

    fn chain_extension(&self, band: &str, gamma: &[(String, String, String, String)]) -> Res<CentralExtensionOfGerbes> {
        let band = self.sheaf(band)?;
        let sp = &self.space;
        let mut map = HashMap::new();
        for (z, x, y, l) in gamma {
            let (z, x, y) = (core(sp.point(z))?, core(sp.point(x))?, core(sp.point(y))?);
            map.insert((z, x, y), label_of(band.stalk(y), l, sp.name(y))?);
        }
        core(chain_cocycle_gerbe(band, &map))
    }

    fn build_gerbe(&self, raw: &RawGerbe) -> Res<PrestackGroupoid> {
        match raw {
            RawGerbe::TorsorGerbe { sheaf } => Ok(torsor_gerbe(self.sheaf(sheaf)?)),
            RawGerbe::Explicit { stalks, restrictions } => self.explicit_gerbe(stalks, restrictions),
            RawGerbe::Quotient { gerbe, normal } => {
                let p = self.gerbe(gerbe)?;
                let (owner, n) = self.normal(normal)?;
                if owner != gerbe {
                    return Err(format!("`{}` is a subgroupoid of `{}`, not of `{}`", normal, owner, gerbe));
                }
                Ok(core(quotient_gerbe(p, n))?.0)
            }
            RawGerbe::From2cocycle { band, cover, cocycle } => Ok(self.cocycle_extension(band, cover, cocycle)?.total().clone()),
            RawGerbe::ChainCocycle { band, gamma } => Ok(self.chain_extension(band, gamma)?.total().clone()),
            RawGerbe::RestrictionsOf { gerbe, object } => {
                let p = self.gerbe(gerbe)?;
                let i = resolve_object(p, object)?;
                core(PrestackGroupoid::restrictions_of(p.diagram().clone(), i))
            }
        }
    }

    fn explicit_gerbe(&self, stalks: &HashMap<String, RawGroupoid>, res: &HashMap<String, RawFunctor>) -> Res<PrestackGroupoid> {
        let sp = self.space.clone();
        if let Some(k) = stalks.keys().find(|k| sp.point(k).is_err()) {
            return Err(format!("unknown point `{}`", k));
        }
        let mut groupoids = Vec::with_capacity(sp.len());
        for x in 0..sp.len() {
            let raw = stalks.get(sp.name(x)).ok_or_else(|| format!("no groupoid at `{}`", sp.name(x)))?;
            groupoids.push(explicit_groupoid(raw, sp.name(x))?);
        }
        let mut functors = Vec::new();
        for &(x, y) in sp.hasse() {
            let key = format!("{}<{}", sp.name(x), sp.name(y));
            let raw = res.get(&key).ok_or_else(|| format!("no restriction `{}`", key))?;
            let (a, b) = (&groupoids[x], &groupoids[y]);
            let obj = (0..a.n_objects() as u32)
                .map(|o| {
                    let l = raw.objects.get(a.obj_label(o)).ok_or_else(|| format!("`{}` misses object `{}`", key, a.obj_label(o)))?;
                    b.object(l).ok_or_else(|| format!("unknown object `{}` at `{}`", l, sp.name(y)))
                })
                .collect::<Res<Vec<_>>>()?;
            let mor = (0..a.n_morphisms() as u32)
                .map(|m| {
                    let l = raw.morphisms.get(a.label(m)).ok_or_else(|| format!("`{}` misses morphism `{}`", key, a.label(m)))?;
                    b.morphism(obj[a.src(m) as usize], obj[a.tgt(m) as usize], l)
                        .ok_or_else(|| format!("`{}` sends `{}` to no morphism `{}`", key, a.label(m), l))
                })
                .collect::<Res<Vec<_>>>()?;
            functors.push(((x, y), Functor { obj, mor }));
        }
        if let Some(k) = res.keys().find(|k| relation(&sp, k).map(|(x, y)| !sp.hasse().contains(&(x, y))).unwrap_or(true)) {
            return Err(format!("`{}` is not a covering relation", k));
        }
        Ok(PrestackGroupoid::new(core(GroupoidDiagram::new(sp, groupoids, functors))?))
    }

    fn build_normal(&self, raw: &RawNormal) -> Res<(String, NormalSubgroupoid)> {
        let p = self.gerbe(&raw.gerbe)?;
        let sp = p.space();
        if let Some(k) = raw.members.keys().find(|k| sp.point(k).is_err()) {
            return Err(format!("unknown point `{}`", k));
        }
        let mut members = Vec::with_capacity(sp.len());
        for x in 0..sp.len() {
            let g = p.stalk(x);
            let at = raw.members.get(sp.name(x));
            let fam = (0..g.n_objects() as u32)
                .map(|o| match at.and_then(|m| m.get(g.obj_label(o))) {
                    Some(labels) => labels
                        .iter()
                        .map(|l| {
                            g.morphism(o, o, l)
                                .ok_or_else(|| format!("no automorphism `{}` of `{}` at `{}`", l, g.obj_label(o), sp.name(x)))
                        })
                        .collect(),
                    None => Ok(vec![g.identity(o)]),
                })
                .collect::<Res<Vec<_>>>()?;
            members.push(fam);
        }
        Ok((raw.gerbe.clone(), core(NormalSubgroupoid::new(p, members))?))
    }

    fn build_extension(&self, raw: &RawExtension) -> Res<CentralExtensionOfGerbes> {
        match raw {
            RawExtension::Torsor { sheaf_extension } => {
                let e = self.sheaf_extensions.get(sheaf_extension).ok_or_else(|| self.missing("sheaf extension", sheaf_extension))?;
                core(extension_of_torsor_gerbes(e))
            }
            RawExtension::From2cocycle { band, cover, cocycle } => self.cocycle_extension(band, cover, cocycle),
            RawExtension::ChainCocycle { band, gamma } => self.chain_extension(band, gamma),
            RawExtension::Center { gerbe } => core(center_extension(self.gerbe(gerbe)?)),
            RawExtension::Quotient { gerbe, normal } => {
                let (owner, n) = self.normal(normal)?;
                if owner != gerbe {
                    return Err(format!("`{}` is a subgroupoid of `{}`, not of `{}`", normal, owner, gerbe));
                }
                core(quotient_extension(self.gerbe(gerbe)?, n))
            }
        }
    }

    fn build_filtration(&self, raw: &RawFiltration) -> Res<Filtration> {
        let (p_max, n_levels) = match raw {
            RawFiltration::Sheaf { p_max, levels, .. } | RawFiltration::Band { p_max, levels, .. } => (*p_max, levels.len()),
            RawFiltration::Gerbe { p_max, levels, .. } => (*p_max, levels.len()),
        };
        if n_levels != p_max + 1 {
            return Err(format!("p_max = {} needs {} levels, found {}", p_max, p_max + 1, n_levels));
        }
        match raw {
            RawFiltration::Sheaf { sheaf, levels, .. } => {
                let g = self.sheaf(sheaf)?;
                let lv = levels.iter().map(|m| self.members(m, |x| Ok(g.stalk(x).clone()))).collect::<Res<Vec<_>>>()?;
                let f = core(FilteredSheafGroup::new(g.clone(), lv))?;
                let fg = core(FilteredGerbe::from_sheaf_filtration(&f))?;
                Ok(Filtration::Sheaf(f, fg))
            }
            RawFiltration::Band { extension, levels, .. } => {
                let e = self.extension(extension)?;
                let band = e.band().band();
                let lv = levels.iter().map(|m| self.members(m, |x| Ok(band.stalk(x).clone()))).collect::<Res<Vec<_>>>()?;
                Ok(Filtration::Gerbe(core(FilteredGerbe::from_band_filtration(e, &lv))?))
            }
            RawFiltration::Gerbe { gerbe, levels, .. } => {
                let p = self.gerbe(gerbe)?;
                let lv = levels
                    .iter()
                    .map(|n| {
                        let (owner, n2) = self.normal(n)?;
                        if owner != gerbe {
                            return Err(format!("`{}` is a subgroupoid of `{}`, not of `{}`", n, owner, gerbe));
                        }
                        Ok(n2.clone())
                    })
                    .collect::<Res<Vec<_>>>()?;
                Ok(Filtration::Gerbe(core(FilteredGerbe::new(p.clone(), lv))?))
            }
        }
    }

    fn deep_checks(&mut self, name: &str) {
        let p = self.gerbes[name].clone();
        let stack = match p.is_stack() {
            Ok(r) if r.holds => Ok(()),
            Ok(r) => Err(r.witness.unwrap_or_else(|| "descent fails".into())),
            Err(e) => Err(e.to_string()),
        };
        self.record("stack condition of gerbe", name, stack, |_, _| {});
        let gerbe = match p.gerbe_failure() {
            Ok(None) => Ok(()),
            Ok(Some(w)) => Err(w),
            Err(e) => Err(e.to_string()),
        };
        self.record("gerbe axioms of", name, gerbe, |_, _| {});
    }

    fn check_problem(&self, p: &RawProblem) -> Res<()> {
        match p {
            RawProblem::Cohomology { sheaf, degree, cover, .. } => {
                let s = self.sheaf(sheaf)?;
                if let Some(c) = cover {
                    self.build_cover(c, self.space.whole())?;
                }
                if *degree > 2 {
                    return Err(format!("degree {} is not supported", degree));
                }
                if *degree == 2 && !s.is_abelian() {
                    return Err(format!("sheaf `{}` is not abelian", sheaf));
                }
                Ok(())
            }
            RawProblem::LiftIsomorphism { extension, i, j, h, .. } => {
                let e = self.extension(extension)?;
                let (i, j) = (resolve_object(e.total(), i)?, resolve_object(e.total(), j)?);
                let (fi, fj) = (e.proj().apply_object(&i), e.proj().apply_object(&j));
                resolve_morphism(e.base(), &fi, &fj, h).map(|_| ())
            }
            RawProblem::LiftObject { extension, j, .. } => resolve_object(self.extension(extension)?.base(), j).map(|_| ()),
            RawProblem::Connect { filtration, i, j, .. } => {
                let f = self.filtration(filtration)?;
                resolve_object(f.gerbe().ambient(), i)?;
                resolve_object(f.gerbe().ambient(), j).map(|_| ())
            }
            RawProblem::GlueObject { filtration, .. } | RawProblem::Acyclic { filtration, .. } => self.filtration(filtration).map(|_| ()),
        }
    }
}

fn explicit_groupoid(raw: &RawGroupoid, at: &str) -> Res<FiniteGroupoid> {
    let obj_ix =
        |l: &str| raw.objects.iter().position(|o| o == l).map(|i| i as u32).ok_or_else(|| format!("unknown object `{}` at `{}`", l, at));
    let mut mors = Vec::with_capacity(raw.morphisms.len());
    let mut by_label: HashMap<&str, u32> = HashMap::new();
    for (k, (s, t, l)) in raw.morphisms.iter().enumerate() {
        if by_label.insert(l.as_str(), k as u32).is_some() {
            return Err(format!("morphism label `{}` repeats at `{}`", l, at));
        }
        mors.push((obj_ix(s)?, obj_ix(t)?, l.clone()));
    }
    let mut table: HashMap<(u32, u32), u32> = HashMap::new();
    for (g, f, gf) in &raw.compose {
        let ix = |l: &str| by_label.get(l).copied().ok_or_else(|| format!("unknown morphism `{}` at `{}`", l, at));
        table.insert((ix(g)?, ix(f)?), ix(gf)?);
    }
    for (g, (gs, _, gl)) in mors.iter().enumerate() {
        for (f, (_, ft, fl)) in mors.iter().enumerate() {
            if gs == ft && !table.contains_key(&(g as u32, f as u32)) {
                return Err(format!("missing composite {} ∘ {} at `{}`", gl, fl, at));
            }
        }
    }
    core(FiniteGroupoid::new(raw.objects.clone(), mors, |g, f| table[&(g, f)]))
}

/// A cover of the whole space from lists of point names.
pub fn cover_from_names(space: &FiniteSpace, parts: &[Vec<String>]) -> Result<Cover, CliError> {
    let opens = parts.iter().map(|p| space.open_hull_of_names(p)).collect::<gerbex_core::Result<Vec<_>>>()?;
    Ok(Cover::new(space.whole(), opens)?)
}

/// A global object of `p` from its description.
pub fn resolve_object(p: &PrestackGroupoid, raw: &RawObject) -> Res<LocalObject> {
    let sp = p.space().clone();
    let whole = sp.whole();
    match raw {
        RawObject::Rep { rep } => {
            let reps = core(p.object_reps(whole))?;
            reps.get(*rep).cloned().ok_or_else(|| format!("representative {} out of range ({} classes)", rep, reps.len()))
        }
        RawObject::Explicit { objects, phi } => {
            if let Some(k) = objects.keys().find(|k| sp.point(k).is_err()) {
                return Err(format!("unknown point `{}`", k));
            }
            let obj = (0..sp.len())
                .map(|x| {
                    let l = objects.get(sp.name(x)).ok_or_else(|| format!("no object at `{}`", sp.name(x)))?;
                    p.stalk(x).object(l).ok_or_else(|| format!("unknown object `{}` at `{}`", l, sp.name(x)))
                })
                .collect::<Res<Vec<_>>>()?;
            let mut hasse = HashMap::new();
            for &(x, y) in sp.hasse() {
                let g = p.stalk(y);
                let src = p.diagram().res(x, y).obj[obj[x] as usize];
                let key = format!("{}<{}", sp.name(x), sp.name(y));
                let m = match phi.get(&key) {
                    Some(l) => g.morphism(src, obj[y], l).ok_or_else(|| format!("no morphism `{}` for `{}`", l, key))?,
                    None if src == obj[y] => g.identity(src),
                    None => return Err(format!("missing φ for `{}`", key)),
                };
                hasse.insert((x, y), m);
            }
            if let Some(k) = phi.keys().find(|k| relation(&sp, k).map(|(x, y)| !sp.hasse().contains(&(x, y))).unwrap_or(true)) {
                return Err(format!("`{}` is not a covering relation", k));
            }
            core(p.object_from_hasse(whole, obj, &hasse))
        }
    }
}

/// A global morphism `i → j` of `p` from its description.
pub fn resolve_morphism(p: &PrestackGroupoid, i: &LocalObject, j: &LocalObject, raw: &RawMorphism) -> Res<LocalMorphism> {
    match raw {
        RawMorphism::Index { index } => {
            let homs = core(p.homs(i, j))?;
            homs.get(*index).cloned().ok_or_else(|| format!("morphism index {} out of range ({} morphisms)", index, homs.len()))
        }
        RawMorphism::Components { components } => {
            let sp = p.space().clone();
            let comps = (0..sp.len())
                .map(|x| {
                    let l = components.get(sp.name(x)).ok_or_else(|| format!("no component at `{}`", sp.name(x)))?;
                    p.stalk(x).morphism(i.obj(x), j.obj(x), l).ok_or_else(|| format!("no morphism `{}` at `{}`", l, sp.name(x)))
                })
                .collect::<Res<Vec<_>>>()?;
            core(p.morphism_from_comps(i, j, comps))
        }
    }
}

/// A class representative as `{"cover": [...], "cochain": {...}}`.
pub fn class_json(space: &FiniteSpace, class: &CohClass) -> gerbex_core::Result<Value> {
    let c = class.representative();
    Ok(serde_json::json!({
        "trivial": class.is_trivial()?,
        "representative": cochain_json(space, c)?,
    }))
}

pub fn cochain_json(space: &FiniteSpace, c: &Cochain) -> gerbex_core::Result<Value> {
    let cover: Vec<Value> = c.cover().parts().iter().map(|u| Value::from(space.names_of(*u))).collect();
    let mut values = Map::new();
    for (k, v) in c.labels()? {
        values.insert(k, Value::from(v));
    }
    Ok(serde_json::json!({ "degree": c.degree(), "cover": cover, "cochain": values }))
}

pub fn object_json(p: &PrestackGroupoid, i: &LocalObject) -> Value {
    let sp = p.space();
    let mut objects = Map::new();
    for x in i.open().points() {
        objects.insert(sp.name(x).to_string(), Value::from(p.stalk(x).obj_label(i.obj(x))));
    }
    let mut phi = Map::new();
    for &(x, y) in sp.hasse() {
        if i.open().contains(x) && i.open().contains(y) {
            phi.insert(format!("{}<{}", sp.name(x), sp.name(y)), Value::from(p.stalk(y).label(i.phi(x, y))));
        }
    }
    serde_json::json!({ "objects": objects, "phi": phi })
}

pub fn morphism_json(p: &PrestackGroupoid, f: &LocalMorphism) -> Value {
    let sp = p.space();
    let mut comps = Map::new();
    for x in f.open().points() {
        comps.insert(sp.name(x).to_string(), Value::from(p.stalk(x).label(f.at(x))));
    }
    Value::Object(comps)
}
