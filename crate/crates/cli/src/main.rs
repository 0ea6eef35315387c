//! `gerbex`: load a scenario file, run checks and computations, report.

mod scenario;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gerbex_core::cech::{cohomology_group, nonabelian_h1, Backend};
use gerbex_core::gerbe::{GerbeMorphism, LocalObject};
use gerbex_core::obstruction::{lift_isomorphism, lift_object, Axes, Chooser, Lift1, Lift2, LiftProblem1};
use gerbex_core::pronilpotent::{
    check_acyclic_open, check_acyclic_open_gerbe, completeness_check, connect, glue_object, Connect, FilteredGerbe, Glue,
};
use gerbex_core::space::{minimal_open_cover, point_cover};
use serde_json::{json, Value};

use scenario::{class_json, cochain_json, morphism_json, object_json, resolve_morphism, resolve_object, Filtration, RawProblem, Resolved};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read `{0}`: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("parse error at line {}, column {}: {0}", .0.line(), .0.column())]
    Parse(serde_json::Error),
    #[error("unsupported schema {0}, expected {}", scenario::SCHEMA)]
    Schema(u32),
    #[error("{0}")]
    Resolve(String),
    #[error("{0}")]
    Core(#[from] gerbex_core::Error),
    #[error("no problem named `{0}` for this command")]
    UnknownProblem(String),
    #[error("scenario failed {0} structural check(s); run `gerbex validate` for details")]
    Invalid(usize),
}

#[derive(Parser)]
#[command(name = "gerbex", version, about = "Gerbes and central extensions over finite spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario file (JSON, schema 1).
    file: PathBuf,
    /// Run only the named problem.
    #[arg(long)]
    problem: Option<String>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Seed for randomized choices; canonical choices when absent.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every structural check in the scenario.
    Validate(Common),
    /// Čech cohomology of the scenario's sheaves.
    Cohomology(Common),
    /// Obstruction classes and lifts along central extensions.
    Obstruct(Common),
    /// Successive approximation along central filtrations.
    Pronil {
        #[command(flatten)]
        common: Common,
        /// Truncate every filtration at this depth.
        #[arg(long)]
        pmax: Option<usize>,
    },
}

const LIFTED: u8 = 0;
const OBSTRUCTED: u8 = 2;
const UNDEFINED: u8 = 3;

/// One problem's result: JSON, text lines and exit code.
struct Outcome {
    json: Value,
    text: Vec<String>,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let (name, common, pmax) = match &cli.command {
        Command::Validate(c) => ("validate", c, None),
        Command::Cohomology(c) => ("cohomology", c, None),
        Command::Obstruct(c) => ("obstruct", c, None),
        Command::Pronil { common, pmax } => ("pronil", common, *pmax),
    };
    let text = std::fs::read_to_string(&common.file).map_err(|e| CliError::Io(common.file.clone(), e))?;
    let sc = scenario::load(&text, name == "validate")?;
    if name == "validate" {
        return validate(&sc, common.json);
    }
    let failed = sc.failures().count();
    if failed > 0 {
        for c in sc.failures() {
            eprintln!("{}: {}", c.name, c.witness.as_deref().unwrap_or(""));
        }
        return Err(CliError::Invalid(failed));
    }
    let r = &sc.resolved;
    let seed = common.seed.or(r.options.seed);
    let chooser = || match seed {
        Some(s) => Chooser::random(s, Axes::ALL),
        None => Chooser::canonical(),
    };
    let wanted = |p: &RawProblem| match name {
        "cohomology" => matches!(p, RawProblem::Cohomology { .. }),
        "obstruct" => matches!(p, RawProblem::LiftIsomorphism { .. } | RawProblem::LiftObject { .. }),
        _ => matches!(p, RawProblem::Connect { .. } | RawProblem::GlueObject { .. } | RawProblem::Acyclic { .. }),
    };
    let problems: Vec<&RawProblem> =
        r.problems.iter().filter(|p| wanted(p) && common.problem.as_deref().is_none_or(|n| n == p.name())).collect();
    if let Some(n) = &common.problem {
        if problems.is_empty() {
            return Err(CliError::UnknownProblem(n.clone()));
        }
    }
    let mut outcomes = Vec::new();
    for p in problems {
        let o = match name {
            "cohomology" => cohomology(r, p)?,
            "obstruct" => obstruct(r, p, &mut chooser())?,
            _ => pronil(r, p, pmax)?,
        };
        outcomes.push(o);
    }
    let code = outcomes.iter().map(|o| o.code).max().unwrap_or(0);
    let mut out = String::new();
    if common.json {
        let results: Vec<Value> = outcomes.into_iter().map(|o| o.json).collect();
        let doc = json!({ "command": name, "seed": seed, "results": results });
        out = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
    } else {
        for o in outcomes {
            for line in o.text {
                let _ = writeln!(out, "{}", line);
            }
        }
    }
    emit(&out)?;
    Ok(code)
}

/// Writes to stdout; a reader that went away early is not an error.
fn emit(out: &str) -> Result<(), CliError> {
    match std::io::stdout().lock().write_all(out.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(PathBuf::from("<stdout>"), e)),
        _ => Ok(()),
    }
}

fn validate(sc: &scenario::Scenario, as_json: bool) -> Result<u8, CliError> {
    let ok = sc.failures().next().is_none();
    let mut out = String::new();
    if as_json {
        let checks: Vec<Value> = sc.checks.iter().map(|c| json!({ "check": c.name, "ok": c.ok, "witness": c.witness })).collect();
        let doc = json!({ "command": "validate", "ok": ok, "checks": checks });
        out = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
    } else {
        for c in &sc.checks {
            let _ = match &c.witness {
                None => writeln!(out, "pass  {}", c.name),
                Some(w) => writeln!(out, "FAIL  {}: {}", c.name, w),
            };
        }
        let _ = writeln!(out, "{} checks, {} failed", sc.checks.len(), sc.failures().count());
    }
    emit(&out)?;
    Ok(if ok { 0 } else { 1 })
}

fn cohomology(r: &Resolved, p: &RawProblem) -> Result<Outcome, CliError> {
    let RawProblem::Cohomology { name, sheaf, degree, cover } = p else { unreachable!() };
    let s = &r.sheaves[sheaf];
    let sp = r.space.clone();
    let whole = sp.whole();
    // Minimal opens carry no nontrivial torsors, so degrees up to one are
    // computed on the minimal-open cover; degree two uses the point cover,
    // which refines every cover.
    let cover = match cover {
        Some(parts) => scenario::cover_from_names(&sp, parts)?,
        None if *degree <= 1 => minimal_open_cover(&sp, whole)?,
        None => point_cover(&sp, whole)?,
    };
    let cover_list = |c: &gerbex_core::space::Cover| -> Value { c.parts().iter().map(|u| Value::from(sp.names_of(*u))).collect() };
    if !s.is_abelian() {
        let (size, reps) = if *degree == 0 {
            (s.sections(whole)?.len(), Vec::new())
        } else {
            let h1 = nonabelian_h1(s, &cover)?;
            let reps = h1.representatives.iter().map(|&k| cochain_json(&sp, &h1.cocycles[k])).collect::<Result<Vec<_>, _>>()?;
            (h1.len(), reps)
        };
        let text = vec![format!("problem `{}`: Ȟ^{}({}) is a pointed set of size {}", name, degree, sheaf, size)];
        let json = json!({
            "problem": name, "kind": "cohomology", "sheaf": sheaf, "degree": degree, "abelian": false,
            "cover": cover_list(&cover), "size": size, "representatives": reps,
        });
        return Ok(Outcome { json, text, code: 0 });
    }
    let h = cohomology_group(s, &cover, *degree, Backend::Snf)?;
    let gens = h.generators.iter().map(|g| cochain_json(&sp, g)).collect::<Result<Vec<_>, _>>()?;
    let mut text = vec![format!("problem `{}`: Ȟ^{}({}) = {}", name, degree, sheaf, h.describe())];
    let mut per_cover = Vec::new();
    for c in &r.covers {
        let hc = cohomology_group(s, c, *degree, Backend::Snf)?;
        text.push(format!("  on {}: {}", sp_cover(&sp, c), hc.describe()));
        per_cover.push(json!({ "cover": cover_list(c), "invariant_factors": hc.invariant_factors }));
    }
    for g in &h.generators {
        text.push(format!("  generator: {}", cochain_text(&sp, g)?));
    }
    let json = json!({
        "problem": name, "kind": "cohomology", "sheaf": sheaf, "degree": degree, "abelian": true,
        "cover": cover_list(&cover), "invariant_factors": h.invariant_factors, "group": h.describe(),
        "generators": gens, "declared_covers": per_cover,
    });
    Ok(Outcome { json, text, code: 0 })
}

fn sp_cover(sp: &gerbex_core::space::FiniteSpace, c: &gerbex_core::space::Cover) -> String {
    let parts: Vec<String> = c.parts().iter().map(|u| sp.describe(*u)).collect();
    format!("[{}]", parts.join(", "))
}

fn cochain_text(sp: &gerbex_core::space::FiniteSpace, c: &gerbex_core::cech::Cochain) -> Result<String, CliError> {
    let id = |t: &[usize]| c.sheaf().sections(c.face(t)).map(|s| s.id() == c.value(t)).unwrap_or(true);
    let entries: Vec<String> =
        c.tuples().iter().zip(c.labels()?).filter(|(t, _)| !id(t)).map(|(_, (k, v))| format!("({})↦{}", k, v)).collect();
    let body = if entries.is_empty() { "identity".to_string() } else { entries.join(" ") };
    Ok(format!("{} on {}", body, sp_cover(sp, c.cover())))
}

fn result_json(name: &str, kind: &str, verdict: &str, class: Value, lift: Value, reason: Option<&str>) -> Value {
    json!({
        "problem": name, "kind": kind, "verdict": verdict,
        "class": class, "lift": lift, "undefined_reason": reason,
    })
}

fn obstruct(r: &Resolved, p: &RawProblem, ch: &mut Chooser) -> Result<Outcome, CliError> {
    let sp = r.space.clone();
    let res = |e: String| CliError::Resolve(e);
    match p {
        RawProblem::LiftIsomorphism { name, extension, i, j, h } => {
            let ext = &r.extensions[extension];
            let i = resolve_object(ext.total(), i).map_err(res)?;
            let j = resolve_object(ext.total(), j).map_err(res)?;
            let (fi, fj) = (ext.proj().apply_object(&i), ext.proj().apply_object(&j));
            let h = resolve_morphism(ext.base(), &fi, &fj, h).map_err(res)?;
            let problem = LiftProblem1 { i, j, h };
            let head = format!("problem `{}` (lift_isomorphism):", name);
            match lift_isomorphism(ext, &problem, ch) {
                Ok(Lift1::Lifted { g, class }) => Ok(Outcome {
                    text: vec![
                        format!("{} LIFTED", head),
                        "  isomorphism lifting criterion: cl¹ trivial, lift glued".into(),
                        format!("  class: {}", cochain_text(&sp, class.representative())?),
                        format!("  lift: {}", morphism_json(ext.total(), &g)),
                    ],
                    json: result_json(
                        name,
                        "lift_isomorphism",
                        "LIFTED",
                        class_json(&sp, &class)?,
                        json!({ "morphism": morphism_json(ext.total(), &g) }),
                        None,
                    ),
                    code: LIFTED,
                }),
                Ok(Lift1::Obstructed { class }) => Ok(Outcome {
                    text: vec![
                        format!("{} OBSTRUCTED", head),
                        "  isomorphism lifting criterion: cl¹ nontrivial, no lift exists".into(),
                        format!("  class: {}", cochain_text(&sp, class.representative())?),
                    ],
                    json: result_json(name, "lift_isomorphism", "OBSTRUCTED", class_json(&sp, &class)?, Value::Null, None),
                    code: OBSTRUCTED,
                }),
                Err(gerbex_core::Error::NoLiftingCover) => {
                    let reason = "no cover of the family admits local lifts of h";
                    Ok(Outcome {
                        text: vec![format!("{} UNDEFINED", head), format!("  reason: {}", reason)],
                        json: result_json(name, "lift_isomorphism", "UNDEFINED", Value::Null, Value::Null, Some(reason)),
                        code: UNDEFINED,
                    })
                }
                Err(e) => Err(e.into()),
            }
        }
        RawProblem::LiftObject { name, extension, j } => {
            let ext = &r.extensions[extension];
            let j = resolve_object(ext.base(), j).map_err(res)?;
            let head = format!("problem `{}` (lift_object):", name);
            match lift_object(ext, &j, ch)? {
                Lift2::Lifted { i, e, class } => Ok(Outcome {
                    text: vec![
                        format!("{} LIFTED", head),
                        "  object lifting criterion: cl² trivial, lift glued".into(),
                        format!("  class: {}", cochain_text(&sp, class.representative())?),
                        format!("  object: {}", object_json(ext.total(), &i)),
                        format!("  iso j → F(i): {}", morphism_json(ext.base(), &e)),
                    ],
                    json: result_json(
                        name,
                        "lift_object",
                        "LIFTED",
                        class_json(&sp, &class)?,
                        json!({ "object": object_json(ext.total(), &i), "iso": morphism_json(ext.base(), &e) }),
                        None,
                    ),
                    code: LIFTED,
                }),
                Lift2::Obstructed { class } => Ok(Outcome {
                    text: vec![
                        format!("{} OBSTRUCTED", head),
                        "  object lifting criterion: cl² nontrivial, no lift exists".into(),
                        format!("  class: {}", cochain_text(&sp, class.representative())?),
                    ],
                    json: result_json(name, "lift_object", "OBSTRUCTED", class_json(&sp, &class)?, Value::Null, None),
                    code: OBSTRUCTED,
                }),
                Lift2::Undefined { reason } => Ok(Outcome {
                    text: vec![
                        format!("{} UNDEFINED", head),
                        "  object lifting criterion: cl² undefined on every cover of the family".into(),
                        format!("  reason: {}", reason),
                    ],
                    json: result_json(name, "lift_object", "UNDEFINED", Value::Null, Value::Null, Some(&reason)),
                    code: UNDEFINED,
                }),
            }
        }
        _ => unreachable!(),
    }
}

/// The filtration to run on, truncated when asked, with the map carrying
/// ambient objects into it.
fn effective(f: &Filtration, pmax: Option<usize>) -> Result<(FilteredGerbe, Option<GerbeMorphism>), CliError> {
    let fg = f.gerbe();
    match pmax {
        Some(k) if k < fg.p_max() => {
            let (t, proj) = fg.truncate(k)?;
            Ok((t, Some(proj)))
        }
        _ => Ok((fg.clone(), None)),
    }
}

fn pronil(r: &Resolved, p: &RawProblem, pmax: Option<usize>) -> Result<Outcome, CliError> {
    let sp = r.space.clone();
    let whole = sp.whole();
    let res = |e: String| CliError::Resolve(e);
    match p {
        RawProblem::Connect { name, filtration, i, j } => {
            let f = &r.filtrations[filtration];
            let amb = f.gerbe().ambient();
            let (i, j) = (resolve_object(amb, i).map_err(res)?, resolve_object(amb, j).map_err(res)?);
            let (fg, proj) = effective(f, pmax)?;
            let carry = |o: &LocalObject| proj.as_ref().map_or_else(|| o.clone(), |m| m.apply_object(o));
            let head = format!("problem `{}` (connect, p_max = {}):", name, fg.p_max());
            match connect(&fg, whole, &carry(&i), &carry(&j))? {
                Connect::Connected(m) => Ok(Outcome {
                    text: vec![
                        format!("{} CONNECTED", head),
                        "  connectivity by successive approximation: every layer class vanished".into(),
                        format!("  morphism: {}", morphism_json(fg.ambient(), &m)),
                    ],
                    json: json!({
                        "problem": name, "kind": "connect", "p_max": fg.p_max(), "verdict": "CONNECTED",
                        "morphism": morphism_json(fg.ambient(), &m), "layer": null, "reason": null,
                    }),
                    code: LIFTED,
                }),
                Connect::LayerObstructed { layer, reason } => Ok(Outcome {
                    text: vec![format!("{} LAYER_OBSTRUCTED at layer {}", head, layer), format!("  reason: {}", reason)],
                    json: json!({
                        "problem": name, "kind": "connect", "p_max": fg.p_max(), "verdict": "LAYER_OBSTRUCTED",
                        "morphism": null, "layer": layer, "reason": reason,
                    }),
                    code: OBSTRUCTED,
                }),
            }
        }
        RawProblem::GlueObject { name, filtration } => {
            let (fg, _) = effective(&r.filtrations[filtration], pmax)?;
            let head = format!("problem `{}` (glue_object, p_max = {}):", name, fg.p_max());
            let (verdict, object, layer, reason, code) = match glue_object(&fg, whole)? {
                Glue::Glued(i) => ("GLUED", object_json(fg.ambient(), &i), None, None, LIFTED),
                Glue::LayerObstructed { layer, reason } => ("LAYER_OBSTRUCTED", Value::Null, Some(layer), Some(reason), OBSTRUCTED),
                Glue::NotLocallyNonempty(reason) => ("NOT_LOCALLY_NONEMPTY", Value::Null, None, Some(reason), UNDEFINED),
            };
            let mut text = vec![match layer {
                Some(l) => format!("{} {} at layer {}", head, verdict, l),
                None => format!("{} {}", head, verdict),
            }];
            if verdict == "GLUED" {
                text.push("  nonemptiness by successive approximation: every layer class vanished".into());
                text.push(format!("  object: {}", object));
            }
            if let Some(r) = &reason {
                text.push(format!("  reason: {}", r));
            }
            Ok(Outcome {
                json: json!({
                    "problem": name, "kind": "glue_object", "p_max": fg.p_max(), "verdict": verdict,
                    "object": object, "layer": layer, "reason": reason,
                }),
                text,
                code,
            })
        }
        RawProblem::Acyclic { name, filtration } => {
            let f = &r.filtrations[filtration];
            let (report, complete) = match (f, pmax) {
                (Filtration::Sheaf(s, _), None) => (check_acyclic_open(s, whole)?, Some(completeness_check(s, whole)?)),
                (Filtration::Sheaf(s, _), Some(k)) if k >= s.p_max() => {
                    (check_acyclic_open(s, whole)?, Some(completeness_check(s, whole)?))
                }
                (Filtration::Sheaf(s, _), Some(k)) => {
                    let t = s.truncate(k)?;
                    (check_acyclic_open(&t, whole)?, Some(completeness_check(&t, whole)?))
                }
                (Filtration::Gerbe(_), _) => (check_acyclic_open_gerbe(&effective(f, pmax)?.0, whole)?, None),
            };
            let verdict = if report.holds() { "ACYCLIC" } else { "NOT_ACYCLIC" };
            let mut text = vec![format!("problem `{}` (acyclic): {}", name, verdict)];
            for l in &report.cohomology_failures {
                text.push(format!("  layer {} has nontrivial Ȟ¹ or Ȟ² over the whole space", l));
            }
            for (a, b) in &report.surjectivity_failures {
                text.push(format!("  Γ(N_{}) → Γ(N_{}/N_{}) is not surjective", a, a, b));
            }
            if let Some(c) = &complete {
                text.push(format!("  complete: {}", c.holds));
                if let Some(w) = &c.witness {
                    text.push(format!("  witness: {}", w));
                }
            }
            let surj: Vec<Value> = report.surjectivity_failures.iter().map(|(a, b)| json!([a, b])).collect();
            Ok(Outcome {
                json: json!({
                    "problem": name, "kind": "acyclic", "verdict": verdict,
                    "cohomology_failures": report.cohomology_failures, "surjectivity_failures": surj,
                    "complete": complete.as_ref().map(|c| c.holds),
                    "completeness_witness": complete.and_then(|c| c.witness),
                }),
                text,
                code: 0,
            })
        }
        _ => unreachable!(),
    }
}
