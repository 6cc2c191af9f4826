//! The `lamcone` command-line driver.
//!
//! Exit codes: 0 on success, 1 when the analysis reports a finding, an
//! infeasible problem or an invalid object, 2 on usage and parse errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::chi::{closed_chi_audit, find_integer_multiple, ChiFunctional};
use crate::cones::{build_cone, ConeRepr, ConeSource};
use crate::dynamics::{
    self, is_irreducible, pinch, split_at_cusp, strand_model, trace_separatrix, Direction,
    Irreducibility, TraceOutcome,
};
use crate::maxchi::{
    audit_structure_seeded, close_under_sums, profile, x_family, Family, XValue,
    DEFAULT_AUDIT_SEED,
};
use crate::model::{scalloped_summary, BranchEquation, BranchedSurfacePresentation, CuspId, TrainTrack, WeightVector};
use crate::parser::{
    document_to_json, parse_document, serialize_document, Document, NamedWeights, ParseErrorKind,
    WeightTarget,
};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(
    name = "lamcone",
    version,
    about = "Weight cones, maximal Euler characteristic and prelamination dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Common {
    /// A `.lam` document.
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Append the elapsed computation time.
    #[arg(long)]
    timed: bool,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct ConeTarget {
    #[arg(long)]
    track: Option<String>,
    #[arg(long)]
    surface: Option<String>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct FamilyTarget {
    #[arg(long)]
    family: Option<String>,
    /// A single presentation, treated as a one-member family.
    #[arg(long)]
    surface: Option<String>,
}

#[derive(Args, Debug)]
struct Measured {
    #[arg(long)]
    track: String,
    #[arg(long)]
    weights: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    Forward,
    Backward,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check every object in a document.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Equations and an interior point of a weight cone.
    Cone {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: ConeTarget,
    },
    /// Vertices of the weight cell `sum w = 1`.
    Vertices {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: ConeTarget,
    },
    /// Euler characteristic functional; with weights, its value or an integral multiple.
    Chi {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        surface: String,
        /// Weights on the surface (evaluate) or on its boundary track (integral multiple).
        #[arg(long)]
        weights: Option<String>,
    },
    /// Maximal Euler characteristic over a family.
    Maxchi {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: FamilyTarget,
        #[arg(long)]
        weights: String,
        /// Close the family under sums first.
        #[arg(long)]
        closed: bool,
    },
    /// Piecewise-linear restriction of X to a segment of weights.
    Profile {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: FamilyTarget,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        closed: bool,
    },
    /// Homogeneity, concavity and superadditivity probes of X.
    Audit {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: FamilyTarget,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_AUDIT_SEED)]
        seed: u64,
        #[arg(long)]
        closed: bool,
        /// Findings listed in text output.
        #[arg(long, default_value_t = 10)]
        max_findings: usize,
    },
    /// Trace one separatrix, or decide irreducibility when no cusp is given.
    Trace {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        measured: Measured,
        #[arg(long, value_parser = parse_cusp)]
        cusp: Option<CuspId>,
        #[arg(long, value_enum)]
        direction: Option<DirectionArg>,
        /// Defaults to LAMCONE_MAX_STEPS, then 1000000.
        #[arg(long)]
        max_steps: Option<u64>,
    },
    /// Leaves of an integer-weighted prelamination.
    Components {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        measured: Measured,
    },
    /// Split at a cusp and print the resulting track and weights.
    Split {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        measured: Measured,
        #[arg(long, value_parser = parse_cusp)]
        cusp: CuspId,
        /// Pinch back and confirm the original is restored.
        #[arg(long)]
        check: bool,
    },
    /// Canonical text or JSON form of a document.
    Export {
        #[command(flatten)]
        common: Common,
    },
}

fn parse_cusp(s: &str) -> Result<CuspId, String> {
    s.parse()
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Validate { common }
            | Command::Cone { common, .. }
            | Command::Vertices { common, .. }
            | Command::Chi { common, .. }
            | Command::Maxchi { common, .. }
            | Command::Profile { common, .. }
            | Command::Audit { common, .. }
            | Command::Trace { common, .. }
            | Command::Components { common, .. }
            | Command::Split { common, .. }
            | Command::Export { common } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Cone { .. } => "cone",
            Command::Vertices { .. } => "vertices",
            Command::Chi { .. } => "chi",
            Command::Maxchi { .. } => "maxchi",
            Command::Profile { .. } => "profile",
            Command::Audit { .. } => "audit",
            Command::Trace { .. } => "trace",
            Command::Components { .. } => "components",
            Command::Split { .. } => "split",
            Command::Export { .. } => "export",
        }
    }
}

/// A rendered result in every format the command supports.
struct Report {
    code: i32,
    text: String,
    json: Value,
    csv: Option<String>,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report {
            code: 0,
            text,
            json,
            csv: None,
        }
    }

    fn finding(text: String, json: Value) -> Self {
        Report {
            code: 1,
            text,
            json,
            csv: None,
        }
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    fn failed(code: i32, message: String) -> Self {
        Report::finding(format!("error: {message}"), json!({ "error": message }))
            .with_code(code)
    }

    fn with_code(mut self, code: i32) -> Self {
        self.code = code;
        self
    }
}

struct Usage(String);

type CmdResult = Result<Report, Usage>;

fn usage_error(program_msg: String) -> Outcome {
    Outcome {
        code: 2,
        stdout: String::new(),
        stderr: format!("error: {program_msg}\n"),
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: rendered,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: rendered,
                }
            };
        }
    };
    let cmd = cli.command;
    let common = cmd.common();
    let text = match std::fs::read_to_string(&common.file) {
        Ok(t) => t,
        Err(e) => return usage_error(format!("cannot read {}: {e}", common.file.display())),
    };
    let start = Instant::now();
    let report = match load(&common.file, &text) {
        Ok(doc) => match dispatch(&cmd, &doc) {
            Ok(r) => r,
            Err(Usage(msg)) => return usage_error(msg),
        },
        Err(Loaded::Usage(msg)) => return usage_error(msg),
        Err(Loaded::Invalid(r)) => r,
    };
    let elapsed = start.elapsed();
    let stdout = match render(&cmd, report.text, report.json, report.csv, common, elapsed) {
        Ok(s) => s,
        Err(Usage(msg)) => return usage_error(msg),
    };
    Outcome {
        code: report.code,
        stdout,
        stderr: String::new(),
    }
}

fn render(
    cmd: &Command,
    text: String,
    json: Value,
    csv: Option<String>,
    common: &Common,
    elapsed: std::time::Duration,
) -> Result<String, Usage> {
    let ms = elapsed.as_secs_f64() * 1e3;
    Ok(match common.format {
        Format::Text => {
            let mut out = text;
            if !out.is_empty() && !out.ends_with('\n') {
                out.push('\n');
            }
            if common.timed {
                let _ = writeln!(out, "elapsed: {ms:.3} ms");
            }
            out
        }
        Format::Json => {
            let mut obj = match json {
                Value::Object(m) => m,
                other => {
                    let mut m = serde_json::Map::new();
                    m.insert("result".into(), other);
                    m
                }
            };
            obj.insert("schema".into(), json!(1));
            obj.insert("command".into(), json!(cmd.name()));
            if common.timed {
                obj.insert("elapsed_ms".into(), json!(ms));
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("json");
            s.push('\n');
            s
        }
        Format::Csv => {
            let Some(mut out) = csv else {
                return Err(Usage(format!("`{}` has no csv output", cmd.name())));
            };
            if common.timed {
                let _ = writeln!(out, "# elapsed: {ms:.3} ms");
            }
            out
        }
    })
}

enum Loaded {
    Usage(String),
    Invalid(Report),
}

fn load(path: &Path, text: &str) -> Result<Document, Loaded> {
    parse_document(text).map_err(|e| {
        if e.kind != ParseErrorKind::Validation {
            return Loaded::Usage(format!("{}:{e}", path.display()));
        }
        let mut out = format!("{}:{}:{}: validation failed", path.display(), e.line, e.col);
        for r in &e.reports {
            let _ = write!(out, "\n{r}");
        }
        Loaded::Invalid(Report::finding(
            out,
            json!({
                "valid": false,
                "line": e.line,
                "col": e.col,
                "reports": e.reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            }),
        ))
    })
}

fn track<'a>(doc: &'a Document, name: &str) -> Result<&'a Arc<TrainTrack>, Usage> {
    doc.track(name)
        .ok_or_else(|| Usage(format!("no track named `{name}`")))
}

fn surface<'a>(doc: &'a Document, name: &str) -> Result<&'a Arc<BranchedSurfacePresentation>, Usage> {
    doc.presentation(name)
        .ok_or_else(|| Usage(format!("no surface named `{name}`")))
}

fn weights<'a>(doc: &'a Document, name: &str) -> Result<&'a NamedWeights, Usage> {
    doc.weights(name)
        .ok_or_else(|| Usage(format!("no weights named `{name}`")))
}

fn track_weights<'a>(doc: &'a Document, name: &str, track: &TrainTrack) -> Result<&'a WeightVector, Usage> {
    let w = weights(doc, name)?;
    match &w.target {
        WeightTarget::Track(t) if *t == track.name => Ok(&w.vector),
        WeightTarget::Track(t) => Err(Usage(format!(
            "weights `{name}` are on track `{t}`, not `{}`",
            track.name
        ))),
        WeightTarget::Surface(s) => Err(Usage(format!("weights `{name}` are on surface `{s}`, not a track"))),
    }
}

fn family(doc: &Document, target: &FamilyTarget, closed: bool) -> Result<Family, Usage> {
    let fam = match (&target.family, &target.surface) {
        (Some(f), _) => doc
            .family(f)
            .ok_or_else(|| Usage(format!("no family named `{f}`")))?
            .map_err(|e| Usage(format!("family `{f}`: {e}")))?,
        (None, Some(s)) => {
            let bs = surface(doc, s)?;
            Family::new(s.clone(), vec![bs.clone()]).expect("one member")
        }
        (None, None) => unreachable!("clap requires a target"),
    };
    Ok(if closed { close_under_sums(&fam) } else { fam })
}

fn dispatch(cmd: &Command, doc: &Document) -> CmdResult {
    match cmd {
        Command::Validate { .. } => Ok(validate(doc)),
        Command::Cone { target, .. } => cone(doc, target),
        Command::Vertices { target, .. } => vertices(doc, target),
        Command::Chi { surface: s, weights: w, .. } => chi(doc, s, w.as_deref()),
        Command::Maxchi {
            target,
            weights: w,
            closed,
            ..
        } => maxchi(doc, target, w, *closed),
        Command::Profile {
            target,
            from,
            to,
            closed,
            ..
        } => profile_cmd(doc, target, from, to, *closed),
        Command::Audit {
            target,
            samples,
            seed,
            closed,
            max_findings,
            ..
        } => {
            let fam = family(doc, target, *closed)?;
            let report = audit_structure_seeded(&fam, *samples, *seed);
            let mut shown = report.clone();
            let hidden = shown.findings.len().saturating_sub(*max_findings);
            shown.findings.truncate(*max_findings);
            let mut text = shown.to_string();
            if hidden > 0 {
                let _ = write!(text, "\n  ... {hidden} more finding(s)");
            }
            let json = report.to_json();
            Ok(if report.is_clean() {
                Report::ok(text, json)
            } else {
                Report::finding(text, json)
            })
        }
        Command::Trace {
            measured,
            cusp,
            direction,
            max_steps,
            ..
        } => trace(doc, measured, cusp.as_ref(), *direction, *max_steps),
        Command::Components { measured, .. } => components(doc, measured),
        Command::Split {
            measured,
            cusp,
            check,
            ..
        } => split(doc, measured, cusp, *check),
        Command::Export { .. } => Ok(Report::ok(serialize_document(doc), document_to_json(doc))),
    }
}

fn validate(doc: &Document) -> Report {
    let mut lines = Vec::new();
    let mut objects = Vec::new();
    let mut bad = false;
    for t in &doc.tracks {
        let sc = scalloped_summary(t);
        lines.push(format!(
            "track {}: valid ({} segment(s), {} switch(es), {} cusp(s), scalloped index {})",
            t.name,
            t.segments.len(),
            t.switches.len(),
            t.total_cusps(),
            sc.index
        ));
        objects.push(json!({
            "kind": "track", "name": t.name, "valid": true,
            "cusps": t.total_cusps(), "scalloped_index": rational::to_json(&sc.index),
        }));
    }
    for b in &doc.presentations {
        let mut line = format!(
            "surface {}: valid ({} sector(s), {} branch equation(s))",
            b.name,
            b.sectors.len(),
            b.equations.len()
        );
        let mut obj = json!({"kind": "surface", "name": b.name, "valid": true});
        if b.aspherical {
            let audit = closed_chi_audit(b);
            if !audit.is_clean() {
                bad = true;
                let _ = write!(line, "\n  {}", audit.to_string().replace('\n', "\n  "));
            }
            obj["closed_chi_audit"] = audit.to_json();
        }
        lines.push(line);
        objects.push(obj);
    }
    for w in &doc.weights {
        let (kind, target, cone) = match &w.target {
            WeightTarget::Track(t) => ("track", t, ConeRepr::from_track(doc.track(t).expect("resolved"))),
            WeightTarget::Surface(s) => (
                "surface",
                s,
                ConeRepr::from_surface(doc.presentation(s).expect("resolved")),
            ),
        };
        let carried = cone.contains(&w.vector).expect("labels match");
        bad |= !carried;
        lines.push(format!(
            "weights {} on {kind} {target}: {}",
            w.name,
            if carried { "satisfy every equation" } else { "violate an equation" }
        ));
        objects.push(json!({"kind": "weights", "name": w.name, "valid": carried}));
    }
    for f in &doc.families {
        lines.push(format!("family {}: {} member(s) on {}", f.name, f.members.len(), f.track));
        objects.push(json!({"kind": "family", "name": f.name, "valid": true}));
    }
    if lines.is_empty() {
        lines.push("empty document".into());
    }
    let json = json!({"valid": !bad, "objects": objects});
    let text = lines.join("\n");
    if bad {
        Report::finding(text, json)
    } else {
        Report::ok(text, json)
    }
}

fn cone_of(doc: &Document, target: &ConeTarget) -> Result<(String, ConeRepr), Usage> {
    Ok(match (&target.track, &target.surface) {
        (Some(t), _) => (
            format!("track {t}"),
            build_cone(ConeSource::Track(track(doc, t)?)),
        ),
        (None, Some(s)) => (
            format!("surface {s}"),
            build_cone(ConeSource::Surface(surface(doc, s)?)),
        ),
        (None, None) => unreachable!("clap requires a target"),
    })
}

fn equation_text(labels: &[String], row: &[num_bigint::BigInt]) -> String {
    use num_traits::ToPrimitive;
    let terms = labels
        .iter()
        .zip(row)
        .filter(|(_, c)| !c.is_zero())
        .map(|(l, c)| (c.to_i64().expect("small coefficient"), l.clone()));
    BranchEquation::new(terms).to_string()
}

fn cone(doc: &Document, target: &ConeTarget) -> CmdResult {
    let (what, cone) = cone_of(doc, target)?;
    let mut text = format!("cone of {what} over ({})", cone.labels.join(", "));
    for row in &cone.equalities {
        let _ = write!(text, "\n  {}", equation_text(&cone.labels, row));
    }
    let _ = write!(text, "\nsolution dimension {}", cone.solution_dimension());
    let interior = cone.interior_point();
    match &interior {
        Some(p) => {
            let _ = write!(text, "\ninterior point {}", rational::fmt_tuple(p.values()));
        }
        None => text.push_str("\nzero cone"),
    }
    let mut json = cone.to_json();
    json["equations"] = cone
        .equalities
        .iter()
        .map(|r| json!(equation_text(&cone.labels, r)))
        .collect();
    json["interior_point"] = interior.map_or(Value::Null, |p| p.to_json());
    Ok(Report::ok(text, json))
}

fn vertices(doc: &Document, target: &ConeTarget) -> CmdResult {
    let (what, cone) = cone_of(doc, target)?;
    let cell = cone.cell_vertices();
    let mut text = format!(
        "cell vertices of {what} over ({}): {}",
        cell.labels.join(", "),
        cell.vertices.len()
    );
    let mut csv = cell.labels.join(",") + "\n";
    for v in &cell.vertices {
        let _ = write!(text, "\n  {}", rational::fmt_tuple(v));
        let row: Vec<String> = v.iter().map(|q| q.to_string()).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    Ok(Report::ok(text, cell.to_json()).with_csv(csv))
}

fn chi(doc: &Document, name: &str, w: Option<&str>) -> CmdResult {
    let bs = surface(doc, name)?;
    let f = ChiFunctional::of(bs);
    let Some(wname) = w else {
        let mut text = format!("chi_g on surface {name}");
        let mut csv = String::from("sector,chi,corners,chi_g\n");
        for (z, c) in bs.sectors.iter().zip(&f.coefficients) {
            let _ = write!(text, "\n  {}: chi={} corners={} chi_g={c}", z.id, z.euler_char, z.corners);
            let _ = writeln!(csv, "{},{},{},{c}", z.id, z.euler_char, z.corners);
        }
        let audit = closed_chi_audit(bs);
        let _ = write!(text, "\n{audit}");
        let json = json!({
            "surface": name,
            "labels": f.labels,
            "coefficients": rational::vec_to_json(&f.coefficients),
            "closed_chi_audit": audit.to_json(),
        });
        let r = if audit.is_clean() { Report::ok(text, json) } else { Report::finding(text, json) };
        return Ok(r.with_csv(csv));
    };
    let nw = weights(doc, wname)?;
    match &nw.target {
        WeightTarget::Surface(s) if s == name => {
            let value = f.eval(&nw.vector).expect("labels match");
            let carried = ConeRepr::from_surface(bs).contains(&nw.vector).expect("labels match");
            let mut text = format!("chi({name}({wname})) = {value}");
            if !carried {
                let _ = write!(text, "\n{wname} violates a branch equation of {name}");
            }
            let json = json!({"surface": name, "weights": wname, "chi": rational::to_json(&value), "carried": carried});
            Ok(if carried { Report::ok(text, json) } else { Report::finding(text, json) })
        }
        WeightTarget::Track(t) if *t == bs.boundary_track.name => {
            match find_integer_multiple(bs, &nw.vector).expect("labels match") {
                Some(m) => {
                    let text = format!(
                        "{name} carries {k}*{wname} integrally: k = {k}\n  v = {}\n  fiber point = {}",
                        m.v,
                        m.fiber_point,
                        k = m.k,
                    );
                    let json = json!({
                        "surface": name, "weights": wname, "k": m.k.to_string(),
                        "v": m.v.to_json(), "fiber_point": m.fiber_point.to_json(),
                    });
                    Ok(Report::ok(text, json))
                }
                None => Ok(Report::finding(
                    format!("{name} carries no lamination with boundary {wname}"),
                    json!({"surface": name, "weights": wname, "k": null}),
                )),
            }
        }
        _ => Err(Usage(format!(
            "weights `{wname}` are neither on surface `{name}` nor on its boundary track"
        ))),
    }
}

fn maxchi(doc: &Document, target: &FamilyTarget, wname: &str, closed: bool) -> CmdResult {
    let fam = family(doc, target, closed)?;
    let w = track_weights(doc, wname, fam.boundary_track())?;
    let res = x_family(&fam, w).expect("labels match");
    let mut text = format!("X({wname}) over {} = {}", fam.name, res.value);
    for wit in &res.witnesses {
        let _ = write!(text, "\nwitness {} v = {}", wit.presentation, wit.v);
        if wit.interior {
            text.push_str(" (positive optimum exists)");
        }
    }
    for u in &res.unbounded {
        let _ = write!(text, "\nchi is unbounded on {u}");
    }
    let mut json = res.to_json();
    json["family"] = json!(fam.name);
    json["weights"] = json!(wname);
    Ok(match res.value {
        XValue::Finite(_) => Report::ok(text, json),
        _ => Report::finding(text, json),
    })
}

fn profile_cmd(doc: &Document, target: &FamilyTarget, from: &str, to: &str, closed: bool) -> CmdResult {
    let fam = family(doc, target, closed)?;
    let w0 = track_weights(doc, from, fam.boundary_track())?;
    let w1 = track_weights(doc, to, fam.boundary_track())?;
    let p = profile(&fam, w0, w1).expect("labels match");
    let mut text = format!("X on (1-t){from} + t{to} over {}", fam.name);
    for piece in &p.pieces {
        let span = if piece.start == piece.end {
            format!("t = {}", piece.start)
        } else {
            format!("t in [{}, {}]", piece.start, piece.end)
        };
        let _ = write!(
            text,
            "\n  {span}: {}  ({})",
            affine(&piece.slope, &piece.intercept),
            piece.witness
        );
    }
    for (m, a, b) in &p.unbounded {
        let _ = write!(text, "\n  t in [{a}, {b}]: unbounded on {m}");
    }
    if p.feasible.is_empty() {
        text.push_str("\n  infeasible for every t");
    }
    let bps = p.breakpoints();
    if !bps.is_empty() {
        let _ = write!(text, "\nbreakpoints {}", rational::fmt_tuple(&bps));
    }
    let json = p.to_json();
    let csv = p.to_csv();
    let r = if p.feasible.is_empty() || !p.unbounded.is_empty() {
        Report::finding(text, json)
    } else {
        Report::ok(text, json)
    };
    Ok(r.with_csv(csv))
}

fn affine(slope: &Rational, intercept: &Rational) -> String {
    if slope.is_zero() {
        return intercept.to_string();
    }
    let lead = if intercept.is_zero() { String::new() } else { format!("{intercept} ") };
    let sign = if slope.is_negative() { "-" } else if lead.is_empty() { "" } else { "+" };
    let mag = slope.abs();
    let coeff = if mag.is_one() {
        String::new()
    } else if mag.is_integer() {
        mag.to_string()
    } else {
        format!("({mag})")
    };
    let gap = if lead.is_empty() { "" } else { " " };
    format!("{lead}{sign}{gap}{coeff}t")
}

fn domain(e: dynamics::DynamicsError) -> Report {
    Report::failed(1, e.to_string())
}

fn trace(
    doc: &Document,
    m: &Measured,
    cusp: Option<&CuspId>,
    direction: Option<DirectionArg>,
    max_steps: Option<u64>,
) -> CmdResult {
    let t = track(doc, &m.track)?;
    let w = track_weights(doc, &m.weights, t)?;
    let bound = max_steps.unwrap_or_else(dynamics::max_steps_from_env);
    let Some(cusp) = cusp else {
        if direction.is_some() {
            return Err(Usage("--direction needs --cusp".into()));
        }
        return Ok(match is_irreducible(t, w, bound) {
            Err(e) => domain(e),
            Ok(v) => {
                let text = match &v {
                    Irreducibility::Irreducible { closed_leaves } => {
                        let mut s = format!("{}({}) is irreducible", m.track, m.weights);
                        if *closed_leaves {
                            s.push_str("\n  note: leaves close up; closed-leaf conditions are not checked");
                        }
                        s
                    }
                    Irreducibility::Reducible { witness } => {
                        format!("{}({}) is reducible\n{witness}", m.track, m.weights)
                    }
                    Irreducibility::Undecided { bound, needed } => format!(
                        "undecided: bound {bound} is below the {needed} step(s) needed"
                    ),
                };
                let json = v.to_json();
                match v {
                    Irreducibility::Undecided { .. } => Report::finding(text, json),
                    _ => Report::ok(text, json),
                }
            }
        });
    };
    let dir = match direction {
        Some(DirectionArg::Forward) => Direction::Forward,
        Some(DirectionArg::Backward) => Direction::Backward,
        None => Direction::of_cusp(cusp),
    };
    Ok(match trace_separatrix(t, w, cusp, dir, bound) {
        Err(e) => domain(e),
        Ok(r) => {
            let json = r.to_json();
            let text = r.to_string();
            match r.outcome {
                TraceOutcome::StepBoundExceeded { .. } => Report::finding(text, json),
                _ => Report::ok(text, json),
            }
        }
    })
}

fn components(doc: &Document, m: &Measured) -> CmdResult {
    let t = track(doc, &m.track)?;
    let w = track_weights(doc, &m.weights, t)?;
    let model = match strand_model(t, w) {
        Ok(model) => model,
        Err(e) => return Ok(domain(e)),
    };
    let comps = model.components();
    let labels = t.segment_ids();
    let mut text = format!(
        "{}({}): {} strand(s), {} component(s)",
        m.track,
        m.weights,
        model.strand_count(),
        comps.len()
    );
    let mut csv = format!("component,length,orientation_consistent,{}\n", labels.join(","));
    for (i, c) in comps.iter().enumerate() {
        let visits: Vec<String> = labels
            .iter()
            .zip(&c.visits)
            .filter(|(_, &n)| n > 0)
            .map(|(l, n)| format!("{l}^{n}"))
            .collect();
        let _ = write!(
            text,
            "\n  #{i}: length {}{} [{}]",
            c.length,
            if c.orientation_consistent { "" } else { ", orientation reverses" },
            visits.join(" ")
        );
        let counts: Vec<String> = c.visits.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(csv, "{i},{},{},{}", c.length, c.orientation_consistent, counts.join(","));
    }
    let json = json!({
        "track": m.track,
        "weights": m.weights,
        "labels": labels,
        "strands": model.strand_count(),
        "components": comps.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
    });
    Ok(Report::ok(text, json).with_csv(csv))
}

fn split(doc: &Document, m: &Measured, cusp: &CuspId, check: bool) -> CmdResult {
    let t = track(doc, &m.track)?;
    let w = track_weights(doc, &m.weights, t)?;
    let (t2, w2, record) = match split_at_cusp(t, w, cusp) {
        Ok(x) => x,
        Err(e) => return Ok(domain(e)),
    };
    let restored = if check {
        Some(match pinch(&t2, &w2, &record) {
            Ok((t3, w3)) => t3 == **t && w3 == *w,
            Err(_) => false,
        })
    } else {
        None
    };
    let t2 = Arc::new(t2);
    let out = Document {
        tracks: vec![t2.clone()],
        presentations: Vec::new(),
        weights: vec![NamedWeights {
            name: m.weights.clone(),
            target: WeightTarget::Track(t2.name.clone()),
            vector: w2.clone(),
        }],
        families: Vec::new(),
    };
    let mut text = format!(
        "# {} at {cusp}\n",
        match record.kind {
            crate::dynamics::SplitKind::Unzip => "unzip",
            crate::dynamics::SplitKind::Collision => "collision",
        }
    );
    if let Some(ok) = restored {
        let _ = writeln!(text, "# pinch restores the original: {}", if ok { "yes" } else { "no" });
    }
    text.push_str(&serialize_document(&out));
    let mut json = json!({
        "move": record.to_json(),
        "document": document_to_json(&out),
    });
    if let Some(ok) = restored {
        json["restored"] = json!(ok);
    }
    Ok(if restored == Some(false) {
        Report::finding(text, json)
    } else {
        Report::ok(text, json)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["lamcone"]).code, 2);
        assert_eq!(run(["lamcone", "frobnicate", "x.lam"]).code, 2);
        assert_eq!(run(["lamcone", "validate", "/nonexistent/x.lam"]).code, 2);
    }

    #[test]
    fn help_exits_0() {
        let out = run(["lamcone", "--help"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("vertices"));
    }
}
