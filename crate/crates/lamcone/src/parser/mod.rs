//! The `.lam` document format.
//!
//! A document is a sequence of blocks:
//!
//! ```text
//! track T {
//!   segment a b c          # oriented segments; `unoriented` may follow
//!   closed d               # closed curves
//!   switch s1: a b -> c    # side A (heads) -> side B (tails), bottom first
//! }
//! surface B on T {
//!   sector x chi=1 corners=0
//!   boundary x: a a        # boundary segments met, with multiplicity
//!   branch_eq: 3x = 2y + 2z
//!   aspherical
//!   oriented
//! }
//! weights W on T { a = 1, b = 1/2 }      # missing entries are zero
//! weights V on surface B { x = 2/5 }
//! family F on T { B }
//! ```
//!
//! Switch entries take an optional `+` (head) or `-` (tail) suffix when
//! they differ from the default for their side. Names are resolved after
//! the whole text is read, so blocks may appear in any order.

mod json;
mod lexer;
mod write;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::maxchi::{Family, FamilyError};
use crate::model::{
    BranchEquation, BranchedSurfacePresentation, End, EndRef, Sector, Segment, Switch, TrainTrack,
    ValidationReport, WeightVector,
};
use crate::rational::Rational;

use lexer::{tokenize, Tok, Token};

pub use json::document_to_json;
pub use write::serialize_document;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    Semantic,
    Validation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
    /// Model reports behind a validation failure.
    pub reports: Vec<ValidationReport>,
}

impl ParseError {
    fn new(kind: ParseErrorKind, pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            kind,
            line: pos.line,
            col: pos.col,
            message: message.into(),
            reports: Vec::new(),
        }
    }

    pub(crate) fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        Self::new(ParseErrorKind::Syntax, pos, message)
    }

    fn semantic(pos: Pos, message: impl Into<String>) -> Self {
        Self::new(ParseErrorKind::Semantic, pos, message)
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::Semantic => "semantic error",
            ParseErrorKind::Validation => "validation failed",
        };
        write!(f, "{}:{}: {kind}: {}", self.line, self.col, self.message)?;
        for r in &self.reports {
            write!(f, "\n{r}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightTarget {
    Track(String),
    Surface(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedWeights {
    pub name: String,
    pub target: WeightTarget,
    pub vector: WeightVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyDecl {
    pub name: String,
    pub track: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub tracks: Vec<Arc<TrainTrack>>,
    pub presentations: Vec<Arc<BranchedSurfacePresentation>>,
    pub weights: Vec<NamedWeights>,
    pub families: Vec<FamilyDecl>,
}

impl Document {
    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
            && self.presentations.is_empty()
            && self.weights.is_empty()
            && self.families.is_empty()
    }

    pub fn track(&self, name: &str) -> Option<&Arc<TrainTrack>> {
        self.tracks.iter().find(|t| t.name == name)
    }

    pub fn presentation(&self, name: &str) -> Option<&Arc<BranchedSurfacePresentation>> {
        self.presentations.iter().find(|p| p.name == name)
    }

    pub fn weights(&self, name: &str) -> Option<&NamedWeights> {
        self.weights.iter().find(|w| w.name == name)
    }

    pub fn family_decl(&self, name: &str) -> Option<&FamilyDecl> {
        self.families.iter().find(|f| f.name == name)
    }

    pub fn family(&self, name: &str) -> Option<Result<Family, FamilyError>> {
        let decl = self.family_decl(name)?;
        let members = decl
            .members
            .iter()
            .filter_map(|m| self.presentation(m).cloned())
            .collect();
        Some(Family::new(decl.name.clone(), members))
    }
}

type Name = (String, Pos);

struct RawTrack {
    name: Name,
    segments: Vec<Segment>,
    switches: Vec<Switch>,
}

struct RawSector {
    sector: Sector,
    pos: Pos,
}

struct RawSurface {
    name: Name,
    track: Option<Name>,
    sectors: Vec<RawSector>,
    boundary: Vec<(Name, Vec<String>)>,
    equations: Vec<BranchEquation>,
    aspherical: bool,
    oriented: bool,
}

struct RawWeights {
    name: Name,
    on_surface: bool,
    target: Name,
    entries: Vec<(Name, Rational)>,
}

struct RawFamily {
    name: Name,
    track: Option<Name>,
    members: Vec<Name>,
}

#[derive(Default)]
struct Raw {
    tracks: Vec<RawTrack>,
    surfaces: Vec<RawSurface>,
    weights: Vec<RawWeights>,
    families: Vec<RawFamily>,
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::syntax(
            self.pos(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == &Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{c}`")))
        }
    }

    fn ident(&mut self, wanted: &str) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let pos = self.pos();
                self.bump();
                Ok((s, pos))
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn is_ident(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn skip_separators(&mut self) {
        while matches!(self.peek(), Tok::Newline | Tok::Sym(';') | Tok::Sym(',')) {
            self.bump();
        }
    }

    /// A line inside a block ends at a newline, `;`, or the closing brace.
    fn end_line(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Newline | Tok::Sym(';') => {
                self.bump();
                Ok(())
            }
            Tok::Sym('}') => Ok(()),
            _ => Err(self.unexpected("end of line")),
        }
    }

    fn int(&mut self) -> Result<(BigInt, Pos), ParseError> {
        let pos = self.pos();
        let neg = self.eat('-');
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok((if neg { -n } else { n }, pos))
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn small_int(&mut self) -> Result<i64, ParseError> {
        let (n, pos) = self.int()?;
        n.to_i64()
            .ok_or_else(|| ParseError::syntax(pos, format!("integer {n} out of range")))
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let (num, _) = self.int()?;
        if !self.eat('/') {
            return Ok(Rational::from_integer(num));
        }
        let pos = self.pos();
        if self.peek() == &Tok::Sym('-') {
            return Err(ParseError::syntax(pos, "negative denominator"));
        }
        let (den, _) = self.int()?;
        if den.is_zero() {
            return Err(ParseError::syntax(pos, "zero denominator"));
        }
        Ok(Rational::new(num, den))
    }

    fn open_block(&mut self) -> Result<(), ParseError> {
        self.expect('{')?;
        self.skip_separators();
        Ok(())
    }

    fn document(&mut self) -> Result<Raw, ParseError> {
        let mut raw = Raw::default();
        loop {
            self.skip_separators();
            match self.peek().clone() {
                Tok::Eof => return Ok(raw),
                Tok::Ident(k) if k == "track" => raw.tracks.push(self.track()?),
                Tok::Ident(k) if k == "surface" => raw.surfaces.push(self.surface()?),
                Tok::Ident(k) if k == "weights" => raw.weights.push(self.weights()?),
                Tok::Ident(k) if k == "family" => raw.families.push(self.family()?),
                _ => return Err(self.unexpected("`track`, `surface`, `weights` or `family`")),
            }
        }
    }

    fn track(&mut self) -> Result<RawTrack, ParseError> {
        self.bump();
        let name = self.ident("a track name")?;
        self.open_block()?;
        let mut segments = Vec::new();
        let mut switches = Vec::new();
        while !self.eat('}') {
            let (kw, pos) = self.ident("`segment`, `closed`, `switch` or `}`")?;
            match kw.as_str() {
                "segment" | "closed" => {
                    let mut names = Vec::new();
                    while let Tok::Ident(_) = self.peek() {
                        names.push(self.ident("a segment name")?.0);
                    }
                    let oriented = names.last().map(String::as_str) != Some("unoriented");
                    if !oriented {
                        names.pop();
                    }
                    if names.is_empty() {
                        return Err(ParseError::syntax(pos, "expected at least one segment name"));
                    }
                    for n in names {
                        segments.push(Segment {
                            id: n,
                            oriented,
                            closed: kw == "closed",
                        });
                    }
                }
                "switch" => {
                    let id = self.ident("a switch name")?.0;
                    self.expect(':')?;
                    let side_a = self.entries(End::Head)?;
                    if self.peek() != &Tok::Arrow {
                        return Err(self.unexpected("`->`"));
                    }
                    self.bump();
                    let side_b = self.entries(End::Tail)?;
                    switches.push(Switch { id, side_a, side_b });
                }
                other => {
                    return Err(ParseError::syntax(
                        pos,
                        format!("unknown track statement `{other}`"),
                    ))
                }
            }
            self.end_line()?;
            self.skip_separators();
        }
        Ok(RawTrack {
            name,
            segments,
            switches,
        })
    }

    fn entries(&mut self, default: End) -> Result<Vec<EndRef>, ParseError> {
        let mut out = Vec::new();
        while let Tok::Ident(_) = self.peek() {
            let segment = self.ident("a segment name")?.0;
            let end = if self.eat('+') {
                End::Head
            } else if self.eat('-') {
                End::Tail
            } else {
                default
            };
            out.push(EndRef { segment, end });
        }
        Ok(out)
    }

    fn surface(&mut self) -> Result<RawSurface, ParseError> {
        self.bump();
        let name = self.ident("a surface name")?;
        let track = if self.is_ident("on") {
            self.bump();
            Some(self.ident("a track name")?)
        } else {
            None
        };
        self.open_block()?;
        let mut s = RawSurface {
            name,
            track,
            sectors: Vec::new(),
            boundary: Vec::new(),
            equations: Vec::new(),
            aspherical: false,
            oriented: false,
        };
        while !self.eat('}') {
            let (kw, pos) = self.ident("a surface statement")?;
            match kw.as_str() {
                "sector" => s.sectors.push(self.sector()?),
                "boundary" => {
                    let sector = self.ident("a sector name")?;
                    self.expect(':')?;
                    let mut segs = Vec::new();
                    while let Tok::Ident(_) = self.peek() {
                        segs.push(self.ident("a segment name")?.0);
                    }
                    s.boundary.push((sector, segs));
                }
                "branch_eq" => {
                    self.eat(':');
                    let lhs = self.linear()?;
                    self.expect('=')?;
                    let rhs = self.linear()?;
                    let terms = lhs
                        .into_iter()
                        .chain(rhs.into_iter().map(|(c, n)| (-c, n)));
                    s.equations.push(BranchEquation::new(terms));
                }
                "aspherical" => s.aspherical = true,
                "oriented" => s.oriented = true,
                other => {
                    return Err(ParseError::syntax(
                        pos,
                        format!("unknown surface statement `{other}`"),
                    ))
                }
            }
            self.end_line()?;
            self.skip_separators();
        }
        Ok(s)
    }

    fn sector(&mut self) -> Result<RawSector, ParseError> {
        let (id, pos) = self.ident("a sector name")?;
        let mut chi = None;
        let mut corners = None;
        let mut oriented = true;
        while let Tok::Ident(key) = self.peek().clone() {
            let kpos = self.pos();
            self.bump();
            if key == "unoriented" {
                oriented = false;
                continue;
            }
            self.expect('=')?;
            let slot = match key.as_str() {
                "chi" => &mut chi,
                "corners" => &mut corners,
                _ => {
                    return Err(ParseError::syntax(
                        kpos,
                        format!("unknown sector attribute `{key}`"),
                    ))
                }
            };
            if slot.is_some() {
                return Err(ParseError::semantic(kpos, format!("`{key}` given twice")));
            }
            *slot = Some((self.small_int()?, kpos));
        }
        let Some((chi, _)) = chi else {
            return Err(ParseError::semantic(pos, format!("sector `{id}` needs `chi=`")));
        };
        let corners = match corners {
            None => 0,
            Some((k, kpos)) => u32::try_from(k).map_err(|_| {
                ParseError::semantic(kpos, format!("corner count {k} must be nonnegative"))
            })?,
        };
        Ok(RawSector {
            sector: Sector {
                id,
                euler_char: chi,
                corners,
                oriented,
                boundary: Vec::new(),
            },
            pos,
        })
    }

    /// `0`, or signed terms `[coefficient] [*] sector`.
    fn linear(&mut self) -> Result<Vec<(i64, String)>, ParseError> {
        if self.peek() == &Tok::Int(BigInt::zero()) {
            let save = self.at;
            self.bump();
            if matches!(self.peek(), Tok::Sym('=') | Tok::Newline | Tok::Sym('}') | Tok::Eof) {
                return Ok(Vec::new());
            }
            self.at = save;
        }
        let mut terms = Vec::new();
        let mut first = true;
        loop {
            let sign = if self.eat('-') {
                -1
            } else if self.eat('+') || first {
                1
            } else {
                return Ok(terms);
            };
            first = false;
            let coeff = match self.peek().clone() {
                Tok::Int(n) => {
                    let pos = self.pos();
                    self.bump();
                    self.eat('*');
                    n.to_i64()
                        .ok_or_else(|| ParseError::syntax(pos, format!("coefficient {n} out of range")))?
                }
                _ => 1,
            };
            let name = self.ident("a sector name")?.0;
            terms.push((sign * coeff, name));
        }
    }

    fn weights(&mut self) -> Result<RawWeights, ParseError> {
        self.bump();
        let name = self.ident("a weights name")?;
        if !self.is_ident("on") {
            return Err(self.unexpected("`on`"));
        }
        self.bump();
        let on_surface = self.is_ident("surface");
        if on_surface {
            self.bump();
        }
        let target = self.ident("a track or surface name")?;
        self.open_block()?;
        let mut entries = Vec::new();
        while !self.eat('}') {
            let label = self.ident("a label")?;
            self.expect('=')?;
            entries.push((label, self.rational()?));
            if !matches!(self.peek(), Tok::Sym('}')) {
                if !matches!(self.peek(), Tok::Newline | Tok::Sym(',') | Tok::Sym(';')) {
                    return Err(self.unexpected("`,`, end of line or `}`"));
                }
                self.skip_separators();
            }
        }
        Ok(RawWeights {
            name,
            on_surface,
            target,
            entries,
        })
    }

    fn family(&mut self) -> Result<RawFamily, ParseError> {
        self.bump();
        let name = self.ident("a family name")?;
        let track = if self.is_ident("on") {
            self.bump();
            Some(self.ident("a track name")?)
        } else {
            None
        };
        self.open_block()?;
        let mut members = Vec::new();
        while !self.eat('}') {
            members.push(self.ident("a surface name")?);
            self.skip_separators();
        }
        Ok(RawFamily {
            name,
            track,
            members,
        })
    }
}

fn check_unique<'a>(kind: &str, names: impl Iterator<Item = &'a Name>) -> Result<(), ParseError> {
    let mut seen: HashMap<&str, Pos> = HashMap::new();
    for (n, pos) in names {
        if seen.insert(n.as_str(), *pos).is_some() {
            return Err(ParseError::semantic(*pos, format!("duplicate {kind} name `{n}`")));
        }
    }
    Ok(())
}

fn resolve(raw: Raw) -> Result<Document, ParseError> {
    check_unique("track", raw.tracks.iter().map(|t| &t.name))?;
    check_unique("surface", raw.surfaces.iter().map(|s| &s.name))?;
    check_unique("weights", raw.weights.iter().map(|w| &w.name))?;
    check_unique("family", raw.families.iter().map(|f| &f.name))?;

    let mut reports = Vec::new();
    let mut first_bad: Option<Pos> = None;
    let mut tracks = Vec::new();
    for t in raw.tracks {
        let track = TrainTrack::new(t.name.0.clone(), t.segments, t.switches);
        let report = track.validate();
        if !report.is_valid() {
            first_bad.get_or_insert(t.name.1);
            reports.push(report);
        }
        tracks.push(Arc::new(track));
    }
    let empty = Arc::new(TrainTrack::default());
    let find_track = |name: &Option<Name>| -> Result<Arc<TrainTrack>, ParseError> {
        match name {
            None => Ok(empty.clone()),
            Some((n, pos)) => tracks
                .iter()
                .find(|t| &t.name == n)
                .cloned()
                .ok_or_else(|| ParseError::semantic(*pos, format!("no track named `{n}`"))),
        }
    };

    let mut presentations = Vec::new();
    for s in raw.surfaces {
        let track = find_track(&s.track)?;
        let mut sectors: Vec<Sector> = s.sectors.iter().map(|r| r.sector.clone()).collect();
        for ((sector, pos), segs) in s.boundary {
            let z = sectors.iter_mut().find(|z| z.id == sector).ok_or_else(|| {
                ParseError::semantic(pos, format!("boundary line names unknown sector `{sector}`"))
            })?;
            z.boundary.extend(segs);
        }
        let _ = s.sectors.first().map(|r| r.pos);
        let bs = BranchedSurfacePresentation::new(
            s.name.0.clone(),
            sectors,
            s.equations,
            track.clone(),
            s.aspherical,
            s.oriented,
        );
        let mut report = bs.validate();
        let inherited = track.validate().violations.len();
        report.violations.drain(..inherited);
        if !report.is_valid() {
            first_bad.get_or_insert(s.name.1);
            reports.push(report);
        }
        presentations.push(Arc::new(bs));
    }

    let mut weights = Vec::new();
    for w in raw.weights {
        let (target, labels) = if w.on_surface {
            let bs = presentations
                .iter()
                .find(|p| p.name == w.target.0)
                .ok_or_else(|| {
                    ParseError::semantic(w.target.1, format!("no surface named `{}`", w.target.0))
                })?;
            (WeightTarget::Surface(bs.name.clone()), bs.sector_ids())
        } else {
            let t = find_track(&Some(w.target.clone()))?;
            (WeightTarget::Track(t.name.clone()), t.segment_ids())
        };
        let mut values = vec![Rational::zero(); labels.len()];
        let mut given = vec![false; labels.len()];
        for ((label, pos), v) in w.entries {
            let i = labels.iter().position(|l| *l == label).ok_or_else(|| {
                ParseError::semantic(pos, format!("`{}` has no entry `{label}`", w.target.0))
            })?;
            if given[i] {
                return Err(ParseError::semantic(pos, format!("`{label}` given twice")));
            }
            given[i] = true;
            values[i] = v;
        }
        let vector = WeightVector::new(labels, values)
            .map_err(|e| ParseError::semantic(w.name.1, format!("weights `{}`: {e}", w.name.0)))?;
        weights.push(NamedWeights {
            name: w.name.0,
            target,
            vector,
        });
    }

    let mut families = Vec::new();
    for f in raw.families {
        let mut track_name = match &f.track {
            Some(t) => Some(find_track(&Some(t.clone()))?.name.clone()),
            None => None,
        };
        let mut members = Vec::new();
        for (m, pos) in f.members {
            let bs = presentations.iter().find(|p| p.name == m).ok_or_else(|| {
                ParseError::semantic(pos, format!("no surface named `{m}`"))
            })?;
            let t = &bs.boundary_track.name;
            match &track_name {
                None => track_name = Some(t.clone()),
                Some(expected) if expected != t => {
                    return Err(ParseError::semantic(
                        pos,
                        format!("family `{}` is on `{expected}` but `{m}` is on `{t}`", f.name.0),
                    ))
                }
                Some(_) => {}
            }
            members.push(m);
        }
        if members.is_empty() {
            return Err(ParseError::semantic(f.name.1, format!("family `{}` is empty", f.name.0)));
        }
        families.push(FamilyDecl {
            name: f.name.0,
            track: track_name.unwrap_or_default(),
            members,
        });
    }

    if let Some(pos) = first_bad {
        let mut e = ParseError::new(
            ParseErrorKind::Validation,
            pos,
            format!("{} invalid object(s)", reports.len()),
        );
        e.reports = reports;
        return Err(e);
    }
    Ok(Document {
        tracks,
        presentations,
        weights,
        families,
    })
}

pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let toks = tokenize(text)?;
    let raw = Parser { toks, at: 0 }.document()?;
    resolve(raw)
}
