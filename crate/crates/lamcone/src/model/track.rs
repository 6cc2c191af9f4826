use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::rational::Rational;

use super::{ValidationReport, ViolationKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    Head,
    Tail,
}

impl End {
    pub fn opposite(self) -> End {
        match self {
            End::Head => End::Tail,
            End::Tail => End::Head,
        }
    }
}

/// Switch side. Side A collects incoming segment heads, side B outgoing tails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }

    /// The segment end an oriented track must attach on this side.
    pub fn expected_end(self) -> End {
        match self {
            Side::A => End::Head,
            Side::B => End::Tail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub id: String,
    /// Carries a tangential orientation (tail to head).
    pub oriented: bool,
    /// Closed-curve sector: no switch endpoints.
    pub closed: bool,
}

impl Segment {
    pub fn new(id: impl Into<String>) -> Self {
        Segment {
            id: id.into(),
            oriented: true,
            closed: false,
        }
    }

    pub fn closed(id: impl Into<String>) -> Self {
        Segment {
            closed: true,
            ..Segment::new(id)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EndRef {
    pub segment: String,
    pub end: End,
}

impl EndRef {
    pub fn head(segment: impl Into<String>) -> Self {
        EndRef {
            segment: segment.into(),
            end: End::Head,
        }
    }

    pub fn tail(segment: impl Into<String>) -> Self {
        EndRef {
            segment: segment.into(),
            end: End::Tail,
        }
    }
}

/// A switch with two ordered sides. The order along each side is the fiber
/// order across the switch: entry 0 sits at the bottom of the stack.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Switch {
    pub id: String,
    pub side_a: Vec<EndRef>,
    pub side_b: Vec<EndRef>,
}

impl Switch {
    /// Oriented switch merging `incoming` heads into `outgoing` tails.
    pub fn oriented(id: impl Into<String>, incoming: &[&str], outgoing: &[&str]) -> Self {
        Switch {
            id: id.into(),
            side_a: incoming.iter().map(|s| EndRef::head(*s)).collect(),
            side_b: outgoing.iter().map(|s| EndRef::tail(*s)).collect(),
        }
    }

    pub fn side(&self, side: Side) -> &[EndRef] {
        match side {
            Side::A => &self.side_a,
            Side::B => &self.side_b,
        }
    }

    pub fn cusp_count(&self) -> usize {
        self.side_a.len().saturating_sub(1) + self.side_b.len().saturating_sub(1)
    }
}

/// Identifies the gap between entries `gap` and `gap + 1` on one side of a switch.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CuspId {
    pub switch: String,
    pub side: Side,
    pub gap: usize,
}

impl CuspId {
    pub fn new(switch: impl Into<String>, side: Side, gap: usize) -> Self {
        CuspId {
            switch: switch.into(),
            side,
            gap,
        }
    }
}

impl fmt::Display for CuspId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::A => "A",
            Side::B => "B",
        };
        write!(f, "{}:{}:{}", self.switch, side, self.gap)
    }
}

impl FromStr for CuspId {
    type Err = String;

    /// `switch:A:0` or `switch:B:2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.rsplitn(3, ':');
        let gap = parts.next();
        let side = parts.next();
        let switch = parts.next();
        match (switch, side, gap) {
            (Some(sw), Some(side), Some(gap)) if !sw.is_empty() => {
                let side = match side {
                    "A" | "a" => Side::A,
                    "B" | "b" => Side::B,
                    _ => return Err(format!("bad cusp side in `{s}`")),
                };
                let gap = gap.parse().map_err(|_| format!("bad cusp gap in `{s}`"))?;
                Ok(CuspId::new(sw, side, gap))
            }
            _ => Err(format!("cusp must look like `switch:A:0`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TrainTrack {
    pub name: String,
    pub segments: Vec<Segment>,
    pub switches: Vec<Switch>,
}

pub(crate) type Attachments = BTreeMap<(String, End), Vec<(usize, Side, usize)>>;

impl TrainTrack {
    pub fn new(name: impl Into<String>, segments: Vec<Segment>, switches: Vec<Switch>) -> Self {
        TrainTrack {
            name: name.into(),
            segments,
            switches,
        }
    }

    pub fn segment_ids(&self) -> Vec<String> {
        self.segments.iter().map(|s| s.id.clone()).collect()
    }

    pub fn segment_index(&self, id: &str) -> Option<usize> {
        self.segments.iter().position(|s| s.id == id)
    }

    pub fn switch_index(&self, id: &str) -> Option<usize> {
        self.switches.iter().position(|s| s.id == id)
    }

    pub fn total_cusps(&self) -> usize {
        self.switches.iter().map(Switch::cusp_count).sum()
    }

    pub fn cusps(&self) -> Vec<CuspId> {
        let mut out = Vec::new();
        for sw in &self.switches {
            for side in [Side::A, Side::B] {
                for gap in 0..sw.side(side).len().saturating_sub(1) {
                    out.push(CuspId::new(sw.id.clone(), side, gap));
                }
            }
        }
        out
    }

    /// One row per switch over the segment index: `+1` per side-A entry,
    /// `-1` per side-B entry, so `row . w = 0` is the switch equation.
    pub fn switch_matrix(&self) -> Vec<Vec<i64>> {
        self.switches
            .iter()
            .map(|sw| {
                let mut row = vec![0i64; self.segments.len()];
                for e in &sw.side_a {
                    if let Some(i) = self.segment_index(&e.segment) {
                        row[i] += 1;
                    }
                }
                for e in &sw.side_b {
                    if let Some(i) = self.segment_index(&e.segment) {
                        row[i] -= 1;
                    }
                }
                row
            })
            .collect()
    }

    /// Same track traversed against its orientation: heads and tails swap
    /// and so do switch sides. Fiber order along each side is kept.
    pub fn reversed(&self) -> TrainTrack {
        let flip = |e: &EndRef| EndRef {
            segment: e.segment.clone(),
            end: e.end.opposite(),
        };
        TrainTrack {
            name: self.name.clone(),
            segments: self.segments.clone(),
            switches: self
                .switches
                .iter()
                .map(|sw| Switch {
                    id: sw.id.clone(),
                    side_a: sw.side_b.iter().map(flip).collect(),
                    side_b: sw.side_a.iter().map(flip).collect(),
                })
                .collect(),
        }
    }

    /// Where each non-closed segment end is attached: (switch index, side, position).
    pub(crate) fn attachments(&self) -> Attachments {
        let mut map = Attachments::new();
        for (si, sw) in self.switches.iter().enumerate() {
            for side in [Side::A, Side::B] {
                for (pos, e) in sw.side(side).iter().enumerate() {
                    map.entry((e.segment.clone(), e.end))
                        .or_default()
                        .push((si, side, pos));
                }
            }
        }
        map
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new(format!("track {}", self.name));
        let mut seen = HashSet::new();
        for s in &self.segments {
            if !seen.insert(s.id.as_str()) {
                report.push(
                    ViolationKind::DuplicateId,
                    format!("segment `{}` declared twice", s.id),
                );
            }
            if !s.oriented {
                report.push(
                    ViolationKind::UnorientedSegment,
                    format!("segment `{}` carries no tangential orientation", s.id),
                );
            }
        }
        let mut seen = HashSet::new();
        for sw in &self.switches {
            if !seen.insert(sw.id.as_str()) {
                report.push(
                    ViolationKind::DuplicateId,
                    format!("switch `{}` declared twice", sw.id),
                );
            }
            for side in [Side::A, Side::B] {
                if sw.side(side).is_empty() {
                    report.push(
                        ViolationKind::EmptySwitchSide,
                        format!("switch `{}` has an empty side {:?}", sw.id, side),
                    );
                }
                for e in sw.side(side) {
                    match self.segments.iter().find(|s| s.id == e.segment) {
                        None => report.push(
                            ViolationKind::UnknownSegment,
                            format!("switch `{}` references unknown segment `{}`", sw.id, e.segment),
                        ),
                        Some(seg) if seg.closed => report.push(
                            ViolationKind::ClosedCurveAttached,
                            format!("closed curve `{}` is attached to switch `{}`", seg.id, sw.id),
                        ),
                        Some(_) => {}
                    }
                    if e.end != side.expected_end() {
                        report.push(
                            ViolationKind::OrientationInconsistent,
                            format!(
                                "switch `{}` side {:?} holds the {} of `{}`",
                                sw.id,
                                side,
                                end_name(e.end),
                                e.segment
                            ),
                        );
                    }
                }
            }
        }
        let attachments = self.attachments();
        for s in self.segments.iter().filter(|s| !s.closed) {
            for end in [End::Head, End::Tail] {
                let n = attachments
                    .get(&(s.id.clone(), end))
                    .map_or(0, |v| v.len());
                if n == 0 {
                    report.push(
                        ViolationKind::EndUnattached,
                        format!("{} of `{}` is not attached to any switch", end_name(end), s.id),
                    );
                } else if n > 1 {
                    report.push(
                        ViolationKind::EndMultiplyAttached,
                        format!("end multiply attached: {} of `{}` appears {n} times", end_name(end), s.id),
                    );
                }
            }
        }
        report
    }
}

fn end_name(end: End) -> &'static str {
    match end {
        End::Head => "head",
        End::Tail => "tail",
    }
}

/// Euler characteristic, cusp count and index `chi + C/2` of a scalloped surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScallopedSummary {
    pub euler_char: i64,
    pub cusp_count: u64,
    pub index: Rational,
}

impl ScallopedSummary {
    pub fn new(euler_char: i64, cusp_count: u64) -> Self {
        let index = Rational::from_integer(euler_char.into())
            + Rational::new(cusp_count.into(), 2.into());
        ScallopedSummary {
            euler_char,
            cusp_count,
            index,
        }
    }

    /// A measured oriented foliation exists only when the index vanishes.
    pub fn supports_measured_foliation(&self) -> bool {
        num_traits::Zero::is_zero(&self.index)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new(format!(
            "scalloped surface (chi={}, C={})",
            self.euler_char, self.cusp_count
        ));
        if !self.supports_measured_foliation() {
            report.push(
                ViolationKind::NonzeroIndex,
                format!(
                    "index {} is nonzero: supports no measured oriented foliation",
                    self.index
                ),
            );
        }
        report
    }
}

/// Scalloped surface `V(track)`: switches are vertices, non-closed segments
/// are edges, closed curves are annuli contributing nothing.
pub fn scalloped_summary(track: &TrainTrack) -> ScallopedSummary {
    let vertices = track.switches.len() as i64;
    let edges = track.segments.iter().filter(|s| !s.closed).count() as i64;
    ScallopedSummary::new(vertices - edges, track.total_cusps() as u64)
}
