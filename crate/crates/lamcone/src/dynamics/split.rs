//! One splitting step along the initial arc of a cusp's separatrix, and the
//! pinch that undoes it.
//!
//! Cutting along the separatrix separates the cusp's switch into the part of
//! the fiber below the cusp height and the part above it. If the arc enters
//! the interior of an outgoing segment, that segment is cut lengthwise and
//! the cusp moves to its far end (an unzip). If the arc lands on the opposite
//! cusp of the same switch, both cusps disappear (a collision), which may
//! disconnect the track.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use serde_json::{json, Value};

use crate::model::{CuspId, EndRef, Segment, Side, Switch, TrainTrack, WeightVector};
use crate::rational::{self, Rational};

use super::{checked_weights, find_cusp, DynamicsError, Layout};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitKind {
    Unzip,
    Collision,
}

impl SplitKind {
    pub fn code(self) -> &'static str {
        match self {
            SplitKind::Unzip => "unzip",
            SplitKind::Collision => "collision",
        }
    }
}

/// Everything `pinch` needs to restore the state before a split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveRecord {
    pub kind: SplitKind,
    pub cusp: CuspId,
    /// Index of the split switch; its two halves occupy this index and the next.
    pub switch_index: usize,
    pub original_switch: Switch,
    /// The switch at the far end of a cut segment, when distinct from the split switch.
    pub far_switch: Option<Switch>,
    /// Cut segment: index, record, weight. Its halves occupy this index and the next.
    pub cut_segment: Option<(usize, Segment, Rational)>,
    pub new_switches: [String; 2],
    pub new_segments: Option<[String; 2]>,
    /// Hash of the post-split state.
    pub fingerprint: u64,
}

impl MoveRecord {
    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.code(),
            "cusp": self.cusp.to_string(),
            "switch": self.original_switch.id,
            "new_switches": self.new_switches,
            "cut_segment": self.cut_segment.as_ref().map(|(_, s, w)| json!({
                "id": s.id,
                "weight": rational::to_json(w),
            })),
            "new_segments": self.new_segments,
            "fingerprint": format!("{:016x}", self.fingerprint),
        })
    }
}

fn fingerprint(track: &TrainTrack, w: &WeightVector) -> u64 {
    let mut h = DefaultHasher::new();
    track.hash(&mut h);
    w.hash(&mut h);
    h.finish()
}

fn fresh(base: &str, taken: &mut HashSet<String>) -> String {
    let id = (0..)
        .map(|k| format!("{base}.{k}"))
        .find(|id| !taken.contains(id))
        .expect("unbounded search");
    taken.insert(id.clone());
    id
}

pub fn split_at_cusp(
    track: &TrainTrack,
    w: &WeightVector,
    cusp: &CuspId,
) -> Result<(TrainTrack, WeightVector, MoveRecord), DynamicsError> {
    let values = checked_weights(track, w)?;
    let ix = find_cusp(track, cusp)?;
    let reversed = cusp.side == Side::B;
    let work = if reversed { track.reversed() } else { track.clone() };
    let layout = Layout::new(&work, values);
    if !layout.is_realized(ix, Side::A, cusp.gap) {
        return Err(DynamicsError::CuspNotRealized(cusp.to_string()));
    }
    let gap = cusp.gap;
    let height = layout.offsets[ix][0][gap + 1].clone();

    let mut switch_ids: HashSet<String> = track.switches.iter().map(|s| s.id.clone()).collect();
    let mut segment_ids: HashSet<String> = track.segments.iter().map(|s| s.id.clone()).collect();
    let ids = [
        fresh(&cusp.switch, &mut switch_ids),
        fresh(&cusp.switch, &mut switch_ids),
    ];

    let mut segments = work.segments.clone();
    let mut weights = values.to_vec();
    let mut switches = work.switches.clone();
    let (kind, far, cut, new_segments, halves) =
        if let Some(g) = layout.cusp_at(ix, Side::B, &height) {
            let x = &work.switches[ix];
            let lower = Switch {
                id: ids[0].clone(),
                side_a: x.side_a[..=gap].to_vec(),
                side_b: x.side_b[..=g].to_vec(),
            };
            let upper = Switch {
                id: ids[1].clone(),
                side_a: x.side_a[gap + 1..].to_vec(),
                side_b: x.side_b[g + 1..].to_vec(),
            };
            (SplitKind::Collision, None, None, None, [lower, upper])
        } else {
            let (seg, h) = layout.exit(ix, &height);
            let b = work.segments[seg].id.clone();
            let scale = Rational::from_integer(layout.scale.clone());
            let low_w = Rational::from_integer(h) / scale;
            let high_w = &values[seg] - &low_w;
            let halves_ids = [fresh(&b, &mut segment_ids), fresh(&b, &mut segment_ids)];
            let piece = |id: &String| Segment {
                id: id.clone(),
                ..work.segments[seg].clone()
            };
            segments.splice(seg..=seg, [piece(&halves_ids[0]), piece(&halves_ids[1])]);
            weights.splice(seg..=seg, [low_w, high_w]);

            // The cut moves the cusp to the head of `b`.
            let far_index = switches
                .iter()
                .position(|sw| sw.side_a.contains(&EndRef::head(&b)))
                .expect("validated track attaches every head");
            let far = (far_index != ix).then(|| track.switches[far_index].clone());
            let lower_entry = work.switches[ix].side_a[gap].clone();
            for e in switches[far_index].side_a.iter_mut() {
                if e.segment == b {
                    e.segment = halves_ids[0].clone();
                }
            }
            let at = switches[far_index]
                .side_a
                .iter()
                .position(|e| e.segment == halves_ids[0])
                .unwrap();
            switches[far_index]
                .side_a
                .insert(at + 1, EndRef::head(&halves_ids[1]));

            let x = &switches[ix];
            let lower_entry = if lower_entry.segment == b {
                EndRef::head(&halves_ids[1])
            } else {
                lower_entry
            };
            let cut_a = x.side_a.iter().position(|e| *e == lower_entry).unwrap() + 1;
            let j = x.side_b.iter().position(|e| *e == EndRef::tail(&b)).unwrap();
            let mut low_b = x.side_b[..j].to_vec();
            low_b.push(EndRef::tail(&halves_ids[0]));
            let mut high_b = vec![EndRef::tail(&halves_ids[1])];
            high_b.extend_from_slice(&x.side_b[j + 1..]);
            let lower = Switch {
                id: ids[0].clone(),
                side_a: x.side_a[..cut_a].to_vec(),
                side_b: low_b,
            };
            let upper = Switch {
                id: ids[1].clone(),
                side_a: x.side_a[cut_a..].to_vec(),
                side_b: high_b,
            };
            let cut = Some((seg, track.segments[seg].clone(), values[seg].clone()));
            (SplitKind::Unzip, far, cut, Some(halves_ids), [lower, upper])
        };
    switches.splice(ix..=ix, halves);

    let mut out = TrainTrack::new(track.name.clone(), segments, switches);
    if reversed {
        out = out.reversed();
    }
    let w_out = WeightVector::new(out.segment_ids(), weights)?;
    let record = MoveRecord {
        kind,
        cusp: cusp.clone(),
        switch_index: ix,
        original_switch: track.switches[ix].clone(),
        far_switch: far,
        cut_segment: cut,
        new_switches: ids,
        new_segments,
        fingerprint: fingerprint(&out, &w_out),
    };
    Ok((out, w_out, record))
}

/// Exact inverse of `split_at_cusp` on the state it produced.
pub fn pinch(
    track: &TrainTrack,
    w: &WeightVector,
    record: &MoveRecord,
) -> Result<(TrainTrack, WeightVector), DynamicsError> {
    if fingerprint(track, w) != record.fingerprint {
        return Err(DynamicsError::StaleRecord);
    }
    let ix = record.switch_index;
    let halves_in_place = track.switches.get(ix).map(|s| &s.id) == Some(&record.new_switches[0])
        && track.switches.get(ix + 1).map(|s| &s.id) == Some(&record.new_switches[1]);
    if !halves_in_place {
        return Err(DynamicsError::StaleRecord);
    }
    let mut switches = track.switches.clone();
    switches.splice(ix..=ix + 1, [record.original_switch.clone()]);
    if let Some(far) = &record.far_switch {
        let k = switches
            .iter()
            .position(|s| s.id == far.id)
            .ok_or(DynamicsError::StaleRecord)?;
        switches[k] = far.clone();
    }
    let mut segments = track.segments.clone();
    let mut weights = w.values().to_vec();
    if let (Some((k, seg, weight)), Some(ids)) = (&record.cut_segment, &record.new_segments) {
        let k = *k;
        if segments.get(k).map(|s| &s.id) != Some(&ids[0])
            || segments.get(k + 1).map(|s| &s.id) != Some(&ids[1])
        {
            return Err(DynamicsError::StaleRecord);
        }
        segments.splice(k..=k + 1, [seg.clone()]);
        weights.splice(k..=k + 1, [weight.clone()]);
    }
    let out = TrainTrack::new(track.name.clone(), segments, switches);
    let w_out = WeightVector::new(out.segment_ids(), weights)?;
    Ok((out, w_out))
}
