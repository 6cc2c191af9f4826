//! Integer weights realized as stacks of parallel strands.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::model::{End, Side, TrainTrack, WeightVector};

use super::{checked_weights, DynamicsError};

/// Largest strand count a model will allocate.
const MAX_STRANDS: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Strand {
    pub segment: usize,
    /// Position in the segment's stack, bottom first.
    pub index: usize,
}

/// The pairing at one switch: `incoming[p]` continues as `outgoing[p]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchPairing {
    pub switch: String,
    pub incoming: Vec<Strand>,
    pub outgoing: Vec<Strand>,
    /// Every incoming strand leaves through a head and every outgoing one
    /// enters through a tail.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrandModel {
    pub track: TrainTrack,
    pub weights: Vec<usize>,
    pub pairings: Vec<SwitchPairing>,
    base: Vec<usize>,
    next: Vec<usize>,
    switch_of: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Number of segment traversals.
    pub length: usize,
    pub orientation_consistent: bool,
    /// Traversal count per segment.
    pub visits: Vec<usize>,
}

impl Component {
    pub fn to_json(&self) -> Value {
        json!({
            "length": self.length,
            "orientation_consistent": self.orientation_consistent,
            "visits": self.visits,
        })
    }
}

pub fn strand_model(track: &TrainTrack, w: &WeightVector) -> Result<StrandModel, DynamicsError> {
    let values = checked_weights(track, w)?;
    let mut weights = Vec::with_capacity(values.len());
    let mut total = BigInt::from(0);
    for (label, v) in w.labels().iter().zip(values) {
        if !v.is_integer() {
            return Err(DynamicsError::NonIntegral(label.clone()));
        }
        total += v.to_integer();
        if total > BigInt::from(MAX_STRANDS) {
            return Err(DynamicsError::TooLarge(total));
        }
        weights.push(v.to_integer().to_usize().expect("bounded by MAX_STRANDS"));
    }
    let mut base = Vec::with_capacity(weights.len() + 1);
    let mut acc = 0;
    for &n in &weights {
        base.push(acc);
        acc += n;
    }
    base.push(acc);
    let id = |s: Strand| base[s.segment] + s.index;

    let mut next: Vec<usize> = (0..acc).collect();
    let mut switch_of = vec![None; acc];
    let mut pairings = Vec::new();
    for (si, sw) in track.switches.iter().enumerate() {
        let stack = |side: Side| -> Vec<Strand> {
            sw.side(side)
                .iter()
                .flat_map(|e| {
                    let s = track.segment_index(&e.segment).expect("validated track");
                    (0..weights[s]).map(move |index| Strand { segment: s, index })
                })
                .collect()
        };
        let incoming = stack(Side::A);
        let outgoing = stack(Side::B);
        debug_assert_eq!(incoming.len(), outgoing.len());
        for (a, b) in incoming.iter().zip(&outgoing) {
            next[id(*a)] = id(*b);
            switch_of[id(*a)] = Some(si);
        }
        let consistent = sw.side_a.iter().all(|e| e.end == End::Head)
            && sw.side_b.iter().all(|e| e.end == End::Tail);
        pairings.push(SwitchPairing {
            switch: sw.id.clone(),
            incoming,
            outgoing,
            consistent,
        });
    }
    Ok(StrandModel {
        track: track.clone(),
        weights,
        pairings,
        base,
        next,
        switch_of,
    })
}

impl StrandModel {
    pub fn strand_count(&self) -> usize {
        self.next.len()
    }

    fn segment_of(&self, strand: usize) -> usize {
        self.base.partition_point(|&b| b <= strand) - 1
    }

    /// Successor of a global strand id across its head switch.
    pub fn successor(&self, strand: usize) -> usize {
        self.next[strand]
    }

    /// Cycle decomposition of the strand permutation, ordered by smallest strand.
    pub fn components(&self) -> Vec<Component> {
        let mut seen = vec![false; self.next.len()];
        let mut out = Vec::new();
        for start in 0..self.next.len() {
            if seen[start] {
                continue;
            }
            let mut visits = vec![0; self.weights.len()];
            let mut consistent = true;
            let mut length = 0;
            let mut s = start;
            loop {
                seen[s] = true;
                visits[self.segment_of(s)] += 1;
                length += 1;
                if let Some(sw) = self.switch_of[s] {
                    consistent &= self.pairings[sw].consistent;
                }
                s = self.next[s];
                if s == start {
                    break;
                }
            }
            out.push(Component {
                length,
                orientation_consistent: consistent,
                visits,
            });
        }
        out
    }
}

pub fn components(model: &StrandModel) -> Vec<Component> {
    model.components()
}
