//! Measured prelaminations on train tracks: strand models, separatrix
//! tracing, irreducibility, and splitting/pinching moves.
//!
//! Heights on a segment are measured from the bottom of its fiber, bottom
//! meaning the first entry of each switch side. Crossing a switch is then a
//! pure shift by partial sums of side weights, and cusps sit exactly at the
//! interior partial sums.

mod split;
mod strands;
mod trace;

use num_bigint::BigInt;

use crate::cones::ConeRepr;
use crate::model::{CuspId, Side, TrainTrack, WeightError, WeightVector};
use crate::rational::{self, Rational};

pub use split::{pinch, split_at_cusp, MoveRecord, SplitKind};
pub use strands::{components, strand_model, Component, Strand, StrandModel, SwitchPairing};
pub use trace::{
    is_irreducible, required_steps, steps_as_u64, trace_separatrix, Irreducibility, TraceOutcome, TraceResult,
};

/// Default trace bound; overridable through `LAMCONE_MAX_STEPS`.
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

pub fn max_steps_from_env() -> u64 {
    std::env::var("LAMCONE_MAX_STEPS")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_MAX_STEPS)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("track {0} is not valid")]
    InvalidTrack(String),
    #[error("weights violate a switch equation")]
    SwitchEquation,
    #[error("weight on `{0}` is not an integer")]
    NonIntegral(String),
    #[error("strand model would need {0} strands")]
    TooLarge(BigInt),
    #[error("no such cusp `{0}`")]
    NoSuchCusp(String),
    #[error("cusp not realized: `{0}` has a zero flanking weight")]
    CuspNotRealized(String),
    #[error("separatrix of `{cusp}` runs {expected}, not {requested}")]
    Direction {
        cusp: String,
        expected: Direction,
        requested: Direction,
    },
    #[error("move record does not match this state")]
    StaleRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    /// A side-A cusp opens into side B, so its separatrix runs forward.
    pub fn of_cusp(cusp: &CuspId) -> Direction {
        match cusp.side {
            Side::A => Direction::Forward,
            Side::B => Direction::Backward,
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

/// Checks that `w` is a weight vector on a valid `track` satisfying every
/// switch equation, and returns its values in segment order.
fn checked_weights<'a>(track: &TrainTrack, w: &'a WeightVector) -> Result<&'a [Rational], DynamicsError> {
    if !track.validate().is_valid() {
        return Err(DynamicsError::InvalidTrack(track.name.clone()));
    }
    if !ConeRepr::from_track(track).contains(w)? {
        return Err(DynamicsError::SwitchEquation);
    }
    Ok(w.values())
}

/// Per-switch layout with integer weights after clearing denominators.
#[derive(Debug, Clone)]
struct Layout {
    weights: Vec<BigInt>,
    scale: BigInt,
    /// Segment index to (switch, position on side A) of its head.
    head: Vec<Option<(usize, usize)>>,
    /// Segment indices on each side, bottom first.
    sides: Vec<[Vec<usize>; 2]>,
    /// Prefix sums over each side, one longer than the side.
    offsets: Vec<[Vec<BigInt>; 2]>,
}

fn side_index(side: Side) -> usize {
    match side {
        Side::A => 0,
        Side::B => 1,
    }
}

impl Layout {
    fn new(track: &TrainTrack, w: &[Rational]) -> Layout {
        let scale = rational::denominator_lcm(w);
        let weights: Vec<BigInt> = w
            .iter()
            .map(|x| (x * Rational::from_integer(scale.clone())).to_integer())
            .collect();
        let mut head = vec![None; track.segments.len()];
        let mut sides = Vec::new();
        let mut offsets = Vec::new();
        for (si, sw) in track.switches.iter().enumerate() {
            let mut pair: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
            let mut sums: [Vec<BigInt>; 2] = [Vec::new(), Vec::new()];
            for side in [Side::A, Side::B] {
                let k = side_index(side);
                let mut acc = BigInt::from(0);
                sums[k].push(acc.clone());
                for (pos, e) in sw.side(side).iter().enumerate() {
                    let s = track.segment_index(&e.segment).expect("validated track");
                    if side == Side::A {
                        head[s] = Some((si, pos));
                    }
                    acc += &weights[s];
                    pair[k].push(s);
                    sums[k].push(acc.clone());
                }
            }
            sides.push(pair);
            offsets.push(sums);
        }
        Layout {
            weights,
            scale,
            head,
            sides,
            offsets,
        }
    }

    /// Gap index of a realized cusp at height `h` on one side, if any.
    fn cusp_at(&self, sw: usize, side: Side, h: &BigInt) -> Option<usize> {
        let k = side_index(side);
        let sums = &self.offsets[sw][k];
        let total = sums.last().expect("nonempty prefix sums");
        if h <= &BigInt::from(0) || h >= total {
            return None;
        }
        let entries = &self.sides[sw][k];
        (0..entries.len().saturating_sub(1))
            .find(|&g| &sums[g + 1] == h && self.weights[entries[g]] > BigInt::from(0))
    }

    /// Realized gaps carry positive weight below and above them.
    fn is_realized(&self, sw: usize, side: Side, gap: usize) -> bool {
        let k = side_index(side);
        let entries = &self.sides[sw][k];
        if gap + 1 >= entries.len() {
            return false;
        }
        let sums = &self.offsets[sw][k];
        self.weights[entries[gap]] > BigInt::from(0) && &sums[gap + 1] < sums.last().unwrap()
    }

    /// Segment and height where a leaf at switch height `h` leaves through side B.
    fn exit(&self, sw: usize, h: &BigInt) -> (usize, BigInt) {
        let entries = &self.sides[sw][1];
        let sums = &self.offsets[sw][1];
        let zero = BigInt::from(0);
        for (pos, &s) in entries.iter().enumerate() {
            if self.weights[s] > zero && &sums[pos] <= h && h <= &sums[pos + 1] {
                return (s, h - &sums[pos]);
            }
        }
        unreachable!("switch heights stay within the side total")
    }
}

fn find_cusp(track: &TrainTrack, cusp: &CuspId) -> Result<usize, DynamicsError> {
    let sw = track
        .switch_index(&cusp.switch)
        .ok_or_else(|| DynamicsError::NoSuchCusp(cusp.to_string()))?;
    if cusp.gap + 1 >= track.switches[sw].side(cusp.side).len() {
        return Err(DynamicsError::NoSuchCusp(cusp.to_string()));
    }
    Ok(sw)
}
