//! Separatrix tracing by interval translation, and irreducibility.
//!
//! After clearing denominators every height is an integer, and a separatrix
//! leaving a cusp stays strictly inside its segments until it lands on a
//! cusp. The transition map is injective away from cusps, so a trace visits
//! at most `sum w'` distinct states before it must stop.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::model::{CuspId, Side, TrainTrack, WeightVector};
use crate::rational::{self, Rational};

use super::{checked_weights, find_cusp, Direction, DynamicsError, Layout};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceOutcome {
    HitsCusp { target: CuspId, steps: u64 },
    ClosesUp { period: u64 },
    StepBoundExceeded { bound: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceResult {
    pub origin: CuspId,
    pub direction: Direction,
    pub outcome: TraceOutcome,
    /// Segment entered and height on entry, one entry per step.
    pub transcript: Vec<(String, Rational)>,
}

impl TraceResult {
    pub fn to_json(&self) -> Value {
        let outcome = match &self.outcome {
            TraceOutcome::HitsCusp { target, steps } => {
                json!({"kind": "hits-cusp", "target": target.to_string(), "steps": steps})
            }
            TraceOutcome::ClosesUp { period } => json!({"kind": "closes-up", "period": period}),
            TraceOutcome::StepBoundExceeded { bound } => {
                json!({"kind": "step-bound-exceeded", "bound": bound})
            }
        };
        json!({
            "origin": self.origin.to_string(),
            "direction": self.direction.to_string(),
            "outcome": outcome,
            "transcript": self.transcript.iter()
                .map(|(s, h)| json!({"segment": s, "height": rational::to_json(h)}))
                .collect::<Vec<_>>(),
        })
    }
}

impl std::fmt::Display for TraceResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "separatrix from {} ({}): ", self.origin, self.direction)?;
        match &self.outcome {
            TraceOutcome::HitsCusp { target, steps } => {
                write!(f, "hits cusp {target} after {steps} step(s)")?
            }
            TraceOutcome::ClosesUp { period } => write!(f, "closes up with period {period}")?,
            TraceOutcome::StepBoundExceeded { bound } => {
                write!(f, "no cusp within {bound} step(s)")?
            }
        }
        for (s, h) in &self.transcript {
            write!(f, "\n  {s} @ {h}")?;
        }
        Ok(())
    }
}

fn flip(side: Side) -> Side {
    side.opposite()
}

/// Traces the separatrix leaving `cusp`, which runs forward from side-A
/// cusps and backward from side-B cusps.
pub fn trace_separatrix(
    track: &TrainTrack,
    w: &WeightVector,
    cusp: &CuspId,
    direction: Direction,
    max_steps: u64,
) -> Result<TraceResult, DynamicsError> {
    let values = checked_weights(track, w)?;
    let expected = Direction::of_cusp(cusp);
    if direction != expected {
        return Err(DynamicsError::Direction {
            cusp: cusp.to_string(),
            expected,
            requested: direction,
        });
    }
    find_cusp(track, cusp)?;
    let (work, local) = match direction {
        Direction::Forward => (track.clone(), cusp.clone()),
        Direction::Backward => (
            track.reversed(),
            CuspId::new(cusp.switch.clone(), flip(cusp.side), cusp.gap),
        ),
    };
    let layout = Layout::new(&work, values);
    run(&work, &layout, cusp, &local, direction, max_steps)
}

fn run(
    work: &TrainTrack,
    layout: &Layout,
    origin: &CuspId,
    local: &CuspId,
    direction: Direction,
    max_steps: u64,
) -> Result<TraceResult, DynamicsError> {
    let mut sw = work.switch_index(&local.switch).expect("checked cusp");
    if !layout.is_realized(sw, Side::A, local.gap) {
        return Err(DynamicsError::CuspNotRealized(origin.to_string()));
    }
    let target = |sw: usize, side: Side, gap: usize| {
        let side = match direction {
            Direction::Forward => side,
            Direction::Backward => flip(side),
        };
        CuspId::new(work.switches[sw].id.clone(), side, gap)
    };
    let scale = Rational::from_integer(layout.scale.clone());
    let mut height: BigInt = layout.offsets[sw][0][local.gap + 1].clone();
    let mut transcript = Vec::new();
    let mut seen: HashMap<(usize, BigInt), u64> = HashMap::new();
    let mut steps: u64 = 0;
    let outcome = loop {
        if let Some(g) = layout.cusp_at(sw, Side::B, &height) {
            break TraceOutcome::HitsCusp {
                target: target(sw, Side::B, g),
                steps,
            };
        }
        if steps >= max_steps {
            break TraceOutcome::StepBoundExceeded { bound: max_steps };
        }
        let (seg, h) = layout.exit(sw, &height);
        steps += 1;
        transcript.push((
            work.segments[seg].id.clone(),
            Rational::from_integer(h.clone()) / &scale,
        ));
        if let Some(first) = seen.insert((seg, h.clone()), steps) {
            break TraceOutcome::ClosesUp {
                period: steps - first,
            };
        }
        let (next, pos) = layout.head[seg].expect("validated track attaches every head");
        sw = next;
        height = &layout.offsets[sw][0][pos] + h;
        if let Some(g) = layout.cusp_at(sw, Side::A, &height) {
            break TraceOutcome::HitsCusp {
                target: target(sw, Side::A, g),
                steps,
            };
        }
    };
    Ok(TraceResult {
        origin: origin.clone(),
        direction,
        outcome,
        transcript,
    })
}

/// `sum w' + 1` for `w'` the weights with denominators cleared.
pub fn required_steps(w: &WeightVector) -> BigInt {
    let scale = Rational::from_integer(rational::denominator_lcm(w.values()));
    let total: Rational = w.values().iter().map(|x| x * &scale).sum();
    total.to_integer() + 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Irreducibility {
    /// No realized cusp has a compact separatrix. `closed_leaves` flags that
    /// leaves close up (no realized cusps, or weight on closed curves); the
    /// torus clause about closed leaves is then left to the caller.
    Irreducible { closed_leaves: bool },
    Reducible { witness: TraceResult },
    Undecided { bound: u64, needed: BigInt },
}

impl Irreducibility {
    pub fn to_json(&self) -> Value {
        match self {
            Irreducibility::Irreducible { closed_leaves } => {
                json!({"verdict": "irreducible", "closed_leaf_caveat": closed_leaves})
            }
            Irreducibility::Reducible { witness } => {
                json!({"verdict": "reducible", "witness": witness.to_json()})
            }
            Irreducibility::Undecided { bound, needed } => {
                json!({"verdict": "undecided", "bound": bound, "needed": needed.to_string()})
            }
        }
    }
}

/// Traces every realized cusp. Reducible iff some separatrix is compact;
/// the witness is the first such trace in cusp order.
pub fn is_irreducible(
    track: &TrainTrack,
    w: &WeightVector,
    max_steps: u64,
) -> Result<Irreducibility, DynamicsError> {
    let values = checked_weights(track, w)?;
    let forward = Layout::new(track, values);
    let reversed_track = track.reversed();
    let backward = Layout::new(&reversed_track, values);
    let realized: Vec<CuspId> = track
        .cusps()
        .into_iter()
        .filter(|c| {
            let sw = track.switch_index(&c.switch).expect("listed cusp");
            let layout = match c.side {
                Side::A => &forward,
                Side::B => &backward,
            };
            layout.is_realized(sw, Side::A, c.gap)
        })
        .collect();
    let traces: Vec<TraceResult> = realized
        .par_iter()
        .map(|c| {
            let direction = Direction::of_cusp(c);
            let local = CuspId::new(c.switch.clone(), Side::A, c.gap);
            match direction {
                Direction::Forward => run(track, &forward, c, &local, direction, max_steps),
                Direction::Backward => {
                    run(&reversed_track, &backward, c, &local, direction, max_steps)
                }
            }
        })
        .collect::<Result<_, _>>()?;
    if let Some(t) = traces
        .iter()
        .find(|t| matches!(t.outcome, TraceOutcome::HitsCusp { .. }))
    {
        return Ok(Irreducibility::Reducible { witness: t.clone() });
    }
    if traces
        .iter()
        .any(|t| matches!(t.outcome, TraceOutcome::StepBoundExceeded { .. }))
    {
        return Ok(Irreducibility::Undecided {
            bound: max_steps,
            needed: required_steps(w),
        });
    }
    let closed_weight = track
        .segments
        .iter()
        .zip(values)
        .any(|(s, v)| s.closed && *v > Rational::from_integer(0.into()));
    Ok(Irreducibility::Irreducible {
        closed_leaves: realized.is_empty() || closed_weight,
    })
}

/// `max_steps` from `required_steps`, saturating at `u64::MAX`.
pub fn steps_as_u64(n: &BigInt) -> u64 {
    n.to_u64().unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Segment, Switch};
    use crate::rational::{int, ratio};

    fn theta() -> TrainTrack {
        TrainTrack::new(
            "theta",
            vec![Segment::new("a"), Segment::new("b"), Segment::new("c")],
            vec![
                Switch::oriented("s1", &["c"], &["a", "b"]),
                Switch::oriented("s2", &["a", "b"], &["c"]),
            ],
        )
    }

    fn wv(t: &TrainTrack, v: Vec<Rational>) -> WeightVector {
        WeightVector::new(t.segment_ids(), v).unwrap()
    }

    #[test]
    fn theta_separatrix_is_compact() {
        let t = theta();
        let w = wv(&t, vec![int(1), int(1), int(2)]);
        let c: CuspId = "s1:B:0".parse().unwrap();
        let r = trace_separatrix(&t, &w, &c, Direction::Backward, 10).unwrap();
        assert_eq!(
            r.outcome,
            TraceOutcome::HitsCusp {
                target: "s2:A:0".parse().unwrap(),
                steps: 1
            }
        );
        assert_eq!(r.transcript, vec![("c".to_string(), int(1))]);
        let back = trace_separatrix(&t, &w, &"s2:A:0".parse().unwrap(), Direction::Forward, 10).unwrap();
        assert!(matches!(back.outcome, TraceOutcome::HitsCusp { ref target, .. } if target == &c));
    }

    #[test]
    fn direction_and_realization_errors() {
        let t = theta();
        let w = wv(&t, vec![int(1), int(1), int(2)]);
        let c: CuspId = "s1:B:0".parse().unwrap();
        assert!(matches!(
            trace_separatrix(&t, &w, &c, Direction::Forward, 10),
            Err(DynamicsError::Direction { .. })
        ));
        let w = wv(&t, vec![int(2), int(0), int(2)]);
        assert_eq!(
            trace_separatrix(&t, &w, &c, Direction::Backward, 10),
            Err(DynamicsError::CuspNotRealized("s1:B:0".into()))
        );
        let circle = TrainTrack::new("o", vec![Segment::closed("d")], vec![]);
        let w = wv(&circle, vec![int(1)]);
        assert_eq!(
            trace_separatrix(&circle, &w, &"s1:A:0".parse().unwrap(), Direction::Forward, 10),
            Err(DynamicsError::NoSuchCusp("s1:A:0".into()))
        );
    }

    #[test]
    fn irreducibility_verdicts() {
        let t = theta();
        let w = wv(&t, vec![int(1), int(1), int(2)]);
        assert!(matches!(
            is_irreducible(&t, &w, 100).unwrap(),
            Irreducibility::Reducible { .. }
        ));
        let w = wv(&t, vec![int(2), int(0), int(2)]);
        assert_eq!(
            is_irreducible(&t, &w, 100).unwrap(),
            Irreducibility::Irreducible { closed_leaves: true }
        );
        let circle = TrainTrack::new("o", vec![Segment::closed("d")], vec![]);
        assert_eq!(
            is_irreducible(&circle, &wv(&circle, vec![int(1)]), 1).unwrap(),
            Irreducibility::Irreducible { closed_leaves: true }
        );
    }

    #[test]
    fn rational_weights_trace_exactly() {
        let t = theta();
        let w = wv(&t, vec![ratio(2, 7), ratio(3, 7), ratio(5, 7)]);
        let bound = required_steps(&w);
        assert_eq!(bound, BigInt::from(11));
        let v = is_irreducible(&t, &w, steps_as_u64(&bound)).unwrap();
        let Irreducibility::Reducible { witness } = v else {
            panic!("expected a compact separatrix")
        };
        for (s, h) in &witness.transcript {
            let i = t.segment_index(s).unwrap();
            assert!(h > &int(0) && h < &w.values()[i]);
        }
    }
}
