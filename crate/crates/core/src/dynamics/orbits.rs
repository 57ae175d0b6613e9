//! Fate of each critical orbit, with a recurrence proxy for the ones that
//! stay near the unresolved set.

use serde::Serialize;

use super::attractors::{AttractorSet, Dynamics, OrbitEnd};
use crate::error::DynamicsError;
use crate::expr::RationalMap;
use crate::geometry::{spherical_distance, ExtendedComplex};

/// Minimum return distance below which recurrence is suspected.
pub const RECURRENCE_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "fate", rename_all = "snake_case")]
pub enum OrbitFate {
    Captured { attractor: usize, steps: usize },
    Lingers,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalOrbit {
    /// `[re, im]`, or `None` for the point at infinity.
    pub point: Option<[f64; 2]>,
    pub multiplicity: usize,
    #[serde(flatten)]
    pub fate: OrbitFate,
    /// `min_{lag <= n <= budget} d(c, f^n(c))` for orbits not captured.
    pub min_return_distance: Option<f64>,
    pub recurrence_suspected: bool,
    /// Modulus of the multiplier of a cycle the orbit reached, if any.
    pub cycle_multiplier: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalOrbitReport {
    pub budget: usize,
    pub lag: usize,
    pub orbits: Vec<CriticalOrbit>,
}

impl CriticalOrbitReport {
    pub fn julia_critical_points(&self) -> usize {
        self.orbits.iter().filter(|o| o.fate == OrbitFate::Lingers).count()
    }

    pub fn recurrence_suspected(&self) -> bool {
        self.orbits.iter().any(|o| o.recurrence_suspected)
    }
}

pub fn classify_critical_orbits(
    f: &RationalMap,
    attractors: &AttractorSet,
    budget: usize,
    lag: usize,
) -> Result<CriticalOrbitReport, DynamicsError> {
    let dynamics = Dynamics::new(f);
    let lag = lag.max(1);
    let mut orbits = Vec::new();
    for cp in f.critical_points()? {
        let point = cp.point.finite().map(|z| [z.re, z.im]);
        let trace = dynamics.trace(cp.point, budget);
        let located = |z: ExtendedComplex| attractors.locate(z, 1e-6);
        let (fate, cycle_multiplier) = match &trace.end {
            OrbitEnd::Escaped { steps } => (
                OrbitFate::Captured {
                    attractor: attractors.infinity.expect("escape implies an attracting infinity"),
                    steps: *steps,
                },
                Some(attractors.cycles[attractors.infinity.unwrap()].multiplier),
            ),
            OrbitEnd::Cycle { steps, cycle } => match located(cycle.points[0]) {
                Some(a) => (
                    OrbitFate::Captured {
                        attractor: a,
                        steps: *steps,
                    },
                    Some(cycle.multiplier),
                ),
                None => (OrbitFate::Lingers, Some(cycle.multiplier)),
            },
            OrbitEnd::Open => (OrbitFate::Lingers, None),
        };
        // infinity as a superattracting critical point is captured at step 0
        let fate = match (fate, cp.point.is_infinite(), attractors.infinity) {
            (OrbitFate::Lingers, true, Some(k)) => OrbitFate::Captured { attractor: k, steps: 0 },
            (fate, _, _) => fate,
        };
        let min_return_distance = match fate {
            OrbitFate::Captured { .. } => None,
            OrbitFate::Lingers => {
                let full = dynamics.orbit(cp.point, budget);
                full.iter()
                    .skip(lag)
                    .map(|&z| spherical_distance(cp.point, z))
                    .min_by(f64::total_cmp)
            }
        };
        orbits.push(CriticalOrbit {
            point,
            multiplicity: cp.multiplicity,
            recurrence_suspected: min_return_distance.is_some_and(|d| d < RECURRENCE_THRESHOLD),
            fate,
            min_return_distance,
            cycle_multiplier,
        });
    }
    Ok(CriticalOrbitReport { budget, lag, orbits })
}
