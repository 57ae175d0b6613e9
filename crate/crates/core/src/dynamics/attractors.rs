//! Attracting cycles found by following critical orbits.

use num_complex::Complex64;

use super::chart::{chart, from_chart, Stepper};
use crate::error::DynamicsError;
use crate::expr::RationalMap;
use crate::geometry::{spherical_distance, ExtendedComplex};

/// Chordal distance that counts as a return to an earlier orbit point.
pub const NEAR_RETURN: f64 = 1e-8;
pub const MAX_PERIOD: usize = 64;
/// Cycles with multiplier modulus within this of 1 are treated as parabolic.
pub const PARABOLIC_MARGIN: f64 = 1e-3;
/// Cycles closer than this (chordal) are the same cycle.
const SAME_CYCLE: f64 = 1e-6;
/// Largest best-period gap at the end of a budget that still triggers a
/// parabolic probe.
const PARABOLIC_PROBE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    pub points: Vec<ExtendedComplex>,
    pub period: usize,
    /// Modulus of the multiplier `(f^p)'` along the cycle.
    pub multiplier: f64,
}

impl Cycle {
    pub fn distance_to(&self, z: ExtendedComplex) -> f64 {
        self.points
            .iter()
            .map(|&c| spherical_distance(z, c))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractorSet {
    /// Attracting cycles; an attractor id is an index into this list.
    pub cycles: Vec<Cycle>,
    /// Index of the fixed point at infinity, when it attracts.
    pub infinity: Option<usize>,
    /// Orbits beyond this modulus count as captured by infinity.
    pub escape_radius: f64,
}

impl AttractorSet {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Attractor containing `z` within chordal distance `tol`.
    pub fn locate(&self, z: ExtendedComplex, tol: f64) -> Option<usize> {
        self.cycles.iter().position(|c| c.distance_to(z) < tol)
    }
}

pub fn escape_radius(f: &RationalMap) -> f64 {
    (2.0 * f.coefficient_mass()).max(4.0)
}

/// How a single orbit ended within its budget.
#[derive(Debug, Clone, PartialEq)]
pub enum OrbitEnd {
    /// Crossed the escape radius while infinity attracts.
    Escaped { steps: usize },
    /// Returned near an earlier point; the polished cycle it found.
    Cycle { steps: usize, cycle: Cycle },
    /// No return within the budget.
    Open,
}

#[derive(Debug, Clone)]
pub struct OrbitTrace {
    pub orbit: Vec<ExtendedComplex>,
    pub end: OrbitEnd,
}

pub(crate) struct Dynamics {
    pub stepper: Stepper,
    pub escape_radius: f64,
    pub infinity_attracts: bool,
}

impl Dynamics {
    pub fn new(f: &RationalMap) -> Self {
        let stepper = Stepper::new(f);
        let st = stepper.step(ExtendedComplex::Infinity);
        let infinity_attracts = st.image.is_infinite() && st.chart_derivative.norm() < 1.0 - PARABOLIC_MARGIN;
        Self {
            stepper,
            escape_radius: escape_radius(f),
            infinity_attracts,
        }
    }

    fn escaped(&self, z: ExtendedComplex) -> bool {
        self.infinity_attracts
            && match z {
                ExtendedComplex::Infinity => true,
                ExtendedComplex::Finite(w) => w.norm() > self.escape_radius,
            }
    }

    pub fn trace(&self, start: ExtendedComplex, budget: usize) -> OrbitTrace {
        let mut orbit = vec![start];
        let mut z = start;
        for n in 1..=budget {
            if self.escaped(z) {
                return OrbitTrace {
                    orbit,
                    end: OrbitEnd::Escaped { steps: n - 1 },
                };
            }
            z = self.stepper.image(z);
            orbit.push(z);
            for p in 1..=n.min(MAX_PERIOD) {
                if spherical_distance(z, orbit[n - p]) < NEAR_RETURN {
                    let cycle = self.polish(z, p);
                    return OrbitTrace {
                        orbit,
                        end: OrbitEnd::Cycle { steps: n, cycle },
                    };
                }
            }
        }
        OrbitTrace {
            orbit,
            end: OrbitEnd::Open,
        }
    }

    /// `budget` further orbit points after `start`, without stopping.
    pub fn orbit(&self, start: ExtendedComplex, budget: usize) -> Vec<ExtendedComplex> {
        let mut out = Vec::with_capacity(budget + 1);
        let mut z = start;
        out.push(z);
        for _ in 0..budget {
            z = self.stepper.image(z);
            out.push(z);
        }
        out
    }

    /// `f^p` in the chart of `u`, with its derivative.
    fn iterate_in_chart(&self, u: Complex64, inverted: bool, p: usize) -> (Complex64, Complex64) {
        let mut z = from_chart(u, inverted);
        let mut deriv = Complex64::new(1.0, 0.0);
        for _ in 0..p {
            let st = self.stepper.step(z);
            deriv *= st.chart_derivative;
            z = st.image;
        }
        let (mut v, end_inverted) = chart(z);
        if end_inverted != inverted {
            // near the unit circle the two charts meet; express v in ours
            deriv *= -v.inv() * v.inv();
            v = v.inv();
        }
        (v, deriv)
    }

    /// Newton's method on `f^p(u) = u` from `z`, then the cycle through it.
    pub fn polish(&self, z: ExtendedComplex, p: usize) -> Cycle {
        let (mut u, inverted) = chart(z);
        for _ in 0..100 {
            let (v, d) = self.iterate_in_chart(u, inverted, p);
            let denom = d - 1.0;
            if denom.norm() == 0.0 || !v.re.is_finite() || !v.im.is_finite() {
                break;
            }
            let delta = (v - u) / denom;
            if !delta.re.is_finite() || !delta.im.is_finite() || delta.norm() > 0.5 {
                break;
            }
            u -= delta;
            if delta.norm() <= 1e-15 * (1.0 + u.norm()) {
                break;
            }
        }
        let base = from_chart(u, inverted);
        // keep the raw point when Newton wandered off
        let base = if spherical_distance(base, z) < 1e-4 { base } else { z };
        self.cycle_through(base, p)
    }

    fn cycle_through(&self, base: ExtendedComplex, p: usize) -> Cycle {
        let mut points = Vec::with_capacity(p);
        let mut multiplier = 1.0;
        let mut z = base;
        for _ in 0..p {
            points.push(z);
            let st = self.stepper.step(z);
            multiplier *= st.chart_derivative.norm();
            z = st.image;
        }
        Cycle {
            points,
            period: p,
            multiplier,
        }
    }

    /// For an orbit that never returned: the period with the smallest gap at
    /// the tail, polished, if the gap is small enough to suggest slow
    /// convergence.
    pub fn probe_tail(&self, orbit: &[ExtendedComplex]) -> Option<Cycle> {
        let n = orbit.len() - 1;
        let last = orbit[n];
        let (p, gap) = (1..=n.min(MAX_PERIOD))
            .map(|p| (p, spherical_distance(last, orbit[n - p])))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        if gap > PARABOLIC_PROBE {
            return None;
        }
        let c = self.polish(last, p);
        (c.distance_to(last) < PARABOLIC_PROBE).then_some(c)
    }
}

fn is_parabolic(m: f64) -> bool {
    (1.0 - PARABOLIC_MARGIN..=1.0 + PARABOLIC_MARGIN).contains(&m)
}

fn parabolic(c: &Cycle) -> DynamicsError {
    DynamicsError::ParabolicSuspected {
        period: c.period,
        multiplier: c.multiplier,
    }
}

/// Follows every critical orbit for up to `budget` steps and collects the
/// attracting cycles they reach. Finite cycles come first in order of
/// discovery; an attracting infinity is last.
pub fn detect_attractors(f: &RationalMap, budget: usize) -> Result<AttractorSet, DynamicsError> {
    detect(f, budget, false).map(|(set, _)| set)
}

/// As [`detect_attractors`], but parabolic cycles are returned alongside
/// the attracting ones instead of failing. Their basins stay unlabelled.
pub fn detect_attractors_allowing_parabolic(
    f: &RationalMap,
    budget: usize,
) -> Result<(AttractorSet, Vec<Cycle>), DynamicsError> {
    detect(f, budget, true)
}

fn detect(f: &RationalMap, budget: usize, allow_parabolic: bool) -> Result<(AttractorSet, Vec<Cycle>), DynamicsError> {
    if f.degree() < 2 {
        return Err(DynamicsError::DegreeTooLow(f.degree()));
    }
    let dynamics = Dynamics::new(f);
    let at_infinity = dynamics.cycle_through(ExtendedComplex::Infinity, 1);
    let mut parabolic_cycles: Vec<Cycle> = Vec::new();
    if dynamics.stepper.image(ExtendedComplex::Infinity).is_infinite() && is_parabolic(at_infinity.multiplier) {
        if !allow_parabolic {
            return Err(parabolic(&at_infinity));
        }
        parabolic_cycles.push(at_infinity.clone());
    }
    let mut cycles: Vec<Cycle> = Vec::new();
    for cp in f.critical_points()? {
        if dynamics.infinity_attracts && cp.point.is_infinite() {
            continue;
        }
        let trace = dynamics.trace(cp.point, budget);
        let cycle = match trace.end {
            OrbitEnd::Cycle { cycle, .. } => cycle,
            OrbitEnd::Open => match dynamics.probe_tail(&trace.orbit) {
                Some(c) if is_parabolic(c.multiplier) => c,
                _ => continue,
            },
            OrbitEnd::Escaped { .. } => continue,
        };
        if is_parabolic(cycle.multiplier) {
            if !allow_parabolic {
                return Err(parabolic(&cycle));
            }
            if !cycle.points.iter().any(|&z| parabolic_cycles.iter().any(|c| c.distance_to(z) < SAME_CYCLE)) {
                parabolic_cycles.push(cycle);
            }
            continue;
        }
        if cycle.multiplier >= 1.0 {
            continue;
        }
        if cycle.points.iter().any(|&z| cycles.iter().any(|c| c.distance_to(z) < SAME_CYCLE)) {
            continue;
        }
        cycles.push(cycle);
    }
    let infinity = if dynamics.infinity_attracts {
        // a critical orbit may already have converged to infinity as a cycle
        match cycles.iter().position(|c| c.points.iter().any(|p| p.is_infinite())) {
            Some(k) => {
                let c = cycles.remove(k);
                cycles.push(c);
            }
            None => cycles.push(at_infinity),
        }
        Some(cycles.len() - 1)
    } else {
        None
    };
    if cycles.is_empty() {
        return Err(DynamicsError::NoAttractorFound { budget });
    }
    Ok((
        AttractorSet {
            cycles,
            infinity,
            escape_radius: dynamics.escape_radius,
        },
        parabolic_cycles,
    ))
}
