//! Solutions, feasibility rules for both variants, and the lexicographic
//! class-completion objective.

use std::cmp::Ordering;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::deadhead::DeadheadMatrix;
use crate::error::{Error, Result};
use crate::graph::{ArcId, Class, Instance, TIME_EPS};

/// Which servicing-order rule applies.
///
/// `P` requires every route to service its arcs in nondecreasing class order.
/// `U` lets lower-priority arcs be serviced early.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    P,
    U,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::P => "P",
            Variant::U => "U",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "p" | "P" => Ok(Variant::P),
            "u" | "U" => Ok(Variant::U),
            other => Err(format!("unknown variant `{other}` (expected p or u)")),
        }
    }
}

/// Serviced required arcs of one vehicle, in service order. The depot at both
/// ends is implicit.
pub type Route = Vec<ArcId>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Solution {
    /// One route per vehicle, indexed by vehicle.
    pub routes: Vec<Route>,
}

impl Solution {
    pub fn empty(num_vehicles: usize) -> Self {
        Self {
            routes: vec![Vec::new(); num_vehicles],
        }
    }

    pub fn num_serviced(&self) -> usize {
        self.routes.iter().map(Vec::len).sum()
    }
}

/// On-disk solution format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub variant: Variant,
    pub routes: Vec<Route>,
}

impl SolutionFile {
    pub fn new(variant: Variant, sol: &Solution) -> Self {
        Self {
            variant,
            routes: sol.routes.clone(),
        }
    }

    pub fn into_solution(self) -> (Variant, Solution) {
        (self.variant, Solution { routes: self.routes })
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json_string()?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }
}

/// Completion time per class, `t[k - 1]` for class `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HierarchicalObjective(pub Vec<f64>);

impl HierarchicalObjective {
    pub fn zeros(num_classes: usize) -> Self {
        Self(vec![0.0; num_classes])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Completion time of class `k` (1-based).
    pub fn class(&self, k: Class) -> f64 {
        self.0[k - 1]
    }

    /// Tolerant lexicographic order: the first entry differing by more than
    /// [`TIME_EPS`] decides. Lengths must match.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if (a - b).abs() > TIME_EPS {
                return if a < b { Ordering::Less } else { Ordering::Greater };
            }
        }
        Ordering::Equal
    }

    pub fn lex_less(&self, other: &Self) -> bool {
        self.lex_cmp(other) == Ordering::Less
    }

    /// Exact lexicographic total order, used wherever a reduction must not
    /// depend on evaluation order.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.len().cmp(&other.len())
    }

    pub fn delta(&self, before: &Self) -> Vec<f64> {
        self.0.iter().zip(&before.0).map(|(a, b)| a - b).collect()
    }
}

impl fmt::Display for HierarchicalObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t:.6}")?;
        }
        f.write_str(")")
    }
}

/// Checked form of [`HierarchicalObjective::lex_cmp`].
pub fn lex_compare(a: &HierarchicalObjective, b: &HierarchicalObjective) -> Result<Ordering> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.lex_cmp(b))
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolutionViolation {
    WrongRouteCount { expected: usize, found: usize },
    NotRequired(ArcId),
    Missing(ArcId),
    Duplicated(ArcId),
    Capacity { vehicle: usize, load: f64, capacity: f64 },
    ClassOrder { vehicle: usize, position: usize },
}

impl fmt::Display for SolutionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SolutionViolation::*;
        match self {
            WrongRouteCount { expected, found } => {
                write!(f, "expected {expected} routes, found {found}")
            }
            NotRequired(a) => write!(f, "arc {a} is not required"),
            Missing(a) => write!(f, "required arc {a} is not serviced"),
            Duplicated(a) => write!(f, "required arc {a} is serviced more than once"),
            Capacity {
                vehicle,
                load,
                capacity,
            } => write!(f, "capacity: vehicle {vehicle} load {load} exceeds {capacity}"),
            ClassOrder { vehicle, position } => write!(
                f,
                "class order: vehicle {vehicle} services a higher class before position {position}"
            ),
        }
    }
}

pub fn route_load(inst: &Instance, route: &[ArcId]) -> f64 {
    route.iter().map(|&a| inst.arcs[a].q).sum()
}

/// Whether a route's class sequence is nondecreasing.
pub fn is_class_monotone(inst: &Instance, route: &[ArcId]) -> bool {
    route.windows(2).all(|w| inst.arcs[w[0]].p <= inst.arcs[w[1]].p)
}

/// Coverage, capacity and (for `P`) per-route class order. Referencing an
/// arc id that does not exist is a fault.
pub fn check_feasible(
    inst: &Instance,
    sol: &Solution,
    variant: Variant,
) -> Result<Vec<SolutionViolation>> {
    let mut out = Vec::new();
    if sol.routes.len() != inst.num_vehicles {
        out.push(SolutionViolation::WrongRouteCount {
            expected: inst.num_vehicles,
            found: sol.routes.len(),
        });
    }
    let mut seen = vec![0usize; inst.arcs.len()];
    for (vehicle, route) in sol.routes.iter().enumerate() {
        for &a in route {
            let arc = inst.arcs.get(a).ok_or(Error::UnknownArc(a))?;
            if !arc.required {
                out.push(SolutionViolation::NotRequired(a));
            }
            seen[a] += 1;
        }
        let load = route_load(inst, route);
        if load > inst.capacity + TIME_EPS {
            out.push(SolutionViolation::Capacity {
                vehicle,
                load,
                capacity: inst.capacity,
            });
        }
        if variant == Variant::P {
            if let Some(i) = route
                .windows(2)
                .position(|w| inst.arcs[w[0]].p > inst.arcs[w[1]].p)
            {
                out.push(SolutionViolation::ClassOrder {
                    vehicle,
                    position: i + 1,
                });
            }
        }
    }
    for arc in inst.arcs.iter().filter(|a| a.required) {
        match seen[arc.id] {
            0 => out.push(SolutionViolation::Missing(arc.id)),
            1 => {}
            _ => out.push(SolutionViolation::Duplicated(arc.id)),
        }
    }
    Ok(out)
}

/// Simulates one route from the depot and writes, per class, the clock value
/// when its last arc on the route finishes service (0 when absent). The
/// return leg is not counted.
pub fn route_completions_into(
    inst: &Instance,
    mat: &DeadheadMatrix,
    route: &[ArcId],
    out: &mut [f64],
) {
    out.iter_mut().for_each(|t| *t = 0.0);
    let mut clock = 0.0;
    let mut at = inst.depot;
    for &a in route {
        let arc = &inst.arcs[a];
        clock += mat.sp(at, arc.tail) + arc.s;
        at = arc.head;
        out[arc.p - 1] = clock;
    }
}

pub fn route_completions(inst: &Instance, mat: &DeadheadMatrix, route: &[ArcId]) -> Vec<f64> {
    let mut out = vec![0.0; inst.num_classes];
    route_completions_into(inst, mat, route, &mut out);
    out
}

/// Objective without a feasibility check. Search code calls this on
/// solutions it keeps feasible itself.
pub fn objective(inst: &Instance, mat: &DeadheadMatrix, sol: &Solution) -> HierarchicalObjective {
    let mut t = vec![0.0; inst.num_classes];
    let mut buf = vec![0.0; inst.num_classes];
    for route in &sol.routes {
        route_completions_into(inst, mat, route, &mut buf);
        for (acc, v) in t.iter_mut().zip(&buf) {
            *acc = f64::max(*acc, *v);
        }
    }
    HierarchicalObjective(t)
}

/// Evaluates a solution, faulting when it is infeasible for `variant`.
pub fn evaluate(
    inst: &Instance,
    mat: &DeadheadMatrix,
    sol: &Solution,
    variant: Variant,
) -> Result<HierarchicalObjective> {
    let violations = check_feasible(inst, sol, variant)?;
    if !violations.is_empty() {
        return Err(Error::Infeasible(
            violations.iter().map(ToString::to_string).collect(),
        ));
    }
    Ok(objective(inst, mat, sol))
}
