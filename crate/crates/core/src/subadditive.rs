// SPDX-License-Identifier: Apache-2.0

//! Triangle-inequality kernels on finite sets.
//!
//! The sup over the potential family `{φ : φ(f) − φ(g) ≤ H(f,g)}` of
//! `φ(f) − φ(g)` is, by LP duality over path constraints, the all-pairs
//! shortest-path closure of `H`. [`triangle_closure`] computes that closure,
//! [`canonical_potentials`] reads optimal dual potentials off its columns and
//! [`sup_representation`] maps any family back to a kernel.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernel::{defect_scan, DefectKind, DefectReport, Kernel, PointSet, Potential};

/// Cycles lighter than this count as negative.
pub const NEGATIVE_CYCLE_THRESHOLD: f64 = -1e-12;

/// A finite family of potentials over one point set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PotentialFamily {
    pub points: PointSet,
    pub members: Vec<Vec<f64>>,
}

impl PotentialFamily {
    pub fn new(points: PointSet, members: Vec<Vec<f64>>) -> Result<Self> {
        for m in &members {
            // validates length and finiteness
            Potential::new(points.clone(), m.clone())?;
        }
        Ok(Self { points, members })
    }

    pub fn from_potentials(points: PointSet, members: &[Potential]) -> Result<Self> {
        for m in members {
            if m.points() != &points {
                return Err(Error::PointSetMismatch);
            }
        }
        Ok(Self {
            points,
            members: members.iter().map(|p| p.values().to_vec()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, i: usize) -> Potential {
        Potential::new(self.points.clone(), self.members[i].clone()).expect("validated on construction")
    }

    /// Largest `φ(f) − φ(g) − H(f,g)` over members and pairs; `≤ 0` means every
    /// member lies in the potential family of `h`.
    pub fn max_membership_excess(&self, h: &Kernel) -> Result<f64> {
        if h.points() != &self.points {
            return Err(Error::PointSetMismatch);
        }
        let n = self.points.len();
        let mut worst = f64::NEG_INFINITY;
        for phi in &self.members {
            for f in 0..n {
                for g in 0..n {
                    worst = worst.max(phi[f] - phi[g] - h.get(f, g));
                }
            }
        }
        Ok(worst)
    }
}

/// Min-plus closure over walks of length ≥ 1.
///
/// `H*(f,g)` is the least total weight of a walk `f → … → g` with at least one
/// step, so `H*(f,f)` is the lightest cycle through `f`. Fails with
/// [`Error::NegativeCycle`] when some cycle weighs less than
/// [`NEGATIVE_CYCLE_THRESHOLD`].
///
/// Relaxation is repeated until a pass changes nothing, so the result is a
/// fixed point in floating point too: closing it again is the identity.
pub fn triangle_closure(h: &Kernel) -> Result<Kernel> {
    let n = h.n();
    let mut d: Vec<f64> = h.values().to_vec();
    // pred[i*n+j]: vertex preceding j on the current best walk from i.
    let mut pred: Vec<usize> = (0..n * n).map(|p| p / n).collect();
    // Later passes only absorb rounding from summing in a different order.
    for _ in 0..=n {
        let mut changed = false;
        for k in 0..n {
            for i in 0..n {
                let dik = d[i * n + k];
                for j in 0..n {
                    let cand = dik + d[k * n + j];
                    if cand < d[i * n + j] {
                        d[i * n + j] = cand;
                        pred[i * n + j] = pred[k * n + j];
                        changed = true;
                        if i == j && cand < NEGATIVE_CYCLE_THRESHOLD {
                            return Err(negative_cycle(h, &pred, i));
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    if let Some(i) = (0..n).find(|&i| d[i * n + i] < NEGATIVE_CYCLE_THRESHOLD) {
        // only reachable through a negative self-loop in the input
        return Err(negative_cycle(h, &pred, i));
    }
    Kernel::from_flat(h.points().clone(), d)
}

fn negative_cycle(h: &Kernel, pred: &[usize], start: usize) -> Error {
    let cycle = trace_cycle(h, pred, start).unwrap_or_else(|| bellman_ford_cycle(h));
    Error::NegativeCycle {
        weight: cycle_weight(h, &cycle),
        cycle: cycle_labels(h.points(), &cycle),
    }
}

/// Walk the predecessor chain back from `start`; returns a simple negative cycle if the
/// chain yields one.
fn trace_cycle(h: &Kernel, pred: &[usize], start: usize) -> Option<Vec<usize>> {
    let n = h.n();
    let mut walk = vec![start];
    let mut cur = start;
    for _ in 0..=n {
        cur = pred[start * n + cur];
        if cur == start {
            walk.reverse();
            let cyc = simple_negative_subcycle(h, &walk)?;
            return Some(cyc);
        }
        walk.push(cur);
    }
    None
}

/// `walk` is a closed walk listed without its repeated endpoint. Returns a simple
/// cycle inside it with negative weight, if any.
fn simple_negative_subcycle(h: &Kernel, walk: &[usize]) -> Option<Vec<usize>> {
    if cycle_weight(h, walk) >= NEGATIVE_CYCLE_THRESHOLD {
        return None;
    }
    // Split at the first repeated vertex; one of the two closed pieces is negative.
    for j in 1..walk.len() {
        if let Some(i) = walk[..j].iter().position(|&v| v == walk[j]) {
            let inner: Vec<usize> = walk[i..j].to_vec();
            let mut outer: Vec<usize> = walk[..i].to_vec();
            outer.extend_from_slice(&walk[j..]);
            return simple_negative_subcycle(h, &inner)
                .or_else(|| simple_negative_subcycle(h, &outer));
        }
    }
    Some(walk.to_vec())
}

fn bellman_ford_cycle(h: &Kernel) -> Vec<usize> {
    let n = h.n();
    let mut dist = vec![0.0f64; n];
    let mut pred = vec![usize::MAX; n];
    let mut last = None;
    for _ in 0..=n {
        last = None;
        for u in 0..n {
            for v in 0..n {
                let c = dist[u] + h.get(u, v);
                if c < dist[v] {
                    dist[v] = c;
                    pred[v] = u;
                    last = Some(v);
                }
            }
        }
        if last.is_none() {
            break;
        }
    }
    let Some(mut v) = last else {
        return Vec::new();
    };
    for _ in 0..n {
        v = pred[v];
    }
    let mut cycle = vec![v];
    let mut u = pred[v];
    while u != v {
        cycle.push(u);
        u = pred[u];
    }
    cycle.reverse();
    cycle
}

/// Weight of the closed walk `c[0] → c[1] → … → c[last] → c[0]`.
pub fn cycle_weight(h: &Kernel, cycle: &[usize]) -> f64 {
    (0..cycle.len())
        .map(|i| h.get(cycle[i], cycle[(i + 1) % cycle.len()]))
        .sum()
}

fn cycle_labels(points: &PointSet, cycle: &[usize]) -> Vec<String> {
    cycle.iter().map(|&i| String::from(points.label(i))).collect()
}

/// The family `{φ_g : g ∈ X}` with `φ_g(x) = H*(x, g)`.
pub fn canonical_potentials(h: &Kernel) -> Result<PotentialFamily> {
    let closed = triangle_closure(h)?;
    Ok(canonical_from_closed(&closed))
}

fn canonical_from_closed(closed: &Kernel) -> PotentialFamily {
    let n = closed.n();
    PotentialFamily {
        points: closed.points().clone(),
        members: (0..n)
            .map(|g| (0..n).map(|x| closed.get(x, g)).collect())
            .collect(),
    }
}

/// `K(f,g) = max over members φ of φ(f) − φ(g)`.
pub fn sup_representation(family: &PotentialFamily) -> Result<Kernel> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    Kernel::from_fn(family.points.clone(), |f, g| {
        family
            .members
            .iter()
            .map(|phi| phi[f] - phi[g])
            .fold(f64::NEG_INFINITY, f64::max)
    })
}

/// Finite-domain check of the triangle-kernel representation theorem.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CtReport {
    pub triangle: DefectReport,
    /// Largest `|H(f,f)|`.
    pub max_abs_diagonal: f64,
    pub zero_diagonal: bool,
    /// `H` satisfies the triangle inequality and vanishes on the diagonal.
    pub hypotheses_hold: bool,
    /// Present when the closure found a negative cycle.
    pub negative_cycle: Option<Vec<String>>,
    /// `max |sup_representation(canonical_potentials(H)) − H|`, absent on a negative cycle.
    pub representation_error: Option<f64>,
    /// The canonical family reproduces `H` within tolerance.
    pub representation_matches: bool,
    /// `hypotheses_hold == representation_matches`.
    pub biconditional_holds: bool,
    pub tolerance: f64,
}

pub fn verify_corollary_ct(h: &Kernel, tolerance: f64) -> Result<CtReport> {
    let triangle = defect_scan(DefectKind::Triangle, &[h], tolerance)?;
    let max_abs_diagonal = h.diagonal().map(libm::fabs).fold(0.0, f64::max);
    let zero_diagonal = max_abs_diagonal <= tolerance;
    let hypotheses_hold = triangle.holds() && zero_diagonal;
    let (negative_cycle, representation_error) = match canonical_potentials(h) {
        Ok(family) => {
            let rep = sup_representation(&family)?;
            (None, Some(rep.max_abs_diff(h)?))
        }
        Err(Error::NegativeCycle { cycle, .. }) => (Some(cycle), None),
        Err(e) => return Err(e),
    };
    let representation_matches = representation_error.is_some_and(|e| e <= tolerance);
    Ok(CtReport {
        triangle,
        max_abs_diagonal,
        zero_diagonal,
        hypotheses_hold,
        negative_cycle,
        representation_error,
        representation_matches,
        biconditional_holds: hypotheses_hold == representation_matches,
        tolerance,
    })
}
