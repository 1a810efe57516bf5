// SPDX-License-Identifier: Apache-2.0

//! The additive inequality
//!
//! ```text
//! |S(f,h) − S(f,g) − S(g,h)| ≤ G(f,g) + G(g,h) − G(f,h)
//! ```
//!
//! Its solutions are exactly the pairs `S = H₁ − H₂`, `G = H₁ + H₂` (up to a
//! factor 2) with `H₁`, `H₂` triangle kernels. This module checks the
//! inequality, moves between the two descriptions, finds a cheapest `G` for a
//! given `S` by linear programming, and builds solutions from two potential
//! families.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernel::{additive_defect, defect_scan, DefectKind, DefectReport, Kernel};
use crate::lp::{self, Row};
use crate::subadditive::{sup_representation, PotentialFamily};

/// Residual scan of the additive inequality (kind `add`).
pub fn check_add(s: &Kernel, g: &Kernel, tolerance: f64) -> Result<DefectReport> {
    defect_scan(DefectKind::Add, &[s, g], tolerance)
}

/// `H₁ = G + S`, `H₂ = G − S` and the checks that go with them.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Decomposition {
    #[cfg_attr(feature = "serde", serde(skip))]
    pub h1: Kernel,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub h2: Kernel,
    /// Hypothesis: `(S, G)` satisfies the additive inequality.
    pub hypothesis: DefectReport,
    pub h1_triangle: DefectReport,
    pub h2_triangle: DefectReport,
    /// `S = ½H₁ − ½H₂` and `G = ½H₁ + ½H₂` hold bit for bit.
    pub inverse_bit_exact: bool,
    pub warnings: Vec<String>,
}

pub fn decompose_p2(s: &Kernel, g: &Kernel, tolerance: f64) -> Result<Decomposition> {
    let hypothesis = check_add(s, g, tolerance)?;
    let h1 = g.zip_with(s, |g, s| g + s)?;
    let h2 = g.zip_with(s, |g, s| g - s)?;
    let h1_triangle = defect_scan(DefectKind::Triangle, &[&h1], tolerance)?;
    let h2_triangle = defect_scan(DefectKind::Triangle, &[&h2], tolerance)?;
    let s_back = h1.zip_with(&h2, |a, b| 0.5 * a - 0.5 * b)?;
    let g_back = h1.zip_with(&h2, |a, b| 0.5 * a + 0.5 * b)?;
    let inverse_bit_exact = s_back.bit_eq(s) && g_back.bit_eq(g);

    let mut warnings = Vec::new();
    if !hypothesis.holds() {
        warnings.push(format!(
            "(S, G) violates the additive inequality on {} triple(s); worst {:e} at {:?}",
            hypothesis.violations, hypothesis.max_defect, hypothesis.argmax
        ));
    }
    if !inverse_bit_exact {
        warnings.push(String::from(
            "inverse relations hold only up to rounding, not bit for bit",
        ));
    }
    Ok(Decomposition {
        h1,
        h2,
        hypothesis,
        h1_triangle,
        h2_triangle,
        inverse_bit_exact,
        warnings,
    })
}

/// `S = H₁ − H₂`, `G = H₁ + H₂` and the checks that go with them.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Composition {
    #[cfg_attr(feature = "serde", serde(skip))]
    pub s: Kernel,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub g: Kernel,
    pub h1_triangle: DefectReport,
    pub h2_triangle: DefectReport,
    pub add: DefectReport,
    pub warnings: Vec<String>,
}

/// Builds a solution of the additive inequality from two triangle kernels.
///
/// With slacks `A = H₁(f,g) + H₁(g,h) − H₁(f,h)` and `B` likewise for `H₂`,
/// the defect of `S = H₁ − H₂` is `|B − A|` and the slack of `G = H₁ + H₂` is
/// `A + B`, so nonnegative slacks give a solution. The assignment
/// `S = H₁ + H₂`, `G = H₁ − H₂` does not work; see [`compose_p3_swapped`].
pub fn compose_p3(h1: &Kernel, h2: &Kernel, tolerance: f64) -> Result<Composition> {
    let s = h1.zip_with(h2, |a, b| a - b)?;
    let g = h1.zip_with(h2, |a, b| a + b)?;
    finish_composition(h1, h2, s, g, tolerance)
}

/// The swapped assignment `S = H₁ + H₂`, `G = H₁ − H₂`. Kept so the failure of
/// that form can be demonstrated: with `H₁ = H₂` a unit metric the defect at a
/// triple of distinct points is 2 while the slack is 0.
pub fn compose_p3_swapped(h1: &Kernel, h2: &Kernel, tolerance: f64) -> Result<Composition> {
    let s = h1.zip_with(h2, |a, b| a + b)?;
    let g = h1.zip_with(h2, |a, b| a - b)?;
    finish_composition(h1, h2, s, g, tolerance)
}

fn finish_composition(
    h1: &Kernel,
    h2: &Kernel,
    s: Kernel,
    g: Kernel,
    tolerance: f64,
) -> Result<Composition> {
    let h1_triangle = defect_scan(DefectKind::Triangle, &[h1], tolerance)?;
    let h2_triangle = defect_scan(DefectKind::Triangle, &[h2], tolerance)?;
    let add = check_add(&s, &g, tolerance)?;
    let mut warnings = Vec::new();
    for (name, r) in [("H1", &h1_triangle), ("H2", &h2_triangle)] {
        if !r.holds() {
            warnings.push(format!(
                "{name} violates the triangle inequality; worst {:e} at {:?}",
                r.max_defect, r.argmax
            ));
        }
    }
    Ok(Composition {
        s,
        g,
        h1_triangle,
        h2_triangle,
        add,
        warnings,
    })
}

/// What [`synthesize_min_g`] minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Objective {
    /// Sum of all entries of `G`.
    Sum,
    /// Largest entry of `G`.
    Max,
}

impl core::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Objective::Sum),
            "max" => Ok(Objective::Max),
            _ => Err(Error::InvalidArgument("objective must be `sum` or `max`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SynthOptions {
    /// Force `G(f,g) = G(g,f)`.
    pub symmetric: bool,
    /// Force `G(f,f) = 0`.
    pub zero_diagonal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum LpStatus {
    Optimal,
    /// No feasible `G`. Without extra constraints this cannot happen, so
    /// seeing it then means a solver bug.
    InfeasibleGuard,
    NumericalFailure,
}

/// Result of [`synthesize_min_g`].
#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub g: Option<Kernel>,
    pub objective: Objective,
    /// Objective evaluated on `g` (NaN unless optimal).
    pub value: f64,
    /// Largest `D(f,g,h) − (G(f,g) + G(g,h) − G(f,h))`, clipped at 0.
    pub max_constraint_violation: f64,
    pub pivots: usize,
    pub options: SynthOptions,
    pub diagnostics: Option<String>,
}

/// Largest supported point count.
pub const MAX_SYNTH_POINTS: usize = 20;
const MAX_PIVOTS: usize = 200_000;

/// Cheapest `G` making `(S, G)` satisfy the additive inequality.
pub fn synthesize_min_g(s: &Kernel, objective: Objective, options: SynthOptions) -> Result<LpOutcome> {
    let n = s.n();
    if n > MAX_SYNTH_POINTS {
        return Err(Error::InvalidArgument("synthesize_min_g supports at most 20 points"));
    }
    // Variable index for each entry of G; None when pinned to zero.
    let mut var_of = vec![None; n * n];
    let mut nvars = 0usize;
    for i in 0..n {
        for j in 0..n {
            if options.zero_diagonal && i == j {
                continue;
            }
            if options.symmetric && j < i {
                var_of[i * n + j] = var_of[j * n + i];
                continue;
            }
            var_of[i * n + j] = Some(nvars);
            nvars += 1;
        }
    }

    // Deduplicate triple constraints by coefficient pattern, keeping the largest rhs.
    let mut unique: BTreeMap<Vec<(usize, i32)>, f64> = BTreeMap::new();
    let mut pinned_excess = 0.0f64;
    for f in 0..n {
        for g in 0..n {
            for h in 0..n {
                let rhs = additive_defect(s, f, g, h);
                let mut coeffs: Vec<(usize, i32)> = Vec::with_capacity(3);
                for (entry, c) in [(f * n + g, 1), (g * n + h, 1), (f * n + h, -1)] {
                    if let Some(v) = var_of[entry] {
                        match coeffs.iter_mut().find(|(w, _)| *w == v) {
                            Some(slot) => slot.1 += c,
                            None => coeffs.push((v, c)),
                        }
                    }
                }
                coeffs.retain(|&(_, c)| c != 0);
                coeffs.sort_unstable();
                if coeffs.is_empty() {
                    pinned_excess = pinned_excess.max(rhs);
                    continue;
                }
                let slot = unique.entry(coeffs).or_insert(f64::NEG_INFINITY);
                *slot = slot.max(rhs);
            }
        }
    }
    let mut rows: Vec<Row> = unique
        .into_iter()
        .map(|(coeffs, rhs)| Row {
            coeffs: coeffs.into_iter().map(|(v, c)| (v, f64::from(c))).collect(),
            rhs,
        })
        .collect();

    let fail = |status, pivots, diagnostics: String| LpOutcome {
        status,
        g: None,
        objective,
        value: f64::NAN,
        max_constraint_violation: f64::NAN,
        pivots,
        options,
        diagnostics: Some(diagnostics),
    };
    if pinned_excess > 1e-12 {
        return Ok(fail(
            LpStatus::InfeasibleGuard,
            0,
            format!("pinned entries force 0 ≥ {pinned_excess:e}"),
        ));
    }

    let mut costs = vec![0.0; nvars];
    match objective {
        Objective::Sum => {
            for v in var_of.iter().flatten() {
                costs[*v] += 1.0;
            }
        }
        Objective::Max => {
            // t ≥ G(f,g) for every entry; t is the last variable.
            let t = nvars;
            costs.push(1.0);
            let mut seen = vec![false; nvars];
            for v in var_of.iter().flatten() {
                if !seen[*v] {
                    seen[*v] = true;
                    rows.push(Row {
                        coeffs: vec![(t, 1.0), (*v, -1.0)],
                        rhs: 0.0,
                    });
                }
            }
            if var_of.iter().any(Option::is_none) {
                rows.push(Row {
                    coeffs: vec![(t, 1.0)],
                    rhs: 0.0,
                });
            }
        }
    }

    let sol = lp::minimize_free(&costs, &rows, MAX_PIVOTS);
    match sol.status {
        lp::Status::Optimal => {}
        lp::Status::Infeasible | lp::Status::Unbounded => {
            return Ok(fail(
                LpStatus::InfeasibleGuard,
                sol.pivots,
                format!("simplex reported {:?}", sol.status),
            ))
        }
        lp::Status::IterationLimit => {
            return Ok(fail(
                LpStatus::NumericalFailure,
                sol.pivots,
                format!("pivot limit {MAX_PIVOTS} reached"),
            ))
        }
    }

    let g = Kernel::from_fn(s.points().clone(), |i, j| match var_of[i * n + j] {
        Some(v) => sol.x[v],
        None => 0.0,
    })?;
    let max_constraint_violation = crate::kernel::scan_triples(s.points(), DefectKind::Add, 0.0, |f, gg, h| {
        additive_defect(s, f, gg, h) - crate::kernel::additive_slack(&g, f, gg, h)
    })
    .max_defect
    .max(0.0);
    let value = objective_value(&g, objective);
    let mut diagnostics = None;
    let gap = libm::fabs(value - sol.dual_value);
    if gap > 1e-7 * value.abs().max(1.0) {
        diagnostics = Some(format!("primal/dual gap {gap:e}"));
    }
    if max_constraint_violation > 1e-7 {
        return Ok(LpOutcome {
            status: LpStatus::NumericalFailure,
            g: Some(g),
            objective,
            value,
            max_constraint_violation,
            pivots: sol.pivots,
            options,
            diagnostics: Some(format!(
                "recovered G violates a constraint by {max_constraint_violation:e}"
            )),
        });
    }
    Ok(LpOutcome {
        status: LpStatus::Optimal,
        g: Some(g),
        objective,
        value,
        max_constraint_violation,
        pivots: sol.pivots,
        options,
        diagnostics,
    })
}

pub fn objective_value(g: &Kernel, objective: Objective) -> f64 {
    match objective {
        Objective::Sum => g.values().iter().sum(),
        Objective::Max => g.max_entry(),
    }
}

/// Solution of the additive inequality built from two potential families.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ChOutcome {
    #[cfg_attr(feature = "serde", serde(skip))]
    pub s: Kernel,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub g: Kernel,
    pub add: DefectReport,
    /// `S` and `G` vanish on the diagonal.
    pub zero_diagonal: bool,
    /// Largest `φ(f) − φ(g) − ½(G+S)(f,g)` over the first family.
    pub family1_excess: f64,
    /// Largest `ψ(f) − ψ(g) − ½(G−S)(f,g)` over the second family.
    pub family2_excess: f64,
    /// All four conclusions hold within tolerance.
    pub holds: bool,
}

/// `S = sup₁ − sup₂`, `G = sup₁ + sup₂` with `supₖ(f,g) = max over family k of φ(f) − φ(g)`.
pub fn build_ch(f1: &PotentialFamily, f2: &PotentialFamily, tolerance: f64) -> Result<ChOutcome> {
    if f1.points != f2.points {
        return Err(Error::PointSetMismatch);
    }
    let sup1 = sup_representation(f1)?;
    let sup2 = sup_representation(f2)?;
    let s = sup1.zip_with(&sup2, |a, b| a - b)?;
    let g = sup1.zip_with(&sup2, |a, b| a + b)?;
    let add = check_add(&s, &g, tolerance)?;
    let zero_diagonal = s.diagonal().chain(g.diagonal()).all(|d| d == 0.0);
    let half_plus = g.zip_with(&s, |g, s| 0.5 * (g + s))?;
    let half_minus = g.zip_with(&s, |g, s| 0.5 * (g - s))?;
    let family1_excess = f1.max_membership_excess(&half_plus)?;
    let family2_excess = f2.max_membership_excess(&half_minus)?;
    let holds = add.holds()
        && zero_diagonal
        && family1_excess <= tolerance
        && family2_excess <= tolerance;
    Ok(ChOutcome {
        s,
        g,
        add,
        zero_diagonal,
        family1_excess,
        family2_excess,
        holds,
    })
}
