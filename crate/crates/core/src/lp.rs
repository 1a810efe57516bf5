// SPDX-License-Identifier: Apache-2.0

//! Dense two-phase primal simplex with Bland's rule.
//!
//! The public entry point solves `min cᵀx  s.t.  A x ≥ b` over *free* `x` by
//! running the simplex on the dual `max bᵀy  s.t.  Aᵀy = c, y ≥ 0` and reading
//! `x` off the final simplex multipliers. The dual tableau has one row per
//! primal variable, which keeps it small when there are many more constraints
//! than variables.

use alloc::vec;
use alloc::vec::Vec;

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-9;
const FEAS_EPS: f64 = 1e-7;

/// One constraint `Σ coeffs[k].1 · x[coeffs[k].0] ≥ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    /// The primal constraints admit no point.
    Infeasible,
    /// The primal objective is unbounded below.
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: Status,
    /// Primal point (empty unless optimal).
    pub x: Vec<f64>,
    /// `cᵀx` at the returned point.
    pub value: f64,
    /// Optimal value of the dual program.
    pub dual_value: f64,
    pub pivots: usize,
}

/// Minimize `costs · x` over free `x` subject to `rows`.
pub fn minimize_free(costs: &[f64], rows: &[Row], max_pivots: usize) -> Solution {
    let m = costs.len();
    let p = rows.len();
    let fail = |status, pivots| Solution {
        status,
        x: Vec::new(),
        value: f64::NAN,
        dual_value: f64::NAN,
        pivots,
    };
    if m == 0 {
        return if rows.iter().all(|r| r.rhs <= FEAS_EPS) {
            Solution {
                status: Status::Optimal,
                x: Vec::new(),
                value: 0.0,
                dual_value: 0.0,
                pivots: 0,
            }
        } else {
            fail(Status::Infeasible, 0)
        };
    }

    // Dual equality system Aᵀy = c, one row per primal variable, with the
    // artificial identity block appended.
    let mut tab = Tableau::new(m, p + m);
    let mut sign = vec![1.0; m];
    for (i, &c) in costs.iter().enumerate() {
        if c < 0.0 {
            sign[i] = -1.0;
        }
        tab.set_rhs(i, sign[i] * c);
        tab.set(i, p + i, 1.0);
    }
    for (j, row) in rows.iter().enumerate() {
        for &(v, a) in &row.coeffs {
            let cur = tab.get(v, j);
            tab.set(v, j, cur + sign[v] * a);
        }
    }
    let mut basis: Vec<usize> = (p..p + m).collect();
    let mut pivots = 0usize;

    // Phase I: maximize −Σ artificials.
    let mut phase1_cost = vec![0.0; p + m];
    for c in &mut phase1_cost[p..] {
        *c = -1.0;
    }
    match run(&mut tab, &mut basis, &phase1_cost, p + m, &mut pivots, max_pivots) {
        Outcome::Optimal => {}
        Outcome::Unbounded => unreachable!("phase I objective is bounded above by 0"),
        Outcome::IterationLimit => return fail(Status::IterationLimit, pivots),
    }
    let infeas: f64 = basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= p)
        .map(|(r, _)| tab.rhs(r))
        .sum();
    if infeas > FEAS_EPS {
        // dual infeasible: primal is unbounded or infeasible; the primal has
        // a feasible point whenever it matters here, so report unbounded.
        return fail(Status::Unbounded, pivots);
    }
    // Drive zero-level artificials out of the basis where possible.
    for r in 0..m {
        if basis[r] >= p {
            if let Some(j) = (0..p).find(|&j| tab.get(r, j).abs() > PIVOT_EPS) {
                tab.pivot(r, j);
                basis[r] = j;
                pivots += 1;
            }
        }
    }

    // Phase II: maximize bᵀy; artificial columns may not re-enter.
    let mut cost = vec![0.0; p + m];
    for (j, row) in rows.iter().enumerate() {
        cost[j] = row.rhs;
    }
    match run(&mut tab, &mut basis, &cost, p, &mut pivots, max_pivots) {
        Outcome::Optimal => {}
        Outcome::Unbounded => return fail(Status::Infeasible, pivots),
        Outcome::IterationLimit => return fail(Status::IterationLimit, pivots),
    }

    // Simplex multipliers π = c_B B⁻¹, with B⁻¹ stored in the artificial block.
    let mut x = vec![0.0; m];
    for (i, xi) in x.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (r, &b) in basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                acc += cb * tab.get(r, p + i);
            }
        }
        *xi = sign[i] * acc;
    }
    let dual_value: f64 = basis
        .iter()
        .enumerate()
        .map(|(r, &b)| cost[b] * tab.rhs(r))
        .sum();
    let value = costs.iter().zip(&x).map(|(c, v)| c * v).sum();
    Solution {
        status: Status::Optimal,
        x,
        value,
        dual_value,
        pivots,
    }
}

/// Largest `rhs − a·x` over the rows (≤ 0 when feasible).
pub fn max_violation(rows: &[Row], x: &[f64]) -> f64 {
    rows.iter()
        .map(|r| r.rhs - r.coeffs.iter().map(|&(v, a)| a * x[v]).sum::<f64>())
        .fold(0.0, f64::max)
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

/// Maximizes `cost · y` from the current basis; only columns `< enter_limit` may enter.
fn run(
    tab: &mut Tableau,
    basis: &mut [usize],
    cost: &[f64],
    enter_limit: usize,
    pivots: &mut usize,
    max_pivots: usize,
) -> Outcome {
    let m = tab.rows;
    let mut reduced = vec![0.0; tab.cols];
    loop {
        // d_j = c_j − Σ_r c_{B_r} tab[r][j]
        reduced.copy_from_slice(&cost[..tab.cols]);
        for (r, &b) in basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                let row = tab.row(r);
                for (d, a) in reduced.iter_mut().zip(row) {
                    *d -= cb * a;
                }
            }
        }
        // Bland: lowest-index improving column
        let Some(enter) = (0..enter_limit).find(|&j| reduced[j] > COST_EPS) else {
            return Outcome::Optimal;
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for r in 0..m {
            let a = tab.get(r, enter);
            if a > PIVOT_EPS {
                let ratio = tab.rhs(r) / a;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best - 1e-12 || (ratio <= best + 1e-12 && basis[r] < basis[l])
                    }
                };
                if better {
                    best = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(leave) = leave else {
            return Outcome::Unbounded;
        };
        if *pivots >= max_pivots {
            return Outcome::IterationLimit;
        }
        tab.pivot(leave, enter);
        basis[leave] = enter;
        *pivots += 1;
    }
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// Row-major `rows × (cols + 1)`; the last entry of each row is the rhs.
    data: Vec<f64>,
}

impl Tableau {
    fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * (cols + 1)],
        }
    }

    #[inline]
    fn stride(&self) -> usize {
        self.cols + 1
    }

    #[inline]
    fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.stride() + c]
    }

    #[inline]
    fn set(&mut self, r: usize, c: usize, v: f64) {
        let s = self.stride();
        self.data[r * s + c] = v;
    }

    fn rhs(&self, r: usize) -> f64 {
        self.get(r, self.cols)
    }

    fn set_rhs(&mut self, r: usize, v: f64) {
        let c = self.cols;
        self.set(r, c, v);
    }

    fn row(&self, r: usize) -> &[f64] {
        let s = self.stride();
        &self.data[r * s..r * s + self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let s = self.stride();
        let piv = self.get(pr, pc);
        for v in &mut self.data[pr * s..(pr + 1) * s] {
            *v /= piv;
        }
        let pivot_row: Vec<f64> = self.data[pr * s..(pr + 1) * s].to_vec();
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let factor = self.data[r * s + pc];
            if factor != 0.0 {
                for (v, p) in self.data[r * s..(r + 1) * s].iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                self.data[r * s + pc] = 0.0;
            }
        }
    }
}
