// SPDX-License-Identifier: Apache-2.0

//! Brute-force reference implementations used by the integration tests.

#![allow(dead_code)]

use kernineq_core::Kernel;

/// Least weight of a walk `i → … → j` with between 1 and `n` steps, by
/// enumerating every intermediate-vertex sequence.
pub fn walk_min(h: &Kernel, i: usize, j: usize) -> f64 {
    let n = h.n();
    let mut best = f64::INFINITY;
    for len in 1..=n {
        let inner = len - 1;
        let count = n.pow(inner as u32);
        for code in 0..count {
            let mut c = code;
            let mut prev = i;
            let mut w = 0.0;
            for _ in 0..inner {
                let v = c % n;
                c /= n;
                w += h.get(prev, v);
                prev = v;
            }
            w += h.get(prev, j);
            best = best.min(w);
        }
    }
    best
}

/// Every simple cycle as a vertex list `[v0, …, vk]` (closing edge `vk → v0`),
/// each listed once per rotation.
pub fn simple_cycles(n: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, path: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        out.push(path.clone());
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                path.push(v);
                extend(n, path, used, out);
                path.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..n {
        let mut used = vec![false; n];
        used[s] = true;
        extend(n, &mut vec![s], &mut used, &mut out);
    }
    out
}

pub fn cycle_sum(h: &Kernel, cycle: &[usize]) -> f64 {
    (0..cycle.len())
        .map(|t| h.get(cycle[t], cycle[(t + 1) % cycle.len()]))
        .sum()
}

pub fn lightest_simple_cycle(h: &Kernel) -> f64 {
    simple_cycles(h.n())
        .iter()
        .map(|c| cycle_sum(h, c))
        .fold(f64::INFINITY, f64::min)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting; `None` when
/// the matrix is (numerically) singular.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let m = b.len();
    for col in 0..m {
        let p = (col..m).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[p][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..m {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..m {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; m];
    for r in (0..m).rev() {
        let s: f64 = (r + 1..m).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Least `Σ G` with `G(f,g) + G(g,h) − G(f,h) ≥ |S(f,h) − S(f,g) − S(g,h)|` on
/// three points, by vertex enumeration.
///
/// Adding a coboundary to `G` changes neither the constraints nor the sum, so
/// the gauge `G(0,f) = G(f,0)` is imposed; what is left is a pointed
/// polyhedron in 7 unknowns, minimised at a vertex.
pub fn min_sum_g_n3(s: &Kernel) -> f64 {
    assert_eq!(s.n(), 3);
    let n = 3;
    // unknown index of each entry of G under the gauge
    let var = |i: usize, j: usize| -> usize {
        match (i.min(j), i.max(j), i <= j) {
            (0, 0, _) => 0,
            (0, 1, _) => 1,
            (0, 2, _) => 2,
            (1, 1, _) => 3,
            (2, 2, _) => 4,
            (1, 2, true) => 5,
            (1, 2, false) => 6,
            _ => unreachable!(),
        }
    };
    let mut cost = [0.0f64; 7];
    for i in 0..n {
        for j in 0..n {
            cost[var(i, j)] += 1.0;
        }
    }
    let mut rows: Vec<([i32; 7], f64)> = Vec::new();
    for f in 0..n {
        for g in 0..n {
            for h in 0..n {
                let d = (s.get(f, h) - s.get(f, g) - s.get(g, h)).abs();
                let mut c = [0i32; 7];
                c[var(f, g)] += 1;
                c[var(g, h)] += 1;
                c[var(f, h)] -= 1;
                match rows.iter_mut().find(|(rc, _)| *rc == c) {
                    Some(r) => r.1 = r.1.max(d),
                    None => rows.push((c, d)),
                }
            }
        }
    }
    rows.retain(|(c, d)| c.iter().any(|&x| x != 0) || *d > 0.0);
    let m = rows.len();
    let mut best = f64::INFINITY;
    combinations(m, 7, |active| {
        let a: Vec<Vec<f64>> = active
            .iter()
            .map(|&r| rows[r].0.iter().map(|&x| x as f64).collect())
            .collect();
        let b: Vec<f64> = active.iter().map(|&r| rows[r].1).collect();
        let Some(x) = solve(a, b) else { return };
        let feasible = rows.iter().all(|(c, d)| {
            let lhs: f64 = c.iter().zip(&x).map(|(&ci, xi)| ci as f64 * xi).sum();
            lhs >= d - 1e-9
        });
        if feasible {
            let v: f64 = cost.iter().zip(&x).map(|(c, x)| c * x).sum();
            best = best.min(v);
        }
    });
    best
}
