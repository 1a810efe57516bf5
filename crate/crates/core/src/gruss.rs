// SPDX-License-Identifier: Apache-2.0

//! Integral means on uniform grids, the classical Grüss inequality, and
//! Grüss/Richard-type expressions for vectors with the cosine functional.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::{substream_seed, Rng};

/// Samples `f(x_i)`, `x_i = a + i(b − a)/N`, `i = 0..=N`, on `[a, b]`.
///
/// A jump at an interior node `x_k` is recorded in `breaks` as `(k, left
/// limit)`; `values[k]` then holds the right limit, and quadrature treats
/// `[x_0, x_k]` and `[x_k, x_N]` as separate panels.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSample {
    a: f64,
    b: f64,
    values: Vec<f64>,
    bounds: Option<(f64, f64)>,
    breaks: Vec<(usize, f64)>,
}

/// Which composite rule the mean used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Rule {
    Simpson,
    /// Trapezoid on every panel (all panels have an odd number of intervals).
    Trapezoid,
    /// Simpson on even panels, trapezoid on odd ones.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Mean {
    pub value: f64,
    pub rule: Rule,
    pub intervals: usize,
}

impl FunctionSample {
    pub fn new(a: f64, b: f64, values: Vec<f64>, bounds: Option<(f64, f64)>) -> Result<Self> {
        Self::with_breaks(a, b, values, bounds, Vec::new())
    }

    pub fn with_breaks(
        a: f64,
        b: f64,
        values: Vec<f64>,
        bounds: Option<(f64, f64)>,
        mut breaks: Vec<(usize, f64)>,
    ) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInterval { a, b });
        }
        if values.len() < 3 {
            return Err(Error::TooFewIntervals(values.len().saturating_sub(1)));
        }
        let n = values.len() - 1;
        if let Some(p) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: p, col: 0 });
        }
        breaks.sort_by_key(|&(k, _)| k);
        for w in breaks.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidArgument("duplicate break index"));
            }
        }
        for &(k, left) in &breaks {
            if k == 0 || k >= n {
                return Err(Error::InvalidArgument("break index must be interior"));
            }
            if !left.is_finite() {
                return Err(Error::NonFinite { row: k, col: 1 });
            }
        }
        if let Some((lo, hi)) = bounds {
            if !(lo <= hi) {
                return Err(Error::InvalidArgument("lower bound exceeds upper bound"));
            }
            let all = values
                .iter()
                .copied()
                .enumerate()
                .chain(breaks.iter().map(|&(k, v)| (k, v)));
            for (i, v) in all {
                if v < lo || v > hi {
                    return Err(Error::OutOfBounds {
                        index: i,
                        value: v,
                        lo,
                        hi,
                    });
                }
            }
        }
        Ok(Self {
            a,
            b,
            values,
            bounds,
            breaks,
        })
    }

    /// Samples `f` on `N` uniform intervals.
    pub fn from_fn(a: f64, b: f64, intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = (b - a) / intervals as f64;
        let values = (0..=intervals).map(|i| f(a + i as f64 * h)).collect();
        Self::new(a, b, values, None)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn breaks(&self) -> &[(usize, f64)] {
        &self.breaks
    }

    pub fn declared_bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }

    /// Min and max over all samples and left limits.
    pub fn sampled_bounds(&self) -> (f64, f64) {
        self.values
            .iter()
            .chain(self.breaks.iter().map(|(_, v)| v))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    fn left_limit(&self, k: usize) -> f64 {
        match self.breaks.binary_search_by_key(&k, |&(i, _)| i) {
            Ok(p) => self.breaks[p].1,
            Err(_) => self.values[k],
        }
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && self.values.len() == other.values.len()
    }

    /// Pointwise combination on a shared grid; breaks are merged.
    pub fn combine(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| op(x, y))
            .collect();
        let mut idx: Vec<usize> = self
            .breaks
            .iter()
            .chain(&other.breaks)
            .map(|&(k, _)| k)
            .collect();
        idx.sort_unstable();
        idx.dedup();
        let breaks = idx
            .into_iter()
            .map(|k| (k, op(self.left_limit(k), other.left_limit(k))))
            .collect();
        Self::with_breaks(self.a, self.b, values, None, breaks)
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        self.combine(other, |x, y| x * y)
    }

    pub fn map(&self, op: impl Fn(f64) -> f64) -> Result<Self> {
        let values = self.values.iter().map(|&v| op(v)).collect();
        let breaks = self.breaks.iter().map(|&(k, v)| (k, op(v))).collect();
        Self::with_breaks(self.a, self.b, values, None, breaks)
    }
}

/// `I(f) = (1/(b − a)) ∫ f` by composite Simpson per panel (trapezoid on panels
/// with an odd number of intervals).
///
/// The weighted sum is taken over `f − f(a)` and `f(a)` added back, which makes
/// constants exact.
pub fn integral_mean(f: &FunctionSample) -> Mean {
    let n = f.intervals();
    let base = f.values[0];
    let mut cuts: Vec<usize> = vec![0];
    cuts.extend(f.breaks.iter().map(|&(k, _)| k));
    cuts.push(n);

    let (mut simpson, mut trapezoid) = (false, false);
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        let (s, e) = (w[0], w[1]);
        let len = e - s;
        let at = |i: usize| {
            let v = if i == e { f.left_limit(e) } else { f.values[i] };
            v - base
        };
        if len % 2 == 0 {
            simpson = true;
            let mut sum = at(s) + at(e);
            for i in s + 1..e {
                sum += if (i - s) % 2 == 1 { 4.0 * at(i) } else { 2.0 * at(i) };
            }
            acc += sum / (3.0 * n as f64);
        } else {
            trapezoid = true;
            let mut sum = 0.5 * (at(s) + at(e));
            for i in s + 1..e {
                sum += at(i);
            }
            acc += sum / n as f64;
        }
    }
    let rule = match (simpson, trapezoid) {
        (true, false) => Rule::Simpson,
        (false, true) => Rule::Trapezoid,
        _ => Rule::Mixed,
    };
    Mean {
        value: base + acc,
        rule,
        intervals: n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum BoundsSource {
    Declared,
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GrussReport {
    pub mean_f: f64,
    pub mean_g: f64,
    pub mean_fg: f64,
    /// `|I(fg) − I(f)I(g)|`
    pub lhs: f64,
    /// `¼(M_f − m_f)(M_g − m_g)`
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub bounds_f: [f64; 2],
    pub bounds_g: [f64; 2],
    pub bounds_f_source: BoundsSource,
    pub bounds_g_source: BoundsSource,
    pub rule: Rule,
    pub intervals: usize,
    pub tolerance: f64,
}

fn bounds_of(f: &FunctionSample) -> ((f64, f64), BoundsSource) {
    match f.bounds {
        Some(b) => (b, BoundsSource::Declared),
        None => (f.sampled_bounds(), BoundsSource::Sampled),
    }
}

pub fn gruss_check(f: &FunctionSample, g: &FunctionSample, tolerance: f64) -> Result<GrussReport> {
    let fg = f.product(g)?;
    let mf = integral_mean(f);
    let mg = integral_mean(g);
    let mfg = integral_mean(&fg);
    let lhs = libm::fabs(mfg.value - mf.value * mg.value);
    let ((mlo, mhi), sf) = bounds_of(f);
    let ((glo, ghi), sg) = bounds_of(g);
    let rhs = 0.25 * (mhi - mlo) * (ghi - glo);
    let slack = rhs - lhs;
    let rule = if mf.rule == mg.rule && mg.rule == mfg.rule {
        mfg.rule
    } else {
        Rule::Mixed
    };
    Ok(GrussReport {
        mean_f: mf.value,
        mean_g: mg.value,
        mean_fg: mfg.value,
        lhs,
        rhs,
        slack,
        holds: slack >= -tolerance,
        bounds_f: [mlo, mhi],
        bounds_g: [glo, ghi],
        bounds_f_source: sf,
        bounds_g_source: sg,
        rule,
        intervals: f.intervals(),
        tolerance,
    })
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Cosine value and whether round-off pushed it outside `[−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cosine {
    pub value: f64,
    pub clamped: bool,
}

/// `⟨u, v⟩ / (‖u‖‖v‖)`, clamped to `[−1, 1]`.
pub fn cosine_functional(u: &[f64], v: &[f64]) -> Result<Cosine> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch);
    }
    let uu = dot(u, u);
    let vv = dot(v, v);
    if uu == 0.0 || vv == 0.0 {
        return Err(Error::ZeroVector);
    }
    let raw = dot(u, v) / libm::sqrt(uu * vv);
    let value = raw.clamp(-1.0, 1.0);
    Ok(Cosine {
        value,
        clamped: value != raw,
    })
}

/// Three nonzero vectors of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorTriple {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
}

impl VectorTriple {
    pub fn new(f: Vec<f64>, g: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        if f.is_empty() || f.len() != g.len() || g.len() != h.len() {
            return Err(Error::DimensionMismatch);
        }
        for v in [&f, &g, &h] {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument("vector entries must be finite"));
            }
            if dot(v, v) == 0.0 {
                return Err(Error::ZeroVector);
            }
        }
        Ok(Self { f, g, h })
    }
}

/// `|⟨f,h⟩ − ⟨f,g⟩⟨g,h⟩|` when `normalize_g` (requires `‖g‖ = 1`), otherwise
/// `|⟨f,h⟩ − ⟨f,g⟩⟨g,h⟩ / ‖g‖²|`.
pub fn gruss_expression(t: &VectorTriple, normalize_g: bool) -> Result<f64> {
    let fh = dot(&t.f, &t.h);
    let fg = dot(&t.f, &t.g);
    let gh = dot(&t.g, &t.h);
    let gg = dot(&t.g, &t.g);
    if normalize_g {
        let norm = libm::sqrt(gg);
        if libm::fabs(norm - 1.0) > 1e-9 {
            return Err(Error::NotUnitNorm(norm));
        }
        Ok(libm::fabs(fh - fg * gh))
    } else {
        if gg == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(libm::fabs(fh - fg * gh / gg))
    }
}

/// Cosine-functional Sincov defect of a triple and the angular bound on it.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TripleDefect {
    /// `|T(f,h) − T(f,g)T(g,h)|` for the cosine functional `T`.
    pub defect: f64,
    /// `sin θ_fg · sin θ_gh`.
    pub sin_product: f64,
    /// Cosines that had to be clamped into `[−1, 1]`.
    pub clamps: u32,
}

/// Evaluates the defect through Gram entries:
/// `|⟨f,h⟩‖g‖² − ⟨f,g⟩⟨g,h⟩| / (‖f‖‖g‖²‖h‖)`, and `sin²θ_uv = 1 − cos²θ_uv`.
pub fn cosine_triple_defect(f: &[f64], g: &[f64], h: &[f64]) -> TripleDefect {
    let (ff, gg, hh) = (dot(f, f), dot(g, g), dot(h, h));
    let (fg, gh, fh) = (dot(f, g), dot(g, h), dot(f, h));
    let defect = libm::fabs(fh * gg - fg * gh) / (libm::sqrt(ff) * gg * libm::sqrt(hh));
    let mut clamps = 0;
    let mut sin2 = |uv: f64, uu: f64, vv: f64| {
        let p = uu * vv;
        let c2 = uv * uv;
        if c2 > p {
            clamps += 1;
            0.0
        } else {
            (p - c2) / p
        }
    };
    let s_fg = sin2(fg, ff, gg);
    let s_gh = sin2(gh, gg, hh);
    if fh * fh > ff * hh {
        clamps += 1;
    }
    TripleDefect {
        defect,
        sin_product: libm::sqrt(s_fg * s_gh),
        clamps,
    }
}

/// Empirical Sincov defect of the cosine functional on random triples.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RichardReport {
    pub dim: usize,
    pub trials: u64,
    pub seed: u64,
    pub workers: u32,
    pub max_defect: f64,
    pub max_defect_triple: [Vec<f64>; 3],
    /// Largest `defect − sin θ_fg sin θ_gh`.
    pub max_excess: f64,
    pub max_excess_triple: [Vec<f64>; 3],
    /// Triples with `defect > sin·sin + bound_tolerance`.
    pub bound_violations: u64,
    pub bound_tolerance: f64,
    pub clamp_events: u64,
    pub rejected_vectors: u64,
    /// The triple `e₁, (e₁ + e₂)/√2, e₂`, evaluated first.
    pub planted: TripleDefect,
}

impl RichardReport {
    pub fn holds(&self) -> bool {
        self.bound_violations == 0 && self.max_defect <= 1.0 + self.bound_tolerance
    }
}

pub const RICHARD_WORKERS: u32 = 8;
pub const RICHARD_BOUND_TOLERANCE: f64 = 1e-9;
const MIN_NORM: f64 = 1e-6;

/// Partial scan over one substream, mergeable in worker order.
#[derive(Debug, Clone, PartialEq)]
pub struct RichardPartial {
    max_defect: f64,
    max_defect_triple: [Vec<f64>; 3],
    max_excess: f64,
    max_excess_triple: [Vec<f64>; 3],
    bound_violations: u64,
    clamp_events: u64,
    rejected_vectors: u64,
}

impl RichardPartial {
    fn empty(dim: usize) -> Self {
        let z = || vec![0.0; dim];
        Self {
            max_defect: f64::NEG_INFINITY,
            max_defect_triple: [z(), z(), z()],
            max_excess: f64::NEG_INFINITY,
            max_excess_triple: [z(), z(), z()],
            bound_violations: 0,
            clamp_events: 0,
            rejected_vectors: 0,
        }
    }

    fn observe(&mut self, f: &[f64], g: &[f64], h: &[f64]) {
        let d = cosine_triple_defect(f, g, h);
        let excess = d.defect - d.sin_product;
        if d.defect > self.max_defect {
            self.max_defect = d.defect;
            self.max_defect_triple = [f.to_vec(), g.to_vec(), h.to_vec()];
        }
        if excess > self.max_excess {
            self.max_excess = excess;
            self.max_excess_triple = [f.to_vec(), g.to_vec(), h.to_vec()];
        }
        if excess > RICHARD_BOUND_TOLERANCE {
            self.bound_violations += 1;
        }
        self.clamp_events += u64::from(d.clamps);
    }

    fn merge(&mut self, other: RichardPartial) {
        if other.max_defect > self.max_defect {
            self.max_defect = other.max_defect;
            self.max_defect_triple = other.max_defect_triple;
        }
        if other.max_excess > self.max_excess {
            self.max_excess = other.max_excess;
            self.max_excess_triple = other.max_excess_triple;
        }
        self.bound_violations += other.bound_violations;
        self.clamp_events += other.clamp_events;
        self.rejected_vectors += other.rejected_vectors;
    }
}

fn random_vector(rng: &mut Rng, dim: usize, rejected: &mut u64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
        if libm::sqrt(dot(&v, &v)) >= MIN_NORM {
            return v;
        }
        *rejected += 1;
    }
}

/// Trial count handled by `worker` when `trials` are split over [`RICHARD_WORKERS`].
pub fn richard_share(trials: u64, worker: u32) -> u64 {
    let w = u64::from(RICHARD_WORKERS);
    trials / w + u64::from(u64::from(worker) < trials % w)
}

/// Runs one worker's share of a Richard scan on its own substream.
pub fn richard_partial(dim: usize, trials: u64, seed: u64, worker: u32) -> RichardPartial {
    let mut rng = Rng::new(substream_seed(seed, u64::from(worker)));
    let mut part = RichardPartial::empty(dim);
    for _ in 0..richard_share(trials, worker) {
        let f = random_vector(&mut rng, dim, &mut part.rejected_vectors);
        let g = random_vector(&mut rng, dim, &mut part.rejected_vectors);
        let h = random_vector(&mut rng, dim, &mut part.rejected_vectors);
        part.observe(&f, &g, &h);
    }
    part
}

fn planted_triple(dim: usize) -> [Vec<f64>; 3] {
    let mut e1 = vec![0.0; dim];
    e1[0] = 1.0;
    let mut e2 = vec![0.0; dim];
    e2[1] = 1.0;
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let mut mid = vec![0.0; dim];
    mid[0] = s;
    mid[1] = s;
    [e1, mid, e2]
}

/// Combines worker partials (in worker order) with the planted triple.
pub fn richard_merge(
    dim: usize,
    trials: u64,
    seed: u64,
    partials: impl IntoIterator<Item = RichardPartial>,
) -> RichardReport {
    let [p1, p2, p3] = planted_triple(dim);
    let planted = cosine_triple_defect(&p1, &p2, &p3);
    let mut acc = RichardPartial::empty(dim);
    acc.observe(&p1, &p2, &p3);
    for p in partials {
        acc.merge(p);
    }
    RichardReport {
        dim,
        trials,
        seed,
        workers: RICHARD_WORKERS,
        max_defect: acc.max_defect,
        max_defect_triple: acc.max_defect_triple,
        max_excess: acc.max_excess,
        max_excess_triple: acc.max_excess_triple,
        bound_violations: acc.bound_violations,
        bound_tolerance: RICHARD_BOUND_TOLERANCE,
        clamp_events: acc.clamp_events,
        rejected_vectors: acc.rejected_vectors,
        planted,
    }
}

/// Sequential Richard scan; identical output to running the workers in parallel.
pub fn richard_scan(dim: usize, trials: u64, seed: u64) -> Result<RichardReport> {
    if dim < 2 {
        return Err(Error::InvalidArgument("dim must be at least 2"));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1"));
    }
    let parts = (0..RICHARD_WORKERS).map(|w| richard_partial(dim, trials, seed, w));
    Ok(richard_merge(dim, trials, seed, parts))
}
