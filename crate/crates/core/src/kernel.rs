// SPDX-License-Identifier: Apache-2.0

//! Finite point sets, dense two-argument kernels over them, and exhaustive
//! defect scans over ordered triples.
//!
//! Every scan visits all `n³` ordered triples, including those with repeated
//! points. The first triple in lexicographic index order that attains the
//! maximum is reported as the argmax.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Default absolute tolerance for algebraic identities.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Ordered list of distinct labels. The order fixes matrix indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct PointSet {
    labels: Vec<String>,
}

impl PointSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// Points labelled `a`, `b`, ... (`p0`, `p1`, ... past 26).
    pub fn alphabetic(n: usize) -> Result<Self> {
        if n <= 26 {
            Self::new((0..n).map(|i| char::from(b'a' + i as u8).to_string()))
        } else {
            Self::new((0..n).map(|i| alloc::format!("p{i}")))
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn triple_labels(&self, t: [usize; 3]) -> [String; 3] {
        t.map(|i| self.labels[i].clone())
    }

    /// `perm[i]` is the old index of the point placed at new position `i`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            labels: perm.iter().map(|&p| self.labels[p].clone()).collect(),
        }
    }
}

/// Dense `n × n` array of finite reals indexed by a [`PointSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    points: PointSet,
    values: Vec<f64>,
}

impl Kernel {
    pub fn from_rows(points: PointSet, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len();
        if rows.len() != n {
            return Err(Error::RowCount {
                expected: n,
                found: rows.len(),
            });
        }
        let mut values = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::NonSquare {
                    row: i,
                    len: row.len(),
                    expected: n,
                });
            }
            values.extend(row);
        }
        Self::from_flat(points, values)
    }

    /// Row-major values; `values.len()` must be `n²`.
    pub fn from_flat(points: PointSet, values: Vec<f64>) -> Result<Self> {
        let n = points.len();
        if values.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        if let Some(p) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: p / n,
                col: p % n,
            });
        }
        Ok(Self { points, values })
    }

    pub fn from_fn(points: PointSet, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let n = points.len();
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(f(i, j));
            }
        }
        Self::from_flat(points, values)
    }

    pub fn constant(points: PointSet, c: f64) -> Result<Self> {
        Self::from_fn(points, |_, _| c)
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n() + j]
    }

    pub fn at(&self, f: &str, g: &str) -> Result<f64> {
        Ok(self.get(self.points.index_of(f)?, self.points.index_of(g)?))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.n()).map(<[f64]>::to_vec).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n()).map(move |i| self.get(i, i))
    }

    pub fn min_entry(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn ensure_same_points(&self, other: &Kernel) -> Result<()> {
        if self.points == other.points {
            Ok(())
        } else {
            Err(Error::PointSetMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_flat(self.points.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// Entrywise combination of two kernels on the same point set.
    pub fn zip_with(&self, other: &Kernel, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.ensure_same_points(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_flat(self.points.clone(), values)
    }

    pub fn max_abs_diff(&self, other: &Kernel) -> Result<f64> {
        self.ensure_same_points(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max))
    }

    /// Bit-level equality of the stored values (distinguishes `0.0` and `-0.0`).
    pub fn bit_eq(&self, other: &Kernel) -> bool {
        self.points == other.points
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    /// Relabelled copy: entry `(i, j)` of the result is entry `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n();
        let mut values = Vec::with_capacity(n * n);
        for &pi in perm {
            for &pj in perm {
                values.push(self.get(pi, pj));
            }
        }
        Self {
            points: self.points.permuted(perm),
            values,
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.n();
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(self.get(j, i));
            }
        }
        Self {
            points: self.points.clone(),
            values,
        }
    }
}

/// Real vector over a [`PointSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    points: PointSet,
    values: Vec<f64>,
}

impl Potential {
    pub fn new(points: PointSet, values: Vec<f64>) -> Result<Self> {
        if values.len() != points.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                found: values.len(),
            });
        }
        if let Some(p) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: p, col: 0 });
        }
        Ok(Self { points, values })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// `K(f, g) = φ(f) / φ(g)`.
    pub fn quotient_kernel(&self) -> Result<Kernel> {
        if let Some(i) = self.values.iter().position(|&v| v == 0.0) {
            return Err(Error::VanishingFactor(self.points.label(i).to_string()));
        }
        Kernel::from_fn(self.points.clone(), |i, j| self.values[i] / self.values[j])
    }

    /// `K(f, g) = φ(f) − φ(g)`.
    pub fn coboundary(&self) -> Result<Kernel> {
        Kernel::from_fn(self.points.clone(), |i, j| self.values[i] - self.values[j])
    }
}

/// Which residual a triple scan evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DefectKind {
    /// `|T(f,h) − T(f,g)T(g,h)|`
    Sincov,
    /// `|S(f,h) − S(f,g) − S(g,h)|`
    Additive,
    /// `(H(f,h) − H(f,g) − H(g,h))⁺`
    Triangle,
    /// `(H(f,h) − H(f,g)H(g,h))⁺`
    Submultiplicative,
    /// `|T(f,h) − T(f,g)T(g,h)| − (F(f,g)F(g,h) − F(f,h))`
    Main,
    /// `|S(f,h) − S(f,g) − S(g,h)| − (G(f,g) + G(g,h) − G(f,h))`
    Add,
}

impl DefectKind {
    pub const ALL: [DefectKind; 6] = [
        DefectKind::Sincov,
        DefectKind::Additive,
        DefectKind::Triangle,
        DefectKind::Submultiplicative,
        DefectKind::Main,
        DefectKind::Add,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DefectKind::Sincov => "sincov",
            DefectKind::Additive => "additive",
            DefectKind::Triangle => "triangle",
            DefectKind::Submultiplicative => "submultiplicative",
            DefectKind::Main => "main",
            DefectKind::Add => "add",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            DefectKind::Main | DefectKind::Add => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for DefectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for DefectKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DefectKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or(Error::InvalidArgument("unknown defect kind"))
    }
}

/// Summary of a triple scan.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DefectReport {
    pub kind: DefectKind,
    pub max_defect: f64,
    pub argmax: [String; 3],
    #[cfg_attr(feature = "serde", serde(skip))]
    pub argmax_index: [usize; 3],
    /// Number of triples whose defect exceeds `tolerance`.
    pub violations: u64,
    pub tolerance: f64,
}

impl DefectReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Scans all ordered triples of `points` with `defect`.
pub fn scan_triples(
    points: &PointSet,
    kind: DefectKind,
    tolerance: f64,
    defect: impl Fn(usize, usize, usize) -> f64,
) -> DefectReport {
    let n = points.len();
    let mut best = f64::NEG_INFINITY;
    let mut arg = [0usize; 3];
    let mut violations = 0u64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let d = defect(i, j, k);
                // NaN compares false both ways; count it as a violation.
                if !(d <= tolerance) {
                    violations += 1;
                }
                if d > best || (best == f64::NEG_INFINITY && d.is_nan()) {
                    best = d;
                    arg = [i, j, k];
                }
            }
        }
    }
    DefectReport {
        kind,
        max_defect: best,
        argmax: points.triple_labels(arg),
        argmax_index: arg,
        violations,
        tolerance,
    }
}

#[inline]
pub fn sincov_defect(t: &Kernel, f: usize, g: usize, h: usize) -> f64 {
    libm::fabs(t.get(f, h) - t.get(f, g) * t.get(g, h))
}

#[inline]
pub fn additive_defect(s: &Kernel, f: usize, g: usize, h: usize) -> f64 {
    libm::fabs(s.get(f, h) - s.get(f, g) - s.get(g, h))
}

#[inline]
pub fn triangle_defect(k: &Kernel, f: usize, g: usize, h: usize) -> f64 {
    (k.get(f, h) - k.get(f, g) - k.get(g, h)).max(0.0)
}

#[inline]
pub fn submultiplicative_defect(k: &Kernel, f: usize, g: usize, h: usize) -> f64 {
    (k.get(f, h) - k.get(f, g) * k.get(g, h)).max(0.0)
}

/// Slack `F(f,g)F(g,h) − F(f,h)` on the right of the multiplicative inequality.
#[inline]
pub fn multiplicative_slack(k: &Kernel, f: usize, g: usize, h: usize) -> f64 {
    k.get(f, g) * k.get(g, h) - k.get(f, h)
}

/// Slack `G(f,g) + G(g,h) − G(f,h)` on the right of the additive inequality.
#[inline]
pub fn additive_slack(k: &Kernel, f: usize, g: usize, h: usize) -> f64 {
    k.get(f, g) + k.get(g, h) - k.get(f, h)
}

/// Exhaustive defect scan of `kind` over one kernel (or two for `main` / `add`).
pub fn defect_scan(kind: DefectKind, kernels: &[&Kernel], tolerance: f64) -> Result<DefectReport> {
    if kernels.len() != kind.arity() {
        return Err(Error::KernelCount {
            kind: kind.name(),
            expected: kind.arity(),
            found: kernels.len(),
        });
    }
    let k = kernels[0];
    let pts = k.points();
    let report = match kind {
        DefectKind::Sincov => scan_triples(pts, kind, tolerance, |f, g, h| sincov_defect(k, f, g, h)),
        DefectKind::Additive => {
            scan_triples(pts, kind, tolerance, |f, g, h| additive_defect(k, f, g, h))
        }
        DefectKind::Triangle => {
            scan_triples(pts, kind, tolerance, |f, g, h| triangle_defect(k, f, g, h))
        }
        DefectKind::Submultiplicative => scan_triples(pts, kind, tolerance, |f, g, h| {
            submultiplicative_defect(k, f, g, h)
        }),
        DefectKind::Main => {
            let rhs = kernels[1];
            k.ensure_same_points(rhs)?;
            scan_triples(pts, kind, tolerance, |f, g, h| {
                sincov_defect(k, f, g, h) - multiplicative_slack(rhs, f, g, h)
            })
        }
        DefectKind::Add => {
            let rhs = kernels[1];
            k.ensure_same_points(rhs)?;
            scan_triples(pts, kind, tolerance, |f, g, h| {
                additive_defect(k, f, g, h) - additive_slack(rhs, f, g, h)
            })
        }
    };
    Ok(report)
}
