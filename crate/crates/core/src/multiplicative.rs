// SPDX-License-Identifier: Apache-2.0

//! The multiplicative inequality
//!
//! ```text
//! |T(f,h) − T(f,g)T(g,h)| ≤ F(f,g)F(g,h) − F(f,h)
//! ```
//!
//! together with its finitely checkable consequences. `T` may be complex; it
//! is then given as a pair of real kernels and only moduli enter the checks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernel::{
    defect_scan, multiplicative_slack, scan_triples, DefectKind, DefectReport, Kernel, PointSet,
};

/// Entries of `F` at or below this count as nonpositive.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

/// Complex kernel stored as real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexKernel {
    re: Kernel,
    im: Kernel,
}

impl ComplexKernel {
    pub fn new(re: Kernel, im: Kernel) -> Result<Self> {
        re.ensure_same_points(&im)?;
        Ok(Self { re, im })
    }

    pub fn re(&self) -> &Kernel {
        &self.re
    }

    pub fn im(&self) -> &Kernel {
        &self.im
    }
}

/// The left-hand functional `T`, real or complex.
#[derive(Debug, Clone, Copy)]
pub enum Functional<'a> {
    Real(&'a Kernel),
    Complex(&'a ComplexKernel),
}

impl<'a> From<&'a Kernel> for Functional<'a> {
    fn from(k: &'a Kernel) -> Self {
        Functional::Real(k)
    }
}

impl<'a> From<&'a ComplexKernel> for Functional<'a> {
    fn from(k: &'a ComplexKernel) -> Self {
        Functional::Complex(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct C(f64, f64);

impl C {
    fn mul(self, o: C) -> C {
        C(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }

    fn sub(self, o: C) -> C {
        C(self.0 - o.0, self.1 - o.1)
    }

    fn abs(self) -> f64 {
        if self.1 == 0.0 {
            libm::fabs(self.0)
        } else {
            libm::hypot(self.0, self.1)
        }
    }
}

impl Functional<'_> {
    pub fn points(&self) -> &PointSet {
        match self {
            Functional::Real(k) => k.points(),
            Functional::Complex(c) => c.re.points(),
        }
    }

    fn at(&self, i: usize, j: usize) -> C {
        match self {
            Functional::Real(k) => C(k.get(i, j), 0.0),
            Functional::Complex(c) => C(c.re.get(i, j), c.im.get(i, j)),
        }
    }

    /// `|T(i,j)|`
    pub fn modulus(&self, i: usize, j: usize) -> f64 {
        self.at(i, j).abs()
    }

    /// `|T(f,h) − T(f,g)T(g,h)|`
    pub fn sincov_defect(&self, f: usize, g: usize, h: usize) -> f64 {
        match self {
            Functional::Real(k) => crate::kernel::sincov_defect(k, f, g, h),
            _ => self.at(f, h).sub(self.at(f, g).mul(self.at(g, h))).abs(),
        }
    }

    /// `|T(f,h)T(h,k) − T(f,g)T(g,k)|`
    fn cross_defect(&self, f: usize, g: usize, h: usize, k: usize) -> f64 {
        self.at(f, h)
            .mul(self.at(h, k))
            .sub(self.at(f, g).mul(self.at(g, k)))
            .abs()
    }

    fn ensure_points(&self, f: &Kernel) -> Result<()> {
        if self.points() == f.points() {
            Ok(())
        } else {
            Err(Error::PointSetMismatch)
        }
    }
}

/// Residual scan of the multiplicative inequality (kind `main`).
pub fn check_main<'a>(t: impl Into<Functional<'a>>, f: &Kernel, tolerance: f64) -> Result<DefectReport> {
    let t = t.into();
    t.ensure_points(f)?;
    Ok(scan_triples(f.points(), DefectKind::Main, tolerance, |a, b, c| {
        t.sincov_defect(a, b, c) - multiplicative_slack(f, a, b, c)
    }))
}

/// `H = T + F` together with the checks that go with it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct P1Outcome {
    #[cfg_attr(feature = "serde", serde(skip))]
    pub h: Kernel,
    pub hypothesis: DefectReport,
    pub t_nonnegative: bool,
    pub f_nonnegative: bool,
    /// `T(f,g)F(g,h) + F(f,g)T(g,h) ≥ 0` term by term on every triple.
    pub cross_terms_nonnegative: bool,
    pub submultiplicative: DefectReport,
    pub warnings: Vec<String>,
}

/// For nonnegative `(T, F)` solving the multiplicative inequality, `H = T + F`
/// is submultiplicative.
pub fn compose_p1(t: &Kernel, f: &Kernel, tolerance: f64) -> Result<P1Outcome> {
    let hypothesis = check_main(t, f, tolerance)?;
    let h = t.zip_with(f, |a, b| a + b)?;
    let t_nonnegative = t.min_entry() >= 0.0;
    let f_nonnegative = f.min_entry() >= 0.0;
    let n = t.n();
    let mut cross_terms_nonnegative = true;
    'outer: for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if t.get(a, b) * f.get(b, c) < 0.0 || f.get(a, b) * t.get(b, c) < 0.0 {
                    cross_terms_nonnegative = false;
                    break 'outer;
                }
            }
        }
    }
    let submultiplicative = defect_scan(DefectKind::Submultiplicative, &[&h], tolerance)?;
    let mut warnings = Vec::new();
    if !t_nonnegative {
        warnings.push(String::from("T has a negative entry"));
    }
    if !f_nonnegative {
        warnings.push(String::from("F has a negative entry"));
    }
    if !hypothesis.holds() {
        warnings.push(format!(
            "(T, F) violates the multiplicative inequality on {} triple(s); worst {:e} at {:?}",
            hypothesis.violations, hypothesis.max_defect, hypothesis.argmax
        ));
    }
    Ok(P1Outcome {
        h,
        hypothesis,
        t_nonnegative,
        f_nonnegative,
        cross_terms_nonnegative,
        submultiplicative,
        warnings,
    })
}

fn ensure_positive(f: &Kernel) -> Result<()> {
    let n = f.n();
    for i in 0..n {
        for j in 0..n {
            let v = f.get(i, j);
            if !(v > POSITIVITY_FLOOR) {
                return Err(Error::NonPositive {
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
    }
    Ok(())
}

/// `Γ(f,g) = F(f,g)F(g,f) − 1` for positive `F`.
pub fn gamma(f: &Kernel) -> Result<Kernel> {
    ensure_positive(f)?;
    Kernel::from_fn(f.points().clone(), |i, j| f.get(i, j) * f.get(j, i) - 1.0)
}

/// Min-product closure over walks of length ≥ 1 for a nonnegative kernel.
///
/// Exact when every cycle has product ≥ 1 or passes through a zero entry,
/// which is the case for re-closing a submultiplicative kernel after zeroing
/// some entries. Passes repeat until nothing changes, so zero self-loops
/// propagate too.
pub fn submultiplicative_closure(f: &Kernel) -> Result<Kernel> {
    if f.min_entry() < 0.0 {
        return Err(Error::InvalidArgument("min-product closure needs a nonnegative kernel"));
    }
    let n = f.n();
    let mut d = f.values().to_vec();
    for _ in 0..=n {
        let mut changed = false;
        for k in 0..n {
            for i in 0..n {
                let dik = d[i * n + k];
                for j in 0..n {
                    let cand = dik * d[k * n + j];
                    if cand < d[i * n + j] {
                        d[i * n + j] = cand;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    Kernel::from_flat(f.points().clone(), d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ZeroPropVerdict {
    /// `F` has no zero; nothing to propagate.
    Vacuous,
    /// `F` has a zero, satisfies the submultiplicative inequality, and is
    /// bounded by the propagated chain bound everywhere.
    Confirmed,
    /// A hypothesis fails; `witness` names a violated triple.
    HypothesisViolated,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ZeroPropReport {
    pub min_entry: f64,
    pub max_entry: f64,
    /// First entry at or below tolerance, row-major.
    pub zero_at: Option<[String; 2]>,
    pub nonnegative: bool,
    pub submultiplicative: DefectReport,
    /// `max over (f,h) of F(f,a)·(F(a,b)·F(b,h) + tol) + tol` for the zero at `(a,b)`.
    pub propagated_bound: Option<f64>,
    pub verdict: ZeroPropVerdict,
    pub witness: Option<[String; 3]>,
    pub tolerance: f64,
}

/// Checks on one instance that a zero of a submultiplicative `F` forces `F = 0`,
/// through the chain `F(f,h) ≤ F(f,a)F(a,b)F(b,h)`.
pub fn zero_propagation_check(f: &Kernel, tolerance: f64) -> Result<ZeroPropReport> {
    let n = f.n();
    let pts = f.points();
    let min_entry = f.min_entry();
    let max_entry = f.max_entry();
    let nonnegative = min_entry >= -tolerance;
    let submultiplicative = defect_scan(DefectKind::Submultiplicative, &[f], tolerance)?;
    let zero = f
        .values()
        .iter()
        .position(|v| libm::fabs(*v) <= tolerance)
        .map(|p| (p / n, p % n));

    let mut report = ZeroPropReport {
        min_entry,
        max_entry,
        zero_at: zero.map(|(a, b)| [String::from(pts.label(a)), String::from(pts.label(b))]),
        nonnegative,
        propagated_bound: None,
        verdict: ZeroPropVerdict::Vacuous,
        witness: None,
        submultiplicative,
        tolerance,
    };
    let Some((a, b)) = zero else {
        return Ok(report);
    };
    let mut bound = f64::NEG_INFINITY;
    for x in 0..n {
        for y in 0..n {
            bound = bound.max(f.get(x, a) * (f.get(a, b) * f.get(b, y) + tolerance) + tolerance);
        }
    }
    report.propagated_bound = Some(bound);
    if !report.submultiplicative.holds() {
        report.verdict = ZeroPropVerdict::HypothesisViolated;
        report.witness = Some(report.submultiplicative.argmax.clone());
    } else if !nonnegative || max_entry > bound {
        report.verdict = ZeroPropVerdict::HypothesisViolated;
        // The chain bound fails somewhere, so one of its two steps does.
        let mut worst = (f64::NEG_INFINITY, [0usize; 3]);
        for x in 0..n {
            for y in 0..n {
                for t in [[x, a, y], [a, b, y]] {
                    let d = crate::kernel::submultiplicative_defect(f, t[0], t[1], t[2]);
                    if d > worst.0 {
                        worst = (d, t);
                    }
                }
            }
        }
        report.witness = Some(pts.triple_labels(worst.1));
    } else {
        report.verdict = ZeroPropVerdict::Confirmed;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

/// Diagnostics for the unbounded-ratio theorem and the inequalities in its proof.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ProbeReport {
    /// `ratio_sup[f][g] = max over k of |T(g,k)| / F(f,k)`.
    pub ratio_sup: Vec<Vec<f64>>,
    pub gamma_range: Range,
    /// `max |T(f,h) − T(f,g)T(g,h)|`.
    pub sincov_defect: f64,
    pub main: DefectReport,
    pub min_diagonal_f: f64,
    /// Largest `F(f,h) − F(f,g)F(g,h)`.
    pub bound_f_worst: f64,
    pub bound_f_ok: bool,
    /// Smallest `Γ(f,g)F(f,h) − [F(f,g)F(g,h) − F(f,h)]`.
    pub bound_gamma_worst: f64,
    pub bound_gamma_ok: bool,
    /// Largest `|T(f,h)T(h,k) − T(f,g)T(g,k)| − [Γ(f,g) + Γ(f,h)]F(f,k)`.
    pub bound_1_worst: f64,
    pub bound_1_argmax: [String; 4],
    pub bound_1_ok: bool,
    pub tolerance: f64,
}

impl ProbeReport {
    pub fn all_bounds_ok(&self) -> bool {
        self.bound_f_ok && self.bound_gamma_ok && self.bound_1_ok
    }
}

pub fn theorem_probe<'a>(t: impl Into<Functional<'a>>, f: &Kernel, tolerance: f64) -> Result<ProbeReport> {
    let t = t.into();
    t.ensure_points(f)?;
    ensure_positive(f)?;
    let n = f.n();
    let pts = f.points();
    let gam = gamma(f)?;

    let ratio_sup = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    (0..n)
                        .map(|k| t.modulus(b, k) / f.get(a, k))
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect()
        })
        .collect();
    let gamma_range = Range {
        min: gam.min_entry(),
        max: gam.max_entry(),
    };
    let sincov_defect = scan_triples(pts, DefectKind::Sincov, tolerance, |a, b, c| {
        t.sincov_defect(a, b, c)
    })
    .max_defect;
    let main = check_main(t, f, tolerance)?;

    let mut bound_f_worst = f64::NEG_INFINITY;
    let mut bound_gamma_worst = f64::INFINITY;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                bound_f_worst = bound_f_worst.max(-multiplicative_slack(f, a, b, c));
                let r = gam.get(a, b) * f.get(a, c) - multiplicative_slack(f, a, b, c);
                bound_gamma_worst = bound_gamma_worst.min(r);
            }
        }
    }

    let mut bound_1_worst = f64::NEG_INFINITY;
    let mut arg = [0usize; 4];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let g_ab_ac = gam.get(a, b) + gam.get(a, c);
                for k in 0..n {
                    let r = t.cross_defect(a, b, c, k) - g_ab_ac * f.get(a, k);
                    if r > bound_1_worst {
                        bound_1_worst = r;
                        arg = [a, b, c, k];
                    }
                }
            }
        }
    }

    Ok(ProbeReport {
        ratio_sup,
        gamma_range,
        sincov_defect,
        main,
        min_diagonal_f: f.diagonal().fold(f64::INFINITY, f64::min),
        bound_f_ok: bound_f_worst <= tolerance,
        bound_f_worst,
        bound_gamma_ok: bound_gamma_worst >= -tolerance,
        bound_gamma_worst,
        bound_1_ok: bound_1_worst <= tolerance,
        bound_1_worst,
        bound_1_argmax: arg.map(|i| String::from(pts.label(i))),
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Potential, DEFAULT_TOLERANCE};
    use alloc::vec;

    fn pts(n: usize) -> PointSet {
        PointSet::alphabetic(n).unwrap()
    }

    fn sincov() -> Kernel {
        Potential::new(pts(3), vec![1.0, 2.0, 4.0])
            .unwrap()
            .quotient_kernel()
            .unwrap()
    }

    fn c(v: f64) -> Kernel {
        Kernel::constant(pts(3), v).unwrap()
    }

    #[test]
    fn check_main_examples() {
        assert!(check_main(&sincov(), &c(1.0), DEFAULT_TOLERANCE).unwrap().holds());
        let r = check_main(&c(1.0), &c(2.0), DEFAULT_TOLERANCE).unwrap();
        assert!(r.holds());
        assert_eq!(r.max_defect, -2.0);
        let r = check_main(&c(1.0), &c(0.5), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.violations, 27);
        assert_eq!(r.max_defect, 0.25);
    }

    #[test]
    fn complex_functional_uses_modulus() {
        // T(f,g) = e^{i(θf − θg)} solves Sincov; with F ≡ 1 the inequality holds.
        let theta = [0.0, 0.7, 2.1];
        let re = Kernel::from_fn(pts(3), |i, j| libm::cos(theta[i] - theta[j])).unwrap();
        let im = Kernel::from_fn(pts(3), |i, j| libm::sin(theta[i] - theta[j])).unwrap();
        let t = ComplexKernel::new(re.clone(), im).unwrap();
        let r = check_main(&t, &c(1.0), DEFAULT_TOLERANCE).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!(r.max_defect.abs() < 1e-12);
        // The real part alone is not a Sincov solution.
        assert!(!check_main(&re, &c(1.0), DEFAULT_TOLERANCE).unwrap().holds());
        let probe = theorem_probe(&t, &c(1.0), DEFAULT_TOLERANCE).unwrap();
        assert!(probe.sincov_defect < 1e-12);
        assert!(probe.all_bounds_ok());
    }

    #[test]
    fn compose_p1_examples() {
        let out = compose_p1(&c(1.0), &c(1.0), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(out.h, c(2.0));
        assert!(out.submultiplicative.holds());
        assert!(out.warnings.is_empty());

        let t = sincov();
        let out = compose_p1(&t, &c(1.0), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(out.h, t.map(|v| v + 1.0).unwrap());
        assert!(out.submultiplicative.holds());
        assert!(out.cross_terms_nonnegative);

        // F = exp of a metric is submultiplicative and positive.
        let f = Kernel::from_rows(
            pts(3),
            vec![vec![1.0, 2.0, 3.0], vec![2.0, 1.0, 2.0], vec![3.0, 2.0, 1.0]],
        )
        .unwrap()
        .map(libm::exp)
        .unwrap();
        let zero = c(0.0);
        let out = compose_p1(&zero, &f, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(out.h, f);
        assert_eq!(out.submultiplicative.max_defect, 0.0);
    }

    #[test]
    fn compose_p1_warns_on_negative_t() {
        let out = compose_p1(&c(-1.0), &c(2.0), DEFAULT_TOLERANCE).unwrap();
        assert!(!out.t_nonnegative);
        assert!(!out.cross_terms_nonnegative);
        assert!(!out.warnings.is_empty());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma(&c(2.0)).unwrap(), c(3.0));
        assert_eq!(gamma(&c(1.0)).unwrap(), c(0.0));
        let f = Kernel::from_rows(pts(2), vec![vec![1.0, 2.0], vec![0.5, 1.0]]).unwrap();
        let g = gamma(&f).unwrap();
        assert_eq!(g.get(0, 1), 0.0);
        assert_eq!(g, g.transpose());
        assert!(matches!(gamma(&c(0.0)), Err(Error::NonPositive { .. })));
    }

    #[test]
    fn zero_propagation_examples() {
        let r = zero_propagation_check(&c(0.0), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.verdict, ZeroPropVerdict::Confirmed);

        let r = zero_propagation_check(&c(1.0), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.verdict, ZeroPropVerdict::Vacuous);

        let mut rows = c(1.0).rows();
        rows[0][1] = 0.0;
        let f = Kernel::from_rows(pts(3), rows).unwrap();
        let r = zero_propagation_check(&f, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.verdict, ZeroPropVerdict::HypothesisViolated);
        let w = r.witness.unwrap();
        let idx = w.clone().map(|l| f.points().index_of(&l).unwrap());
        assert!(crate::kernel::submultiplicative_defect(&f, idx[0], idx[1], idx[2]) > 0.0);
    }

    #[test]
    fn reclosing_a_zero_collapses_everything() {
        let f = Kernel::from_rows(
            pts(3),
            vec![vec![1.0, 2.0, 3.0], vec![2.0, 1.0, 2.0], vec![3.0, 2.0, 1.0]],
        )
        .unwrap();
        let mut rows = f.rows();
        rows[2][0] = 0.0;
        let closed = submultiplicative_closure(&Kernel::from_rows(pts(3), rows).unwrap()).unwrap();
        assert_eq!(closed, c(0.0));

        let mut rows = f.rows();
        rows[2][2] = 0.0;
        let closed = submultiplicative_closure(&Kernel::from_rows(pts(3), rows).unwrap()).unwrap();
        assert_eq!(closed, c(0.0));
    }

    #[test]
    fn probe_examples() {
        let p = theorem_probe(&sincov(), &c(1.0), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(p.sincov_defect, 0.0);
        assert_eq!(p.gamma_range, Range { min: 0.0, max: 0.0 });
        assert!(p.all_bounds_ok());
        assert_eq!(p.bound_gamma_worst, 0.0);

        let p = theorem_probe(&c(1.0), &c(2.0), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(p.gamma_range, Range { min: 3.0, max: 3.0 });
        assert!(p.all_bounds_ok());
        assert_eq!(p.sincov_defect, 0.0);
        assert_eq!(p.ratio_sup[0][0], 0.5);
        assert!(p.min_diagonal_f >= 1.0);
    }

    #[test]
    fn probe_rejects_nonpositive_f() {
        assert!(matches!(
            theorem_probe(&c(1.0), &c(0.0), DEFAULT_TOLERANCE),
            Err(Error::NonPositive { .. })
        ));
    }
}
