// SPDX-License-Identifier: Apache-2.0

//! Exact Sincov-equation machinery: quotient factorization of solutions,
//! the least uniform perturbation constant, and the constant control
//! function that turns the uniform bound into the multiplicative inequality.

use alloc::string::ToString;

use crate::error::{Error, Result};
use crate::kernel::{defect_scan, DefectKind, DefectReport, Kernel, Potential};

/// Output of [`gronau_factorize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    /// `Φ(f) = T(f, base)`.
    pub factor: Potential,
    pub base: usize,
    /// Sincov scan of the input.
    pub sincov: DefectReport,
    /// `T(base, base)`, checked against 1.
    pub base_diagonal: f64,
    /// Measured `max |T(f,g) − Φ(f)/Φ(g)|`.
    pub reconstruction_error: f64,
    /// A priori bound on the reconstruction error: sincov defect over `min |Φ|`,
    /// padded by a few ulps of the largest quotient.
    pub derived_bound: f64,
}

/// Factor a Sincov solution as `T(f,g) = Φ(f)/Φ(g)` with the gauge `Φ(base) = T(base, base) = 1`.
pub fn gronau_factorize(t: &Kernel, base: usize, tolerance: f64) -> Result<Factorization> {
    let pts = t.points();
    if base >= t.n() {
        return Err(Error::InvalidArgument("base index out of range"));
    }
    let sincov = defect_scan(DefectKind::Sincov, &[t], tolerance)?;
    if !sincov.holds() {
        return Err(Error::NotSincov {
            defect: sincov.max_defect,
            witness: sincov.argmax.clone(),
            tolerance,
        });
    }
    let base_diagonal = t.get(base, base);
    if !(libm::fabs(base_diagonal - 1.0) <= tolerance) {
        return Err(Error::BaseDiagonal {
            label: pts.label(base).to_string(),
            value: base_diagonal,
        });
    }
    let values: alloc::vec::Vec<f64> = (0..t.n()).map(|f| t.get(f, base)).collect();
    if let Some(f) = values.iter().position(|&v| v == 0.0) {
        return Err(Error::VanishingFactor(pts.label(f).to_string()));
    }
    let factor = Potential::new(pts.clone(), values)?;
    let rebuilt = factor.quotient_kernel()?;
    let reconstruction_error = t.max_abs_diff(&rebuilt)?;
    let min_abs = factor
        .values()
        .iter()
        .map(|v| libm::fabs(*v))
        .fold(f64::INFINITY, f64::min);
    let max_abs = rebuilt
        .values()
        .iter()
        .map(|v| libm::fabs(*v))
        .fold(0.0, f64::max);
    // |T(f,b) − T(f,g)T(g,b)| ≤ c  ⇒  |T(f,g) − Φ(f)/Φ(g)| ≤ c / |Φ(g)|
    let derived_bound = sincov.max_defect / min_abs + 4.0 * f64::EPSILON * max_abs.max(1.0);
    Ok(Factorization {
        factor,
        base,
        sincov,
        base_diagonal,
        reconstruction_error,
        derived_bound,
    })
}

/// Least `c ≥ 0` with `|T(f,h) − T(f,g)T(g,h)| ≤ c` on every triple.
pub fn pams_constant(t: &Kernel) -> f64 {
    scan(t).max_defect
}

/// Same as [`pams_constant`] but keeps the attaining triple.
pub fn pams_report(t: &Kernel) -> DefectReport {
    scan(t)
}

fn scan(t: &Kernel) -> DefectReport {
    defect_scan(DefectKind::Sincov, &[t], 0.0).expect("single-kernel scan")
}

/// The constant `λ = (1 + √(1 + 4c)) / 2`, i.e. the root `λ ≥ 1` of `λ² − λ = c`.
pub fn constant_f_from_c(c: f64) -> Result<f64> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::NegativeConstant(c));
    }
    Ok(0.5 * (1.0 + libm::sqrt(1.0 + 4.0 * c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::PointSet;
    use alloc::vec;

    fn quotient(values: [f64; 3]) -> Kernel {
        Potential::new(PointSet::alphabetic(3).unwrap(), values.to_vec())
            .unwrap()
            .quotient_kernel()
            .unwrap()
    }

    #[test]
    fn recovers_factor_at_first_base() {
        let t = quotient([1.0, 2.0, 4.0]);
        let fz = gronau_factorize(&t, 0, 1e-9).unwrap();
        assert_eq!(fz.factor.values(), &[1.0, 2.0, 4.0]);
        assert_eq!(fz.reconstruction_error, 0.0);
        assert_eq!(fz.base_diagonal, 1.0);
    }

    #[test]
    fn base_change_rescales() {
        let t = quotient([1.0, 2.0, 4.0]);
        let fz = gronau_factorize(&t, 1, 1e-9).unwrap();
        assert_eq!(fz.factor.values(), &[0.5, 1.0, 2.0]);
        assert!(fz.factor.quotient_kernel().unwrap().bit_eq(&t));
    }

    #[test]
    fn perturbed_kernel_rejected_with_witness() {
        let mut rows = quotient([1.0, 2.0, 4.0]).rows();
        rows[0][2] += 0.5;
        let t = Kernel::from_rows(PointSet::alphabetic(3).unwrap(), rows).unwrap();
        match gronau_factorize(&t, 0, 1e-9) {
            Err(Error::NotSincov { defect, witness, .. }) => {
                let r = pams_report(&t);
                assert!(defect >= 0.5);
                assert_eq!(defect, r.max_defect);
                assert_eq!(witness, r.argmax);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn vanishing_and_bad_diagonal() {
        let pts = PointSet::alphabetic(2).unwrap();
        let zero = Kernel::constant(pts.clone(), 0.0).unwrap();
        assert!(matches!(
            gronau_factorize(&zero, 0, 1e-9),
            Err(Error::BaseDiagonal { .. })
        ));
        // An exact solution with T(base,base) = 1 never vanishes; a loose
        // tolerance lets this one through to the factor check.
        let t = Kernel::from_rows(pts, vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(pams_constant(&t), 1.0);
        assert_eq!(
            gronau_factorize(&t, 0, 2.0),
            Err(Error::VanishingFactor("b".into()))
        );
    }

    #[test]
    fn pams_examples() {
        assert_eq!(pams_constant(&quotient([1.0, 2.0, 4.0])), 0.0);
        let t = Kernel::from_rows(
            PointSet::alphabetic(3).unwrap(),
            vec![vec![1.0, 1.0, 2.0], vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]],
        )
        .unwrap();
        let r = pams_report(&t);
        assert_eq!(r.max_defect, 1.0);
        assert_eq!(r.argmax_index, [0, 1, 2]);
    }

    #[test]
    fn constant_reduction_values() {
        assert_eq!(constant_f_from_c(0.0).unwrap(), 1.0);
        assert_eq!(constant_f_from_c(2.0).unwrap(), 2.0);
        assert_eq!(constant_f_from_c(6.0).unwrap(), 3.0);
        assert_eq!(constant_f_from_c(-1.0), Err(Error::NegativeConstant(-1.0)));
        assert!(constant_f_from_c(f64::NAN).is_err());
    }
}
