// SPDX-License-Identifier: Apache-2.0

//! Defects, closures, decompositions and majorants for Sincov-type functional
//! inequalities on finite point sets, plus Grüss-type numerics.
//!
//! Kernels are real functions on `X × X` for a finite labelled set `X`.

#![no_std]

extern crate alloc;

pub mod additive;
pub mod error;
pub mod generate;
pub mod gruss;
pub mod kernel;
pub mod lp;
pub mod multiplicative;
pub mod rng;
pub mod sincov;
pub mod subadditive;

pub use additive::{
    build_ch, check_add, compose_p3, compose_p3_swapped, decompose_p2, synthesize_min_g,
    Objective, SynthOptions,
};
pub use error::{Error, Result};
pub use generate::{generate, GeneratorKind, GeneratorSpec};
pub use gruss::{
    cosine_functional, gruss_check, gruss_expression, integral_mean, richard_scan,
    FunctionSample, VectorTriple,
};
pub use kernel::{defect_scan, DefectKind, DefectReport, Kernel, PointSet, Potential, DEFAULT_TOLERANCE};
pub use multiplicative::{
    check_main, compose_p1, gamma, theorem_probe, zero_propagation_check, ComplexKernel,
};
pub use sincov::{constant_f_from_c, gronau_factorize, pams_constant};
pub use subadditive::{
    canonical_potentials, sup_representation, triangle_closure, verify_corollary_ct,
    PotentialFamily,
};
