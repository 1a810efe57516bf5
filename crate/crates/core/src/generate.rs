// SPDX-License-Identifier: Apache-2.0

//! Seeded generators of certified instances.
//!
//! Random quantities are rounded to multiples of 2⁻¹⁶ so sums and differences
//! of generated entries are exact.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::additive::compose_p3;
use crate::error::{Error, Result};
use crate::kernel::{Kernel, PointSet, Potential};
use crate::multiplicative::check_main;
use crate::rng::Rng;
use crate::subadditive::triangle_closure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum GeneratorKind {
    /// `Φ(f)/Φ(g)` with `Φ` never vanishing.
    Sincov,
    /// Triangle closure of nonnegative weights with zero diagonal.
    Subadditive,
    /// `exp` of a subadditive kernel.
    Submultiplicative,
    /// `(S, G)` solving the additive inequality.
    AddPair,
    /// `(T, F)` solving the multiplicative inequality.
    MainPair,
    /// `φ(f) − φ(g)`.
    Coboundary,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 6] = [
        GeneratorKind::Sincov,
        GeneratorKind::Subadditive,
        GeneratorKind::Submultiplicative,
        GeneratorKind::AddPair,
        GeneratorKind::MainPair,
        GeneratorKind::Coboundary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Sincov => "sincov",
            GeneratorKind::Subadditive => "subadditive",
            GeneratorKind::Submultiplicative => "submultiplicative",
            GeneratorKind::AddPair => "add-pair",
            GeneratorKind::MainPair => "main-pair",
            GeneratorKind::Coboundary => "coboundary",
        }
    }

    /// Names of the produced kernels, in output order.
    pub fn outputs(self) -> &'static [&'static str] {
        match self {
            GeneratorKind::Sincov => &["T"],
            GeneratorKind::Subadditive => &["H"],
            GeneratorKind::Submultiplicative => &["F"],
            GeneratorKind::AddPair => &["S", "G"],
            GeneratorKind::MainPair => &["T", "F"],
            GeneratorKind::Coboundary => &["S"],
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GeneratorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or(Error::InvalidArgument("unknown generator kind"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub seed: u64,
    /// Magnitude of weights and potentials (factor magnitudes of `sincov`
    /// stay in `[½, 2]`).
    pub scale: f64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, n: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            seed,
            scale: 1.0,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub spec: GeneratorSpec,
    /// `(name, kernel)` in the order of [`GeneratorKind::outputs`].
    pub kernels: Vec<(&'static str, Kernel)>,
    /// Perturbation size used by `main-pair`.
    pub delta: Option<f64>,
    pub warnings: Vec<String>,
}

impl Generated {
    pub fn kernel(&self, name: &str) -> Option<&Kernel> {
        self.kernels.iter().find(|(k, _)| *k == name).map(|(_, k)| k)
    }

    pub fn first(&self) -> &Kernel {
        &self.kernels[0].1
    }
}

const QUANTUM: f64 = 65536.0;
const BISECTION_STEPS: u32 = 50;

fn quantize(x: f64) -> f64 {
    libm::round(x * QUANTUM) / QUANTUM
}

fn factor(rng: &mut Rng, positive: bool) -> f64 {
    let m = quantize(rng.uniform(0.5, 2.0));
    if positive {
        m
    } else {
        rng.sign() * m
    }
}

fn sincov_kernel(rng: &mut Rng, points: &PointSet, positive: bool) -> Result<Kernel> {
    let phi = (0..points.len()).map(|_| factor(rng, positive)).collect();
    Potential::new(points.clone(), phi)?.quotient_kernel()
}

fn subadditive_kernel(rng: &mut Rng, points: &PointSet, scale: f64) -> Result<Kernel> {
    let w = Kernel::from_fn(points.clone(), |i, j| {
        if i == j {
            0.0
        } else {
            quantize(rng.uniform(0.0, scale))
        }
    })?;
    triangle_closure(&w)
}

pub fn generate(spec: &GeneratorSpec) -> Result<Generated> {
    if spec.n == 0 {
        return Err(Error::EmptyPointSet);
    }
    if !(spec.scale.is_finite() && spec.scale > 0.0) {
        return Err(Error::InvalidArgument("scale must be positive and finite"));
    }
    let points = PointSet::alphabetic(spec.n)?;
    let mut rng = Rng::new(spec.seed);
    let mut delta = None;
    let mut warnings = Vec::new();
    let kernels = match spec.kind {
        GeneratorKind::Sincov => vec_of(sincov_kernel(&mut rng, &points, false)?),
        GeneratorKind::Coboundary => {
            let phi = (0..spec.n)
                .map(|_| quantize(rng.uniform(-spec.scale, spec.scale)))
                .collect();
            vec_of(Potential::new(points, phi)?.coboundary()?)
        }
        GeneratorKind::Subadditive => vec_of(subadditive_kernel(&mut rng, &points, spec.scale)?),
        GeneratorKind::Submultiplicative => {
            vec_of(subadditive_kernel(&mut rng, &points, spec.scale)?.map(libm::exp)?)
        }
        GeneratorKind::AddPair => {
            let h1 = subadditive_kernel(&mut rng, &points, spec.scale)?;
            let h2 = subadditive_kernel(&mut rng, &points, spec.scale)?;
            let c = compose_p3(&h1, &h2, 0.0)?;
            Vec::from([c.s, c.g])
        }
        GeneratorKind::MainPair => {
            let t0 = sincov_kernel(&mut rng, &points, true)?;
            let eps = 0.1 * spec.scale;
            let f = subadditive_kernel(&mut rng, &points, spec.scale)?.map(|h| libm::exp(h + eps))?;
            let p = Kernel::from_fn(points, |_, _| quantize(rng.next_f64()))?;
            let (d, t) = main_perturbation(&t0, &p, &f, spec.scale)?;
            if d == 0.0 {
                warnings.push(String::from(
                    "no nonzero perturbation passed; returning the unperturbed Sincov kernel",
                ));
            }
            delta = Some(d);
            Vec::from([t, f])
        }
    };
    let kernels = spec.kind.outputs().iter().copied().zip(kernels).collect();
    Ok(Generated {
        spec: *spec,
        kernels,
        delta,
        warnings,
    })
}

fn vec_of(k: Kernel) -> Vec<Kernel> {
    Vec::from([k])
}

/// Largest `δ ∈ [0, hi]` found by bisection with `T₀ + δP` passing the
/// multiplicative check against `F` at tolerance 0.
fn main_perturbation(t0: &Kernel, p: &Kernel, f: &Kernel, hi: f64) -> Result<(f64, Kernel)> {
    let at = |d: f64| t0.zip_with(p, |a, b| a + d * b);
    let passes = |t: &Kernel| check_main(t, f, 0.0).map(|r| r.holds());

    let top = at(hi)?;
    if passes(&top)? {
        return Ok((hi, top));
    }
    let (mut lo, mut up) = (0.0, hi);
    let mut best = t0.clone();
    if !passes(&best)? {
        return Err(Error::InvalidArgument(
            "unperturbed Sincov kernel fails the multiplicative check",
        ));
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + up);
        let t = at(mid)?;
        if passes(&t)? {
            lo = mid;
            best = t;
        } else {
            up = mid;
        }
    }
    Ok((lo, best))
}

/// Human-readable one-line description of a spec.
pub fn describe(spec: &GeneratorSpec) -> String {
    format!(
        "{} n={} seed={} scale={}",
        spec.kind, spec.n, spec.seed, spec.scale
    )
}
