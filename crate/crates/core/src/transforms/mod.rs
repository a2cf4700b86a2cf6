//! Planar and half-plane Cauchy/Beurling-type integral operators.
//!
//! | kernel        | K(z, w)                               |
//! |---------------|---------------------------------------|
//! | CauchyPlanar  | 1/(z − w)                             |
//! | BeurlingPlanar| −1/(z − w)² (pv)                      |
//! | CUp           | 1/(z − w) − 1/(z̄ − w)                 |
//! | CDown         | 1/(z − w) − 1/(z − w̄)                 |
//! | DUp           | 1/((z − w)(z̄ − w))                    |
//! | DDown         | 1/((z − w)(z − w̄))                    |
//! | BUp           | 1/(z̄ − w)² − 1/(z − w)² (pv)          |
//! | BDown         | 1/(z − w̄)² − 1/(z − w)² (pv)          |
//! | EKernel       | Re(z − w)/|(z − w)(z − w̄)|²           |
//!
//! all against dA(w) = dx dy/π. The two-term kernels are always summed as one weight
//! per source cell, which is the reflection principal value.

mod quadrature;
mod spectral;
mod table;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::calculus::mult_m_pow;
use crate::error::{bail, Error, Result};
use crate::grid::{boundary_mass, extend_odd, extend_zero, reflect_lower, restrict_upper, Field, PlaneKind};
use crate::report::GridSummary;
use crate::C64;

use quadrature::{Image, Product};
use table::Elementary;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransformMethod {
    FftMultiplier,
    Quadrature,
}

impl FromStr for TransformMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fft" | "fftmultiplier" | "fft_multiplier" => Ok(TransformMethod::FftMultiplier),
            "quadrature" | "quad" => Ok(TransformMethod::Quadrature),
            _ => Err(Error::InvalidInput(format!("unknown method '{s}' (expected fft|quadrature)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelId {
    CauchyPlanar,
    BeurlingPlanar,
    CUp,
    CDown,
    DUp,
    DDown,
    BUp,
    BDown,
    EKernel,
}

impl KernelId {
    pub const ALL: [KernelId; 9] = [
        KernelId::CauchyPlanar,
        KernelId::BeurlingPlanar,
        KernelId::CUp,
        KernelId::CDown,
        KernelId::DUp,
        KernelId::DDown,
        KernelId::BUp,
        KernelId::BDown,
        KernelId::EKernel,
    ];

    pub fn plane(self) -> PlaneKind {
        match self {
            KernelId::CauchyPlanar | KernelId::BeurlingPlanar => PlaneKind::FullPlane,
            _ => PlaneKind::UpperHalfPlane,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelId::CauchyPlanar => "cauchy",
            KernelId::BeurlingPlanar => "beurling",
            KernelId::CUp => "c_up",
            KernelId::CDown => "c_down",
            KernelId::DUp => "d_up",
            KernelId::DDown => "d_down",
            KernelId::BUp => "b_up",
            KernelId::BDown => "b_down",
            KernelId::EKernel => "e",
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        KernelId::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown operator '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformMeta {
    pub kernel: KernelId,
    pub conj: bool,
    pub method: TransformMethod,
    pub grid: GridSummary,
    /// L² fraction of the input carried by the outer cells of the box.
    pub boundary_mass: f64,
    /// FFT box size over grid size along x (1 for quadrature).
    pub padding: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformOutput {
    pub field: Field,
    pub meta: TransformMeta,
}

/// Outer band used for the boundary-mass diagnostic.
pub const BOUNDARY_BAND: usize = 4;
/// Relative L² mass in the band above which a truncation warning is attached.
pub const TRUNCATION_WARN: f64 = 1e-6;
pub const DEFAULT_PADDING: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transform {
    pub kernel: KernelId,
    /// Apply conj ∘ T ∘ conj, the conjugate-symbol operator.
    pub conj: bool,
    /// Beurling FFT box factor. The Cauchy FFT path sizes its own box.
    pub padding: f64,
}

impl Transform {
    pub fn new(kernel: KernelId) -> Self {
        Self { kernel, conj: false, padding: DEFAULT_PADDING }
    }

    pub fn conjugate(mut self) -> Self {
        self.conj = !self.conj;
        self
    }

    pub fn with_padding(mut self, p: f64) -> Self {
        self.padding = p;
        self
    }

    pub fn apply(&self, f: &Field, m: TransformMethod) -> Result<TransformOutput> {
        if f.spec.plane != self.kernel.plane() {
            bail!(Domain, "{} acts on {:?} grids, got {:?}", self.kernel, self.kernel.plane(), f.spec.plane);
        }
        if !f.is_finite() {
            bail!(InvalidInput, "input field has non-finite samples");
        }
        if !(self.padding >= 1.0) {
            bail!(InvalidInput, "padding factor must be >= 1, got {}", self.padding);
        }
        let input = if self.conj { f.conj() } else { f.clone() };
        let (out, padding) = match m {
            TransformMethod::Quadrature => (quad_apply(self.kernel, &input)?, 1.0),
            TransformMethod::FftMultiplier => fft_apply(self.kernel, &input, self.padding)?,
        };
        let field = if self.conj { out.conj() } else { out };
        let bm = boundary_mass(f, BOUNDARY_BAND).sqrt();
        let mut warnings = Vec::new();
        if bm > TRUNCATION_WARN {
            warnings.push(format!("truncation: boundary mass {bm:.2e} exceeds {TRUNCATION_WARN:e}"));
        }
        let meta = TransformMeta {
            kernel: self.kernel,
            conj: self.conj,
            method: m,
            grid: (&f.spec).into(),
            boundary_mass: bm,
            padding,
            warnings,
        };
        Ok(TransformOutput { field, meta })
    }
}

fn quad_apply(k: KernelId, f: &Field) -> Result<Field> {
    let s = match k {
        KernelId::CauchyPlanar => quadrature::planar(f, Elementary::Cauchy),
        KernelId::BeurlingPlanar => quadrature::planar(f, Elementary::Beurling),
        KernelId::CUp => quadrature::paired(f, Elementary::Cauchy, Image::Up),
        KernelId::CDown => quadrature::paired(f, Elementary::Cauchy, Image::Down),
        KernelId::BUp => quadrature::paired(f, Elementary::Beurling, Image::Up),
        KernelId::BDown => quadrature::paired(f, Elementary::Beurling, Image::Down),
        KernelId::DUp => quadrature::product(f, Product::DUp),
        KernelId::DDown => quadrature::product(f, Product::DDown),
        KernelId::EKernel => quadrature::product(f, Product::E),
    };
    Field::new(f.spec, s)
}

fn planar_fft(f: &Field, beurling: bool, pad: f64) -> Result<(Field, f64)> {
    let s = f.spec;
    let (v, p) = if beurling {
        spectral::beurling(&f.samples, s.nx, s.ny, s.hx(), s.hy(), pad)
    } else {
        spectral::cauchy(&f.samples, s.nx, s.ny, s.hx(), s.hy())
    };
    Ok((Field::new(s, v)?, p))
}

/// Odd extension → planar operator → restriction (the Down kernels).
fn via_odd(f: &Field, beurling: bool, pad: f64) -> Result<(Field, f64)> {
    let (u, p) = planar_fft(&extend_odd(f)?, beurling, pad)?;
    Ok((restrict_upper(&u)?, p))
}

/// Zero extension → planar operator → u(z) − u(z̄) (the Up kernels).
fn via_zero(g: &Field, beurling: bool, pad: f64) -> Result<(Field, f64)> {
    let (u, p) = planar_fft(&extend_zero(g)?, beurling, pad)?;
    Ok((restrict_upper(&u)?.sub(&reflect_lower(&u)?)?, p))
}

fn fft_apply(k: KernelId, f: &Field, pad: f64) -> Result<(Field, f64)> {
    let i = C64::new(0.0, 1.0);
    match k {
        KernelId::CauchyPlanar => planar_fft(f, false, pad),
        KernelId::BeurlingPlanar => planar_fft(f, true, pad),
        KernelId::CDown => via_odd(f, false, pad),
        KernelId::BDown => via_odd(f, true, pad),
        KernelId::CUp => via_zero(f, false, pad),
        KernelId::BUp => via_zero(f, true, pad),
        // C↑ = −2i M D↑
        KernelId::DUp => {
            let (c, p) = via_zero(f, false, pad)?;
            Ok((c.map_at(|z, v| v / (-2.0 * i * z.im)), p))
        }
        // C↓ = 2i D↓ M
        KernelId::DDown => {
            let (c, p) = via_odd(&mult_m_pow(f, -1)?, false, pad)?;
            Ok((c.scale(-0.5 * i), p))
        }
        // ½(C↓ + C̄↓) = 4 M E M
        KernelId::EKernel => {
            let h = mult_m_pow(f, -1)?;
            let (a, p) = via_odd(&h, false, pad)?;
            let (b, _) = via_odd(&h.conj(), false, pad)?;
            let s = a.add(&b.conj())?;
            Ok((s.map_at(|z, v| v * (0.125 / z.im)), p))
        }
    }
}

pub fn transform(kernel: KernelId, f: &Field, m: TransformMethod) -> Result<Field> {
    Ok(Transform::new(kernel).apply(f, m)?.field)
}

pub fn cauchy_planar(f: &Field, m: TransformMethod) -> Result<Field> {
    transform(KernelId::CauchyPlanar, f, m)
}

pub fn beurling_planar(f: &Field, m: TransformMethod) -> Result<Field> {
    transform(KernelId::BeurlingPlanar, f, m)
}

pub fn c_up(g: &Field, m: TransformMethod) -> Result<Field> {
    transform(KernelId::CUp, g, m)
}

pub fn c_down(f: &Field, m: TransformMethod) -> Result<Field> {
    transform(KernelId::CDown, f, m)
}

/// conj(C↓[conj f])
pub fn c_down_conj(f: &Field, m: TransformMethod) -> Result<Field> {
    Ok(Transform::new(KernelId::CDown).conjugate().apply(f, m)?.field)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DOp {
    DUp,
    DDown,
}

pub fn d_ops(g: &Field, which: DOp, m: TransformMethod) -> Result<Field> {
    match which {
        DOp::DUp => transform(KernelId::DUp, g, m),
        DOp::DDown => transform(KernelId::DDown, g, m),
    }
}

pub fn b_down(f: &Field, m: TransformMethod) -> Result<Field> {
    transform(KernelId::BDown, f, m)
}

pub fn b_up(f: &Field, m: TransformMethod) -> Result<Field> {
    transform(KernelId::BUp, f, m)
}

pub fn e_op(f: &Field, m: TransformMethod) -> Result<Field> {
    transform(KernelId::EKernel, f, m)
}

/// M f + (i/2)(C↓ f + C̄↓ f), the operator whose range and null space are described in
/// terms of conjugate-holomorphic functions.
pub fn norm_operator(f: &Field, m: TransformMethod) -> Result<Field> {
    let c = c_down(f, m)?;
    let cb = c_down_conj(f, m)?;
    let half_i = C64::new(0.0, 0.5);
    mult_m_pow(f, 1)?.add(&c.add(&cb)?.scale(half_i))
}

/// Minimal-norm solution of ∂̄↓u = f: u = M C↓ M⁻² f.
pub fn minimal_dbar_down_inverse(f: &Field, m: TransformMethod) -> Result<Field> {
    mult_m_pow(&c_down(&mult_m_pow(f, -2)?, m)?, 1)
}

/// The same operator written as 2i M D↓ M⁻¹.
pub fn minimal_dbar_down_inverse_via_d(f: &Field, m: TransformMethod) -> Result<Field> {
    let d = d_ops(&mult_m_pow(f, -1)?, DOp::DDown, m)?;
    Ok(mult_m_pow(&d, 1)?.scale(C64::new(0.0, 2.0)))
}

/// ∂↓[∂̄↓]⁻¹_min = M² B↓ M⁻².
pub fn hyperbolic_beurling(f: &Field, m: TransformMethod) -> Result<Field> {
    mult_m_pow(&b_down(&mult_m_pow(f, -2)?, m)?, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{lp_norm, GridSpec, WeightKind};
    use crate::testfuncs::{gaussian_bump, AnalyticTestFunction};

    fn rel(a: &Field, b: &Field) -> f64 {
        let e = lp_norm(&a.sub(b).unwrap(), 2.0, WeightKind::Plain).unwrap();
        e / lp_norm(b, 2.0, WeightKind::Plain).unwrap()
    }

    #[test]
    fn c_down_oracle_both_methods() {
        let spec = GridSpec::upper(2.25, 4.5, 64, 64).unwrap();
        let g = gaussian_bump(2.0, 4.0).unwrap();
        let f = Field::from_fn(spec, |z| g.lap(z));
        let want = Field::from_fn(spec, |z| g.d(z));
        for m in [TransformMethod::FftMultiplier, TransformMethod::Quadrature] {
            let e = rel(&c_down(&f, m).unwrap(), &want);
            assert!(e < 1e-4, "{m:?}: {e}");
        }
    }

    #[test]
    fn b_down_oracle_quadrature() {
        let spec = GridSpec::upper(2.25, 4.5, 64, 64).unwrap();
        let g = gaussian_bump(2.0, 4.0).unwrap();
        let f = Field::from_fn(spec, |z| g.lap(z));
        let want = Field::from_fn(spec, |z| g.d2(z));
        let e = rel(&b_down(&f, TransformMethod::Quadrature).unwrap(), &want);
        assert!(e < 1e-3, "{e}");
    }

    #[test]
    fn wrong_plane_rejected() {
        let up = Field::zeros(GridSpec::upper(1.0, 1.0, 8, 8).unwrap());
        assert!(cauchy_planar(&up, TransformMethod::FftMultiplier).is_err());
        let full = Field::zeros(GridSpec::full(1.0, 1.0, 8, 8).unwrap());
        assert!(c_down(&full, TransformMethod::Quadrature).is_err());
    }

    #[test]
    fn parse_names() {
        for k in KernelId::ALL {
            assert_eq!(k.name().parse::<KernelId>().unwrap(), k);
        }
        assert_eq!("fft".parse::<TransformMethod>().unwrap(), TransformMethod::FftMultiplier);
        assert!("nope".parse::<KernelId>().is_err());
    }
}
