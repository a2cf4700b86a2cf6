//! Closed-form test functions: F together with ∂F, ∂̄F, ΔF and ∂²F.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::grid::{Field, GridSpec};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceTag {
    /// Numerically compactly supported inside ℂ₊.
    CompactLike,
    L2DualHyperbolic,
    /// Conjugate-holomorphic and square integrable on ℂ₊.
    ConjBergman,
    /// Holomorphic and square integrable on ℂ₊; used by negative controls.
    Bergman,
    Harmonic,
    /// Depends on Im z only.
    XIndependent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DecayClass {
    Gaussian,
    Algebraic(u32),
    /// Compact in y, constant in x.
    Strip,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub center: C64,
    /// Radius outside which the L² mass is below 1e-12 of the total (infinite if not decaying).
    pub radius: f64,
    pub decay: DecayClass,
}

pub trait AnalyticTestFunction: Send + Sync {
    fn name(&self) -> String;
    fn f(&self, z: C64) -> C64;
    fn d(&self, z: C64) -> C64;
    fn dbar(&self, z: C64) -> C64;
    fn lap(&self, z: C64) -> C64;
    fn d2(&self, z: C64) -> C64;
    fn support(&self) -> Support;
    fn tags(&self) -> Vec<SpaceTag>;

    fn has_tag(&self, t: SpaceTag) -> bool {
        self.tags().contains(&t)
    }

    /// M_p(y) = ∫_ℝ |f(t + iy)|^p dt where it has a closed form.
    fn strip_integral(&self, _p: f64, _y: f64) -> Option<f64> {
        None
    }
}

/// Which closed form to sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    F,
    D,
    Dbar,
    Lap,
    D2,
}

pub fn sample(func: &dyn AnalyticTestFunction, part: Part, spec: &GridSpec) -> Field {
    Field::from_fn(*spec, |z| match part {
        Part::F => func.f(z),
        Part::D => func.d(z),
        Part::Dbar => func.dbar(z),
        Part::Lap => func.lap(z),
        Part::D2 => func.d2(z),
    })
}

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// F(z) = A·exp(−σ|z − z₀|²).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianBump {
    pub center: C64,
    pub sigma: f64,
    pub amp: C64,
}

impl GaussianBump {
    /// Bump centered at `ic`; requires c·√σ ≥ 4 so the numerical support stays in ℂ₊.
    pub fn new(c: f64, sigma: f64) -> Result<Self> {
        Self::at(C64::new(0.0, c), sigma)
    }

    pub fn at(center: C64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && center.im > 0.0) {
            bail!(InvalidInput, "gaussian bump needs c > 0 and sigma > 0");
        }
        if center.im * sigma.sqrt() < 4.0 {
            bail!(Support, "c*sqrt(sigma) = {:.3} < 4: bump leaks across the real axis", center.im * sigma.sqrt());
        }
        Ok(Self { center, sigma, amp: C64::new(1.0, 0.0) })
    }

    /// Any center, any width; for planar fields.
    pub fn planar(center: C64, sigma: f64, amp: C64) -> Self {
        Self { center, sigma, amp }
    }

    fn base(&self, z: C64) -> (C64, C64) {
        let w = z - self.center;
        (w, self.amp * (-self.sigma * w.norm_sqr()).exp())
    }
}

impl AnalyticTestFunction for GaussianBump {
    fn name(&self) -> String {
        format!("gaussian:c={},sigma={},x0={}", self.center.im, self.sigma, self.center.re)
    }
    fn f(&self, z: C64) -> C64 {
        self.base(z).1
    }
    fn d(&self, z: C64) -> C64 {
        let (w, f) = self.base(z);
        -self.sigma * w.conj() * f
    }
    fn dbar(&self, z: C64) -> C64 {
        let (w, f) = self.base(z);
        -self.sigma * w * f
    }
    fn lap(&self, z: C64) -> C64 {
        let (w, f) = self.base(z);
        self.sigma * (self.sigma * w.norm_sqr() - 1.0) * f
    }
    fn d2(&self, z: C64) -> C64 {
        let (w, f) = self.base(z);
        self.sigma * self.sigma * w.conj() * w.conj() * f
    }
    fn support(&self) -> Support {
        // e^{−2σr²} = 1e-12, padded slightly for the polynomial prefactors of the derivatives
        let r = ((1e12f64).ln() / (2.0 * self.sigma)).sqrt() * 1.25;
        Support { center: self.center, radius: r, decay: DecayClass::Gaussian }
    }
    fn tags(&self) -> Vec<SpaceTag> {
        vec![SpaceTag::CompactLike, SpaceTag::L2DualHyperbolic]
    }
}

pub fn gaussian_bump(c: f64, sigma: f64) -> Result<GaussianBump> {
    GaussianBump::new(c, sigma)
}

/// Finite sum of Gaussian bumps.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSum {
    pub terms: Vec<GaussianBump>,
}

impl GaussianSum {
    /// Random wave packets inside the disk |z − center| < spread.
    pub fn random(seed: u64, count: usize, center: C64, spread: f64, sigma: (f64, f64)) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms = (0..count)
            .map(|_| {
                let r = spread * rng.random::<f64>().sqrt();
                let th = 2.0 * PI * rng.random::<f64>();
                let s = sigma.0 + (sigma.1 - sigma.0) * rng.random::<f64>();
                let amp = C64::from_polar(0.5 + rng.random::<f64>(), 2.0 * PI * rng.random::<f64>());
                GaussianBump::planar(center + C64::from_polar(r, th), s, amp)
            })
            .collect();
        Self { terms }
    }
}

impl AnalyticTestFunction for GaussianSum {
    fn name(&self) -> String {
        format!("gaussian_sum:{}", self.terms.len())
    }
    fn f(&self, z: C64) -> C64 {
        self.terms.iter().map(|t| t.f(z)).sum()
    }
    fn d(&self, z: C64) -> C64 {
        self.terms.iter().map(|t| t.d(z)).sum()
    }
    fn dbar(&self, z: C64) -> C64 {
        self.terms.iter().map(|t| t.dbar(z)).sum()
    }
    fn lap(&self, z: C64) -> C64 {
        self.terms.iter().map(|t| t.lap(z)).sum()
    }
    fn d2(&self, z: C64) -> C64 {
        self.terms.iter().map(|t| t.d2(z)).sum()
    }
    fn support(&self) -> Support {
        let n = self.terms.len().max(1) as f64;
        let center = self.terms.iter().map(|t| t.center).sum::<C64>() / n;
        let radius = self
            .terms
            .iter()
            .map(|t| (t.center - center).norm() + t.support().radius)
            .fold(0.0, f64::max);
        Support { center, radius, decay: DecayClass::Gaussian }
    }
    fn tags(&self) -> Vec<SpaceTag> {
        vec![SpaceTag::CompactLike]
    }
}

/// g(z) = conj((z + ia)^{−k}).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjRational {
    pub a: f64,
    pub k: u32,
}

impl AnalyticTestFunction for ConjRational {
    fn name(&self) -> String {
        format!("conjrat:a={},k={}", self.a, self.k)
    }
    fn f(&self, z: C64) -> C64 {
        (z + I * self.a).powi(-(self.k as i32)).conj()
    }
    fn d(&self, _z: C64) -> C64 {
        C64::new(0.0, 0.0)
    }
    fn dbar(&self, z: C64) -> C64 {
        let k = self.k as i32;
        (-(k as f64) * (z + I * self.a).powi(-k - 1)).conj()
    }
    fn lap(&self, _z: C64) -> C64 {
        C64::new(0.0, 0.0)
    }
    fn d2(&self, _z: C64) -> C64 {
        C64::new(0.0, 0.0)
    }
    fn support(&self) -> Support {
        let r = 1e12f64.powf(1.0 / (2.0 * self.k as f64 - 2.0));
        Support { center: C64::new(0.0, 0.0), radius: r, decay: DecayClass::Algebraic(self.k) }
    }
    fn tags(&self) -> Vec<SpaceTag> {
        let mut t = vec![SpaceTag::ConjBergman];
        if self.k >= 3 {
            t.push(SpaceTag::L2DualHyperbolic);
        }
        t
    }
}

pub fn conj_rational(a: f64, k: u32) -> Result<ConjRational> {
    if !(a > 0.0) || k < 2 {
        bail!(InvalidInput, "conj_rational needs a > 0 and k >= 2, got a={a}, k={k}");
    }
    Ok(ConjRational { a, k })
}

/// h(z) = (z + ia)^{−k}; holomorphic counterpart of [`ConjRational`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HoloRational {
    pub a: f64,
    pub k: u32,
}

impl AnalyticTestFunction for HoloRational {
    fn name(&self) -> String {
        format!("holorat:a={},k={}", self.a, self.k)
    }
    fn f(&self, z: C64) -> C64 {
        (z + I * self.a).powi(-(self.k as i32))
    }
    fn d(&self, z: C64) -> C64 {
        let k = self.k as i32;
        -(k as f64) * (z + I * self.a).powi(-k - 1)
    }
    fn dbar(&self, _z: C64) -> C64 {
        C64::new(0.0, 0.0)
    }
    fn lap(&self, _z: C64) -> C64 {
        C64::new(0.0, 0.0)
    }
    fn d2(&self, z: C64) -> C64 {
        let k = self.k as i32;
        (k * (k + 1)) as f64 * (z + I * self.a).powi(-k - 2)
    }
    fn support(&self) -> Support {
        ConjRational { a: self.a, k: self.k }.support()
    }
    fn tags(&self) -> Vec<SpaceTag> {
        let mut t = vec![SpaceTag::Bergman];
        if self.k >= 3 {
            t.push(SpaceTag::L2DualHyperbolic);
        }
        t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Harmonic {
    ImZ,
    ReZ,
    /// P(z) = Im z / |z|² = Im(−1/z)
    Poisson,
}

impl AnalyticTestFunction for Harmonic {
    fn name(&self) -> String {
        match self {
            Harmonic::ImZ => "im_z".into(),
            Harmonic::ReZ => "re_z".into(),
            Harmonic::Poisson => "poisson".into(),
        }
    }
    fn f(&self, z: C64) -> C64 {
        match self {
            Harmonic::ImZ => C64::new(z.im, 0.0),
            Harmonic::ReZ => C64::new(z.re, 0.0),
            Harmonic::Poisson => C64::new(z.im / z.norm_sqr(), 0.0),
        }
    }
    fn d(&self, z: C64) -> C64 {
        match self {
            Harmonic::ImZ => C64::new(0.0, -0.5),
            Harmonic::ReZ => C64::new(0.5, 0.0),
            Harmonic::Poisson => -I * 0.5 / (z * z),
        }
    }
    fn dbar(&self, z: C64) -> C64 {
        match self {
            Harmonic::ImZ => C64::new(0.0, 0.5),
            Harmonic::ReZ => C64::new(0.5, 0.0),
            Harmonic::Poisson => I * 0.5 / (z.conj() * z.conj()),
        }
    }
    fn lap(&self, _z: C64) -> C64 {
        C64::new(0.0, 0.0)
    }
    fn d2(&self, z: C64) -> C64 {
        match self {
            Harmonic::ImZ | Harmonic::ReZ => C64::new(0.0, 0.0),
            Harmonic::Poisson => I / (z * z * z),
        }
    }
    fn support(&self) -> Support {
        let decay = match self {
            Harmonic::Poisson => DecayClass::Algebraic(1),
            _ => DecayClass::None,
        };
        Support { center: C64::new(0.0, 0.0), radius: f64::INFINITY, decay }
    }
    fn tags(&self) -> Vec<SpaceTag> {
        vec![SpaceTag::Harmonic]
    }
    fn strip_integral(&self, p: f64, y: f64) -> Option<f64> {
        match self {
            // ∫ (y/(t²+y²))^p dt = y^{1−p} √π Γ(p − ½)/Γ(p)
            Harmonic::Poisson if p > 0.5 => {
                Some(y.powf(1.0 - p) * PI.sqrt() * libm::tgamma(p - 0.5) / libm::tgamma(p))
            }
            _ => None,
        }
    }
}

pub fn harmonic_samples() -> Vec<Harmonic> {
    vec![Harmonic::ImZ, Harmonic::ReZ, Harmonic::Poisson]
}

/// Quintic smoothstep and its derivatives on [0, 1].
fn smoothstep(u: f64) -> (f64, f64, f64) {
    let s = u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
    let ds = 30.0 * u * u * (1.0 - u) * (1.0 - u);
    let dds = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
    (s, ds, dds)
}

/// f(z) = y^a ψ_n(log y): ψ_n = 1 on |t| ≤ log n, quintic ramps to 0 at |t| = 2 log n.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardyFamily {
    pub a: f64,
    pub n: u32,
}

impl HardyFamily {
    pub fn ell(&self) -> f64 {
        (self.n as f64).ln()
    }

    /// ψ, ψ′, ψ″ at t = log y.
    pub fn cutoff(&self, t: f64) -> (f64, f64, f64) {
        let l = self.ell();
        let a = t.abs();
        if a <= l {
            (1.0, 0.0, 0.0)
        } else if a >= 2.0 * l {
            (0.0, 0.0, 0.0)
        } else {
            let (s, ds, dds) = smoothstep((a - l) / l);
            (1.0 - s, -t.signum() * ds / l, -dds / (l * l))
        }
    }

    /// Profile f(y) and its first two y-derivatives.
    pub fn profile(&self, y: f64) -> (f64, f64, f64) {
        if y <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let t = y.ln();
        let (p, dp, ddp) = self.cutoff(t);
        if p == 0.0 && dp == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let a = self.a;
        let f = (a * t).exp() * p;
        let f1 = ((a - 1.0) * t).exp() * (a * p + dp);
        let f2 = ((a - 2.0) * t).exp() * (a * (a - 1.0) * p + (2.0 * a - 1.0) * dp + ddp);
        (f, f1, f2)
    }

    /// y-support [n⁻², n²].
    pub fn y_range(&self) -> (f64, f64) {
        let n = self.n as f64;
        (1.0 / (n * n), n * n)
    }
}

impl AnalyticTestFunction for HardyFamily {
    fn name(&self) -> String {
        format!("hardy:a={},n={}", self.a, self.n)
    }
    fn f(&self, z: C64) -> C64 {
        C64::new(self.profile(z.im).0, 0.0)
    }
    fn d(&self, z: C64) -> C64 {
        C64::new(0.0, -0.5 * self.profile(z.im).1)
    }
    fn dbar(&self, z: C64) -> C64 {
        C64::new(0.0, 0.5 * self.profile(z.im).1)
    }
    fn lap(&self, z: C64) -> C64 {
        C64::new(0.25 * self.profile(z.im).2, 0.0)
    }
    fn d2(&self, z: C64) -> C64 {
        C64::new(-0.25 * self.profile(z.im).2, 0.0)
    }
    fn support(&self) -> Support {
        Support { center: C64::new(0.0, 1.0), radius: f64::INFINITY, decay: DecayClass::Strip }
    }
    fn tags(&self) -> Vec<SpaceTag> {
        vec![SpaceTag::XIndependent]
    }
}

pub fn hardy_family(a: f64, n: u32) -> Result<HardyFamily> {
    if !(a > 0.0 && a < 1.0) || n < 2 {
        bail!(InvalidInput, "hardy_family needs 0 < a < 1 and n >= 2, got a={a}, n={n}");
    }
    Ok(HardyFamily { a, n })
}

/// The zero function; drives degenerate-input paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Zero;

impl AnalyticTestFunction for Zero {
    fn name(&self) -> String {
        "zero".into()
    }
    fn f(&self, _z: C64) -> C64 {
        C64::new(0.0, 0.0)
    }
    fn d(&self, _z: C64) -> C64 {
        C64::new(0.0, 0.0)
    }
    fn dbar(&self, _z: C64) -> C64 {
        C64::new(0.0, 0.0)
    }
    fn lap(&self, _z: C64) -> C64 {
        C64::new(0.0, 0.0)
    }
    fn d2(&self, _z: C64) -> C64 {
        C64::new(0.0, 0.0)
    }
    fn support(&self) -> Support {
        Support { center: C64::new(0.0, 1.0), radius: 0.0, decay: DecayClass::Gaussian }
    }
    fn tags(&self) -> Vec<SpaceTag> {
        vec![SpaceTag::CompactLike, SpaceTag::ConjBergman, SpaceTag::Harmonic]
    }
}

/// Largest relative mismatch between ΔF and ∂(∂̄F), and between ∂²F and ∂(∂F),
/// with the outer derivative taken by a fourth-order difference quotient.
pub fn consistency_audit(func: &dyn AnalyticTestFunction, points: &[C64], h: f64) -> f64 {
    let wirt = |g: &dyn Fn(C64) -> C64, z: C64| -> C64 {
        let q = |dz: C64| {
            (g(z - dz * 2.0) - g(z - dz) * 8.0 + g(z + dz) * 8.0 - g(z + dz * 2.0)) / (12.0 * h)
        };
        let gx = q(C64::new(h, 0.0));
        let gy = q(C64::new(0.0, h));
        (gx - I * gy) * 0.5
    };
    let mut worst: f64 = 0.0;
    for &z in points {
        let lap = wirt(&|w| func.dbar(w), z);
        let d2 = wirt(&|w| func.d(w), z);
        let scale = func.lap(z).norm() + func.d2(z).norm() + func.d(z).norm() + func.f(z).norm() + 1e-300;
        worst = worst.max((lap - func.lap(z)).norm() / scale);
        worst = worst.max((d2 - func.d2(z)).norm() / scale);
    }
    worst
}

/// Random points in a rectangle of ℂ₊.
pub fn random_points(seed: u64, count: usize, x: (f64, f64), y: (f64, f64)) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| C64::new(rng.random_range(x.0..x.1), rng.random_range(y.0..y.1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_closed_forms_at_center() {
        let g = gaussian_bump(2.0, 4.0).unwrap();
        let z = C64::new(0.0, 2.0);
        assert_eq!(g.f(z), C64::new(1.0, 0.0));
        assert_eq!(g.d(z), C64::new(0.0, 0.0));
        assert_eq!(g.lap(z), C64::new(-4.0, 0.0));
        let w = C64::new(0.3, 1.7);
        let s = g.d(w) + g.dbar(w);
        assert!((s - (-2.0 * 4.0 * w.re) * g.f(w)).norm() < 1e-15);
    }

    #[test]
    fn support_precondition() {
        assert!(gaussian_bump(1.0, 4.0).is_err());
        assert!(gaussian_bump(2.0, 4.0).is_ok());
        assert!(conj_rational(1.0, 1).is_err());
        assert!(hardy_family(1.0, 64).is_err());
    }

    #[test]
    fn audit_all() {
        let pts = random_points(7, 100, (-1.0, 1.0), (1.2, 2.8));
        let fams: Vec<Box<dyn AnalyticTestFunction>> = vec![
            Box::new(gaussian_bump(2.0, 4.0).unwrap()),
            Box::new(conj_rational(1.0, 3).unwrap()),
            Box::new(HoloRational { a: 1.0, k: 2 }),
            Box::new(Harmonic::Poisson),
            Box::new(Harmonic::ImZ),
            Box::new(hardy_family(0.5, 4).unwrap()),
        ];
        for f in &fams {
            let e = consistency_audit(f.as_ref(), &pts, 1e-3);
            assert!(e < 1e-6, "{}: {e}", f.name());
        }
    }

    #[test]
    fn hardy_profile_ramp() {
        let h = hardy_family(0.5, 64).unwrap();
        let (lo, hi) = h.y_range();
        assert_eq!(h.profile(lo * 0.999).0, 0.0);
        assert_eq!(h.profile(hi * 1.001).0, 0.0);
        assert!((h.profile(1.0).0 - 1.0).abs() < 1e-15);
        // inside the ramp at t = -1.5 ℓ the smoothstep passes through one half
        let y = (-1.5 * h.ell()).exp();
        assert!((h.profile(y).0 / y.sqrt() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn poisson_strip_integral() {
        let m = Harmonic::Poisson.strip_integral(2.0, 0.7).unwrap();
        assert!((m - PI / (2.0 * 0.7)).abs() < 1e-13);
    }
}
