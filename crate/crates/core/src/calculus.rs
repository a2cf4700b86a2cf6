//! Wirtinger derivatives, the multiplier M, and the hyperbolic derivatives built from them.
//!
//! ∂ = ½(∂x − i∂y), ∂̄ = ½(∂x + i∂y), Δ = ∂∂̄.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::fft;
use crate::grid::{lp_norm, Field, GridSpec, WeightKind};
use crate::report::{CheckReport, Criterion, Label};
use crate::testfuncs::AnalyticTestFunction;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiffScheme {
    /// Periodic FFT differentiation; full-plane grids with fields vanishing at the edges.
    Spectral,
    /// Fourth-order centered differences, one-sided in the two outermost cells.
    CenteredFD4,
}

const C1: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const EDGE0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
const EDGE1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];

/// FD4 first derivative of a strided 1-D line.
fn fd4_line(src: &[C64], h: f64) -> Vec<C64> {
    let n = src.len();
    let mut out = vec![C64::new(0.0, 0.0); n];
    let s = 1.0 / (12.0 * h);
    let dot = |w: &[f64; 5], at: &dyn Fn(usize) -> C64| -> C64 {
        w.iter().enumerate().map(|(k, &c)| at(k) * c).sum::<C64>()
    };
    for i in 2..n - 2 {
        out[i] = dot(&C1, &|k| src[i + k - 2]) * s;
    }
    out[0] = dot(&EDGE0, &|k| src[k]) * s;
    out[1] = dot(&EDGE1, &|k| src[k]) * s;
    out[n - 1] = -dot(&EDGE0, &|k| src[n - 1 - k]) * s;
    out[n - 2] = -dot(&EDGE1, &|k| src[n - 1 - k]) * s;
    out
}

fn check_fd4(spec: &GridSpec) -> Result<()> {
    if spec.nx < 5 || spec.ny < 5 {
        bail!(InvalidInput, "FD4 needs at least 5 samples per axis, got {}x{}", spec.nx, spec.ny);
    }
    Ok(())
}

fn partial_x_fd4(f: &Field) -> Result<Field> {
    check_fd4(&f.spec)?;
    let h = f.spec.hx();
    let samples: Vec<C64> = (0..f.spec.ny).into_par_iter().flat_map_iter(|j| fd4_line(f.row(j), h)).collect();
    Field::new(f.spec, samples)
}

fn partial_y_fd4(f: &Field) -> Result<Field> {
    check_fd4(&f.spec)?;
    let (nx, ny) = (f.spec.nx, f.spec.ny);
    let h = f.spec.hy();
    let cols: Vec<Vec<C64>> = (0..nx)
        .into_par_iter()
        .map(|i| {
            let col: Vec<C64> = (0..ny).map(|j| f.samples[j * nx + i]).collect();
            fd4_line(&col, h)
        })
        .collect();
    let mut samples = vec![C64::new(0.0, 0.0); nx * ny];
    for (i, col) in cols.iter().enumerate() {
        for (j, v) in col.iter().enumerate() {
            samples[j * nx + i] = *v;
        }
    }
    Field::new(f.spec, samples)
}

fn spectral_partial(f: &Field, axis_x: bool) -> Result<Field> {
    if f.spec.is_upper() {
        bail!(Domain, "spectral differentiation needs a full-plane grid");
    }
    let (nx, ny) = (f.spec.nx, f.spec.ny);
    let kx = fft::frequencies(nx, f.spec.hx());
    let ky = fft::frequencies(ny, f.spec.hy());
    let mut buf = f.samples.clone();
    fft::fft2(&mut buf, nx, ny, false);
    buf.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        for (i, v) in row.iter_mut().enumerate() {
            // the unpaired Nyquist mode has no odd derivative
            let (k, n, idx) = if axis_x { (kx[i], nx, i) } else { (ky[j], ny, j) };
            let k = if n % 2 == 0 && idx == n / 2 { 0.0 } else { k };
            *v *= C64::new(0.0, k);
        }
    });
    fft::fft2(&mut buf, nx, ny, true);
    Field::new(f.spec, buf)
}

pub fn partial_x(f: &Field, s: DiffScheme) -> Result<Field> {
    match s {
        DiffScheme::CenteredFD4 => partial_x_fd4(f),
        DiffScheme::Spectral => spectral_partial(f, true),
    }
}

pub fn partial_y(f: &Field, s: DiffScheme) -> Result<Field> {
    match s {
        DiffScheme::CenteredFD4 => partial_y_fd4(f),
        DiffScheme::Spectral => spectral_partial(f, false),
    }
}

// Componentwise so that d_bar(f) == conj(d(conj f)) holds bit for bit with a real stencil.
pub fn d(f: &Field, s: DiffScheme) -> Result<Field> {
    let fx = partial_x(f, s)?;
    let fy = partial_y(f, s)?;
    fx.zip_with(&fy, |a, b| C64::new(0.5 * (a.re + b.im), 0.5 * (a.im - b.re)))
}

pub fn d_bar(f: &Field, s: DiffScheme) -> Result<Field> {
    let fx = partial_x(f, s)?;
    let fy = partial_y(f, s)?;
    fx.zip_with(&fy, |a, b| C64::new(0.5 * (a.re - b.im), 0.5 * (a.im + b.re)))
}

pub fn laplacian(f: &Field, s: DiffScheme) -> Result<Field> {
    d(&d_bar(f, s)?, s)
}

/// Fraction of spectral energy above half the Nyquist frequency on either axis.
pub fn top_octave_fraction(f: &Field) -> f64 {
    let (nx, ny) = (f.spec.nx, f.spec.ny);
    let mut buf = f.samples.clone();
    fft::fft2(&mut buf, nx, ny, false);
    let (mut top, mut total) = (0.0, 0.0);
    for j in 0..ny {
        let kj = j.min(ny - j);
        for i in 0..nx {
            let ki = i.min(nx - i);
            let e = buf[j * nx + i].norm_sqr();
            total += e;
            if 4 * ki > nx || 4 * kj > ny {
                top += e;
            }
        }
    }
    if total > 0.0 {
        top / total
    } else {
        0.0
    }
}

pub const RESOLUTION_THRESHOLD: f64 = 1e-6;

pub fn resolution_warning(f: &Field) -> Option<String> {
    let t = top_octave_fraction(f);
    (t > RESOLUTION_THRESHOLD).then(|| format!("resolution: top-octave energy fraction {t:.2e}"))
}

/// Pointwise multiplication by (Im z)ⁿ.
pub fn mult_m_pow(f: &Field, n: i32) -> Result<Field> {
    if n == 0 {
        return Ok(f.clone());
    }
    if n < 0 && !f.spec.is_upper() {
        bail!(Domain, "M^{n} divides by Im z, which vanishes or changes sign on a full-plane grid");
    }
    Ok(f.map_at(|z, v| v * z.im.powi(n)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HyperbolicOp {
    DUp,
    DbarUp,
    DDown,
    DbarDown,
    LapH,
}

pub fn hyperbolic_op(f: &Field, which: HyperbolicOp, s: DiffScheme) -> Result<Field> {
    if !f.spec.is_upper() {
        bail!(Domain, "hyperbolic derivatives live on the upper half-plane");
    }
    match which {
        HyperbolicOp::DUp => mult_m_pow(&d(f, s)?, 1),
        HyperbolicOp::DbarUp => mult_m_pow(&d_bar(f, s)?, 1),
        HyperbolicOp::DDown => mult_m_pow(&d(&mult_m_pow(f, -1)?, s)?, 2),
        HyperbolicOp::DbarDown => mult_m_pow(&d_bar(&mult_m_pow(f, -1)?, s)?, 2),
        HyperbolicOp::LapH => mult_m_pow(&laplacian(f, s)?, 2),
    }
}

fn rel_l2(err: &Field, reference: &Field) -> Result<(f64, f64)> {
    let e = lp_norm(err, 2.0, WeightKind::Plain)?;
    let r = lp_norm(reference, 2.0, WeightKind::Plain)?;
    Ok((e, r))
}

/// Residuals of ∂Mⁿ − Mⁿ∂ = −(in/2)Mⁿ⁻¹ and ∂̄Mⁿ − Mⁿ∂̄ = (in/2)Mⁿ⁻¹, relative to
/// ‖Mⁿ∂f‖ + ‖Mⁿ⁻¹f‖. `sign` = −1 flips the right-hand sides (negative control).
pub fn commutator_residuals(f: &Field, n: i32, s: DiffScheme, sign: f64) -> Result<(f64, f64, f64)> {
    let mn = mult_m_pow(f, n)?;
    let mn1 = mult_m_pow(f, n - 1)?;
    let c = C64::new(0.0, 0.5 * n as f64 * sign);
    let d_mn = d(&mn, s)?;
    let mn_d = mult_m_pow(&d(f, s)?, n)?;
    let lhs1 = d_mn.sub(&mn_d)?;
    let rhs1 = mn1.scale(-c);
    let db_mn = d_bar(&mn, s)?;
    let mn_db = mult_m_pow(&d_bar(f, s)?, n)?;
    let lhs2 = db_mn.sub(&mn_db)?;
    let rhs2 = mn1.scale(c);
    let scale = lp_norm(&mn_d, 2.0, WeightKind::Plain)? + lp_norm(&mn1, 2.0, WeightKind::Plain)?;
    let e1 = lp_norm(&lhs1.sub(&rhs1)?, 2.0, WeightKind::Plain)?;
    let e2 = lp_norm(&lhs2.sub(&rhs2)?, 2.0, WeightKind::Plain)?;
    Ok((e1 / scale, e2 / scale, scale))
}

/// Default commutator tolerance: 10·h² in the relative error.
pub fn default_commutator_tol(spec: &GridSpec) -> f64 {
    10.0 * spec.hx().max(spec.hy()).powi(2)
}

pub fn commutator_check(f: &Field, n: i32, s: DiffScheme, tol: Option<f64>) -> Result<CheckReport> {
    commutator_check_signed(f, n, s, tol, 1.0)
}

pub(crate) fn commutator_check_signed(
    f: &Field,
    n: i32,
    s: DiffScheme,
    tol: Option<f64>,
    sign: f64,
) -> Result<CheckReport> {
    let t0 = Instant::now();
    let tol = tol.unwrap_or_else(|| default_commutator_tol(&f.spec));
    let mut rep = CheckReport::new("commutator", Criterion::Equal { target: 0.0 }, tol)
        .param("n", n)
        .param("scheme", format!("{s:?}"))
        .grid(&f.spec);
    if sign < 0.0 {
        rep = rep.label(Label::NegativeControl).param("variant", "sign_flipped");
    }
    if f.max_abs() == 0.0 {
        return Ok(rep.finish_degenerate(t0));
    }
    let (e1, e2, scale) = commutator_residuals(f, n, s, sign)?;
    rep.set_param("err_d", e1);
    rep.set_param("err_dbar", e2);
    Ok(rep.finish(e1.max(e2) * scale, scale, e1.max(e2), t0))
}

/// G = M²∂M⁻¹F = M∂F − (i/2)F, then ∂G vs M∂²F and ∂̄G vs MΔF + (i/2)(∂F + ∂̄F).
pub fn g_identities_check(func: &dyn AnalyticTestFunction, spec: &GridSpec, tol: f64) -> Result<CheckReport> {
    g_identities_variant(func, spec, tol, true)
}

pub(crate) fn g_identities_variant(
    func: &dyn AnalyticTestFunction,
    spec: &GridSpec,
    tol: f64,
    with_correction: bool,
) -> Result<CheckReport> {
    let t0 = Instant::now();
    if !spec.is_upper() {
        bail!(Domain, "G involves M⁻¹ and needs an upper half-plane grid");
    }
    let s = DiffScheme::CenteredFD4;
    let mut rep = CheckReport::new("g_identities", Criterion::Equal { target: 0.0 }, tol)
        .param("testfn", func.name())
        .param("scheme", "CenteredFD4")
        .grid(spec);
    if !with_correction {
        rep = rep.label(Label::NegativeControl).param("variant", "drop_half_i_term");
    }
    let g = Field::from_fn(*spec, |z| z.im * func.d(z) + C64::new(0.0, 0.5) * func.f(z));
    if g.max_abs() == 0.0 {
        return Ok(rep.finish_degenerate(t0));
    }
    let dg = d(&g, s)?;
    let dbg = d_bar(&g, s)?;
    let want_d = Field::from_fn(*spec, |z| z.im * func.d2(z));
    let half_i = if with_correction { C64::new(0.0, 0.5) } else { C64::new(0.0, 0.0) };
    let want_db = Field::from_fn(*spec, |z| z.im * func.lap(z) + half_i * (func.d(z) + func.dbar(z)));
    let (e1, r1) = rel_l2(&dg.sub(&want_d)?, &want_d)?;
    let (e2, r2) = rel_l2(&dbg.sub(&want_db)?, &want_db)?;
    let (a, b) = (e1 / r1, e2 / r2);
    rep.set_param("err_dG", a);
    rep.set_param("err_dbarG", b);
    Ok(rep.finish(e1.max(e2), r1.min(r2), a.max(b), t0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfuncs::GaussianBump;

    fn close(a: &Field, b: &Field) -> f64 {
        let e = lp_norm(&a.sub(b).unwrap(), 2.0, WeightKind::Plain).unwrap();
        let r = lp_norm(b, 2.0, WeightKind::Plain).unwrap().max(1e-300);
        e / r
    }

    #[test]
    fn monomials() {
        let spec = GridSpec::full(1.0, 1.0, 40, 40).unwrap();
        let f = Field::from_fn(spec, |z| z * z);
        let dz = d(&f, DiffScheme::CenteredFD4).unwrap();
        assert!(close(&dz, &Field::from_fn(spec, |z| z * 2.0)) < 1e-12);
        let db = d_bar(&f, DiffScheme::CenteredFD4).unwrap();
        assert!(db.max_abs() < 1e-11);
        let g = Field::from_fn(spec, |z| z.conj());
        assert!(d(&g, DiffScheme::CenteredFD4).unwrap().max_abs() < 1e-12);
        let one = Field::from_fn(spec, |_| C64::new(1.0, 0.0));
        assert!(close(&d_bar(&g, DiffScheme::CenteredFD4).unwrap(), &one) < 1e-12);
    }

    #[test]
    fn conj_intertwining_is_exact() {
        let spec = GridSpec::upper(2.0, 3.0, 33, 29).unwrap();
        let f = Field::from_fn(spec, |z| (z * C64::new(0.3, 1.1)).exp() / (z + C64::new(0.0, 1.0)));
        let a = d_bar(&f, DiffScheme::CenteredFD4).unwrap();
        let b = d(&f.conj(), DiffScheme::CenteredFD4).unwrap().conj();
        assert_eq!(a, b);
    }

    #[test]
    fn log_y_hyperbolic_laplacian() {
        let spec = GridSpec::upper(1.0, 3.0, 32, 96).unwrap();
        let f = Field::from_fn(spec, |z| C64::new(z.im.ln(), 0.0));
        let l = hyperbolic_op(&f, HyperbolicOp::LapH, DiffScheme::CenteredFD4).unwrap();
        // interior rows, away from the steep region next to the axis
        for j in 32..90 {
            for i in 2..30 {
                let v = l.get(i, j);
                assert!((v - C64::new(-0.25, 0.0)).norm() < 1e-5, "{v} at row {j}");
            }
        }
    }

    #[test]
    fn spectral_derivative_of_gaussian() {
        let spec = GridSpec::full(5.0, 5.0, 96, 96).unwrap();
        let f = Field::from_fn(spec, |z| C64::new((-2.0 * z.norm_sqr()).exp(), 0.0));
        let want = Field::from_fn(spec, |z| -2.0 * z.conj() * (-2.0 * z.norm_sqr()).exp());
        assert!(close(&d(&f, DiffScheme::Spectral).unwrap(), &want) < 1e-10);
        let up = GridSpec::upper(3.0, 3.0, 64, 64).unwrap();
        assert!(d(&Field::zeros(up), DiffScheme::Spectral).is_err());
    }

    #[test]
    fn laplacians_agree() {
        let spec = GridSpec::upper(2.25, 4.5, 128, 128).unwrap();
        let g = GaussianBump::new(2.0, 4.0).unwrap();
        let f = Field::from_fn(spec, |z| g.f(z));
        let s = DiffScheme::CenteredFD4;
        let a = hyperbolic_op(&hyperbolic_op(&f, HyperbolicOp::DUp, s).unwrap(), HyperbolicOp::DbarDown, s).unwrap();
        let b = hyperbolic_op(&hyperbolic_op(&f, HyperbolicOp::DbarUp, s).unwrap(), HyperbolicOp::DDown, s).unwrap();
        let want = Field::from_fn(spec, |z| z.im * z.im * g.lap(z));
        assert!(close(&a, &want) < 1e-4);
        assert!(close(&b, &want) < 1e-4);
    }

    #[test]
    fn m_pow_round_trip_and_isometries() {
        let spec = GridSpec::upper(1.0, 2.0, 16, 16).unwrap();
        let f = Field::from_fn(spec, |z| z.exp());
        let back = mult_m_pow(&mult_m_pow(&f, 3).unwrap(), -3).unwrap();
        assert!(close(&back, &f) < 1e-15);
        let mf = mult_m_pow(&f, 1).unwrap();
        for p in [1.5, 2.0, 4.0] {
            let a = lp_norm(&mf, p, WeightKind::Plain).unwrap();
            let b = lp_norm(&f, p, WeightKind::DualHyperbolic).unwrap();
            assert!((a - b).abs() <= 1e-13 * b);
            let c = lp_norm(&mf, p, WeightKind::Hyperbolic).unwrap();
            let e = lp_norm(&f, p, WeightKind::Plain).unwrap();
            assert!((c - e).abs() <= 1e-13 * e);
        }
        assert!(mult_m_pow(&Field::zeros(GridSpec::full(1.0, 1.0, 4, 4).unwrap()), -1).is_err());
    }
}
