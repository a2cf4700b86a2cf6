//! FFT paths for the planar operators on full-plane grids.

use crate::fft::{apply_multiplier, good_size};
use crate::C64;

/// Planar Cauchy transform. The kernel 1/(πz) is truncated to |z| < R with R the box
/// diagonal, which leaves the result inside the box unchanged, and whose transform
/// (−2i/ζ)(1 − J₀(R|ζ|)) is smooth at ζ = 0. Padding the box by R makes the periodic
/// convolution aperiodic. Returns the samples and the padding factor used.
pub(crate) fn cauchy(src: &[C64], nx: usize, ny: usize, hx: f64, hy: f64) -> (Vec<C64>, f64) {
    let (dx, dy) = (nx as f64 * hx, ny as f64 * hy);
    let r = dx.hypot(dy);
    let px = good_size((nx as f64 * (dx + r) / dx).ceil() as usize);
    let py = good_size((ny as f64 * (dy + r) / dy).ceil() as usize);
    let out = apply_multiplier(src, nx, ny, px, py, hx, hy, |k1, k2| {
        let zeta = C64::new(k1, k2);
        let k = zeta.norm();
        if k == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            C64::new(0.0, -2.0) / zeta * (1.0 - libm::j0(k * r))
        }
    });
    (out, px as f64 / nx as f64)
}

/// Planar Beurling transform: multiplier ζ̄/ζ, zero at ζ = 0, box padded by `pad` per axis.
pub(crate) fn beurling(src: &[C64], nx: usize, ny: usize, hx: f64, hy: f64, pad: f64) -> (Vec<C64>, f64) {
    let px = good_size((nx as f64 * pad).ceil() as usize).max(nx);
    let py = good_size((ny as f64 * pad).ceil() as usize).max(ny);
    let out = apply_multiplier(src, nx, ny, px, py, hx, hy, |k1, k2| {
        let zeta = C64::new(k1, k2);
        if k1 == 0.0 && k2 == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            zeta.conj() / zeta
        }
    });
    (out, px as f64 / nx as f64)
}
