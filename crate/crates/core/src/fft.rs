//! Row/column 2-D FFT on row-major buffers.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::C64;

/// Smallest integer ≥ n whose only prime factors are 2, 3 and 5.
pub fn good_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// In-place 2-D DFT of an `nx × ny` row-major buffer. The inverse includes the 1/(nx·ny) factor.
pub fn fft2(data: &mut [C64], nx: usize, ny: usize, inverse: bool) {
    assert_eq!(data.len(), nx * ny);
    let mut planner = FftPlanner::<f64>::new();
    let (fx, fy) = if inverse {
        (planner.plan_fft_inverse(nx), planner.plan_fft_inverse(ny))
    } else {
        (planner.plan_fft_forward(nx), planner.plan_fft_forward(ny))
    };
    data.par_chunks_mut(nx).for_each(|row| fx.process(row));
    let mut t = transpose(data, nx, ny);
    t.par_chunks_mut(ny).for_each(|col| fy.process(col));
    let back = transpose(&t, ny, nx);
    data.copy_from_slice(&back);
    if inverse {
        let s = 1.0 / (nx * ny) as f64;
        data.par_iter_mut().for_each(|v| *v *= s);
    }
}

fn transpose(a: &[C64], nx: usize, ny: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); a.len()];
    out.par_chunks_mut(ny).enumerate().for_each(|(i, col)| {
        for (j, v) in col.iter_mut().enumerate() {
            *v = a[j * nx + i];
        }
    });
    out
}

/// Angular frequencies of an `n`-point DFT with sample spacing `h`, in FFT order.
pub fn frequencies(n: usize, h: f64) -> Vec<f64> {
    let step = 2.0 * PI / (n as f64 * h);
    (0..n)
        .map(|k| {
            let k = if k <= (n - 1) / 2 { k as f64 } else { k as f64 - n as f64 };
            k * step
        })
        .collect()
}

/// Apply a Fourier multiplier to `src` (`nx × ny`) zero-padded into an `px × py` periodic box.
/// The multiplier receives the angular frequency pair (ξ₁, ξ₂).
pub fn apply_multiplier(
    src: &[C64],
    nx: usize,
    ny: usize,
    px: usize,
    py: usize,
    hx: f64,
    hy: f64,
    mult: impl Fn(f64, f64) -> C64 + Sync,
) -> Vec<C64> {
    let mut buf = vec![C64::new(0.0, 0.0); px * py];
    for j in 0..ny {
        buf[j * px..j * px + nx].copy_from_slice(&src[j * nx..(j + 1) * nx]);
    }
    fft2(&mut buf, px, py, false);
    let kx = frequencies(px, hx);
    let ky = frequencies(py, hy);
    buf.par_chunks_mut(px).enumerate().for_each(|(j, row)| {
        for (i, v) in row.iter_mut().enumerate() {
            *v *= mult(kx[i], ky[j]);
        }
    });
    fft2(&mut buf, px, py, true);
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        out.extend_from_slice(&buf[j * px..j * px + nx]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn good_sizes() {
        assert_eq!(good_size(7), 8);
        assert_eq!(good_size(97), 100);
        assert_eq!(good_size(243), 243);
        assert_eq!(good_size(1), 1);
    }

    #[test]
    fn round_trip() {
        let (nx, ny) = (12, 10);
        let orig: Vec<C64> = (0..nx * ny).map(|k| C64::new((k as f64).sin(), (k as f64 * 0.3).cos())).collect();
        let mut d = orig.clone();
        fft2(&mut d, nx, ny, false);
        fft2(&mut d, nx, ny, true);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
