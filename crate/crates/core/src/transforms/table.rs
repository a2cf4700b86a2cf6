//! Lattice weights for the elementary kernels 1/(πζ) and −1/(πζ²).
//!
//! Far from the origin a weight is the point value h_x h_y K(ζ_m)/π. Within
//! |m|∞ ≤ R the weight integrates the kernel against a local second-order
//! Taylor model of the input, whose derivatives come from FD4 stencils:
//! W(m) = Σ_α Σ_s D_α(s) M_α(m + s), M_α(m) = (1/π)∫_cell δ^α K(ζ_m − δ) dδ.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::quad::{gauss_legendre, gl_on};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Elementary {
    /// 1/ζ
    Cauchy,
    /// −1/ζ²
    Beurling,
}

impl Elementary {
    fn eval(self, z: C64) -> C64 {
        match self {
            Elementary::Cauchy => z.inv(),
            Elementary::Beurling => -(z * z).inv(),
        }
    }

    fn degree(self) -> i32 {
        match self {
            Elementary::Cauchy => -1,
            Elementary::Beurling => -2,
        }
    }
}

/// Half-width of the corrected block.
pub(crate) const NEAR: i64 = 6;
const ALPHAS: [(u32, u32); 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

#[derive(Debug)]
pub(crate) struct WeightTable {
    kind: Elementary,
    hx: f64,
    hy: f64,
    near: Vec<C64>,
}

impl WeightTable {
    #[inline]
    pub(crate) fn is_near(mj: i64, mi: i64) -> bool {
        mj.abs() <= NEAR && mi.abs() <= NEAR
    }

    /// Weight for the lattice offset (mj, mi), including h_x h_y / π.
    #[inline]
    pub(crate) fn get(&self, mj: i64, mi: i64) -> C64 {
        if Self::is_near(mj, mi) {
            let w = (2 * NEAR + 1) as usize;
            self.near[(mj + NEAR) as usize * w + (mi + NEAR) as usize]
        } else {
            self.point(mj, mi)
        }
    }

    #[inline]
    pub(crate) fn point(&self, mj: i64, mi: i64) -> C64 {
        let z = C64::new(mi as f64 * self.hx, mj as f64 * self.hy);
        self.kind.eval(z) * (self.hx * self.hy / PI)
    }
}

type Key = (Elementary, u64, u64);

/// Tables are cached per (kernel, hx, hy); building one costs a few million kernel evaluations.
pub(crate) fn table(kind: Elementary, hx: f64, hy: f64) -> Arc<WeightTable> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<WeightTable>>>> = OnceLock::new();
    let key = (kind, hx.to_bits(), hy.to_bits());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return t.clone();
    }
    let t = Arc::new(build(kind, hx, hy));
    cache.lock().unwrap().insert(key, t.clone());
    t
}

const D1: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
const D2: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
const ID: [f64; 5] = [0.0, 0.0, 1.0, 0.0, 0.0];

/// Stencil D_α with the 1/α! Taylor factor, as (row = y shift, column = x shift).
fn stencil(alpha: (u32, u32), hx: f64, hy: f64) -> [[f64; 5]; 5] {
    let (sy, sx, c): (&[f64; 5], &[f64; 5], f64) = match alpha {
        (0, 0) => (&ID, &ID, 1.0),
        (1, 0) => (&ID, &D1, 1.0 / hx),
        (0, 1) => (&D1, &ID, 1.0 / hy),
        (2, 0) => (&ID, &D2, 0.5 / (hx * hx)),
        (1, 1) => (&D1, &D1, 1.0 / (hx * hy)),
        (0, 2) => (&D2, &ID, 0.5 / (hy * hy)),
        _ => unreachable!(),
    };
    let mut out = [[0.0; 5]; 5];
    for (a, row) in out.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            *v = sy[a] * sx[b] * c;
        }
    }
    out
}

fn build(kind: Elementary, hx: f64, hy: f64) -> WeightTable {
    let rm = NEAR + 2;
    let wm = (2 * rm + 1) as usize;
    let moments: Vec<Vec<C64>> = ALPHAS
        .iter()
        .map(|_| vec![C64::new(0.0, 0.0); wm * wm])
        .collect();
    let mut moments = moments;

    // tensor GL on 4x4 subcells for off-origin cells
    let (gx, gw) = gauss_legendre(20);
    let ns = 4;
    let (sxh, syh) = (hx / ns as f64 / 2.0, hy / ns as f64 / 2.0);
    let mut nodes = Vec::with_capacity(ns * ns * gx.len() * gx.len());
    for a in 0..ns {
        for b in 0..ns {
            let cx = -hx / 2.0 + (a as f64 + 0.5) * hx / ns as f64;
            let cy = -hy / 2.0 + (b as f64 + 0.5) * hy / ns as f64;
            for (p, wp) in gx.iter().zip(&gw) {
                for (q, wq) in gx.iter().zip(&gw) {
                    nodes.push((cx + p * sxh, cy + q * syh, wp * wq * sxh * syh));
                }
            }
        }
    }
    for mj in -rm..=rm {
        for mi in -rm..=rm {
            if mj == 0 && mi == 0 {
                continue;
            }
            let zeta = C64::new(mi as f64 * hx, mj as f64 * hy);
            let mut acc = [C64::new(0.0, 0.0); 6];
            for &(dx, dy, w) in &nodes {
                let k = kind.eval(zeta - C64::new(dx, dy)) * w;
                for (s, &(a, b)) in acc.iter_mut().zip(&ALPHAS) {
                    *s += k * (dx.powi(a as i32) * dy.powi(b as i32));
                }
            }
            let idx = (mj + rm) as usize * wm + (mi + rm) as usize;
            for (m, s) in moments.iter_mut().zip(acc) {
                m[idx] = s / PI;
            }
        }
    }
    let idx0 = rm as usize * wm + rm as usize;
    for (m, &alpha) in moments.iter_mut().zip(&ALPHAS) {
        m[idx0] = self_moment(kind, alpha, hx / 2.0, hy / 2.0) / PI;
    }

    let w = (2 * NEAR + 1) as usize;
    let mut near = vec![C64::new(0.0, 0.0); w * w];
    let stencils: Vec<[[f64; 5]; 5]> = ALPHAS.iter().map(|&a| stencil(a, hx, hy)).collect();
    for mj in -NEAR..=NEAR {
        for mi in -NEAR..=NEAR {
            let mut tot = C64::new(0.0, 0.0);
            for (st, mom) in stencils.iter().zip(&moments) {
                for sj in -2..=2i64 {
                    for si in -2..=2i64 {
                        let c = st[(sj + 2) as usize][(si + 2) as usize];
                        if c != 0.0 {
                            tot += mom[(mj + sj + rm) as usize * wm + (mi + si + rm) as usize] * c;
                        }
                    }
                }
            }
            near[(mj + NEAR) as usize * w + (mi + NEAR) as usize] = tot;
        }
    }
    // exact parity: the Cauchy kernel is odd, the Beurling kernel even
    let parity = match kind {
        Elementary::Cauchy => -1.0,
        Elementary::Beurling => 1.0,
    };
    let sym = near.clone();
    for k in 0..w * w {
        near[k] = (sym[k] + sym[w * w - 1 - k] * parity) * 0.5;
    }
    WeightTable { kind, hx, hy, near }
}

/// ∫_cell δ^α K(−δ) dδ over the a×b half-width cell centred at the singularity,
/// in polar form, radial integral done exactly; the α = 0 Beurling case is a
/// principal value whose ε-term vanishes by angular symmetry.
fn self_moment(kind: Elementary, alpha: (u32, u32), a: f64, b: f64) -> C64 {
    let ac = b.atan2(a);
    let breaks = [-PI, -(PI - ac), -ac, ac, PI - ac, PI];
    let d = kind.degree() + (alpha.0 + alpha.1) as i32;
    let mut tot = C64::new(0.0, 0.0);
    for win in breaks.windows(2) {
        for (th, w) in gl_on(20, win[0], win[1]) {
            let (s, c) = th.sin_cos();
            let rho = (a / c.abs().max(1e-300)).min(b / s.abs().max(1e-300));
            let e = C64::from_polar(1.0, -th * (-kind.degree()) as f64);
            let ang = -e * (c.powi(alpha.0 as i32) * s.powi(alpha.1 as i32));
            let radial = if d + 2 == 0 { rho.ln() } else { rho.powi(d + 2) / (d + 2) as f64 };
            tot += ang * radial * w;
        }
    }
    tot
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn far_weights_are_point_values() {
        let t = table(Elementary::Cauchy, 0.1, 0.05);
        let z = C64::new(0.1 * 9.0, 0.05 * -3.0);
        assert!((t.get(-3, 9) - z.inv() * (0.1 * 0.05 / PI)).norm() < 1e-18);
    }

    #[test]
    fn parity() {
        let c = table(Elementary::Cauchy, 0.1, 0.07);
        let b = table(Elementary::Beurling, 0.1, 0.07);
        for (mj, mi) in [(0, 0), (1, 0), (2, -3), (6, 6), (-5, 1)] {
            assert_eq!(c.get(mj, mi), -c.get(-mj, -mi));
            assert_eq!(b.get(mj, mi), b.get(-mj, -mi));
        }
        assert_eq!(c.get(0, 0), C64::new(0.0, 0.0));
    }

    #[test]
    fn beurling_self_cell_rectangle() {
        // pv ∫_cell −1/ζ² = −2(atan(a/b) − atan(b/a)); zero on a square
        for (a, b) in [(0.05, 0.05), (0.05, 0.03)] {
            let m = self_moment(Elementary::Beurling, (0, 0), a, b);
            let want = -2.0 * ((a / b).atan() - (b / a).atan());
            assert!((m.re - want).abs() < 1e-13 && m.im.abs() < 1e-13, "{m} vs {want}");
        }
    }
}
