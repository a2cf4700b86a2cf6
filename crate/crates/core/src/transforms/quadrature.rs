//! Direct O(N²) kernel summation.
//!
//! Every half-plane kernel is written as a function of (target row, source row, column
//! offset). For each pair of rows the weights are laid out once along the column offset
//! and then swept over the target row, so the summation order is fixed.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::table::{table, Elementary, WeightTable};
use crate::grid::{Field, GridSpec};
use crate::C64;

/// u(jz, iz) = Σ_jl Σ_il w(jz, jl)[iz − il + nx − 1] f(jl, il), with `fill` writing w(jz, jl).
fn row_sum(src: &Field, out_rows: usize, fill: impl Fn(usize, usize, &mut [C64]) + Sync) -> Vec<C64> {
    let nx = src.spec.nx;
    let ny = src.spec.ny;
    let mut out = vec![C64::new(0.0, 0.0); out_rows * nx];
    out.par_chunks_mut(nx).enumerate().for_each(|(jz, acc)| {
        let mut w = vec![C64::new(0.0, 0.0); 2 * nx - 1];
        for jl in 0..ny {
            let row = src.row(jl);
            if row.iter().all(|v| v.re == 0.0 && v.im == 0.0) {
                continue;
            }
            fill(jz, jl, &mut w);
            for (iz, a) in acc.iter_mut().enumerate() {
                let ws = &w[iz..iz + nx];
                // ws[k] pairs with il = nx − 1 − k
                let mut s = C64::new(0.0, 0.0);
                for (k, &wk) in ws.iter().enumerate() {
                    s += wk * row[nx - 1 - k];
                }
                *a += s;
            }
        }
    });
    out
}

/// `row_sum` pairs w[iz + k] with il = nx − 1 − k, so slot p holds column offset p − (nx − 1).
#[inline]
fn di_of(p: usize, nx: usize) -> i64 {
    p as i64 - (nx as i64 - 1)
}

fn tables(spec: &GridSpec, kind: Elementary) -> std::sync::Arc<WeightTable> {
    table(kind, spec.hx(), spec.hy())
}

/// Planar convolution with an elementary kernel on a full-plane grid.
pub(crate) fn planar(f: &Field, kind: Elementary) -> Vec<C64> {
    let t = tables(&f.spec, kind);
    let nx = f.spec.nx;
    row_sum(f, f.spec.ny, |jz, jl, w| {
        let mj = jz as i64 - jl as i64;
        for (p, v) in w.iter_mut().enumerate() {
            *v = t.get(mj, di_of(p, nx));
        }
    })
}

/// Which image point pairs with the direct kernel term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Image {
    /// K(z − w) − K(z − w̄)
    Down,
    /// K(z − w) − K(z̄ − w)
    Up,
}

fn image_row(jz: usize, jl: usize, im: Image) -> i64 {
    let s = (jz + jl + 1) as i64;
    match im {
        Image::Down => s,
        Image::Up => -s,
    }
}

/// C↓, B↓ (Down) and C↑, B↑ (Up) for an elementary kernel on a half-plane grid.
pub(crate) fn paired(f: &Field, kind: Elementary, im: Image) -> Vec<C64> {
    let t = tables(&f.spec, kind);
    let nx = f.spec.nx;
    row_sum(f, f.spec.ny, |jz, jl, w| {
        let md = jz as i64 - jl as i64;
        let mr = image_row(jz, jl, im);
        for (p, v) in w.iter_mut().enumerate() {
            let di = di_of(p, nx);
            *v = t.get(md, di) - t.get(mr, di);
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Product {
    /// 1/((z − w)(z̄ − w))
    DUp,
    /// 1/((z − w)(z − w̄))
    DDown,
    /// Re(z − w)/|(z − w)(z − w̄)|²
    E,
}

/// D↑, D↓ and E. Near the diagonal the weights are the corrected C↑/C↓ weights divided
/// by the smooth factor relating the kernels; elsewhere the product formula is sampled.
pub(crate) fn product(f: &Field, which: Product) -> Vec<C64> {
    let spec = f.spec;
    let t = tables(&spec, Elementary::Cauchy);
    let (nx, hx) = (spec.nx, spec.hx());
    let da = spec.hx() * spec.hy() / PI;
    let im = match which {
        Product::DUp => Image::Up,
        _ => Image::Down,
    };
    row_sum(f, spec.ny, |jz, jl, w| {
        let (y, v) = (spec.y(jz), spec.y(jl));
        let md = jz as i64 - jl as i64;
        let mr = image_row(jz, jl, im);
        for (p, out) in w.iter_mut().enumerate() {
            let di = di_of(p, nx);
            let dx = di as f64 * hx;
            *out = if WeightTable::is_near(md, di) {
                let c = t.get(md, di) - t.get(mr, di);
                match which {
                    Product::DUp => c / C64::new(0.0, -2.0 * y),
                    Product::DDown => c / C64::new(0.0, 2.0 * v),
                    Product::E => C64::new(c.re / (4.0 * y * v), 0.0),
                }
            } else {
                let a = C64::new(dx, y - v);
                match which {
                    Product::DUp => (a * C64::new(dx, -(y + v))).inv() * da,
                    Product::DDown => (a * C64::new(dx, y + v)).inv() * da,
                    Product::E => {
                        let q = (a * C64::new(dx, y + v)).norm_sqr();
                        C64::new(da * dx / q, 0.0)
                    }
                }
            };
        }
    })
}
