//! One-dimensional quadrature: Gauss–Legendre rules and adaptive Gauss–Kronrod.

use std::f64::consts::PI;

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let (p, pm) = (p1, p0);
            dp = n as f64 * (t * p - pm) / (t * t - 1.0);
            let dt = p / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gl_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    x.iter().zip(&w).map(|(&t, &wt)| (m + r * t, r * wt)).collect()
}

const XK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XK[j];
        let s = f(c - x) + f(c + x);
        k += WK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive G7–K15 on [a, b]; stops when the summed error estimate is below
/// max(abs_tol, rel_tol·|I|) or after `max_intervals` bisections.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    let max_intervals = 4000;
    let (v, e) = gk15(f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) || parts.len() >= max_intervals {
            return total;
        }
        let (k, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (a0, b0, _, _) = parts.swap_remove(k);
        let m = 0.5 * (a0 + b0);
        let (v1, e1) = gk15(f, a0, m);
        let (v2, e2) = gk15(f, m, b0);
        parts.push((a0, m, v1, e1));
        parts.push((m, b0, v2, e2));
    }
}

/// ∫_a^∞ f via θ = a + s/(1−s).
pub fn integrate_to_inf(f: &dyn Fn(f64) -> f64, a: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    let g = |s: f64| {
        if s >= 1.0 {
            return 0.0;
        }
        let u = 1.0 - s;
        f(a + s / u) / (u * u)
    };
    integrate(&g, 0.0, 1.0, rel_tol, abs_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_exact_for_polynomials() {
        for n in [1, 2, 5, 20] {
            let r = gl_on(n, 0.0, 2.0);
            let deg = 2 * n - 1;
            let s: f64 = r.iter().map(|(x, w)| w * x.powi(deg as i32)).sum();
            let want = 2f64.powi(deg as i32 + 1) / (deg + 1) as f64;
            assert!((s - want).abs() < 1e-12 * want, "n={n}");
        }
    }

    #[test]
    fn adaptive() {
        let v = integrate(&|x: f64| x.sqrt(), 0.0, 1.0, 1e-13, 0.0);
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
        let g = integrate_to_inf(&|x: f64| (-x).exp(), 0.0, 1e-13, 0.0);
        assert!((g - 1.0).abs() < 1e-12);
    }
}
