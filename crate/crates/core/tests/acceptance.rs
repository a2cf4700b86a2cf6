//! One line per acceptance criterion; the test fails if any criterion fails.

use std::time::Instant;

use hypb_core::report::{all_ok, CheckReport};
use hypb_core::testfuncs::conj_rational;
use hypb_core::verify::{self, *};
use hypb_core::whittaker::WhittakerSolution;
use hypb_core::{Label, TransformMethod, C64};

const FFT: TransformMethod = TransformMethod::FftMultiplier;
const QUAD: TransformMethod = TransformMethod::Quadrature;

struct Line {
    ok: bool,
    text: String,
}

fn line(n: u32, ok: bool, text: String) -> Line {
    println!("criterion {n:>2} [{}] {text}", if ok { "PASS" } else { "FAIL" });
    Line { ok, text }
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn find<'a>(rs: &'a [CheckReport], id: &str) -> &'a CheckReport {
    rs.iter().find(|r| r.check_id == id).unwrap_or_else(|| panic!("missing report {id}"))
}

fn c1() -> Line {
    let t = Instant::now();
    let spec = default_bump_grid(256).unwrap();
    let f = default_bump();
    let a = check_norm_identity_p2(&f, &spec, FFT, NormMode::ClosedForm).unwrap();
    let b = check_norm_identity_p2(&f, &spec, FFT, NormMode::Transform).unwrap();
    let s = secs(t);
    let ok = (a.ratio - 1.0).abs() <= 1e-4 && (b.ratio - 1.0).abs() <= 1e-3 && s <= 5.0;
    line(1, ok, format!("norm identity 256²: closed-form ratio {:.12} (±1e-4), transform ratio {:.12} (±1e-3), {s:.2} s (≤ 5 s)", a.ratio, b.ratio))
}

fn c2() -> Line {
    let t = Instant::now();
    let spec = default_planar_grid(256).unwrap();
    let fields = random_planar_fields(7, 10, &spec);
    let r = check_isometry(&fields, FFT, 1e-6).unwrap();
    let s = secs(t);
    let ok = r.pass && (r.ratio - 1.0).abs() <= 1e-6 && s <= 2.0;
    line(2, ok, format!("planar isometry, 10 fields: worst |ratio − 1| {:.3e} (≤ 1e-6), {s:.2} s (≤ 2 s)", (r.ratio - 1.0).abs()))
}

fn c3() -> Line {
    let spec = default_bump_grid(256).unwrap();
    let g = hypb_core::calculus::g_identities_check(&default_bump(), &spec, 1e-4).unwrap();
    let f = hypb_core::testfuncs::sample(&commutator_bump(), hypb_core::testfuncs::Part::F, &spec);
    let mut comm_ok = true;
    let mut worst: f64 = 0.0;
    for n in -2..=2 {
        let r = hypb_core::calculus::commutator_check(&f, n, hypb_core::calculus::DiffScheme::CenteredFD4, None).unwrap();
        comm_ok &= r.pass;
        worst = worst.max(r.ratio);
    }
    let mut min_order = f64::INFINITY;
    for n in [-2, -1, 1, 2] {
        let r = convergence_commutator(&commutator_bump(), &[64, 128, 256], n, 3.5).unwrap();
        comm_ok &= r.pass;
        min_order = min_order.min(r.ratio);
    }
    let ok = g.pass && g.ratio <= 1e-4 && comm_ok;
    line(3, ok, format!(
        "proof identities: G errors {:.3e} (≤ 1e-4); commutators n=−2..2 worst rel {:.3e} (scheme tol); min order {:.2} (≥ 3.5)",
        g.ratio, worst, min_order
    ))
}

fn c4() -> Line {
    let spec = default_bump_grid(256).unwrap();
    let f = default_bump();
    let mut worst: f64 = 0.0;
    for o in [Oracle::CDown, Oracle::CDownConj, Oracle::BDown, Oracle::CUp] {
        worst = worst.max(check_transform_oracle(&f, o, &spec, FFT).unwrap().ratio);
    }
    let t = Instant::now();
    let cfg = VerifyConfig::default();
    let rs = verify::run("method-agreement", &cfg).unwrap();
    let s = secs(t);
    let agree: Vec<&CheckReport> = rs.iter().filter(|r| r.label == Label::Verification).collect();
    let wa = agree.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let at128 = agree.iter().all(|r| r.grid.as_ref().is_some_and(|g| g.nx.max(g.ny) == 128));
    let ok = worst <= 1e-3 && wa <= 1e-3 && at128 && all_ok(&rs) && s <= 180.0;
    line(4, ok, format!("transform oracles 256² worst {worst:.3e} (≤ 1e-3); FFT vs quadrature 128², {} kernels, worst {wa:.3e} (≤ 1e-3), {s:.1} s (≤ 180 s)", agree.len()))
}

fn c5() -> Line {
    let t = Instant::now();
    let cfg = VerifyConfig::default();
    let mut rs = verify::run("structural", &cfg).unwrap();
    rs.extend(verify::run("e-identity", &cfg).unwrap().into_iter().filter(|r| r.check_id == "e-identity/pointwise"));
    let s = secs(t);
    let v: Vec<&CheckReport> = rs.iter().filter(|r| r.label == Label::Verification).collect();
    let worst = v.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let grid64 = v.iter().all(|r| r.grid.as_ref().is_some_and(|g| g.nx == 64 && g.ny == 64) && r.method == Some(QUAD));
    let ok = worst <= 1e-10 && v.len() >= 5 && grid64 && all_ok(&rs) && s <= 60.0;
    line(5, ok, format!("structural identities 64² quadrature: {} identities, worst pointwise {worst:.3e} (≤ 1e-10), {s:.2} s (≤ 60 s)", v.len()))
}

fn c6() -> Line {
    let cfg = VerifyConfig::default();
    let h = verify::run("hardy", &cfg).unwrap();
    let c = verify::run("cup", &cfg).unwrap();
    let m = verify::run("minimal-solver", &cfg).unwrap();
    let hb = find(&h, "hardy/battery-p=2");
    let he = find(&h, "hardy/extremal-a=0.5-n=64");
    let cb = find(&c, "cup/bound");
    let ce = find(&c, "cup/near-extremal");
    let mb = find(&m, "minimal-solver/bound");
    let ok = hb.ratio <= 16.0 * (1.0 + 1e-3)
        && he.ratio >= 12.0
        && cb.ratio <= 4.0 * (1.0 + 1e-3)
        && ce.ratio >= 3.0
        && mb.ratio <= 4.0 * (1.0 + 1e-3);
    line(6, ok, format!(
        "sharp constants: Hardy battery max {:.4} (≤ 16.016), hardy(1/2,64) {:.4} (≥ 12); C↑ battery max {:.4} (≤ 4.004), near-extremal {:.4} (≥ 3); minimal solver {:.4} (≤ 4.004)",
        hb.ratio, he.ratio, cb.ratio, ce.ratio, mb.ratio
    ))
}

fn c7() -> Line {
    let bx = TruncatedBox::nullspace_default();
    let n = check_nullspace(&conj_rational(1.0, 3).unwrap(), &bx, FFT).unwrap();
    let rs = verify::run("nullspace", &VerifyConfig::default()).unwrap();
    let ctrl = find(&rs, "nullspace/neg-holomorphic");
    let r = verify::run("range", &VerifyConfig::default()).unwrap();
    let rr = find(&r, "range/conj-witnesses");
    let ok = n.ratio <= 1e-2 && ctrl.ratio >= 1e-1 && rr.ratio <= 1e-3;
    line(7, ok, format!(
        "null space: conj_rational(1,3) residual {:.3e} (≤ 1e-2), holomorphic control {:.3e} (≥ 1e-1); range pairing {:.3e} (≤ 1e-3)",
        n.ratio, ctrl.ratio, rr.ratio
    ))
}

fn c8() -> Line {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let sol = |s, a, b| WhittakerSolution::new(s, a, b).unwrap();
    let exact = check_ode(&sol(1, one, zero), "x").unwrap().ratio.max(check_ode(&sol(-1, zero, one), "y").unwrap().ratio);
    let quad = check_ode(&sol(1, zero, one), "x").unwrap().ratio.max(check_ode(&sol(-1, one, zero), "y").unwrap().ratio);
    let rs = verify::run("whittaker", &VerifyConfig::default()).unwrap();
    let cls = find(&rs, "whittaker/classify-conj-rational");
    let wrong = find(&rs, "whittaker/neg-wrong-branch");
    let ok = exact <= 1e-6 && quad <= 1e-6 && cls.pass && cls.ratio <= 1e-3 && wrong.ratio >= 1e-2 && all_ok(&rs);
    line(8, ok, format!(
        "Whittaker: exact residual {exact:.3e}, quadrature branches {quad:.3e} (≤ 1e-6); B₂ = −πe^ξ max rel error {:.3e} (≤ 1e-3); wrong branch {:.3e} (≥ 1e-2)",
        cls.ratio, wrong.ratio
    ))
}

fn c9() -> Line {
    let rs = verify::run("liouville", &VerifyConfig::default()).unwrap();
    let st = find(&rs, "liouville/poisson-strip-p=2");
    let cv = find(&rs, "liouville/poisson-convexity-p=2");
    let gr = find(&rs, "liouville/poisson-growth-p=2");
    let ok = (st.ratio - 1.0).abs() <= 1e-3 && cv.ratio >= 0.0 && gr.ratio >= 3.5 && all_ok(&rs);
    line(9, ok, format!(
        "Liouville: M₂ vs π/(2y) worst |ratio − 1| {:.3e} (≤ 1e-3); min second difference {:.3e} (≥ 0); dyadic growth {:.4} (≥ 3.5)",
        (st.ratio - 1.0).abs(), cv.ratio, gr.ratio
    ))
}

fn c10() -> Line {
    let rs = verify::run("two-sided-lp", &VerifyConfig::default()).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for id in ["two-sided-lp/p=4/3", "two-sided-lp/p=4"] {
        let r = find(&rs, id);
        let raw = match r.parameters.get("ratio_p") {
            Some(hypb_core::report::ParamValue::Num(v)) => *v,
            _ => f64::NAN,
        };
        let inside = raw >= (1.0 / 3.0) / (1.0 + 1e-3) && raw <= 3.0 * (1.0 + 1e-3);
        ok &= inside && r.label == Label::Consistency;
        parts.push(format!("{id} ratio {raw:.4} labeled {:?}", r.label));
    }
    line(10, ok, format!("p ≠ 2 consistency within [1/3, 3]·(1 + 1e-3): {}", parts.join("; ")))
}

fn c11() -> Line {
    let cfg = VerifyConfig::default();
    let t = Instant::now();
    let a = verify::run("all", &cfg).unwrap();
    let s = secs(t);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = one.install(|| verify::run("all", &cfg).unwrap());
    let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let c = three.install(|| verify::run("all", &cfg).unwrap());
    let det = deterministic(&a, &b) && deterministic(&a, &c);
    let ok = all_ok(&a) && s <= 60.0 && det;
    line(11, ok, format!(
        "verify all 256² FFT: {} reports, all as expected: {}, {s:.1} s (≤ 60 s); identical across runs with 1 and 3 threads: {det}",
        a.len(),
        all_ok(&a)
    ))
}

#[test]
fn acceptance() {
    let lines = [c1(), c2(), c3(), c4(), c5(), c6(), c7(), c8(), c9(), c10(), c11()];
    let failed: Vec<&str> = lines.iter().filter(|l| !l.ok).map(|l| l.text.as_str()).collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
