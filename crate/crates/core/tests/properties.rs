use hypb_core::calculus::mult_m_pow;
use hypb_core::grid::{bilinear_pairing, lp_norm};
use hypb_core::testfuncs::{sample, GaussianSum, Part};
use hypb_core::transforms::transform;
use hypb_core::verify::{check_norm_identity_p2, NormMode};
use hypb_core::{Field, GridSpec, KernelId, TransformMethod, WeightKind, C64};
use proptest::prelude::*;

fn spec() -> GridSpec {
    GridSpec::upper(2.25, 4.5, 32, 32).unwrap()
}

fn field(seed: u64, spec: &GridSpec) -> Field {
    let center = if spec.is_upper() { C64::new(0.0, 2.2) } else { C64::new(0.0, 0.0) };
    sample(&GaussianSum::random(seed, 3, center, 0.4, (4.0, 8.0)), Part::F, spec)
}

fn rel(a: &Field, b: &Field) -> f64 {
    let e = lp_norm(&a.sub(b).unwrap(), 2.0, WeightKind::Plain).unwrap();
    e / lp_norm(b, 2.0, WeightKind::Plain).unwrap().max(1e-300)
}

fn kernel() -> impl Strategy<Value = KernelId> {
    prop::sample::select(KernelId::ALL.to_vec())
}

fn grid_for(k: KernelId) -> GridSpec {
    if k.plane() == hypb_core::PlaneKind::FullPlane {
        GridSpec::full(3.0, 3.0, 32, 32).unwrap()
    } else {
        spec()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transforms_are_linear(k in kernel(), s1 in 0u64..1000, s2 in 0u64..1000,
                             ar in -2.0..2.0f64, ai in -2.0..2.0f64, b in -2.0..2.0f64,
                             quad in any::<bool>()) {
        let m = if quad { TransformMethod::Quadrature } else { TransformMethod::FftMultiplier };
        let g = grid_for(k);
        let (f1, f2) = (field(s1, &g), field(s2, &g));
        let (a, b) = (C64::new(ar, ai), C64::new(b, 0.0));
        let lhs = transform(k, &f1.scale(a).add(&f2.scale(b)).unwrap(), m).unwrap();
        let rhs = transform(k, &f1, m).unwrap().scale(a).add(&transform(k, &f2, m).unwrap().scale(b)).unwrap();
        prop_assert!(rel(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn norm_ratio_is_scale_invariant(lambda in 0.01..100.0f64) {
        use hypb_core::testfuncs::GaussianBump;
        struct Scaled(GaussianBump, f64);
        impl hypb_core::testfuncs::AnalyticTestFunction for Scaled {
            fn name(&self) -> String { format!("{}*{}", self.1, self.0.name()) }
            fn f(&self, z: C64) -> C64 { self.0.f(z) * self.1 }
            fn d(&self, z: C64) -> C64 { self.0.d(z) * self.1 }
            fn dbar(&self, z: C64) -> C64 { self.0.dbar(z) * self.1 }
            fn lap(&self, z: C64) -> C64 { self.0.lap(z) * self.1 }
            fn d2(&self, z: C64) -> C64 { self.0.d2(z) * self.1 }
            fn support(&self) -> hypb_core::testfuncs::Support { self.0.support() }
            fn tags(&self) -> Vec<hypb_core::testfuncs::SpaceTag> { self.0.tags() }
        }
        let g = GridSpec::upper(2.25, 4.5, 64, 64).unwrap();
        let base = hypb_core::verify::default_bump();
        let r1 = check_norm_identity_p2(&base, &g, TransformMethod::FftMultiplier, NormMode::ClosedForm).unwrap();
        let r2 = check_norm_identity_p2(&Scaled(base, lambda), &g, TransformMethod::FftMultiplier, NormMode::ClosedForm).unwrap();
        prop_assert!((r1.ratio - r2.ratio).abs() < 1e-12);
    }

    #[test]
    fn m_is_an_isometry(s in 0u64..1000) {
        let g = spec();
        let f = field(s, &g);
        let mf = mult_m_pow(&f, 1).unwrap();
        let a = lp_norm(&mf, 2.0, WeightKind::Hyperbolic).unwrap();
        let b = lp_norm(&f, 2.0, WeightKind::Plain).unwrap();
        prop_assert!((a / b - 1.0).abs() < 1e-13);
        let c = lp_norm(&mf, 2.0, WeightKind::Plain).unwrap();
        let d = lp_norm(&f, 2.0, WeightKind::DualHyperbolic).unwrap();
        prop_assert!((c / d - 1.0).abs() < 1e-13);
    }

    #[test]
    fn d_down_and_d_up_are_transposes(s1 in 0u64..1000, s2 in 0u64..1000) {
        use hypb_core::transforms::{d_ops, DOp};
        let g = GridSpec::upper(2.25, 4.5, 16, 16).unwrap();
        let m = TransformMethod::Quadrature;
        let (f, h) = (field(s1, &g), field(s2, &g));
        let a = bilinear_pairing(&d_ops(&f, DOp::DDown, m).unwrap(), &h).unwrap();
        let b = bilinear_pairing(&f, &d_ops(&h, DOp::DUp, m).unwrap()).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-30));
    }
}
