//! Values from independent 1-D computations and closed forms.

use std::f64::consts::PI;

use hypb_core::testfuncs::{hardy_family, Harmonic};
use hypb_core::verify::{hardy_ratio_p2, strip_integral, KnownConstants};
use hypb_core::GridSpec;

#[test]
fn hardy_family_ratios() {
    // QUADPACK in t = log y on the hand-differentiated profile y^a ψ(log y)
    let table = [
        (0.5, 2, 1.6761667616296339),
        (0.5, 4, 5.101394359605581),
        (0.5, 8, 8.207190714046577),
        (0.5, 16, 10.429572245751704),
        (0.5, 64, 12.930573042841196),
        (0.5, 256, 14.115261943706825),
        (0.3, 64, 10.61391213035521),
        (0.7, 64, 10.61391213035521),
    ];
    let spec = GridSpec::upper(1.0, 1.0, 8, 8).unwrap();
    for (a, n, want) in table {
        let (num, den) = hardy_ratio_p2(&hardy_family(a, n).unwrap(), &spec).unwrap();
        let got = num / den;
        assert!((got / want - 1.0).abs() < 1e-8, "a={a} n={n}: {got} vs {want}");
        assert!(got < KnownConstants::HARDY_P2);
    }
}

#[test]
fn poisson_strip_integral() {
    for y in [0.05, 0.3, 1.0, 4.0] {
        let got = strip_integral(&Harmonic::Poisson, 2.0, y, None);
        assert!((got / (PI / (2.0 * y)) - 1.0).abs() < 1e-9, "y={y}: {got}");
    }
    // M_p(y) = y^{1−p} √π Γ(p − ½)/Γ(p) at p = 3: 3π/8 · y⁻²
    let got = strip_integral(&Harmonic::Poisson, 3.0, 0.5, None);
    assert!((got / (3.0 * PI / 8.0 * 4.0) - 1.0).abs() < 1e-9, "{got}");
}

#[test]
fn hardy_constant() {
    assert!((KnownConstants::hardy(2.0) - 8.0).abs() < 1e-12);
    // p = 2: ∫(|∂f|² + |∂̄f|²) = 2∫|∂̄f|² for compact support, giving 16
    assert!((KnownConstants::hardy(4.0) - 4.0 * (4.0f64 / 3.0).powi(4)).abs() < 1e-12);
}
