//! Each family of the default battery behaves as expected on a reduced configuration,
//! and the errors documented for the check constructors are raised.

use hypb_core::report::all_ok;
use hypb_core::testfuncs::{conj_rational, HoloRational, Harmonic};
use hypb_core::verify::{self, check_liouville, check_nullspace, check_range_orthogonality, LiouvillePart,
    TruncatedBox, VerifyConfig};
use hypb_core::{Error, GridSpec, Label, TransformMethod};
use std::sync::Arc;

fn small() -> VerifyConfig {
    VerifyConfig { nx: 128, ny: 128, ..VerifyConfig::default() }
}

fn family_ok(id: &str) {
    let rs = verify::run(id, &small()).unwrap();
    assert!(!rs.is_empty());
    for r in &rs {
        assert!(r.ok(), "{}: ratio {} pass {} ({:?})", r.check_id, r.ratio, r.pass, r.label);
        assert!(r.check_id.starts_with(id), "{}", r.check_id);
    }
    assert!(all_ok(&rs));
    assert!(rs.iter().any(|r| r.label == Label::NegativeControl), "{id} has no negative control");
}

#[test]
fn norm_identity() {
    family_ok("norm-identity");
}
#[test]
fn two_sided() {
    family_ok("two-sided-lp");
}
#[test]
fn isometry() {
    family_ok("isometry");
}
#[test]
fn commutator() {
    family_ok("commutator");
}
#[test]
fn g_identities() {
    family_ok("g-identities");
}
#[test]
fn transform_oracles() {
    family_ok("transform-oracles");
}
#[test]
fn structural() {
    family_ok("structural");
}
#[test]
fn adjoint() {
    family_ok("adjoint");
}
#[test]
fn e_identity() {
    family_ok("e-identity");
}
#[test]
fn hardy() {
    family_ok("hardy");
}
#[test]
fn cup() {
    family_ok("cup");
}
#[test]
fn nullspace() {
    family_ok("nullspace");
}
#[test]
fn range() {
    family_ok("range");
}
#[test]
fn liouville() {
    family_ok("liouville");
}
#[test]
fn minimal_solver() {
    family_ok("minimal-solver");
}
#[test]
fn whittaker() {
    family_ok("whittaker");
}

#[test]
fn reports_sorted_and_reproducible() {
    let cfg = VerifyConfig { nx: 64, ny: 64, ..VerifyConfig::default() };
    let a = verify::run("two-sided-lp", &cfg).unwrap();
    let b = verify::run("two-sided-lp", &cfg).unwrap();
    assert!(verify::deterministic(&a, &b));
    assert!(a.windows(2).all(|w| w[0].check_id <= w[1].check_id));
}

#[test]
fn tag_errors() {
    let bx = TruncatedBox { n: 32, ..TruncatedBox::nullspace_default() };
    let e = check_nullspace(&HoloRational { a: 1.0, k: 3 }, &bx, TransformMethod::FftMultiplier).unwrap_err();
    assert!(matches!(e, Error::Tag(_)));
    let heights = [0.25, 0.5, 1.0];
    let e = check_liouville(&verify::default_bump(), 2.0, &heights, LiouvillePart::Growth, None).unwrap_err();
    assert!(matches!(e, Error::Tag(_)));
    let spec = GridSpec::upper(2.25, 4.5, 32, 32).unwrap();
    let w: Vec<Arc<dyn hypb_core::testfuncs::AnalyticTestFunction>> = vec![Arc::new(HoloRational { a: 1.0, k: 2 })];
    let e = check_range_orthogonality(&verify::default_bump(), &w, &spec, TransformMethod::FftMultiplier).unwrap_err();
    assert!(matches!(e, Error::Tag(_)));
    assert!(check_nullspace(&conj_rational(1.0, 3).unwrap(), &bx, TransformMethod::FftMultiplier).is_ok());
}

#[test]
fn bad_inputs() {
    let spec = GridSpec::upper(2.25, 4.5, 32, 32).unwrap();
    assert!(matches!(
        verify::check_two_sided_lp(&verify::default_bump(), 1.0, &spec, TransformMethod::FftMultiplier),
        Err(Error::InvalidInput(_))
    ));
    assert!(check_liouville(&Harmonic::Poisson, 2.0, &[1.0, 0.5, 2.0], LiouvillePart::Convexity, None).is_err());
    assert!(matches!(verify::run("nosuchcheck", &small()), Err(Error::InvalidInput(_))));
}
