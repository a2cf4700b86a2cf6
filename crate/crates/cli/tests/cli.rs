use std::path::Path;

use hypb::io::{read_b2_csv, read_field, sidecar_path, write_field, VerifyOutput};
use hypb::{main_with_args, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
use hypb_core::{Field, GridSpec, C64};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["hypb"];
    argv.extend_from_slice(args);
    let code = main_with_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn rel(a: &Field, b: &Field) -> f64 {
    use hypb_core::grid::lp_norm;
    use hypb_core::WeightKind::Plain;
    lp_norm(&a.sub(b).unwrap(), 2.0, Plain).unwrap() / lp_norm(b, 2.0, Plain).unwrap()
}

#[test]
fn verify_norm_identity() {
    let (code, out, _) = run(&["verify", "norm-identity", "--grid", "256", "--method", "fft"]);
    assert_eq!(code, EXIT_OK);
    let v: VerifyOutput = serde_json::from_str(&out).unwrap();
    assert!(v.pass);
    let t = v.reports.iter().find(|r| r.check_id == "norm-identity/transform").unwrap();
    assert!((t.ratio - 1.0).abs() <= 1e-3);
}

#[test]
fn verify_single_check_and_csv() {
    let (code, out, _) = run(&["verify", "two-sided-lp/p=4", "--grid", "64", "--csv"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("two-sided-lp/p=4,consistency,true,true,"));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["verify", "nosuchcheck"]).0, EXIT_USAGE);
    assert_eq!(run(&["verify", "norm-identity/nosuch", "--grid", "32"]).0, EXIT_USAGE);
    assert_eq!(run(&["verify", "norm-identity", "--method", "quadrature"]).0, EXIT_USAGE);
    assert_eq!(run(&["verify", "norm-identity", "--grid", "12:x"]).0, EXIT_USAGE);
    assert_eq!(run(&["verify", "two-sided-lp", "--p", "1"]).0, EXIT_USAGE);
    assert_eq!(run(&["transform", "--op", "b_down"]).0, EXIT_USAGE);
    assert_eq!(run(&["transform", "--op", "nope", "--testfn", "zero"]).0, EXIT_USAGE);
    assert_eq!(run(&["transform", "--op", "b_down", "--testfn", "gaussian:q=1"]).0, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run(&["transform", "--op", "b_down", "--input", "/nonexistent.csv"]).0, EXIT_USAGE);
}

#[test]
fn numerical_failure_exit_code() {
    // a zero tolerance override cannot be met by the FD4 commutator residuals
    let (code, _, err) = run(&["verify", "commutator", "--grid", "64", "--tol", "0"]);
    assert_eq!(code, EXIT_FAIL);
    assert!(err.contains("FAILED commutator/"));
}

#[test]
fn transform_files_and_method_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("fft.csv");
    let b = dir.path().join("quad.csv");
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let base = ["transform", "--op", "b_down", "--testfn", "gaussian:c=2,sigma=4", "--grid", "64"];
    let mut args: Vec<String> = base.iter().map(|s| s.to_string()).collect();
    args.extend(["--method".into(), "fft".into(), "--out".into(), s(&a)]);
    assert_eq!(run(&args.iter().map(String::as_str).collect::<Vec<_>>()).0, EXIT_OK);
    let mut args: Vec<String> = base.iter().map(|s| s.to_string()).collect();
    args.extend(["--method".into(), "quadrature".into(), "--out".into(), s(&b)]);
    assert_eq!(run(&args.iter().map(String::as_str).collect::<Vec<_>>()).0, EXIT_OK);
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(sidecar_path(&a)).unwrap()).unwrap();
    assert_eq!(side["L"], 2.25);
    assert_eq!(side["nx"], 64);
    assert_eq!(side["plane"], "upper");
    assert_eq!(side["transform"]["kernel"], "BDown");
    let (fa, fb) = (read_field(&a).unwrap(), read_field(&b).unwrap());
    assert!(rel(&fa, &fb) <= 1e-3, "{}", rel(&fa, &fb));

    // a written field can be fed back in
    let c = dir.path().join("again.csv");
    let (code, _, _) = run(&["transform", "--op", "c_down", "--input", &s(&a), "--out", &s(&c)]);
    assert_eq!(code, EXIT_OK);
    assert!(read_field(&c).unwrap().is_finite());
}

#[test]
fn field_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f.csv");
    let spec = GridSpec::full(1.5, 0.75, 12, 10).unwrap();
    let f = Field::from_fn(spec, |z| C64::new(z.re.sin() / 3.0, (z * z).im.exp() * 1e-7));
    write_field(&f, &p, None, None).unwrap();
    let g = read_field(&p).unwrap();
    assert_eq!(f, g);
    std::fs::remove_file(sidecar_path(&p)).unwrap();
    assert!(read_field(&p).is_err());
}

#[test]
fn whittaker_classify_and_tabulate() {
    let (code, out, _) = run(&["whittaker", "classify", "--testfn", "conjrat:a=1,k=2", "--premultiply-M"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["is_cokernel"], true);

    let (code, out, _) = run(&["whittaker", "classify", "--testfn", "gaussian:c=2,sigma=4"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["is_cokernel"], false);

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("b2.csv");
    let (code, _, _) = run(&[
        "whittaker", "classify", "--testfn", "conjrat:a=1,k=2", "--premultiply-M", "--csv", "--out", p.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let b2 = read_b2_csv(std::fs::File::open(&p).unwrap()).unwrap();
    let band: Vec<_> = b2.iter().filter(|(xi, _)| (-4.0..=-0.25).contains(xi)).collect();
    assert!(!band.is_empty());
    for (xi, b) in band {
        let want = -std::f64::consts::PI * xi.exp();
        assert!((b.re - want).abs() <= 1e-3 * want.abs() && b.im.abs() <= 1e-3 * want.abs(), "{xi}: {b}");
    }

    let (code, out, _) = run(&["whittaker", "tabulate", "--family", "Y", "--A", "0", "--B", "1", "--range", "0.1:30"]);
    assert_eq!(code, EXIT_OK);
    let mut rows = 0;
    for l in out.lines().skip(1) {
        let r: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
        assert!(r <= 1e-6);
        rows += 1;
    }
    assert_eq!(rows, 200);
    assert_eq!(run(&["whittaker", "tabulate", "--family", "X", "--range", "2:1"]).0, EXIT_USAGE);
}

#[test]
fn seeds_reproduce_reports() {
    let a = run(&["verify", "isometry", "--grid", "64", "--seed", "11", "--threads", "1"]).1;
    let b = run(&["verify", "isometry", "--grid", "64", "--seed", "11"]).1;
    let strip = |s: &str| {
        let mut v: VerifyOutput = serde_json::from_str(s).unwrap();
        for r in &mut v.reports {
            r.runtime_ms = 0;
        }
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(strip(&a), strip(&b));
    let c = run(&["verify", "isometry", "--grid", "64", "--seed", "12"]).1;
    assert_ne!(strip(&a), strip(&c));
}
