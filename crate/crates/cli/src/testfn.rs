//! `--testfn` selectors: `gaussian:c=2,sigma=4`, `conjrat:a=1,k=3`, `holorat:a=1,k=2`,
//! `poisson`, `rez`, `imz`, `hardy:a=0.5,n=64`, `zero`.

use std::collections::BTreeMap;
use std::sync::Arc;

use hypb_core::testfuncs::{conj_rational, gaussian_bump, hardy_family, AnalyticTestFunction, GaussianBump,
    Harmonic, HoloRational, Zero};
use hypb_core::C64;

use crate::CliError;

fn usage(s: impl Into<String>) -> CliError {
    CliError::Usage(s.into())
}

pub fn parse_testfn(s: &str) -> Result<Arc<dyn AnalyticTestFunction>, CliError> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let mut kv = BTreeMap::new();
    for part in rest.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| usage(format!("expected key=value in '{part}'")))?;
        let v: f64 = v.trim().parse().map_err(|_| usage(format!("bad number for {k}: '{v}'")))?;
        kv.insert(k.trim().to_string(), v);
    }
    let allowed: &[&str] = match name {
        "gaussian" => &["c", "sigma", "x"],
        "conjrat" | "holorat" => &["a", "k"],
        "hardy" => &["a", "n"],
        "poisson" | "rez" | "imz" | "zero" => &[],
        _ => return Err(usage(format!("unknown test function '{name}'"))),
    };
    if let Some(k) = kv.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(usage(format!("{name} does not take '{k}'")));
    }
    let get = |k: &str, d: f64| kv.get(k).copied().unwrap_or(d);
    let int = |k: &str, d: f64| -> Result<u32, CliError> {
        let v = get(k, d);
        if v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
            return Err(usage(format!("{k} must be a non-negative integer, got {v}")));
        }
        Ok(v as u32)
    };
    Ok(match name {
        "gaussian" => {
            let (c, sigma, x) = (get("c", 2.0), get("sigma", 4.0), get("x", 0.0));
            if x == 0.0 {
                Arc::new(gaussian_bump(c, sigma)?)
            } else {
                Arc::new(GaussianBump::at(C64::new(x, c), sigma)?)
            }
        }
        "conjrat" => Arc::new(conj_rational(get("a", 1.0), int("k", 2.0)?)?),
        "holorat" => {
            let (a, k) = (get("a", 1.0), int("k", 2.0)?);
            if !(a > 0.0) || k < 2 {
                return Err(usage("holorat needs a > 0 and k ≥ 2"));
            }
            Arc::new(HoloRational { a, k })
        }
        "hardy" => Arc::new(hardy_family(get("a", 0.5), int("n", 64.0)?)?),
        "poisson" => Arc::new(Harmonic::Poisson),
        "rez" => Arc::new(Harmonic::ReZ),
        "imz" => Arc::new(Harmonic::ImZ),
        _ => Arc::new(Zero),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selectors() {
        for s in ["gaussian:c=2,sigma=4", "conjrat:a=1,k=3", "poisson", "hardy:a=0.5,n=64", "zero", "holorat:k=3"] {
            assert!(parse_testfn(s).is_ok(), "{s}");
        }
        for s in ["nope", "gaussian:c", "gaussian:q=1", "conjrat:k=2.5", "hardy:n=x"] {
            assert!(matches!(parse_testfn(s), Err(CliError::Usage(_))), "{s}");
        }
    }
}
