//! Field CSV (`x,y,re,im`) with a JSON sidecar carrying the grid, B₂ profile CSV, and
//! report JSON.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use hypb_core::report::GridSummary;
use hypb_core::transforms::TransformMeta;
use hypb_core::{CheckReport, Field, GridSpec, PlaneKind, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    #[serde(flatten)]
    pub grid: GridSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformMeta>,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_field_csv<W: Write>(f: &Field, w: W) -> Result<(), CliError> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["x", "y", "re", "im"])?;
    for j in 0..f.spec.ny {
        for i in 0..f.spec.nx {
            let v = f.get(i, j);
            wr.write_record([num(f.spec.x(i)), num(f.spec.y(j)), num(v.re), num(v.im)])?;
        }
    }
    wr.flush()?;
    Ok(())
}

/// Writes `path` and `path.json`.
pub fn write_field(
    f: &Field,
    path: &Path,
    source: Option<String>,
    transform: Option<TransformMeta>,
) -> Result<(), CliError> {
    write_field_csv(f, File::create(path)?)?;
    let side = Sidecar { grid: (&f.spec).into(), source, transform };
    std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&side)?)?;
    Ok(())
}

pub fn spec_from_summary(g: &GridSummary) -> Result<GridSpec, CliError> {
    let plane = match g.plane.as_str() {
        "upper" => PlaneKind::UpperHalfPlane,
        "full" => PlaneKind::FullPlane,
        p => return Err(CliError::Usage(format!("unknown plane '{p}' in sidecar"))),
    };
    Ok(GridSpec::new(g.half_width, g.height, g.nx, g.ny, plane)?)
}

/// Reads a field written by [`write_field`]; the sidecar must be present and the
/// coordinates must match the grid it describes.
pub fn read_field(path: &Path) -> Result<Field, CliError> {
    let side_path = sidecar_path(path);
    let mut s = String::new();
    File::open(&side_path)
        .map_err(|e| CliError::Usage(format!("cannot open sidecar {}: {e}", side_path.display())))?
        .read_to_string(&mut s)?;
    let side: Sidecar = serde_json::from_str(&s)?;
    let spec = spec_from_summary(&side.grid)?;
    let file = File::open(path).map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
    let mut rd = csv::Reader::from_reader(file);
    let hdr = rd.headers()?.clone();
    if hdr.iter().collect::<Vec<_>>() != ["x", "y", "re", "im"] {
        return Err(CliError::Usage(format!("{}: expected header x,y,re,im", path.display())));
    }
    let mut samples = Vec::with_capacity(spec.len());
    for (k, rec) in rd.records().enumerate() {
        let rec = rec?;
        let p = |c: usize| -> Result<f64, CliError> {
            rec.get(c)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| CliError::Usage(format!("{}: bad number in row {}", path.display(), k + 2)))
        };
        let (x, y) = (p(0)?, p(1)?);
        if k < spec.len() {
            let (i, j) = (k % spec.nx, k / spec.nx);
            let tol = 1e-9 * (spec.half_width + spec.height);
            if (x - spec.x(i)).abs() > tol || (y - spec.y(j)).abs() > tol {
                return Err(CliError::Usage(format!(
                    "{}: row {} at ({x}, {y}) does not match the sidecar grid",
                    path.display(),
                    k + 2
                )));
            }
        }
        samples.push(C64::new(p(2)?, p(3)?));
    }
    Ok(Field::new(spec, samples)?)
}

pub fn write_b2_csv<W: Write>(b2: &[(f64, C64)], w: W) -> Result<(), CliError> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["xi", "re", "im"])?;
    for &(xi, b) in b2 {
        wr.write_record([num(xi), num(b.re), num(b.im)])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_b2_csv<R: Read>(r: R) -> Result<Vec<(f64, C64)>, CliError> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let p = |c: usize| rec.get(c).and_then(|s| s.parse::<f64>().ok()).ok_or_else(|| CliError::Usage("bad B2 row".into()));
        out.push((p(0)?, C64::new(p(1)?, p(2)?)));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub pass: bool,
    pub reports: Vec<CheckReport>,
}

/// One CSV row per report.
pub fn write_reports_csv<W: Write>(reports: &[CheckReport], w: W) -> Result<(), CliError> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["check_id", "label", "pass", "ok", "ratio", "lhs", "rhs", "tolerance", "runtime_ms"])?;
    for r in reports {
        let label = serde_json::to_string(&r.label)?.trim_matches('"').to_string();
        wr.write_record([
            r.check_id.clone(),
            label,
            r.pass.to_string(),
            r.ok().to_string(),
            num(r.ratio),
            num(r.lhs),
            num(r.rhs),
            num(r.tolerance),
            r.runtime_ms.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
