//! Dataset files: CSV samples with 17 significant digits, JSON manifests
//! and validation reports. Readers report byte offsets on malformed input.

use crate::CliError;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use starmcf::geometry::{CurveGrid, Space};
use starmcf::hierarchy::Sigma;
use starmcf::potential::PotentialGrid;
use std::io::Write;
use std::path::Path;

/// One named check in a manifest or report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value.abs() <= tolerance }
    }

    /// A recorded quantity with no pass criterion.
    pub fn info(name: &str, value: f64) -> Self {
        Self { name: name.into(), value, tolerance: f64::INFINITY, pass: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridMeta {
    pub nx: usize,
    pub nt: usize,
    pub dx: f64,
    pub dt: f64,
    pub period: f64,
    /// The last column repeats x = period (curve datasets).
    #[serde(default)]
    pub wrap_column: bool,
}

/// Manifest describing one written dataset and the checks run at write
/// time. Timing is reported on stderr, never in the file, so identical
/// inputs produce identical bytes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub kind: String,
    pub files: Vec<String>,
    pub grid: GridMeta,
    pub sigma: i32,
    pub space: Option<String>,
    pub lambda: Vec<f64>,
    pub params: Vec<(String, f64)>,
    pub checks: Vec<Check>,
    pub overall_pass: bool,
}

pub fn tool_version() -> String {
    format!("starmcf {}", env!("CARGO_PKG_VERSION"))
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_potential_csv(path: &Path, q: &PotentialGrid) -> Result<(), CliError> {
    let mut out = String::with_capacity(q.nx * q.nt * 64);
    out.push_str("x,t,re_q,im_q\n");
    for j in 0..q.nt {
        for i in 0..q.nx {
            let v = q.value(i, j);
            out.push_str(&format!("{},{},{},{}\n", fmt(q.x(i)), fmt(q.t(j)), fmt(v.re), fmt(v.im)));
        }
    }
    std::fs::write(path, out).map_err(|e| CliError::io(path, e))
}

pub fn write_curve_csv(path: &Path, c: &CurveGrid) -> Result<(), CliError> {
    let mut out = String::with_capacity(c.nx * c.nt * 100);
    out.push_str("x,t,g0,g1,g2,g3\n");
    for j in 0..c.nt {
        for i in 0..c.nx {
            let g = c.sample(i, j);
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt(i as f64 * c.dx),
                fmt(j as f64 * c.dt),
                fmt(g[0]),
                fmt(g[1]),
                fmt(g[2]),
                fmt(g[3])
            ));
        }
    }
    std::fs::write(path, out).map_err(|e| CliError::io(path, e))
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(manifest)
        .map_err(|e| CliError::Usage(format!("manifest serialization failed: {e}")))?;
    let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(json.as_bytes()).map_err(|e| CliError::io(path, e))?;
    f.write_all(b"\n").map_err(|e| CliError::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<Manifest, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!(
            "{}: malformed manifest at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

/// Parsed rows of a CSV file with byte-offset diagnostics.
fn read_csv_rows(path: &Path, header: &str, fields: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut rows = Vec::new();
    let mut offset = 0usize;
    for (ln, line) in text.lines().enumerate() {
        let this_offset = offset;
        offset += line.len() + 1;
        if ln == 0 {
            if line.trim() != header {
                return Err(CliError::Usage(format!(
                    "{}: unexpected header at byte 0: got {:?}, want {:?}",
                    path.display(),
                    line,
                    header
                )));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::with_capacity(fields);
        for part in line.split(',') {
            let v: f64 = part.trim().parse().map_err(|_| {
                CliError::Usage(format!(
                    "{}: malformed number {:?} at byte offset {}",
                    path.display(),
                    part,
                    this_offset
                ))
            })?;
            row.push(v);
        }
        if row.len() != fields {
            return Err(CliError::Usage(format!(
                "{}: expected {} fields, found {} at byte offset {}",
                path.display(),
                fields,
                row.len(),
                this_offset
            )));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Infer (nx, nt) from the x/t columns of a sample table: x cycles fastest.
fn infer_grid(rows: &[Vec<f64>], path: &Path) -> Result<(usize, usize, f64, f64), CliError> {
    if rows.len() < 2 {
        return Err(CliError::Usage(format!("{}: not enough samples", path.display())));
    }
    let t0 = rows[0][1];
    let mut nx = rows.len();
    for (k, r) in rows.iter().enumerate().skip(1) {
        if r[1] != t0 {
            nx = k;
            break;
        }
    }
    if rows.len() % nx != 0 {
        return Err(CliError::Usage(format!(
            "{}: ragged grid ({} rows, {} per time)",
            path.display(),
            rows.len(),
            nx
        )));
    }
    let nt = rows.len() / nx;
    let dx = if nx > 1 { rows[1][0] - rows[0][0] } else { 1.0 };
    let dt = if nt > 1 { rows[nx][1] - rows[0][1] } else { 0.0 };
    Ok((nx, nt, dx, dt))
}

pub fn read_potential_csv(path: &Path, sigma: Sigma) -> Result<PotentialGrid, CliError> {
    let rows = read_csv_rows(path, "x,t,re_q,im_q", 4)?;
    let (nx, nt, dx, dt) = infer_grid(&rows, path)?;
    let values: Vec<C64> = rows.iter().map(|r| C64::new(r[2], r[3])).collect();
    let _ = nt;
    PotentialGrid::from_rows(nx, dx, dt, sigma, values)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn read_curve_csv(path: &Path, space: Space, wrap_column: bool) -> Result<CurveGrid, CliError> {
    let rows = read_csv_rows(path, "x,t,g0,g1,g2,g3", 6)?;
    let (nx, nt, dx, dt) = infer_grid(&rows, path)?;
    let samples: Vec<[f64; 4]> = rows.iter().map(|r| [r[2], r[3], r[4], r[5]]).collect();
    CurveGrid::from_samples(space, nx, nt, dx, dt, wrap_column, samples)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
