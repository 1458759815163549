//! Diagnostics CSV and binary PGM raster export.

use std::fs;
use std::path::Path;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::field::{HullField, Raster, Window};

pub const CSV_HEADER: &str = "t,l2,l1,hs,energy,rhs_l2,grad_hull_sq,sym_drift,min_u,max_u";

fn exact(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text for a trajectory; `two_component` adds the `min_v,max_v`
/// columns.
pub fn diagnostics_csv(records: &[DiagnosticsRecord], two_component: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    if two_component {
        out += ",min_v,max_v";
    }
    out.push('\n');
    for r in records {
        let mut row = vec![
            r.t,
            r.l2,
            r.l1,
            r.hs,
            r.energy,
            r.rhs_l2,
            r.grad_hull_sq,
            r.sym_drift,
            r.min_u,
            r.max_u,
        ];
        if two_component {
            let (lo, hi) = r.v_range.unwrap_or((f64::NAN, f64::NAN));
            row.extend([lo, hi]);
        }
        let cells: Vec<String> = row.into_iter().map(exact).collect();
        out += &cells.join(",");
        out.push('\n');
    }
    out
}

pub fn write_diagnostics_csv(records: &[DiagnosticsRecord], two_component: bool, path: &Path) -> Result<()> {
    fs::write(path, diagnostics_csv(records, two_component))?;
    Ok(())
}

/// Parses text produced by [`diagnostics_csv`].
pub fn parse_diagnostics_csv(text: &str) -> Result<Vec<DiagnosticsRecord>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::CorruptPayload("empty CSV".into()))?;
    let two = match header.strip_prefix(CSV_HEADER) {
        Some("") => false,
        Some(",min_v,max_v") => true,
        _ => return Err(Error::CorruptPayload(format!("unexpected header `{header}`"))),
    };
    let width = if two { 12 } else { 10 };
    lines
        .enumerate()
        .map(|(i, line)| {
            let x: Vec<f64> = line
                .split(',')
                .map(|c| c.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::CorruptPayload(format!("row {}: {e}", i + 1)))?;
            if x.len() != width {
                return Err(Error::CorruptPayload(format!("row {} has {} columns", i + 1, x.len())));
            }
            Ok(DiagnosticsRecord {
                t: x[0],
                l2: x[1],
                l1: x[2],
                hs: x[3],
                energy: x[4],
                rhs_l2: x[5],
                grad_hull_sq: x[6],
                sym_drift: x[7],
                min_u: x[8],
                max_u: x[9],
                v_range: two.then(|| (x[10], x[11])),
            })
        })
        .collect()
}

/// Binary PGM (`P5`, maxval 255).
pub fn pgm_bytes(raster: &Raster) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", raster.width, raster.height).into_bytes();
    out.extend_from_slice(&raster.pixels);
    out
}

/// Renders `field` over `window` at `resolution²` pixels and writes a PGM.
pub fn export_raster(field: &HullField, window: Window, resolution: usize, path: &Path) -> Result<()> {
    let raster = field.render_image(window, resolution)?;
    fs::write(path, pgm_bytes(&raster))?;
    Ok(())
}
