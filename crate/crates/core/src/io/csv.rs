use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::field::FtleField;
use crate::mesh::MeshTopology;

use super::FormatError;

/// Formats a float with 17 significant digits (lossless for `f64`).
/// Zero is written as `0`, the degenerate sentinel as `nan`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if v == 0.0 {
        if v.is_sign_negative() { "-0" } else { "0" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// CSV text with header `x,y[,z],ftle` and one row per point.
pub fn format_ftle_csv(field: &FtleField, mesh: &MeshTopology) -> Result<String, FormatError> {
    if field.npoints() != mesh.npoints() {
        return Err(FormatError::Invalid(format!(
            "field has {} points, mesh has {}",
            field.npoints(),
            mesh.npoints()
        )));
    }
    let axes = ["x", "y", "z"];
    let d = mesh.dim().n();
    let mut out = String::with_capacity(64 * (field.npoints() + 1));
    for a in &axes[..d] {
        out.push_str(a);
        out.push(',');
    }
    out.push_str("ftle\n");
    for (p, &v) in field.values.iter().enumerate() {
        for &c in mesh.coord(p) {
            out.push_str(&format_float(c));
            out.push(',');
        }
        let _ = writeln!(out, "{}", format_float(v));
    }
    Ok(out)
}

pub fn write_ftle_csv(
    path: impl AsRef<Path>,
    field: &FtleField,
    mesh: &MeshTopology,
) -> Result<(), FormatError> {
    fs::write(path, format_ftle_csv(field, mesh)?)?;
    Ok(())
}
