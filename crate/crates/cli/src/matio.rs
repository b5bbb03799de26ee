//! Matrix file format: a JSON document with an integer `dim` and a row-major
//! `entries` list of `[re, im]` pairs of length `dim^2`. The writer emits 17
//! significant digits so a write/read round trip reproduces every entry
//! exactly.

use num_complex::Complex64;
use qreps::matrix::TracialMatrix;
use serde_json::Value;
use std::fmt::Write as _;
use std::path::Path;

use crate::CliError;

/// Formats a float with 17 significant digits; parsing the result recovers
/// the original bit pattern.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn read_matrix(path: &Path) -> Result<TracialMatrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let dim = value
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| CliError::Parse {
            path: path.display().to_string(),
            detail: "missing integer field `dim`".to_string(),
        })? as usize;
    let entries = value
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Parse {
            path: path.display().to_string(),
            detail: "missing array field `entries`".to_string(),
        })?;
    if entries.len() != dim * dim {
        return Err(CliError::Parse {
            path: path.display().to_string(),
            detail: format!(
                "`entries` has length {}, expected dim^2 = {}",
                entries.len(),
                dim * dim
            ),
        });
    }
    let mut data = Vec::with_capacity(dim * dim);
    for (i, pair) in entries.iter().enumerate() {
        let parts = pair.as_array().ok_or_else(|| CliError::Parse {
            path: path.display().to_string(),
            detail: format!("entry {i} is not a [re, im] pair"),
        })?;
        if parts.len() != 2 {
            return Err(CliError::Parse {
                path: path.display().to_string(),
                detail: format!("entry {i} has {} components, expected 2", parts.len()),
            });
        }
        let re = parts[0].as_f64().ok_or_else(|| CliError::Parse {
            path: path.display().to_string(),
            detail: format!("entry {i} real part is not a number"),
        })?;
        let im = parts[1].as_f64().ok_or_else(|| CliError::Parse {
            path: path.display().to_string(),
            detail: format!("entry {i} imaginary part is not a number"),
        })?;
        data.push(Complex64::new(re, im));
    }
    TracialMatrix::new(dim, data).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}

pub fn render_matrix(m: &TracialMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"dim\": {},", m.dim());
    let _ = writeln!(out, "  \"entries\": [");
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            let comma = if i == n - 1 && j == n - 1 { "" } else { "," };
            let _ = writeln!(
                out,
                "    [{}, {}]{}",
                format_f64(z.re),
                format_f64(z.im),
                comma
            );
        }
    }
    let _ = writeln!(out, "  ]");
    let _ = writeln!(out, "}}");
    out
}

pub fn write_matrix(path: &Path, m: &TracialMatrix) -> Result<(), CliError> {
    std::fs::write(path, render_matrix(m)).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qreps::groups::clock_shift_tuple;

    #[test]
    fn round_trip_identity() {
        let dir = std::env::temp_dir().join("qreps-matio-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("id3.json");
        let m = TracialMatrix::identity(3);
        write_matrix(&path, &m).unwrap();
        let back = read_matrix(&path).unwrap();
        assert_eq!(m.entries(), back.entries());
    }

    #[test]
    fn round_trip_clock_exact() {
        let dir = std::env::temp_dir().join("qreps-matio-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("clock5.json");
        let t = clock_shift_tuple(5, 1).unwrap();
        write_matrix(&path, t.u(1)).unwrap();
        let back = read_matrix(&path).unwrap();
        // bit-exact round trip
        assert_eq!(t.u(1).entries(), back.entries());
    }

    #[test]
    fn malformed_entry_count_names_expected() {
        let dir = std::env::temp_dir().join("qreps-matio-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");
        std::fs::write(&path, r#"{"dim": 2, "entries": [[1.0, 0.0]]}"#).unwrap();
        match read_matrix(&path) {
            Err(CliError::Parse { detail, .. }) => {
                assert!(detail.contains("expected dim^2 = 4"), "{detail}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}

