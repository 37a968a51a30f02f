//! Reading points and matrices given inline or as files.

use std::fs;
use std::path::Path;

use mudom_core::{CMatrix, CPoint, C64};

use crate::Failure;

/// Inline JSON when the argument starts with `[`, otherwise a file path.
fn source(arg: &str) -> Result<(String, bool), Failure> {
    let t = arg.trim_start();
    if t.starts_with('[') {
        return Ok((t.to_string(), false));
    }
    let text = fs::read_to_string(arg).map_err(|e| Failure::io(format!("{arg}: {e}")))?;
    let csv = Path::new(arg)
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    Ok((text, csv))
}

/// CSV rows of interleaved `re, im` values.
fn csv_rows(text: &str) -> Result<Vec<Vec<C64>>, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Failure::io(e.to_string()))?;
        let vals = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::invalid(format!("row {}: {e}", i + 1)))?;
        if vals.len() % 2 != 0 {
            return Err(Failure::invalid(format!(
                "row {} has an odd number of values",
                i + 1
            )));
        }
        rows.push(vals.chunks(2).map(|p| C64::new(p[0], p[1])).collect());
    }
    Ok(rows)
}

fn check_finite(v: &[C64]) -> Result<(), Failure> {
    if v.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Failure::invalid("values must be finite"))
    }
}

/// A point as a JSON array of `[re, im]` pairs, or a one-row CSV file.
pub fn read_point(arg: &str) -> Result<CPoint, Failure> {
    let (text, csv) = source(arg)?;
    let point = if csv {
        let mut rows = csv_rows(&text)?;
        if rows.len() != 1 {
            return Err(Failure::invalid("a point CSV has exactly one row"));
        }
        CPoint(rows.remove(0))
    } else {
        serde_json::from_str(&text).map_err(|e| Failure::invalid(format!("point: {e}")))?
    };
    check_finite(&point)?;
    Ok(point)
}

/// A square matrix as JSON rows of `[re, im]` pairs, or CSV rows.
pub fn read_matrix(arg: &str) -> Result<CMatrix, Failure> {
    let (text, csv) = source(arg)?;
    let m = if csv {
        CMatrix::from_rows(csv_rows(&text)?).map_err(Failure::from)?
    } else {
        serde_json::from_str(&text).map_err(|e| Failure::invalid(format!("matrix: {e}")))?
    };
    check_finite(m.as_slice())?;
    Ok(m)
}
