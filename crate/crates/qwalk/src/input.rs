//! Reading measured curves back for fitting.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use crate::error::{Error, Result};

/// Observable stored in a curve file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Xi,
    Dos,
}

impl Observable {
    fn value_column(self) -> &'static str {
        match self {
            Observable::Xi => "xi",
            Observable::Dos => "rho",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub delta_omega: f64,
    pub value: f64,
    /// Zero when the file has no error column.
    pub stderr: f64,
}

/// One curve: all rows of a file sharing a disorder strength.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub dtheta_s: Option<f64>,
    pub points: Vec<CurvePoint>,
}

/// Parse a curve file. `δω` comes from a `delta_omega` column when present,
/// otherwise from `omega` as `π/2 − |ω|` (rows at or beyond `π/2` dropped).
/// Rows are grouped by a `dtheta_s` column, falling back to a `# dtheta_s:`
/// header line.
pub fn read_curves(path: &Path, what: Observable) -> Result<Vec<Curve>> {
    let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
    let schema = |msg: String| Error::Schema {
        path: path.to_owned(),
        msg,
    };
    let header_dtheta = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix("# dtheta_s:"))
        .map(|v| v.trim().parse::<f64>())
        .transpose()
        .map_err(|_| schema("unreadable '# dtheta_s:' header".into()))?;

    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let columns: Vec<String> = rdr
        .headers()
        .map_err(|e| schema(format!("unreadable header row: {e}")))?
        .iter()
        .map(str::to_owned)
        .collect();
    let find = |name: &str| columns.iter().position(|c| c == name);
    let value_col = find(what.value_column()).ok_or_else(|| {
        schema(format!(
            "missing column '{}' (found: {})",
            what.value_column(),
            columns.join(",")
        ))
    })?;
    let dw_col = find("delta_omega");
    let omega_col = find("omega");
    if dw_col.is_none() && omega_col.is_none() {
        return Err(schema(format!(
            "need a 'delta_omega' or 'omega' column (found: {})",
            columns.join(",")
        )));
    }
    let err_col = find("stderr");
    let group_col = find("dtheta_s");

    let mut curves: Vec<Curve> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| schema(format!("data row {}: {e}", i + 1)))?;
        let cell = |col: usize| -> Result<f64> {
            let raw = rec.get(col).unwrap_or("");
            raw.parse::<f64>().map_err(|_| {
                schema(format!(
                    "data row {}: column '{}' holds '{raw}', not a number",
                    i + 1,
                    columns[col]
                ))
            })
        };
        let delta_omega = match dw_col {
            Some(c) => cell(c)?,
            None => FRAC_PI_2 - cell(omega_col.unwrap_or_default())?.abs(),
        };
        if dw_col.is_none() && !(delta_omega > 0.0) {
            continue;
        }
        let point = CurvePoint {
            delta_omega,
            value: cell(value_col)?,
            stderr: err_col.map(cell).transpose()?.unwrap_or(0.0),
        };
        let dtheta_s = group_col.map(cell).transpose()?.or(header_dtheta);
        match curves
            .iter_mut()
            .find(|c| c.dtheta_s.map(f64::to_bits) == dtheta_s.map(f64::to_bits))
        {
            Some(c) => c.points.push(point),
            None => curves.push(Curve {
                label: match dtheta_s {
                    Some(d) => format!("{}:dtheta_s={d}", path.display()),
                    None => path.display().to_string(),
                },
                dtheta_s,
                points: vec![point],
            }),
        }
    }
    if curves.is_empty() {
        return Err(schema("no data rows".into()));
    }
    Ok(curves)
}
