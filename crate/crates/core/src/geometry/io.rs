use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::field::{LogPole, ScalarField};
use super::grid::TorusGrid;
use super::ops::integrate;
use crate::error::{Error, Result};

/// Summary written next to a field dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSummary {
    pub min: f64,
    pub max: f64,
    pub integral: Option<f64>,
    pub grid: TorusGrid,
}

pub fn summarize(u: &ScalarField) -> FieldSummary {
    FieldSummary {
        min: u.min(),
        max: u.max(),
        integral: integrate(u, None).ok(),
        grid: u.grid(),
    }
}

const AXES: [&str; 4] = ["x1", "y1", "x2", "y2"];

/// CSV with one row per node: coordinates, value, pole flag.
pub fn to_csv(u: &ScalarField) -> String {
    let g = u.grid();
    let dim = g.real_dim();
    let mut s = String::with_capacity(g.len() * 28 * (dim + 1));
    for a in AXES.iter().take(dim) {
        s.push_str(a);
        s.push(',');
    }
    s.push_str("value,pole_flag\n");
    for i in 0..g.len() {
        let x = g.point(i);
        for v in x.iter().take(dim) {
            let _ = write!(s, "{v:.16e},");
        }
        let _ = writeln!(s, "{:.16e},{}", u.value(i), u.pole_mask()[i] as u8);
    }
    s
}

/// Boolean mask as CSV (coordinates plus 0/1 flag).
pub fn mask_to_csv(grid: TorusGrid, mask: &[bool], name: &str) -> String {
    let dim = grid.real_dim();
    let mut s = String::new();
    for a in AXES.iter().take(dim) {
        s.push_str(a);
        s.push(',');
    }
    s.push_str(name);
    s.push('\n');
    for (i, m) in mask.iter().enumerate() {
        let x = grid.point(i);
        for v in x.iter().take(dim) {
            let _ = write!(s, "{v:.16e},");
        }
        let _ = writeln!(s, "{}", *m as u8);
    }
    s
}

/// Reads a field written by [`to_csv`]. Rows are placed by their coordinates;
/// pole-flagged rows become poles with coefficient `pole_coeff`.
pub fn from_csv(text: &str, n: usize, pole_coeff: f64) -> Result<ScalarField> {
    let dim = 2 * n;
    let rows: Vec<&str> = text.lines().skip(1).filter(|l| !l.trim().is_empty()).collect();
    let nodes = (rows.len() as f64).powf(1.0 / dim as f64).round() as usize;
    let grid = TorusGrid::new(n, nodes)?;
    if grid.len() != rows.len() {
        return Err(Error::Validation(format!(
            "{} rows do not form a grid in dimension {n}",
            rows.len()
        )));
    }
    let mut values = vec![f64::NAN; grid.len()];
    let mut poles = Vec::new();
    for (line_no, row) in rows.iter().enumerate() {
        let cols: Vec<&str> = row.split(',').map(str::trim).collect();
        if cols.len() != dim + 2 {
            return Err(Error::Validation(format!("row {}: expected {} columns", line_no + 2, dim + 2)));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Validation(format!("row {}: {e}", line_no + 2)))
        };
        let mut c = [0usize; 4];
        for a in 0..dim {
            let x = parse(cols[a])?;
            c[a] = ((x * nodes as f64).round() as i64).rem_euclid(nodes as i64) as usize;
        }
        let idx = grid.index(&c[..dim]);
        values[idx] = parse(cols[dim])?;
        if cols[dim + 1] == "1" {
            poles.push(idx);
        }
    }
    let mut f = ScalarField::from_values(grid, values)?;
    for node in poles {
        f = f.with_pole(LogPole { node, coeff: pole_coeff });
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let g = TorusGrid::new(1, 8).unwrap();
        let f = ScalarField::from_fn(g, |x| (x[0] * 7.0).sin() / 3.0 + x[1]);
        let back = from_csv(&to_csv(&f), 1, 0.0).unwrap();
        assert!(f.sup_distance(&back) < 1e-15);
    }
}
