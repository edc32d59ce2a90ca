//! Fixed-format MPS export.
//!
//! Columns appear in model order, rows in insertion order. Row names are
//! `R0, R1, ...`; a column keeps its model name when that fits the 8-char
//! field, otherwise it becomes `X{index}`. Rows with two different finite
//! bounds are written as `G` rows with a `RANGES` entry. Free rows are `N`
//! rows after the objective `COST`.

use std::fmt::Write as _;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use super::LinearModel;

fn column_name(model: &LinearModel, j: usize) -> String {
    let name = &model.columns[j].name;
    if !name.is_empty() && name.len() <= 8 && name.chars().all(|c| c.is_ascii_graphic()) {
        name.clone()
    } else {
        format!("X{j}")
    }
}

/// Formats a rational into the 12-character numeric field.
pub fn format_number(v: &Rational64) -> String {
    if v.is_integer() {
        return v.to_integer().to_string();
    }
    let f = v.to_f64().unwrap_or(f64::NAN);
    for precision in (0..=10).rev() {
        let s = format!("{f:.precision$}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s.len() <= 12 {
            return s;
        }
    }
    format!("{f:e}")
}

fn entry(out: &mut String, first: &str, pairs: &[(String, String)]) {
    let mut line = format!("    {first:<8}");
    for (i, (name, value)) in pairs.iter().enumerate() {
        if i == 0 {
            let _ = write!(line, "  {name:<8}  {value:>12}");
        } else {
            let _ = write!(line, "   {name:<8}  {value:>12}");
        }
    }
    out.push_str(line.trim_end());
    out.push('\n');
}

/// Writes `model` as fixed-format MPS. With `integer` every column is
/// wrapped in integer markers.
pub fn write_mps(model: &LinearModel, name: &str, integer: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME          {name}");
    out.push_str("ROWS\n N  COST\n");
    for (i, r) in model.rows.iter().enumerate() {
        let kind = match (r.lower, r.upper) {
            (Some(l), Some(u)) if l == u => "E",
            (Some(_), _) => "G",
            (None, Some(_)) => "L",
            (None, None) => "N",
        };
        let _ = writeln!(out, " {kind}  R{i}");
    }

    // column-major coefficient lists
    let mut by_column: Vec<Vec<(usize, Rational64)>> = vec![Vec::new(); model.num_columns()];
    for (i, r) in model.rows.iter().enumerate() {
        for (j, a) in &r.coefficients {
            match by_column[*j].last_mut() {
                Some((row, acc)) if *row == i => *acc += *a,
                _ => by_column[*j].push((i, *a)),
            }
        }
    }

    out.push_str("COLUMNS\n");
    if integer {
        out.push_str("    MARKER                 'MARKER'                 'INTORG'\n");
    }
    for (j, c) in model.columns.iter().enumerate() {
        let cname = column_name(model, j);
        let mut pairs = Vec::new();
        if !c.objective.is_zero() {
            pairs.push(("COST".to_string(), format_number(&c.objective)));
        }
        pairs.extend(
            by_column[j].iter().filter(|(_, a)| !a.is_zero()).map(|(i, a)| (format!("R{i}"), format_number(a))),
        );
        if pairs.is_empty() {
            // keep the column visible to readers
            pairs.push(("COST".to_string(), "0".to_string()));
        }
        for chunk in pairs.chunks(2) {
            entry(&mut out, &cname, chunk);
        }
    }
    if integer {
        out.push_str("    MARKER                 'MARKER'                 'INTEND'\n");
    }

    out.push_str("RHS\n");
    let rhs: Vec<(String, String)> = model
        .rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| {
            let v = r.lower.or(r.upper)?;
            (!v.is_zero()).then(|| (format!("R{i}"), format_number(&v)))
        })
        .collect();
    for chunk in rhs.chunks(2) {
        entry(&mut out, "RHS", chunk);
    }

    let ranges: Vec<(String, String)> = model
        .rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| match (r.lower, r.upper) {
            (Some(l), Some(u)) if l != u => Some((format!("R{i}"), format_number(&(u - l)))),
            _ => None,
        })
        .collect();
    if !ranges.is_empty() {
        out.push_str("RANGES\n");
        for chunk in ranges.chunks(2) {
            entry(&mut out, "RNG", chunk);
        }
    }

    let bounds: Vec<(usize, Rational64)> =
        model.columns.iter().enumerate().filter_map(|(j, c)| c.upper.map(|u| (j, u))).collect();
    if !bounds.is_empty() || integer {
        out.push_str("BOUNDS\n");
        for (j, c) in model.columns.iter().enumerate() {
            match c.upper {
                Some(u) => {
                    let _ = writeln!(out, " UP BND       {:<8}  {:>12}", column_name(model, j), format_number(&u));
                }
                // integer columns default to [0, 1] in some readers
                None if integer => {
                    let _ = writeln!(out, " PL BND       {}", column_name(model, j));
                }
                None => {}
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Row;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn numbers_fit_the_field() {
        assert_eq!(format_number(&q(3, 1)), "3");
        assert_eq!(format_number(&q(-1, 2)), "-0.5");
        assert_eq!(format_number(&q(1, 3)), "0.3333333333");
        assert!(format_number(&q(-2, 3)).len() <= 12);
    }

    #[test]
    fn small_model_layout() {
        let mut m = LinearModel::new();
        let y = m.add_column("Y0", q(1, 1), None);
        let w = m.add_column("W0", q(0, 1), Some(q(2, 1)));
        m.add_row(Row::at_least("lm", vec![(y, q(1, 1))], q(1, 1)));
        m.add_row(Row::at_most("eq2", vec![(w, q(1, 1)), (y, q(-1, 1))], q(0, 1)));
        m.add_row(Row {
            name: "rng".into(),
            coefficients: vec![(w, q(1, 1))],
            lower: Some(q(1, 1)),
            upper: Some(q(3, 1)),
        });
        let text = write_mps(&m, "T", false);
        let expected = "\
NAME          T
ROWS
 N  COST
 G  R0
 L  R1
 G  R2
COLUMNS
    Y0        COST                 1   R0                   1
    Y0        R1                  -1
    W0        R1                   1   R2                   1
RHS
    RHS       R0                   1   R2                   1
RANGES
    RNG       R2                   2
BOUNDS
 UP BND       W0                   2
ENDATA
";
        assert_eq!(text, expected);
    }

    #[test]
    fn output_is_stable() {
        let mut m = LinearModel::new();
        let y = m.add_column("a very long column name", q(1, 1), None);
        m.add_row(Row::at_least("r", vec![(y, q(1, 2))], q(1, 1)));
        let a = write_mps(&m, "T", true);
        assert_eq!(a, write_mps(&m.clone(), "T", true));
        assert!(a.contains("    X0        COST"));
        assert!(a.contains("'INTORG'"));
    }
}
