use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use super::{Cell, SweepTable};
use crate::error::{Error, Result};

/// Written in both fields of a cell that could not be computed.
pub const ERROR_MARKER: &str = "ERR";

const SIGNIFICANT: usize = 9;

/// `%.9g`: 9 significant digits, trailing zeros dropped, exponent form
/// outside `[1e-5, 1e9)`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT as i32).contains(&exp) {
        let decimals = (SIGNIFICANT as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            trim_zeros(mantissa.to_string()),
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Header then one line per row: the variable value followed by
/// `<column>_capacity,<column>_err` pairs.
pub fn emit_csv(table: &SweepTable, out: &mut impl Write) -> io::Result<()> {
    if table.rows.is_empty() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "no rows to write",
        ));
    }
    let mut header = vec![table.variable.name().to_string()];
    for c in &table.columns {
        header.push(format!("{c}_capacity"));
        header.push(format!("{c}_err"));
    }
    writeln!(out, "{}", header.join(","))?;
    for row in &table.rows {
        let mut fields = vec![format_number(row.value)];
        for cell in &row.cells {
            match cell {
                Cell::Value {
                    capacity,
                    uncertainty,
                } => {
                    fields.push(format_number(*capacity));
                    fields.push(format_number(*uncertainty));
                }
                Cell::Failed(_) => {
                    fields.push(ERROR_MARKER.into());
                    fields.push(ERROR_MARKER.into());
                }
            }
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    out.flush()
}

/// [`emit_csv`] into a file; errors name the path.
pub fn write_csv(table: &SweepTable, path: &Path) -> Result<()> {
    let io_err = |e: io::Error| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    emit_csv(table, &mut w).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{SweepRow, SweepVariable, Units};

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(2.0f64.ln()), "0.693147181");
        assert_eq!(format_number(-1.5), "-1.5");
        assert_eq!(format_number(123456789.4), "123456789");
        assert_eq!(format_number(1234567890.0), "1.23456789e+09");
        assert_eq!(format_number(0.0001234), "0.0001234");
        assert_eq!(format_number(1.5e-7), "1.5e-07");
        assert_eq!(format_number(20.0), "20");
    }

    fn table(rows: Vec<SweepRow>) -> SweepTable {
        SweepTable {
            variable: SweepVariable::Kappa,
            units: Units::Nats,
            columns: vec!["upper_bound".into(), "quad_m1".into()],
            rows,
        }
    }

    #[test]
    fn layout_and_markers() {
        let t = table(vec![SweepRow {
            value: 0.5,
            cells: vec![
                Cell::Value {
                    capacity: 1.25,
                    uncertainty: 0.0,
                },
                Cell::Failed("boom".into()),
            ],
        }]);
        let mut buf = Vec::new();
        emit_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "kappa,upper_bound_capacity,upper_bound_err,quad_m1_capacity,quad_m1_err\n0.5,1.25,0,ERR,ERR\n"
        );
        assert_eq!(text.lines().count(), 2);
        assert_eq!(t.failures().len(), 1);
    }

    #[test]
    fn empty_rejected_and_io_errors_name_path() {
        assert!(emit_csv(&table(vec![]), &mut Vec::new()).is_err());
        let t = table(vec![SweepRow {
            value: 1.0,
            cells: vec![Cell::Failed("x".into()), Cell::Failed("y".into())],
        }]);
        let err = write_csv(&t, Path::new("/nonexistent-dir/out.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/out.csv"));
    }
}
