//! CSV emission for experiment results.
//!
//! Every run and sweep produces rows in one fixed schema:
//! `run_id, replication, t, metric_name, value, flags`. Values are written
//! with 17 significant digits so that `f64` round-trips exactly. Row order is
//! deterministic by construction — rows are emitted in the order experiments
//! produce them, never re-sorted.

use crate::error::TvError;
use crate::Result;
use std::fmt;
use std::io::Write;
use std::path::Path;

/// Metric names that may appear in the `metric_name` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Distance of the iterate to the current minimizer, `||x_t - x_t^*||`.
    IterateError,
    /// Function-value gap, `f_t(x_t) - f_t(x_t^*)`.
    FunctionError,
    /// Gradient norm, `||grad f_t(x_t)||`.
    GradientError,
    /// Estimated limiting (trailing-window supremum) value of an error series.
    LimsupEstimate,
    /// Standard error of a limsup estimate across replications.
    LimsupStderr,
    /// A theoretical bound evaluated for the configured problem/solver.
    BoundValue,
    /// Spectral radius of the rotating-problem iteration map.
    Rho,
    /// Fitted proportionality constant from a sweep (slope against sqrt(kappa)).
    FitConstant,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::IterateError => "iterate_error",
            Metric::FunctionError => "function_error",
            Metric::GradientError => "gradient_error",
            Metric::LimsupEstimate => "limsup_estimate",
            Metric::LimsupStderr => "limsup_stderr",
            Metric::BoundValue => "bound_value",
            Metric::Rho => "rho",
            Metric::FitConstant => "fit_constant",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "iterate_error" => Metric::IterateError,
            "function_error" => Metric::FunctionError,
            "gradient_error" => Metric::GradientError,
            "limsup_estimate" => Metric::LimsupEstimate,
            "limsup_stderr" => Metric::LimsupStderr,
            "bound_value" => Metric::BoundValue,
            "rho" => Metric::Rho,
            "fit_constant" => Metric::FitConstant,
            other => {
                return Err(TvError::invalid(format!("unknown metric name `{other}`")))
            }
        })
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One output row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub run_id: String,
    pub replication: usize,
    pub t: usize,
    pub metric: Metric,
    pub value: f64,
    /// Semicolon-separated annotations (`converged`, `diverged@123`,
    /// `bound=ogd_upper`, `kappa=100`, ...). Empty when there is nothing to say.
    pub flags: String,
}

impl CsvRow {
    pub fn new(
        run_id: impl Into<String>,
        replication: usize,
        t: usize,
        metric: Metric,
        value: f64,
        flags: impl Into<String>,
    ) -> Self {
        CsvRow {
            run_id: run_id.into(),
            replication,
            t,
            metric,
            value,
            flags: flags.into(),
        }
    }
}

pub const CSV_HEADER: &str = "run_id,replication,t,metric_name,value,flags";

/// Format a value with 17 significant digits (lossless for `f64`).
fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write rows to any writer, header first.
pub fn write_csv_to(mut w: impl Write, rows: &[CsvRow]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            row.run_id,
            row.replication,
            row.t,
            row.metric.name(),
            format_value(row.value),
            row.flags
        )?;
    }
    Ok(())
}

/// Write rows to a file, creating parent directories as needed.
pub fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let file = std::fs::File::create(path)?;
    let mut buf = std::io::BufWriter::new(file);
    write_csv_to(&mut buf, rows)?;
    buf.flush()?;
    Ok(())
}

/// Read rows back (used by round-trip tests and downstream tooling).
pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(TvError::invalid(format!(
                "bad CSV header: expected `{CSV_HEADER}`, got `{}`",
                other.unwrap_or("<empty file>")
            )))
        }
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.splitn(6, ',').collect();
        if parts.len() != 6 {
            return Err(TvError::invalid(format!(
                "line {}: expected 6 comma-separated fields",
                lineno + 2
            )));
        }
        rows.push(CsvRow {
            run_id: parts[0].to_string(),
            replication: parts[1]
                .parse()
                .map_err(|_| TvError::invalid(format!("line {}: bad replication", lineno + 2)))?,
            t: parts[2]
                .parse()
                .map_err(|_| TvError::invalid(format!("line {}: bad t", lineno + 2)))?,
            metric: Metric::parse(parts[3])?,
            value: parts[4]
                .parse()
                .map_err(|_| TvError::invalid(format!("line {}: bad value", lineno + 2)))?,
            flags: parts[5].to_string(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_round_trip_exactly() {
        let values = [
            1.0 / 3.0,
            std::f64::consts::PI,
            1e-300,
            -7.25e17,
            f64::MIN_POSITIVE,
            0.1 + 0.2,
        ];
        for &v in &values {
            let s = format_value(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v} -> {s} -> {back}");
        }
    }

    #[test]
    fn file_round_trip_preserves_rows() {
        let rows = vec![
            CsvRow::new("demo-00000001", 0, 0, Metric::IterateError, 0.5, ""),
            CsvRow::new(
                "demo-00000001",
                0,
                1000,
                Metric::LimsupEstimate,
                1.0 / 3.0,
                "series=iterate;converged",
            ),
            CsvRow::new("demo-00000001", 3, 0, Metric::BoundValue, 42.0, "bound=ogd_upper"),
        ];
        let dir = std::env::temp_dir().join("tvopt-csv-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("roundtrip.csv");
        write_csv(&path, &rows).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back, rows);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn header_and_ordering_are_fixed() {
        let rows = vec![
            CsvRow::new("b", 0, 1, Metric::Rho, 2.0, "unstable"),
            CsvRow::new("a", 0, 0, Metric::Rho, 0.5, "stable"),
        ];
        let mut out = Vec::new();
        write_csv_to(&mut out, &rows).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        // Emission order is preserved, never re-sorted.
        assert!(lines[1].starts_with("b,0,1,rho,"));
        assert!(lines[2].starts_with("a,0,0,rho,"));
    }

    #[test]
    fn rejects_corrupt_input() {
        let dir = std::env::temp_dir().join("tvopt-csv-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("corrupt.csv");
        std::fs::write(&path, "wrong,header\n").unwrap();
        assert!(read_csv(&path).is_err());
        std::fs::write(
            &path,
            format!("{CSV_HEADER}\nrun,0,0,not_a_metric,1.0,\n"),
        )
        .unwrap();
        assert!(read_csv(&path).is_err());
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn metric_names_parse_back() {
        for m in [
            Metric::IterateError,
            Metric::FunctionError,
            Metric::GradientError,
            Metric::LimsupEstimate,
            Metric::LimsupStderr,
            Metric::BoundValue,
            Metric::Rho,
            Metric::FitConstant,
        ] {
            assert_eq!(Metric::parse(m.name()).unwrap(), m);
        }
        assert!(Metric::parse("bogus").is_err());
    }
}
