use std::io::{self, Write};

use pecurv_core::{CheckReport, Criterion};
use serde::Serialize;

use crate::config::Format;

/// Flat CSV row; `detail` is always present so every row has the same fields.
#[derive(Serialize)]
struct CsvRow<'a> {
    suite: &'a str,
    id: &'a str,
    anchor: &'a str,
    lhs: f64,
    rhs: f64,
    abs_err: f64,
    rel_err: f64,
    tol: f64,
    pass: bool,
    criterion: Criterion,
    wall_time_ms: f64,
    detail: &'a str,
}

#[derive(Serialize)]
struct JsonLine<'a> {
    suite: &'a str,
    #[serde(flatten)]
    report: &'a CheckReport,
}

/// Reports tagged with the suite that produced them.
pub type Tagged = (&'static str, CheckReport);

pub fn write_reports(w: &mut dyn Write, format: Format, reports: &[Tagged]) -> io::Result<()> {
    match format {
        Format::Json => {
            for (suite, report) in reports {
                serde_json::to_writer(&mut *w, &JsonLine { suite, report })?;
                writeln!(w)?;
            }
        }
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut *w);
            for (suite, r) in reports {
                csv.serialize(CsvRow {
                    suite,
                    id: &r.id,
                    anchor: &r.anchor,
                    lhs: r.lhs,
                    rhs: r.rhs,
                    abs_err: r.abs_err,
                    rel_err: r.rel_err,
                    tol: r.tol,
                    pass: r.pass,
                    criterion: r.criterion,
                    wall_time_ms: r.wall_time_ms,
                    detail: r.detail.as_deref().unwrap_or(""),
                })
                .map_err(io::Error::other)?;
            }
            csv.flush()?;
        }
        Format::Table => write_table(w, reports)?,
    }
    Ok(())
}

/// Aligned per-check table followed by per-suite pass counts.
pub fn write_table(w: &mut dyn Write, reports: &[Tagged]) -> io::Result<()> {
    writeln!(w, "{:<20} {:<28} {:<24} {:>4} {:>10} {:>10} {:>9}", "suite", "check", "detail", "ok", "abs_err", "rel_err", "tol")?;
    for (suite, r) in reports {
        let detail: String = r.detail.as_deref().unwrap_or("").chars().take(24).collect();
        writeln!(
            w,
            "{:<20} {:<28} {:<24} {:>4} {:>10.3e} {:>10.3e} {:>9.1e}",
            suite,
            r.id,
            detail,
            if r.pass { "PASS" } else { "FAIL" },
            r.abs_err,
            r.rel_err,
            r.tol
        )?;
    }
    let mut suites: Vec<&str> = reports.iter().map(|(s, _)| *s).collect();
    suites.dedup();
    for s in suites {
        let of: Vec<_> = reports.iter().filter(|(t, _)| *t == s).collect();
        let ok = of.iter().filter(|(_, r)| r.pass).count();
        writeln!(w, "{s}: {ok}/{} pass", of.len())?;
    }
    let ok = reports.iter().filter(|(_, r)| r.pass).count();
    writeln!(w, "total: {ok}/{} pass", reports.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<Tagged> {
        vec![
            ("cgb", CheckReport::compare("cgb", "a", 1.0, 1.0, 1e-9).with_detail("s4")),
            ("gbc", CheckReport::compare("gbc", "b", 1.0, 2.0, 1e-9)),
        ]
    }

    #[test]
    fn json_lines_round_trip() {
        let mut buf = Vec::new();
        write_reports(&mut buf, Format::Json, &sample()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0]["suite"], "cgb");
        assert_eq!(lines[1]["pass"], false);
        assert_eq!(lines[0]["criterion"], "abs");
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut buf = Vec::new();
        write_reports(&mut buf, Format::Csv, &sample()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("suite,id,anchor,lhs"));
    }

    #[test]
    fn table_counts() {
        let mut buf = Vec::new();
        write_table(&mut buf, &sample()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("cgb: 1/1 pass"));
        assert!(text.contains("total: 1/2 pass"));
    }
}
