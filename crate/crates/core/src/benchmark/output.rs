//! CSV / markdown rendering of convergence tables and control trajectories.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::time::PiecewiseLinear;

use super::study::{EocRow, EocTable, ERROR_COLUMNS};

pub fn csv_header() -> Vec<String> {
    let mut h: Vec<String> = ["level", "alpha", "h", "M"].iter().map(|s| s.to_string()).collect();
    h.extend(ERROR_COLUMNS.iter().map(|s| s.to_string()));
    h.extend(ERROR_COLUMNS.iter().map(|s| s.replacen("err_", "eoc_", 1)));
    h.push("iterations".into());
    h
}

fn fmt_eoc(e: Option<f64>) -> String {
    e.map_or_else(|| "/".to_string(), |v| v.to_string())
}

/// CSV text; floats use the shortest representation that round-trips.
pub fn table_to_csv(table: &EocTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let map = |e: csv::Error| Error::Format { path: "<csv>".into(), message: e.to_string() };
    w.write_record(csv_header()).map_err(map)?;
    for r in &table.rows {
        let mut rec = vec![r.level.to_string(), r.alpha.to_string(), r.h.to_string(), r.steps.to_string()];
        rec.extend(r.errors.iter().map(|e| e.to_string()));
        rec.extend(r.eoc.iter().map(|&e| fmt_eoc(e)));
        rec.push(r.iterations.to_string());
        w.write_record(&rec).map_err(map)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format { path: "<csv>".into(), message: e.to_string() })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn table_from_csv(text: &str, origin: &str) -> Result<EocTable> {
    let bad = |message: String| Error::Format { path: origin.to_string(), message };
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| bad(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != csv_header() {
        return Err(bad("unexpected header".into()));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let f = |i: usize| -> Result<f64> {
            rec[i].parse::<f64>().map_err(|e| bad(format!("column {}: {e}", header[i])))
        };
        let u = |i: usize| -> Result<usize> {
            rec[i].parse::<usize>().map_err(|e| bad(format!("column {}: {e}", header[i])))
        };
        let mut errors = [0.0; 12];
        let mut eoc = [None; 12];
        for i in 0..12 {
            errors[i] = f(4 + i)?;
            eoc[i] = if &rec[16 + i] == "/" { None } else { Some(f(16 + i)?) };
        }
        rows.push(EocRow {
            level: u(0)? as u32,
            alpha: f(1)?,
            h: f(2)?,
            steps: u(3)?,
            errors,
            eoc,
            iterations: u(28)?,
        });
    }
    Ok(EocTable { rows })
}

/// Markdown rendering: one table per quantity, in the layout
/// `ℓ | L¹ | L² | L∞ | EOC L¹ | EOC L² | EOC L∞`.
pub fn table_to_markdown(table: &EocTable) -> String {
    let groups = [
        ("Control u", 0),
        ("State y", 3),
        ("Projected state πy", 6),
        ("Adjoint p", 9),
    ];
    let mut s = String::new();
    for (title, off) in groups {
        let _ = writeln!(s, "### {title}\n");
        let _ = writeln!(s, "| ℓ | α | M | L1 | L2 | Linf | EOC L1 | EOC L2 | EOC Linf | iter |");
        let _ = writeln!(s, "|---|---|---|---|---|---|---|---|---|---|");
        for r in &table.rows {
            let e = |i: usize| format!("{:.8}", r.errors[off + i]);
            let o = |i: usize| r.eoc[off + i].map_or("/".to_string(), |v| format!("{v:.2}"));
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                r.level,
                r.alpha,
                r.steps,
                e(0),
                e(1),
                e(2),
                o(0),
                o(1),
                o(2),
                r.iterations
            );
        }
        s.push('\n');
    }
    s
}

/// `t, u_kh(t), ū(t)` at every breakpoint of either function plus `samples`
/// uniform points.
pub fn trajectory_csv(control: &PiecewiseLinear, exact: &PiecewiseLinear, samples: usize) -> String {
    let (t0, t1) = (control.start(), control.end());
    let mut ts: Vec<f64> = (0..=samples).map(|i| t0 + (t1 - t0) * i as f64 / samples as f64).collect();
    ts.extend(control.breakpoints());
    ts.extend(exact.breakpoints());
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut s = String::from("t,u_kh,u_bar\n");
    for t in ts {
        let _ = writeln!(s, "{},{},{}", t, control.eval(t), exact.eval(t));
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn read_table(path: &Path) -> Result<EocTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    table_from_csv(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(level: u32, e: f64, eoc: Option<f64>) -> EocRow {
        EocRow {
            level,
            alpha: 2f64.powi(-2 * level as i32),
            h: 2f64.sqrt() / 2f64.powi(level as i32),
            steps: 6,
            errors: [e; 12],
            eoc: [eoc; 12],
            iterations: 4,
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let csv = table_to_csv(&EocTable::default()).unwrap();
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("level,alpha,h,M,err_u_L1,"));
        assert!(csv.trim_end().ends_with("eoc_p_Linf,iterations"));
    }

    #[test]
    fn first_row_eoc_is_slash_and_round_trips() {
        let t = EocTable { rows: vec![row(1, 0.1, None), row(2, 0.025, Some(2.0))] };
        let csv = table_to_csv(&t).unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(1).unwrap().contains(",/,"));
        assert_eq!(table_from_csv(&csv, "mem").unwrap(), t);
    }

    #[test]
    fn header_mismatch_is_reported() {
        assert!(matches!(table_from_csv("a,b\n1,2\n", "x"), Err(Error::Format { .. })));
    }
}
