//! Table output in the layout of the published result tables.

use crate::record::{lookup, row_speedups, rows, BenchRecord, BenchVariant, CellOutcome, Suite};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
}

/// `x` with six significant digits in positional notation.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.00000".into();
    }
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = mantissa.strip_prefix('-').map_or(("", mantissa), |m| ("-", m));
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{digits}", "0".repeat((-point) as usize))
    } else if point as usize >= digits.len() {
        format!("{digits}{}", "0".repeat(point as usize - digits.len()))
    } else {
        let (int, frac) = digits.split_at(point as usize);
        format!("{int}.{frac}")
    };
    format!("{sign}{body}")
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn build(suite: Suite, records: &[BenchRecord]) -> Table {
    let variants: Vec<BenchVariant> =
        BenchVariant::ALL.into_iter().filter(|v| records.iter().any(|r| r.variant == *v)).collect();
    let has = |v| variants.contains(&v);
    let show_vec = (has(BenchVariant::SeqScalar) && has(BenchVariant::SeqVector))
        || (has(BenchVariant::ParScalar) && has(BenchVariant::ParVector));
    let show_opt = has(BenchVariant::Optim) && (has(BenchVariant::SeqVector) || has(BenchVariant::ParVector));

    let mut header = Vec::new();
    if suite.has_resolution() {
        header.push("Resolution".to_string());
    }
    header.push(suite.param_header().to_string());
    header.extend(variants.iter().map(|v| v.tag().to_string()));
    if show_vec {
        header.push("Vectorization speedup".into());
    }
    if show_opt {
        header.push("Optimization speedup".into());
    }

    let na = || "n/a".to_string();
    let table_rows = rows(records)
        .into_iter()
        .map(|w| {
            let mut row = Vec::new();
            if suite.has_resolution() {
                row.push(w.resolution_label());
            }
            row.push(w.param.clone());
            for &v in &variants {
                let cell = records.iter().find(|r| r.workload == w && r.variant == v);
                row.push(match cell.map(|r| &r.outcome) {
                    Some(CellOutcome::Timed(t)) => sig6(t.min_time),
                    Some(CellOutcome::Checked) => "ok".into(),
                    Some(CellOutcome::Failed(_)) => "FAIL".into(),
                    None => na(),
                });
            }
            let s = row_speedups(|v| lookup(records, &w, v));
            if show_vec {
                row.push(s.vectorization.map_or_else(na, sig6));
            }
            if show_opt {
                row.push(s.optimization.map_or_else(na, sig6));
            }
            row
        })
        .collect();
    Table { header, rows: table_rows }
}

/// Renders `records` as a table. Identical input gives identical bytes;
/// an empty record list gives the header alone.
pub fn emit(suite: Suite, records: &[BenchRecord], format: Format) -> Vec<u8> {
    let table = build(suite, records);
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.header).expect("in-memory write");
            for row in &table.rows {
                w.write_record(row).expect("in-memory write");
            }
            w.into_inner().expect("in-memory flush")
        }
        Format::Markdown => {
            let line = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
            let mut out = line(&table.header);
            out.push_str(&line(&vec!["---".to_string(); table.header.len()]));
            for row in &table.rows {
                out.push_str(&line(row));
            }
            out.into_bytes()
        }
    }
}
