//! Plain-text formatting of matrices and reports.

use std::fmt::Write;

use krein_core::densela::CMatrix;

/// Entries below this magnitude print as zero.
const SHOW_ZERO: f64 = 1e-14;

fn entry(re: f64, im: f64) -> String {
    let re = if re.abs() < SHOW_ZERO { 0.0 } else { re };
    let im = if im.abs() < SHOW_ZERO { 0.0 } else { im };
    if im == 0.0 {
        format!("{re:.6}")
    } else {
        let sign = if im < 0.0 { '-' } else { '+' };
        format!("{re:.6}{sign}{:.6}i", im.abs())
    }
}

/// Aligned matrix, one row per line, indented by `indent` spaces.
pub fn matrix(m: &CMatrix, indent: usize) -> String {
    let pad = " ".repeat(indent);
    if m.is_empty() {
        return format!("{pad}({}x{} empty)\n", m.rows(), m.cols());
    }
    let cells: Vec<Vec<String>> =
        (0..m.rows()).map(|i| m.row(i).iter().map(|z| entry(z.re, z.im)).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(0);
    let mut out = String::new();
    for row in cells {
        out.push_str(&pad);
        out.push('[');
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(&line.join("  "));
        out.push_str("]\n");
    }
    out
}

pub fn section(out: &mut String, title: &str, m: &CMatrix) {
    let _ = writeln!(out, "{title} ({}x{}):", m.rows(), m.cols());
    out.push_str(&matrix(m, 2));
}

pub fn flag(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}
