//! Text summaries of a results CSV.

use std::fmt::Write as _;
use std::io::Read;

use super::bench::{BenchRow, CSV_COLUMNS};
use super::CliError;

/// Expected time-to-tolerance ranking, fastest first.
pub const EXPECTED_ORDER: [&str; 4] = ["pn", "yamsr", "lsgd", "gd"];

fn schema(column: &str, msg: impl Into<String>) -> CliError {
    CliError::Schema {
        column: column.to_string(),
        msg: msg.into(),
    }
}

/// Parses a results CSV, insisting on the exact column set and order.
pub fn read_rows<R: Read>(r: R) -> Result<Vec<BenchRow>, CliError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let headers = reader.headers().map_err(|e| schema("<header>", e.to_string()))?.clone();
    for (i, want) in CSV_COLUMNS.iter().enumerate() {
        match headers.get(i) {
            Some(got) if got == *want => {}
            Some(got) => return Err(schema(got, format!("expected column `{want}` at position {}", i + 1))),
            None => return Err(schema(want, "missing column")),
        }
    }
    if let Some(extra) = headers.get(CSV_COLUMNS.len()) {
        return Err(schema(extra, "unexpected extra column"));
    }

    let mut rows = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| schema("<row>", e.to_string()))?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        fn parse<T: std::str::FromStr>(v: &str, col: &str, line: usize) -> Result<T, CliError> {
            v.parse()
                .map_err(|_| schema(col, format!("row {}: cannot parse `{v}`", line + 2)))
        }
        rows.push(BenchRow {
            suite: field(0).to_string(),
            matrix: field(1).to_string(),
            n: parse(field(2), "n", line)?,
            kappa: field(3).to_string(),
            method: field(4).to_string(),
            converged: parse(field(5), "converged", line)?,
            iterations: parse(field(6), "iterations", line)?,
            final_residual: parse(field(7), "final_residual", line)?,
            seconds: parse(field(8), "seconds", line)?,
        });
    }
    Ok(rows)
}

/// Rows grouped by matrix, in first-appearance order.
fn by_matrix(rows: &[BenchRow]) -> Vec<(&str, Vec<&BenchRow>)> {
    let mut groups: Vec<(&str, Vec<&BenchRow>)> = Vec::new();
    for r in rows {
        match groups.iter_mut().find(|(m, _)| *m == r.matrix) {
            Some((_, g)) => g.push(r),
            None => groups.push((&r.matrix, vec![r])),
        }
    }
    groups
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderingViolation {
    pub matrix: String,
    pub faster_expected: String,
    pub slower_expected: String,
    pub seconds_expected_faster: f64,
    pub seconds_expected_slower: f64,
}

/// Pairs of converged runs on the same matrix where a method expected to be
/// faster took more than `allowance` times as long as one expected to be
/// slower.
pub fn ordering_violations(rows: &[BenchRow], allowance: f64) -> Vec<OrderingViolation> {
    let mut out = Vec::new();
    for (matrix, group) in by_matrix(rows) {
        let time = |m: &str| group.iter().find(|r| r.method == m && r.converged).map(|r| r.seconds);
        for (i, fast) in EXPECTED_ORDER.iter().enumerate() {
            for slow in &EXPECTED_ORDER[i + 1..] {
                if let (Some(tf), Some(ts)) = (time(fast), time(slow)) {
                    if tf > allowance * ts {
                        out.push(OrderingViolation {
                            matrix: matrix.to_string(),
                            faster_expected: fast.to_string(),
                            slower_expected: slow.to_string(),
                            seconds_expected_faster: tf,
                            seconds_expected_slower: ts,
                        });
                    }
                }
            }
        }
    }
    out
}

/// One line per matrix: methods ranked by time-to-tolerance (converged runs
/// only, failures listed last) and by final residual, then any ordering
/// violations.
pub fn render(rows: &[BenchRow]) -> String {
    let violations = ordering_violations(rows, 1.0);
    let mut s = String::new();
    for (matrix, group) in by_matrix(rows) {
        let mut timed: Vec<&&BenchRow> = group.iter().filter(|r| r.converged).collect();
        timed.sort_by(|a, b| a.seconds.total_cmp(&b.seconds));
        let mut time_rank: Vec<String> = timed.iter().map(|r| format!("{} {:.3e}s", r.method, r.seconds)).collect();
        time_rank.extend(group.iter().filter(|r| !r.converged).map(|r| format!("{} (no conv.)", r.method)));

        let mut acc = group.clone();
        acc.sort_by(|a, b| a.final_residual.total_cmp(&b.final_residual));
        let acc_rank: Vec<String> = acc.iter().map(|r| format!("{} {:.1e}", r.method, r.final_residual)).collect();

        let mine: Vec<String> = violations
            .iter()
            .filter(|v| v.matrix == matrix)
            .map(|v| format!("{}>{}", v.faster_expected, v.slower_expected))
            .collect();
        let ordering = if mine.is_empty() {
            "ok".to_string()
        } else {
            format!("VIOLATION {}", mine.join(" "))
        };
        let _ = writeln!(
            s,
            "{matrix} [n={} kappa={}] time: {} | residual: {} | ordering: {ordering}",
            group[0].n,
            group[0].kappa,
            time_rank.join(" < "),
            acc_rank.join(" < "),
        );
    }
    if !violations.is_empty() {
        s.push_str(
            "note: timings near the 1e-15 residual level are dominated by rounding; \
             expected order is pn <= yamsr <= lsgd <= gd\n",
        );
    }
    s
}
