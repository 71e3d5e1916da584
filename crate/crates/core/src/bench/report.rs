use std::fmt::Write as _;
use std::str::FromStr;

use crate::kernels::ExecutionStrategy;
use crate::mesh::Dim;

use super::reference::{ReferenceTable, LABELS};
use super::BenchRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!(
                "unknown report format {other:?} (expected md or csv)"
            )),
        }
    }
}

fn size_label(n: usize) -> String {
    if n.is_multiple_of(1000) {
        format!("{}K", n / 1000)
    } else {
        n.to_string()
    }
}

fn column_label(dim: Dim, n: usize) -> String {
    format!("{dim} {}", size_label(n))
}

/// Tabular output in either format.
struct Table {
    title: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn render(&self, format: ReportFormat, out: &mut String) {
        match format {
            ReportFormat::Markdown => {
                let _ = writeln!(out, "## {}\n", self.title);
                let _ = writeln!(out, "| {} |", self.header.join(" | "));
                let _ = writeln!(out, "|{}", "---|".repeat(self.header.len()));
                for r in &self.rows {
                    let _ = writeln!(out, "| {} |", r.join(" | "));
                }
            }
            ReportFormat::Csv => {
                let _ = writeln!(out, "# {}", self.title);
                let _ = writeln!(out, "{}", self.header.join(","));
                for r in &self.rows {
                    let _ = writeln!(out, "{}", r.join(","));
                }
            }
        }
    }
}

/// Speedup of every data-parallel record over the single-pass record of the
/// same configuration.
struct Comparison {
    dim: Dim,
    npoints: usize,
    single_pass_ms: f64,
    candidates: Vec<(String, f64)>,
}

impl Comparison {
    fn reproduced(&self) -> bool {
        self.candidates
            .iter()
            .all(|&(_, ms)| ms < self.single_pass_ms)
    }
}

fn comparisons(records: &[BenchRecord], configs: &[(Dim, usize)]) -> Vec<Comparison> {
    configs
        .iter()
        .filter_map(|&(dim, npoints)| {
            let here = records
                .iter()
                .filter(|r| r.dim == dim && r.npoints == npoints);
            let single = here
                .clone()
                .find(|r| r.strategy == ExecutionStrategy::SinglePass)?;
            let candidates: Vec<(String, f64)> = here
                .filter(|r| matches!(r.strategy, ExecutionStrategy::DataParallel { .. }))
                .map(|r| (r.label.clone(), r.median_ms))
                .collect();
            (!candidates.is_empty()).then_some(Comparison {
                dim,
                npoints,
                single_pass_ms: single.median_ms,
                candidates,
            })
        })
        .collect()
}

/// Renders measured medians as a label × (dim, size) grid.
///
/// With a reference table, the published grid is appended. Whenever a
/// configuration has both a single-pass and at least one data-parallel
/// record, a comparison section reports per-configuration speedups (with
/// the published ND-range over single-task ratios alongside, when a
/// reference is given) and how many configurations show data-parallel
/// strictly faster.
pub fn render_report(
    records: &[BenchRecord],
    reference: Option<&ReferenceTable>,
    format: ReportFormat,
) -> String {
    let mut configs: Vec<(Dim, usize)> = records.iter().map(|r| (r.dim, r.npoints)).collect();
    configs.sort();
    configs.dedup();
    let mut labels: Vec<&str> = Vec::new();
    for r in records {
        if !labels.contains(&r.label.as_str()) {
            labels.push(&r.label);
        }
    }

    let mut out = String::new();
    let measured_wanted = !records.is_empty() || reference.is_none();
    if measured_wanted {
        let mut header = vec!["Implementation".to_string()];
        header.extend(configs.iter().map(|&(d, n)| column_label(d, n)));
        let rows = labels
            .iter()
            .map(|&label| {
                let mut row = vec![label.to_string()];
                row.extend(configs.iter().map(|&(d, n)| {
                    records
                        .iter()
                        .find(|r| r.label == label && r.dim == d && r.npoints == n)
                        .map_or_else(|| "-".to_string(), |r| format!("{:.3}", r.median_ms))
                }));
                row
            })
            .collect();
        Table {
            title: "Measured median times (ms)".into(),
            header,
            rows,
        }
        .render(format, &mut out);
    }

    if let Some(table) = reference {
        if !out.is_empty() {
            out.push('\n');
        }
        let mut header = vec!["Implementation".to_string()];
        header.extend(table.configs().iter().map(|&(d, n)| column_label(d, n)));
        let rows = LABELS
            .iter()
            .map(|&label| {
                let mut row = vec![label.to_string()];
                row.extend(table.configs().iter().map(|&(d, n)| {
                    format!("{:.1}", table.lookup(label, d, n).expect("bundled entry"))
                }));
                row
            })
            .collect();
        Table {
            title: "Reference: naïve implementations, published (ms)".into(),
            header,
            rows,
        }
        .render(format, &mut out);
    }

    let cmp = comparisons(records, &configs);
    if !cmp.is_empty() {
        out.push('\n');
        let mut header: Vec<String> = [
            "Configuration",
            "Candidate",
            "single-pass ms",
            "candidate ms",
            "speedup",
        ]
        .map(String::from)
        .to_vec();
        if reference.is_some() {
            header.push("published O-ST/O-NR".into());
            header.push("published S-ST/S-NR".into());
        }
        let mut rows = Vec::new();
        for c in &cmp {
            for (label, ms) in &c.candidates {
                let mut row = vec![
                    column_label(c.dim, c.npoints),
                    label.clone(),
                    format!("{:.3}", c.single_pass_ms),
                    format!("{ms:.3}"),
                    format!("{:.3}", c.single_pass_ms / ms),
                ];
                if let Some(t) = reference {
                    for (st, nr) in [("O-ST naïve", "O-NR naïve"), ("S-ST naïve", "S-NR naïve")]
                    {
                        row.push(
                            match (
                                t.lookup(st, c.dim, c.npoints),
                                t.lookup(nr, c.dim, c.npoints),
                            ) {
                                (Some(a), Some(b)) => format!("{:.1}", a / b),
                                _ => "-".into(),
                            },
                        );
                    }
                }
                rows.push(row);
            }
        }
        Table {
            title: "Data-parallel speedup over single-pass".into(),
            header,
            rows,
        }
        .render(format, &mut out);
        let hits = cmp.iter().filter(|c| c.reproduced()).count();
        let verdict = if hits == cmp.len() { "yes" } else { "no" };
        match format {
            ReportFormat::Markdown => {
                let _ = writeln!(
                    out,
                    "\nOrdering (data-parallel faster than single-pass) reproduced in {hits}/{} configurations: {verdict}",
                    cmp.len()
                );
            }
            ReportFormat::Csv => {
                let _ = writeln!(
                    out,
                    "# ordering reproduced in {hits}/{} configurations: {verdict}",
                    cmp.len()
                );
            }
        }
    }
    out
}
