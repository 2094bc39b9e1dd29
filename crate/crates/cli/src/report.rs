use std::fmt::Write as _;

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Aligned `key  value` lines.
    Text,
    /// Flat `key=value` lines.
    Kv,
}

/// Ordered key/value report.
#[derive(Debug, Default)]
pub struct Report {
    rows: Vec<(String, String)>,
}

impl Report {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.rows.push((key.into(), value.to_string()));
        self
    }

    pub fn render(&self, format: Format) -> String {
        let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.rows {
            let _ = match format {
                Format::Text => writeln!(out, "{k:<width$}  {v}"),
                Format::Kv => writeln!(out, "{k}={v}"),
            };
        }
        out
    }
}

/// Renders a table: padded columns for text, `prefix.<first cell>.<column>=`
/// lines for key/value.
pub fn table(prefix: &str, header: &[&str], rows: &[Vec<String>], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Text => {
            let widths: Vec<usize> = (0..header.len())
                .map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
                .collect();
            let fmt_row = |cells: Vec<&str>| {
                cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ")
            };
            let _ = writeln!(out, "{}", fmt_row(header.to_vec()));
            for r in rows {
                let _ = writeln!(out, "{}", fmt_row(r.iter().map(String::as_str).collect()));
            }
        }
        Format::Kv => {
            for r in rows {
                for (h, c) in header.iter().zip(r).skip(1) {
                    let _ = writeln!(out, "{prefix}.{}.{h}={c}", r[0]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_both_formats() {
        let mut r = Report::default();
        r.push("outcome", "Accept det=1").push("n", 2);
        assert_eq!(r.render(Format::Kv), "outcome=Accept det=1\nn=2\n");
        assert_eq!(r.render(Format::Text), "outcome  Accept det=1\nn        2\n");
        let rows = vec![vec!["10".to_string(), "30".to_string()]];
        assert_eq!(table("bench", &["n", "nnz"], &rows, Format::Kv), "bench.10.nnz=30\n");
        assert_eq!(table("bench", &["n", "nnz"], &rows, Format::Text), " n  nnz\n10   30\n");
    }
}
