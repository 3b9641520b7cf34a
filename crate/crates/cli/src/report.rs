//! Line-oriented output. Every record is a row of `key=value` fields with an
//! optional leading tag; `raw` prints rows as they are, `table` aligns each
//! section under a header.

use std::fmt::{self, Display, Write as _};

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Raw,
}

#[derive(Debug, Clone, Default)]
pub struct Row {
    tag: Option<String>,
    fields: Vec<(String, String)>,
}

impl Row {
    pub fn new() -> Self {
        Row::default()
    }

    pub fn tagged(tag: &str) -> Self {
        Row { tag: Some(tag.to_string()), fields: Vec::new() }
    }

    pub fn field(mut self, key: &str, value: impl Display) -> Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }
}

impl Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.tag.iter().cloned().collect();
        parts.extend(self.fields.iter().map(|(k, v)| {
            if v.contains(char::is_whitespace) {
                format!("{k}=\"{v}\"")
            } else {
                format!("{k}={v}")
            }
        }));
        f.write_str(&parts.join(" "))
    }
}

/// Rows grouped into sections, plus whether a declared check failed.
#[derive(Debug, Clone, Default)]
pub struct Report {
    sections: Vec<Vec<Row>>,
    /// Explanations for stderr.
    pub notes: Vec<String>,
    pub failed: bool,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn section(&mut self, rows: Vec<Row>) {
        if !rows.is_empty() {
            self.sections.push(rows);
        }
    }

    pub fn row(&mut self, row: Row) {
        self.sections.push(vec![row]);
    }

    pub fn fail(&mut self) {
        self.failed = true;
    }

    pub fn note(&mut self, text: String) {
        self.notes.push(text);
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        for (i, rows) in self.sections.iter().enumerate() {
            match format {
                Format::Raw => {
                    for r in rows {
                        writeln!(out, "{r}").unwrap();
                    }
                }
                Format::Table => {
                    if i > 0 {
                        out.push('\n');
                    }
                    render_table(&mut out, rows);
                }
            }
        }
        out
    }
}

fn render_table(out: &mut String, rows: &[Row]) {
    let uniform = rows.iter().all(|r| {
        r.tag == rows[0].tag && r.fields.iter().map(|(k, _)| k).eq(rows[0].fields.iter().map(|(k, _)| k))
    });
    if !uniform {
        for r in rows {
            writeln!(out, "{r}").unwrap();
        }
        return;
    }
    let tag = rows[0].tag.as_deref();
    let headers: Vec<&str> = rows[0].fields.iter().map(|(k, _)| k.as_str()).collect();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, (_, v)) in widths.iter_mut().zip(&r.fields) {
            *w = (*w).max(v.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string()
    };
    if let Some(t) = tag {
        writeln!(out, "{t}").unwrap();
    }
    writeln!(out, "{}", line(headers.clone())).unwrap();
    for r in rows {
        writeln!(out, "{}", line(r.fields.iter().map(|(_, v)| v.as_str()).collect())).unwrap();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new();
        r.row(Row::new().field("n", 12));
        r.section(vec![
            Row::tagged("CERT").field("y0", "1/2").field("n", 3),
            Row::tagged("CERT").field("y0", "1/64").field("n", 8),
        ]);
        r
    }

    #[test]
    fn raw_rows() {
        assert_eq!(sample().render(Format::Raw), "n=12\nCERT y0=1/2 n=3\nCERT y0=1/64 n=8\n");
    }

    #[test]
    fn quoted_labels() {
        let r = Row::new().field("measure", "MIX 3/4 FAIR 1/4 DIRAC (0)").field("depth", 12);
        assert_eq!(r.to_string(), "measure=\"MIX 3/4 FAIR 1/4 DIRAC (0)\" depth=12");
    }

    #[test]
    fn aligned_tables() {
        let t = sample().render(Format::Table);
        assert_eq!(t, "n\n12\n\nCERT\ny0    n\n1/2   3\n1/64  8\n");
    }
}
