//! Structured JSON-lines log and the plain-text summary table.

use anyhow::{Context, Result};
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// One JSON object per line: the command, its resolved configuration and
/// arguments, and one report. Nothing time-dependent is written, so equal
/// configurations give byte-identical logs.
pub struct Log {
    out: Option<BufWriter<File>>,
}

#[derive(Serialize)]
struct Record<'a, C: Serialize, A: Serialize, R: Serialize> {
    command: &'a str,
    config: &'a C,
    args: &'a A,
    report: &'a R,
}

impl Log {
    pub fn open(path: Option<&Path>) -> Result<Self> {
        let out = match path {
            Some(p) => Some(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
            None => None,
        };
        Ok(Log { out })
    }

    pub fn write<C: Serialize, A: Serialize, R: Serialize>(&mut self, command: &str, config: &C, args: &A, report: &R) -> Result<()> {
        if let Some(out) = self.out.as_mut() {
            serde_json::to_writer(&mut *out, &Record { command, config, args, report })?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        if let Some(mut out) = self.out {
            out.flush()?;
        }
        Ok(())
    }
}

/// Left-aligned text table.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let cols = self.header.len();
        let width: Vec<usize> = (0..cols)
            .map(|c| {
                self.rows.iter().map(|r| r.get(c).map_or(0, |s| s.chars().count())).chain([self.header[c].len()]).max().unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            let padded: Vec<String> = (0..cols)
                .map(|c| {
                    let s = cells.get(c).map_or("", String::as_str);
                    format!("{s:<w$}", w = width[c])
                })
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = vec![line(&self.header)];
        out.push(width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
        out.extend(self.rows.iter().map(|r| line(r)));
        out.join("\n")
    }
}

pub fn interval(ci: (f64, f64)) -> String {
    format!("[{:.4}, {:.4}]", ci.0, ci.1)
}

pub fn seconds(d: std::time::Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}
