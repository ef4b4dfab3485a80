//! TSV / JSON emission and an SVG chart of coverage by word length.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::{AnalysisError, CoverageReport, CoverageRow, FertilityReport, FertilityRow, UnsplitRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Tsv,
    Json,
}

impl FromStr for Format {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(Format::Tsv),
            "json" => Ok(Format::Json),
            _ => Err(AnalysisError::UnknownFormat(s.to_string())),
        }
    }
}

pub enum Report<'a> {
    Fertility(&'a FertilityReport),
    Coverage(&'a CoverageReport),
    Unsplit(&'a [UnsplitRow]),
}

trait TsvRow: Serialize {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

impl TsvRow for FertilityRow {
    const HEADER: &'static [&'static str] = &["tokenizer", "documents", "words", "tokens", "avg_tokens_per_doc", "fertility"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.tokenizer.clone(),
            self.documents.to_string(),
            self.words.to_string(),
            self.tokens.to_string(),
            self.avg_tokens_per_doc.to_string(),
            self.fertility.to_string(),
        ]
    }
}

impl TsvRow for CoverageRow {
    const HEADER: &'static [&'static str] = &["length", "morphtable", "bpe_whole", "bpe_split", "total"];
    fn fields(&self) -> Vec<String> {
        [self.length as u64, self.morphtable, self.bpe_whole, self.bpe_split, self.total].iter().map(u64::to_string).collect()
    }
}

impl TsvRow for UnsplitRow {
    const HEADER: &'static [&'static str] = &["rank", "token", "count", "relative_frequency"];
    fn fields(&self) -> Vec<String> {
        // Tabs and newlines would break the row; pretokens may hold both.
        let token = self.token.replace('\\', "\\\\").replace('\t', "\\t").replace('\n', "\\n").replace('\r', "\\r");
        vec![self.rank.to_string(), token, self.count.to_string(), self.relative_frequency.to_string()]
    }
}

fn write_rows<R: TsvRow, W: Write>(rows: &[R], format: Format, mut out: W) -> Result<(), AnalysisError> {
    match format {
        Format::Tsv => {
            let mut buf = R::HEADER.join("\t");
            buf.push('\n');
            for r in rows {
                buf.push_str(&r.fields().join("\t"));
                buf.push('\n');
            }
            out.write_all(buf.as_bytes())?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, rows)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub fn write_report<W: Write>(report: &Report<'_>, format: Format, out: W) -> Result<(), AnalysisError> {
    match report {
        Report::Fertility(r) => write_rows(&r.rows, format, out),
        Report::Coverage(r) => write_rows(&r.rows(), format, out),
        Report::Unsplit(rows) => write_rows(rows, format, out),
    }
}

pub fn emit_report(report: &Report<'_>, format: Format, path: &Path) -> Result<(), AnalysisError> {
    let mut buf = Vec::new();
    write_report(report, format, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 48.0;
/// Lengths above this share the last bar.
const MAX_LENGTH: usize = 30;
const SERIES: [(&str, &str); 3] = [("MorphTable", "#4c72b0"), ("BPE whole", "#55a868"), ("BPE split", "#c44e52")];

/// Stacked proportion bars, one per word length.
pub fn render_svg(report: &CoverageReport) -> String {
    let last = report.histogram().keys().copied().max().unwrap_or(1).clamp(1, MAX_LENGTH);
    let bars: Vec<[u64; 3]> = (1..=last)
        .map(|len| {
            let c = if len == last { report.bucket(len..=usize::MAX) } else { report.bucket(len..=len) };
            [c.morphtable, c.bpe_whole, c.bpe_split]
        })
        .collect();
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let slot = plot_w / bars.len() as f64;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, counts) in bars.iter().enumerate() {
        let total: u64 = counts.iter().sum();
        let x = MARGIN + i as f64 * slot;
        let mut y = HEIGHT - MARGIN;
        if total > 0 {
            for (n, (_, color)) in counts.iter().zip(SERIES) {
                let h = plot_h * *n as f64 / total as f64;
                y -= h;
                let _ = writeln!(s, r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{h:.2}" fill="{color}"/>"#, slot * 0.9);
            }
        }
        let label = if i + 1 == bars.len() && last == MAX_LENGTH { format!("{last}+") } else { (i + 1).to_string() };
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, x + slot * 0.45, HEIGHT - MARGIN + 14.0);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">word length (characters)</text>"#, WIDTH / 2.0, HEIGHT - 8.0);
    for (i, (name, color)) in SERIES.iter().enumerate() {
        let x = MARGIN + i as f64 * 120.0;
        let _ = writeln!(s, r#"<rect x="{x}" y="12" width="10" height="10" fill="{color}"/><text x="{}" y="21">{name}</text>"#, x + 14.0);
    }
    s.push_str("</svg>\n");
    s
}
