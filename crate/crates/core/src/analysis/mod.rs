//! Corpus statistics: fertility across tokenizers, and which path handled
//! each pretoken by word length.

mod adapters;
mod report;

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::tokenizer::{Handler, MorphPieceTokenizer};

pub use adapters::{Bpe, Chars, MorphPiece, TokenizerAdapter, Whitespace, WordPiece};
pub use report::{emit_report, render_svg, write_report, Format, Report};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("corpus has no non-empty documents")]
    EmptyCorpus,
    #[error("unknown report format {0:?} (expected tsv or json)")]
    UnknownFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FertilityRow {
    pub tokenizer: String,
    pub documents: u64,
    pub words: u64,
    pub tokens: u64,
    pub avg_tokens_per_doc: f64,
    /// Total tokens over total whitespace words.
    pub fertility: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FertilityReport {
    pub rows: Vec<FertilityRow>,
}

impl FertilityReport {
    pub fn get(&self, tokenizer: &str) -> Option<&FertilityRow> {
        self.rows.iter().find(|r| r.tokenizer == tokenizer)
    }
}

/// Documents with no whitespace-delimited word are skipped.
pub fn fertility<S: AsRef<str> + Sync>(docs: &[S], adapters: &[&dyn TokenizerAdapter]) -> Result<FertilityReport, AnalysisError> {
    let docs: Vec<&str> = docs.iter().map(AsRef::as_ref).filter(|d| d.split_whitespace().next().is_some()).collect();
    if docs.is_empty() {
        return Err(AnalysisError::EmptyCorpus);
    }
    let words: u64 = docs.par_iter().map(|d| Whitespace.count(d) as u64).sum();
    let n = docs.len() as u64;
    let rows = adapters
        .iter()
        .map(|a| {
            let tokens: u64 = docs.par_iter().map(|d| a.count(d) as u64).sum();
            FertilityRow {
                tokenizer: a.name().to_string(),
                documents: n,
                words,
                tokens,
                avg_tokens_per_doc: tokens as f64 / n as f64,
                fertility: tokens as f64 / words as f64,
            }
        })
        .collect();
    Ok(FertilityReport { rows })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct HandlerCounts {
    pub morphtable: u64,
    pub bpe_whole: u64,
    pub bpe_split: u64,
}

impl HandlerCounts {
    pub fn get(&self, h: Handler) -> u64 {
        match h {
            Handler::MorphTable => self.morphtable,
            Handler::BpeWhole => self.bpe_whole,
            Handler::BpeSplit => self.bpe_split,
        }
    }

    fn add(&mut self, h: Handler, n: u64) {
        match h {
            Handler::MorphTable => self.morphtable += n,
            Handler::BpeWhole => self.bpe_whole += n,
            Handler::BpeSplit => self.bpe_split += n,
        }
    }

    fn absorb(&mut self, other: &HandlerCounts) {
        self.morphtable += other.morphtable;
        self.bpe_whole += other.bpe_whole;
        self.bpe_split += other.bpe_split;
    }

    pub fn total(&self) -> u64 {
        self.morphtable + self.bpe_whole + self.bpe_split
    }

    /// Share of `h` in this bucket; zero for an empty bucket.
    pub fn share(&self, h: Handler) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.get(h) as f64 / t as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRow {
    pub length: usize,
    pub morphtable: u64,
    pub bpe_whole: u64,
    pub bpe_split: u64,
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnsplitRow {
    pub rank: usize,
    pub token: String,
    pub count: u64,
    pub relative_frequency: f64,
}

/// Per-length handler counts plus frequencies of pretokens the lookup path
/// did not handle.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoverageReport {
    histogram: BTreeMap<usize, HandlerCounts>,
    unsplit: BTreeMap<String, u64>,
    total: u64,
}

impl CoverageReport {
    fn observe(&mut self, text: &str, h: Handler) {
        self.histogram.entry(text.chars().count()).or_default().add(h, 1);
        if h != Handler::MorphTable {
            *self.unsplit.entry(text.to_string()).or_insert(0) += 1;
        }
        self.total += 1;
    }

    fn absorb(mut self, other: CoverageReport) -> Self {
        for (len, c) in &other.histogram {
            self.histogram.entry(*len).or_default().absorb(c);
        }
        for (tok, n) in other.unsplit {
            *self.unsplit.entry(tok).or_insert(0) += n;
        }
        self.total += other.total;
        self
    }

    /// Word length in characters -> handler counts.
    pub fn histogram(&self) -> &BTreeMap<usize, HandlerCounts> {
        &self.histogram
    }

    pub fn total_pretokens(&self) -> u64 {
        self.total
    }

    /// Summed counts over a range of word lengths.
    pub fn bucket(&self, lengths: RangeInclusive<usize>) -> HandlerCounts {
        let mut c = HandlerCounts::default();
        for (_, v) in self.histogram.range(lengths) {
            c.absorb(v);
        }
        c
    }

    pub fn rows(&self) -> Vec<CoverageRow> {
        self.histogram
            .iter()
            .map(|(&length, c)| CoverageRow {
                length,
                morphtable: c.morphtable,
                bpe_whole: c.bpe_whole,
                bpe_split: c.bpe_split,
                total: c.total(),
            })
            .collect()
    }

    /// The `k` most frequent unsplit pretokens, ties broken by text.
    pub fn top(&self, k: usize) -> Vec<UnsplitRow> {
        let mut ranked: Vec<(&String, &u64)> = self.unsplit.iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
        ranked
            .into_iter()
            .take(k)
            .enumerate()
            .map(|(i, (token, &count))| UnsplitRow {
                rank: i + 1,
                token: token.clone(),
                count,
                relative_frequency: count as f64 / self.total as f64,
            })
            .collect()
    }
}

/// Pretokens are keyed by their text without the absorbed space.
pub fn coverage<S: AsRef<str> + Sync>(docs: &[S], tok: &MorphPieceTokenizer) -> Result<CoverageReport, AnalysisError> {
    let report = docs
        .par_iter()
        .fold(CoverageReport::default, |mut acc, doc| {
            for t in tok.trace(doc.as_ref()) {
                acc.observe(&t.pretoken.text, t.handler);
            }
            acc
        })
        .reduce(CoverageReport::default, CoverageReport::absorb);
    if report.total == 0 {
        return Err(AnalysisError::EmptyCorpus);
    }
    Ok(report)
}
