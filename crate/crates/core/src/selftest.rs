//! Fixture checks shared by the CLI `selftest` command and the test suite.

use crate::artifacts::Artifacts;
use crate::bpe::pretokenize;
use crate::detokenizer::{Detokenizer, TokenLabel};
use crate::fixtures;
use crate::morphtable::{MorphTable, ReverseMorphTable, MARKER};
use crate::tokenizer::{MorphPieceTokenizer, TokenizerConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// Texts the pipeline promises to reproduce exactly: every table word in
/// them must come back from the reverse table as itself, and the text must
/// not contain the marker character.
pub fn round_trip_eligible(table: &MorphTable, reverse: &ReverseMorphTable, text: &str) -> bool {
    !text.contains(MARKER)
        && pretokenize(text)
            .iter()
            .filter_map(|pt| table.lookup(&pt.text).map(|seq| (pt, seq)))
            .all(|(pt, seq)| reverse.get(seq) == Some(pt.text.as_str()))
}

/// Outcome of a round trip over many texts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoundTripStats {
    pub eligible: usize,
    pub exact: usize,
    pub labels_total: usize,
    pub labels_matched: usize,
    pub first_failure: Option<String>,
}

impl RoundTripStats {
    pub fn all_exact(&self) -> bool {
        self.exact == self.eligible
    }

    pub fn labels_consistent(&self) -> bool {
        self.labels_matched == self.labels_total
    }
}

pub fn round_trip<S: AsRef<str>>(tok: &MorphPieceTokenizer, detok: &Detokenizer, texts: &[S]) -> RoundTripStats {
    let mut stats = RoundTripStats::default();
    for text in texts {
        let text = text.as_ref();
        if !round_trip_eligible(tok.table(), detok.reverse(), text) {
            continue;
        }
        stats.eligible += 1;
        let (tokens, truth) = tok.tokenize_labeled(text);
        let back = detok.detokenize(&tokens).unwrap_or_default();
        if back == text {
            stats.exact += 1;
        } else if stats.first_failure.is_none() {
            stats.first_failure = Some(format!("{text:?} -> {back:?}"));
        }
        let labels = detok.classify_stream(&tokens).unwrap_or_default();
        stats.labels_total += truth.len();
        stats.labels_matched += truth.iter().zip(&labels).filter(|(a, b)| a == b).count();
    }
    stats
}

pub fn table1(tok: &MorphPieceTokenizer) -> Vec<Check> {
    fixtures::TABLE1
        .iter()
        .map(|(word, want)| {
            let got = tok.tokenize(word);
            Check::new(format!("segment {word}"), got == *want, got.join(" "))
        })
        .collect()
}

pub fn worked_example(detok: &Detokenizer) -> Vec<Check> {
    use TokenLabel::*;
    let stream = fixtures::WORKED_STREAM;
    let labels = detok.classify(&stream);
    let want = [Bpe, Bpe, Prefix, Stem, Suffix, Stem, Suffix];
    let mut checks = vec![Check::new(
        "worked example labels",
        labels.as_deref().ok() == Some(&want[..]),
        format!("{labels:?}"),
    )];
    let groups: Vec<Vec<String>> = match &labels {
        Ok(l) => detok.segment(l, &stream).into_iter().map(|g| g.tokens).collect(),
        Err(_) => Vec::new(),
    };
    let want_groups = [vec!["He", "Ġwas"], vec!["in#", "vestigate", "#ing"], vec!["diligent", "#ly"]];
    checks.push(Check::new("worked example groups", groups == want_groups, format!("{groups:?}")));
    let text = detok.detokenize(&stream).unwrap_or_default();
    checks.push(Check::new(
        "worked example text",
        text.contains("investigating") && text.contains("diligently"),
        text,
    ));
    checks
}

/// Everything the `selftest` command runs, against `artifacts`.
pub fn run(artifacts: &Artifacts) -> Vec<Check> {
    let tok = match artifacts.tokenizer(TokenizerConfig::default()) {
        Ok(t) => t,
        Err(e) => return vec![Check::new("load tokenizer", false, e.to_string())],
    };
    let detok = artifacts.detokenizer();
    let mut checks = table1(&tok);
    checks.extend(worked_example(&detok));
    let corpus = fixtures::corpus();
    let rt = round_trip(&tok, &detok, &corpus);
    checks.push(Check::new(
        "corpus round trip",
        rt.eligible > 0 && rt.all_exact(),
        format!("{}/{} exact{}", rt.exact, rt.eligible, rt.first_failure.as_ref().map(|f| format!(", first failure {f}")).unwrap_or_default()),
    ));
    checks.push(Check::new(
        "classification consistency",
        rt.labels_consistent(),
        format!("{}/{} labels", rt.labels_matched, rt.labels_total),
    ));
    checks
}
