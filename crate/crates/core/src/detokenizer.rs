//! Token stream -> text.
//!
//! Tokens are labelled from their surface form (and, for bare tokens, from
//! vocabulary tags plus context), grouped into words by a transition table
//! over consecutive labels, and rendered: BPE runs are byte-decoded, morph
//! words go through the reverse table.

use std::fmt;

use thiserror::Error;

use crate::bpe::bytes;
use crate::morphtable::{ReverseMorphTable, HASH, MARKER};
use crate::vocab::{MergedVocabulary, SourceTag, END_OF_TEXT, NO_SPACE};

#[derive(Debug, Error)]
pub enum DetokenizeError {
    #[error("token {0:?} is not in the vocabulary")]
    UnknownToken(String),
    #[error("special token {0:?} cannot be classified")]
    UnexpectedSpecial(String),
    #[error("unknown token id {0}")]
    UnknownId(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenLabel {
    Prefix,
    Stem,
    Suffix,
    Hash,
    Bpe,
}

impl TokenLabel {
    /// Label implied by a lookup-path token's surface alone.
    pub fn from_surface(token: &str) -> Self {
        if token == HASH {
            TokenLabel::Hash
        } else if token.ends_with(MARKER) {
            TokenLabel::Prefix
        } else if token.starts_with(MARKER) {
            TokenLabel::Suffix
        } else {
            TokenLabel::Stem
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TokenLabel::Prefix => "prefix",
            TokenLabel::Stem => "stem",
            TokenLabel::Suffix => "suffix",
            TokenLabel::Hash => "hash",
            TokenLabel::Bpe => "bpe",
        }
    }
}

impl fmt::Display for TokenLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Relation between two consecutive labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    Continue,
    Boundary,
    Invalid,
    /// Stem followed by stem: continue only while the group stays a prefix
    /// of some reverse-table key.
    StemStem,
}

/// The word-boundary transition table.
pub fn transition(prev: TokenLabel, next: TokenLabel) -> Transition {
    use TokenLabel::*;
    use Transition::*;
    match (prev, next) {
        (Prefix, Prefix | Stem | Suffix) => Continue,
        (Prefix, Hash | Bpe) => Invalid,
        (Stem, Suffix | Hash) => Continue,
        (Stem, Stem) => StemStem,
        (Stem, Prefix | Bpe) => Boundary,
        (Hash, Stem) => Continue,
        (Hash, _) => Invalid,
        (Suffix, Suffix) => Continue,
        (Suffix, Prefix | Stem | Bpe) => Boundary,
        (Suffix, Hash) => Invalid,
        (Bpe, Bpe) => Continue,
        (Bpe, Prefix | Stem) => Boundary,
        (Bpe, Suffix | Hash) => Invalid,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    MorphWord,
    BpeRun,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordGroup {
    pub kind: GroupKind,
    /// Index of the first token in the (special-free) stream.
    pub start: usize,
    pub tokens: Vec<String>,
    pub labels: Vec<TokenLabel>,
    /// False when the group starts with a suffix or separator, or ends with
    /// a prefix or separator.
    pub well_formed: bool,
    /// Set once the reverse table resolved the group.
    pub verified: bool,
}

impl WordGroup {
    fn open(start: usize, token: &str, label: TokenLabel) -> Self {
        let kind = if label == TokenLabel::Bpe { GroupKind::BpeRun } else { GroupKind::MorphWord };
        Self { kind, start, tokens: vec![token.to_string()], labels: vec![label], well_formed: true, verified: false }
    }

    fn close(mut self) -> Self {
        if self.kind == GroupKind::MorphWord {
            let first = self.labels[0];
            let last = *self.labels.last().expect("groups are never empty");
            self.well_formed = !matches!(first, TokenLabel::Suffix | TokenLabel::Hash)
                && !matches!(last, TokenLabel::Prefix | TokenLabel::Hash);
        }
        self
    }
}

/// Result of a detokenization with diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detokenized {
    pub text: String,
    pub groups: Vec<WordGroup>,
    /// Morph words rendered by the fallback instead of the reverse table.
    pub unverified: usize,
}

#[derive(Debug, Clone)]
pub struct Detokenizer {
    vocab: MergedVocabulary,
    reverse: ReverseMorphTable,
}

impl Detokenizer {
    pub fn new(vocab: MergedVocabulary, reverse: ReverseMorphTable) -> Self {
        Self { vocab, reverse }
    }

    pub fn vocab(&self) -> &MergedVocabulary {
        &self.vocab
    }

    pub fn reverse(&self) -> &ReverseMorphTable {
        &self.reverse
    }

    /// Label a stream that contains no special tokens.
    pub fn classify<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Vec<TokenLabel>, DetokenizeError> {
        self.classify_with_breaks(tokens, &[])
    }

    /// Label a full stream: specials are consumed and mark word starts, and
    /// the result covers the remaining tokens in order.
    pub fn classify_stream<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Vec<TokenLabel>, DetokenizeError> {
        let (plain, breaks) = strip_specials(tokens.iter().map(AsRef::as_ref));
        self.classify_with_breaks(&plain, &breaks)
    }

    /// `breaks[i]` marks token `i` as the start of a new word (it followed a
    /// joiner).
    fn classify_with_breaks<S: AsRef<str>>(&self, tokens: &[S], breaks: &[bool]) -> Result<Vec<TokenLabel>, DetokenizeError> {
        let mut labels: Vec<TokenLabel> = Vec::with_capacity(tokens.len());
        for (i, tok) in tokens.iter().enumerate() {
            let tok = tok.as_ref();
            let tag = self.vocab.tag(tok).ok_or_else(|| DetokenizeError::UnknownToken(tok.to_string()))?;
            if tag == SourceTag::Special {
                return Err(DetokenizeError::UnexpectedSpecial(tok.to_string()));
            }
            let label = if tok.starts_with(bytes::SPACE_MARKER) || tag == SourceTag::Bpe {
                TokenLabel::Bpe
            } else if tok.starts_with(MARKER) || tok.ends_with(MARKER) {
                TokenLabel::from_surface(tok)
            } else {
                let prev = if breaks.get(i).copied().unwrap_or(false) { None } else { labels.last().copied() };
                match prev {
                    Some(TokenLabel::Prefix | TokenLabel::Hash | TokenLabel::Stem | TokenLabel::Suffix) => TokenLabel::Stem,
                    None | Some(TokenLabel::Bpe) => {
                        if self.starts_morph_word(tok, tokens.get(i + 1).map(AsRef::as_ref)) {
                            TokenLabel::Stem
                        } else {
                            TokenLabel::Bpe
                        }
                    }
                }
            };
            labels.push(label);
        }
        Ok(labels)
    }

    /// A bare token after BPE text (or at the start) only opens a morph word
    /// when the next token continues one.
    fn starts_morph_word(&self, tok: &str, next: Option<&str>) -> bool {
        let Some(next) = next else { return false };
        let next_is_morph = self.vocab.tag(next).is_some_and(SourceTag::is_morph);
        let continues = next_is_morph && (next == HASH || (next.starts_with(MARKER) && !next.ends_with(MARKER)));
        continues || self.reverse.is_prefix(&[tok, next])
    }

    /// Group a labelled stream into words.
    pub fn segment<S: AsRef<str>>(&self, labels: &[TokenLabel], tokens: &[S]) -> Vec<WordGroup> {
        self.segment_with_breaks(labels, tokens, &[])
    }

    fn segment_with_breaks<S: AsRef<str>>(&self, labels: &[TokenLabel], tokens: &[S], breaks: &[bool]) -> Vec<WordGroup> {
        assert_eq!(labels.len(), tokens.len(), "labels must be parallel to tokens");
        let mut groups = Vec::new();
        let mut current: Option<WordGroup> = None;
        for (i, (&label, tok)) in labels.iter().zip(tokens).enumerate() {
            let tok = tok.as_ref();
            let forced = breaks.get(i).copied().unwrap_or(false);
            let extend = match &current {
                None => false,
                Some(_) if forced => false,
                Some(g) => {
                    let prev = *g.labels.last().expect("groups are never empty");
                    match transition(prev, label) {
                        Transition::Continue => true,
                        Transition::Boundary | Transition::Invalid => false,
                        Transition::StemStem => {
                            let mut probe: Vec<&str> = g.tokens.iter().map(String::as_str).collect();
                            probe.push(tok);
                            self.reverse.is_prefix(&probe)
                        }
                    }
                }
            };
            if extend {
                let g = current.as_mut().expect("extend implies an open group");
                g.tokens.push(tok.to_string());
                g.labels.push(label);
            } else {
                if let Some(g) = current.take() {
                    groups.push(g.close());
                }
                current = Some(WordGroup::open(i, tok, label));
            }
        }
        if let Some(g) = current {
            groups.push(g.close());
        }
        groups
    }

    /// Surface for a morph group: the reverse table on an exact hit, else the
    /// morpheme texts with markers stripped. Returns `(word, verified)`.
    pub fn reverse_word(&self, group: &WordGroup) -> (String, bool) {
        match self.reverse.get(&group.tokens) {
            Some(surface) if group.well_formed => (surface.to_string(), true),
            _ => (group.tokens.iter().map(|t| t.trim_matches(MARKER)).collect(), false),
        }
    }

    pub fn detokenize<S: AsRef<str>>(&self, tokens: &[S]) -> Result<String, DetokenizeError> {
        self.detokenize_report(tokens).map(|d| d.text)
    }

    pub fn decode_ids(&self, ids: &[u32]) -> Result<Detokenized, DetokenizeError> {
        let tokens = ids
            .iter()
            .map(|&id| self.vocab.token(id).ok_or(DetokenizeError::UnknownId(id)))
            .collect::<Result<Vec<_>, _>>()?;
        self.detokenize_report(&tokens)
    }

    /// Detokenize, keeping groups and the unverified count. End-of-text
    /// tokens split the stream into independent documents and are rendered
    /// literally between them.
    pub fn detokenize_report<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Detokenized, DetokenizeError> {
        let mut out = Detokenized { text: String::new(), groups: Vec::new(), unverified: 0 };
        let mut doc: Vec<&str> = Vec::new();
        for tok in tokens {
            let tok = tok.as_ref();
            if tok == END_OF_TEXT {
                self.render_document(&doc, &mut out)?;
                out.text.push_str(END_OF_TEXT);
                doc.clear();
            } else {
                doc.push(tok);
            }
        }
        self.render_document(&doc, &mut out)?;
        Ok(out)
    }

    fn render_document(&self, stream: &[&str], out: &mut Detokenized) -> Result<(), DetokenizeError> {
        let (tokens, breaks) = strip_specials(stream.iter().copied());
        let labels = self.classify_with_breaks(&tokens, &breaks)?;
        let groups = self.segment_with_breaks(&labels, &tokens, &breaks);
        for mut g in groups {
            match g.kind {
                GroupKind::BpeRun => out.text.push_str(&self.render_bpe(&g.tokens)),
                GroupKind::MorphWord => {
                    let (word, verified) = self.reverse_word(&g);
                    g.verified = verified;
                    if !verified {
                        out.unverified += 1;
                    }
                    if g.start > 0 && !breaks[g.start] {
                        out.text.push(' ');
                    }
                    out.text.push_str(&word);
                }
            }
            out.groups.push(g);
        }
        Ok(())
    }

    /// Byte-decode a BPE run. Tokens that exist only on the lookup side are
    /// taken literally.
    fn render_bpe(&self, tokens: &[String]) -> String {
        let mut raw = Vec::new();
        for t in tokens {
            match bytes::unmap(t) {
                Ok(b) if !matches!(self.vocab.tag(t), Some(SourceTag::MorphStem | SourceTag::MorphAffix)) => raw.extend(b),
                _ => raw.extend_from_slice(t.as_bytes()),
            }
        }
        String::from_utf8_lossy(&raw).into_owned()
    }
}

/// Drop joiner and end-of-text tokens, recording which of the remaining
/// tokens start a new word because of them.
fn strip_specials<'a>(stream: impl Iterator<Item = &'a str>) -> (Vec<&'a str>, Vec<bool>) {
    let mut tokens = Vec::new();
    let mut breaks = Vec::new();
    let mut pending_break = false;
    for tok in stream {
        if tok == NO_SPACE || tok == END_OF_TEXT {
            pending_break = true;
            continue;
        }
        tokens.push(tok);
        breaks.push(std::mem::take(&mut pending_break));
    }
    (tokens, breaks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use TokenLabel::*;

    #[test]
    fn surface_labels() {
        assert_eq!(TokenLabel::from_surface("de#"), Prefix);
        assert_eq!(TokenLabel::from_surface("#ing"), Suffix);
        assert_eq!(TokenLabel::from_surface("#"), Hash);
        assert_eq!(TokenLabel::from_surface("gage"), Stem);
    }

    #[test]
    fn transition_table() {
        assert_eq!(transition(Prefix, Stem), Transition::Continue);
        assert_eq!(transition(Prefix, Prefix), Transition::Continue);
        assert_eq!(transition(Prefix, Suffix), Transition::Continue);
        assert_eq!(transition(Stem, Suffix), Transition::Continue);
        assert_eq!(transition(Stem, Hash), Transition::Continue);
        assert_eq!(transition(Hash, Stem), Transition::Continue);
        assert_eq!(transition(Suffix, Suffix), Transition::Continue);
        assert_eq!(transition(Stem, Stem), Transition::StemStem);
        for (a, b) in [(Suffix, Prefix), (Suffix, Stem), (Suffix, Bpe), (Stem, Prefix), (Stem, Bpe), (Bpe, Prefix), (Bpe, Stem)] {
            assert_eq!(transition(a, b), Transition::Boundary, "{a}->{b}");
        }
        for (a, b) in [(Prefix, Hash), (Prefix, Bpe), (Hash, Prefix), (Hash, Suffix), (Hash, Hash), (Hash, Bpe), (Bpe, Suffix)] {
            assert_eq!(transition(a, b), Transition::Invalid, "{a}->{b}");
        }
    }
}
