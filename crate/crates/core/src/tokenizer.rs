//! Two-path tokenization: table lookup per pretoken, BPE otherwise.

use std::fmt;

use thiserror::Error;

use crate::bpe::{bytes, pretokenize, BpeModel, Pretoken};
use crate::detokenizer::TokenLabel;
use crate::morphtable::MorphTable;
use crate::vocab::{MergedVocabulary, NO_SPACE};

#[derive(Debug, Error)]
pub enum TokenizerError {
    #[error("token {token:?} from the {source_name} is missing from the merged vocabulary")]
    MissingToken { token: String, source_name: &'static str },
    #[error("unknown token id {0}")]
    UnknownId(u32),
}

/// How table lookup treats letter case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CasePolicy {
    /// Exact match only; `Batting` goes to BPE. Lossless.
    #[default]
    Exact,
    /// Retry lowercased on a miss. Detokenized output comes back lowercased.
    FoldLower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenizerConfig {
    pub case_policy: CasePolicy,
    /// Emit `<|nospace|>` before lookup-path words not preceded by a space.
    pub use_joiner: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self { case_policy: CasePolicy::Exact, use_joiner: true }
    }
}

/// Which path handled a pretoken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Handler {
    MorphTable,
    /// BPE emitted exactly one token.
    BpeWhole,
    /// BPE emitted several tokens.
    BpeSplit,
}

impl Handler {
    pub fn as_str(self) -> &'static str {
        match self {
            Handler::MorphTable => "morphtable",
            Handler::BpeWhole => "bpe-whole",
            Handler::BpeSplit => "bpe-split",
        }
    }
}

impl fmt::Display for Handler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tokens emitted for one pretoken, with ground-truth labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PretokenTrace {
    pub pretoken: Pretoken,
    pub handler: Handler,
    pub tokens: Vec<String>,
    /// Parallel to `tokens`; `None` for the joiner.
    pub labels: Vec<Option<TokenLabel>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EncodedSequence {
    pub ids: Vec<u32>,
    pub tokens: Vec<String>,
}

impl EncodedSequence {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct MorphPieceTokenizer {
    table: MorphTable,
    bpe: BpeModel,
    vocab: MergedVocabulary,
    config: TokenizerConfig,
}

impl MorphPieceTokenizer {
    /// Fails if either path could emit a token the vocabulary lacks.
    pub fn new(
        table: MorphTable,
        bpe: BpeModel,
        vocab: MergedVocabulary,
        config: TokenizerConfig,
    ) -> Result<Self, TokenizerError> {
        let missing = |token: &str, source_name| TokenizerError::MissingToken { token: token.to_string(), source_name };
        if let Some(t) = table.token_set().iter().find(|t| !vocab.contains(t)) {
            return Err(missing(t, "morph table"));
        }
        if let Some(t) = bpe.tokens().iter().find(|t| !vocab.contains(t)) {
            return Err(missing(t, "BPE model"));
        }
        if config.use_joiner && !vocab.contains(NO_SPACE) {
            return Err(missing(NO_SPACE, "special tokens"));
        }
        Ok(Self { table, bpe, vocab, config })
    }

    pub fn table(&self) -> &MorphTable {
        &self.table
    }

    pub fn bpe(&self) -> &BpeModel {
        &self.bpe
    }

    pub fn vocab(&self) -> &MergedVocabulary {
        &self.vocab
    }

    pub fn config(&self) -> TokenizerConfig {
        self.config
    }

    fn lookup(&self, pt: &Pretoken) -> Option<&[String]> {
        if !pt.is_word() {
            return None;
        }
        self.table.lookup(&pt.text).or_else(|| match self.config.case_policy {
            CasePolicy::Exact => None,
            CasePolicy::FoldLower => self.table.lookup(&pt.text.to_lowercase()),
        })
    }

    /// Per-pretoken breakdown of the token stream.
    pub fn trace(&self, text: &str) -> Vec<PretokenTrace> {
        pretokenize(text)
            .into_iter()
            .enumerate()
            .map(|(i, pt)| {
                if let Some(morphs) = self.lookup(&pt) {
                    let mut tokens = Vec::with_capacity(morphs.len() + 2);
                    let mut labels = Vec::with_capacity(morphs.len() + 2);
                    if self.config.use_joiner {
                        // Spacing before a lookup-path word is positional: a
                        // space is implied except at the very start, so mark
                        // the exceptions.
                        if i == 0 && pt.had_leading_space {
                            tokens.push(bytes::SPACE_MARKER.to_string());
                            labels.push(Some(TokenLabel::Bpe));
                            tokens.push(NO_SPACE.to_string());
                            labels.push(None);
                        } else if i > 0 && !pt.had_leading_space {
                            tokens.push(NO_SPACE.to_string());
                            labels.push(None);
                        }
                    }
                    for m in morphs {
                        labels.push(Some(TokenLabel::from_surface(m)));
                        tokens.push(m.clone());
                    }
                    PretokenTrace { pretoken: pt, handler: Handler::MorphTable, tokens, labels }
                } else {
                    let tokens = self.bpe.encode_pretoken(&pt);
                    let handler = if tokens.len() == 1 { Handler::BpeWhole } else { Handler::BpeSplit };
                    let labels = vec![Some(TokenLabel::Bpe); tokens.len()];
                    PretokenTrace { pretoken: pt, handler, tokens, labels }
                }
            })
            .collect()
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        self.trace(text).into_iter().flat_map(|t| t.tokens).collect()
    }

    /// Tokens and the labels the detokenizer should recover, joiner removed.
    pub fn tokenize_labeled(&self, text: &str) -> (Vec<String>, Vec<TokenLabel>) {
        let mut tokens = Vec::new();
        let mut labels = Vec::new();
        for t in self.trace(text) {
            tokens.extend(t.tokens);
            labels.extend(t.labels.into_iter().flatten());
        }
        (tokens, labels)
    }

    pub fn coverage_trace(&self, text: &str) -> Vec<Handler> {
        self.trace(text).into_iter().map(|t| t.handler).collect()
    }

    pub fn encode(&self, text: &str) -> EncodedSequence {
        let tokens = self.tokenize(text);
        let ids = tokens
            .iter()
            .map(|t| self.vocab.id(t).expect("every emitted token is checked against the vocabulary at construction"))
            .collect();
        EncodedSequence { ids, tokens }
    }

    pub fn ids_to_tokens(&self, ids: &[u32]) -> Result<Vec<String>, TokenizerError> {
        ids.iter()
            .map(|&id| self.vocab.token(id).map(str::to_string).ok_or(TokenizerError::UnknownId(id)))
            .collect()
    }
}
