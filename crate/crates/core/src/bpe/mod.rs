//! Byte-level BPE: pre-tokenizer, trainer, encoder and decoder.

pub mod bytes;
mod pretokenize;
mod train;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use thiserror::Error;

pub use pretokenize::{pretokenize, split_spans, Pretoken};
pub use train::{train, train_from_counts, word_counts, TrainStats};

/// Header tag of the merges file.
pub const MODEL_MAGIC: &str = "bpe-v1";

/// Number of base symbols.
pub const BASE_SIZE: usize = 256;

#[derive(Debug, Error)]
pub enum BpeError {
    #[error("target vocabulary size {0} is smaller than the {BASE_SIZE}-symbol base alphabet")]
    TargetTooSmall(usize),
    #[error("no trainable text left after exclusion")]
    EmptyEffectiveCorpus,
    #[error("symbol {0:?} is outside the byte alphabet")]
    ForeignSymbol(char),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Trained byte-level BPE model.
///
/// Ids `0..256` are the base symbols in byte order; every later id is the
/// output of a merge, in the order it was first produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpeModel {
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
    merges: Vec<(u32, u32)>,
    /// pair -> (rank, output id)
    ranks: HashMap<(u32, u32), (u32, u32)>,
}

impl Default for BpeModel {
    fn default() -> Self {
        Self::base()
    }
}

impl BpeModel {
    /// Model with the base alphabet and no merges.
    pub fn base() -> Self {
        let tokens: Vec<String> = (0..=255u8).map(|b| bytes::byte_to_char(b).to_string()).collect();
        let ids = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Self { tokens, ids, merges: Vec::new(), ranks: HashMap::new() }
    }

    /// Build a model by replaying merges given as token strings.
    ///
    /// Each side must be a base symbol or the output of an earlier merge.
    pub fn from_merges<S: AsRef<str>>(merges: impl IntoIterator<Item = (S, S)>) -> Result<Self, BpeError> {
        let mut model = Self::base();
        for (i, (left, right)) in merges.into_iter().enumerate() {
            let (left, right) = (left.as_ref(), right.as_ref());
            let lookup = |t: &str| {
                model.ids.get(t).copied().ok_or_else(|| BpeError::Parse {
                    line: i + 1,
                    message: format!("merge references unknown symbol {t:?}"),
                })
            };
            let pair = (lookup(left)?, lookup(right)?);
            model.push_merge(pair);
        }
        Ok(model)
    }

    /// Appends a merge, returning the output id. A pair that is already
    /// ranked is ignored.
    pub(crate) fn push_merge(&mut self, pair: (u32, u32)) -> u32 {
        if let Some(&(_, out)) = self.ranks.get(&pair) {
            return out;
        }
        let merged = format!("{}{}", self.tokens[pair.0 as usize], self.tokens[pair.1 as usize]);
        let out = match self.ids.get(&merged) {
            Some(&id) => id,
            None => {
                let id = self.tokens.len() as u32;
                self.ids.insert(merged.clone(), id);
                self.tokens.push(merged);
                id
            }
        };
        self.ranks.insert(pair, (self.merges.len() as u32, out));
        self.merges.push(pair);
        out
    }

    pub fn vocab_size(&self) -> usize {
        self.tokens.len()
    }

    pub fn num_merges(&self) -> usize {
        self.merges.len()
    }

    /// Tokens in id order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token_id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.ids.contains_key(token)
    }

    /// Merges as `(left, right)` token strings in rank order.
    pub fn merges(&self) -> impl ExactSizeIterator<Item = (&str, &str)> + '_ {
        self.merges.iter().map(|&(l, r)| (self.tokens[l as usize].as_str(), self.tokens[r as usize].as_str()))
    }

    /// Encode one pretoken into token strings.
    pub fn encode_pretoken(&self, pretoken: &Pretoken) -> Vec<String> {
        let mut symbols = Vec::with_capacity(pretoken.text.len() + 1);
        if pretoken.had_leading_space {
            symbols.push(u32::from(b' '));
        }
        symbols.extend(pretoken.text.bytes().map(u32::from));
        self.apply_merges(&mut symbols);
        symbols.into_iter().map(|id| self.tokens[id as usize].clone()).collect()
    }

    /// Encode arbitrary text: pretokenize, then encode each pretoken.
    pub fn encode(&self, text: &str) -> Vec<String> {
        pretokenize(text).iter().flat_map(|pt| self.encode_pretoken(pt)).collect()
    }

    /// Lowest-rank-first merging over a symbol sequence.
    fn apply_merges(&self, symbols: &mut Vec<u32>) {
        while symbols.len() > 1 {
            let best = symbols
                .windows(2)
                .filter_map(|w| self.ranks.get(&(w[0], w[1])).map(|&(rank, out)| (rank, (w[0], w[1]), out)))
                .min_by_key(|&(rank, _, _)| rank);
            let Some((_, pair, out)) = best else { break };
            let mut write = 0;
            let mut read = 0;
            while read < symbols.len() {
                if read + 1 < symbols.len() && (symbols[read], symbols[read + 1]) == pair {
                    symbols[write] = out;
                    read += 2;
                } else {
                    symbols[write] = symbols[read];
                    read += 1;
                }
                write += 1;
            }
            symbols.truncate(write);
        }
    }

    /// Merges file: `bpe-v1 <vocab_size>` then one `left right` per line.
    pub fn write_merges<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{MODEL_MAGIC} {}", self.vocab_size())?;
        for (l, r) in self.merges() {
            writeln!(out, "{l} {r}")?;
        }
        Ok(())
    }

    /// Vocab file: `token<TAB>id` in id order.
    pub fn write_vocab<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut buf = String::new();
        for (id, token) in self.tokens.iter().enumerate() {
            let _ = writeln!(buf, "{token}\t{id}");
        }
        out.write_all(buf.as_bytes())
    }

    pub fn read_merges<R: BufRead>(input: R) -> Result<Self, BpeError> {
        let mut lines = input.lines();
        let header = lines.next().transpose()?.ok_or(BpeError::Parse { line: 1, message: "empty model file".into() })?;
        let declared: usize = header
            .strip_prefix(MODEL_MAGIC)
            .and_then(|rest| rest.trim().parse().ok())
            .ok_or_else(|| BpeError::Parse { line: 1, message: format!("bad header {header:?}") })?;
        let mut model = Self::base();
        for (i, line) in lines.enumerate() {
            let line = line?;
            let lineno = i + 2;
            let parts: Vec<&str> = line.split(' ').collect();
            let [l, r] = parts[..] else {
                return Err(BpeError::Parse { line: lineno, message: format!("expected `left right`, got {line:?}") });
            };
            let id = |t: &str| {
                model.ids.get(t).copied().ok_or_else(|| BpeError::Parse {
                    line: lineno,
                    message: format!("merge references unknown symbol {t:?}"),
                })
            };
            let pair = (id(l)?, id(r)?);
            if model.ranks.contains_key(&pair) {
                return Err(BpeError::Parse { line: lineno, message: format!("duplicate merge {line:?}") });
            }
            model.push_merge(pair);
        }
        if model.vocab_size() != declared {
            return Err(BpeError::Parse {
                line: 1,
                message: format!("header declares {declared} tokens, merges produce {}", model.vocab_size()),
            });
        }
        Ok(model)
    }

    /// Read a published GPT-2 style merges file (`#version` header, then
    /// `left right` lines). Merges whose sides are not yet known are skipped.
    pub fn read_gpt2_merges<R: BufRead>(input: R) -> Result<Self, BpeError> {
        let mut model = Self::base();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.starts_with("#version") || line.trim().is_empty() {
                continue;
            }
            let Some((l, r)) = line.split_once(' ') else {
                return Err(BpeError::Parse { line: i + 1, message: format!("expected `left right`, got {line:?}") });
            };
            if let (Some(l), Some(r)) = (model.token_id(l), model.token_id(r)) {
                model.push_merge((l, r));
            }
        }
        Ok(model)
    }
}

/// Inverse of the byte remap over concatenated tokens. Byte sequences that
/// are not valid UTF-8 are decoded lossily.
pub fn decode_bytes<S: AsRef<str>>(tokens: &[S]) -> Result<String, BpeError> {
    let mut raw = Vec::new();
    for t in tokens {
        raw.extend(bytes::unmap(t.as_ref()).map_err(BpeError::ForeignSymbol)?);
    }
    Ok(match String::from_utf8(raw) {
        Ok(s) => s,
        Err(e) => String::from_utf8_lossy(e.as_bytes()).into_owned(),
    })
}
