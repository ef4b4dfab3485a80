//! Tokenizers behind one interface, for side-by-side statistics.

use std::collections::HashSet;
use std::io::BufRead;

use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

use crate::bpe::BpeModel;
use crate::tokenizer::MorphPieceTokenizer;

pub trait TokenizerAdapter: Sync {
    fn name(&self) -> &str;
    fn tokenize(&self, text: &str) -> Vec<String>;

    fn count(&self, text: &str) -> usize {
        self.tokenize(text).len()
    }
}

/// Whitespace-delimited words: the fertility baseline.
#[derive(Debug, Clone, Copy, Default)]
pub struct Whitespace;

impl TokenizerAdapter for Whitespace {
    fn name(&self) -> &str {
        "whitespace"
    }

    fn tokenize(&self, text: &str) -> Vec<String> {
        text.split_whitespace().map(str::to_string).collect()
    }

    fn count(&self, text: &str) -> usize {
        text.split_whitespace().count()
    }
}

/// One token per Unicode scalar, spaces included.
#[derive(Debug, Clone, Copy, Default)]
pub struct Chars;

impl TokenizerAdapter for Chars {
    fn name(&self) -> &str {
        "char"
    }

    fn tokenize(&self, text: &str) -> Vec<String> {
        text.chars().map(String::from).collect()
    }

    fn count(&self, text: &str) -> usize {
        text.chars().count()
    }
}

pub struct MorphPiece<'a>(pub &'a MorphPieceTokenizer);

impl TokenizerAdapter for MorphPiece<'_> {
    fn name(&self) -> &str {
        "morphpiece"
    }

    fn tokenize(&self, text: &str) -> Vec<String> {
        self.0.tokenize(text)
    }
}

/// Plain byte-level BPE, e.g. the internal model or published GPT-2 merges.
pub struct Bpe {
    name: String,
    model: BpeModel,
}

impl Bpe {
    pub fn new(name: impl Into<String>, model: BpeModel) -> Self {
        Self { name: name.into(), model }
    }
}

impl TokenizerAdapter for Bpe {
    fn name(&self) -> &str {
        &self.name
    }

    fn tokenize(&self, text: &str) -> Vec<String> {
        self.model.encode(text)
    }
}

/// Greedy longest-match WordPiece over a BERT-style `vocab.txt`.
pub struct WordPiece {
    vocab: HashSet<String>,
    lowercase: bool,
}

const UNK: &str = "[UNK]";
const MAX_WORD_CHARS: usize = 100;

impl WordPiece {
    pub fn new(vocab: HashSet<String>, lowercase: bool) -> Self {
        Self { vocab, lowercase }
    }

    /// One token per line.
    pub fn from_reader<R: BufRead>(input: R, lowercase: bool) -> std::io::Result<Self> {
        let mut vocab = HashSet::new();
        for line in input.lines() {
            let line = line?;
            let tok = line.trim_end_matches(['\r', '\n']);
            if !tok.is_empty() {
                vocab.insert(tok.to_string());
            }
        }
        Ok(Self::new(vocab, lowercase))
    }

    fn word_pieces(&self, word: &str, out: &mut Vec<String>) {
        let chars: Vec<char> = word.chars().collect();
        if chars.len() > MAX_WORD_CHARS {
            out.push(UNK.to_string());
            return;
        }
        let mut pieces = Vec::new();
        let mut start = 0;
        while start < chars.len() {
            let mut end = chars.len();
            let mut found = None;
            while start < end {
                let mut piece: String = chars[start..end].iter().collect();
                if start > 0 {
                    piece.insert_str(0, "##");
                }
                if self.vocab.contains(&piece) {
                    found = Some(piece);
                    break;
                }
                end -= 1;
            }
            match found {
                Some(p) => pieces.push(p),
                None => {
                    out.push(UNK.to_string());
                    return;
                }
            }
            start = end;
        }
        out.extend(pieces);
    }
}

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation() || c.general_category_group() == GeneralCategoryGroup::Punctuation
}

impl TokenizerAdapter for WordPiece {
    fn name(&self) -> &str {
        "wordpiece"
    }

    fn tokenize(&self, text: &str) -> Vec<String> {
        let text = if self.lowercase { text.to_lowercase() } else { text.to_string() };
        let mut out = Vec::new();
        for chunk in text.split_whitespace() {
            let mut word = String::new();
            for c in chunk.chars() {
                if is_punct(c) {
                    if !word.is_empty() {
                        self.word_pieces(&std::mem::take(&mut word), &mut out);
                    }
                    self.word_pieces(&c.to_string(), &mut out);
                } else {
                    word.push(c);
                }
            }
            if !word.is_empty() {
                self.word_pieces(&word, &mut out);
            }
        }
        out
    }
}
