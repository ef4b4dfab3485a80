//! GPT-2 style pre-tokenization.
//!
//! Hand-rolled scanner equivalent to the published pattern
//!
//! ```text
//! 's|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+
//! ```
//!
//! A single ASCII space in front of a letter, number or symbol run is
//! absorbed into that pretoken and recorded as `had_leading_space`.

use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

use super::bytes;

const CONTRACTIONS: [&str; 7] = ["'s", "'t", "'re", "'ve", "'m", "'ll", "'d"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Letter,
    Number,
    Space,
    Other,
}

fn class(c: char) -> Class {
    if c.is_whitespace() {
        return Class::Space;
    }
    match c.general_category_group() {
        GeneralCategoryGroup::Letter => Class::Letter,
        GeneralCategoryGroup::Number => Class::Number,
        _ => Class::Other,
    }
}

/// One pre-tokenization unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pretoken {
    /// Surface text with the absorbed leading space removed.
    pub text: String,
    pub had_leading_space: bool,
}

impl Pretoken {
    pub fn new(text: impl Into<String>, had_leading_space: bool) -> Self {
        Self { text: text.into(), had_leading_space }
    }

    /// Original slice of the input this pretoken covers.
    pub fn original(&self) -> String {
        if self.had_leading_space {
            format!(" {}", self.text)
        } else {
            self.text.clone()
        }
    }

    /// Byte-remapped form, with the space marker when a space was absorbed.
    pub fn remapped(&self) -> String {
        let mut out = String::with_capacity(self.text.len() + 2);
        if self.had_leading_space {
            out.push(bytes::SPACE_MARKER);
        }
        out.extend(self.text.bytes().map(bytes::byte_to_char));
        out
    }

    /// True when the surface is a non-empty run of letters.
    pub fn is_word(&self) -> bool {
        !self.text.is_empty() && self.text.chars().all(|c| class(c) == Class::Letter)
    }
}

/// Split `text` into pretokens. Concatenating [`Pretoken::original`] over the
/// result reproduces `text`.
pub fn pretokenize(text: &str) -> Vec<Pretoken> {
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < text.len() {
        let end = match_at(text, pos);
        debug_assert!(end > pos);
        let piece = &text[pos..end];
        match piece.strip_prefix(' ') {
            Some(rest) if !rest.is_empty() && class(rest.chars().next().unwrap_or(' ')) != Class::Space => {
                out.push(Pretoken::new(rest, true));
            }
            _ => out.push(Pretoken::new(piece, false)),
        }
        pos = end;
    }
    out
}

/// Iterator over the original slices, for callers that only need the spans.
pub fn split_spans(text: &str) -> impl Iterator<Item = &str> + '_ {
    let mut pos = 0;
    std::iter::from_fn(move || {
        if pos >= text.len() {
            return None;
        }
        let end = match_at(text, pos);
        let span = &text[pos..end];
        pos = end;
        Some(span)
    })
}

/// End byte offset of the leftmost-first match starting at `pos`.
fn match_at(text: &str, pos: usize) -> usize {
    let rest = &text[pos..];
    if let Some(c) = CONTRACTIONS.iter().find(|c| rest.starts_with(**c)) {
        return pos + c.len();
    }

    let mut chars = rest.chars();
    let first = chars.next().expect("pos is inside text");
    let (run_start, run_class) = if first == ' ' {
        match chars.next().map(class) {
            Some(cl @ (Class::Letter | Class::Number | Class::Other)) => (1, cl),
            _ => (0, Class::Space),
        }
    } else {
        (0, class(first))
    };

    if run_class != Class::Space {
        return pos + run_start + run_len(&rest[run_start..], run_class);
    }

    // Whitespace: take the run, but leave its last character for the next
    // pretoken when non-space text follows (`\s+(?!\S)`), unless that would
    // leave nothing (`\s+`).
    let ws_len = run_len(rest, Class::Space);
    let followed_by_text = ws_len < rest.len();
    if followed_by_text {
        let last = rest[..ws_len].chars().next_back().expect("non-empty run");
        let trimmed = ws_len - last.len_utf8();
        if trimmed > 0 {
            return pos + trimmed;
        }
    }
    pos + ws_len
}

fn run_len(s: &str, cl: Class) -> usize {
    s.char_indices().find(|&(_, c)| class(c) != cl).map_or(s.len(), |(i, _)| i)
}
