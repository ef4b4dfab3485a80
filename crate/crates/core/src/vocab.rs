//! Unified id space over morph tokens, BPE tokens and specials.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use thiserror::Error;

use crate::morphtable::MARKER;

pub const END_OF_TEXT: &str = "<|endoftext|>";
/// Marks a lookup-path word that was not preceded by a space.
pub const NO_SPACE: &str = "<|nospace|>";

/// The default special tokens, in id order.
pub fn default_specials() -> Vec<String> {
    vec![END_OF_TEXT.to_string(), NO_SPACE.to_string()]
}

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("special token {0:?} also appears in a token source")]
    SpecialOverlap(String),
    #[error("line {line}: duplicate token {token:?}")]
    DuplicateToken { line: usize, token: String },
    #[error("line {line}: expected id {expected}, found {found}")]
    NonDenseIds { line: usize, expected: u32, found: u32 },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Where a token came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceTag {
    MorphAffix,
    MorphStem,
    Bpe,
    Shared,
    Special,
}

impl SourceTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceTag::MorphAffix => "morph-affix",
            SourceTag::MorphStem => "morph-stem",
            SourceTag::Bpe => "bpe",
            SourceTag::Shared => "shared",
            SourceTag::Special => "special",
        }
    }

    /// True for tokens the lookup path can emit.
    pub fn is_morph(self) -> bool {
        matches!(self, SourceTag::MorphAffix | SourceTag::MorphStem | SourceTag::Shared)
    }
}

impl fmt::Display for SourceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "morph-affix" => SourceTag::MorphAffix,
            "morph-stem" => SourceTag::MorphStem,
            "bpe" => SourceTag::Bpe,
            "shared" => SourceTag::Shared,
            "special" => SourceTag::Special,
            _ => return Err(format!("unknown source tag {s:?}")),
        })
    }
}

fn morph_tag(token: &str) -> SourceTag {
    if token.starts_with(MARKER) || token.ends_with(MARKER) {
        SourceTag::MorphAffix
    } else {
        SourceTag::MorphStem
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedVocabulary {
    tokens: Vec<String>,
    tags: Vec<SourceTag>,
    ids: HashMap<String, u32>,
}

/// Sizes behind a merge, for the accounting identity
/// `total = morph + bpe - overlap + specials`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MergeAccounting {
    pub morph: usize,
    pub bpe: usize,
    pub overlap: usize,
    pub specials: usize,
    pub total: usize,
}

impl MergedVocabulary {
    /// Ids run specials first, then morph tokens in sorted order, then the
    /// BPE tokens not already present, in BPE id order. A token present in
    /// both sources gets one id and the `Shared` tag.
    pub fn merge<S: AsRef<str>>(
        morph_tokens: &BTreeSet<String>,
        bpe_tokens: &[S],
        specials: &[String],
    ) -> Result<(Self, MergeAccounting), VocabError> {
        let bpe_set: HashSet<&str> = bpe_tokens.iter().map(AsRef::as_ref).collect();
        for s in specials {
            if morph_tokens.contains(s) || bpe_set.contains(s.as_str()) {
                return Err(VocabError::SpecialOverlap(s.clone()));
            }
        }
        let mut v = Self { tokens: Vec::new(), tags: Vec::new(), ids: HashMap::new() };
        for s in specials {
            v.push(s.clone(), SourceTag::Special);
        }
        let mut overlap = 0;
        for t in morph_tokens {
            let tag = if bpe_set.contains(t.as_str()) {
                overlap += 1;
                SourceTag::Shared
            } else {
                morph_tag(t)
            };
            v.push(t.clone(), tag);
        }
        for t in bpe_tokens {
            let t = t.as_ref();
            if !v.ids.contains_key(t) {
                v.push(t.to_string(), SourceTag::Bpe);
            }
        }
        let acct = MergeAccounting {
            morph: morph_tokens.len(),
            bpe: bpe_set.len(),
            overlap,
            specials: specials.len(),
            total: v.len(),
        };
        Ok((v, acct))
    }

    fn push(&mut self, token: String, tag: SourceTag) {
        self.ids.insert(token.clone(), self.tokens.len() as u32);
        self.tokens.push(token);
        self.tags.push(tag);
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn tag(&self, token: &str) -> Option<SourceTag> {
        self.id(token).map(|id| self.tags[id as usize])
    }

    pub fn contains(&self, token: &str) -> bool {
        self.ids.contains_key(token)
    }

    pub fn is_special(&self, token: &str) -> bool {
        self.tag(token) == Some(SourceTag::Special)
    }

    /// `(token, id, tag)` in id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u32, SourceTag)> + '_ {
        self.tokens.iter().zip(&self.tags).enumerate().map(|(i, (t, &g))| (t.as_str(), i as u32, g))
    }

    /// `token<TAB>id<TAB>source_tag`, sorted by id.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut buf = String::new();
        for (t, id, tag) in self.iter() {
            buf.push_str(&format!("{t}\t{id}\t{tag}\n"));
        }
        out.write_all(buf.as_bytes())
    }

    pub fn read_tsv<R: BufRead>(input: R) -> Result<Self, VocabError> {
        let mut v = Self { tokens: Vec::new(), tags: Vec::new(), ids: HashMap::new() };
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let malformed = |message: String| VocabError::Malformed { line: lineno, message };
            let cols: Vec<&str> = line.split('\t').collect();
            let [token, id, tag] = cols[..] else {
                return Err(malformed(format!("expected 3 tab-separated fields, got {}", cols.len())));
            };
            if token.is_empty() {
                return Err(malformed("empty token".into()));
            }
            let id: u32 = id.parse().map_err(|_| malformed(format!("bad id {id:?}")))?;
            let tag: SourceTag = tag.parse().map_err(malformed)?;
            let expected = v.tokens.len() as u32;
            if id != expected {
                return Err(VocabError::NonDenseIds { line: lineno, expected, found: id });
            }
            if v.ids.contains_key(token) {
                return Err(VocabError::DuplicateToken { line: lineno, token: token.to_string() });
            }
            v.push(token.to_string(), tag);
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn disjoint_sources() {
        let (v, acct) = MergedVocabulary::merge(&set(&["x#", "#y", "z"]), &["a", "b", "c", "d"], &[]).unwrap();
        assert_eq!(v.len(), 7);
        assert_eq!(acct.overlap, 0);
    }

    #[test]
    fn shared_token_gets_one_id() {
        let (v, acct) = MergedVocabulary::merge(&set(&["a", "b#"]), &["a", "c"], &[END_OF_TEXT.to_string()]).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(acct, MergeAccounting { morph: 2, bpe: 2, overlap: 1, specials: 1, total: 4 });
        assert_eq!(v.tag("a"), Some(SourceTag::Shared));
        assert_eq!(v.tag("b#"), Some(SourceTag::MorphAffix));
        assert_eq!(v.tag("c"), Some(SourceTag::Bpe));
        let order: Vec<&str> = v.iter().map(|(t, _, _)| t).collect();
        assert_eq!(order, [END_OF_TEXT, "a", "b#", "c"]);
    }

    #[test]
    fn specials_must_be_disjoint() {
        let err = MergedVocabulary::merge(&set(&["<|endoftext|>"]), &["a"], &default_specials()).unwrap_err();
        assert!(matches!(err, VocabError::SpecialOverlap(_)));
    }

    #[test]
    fn tsv_round_trip_is_byte_exact() {
        let (v, _) = MergedVocabulary::merge(&set(&["de#", "compress"]), &["a", "Ġb"], &default_specials()).unwrap();
        let mut buf = Vec::new();
        v.write_tsv(&mut buf).unwrap();
        let back = MergedVocabulary::read_tsv(&buf[..]).unwrap();
        assert_eq!(back, v);
        let mut again = Vec::new();
        back.write_tsv(&mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn hand_built_file() {
        let src = "<|endoftext|>\t0\tspecial\nde#\t1\tmorph-affix\ncompress\t2\tmorph-stem\na\t3\tshared\nĠb\t4\tbpe\n";
        let v = MergedVocabulary::read_tsv(src.as_bytes()).unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(v.id("compress"), Some(2));
        assert_eq!(v.token(4), Some("Ġb"));
        assert_eq!(v.tag("a"), Some(SourceTag::Shared));
        assert!(v.is_special(END_OF_TEXT));
    }

    #[test]
    fn read_errors() {
        let dup = "a\t0\tbpe\na\t1\tbpe\n";
        assert!(matches!(MergedVocabulary::read_tsv(dup.as_bytes()), Err(VocabError::DuplicateToken { line: 2, .. })));
        let gap = "a\t0\tbpe\nb\t2\tbpe\n";
        assert!(matches!(MergedVocabulary::read_tsv(gap.as_bytes()), Err(VocabError::NonDenseIds { line: 2, .. })));
        let bad = "a\t0\n";
        assert!(matches!(MergedVocabulary::read_tsv(bad.as_bytes()), Err(VocabError::Malformed { line: 1, .. })));
    }
}
