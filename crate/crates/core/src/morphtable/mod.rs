//! Morpheme lookup table: surface word -> ordered morpheme sequence.
//!
//! Affixes render with a `#` on their attachment side (`de#`, `#ing`), stems
//! render bare, and a standalone `#` separates the stems of a compound.

mod ingest;
mod reverse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, Write};

use thiserror::Error;

pub use ingest::{ingest, ingest_reader, ColumnMap, IngestReport, MorphTableBuilder, SegmentationFormat};
pub use reverse::{Collision, ReverseMorphTable};

/// Marker character for affixes and the compound separator token.
pub const MARKER: char = '#';
/// The compound separator token.
pub const HASH: &str = "#";

#[derive(Debug, Error)]
pub enum MorphTableError {
    #[error("invalid entry for {surface:?}: {reason}")]
    InvalidEntry { surface: String, reason: String },
    #[error("column map references column {column}, but no line has more than {max_seen} columns")]
    ColumnOutOfRange { column: usize, max_seen: usize },
    #[error("no valid records found")]
    ZeroValidRecords,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Prefix,
    Stem,
    Suffix,
}

impl Role {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "prefix" => Some(Role::Prefix),
            "stem" | "root" => Some(Role::Stem),
            "suffix" => Some(Role::Suffix),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Morpheme {
    pub text: String,
    pub role: Role,
}

impl Morpheme {
    pub fn new(text: impl Into<String>, role: Role) -> Self {
        Self { text: text.into(), role }
    }

    pub fn render(&self) -> String {
        match self.role {
            Role::Prefix => format!("{}{MARKER}", self.text),
            Role::Suffix => format!("{MARKER}{}", self.text),
            Role::Stem => self.text.clone(),
        }
    }

    /// Parse a rendered token back into a morpheme. `#` alone is not a
    /// morpheme and yields `None`.
    pub fn from_rendered(token: &str) -> Option<Self> {
        let m = match (token.strip_prefix(MARKER), token.strip_suffix(MARKER)) {
            (Some(_), Some(_)) => return None,
            (Some(text), None) => Morpheme::new(text, Role::Suffix),
            (None, Some(text)) => Morpheme::new(text, Role::Prefix),
            (None, None) => Morpheme::new(token, Role::Stem),
        };
        valid_text(&m.text).then_some(m)
    }
}

impl fmt::Display for Morpheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn valid_text(s: &str) -> bool {
    !s.is_empty() && !s.contains(MARKER) && !s.chars().any(char::is_whitespace)
}

/// One word and its segmentation.
///
/// Morpheme texts need not concatenate to the surface (`batting` -> `bat`,
/// `#ing`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphEntry {
    surface: String,
    morphemes: Vec<Morpheme>,
    /// Index `i` means a separator sits between morphemes `i - 1` and `i`.
    compound_breaks: BTreeSet<usize>,
    rendered: Vec<String>,
}

impl MorphEntry {
    pub fn new(
        surface: impl Into<String>,
        morphemes: Vec<Morpheme>,
        compound_breaks: BTreeSet<usize>,
    ) -> Result<Self, MorphTableError> {
        let surface = surface.into();
        let invalid = |reason: String| MorphTableError::InvalidEntry { surface: surface.clone(), reason };
        if surface.is_empty() || surface.chars().any(char::is_whitespace) {
            return Err(invalid("surface must be a non-empty word without whitespace".into()));
        }
        if morphemes.len() < 2 {
            return Err(invalid(format!("needs at least 2 morphemes, got {}", morphemes.len())));
        }
        if let Some(m) = morphemes.iter().find(|m| !valid_text(&m.text)) {
            return Err(invalid(format!("bad morpheme text {:?}", m.text)));
        }
        for &b in &compound_breaks {
            let between_stems = b > 0
                && b < morphemes.len()
                && morphemes[b - 1].role == Role::Stem
                && morphemes[b].role == Role::Stem;
            if !between_stems {
                return Err(invalid(format!("compound break at {b} is not between two stems")));
            }
        }
        let mut rendered = Vec::with_capacity(morphemes.len() + compound_breaks.len());
        for (i, m) in morphemes.iter().enumerate() {
            if compound_breaks.contains(&i) {
                rendered.push(HASH.to_string());
            }
            rendered.push(m.render());
        }
        Ok(Self { surface, morphemes, compound_breaks, rendered })
    }

    /// Parse a rendered token sequence (as written in the table file).
    pub fn from_rendered<S: AsRef<str>>(surface: &str, tokens: &[S]) -> Result<Self, MorphTableError> {
        let mut morphemes = Vec::new();
        let mut breaks = BTreeSet::new();
        for t in tokens {
            let t = t.as_ref();
            if t == HASH {
                breaks.insert(morphemes.len());
            } else {
                let m = Morpheme::from_rendered(t).ok_or_else(|| MorphTableError::InvalidEntry {
                    surface: surface.to_string(),
                    reason: format!("bad rendered morpheme {t:?}"),
                })?;
                morphemes.push(m);
            }
        }
        Self::new(surface, morphemes, breaks)
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn morphemes(&self) -> &[Morpheme] {
        &self.morphemes
    }

    pub fn compound_breaks(&self) -> &BTreeSet<usize> {
        &self.compound_breaks
    }

    /// Rendered tokens with compound separators inserted.
    pub fn rendered(&self) -> &[String] {
        &self.rendered
    }

    /// Duplicate-resolution order: fewer morphemes first, then the smaller
    /// rendered sequence.
    fn preferred_over(&self, other: &MorphEntry) -> bool {
        (self.morphemes.len(), &self.rendered) < (other.morphemes.len(), &other.rendered)
    }
}

/// Forward lookup table plus the morpheme inventory and slot counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MorphTable {
    entries: BTreeMap<String, MorphEntry>,
    counts: BTreeMap<String, u64>,
}

impl MorphTable {
    /// Build from entries; duplicate surfaces keep the preferred segmentation.
    pub fn from_entries(entries: impl IntoIterator<Item = MorphEntry>) -> Self {
        let mut map: BTreeMap<String, MorphEntry> = BTreeMap::new();
        for e in entries {
            insert_preferred(&mut map, e);
        }
        Self::from_map(map)
    }

    fn from_map(entries: BTreeMap<String, MorphEntry>) -> Self {
        let mut counts = BTreeMap::new();
        for e in entries.values() {
            for m in &e.morphemes {
                *counts.entry(m.render()).or_insert(0) += 1;
            }
        }
        Self { entries, counts }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl ExactSizeIterator<Item = &MorphEntry> + '_ {
        self.entries.values()
    }

    pub fn get(&self, surface: &str) -> Option<&MorphEntry> {
        self.entries.get(surface)
    }

    /// Rendered morpheme sequence for an exact surface match.
    pub fn lookup(&self, word: &str) -> Option<&[String]> {
        self.entries.get(word).map(|e| e.rendered())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    /// Rendered morphemes, sorted.
    pub fn inventory(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.counts.keys().map(String::as_str)
    }

    /// Number of entry slots holding each rendered morpheme.
    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    /// Every token the lookup path can emit: the inventory, plus the
    /// compound separator when any entry uses it.
    pub fn token_set(&self) -> BTreeSet<String> {
        let mut set: BTreeSet<String> = self.counts.keys().cloned().collect();
        if self.entries.values().any(|e| !e.compound_breaks.is_empty()) {
            set.insert(HASH.to_string());
        }
        set
    }

    /// Drop every entry holding a morpheme whose count in this table is
    /// below `min_count`, then recount over the survivors. A `min_count` of
    /// zero behaves like one.
    pub fn trim(&self, min_count: u64) -> MorphTable {
        let kept = self
            .entries
            .iter()
            .filter(|(_, e)| e.morphemes.iter().all(|m| self.counts.get(&m.render()).copied().unwrap_or(0) >= min_count))
            .map(|(k, e)| (k.clone(), e.clone()))
            .collect();
        Self::from_map(kept)
    }

    /// Entry count per segmentation length.
    pub fn morph_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for e in self.entries.values() {
            *h.entry(e.morphemes.len()).or_insert(0) += 1;
        }
        h
    }

    pub fn build_reverse(&self) -> ReverseMorphTable {
        ReverseMorphTable::build(self)
    }

    /// `surface<TAB>tok tok ...` per line, sorted by surface.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut buf = String::new();
        for e in self.entries.values() {
            buf.push_str(&e.surface);
            buf.push('\t');
            buf.push_str(&e.rendered.join(" "));
            buf.push('\n');
        }
        out.write_all(buf.as_bytes())
    }

    pub fn read_tsv<R: BufRead>(input: R) -> Result<Self, MorphTableError> {
        let mut map = BTreeMap::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| MorphTableError::Parse { line: i + 1, message };
            let (surface, seq) = line.split_once('\t').ok_or_else(|| parse_err("missing tab".into()))?;
            let tokens: Vec<&str> = seq.split(' ').collect();
            let entry = MorphEntry::from_rendered(surface, &tokens).map_err(|e| parse_err(e.to_string()))?;
            if map.insert(surface.to_string(), entry).is_some() {
                return Err(parse_err(format!("duplicate surface {surface:?}")));
            }
        }
        Ok(Self::from_map(map))
    }
}

fn insert_preferred(map: &mut BTreeMap<String, MorphEntry>, e: MorphEntry) -> bool {
    match map.get(&e.surface) {
        Some(existing) if !e.preferred_over(existing) => false,
        _ => {
            map.insert(e.surface.clone(), e);
            true
        }
    }
}
