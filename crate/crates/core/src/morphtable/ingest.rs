//! Tab-separated morphology ingestion.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::{insert_preferred, MorphEntry, MorphTable, MorphTableError, Morpheme, Role, HASH};

/// How the segmentation column encodes morphemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentationFormat {
    /// Comma-separated `text:role` items in word order, plus bare `#` for a
    /// compound break. The stem column (may be empty) is inserted after the
    /// leading prefixes.
    Canonical,
    /// `stem|suffix|suffix` (MorphyNet inflectional files).
    PipeSuffixes,
    /// A single affix whose type (`prefix`/`suffix`) sits in `role_column`,
    /// attached to the stem column (MorphyNet derivational files).
    TypedAffix { role_column: usize },
}

/// Which columns hold what.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnMap {
    pub surface: usize,
    pub stem: Option<usize>,
    pub segmentation: usize,
    pub format: SegmentationFormat,
}

impl ColumnMap {
    /// `surface<TAB>stem<TAB>morpheme:role(,morpheme:role)*`
    pub const fn canonical() -> Self {
        Self { surface: 0, stem: Some(1), segmentation: 2, format: SegmentationFormat::Canonical }
    }

    /// `lemma<TAB>form<TAB>features<TAB>seg|ment|ation`
    pub const fn morphynet_inflectional() -> Self {
        Self { surface: 1, stem: None, segmentation: 3, format: SegmentationFormat::PipeSuffixes }
    }

    /// `source<TAB>target<TAB>src_pos<TAB>tgt_pos<TAB>affix<TAB>type`
    pub const fn morphynet_derivational() -> Self {
        Self { surface: 1, stem: Some(0), segmentation: 4, format: SegmentationFormat::TypedAffix { role_column: 5 } }
    }

    fn max_column(&self) -> usize {
        let role = match self.format {
            SegmentationFormat::TypedAffix { role_column } => role_column,
            _ => 0,
        };
        self.surface.max(self.stem.unwrap_or(0)).max(self.segmentation).max(role)
    }

    fn parse(&self, cols: &[&str]) -> Result<MorphEntry, String> {
        let surface = cols[self.surface].trim();
        let stem = self.stem.map(|c| cols[c].trim()).filter(|s| !s.is_empty());
        let seg = cols[self.segmentation].trim();
        let (morphemes, breaks) = match self.format {
            SegmentationFormat::Canonical => parse_canonical(stem, seg)?,
            SegmentationFormat::PipeSuffixes => {
                let mut parts = seg.split('|').map(str::trim);
                let head = parts.next().filter(|s| !s.is_empty()).ok_or("empty segmentation")?;
                let mut ms = vec![Morpheme::new(head, Role::Stem)];
                ms.extend(parts.map(|p| Morpheme::new(p, Role::Suffix)));
                stem_breaks(ms)
            }
            SegmentationFormat::TypedAffix { role_column } => {
                let stem = stem.ok_or("missing stem")?;
                let ms = match Role::parse(cols[role_column].trim()) {
                    Some(Role::Prefix) => vec![Morpheme::new(seg, Role::Prefix), Morpheme::new(stem, Role::Stem)],
                    Some(Role::Suffix) => vec![Morpheme::new(stem, Role::Stem), Morpheme::new(seg, Role::Suffix)],
                    _ => return Err(format!("unknown affix type {:?}", cols[role_column])),
                };
                stem_breaks(ms)
            }
        };
        MorphEntry::new(surface, morphemes, breaks).map_err(|e| e.to_string())
    }
}

/// Breaks between every pair of consecutive stems.
fn stem_breaks(ms: Vec<Morpheme>) -> (Vec<Morpheme>, BTreeSet<usize>) {
    let breaks = (1..ms.len()).filter(|&i| ms[i - 1].role == Role::Stem && ms[i].role == Role::Stem).collect();
    (ms, breaks)
}

fn parse_canonical(stem: Option<&str>, seg: &str) -> Result<(Vec<Morpheme>, BTreeSet<usize>), String> {
    let mut morphemes = Vec::new();
    let mut breaks = BTreeSet::new();
    let mut stem = stem;
    for item in seg.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item == HASH {
            if let Some(s) = stem.take() {
                morphemes.push(Morpheme::new(s, Role::Stem));
            }
            breaks.insert(morphemes.len());
            continue;
        }
        let (text, role) = item.rsplit_once(':').ok_or_else(|| format!("item {item:?} lacks a role"))?;
        let role = Role::parse(role).ok_or_else(|| format!("unknown role in {item:?}"))?;
        if role != Role::Prefix {
            if let Some(s) = stem.take() {
                morphemes.push(Morpheme::new(s, Role::Stem));
            }
        }
        morphemes.push(Morpheme::new(text, role));
    }
    if let Some(s) = stem {
        morphemes.push(Morpheme::new(s, Role::Stem));
    }
    Ok((morphemes, breaks))
}

/// Per-source ingestion counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub records: usize,
    pub skipped_malformed: usize,
    /// Records whose surface was already present (whichever one won).
    pub duplicates: usize,
    /// First few malformed lines as `(line, reason)`.
    pub examples: Vec<(usize, String)>,
}

const MAX_EXAMPLES: usize = 5;

/// Accumulates records from one or more sources.
#[derive(Debug, Default)]
pub struct MorphTableBuilder {
    entries: BTreeMap<String, MorphEntry>,
}

impl MorphTableBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_file(&mut self, path: impl AsRef<Path>, map: &ColumnMap) -> Result<IngestReport, MorphTableError> {
        let file = File::open(path)?;
        self.add_reader(BufReader::new(file), map)
    }

    pub fn add_reader<R: BufRead>(&mut self, input: R, map: &ColumnMap) -> Result<IngestReport, MorphTableError> {
        let mut report = IngestReport::default();
        let needed = map.max_column() + 1;
        let mut widest = 0;
        let mut short_lines = 0;
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            widest = widest.max(cols.len());
            let parsed = if cols.len() < needed {
                short_lines += 1;
                Err(format!("expected at least {needed} columns, found {}", cols.len()))
            } else {
                map.parse(&cols)
            };
            match parsed {
                Ok(entry) => {
                    report.records += 1;
                    if self.entries.contains_key(entry.surface()) {
                        report.duplicates += 1;
                    }
                    insert_preferred(&mut self.entries, entry);
                }
                Err(reason) => {
                    report.skipped_malformed += 1;
                    if report.examples.len() < MAX_EXAMPLES {
                        report.examples.push((i + 1, reason));
                    }
                }
            }
        }
        if short_lines > 0 && short_lines == report.skipped_malformed && report.records == 0 {
            return Err(MorphTableError::ColumnOutOfRange { column: needed - 1, max_seen: widest });
        }
        Ok(report)
    }

    pub fn finish(self) -> Result<MorphTable, MorphTableError> {
        if self.entries.is_empty() {
            return Err(MorphTableError::ZeroValidRecords);
        }
        Ok(MorphTable::from_map(self.entries))
    }
}

/// Ingest a single source file.
pub fn ingest(path: impl AsRef<Path>, map: &ColumnMap) -> Result<(MorphTable, IngestReport), MorphTableError> {
    let mut b = MorphTableBuilder::new();
    let report = b.add_file(path, map)?;
    Ok((b.finish()?, report))
}

/// Ingest from any reader.
pub fn ingest_reader<R: BufRead>(input: R, map: &ColumnMap) -> Result<(MorphTable, IngestReport), MorphTableError> {
    let mut b = MorphTableBuilder::new();
    let report = b.add_reader(input, map)?;
    Ok((b.finish()?, report))
}
