//! Bundled mini data set: a hand-written morph table and a generated
//! corpus that exercises both tokenization paths.

use crate::artifacts::Artifacts;
use crate::morphtable::{ingest_reader, ColumnMap, MorphTable};

/// Canonical-format morph table.
pub const MORPHTABLE_TSV: &str = include_str!("../fixtures/morphtable.tsv");
/// One document per line.
pub const CORPUS: &str = include_str!("../fixtures/corpus.txt");
/// BPE size used for the bundled artifacts.
pub const BPE_SIZE: usize = 1000;

/// Reference segmentations the fixture table must reproduce.
pub const TABLE1: [(&str, &[&str]); 5] = [
    ("batting", &["bat", "#ing"]),
    ("disengage", &["dis#", "en#", "gage"]),
    ("archeologists", &["archaeo#", "#logy", "#ist", "#s"]),
    ("decompress", &["de#", "compress"]),
    ("photographers", &["photo#", "#graph", "#er", "#s"]),
];

/// The worked detokenization example.
pub const WORKED_STREAM: [&str; 7] = ["He", "Ġwas", "in#", "vestigate", "#ing", "diligent", "#ly"];

pub fn morph_table() -> MorphTable {
    ingest_reader(MORPHTABLE_TSV.as_bytes(), &ColumnMap::canonical()).expect("bundled morph table is well formed").0
}

pub fn corpus() -> Vec<&'static str> {
    CORPUS.lines().collect()
}

/// Artifacts built from the bundled table and corpus.
pub fn artifacts() -> Artifacts {
    Artifacts::build(morph_table(), &corpus(), BPE_SIZE).expect("bundled fixture builds").0
}
