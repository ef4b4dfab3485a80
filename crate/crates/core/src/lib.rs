//! Morphology-aware subword tokenization.
//!
//! Words found in a morpheme lookup table are emitted as their morphemes
//! (`batting` -> `bat #ing`); everything else goes through byte-level BPE
//! trained with those words excluded. A detokenizer reverses the process.

pub mod analysis;
pub mod artifacts;
pub mod bpe;
pub mod detokenizer;
pub mod fixtures;
pub mod morphtable;
pub mod selftest;
pub mod tokenizer;
pub mod vocab;

pub use artifacts::{ArtifactError, Artifacts};
pub use bpe::{BpeError, BpeModel, Pretoken};
pub use detokenizer::{DetokenizeError, Detokenized, Detokenizer, GroupKind, TokenLabel, WordGroup};
pub use morphtable::{MorphEntry, MorphTable, MorphTableError, Morpheme, ReverseMorphTable, Role};
pub use tokenizer::{CasePolicy, EncodedSequence, Handler, MorphPieceTokenizer, TokenizerConfig, TokenizerError};
pub use vocab::{MergedVocabulary, SourceTag, VocabError};
