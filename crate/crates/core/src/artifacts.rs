//! The on-disk artifact set: morph table, BPE model, merged vocabulary.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::bpe::{self, BpeError, BpeModel, TrainStats};
use crate::detokenizer::Detokenizer;
use crate::morphtable::{MorphTable, MorphTableError};
use crate::tokenizer::{MorphPieceTokenizer, TokenizerConfig, TokenizerError};
use crate::vocab::{default_specials, MergeAccounting, MergedVocabulary, VocabError};

pub const MORPHTABLE_FILE: &str = "morphtable.tsv";
pub const BPE_MERGES_FILE: &str = "bpe.merges";
pub const BPE_VOCAB_FILE: &str = "bpe.vocab";
pub const VOCAB_FILE: &str = "vocab.tsv";

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    MorphTable { path: PathBuf, source: MorphTableError },
    #[error("{path}: {source}")]
    Bpe { path: PathBuf, source: BpeError },
    #[error("{path}: {source}")]
    Vocab { path: PathBuf, source: VocabError },
    #[error(transparent)]
    Train(#[from] BpeError),
    #[error(transparent)]
    Merge(#[from] VocabError),
    #[error(transparent)]
    Tokenizer(#[from] TokenizerError),
}

fn open(path: &Path) -> Result<BufReader<File>, ArtifactError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| ArtifactError::Io { path: path.to_path_buf(), source })
}

/// Write through a buffered file, mapping errors to the path.
pub fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), ArtifactError> {
    let io = |source| ArtifactError::Io { path: path.to_path_buf(), source };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    f(&mut w).map_err(io)?;
    w.flush().map_err(io)
}

pub fn read_morphtable(path: &Path) -> Result<MorphTable, ArtifactError> {
    MorphTable::read_tsv(open(path)?).map_err(|source| ArtifactError::MorphTable { path: path.to_path_buf(), source })
}

pub fn read_bpe(path: &Path) -> Result<BpeModel, ArtifactError> {
    BpeModel::read_merges(open(path)?).map_err(|source| ArtifactError::Bpe { path: path.to_path_buf(), source })
}

pub fn read_vocab(path: &Path) -> Result<MergedVocabulary, ArtifactError> {
    MergedVocabulary::read_tsv(open(path)?).map_err(|source| ArtifactError::Vocab { path: path.to_path_buf(), source })
}

/// Surfaces kept out of BPE training.
pub fn exclusion_set(table: &MorphTable) -> HashSet<String> {
    table.entries().map(|e| e.surface().to_string()).collect()
}

#[derive(Debug, Clone)]
pub struct Artifacts {
    pub table: MorphTable,
    pub bpe: BpeModel,
    pub vocab: MergedVocabulary,
}

#[derive(Debug, Clone)]
pub struct BuildReport {
    pub train: TrainStats,
    pub accounting: MergeAccounting,
}

impl Artifacts {
    /// Train BPE on `docs` with the table's words excluded, then merge.
    pub fn build<S: AsRef<str> + Sync>(table: MorphTable, docs: &[S], bpe_size: usize) -> Result<(Self, BuildReport), ArtifactError> {
        let (bpe, train) = bpe::train(docs, bpe_size, &exclusion_set(&table))?;
        let (artifacts, accounting) = Self::from_parts(table, bpe)?;
        Ok((artifacts, BuildReport { train, accounting }))
    }

    pub fn from_parts(table: MorphTable, bpe: BpeModel) -> Result<(Self, MergeAccounting), ArtifactError> {
        let (vocab, accounting) = MergedVocabulary::merge(&table.token_set(), bpe.tokens(), &default_specials())?;
        Ok((Self { table, bpe, vocab }, accounting))
    }

    pub fn write_dir(&self, dir: &Path) -> Result<(), ArtifactError> {
        std::fs::create_dir_all(dir).map_err(|source| ArtifactError::Io { path: dir.to_path_buf(), source })?;
        write_file(&dir.join(MORPHTABLE_FILE), |w| self.table.write_tsv(w))?;
        write_file(&dir.join(BPE_MERGES_FILE), |w| self.bpe.write_merges(w))?;
        write_file(&dir.join(BPE_VOCAB_FILE), |w| self.bpe.write_vocab(w))?;
        write_file(&dir.join(VOCAB_FILE), |w| self.vocab.write_tsv(w))
    }

    pub fn load_dir(dir: &Path) -> Result<Self, ArtifactError> {
        Ok(Self {
            table: read_morphtable(&dir.join(MORPHTABLE_FILE))?,
            bpe: read_bpe(&dir.join(BPE_MERGES_FILE))?,
            vocab: read_vocab(&dir.join(VOCAB_FILE))?,
        })
    }

    pub fn tokenizer(&self, config: TokenizerConfig) -> Result<MorphPieceTokenizer, ArtifactError> {
        Ok(MorphPieceTokenizer::new(self.table.clone(), self.bpe.clone(), self.vocab.clone(), config)?)
    }

    pub fn detokenizer(&self) -> Detokenizer {
        Detokenizer::new(self.vocab.clone(), self.table.build_reverse())
    }
}
