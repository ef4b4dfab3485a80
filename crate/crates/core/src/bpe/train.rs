use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;

use super::{bytes, pretokenize, BpeError, BpeModel, BASE_SIZE};

/// Summary of a training run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrainStats {
    pub distinct_words: usize,
    pub excluded_pretokens: u64,
    pub merges: usize,
}

/// Count remapped pretokens over `docs`, dropping pretokens whose surface is
/// in `exclusion`. Documents are counted in parallel and the partial maps are
/// summed, so the result does not depend on how the work is split.
pub fn word_counts<S: AsRef<str> + Sync>(docs: &[S], exclusion: &HashSet<String>) -> (HashMap<String, u64>, u64) {
    docs.par_iter()
        .fold(
            || (HashMap::new(), 0u64),
            |(mut counts, mut excluded), doc| {
                for pt in pretokenize(doc.as_ref()) {
                    if exclusion.contains(&pt.text) {
                        excluded += 1;
                    } else {
                        *counts.entry(pt.remapped()).or_insert(0u64) += 1;
                    }
                }
                (counts, excluded)
            },
        )
        .reduce(
            || (HashMap::new(), 0),
            |(mut a, ea), (b, eb)| {
                for (w, c) in b {
                    *a.entry(w).or_insert(0) += c;
                }
                (a, ea + eb)
            },
        )
}

/// Train on raw documents. See [`train_from_counts`] for the merge loop.
pub fn train<S: AsRef<str> + Sync>(
    docs: &[S],
    target_size: usize,
    exclusion: &HashSet<String>,
) -> Result<(BpeModel, TrainStats), BpeError> {
    if target_size < BASE_SIZE {
        return Err(BpeError::TargetTooSmall(target_size));
    }
    let (counts, excluded) = word_counts(docs, exclusion);
    let (model, mut stats) = train_from_counts(&counts, target_size)?;
    stats.excluded_pretokens = excluded;
    Ok((model, stats))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Candidate {
    count: Reverse<u64>,
    merged: String,
    left: String,
    pair: (u32, u32),
}

/// Greedy merge loop over remapped word counts.
///
/// Each step merges the most frequent adjacent pair; ties go to the pair
/// whose merged token sorts first, then to the smaller left token. Stops when
/// the vocabulary reaches `target_size` or no pair occurs at least twice.
pub fn train_from_counts(counts: &HashMap<String, u64>, target_size: usize) -> Result<(BpeModel, TrainStats), BpeError> {
    if target_size < BASE_SIZE {
        return Err(BpeError::TargetTooSmall(target_size));
    }
    if counts.is_empty() {
        return Err(BpeError::EmptyEffectiveCorpus);
    }

    let mut sorted: Vec<(&String, u64)> = counts.iter().map(|(w, &c)| (w, c)).collect();
    sorted.sort();
    let mut words: Vec<Vec<u32>> = Vec::with_capacity(sorted.len());
    let mut freqs: Vec<u64> = Vec::with_capacity(sorted.len());
    for (w, c) in sorted {
        let symbols = w
            .chars()
            .map(|ch| bytes::char_to_byte(ch).map(u32::from).ok_or(BpeError::ForeignSymbol(ch)))
            .collect::<Result<Vec<_>, _>>()?;
        words.push(symbols);
        freqs.push(c);
    }

    let mut model = BpeModel::base();
    let mut pair_counts: HashMap<(u32, u32), u64> = HashMap::new();
    let mut occurs_in: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
    for (idx, word) in words.iter().enumerate() {
        for w in word.windows(2) {
            let pair = (w[0], w[1]);
            *pair_counts.entry(pair).or_insert(0) += freqs[idx];
            occurs_in.entry(pair).or_default().push(idx);
        }
    }
    let key = |model: &BpeModel, pair: (u32, u32), count: u64| {
        let tokens = model.tokens();
        let left = tokens[pair.0 as usize].clone();
        let merged = format!("{left}{}", tokens[pair.1 as usize]);
        Candidate { count: Reverse(count), merged, left, pair }
    };
    let mut queue: BTreeSet<Candidate> = pair_counts.iter().map(|(&p, &c)| key(&model, p, c)).collect();

    while model.vocab_size() < target_size {
        let Some(best) = queue.first() else { break };
        if best.count.0 < 2 {
            break;
        }
        let pair = best.pair;
        let out = model.push_merge(pair);

        let mut affected = occurs_in.remove(&pair).unwrap_or_default();
        affected.sort_unstable();
        affected.dedup();
        let mut delta: HashMap<(u32, u32), i64> = HashMap::new();
        for idx in affected {
            let word = &mut words[idx];
            if !word.windows(2).any(|w| (w[0], w[1]) == pair) {
                continue;
            }
            let freq = freqs[idx] as i64;
            for w in word.windows(2) {
                *delta.entry((w[0], w[1])).or_insert(0) -= freq;
            }
            merge_in_place(word, pair, out);
            for w in word.windows(2) {
                let p = (w[0], w[1]);
                *delta.entry(p).or_insert(0) += freq;
                occurs_in.entry(p).or_default().push(idx);
            }
        }
        for (p, d) in delta {
            if d == 0 {
                continue;
            }
            let old = pair_counts.get(&p).copied().unwrap_or(0);
            let new = (old as i64 + d) as u64;
            if old > 0 {
                queue.remove(&key(&model, p, old));
            }
            if new > 0 {
                queue.insert(key(&model, p, new));
                pair_counts.insert(p, new);
            } else {
                pair_counts.remove(&p);
            }
        }
    }

    let stats = TrainStats { distinct_words: words.len(), excluded_pretokens: 0, merges: model.num_merges() };
    Ok((model, stats))
}

/// Replace non-overlapping occurrences of `pair`, scanning left to right.
pub(crate) fn merge_in_place(word: &mut Vec<u32>, pair: (u32, u32), out: u32) {
    let mut write = 0;
    let mut read = 0;
    while read < word.len() {
        if read + 1 < word.len() && (word[read], word[read + 1]) == pair {
            word[write] = out;
            read += 2;
        } else {
            word[write] = word[read];
            read += 1;
        }
        write += 1;
    }
    word.truncate(write);
}
