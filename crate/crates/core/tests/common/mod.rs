//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use fancy_regex::Regex;
use morphpiece::bpe::{bytes, pretokenize};

/// The published GPT-2 pre-tokenization pattern.
pub const GPT2_PATTERN: &str = r"'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+";

pub fn regex_spans(text: &str) -> Vec<String> {
    let re = Regex::new(GPT2_PATTERN).unwrap();
    re.find_iter(text).map(|m| m.unwrap().as_str().to_string()).collect()
}

/// Remapped symbol sequences with counts, excluded surfaces removed.
fn oracle_words(docs: &[&str], exclusion: &HashSet<String>) -> Vec<(Vec<String>, u64)> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for d in docs {
        for pt in pretokenize(d) {
            if !exclusion.contains(&pt.text) {
                *counts.entry(pt.remapped()).or_default() += 1;
            }
        }
    }
    let mut words: Vec<(Vec<String>, u64)> = counts.into_iter().map(|(w, c)| (w.chars().map(String::from).collect(), c)).collect();
    words.sort();
    words
}

/// Brute-force trainer: recount every pair from scratch each iteration.
pub fn oracle_train(docs: &[&str], target: usize, exclusion: &HashSet<String>) -> Vec<(String, String)> {
    let mut words = oracle_words(docs, exclusion);
    let mut known: HashSet<String> = (0..=255u8).map(|b| bytes::byte_to_char(b).to_string()).collect();
    let mut merges: Vec<(String, String)> = Vec::new();
    while known.len() < target {
        let mut pairs: HashMap<(String, String), u64> = HashMap::new();
        for (w, c) in &words {
            for i in 1..w.len() {
                *pairs.entry((w[i - 1].clone(), w[i].clone())).or_default() += c;
            }
        }
        // Highest count; ties to the smaller merged token, then smaller left.
        let Some(((l, r), n)) = pairs.into_iter().min_by(|(pa, ca), (pb, cb)| {
            cb.cmp(ca)
                .then_with(|| format!("{}{}", pa.0, pa.1).cmp(&format!("{}{}", pb.0, pb.1)))
                .then_with(|| pa.0.cmp(&pb.0))
        }) else {
            break;
        };
        if n < 2 {
            break;
        }
        let merged = format!("{l}{r}");
        for (w, _) in words.iter_mut() {
            let mut out = Vec::with_capacity(w.len());
            let mut i = 0;
            while i < w.len() {
                if i + 1 < w.len() && w[i] == l && w[i + 1] == r {
                    out.push(merged.clone());
                    i += 2;
                } else {
                    out.push(w[i].clone());
                    i += 1;
                }
            }
            *w = out;
        }
        if !merges.contains(&(l.clone(), r.clone())) {
            merges.push((l, r));
        }
        known.insert(merged);
    }
    merges
}

/// Brute-force encoder: repeatedly find the lowest-ranked adjacent pair by
/// scanning the merge list, merge every occurrence, repeat.
pub fn oracle_encode_symbols(symbols: &str, merges: &[(String, String)]) -> Vec<String> {
    let mut w: Vec<String> = symbols.chars().map(String::from).collect();
    loop {
        let found = merges.iter().find(|(l, r)| w.windows(2).any(|p| &p[0] == l && &p[1] == r));
        let Some((l, r)) = found else { return w };
        let mut out = Vec::with_capacity(w.len());
        let mut i = 0;
        while i < w.len() {
            if i + 1 < w.len() && &w[i] == l && &w[i + 1] == r {
                out.push(format!("{l}{r}"));
                i += 2;
            } else {
                out.push(w[i].clone());
                i += 1;
            }
        }
        w = out;
    }
}

/// Oracle count of entry slots per rendered morpheme.
pub fn recount(table: &morphpiece::MorphTable) -> std::collections::BTreeMap<String, u64> {
    let mut c = std::collections::BTreeMap::new();
    for e in table.entries() {
        for m in e.morphemes() {
            *c.entry(m.render()).or_insert(0) += 1;
        }
    }
    c
}

/// Table words whose reverse lookup gives back the same surface.
pub fn round_trip_words(table: &morphpiece::MorphTable) -> Vec<String> {
    let rt = table.build_reverse();
    table.entries().filter(|e| rt.get(e.rendered()) == Some(e.surface())).map(|e| e.surface().to_string()).collect()
}

/// Text pieces that go down the BPE path: punctuation, digits, mixed
/// scripts, odd whitespace.
pub const NOISE: &[&str] = &[
    "the", "was", "you", "He", "zxqv", "Batting", "42", "3.14", ",", ".", "!", "?", "'s", "'t", "(", ")", "\"", "``", "''", "-",
    "é", "中文", "naïve", "\t", "\n", "  ", " \n ", "😀", "über", "x", "a", "I'm", "don't",
];

pub const SEPARATORS: &[&str] = &[" ", " ", " ", "", "  ", "\n", ", ", "-", "\t"];

/// Build a sentence from index choices, so both proptest and seeded RNGs
/// can drive it.
pub fn sentence(words: &[String], picks: &[(bool, usize, usize)]) -> String {
    let mut s = String::new();
    for (i, &(morph, w, sep)) in picks.iter().enumerate() {
        if i > 0 {
            s.push_str(SEPARATORS[sep % SEPARATORS.len()]);
        }
        if morph {
            s.push_str(&words[w % words.len()]);
        } else {
            s.push_str(NOISE[w % NOISE.len()]);
        }
    }
    s
}
