//! Worked examples for each pipeline stage, on the bundled fixture artifacts.

use std::sync::OnceLock;

use morphpiece::analysis::{self, Chars, Format, Report, Whitespace};
use morphpiece::bpe::decode_bytes;
use morphpiece::morphtable::{ingest_reader, ColumnMap, MorphTableError};
use morphpiece::tokenizer::{CasePolicy, Handler, TokenizerConfig};
use morphpiece::vocab::NO_SPACE;
use morphpiece::{fixtures, Artifacts, Detokenizer, GroupKind, MorphPieceTokenizer, MorphTable, TokenLabel};

fn art() -> &'static Artifacts {
    static A: OnceLock<Artifacts> = OnceLock::new();
    A.get_or_init(fixtures::artifacts)
}

fn tok() -> &'static MorphPieceTokenizer {
    static T: OnceLock<MorphPieceTokenizer> = OnceLock::new();
    T.get_or_init(|| art().tokenizer(TokenizerConfig::default()).unwrap())
}

fn detok() -> &'static Detokenizer {
    static D: OnceLock<Detokenizer> = OnceLock::new();
    D.get_or_init(|| art().detokenizer())
}

#[test]
fn table1_segmentations() {
    for (word, want) in fixtures::TABLE1 {
        assert_eq!(tok().tokenize(word), want, "{word}");
    }
    assert!(tok().tokenize("").is_empty());
}

#[test]
fn encode_is_tokenize_plus_ids() {
    assert!(tok().encode("").is_empty());
    let e = tok().encode("batting");
    assert_eq!(e.tokens, tok().tokenize("batting"));
    assert_eq!(tok().ids_to_tokens(&e.ids).unwrap(), e.tokens);
}

#[test]
fn coverage_trace_handlers() {
    assert_eq!(tok().coverage_trace("batting"), [Handler::MorphTable]);
    assert_eq!(tok().coverage_trace("you"), [Handler::BpeWhole]);
    assert_eq!(tok().coverage_trace("zxqv"), [Handler::BpeSplit]);
}

#[test]
fn coverage_of_a_tiny_corpus() {
    let r = analysis::coverage(&["batting you you"], tok()).unwrap();
    let all = r.bucket(0..=usize::MAX);
    assert_eq!((all.morphtable, all.bpe_whole, all.bpe_split), (1, 2, 0));
    let top = r.top(1);
    assert_eq!(top[0].token, "you");
    assert_eq!(top[0].relative_frequency, 2.0 / 3.0);
    assert!(r.top(0).is_empty());
}

#[test]
fn case_policy() {
    assert_ne!(tok().coverage_trace("Batting"), [Handler::MorphTable]);
    let fold = art().tokenizer(TokenizerConfig { case_policy: CasePolicy::FoldLower, use_joiner: true }).unwrap();
    assert_eq!(fold.tokenize("Batting"), ["bat", "#ing"]);
}

#[test]
fn joiner_marks_attached_words() {
    assert_eq!(tok().tokenize("(batting"), ["(", NO_SPACE, "bat", "#ing"]);
    assert_eq!(tok().tokenize(" batting"), ["Ġ", NO_SPACE, "bat", "#ing"]);
    assert_eq!(tok().tokenize("x batting"), ["x", "bat", "#ing"]);
    let plain = art().tokenizer(TokenizerConfig { use_joiner: false, ..Default::default() }).unwrap();
    assert_eq!(plain.tokenize("(batting"), ["(", "bat", "#ing"]);
}

#[test]
fn classify_examples() {
    use TokenLabel::*;
    assert_eq!(detok().classify(&["de#"]).unwrap(), [Prefix]);
    assert_eq!(detok().classify(&fixtures::WORKED_STREAM).unwrap(), [Bpe, Bpe, Prefix, Stem, Suffix, Stem, Suffix]);
    assert_eq!(art().vocab.tag("you"), Some(morphpiece::SourceTag::Bpe));
    assert_eq!(detok().classify(&["He", "you"]).unwrap(), [Bpe, Bpe]);
    assert!(detok().classify(&["notatoken"]).is_err());
    assert!(detok().classify(&[NO_SPACE]).is_err());
}

#[test]
fn segment_examples() {
    use TokenLabel::*;
    let stream = fixtures::WORKED_STREAM;
    let labels = detok().classify(&stream).unwrap();
    let groups: Vec<Vec<String>> = detok().segment(&labels, &stream).into_iter().map(|g| g.tokens).collect();
    assert_eq!(groups, [vec!["He", "Ġwas"], vec!["in#", "vestigate", "#ing"], vec!["diligent", "#ly"]]);

    let single = detok().segment(&[Stem], &["gage"]);
    assert_eq!(single.len(), 1);
    assert_eq!(single[0].kind, GroupKind::MorphWord);

    let compound = detok().segment(&[Stem, Hash, Stem], &["foot", "#", "ball"]);
    assert_eq!(compound.len(), 1);
    assert_eq!(detok().reverse_word(&compound[0]), ("football".to_string(), true));
}

#[test]
fn reverse_word_examples() {
    use TokenLabel::*;
    let g = &detok().segment(&[Prefix, Stem, Suffix], &["in#", "vestigate", "#ing"])[0];
    assert_eq!(detok().reverse_word(g), ("investigating".to_string(), true));
    let g = &detok().segment(&[Stem, Suffix], &["bat", "#ing"])[0];
    assert_eq!(detok().reverse_word(g), ("batting".to_string(), true));
    let g = &detok().segment(&[Prefix, Stem], &["foo#", "bar"])[0];
    assert_eq!(detok().reverse_word(g), ("foobar".to_string(), false));
}

#[test]
fn invalid_transitions_degrade() {
    use TokenLabel::*;
    // A suffix directly after BPE text opens an ill-formed group.
    let groups = detok().segment(&[Bpe, Suffix, Bpe], &["He", "#ing", "Ġwas"]);
    assert_eq!(groups.len(), 3);
    assert!(!groups[1].well_formed);
    assert_eq!(detok().reverse_word(&groups[1]), ("ing".to_string(), false));
    let d = detok().detokenize_report(&["He", "#ing", "Ġwas"]).unwrap();
    assert_eq!(d.unverified, 1);
}

#[test]
fn detokenize_examples() {
    let s = "He was investigating diligently";
    assert_eq!(detok().detokenize(&tok().tokenize(s)).unwrap(), s);
    assert_eq!(detok().detokenize::<&str>(&[]).unwrap(), "");
    let text = "the river was green";
    let bpe_only = art().bpe.encode(text);
    assert_eq!(detok().detokenize(&bpe_only).unwrap(), decode_bytes(&bpe_only).unwrap());
    let fig5 = detok().detokenize(&fixtures::WORKED_STREAM).unwrap();
    assert_eq!(fig5, "He was investigating diligently");
}

#[test]
fn attached_and_leading_space_round_trip() {
    for s in ["(batting)", " batting", "batting,batting", "  batting", "a\nbatting", "end of text<|endoftext|>batting"] {
        assert_eq!(detok().detokenize(&tok().tokenize(s)).unwrap(), s, "{s:?}");
    }
}

#[test]
fn ids_decode() {
    let e = tok().encode("He was decompress ing");
    assert_eq!(detok().decode_ids(&e.ids).unwrap().text, "He was decompress ing");
    assert!(detok().decode_ids(&[u32::MAX]).is_err());
}

#[test]
fn ingest_canonical_line() {
    let (t, _) = ingest_reader("batting\tbat\ting:suffix\n".as_bytes(), &ColumnMap::canonical()).unwrap();
    assert_eq!(t.lookup("batting").unwrap(), ["bat", "#ing"]);
    let err = ingest_reader("".as_bytes(), &ColumnMap::canonical()).unwrap_err();
    assert!(matches!(err, MorphTableError::ZeroValidRecords));
}

#[test]
fn trim_examples() {
    let src = "batting\tbat\ting:suffix\nbatted\tbat\ted:suffix\nrunning\trun\ting:suffix\n";
    let (t, _) = ingest_reader(src.as_bytes(), &ColumnMap::canonical()).unwrap();
    let trimmed = t.trim(2);
    // `#ed` and `run` occur once, so only batting survives.
    assert_eq!(trimmed.entries().map(|e| e.surface()).collect::<Vec<_>>(), ["batting"]);
    assert_eq!(t.trim(1), t);
}

#[test]
fn trim_is_one_pass() {
    // bat: 2 slots, #ing: 2, #ed: 1, run: 1. trim(2) drops batted and
    // running; on the survivors bat and #ing now count 1, yet batting stays.
    let src = "batting\tbat\ting:suffix\nbatted\tbat\ted:suffix\nrunning\trun\ting:suffix\n";
    let (t, _) = ingest_reader(src.as_bytes(), &ColumnMap::canonical()).unwrap();
    let once = t.trim(2);
    assert_eq!(once.len(), 1);
    assert_eq!(once.trim(2).len(), 0);
}

#[test]
fn morph_histogram_counts_segmentation_lengths() {
    let t: MorphTable = fixtures::morph_table();
    let h = t.morph_histogram();
    assert_eq!(h.values().sum::<usize>(), t.len());
    assert_eq!(h[&4], t.entries().filter(|e| e.morphemes().len() == 4).count());
}

#[test]
fn fertility_adapters() {
    let docs = fixtures::corpus();
    let r = analysis::fertility(&docs, &[&Whitespace, &Chars]).unwrap();
    assert_eq!(r.get("whitespace").unwrap().fertility, 1.0);
}

#[test]
fn tsv_report_parses_back() {
    let docs = fixtures::corpus();
    let r = analysis::fertility(&docs, &[&Whitespace, &analysis::MorphPiece(tok())]).unwrap();
    let mut buf = Vec::new();
    analysis::write_report(&Report::Fertility(&r), Format::Tsv, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "tokenizer\tdocuments\twords\ttokens\tavg_tokens_per_doc\tfertility");
    for (line, row) in lines.zip(&r.rows) {
        let f: Vec<&str> = line.split('\t').collect();
        assert_eq!(f[0], row.tokenizer);
        assert_eq!(f[3].parse::<u64>().unwrap(), row.tokens);
        assert_eq!(f[4].parse::<f64>().unwrap(), row.avg_tokens_per_doc);
        assert_eq!(f[5].parse::<f64>().unwrap(), row.fertility);
    }
}

#[test]
fn json_report_schema() {
    let r = analysis::fertility(&["a b"], &[&Chars]).unwrap();
    let mut buf = Vec::new();
    analysis::write_report(&Report::Fertility(&r), Format::Json, &mut buf).unwrap();
    let want = r#"[
  {
    "tokenizer": "char",
    "documents": 1,
    "words": 2,
    "tokens": 3,
    "avg_tokens_per_doc": 3.0,
    "fertility": 1.5
  }
]
"#;
    assert_eq!(String::from_utf8(buf).unwrap(), want);
}

#[test]
fn emit_report_is_stable_and_reports_bad_paths() {
    let cov = analysis::coverage(&fixtures::corpus(), tok()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.tsv"), dir.path().join("b.tsv"));
    analysis::emit_report(&Report::Coverage(&cov), Format::Tsv, &a).unwrap();
    analysis::emit_report(&Report::Coverage(&cov), Format::Tsv, &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let bad = dir.path().join("missing").join("x.tsv");
    assert!(analysis::emit_report(&Report::Coverage(&cov), Format::Tsv, &bad).is_err());
}

#[test]
fn tokenizer_rejects_incomplete_vocabulary() {
    let a = art();
    let (small, _) = morphpiece::MergedVocabulary::merge(&Default::default(), a.bpe.tokens(), &morphpiece::vocab::default_specials()).unwrap();
    let err = MorphPieceTokenizer::new(a.table.clone(), a.bpe.clone(), small, TokenizerConfig::default()).unwrap_err();
    assert!(err.to_string().contains("morph table"));
}

#[test]
fn artifacts_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    art().write_dir(dir.path()).unwrap();
    let back = Artifacts::load_dir(dir.path()).unwrap();
    assert_eq!(back.table, art().table);
    assert_eq!(back.vocab, art().vocab);
    assert_eq!(back.bpe.tokens(), art().bpe.tokens());
}
