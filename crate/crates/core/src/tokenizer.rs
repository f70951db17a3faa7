//! BPE tokenizer training and vocabulary merging.
//!
//! A [`Vocab`] holds an ordered token table plus the merge rules that
//! produced it. Training is classic byte-pair encoding: repeatedly merge
//! the most frequent adjacent symbol pair until the target vocabulary
//! size is reached, with a lexicographic tie-break so training is fully
//! deterministic. Two vocabularies can be combined with [`merge_vocabs`],
//! which keeps every base token id unchanged and appends new pieces up to
//! a hard cap (default 65,535 so ids fit in 16 bits).
//!
//! Encoding segments text into words (a single leading space stays
//! attached to the word that follows it; newlines, tabs and carriage
//! returns are single-character words) and then takes the longest piece
//! match at each position. With byte fallback enabled every byte is a
//! piece, so encoding is total and `decode(encode(text)) == text`.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use xxhash_rust::xxh3::xxh3_64;

use crate::error::{Error, Result};

/// One vocabulary entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub id: u32,
    pub piece: Vec<u8>,
    pub freq: u64,
}

/// A merge rule: `left ++ right` became a single piece during training.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Merge {
    pub left: Vec<u8>,
    pub right: Vec<u8>,
}

/// Token table plus merge rules, with a lookup index for encoding.
#[derive(Debug, Clone)]
pub struct Vocab {
    tokens: Vec<Token>,
    merges: Vec<Merge>,
    byte_fallback: bool,
    piece_index: HashMap<Vec<u8>, u32>,
    max_piece_len: usize,
}

impl Vocab {
    /// Build a vocabulary from parts, validating the invariants:
    /// dense ids `0..len`, unique pieces, and merges whose left, right
    /// and combined pieces all exist in the table.
    pub fn from_parts(tokens: Vec<Token>, merges: Vec<Merge>, byte_fallback: bool) -> Result<Self> {
        let mut piece_index = HashMap::with_capacity(tokens.len());
        let mut max_piece_len = 0;
        for (i, tok) in tokens.iter().enumerate() {
            if tok.id as usize != i {
                return Err(Error::invalid(format!(
                    "token ids must be dense: position {i} holds id {}",
                    tok.id
                )));
            }
            if tok.piece.is_empty() {
                return Err(Error::invalid(format!("token {i} has an empty piece")));
            }
            if piece_index.insert(tok.piece.clone(), tok.id).is_some() {
                return Err(Error::invalid(format!(
                    "duplicate piece at id {}: {:?}",
                    tok.id, tok.piece
                )));
            }
            max_piece_len = max_piece_len.max(tok.piece.len());
        }
        for (i, m) in merges.iter().enumerate() {
            let combined: Vec<u8> = m.left.iter().chain(m.right.iter()).copied().collect();
            if !piece_index.contains_key(&m.left)
                || !piece_index.contains_key(&m.right)
                || !piece_index.contains_key(&combined)
            {
                return Err(Error::invalid(format!(
                    "merge {i} references pieces missing from the table"
                )));
            }
        }
        Ok(Vocab {
            tokens,
            merges,
            byte_fallback,
            piece_index,
            max_piece_len,
        })
    }

    /// The 256 single-byte pieces and no merges. Encodes anything.
    pub fn byte_level() -> Self {
        let tokens = (0u32..256)
            .map(|id| Token {
                id,
                piece: vec![id as u8],
                freq: 0,
            })
            .collect();
        Vocab::from_parts(tokens, Vec::new(), true).expect("byte table is valid")
    }

    pub fn size(&self) -> usize {
        self.tokens.len()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn byte_fallback(&self) -> bool {
        self.byte_fallback
    }

    pub fn contains_piece(&self, piece: &[u8]) -> bool {
        self.piece_index.contains_key(piece)
    }

    pub fn id_of(&self, piece: &[u8]) -> Option<u32> {
        self.piece_index.get(piece).copied()
    }

    pub fn piece(&self, id: u32) -> Option<&[u8]> {
        self.tokens.get(id as usize).map(|t| t.piece.as_slice())
    }

    /// Append a dedicated piece (e.g. an instruction marker) if absent.
    /// Returns its id either way.
    pub fn add_special(&mut self, piece: &str) -> u32 {
        if let Some(id) = self.id_of(piece.as_bytes()) {
            return id;
        }
        let id = self.tokens.len() as u32;
        let bytes = piece.as_bytes().to_vec();
        self.max_piece_len = self.max_piece_len.max(bytes.len());
        self.piece_index.insert(bytes.clone(), id);
        self.tokens.push(Token {
            id,
            piece: bytes,
            freq: 0,
        });
        id
    }

    /// Short stable identifier recorded in reports that depend on which
    /// tokenizer measured token counts.
    pub fn identity(&self) -> String {
        let mut buf = Vec::new();
        for tok in &self.tokens {
            buf.extend_from_slice(&(tok.piece.len() as u32).to_le_bytes());
            buf.extend_from_slice(&tok.piece);
        }
        format!("bpe{}-{:016x}", self.tokens.len(), xxh3_64(&buf))
    }

    /// Longest-match encoding. Total when byte fallback is on; errors on
    /// a character with no matching piece otherwise.
    pub fn encode(&self, text: &str) -> Result<Vec<u32>> {
        let mut ids = Vec::new();
        for word in split_words(text) {
            let bytes = word.as_bytes();
            let mut pos = 0;
            while pos < bytes.len() {
                let limit = self.max_piece_len.min(bytes.len() - pos);
                let mut matched = None;
                for len in (1..=limit).rev() {
                    if let Some(&id) = self.piece_index.get(&bytes[pos..pos + len]) {
                        matched = Some((id, len));
                        break;
                    }
                }
                match matched {
                    Some((id, len)) => {
                        ids.push(id);
                        pos += len;
                    }
                    None => {
                        return Err(Error::invalid(format!(
                            "no piece matches input at byte offset {pos} of word {word:?} \
                             (byte fallback disabled)"
                        )))
                    }
                }
            }
        }
        Ok(ids)
    }

    /// Concatenated piece bytes for a token sequence.
    pub fn decode_bytes(&self, ids: &[u32]) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        for &id in ids {
            match self.piece(id) {
                Some(p) => out.extend_from_slice(p),
                None => return Err(Error::invalid(format!("token id {id} out of range"))),
            }
        }
        Ok(out)
    }

    pub fn decode(&self, ids: &[u32]) -> Result<String> {
        String::from_utf8(self.decode_bytes(ids)?)
            .map_err(|e| Error::invalid(format!("decoded bytes are not UTF-8: {e}")))
    }

    /// Convenience used by the corpus mixer.
    pub fn count_tokens(&self, text: &str) -> Result<usize> {
        Ok(self.encode(text)?.len())
    }

    /// Stable JSON rendering: identical vocabularies serialize to
    /// byte-identical strings.
    pub fn to_json_string(&self) -> String {
        let file = VocabFile {
            byte_fallback: self.byte_fallback,
            tokens: self
                .tokens
                .iter()
                .map(|t| TokenRepr {
                    id: t.id,
                    piece: PieceRepr::from_bytes(&t.piece),
                    freq: t.freq,
                })
                .collect(),
            merges: self
                .merges
                .iter()
                .map(|m| MergeRepr {
                    left: PieceRepr::from_bytes(&m.left),
                    right: PieceRepr::from_bytes(&m.right),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("vocab serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: VocabFile = serde_json::from_str(s)?;
        let tokens = file
            .tokens
            .into_iter()
            .map(|t| {
                Ok(Token {
                    id: t.id,
                    piece: t.piece.into_bytes()?,
                    freq: t.freq,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let merges = file
            .merges
            .into_iter()
            .map(|m| {
                Ok(Merge {
                    left: m.left.into_bytes()?,
                    right: m.right.into_bytes()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Vocab::from_parts(tokens, merges, file.byte_fallback)
    }

    pub fn write_to(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    pub fn read_from(path: &std::path::Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        Vocab::from_json_str(&s)
    }
}

/// Pieces are stored as plain strings when valid UTF-8, as `{"hex": ..}`
/// otherwise, so vocab files stay diffable.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum PieceRepr {
    Text(String),
    Hex { hex: String },
}

impl PieceRepr {
    fn from_bytes(bytes: &[u8]) -> Self {
        match std::str::from_utf8(bytes) {
            Ok(s) => PieceRepr::Text(s.to_string()),
            Err(_) => PieceRepr::Hex {
                hex: bytes.iter().map(|b| format!("{b:02x}")).collect(),
            },
        }
    }

    fn into_bytes(self) -> Result<Vec<u8>> {
        match self {
            PieceRepr::Text(s) => Ok(s.into_bytes()),
            PieceRepr::Hex { hex } => {
                if hex.len() % 2 != 0 {
                    return Err(Error::invalid("hex piece has odd length"));
                }
                (0..hex.len())
                    .step_by(2)
                    .map(|i| {
                        u8::from_str_radix(&hex[i..i + 2], 16)
                            .map_err(|e| Error::invalid(format!("bad hex piece: {e}")))
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TokenRepr {
    id: u32,
    piece: PieceRepr,
    freq: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct MergeRepr {
    left: PieceRepr,
    right: PieceRepr,
}

#[derive(Debug, Serialize, Deserialize)]
struct VocabFile {
    byte_fallback: bool,
    tokens: Vec<TokenRepr>,
    merges: Vec<MergeRepr>,
}

/// Word segmentation shared by training and encoding. A single space
/// attaches to the word that follows it, so common words tokenize with
/// their leading space; `\n`, `\t` and `\r` are one-character words.
/// Concatenating the words reproduces the input exactly.
fn split_words(text: &str) -> Vec<&str> {
    let bytes = text.as_bytes();
    let mut words = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\n' | b'\t' | b'\r' => {
                if start < i {
                    words.push(&text[start..i]);
                }
                words.push(&text[i..i + 1]);
                i += 1;
                start = i;
            }
            b' ' if i > start => {
                words.push(&text[start..i]);
                start = i;
                i += 1;
            }
            _ => i += 1,
        }
    }
    if start < bytes.len() {
        words.push(&text[start..]);
    }
    words
}

/// Result of training; `warning` is set when the corpus ran out of pairs
/// before the target size was reached.
#[derive(Debug)]
pub struct TrainOutcome {
    pub vocab: Vocab,
    pub warning: Option<String>,
}

/// Train a BPE vocabulary. With `byte_fallback` the base alphabet is all
/// 256 bytes (so `target_vocab` must be at least 256); otherwise it is
/// the set of distinct characters seen in the corpus. Ties between
/// equally frequent pairs break toward the lexicographically smallest
/// `(left, right)` piece pair, making training deterministic; scaling
/// every count by the same factor cannot change any merge decision.
pub fn train_bpe<I>(corpus: I, target_vocab: usize, byte_fallback: bool) -> Result<TrainOutcome>
where
    I: IntoIterator,
    I::Item: AsRef<str>,
{
    if byte_fallback && target_vocab < 256 {
        return Err(Error::invalid(
            "target_vocab must be at least 256 when byte fallback is enabled",
        ));
    }

    // Count distinct words once; all pair statistics are weighted by
    // word frequency.
    let mut word_counts: HashMap<String, u64> = HashMap::new();
    for text in corpus {
        for w in split_words(text.as_ref()) {
            *word_counts.entry(w.to_string()).or_insert(0) += 1;
        }
    }
    if word_counts.is_empty() {
        return Err(Error::invalid("corpus is empty"));
    }

    // Interned piece table; symbol id = index.
    let mut pieces: Vec<Vec<u8>> = Vec::new();
    let mut piece_ids: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut intern = |pieces: &mut Vec<Vec<u8>>,
                      piece_ids: &mut HashMap<Vec<u8>, usize>,
                      p: Vec<u8>|
     -> usize {
        if let Some(&id) = piece_ids.get(&p) {
            return id;
        }
        let id = pieces.len();
        piece_ids.insert(p.clone(), id);
        pieces.push(p);
        id
    };

    let mut freqs: Vec<u64> = Vec::new();
    if byte_fallback {
        for b in 0u16..256 {
            intern(&mut pieces, &mut piece_ids, vec![b as u8]);
        }
        freqs.resize(256, 0);
    } else {
        let alphabet: BTreeSet<char> = word_counts.keys().flat_map(|w| w.chars()).collect();
        for ch in alphabet {
            let mut buf = [0u8; 4];
            let bytes = ch.encode_utf8(&mut buf).as_bytes().to_vec();
            intern(&mut pieces, &mut piece_ids, bytes);
        }
        freqs.resize(pieces.len(), 0);
    }

    let mut warning = None;
    if !byte_fallback && pieces.len() > target_vocab {
        warning = Some(format!(
            "alphabet has {} characters, exceeding target_vocab {target_vocab}; keeping all",
            pieces.len()
        ));
    }

    // Words as symbol sequences, in sorted order for reproducibility.
    let mut sorted: Vec<(String, u64)> = word_counts.into_iter().collect();
    sorted.sort();
    let mut words: Vec<(Vec<usize>, u64)> = Vec::with_capacity(sorted.len());
    for (word, count) in sorted {
        let syms: Vec<usize> = if byte_fallback {
            word.bytes().map(|b| b as usize).collect()
        } else {
            word.chars()
                .map(|ch| {
                    let mut buf = [0u8; 4];
                    piece_ids[ch.encode_utf8(&mut buf).as_bytes()]
                })
                .collect()
        };
        for &s in &syms {
            freqs[s] += count;
        }
        words.push((syms, count));
    }

    let mut merges: Vec<Merge> = Vec::new();
    while pieces.len() < target_vocab {
        let mut pair_counts: HashMap<(usize, usize), u64> = HashMap::new();
        for (syms, count) in &words {
            for pair in syms.windows(2) {
                *pair_counts.entry((pair[0], pair[1])).or_insert(0) += count;
            }
        }
        let best = pair_counts.into_iter().max_by(|a, b| {
            a.1.cmp(&b.1).then_with(|| {
                // Lower piece bytes win the tie, so compare reversed.
                let ka = (&pieces[a.0 .0], &pieces[a.0 .1]);
                let kb = (&pieces[b.0 .0], &pieces[b.0 .1]);
                kb.cmp(&ka)
            })
        });
        let Some(((left, right), count)) = best else {
            warning = Some(format!(
                "corpus ran out of adjacent pairs at {} pieces (target {target_vocab})",
                pieces.len()
            ));
            break;
        };
        debug_assert!(count > 0);

        let mut combined = pieces[left].clone();
        combined.extend_from_slice(&pieces[right]);
        merges.push(Merge {
            left: pieces[left].clone(),
            right: pieces[right].clone(),
        });
        let new_sym = intern(&mut pieces, &mut piece_ids, combined);
        freqs.resize(pieces.len(), 0);
        freqs[new_sym] = count;

        // Left-to-right, non-overlapping replacement.
        for (syms, _) in &mut words {
            if syms.len() < 2 {
                continue;
            }
            let mut out = Vec::with_capacity(syms.len());
            let mut i = 0;
            while i < syms.len() {
                if i + 1 < syms.len() && syms[i] == left && syms[i + 1] == right {
                    out.push(new_sym);
                    i += 2;
                } else {
                    out.push(syms[i]);
                    i += 1;
                }
            }
            *syms = out;
        }
    }

    let tokens: Vec<Token> = pieces
        .into_iter()
        .zip(freqs)
        .enumerate()
        .map(|(id, (piece, freq))| Token {
            id: id as u32,
            piece,
            freq,
        })
        .collect();
    let vocab = Vocab::from_parts(tokens, merges, byte_fallback)?;
    Ok(TrainOutcome { vocab, warning })
}

/// Inputs to [`merge_vocabs`]. The cap defaults to 65,535 so every id in
/// the merged table fits an unsigned 16-bit integer.
#[derive(Debug)]
pub struct MergePlan {
    pub base: Vocab,
    pub learned: Vocab,
    pub cap: usize,
}

pub const DEFAULT_VOCAB_CAP: usize = 65_535;

impl MergePlan {
    pub fn new(base: Vocab, learned: Vocab) -> Self {
        MergePlan {
            base,
            learned,
            cap: DEFAULT_VOCAB_CAP,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MergeReport {
    /// Learned pieces already present in the base table.
    pub overlap: usize,
    /// Learned pieces appended after the base table.
    pub appended: usize,
    pub final_size: usize,
}

#[derive(Debug)]
pub struct MergeOutcome {
    pub vocab: Vocab,
    pub report: MergeReport,
}

/// Combine a learned vocabulary into a base one. Base tokens keep their
/// ids; learned pieces not already present (byte-identical comparison)
/// are appended in descending learned frequency (ties by learned id) and
/// truncated so the final size never exceeds the cap. Learned merges
/// survive only if their left, right and combined pieces all made it
/// into the final table.
pub fn merge_vocabs(plan: &MergePlan) -> Result<MergeOutcome> {
    if plan.cap < plan.base.size() {
        return Err(Error::invalid(format!(
            "cap {} is smaller than the base vocabulary ({} tokens)",
            plan.cap,
            plan.base.size()
        )));
    }

    let mut candidates: Vec<&Token> = Vec::new();
    let mut overlap = 0;
    for tok in plan.learned.tokens() {
        if plan.base.contains_piece(&tok.piece) {
            overlap += 1;
        } else {
            candidates.push(tok);
        }
    }
    candidates.sort_by(|a, b| b.freq.cmp(&a.freq).then(a.id.cmp(&b.id)));

    let room = plan.cap - plan.base.size();
    let appended = candidates.len().min(room);

    let mut tokens: Vec<Token> = plan.base.tokens().to_vec();
    for tok in candidates.into_iter().take(appended) {
        tokens.push(Token {
            id: tokens.len() as u32,
            piece: tok.piece.clone(),
            freq: tok.freq,
        });
    }

    let piece_set: std::collections::HashSet<&[u8]> =
        tokens.iter().map(|t| t.piece.as_slice()).collect();
    let mut merges: Vec<Merge> = plan.base.merges().to_vec();
    for m in plan.learned.merges() {
        let combined: Vec<u8> = m.left.iter().chain(m.right.iter()).copied().collect();
        if piece_set.contains(m.left.as_slice())
            && piece_set.contains(m.right.as_slice())
            && piece_set.contains(combined.as_slice())
        {
            merges.push(m.clone());
        }
    }

    let final_size = tokens.len();
    let vocab = Vocab::from_parts(tokens, merges, plan.base.byte_fallback())?;
    Ok(MergeOutcome {
        vocab,
        report: MergeReport {
            overlap,
            appended,
            final_size,
        },
    })
}

/// Character coverage and per-language compression for a vocabulary over
/// a corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageReport {
    /// Fraction of corpus characters that have a dedicated piece
    /// (representable without falling back to raw bytes). 1.0 for an
    /// empty corpus.
    pub char_coverage: f64,
    pub total_chars: u64,
    /// Characters per token, keyed by document language.
    pub chars_per_token: std::collections::BTreeMap<String, f64>,
}

pub fn coverage_report<'a, I>(vocab: &Vocab, docs: I) -> CoverageReport
where
    I: IntoIterator<Item = (&'a str, &'a str)>, // (lang, text)
{
    let mut covered: u64 = 0;
    let mut total: u64 = 0;
    let mut per_lang: std::collections::BTreeMap<String, (u64, u64)> = Default::default();

    for (lang, text) in docs {
        let mut buf = [0u8; 4];
        for ch in text.chars() {
            total += 1;
            if vocab.contains_piece(ch.encode_utf8(&mut buf).as_bytes()) {
                covered += 1;
            }
        }
        if let Ok(ids) = vocab.encode(text) {
            let entry = per_lang.entry(lang.to_string()).or_insert((0, 0));
            entry.0 += text.chars().count() as u64;
            entry.1 += ids.len() as u64;
        }
    }

    let char_coverage = if total == 0 {
        1.0
    } else {
        covered as f64 / total as f64
    };
    let chars_per_token = per_lang
        .into_iter()
        .filter(|(_, (_, toks))| *toks > 0)
        .map(|(lang, (chars, toks))| (lang, chars as f64 / toks as f64))
        .collect();
    CoverageReport {
        char_coverage,
        total_chars: total,
        chars_per_token,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_words_reconstructs_input() {
        for text in [
            "hello world",
            "a  b",
            " leading",
            "trailing ",
            "line one\nline two\n",
            "tabs\tand\rreturns",
            "中文 没有 空格的长句",
            "",
        ] {
            let words = split_words(text);
            let joined: String = words.concat();
            assert_eq!(joined, text);
        }
    }

    #[test]
    fn space_attaches_to_following_word() {
        assert_eq!(split_words("the cat sat"), vec!["the", " cat", " sat"]);
        assert_eq!(split_words("a  b"), vec!["a", " ", " b"]);
    }

    #[test]
    fn single_symbol_corpus_merges_doubling_runs() {
        let text = "a".repeat(16);
        let out = train_bpe([text.as_str()], 256 + 4, true).unwrap();
        let merged: Vec<&[u8]> = out
            .vocab
            .merges()
            .iter()
            .map(|m| {
                assert_eq!(m.left, m.right);
                m.left.as_slice()
            })
            .collect();
        assert_eq!(merged, vec![b"a".as_slice(), b"aa", b"aaaa", b"aaaaaaaa"]);
    }

    #[test]
    fn abab_first_merge_is_ab() {
        let text = "ab".repeat(200);
        let out = train_bpe([text.as_str()], 260, true).unwrap();
        assert!(out.warning.is_none());
        let first = &out.vocab.merges()[0];
        assert_eq!(first.left, b"a");
        assert_eq!(first.right, b"b");
        assert_eq!(out.vocab.size(), 260);
    }

    #[test]
    fn corpus_too_small_warns_and_returns_smaller_vocab() {
        let out = train_bpe(["ab"], 300, true).unwrap();
        assert!(out.warning.is_some());
        assert!(out.vocab.size() < 300);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(train_bpe(Vec::<&str>::new(), 256, true).is_err());
        assert!(train_bpe([""], 256, true).is_err());
    }

    #[test]
    fn round_trip_through_trained_vocab() {
        let corpus = [
            "the quick brown fox jumps over the lazy dog",
            "pack my box with five dozen liquor jugs",
            "sphinx of black quartz judge my vow",
        ];
        let out = train_bpe(corpus, 300, true).unwrap();
        for text in corpus.iter().chain(["unseen words still work", "a\nb\tc"].iter()) {
            let ids = out.vocab.encode(text).unwrap();
            assert_eq!(out.vocab.decode(&ids).unwrap(), *text);
            assert_eq!(out.vocab.encode(&out.vocab.decode(&ids).unwrap()).unwrap(), ids);
        }
    }

    #[test]
    fn training_is_invariant_under_corpus_duplication() {
        let corpus = ["one fish two fish", "red fish blue fish"];
        let once = train_bpe(corpus, 280, true).unwrap();
        let doubled: Vec<&str> = corpus.iter().chain(corpus.iter()).copied().collect();
        let twice = train_bpe(doubled, 280, true).unwrap();
        assert_eq!(once.vocab.merges(), twice.vocab.merges());
        assert_eq!(once.vocab.to_json_string(), twice.vocab.to_json_string());
    }

    #[test]
    fn training_is_deterministic() {
        let corpus = ["deterministic output please", "deterministic please"];
        let a = train_bpe(corpus, 290, true).unwrap();
        let b = train_bpe(corpus, 290, true).unwrap();
        assert_eq!(a.vocab.to_json_string(), b.vocab.to_json_string());
    }

    #[test]
    fn char_mode_uses_corpus_alphabet() {
        let out = train_bpe(["abc abc"], 6, false).unwrap();
        // Alphabet is {' ', 'a', 'b', 'c'}; two merges fill up to 6.
        assert_eq!(out.vocab.size(), 6);
        let ids = out.vocab.encode("abc").unwrap();
        assert_eq!(out.vocab.decode(&ids).unwrap(), "abc");
        assert!(out.vocab.encode("xyz").is_err());
    }

    #[test]
    fn merge_empty_learned_is_identity() {
        let base = Vocab::byte_level();
        let learned = Vocab::from_parts(Vec::new(), Vec::new(), true);
        // An empty token table is not a valid vocab; use a learned vocab
        // fully contained in the base instead.
        assert!(learned.is_err());
        let contained = Vocab::from_parts(
            vec![Token {
                id: 0,
                piece: vec![b'a'],
                freq: 1,
            }],
            Vec::new(),
            true,
        )
        .unwrap();
        let out = merge_vocabs(&MergePlan::new(base.clone(), contained)).unwrap();
        assert_eq!(out.vocab.size(), base.size());
        assert_eq!(out.report.overlap, 1);
        assert_eq!(out.report.appended, 0);
    }

    #[test]
    fn merge_preserves_base_ids_and_caps_size() {
        let base = train_bpe(["shared base text"], 270, true).unwrap().vocab;
        let learned = train_bpe(["learned 学习 text"], 280, true).unwrap().vocab;
        let out = merge_vocabs(&MergePlan::new(base.clone(), learned).with_cap(290)).unwrap();
        assert!(out.vocab.size() <= 290);
        for tok in base.tokens() {
            assert_eq!(out.vocab.id_of(&tok.piece), Some(tok.id));
        }
        // No duplicate pieces.
        let distinct: std::collections::HashSet<_> =
            out.vocab.tokens().iter().map(|t| t.piece.clone()).collect();
        assert_eq!(distinct.len(), out.vocab.size());
    }

    #[test]
    fn merge_cap_below_base_errors() {
        let base = Vocab::byte_level();
        let learned = Vocab::byte_level();
        assert!(merge_vocabs(&MergePlan::new(base, learned).with_cap(100)).is_err());
    }

    #[test]
    fn vocab_json_round_trips_non_utf8_pieces() {
        let mut vocab = Vocab::byte_level();
        vocab.add_special("<s>");
        let json = vocab.to_json_string();
        let back = Vocab::from_json_str(&json).unwrap();
        assert_eq!(back.size(), vocab.size());
        assert_eq!(back.to_json_string(), json);
        assert_eq!(back.id_of(b"<s>"), vocab.id_of(b"<s>"));
    }

    #[test]
    fn coverage_full_when_all_chars_present() {
        let vocab = Vocab::byte_level();
        let report = coverage_report(&vocab, [("en", "ascii only")]);
        assert_eq!(report.char_coverage, 1.0);
        // Multi-byte characters have no dedicated piece in a byte table.
        let report = coverage_report(&vocab, [("zh", "中文")]);
        assert_eq!(report.char_coverage, 0.0);
        assert_eq!(report.total_chars, 2);
    }

    #[test]
    fn coverage_empty_corpus_reports_one() {
        let vocab = Vocab::byte_level();
        let report = coverage_report(&vocab, std::iter::empty());
        assert_eq!(report.char_coverage, 1.0);
        assert_eq!(report.total_chars, 0);
    }

    #[test]
    fn identity_is_stable_and_distinguishes_vocabs() {
        let a = Vocab::byte_level();
        let b = train_bpe(["some text"], 260, true).unwrap().vocab;
        assert_eq!(a.identity(), Vocab::byte_level().identity());
        assert_ne!(a.identity(), b.identity());
    }
}
