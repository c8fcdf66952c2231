//! Pre-training example generation: character vocabulary, tokenization with
//! word spans, BERT-style MLM corruption, and word-pair sampling for the
//! direction (2-way), direction-with-others (3-way) and relation-label
//! (12-way) prediction tasks.
//!
//! Everything here is a deterministic function of (seed, sentence index,
//! task); two runs over the same corpus produce identical files.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::deptree::{DepLabel, DepTree, RelationClass2};

pub const PAD: u32 = 0;
pub const UNK: u32 = 1;
pub const CLS: u32 = 2;
pub const SEP: u32 = 3;
pub const MASK: u32 = 4;
pub const RESERVED: u32 = 5;

/// Ignore sentinel for unsupervised label positions.
pub const IGNORE: i32 = -1;

#[derive(Debug, Error)]
pub enum ExampleGenError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("min_freq must be >= 1")]
    BadMinFreq,
    #[error("record {record}: {msg}")]
    Record { record: usize, msg: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Character vocabulary with five fixed reserved ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    /// Characters in id order; `chars[i]` has id `RESERVED + i`.
    chars: Vec<char>,
    map: HashMap<char, u32>,
}

impl Vocab {
    /// Builds the vocabulary from a sentence stream: every non-whitespace
    /// character seen at least `min_freq` times gets an id, in descending
    /// frequency then code-point order.
    pub fn build<'a, I>(corpus: I, min_freq: usize) -> Result<Vocab, ExampleGenError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        if min_freq < 1 {
            return Err(ExampleGenError::BadMinFreq);
        }
        let mut freq: HashMap<char, usize> = HashMap::new();
        let mut saw_sentence = false;
        for sentence in corpus {
            saw_sentence = true;
            for c in sentence.chars().filter(|c| !c.is_whitespace()) {
                *freq.entry(c).or_insert(0) += 1;
            }
        }
        if !saw_sentence {
            return Err(ExampleGenError::EmptyCorpus);
        }
        let mut entries: Vec<(char, usize)> =
            freq.into_iter().filter(|&(_, n)| n >= min_freq).collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let chars: Vec<char> = entries.into_iter().map(|(c, _)| c).collect();
        Ok(Vocab::from_chars(chars))
    }

    pub fn from_chars(chars: Vec<char>) -> Vocab {
        let map = chars
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, RESERVED + i as u32))
            .collect();
        Vocab { chars, map }
    }

    pub fn size(&self) -> usize {
        RESERVED as usize + self.chars.len()
    }

    pub fn id_of(&self, c: char) -> u32 {
        self.map.get(&c).copied().unwrap_or(UNK)
    }

    pub fn char_of(&self, id: u32) -> Option<char> {
        self.chars.get(id.checked_sub(RESERVED)? as usize).copied()
    }

    /// Canonical serialized form; equal vocabularies are byte-equal.
    pub fn to_json(&self) -> String {
        let tokens: String = self.chars.iter().collect();
        serde_json::to_string(&serde_json::json!({
            "version": 1,
            "reserved": ["<pad>", "<unk>", "<cls>", "<sep>", "<mask>"],
            "tokens": tokens,
        }))
        .expect("vocab serializes")
    }

    pub fn from_json(text: &str) -> Result<Vocab, ExampleGenError> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| {
            ExampleGenError::Record {
                record: 1,
                msg: format!("bad vocab file: {}", e),
            }
        })?;
        let tokens = v
            .get("tokens")
            .and_then(|t| t.as_str())
            .ok_or_else(|| ExampleGenError::Record {
                record: 1,
                msg: "vocab file missing tokens".into(),
            })?;
        Ok(Vocab::from_chars(tokens.chars().collect()))
    }

    /// Hex SHA-256 of the canonical serialization; stamped into example files
    /// and checkpoints so mismatched pipelines fail loudly.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_json().as_bytes());
        hex_string(&hasher.finalize())
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{:02x}", b)).collect()
}

/// A sentence rendered as token ids with one contiguous span per word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedSentence {
    /// `[CLS] c c c ... [SEP]`
    pub token_ids: Vec<u32>,
    /// Per word: inclusive start, exclusive end over token positions.
    pub word_spans: Vec<(usize, usize)>,
    pub sentence_id: String,
}

/// Character-tokenizes one parsed sentence. Returns `None` when the sentence
/// would exceed `max_len`; parsed sentences are skipped rather than truncated
/// so no arc loses an endpoint.
pub fn tokenize(tree: &DepTree, vocab: &Vocab, max_len: usize) -> Option<TokenizedSentence> {
    assert!(max_len >= 8, "max_len must be at least 8");
    let total_chars: usize = tree.forms().map(|f| f.chars().count()).sum();
    if total_chars + 2 > max_len {
        return None;
    }
    let mut token_ids = Vec::with_capacity(total_chars + 2);
    let mut word_spans = Vec::with_capacity(tree.len());
    token_ids.push(CLS);
    for form in tree.forms() {
        let start = token_ids.len();
        for c in form.chars() {
            token_ids.push(vocab.id_of(c));
        }
        word_spans.push((start, token_ids.len()));
    }
    token_ids.push(SEP);
    Some(TokenizedSentence {
        token_ids,
        word_spans,
        sentence_id: tree.sentence_id().to_string(),
    })
}

/// One MLM training instance: corrupted ids plus original ids at the
/// positions selected for prediction, [`IGNORE`] elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlmExample {
    pub input_ids: Vec<u32>,
    pub labels: Vec<i32>,
    pub sentence_id: String,
}

/// BERT-style corruption: each eligible interior position is selected with
/// probability `rate`; of the selected, 80% become `[MASK]`, 10% a random
/// vocabulary character, 10% stay unchanged. CLS, SEP and positions inside
/// `protected` spans are never selected.
pub fn mask_mlm(
    ts: &TokenizedSentence,
    rng_seed: u64,
    rate: f64,
    protected: &[(usize, usize)],
) -> MlmExample {
    assert!((0.0..=1.0).contains(&rate), "rate must be in [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let len = ts.token_ids.len();
    let mut input_ids = ts.token_ids.clone();
    let mut labels = vec![IGNORE; len];
    let vocab_extent = input_ids
        .iter()
        .copied()
        .max()
        .unwrap_or(RESERVED)
        .max(RESERVED);
    for pos in 1..len.saturating_sub(1) {
        if protected.iter().any(|&(s, e)| pos >= s && pos < e) {
            continue;
        }
        if !rng.gen_bool(rate) {
            continue;
        }
        labels[pos] = ts.token_ids[pos] as i32;
        let roll: f64 = rng.gen();
        if roll < 0.8 {
            input_ids[pos] = MASK;
        } else if roll < 0.9 {
            // Random non-reserved character; a vocabulary with no characters
            // falls back to UNK.
            input_ids[pos] = if vocab_extent > RESERVED {
                rng.gen_range(RESERVED..=vocab_extent)
            } else {
                UNK
            };
        }
    }
    MlmExample {
        input_ids,
        labels,
        sentence_id: ts.sentence_id.clone(),
    }
}

/// The three word-pair prediction tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PairTask {
    #[serde(rename = "dsp")]
    Dsp,
    #[serde(rename = "dsp3")]
    Dsp3,
    #[serde(rename = "drp")]
    Drp,
}

impl PairTask {
    pub fn as_str(self) -> &'static str {
        match self {
            PairTask::Dsp => "dsp",
            PairTask::Dsp3 => "dsp3",
            PairTask::Drp => "drp",
        }
    }

    pub fn class_count(self) -> usize {
        match self {
            PairTask::Dsp => 2,
            PairTask::Dsp3 => 3,
            PairTask::Drp => 12,
        }
    }
}

impl std::fmt::Display for PairTask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One word-pair training instance.
///
/// Class ids: dsp 0=Child 1=Parent; dsp3 0=Child 1=Parent 2=Others; drp uses
/// [`DepLabel::class_id`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairExample {
    pub input_ids: Vec<u32>,
    pub span_a: (usize, usize),
    pub span_b: (usize, usize),
    pub task: PairTask,
    pub class_id: usize,
    pub sentence_id: String,
}

/// Draws up to `k` distinct word-pair examples from one sentence.
///
/// dsp: only tree-adjacent ordered pairs, Child/Parent balanced within the
/// sentence (odd remainder assigned by the rng). dsp3: adjacent pairs plus
/// uniformly drawn non-adjacent ordered pairs at a 1:1:1 class target; the
/// rotation offset is drawn per sentence so small `k` still covers all three
/// classes across a corpus. drp: only arcs whose label is in the 12-label
/// set, pair order randomized per arc.
pub fn sample_pairs(
    tree: &DepTree,
    ts: &TokenizedSentence,
    task: PairTask,
    k: usize,
    rng_seed: u64,
) -> Vec<PairExample> {
    assert!(k >= 1, "k must be >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let n = tree.len();
    let arcs: Vec<(usize, usize)> = tree.arcs().collect();

    let make = |i: usize, j: usize, class_id: usize| PairExample {
        input_ids: ts.token_ids.clone(),
        span_a: ts.word_spans[i],
        span_b: ts.word_spans[j],
        task,
        class_id,
        sentence_id: ts.sentence_id.clone(),
    };

    match task {
        PairTask::Dsp => {
            // (dependent, head) is a Child pair; the reverse is Parent.
            let mut child: Vec<(usize, usize)> = arcs.clone();
            let mut parent: Vec<(usize, usize)> = arcs.iter().map(|&(d, h)| (h, d)).collect();
            child.shuffle(&mut rng);
            parent.shuffle(&mut rng);
            let extra_to_child = k % 2 == 1 && rng.gen_bool(0.5);
            let child_target = k / 2 + if k % 2 == 1 && extra_to_child { 1 } else { 0 };
            let parent_target = k - child_target;
            let mut out = Vec::new();
            let mut ci = child.iter().take(child_target);
            let mut pi = parent.iter().take(parent_target);
            loop {
                let c = ci.next();
                let p = pi.next();
                if c.is_none() && p.is_none() {
                    break;
                }
                if let Some(&(i, j)) = c {
                    out.push(make(i, j, 0));
                }
                if let Some(&(i, j)) = p {
                    out.push(make(i, j, 1));
                }
            }
            out
        }
        PairTask::Dsp3 => {
            let mut child: Vec<(usize, usize)> = arcs.clone();
            let mut parent: Vec<(usize, usize)> = arcs.iter().map(|&(d, h)| (h, d)).collect();
            let mut others: Vec<(usize, usize)> = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j
                        && tree.nodes()[i].head != j + 1
                        && tree.nodes()[j].head != i + 1
                    {
                        others.push((i, j));
                    }
                }
            }
            child.shuffle(&mut rng);
            parent.shuffle(&mut rng);
            others.shuffle(&mut rng);
            let offset = rng.gen_range(0..3usize);
            let mut cursors = [0usize; 3];
            let pools = [&child, &parent, &others];
            let mut out = Vec::new();
            for slot in 0..k {
                let class = (offset + slot) % 3;
                let cur = cursors[class];
                if cur < pools[class].len() {
                    let (i, j) = pools[class][cur];
                    cursors[class] += 1;
                    out.push(make(i, j, class));
                }
            }
            out
        }
        PairTask::Drp => {
            let mut labeled: Vec<(usize, usize, DepLabel)> = arcs
                .iter()
                .filter_map(|&(d, h)| {
                    tree.nodes()[d]
                        .label
                        .parse::<DepLabel>()
                        .ok()
                        .map(|l| (d, h, l))
                })
                .collect();
            labeled.shuffle(&mut rng);
            labeled
                .into_iter()
                .take(k)
                .map(|(d, h, l)| {
                    let (i, j) = if rng.gen_bool(0.5) { (d, h) } else { (h, d) };
                    make(i, j, l.class_id())
                })
                .collect()
        }
    }
}

/// A record in the example file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Example {
    Mlm(MlmExample),
    Pair(PairExample),
}

impl Example {
    pub fn sentence_id(&self) -> &str {
        match self {
            Example::Mlm(e) => &e.sentence_id,
            Example::Pair(e) => &e.sentence_id,
        }
    }
}

/// First line of an example file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleFileHeader {
    pub format_version: u32,
    pub vocab_hash: String,
    pub max_len: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawRecord {
    #[serde(rename = "type")]
    kind: String,
    input_ids: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<i32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    span_a: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    span_b: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    task: Option<PairTask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    class_id: Option<usize>,
    sentence_id: String,
}

impl From<&Example> for RawRecord {
    fn from(e: &Example) -> RawRecord {
        match e {
            Example::Mlm(m) => RawRecord {
                kind: "mlm".into(),
                input_ids: m.input_ids.clone(),
                labels: Some(m.labels.clone()),
                span_a: None,
                span_b: None,
                task: None,
                class_id: None,
                sentence_id: m.sentence_id.clone(),
            },
            Example::Pair(p) => RawRecord {
                kind: "pair".into(),
                input_ids: p.input_ids.clone(),
                labels: None,
                span_a: Some(p.span_a),
                span_b: Some(p.span_b),
                task: Some(p.task),
                class_id: Some(p.class_id),
                sentence_id: p.sentence_id.clone(),
            },
        }
    }
}

impl RawRecord {
    fn into_example(self, record: usize) -> Result<Example, ExampleGenError> {
        let fail = |msg: String| ExampleGenError::Record { record, msg };
        match self.kind.as_str() {
            "mlm" => {
                let labels = self.labels.ok_or_else(|| fail("mlm record missing labels".into()))?;
                if labels.len() != self.input_ids.len() {
                    return Err(fail("label/input length mismatch".into()));
                }
                Ok(Example::Mlm(MlmExample {
                    input_ids: self.input_ids,
                    labels,
                    sentence_id: self.sentence_id,
                }))
            }
            "pair" => {
                let task = self.task.ok_or_else(|| fail("pair record missing task".into()))?;
                let class_id =
                    self.class_id.ok_or_else(|| fail("pair record missing class_id".into()))?;
                if class_id >= task.class_count() {
                    return Err(fail(format!(
                        "class_id {} out of range for task {}",
                        class_id, task
                    )));
                }
                let span_a = self.span_a.ok_or_else(|| fail("pair record missing span_a".into()))?;
                let span_b = self.span_b.ok_or_else(|| fail("pair record missing span_b".into()))?;
                for &(s, e) in [&span_a, &span_b] {
                    if s >= e || e >= self.input_ids.len() || s == 0 {
                        return Err(fail(format!("bad span ({}, {})", s, e)));
                    }
                }
                if span_a == span_b {
                    return Err(fail("span_a equals span_b".into()));
                }
                Ok(Example::Pair(PairExample {
                    input_ids: self.input_ids,
                    span_a,
                    span_b,
                    task,
                    class_id,
                    sentence_id: self.sentence_id,
                }))
            }
            other => Err(fail(format!("unknown record type {:?}", other))),
        }
    }
}

/// Writes the header line followed by one JSON record per example.
pub fn write_examples<W: Write>(
    mut w: W,
    header: &ExampleFileHeader,
    examples: &[Example],
) -> Result<(), ExampleGenError> {
    writeln!(w, "{}", serde_json::to_string(header).expect("header serializes"))?;
    for e in examples {
        let raw = RawRecord::from(e);
        writeln!(w, "{}", serde_json::to_string(&raw).expect("record serializes"))?;
    }
    Ok(())
}

/// Reads an example file back; record numbers in errors are 1-based line
/// numbers (the header is record 1).
pub fn read_examples<R: BufRead>(
    r: R,
) -> Result<(ExampleFileHeader, Vec<Example>), ExampleGenError> {
    let mut lines = r.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| ExampleGenError::Record {
            record: 1,
            msg: "missing header record".into(),
        })??;
    let header: ExampleFileHeader =
        serde_json::from_str(&header_line).map_err(|e| ExampleGenError::Record {
            record: 1,
            msg: format!("bad header: {}", e),
        })?;
    let mut examples = Vec::new();
    for (i, line) in lines.enumerate() {
        let record = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line).map_err(|e| ExampleGenError::Record {
            record,
            msg: e.to_string(),
        })?;
        examples.push(raw.into_example(record)?);
    }
    Ok((header, examples))
}

/// Which examples to generate per sentence.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub mlm: bool,
    pub pair_tasks: Vec<PairTask>,
    /// Pairs per sentence per task.
    pub k: usize,
    pub mlm_rate: f64,
    pub max_len: usize,
    pub seed: u64,
    /// When set, MLM corruption and pair spans share one input: the pair
    /// spans are protected from masking and pair examples carry the corrupted
    /// ids. Off by default so pooling never sees `[MASK]` tokens.
    pub co_occur: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            mlm: true,
            pair_tasks: vec![],
            k: 2,
            mlm_rate: 0.15,
            max_len: 128,
            seed: 0,
            co_occur: false,
        }
    }
}

/// Stable per-(seed, task, sentence) stream seed.
pub fn derive_seed(base: u64, tag: &str, index: u64) -> u64 {
    // FNV-1a over the tag, folded with the base seed and index; written out
    // here so the stream layout never depends on std's hasher.
    let mut h: u64 = 0xcbf29ce484222325;
    for b in tag.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h ^= base.rotate_left(17);
    h = h.wrapping_mul(0x100000001b3);
    h ^= index.wrapping_add(0x9e3779b97f4a7c15);
    h.wrapping_mul(0x100000001b3)
}

/// Generates examples for a parsed corpus, in sentence order. Sentences that
/// exceed `max_len` are skipped entirely.
pub fn generate_examples(trees: &[DepTree], vocab: &Vocab, cfg: &GenConfig) -> Vec<Example> {
    let mut out = Vec::new();
    for (index, tree) in trees.iter().enumerate() {
        let Some(ts) = tokenize(tree, vocab, cfg.max_len) else {
            continue;
        };
        let index = index as u64;
        let mut pair_examples: Vec<PairExample> = Vec::new();
        for &task in &cfg.pair_tasks {
            let seed = derive_seed(cfg.seed, task.as_str(), index);
            pair_examples.extend(sample_pairs(tree, &ts, task, cfg.k, seed));
        }
        if cfg.mlm {
            let seed = derive_seed(cfg.seed, "mlm", index);
            let protected: Vec<(usize, usize)> = if cfg.co_occur {
                pair_examples
                    .iter()
                    .flat_map(|p| [p.span_a, p.span_b])
                    .collect()
            } else {
                Vec::new()
            };
            let mlm = mask_mlm(&ts, seed, cfg.mlm_rate, &protected);
            if cfg.co_occur {
                for p in &mut pair_examples {
                    p.input_ids = mlm.input_ids.clone();
                }
            }
            out.push(Example::Mlm(mlm));
        }
        out.extend(pair_examples.into_iter().map(Example::Pair));
    }
    out
}
