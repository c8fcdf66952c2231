//! Dataset hygiene: edit-distance similarity, train/heldout overlap cleaning,
//! top-k similarity audits, stratified splitting and corpus statistics.
//!
//! The edit unit everywhere is the Unicode scalar value, which matches
//! per-character Chinese text and common tooling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The seven error categories carried by incorrect sentences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ErrorType {
    WordOrder,
    Collocation,
    Missing,
    Redundant,
    Confusion,
    Fuzziness,
    Illogic,
}

impl ErrorType {
    pub const ALL: [ErrorType; 7] = [
        ErrorType::WordOrder,
        ErrorType::Collocation,
        ErrorType::Missing,
        ErrorType::Redundant,
        ErrorType::Confusion,
        ErrorType::Fuzziness,
        ErrorType::Illogic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorType::WordOrder => "WordOrder",
            ErrorType::Collocation => "Collocation",
            ErrorType::Missing => "Missing",
            ErrorType::Redundant => "Redundant",
            ErrorType::Confusion => "Confusion",
            ErrorType::Fuzziness => "Fuzziness",
            ErrorType::Illogic => "Illogic",
        }
    }
}

impl fmt::Display for ErrorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ErrorType {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        ErrorType::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or(())
    }
}

/// One labeled sentence: label 0 = correct, 1 = semantic error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSentence {
    pub id: String,
    pub text: String,
    pub label: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_type: Option<ErrorType>,
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("record {record}: {msg}")]
    Record { record: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl LabeledSentence {
    fn validate(&self, record: usize) -> Result<(), DataError> {
        let fail = |msg: String| Err(DataError::Record { record, msg });
        if self.text.is_empty() {
            return fail("empty text".into());
        }
        if self.label > 1 {
            return fail(format!("label {} outside {{0,1}}", self.label));
        }
        if self.error_type.is_some() && self.label != 1 {
            return fail("error_type present on a label-0 record".into());
        }
        Ok(())
    }
}

/// Parses line-delimited JSON labeled sentences. Record numbers are 1-based.
pub fn read_labeled(text: &str) -> Result<Vec<LabeledSentence>, DataError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let record = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let s: LabeledSentence = serde_json::from_str(line).map_err(|e| DataError::Record {
            record,
            msg: e.to_string(),
        })?;
        s.validate(record)?;
        out.push(s);
    }
    Ok(out)
}

pub fn write_labeled(data: &[LabeledSentence]) -> String {
    let mut out = String::new();
    for s in data {
        out.push_str(&serde_json::to_string(s).expect("labeled sentence serializes"));
        out.push('\n');
    }
    out
}

/// Unit-cost insert/delete/substitute edit distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (short, long) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    if short.is_empty() {
        return long.len();
    }
    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (j, &cb) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = j + 1;
        for (i, &ca) in short.iter().enumerate() {
            let cost = if ca == cb { diag } else { diag + 1 };
            diag = row[i + 1];
            row[i + 1] = cost.min(row[i] + 1).min(row[i + 1] + 1);
        }
    }
    *row.last().unwrap()
}

/// Similarity ratio `1 - distance / max(|a|, |b|)` in [0, 1]. Two empty
/// strings are identical, so the ratio is 1.
pub fn lev_ratio(a: &str, b: &str) -> f64 {
    let max_len = a.chars().count().max(b.chars().count());
    if max_len == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / max_len as f64
}

/// Overlap-cleaning threshold. A train record whose best heldout similarity
/// reaches gamma is removed; the boundary itself counts as overlap.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DedupConfig {
    pub gamma: f64,
}

impl Default for DedupConfig {
    fn default() -> Self {
        DedupConfig { gamma: 0.70 }
    }
}

impl DedupConfig {
    pub fn new(gamma: f64) -> Result<Self, DataError> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(DataError::Invalid(format!(
                "gamma {} outside [0, 1]",
                gamma
            )));
        }
        Ok(DedupConfig { gamma })
    }
}

/// One removed train record with the heldout record that condemned it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Removal {
    pub train_id: String,
    pub heldout_id: String,
    pub ratio: f64,
    /// Raw edit distance, kept so any other ratio convention can be recomputed.
    pub distance: usize,
}

/// Ledger of an overlap-cleaning run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CleanReport {
    pub gamma: f64,
    /// Records removed because their similarity reached gamma, in train order.
    pub removed: Vec<Removal>,
    pub kept: usize,
    /// Best cross-set ratio among surviving records; always below gamma.
    pub max_surviving_ratio: f64,
    /// Removal uses `ratio >= gamma`, i.e. the boundary cleans aggressively.
    pub boundary_inclusive: bool,
}

/// Removes every train record whose best similarity against the heldout set
/// reaches `cfg.gamma`. The heldout set is never modified.
pub fn clean_train(
    train: &[LabeledSentence],
    heldout: &[LabeledSentence],
    cfg: DedupConfig,
) -> (Vec<LabeledSentence>, CleanReport) {
    // Best heldout match per train record; independent per record, so the
    // parallel partition cannot change results.
    let best: Vec<Option<(usize, f64, usize)>> = train
        .par_iter()
        .map(|t| {
            let mut best: Option<(usize, f64, usize)> = None;
            for (hi, h) in heldout.iter().enumerate() {
                let d = levenshtein(&t.text, &h.text);
                let max_len = t.text.chars().count().max(h.text.chars().count());
                let ratio = if max_len == 0 {
                    1.0
                } else {
                    1.0 - d as f64 / max_len as f64
                };
                let better = match best {
                    None => true,
                    Some((_, br, _)) => ratio > br,
                };
                if better {
                    best = Some((hi, ratio, d));
                }
            }
            best
        })
        .collect();

    let mut kept = Vec::new();
    let mut removed = Vec::new();
    let mut max_surviving: f64 = 0.0;
    for (t, b) in train.iter().zip(best) {
        match b {
            Some((hi, ratio, d)) if ratio >= cfg.gamma => removed.push(Removal {
                train_id: t.id.clone(),
                heldout_id: heldout[hi].id.clone(),
                ratio,
                distance: d,
            }),
            Some((_, ratio, _)) => {
                max_surviving = max_surviving.max(ratio);
                kept.push(t.clone());
            }
            None => kept.push(t.clone()),
        }
    }
    let report = CleanReport {
        gamma: cfg.gamma,
        removed,
        kept: kept.len(),
        max_surviving_ratio: max_surviving,
        boundary_inclusive: true,
    };
    (kept, report)
}

/// A cross-set similarity audit row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarPair {
    pub train_id: String,
    pub heldout_id: String,
    pub ratio: f64,
    pub distance: usize,
}

/// Global top-k most similar (train, heldout) pairs, descending ratio, ties
/// broken by (train id, heldout id).
pub fn top_k_similar(
    train: &[LabeledSentence],
    heldout: &[LabeledSentence],
    k: usize,
) -> Vec<SimilarPair> {
    let mut pairs: Vec<SimilarPair> = train
        .par_iter()
        .flat_map_iter(|t| {
            heldout.iter().map(move |h| {
                let d = levenshtein(&t.text, &h.text);
                let max_len = t.text.chars().count().max(h.text.chars().count());
                let ratio = if max_len == 0 {
                    1.0
                } else {
                    1.0 - d as f64 / max_len as f64
                };
                SimilarPair {
                    train_id: t.id.clone(),
                    heldout_id: h.id.clone(),
                    ratio,
                    distance: d,
                }
            })
        })
        .collect();
    pairs.sort_by(|a, b| {
        b.ratio
            .partial_cmp(&a.ratio)
            .unwrap()
            .then_with(|| a.train_id.cmp(&b.train_id))
            .then_with(|| a.heldout_id.cmp(&b.heldout_id))
    });
    pairs.truncate(k);
    pairs
}

/// Stratified split: dev and test each get exactly half label-1 sentences,
/// the remainder becomes train with whatever ratio is left over.
pub fn split_dataset(
    data: &[LabeledSentence],
    dev_size: usize,
    test_size: usize,
    rng_seed: u64,
) -> Result<(Vec<LabeledSentence>, Vec<LabeledSentence>, Vec<LabeledSentence>), DataError> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    if dev_size % 2 != 0 || test_size % 2 != 0 {
        return Err(DataError::Invalid(format!(
            "dev ({}) and test ({}) sizes must be even to balance labels",
            dev_size, test_size
        )));
    }
    let need_per_label = dev_size / 2 + test_size / 2;
    let mut pos: Vec<usize> = Vec::new();
    let mut neg: Vec<usize> = Vec::new();
    for (i, s) in data.iter().enumerate() {
        if s.label == 1 {
            pos.push(i);
        } else {
            neg.push(i);
        }
    }
    for (name, pool) in [("label-1", &pos), ("label-0", &neg)] {
        if pool.len() < need_per_label {
            return Err(DataError::Invalid(format!(
                "need {} {} sentences for dev+test, found {}",
                need_per_label,
                name,
                pool.len()
            )));
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(rng_seed);
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);

    let mut dev_idx: Vec<usize> = Vec::new();
    let mut test_idx: Vec<usize> = Vec::new();
    dev_idx.extend(&pos[..dev_size / 2]);
    dev_idx.extend(&neg[..dev_size / 2]);
    test_idx.extend(&pos[dev_size / 2..need_per_label]);
    test_idx.extend(&neg[dev_size / 2..need_per_label]);
    dev_idx.sort_unstable();
    test_idx.sort_unstable();

    let in_heldout: std::collections::HashSet<usize> =
        dev_idx.iter().chain(test_idx.iter()).copied().collect();
    let train: Vec<LabeledSentence> = data
        .iter()
        .enumerate()
        .filter(|(i, _)| !in_heldout.contains(i))
        .map(|(_, s)| s.clone())
        .collect();
    let dev = dev_idx.iter().map(|&i| data[i].clone()).collect();
    let test = test_idx.iter().map(|&i| data[i].clone()).collect();
    Ok((train, dev, test))
}

/// Corpus statistics: line count, mean character length, share of label-1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub lines: usize,
    /// Mean length in Unicode scalar values, rounded to one decimal.
    pub mean_length: f64,
    /// Percentage of label-1 sentences, rounded to one decimal.
    pub error_ratio_pct: f64,
    /// True when the input was empty and the means are placeholders.
    pub empty: bool,
}

pub fn dataset_stats(data: &[LabeledSentence]) -> DatasetStats {
    if data.is_empty() {
        return DatasetStats {
            lines: 0,
            mean_length: 0.0,
            error_ratio_pct: 0.0,
            empty: true,
        };
    }
    let total_chars: usize = data.iter().map(|s| s.text.chars().count()).sum();
    let errors = data.iter().filter(|s| s.label == 1).count();
    let round1 = |x: f64| (x * 10.0).round() / 10.0;
    DatasetStats {
        lines: data.len(),
        mean_length: round1(total_chars as f64 / data.len() as f64),
        error_ratio_pct: round1(100.0 * errors as f64 / data.len() as f64),
        empty: false,
    }
}

/// Per-error-type sentence counts, handy when inspecting a labeled corpus.
pub fn error_type_counts(data: &[LabeledSentence]) -> BTreeMap<ErrorType, usize> {
    let mut counts = BTreeMap::new();
    for s in data {
        if let Some(t) = s.error_type {
            *counts.entry(t).or_insert(0) += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::{prop_assert, prop_assert_eq, proptest};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ls(id: &str, text: &str, label: u8) -> LabeledSentence {
        LabeledSentence {
            id: id.to_string(),
            text: text.to_string(),
            label,
            error_type: None,
        }
    }

    /// Textbook quadratic DP table, used as the oracle.
    fn lev_oracle(a: &str, b: &str) -> usize {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
        for i in 0..=a.len() {
            d[i][0] = i;
        }
        for j in 0..=b.len() {
            d[0][j] = j;
        }
        for i in 1..=a.len() {
            for j in 1..=b.len() {
                let sub = d[i - 1][j - 1] + if a[i - 1] == b[j - 1] { 0 } else { 1 };
                d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
            }
        }
        d[a.len()][b.len()]
    }

    #[test]
    fn levenshtein_basics() {
        assert_eq!(levenshtein("", ""), 0);
        assert_eq!(levenshtein("abc", "abc"), 0);
        assert_eq!(levenshtein("", "四个字符"), 4);
        assert_eq!(levenshtein("四个字符", ""), 4);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(lev_oracle("kitten", "sitting"), 3);
    }

    #[test]
    fn ratio_endpoints_and_kitten() {
        assert_eq!(lev_ratio("同一句话", "同一句话"), 1.0);
        assert_eq!(lev_ratio("", ""), 1.0);
        assert_eq!(lev_ratio("abcd", "wxyz"), 0.0);
        let r = lev_ratio("kitten", "sitting");
        assert!((r - (1.0 - 3.0 / 7.0)).abs() < 1e-9);
        assert!((r - 0.5714285714285714).abs() < 1e-9);
    }

    #[test]
    fn gamma_one_removes_only_exact_duplicates() {
        let train = vec![ls("t1", "完全相同的句子", 0), ls("t2", "几乎相同的句子", 1)];
        let heldout = vec![ls("h1", "完全相同的句子", 0)];
        let (kept, report) = clean_train(&train, &heldout, DedupConfig::new(1.0).unwrap());
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].id, "t2");
        assert_eq!(report.removed.len(), 1);
        assert_eq!(report.removed[0].heldout_id, "h1");
        assert!((report.removed[0].ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_zero_removes_everything() {
        let train = vec![ls("t1", "甲", 0), ls("t2", "乙", 1)];
        let heldout = vec![ls("h1", "丙", 0)];
        let (kept, report) = clean_train(&train, &heldout, DedupConfig::new(0.0).unwrap());
        assert!(kept.is_empty());
        assert_eq!(report.removed.len(), 2);
        assert_eq!(report.kept, 0);
    }

    fn random_cn_sentence(rng: &mut ChaCha8Rng, base: &[char]) -> String {
        let len = rng.gen_range(4..20);
        (0..len).map(|_| base[rng.gen_range(0..base.len())]).collect()
    }

    #[test]
    fn clean_decisions_match_quadratic_scan_oracle() {
        let base: Vec<char> = "我们的市场经济发展很快但是问题也不少需要认真解决".chars().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let train: Vec<LabeledSentence> = (0..200)
            .map(|i| ls(&format!("t{}", i), &random_cn_sentence(&mut rng, &base), (i % 2) as u8))
            .collect();
        let heldout: Vec<LabeledSentence> = (0..50)
            .map(|i| ls(&format!("h{}", i), &random_cn_sentence(&mut rng, &base), (i % 2) as u8))
            .collect();
        let cfg = DedupConfig::default();
        let (kept, report) = clean_train(&train, &heldout, cfg);

        // oracle: full quadratic scan with the textbook DP
        let mut expect_removed = Vec::new();
        let mut expect_kept = Vec::new();
        for t in &train {
            let mut best = -1.0f64;
            for h in &heldout {
                let max_len = t.text.chars().count().max(h.text.chars().count());
                let r = 1.0 - lev_oracle(&t.text, &h.text) as f64 / max_len as f64;
                if r > best {
                    best = r;
                }
            }
            if best >= cfg.gamma {
                expect_removed.push(t.id.clone());
            } else {
                expect_kept.push(t.id.clone());
            }
        }
        let got_removed: Vec<String> = report.removed.iter().map(|r| r.train_id.clone()).collect();
        let got_kept: Vec<String> = kept.iter().map(|s| s.id.clone()).collect();
        assert_eq!(got_removed, expect_removed);
        assert_eq!(got_kept, expect_kept);
        assert!(report.max_surviving_ratio < cfg.gamma);

        // recomputing the cross-set maximum over survivors stays below gamma
        let recomputed = kept
            .iter()
            .flat_map(|t| heldout.iter().map(move |h| lev_ratio(&t.text, &h.text)))
            .fold(0.0f64, f64::max);
        assert!(recomputed < cfg.gamma);
        assert!((recomputed - report.max_surviving_ratio).abs() < 1e-12);
    }

    #[test]
    fn top_k_covers_all_pairs_when_k_large() {
        let train = vec![ls("t1", "abc", 0), ls("t2", "abd", 0)];
        let heldout = vec![ls("h1", "abc", 0)];
        let pairs = top_k_similar(&train, &heldout, 10);
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].train_id, "t1");
        assert!((pairs[0].ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn top_k_tie_break_is_lexicographic() {
        let train = vec![ls("tb", "xx", 0), ls("ta", "yy", 0)];
        let heldout = vec![ls("h2", "zz", 0), ls("h1", "ww", 0)];
        let pairs = top_k_similar(&train, &heldout, 3);
        // all ratios 0; expect (ta,h1), (ta,h2), (tb,h1)
        assert!(pairs.iter().all(|p| p.ratio == 0.0));
        assert_eq!(
            pairs
                .iter()
                .map(|p| (p.train_id.as_str(), p.heldout_id.as_str()))
                .collect::<Vec<_>>(),
            vec![("ta", "h1"), ("ta", "h2"), ("tb", "h1")]
        );
    }

    #[test]
    fn top_k_matches_full_sort_oracle() {
        let base: Vec<char> = "春眠不觉晓处处闻啼鸟夜来风雨声花落知多少".chars().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let train: Vec<LabeledSentence> = (0..30)
            .map(|i| ls(&format!("t{:02}", i), &random_cn_sentence(&mut rng, &base), 0))
            .collect();
        let heldout: Vec<LabeledSentence> = (0..10)
            .map(|i| ls(&format!("h{:02}", i), &random_cn_sentence(&mut rng, &base), 0))
            .collect();
        let got = top_k_similar(&train, &heldout, 5);

        let mut all: Vec<(String, String, f64)> = Vec::new();
        for t in &train {
            for h in &heldout {
                let max_len = t.text.chars().count().max(h.text.chars().count());
                let r = 1.0 - lev_oracle(&t.text, &h.text) as f64 / max_len as f64;
                all.push((t.id.clone(), h.id.clone(), r));
            }
        }
        all.sort_by(|a, b| {
            b.2.partial_cmp(&a.2)
                .unwrap()
                .then_with(|| a.0.cmp(&b.0))
                .then_with(|| a.1.cmp(&b.1))
        });
        for (g, e) in got.iter().zip(all.iter().take(5)) {
            assert_eq!(g.train_id, e.0);
            assert_eq!(g.heldout_id, e.1);
            assert!((g.ratio - e.2).abs() < 1e-12);
        }
    }

    #[test]
    fn split_balances_heldout_labels_exactly() {
        let mut data = Vec::new();
        for i in 0..6 {
            data.push(ls(&format!("p{}", i), "错误句子", 1));
            data.push(ls(&format!("n{}", i), "正确句子", 0));
        }
        let (train, dev, test) = split_dataset(&data, 4, 4, 7).unwrap();
        assert_eq!(dev.len(), 4);
        assert_eq!(test.len(), 4);
        assert_eq!(dev.iter().filter(|s| s.label == 1).count(), 2);
        assert_eq!(test.iter().filter(|s| s.label == 1).count(), 2);
        assert_eq!(train.len(), 4);
        // partition: disjoint union equals the input multiset
        let mut ids: Vec<&str> = train
            .iter()
            .chain(dev.iter())
            .chain(test.iter())
            .map(|s| s.id.as_str())
            .collect();
        ids.sort_unstable();
        let mut expect: Vec<&str> = data.iter().map(|s| s.id.as_str()).collect();
        expect.sort_unstable();
        assert_eq!(ids, expect);
    }

    #[test]
    fn split_rejects_single_label_input() {
        let data: Vec<LabeledSentence> = (0..10).map(|i| ls(&format!("p{}", i), "句子", 1)).collect();
        let err = split_dataset(&data, 4, 4, 7).unwrap_err();
        assert!(err.to_string().contains("label-0"));
    }

    #[test]
    fn split_counts_verified_by_recount() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data: Vec<LabeledSentence> = (0..1000)
            .map(|i| ls(&format!("s{}", i), "一句话", if rng.gen_bool(0.7) { 1 } else { 0 }))
            .collect();
        let (train, dev, test) = split_dataset(&data, 100, 80, 13).unwrap();
        let recount = |set: &[LabeledSentence]| {
            (
                set.len(),
                set.iter().filter(|s| s.label == 1).count(),
                set.iter().filter(|s| s.label == 0).count(),
            )
        };
        assert_eq!(recount(&dev), (100, 50, 50));
        assert_eq!(recount(&test), (80, 40, 40));
        let (tn, tp, tz) = recount(&train);
        assert_eq!(tn, 1000 - 180);
        assert_eq!(tp + tz, tn);
        // determinism per seed
        let again = split_dataset(&data, 100, 80, 13).unwrap();
        assert_eq!(again.1, dev);
        assert_eq!(again.2, test);
    }

    #[test]
    fn stats_on_empty_and_tiny_sets() {
        let empty = dataset_stats(&[]);
        assert_eq!(empty.lines, 0);
        assert_eq!(empty.mean_length, 0.0);
        assert_eq!(empty.error_ratio_pct, 0.0);
        assert!(empty.empty);

        let two = vec![ls("a", "四字句子", 0), ls("b", "六个字的句子", 1)];
        let s = dataset_stats(&two);
        assert_eq!(s.lines, 2);
        assert_eq!(s.mean_length, 5.0);
        assert_eq!(s.error_ratio_pct, 50.0);
        assert!(!s.empty);
    }

    #[test]
    fn labeled_roundtrip_and_record_errors() {
        let data = vec![
            ls("a", "正确", 0),
            LabeledSentence {
                id: "b".into(),
                text: "错误".into(),
                label: 1,
                error_type: Some(ErrorType::WordOrder),
            },
        ];
        let text = write_labeled(&data);
        assert_eq!(read_labeled(&text).unwrap(), data);

        let bad = r#"{"id":"x","text":"句","label":3}"#;
        match read_labeled(bad) {
            Err(DataError::Record { record, .. }) => assert_eq!(record, 1),
            other => panic!("expected record error, got {:?}", other),
        }
        let bad_type = "{\"id\":\"x\",\"text\":\"句\",\"label\":0,\"error_type\":\"WordOrder\"}";
        assert!(read_labeled(bad_type).is_err());
    }

    proptest! {
        #[test]
        fn ratio_is_symmetric_bounded_and_exact_at_equality(a in "[a-d\u{4e00}-\u{4e09}]{0,12}", b in "[a-d\u{4e00}-\u{4e09}]{0,12}") {
            let r1 = lev_ratio(&a, &b);
            let r2 = lev_ratio(&b, &a);
            prop_assert!((r1 - r2).abs() < 1e-15);
            prop_assert!((0.0..=1.0).contains(&r1));
            prop_assert_eq!(r1 == 1.0, a == b);
            prop_assert_eq!(levenshtein(&a, &b), lev_oracle(&a, &b));
        }

        #[test]
        fn distance_triangle_inequality(
            a in "[ab\u{4e00}\u{4e8c}]{0,8}",
            b in "[ab\u{4e00}\u{4e8c}]{0,8}",
            c in "[ab\u{4e00}\u{4e8c}]{0,8}",
        ) {
            let ab = levenshtein(&a, &b);
            let bc = levenshtein(&b, &c);
            let ac = levenshtein(&a, &c);
            prop_assert!(ac <= ab + bc);
        }
    }
}
