//! Toy grammar with known parses, for end-to-end experiments that need a
//! corpus with gold dependency trees but no external parser.
//!
//! Sentences follow rigid category order (attribute before noun, subject
//! before verb, object after, ...), so both the direction and the label of
//! every arc are predictable from word categories and positions. Swapping two
//! adjacent words always breaks that order, which gives a clean synthetic
//! "word order" error for downstream classification.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataops::{ErrorType, LabeledSentence};
use crate::deptree::{DepLabel, DepNode, DepTree};

const NOUNS: [&str; 10] = [
    "工人", "市场", "报告", "学校", "经济", "城市", "文化", "科技", "音乐", "计划",
];
const VERBS: [&str; 8] = [
    "讨论", "听取", "研究", "解决", "支持", "发展", "学习", "改变",
];
const ADJECTIVES: [&str; 5] = ["重要", "巨大", "复杂", "先进", "优秀"];
const ADVERBS: [&str; 4] = ["非常", "已经", "认真", "逐渐"];
const PARTICLES: [&str; 2] = ["了", "着"];
const CONJUNCTIONS: [&str; 2] = ["并", "和"];
const PREPOSITIONS: [&str; 2] = ["在", "对"];
const COMPLEMENTS: [&str; 2] = ["完", "好"];

/// Every character the grammar can emit, for vocabulary construction.
pub fn char_pool() -> String {
    let mut chars: Vec<char> = NOUNS
        .iter()
        .chain(&VERBS)
        .chain(&ADJECTIVES)
        .chain(&ADVERBS)
        .chain(&PARTICLES)
        .chain(&CONJUNCTIONS)
        .chain(&PREPOSITIONS)
        .chain(&COMPLEMENTS)
        .flat_map(|w| w.chars())
        .collect();
    chars.sort_unstable();
    chars.dedup();
    chars.into_iter().collect()
}

struct TreeBuilder {
    forms: Vec<String>,
    heads: Vec<usize>,
    labels: Vec<String>,
}

impl TreeBuilder {
    fn new() -> Self {
        TreeBuilder {
            forms: Vec::new(),
            heads: Vec::new(),
            labels: Vec::new(),
        }
    }

    /// Appends a word; `head` is the 1-based id of an already- or soon-to-be
    /// placed word (0 = root). Returns the new word's 1-based id.
    fn push(&mut self, form: &str, head: usize, label: &str) -> usize {
        self.forms.push(form.to_string());
        self.heads.push(head);
        self.labels.push(label.to_string());
        self.forms.len()
    }

    fn next_id(&self) -> usize {
        self.forms.len() + 1
    }

    fn build(self, sentence_id: String) -> DepTree {
        let nodes = self
            .forms
            .into_iter()
            .zip(self.heads)
            .zip(self.labels)
            .enumerate()
            .map(|(i, ((form, head), label))| DepNode {
                id: i + 1,
                form,
                head,
                label,
            })
            .collect();
        DepTree::new(nodes, sentence_id).expect("generated tree is valid")
    }
}

/// Samples one sentence with its parse.
pub fn sample_sentence(rng: &mut ChaCha8Rng, sentence_id: String) -> DepTree {
    let pick = |rng: &mut ChaCha8Rng, pool: &[&str]| pool[rng.gen_range(0..pool.len())].to_string();
    let mut b = TreeBuilder::new();

    let coordinated = rng.gen_bool(0.35);

    // Subject phrase: [adjective] noun, attribute attached to its noun.
    let subj_attr = rng.gen_bool(0.4);
    let attr_form = pick(rng, &ADJECTIVES);
    if subj_attr {
        // head id is the noun, placed right after
        let noun_id = b.next_id() + 1;
        b.push(&attr_form, noun_id, "ATT");
    }
    let subj = b.push(&pick(rng, &NOUNS), 0, "SBV"); // head patched to the verb below

    // Optional adverb, then optional preposition phrase, both before the verb.
    let mut preverb: Vec<usize> = Vec::new();
    if rng.gen_bool(0.4) {
        preverb.push(b.push(&pick(rng, &ADVERBS), 0, "ADV"));
    }
    if !coordinated && rng.gen_bool(0.3) {
        let prep = b.push(&pick(rng, &PREPOSITIONS), 0, "ADV");
        b.push(&pick(rng, &NOUNS), prep, "POB");
        preverb.push(prep);
    }

    let verb = b.push(&pick(rng, &VERBS), 0, "HED");
    b.heads[subj - 1] = verb;
    for id in preverb {
        b.heads[id - 1] = verb;
    }

    // Object owner: the main verb, or the second verb of a coordination.
    let object_head = if coordinated {
        let second_verb_id = b.next_id() + 1;
        b.push(&pick(rng, &CONJUNCTIONS), second_verb_id, "LAD");
        let v2 = b.push(&pick(rng, &VERBS), verb, "COO");
        if rng.gen_bool(0.5) {
            b.push(&pick(rng, &PARTICLES), v2, "RAD");
        }
        v2
    } else {
        if rng.gen_bool(0.35) {
            b.push(&pick(rng, &PARTICLES), verb, "RAD");
        }
        if rng.gen_bool(0.25) {
            b.push(&pick(rng, &COMPLEMENTS), verb, "CMP");
        }
        verb
    };

    // Object phrase: [adjective] noun.
    if rng.gen_bool(0.85) {
        if rng.gen_bool(0.35) {
            let noun_id = b.next_id() + 1;
            b.push(&pick(rng, &ADJECTIVES), noun_id, "ATT");
        }
        b.push(&pick(rng, &NOUNS), object_head, "VOB");
    }

    b.build(sentence_id)
}

/// A parsed corpus of `n` sentences, deterministic per seed.
pub fn generate_corpus(seed: u64, n: usize) -> Vec<DepTree> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| sample_sentence(&mut rng, format!("syn{}", i + 1)))
        .collect()
}

/// Swaps one random adjacent word pair; the result never follows the grammar's
/// category order, so it is a genuine word-order error.
pub fn swap_adjacent_words(rng: &mut ChaCha8Rng, tree: &DepTree) -> Option<String> {
    let n = tree.len();
    if n < 2 {
        return None;
    }
    let forms: Vec<&str> = tree.forms().collect();
    // avoid no-op swaps between identical forms
    let candidates: Vec<usize> = (0..n - 1).filter(|&i| forms[i] != forms[i + 1]).collect();
    let &i = candidates.choose(rng)?;
    let mut swapped = forms.clone();
    swapped.swap(i, i + 1);
    Some(swapped.concat())
}

/// Balanced labeled dataset for the synthetic downstream task: label 0 keeps
/// the generated sentence, label 1 swaps one adjacent word pair.
pub fn swap_error_dataset(seed: u64, n: usize, id_prefix: &str) -> Vec<LabeledSentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut i = 0usize;
    while out.len() < n {
        i += 1;
        let tree = sample_sentence(&mut rng, format!("{}{}", id_prefix, i));
        let corrupt = out.len() % 2 == 1;
        if corrupt {
            let Some(text) = swap_adjacent_words(&mut rng, &tree) else {
                continue;
            };
            out.push(LabeledSentence {
                id: format!("{}{}", id_prefix, i),
                text,
                label: 1,
                error_type: Some(ErrorType::WordOrder),
            });
        } else {
            out.push(LabeledSentence {
                id: format!("{}{}", id_prefix, i),
                text: tree.forms().collect(),
                label: 0,
                error_type: None,
            });
        }
    }
    out
}

/// Uniform random rooted tree over `n` words with random forms and labels;
/// purely structural, for oracle-style tests.
pub fn random_labeled_tree(rng: &mut ChaCha8Rng, n: usize, char_pool: &[char]) -> DepTree {
    assert!(n >= 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut heads = vec![0usize; n];
    for k in 1..n {
        heads[order[k]] = order[rng.gen_range(0..k)] + 1;
    }
    let nodes = (0..n)
        .map(|i| {
            let len = rng.gen_range(1..=2);
            let form: String = (0..len)
                .map(|_| char_pool[rng.gen_range(0..char_pool.len())])
                .collect();
            let label = if heads[i] == 0 {
                "HED".to_string()
            } else if rng.gen_bool(0.15) {
                "WP".to_string()
            } else {
                DepLabel::ALL[rng.gen_range(0..12)].as_str().to_string()
            };
            DepNode {
                id: i + 1,
                form,
                head: heads[i],
                label,
            }
        })
        .collect();
    DepTree::new(nodes, "rand").unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn corpus_is_deterministic_and_parses_validate() {
        let a = generate_corpus(3, 200);
        let b = generate_corpus(3, 200);
        assert_eq!(a.len(), 200);
        assert_eq!(a, b);
        for t in &a {
            assert!(t.len() >= 2);
            assert!(t.len() <= 10);
        }
    }

    #[test]
    fn char_pool_stays_small() {
        let pool = char_pool();
        assert!(pool.chars().count() <= 60, "pool size {}", pool.chars().count());
        let corpus = generate_corpus(1, 500);
        let seen: HashSet<char> = corpus.iter().flat_map(|t| t.forms().flat_map(|f| f.chars())).collect();
        let allowed: HashSet<char> = pool.chars().collect();
        assert!(seen.is_subset(&allowed));
    }

    #[test]
    fn swapped_sentences_differ_and_dataset_balances() {
        let data = swap_error_dataset(9, 100, "d");
        assert_eq!(data.len(), 100);
        assert_eq!(data.iter().filter(|s| s.label == 1).count(), 50);
        for s in &data {
            assert!(!s.text.is_empty());
            assert_eq!(s.error_type.is_some(), s.label == 1);
        }
    }

    #[test]
    fn grammar_labels_are_position_predictable() {
        // every arc label the grammar uses is in the 12-label set except HED
        let corpus = generate_corpus(17, 300);
        for t in &corpus {
            for node in t.nodes() {
                if node.head == 0 {
                    assert_eq!(node.label, "HED");
                } else {
                    assert!(node.label.parse::<DepLabel>().is_ok(), "label {}", node.label);
                }
            }
        }
    }
}
