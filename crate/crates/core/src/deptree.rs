//! Dependency syntax trees and ordered word-pair relation queries.
//!
//! A tree is read from CoNLL-U-style input (columns ID, FORM, HEAD, DEPREL).
//! Word positions in the public API are 0-based; the 1-based CoNLL-U ids live
//! only in [`DepNode::id`] / [`DepNode::head`] as read from the input.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// One word of a parsed sentence, as read from its CoNLL-U row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepNode {
    /// 1-based surface position (CoNLL-U ID column).
    pub id: usize,
    /// Word text.
    pub form: String,
    /// 1-based id of the head word; 0 means this word is the root.
    pub head: usize,
    /// Arc label exactly as read from the DEPREL column.
    pub label: String,
}

/// A single sentence's dependency parse. Construction validates that the head
/// links form one rooted tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepTree {
    nodes: Vec<DepNode>,
    sentence_id: String,
}

/// Two-way directionality of an adjacent ordered pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationClass2 {
    /// The first word's head is the second word.
    Child,
    /// The second word's head is the first word.
    Parent,
}

/// Three-way relation: adjacency direction, or `Others` for everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationClass3 {
    Child,
    Parent,
    Others,
}

/// The closed 12-label set used for relation-label prediction. Arcs carrying
/// any other label (HED, punctuation, ...) are outside this set.
///
/// Variant order fixes the class ids used in serialized pair examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DepLabel {
    Sbv,
    Fob,
    Adv,
    Cmp,
    Vob,
    Dbl,
    Iob,
    Pob,
    Lad,
    Coo,
    Att,
    Rad,
}

impl DepLabel {
    pub const ALL: [DepLabel; 12] = [
        DepLabel::Sbv,
        DepLabel::Fob,
        DepLabel::Adv,
        DepLabel::Cmp,
        DepLabel::Vob,
        DepLabel::Dbl,
        DepLabel::Iob,
        DepLabel::Pob,
        DepLabel::Lad,
        DepLabel::Coo,
        DepLabel::Att,
        DepLabel::Rad,
    ];

    /// Stable class id (0..12) for serialized examples and classifier heads.
    pub fn class_id(self) -> usize {
        Self::ALL.iter().position(|&l| l == self).unwrap()
    }

    pub fn from_class_id(id: usize) -> Option<DepLabel> {
        Self::ALL.get(id).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DepLabel::Sbv => "SBV",
            DepLabel::Fob => "FOB",
            DepLabel::Adv => "ADV",
            DepLabel::Cmp => "CMP",
            DepLabel::Vob => "VOB",
            DepLabel::Dbl => "DBL",
            DepLabel::Iob => "IOB",
            DepLabel::Pob => "POB",
            DepLabel::Lad => "LAD",
            DepLabel::Coo => "COO",
            DepLabel::Att => "ATT",
            DepLabel::Rad => "RAD",
        }
    }
}

impl FromStr for DepLabel {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        DepLabel::ALL
            .iter()
            .copied()
            .find(|l| l.as_str() == s)
            .ok_or(())
    }
}

impl fmt::Display for DepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum DepTreeError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("sentence {sentence_id}: {reason}")]
    InvalidTree { sentence_id: String, reason: String },
    #[error("word index {index} out of range for sentence of {len} words")]
    IndexOutOfRange { index: usize, len: usize },
}

impl DepTree {
    /// Validates the head links and builds the tree. Rejected inputs are never
    /// silently repaired: a corrupted parse would poison downstream labels.
    pub fn new(nodes: Vec<DepNode>, sentence_id: impl Into<String>) -> Result<Self, DepTreeError> {
        let sentence_id = sentence_id.into();
        let invalid = |reason: String| DepTreeError::InvalidTree {
            sentence_id: sentence_id.clone(),
            reason,
        };
        let n = nodes.len();
        if n == 0 {
            return Err(invalid("empty sentence".into()));
        }
        for (pos, node) in nodes.iter().enumerate() {
            if node.id != pos + 1 {
                return Err(invalid(format!(
                    "node at position {} has id {}, expected {}",
                    pos,
                    node.id,
                    pos + 1
                )));
            }
            if node.head > n {
                return Err(invalid(format!(
                    "node {} has head {} beyond sentence length {}",
                    node.id, node.head, n
                )));
            }
            if node.head == node.id {
                return Err(invalid(format!("node {} is its own head", node.id)));
            }
        }
        let roots: Vec<usize> = nodes
            .iter()
            .filter(|nd| nd.head == 0)
            .map(|nd| nd.id)
            .collect();
        if roots.len() != 1 {
            return Err(invalid(format!(
                "expected exactly one root, found {} ({:?})",
                roots.len(),
                roots
            )));
        }
        // Each node has one head and there is one root, so the structure is a
        // tree iff no head chain cycles back on itself.
        for start in 0..n {
            let mut seen = vec![false; n];
            let mut cur = start;
            loop {
                if seen[cur] {
                    return Err(invalid(format!(
                        "cycle through node {}",
                        nodes[cur].id
                    )));
                }
                seen[cur] = true;
                match nodes[cur].head {
                    0 => break,
                    h => cur = h - 1,
                }
            }
        }
        Ok(DepTree { nodes, sentence_id })
    }

    pub fn sentence_id(&self) -> &str {
        &self.sentence_id
    }

    pub fn nodes(&self) -> &[DepNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn forms(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.form.as_str())
    }

    fn check_index(&self, i: usize) -> Result<(), DepTreeError> {
        if i < self.nodes.len() {
            Ok(())
        } else {
            Err(DepTreeError::IndexOutOfRange {
                index: i,
                len: self.nodes.len(),
            })
        }
    }

    /// 0-based position of word `i`'s head, or `None` for the root.
    pub fn head_of(&self, i: usize) -> Result<Option<usize>, DepTreeError> {
        self.check_index(i)?;
        Ok(match self.nodes[i].head {
            0 => None,
            h => Some(h - 1),
        })
    }

    /// Undirected path length between words `i` and `j` in the tree.
    pub fn tree_distance(&self, i: usize, j: usize) -> Result<usize, DepTreeError> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Ok(0);
        }
        // Walk both ancestor paths to the root and meet at the lowest common
        // ancestor.
        let path_to_root = |mut cur: usize| {
            let mut path = vec![cur];
            while let Some(h) = match self.nodes[cur].head {
                0 => None,
                h => Some(h - 1),
            } {
                path.push(h);
                cur = h;
            }
            path
        };
        let pi = path_to_root(i);
        let pj = path_to_root(j);
        let mut common = 0;
        while common < pi.len().min(pj.len())
            && pi[pi.len() - 1 - common] == pj[pj.len() - 1 - common]
        {
            common += 1;
        }
        Ok(pi.len() + pj.len() - 2 * common)
    }

    /// Two-way direction of the ordered pair `(i, j)`; `None` unless the words
    /// are tree-adjacent.
    pub fn classify_pair2(&self, i: usize, j: usize) -> Result<Option<RelationClass2>, DepTreeError> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Ok(None);
        }
        if self.nodes[i].head == self.nodes[j].id {
            Ok(Some(RelationClass2::Child))
        } else if self.nodes[j].head == self.nodes[i].id {
            Ok(Some(RelationClass2::Parent))
        } else {
            Ok(None)
        }
    }

    /// Total three-way relation of the ordered pair `(i, j)`.
    pub fn classify_pair3(&self, i: usize, j: usize) -> Result<RelationClass3, DepTreeError> {
        Ok(match self.classify_pair2(i, j)? {
            Some(RelationClass2::Child) => RelationClass3::Child,
            Some(RelationClass2::Parent) => RelationClass3::Parent,
            None => RelationClass3::Others,
        })
    }

    /// Label of the arc joining `i` and `j`, regardless of pair order, when
    /// the words are tree-adjacent and the label is in the 12-label set.
    pub fn dep_label(&self, i: usize, j: usize) -> Result<Option<DepLabel>, DepTreeError> {
        self.check_index(i)?;
        self.check_index(j)?;
        let raw = if self.nodes[i].head == self.nodes[j].id {
            Some(self.nodes[i].label.as_str())
        } else if self.nodes[j].head == self.nodes[i].id {
            Some(self.nodes[j].label.as_str())
        } else {
            None
        };
        Ok(raw.and_then(|s| DepLabel::from_str(s).ok()))
    }

    /// All arcs as `(dependent, head)` 0-based position pairs, in surface
    /// order of the dependent.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, nd)| nd.head != 0)
            .map(|(i, nd)| (i, nd.head - 1))
    }
}

/// Parses CoNLL-U-like text into one tree per sentence block, validating each.
/// Stops at the first malformed line or invalid tree.
pub fn read_conllu(text: &str) -> Result<Vec<DepTree>, DepTreeError> {
    read_conllu_lenient(text).into_iter().collect()
}

/// Like [`read_conllu`] but keeps going after bad sentences, yielding one
/// result per sentence block. Used for validation summaries.
pub fn read_conllu_lenient(text: &str) -> Vec<Result<DepTree, DepTreeError>> {
    let mut out = Vec::new();
    let mut nodes: Vec<DepNode> = Vec::new();
    let mut block_bad: Option<DepTreeError> = None;
    let mut sentence_index = 0usize;

    let flush = |nodes: &mut Vec<DepNode>,
                     block_bad: &mut Option<DepTreeError>,
                     sentence_index: &mut usize,
                     out: &mut Vec<Result<DepTree, DepTreeError>>| {
        if nodes.is_empty() && block_bad.is_none() {
            return;
        }
        *sentence_index += 1;
        let id = format!("s{}", sentence_index);
        match block_bad.take() {
            Some(err) => out.push(Err(err)),
            None => out.push(DepTree::new(std::mem::take(nodes), id)),
        }
        nodes.clear();
    };

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let trimmed = line.trim_end_matches(['\r']);
        if trimmed.trim().is_empty() {
            flush(&mut nodes, &mut block_bad, &mut sentence_index, &mut out);
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        if block_bad.is_some() {
            continue; // skip the rest of an already-failed block
        }
        match parse_token_line(trimmed, lineno) {
            Ok(node) => nodes.push(node),
            Err(e) => block_bad = Some(e),
        }
    }
    flush(&mut nodes, &mut block_bad, &mut sentence_index, &mut out);
    out
}

fn parse_token_line(line: &str, lineno: usize) -> Result<DepNode, DepTreeError> {
    let err = |msg: String| DepTreeError::Parse { line: lineno, msg };
    // Tab-separated in real files; whitespace-separated input is accepted so
    // hand-written fixtures stay readable.
    let cols: Vec<&str> = if line.contains('\t') {
        line.split('\t').collect()
    } else {
        line.split_whitespace().collect()
    };
    let (id_s, form, head_s, label) = match cols.len() {
        0..=3 => {
            return Err(err(format!(
                "expected at least 4 columns (ID FORM HEAD DEPREL), got {}",
                cols.len()
            )))
        }
        // Short form: ID FORM HEAD DEPREL.
        4..=6 => (cols[0], cols[1], cols[2], cols[3]),
        // Full CoNLL-U: HEAD and DEPREL are columns 7 and 8.
        _ => (cols[0], cols[1], cols[6], cols[7]),
    };
    let id: usize = id_s
        .parse()
        .map_err(|_| err(format!("bad ID column {:?}", id_s)))?;
    let head: usize = head_s
        .parse()
        .map_err(|_| err(format!("bad HEAD column {:?}", head_s)))?;
    if form.is_empty() {
        return Err(err("empty FORM column".into()));
    }
    Ok(DepNode {
        id,
        form: form.to_string(),
        head,
        label: label.to_string(),
    })
}

/// Breadth-first shortest path over the undirected arc graph. Only used as an
/// independent check of [`DepTree::tree_distance`]; kept here so callers can
/// audit distances on suspect parses.
pub fn bfs_distance(tree: &DepTree, i: usize, j: usize) -> Option<usize> {
    let n = tree.len();
    if i >= n || j >= n {
        return None;
    }
    let mut adj = vec![Vec::new(); n];
    for (dep, head) in tree.arcs() {
        adj[dep].push(head);
        adj[head].push(dep);
    }
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    dist[i] = 0;
    queue.push_back(i);
    while let Some(u) = queue.pop_front() {
        if u == j {
            return Some(dist[u]);
        }
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    None
}
