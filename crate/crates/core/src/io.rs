//! Plain-text edge lists, walk sequences and two-column tables.
//!
//! Edge-list format: UTF-8, one edge per line as two whitespace-separated
//! labels. Lines starting with `#` and blank lines are ignored.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::dynamics::WalkSequence;
use crate::graph::{Dropped, Graph, NodeId};
use crate::metrics::NodeMetricVector;

/// A graph together with the external label of every node.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Vec<String>,
    pub dropped: Dropped,
}

impl LabeledGraph {
    /// Wraps a graph whose labels are its own decimal ids.
    pub fn numbered(graph: Graph) -> Self {
        let labels = (0..graph.node_count()).map(|i| i.to_string()).collect();
        LabeledGraph {
            graph,
            labels,
            dropped: Dropped::default(),
        }
    }

    pub fn label_index(&self) -> HashMap<&str, NodeId> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect()
    }

    /// Restricts to the largest connected component, carrying labels along.
    pub fn largest_connected_component(&self) -> LabeledGraph {
        let (graph, map) = self.graph.largest_connected_component();
        LabeledGraph {
            graph,
            labels: map.iter().map(|&i| self.labels[i].clone()).collect(),
            dropped: self.dropped,
        }
    }

    pub fn to_edge_list(&self) -> String {
        write_edge_list(&self.graph, &self.labels)
    }
}

fn is_skipped(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

/// Parses an edge list. Labels get ids in order of first appearance.
pub fn parse_edge_list(text: &str) -> Result<LabeledGraph> {
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if is_skipped(line) {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected 2 node labels, found {}", tokens.len()),
            });
        }
        let mut ids = [0; 2];
        for (slot, tok) in ids.iter_mut().zip(tokens) {
            *slot = match index.get(tok) {
                Some(&id) => id,
                None => {
                    let id = labels.len();
                    index.insert(tok.to_string(), id);
                    labels.push(tok.to_string());
                    id
                }
            };
        }
        edges.push((ids[0], ids[1]));
    }
    let (graph, dropped) = Graph::from_edges(labels.len(), edges)?;
    Ok(LabeledGraph {
        graph,
        labels,
        dropped,
    })
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<LabeledGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text)
}

/// Serializes `g` with the given labels.
///
/// Edges are emitted so that labels first appear in id order whenever the
/// graph admits such an ordering (always the case for graphs produced by
/// [`parse_edge_list`]), which makes parse/write/parse label-stable.
/// Isolated nodes cannot be represented and are omitted.
pub fn write_edge_list(g: &Graph, labels: &[String]) -> String {
    let n = g.node_count();
    let mut introduced = vec![false; n];
    // Edges (min, max) written ahead of the max endpoint's turn.
    let mut early: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut out = String::new();
    let emit = |out: &mut String, a: NodeId, b: NodeId| {
        let _ = writeln!(out, "{} {}", labels[a], labels[b]);
    };
    for k in 0..n {
        let nbrs = g.neighbors(k);
        if !introduced[k] && !nbrs.is_empty() {
            let j = nbrs[0];
            if j > k {
                // No smaller neighbor: k was introduced together with j.
                if introduced[j] {
                    emit(&mut out, j, k);
                } else {
                    emit(&mut out, k, j);
                    introduced[j] = true;
                }
                early.insert((k, j));
            }
            introduced[k] = true;
        }
        for &i in nbrs.iter().take_while(|&&i| i < k) {
            if !early.remove(&(i, k)) {
                emit(&mut out, i, k);
            }
        }
    }
    out
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Two-column whitespace table `label community`.
pub fn write_membership_text(labels: &[String], membership: &[usize]) -> String {
    let mut out = String::new();
    for (label, c) in labels.iter().zip(membership) {
        let _ = writeln!(out, "{label} {c}");
    }
    out
}

/// Two-column CSV with header `node,<value_name>`.
pub fn write_node_csv<T: std::fmt::Display>(labels: &[String], value_name: &str, values: &[T]) -> String {
    let mut out = format!("node,{value_name}\n");
    for (label, v) in labels.iter().zip(values) {
        let _ = writeln!(out, "{label},{v}");
    }
    out
}

/// Wide CSV: a `node` column followed by one column per metric.
pub fn write_metric_table(labels: &[String], columns: &[NodeMetricVector]) -> String {
    let mut out = String::from("node");
    for c in columns {
        let _ = write!(out, ",{}", c.metric);
    }
    out.push('\n');
    for (i, label) in labels.iter().enumerate() {
        out.push_str(label);
        for c in columns {
            let _ = write!(out, ",{}", c.values[i]);
        }
        out.push('\n');
    }
    out
}

/// Walk sequence file: provenance as `# key: value` comment lines, then one
/// node label per line.
pub fn write_sequence(seq: &WalkSequence, labels: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# dynamics: {}", seq.dynamics.kind);
    let _ = writeln!(out, "# lambda: {}", seq.dynamics.lambda);
    let _ = writeln!(out, "# seed: {}", seq.seed);
    let _ = writeln!(out, "# graph: {}", seq.graph_ref);
    let _ = writeln!(out, "# length: {}", seq.nodes.len());
    for &i in &seq.nodes {
        let _ = writeln!(out, "{}", labels[i]);
    }
    out
}

/// Same sequence as a one-column CSV with header `node`.
pub fn write_sequence_csv(seq: &WalkSequence, labels: &[String]) -> String {
    let mut out = String::from("node\n");
    for &i in &seq.nodes {
        let _ = writeln!(out, "{}", labels[i]);
    }
    out
}

/// `# key: value` provenance pairs of a sequence file.
pub type SequenceMeta = Vec<(String, String)>;

/// Labels of a sequence file, in walk order. Provenance comments are
/// returned as key/value pairs.
pub fn parse_sequence(text: &str) -> Result<(Vec<String>, SequenceMeta)> {
    let mut labels = Vec::new();
    let mut meta = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let t = line.trim();
        if let Some(c) = t.strip_prefix('#') {
            if let Some((k, v)) = c.split_once(':') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        if t.is_empty() {
            continue;
        }
        if t.split_whitespace().count() != 1 {
            return Err(Error::Parse {
                line: lineno + 1,
                message: "expected one node label per line".into(),
            });
        }
        labels.push(t.to_string());
    }
    Ok((labels, meta))
}

/// Labels of a one-column sequence CSV written by [`write_sequence_csv`].
pub fn parse_sequence_csv(text: &str) -> Result<Vec<String>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == "node" => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "expected header `node`".into(),
            })
        }
    }
    lines
        .map(|(lineno, l)| {
            let t = l.trim();
            if t.contains(',') {
                Err(Error::Parse {
                    line: lineno + 1,
                    message: "expected a single column".into(),
                })
            } else {
                Ok(t.to_string())
            }
        })
        .collect()
}
