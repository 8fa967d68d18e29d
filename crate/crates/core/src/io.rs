//! Readers and writers: SNAP-style edge lists, Matrix Market coordinate
//! files, two-column partition files and JSON.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::partition::Partition;

/// Bijection between external node labels and dense node ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct LabelMap {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl From<Vec<String>> for LabelMap {
    fn from(labels: Vec<String>) -> Self {
        let mut map = LabelMap::default();
        for label in labels {
            map.intern(&label);
        }
        map
    }
}

impl From<LabelMap> for Vec<String> {
    fn from(map: LabelMap) -> Self {
        map.labels
    }
}

impl LabelMap {
    /// Labels `"0"`, `"1"`, ... for `n` nodes.
    pub fn identity(n: usize) -> Self {
        (0..n).map(|v| v.to_string()).collect::<Vec<_>>().into()
    }

    /// Id of `label`, assigning the next id on first sight.
    pub fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// A parsed graph with its labels.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub labels: LabelMap,
    pub self_loops_dropped: usize,
}

const ISOLATED_DIRECTIVE: &str = "# isolated:";

/// Reads whitespace-separated `u v` lines. Lines starting with `#` or `%`
/// are comments; extra columns (weights, timestamps) are ignored. The graph
/// is symmetrized, self-loops are dropped and counted, duplicates collapse.
/// Labels get ids in order of first appearance.
pub fn read_edge_list<R: Read>(reader: R) -> Result<LoadedGraph> {
    let mut labels = LabelMap::default();
    let mut edges = Vec::new();
    let mut self_loops_dropped = 0;
    for (number, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix(ISOLATED_DIRECTIVE) {
            for label in rest.split_whitespace() {
                labels.intern(label);
            }
            continue;
        }
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: number + 1,
                message: format!("expected two node labels, found {trimmed:?}"),
            });
        };
        let (u, v) = (labels.intern(a), labels.intern(b));
        if u == v {
            self_loops_dropped += 1;
        } else {
            edges.push((u, v));
        }
    }
    Ok(LoadedGraph {
        graph: Graph::new(labels.len(), edges)?,
        labels,
        self_loops_dropped,
    })
}

/// Reads a Matrix Market coordinate file (`pattern`, `real` or `integer`
/// field; `general` or `symmetric`). Entries are 1-based; values are ignored,
/// diagonal entries are dropped and counted, and the symmetric closure is
/// taken. Node `i` gets label `"i"`.
pub fn read_matrix_market<R: Read>(reader: R) -> Result<LoadedGraph> {
    let mut lines = BufReader::new(reader).lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::Empty("Matrix Market input")),
    };
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    let supported = tokens.len() == 5
        && tokens[0] == "%%matrixmarket"
        && tokens[1] == "matrix"
        && tokens[2] == "coordinate"
        && matches!(tokens[3].as_str(), "pattern" | "real" | "integer")
        && matches!(tokens[4].as_str(), "general" | "symmetric");
    if !supported {
        return Err(Error::UnsupportedFormat(format!("Matrix Market header {header:?}")));
    }

    let mut size: Option<usize> = None;
    let mut edges = Vec::new();
    let mut self_loops_dropped = 0;
    for (number, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let parse_error = |message: String| Error::Parse {
            line: number + 1,
            message,
        };
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let index = |k: usize| -> Result<usize> {
            fields
                .get(k)
                .ok_or_else(|| parse_error(format!("missing field {} in {trimmed:?}", k + 1)))?
                .parse::<usize>()
                .map_err(|e| parse_error(format!("{e} in {trimmed:?}")))
        };
        match size {
            None => {
                let (rows, cols) = (index(0)?, index(1)?);
                index(2)?;
                if rows != cols {
                    return Err(parse_error(format!(
                        "adjacency matrix must be square, got {rows}x{cols}"
                    )));
                }
                size = Some(rows);
            }
            Some(n) => {
                let (i, j) = (index(0)?, index(1)?);
                for x in [i, j] {
                    if x == 0 || x > n {
                        return Err(parse_error(format!("index {x} outside 1..={n}")));
                    }
                }
                if i == j {
                    self_loops_dropped += 1;
                } else {
                    edges.push((i - 1, j - 1));
                }
            }
        }
    }
    let n = size.ok_or(Error::Empty("Matrix Market size line"))?;
    Ok(LoadedGraph {
        graph: Graph::new(n, edges)?,
        labels: (1..=n).map(|i| i.to_string()).collect::<Vec<_>>().into(),
        self_loops_dropped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum GraphFormat {
    #[default]
    Auto,
    Edgelist,
    Mtx,
}

/// Reads a graph file; `Auto` picks Matrix Market when the file starts with
/// its banner and an edge list otherwise.
pub fn read_graph_file(path: &Path, format: GraphFormat) -> Result<LoadedGraph> {
    let text = std::fs::read_to_string(path)?;
    read_graph_str(&text, format)
}

pub fn read_graph_str(text: &str, format: GraphFormat) -> Result<LoadedGraph> {
    let format = match format {
        GraphFormat::Auto if text.trim_start().to_ascii_lowercase().starts_with("%%matrixmarket") => GraphFormat::Mtx,
        GraphFormat::Auto => GraphFormat::Edgelist,
        f => f,
    };
    match format {
        GraphFormat::Mtx => read_matrix_market(text.as_bytes()),
        _ => read_edge_list(text.as_bytes()),
    }
}

/// Writes `g` as a tab-separated edge list with a SNAP-style header. Nodes
/// without edges are listed in an `# isolated:` comment so the node set
/// survives a round trip.
pub fn write_edge_list(g: &Graph, labels: &LabelMap) -> String {
    let mut out = format!("# Nodes: {} Edges: {}\n", g.node_count(), g.edge_count());
    let isolated: Vec<&str> = (0..g.node_count())
        .filter(|&v| g.deg(v) == 0)
        .map(|v| labels.label(v))
        .collect();
    if !isolated.is_empty() {
        let _ = writeln!(out, "{ISOLATED_DIRECTIVE} {}", isolated.join(" "));
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{}\t{}", labels.label(u), labels.label(v));
    }
    out
}

/// `label<TAB>community` per node.
pub fn write_partition(partition: &Partition, labels: &LabelMap) -> String {
    let mut out = String::new();
    for (v, &c) in partition.assignment().iter().enumerate() {
        let _ = writeln!(out, "{}\t{c}", labels.label(v));
    }
    out
}

/// Parses the two-column partition format against known labels.
pub fn read_partition(text: &str, labels: &LabelMap) -> Result<Partition> {
    let mut map = HashMap::new();
    for (number, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parse_error = |message: String| Error::Parse {
            line: number + 1,
            message,
        };
        let mut tokens = trimmed.split_whitespace();
        let (Some(label), Some(community)) = (tokens.next(), tokens.next()) else {
            return Err(parse_error(format!("expected label and community in {trimmed:?}")));
        };
        let node = labels
            .id(label)
            .ok_or_else(|| parse_error(format!("unknown node label {label:?}")))?;
        let community = community
            .parse::<usize>()
            .map_err(|e| parse_error(format!("{e} in {trimmed:?}")))?;
        map.insert(node, community);
    }
    Partition::from_assignment(labels.len(), &map)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_examples() {
        let g = read_edge_list("# comment\n1 2\n2 1\n".as_bytes()).unwrap();
        assert_eq!((g.graph.node_count(), g.graph.edge_count()), (2, 1));

        let g = read_edge_list("a b\nb c\n".as_bytes()).unwrap();
        assert_eq!(g.graph, Graph::path(3));
        assert_eq!(g.labels.label(2), "c");

        let g = read_edge_list("1 1\n1 2\n".as_bytes()).unwrap();
        assert_eq!(g.graph.edge_count(), 1);
        assert_eq!(g.self_loops_dropped, 1);
    }

    #[test]
    fn edge_list_malformed_line_reports_number() {
        let err = read_edge_list("1 2\n% note\n3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn edge_list_ignores_extra_columns() {
        let g = read_edge_list("1 2 0.5\n2 3 1.0 17\n".as_bytes()).unwrap();
        assert_eq!(g.graph, Graph::path(3));
    }

    #[test]
    fn matrix_market_examples() {
        let text = "%%MatrixMarket matrix coordinate pattern symmetric\n% c\n3 3 2\n2 1\n3 2\n";
        let g = read_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(g.graph, Graph::path(3));

        let text = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 3.0\n1 2 1.5\n";
        let g = read_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(g.graph.edge_count(), 1);
        assert_eq!(g.self_loops_dropped, 1);

        let text = "%%MatrixMarket matrix coordinate pattern general\n4 4 1\n5 1\n";
        assert!(matches!(
            read_matrix_market(text.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));

        let text = "%%MatrixMarket matrix array real general\n2 2\n1\n";
        assert!(matches!(
            read_matrix_market(text.as_bytes()),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn auto_sniffing() {
        let mtx = "%%MatrixMarket matrix coordinate pattern symmetric\n2 2 1\n2 1\n";
        assert_eq!(read_graph_str(mtx, GraphFormat::Auto).unwrap().labels.label(0), "1");
        let el = "5 6\n";
        assert_eq!(read_graph_str(el, GraphFormat::Auto).unwrap().labels.label(0), "5");
    }

    #[test]
    fn k4_round_trip() {
        let k4 = Graph::complete(4);
        let text = write_edge_list(&k4, &LabelMap::identity(4));
        let back = read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(back.graph, k4);
        assert_eq!(back.labels, LabelMap::identity(4));
    }

    #[test]
    fn isolated_nodes_survive_round_trip() {
        let g = Graph::new(4, [(1, 3)]).unwrap();
        let labels = LabelMap::from(vec!["a".into(), "b".into(), "c".into(), "d".into()]);
        let back = read_edge_list(write_edge_list(&g, &labels).as_bytes()).unwrap();
        assert_eq!(back.graph.node_count(), 4);
        let (b, d) = (back.labels.id("b").unwrap(), back.labels.id("d").unwrap());
        assert!(back.graph.has_edge(b, d).unwrap());
        assert_eq!(back.graph.degree(back.labels.id("a").unwrap()).unwrap(), 0);
    }

    #[test]
    fn partition_round_trip() {
        let labels = LabelMap::from(vec!["x".into(), "y".into(), "z".into()]);
        let p = Partition::from_labels(&[0, 1, 1]);
        let text = write_partition(&p, &labels);
        assert_eq!(text, "x\t0\ny\t1\nz\t1\n");
        assert_eq!(read_partition(&text, &labels).unwrap(), p);
        assert!(read_partition("x 0\ny 1\n", &labels).is_err());
        assert!(read_partition("x 0\nq 1\n", &labels).is_err());
        let json = to_json(&p).unwrap();
        assert_eq!(from_json::<Partition>(&json).unwrap(), p);
    }
}
