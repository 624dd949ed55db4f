//! Graph file ingestion: whitespace edge lists and Matrix Market files.
//!
//! Both loaders normalize node labels to contiguous 0-based indices and keep
//! the original labels in a side map for reporting. Duplicate and reversed
//! edges merge by weight summation; self-loops can never be cut, so they are
//! dropped and counted instead of rejected.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

/// Supported input formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// Whitespace-separated `u v [w]` lines; `#` and `%` start comments.
    /// Labels may be 0-based or 1-based; a 0 appearing anywhere means
    /// 0-based. An optional leading `n m` count line is recognized when `m`
    /// matches the number of edge lines that follow.
    EdgeList,
    /// Matrix Market coordinate format, `real`/`integer`/`pattern` entries,
    /// `general` or `symmetric`. General matrices are symmetrized by merging
    /// (i, j) and (j, i).
    MatrixMarket,
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edgelist" => Ok(GraphFormat::EdgeList),
            "mtx" => Ok(GraphFormat::MatrixMarket),
            other => Err(Error::InvalidConfig(format!(
                "unknown graph format '{other}' (expected 'edgelist' or 'mtx')"
            ))),
        }
    }
}

impl fmt::Display for GraphFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFormat::EdgeList => write!(f, "edgelist"),
            GraphFormat::MatrixMarket => write!(f, "mtx"),
        }
    }
}

/// Guess the format from the file extension: `.mtx` means Matrix Market,
/// anything else is read as an edge list.
pub fn detect_format(path: &Path) -> GraphFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("mtx") => GraphFormat::MatrixMarket,
        _ => GraphFormat::EdgeList,
    }
}

/// A parsed graph plus the bookkeeping needed to report in the input's terms.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// Original input label of each normalized node index.
    pub labels: Vec<u64>,
    /// Number of self-loop entries dropped during loading.
    pub self_loops_dropped: usize,
}

/// Load a graph from `path` in the given format (see [`detect_format`] for
/// extension-based guessing).
pub fn load_graph(path: impl AsRef<Path>, format: GraphFormat) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let name = path.display().to_string();
    match format {
        GraphFormat::EdgeList => parse_edge_list(&name, &text),
        GraphFormat::MatrixMarket => parse_matrix_market(&name, &text),
    }
}

fn malformed(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::MalformedInput {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

/// One raw edge record: original labels, weight, and source line.
struct RawEdge {
    u: u64,
    v: u64,
    w: f64,
    line: usize,
}

fn parse_label(path: &str, line: usize, token: &str, what: &str) -> Result<u64> {
    token.parse::<u64>().map_err(|_| {
        malformed(
            path,
            line,
            format!("{what} '{token}' is not a non-negative integer"),
        )
    })
}

fn parse_weight(path: &str, line: usize, token: &str) -> Result<f64> {
    let w: f64 = token
        .parse()
        .map_err(|_| malformed(path, line, format!("weight '{token}' is not a number")))?;
    if !w.is_finite() {
        return Err(malformed(path, line, format!("weight '{token}' is not finite")));
    }
    if w < 0.0 {
        return Err(malformed(
            path,
            line,
            format!("negative weight {w} is not supported"),
        ));
    }
    Ok(w)
}

/// Parse the edge-list format.
///
/// Count-line recognition: a first data line `a b` is taken as an `n m`
/// count header exactly when `b` equals the number of data lines after it
/// and `a` is large enough to cover every label they mention. Otherwise it
/// is an ordinary unweighted edge.
fn parse_edge_list(path: &str, text: &str) -> Result<LoadedGraph> {
    let mut records: Vec<RawEdge> = Vec::new();
    let mut first_two: Option<(u64, u64, usize)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let data = raw.trim();
        if data.is_empty() || data.starts_with('#') || data.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = data.split_whitespace().collect();
        let (u, v, w) = match tokens.as_slice() {
            [u, v] => (
                parse_label(path, line, u, "node label")?,
                parse_label(path, line, v, "node label")?,
                1.0,
            ),
            [u, v, w] => (
                parse_label(path, line, u, "node label")?,
                parse_label(path, line, v, "node label")?,
                parse_weight(path, line, w)?,
            ),
            _ => {
                return Err(malformed(
                    path,
                    line,
                    format!("expected 'u v [w]', found {} fields", tokens.len()),
                ))
            }
        };
        if records.is_empty() && first_two.is_none() && tokens.len() == 2 {
            // Defer: this might be a count header. Decide once the rest of
            // the file has been read.
            first_two = Some((u, v, line));
            continue;
        }
        records.push(RawEdge { u, v, w, line });
    }

    let mut declared_n: Option<u64> = None;
    if let Some((a, b, line)) = first_two {
        let base = if records.iter().any(|r| r.u == 0 || r.v == 0) {
            0
        } else {
            1
        };
        let max_label = records.iter().map(|r| r.u.max(r.v)).max().unwrap_or(0);
        // The node-count bound keeps a nonsense first line from forcing a
        // giant allocation; beyond it the line is read as an ordinary edge.
        let is_header = !records.is_empty()
            && b == records.len() as u64
            && a.saturating_add(base) > max_label
            && a <= 1_000_000_000;
        if is_header {
            declared_n = Some(a);
        } else {
            // Ordinary first edge after all.
            records.insert(0, RawEdge { u: a, v: b, w: 1.0, line });
        }
    }

    if records.is_empty() && declared_n.is_none() {
        return Err(Error::InvalidInstance(format!(
            "{path}: no edges found (empty graph)"
        )));
    }

    let base: u64 = if records.iter().any(|r| r.u == 0 || r.v == 0) {
        0
    } else {
        1
    };

    let (labels, index_of): (Vec<u64>, _) = if let Some(n) = declared_n {
        // A count header declares the full contiguous label range, so
        // isolated nodes are representable and no compaction happens.
        if n == 0 {
            return Err(Error::InvalidInstance(format!(
                "{path}: count header declares zero nodes"
            )));
        }
        let labels: Vec<u64> = (base..base + n).collect();
        (labels, None)
    } else {
        // Headerless lists cannot mention isolated nodes; compact the
        // distinct labels in ascending order.
        let mut labels: Vec<u64> = records.iter().flat_map(|r| [r.u, r.v]).collect();
        labels.sort_unstable();
        labels.dedup();
        let index: std::collections::HashMap<u64, usize> =
            labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        (labels, Some(index))
    };

    let n = labels.len();
    let mut self_loops = 0usize;
    let mut edges = Vec::with_capacity(records.len());
    for r in &records {
        if r.u == r.v {
            self_loops += 1;
            continue;
        }
        let (ui, vi) = match &index_of {
            Some(map) => (map[&r.u], map[&r.v]),
            None => {
                let ui = (r.u - base) as usize;
                let vi = (r.v - base) as usize;
                if ui >= n || vi >= n {
                    return Err(malformed(
                        path,
                        r.line,
                        format!("label exceeds declared node count {n}"),
                    ));
                }
                (ui, vi)
            }
        };
        edges.push(Edge::new(ui, vi, r.w));
    }

    let graph = Graph::from_edges(n, edges)?;
    Ok(LoadedGraph { graph, labels, self_loops_dropped: self_loops })
}

/// Parse Matrix Market coordinate files (always 1-based).
fn parse_matrix_market(path: &str, text: &str) -> Result<LoadedGraph> {
    let mut lines = text.lines().enumerate();

    let (_, banner) = lines
        .next()
        .ok_or_else(|| malformed(path, 1, "empty file"))?;
    let banner_fields: Vec<String> = banner.split_whitespace().map(str::to_lowercase).collect();
    if banner_fields.len() != 5 || banner_fields[0] != "%%matrixmarket" {
        return Err(malformed(
            path,
            1,
            "expected '%%MatrixMarket matrix coordinate <field> <symmetry>' banner",
        ));
    }
    if banner_fields[1] != "matrix" || banner_fields[2] != "coordinate" {
        return Err(malformed(
            path,
            1,
            format!(
                "unsupported object/format '{} {}' (only 'matrix coordinate')",
                banner_fields[1], banner_fields[2]
            ),
        ));
    }
    let pattern = match banner_fields[3].as_str() {
        "pattern" => true,
        "real" | "integer" => false,
        other => {
            return Err(malformed(
                path,
                1,
                format!("unsupported field type '{other}' (real, integer, or pattern)"),
            ))
        }
    };
    match banner_fields[4].as_str() {
        "general" | "symmetric" => {}
        other => {
            return Err(malformed(
                path,
                1,
                format!("unsupported symmetry '{other}' (general or symmetric)"),
            ))
        }
    }

    // Comments, then the size line.
    let mut size: Option<(u64, u64, u64, usize)> = None;
    let mut last_line = 1;
    for (idx, raw) in lines.by_ref() {
        let line = idx + 1;
        last_line = line;
        let data = raw.trim();
        if data.is_empty() || data.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = data.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(malformed(
                path,
                line,
                format!("expected size line 'rows cols entries', found {} fields", tokens.len()),
            ));
        }
        let rows = parse_label(path, line, tokens[0], "row count")?;
        let cols = parse_label(path, line, tokens[1], "column count")?;
        let nnz = parse_label(path, line, tokens[2], "entry count")?;
        size = Some((rows, cols, nnz, line));
        break;
    }
    let (rows, cols, nnz, _) =
        size.ok_or_else(|| malformed(path, last_line, "missing size line"))?;
    let n = rows.max(cols) as usize;
    if n == 0 {
        return Err(Error::InvalidInstance(format!(
            "{path}: matrix dimensions are zero (empty graph)"
        )));
    }

    let mut self_loops = 0usize;
    let mut edges: Vec<Edge> = Vec::with_capacity(nnz as usize);
    let mut seen = 0u64;
    for (idx, raw) in lines {
        let line = idx + 1;
        last_line = line;
        let data = raw.trim();
        if data.is_empty() || data.starts_with('%') {
            continue;
        }
        seen += 1;
        if seen > nnz {
            return Err(malformed(
                path,
                line,
                format!("more than the declared {nnz} entries"),
            ));
        }
        let tokens: Vec<&str> = data.split_whitespace().collect();
        let expected = if pattern { 2 } else { 3 };
        if tokens.len() != expected {
            return Err(malformed(
                path,
                line,
                format!("expected {expected} fields per entry, found {}", tokens.len()),
            ));
        }
        let i = parse_label(path, line, tokens[0], "row index")?;
        let j = parse_label(path, line, tokens[1], "column index")?;
        if i == 0 || j == 0 || i > n as u64 || j > n as u64 {
            return Err(malformed(
                path,
                line,
                format!("index ({i}, {j}) outside 1..={n}"),
            ));
        }
        let w = if pattern { 1.0 } else { parse_weight(path, line, tokens[2])? };
        if i == j {
            self_loops += 1;
            continue;
        }
        // Symmetric storage lists each off-diagonal pair once; general
        // storage may list both orientations, which Graph construction
        // merges by summation.
        edges.push(Edge::new((i - 1) as usize, (j - 1) as usize, w));
    }
    if seen < nnz {
        return Err(malformed(
            path,
            last_line,
            format!("declared {nnz} entries but found {seen}"),
        ));
    }

    let graph = Graph::from_edges(n, edges)?;
    let labels: Vec<u64> = (1..=n as u64).collect();
    Ok(LoadedGraph { graph, labels, self_loops_dropped: self_loops })
}
