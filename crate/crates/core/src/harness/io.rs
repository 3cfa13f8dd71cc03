//! File ingestion: feature CSVs, rating CSVs, and graph files.
//!
//! Formats:
//! - features: CSV with header `item_id,f1,...,fd`
//! - ratings: CSV pairs `item_id,user_id` (presence = positive rating),
//!   optional header
//! - OIM graph: one directed edge per line, `src dst`
//! - PMC graph: header line `L=<n> V=<n>`, then `src dst` lines with
//!   sources and targets in separate id spaces
//!
//! Blank lines and `#` comments are ignored in graph files.

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::FeatureContext;
use crate::Real;

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Loads an item feature matrix. Item ids must be 0..m (any row order).
/// Rows with L2 norm above 1 are renormalized to 1 with a warning.
pub fn ingest_features(path: &Path) -> Result<FeatureContext> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty feature file"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.first() != Some(&"item_id") || cols.len() < 2 {
        return Err(parse_err(path, 1, "expected header `item_id,f1,...,fd`"));
    }
    let dim = cols.len() - 1;
    let mut rows: Vec<(usize, Vec<Real>)> = Vec::new();
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != dim + 1 {
            return Err(parse_err(
                path,
                idx + 1,
                format!("expected {} fields, got {}", dim + 1, fields.len()),
            ));
        }
        let item: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(path, idx + 1, "bad item id"))?;
        let feats = fields[1..]
            .iter()
            .map(|f| {
                f.parse::<Real>()
                    .map_err(|_| parse_err(path, idx + 1, format!("bad feature value `{f}`")))
            })
            .collect::<Result<Vec<Real>>>()?;
        rows.push((item, feats));
    }
    if rows.is_empty() {
        return Err(parse_err(path, 1, "feature file has no data rows"));
    }
    rows.sort_by_key(|(i, _)| *i);
    for (expect, (got, _)) in rows.iter().enumerate() {
        if *got != expect {
            return Err(parse_err(
                path,
                0,
                format!("item ids must be exactly 0..{} (missing or duplicate {expect})", rows.len()),
            ));
        }
    }
    let mut renormalized = 0usize;
    let matrix: Vec<Vec<Real>> = rows
        .into_iter()
        .map(|(_, mut feats)| {
            let norm = feats.iter().map(|x| x * x).sum::<Real>().sqrt();
            if norm > 1.0 {
                for x in &mut feats {
                    *x /= norm;
                }
                renormalized += 1;
            }
            feats
        })
        .collect();
    if renormalized > 0 {
        eprintln!(
            "warning: {}: renormalized {renormalized} feature row(s) with L2 norm > 1",
            path.display()
        );
    }
    FeatureContext::new(matrix)
}

/// Loads a binary rating matrix as `ratings[item][user]` from
/// `item_id,user_id` pairs. User ids are densified in ascending order.
pub fn ingest_ratings(path: &Path, num_items: usize) -> Result<Vec<Vec<bool>>> {
    let text = std::fs::read_to_string(path)?;
    let mut pairs: Vec<(usize, u64)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (idx == 0 && line.starts_with("item_id")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(parse_err(path, idx + 1, "expected `item_id,user_id`"));
        }
        let item: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(path, idx + 1, "bad item id"))?;
        let user: u64 = fields[1]
            .parse()
            .map_err(|_| parse_err(path, idx + 1, "bad user id"))?;
        if item >= num_items {
            return Err(parse_err(
                path,
                idx + 1,
                format!("item id {item} out of range (have {num_items} items)"),
            ));
        }
        pairs.push((item, user));
    }
    if pairs.is_empty() {
        return Err(parse_err(path, 1, "rating file has no data rows"));
    }
    let users: BTreeSet<u64> = pairs.iter().map(|(_, u)| *u).collect();
    let index_of = |u: u64| users.iter().position(|x| *x == u).unwrap();
    let mut matrix = vec![vec![false; users.len()]; num_items];
    for (item, user) in pairs {
        matrix[item][index_of(user)] = true;
    }
    Ok(matrix)
}

fn graph_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let text = std::fs::read_to_string(path)?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect())
}

fn parse_edge(path: &Path, line_no: usize, line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let src = it
        .next()
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| parse_err(path, line_no, "expected `src dst`"))?;
    let dst = it
        .next()
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| parse_err(path, line_no, "expected `src dst`"))?;
    if it.next().is_some() {
        return Err(parse_err(path, line_no, "trailing fields after `src dst`"));
    }
    Ok((src, dst))
}

/// Directed graph for influence maximization: node count is one past the
/// largest id seen.
pub fn parse_oim_graph(path: &Path) -> Result<(usize, Vec<(usize, usize)>)> {
    let lines = graph_lines(path)?;
    if lines.is_empty() {
        return Err(parse_err(path, 1, "graph file has no edges"));
    }
    let mut edges = Vec::with_capacity(lines.len());
    let mut max_id = 0usize;
    for (no, line) in &lines {
        let (s, d) = parse_edge(path, *no, line)?;
        max_id = max_id.max(s).max(d);
        edges.push((s, d));
    }
    Ok((max_id + 1, edges))
}

/// Bipartite graph with a `L=<n> V=<n>` header; sources and targets use
/// separate zero-based id spaces.
pub fn parse_pmc_graph(path: &Path) -> Result<(usize, usize, Vec<(usize, usize)>)> {
    let lines = graph_lines(path)?;
    let (header_no, header) = lines
        .first()
        .ok_or_else(|| parse_err(path, 1, "empty bipartite graph file"))?;
    let mut l = None;
    let mut v = None;
    for tok in header.split_whitespace() {
        if let Some(n) = tok.strip_prefix("L=") {
            l = n.parse::<usize>().ok();
        } else if let Some(n) = tok.strip_prefix("V=") {
            v = n.parse::<usize>().ok();
        }
    }
    let (l, v) = match (l, v) {
        (Some(l), Some(v)) if l > 0 && v > 0 => (l, v),
        _ => return Err(parse_err(path, *header_no, "expected header `L=<n> V=<n>`")),
    };
    let mut edges = Vec::new();
    for (no, line) in &lines[1..] {
        let (s, d) = parse_edge(path, *no, line)?;
        if s >= l || d >= v {
            return Err(parse_err(
                path,
                *no,
                format!("edge ({s},{d}) outside L={l}, V={v}"),
            ));
        }
        edges.push((s, d));
    }
    if edges.is_empty() {
        return Err(parse_err(path, *header_no, "bipartite graph has no edges"));
    }
    Ok((l, v, edges))
}
