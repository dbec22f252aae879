//! Edge-list and label files: lines "u v" and "u k" with integer ids.
//! Blank lines and lines starting with `#` or `%` are skipped; gzip input is
//! detected by its magic bytes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;

use crate::error::{Error, Result};
use crate::graph::PopulationGraph;

/// Opens a text file, transparently decompressing gzip.
pub fn open_text(path: &Path) -> Result<Box<dyn BufRead>> {
    let mut file = File::open(path)?;
    let mut magic = [0u8; 2];
    let got = file.read(&mut magic)?;
    let file = File::open(path)?;
    if got == 2 && magic == [0x1f, 0x8b] {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

fn data_lines<R: BufRead>(reader: R, name: &str) -> impl Iterator<Item = Result<(String, Vec<String>)>> {
    let name = name.to_string();
    reader.lines().enumerate().filter_map(move |(i, line)| {
        let loc = format!("{name}:{}", i + 1);
        match line {
            Err(e) => Some(Err(Error::Io(e))),
            Ok(l) => {
                let t = l.trim();
                if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
                    None
                } else {
                    let fields = t
                        .split(|c: char| c.is_whitespace() || c == ',')
                        .filter(|f| !f.is_empty())
                        .map(str::to_string)
                        .collect();
                    Some(Ok((loc, fields)))
                }
            }
        }
    })
}

fn parse_id(loc: &str, field: &str) -> Result<i64> {
    field
        .parse::<i64>()
        .map_err(|_| Error::parse(loc, format!("`{field}` is not an integer id")))
}

/// Raw edge list: id pairs in file order, before symmetrization.
pub fn parse_edge_list<R: BufRead>(reader: R, name: &str) -> Result<Vec<(i64, i64)>> {
    let mut out = Vec::new();
    for item in data_lines(reader, name) {
        let (loc, fields) = item?;
        if fields.len() < 2 {
            return Err(Error::parse(loc, "expected two vertex ids"));
        }
        out.push((parse_id(&loc, &fields[0])?, parse_id(&loc, &fields[1])?));
    }
    Ok(out)
}

/// Label table: vertex id to class value.
pub fn parse_labels<R: BufRead>(reader: R, name: &str) -> Result<BTreeMap<i64, i64>> {
    let mut out = BTreeMap::new();
    for item in data_lines(reader, name) {
        let (loc, fields) = item?;
        if fields.len() < 2 {
            return Err(Error::parse(loc, "expected a vertex id and a class"));
        }
        let id = parse_id(&loc, &fields[0])?;
        let class = parse_id(&loc, &fields[1])?;
        if let Some(prev) = out.insert(id, class) {
            if prev != class {
                return Err(Error::parse(loc, format!("vertex {id} labelled twice")));
            }
        }
    }
    Ok(out)
}

pub fn read_edge_list(path: &Path) -> Result<Vec<(i64, i64)>> {
    parse_edge_list(open_text(path)?, &path.display().to_string())
}

pub fn read_labels(path: &Path) -> Result<BTreeMap<i64, i64>> {
    parse_labels(open_text(path)?, &path.display().to_string())
}

/// A population graph with the original vertex ids and class values.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: PopulationGraph,
    /// Original id of each vertex, in increasing order.
    pub ids: Vec<i64>,
    /// Original class value of each 0-based class, in increasing order.
    pub classes: Vec<i64>,
}

/// Builds a population graph from raw edges and optional labels.
///
/// Edges are symmetrized; self-loops and repeated edges are dropped. The
/// vertex set is the union of edge endpoints and labelled ids, minus
/// vertices without edges when `drop_isolated` is set. Every vertex must be
/// labelled when labels are given.
pub fn build_graph(
    raw_edges: &[(i64, i64)],
    labels: Option<&BTreeMap<i64, i64>>,
    drop_isolated: bool,
) -> Result<LoadedGraph> {
    let mut with_edges = BTreeSet::new();
    for &(u, v) in raw_edges {
        if u != v {
            with_edges.insert(u);
            with_edges.insert(v);
        }
    }
    let mut vertex_ids: BTreeSet<i64> = with_edges.clone();
    if !drop_isolated {
        for &(u, v) in raw_edges {
            vertex_ids.insert(u);
            vertex_ids.insert(v);
        }
        if let Some(l) = labels {
            vertex_ids.extend(l.keys().copied());
        }
    }
    let ids: Vec<i64> = vertex_ids.into_iter().collect();
    let index: HashMap<i64, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let n = ids.len();
    if n < 2 {
        return Err(Error::InvalidSize(format!("graph has {n} vertices")));
    }
    let edges: Vec<(usize, usize)> = raw_edges
        .iter()
        .filter(|(u, v)| u != v)
        .filter_map(|(u, v)| Some((*index.get(u)?, *index.get(v)?)))
        .collect();
    let (vertex_labels, classes) = match labels {
        None => (vec![0; n], vec![0]),
        Some(l) => {
            if l.is_empty() {
                return Err(Error::LabelMismatch("label file is empty".into()));
            }
            let mut values = Vec::with_capacity(n);
            for id in &ids {
                match l.get(id) {
                    Some(&c) => values.push(c),
                    None => return Err(Error::LabelMismatch(format!("vertex {id} has no label"))),
                }
            }
            let classes: Vec<i64> = values.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
            let pos: HashMap<i64, usize> = classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
            (values.iter().map(|c| pos[c]).collect(), classes)
        }
    };
    let k = classes.len();
    let graph = PopulationGraph::from_edges(n, edges, vertex_labels, k);
    Ok(LoadedGraph { graph, ids, classes })
}

/// Reads an edge list and optional labels file into a population graph.
pub fn load_graph(edges: &Path, labels: Option<&Path>, drop_isolated: bool) -> Result<LoadedGraph> {
    let raw = read_edge_list(edges)?;
    let labels = labels.map(read_labels).transpose()?;
    build_graph(&raw, labels.as_ref(), drop_isolated)
}

/// Writes "u v" lines, u < v, 0-based.
pub fn write_edge_list<W: Write>(g: &PopulationGraph, mut out: W) -> Result<()> {
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

/// Writes "u k" lines for labelled vertices, 0-based; unlabelled vertices are omitted.
pub fn write_labels<W: Write>(labels: &[Option<usize>], mut out: W) -> Result<()> {
    for (u, l) in labels.iter().enumerate() {
        if let Some(k) = l {
            writeln!(out, "{u} {k}")?;
        }
    }
    Ok(())
}
