//! Dataset directory format.
//!
//! ```text
//! edges.csv     src,dst         one undirected edge per row, src < dst
//! labels.csv    node_id,class   one row per node
//! features.csv  node_id,f0,...  optional
//! meta.json     {"n", "k", "m_feat", ...provenance}
//! ```
//!
//! Node ids are 0-based. Floats are written in shortest round-trip form so
//! a write/read cycle is lossless.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::graph::{Features, Graph, LabeledGraph, Labels};

pub const EDGES_FILE: &str = "edges.csv";
pub const LABELS_FILE: &str = "labels.csv";
pub const FEATURES_FILE: &str = "features.csv";
pub const META_FILE: &str = "meta.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub n: usize,
    pub k: usize,
    pub m_feat: usize,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl DatasetMeta {
    pub fn for_data(data: &LabeledGraph) -> Self {
        Self {
            n: data.graph.node_count(),
            k: data.labels.k(),
            m_feat: data.features.as_ref().map_or(0, Features::dim),
            extra: Map::new(),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

pub fn write_dataset(dir: &Path, data: &LabeledGraph, meta: &DatasetMeta) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_edges(&dir.join(EDGES_FILE), &data.graph)?;
    write_labels(&dir.join(LABELS_FILE), &data.labels)?;
    if let Some(x) = &data.features {
        write_features(&dir.join(FEATURES_FILE), x)?;
    }
    write_meta(&dir.join(META_FILE), meta)
}

pub fn write_edges(path: &Path, g: &Graph) -> Result<()> {
    let mut out = String::from("src,dst\n");
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u},{v}\n"));
    }
    write_file(path, &out)
}

pub fn write_labels(path: &Path, labels: &Labels) -> Result<()> {
    let mut out = String::from("node_id,class\n");
    for (i, c) in labels.classes().iter().enumerate() {
        out.push_str(&format!("{i},{c}\n"));
    }
    write_file(path, &out)
}

pub fn write_features(path: &Path, x: &Features) -> Result<()> {
    let mut out = String::from("node_id");
    for j in 0..x.dim() {
        out.push_str(&format!(",f{j}"));
    }
    out.push('\n');
    for i in 0..x.rows() {
        out.push_str(&i.to_string());
        for v in x.row(i) {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    write_file(path, &out)
}

pub fn write_meta(path: &Path, meta: &DatasetMeta) -> Result<()> {
    let text = serde_json::to_string_pretty(meta).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    write_file(path, &(text + "\n"))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(contents.as_bytes()).map_err(io_err(path))
}

pub fn read_meta(path: &Path) -> Result<DatasetMeta> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug)]
pub struct LoadedDataset {
    pub data: LabeledGraph,
    pub meta: DatasetMeta,
}

/// Read a dataset directory. `features.csv` is optional.
pub fn read_dataset(dir: &Path) -> Result<LoadedDataset> {
    let meta = read_meta(&dir.join(META_FILE))?;
    let graph = read_edges(&dir.join(EDGES_FILE), meta.n)?;
    let labels = read_labels(&dir.join(LABELS_FILE), meta.n, meta.k)?;
    let features_path = dir.join(FEATURES_FILE);
    let features = if features_path.exists() {
        Some(read_features(&features_path, meta.n, meta.m_feat)?)
    } else {
        None
    };
    Ok(LoadedDataset {
        data: LabeledGraph::new(graph, labels, features)?,
        meta,
    })
}

fn open_csv(path: &Path, expected_header: &[String]) -> Result<csv::Reader<fs::File>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err(path))?;
    let header = reader.headers().map_err(csv_err(path))?;
    let found: Vec<&str> = header.iter().collect();
    if found != expected_header.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(parse_err(
            path,
            1,
            format!("expected header {:?}, found {:?}", expected_header.join(","), found.join(",")),
        ));
    }
    Ok(reader)
}

fn field<T: std::str::FromStr>(path: &Path, line: u64, record: &csv::StringRecord, idx: usize) -> Result<T> {
    let raw = record.get(idx).unwrap_or("");
    raw.parse()
        .map_err(|_| parse_err(path, line, format!("cannot parse field {} ({raw:?})", idx + 1)))
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

pub fn read_edges(path: &Path, n: usize) -> Result<Graph> {
    let mut reader = open_csv(path, &["src".into(), "dst".into()])?;
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for record in reader.records() {
        let record = record.map_err(csv_err(path))?;
        let line = record_line(&record);
        let u: usize = field(path, line, &record, 0)?;
        let v: usize = field(path, line, &record, 1)?;
        if u >= v {
            return Err(parse_err(path, line, format!("edge must satisfy src < dst, got {u},{v}")));
        }
        if v >= n {
            return Err(parse_err(path, line, format!("node {v} out of range for n = {n}")));
        }
        if !seen.insert((u, v)) {
            return Err(parse_err(path, line, format!("duplicate edge {u},{v}")));
        }
        edges.push((u, v));
    }
    Graph::from_edges(n, edges)
}

pub fn read_labels(path: &Path, n: usize, k: usize) -> Result<Labels> {
    let mut reader = open_csv(path, &["node_id".into(), "class".into()])?;
    let mut classes = vec![None; n];
    for record in reader.records() {
        let record = record.map_err(csv_err(path))?;
        let line = record_line(&record);
        let i: usize = field(path, line, &record, 0)?;
        let c: usize = field(path, line, &record, 1)?;
        if i >= n {
            return Err(parse_err(path, line, format!("node {i} out of range for n = {n}")));
        }
        if c >= k {
            return Err(parse_err(path, line, format!("class {c} out of range for k = {k}")));
        }
        if classes[i].replace(c).is_some() {
            return Err(parse_err(path, line, format!("node {i} labelled twice")));
        }
    }
    let classes = classes
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| parse_err(path, 0, format!("node {i} has no label"))))
        .collect::<Result<Vec<_>>>()?;
    Labels::new(classes, k)
}

pub fn read_features(path: &Path, n: usize, m_feat: usize) -> Result<Features> {
    let header: Vec<String> = std::iter::once("node_id".to_string())
        .chain((0..m_feat).map(|j| format!("f{j}")))
        .collect();
    let mut reader = open_csv(path, &header)?;
    let mut data = vec![0.0; n * m_feat];
    let mut filled = vec![false; n];
    for record in reader.records() {
        let record = record.map_err(csv_err(path))?;
        let line = record_line(&record);
        let i: usize = field(path, line, &record, 0)?;
        if i >= n {
            return Err(parse_err(path, line, format!("node {i} out of range for n = {n}")));
        }
        if std::mem::replace(&mut filled[i], true) {
            return Err(parse_err(path, line, format!("node {i} has two feature rows")));
        }
        for j in 0..m_feat {
            let v: f64 = field(path, line, &record, j + 1)?;
            if !v.is_finite() {
                return Err(parse_err(path, line, format!("non-finite feature in column f{j}")));
            }
            data[i * m_feat + j] = v;
        }
    }
    if let Some(i) = filled.iter().position(|f| !f) {
        return Err(parse_err(path, 0, format!("node {i} has no feature row")));
    }
    Features::new(n, m_feat, data)
}

pub fn dataset_paths(dir: &Path) -> [PathBuf; 4] {
    [EDGES_FILE, LABELS_FILE, FEATURES_FILE, META_FILE].map(|f| dir.join(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LabeledGraph {
        let g = Graph::from_edges(4, [(0, 1), (2, 3), (1, 2)]).unwrap();
        let l = Labels::new(vec![0, 0, 1, 1], 2).unwrap();
        let x = Features::new(4, 2, vec![0.1, -2.5, 1e-17, 3.0, 0.0, 1.0 / 3.0, -0.0, 7.25]).unwrap();
        LabeledGraph::new(g, l, Some(x)).unwrap()
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let data = sample();
        let mut meta = DatasetMeta::for_data(&data);
        meta.extra.insert("generator".into(), Value::from("test"));
        write_dataset(dir.path(), &data, &meta).unwrap();
        let loaded = read_dataset(dir.path()).unwrap();
        assert_eq!(loaded.data, data);
        assert_eq!(loaded.meta, meta);
        let edges = fs::read_to_string(dir.path().join(EDGES_FILE)).unwrap();
        assert_eq!(edges, "src,dst\n0,1\n1,2\n2,3\n");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let data = sample();
        write_dataset(dir.path(), &data, &DatasetMeta::for_data(&data)).unwrap();
        fs::write(dir.path().join(EDGES_FILE), "src,dst\n0,1\n2,1\n").unwrap();
        match read_dataset(dir.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        fs::write(dir.path().join(EDGES_FILE), "a,b\n").unwrap();
        assert!(matches!(read_dataset(dir.path()), Err(Error::Parse { line: 1, .. })));
        fs::write(dir.path().join(EDGES_FILE), "src,dst\n0,x\n").unwrap();
        assert!(matches!(read_dataset(dir.path()), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn missing_labels_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let data = sample();
        write_dataset(dir.path(), &data, &DatasetMeta::for_data(&data)).unwrap();
        fs::write(dir.path().join(LABELS_FILE), "node_id,class\n0,0\n1,0\n2,1\n").unwrap();
        assert!(read_dataset(dir.path()).is_err());
    }
}
