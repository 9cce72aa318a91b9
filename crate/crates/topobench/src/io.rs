//! On-disk formats: line-delimited dataset records, tab-separated tensor
//! tables, and the run manifest. Every writer is byte-deterministic for a
//! given input.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generate::{DatasetItem, Provenance};
use crate::graph::{Graph, GraphError};
use crate::kernels::BaselineReport;
use crate::tensor::{ModeKind, ModeSpec, SparseTensor, TensorError};

#[derive(Debug, Error)]
pub enum DataIoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    MalformedLine {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("{path}:{line}: duplicate id {id}")]
    DuplicateId { path: String, line: usize, id: u64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

fn io_err(path: &Path, source: std::io::Error) -> DataIoError {
    DataIoError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// One dataset line. Edges are canonical (u < v) and sorted; `meta` carries
/// the full provenance needed to audit or regenerate the item.
#[derive(Debug, Serialize, Deserialize)]
struct Record {
    id: u64,
    n: usize,
    edges: Vec<(usize, usize)>,
    label: u8,
    meta: Provenance,
}

/// Writes one JSON object per line. Key order is fixed by the record struct,
/// so reruns produce identical bytes.
pub fn write_dataset(path: &Path, items: &[DatasetItem]) -> Result<(), DataIoError> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = BufWriter::new(file);
    for item in items {
        let record = Record {
            id: item.id,
            n: item.graph.num_nodes(),
            edges: item.graph.edges().to_vec(),
            label: item.label,
            meta: item.provenance.clone(),
        };
        let line = serde_json::to_string(&record).expect("records always serialize");
        out.write_all(line.as_bytes()).map_err(|e| io_err(path, e))?;
        out.write_all(b"\n").map_err(|e| io_err(path, e))?;
    }
    out.flush().map_err(|e| io_err(path, e))
}

pub fn read_dataset(path: &Path) -> Result<Vec<DatasetItem>, DataIoError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut items = Vec::new();
    let mut seen_ids = std::collections::BTreeSet::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record =
            serde_json::from_str(&line).map_err(|e| DataIoError::MalformedLine {
                path: path.display().to_string(),
                line: lineno + 1,
                reason: e.to_string(),
            })?;
        if !seen_ids.insert(record.id) {
            return Err(DataIoError::DuplicateId {
                path: path.display().to_string(),
                line: lineno + 1,
                id: record.id,
            });
        }
        let graph =
            Graph::from_edges(record.n, record.edges).map_err(|e| DataIoError::MalformedLine {
                path: path.display().to_string(),
                line: lineno + 1,
                reason: e.to_string(),
            })?;
        items.push(DatasetItem {
            id: record.id,
            graph,
            label: record.label,
            provenance: record.meta,
        });
    }
    Ok(items)
}

fn mode_header(spec: &ModeSpec) -> String {
    let kind = match spec.kind {
        ModeKind::Topology => "topology",
        ModeKind::Label => "label",
    };
    let deps = if spec.deps.is_empty() {
        String::new()
    } else {
        format!(
            ",deps={}",
            spec.deps
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join("+")
        )
    };
    format!("{kind}(dim={},space={}{deps})", spec.dim, spec.space)
}

fn parse_mode_header(field: &str, path: &Path) -> Result<ModeSpec, DataIoError> {
    let bad = |reason: &str| DataIoError::MalformedLine {
        path: path.display().to_string(),
        line: 1,
        reason: reason.to_string(),
    };
    let (kind_str, rest) = field
        .split_once('(')
        .ok_or_else(|| bad("mode header missing '('"))?;
    let kind = match kind_str {
        "topology" => ModeKind::Topology,
        "label" => ModeKind::Label,
        other => return Err(bad(&format!("unknown mode kind {other:?}"))),
    };
    let rest = rest
        .strip_suffix(')')
        .ok_or_else(|| bad("mode header missing ')'"))?;
    let mut dim = None;
    let mut space = None;
    let mut deps = Vec::new();
    for part in rest.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| bad(&format!("bad mode attribute {part:?}")))?;
        match key {
            "dim" => dim = Some(value.parse().map_err(|_| bad("bad dim"))?),
            "space" => space = Some(value.parse().map_err(|_| bad("bad space"))?),
            "deps" => {
                for d in value.split('+') {
                    deps.push(d.parse().map_err(|_| bad("bad dep"))?);
                }
            }
            other => return Err(bad(&format!("unknown mode attribute {other:?}"))),
        }
    }
    Ok(ModeSpec {
        dim: dim.ok_or_else(|| bad("mode header missing dim"))?,
        kind,
        space: space.ok_or_else(|| bad("mode header missing space"))?,
        deps,
    })
}

/// Tab-separated tensor table: a header line naming each mode (kind,
/// dimension, index space, dependencies) plus the weight column, then one row
/// per entry sorted lexicographically by indices. Weights use the shortest
/// round-trip decimal form.
pub fn export_tensor_tsv(path: &Path, t: &SparseTensor) -> Result<(), DataIoError> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = BufWriter::new(file);
    let header: Vec<String> = t
        .modes()
        .iter()
        .map(mode_header)
        .chain(std::iter::once("weight".to_string()))
        .collect();
    writeln!(out, "{}", header.join("\t")).map_err(|e| io_err(path, e))?;
    for (row, w) in t.rows() {
        let fields: Vec<String> = row
            .iter()
            .map(usize::to_string)
            .chain(std::iter::once(w.to_string()))
            .collect();
        writeln!(out, "{}", fields.join("\t")).map_err(|e| io_err(path, e))?;
    }
    out.flush().map_err(|e| io_err(path, e))
}

pub fn import_tensor_tsv(path: &Path) -> Result<SparseTensor, DataIoError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| DataIoError::MalformedLine {
            path: path.display().to_string(),
            line: 1,
            reason: "missing header".into(),
        })?
        .map_err(|e| io_err(path, e))?;
    let fields: Vec<&str> = header.split('\t').collect();
    if fields.last() != Some(&"weight") {
        return Err(DataIoError::MalformedLine {
            path: path.display().to_string(),
            line: 1,
            reason: "header must end with a weight column".into(),
        });
    }
    let modes: Vec<ModeSpec> = fields[..fields.len() - 1]
        .iter()
        .map(|f| parse_mode_header(f, path))
        .collect::<Result<_, _>>()?;

    let mut indices = Vec::new();
    let mut weights = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| DataIoError::MalformedLine {
            path: path.display().to_string(),
            line: lineno + 2,
            reason,
        };
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != modes.len() + 1 {
            return Err(bad(format!(
                "expected {} columns, got {}",
                modes.len() + 1,
                cells.len()
            )));
        }
        let row: Vec<usize> = cells[..modes.len()]
            .iter()
            .map(|c| c.parse().map_err(|_| bad(format!("bad index {c:?}"))))
            .collect::<Result<_, _>>()?;
        let w: f64 = cells[modes.len()]
            .parse()
            .map_err(|_| bad(format!("bad weight {:?}", cells[modes.len()])))?;
        indices.push(row);
        weights.push(w);
    }
    Ok(SparseTensor::new(modes, indices, weights)?)
}

/// Everything a finished run leaves behind for auditing: seeds, parameters,
/// counts, accuracies, and any degenerate-case warnings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Manifest {
    pub tool_version: String,
    pub task: String,
    pub master_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generation: Option<GenerationSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter: Option<FilterSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub baselines: Vec<BaselineReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verify: Vec<VerifySummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationSummary {
    pub candidates: usize,
    pub per_class: [usize; 2],
    pub draws: usize,
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSummary {
    pub folds: usize,
    pub train_folds: usize,
    pub looks_per_item: usize,
    pub pre_filter_cv_accuracy: f64,
    pub post_filter_cv_accuracy: f64,
    pub items_with_errors: usize,
    pub train_per_class: [usize; 2],
    pub test_per_class: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub dataset: String,
    pub items: usize,
    pub consistent: usize,
    pub offending_ids: Vec<u64>,
    /// Triangle-count or distance histogram, value -> item count.
    pub histogram: std::collections::BTreeMap<String, usize>,
}

impl Manifest {
    pub fn new(task: &str, master_seed: u64) -> Self {
        Manifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            task: task.to_string(),
            master_seed,
            ..Manifest::default()
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), DataIoError> {
        let text = serde_json::to_string_pretty(self).expect("manifests always serialize");
        fs::write(path, text + "\n").map_err(|e| io_err(path, e))
    }

    pub fn load(path: &Path) -> Result<Self, DataIoError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        serde_json::from_str(&text).map_err(|e| DataIoError::MalformedLine {
            path: path.display().to_string(),
            line: 1,
            reason: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_triangle_pool, TriangleGenParams};
    use crate::tensor::{formaldehyde, graph_to_tensor};

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn empty_dataset_roundtrip() {
        let dir = tmp();
        let path = dir.path().join("empty.jsonl");
        write_dataset(&path, &[]).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "");
        assert!(read_dataset(&path).unwrap().is_empty());
    }

    #[test]
    fn k3_item_roundtrip() {
        let dir = tmp();
        let path = dir.path().join("k3.jsonl");
        let item = DatasetItem {
            id: 0,
            graph: Graph::complete(3),
            label: 1,
            provenance: Provenance::Er {
                seed: 5,
                n: 3,
                p: 1.0,
                removed_edges: 0,
                connected: true,
            },
        };
        write_dataset(&path, &[item.clone()]).unwrap();
        let back = read_dataset(&path).unwrap();
        assert_eq!(back, vec![item]);
    }

    #[test]
    fn seeded_pool_roundtrip_preserves_oracle_statistics() {
        let dir = tmp();
        let path = dir.path().join("pool.jsonl");
        let items = gen_triangle_pool(12, 100, &TriangleGenParams::default()).unwrap();
        write_dataset(&path, &items).unwrap();
        let back = read_dataset(&path).unwrap();
        assert_eq!(items.len(), back.len());
        let stats = |xs: &[DatasetItem]| -> (usize, usize) {
            (
                xs.iter().map(|i| i.graph.triangles().len()).sum(),
                xs.iter().map(|i| i.graph.num_edges()).sum(),
            )
        };
        assert_eq!(stats(&items), stats(&back));
        assert_eq!(items, back);
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let dir = tmp();
        let path = dir.path().join("bad.jsonl");
        fs::write(
            &path,
            "{\"id\":0,\"n\":2,\"edges\":[[0,1]],\"label\":0,\"meta\":{\"family\":\"er\",\"seed\":0,\"n\":2,\"p\":0.5,\"removed_edges\":0,\"connected\":true}}\nnot json\n",
        )
        .unwrap();
        match read_dataset(&path).unwrap_err() {
            DataIoError::MalformedLine { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let dir = tmp();
        let path = dir.path().join("dup.jsonl");
        let item = DatasetItem {
            id: 7,
            graph: Graph::complete(3),
            label: 0,
            provenance: Provenance::Er {
                seed: 0,
                n: 3,
                p: 0.0,
                removed_edges: 0,
                connected: true,
            },
        };
        write_dataset(&path, &[item.clone(), item]).unwrap();
        match read_dataset(&path).unwrap_err() {
            DataIoError::DuplicateId { id, line, .. } => {
                assert_eq!(id, 7);
                assert_eq!(line, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn writes_are_byte_deterministic() {
        let dir = tmp();
        let a = dir.path().join("a.jsonl");
        let b = dir.path().join("b.jsonl");
        let items = gen_triangle_pool(3, 20, &TriangleGenParams::default()).unwrap();
        write_dataset(&a, &items).unwrap();
        write_dataset(&b, &items).unwrap();
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    }

    #[test]
    fn formaldehyde_tsv_matches_the_reference_table() {
        let dir = tmp();
        let path = dir.path().join("form.tsv");
        export_tensor_tsv(&path, &graph_to_tensor(&formaldehyde())).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let expected = "\
topology(dim=4,space=0)\ttopology(dim=4,space=0)\tlabel(dim=3,space=1,deps=0)\tlabel(dim=3,space=1,deps=1)\tlabel(dim=2,space=2,deps=0+1)\tweight
0\t1\t0\t1\t0\t1
0\t2\t0\t1\t0\t1
0\t3\t0\t2\t1\t1
1\t0\t1\t0\t0\t1
2\t0\t1\t0\t0\t1
3\t0\t2\t0\t1\t1
";
        assert_eq!(text, expected);
    }

    #[test]
    fn empty_tensor_exports_header_only() {
        let dir = tmp();
        let path = dir.path().join("empty.tsv");
        let t = SparseTensor::new(
            vec![ModeSpec::topology(3, 0), ModeSpec::topology(3, 0)],
            vec![],
            vec![],
        )
        .unwrap();
        export_tensor_tsv(&path, &t).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1);
        let back = import_tensor_tsv(&path).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn tensor_tsv_roundtrip() {
        use rand::{Rng, SeedableRng};
        let dir = tmp();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for case in 0..10 {
            let path = dir.path().join(format!("t{case}.tsv"));
            let n = rng.gen_range(2..8);
            let g = crate::generate::gen_er_graph(&mut rng, n, 0.5);
            let t = graph_to_tensor(&g);
            export_tensor_tsv(&path, &t).unwrap();
            assert_eq!(import_tensor_tsv(&path).unwrap(), t);
        }
    }

    #[test]
    fn manifest_roundtrip() {
        let dir = tmp();
        let path = dir.path().join("manifest.json");
        let mut manifest = Manifest::new("triangles", 9);
        manifest.warnings.push("something degenerate".into());
        manifest.save(&path).unwrap();
        assert_eq!(Manifest::load(&path).unwrap(), manifest);
    }
}
