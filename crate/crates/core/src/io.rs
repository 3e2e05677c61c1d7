//! JSON documents for spaces, trees, ground truth and quality reports.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::metrics::QualityReport;
use crate::poset::{Clustering, CrispRelation, OrderedSimilaritySpace, RelaxedOrder, Similarity};
use crate::set::ElementSet;
use crate::synth::PlantedTruth;
use crate::tree::{Node, NodeKind, OrientedBinaryTree};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

pub fn load_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty-printed with a trailing newline.
pub fn save_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub type Triple = (usize, usize, f64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityEntries {
    /// Row-major `n × n` values.
    Dense(Vec<f64>),
    /// `(i, j, v)`, applied to both `(i, j)` and `(j, i)`.
    Triples(Vec<Triple>),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OmegaEntries {
    pub triples: Vec<Triple>,
}

/// An ordered similarity space on disk. Absent entries are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default = "no_similarity")]
    pub similarity: SimilarityEntries,
    #[serde(default)]
    pub omega: OmegaEntries,
}

fn no_similarity() -> SimilarityEntries {
    SimilarityEntries::Triples(Vec::new())
}

fn check_pair(n: usize, i: usize, j: usize, what: &str) -> Result<()> {
    if i >= n || j >= n {
        return domain(format!("{what} entry ({i},{j}) out of range for n = {n}"));
    }
    if i == j {
        return domain(format!("{what} entry ({i},{i}) is on the diagonal"));
    }
    Ok(())
}

impl SpaceFile {
    pub fn from_space(space: &OrderedSimilaritySpace) -> Self {
        let n = space.n();
        let similarity = SimilarityEntries::Dense(space.similarity().matrix().iter().copied().collect());
        let triples = space
            .omega()
            .matrix()
            .indexed_iter()
            .filter(|(_, &v)| v != 0.0)
            .map(|((i, j), &v)| (i, j, v))
            .collect();
        Self {
            n,
            labels: space.labels().map(<[String]>::to_vec),
            similarity,
            omega: OmegaEntries { triples },
        }
    }

    pub fn to_space(&self) -> Result<OrderedSimilaritySpace> {
        let n = self.n;
        let s = match &self.similarity {
            SimilarityEntries::Dense(values) => {
                if values.len() != n * n {
                    return domain(format!("dense similarity has {} values, expected {}", values.len(), n * n));
                }
                Array2::from_shape_vec((n, n), values.clone()).expect("length checked")
            }
            SimilarityEntries::Triples(triples) => {
                let mut s = Array2::zeros((n, n));
                let mut seen = Array2::from_elem((n, n), false);
                for &(i, j, v) in triples {
                    check_pair(n, i, j, "similarity")?;
                    if seen[[i, j]] && s[[i, j]] != v {
                        return domain(format!("conflicting similarity entries for ({i},{j})"));
                    }
                    s[[i, j]] = v;
                    s[[j, i]] = v;
                    seen[[i, j]] = true;
                    seen[[j, i]] = true;
                }
                s
            }
        };
        let mut w = Array2::zeros((n, n));
        for &(i, j, v) in &self.omega.triples {
            check_pair(n, i, j, "omega")?;
            w[[i, j]] = v;
        }
        let space = OrderedSimilaritySpace::new(Similarity::new(s)?, RelaxedOrder::new(w)?)?;
        match &self.labels {
            Some(labels) => space.with_labels(labels.clone()),
            None => Ok(space),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNodeJson {
    Leaf { leaf: usize },
    Internal { left: Box<TreeNodeJson>, right: Box<TreeNodeJson> },
}

impl TreeNodeJson {
    pub fn from_node(node: &Node) -> Self {
        match node.kind() {
            NodeKind::Leaf(x) => TreeNodeJson::Leaf { leaf: *x },
            NodeKind::Internal(l, r) => TreeNodeJson::Internal {
                left: Box::new(Self::from_node(l)),
                right: Box::new(Self::from_node(r)),
            },
        }
    }

    pub fn to_node(&self) -> Result<Node> {
        match self {
            TreeNodeJson::Leaf { leaf } => Ok(Node::leaf(*leaf)),
            TreeNodeJson::Internal { left, right } => Node::join(left.to_node()?, right.to_node()?),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeMeta {
    pub objective: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub value: f64,
    pub solver: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeFile {
    pub tree: TreeNodeJson,
    pub meta: TreeMeta,
}

impl TreeFile {
    pub fn new(tree: &OrientedBinaryTree, meta: TreeMeta) -> Self {
        Self {
            tree: TreeNodeJson::from_node(tree.root()),
            meta,
        }
    }

    pub fn to_tree(&self) -> Result<OrientedBinaryTree> {
        OrientedBinaryTree::new(self.tree.to_node()?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedSplitJson {
    pub lower: Vec<usize>,
    pub upper: Vec<usize>,
}

/// Planted clusters and the order behind a generated space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruthFile {
    pub n: usize,
    pub blocks: Vec<Vec<usize>>,
    /// Strict order edges `(x, y)` meaning `x` precedes `y`.
    pub order: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planted_split: Option<PlantedSplitJson>,
}

impl TruthFile {
    pub fn from_truth(truth: &PlantedTruth) -> Self {
        Self {
            n: truth.clustering.n(),
            blocks: truth.clustering.canonical(),
            order: truth.order.edges().collect(),
            planted_split: truth.planted_split.as_ref().map(|(a, b)| PlantedSplitJson {
                lower: a.to_vec(),
                upper: b.to_vec(),
            }),
        }
    }

    pub fn to_truth(&self) -> Result<PlantedTruth> {
        let clustering = Clustering::from_blocks(self.n, self.blocks.clone())?;
        let order = CrispRelation::from_edges(self.n, self.order.iter().copied())?;
        let planted_split = match &self.planted_split {
            Some(p) => {
                let lower: ElementSet = p.lower.iter().copied().collect();
                let upper: ElementSet = p.upper.iter().copied().collect();
                if lower.union(&upper).iter().any(|x| x >= self.n) || !lower.is_disjoint(&upper) {
                    return domain("planted split must be two disjoint sets of elements");
                }
                Some((lower, upper))
            }
            None => None,
        };
        Ok(PlantedTruth {
            clustering,
            order,
            planted_split,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 over the input files and flags, hex encoded.
    pub config_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tool_version: String,
}

/// Names of the metric variants, so that reports say what they measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricVariants {
    pub ari: String,
    pub order_agreement: String,
    pub loops: String,
}

impl Default for MetricVariants {
    fn default() -> Self {
        Self {
            ari: "hubert-arabie".into(),
            order_agreement: "pair-classification-agreement".into(),
            loops: "scc-on-block-relation".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema_version: u32,
    pub report: QualityReport,
    /// Blocks of the chosen flat level.
    pub chosen_blocks: Vec<Vec<usize>>,
    pub metric_variants: MetricVariants,
    pub provenance: Provenance,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_from_triples_is_symmetrised() {
        let json = r#"{"n":3,"similarity":{"triples":[[0,1,0.5]]},"omega":{"triples":[[2,0,1.0]]}}"#;
        let file: SpaceFile = serde_json::from_str(json).unwrap();
        let sp = file.to_space().unwrap();
        assert_eq!(sp.similarity().get(1, 0), 0.5);
        assert_eq!(sp.similarity().get(0, 2), 0.0);
        assert_eq!(sp.omega().get(2, 0), 1.0);
        assert_eq!(sp.omega().get(0, 2), 0.0);
    }

    #[test]
    fn space_defaults_when_sections_missing() {
        let file: SpaceFile = serde_json::from_str(r#"{"n":2}"#).unwrap();
        let sp = file.to_space().unwrap();
        assert_eq!(sp.n(), 2);
        assert_eq!(sp.omega().get(0, 1), 0.0);
    }

    #[test]
    fn space_rejects_bad_entries() {
        for json in [
            r#"{"n":2,"similarity":{"triples":[[0,2,0.5]]}}"#,
            r#"{"n":2,"similarity":{"triples":[[0,1,0.5],[1,0,0.4]]}}"#,
            r#"{"n":2,"omega":{"triples":[[1,1,0.5]]}}"#,
            r#"{"n":2,"omega":{"triples":[[0,1,1.5]]}}"#,
            r#"{"n":2,"similarity":{"dense":[0,1,1]}}"#,
            r#"{"n":2,"similarity":{"dense":[0,0.2,0.3,0]}}"#,
            r#"{"n":2,"labels":["a"]}"#,
        ] {
            let file: SpaceFile = serde_json::from_str(json).unwrap();
            assert!(file.to_space().is_err(), "{json}");
        }
    }

    #[test]
    fn tree_json_shape() {
        let t = OrientedBinaryTree::caterpillar(&[1, 0, 2]).unwrap();
        let file = TreeFile::new(
            &t,
            TreeMeta {
                objective: "val_alpha".into(),
                alpha: Some(0.5),
                value: 1.25,
                solver: "exact".into(),
                cut: None,
                seed: None,
            },
        );
        let text = serde_json::to_string(&file.tree).unwrap();
        assert_eq!(text, r#"{"left":{"left":{"leaf":1},"right":{"leaf":0}},"right":{"leaf":2}}"#);
        assert_eq!(file.to_tree().unwrap(), t);
    }

    #[test]
    fn tree_file_rejects_duplicate_leaves() {
        let json = r#"{"left":{"leaf":0},"right":{"leaf":0}}"#;
        let node: TreeNodeJson = serde_json::from_str(json).unwrap();
        assert!(node.to_node().is_err());
    }

    #[test]
    fn truth_file_validation() {
        let bad = TruthFile {
            n: 2,
            blocks: vec![vec![0]],
            order: vec![],
            planted_split: None,
        };
        assert!(bad.to_truth().is_err());
        let ok = TruthFile {
            n: 2,
            blocks: vec![vec![0], vec![1]],
            order: vec![(0, 1)],
            planted_split: Some(PlantedSplitJson {
                lower: vec![0],
                upper: vec![1],
            }),
        };
        assert!(ok.to_truth().is_ok());
    }
}
