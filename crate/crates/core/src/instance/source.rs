use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    from_maxclique, from_maxcut, from_mis, gen_graph, gen_sk_with, parse_gset, GraphAdjacency, GraphFamily,
    InstanceDocument, InstanceKind, IsingInstance, SkCouplings,
};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, TAG_INSTANCE};

/// Combinatorial problem posed on a generated graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphProblem {
    #[default]
    Maxcut,
    Mis,
    Clique,
}

/// An instance together with what is needed to score it.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedInstance {
    pub ising: IsingInstance,
    pub kind: InstanceKind,
    /// Label used to group results.
    pub family: String,
    /// The source graph for graph problems.
    pub graph: Option<GraphAdjacency>,
}

/// Where a batch of instances comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSource {
    Sk {
        n: usize,
        count: usize,
        #[serde(default)]
        couplings: SkCouplings,
    },
    Graph {
        n: usize,
        count: usize,
        graph: GraphFamily,
        #[serde(default)]
        problem: GraphProblem,
    },
    /// JSON instance documents (`.json`) or G-set files (anything else).
    Files {
        paths: Vec<PathBuf>,
        #[serde(default)]
        family: Option<String>,
    },
}

impl InstanceSource {
    pub fn family(&self) -> String {
        match self {
            InstanceSource::Sk { n, .. } => format!("sk-n{n}"),
            InstanceSource::Graph { n, graph, problem, .. } => {
                format!("{}-{}-n{n}", problem_name(*problem), graph.name())
            }
            InstanceSource::Files { family, .. } => family.clone().unwrap_or_else(|| "files".into()),
        }
    }

    /// Number of instances the source yields.
    pub fn len(&self) -> usize {
        match self {
            InstanceSource::Sk { count, .. } | InstanceSource::Graph { count, .. } => *count,
            InstanceSource::Files { paths, .. } => paths.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same source with relative file paths resolved against `base`.
    pub fn resolved(&self, base: &Path) -> Self {
        match self {
            InstanceSource::Files { paths, family } => InstanceSource::Files {
                paths: paths.iter().map(|p| if p.is_absolute() { p.clone() } else { base.join(p) }).collect(),
                family: family.clone(),
            },
            other => other.clone(),
        }
    }

    /// Materializes the instances; instance `k` of a generated family uses
    /// `derive_seed(seed, [TAG_INSTANCE, k])`.
    pub fn load(&self, seed: u64) -> Result<Vec<LoadedInstance>> {
        let family = self.family();
        match self {
            InstanceSource::Sk { n, count, couplings } => (0..*count)
                .map(|k| {
                    let ising = gen_sk_with(*n, derive_seed(seed, &[TAG_INSTANCE, k as u64]), *couplings)?;
                    Ok(LoadedInstance { ising, kind: InstanceKind::Ising, family: family.clone(), graph: None })
                })
                .collect(),
            InstanceSource::Graph { n, count, graph, problem } => (0..*count)
                .map(|k| {
                    let s = derive_seed(seed, &[TAG_INSTANCE, k as u64]);
                    let g = gen_graph(*n, *graph, s)?;
                    let (ising, kind) = match problem {
                        GraphProblem::Maxcut => (from_maxcut(&g), InstanceKind::Maxcut),
                        GraphProblem::Mis => (from_mis(&g)?, InstanceKind::Mis),
                        GraphProblem::Clique => (from_maxclique(&g)?, InstanceKind::Clique),
                    };
                    let ising = ising.with_id(format!("{family}-s{s}"));
                    Ok(LoadedInstance { ising, kind, family: family.clone(), graph: Some(g) })
                })
                .collect(),
            InstanceSource::Files { paths, .. } => paths
                .iter()
                .map(|p| {
                    let mut inst = load_instance_file(p)?;
                    inst.family = family.clone();
                    Ok(inst)
                })
                .collect(),
        }
    }
}

fn problem_name(p: GraphProblem) -> &'static str {
    match p {
        GraphProblem::Maxcut => "maxcut",
        GraphProblem::Mis => "mis",
        GraphProblem::Clique => "clique",
    }
}

/// Reads a JSON instance document or, for any other extension, a G-set
/// graph posed as Max-Cut. The file stem becomes the id of G-set graphs.
pub fn load_instance_file(path: &Path) -> Result<LoadedInstance> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("instance").to_string();
    if path.extension().is_some_and(|e| e == "json") {
        let doc = InstanceDocument::from_json(&text)?;
        let graph = match doc.kind {
            InstanceKind::Maxcut | InstanceKind::Mis | InstanceKind::Clique => Some(doc.to_graph()?),
            InstanceKind::Ising | InstanceKind::Qubo => None,
        };
        Ok(LoadedInstance { ising: doc.to_instance()?, kind: doc.kind, family: "files".into(), graph })
    } else {
        let g = parse_gset(&text)?;
        let ising = from_maxcut(&g).with_id(stem);
        Ok(LoadedInstance { ising, kind: InstanceKind::Maxcut, family: "files".into(), graph: Some(g) })
    }
}
