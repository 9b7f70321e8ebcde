use serde::{Deserialize, Serialize};

use super::{GraphAdjacency, IsingInstance};
use crate::error::{Error, Result};

pub const INSTANCE_FORMAT_VERSION: u32 = 1;

/// The problem an Ising instance was reduced from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Ising,
    Maxcut,
    Mis,
    Clique,
    Qubo,
}

/// Upper-triangle coupling entry `(i, j, J_ij)` with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triplet(pub usize, pub usize, pub f64);

/// Versioned JSON form of an [`IsingInstance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub format_version: u32,
    pub n: usize,
    pub kind: InstanceKind,
    pub couplings: Vec<Triplet>,
    pub linear: Vec<f64>,
    pub id: String,
}

impl InstanceDocument {
    pub fn from_instance(inst: &IsingInstance, kind: InstanceKind) -> Self {
        let n = inst.n();
        let couplings = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let v = inst.coupling(i, j);
                (v != 0.0).then_some(Triplet(i, j, v))
            })
            .collect();
        InstanceDocument {
            format_version: INSTANCE_FORMAT_VERSION,
            n,
            kind,
            couplings,
            linear: inst.linear().to_vec(),
            id: inst.id().to_string(),
        }
    }

    pub fn to_instance(&self) -> Result<IsingInstance> {
        if self.format_version != INSTANCE_FORMAT_VERSION {
            return Err(Error::FormatVersion {
                found: self.format_version,
                expected: INSTANCE_FORMAT_VERSION,
            });
        }
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        let mut couplings = vec![0.0; n * n];
        for &Triplet(i, j, v) in &self.couplings {
            if i >= n || j >= n || i == j {
                return Err(Error::InvalidParameter(format!("bad coupling index ({i}, {j})")));
            }
            if couplings[i * n + j] != 0.0 {
                return Err(Error::InvalidParameter(format!("duplicate coupling ({i}, {j})")));
            }
            couplings[i * n + j] = v;
            couplings[j * n + i] = v;
        }
        IsingInstance::new(self.id.clone(), n, couplings, self.linear.clone())
    }

    /// Recovers the source graph for graph-derived kinds.
    pub fn to_graph(&self) -> Result<GraphAdjacency> {
        let inst = self.to_instance()?;
        let n = inst.n();
        let weights = match self.kind {
            InstanceKind::Maxcut | InstanceKind::Mis => inst.couplings().to_vec(),
            InstanceKind::Clique => (0..n * n)
                .map(|k| if k / n == k % n { 0.0 } else { 1.0 - inst.couplings()[k] })
                .collect(),
            InstanceKind::Ising | InstanceKind::Qubo => {
                return Err(Error::InvalidParameter(format!(
                    "instance kind {:?} has no source graph",
                    self.kind
                )))
            }
        };
        GraphAdjacency::new(n, weights)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
