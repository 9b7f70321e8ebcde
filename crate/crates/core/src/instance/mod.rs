//! Ising problems, the combinatorial problems that reduce to them, instance
//! generators and an exhaustive oracle for small sizes.
//!
//! An [`IsingInstance`] is the pair `(J, l)` with energy
//!
//! ```text
//! E(σ) = Σ_{i,j} J_ij σ_i σ_j − Σ_i l_i σ_i
//! ```
//!
//! where the double sum runs over all ordered pairs, so each undirected
//! coupling contributes twice. Matrices are stored dense and row-major.

mod exhaustive;
mod generate;
mod gset;
mod json;
mod reduce;
mod source;

pub use exhaustive::{brute_force_ground, GroundTruth, GroundTruthMethod, EXHAUSTIVE_LIMIT};
pub use generate::{gen_graph, gen_sk, gen_sk_with, GraphFamily, SkCouplings};
pub use gset::{parse_gset, write_gset};
pub use json::{InstanceDocument, InstanceKind, Triplet, INSTANCE_FORMAT_VERSION};
pub use source::{load_instance_file, GraphProblem, InstanceSource, LoadedInstance};
pub use reduce::{
    cut_value, extract_feasible_set, from_maxclique, from_maxclique_with, from_maxcut, from_mis,
    from_mis_with, from_qubo, from_qubo_with, qubo_value, Encoding, SetKind,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn validate_square(n: usize, data: &[f64], require_symmetric: bool) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("problem size must be positive".into()));
    }
    if data.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, actual: data.len() });
    }
    if let Some(index) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    if require_symmetric {
        for i in 0..n {
            for j in (i + 1)..n {
                if data[i * n + j] != data[j * n + i] {
                    return Err(Error::Asymmetric { row: i, col: j });
                }
            }
        }
    }
    Ok(())
}

fn zero_diagonal(n: usize, data: &mut [f64]) {
    for i in 0..n {
        data[i * n + i] = 0.0;
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

/// Couplings `J` (symmetric, zero diagonal), linear field `l`, and a label.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingInstance {
    id: String,
    n: usize,
    couplings: Vec<f64>,
    linear: Vec<f64>,
}

impl IsingInstance {
    /// Builds an instance from a row-major `n x n` coupling matrix.
    ///
    /// The diagonal is discarded (it only shifts the energy by a constant).
    pub fn new(
        id: impl Into<String>,
        n: usize,
        mut couplings: Vec<f64>,
        linear: Vec<f64>,
    ) -> Result<Self> {
        validate_square(n, &couplings, true)?;
        check_len(n, linear.len())?;
        if let Some(index) = linear.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        zero_diagonal(n, &mut couplings);
        Ok(IsingInstance { id: id.into(), n, couplings, linear })
    }

    /// Builds an instance from nested rows.
    pub fn from_rows(id: impl Into<String>, rows: &[Vec<f64>], linear: Vec<f64>) -> Result<Self> {
        let n = rows.len();
        let mut flat = Vec::with_capacity(n * n);
        for row in rows {
            check_len(n, row.len())?;
            flat.extend_from_slice(row);
        }
        Self::new(id, n, flat, linear)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[i * self.n + j]
    }

    /// Row-major coupling matrix.
    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.couplings[i * self.n..(i + 1) * self.n]
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn has_linear_field(&self) -> bool {
        self.linear.iter().any(|&v| v != 0.0)
    }

    /// Energy of a spin configuration.
    pub fn energy(&self, sigma: &SpinConfig) -> Result<f64> {
        check_len(self.n, sigma.len())?;
        Ok(self.energy_unchecked(sigma.as_slice()))
    }

    pub(crate) fn energy_unchecked(&self, spins: &[i8]) -> f64 {
        let mut quad = 0.0;
        let mut lin = 0.0;
        for i in 0..self.n {
            let row = self.row(i);
            let mut acc = 0.0;
            for (j, &s) in spins.iter().enumerate() {
                acc += row[j] * f64::from(s);
            }
            let si = f64::from(spins[i]);
            quad += si * acc;
            lin += self.linear[i] * si;
        }
        quad - lin
    }

    /// Local fields `h = J x − l / 2`, i.e. half the energy gradient at `x`.
    pub fn fields(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, x.len())?;
        if let Some(index) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let mut out = vec![0.0; self.n];
        self.fields_into(x, &mut out);
        Ok(out)
    }

    /// [`fields`](Self::fields) without checks, writing into `out`.
    pub fn fields_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        for (i, slot) in out.iter_mut().enumerate() {
            let row = self.row(i);
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            *slot = acc - 0.5 * self.linear[i];
        }
    }

    /// Root-mean-square Euclidean norm of the coupling rows.
    pub fn rms_row_norm(&self) -> f64 {
        let total: f64 = self.couplings.iter().map(|v| v * v).sum();
        (total / self.n as f64).sqrt()
    }

    /// Flips the sign of every linear term; `E'(σ) = E(−σ)`.
    pub fn with_negated_field(&self) -> Self {
        IsingInstance {
            id: self.id.clone(),
            n: self.n,
            couplings: self.couplings.clone(),
            linear: self.linear.iter().map(|v| -v).collect(),
        }
    }
}

/// A configuration of `±1` spins.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SpinConfig(Vec<i8>);

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some((index, &value)) = spins.iter().enumerate().find(|(_, &s)| s != 1 && s != -1) {
            return Err(Error::InvalidSpin { index, value });
        }
        Ok(SpinConfig(spins))
    }

    pub fn all_up(n: usize) -> Self {
        SpinConfig(vec![1; n])
    }

    /// `sign(x)` componentwise with `sign(0) = +1`.
    pub fn from_signs(x: &[f64]) -> Self {
        SpinConfig(x.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect())
    }

    /// Spin `i` is `+1` iff bit `i` of `bits` is set.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        SpinConfig((0..n).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&s| f64::from(s)).collect()
    }

    pub fn flipped(&self) -> Self {
        SpinConfig(self.0.iter().map(|s| -s).collect())
    }

    /// Indices with spin `+1`.
    pub fn up_set(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &s)| s == 1).map(|(i, _)| i).collect()
    }
}

impl TryFrom<Vec<i8>> for SpinConfig {
    type Error = Error;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        SpinConfig::new(v)
    }
}

impl From<SpinConfig> for Vec<i8> {
    fn from(s: SpinConfig) -> Self {
        s.0
    }
}

/// A symmetric weighted adjacency matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphAdjacency {
    n: usize,
    weights: Vec<f64>,
}

impl GraphAdjacency {
    pub fn new(n: usize, weights: Vec<f64>) -> Result<Self> {
        validate_square(n, &weights, true)?;
        for i in 0..n {
            if weights[i * n + i] != 0.0 {
                return Err(Error::InvalidParameter(format!("nonzero diagonal entry at vertex {i}")));
            }
        }
        Ok(GraphAdjacency { n, weights })
    }

    pub fn empty(n: usize) -> Self {
        GraphAdjacency { n, weights: vec![0.0; n * n] }
    }

    /// Builds a graph from `(i, j, w)` triples with 0-based indices.
    /// Self-loops, out-of-range indices and repeated edges are errors.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph must have at least one vertex".into()));
        }
        let mut g = GraphAdjacency::empty(n);
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidParameter(format!("edge ({i}, {j}) out of range for n = {n}")));
            }
            if i == j {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {i}")));
            }
            if !w.is_finite() {
                return Err(Error::NonFinite { index: i * n + j });
            }
            if g.weights[i * n + j] != 0.0 {
                return Err(Error::InvalidParameter(format!("duplicate edge ({i}, {j})")));
            }
            g.set(i, j, w);
        }
        Ok(g)
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, w: f64) {
        self.weights[i * self.n + j] = w;
        self.weights[j * self.n + i] = w;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nonzero edges `(i, j, w)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            ((i + 1)..self.n).filter_map(move |j| {
                let w = self.weight(i, j);
                (w != 0.0).then_some((i, j, w))
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Number of nonzero entries in row `i`.
    pub fn degree(&self, i: usize) -> usize {
        self.weights[i * self.n..(i + 1) * self.n].iter().filter(|&&w| w != 0.0).count()
    }

    /// `W = Σ_{i<j} A_ij`.
    pub fn total_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    pub fn is_unweighted(&self) -> bool {
        self.weights.iter().all(|&w| w == 0.0 || w == 1.0)
    }

    pub(crate) fn require_unweighted(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                let value = self.weight(i, j);
                if value != 0.0 && value != 1.0 {
                    return Err(Error::WeightedGraph { row: i, col: j, value });
                }
            }
        }
        Ok(())
    }
}

/// A symmetric QUBO matrix; the objective is `bᵀ Q b` over `b ∈ {0, 1}^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboMatrix {
    n: usize,
    q: Vec<f64>,
}

impl QuboMatrix {
    pub fn new(n: usize, q: Vec<f64>) -> Result<Self> {
        validate_square(n, &q, true)?;
        Ok(QuboMatrix { n, q })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(l: Vec<f64>) -> IsingInstance {
        IsingInstance::from_rows("pair", &[vec![0.0, 1.0], vec![1.0, 0.0]], l).unwrap()
    }

    #[test]
    fn energy_counts_both_orderings() {
        let inst = pair(vec![0.0, 0.0]);
        let sigma = SpinConfig::new(vec![1, -1]).unwrap();
        assert_eq!(inst.energy(&sigma).unwrap(), -2.0);
    }

    #[test]
    fn energy_linear_term_cancels_coupling() {
        let inst = pair(vec![2.0, 0.0]);
        assert_eq!(inst.energy(&SpinConfig::all_up(2)).unwrap(), 0.0);
    }

    #[test]
    fn energy_rejects_wrong_length() {
        let inst = pair(vec![0.0, 0.0]);
        assert_eq!(
            inst.energy(&SpinConfig::all_up(3)),
            Err(Error::DimensionMismatch { expected: 2, actual: 3 })
        );
    }

    #[test]
    fn fields_direct_substitution() {
        let inst = pair(vec![0.0, 0.0]);
        assert_eq!(inst.fields(&[0.5, -0.25]).unwrap(), vec![-0.25, 0.5]);
    }

    #[test]
    fn fields_half_linear_term_is_descent_direction() {
        let inst = IsingInstance::new("l", 2, vec![0.0; 4], vec![4.0, 0.0]).unwrap();
        assert_eq!(inst.fields(&[0.0, 0.0]).unwrap(), vec![-2.0, 0.0]);
    }

    #[test]
    fn fields_reject_mismatch_and_nan() {
        let inst = pair(vec![0.0, 0.0]);
        assert!(matches!(inst.fields(&[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(inst.fields(&[1.0, f64::NAN]), Err(Error::NonFinite { index: 1 })));
    }

    #[test]
    fn construction_rejects_asymmetry_and_drops_diagonal() {
        let bad = IsingInstance::from_rows("x", &[vec![0.0, 1.0], vec![2.0, 0.0]], vec![0.0; 2]);
        assert_eq!(bad, Err(Error::Asymmetric { row: 0, col: 1 }));
        let inst =
            IsingInstance::from_rows("x", &[vec![5.0, 1.0], vec![1.0, 3.0]], vec![0.0; 2]).unwrap();
        assert_eq!(inst.coupling(0, 0), 0.0);
        assert_eq!(inst.coupling(1, 1), 0.0);
    }

    #[test]
    fn spin_config_validation() {
        assert_eq!(SpinConfig::new(vec![1, 0]), Err(Error::InvalidSpin { index: 1, value: 0 }));
        assert_eq!(SpinConfig::from_signs(&[0.0, -0.1, 2.0]).as_slice(), &[1, -1, 1]);
        let parsed: std::result::Result<SpinConfig, _> = serde_json::from_str("[1, 2]");
        assert!(parsed.is_err());
    }

    #[test]
    fn graph_from_edges_rejects_duplicates() {
        let err = GraphAdjacency::from_edges(3, &[(0, 1, 1.0), (1, 0, 1.0)]);
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
        let g = GraphAdjacency::from_edges(3, &[(0, 1, 1.0), (1, 2, -1.0)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.total_weight(), 0.0);
        assert!(!g.is_unweighted());
    }
}
