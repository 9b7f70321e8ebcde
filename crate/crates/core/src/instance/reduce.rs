//! Reductions of Max-Cut, Max-Clique, MIS and QUBO to the Ising form, and
//! the read-back of Ising spins as cuts and vertex sets.
//!
//! Sums over `j` exclude `j = i` and the coupling diagonal is always zero.
//!
//! The set problems and QUBO come in two encodings. [`Encoding::Exact`] is
//! derived from the energy convention of [`IsingInstance`] and its argmin
//! always decodes to an optimum: for MIS it is, up to a constant and an
//! overall factor of 8, the penalty objective `Σ_{(i,j)∈E} b_i b_j − 0.45 Σ_i b_i`
//! with `b_i = (σ_i + 1) / 2`. [`Encoding::Literal`] keeps the shorter
//! closed forms `l_i = 0.9 + Σ_j A_ij` (MIS), `l_i = 0.9 + Σ_j (1 − A_ij)`
//! (clique) and `l_i = Σ_j Q_ij` (QUBO). Their ground states are generally
//! not optima of the source problem; see the tests at the bottom of this file.

use serde::{Deserialize, Serialize};

use super::{GraphAdjacency, IsingInstance, QuboMatrix, SpinConfig};
use crate::error::{Error, Result};

/// Which closed form to use for the linear field of the set problems and QUBO.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    #[default]
    Exact,
    Literal,
}

/// Max-Cut: `J = A`, `l = 0`.
pub fn from_maxcut(g: &GraphAdjacency) -> IsingInstance {
    let n = g.n();
    IsingInstance::new("maxcut", n, g.weights().to_vec(), vec![0.0; n])
        .expect("graph invariants imply a valid instance")
}

pub fn from_mis(g: &GraphAdjacency) -> Result<IsingInstance> {
    from_mis_with(g, Encoding::Exact)
}

/// Maximum independent set; `σ_i = +1` marks a selected vertex.
///
/// Exact: `J = A`, `l_i = 1.8 − 2 Σ_{j≠i} A_ij`.
pub fn from_mis_with(g: &GraphAdjacency, encoding: Encoding) -> Result<IsingInstance> {
    g.require_unweighted()?;
    let n = g.n();
    let linear = (0..n)
        .map(|i| {
            let degree: f64 = (0..n).filter(|&j| j != i).map(|j| g.weight(i, j)).sum();
            match encoding {
                Encoding::Exact => 1.8 - 2.0 * degree,
                Encoding::Literal => 0.9 + degree,
            }
        })
        .collect();
    IsingInstance::new("mis", n, g.weights().to_vec(), linear)
}

pub fn from_maxclique(g: &GraphAdjacency) -> Result<IsingInstance> {
    from_maxclique_with(g, Encoding::Exact)
}

/// Maximum clique, as MIS on the complement graph.
///
/// `J_ij = 1 − A_ij` off the diagonal; exact `l_i = 1.8 − 2 Σ_{j≠i} (1 − A_ij)`.
pub fn from_maxclique_with(g: &GraphAdjacency, encoding: Encoding) -> Result<IsingInstance> {
    g.require_unweighted()?;
    let n = g.n();
    let mut couplings = vec![0.0; n * n];
    let mut linear = vec![0.0; n];
    for i in 0..n {
        let mut missing = 0.0;
        for j in 0..n {
            if j != i {
                let c = 1.0 - g.weight(i, j);
                couplings[i * n + j] = c;
                missing += c;
            }
        }
        linear[i] = match encoding {
            Encoding::Exact => 1.8 - 2.0 * missing,
            Encoding::Literal => 0.9 + missing,
        };
    }
    IsingInstance::new("maxclique", n, couplings, linear)
}

pub fn from_qubo(q: &QuboMatrix) -> IsingInstance {
    from_qubo_with(q, Encoding::Exact)
}

/// QUBO `min bᵀQb` with `b_i = (σ_i + 1) / 2`.
///
/// Exact: `J_ij = Q_ij` off the diagonal, `l_i = −2 Σ_j Q_ij`; then
/// `4 bᵀQb = E(σ) + Σ_ij Q_ij + Σ_i Q_ii`.
pub fn from_qubo_with(q: &QuboMatrix, encoding: Encoding) -> IsingInstance {
    let n = q.n();
    let linear = (0..n)
        .map(|i| {
            let row: f64 = (0..n).map(|j| q.get(i, j)).sum();
            match encoding {
                Encoding::Exact => -2.0 * row,
                Encoding::Literal => row,
            }
        })
        .collect();
    IsingInstance::new("qubo", n, q.entries().to_vec(), linear)
        .expect("QUBO invariants imply a valid instance")
}

/// `bᵀ Q b` for a 0/1 assignment.
pub fn qubo_value(q: &QuboMatrix, bits: &[bool]) -> Result<f64> {
    let n = q.n();
    if bits.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: bits.len() });
    }
    let mut total = 0.0;
    for i in (0..n).filter(|&i| bits[i]) {
        for j in (0..n).filter(|&j| bits[j]) {
            total += q.get(i, j);
        }
    }
    Ok(total)
}

/// Weight of the edges crossing the partition, `Σ_{i<j} A_ij (1 − σ_i σ_j) / 2`.
pub fn cut_value(g: &GraphAdjacency, sigma: &SpinConfig) -> Result<f64> {
    if sigma.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), actual: sigma.len() });
    }
    let s = sigma.as_slice();
    Ok(g.edges().filter(|&(i, j, _)| s[i] != s[j]).map(|(_, _, w)| w).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Mis,
    Clique,
}

/// A feasible vertex set and how many vertices the repair dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibleSet {
    pub vertices: Vec<usize>,
    pub removed: usize,
}

impl FeasibleSet {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

/// Repairs `{i : σ_i = +1}` into an independent set (or clique).
///
/// Repeatedly drops the vertex with the most violations (neighbours inside
/// the set for MIS, non-neighbours inside the set for cliques), lowest index
/// first on ties.
pub fn extract_feasible_set(
    g: &GraphAdjacency,
    sigma: &SpinConfig,
    kind: SetKind,
) -> Result<FeasibleSet> {
    g.require_unweighted()?;
    let n = g.n();
    if sigma.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: sigma.len() });
    }
    let conflict = |u: usize, v: usize| match kind {
        SetKind::Mis => g.weight(u, v) != 0.0,
        SetKind::Clique => g.weight(u, v) == 0.0,
    };
    let mut in_set: Vec<bool> = sigma.as_slice().iter().map(|&s| s == 1).collect();
    let members = sigma.up_set();
    let mut violations = vec![0usize; n];
    for &u in &members {
        violations[u] = members.iter().filter(|&&v| v != u && conflict(u, v)).count();
    }
    let mut removed = 0;
    loop {
        let worst = (0..n)
            .filter(|&v| in_set[v] && violations[v] > 0)
            .fold(None, |best: Option<usize>, v| match best {
                Some(b) if violations[b] >= violations[v] => Some(b),
                _ => Some(v),
            });
        let Some(v) = worst else { break };
        in_set[v] = false;
        removed += 1;
        for u in 0..n {
            if in_set[u] && u != v && conflict(u, v) {
                violations[u] -= 1;
            }
        }
    }
    let vertices = (0..n).filter(|&v| in_set[v]).collect();
    Ok(FeasibleSet { vertices, removed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::brute_force_ground;

    fn graph(n: usize, edges: &[(usize, usize)]) -> GraphAdjacency {
        let triples: Vec<_> = edges.iter().map(|&(i, j)| (i, j, 1.0)).collect();
        GraphAdjacency::from_edges(n, &triples).unwrap()
    }

    fn spins(v: &[i8]) -> SpinConfig {
        SpinConfig::new(v.to_vec()).unwrap()
    }

    #[test]
    fn maxcut_single_edge_is_identity() {
        let inst = from_maxcut(&graph(2, &[(0, 1)]));
        assert_eq!(inst.couplings(), &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(inst.linear(), &[0.0, 0.0]);
    }

    #[test]
    fn maxcut_triangle_ground_is_two_one_split() {
        let inst = from_maxcut(&graph(3, &[(0, 1), (0, 2), (1, 2)]));
        let ground = brute_force_ground(&inst).unwrap();
        assert_eq!(ground.energy, -2.0);
        let ups = ground.config.up_set().len();
        assert!(ups == 1 || ups == 2);
    }

    #[test]
    fn maxclique_complete_graph_selects_everything() {
        let k3 = graph(3, &[(0, 1), (0, 2), (1, 2)]);
        let inst = from_maxclique(&k3).unwrap();
        assert!(inst.couplings().iter().all(|&c| c == 0.0));
        assert_eq!(inst.linear(), &[1.8, 1.8, 1.8]);
        let ground = brute_force_ground(&inst).unwrap();
        assert_eq!(ground.config, SpinConfig::all_up(3));
        let literal = from_maxclique_with(&k3, Encoding::Literal).unwrap();
        assert_eq!(literal.linear(), &[0.9, 0.9, 0.9]);
    }

    #[test]
    fn maxclique_empty_graph_selects_one_vertex() {
        let inst = from_maxclique(&GraphAdjacency::empty(2)).unwrap();
        let ground = brute_force_ground(&inst).unwrap();
        assert_eq!(ground.config.up_set().len(), 1);
    }

    #[test]
    fn maxclique_k3_minus_edge_has_clique_two() {
        let g = graph(3, &[(0, 1), (0, 2)]);
        let ground = brute_force_ground(&from_maxclique(&g).unwrap()).unwrap();
        let set = extract_feasible_set(&g, &ground.config, SetKind::Clique).unwrap();
        assert_eq!(set.removed, 0);
        assert_eq!(set.size(), 2);
    }

    #[test]
    fn mis_single_edge() {
        let g = graph(2, &[(0, 1)]);
        let inst = from_mis(&g).unwrap();
        let ground = brute_force_ground(&inst).unwrap();
        assert_eq!(ground.config.up_set().len(), 1);
        let literal = from_mis_with(&g, Encoding::Literal).unwrap();
        assert_eq!(literal.linear(), &[1.9, 1.9]);
        let lg = brute_force_ground(&literal).unwrap();
        assert_eq!(lg.energy, -2.0);
        assert_eq!(lg.config, spins(&[-1, 1]));
    }

    #[test]
    fn mis_empty_graph_selects_all() {
        let ground = brute_force_ground(&from_mis(&GraphAdjacency::empty(3)).unwrap()).unwrap();
        assert_eq!(ground.config, SpinConfig::all_up(3));
    }

    #[test]
    fn mis_path_selects_endpoints() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        for encoding in [Encoding::Exact, Encoding::Literal] {
            let ground = brute_force_ground(&from_mis_with(&g, encoding).unwrap()).unwrap();
            assert_eq!(ground.config, spins(&[1, -1, 1]), "{encoding:?}");
        }
    }

    #[test]
    fn literal_mis_is_not_sound_on_triangle() {
        // The literal ground state selects two adjacent vertices of K3.
        let k3 = graph(3, &[(0, 1), (0, 2), (1, 2)]);
        let ground = brute_force_ground(&from_mis_with(&k3, Encoding::Literal).unwrap()).unwrap();
        let set = extract_feasible_set(&k3, &ground.config, SetKind::Mis).unwrap();
        assert_eq!(ground.config.up_set().len(), 2);
        assert_eq!(set.removed, 1);
        let exact = brute_force_ground(&from_mis(&k3).unwrap()).unwrap();
        assert_eq!(exact.config.up_set().len(), 1);
    }

    #[test]
    fn mapping_rejects_weighted_graphs() {
        let g = GraphAdjacency::from_edges(2, &[(0, 1, -1.0)]).unwrap();
        assert!(matches!(from_mis(&g), Err(Error::WeightedGraph { .. })));
        assert!(matches!(from_maxclique(&g), Err(Error::WeightedGraph { .. })));
    }

    #[test]
    fn qubo_small_cases() {
        let zero = from_qubo(&QuboMatrix::new(2, vec![0.0; 4]).unwrap());
        assert!(zero.couplings().iter().all(|&c| c == 0.0));
        assert!(zero.linear().iter().all(|&c| c == 0.0));
        let q = QuboMatrix::new(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let exact = from_qubo(&q);
        assert_eq!(exact.couplings(), &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(exact.linear(), &[-2.0, -2.0]);
        assert_eq!(from_qubo_with(&q, Encoding::Literal).linear(), &[1.0, 1.0]);
        assert!(QuboMatrix::new(2, vec![0.0, 1.0, 2.0, 0.0]).is_err());
    }

    #[test]
    fn qubo_energy_identity() {
        let q = QuboMatrix::new(3, vec![1.0, -2.0, 0.5, -2.0, 3.0, 1.5, 0.5, 1.5, -1.0]).unwrap();
        let inst = from_qubo(&q);
        let offset: f64 = q.entries().iter().sum::<f64>() + (0..3).map(|i| q.get(i, i)).sum::<f64>();
        for bits in 0..8u64 {
            let sigma = SpinConfig::from_bits(3, bits);
            let b: Vec<bool> = sigma.as_slice().iter().map(|&s| s == 1).collect();
            let lhs = 4.0 * qubo_value(&q, &b).unwrap();
            let rhs = inst.energy(&sigma).unwrap() + offset;
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn cut_of_triangle_and_uniform_config() {
        let k3 = graph(3, &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(cut_value(&k3, &spins(&[1, 1, -1])).unwrap(), 2.0);
        assert_eq!(cut_value(&k3, &SpinConfig::all_up(3)).unwrap(), 0.0);
        assert!(cut_value(&k3, &SpinConfig::all_up(2)).is_err());
    }

    #[test]
    fn repair_tie_breaks_on_lowest_index() {
        let edge = graph(2, &[(0, 1)]);
        let set = extract_feasible_set(&edge, &SpinConfig::all_up(2), SetKind::Mis).unwrap();
        assert_eq!(set.vertices, vec![1]);
        let empty = GraphAdjacency::empty(4);
        let set = extract_feasible_set(&empty, &SpinConfig::all_up(4), SetKind::Mis).unwrap();
        assert_eq!(set.vertices, vec![0, 1, 2, 3]);
        assert_eq!(set.removed, 0);
        let g = graph(3, &[(0, 1), (0, 2)]);
        let set = extract_feasible_set(&g, &SpinConfig::all_up(3), SetKind::Clique).unwrap();
        assert_eq!(set.vertices, vec![0, 2]);
    }

    #[test]
    fn repair_removes_highest_conflict_vertex_first() {
        // Star: centre 0 conflicts with three leaves.
        let star = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        let set = extract_feasible_set(&star, &SpinConfig::all_up(4), SetKind::Mis).unwrap();
        assert_eq!(set.vertices, vec![1, 2, 3]);
        assert_eq!(set.removed, 1);
    }
}
