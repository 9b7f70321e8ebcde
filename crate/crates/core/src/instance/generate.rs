use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{GraphAdjacency, IsingInstance};
use crate::error::{Error, Result};
use crate::rng::{rng_for, TAG_INSTANCE};

/// Distribution of the SK couplings; both have variance `1 / n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkCouplings {
    #[default]
    Gaussian,
    Bernoulli,
}

/// Sherrington–Kirkpatrick instance with Gaussian couplings of std `1/√n`.
pub fn gen_sk(n: usize, seed: u64) -> Result<IsingInstance> {
    gen_sk_with(n, seed, SkCouplings::Gaussian)
}

pub fn gen_sk_with(n: usize, seed: u64, kind: SkCouplings) -> Result<IsingInstance> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("SK instances need n >= 2, got {n}")));
    }
    let mut rng = rng_for(seed, &[TAG_INSTANCE, n as u64]);
    let scale = 1.0 / (n as f64).sqrt();
    let mut couplings = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = match kind {
                SkCouplings::Gaussian => {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    z * scale
                }
                SkCouplings::Bernoulli => {
                    if rng.random_bool(0.5) {
                        scale
                    } else {
                        -scale
                    }
                }
            };
            couplings[i * n + j] = v;
            couplings[j * n + i] = v;
        }
    }
    IsingInstance::new(format!("sk-n{n}-s{seed}"), n, couplings, vec![0.0; n])
}

/// Graph families for Max-Cut style benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GraphFamily {
    /// Erdős–Rényi edges with weight `+1`.
    RandomUnweighted { density: f64 },
    /// Erdős–Rényi edges with weight `±1` uniformly.
    RandomPm { density: f64 },
    /// Periodic `rows x cols` lattice with `±1` weights.
    ToroidalPm { rows: usize, cols: usize },
    /// Barabási–Albert preferential attachment, `m` edges per new vertex.
    Ba { m: usize },
}

impl GraphFamily {
    pub fn name(&self) -> &'static str {
        match self {
            GraphFamily::RandomUnweighted { .. } => "random_unweighted",
            GraphFamily::RandomPm { .. } => "random_pm",
            GraphFamily::ToroidalPm { .. } => "toroidal_pm",
            GraphFamily::Ba { .. } => "ba",
        }
    }
}

fn validate(n: usize, family: &GraphFamily) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidParameter(msg));
    if n < 2 {
        return bad(format!("graphs need n >= 2, got {n}"));
    }
    match *family {
        GraphFamily::RandomUnweighted { density } | GraphFamily::RandomPm { density } => {
            if !(0.0..=1.0).contains(&density) {
                return bad(format!("density {density} outside [0, 1]"));
            }
        }
        GraphFamily::ToroidalPm { rows, cols } => {
            if rows < 3 || cols < 3 {
                return bad(format!("toroidal sides must be >= 3, got {rows}x{cols}"));
            }
            if rows * cols != n {
                return bad(format!("toroidal {rows}x{cols} does not have {n} vertices"));
            }
        }
        GraphFamily::Ba { m } => {
            if m == 0 || m >= n {
                return bad(format!("BA attachment count m = {m} must satisfy 1 <= m < n = {n}"));
            }
        }
    }
    Ok(())
}

/// Samples a graph; deterministic in `(n, family, seed)`.
pub fn gen_graph(n: usize, family: GraphFamily, seed: u64) -> Result<GraphAdjacency> {
    validate(n, &family)?;
    let mut rng = rng_for(seed, &[TAG_INSTANCE, n as u64, 0x6772_6170_68]);
    let mut g = GraphAdjacency::empty(n);
    let pm = |rng: &mut rand_chacha::ChaCha8Rng| if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    match family {
        GraphFamily::RandomUnweighted { density } => {
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.random_bool(density) {
                        g.set(i, j, 1.0);
                    }
                }
            }
        }
        GraphFamily::RandomPm { density } => {
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.random_bool(density) {
                        let w = pm(&mut rng);
                        g.set(i, j, w);
                    }
                }
            }
        }
        GraphFamily::ToroidalPm { rows, cols } => {
            for r in 0..rows {
                for c in 0..cols {
                    let v = r * cols + c;
                    let right = r * cols + (c + 1) % cols;
                    let down = ((r + 1) % rows) * cols + c;
                    let w = pm(&mut rng);
                    g.set(v, right, w);
                    let w = pm(&mut rng);
                    g.set(v, down, w);
                }
            }
        }
        GraphFamily::Ba { m } => {
            // Seed graph: a star on m + 1 vertices. Each later vertex picks m
            // distinct targets with probability proportional to degree.
            let mut endpoints: Vec<usize> = Vec::with_capacity(2 * m * n);
            for leaf in 1..=m {
                g.set(0, leaf, 1.0);
                endpoints.extend([0, leaf]);
            }
            let mut targets = Vec::with_capacity(m);
            for v in (m + 1)..n {
                targets.clear();
                while targets.len() < m {
                    let t = endpoints[rng.random_range(0..endpoints.len())];
                    if !targets.contains(&t) {
                        targets.push(t);
                    }
                }
                for &t in &targets {
                    g.set(v, t, 1.0);
                    endpoints.extend([v, t]);
                }
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sk_is_deterministic_in_seed() {
        assert_eq!(gen_sk(30, 5).unwrap(), gen_sk(30, 5).unwrap());
        assert_ne!(gen_sk(30, 5).unwrap().couplings(), gen_sk(30, 6).unwrap().couplings());
        assert!(gen_sk(1, 0).is_err());
    }

    #[test]
    fn sk_moments() {
        let n = 1000;
        let inst = gen_sk(n, 1).unwrap();
        let vals: Vec<f64> =
            (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| inst.coupling(i, j)).collect();
        let count = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / count;
        let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0)).sqrt();
        let target = 1.0 / (n as f64).sqrt();
        assert!((sd - target).abs() < 0.05 * target, "sd {sd}");

        let n = 100;
        let inst = gen_sk(n, 2).unwrap();
        let vals: Vec<f64> =
            (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| inst.coupling(i, j)).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let se = (1.0 / n as f64).sqrt() / (vals.len() as f64).sqrt();
        assert!(mean.abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn sk_bernoulli_takes_two_values() {
        let inst = gen_sk_with(10, 3, SkCouplings::Bernoulli).unwrap();
        let s = 1.0 / 10f64.sqrt();
        for i in 0..10 {
            for j in 0..10 {
                if i != j {
                    assert!((inst.coupling(i, j).abs() - s).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn toroidal_has_degree_four() {
        let g = gen_graph(16, GraphFamily::ToroidalPm { rows: 4, cols: 4 }, 0).unwrap();
        assert!((0..16).all(|v| g.degree(v) == 4));
        assert!(g.edges().all(|(_, _, w)| w == 1.0 || w == -1.0));
        let big = gen_graph(800, GraphFamily::ToroidalPm { rows: 20, cols: 40 }, 0).unwrap();
        assert_eq!(big.edge_count(), 1600);
        assert!(gen_graph(15, GraphFamily::ToroidalPm { rows: 4, cols: 4 }, 0).is_err());
    }

    #[test]
    fn random_density_matches_target() {
        let n = 800;
        let g = gen_graph(n, GraphFamily::RandomUnweighted { density: 0.06 }, 9).unwrap();
        let expected = 0.06 * (n * (n - 1) / 2) as f64;
        let got = g.edge_count() as f64;
        assert!((got - expected).abs() < 0.05 * expected, "{got} vs {expected}");
        assert!(g.is_unweighted());
        let pm = gen_graph(200, GraphFamily::RandomPm { density: 0.1 }, 9).unwrap();
        assert!(pm.edges().any(|(_, _, w)| w == -1.0));
        assert!(gen_graph(10, GraphFamily::RandomPm { density: 1.5 }, 0).is_err());
    }

    #[test]
    fn ba_edge_count_and_heavy_tail() {
        let (n, m) = (200, 4);
        let g = gen_graph(n, GraphFamily::Ba { m }, 4).unwrap();
        assert_eq!(g.edge_count(), m * (n - m));
        let degrees: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
        let mean = degrees.iter().sum::<usize>() as f64 / n as f64;
        let max = *degrees.iter().max().unwrap() as f64;
        assert!(max >= 3.0 * mean, "max {max} mean {mean}");
        assert!(gen_graph(4, GraphFamily::Ba { m: 4 }, 0).is_err());
    }

    #[test]
    fn graphs_are_deterministic() {
        let f = GraphFamily::Ba { m: 3 };
        assert_eq!(gen_graph(50, f, 1).unwrap(), gen_graph(50, f, 1).unwrap());
        assert_ne!(gen_graph(50, f, 1).unwrap(), gen_graph(50, f, 2).unwrap());
    }
}
