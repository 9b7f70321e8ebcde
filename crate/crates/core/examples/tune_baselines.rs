//! Coarse grid search for the CAC and AIM defaults on n = 100 SK instances.
//!
//! Each configuration runs `RUNS` seeds on `INSTANCES` instances for
//! `t_total` steps; the score is the mean residual energy relative to the
//! best energy any configuration found on that instance. Prints the winning
//! defaults file to stdout.
//!
//! `cargo run --release --example tune_baselines > data/baseline_defaults.json`

use npim::baselines::{AimConfig, BaselineDefaults, CacConfig};
use npim::instance::{gen_sk, IsingInstance};
use npim::machine::IsingMachine;
use rayon::prelude::*;

const N: usize = 100;
const INSTANCES: u64 = 5;
const RUNS: u64 = 8;
const T_TOTAL: usize = 1000;

fn bests(m: &dyn IsingMachine, insts: &[IsingInstance]) -> Vec<f64> {
    insts
        .iter()
        .map(|inst| {
            (0..RUNS)
                .into_par_iter()
                .map(|s| m.run(inst, T_TOTAL, s).map_or(f64::INFINITY, |r| r.best_energy))
                .sum::<f64>()
                / RUNS as f64
        })
        .collect()
}

fn pick<C: IsingMachine + Copy>(grid: &[C], insts: &[IsingInstance], reference: &mut [f64]) -> (C, Vec<Vec<f64>>) {
    let scores: Vec<Vec<f64>> = grid.iter().map(|c| bests(c, insts)).collect();
    for s in &scores {
        for (r, v) in reference.iter_mut().zip(s) {
            *r = r.min(*v);
        }
    }
    let residual = |s: &[f64]| s.iter().zip(reference.iter()).map(|(v, r)| (v - r) / r.abs()).sum::<f64>();
    let best = (0..grid.len()).min_by(|&a, &b| residual(&scores[a]).total_cmp(&residual(&scores[b]))).unwrap();
    eprintln!("{} residual {:.4}", grid[best].name(), residual(&scores[best]) / insts.len() as f64);
    (grid[best], scores)
}

fn main() -> npim::Result<()> {
    let insts: Vec<IsingInstance> = (0..INSTANCES).map(|k| gen_sk(N, 500 + k)).collect::<Result<_, _>>()?;
    let mut cac_grid = Vec::new();
    for dt in [0.05, 0.1] {
        for a in [-1.5, -1.0, -0.5] {
            for xi in [0.05, 0.1, 0.2, 0.5] {
                for beta in [0.1, 0.3, 0.5] {
                    cac_grid.push(CacConfig { dt, a, xi, beta, t_total: T_TOTAL });
                }
            }
        }
    }
    let mut aim_grid = Vec::new();
    for dt in [0.05, 0.1, 0.2] {
        for alpha in [0.1, 0.3, 0.5, 1.0] {
            for beta in [0.1, 0.3, 0.5] {
                for gamma in [0.0, 0.1, 0.3] {
                    aim_grid.push(AimConfig { dt, alpha, beta, gamma, t_total: T_TOTAL });
                }
            }
        }
    }
    let mut reference = vec![f64::INFINITY; insts.len()];
    // Two passes so both machines are scored against the joint reference.
    pick(&cac_grid, &insts, &mut reference);
    let (aim, _) = pick(&aim_grid, &insts, &mut reference);
    let (cac, _) = pick(&cac_grid, &insts, &mut reference);
    let defaults = BaselineDefaults {
        tuned_on: format!(
            "grid search, {INSTANCES} SK instances n={N} (gen_sk seeds 500..{}), {RUNS} runs, t_total={T_TOTAL}, mean residual energy",
            500 + INSTANCES
        ),
        cac,
        aim,
    };
    println!("{}", serde_json::to_string_pretty(&defaults).expect("serialize"));
    Ok(())
}
