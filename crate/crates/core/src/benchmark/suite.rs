use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tts::{all_hit_lower_bound, median, time_to_solution};
use crate::error::{Error, Result};
use crate::instance::{cut_value, extract_feasible_set, InstanceKind, LoadedInstance, SetKind, SpinConfig};
use crate::machine::{IsingMachine, TrajectoryResult};
use crate::rng::{derive_seed, TAG_BENCH};

/// How a run's best configuration is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Readout {
    /// Ising energy, lower is better.
    Energy,
    /// Cut weight of the source graph.
    Cut,
    /// Size of the repaired independent set.
    Mis,
    /// Size of the repaired clique.
    Clique,
}

impl Readout {
    /// The natural readout for an instance kind.
    pub fn for_kind(kind: InstanceKind) -> Self {
        match kind {
            InstanceKind::Maxcut => Readout::Cut,
            InstanceKind::Mis => Readout::Mis,
            InstanceKind::Clique => Readout::Clique,
            InstanceKind::Ising | InstanceKind::Qubo => Readout::Energy,
        }
    }

    pub fn maximize(&self) -> bool {
        !matches!(self, Readout::Energy)
    }

    pub fn objective(&self, inst: &LoadedInstance, run: &TrajectoryResult) -> Result<f64> {
        self.value(inst, &run.best_config, run.best_energy)
    }

    /// Objective of a configuration whose Ising energy is `energy`.
    pub fn value(&self, inst: &LoadedInstance, sigma: &SpinConfig, energy: f64) -> Result<f64> {
        let graph = || {
            inst.graph
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter(format!("{:?} readout needs a graph instance", self)))
        };
        match self {
            Readout::Energy => Ok(energy),
            Readout::Cut => cut_value(graph()?, sigma),
            Readout::Mis => Ok(extract_feasible_set(graph()?, sigma, SetKind::Mis)?.size() as f64),
            Readout::Clique => Ok(extract_feasible_set(graph()?, sigma, SetKind::Clique)?.size() as f64),
        }
    }

    /// `value` meets or beats `target`, up to a relative tolerance of `1e−9`.
    pub fn meets(&self, value: f64, target: f64) -> bool {
        let tol = 1e-9 * target.abs().max(1.0);
        if self.maximize() {
            value >= target - tol
        } else {
            value <= target + tol
        }
    }

    /// The better of two objective values.
    pub fn better(&self, a: f64, b: f64) -> f64 {
        if self.maximize() {
            a.max(b)
        } else {
            a.min(b)
        }
    }

    fn worst(&self) -> f64 {
        if self.maximize() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    }
}

/// Steps per run, fixed or proportional to the problem size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Steps {
    Fixed(usize),
    PerN(f64),
}

impl Steps {
    pub fn for_size(&self, n: usize) -> usize {
        match *self {
            Steps::Fixed(t) => t.max(1),
            Steps::PerN(f) => ((f * n as f64).ceil() as usize).max(1),
        }
    }
}

/// One instance of a suite.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchEntry {
    pub instance: LoadedInstance,
    pub t: usize,
    /// Published or exact target; `None` uses the best value found by the suite's runs.
    pub target: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuccessStats {
    pub p_s: f64,
    pub hits: usize,
    pub runs: usize,
    pub best_objective: f64,
    pub target: f64,
    /// Objective of every run, in run order.
    pub objectives: Vec<f64>,
}

fn run_seed(seed: u64, index: usize, run: usize) -> u64 {
    derive_seed(seed, &[TAG_BENCH, index as u64, run as u64])
}

fn objectives(
    machine: &dyn IsingMachine,
    entry: &BenchEntry,
    readout: Readout,
    runs: usize,
    seed: u64,
    index: usize,
) -> Result<Vec<f64>> {
    (0..runs)
        .into_par_iter()
        .map(|run| match machine.run(&entry.instance.ising, entry.t, run_seed(seed, index, run)) {
            Ok(r) => readout.objective(&entry.instance, &r),
            Err(Error::Diverged { .. }) => Ok(readout.worst()),
            Err(e) => Err(e),
        })
        .collect()
}

fn stats(readout: Readout, target: Option<f64>, objectives: Vec<f64>) -> SuccessStats {
    let best_objective = objectives.iter().fold(readout.worst(), |a, &b| readout.better(a, b));
    let target = target.unwrap_or(best_objective);
    let hits = objectives.iter().filter(|&&v| readout.meets(v, target)).count();
    let runs = objectives.len();
    SuccessStats { p_s: hits as f64 / runs as f64, hits, runs, best_objective, target, objectives }
}

/// Fraction of `runs` seeded runs whose best objective meets the target.
///
/// Run `r` of the entry at position `index` uses
/// `derive_seed(seed, [TAG_BENCH, index, r])`.
pub fn success_probability(
    machine: &dyn IsingMachine,
    entry: &BenchEntry,
    readout: Readout,
    runs: usize,
    seed: u64,
    index: usize,
) -> Result<SuccessStats> {
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be >= 1".into()));
    }
    Ok(stats(readout, entry.target, objectives(machine, entry, readout, runs, seed, index)?))
}

/// Best objective over the first `k` seeded runs.
pub fn best_of_k(
    machine: &dyn IsingMachine,
    entry: &BenchEntry,
    readout: Readout,
    k: usize,
    seed: u64,
    index: usize,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let values = objectives(machine, entry, readout, k, seed, index)?;
    Ok(values.into_iter().fold(readout.worst(), |a, b| readout.better(a, b)))
}

/// Per-instance benchmark outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub instance: String,
    pub family: String,
    pub n: usize,
    pub machine: String,
    pub t: usize,
    pub runs: usize,
    pub hits: usize,
    pub p_s: f64,
    /// Iterations; `+∞` (serialized as `null` in JSON) if nothing hit.
    pub tts: f64,
    pub best_objective: f64,
    pub target: f64,
    /// One-sided 95% lower bound on `p_s` when every run hit.
    pub p_s_lower: Option<f64>,
    pub best_of_k: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteOptions {
    pub runs: usize,
    /// Defaults to the natural readout of each instance kind.
    #[serde(default)]
    pub readout: Option<Readout>,
    /// Also report the best objective over this many runs.
    #[serde(default)]
    pub best_of: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub instances: usize,
    pub median_tts: Option<f64>,
    pub median_p_s: Option<f64>,
    pub median_best_objective: Option<f64>,
    pub median_best_of_k: Option<f64>,
    /// Instances whose every run hit the target.
    pub all_hit: usize,
}

impl GroupSummary {
    fn of(results: &[&BenchResult]) -> Self {
        let pick = |f: &dyn Fn(&BenchResult) -> f64| median(&results.iter().map(|r| f(r)).collect::<Vec<_>>());
        let bests: Vec<f64> = results.iter().filter_map(|r| r.best_of_k).collect();
        GroupSummary {
            instances: results.len(),
            median_tts: pick(&|r| r.tts),
            median_p_s: pick(&|r| r.p_s),
            median_best_objective: pick(&|r| r.best_objective),
            median_best_of_k: median(&bests),
            all_hit: results.iter().filter(|r| r.p_s_lower.is_some()).count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub machine: String,
    pub runs: usize,
    pub seed: u64,
    pub overall: GroupSummary,
    pub families: BTreeMap<String, GroupSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub results: Vec<BenchResult>,
    pub summary: SuiteSummary,
}

/// Benchmarks `machine` on every entry; results are in entry order.
pub fn run_suite(machine: &dyn IsingMachine, entries: &[BenchEntry], opts: &SuiteOptions) -> Result<SuiteReport> {
    if entries.is_empty() {
        return Err(Error::InvalidParameter("benchmark suite has no instances".into()));
    }
    if opts.runs == 0 || opts.best_of == Some(0) {
        return Err(Error::InvalidParameter("runs and best_of must be >= 1".into()));
    }
    let name = machine.name();
    let total = opts.runs.max(opts.best_of.unwrap_or(0));
    let mut results = Vec::with_capacity(entries.len());
    for (index, entry) in entries.iter().enumerate() {
        let readout = opts.readout.unwrap_or_else(|| Readout::for_kind(entry.instance.kind));
        let all = objectives(machine, entry, readout, total, opts.seed, index)?;
        let best_k = opts.best_of.map(|k| all[..k].iter().fold(readout.worst(), |a, &b| readout.better(a, b)));
        let s = stats(readout, entry.target, all[..opts.runs].to_vec());
        results.push(BenchResult {
            instance: entry.instance.ising.id().to_string(),
            family: entry.instance.family.clone(),
            n: entry.instance.ising.n(),
            machine: name.clone(),
            t: entry.t,
            runs: s.runs,
            hits: s.hits,
            p_s: s.p_s,
            tts: time_to_solution(entry.t, s.p_s),
            best_objective: s.best_objective,
            target: s.target,
            p_s_lower: all_hit_lower_bound(s.hits, s.runs),
            best_of_k: best_k,
        });
    }
    let mut by_family: BTreeMap<String, Vec<&BenchResult>> = BTreeMap::new();
    for r in &results {
        by_family.entry(r.family.clone()).or_default().push(r);
    }
    let summary = SuiteSummary {
        machine: name,
        runs: opts.runs,
        seed: opts.seed,
        overall: GroupSummary::of(&results.iter().collect::<Vec<_>>()),
        families: by_family.iter().map(|(k, v)| (k.clone(), GroupSummary::of(v))).collect(),
    };
    Ok(SuiteReport { results, summary })
}

/// Column order of the results CSV.
pub const RESULTS_HEADER: [&str; 11] =
    ["instance", "family", "n", "machine", "t", "runs", "hits", "p_s", "tts", "best_objective", "target"];

pub fn write_results_csv<W: Write>(results: &[BenchResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in results {
        w.write_record([
            r.instance.clone(),
            r.family.clone(),
            r.n.to_string(),
            r.machine.clone(),
            r.t.to_string(),
            r.runs.to_string(),
            r.hits.to_string(),
            r.p_s.to_string(),
            r.tts.to_string(),
            r.best_objective.to_string(),
            r.target.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
