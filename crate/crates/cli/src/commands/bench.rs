use npim::benchmark::{published_targets, run_suite, write_results_csv, BenchEntry, Readout, SuiteOptions};
use npim::instance::brute_force_ground;
use npim::rng::{derive_seed, TAG_STAGE};

use super::Globals;
use crate::config::{self, BenchConfig, TargetSpec};
use crate::error::{CliError, CliResult, ConfigContext, RuntimeContext};
use crate::manifest::Outputs;

/// Instance source `i` is materialized with `derive_seed(seed, [TAG_STAGE, i])`,
/// the same scheme training stages use.
pub fn entries(cfg: &BenchConfig, base: &std::path::Path) -> CliResult<Vec<BenchEntry>> {
    let mut entries = Vec::new();
    for (i, src) in cfg.instances.iter().enumerate() {
        let loaded = src.resolved(base).load(derive_seed(cfg.seed, &[TAG_STAGE, i as u64])).config()?;
        for inst in loaded {
            let readout = cfg.readout.unwrap_or_else(|| Readout::for_kind(inst.kind));
            let target = match cfg.targets {
                TargetSpec::BestFound => None,
                TargetSpec::Exact => {
                    let gt = brute_force_ground(&inst.ising).runtime()?;
                    Some(readout.value(&inst, &gt.config, gt.energy).runtime()?)
                }
                TargetSpec::Published => {
                    let id = inst.ising.id();
                    let t = published_targets()
                        .get(id)
                        .ok_or_else(|| CliError::Config(format!("no published target for instance {id}")))?;
                    if readout != Readout::Cut {
                        return Err(CliError::Config("published targets are cut values".into()));
                    }
                    Some(t.best_known_cut as f64)
                }
            };
            let t = cfg.steps.for_size(inst.ising.n());
            entries.push(BenchEntry { instance: inst, t, target });
        }
    }
    Ok(entries)
}

/// Writes `results.csv` and `summary.json`.
pub fn run(g: &Globals) -> CliResult<()> {
    let path = config::require(g.config_path(), "bench")?;
    let mut loaded = config::load::<BenchConfig>(&path)?;
    if let Some(seed) = g.seed {
        loaded.value.seed = seed;
    }
    let cfg = &loaded.value;
    cfg.validate()?;
    let machine = cfg.machine.build(&loaded.base)?;
    let entries = entries(cfg, &loaded.base)?;
    let opts = SuiteOptions { runs: cfg.runs, readout: cfg.readout, best_of: cfg.best_of, seed: cfg.seed };
    let report = run_suite(machine.as_ref(), &entries, &opts).runtime()?;

    let mut out = Outputs::new(&g.out)?;
    let mut csv = Vec::new();
    write_results_csv(&report.results, &mut csv).runtime()?;
    out.write("results.csv", csv)?;
    out.write("summary.json", serde_json::to_string_pretty(&report.summary).runtime()? + "\n")?;
    for r in &report.results {
        eprintln!(
            "{:<24} p_s {:.4}  tts {:.4e}  best {}  target {}",
            r.instance, r.p_s, r.tts, r.best_objective, r.target
        );
    }
    out.finish("bench", Some(&loaded.path), cfg.seed)?;
    Ok(())
}
