use std::path::PathBuf;

use clap::Args;
use npim::instance::{gen_sk, load_instance_file, IsingInstance};
use npim::machine::{run_trajectory, write_trace_csv, write_weight_snapshot_csv, ModelFile};

use super::Globals;
use crate::config;
use crate::error::{CliError, CliResult, ConfigContext, RuntimeContext};
use crate::manifest::Outputs;

#[derive(Debug, Args)]
pub struct TraceArgs {
    /// Trained model file.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Instance file (JSON document or G-set).
    #[arg(long, conflicts_with = "sk")]
    pub instance: Option<PathBuf>,
    /// Generate an SK instance of this size from --seed instead.
    #[arg(long)]
    pub sk: Option<usize>,
    /// Trajectory length.
    #[arg(long, default_value_t = 100)]
    pub t: usize,
    /// Directory of training snapshots (`epoch-NNNNN.model.json`).
    #[arg(long)]
    pub snapshots: Option<PathBuf>,
    /// Snapshot epochs to export; all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub epochs: Vec<usize>,
}

fn instance(args: &TraceArgs, seed: u64) -> CliResult<IsingInstance> {
    match (&args.instance, args.sk) {
        (Some(p), _) => Ok(load_instance_file(p).config()?.ising),
        (None, Some(n)) => gen_sk(n, seed).config(),
        (None, None) => Err(CliError::Config("trace needs --instance or --sk".into())),
    }
}

fn snapshot_epoch(name: &str) -> Option<usize> {
    name.strip_prefix("epoch-")?.strip_suffix(".model.json")?.parse().ok()
}

/// Writes `trace.csv`, `energy.csv` and `weights.csv` for one run of the
/// model, and `snapshots/weights-epoch-NNNNN.csv` for each training snapshot.
pub fn run(args: &TraceArgs, g: &Globals) -> CliResult<()> {
    if args.model.is_none() && args.snapshots.is_none() {
        return Err(CliError::Config("trace needs --model or --snapshots".into()));
    }
    if args.t == 0 {
        return Err(CliError::Config("--t must be >= 1".into()));
    }
    let seed = g.seed.unwrap_or(0);
    let mut out = Outputs::new(&g.out)?;
    if let Some(path) = &args.model {
        let params = config::load_model(path)?.params().config()?;
        let inst = instance(args, seed)?;
        let result = run_trajectory(&inst, &params, args.t, seed, true).runtime()?;
        let mut buf = Vec::new();
        write_trace_csv(&result, &mut buf).runtime()?;
        out.write("trace.csv", buf)?;
        let mut energy = String::from("step,energy\n");
        for (t, e) in result.energy_trace.iter().flatten().enumerate() {
            energy.push_str(&format!("{t},{e}\n"));
        }
        out.write("energy.csv", energy)?;
        let mut buf = Vec::new();
        write_weight_snapshot_csv(&params, args.t, &mut buf).runtime()?;
        out.write("weights.csv", buf)?;
        eprintln!("best energy {} at step {}", result.best_energy, result.best_step);
    }
    if let Some(dir) = &args.snapshots {
        let mut found: Vec<(usize, PathBuf)> = std::fs::read_dir(dir)
            .map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?
            .filter_map(|e| e.ok())
            .filter_map(|e| snapshot_epoch(&e.file_name().to_string_lossy()).map(|k| (k, e.path())))
            .collect();
        found.sort();
        if !args.epochs.is_empty() {
            if let Some(e) = args.epochs.iter().find(|e| !found.iter().any(|(k, _)| k == *e)) {
                return Err(CliError::Config(format!("no snapshot for epoch {e} in {}", dir.display())));
            }
            found.retain(|(k, _)| args.epochs.contains(k));
        }
        if found.is_empty() {
            return Err(CliError::Config(format!("no snapshots in {}", dir.display())));
        }
        for (epoch, path) in found {
            let params = ModelFile::load(&path).config()?.params().config()?;
            let mut buf = Vec::new();
            write_weight_snapshot_csv(&params, args.t, &mut buf).runtime()?;
            out.write(format!("snapshots/weights-epoch-{epoch:05}.csv"), buf)?;
        }
    }
    out.finish("trace", g.config_path(), seed)?;
    Ok(())
}
