use npim::rng::{derive_seed, TAG_BENCH, TAG_STAGE};
use npim::training::{evaluate, run_pipeline};

use super::{log_epoch, tail_mean, targets, write_stages, Globals};
use crate::config::{self, SweepConfig};
use crate::error::{CliResult, ConfigContext, RuntimeContext};
use crate::manifest::Outputs;

pub const SUMMARY_HEADER: &str = "t_c,d,m,variant,params,first10_reward,last10_reward,success_rate";

/// Trains the base config once per architecture point, each in its own
/// subdirectory, and writes `sweep.csv` with one row per point.
pub fn run(g: &Globals) -> CliResult<()> {
    let path = config::require(g.config_path(), "sweep")?;
    let mut loaded = config::load::<SweepConfig>(&path)?;
    if let Some(seed) = g.seed {
        loaded.value.base.seed = seed;
    }
    let sweep = &loaded.value;
    sweep.validate()?;
    let seed = sweep.base.seed;
    let eval_set = match &sweep.eval {
        Some(e) => {
            let insts: Vec<_> = e
                .instances
                .resolved(&loaded.base)
                .load(derive_seed(seed, &[TAG_BENCH, 0]))
                .config()?
                .into_iter()
                .map(|l| l.ising)
                .collect();
            let ledger = targets(&insts, e.exact_targets)?;
            Some((e, insts, ledger))
        }
        None => None,
    };

    let mut out = Outputs::new(&g.out)?;
    let mut table = format!("{SUMMARY_HEADER}\n");
    for p in &sweep.points {
        let cfg = sweep.config_for(p);
        let dir = format!("tc{}-d{}-m{}", p.t_c, p.d, p.m);
        let stages = run_pipeline(&cfg, &loaded.base, None, &mut |_, r, _| log_epoch(&dir, r)).runtime()?;
        write_stages(&mut out, &format!("{dir}/"), &stages)?;
        let last = stages.last().expect("validated configs have stages");
        let success = match &eval_set {
            Some((e, insts, ledger)) => {
                let t = e.t_total.unwrap_or(last.settings.budget.t_total);
                let ev = evaluate(
                    &last.model,
                    insts,
                    e.runs,
                    t,
                    cfg.normalize_fields,
                    derive_seed(seed, &[TAG_STAGE, TAG_BENCH]),
                )
                .runtime()?;
                ev.success_rate(ledger).to_string()
            }
            None => String::new(),
        };
        let head = &last.reports[..last.reports.len().min(10)];
        let row = format!(
            "{},{},{},{},{},{},{},{}",
            p.t_c,
            p.d,
            p.m,
            serde_json::to_value(cfg.arch.variant).runtime()?.as_str().unwrap_or_default(),
            cfg.arch.param_count(),
            tail_mean(head, 10),
            tail_mean(&last.reports, 10),
            success
        );
        eprintln!("{row}");
        table.push_str(&row);
        table.push('\n');
    }
    out.write("sweep.csv", table)?;
    out.finish("sweep", Some(&loaded.path), seed)?;
    Ok(())
}
