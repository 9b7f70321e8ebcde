use npim::instance::IsingInstance;
use npim::machine::{ModelFile, TrainingMeta};
use npim::rng::{derive_seed, TAG_BENCH, TAG_STAGE};
use npim::training::{evaluate, run_stage, Budget, EnergyLedger, Evaluation, TrainSettings};

use super::{epoch_csv, log_epoch, targets, Globals};
use crate::config::{self, GeneralizeConfig};
use crate::error::{CliResult, ConfigContext, RuntimeContext};
use crate::manifest::Outputs;

pub const TABLE_HEADER: &str = "train_size,train_reward,test_reward,train_success,test_success";

fn load_split(src: &npim::instance::InstanceSource, base: &std::path::Path, seed: u64) -> CliResult<Vec<IsingInstance>> {
    Ok(src.resolved(base).load(seed).config()?.into_iter().map(|l| l.ising).collect())
}

/// Generated splits use distinct seeds, so the same source yields disjoint
/// splits; file sources are loaded as is.
///
/// Trains one model per training-set size and writes `generalize.csv` with
/// mean rewards on the training subset and on the held-out split.
///
/// Both splits are scored against shared targets: exhaustive ground
/// energies, or the best energy any evaluation run reached on that instance.
pub fn run(g: &Globals) -> CliResult<()> {
    let path = config::require(g.config_path(), "generalize")?;
    let mut loaded = config::load::<GeneralizeConfig>(&path)?;
    if let Some(seed) = g.seed {
        loaded.value.seed = seed;
    }
    let cfg = &loaded.value;
    cfg.validate()?;
    let pool = load_split(&cfg.train_instances, &loaded.base, derive_seed(cfg.seed, &[TAG_STAGE, 0]))?;
    let test = load_split(&cfg.test_instances, &loaded.base, derive_seed(cfg.seed, &[TAG_STAGE, 1]))?;
    let eval_seed = derive_seed(cfg.seed, &[TAG_BENCH]);

    let mut out = Outputs::new(&g.out)?;
    let mut evals: Vec<(usize, Evaluation, Evaluation)> = Vec::new();
    for &k in &cfg.train_sizes {
        let settings = TrainSettings {
            arch: cfg.arch,
            reward: cfg.reward,
            budget: Budget { b: cfg.budget.b.min(k), ..cfg.budget },
            optimizer: cfg.optimizer,
            normalize_fields: cfg.normalize_fields,
            seed: derive_seed(cfg.seed, &[TAG_STAGE, k as u64]),
        };
        settings.validate().config()?;
        let train = &pool[..k];
        let mut ledger = targets(train, cfg.exact_targets)?;
        let label = format!("train-{k}");
        let (model, reports) =
            run_stage(cfg.trainer, &settings, train, &mut ledger, None, &mut |r, _| log_epoch(&label, r)).runtime()?;
        let meta = TrainingMeta {
            epochs: settings.budget.epochs,
            reward_kind: cfg.reward.kind.name().into(),
            instance_family: cfg.train_instances.family(),
            seed: settings.seed,
        };
        out.write(format!("models/train-{k:04}.model.json"), ModelFile::new(&model, meta).to_json().runtime()? + "\n")?;
        out.write_timed(format!("models/train-{k:04}.epochs.csv"), epoch_csv(&reports)?)?;
        let t = settings.budget.t_total;
        let on_train = evaluate(&model, train, cfg.eval_runs, t, cfg.normalize_fields, eval_seed).runtime()?;
        let on_test = evaluate(&model, &test, cfg.eval_runs, t, cfg.normalize_fields, eval_seed).runtime()?;
        evals.push((k, on_train, on_test));
    }

    let shared = if cfg.exact_targets {
        let mut all = targets(&pool, true)?;
        for (id, e) in targets(&test, true)?.iter() {
            all.update(id, e);
        }
        all
    } else {
        let mut best = EnergyLedger::new();
        for (_, a, b) in &evals {
            for ev in [a, b] {
                for (id, row) in ev.ids.iter().zip(&ev.energies) {
                    best.update(id, row.iter().copied().fold(f64::INFINITY, f64::min));
                }
            }
        }
        best
    };
    let tau = cfg.reward.tau0;
    let mut table = format!("{TABLE_HEADER}\n");
    for (k, a, b) in &evals {
        let row = format!(
            "{k},{},{},{},{}",
            a.mean_reward(&shared, &cfg.reward, tau),
            b.mean_reward(&shared, &cfg.reward, tau),
            a.success_rate(&shared),
            b.success_rate(&shared)
        );
        eprintln!("{row}");
        table.push_str(&row);
        table.push('\n');
    }
    out.write("generalize.csv", table)?;
    out.finish("generalize", Some(&loaded.path), cfg.seed)?;
    Ok(())
}
