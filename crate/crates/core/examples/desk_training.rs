//! Trains a small discrete machine on 20 SK instances with exact targets
//! and prints the reward curve.
//!
//! `cargo run --release --example desk_training -- [t_total] [centering] [seed]`

use npim::instance::gen_sk;
use npim::machine::{Architecture, Variant};
use npim::training::{exact_ledger, train, Budget, Centering, OptimizerConfig, RewardConfig, TrainSettings};

fn main() -> npim::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let t_total: usize = args.get(1).map_or(50, |s| s.parse().expect("t_total"));
    let centering = match args.get(2).map(String::as_str) {
        Some("literal") => Centering::Literal,
        _ => Centering::RewardCentered,
    };
    let seed: u64 = args.get(3).map_or(0, |s| s.parse().expect("seed"));
    let instances: Vec<_> = (0..20).map(|k| gen_sk(20, 1000 + k)).collect::<Result<_, _>>()?;
    let mut ledger = exact_ledger(&instances)?;
    let settings = TrainSettings {
        arch: Architecture::new(8, 1, 1, Variant::Discrete)?,
        reward: RewardConfig::default(),
        budget: Budget { epochs: 200, b: 10, r: 100, t_total },
        optimizer: OptimizerConfig { centering, ..OptimizerConfig::default() },
        normalize_fields: false,
        seed,
    };
    let out = train(&settings, &instances, &mut ledger, None, &mut |r, s| {
        if r.epoch % 10 == 0 || r.epoch <= 3 {
            let l_min = s.theta_l.clone().singular_values().min();
            println!(
                "epoch {:3} reward {:+.3} hist {:?} |g_x| {:.3} sigma_min(L) {:.4}",
                r.epoch, r.mean_reward, r.reward_histogram, r.grad_norm_x, l_min
            );
        }
    })?;
    let mean = |rs: &[npim::training::EpochReport]| rs.iter().map(|r| r.mean_reward).sum::<f64>() / rs.len() as f64;
    println!("first10 {:.4} last10 {:.4}", mean(&out.reports[..10]), mean(&out.reports[190..]));
    println!("theta {:?}", out.state.theta_x);
    Ok(())
}
