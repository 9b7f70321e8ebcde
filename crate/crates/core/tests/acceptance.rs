//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Criterion 9 is report-only. Criterion 10 takes hours and runs only with
//! `NPIM_ACCEPTANCE_FULL=1`; G-set files for its spot-check are read from
//! `NPIM_GSET_DIR`.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use npim::baselines::{aim_as_npim, aim_drive, aim_explicit_run, aim_initial_state, aim_run_from, AimConfig, CacConfig};
use npim::benchmark::{published_targets, time_to_solution};
use npim::instance::{
    brute_force_ground, cut_value, from_maxclique, from_maxcut, from_mis, from_qubo, gen_sk, load_instance_file,
    GraphAdjacency, IsingInstance, QuboMatrix, SpinConfig,
};
use npim::machine::{
    run_trajectory_with, update, Architecture, IsingMachine, ParameterTensor, Variant, TrajectoryOptions,
};
use npim::rng::{GaussianNoise, Negated};
use npim::training::{
    estimate_gradients, evaluate, exact_ledger, train, Budget, Centering, EnergyLedger, OptimizerConfig,
    PerturbationSample, RewardConfig, TrainSettings,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- criterion 1

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

fn random_edges(n: usize, density: f64, r: &mut ChaCha8Rng, weight: impl Fn(&mut ChaCha8Rng) -> f64) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for (i, j) in pairs(n) {
        if r.random_bool(density) {
            edges.push((i, j, weight(r)));
        }
    }
    edges
}

fn random_unweighted(n: usize, density: f64, r: &mut ChaCha8Rng) -> GraphAdjacency {
    GraphAdjacency::from_edges(n, &random_edges(n, density, r, |_| 1.0)).unwrap()
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
}

fn independent(g: &GraphAdjacency, s: &[bool]) -> bool {
    g.edges().all(|(i, j, _)| !(s[i] && s[j]))
}

fn clique(g: &GraphAdjacency, s: &[bool]) -> bool {
    let n = g.n();
    pairs(n).all(|(i, j)| !(s[i] && s[j]) || g.weight(i, j) != 0.0)
}

fn spins_up(sigma: &SpinConfig) -> Vec<bool> {
    sigma.as_slice().iter().map(|&s| s == 1).collect()
}

fn mapping_soundness() -> Outcome {
    let mut r = rng(1);
    let mut mismatches = Vec::new();
    for case in 0..200 {
        let n = r.random_range(3..=14);
        let density = r.random_range(0.15..0.85);
        let ok = match case % 4 {
            0 => {
                let edges = random_edges(n, density, &mut r, |r| if r.random_bool(0.5) { 1.0 } else { -1.0 });
                let g = GraphAdjacency::from_edges(n, &edges).unwrap();
                let best = subsets(n)
                    .map(|s| edges.iter().filter(|(i, j, _)| s[*i] != s[*j]).map(|e| e.2).sum::<f64>())
                    .fold(f64::NEG_INFINITY, f64::max);
                let gt = brute_force_ground(&from_maxcut(&g)).unwrap();
                (cut_value(&g, &gt.config).unwrap() - best).abs() < 1e-9
            }
            1 => {
                let g = random_unweighted(n, density, &mut r);
                let best = subsets(n).filter(|s| independent(&g, s)).map(|s| s.iter().filter(|&&b| b).count()).max();
                let s = spins_up(&brute_force_ground(&from_mis(&g).unwrap()).unwrap().config);
                independent(&g, &s) && Some(s.iter().filter(|&&b| b).count()) == best
            }
            2 => {
                let g = random_unweighted(n, density, &mut r);
                let best = subsets(n).filter(|s| clique(&g, s)).map(|s| s.iter().filter(|&&b| b).count()).max();
                let s = spins_up(&brute_force_ground(&from_maxclique(&g).unwrap()).unwrap().config);
                clique(&g, &s) && Some(s.iter().filter(|&&b| b).count()) == best
            }
            _ => {
                let mut q = vec![0.0; n * n];
                for i in 0..n {
                    for j in i..n {
                        let v: f64 = r.random_range(-1.0..1.0);
                        q[i * n + j] = v;
                        q[j * n + i] = v;
                    }
                }
                let value = |b: &[bool]| -> f64 {
                    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| b[i] && b[j]).map(|(i, j)| q[i * n + j]).sum()
                };
                let best = subsets(n).map(|b| value(&b)).fold(f64::INFINITY, f64::min);
                let qm = QuboMatrix::new(n, q.clone()).unwrap();
                let s = spins_up(&brute_force_ground(&from_qubo(&qm)).unwrap().config);
                (value(&s) - best).abs() < 1e-9
            }
        };
        if !ok {
            mismatches.push(case);
        }
    }
    if mismatches.is_empty() {
        Ok("200 graphs/QUBOs, 0 mismatches".into())
    } else {
        Err(format!("mismatches in cases {mismatches:?}"))
    }
}

// ---------------------------------------------------------------- criterion 2

fn cut_identity() -> Outcome {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = r.random_range(2..=200);
        let density = r.random_range(0.01..0.5);
        let edges = random_edges(n, density, &mut r, |r| r.random_range(-3.0..3.0));
        let g = GraphAdjacency::from_edges(n, &edges).unwrap();
        let sigma = SpinConfig::new((0..n).map(|_| if r.random_bool(0.5) { 1 } else { -1 }).collect()).unwrap();
        let w: f64 = edges.iter().map(|e| e.2).sum();
        let e = from_maxcut(&g).energy(&sigma).unwrap();
        worst = worst.max((4.0 * cut_value(&g, &sigma).unwrap() - (2.0 * w - e)).abs());
    }
    if worst <= 1e-10 {
        Ok(format!("max |4 cut - (2W - E)| = {worst:.2e}"))
    } else {
        Err(format!("identity violated by {worst:.2e}"))
    }
}

// ---------------------------------------------------------------- criterion 3

fn parameter_counts() -> Outcome {
    let grid = [
        (4, 1, 1, 6),
        (8, 1, 1, 10),
        (12, 1, 1, 14),
        (4, 3, 1, 16),
        (4, 1, 3, 16),
        (8, 1, 3, 28),
        (8, 3, 1, 28),
        (12, 1, 3, 40),
        (12, 3, 1, 40),
        (4, 3, 3, 46),
        (4, 3, 5, 76),
        (8, 3, 3, 82),
        (12, 3, 3, 118),
        (8, 3, 5, 136),
    ];
    let wrong: Vec<_> = grid
        .iter()
        .filter(|&&(t_c, d, m, p)| Architecture::new(t_c, d, m, Variant::Continuous).unwrap().param_count() != p)
        .collect();
    if wrong.is_empty() {
        Ok("14/14 totals match".into())
    } else {
        Err(format!("wrong totals for {wrong:?}"))
    }
}

// ---------------------------------------------------------------- criterion 4

fn random_params(arch: Architecture, r: &mut ChaCha8Rng) -> ParameterTensor {
    let flat: Vec<f64> = (0..arch.param_count()).map(|_| r.random_range(-1.0..1.0)).collect();
    ParameterTensor::from_flat(arch, &flat).unwrap()
}

fn symmetry_suite() -> Outcome {
    let mut r = rng(4);
    let mut worst_c: f64 = 0.0;
    for case in 0..100 {
        let variant = if case % 2 == 0 { Variant::Discrete } else { Variant::Continuous };
        let arch = Architecture::new(r.random_range(1..=6), r.random_range(0..=3), r.random_range(1..=3), variant).unwrap();
        let params = random_params(arch, &mut r);
        let n = r.random_range(4..=20);
        let inst = gen_sk(n, case).unwrap();
        let t_total = 30;

        let w = params.weights_at(r.random_range(0..t_total), t_total).unwrap();
        let window: Vec<Vec<f64>> =
            (0..arch.t_c).map(|_| (0..n).map(|_| StandardNormal.sample(&mut r)).collect()).collect();
        let eta: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
        let neg_window: Vec<Vec<f64>> = window.iter().map(|row| row.iter().map(|v| -v).collect()).collect();
        let neg_eta: Vec<f64> = eta.iter().map(|v| -v).collect();
        let a = update(&arch, &w, &window, &eta).unwrap();
        let b = update(&arch, &w, &neg_window, &neg_eta).unwrap();

        let opts = TrajectoryOptions::traced();
        let ta = run_trajectory_with(&inst, &params, t_total, &GaussianNoise::new(case), opts).unwrap();
        let tb = run_trajectory_with(&inst, &params, t_total, &Negated(GaussianNoise::new(case)), opts).unwrap();
        let xa = ta.x_trace.unwrap().concat();
        let xb = tb.x_trace.unwrap().concat();
        let pairs = a.iter().zip(&b).chain(xa.iter().zip(&xb));
        match variant {
            Variant::Discrete => {
                // sign(0) = +1 breaks oddness only on exact zeros, which Gaussian inputs avoid.
                if pairs.clone().any(|(u, v)| *u != -*v) {
                    return Err(format!("case {case}: discrete rule not exactly odd"));
                }
            }
            Variant::Continuous => {
                worst_c = pairs.fold(worst_c, |m, (u, v)| m.max((u + v).abs()));
            }
        }
        if ta.energy_trace != tb.energy_trace {
            return Err(format!("case {case}: energy traces differ under the gauge flip"));
        }
    }
    if worst_c <= 1e-12 {
        Ok(format!("100 triples; discrete exact, continuous max deviation {worst_c:.1e}"))
    } else {
        Err(format!("continuous deviation {worst_c:.2e} > 1e-12"))
    }
}

// ---------------------------------------------------------------- criterion 5

fn aim_equivalence() -> Outcome {
    let mut r = rng(5);
    let (n, t) = (50, 100);
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let cfg = AimConfig {
            dt: r.random_range(0.02..0.5),
            alpha: r.random_range(0.1..1.5),
            beta: r.random_range(0.0..1.0),
            gamma: r.random_range(0.0..1.0),
            t_total: t,
        };
        let inst = gen_sk(n, 100 + case).unwrap();
        let (z0, z1) = aim_initial_state(n, case);
        let rec = aim_run_from(&inst, &cfg, &z0, &z1, true).map_err(|e| e.to_string())?;
        let zs = rec.z_trace.unwrap();
        let explicit = aim_explicit_run(&inst, &cfg, &z0, &z1, t).map_err(|e| e.to_string())?;
        let params = aim_as_npim(&cfg, t).map_err(|e| e.to_string())?;
        let drive = aim_drive(&inst, &cfg, &z0, &z1, t).map_err(|e| e.to_string())?;
        let xs = run_trajectory_with(&inst, &params, t, &drive, TrajectoryOptions::traced())
            .map_err(|e| e.to_string())?
            .x_trace
            .unwrap();
        for step in 0..t {
            for i in 0..n {
                worst = worst.max((zs[step][i] - explicit[step][i]).abs());
                worst = worst.max((zs[step][i].tanh() - xs[step][i]).abs());
            }
        }
    }
    if worst <= 1e-9 {
        Ok(format!("20 configs, n=50, T=100, max deviation {worst:.1e}"))
    } else {
        Err(format!("max deviation {worst:.2e} > 1e-9"))
    }
}

// ---------------------------------------------------------------- criterion 6

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn samples(p: usize, count: usize, seed: u64, reward: impl Fn(&[f64]) -> f64) -> Vec<PerturbationSample> {
    let mut r = rng(seed);
    (0..count)
        .map(|k| {
            let v: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut r)).collect();
            PerturbationSample { reward: reward(&v), v, instance: String::new(), seed: k as u64 }
        })
        .collect()
}

fn gradient_oracle() -> Outcome {
    let p = 4;
    let count = 100_000;
    let a = [0.7, -1.3, 0.2, 2.1];
    let scale = 0.1;
    let theta_l = DMatrix::<f64>::identity(p, p) * scale;
    let theta_x = [0.0; 4];
    // ρ(θ) = aᵀθ with θ = θ_x + θ_L v.
    let rho = |v: &[f64]| (0..p).map(|i| a[i] * (theta_x[i] + scale * v[i])).sum::<f64>();
    let s = samples(p, count, 6, rho);
    let g = estimate_gradients(&s, &theta_l, Centering::Literal).map_err(|e| e.to_string())?;
    for i in 0..p {
        let per: Vec<f64> = s.iter().map(|x| x.v[i] * x.reward / scale).collect();
        let (m, se) = mean_and_se(&per);
        if (g.g_x[i] - m).abs() > 1e-9 || (m - a[i]).abs() > 3.0 * se {
            return Err(format!("g_x[{i}] = {} vs a = {} (se {se:.3})", g.g_x[i], a[i]));
        }
    }
    // Constant reward c: E[θ_L⁻ᵀ(c vvᵀ − I)] = θ_L⁻ᵀ (c − 1) I, checked for θ_L = 0.1 I and θ_L = I.
    let c = 2.5;
    for (seed, sc) in [(7, scale), (8, 1.0)] {
        let s = samples(p, count, seed, |_| c);
        let lm = DMatrix::<f64>::identity(p, p) * sc;
        let g = estimate_gradients(&s, &lm, Centering::Literal).map_err(|e| e.to_string())?;
        for i in 0..p {
            for j in 0..p {
                let delta = if i == j { 1.0 } else { 0.0 };
                let per: Vec<f64> = s.iter().map(|x| (c * x.v[i] * x.v[j] - delta) / sc).collect();
                let (m, se) = mean_and_se(&per);
                let expected = (c - 1.0) * delta / sc;
                if (g.g_l[(i, j)] - m).abs() > 1e-9 || (m - expected).abs() > 3.0 * se {
                    return Err(format!("g_L[{i},{j}] = {} vs {expected} (se {se:.3})", g.g_l[(i, j)]));
                }
            }
        }
    }
    Ok(format!("P=4, {count} samples: g_x and literal g_L within 3 standard errors"))
}

// ---------------------------------------------------------------- criterion 7

fn tts_formula() -> Outcome {
    let a = time_to_solution(100, 0.99);
    let b = time_to_solution(100, 0.0);
    let c = time_to_solution(100, 0.5);
    if a == 100.0 && b.is_infinite() && (c - 664.39).abs() <= 0.01 {
        Ok(format!("TTS(0.99) = {a}, TTS(0) = {b}, TTS(0.5) = {c:.4}"))
    } else {
        Err(format!("got {a}, {b}, {c}"))
    }
}

// ---------------------------------------------------------------- criteria 8, 9

fn desk_instances() -> (Vec<IsingInstance>, EnergyLedger) {
    let insts: Vec<_> = (0..20).map(|k| gen_sk(20, 1000 + k).unwrap()).collect();
    let ledger = exact_ledger(&insts).unwrap();
    (insts, ledger)
}

fn desk_settings(arch: Architecture, seed: u64) -> TrainSettings {
    TrainSettings {
        arch,
        reward: RewardConfig::default(),
        budget: Budget { epochs: 200, b: 10, r: 100, t_total: 50 },
        optimizer: OptimizerConfig::default(),
        normalize_fields: false,
        seed,
    }
}

fn desk_training() -> Outcome {
    let (insts, exact) = desk_instances();
    let arch = Architecture::new(8, 1, 1, Variant::Discrete).unwrap();
    let mut log = Vec::new();
    // One seeded retry is permitted.
    for seed in [0, 1] {
        let mut ledger = exact.clone();
        let out = train(&desk_settings(arch, seed), &insts, &mut ledger, None, &mut |_, _| {}).map_err(|e| e.to_string())?;
        let mean = |rs: &[npim::training::EpochReport]| rs.iter().map(|r| r.mean_reward).sum::<f64>() / rs.len() as f64;
        let first = mean(&out.reports[..10]);
        let last = mean(&out.reports[190..]);
        log.push(format!("seed {seed}: first10 {first:.4}, last10 {last:.4}"));
        if last >= 0.1 && last >= 5.0 * first {
            return Ok(log.join("; "));
        }
    }
    Err(log.join("; "))
}

fn greedy_phase() -> Outcome {
    let (insts, exact) = desk_instances();
    let arch = Architecture::new(10, 0, 1, Variant::Discrete).unwrap();
    let mut ledger = exact;
    let mut snapshot = None;
    let mut settings = desk_settings(arch, 0);
    settings.budget.epochs = 20;
    train(&settings, &insts, &mut ledger, None, &mut |r, s| {
        if r.epoch == 20 {
            snapshot = Some(s.params(&arch).unwrap());
        }
    })
    .map_err(|e| e.to_string())?;
    let p = snapshot.ok_or("no epoch-20 snapshot")?;
    let w2 = p.weights_at(0, 50).unwrap().w2;
    let pos = w2.iter().filter(|&&w| w > 0.0).count();
    let share = pos.max(w2.len() - pos) as f64 / w2.len() as f64;
    let shown: Vec<String> = w2.iter().map(|w| format!("{w:+.2}")).collect();
    let msg = format!(
        "epoch-20 W2 sign agreement {:.0}% ({pos}/{} positive; oldest first [{}])",
        100.0 * share,
        w2.len(),
        shown.join(" ")
    );
    if share >= 0.8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ---------------------------------------------------------------- criterion 10

fn full_scale() -> Outcome {
    let mut notes = Vec::new();
    let insts: Vec<_> = (0..100).map(|k| gen_sk(100, 2000 + k).unwrap()).collect();
    let arch = Architecture::new(8, 1, 1, Variant::Continuous).unwrap();
    let settings = TrainSettings {
        arch,
        reward: RewardConfig::default(),
        budget: Budget { epochs: 800, b: 20, r: 400, t_total: 1000 },
        optimizer: OptimizerConfig::default(),
        normalize_fields: false,
        seed: 0,
    };
    let mut ledger = EnergyLedger::new();
    let out = train(&settings, &insts, &mut ledger, None, &mut |r, _| {
        if r.epoch % 50 == 0 {
            eprintln!("  epoch {} reward {:.4}", r.epoch, r.mean_reward);
        }
    })
    .map_err(|e| e.to_string())?;
    let model = out.model(&settings).map_err(|e| e.to_string())?;
    let test: Vec<_> = (0..100).map(|k| gen_sk(100, 3000 + k).unwrap()).collect();
    let eval = evaluate(&model, &test, 100, 1000, false, 1).map_err(|e| e.to_string())?;
    let rate = eval.success_rate(&EnergyLedger::new());
    notes.push(format!("cNPIM success rate {rate:.3}"));
    let mut ok = (rate - 0.350).abs() <= 0.10;

    if let Ok(dir) = std::env::var("NPIM_GSET_DIR") {
        let g1 = load_instance_file(&std::path::Path::new(&dir).join("G1")).map_err(|e| e.to_string())?;
        let graph = g1.graph.unwrap();
        let cac = CacConfig::default();
        let target = published_targets()["G1"].best_known_cut as f64;
        let best = (0..1000u64)
            .map(|s| cac.run(&g1.ising, 800, s).map(|r| cut_value(&graph, &r.best_config).unwrap()).unwrap_or(0.0))
            .fold(0.0, f64::max);
        notes.push(format!("CAC best G1 cut {best} (target {target})"));
        ok &= best >= target;
    } else {
        notes.push("G1 spot-check skipped (NPIM_GSET_DIR unset)".into());
    }
    if ok {
        Ok(notes.join("; "))
    } else {
        Err(notes.join("; "))
    }
}

fn report(label: &str, soft: bool, f: fn() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = f();
    let secs = start.elapsed().as_secs_f64();
    let tag = if soft { " (soft)" } else { "" };
    match &outcome {
        Ok(msg) => println!("PASS {label}{tag}: {msg} [{secs:.1}s]"),
        Err(msg) => println!("FAIL {label}{tag}: {msg} [{secs:.1}s]"),
    }
    outcome.is_ok() || soft
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= report("1 mapping soundness", false, mapping_soundness);
    ok &= report("2 cut identity", false, cut_identity);
    ok &= report("3 parameter counts", false, parameter_counts);
    ok &= report("4 symmetry suite", false, symmetry_suite);
    ok &= report("5 AIM equivalence", false, aim_equivalence);
    ok &= report("6 gradient estimator", false, gradient_oracle);
    ok &= report("7 TTS formula", false, tts_formula);
    ok &= report("8 desk-scale training", false, desk_training);
    report("9 greedy phase at epoch 20", true, greedy_phase);
    if std::env::var("NPIM_ACCEPTANCE_FULL").is_ok_and(|v| v == "1") {
        report("10 full-scale training", true, full_scale);
    } else {
        println!("SKIP 10 full-scale training (optional): set NPIM_ACCEPTANCE_FULL=1");
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
