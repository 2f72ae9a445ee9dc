//! Acceptance criteria AC1–AC9, one PASS/FAIL line each.

use std::path::PathBuf;
use std::time::Instant;

use approachability::blackwell::BlackwellStrategy;
use approachability::blocks::{certificate_bound, recurrence_violation};
use approachability::harness::{self, csvio, fit_rate, ClosedForms, Config, RateFit, VerifyGrids};
use approachability::regret::{contract_bound, PolynomialWeights};
use approachability::responses::{example1_matrix, ResponseFunction};
use approachability::scenarios::{
    block_player, build_constrained_scenario, default_checkpoints, run, AdversaryKind, PeriodUnit, Player, RunOptions,
    Scenario,
};
use approachability::{body_norm_bound, PayoffMatrix, TargetSet};
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;

type Outcome = (bool, String);

fn unit(rng: &mut Xoshiro256PlusPlus) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn vw(v: f64, w: f64) -> PayoffMatrix {
    PayoffMatrix::new(1, 2, vec![v, w]).unwrap()
}

fn adversaries(scenario: &Scenario) -> Vec<(&'static str, AdversaryKind)> {
    match scenario.id.as_str() {
        "example1" => vec![
            ("constant", AdversaryKind::Constant(example1_matrix(1.0))),
            (
                "periodic",
                AdversaryKind::Periodic {
                    schedule: vec![example1_matrix(1.0), example1_matrix(0.0)],
                    unit: PeriodUnit::Blocks,
                },
            ),
            ("switching", AdversaryKind::switching_example1(0.1)),
            ("random-iid", AdversaryKind::uniform_vertices(&scenario.body)),
        ],
        _ => vec![
            ("constant", AdversaryKind::Constant(vw(0.5, -0.3))),
            (
                "periodic",
                AdversaryKind::Periodic {
                    schedule: vec![vw(1.0, -1.0), vw(-1.0, 1.0), vw(1.0, 1.0)],
                    unit: PeriodUnit::Blocks,
                },
            ),
            (
                "switching",
                AdversaryKind::Switching {
                    eps0: 0.1,
                    anchor: vec![1.0],
                    stay: vw(1.0, 1.0),
                    switch: vw(-1.0, -1.0),
                },
            ),
            ("random-iid", AdversaryKind::uniform_vertices(&scenario.body)),
        ],
    }
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let k1 = body_norm_bound(&Scenario::example1().body);
    // Vertex norms are √50; the two vertices are √52 apart.
    let (dagger, sharp) = approachability::responses::example1_vertices();
    let independent = dagger.norm().max(sharp.norm()).max(dagger.distance(&sharp));
    if (k1 - 52f64.sqrt()).abs() > 1e-12 || (k1 - independent).abs() > 1e-12 {
        return (false, format!("K_max of example 1 is {k1}, expected √52"));
    }
    let mut jobs = Vec::new();
    for scenario in [Scenario::example1(), Scenario::example2()] {
        for (name, adv) in adversaries(&scenario) {
            for seed in 1..=5u64 {
                jobs.push((scenario.clone(), name, adv.clone(), seed));
            }
        }
    }
    let results: Vec<Result<(usize, usize, f64), String>> = jobs
        .par_iter()
        .map(|(scenario, name, adv, seed)| {
            let mut opts = RunOptions::new(10_000, *seed);
            opts.audit = true;
            let rec = run(scenario, &mut block_player(scenario), adv, &opts)
                .map_err(|e| format!("{} {name} seed {seed}: {e}", scenario.id))?;
            let k = body_norm_bound(&scenario.body);
            let mut violations = 0;
            let mut worst: f64 = 0.0;
            for row in &rec.rows {
                let bound = certificate_bound(k, scenario.actions(), row.t);
                let gap = row.gap.ok_or("missing gap")?;
                if (row.bound.unwrap() - bound).abs() > 1e-9 * bound {
                    return Err(format!("recorded bound differs at t={}", row.t));
                }
                if gap > bound {
                    violations += 1;
                }
                worst = worst.max(gap / bound);
            }
            Ok((rec.rows.len(), violations, worst))
        })
        .collect();
    let mut checked = 0;
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for r in results {
        match r {
            Ok((n, v, w)) => {
                checked += n;
                violations += v;
                worst = worst.max(w);
            }
            Err(e) => return (false, e),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        violations == 0 && secs < 120.0,
        format!(
            "{} runs, {checked} checkpoints, {violations} violations, max gap/bound {worst:.3}, {secs:.1}s",
            jobs.len()
        ),
    )
}

fn ac2() -> Outcome {
    let s = Scenario::example1();
    let mut opts = RunOptions::new(100_000, 1);
    opts.metrics = vec![s.metric("phi_xstar").unwrap()];
    let adv = AdversaryKind::Periodic {
        schedule: vec![example1_matrix(1.0), example1_matrix(0.0)],
        unit: PeriodUnit::Blocks,
    };
    let rec = match run(&s, &mut block_player(&s), &adv, &opts) {
        Ok(r) => r,
        Err(e) => return (false, e.to_string()),
    };
    let series = rec.series("phi_xstar").unwrap();
    let terminal = series.last().unwrap().1;
    match fit_rate(&series, 100) {
        Ok(RateFit::Fit { slope, r_squared, .. }) => (
            slope <= -0.2 && terminal <= 0.15,
            format!("slope {slope:.3} (R² {r_squared:.3}), terminal distance {terminal:.4e} at T=1e5"),
        ),
        Ok(RateFit::ConvergedToZero { first }) => (
            terminal <= 0.15,
            format!("distance reached exactly zero by t={first}; terminal {terminal:.4e}"),
        ),
        Err(e) => (false, e.to_string()),
    }
}

/// Payoff generators for the forecaster corpus; `w` is the forecaster's
/// current mixture, so some generators are adaptive.
fn corpus_payoff(kind: usize, t: usize, horizon: usize, a: usize, b: f64, w: &[f64], rng: &mut Xoshiro256PlusPlus) -> Vec<f64> {
    let argmin = |w: &[f64]| (0..w.len()).min_by(|&i, &j| w[i].total_cmp(&w[j])).unwrap();
    let argmax = |w: &[f64]| (0..w.len()).max_by(|&i, &j| w[i].total_cmp(&w[j])).unwrap();
    let one_hot = |k: usize, hi: f64, lo: f64| (0..a).map(|i| if i == k { hi } else { lo }).collect::<Vec<f64>>();
    match kind {
        0 => (0..a).map(|_| b * (2.0 * unit(rng) - 1.0)).collect(),
        1 => (0..a).map(|_| if unit(rng) < 0.5 { b } else { -b }).collect(),
        2 => one_hot(0, b, -b),
        3 => one_hot(t % a, b, -b),
        4 => one_hot(argmin(w), b, -b),
        5 => one_hot(argmax(w), -b, b),
        6 => {
            let period = (horizon as f64).sqrt().max(1.0) as usize;
            one_hot((t / period) % a, b, -b)
        }
        7 => (0..a)
            .map(|i| {
                b * (2.0 * std::f64::consts::PI * (t as f64 / horizon as f64 + i as f64 / a as f64)).sin()
            })
            .collect(),
        8 => {
            if t < horizon / 2 {
                vec![0.0; a]
            } else {
                one_hot(a - 1, b, 0.0)
            }
        }
        _ => {
            if t == 0 {
                one_hot(0, b / 2.0, 0.0)
            } else {
                one_hot(1 - t % 2, b, -b)
            }
        }
    }
}

fn ac3() -> Outcome {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(2024);
    let horizons = [1_000usize, 4_000, 10_000];
    let mut sequences = 0;
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for a in 2..=8usize {
        for &b in &[0.1, 1.0, 50.0] {
            for kind in 0..10 {
                let horizon = horizons[(a + kind) % horizons.len()];
                let mut f = PolynomialWeights::new(a);
                sequences += 1;
                for t in 0..horizon {
                    let w = f.next_action().weights().to_vec();
                    let payoff = corpus_payoff(kind, t, horizon, a, b, &w, &mut rng);
                    f.observe(&payoff).unwrap();
                    let regret = f.regret().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let bound = contract_bound(b, t + 1, a);
                    worst = worst.max(regret / bound);
                    if regret > bound {
                        violations += 1;
                    }
                }
            }
        }
    }
    (
        sequences >= 200 && violations == 0,
        format!("{sequences} sequences, every prefix checked, {violations} violations, max regret/bound {worst:.3}"),
    )
}

fn ac4() -> Outcome {
    let out = std::env::temp_dir().join("approach-acceptance-targets");
    match harness::run_checks(&ClosedForms::default(), VerifyGrids::default(), Some(&out)) {
        Ok(checks) => {
            let failed: Vec<String> = checks.iter().filter(|c| !c.passed()).map(|c| c.to_string()).collect();
            let worst = checks
                .iter()
                .map(|c| format!("{}: {:.1e}", c.name, c.max_error))
                .collect::<Vec<_>>()
                .join("; ");
            if failed.is_empty() {
                (true, format!("{} checks: {worst}", checks.len()))
            } else {
                (false, failed.join(" | "))
            }
        }
        Err(e) => (false, e.to_string()),
    }
}

fn ac5() -> Outcome {
    let s = Scenario::example1();
    let mut opts = RunOptions::new(10_000, 1);
    opts.checkpoints = (1..=10_000).collect();
    opts.metrics = vec![s.metric("phi_star").unwrap(), s.metric("phi_xstar").unwrap()];
    let rec = match run(&s, &mut block_player(&s), &AdversaryKind::switching_example1(0.1), &opts) {
        Ok(r) => r,
        Err(e) => return (false, e.to_string()),
    };
    let star = rec.series("phi_star").unwrap();
    let xs = rec.series("phi_xstar").unwrap();
    let (peak_t, peak) = star.iter().copied().fold((0, 0.0), |acc, p| if p.1 > acc.1 { p } else { acc });
    let final_xs = xs.last().unwrap().1;
    let half = xs.len() / 2;
    let mean = |v: &[(usize, f64)]| v.iter().map(|p| p.1).sum::<f64>() / v.len() as f64;
    let (early, late) = (mean(&xs[..half]), mean(&xs[half..]));
    (
        peak >= 0.8 && final_xs <= 0.2 && late <= early,
        format!(
            "max phi_star distance {peak:.3} at t={peak_t} (switches at {:?}); phi_xstar distance final {final_xs:.4}, mean {early:.4} → {late:.4}",
            rec.switch_rounds
        ),
    )
}

fn ac6() -> Outcome {
    let s = Scenario::example2_quadrant();
    let target = TargetSet::singleton(vec![0.0], approachability::Norm::L2).unwrap();
    let corner_cycle = AdversaryKind::Periodic {
        schedule: s.body.vertices().to_vec(),
        unit: PeriodUnit::Rounds(7),
    };
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, adv) in [("random-iid", AdversaryKind::uniform_vertices(&s.body)), ("cycle", corner_cycle)] {
        let strategy = BlackwellStrategy::new(s.body.clone(), ResponseFunction::Example2XStar).unwrap();
        let mut player = Player::Blackwell(strategy);
        let mut opts = RunOptions::new(100_000, 11);
        opts.audit = true;
        let rec = match run(&s, &mut player, &adv, &opts) {
            Ok(r) => r,
            Err(e) => return (false, format!("{name}: {e}")),
        };
        let Player::Blackwell(strategy) = &player else { unreachable!() };
        let series: Vec<(usize, f64)> = rec.rows.iter().map(|r| (r.t, r.delta_norm / r.t as f64)).collect();
        let slope = match fit_rate(&series, 10) {
            Ok(RateFit::Fit { slope, .. }) => slope,
            Ok(RateFit::ConvergedToZero { .. }) => f64::NEG_INFINITY,
            Err(e) => return (false, e.to_string()),
        };
        let triangle = rec
            .rows
            .iter()
            .all(|r| target.distance(&r.r_bar).unwrap() <= r.delta_norm / r.t as f64 + 1e-12);
        let excess = strategy.max_excess();
        ok &= slope <= -0.45 && excess <= 1e-6 && triangle && strategy.max_value_gap() <= 1e-7;
        lines.push(format!(
            "{name}: slope {slope:.3}, max inner-product excess {excess:.1e}, game gap {:.1e}, d(r̄,C) ≤ ‖δ‖/t {}",
            strategy.max_value_gap(),
            if triangle { "holds" } else { "fails" }
        ));
    }
    (ok, lines.join("; "))
}

fn ac7() -> Outcome {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(7);
    let mut violations = Vec::new();
    for _ in 0..1000 {
        let g1 = 10.0 * (1.0 - unit(&mut rng));
        let g2 = 10.0 * (1.0 - unit(&mut rng));
        if let Some(v) = recurrence_violation(g1, g2, 10_000) {
            violations.push((g1, g2, v));
        }
    }
    let detail = match violations.first() {
        Some((g1, g2, n)) => format!("; first at γ1 = {g1}, γ2 = {g2}, n = {n:?}"),
        None => String::new(),
    };
    (violations.is_empty(), format!("1000 pairs, n ≤ 1e4, {} violations{detail}", violations.len()))
}

fn ac8() -> Outcome {
    let u = PayoffMatrix::new(1, 2, vec![1.0, 0.0]).unwrap();
    let c = PayoffMatrix::new(1, 2, vec![1.0, 0.0]).unwrap();
    let s = build_constrained_scenario(
        &[u],
        &[c],
        TargetSet::half_line_below(0.5).unwrap(),
        TargetSet::half_line_above(1.0).unwrap(),
    )
    .unwrap();
    let payoff = s.metric("payoff").unwrap();
    let m = s.body.vertices()[0].clone();
    // Hand solution: x = (1/2, 1/2), payoff 1/2, so the target index is 1/2.
    let level = match &payoff {
        approachability::scenarios::Metric::Expansion { phi, .. } => phi.eval(&m).unwrap(),
        _ => unreachable!(),
    };
    let mut opts = RunOptions::new(10_000, 1);
    opts.metrics = vec![s.metric("cost").unwrap(), payoff];
    opts.checkpoints = default_checkpoints(10_000);
    let rec = match run(&s, &mut block_player(&s), &AdversaryKind::Constant(m), &opts) {
        Ok(r) => r,
        Err(e) => return (false, e.to_string()),
    };
    let cost = rec.series("cost").unwrap();
    let pay = rec.series("payoff").unwrap();
    let cost_late = cost.iter().filter(|p| p.0 >= 1_000).map(|p| p.1).fold(0.0, f64::max);
    let pay_final = pay.last().unwrap().1;
    (
        (level - 0.5).abs() < 1e-9 && cost_late <= 0.05 && pay_final <= 0.1,
        format!("target level {level:.6}; max cost distance for t ≥ 1e3 {cost_late:.4e}; payoff distance at 1e4 {pay_final:.4e}"),
    )
}

fn ac9() -> Outcome {
    let configs = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = std::env::temp_dir().join(format!("approach-acceptance-{}", std::process::id()));
    let mut notes = Vec::new();
    let mut ok = true;
    let mut files: Vec<PathBuf> = std::fs::read_dir(&configs)
        .map(|rd| rd.filter_map(|e| e.ok().map(|e| e.path())).collect())
        .unwrap_or_default();
    files.retain(|p| p.extension().is_some_and(|x| x == "toml"));
    files.sort();
    if files.is_empty() {
        return (false, format!("no configs in {}", configs.display()));
    }
    for path in &files {
        let cfg = match Config::from_path(path) {
            Ok(c) => c,
            Err(e) => return (false, format!("{}: {e}", path.display())),
        };
        let again = Config::from_toml(&cfg.to_toml().unwrap()).unwrap();
        ok &= again == cfg;
    }
    notes.push(format!("{} configs round-trip", files.len()));
    let path = files.iter().find(|p| p.ends_with("example1_random.toml")).unwrap_or(&files[0]);
    let mut cfg = Config::from_path(path).unwrap();
    cfg.run.horizon = cfg.run.horizon.min(5_000);
    let text = cfg.to_toml().unwrap();
    let cfg_path = dir.join("determinism.toml");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(&cfg_path, text).unwrap();
    let (a, rec) = harness::run_file(&cfg_path, &dir.join("a")).unwrap();
    let (b, _) = harness::run_file(&cfg_path, &dir.join("b")).unwrap();
    let identical = std::fs::read(&a).unwrap() == std::fs::read(&b).unwrap();
    ok &= identical;
    notes.push(format!("two runs byte-identical: {identical}"));
    let back = csvio::load(&a).unwrap();
    let mut stripped = rec.clone();
    stripped.blocks.clear();
    stripped.trajectory = None;
    stripped.wall_clock_secs = 0.0;
    let round_trip = back == stripped && csvio::to_string(&back).unwrap() == std::fs::read_to_string(&a).unwrap();
    ok &= round_trip;
    notes.push(format!("CSV round-trip: {round_trip}"));
    let _ = std::fs::remove_dir_all(&dir);
    (ok, notes.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("AC1 pathwise certificate", ac1),
        ("AC2 rate on alternating opponent", ac2),
        ("AC3 forecaster regret contract", ac3),
        ("AC4 closed forms vs oracles", ac4),
        ("AC5 switching opponent separates targets", ac5),
        ("AC6 known-game strategy rate", ac6),
        ("AC7 recurrence bound", ac7),
        ("AC8 sample-path constraints", ac8),
        ("AC9 determinism and round trips", ac9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|pat| name.contains(pat.as_str())) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = f();
        if !pass {
            failures += 1;
        }
        println!(
            "{} {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
