//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process fails if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use jrp::format::result_to_json;
use jrp::generate::{generate, Family, GenSpec};
use jrp::solve_parallel;
use jrp_core::alignment::{
    admissible_labels, build_segments, choose_representatives, solve_components, AlignmentGuess, LabeledEdge,
    SegmentLadder,
};
use jrp_core::baseline::baseline;
use jrp_core::density::{asymptotic_density, count_orders, DEFAULT_EXPONENT_CAP};
use jrp_core::eoq::{EoqModel, Instance};
use jrp_core::numerics::rational_lcm;
use jrp_core::policy::{evaluate_exact, evaluate_uncrossing};
use jrp_core::solver::{SolvePlan, SolverConfig};
use jrp_core::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

fn random_instance(rng: &mut ChaCha8Rng, max_n: usize) -> Instance {
    let n = rng.gen_range(1..=max_n);
    let params: Vec<(f64, f64)> =
        (0..n).map(|_| (log_uniform(rng, 0.01, 100.0), log_uniform(rng, 0.01, 100.0))).collect();
    Instance::from_params(log_uniform(rng, 0.01, 100.0), &params).unwrap()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(4, |n| n.get()).min(8)
}

fn eoq_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (k, h) = (log_uniform(&mut rng, 1e-3, 1e3), log_uniform(&mut rng, 1e-3, 1e3));
        let theta = log_uniform(&mut rng, 1e-2, 1e2);
        let m = EoqModel::new(k, h).unwrap();
        let t = m.minimizer();
        if !rel_close(t, (k / h).sqrt(), 1e-12) {
            return Err(format!("T* mismatch for K={k} H={h}"));
        }
        let lhs = m.cost(theta * t).unwrap();
        let rhs = 0.5 * (theta + 1.0 / theta) * m.cost(t).unwrap();
        worst = worst.max((lhs - rhs).abs() / rhs);
        if !rel_close(lhs, rhs, 1e-12) {
            return Err(format!("C(θT*) mismatch for K={k} H={h} θ={theta}: {lhs} vs {rhs}"));
        }
    }
    Ok(format!("1000 draws, worst relative gap {worst:.1e}"))
}

fn random_grid(rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let n = rng.gen_range(1..=4);
    let mut g: Vec<Rational> =
        (0..n).map(|_| Rational::ratio(rng.gen_range(1..=36), rng.gen_range(1..=12))).collect();
    g.sort();
    g.dedup();
    g
}

fn naive_count(grid: &[Rational], horizon: &Rational) -> u64 {
    let scale = grid.iter().fold(BigInt::from(1), |acc, m| acc.lcm(m.denom())) * horizon.denom();
    let to_int = |x: &Rational| -> u64 { (x * &scale).floor().try_into().unwrap() };
    let limit = to_int(horizon);
    let mut epochs = BTreeSet::new();
    for m in grid {
        let step = to_int(m);
        let mut t = 0;
        while t <= limit {
            epochs.insert(t);
            t += step;
        }
    }
    epochs.len() as u64
}

fn density_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grids = 500;
    for _ in 0..grids {
        let g = random_grid(&mut rng);
        let max = g.last().unwrap().clone();
        let density = asymptotic_density(&g, DEFAULT_EXPONENT_CAP).unwrap();
        let delta = &max * &Rational::from_integer(1000);
        let count = Rational::from_integer(count_orders(&g, &delta, DEFAULT_EXPONENT_CAP).unwrap());
        if (&count / &delta - &density).abs() > Rational::from_integer(1i64 << g.len()) / &delta {
            return Err(format!("squeeze violated for {g:?}"));
        }
        let small = &max * &Rational::ratio(rng.gen_range(0..=10_000), 100);
        let count = count_orders(&g, &small, DEFAULT_EXPONENT_CAP).unwrap();
        if count != BigInt::from(naive_count(&g, &small)) {
            return Err(format!("count mismatch for {g:?} at horizon {small}"));
        }
    }
    Ok(format!("{grids} grids, squeeze and sorted-merge counts exact"))
}

fn lcm_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0u64;
    for _ in 0..500 {
        let (pa, qa, pb, qb): (u64, u64, u64, u64) =
            (rng.gen_range(1..=100), rng.gen_range(1..=100), rng.gen_range(1..=100), rng.gen_range(1..=100));
        let (a, b) = (Rational::ratio(pa as i64, qa as i64), Rational::ratio(pb as i64, qb as i64));
        let m = rational_lcm(&a, &b).unwrap();
        if !m.is_multiple_of(&a) || !m.is_multiple_of(&b) {
            return Err(format!("lcm({a}, {b}) = {m} is not a common multiple"));
        }
        let steps: u64 = (&m / &a).floor().try_into().unwrap();
        let limit = steps.min(10_000);
        for k in 1..limit {
            // k·a is a multiple of b iff k·pa·qb ≡ 0 mod qa·pb
            if (k * pa * qb) % (qa * pb) == 0 {
                return Err(format!("{k}·{a} is a smaller common multiple of {a} and {b}"));
            }
            checked += 1;
        }
    }
    Ok(format!("500 pairs, {checked} smaller multiples ruled out"))
}

fn baseline_corpus() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    (0..200).map(|_| random_instance(&mut rng, 10)).collect()
}

fn pow2_guarantee() -> Outcome {
    let bound = 1.06066 + 1e-9;
    let mut worst: f64 = 0.0;
    for inst in baseline_corpus() {
        let b = baseline(&inst).unwrap();
        worst = worst.max(b.pow2_cost / b.lower_bound);
    }
    let msg = format!("200 instances, max F(pow2)/LB = {worst:.9}");
    if worst <= bound {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn opt_sandwich() -> Outcome {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for inst in baseline_corpus() {
        let b = baseline(&inst).unwrap();
        let ratio = b.opt_estimate / b.lower_bound;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    let msg = format!("200 instances, OPT~/LB in [{lo:.9}, {hi:.9}]");
    if lo >= 1.0 && hi <= 1.0607 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

const EPSILONS: [(i64, i64); 6] = [(3, 10), (1, 3), (7, 20), (2, 5), (9, 20), (49, 100)];

fn random_ladder(rng: &mut ChaCha8Rng) -> SegmentLadder {
    let (p, q) = EPSILONS[rng.gen_range(0..EPSILONS.len())];
    build_segments(&Rational::ratio(p, q), 1.0).unwrap()
}

fn random_guess(rng: &mut ChaCha8Rng, ladder: &SegmentLadder, psi: u64, edge_prob: f64) -> AlignmentGuess {
    let mut active = vec![1];
    active.extend((2..=ladder.len()).filter(|_| rng.gen_bool(0.6)));
    let mut edges = Vec::new();
    for (i, &v) in active.iter().enumerate().skip(1) {
        if !rng.gen_bool(edge_prob) {
            continue;
        }
        let u = active[rng.gen_range(0..i)];
        let labels = admissible_labels(ladder, v - u, psi);
        if labels.is_empty() {
            continue;
        }
        let (alpha_low, alpha_high) = labels[rng.gen_range(0..labels.len())];
        edges.push(LabeledEdge { low: u, high: v, alpha_low, alpha_high });
    }
    AlignmentGuess::new(active, edges, ladder, psi).unwrap()
}

fn beta_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut feasible, mut edges) = (0, 0);
    let mut attempts = 0;
    while feasible < 500 {
        attempts += 1;
        if attempts > 100_000 {
            return Err(format!("only {feasible} feasible forests found"));
        }
        let ladder = random_ladder(&mut rng);
        let psi = rng.gen_range(1..=64);
        let guess = random_guess(&mut rng, &ladder, psi, 0.9);
        if guess.edges().is_empty() {
            continue;
        }
        let Some(components) = solve_components(&guess, &ladder).unwrap() else {
            continue;
        };
        feasible += 1;
        for comp in &components {
            let bound = BigInt::from(psi).pow(comp.vertices.len() as u32);
            for (s, beta) in &comp.betas.values {
                if beta.numer() > &bound || beta.denom() > &bound {
                    return Err(format!("beta {beta} of segment {s} exceeds {psi}^{}", comp.vertices.len()));
                }
            }
            for e in guess.edges() {
                if let (Some(bl), Some(bh)) = (comp.betas.get(e.low), comp.betas.get(e.high)) {
                    edges += 1;
                    if &Rational::from_integer(e.alpha_low) * bl != &Rational::from_integer(e.alpha_high) * bh {
                        return Err(format!("edge {e:?} violated"));
                    }
                }
            }
        }
    }
    Ok(format!("500 feasible forests, {edges} edge equations exact"))
}

fn brute_aligned(x: &Rational, y: &Rational, psi: u64) -> bool {
    (1..=psi).any(|a| (1..=psi).any(|b| &Rational::from_integer(a) * x == &Rational::from_integer(b) * y))
}

fn misalignment() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut configs, mut pairs) = (0, 0);
    let mut attempts = 0;
    while configs < 100 {
        attempts += 1;
        if attempts > 100_000 {
            return Err(format!("only {configs} multi-component configurations found"));
        }
        let ladder = random_ladder(&mut rng);
        let psi = rng.gen_range(1..=32);
        let guess = random_guess(&mut rng, &ladder, psi, 0.4);
        let Some(components) = solve_components(&guess, &ladder).unwrap() else {
            continue;
        };
        if components.len() < 2 {
            continue;
        }
        configs += 1;
        let reps = choose_representatives(&components, psi);
        for (i, a) in components.iter().enumerate() {
            for b in &components[i + 1..] {
                for &x in &a.vertices {
                    for &y in &b.vertices {
                        pairs += 1;
                        let (rx, ry) = (reps.get(x).unwrap(), reps.get(y).unwrap());
                        if brute_aligned(rx, ry, psi) {
                            return Err(format!("segments {x} ({rx}) and {y} ({ry}) aligned at psi {psi}"));
                        }
                    }
                }
            }
        }
    }
    Ok(format!("100 configurations, {pairs} cross-component pairs misaligned"))
}

fn uncrossing_cross_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut instances: Vec<Instance> = (0..3).map(|_| random_instance(&mut rng, 5)).collect();
    instances.push(generate(&GenSpec::new(4, 8, Family::TwoScale)).unwrap());
    let mut checked = 0u64;
    let mut worst: f64 = 0.0;
    for (eps, budget) in [(Rational::ratio(9, 20), 2_000), (Rational::ratio(49, 100), u64::MAX)] {
        let two_eps = 2.0 * eps.to_f64();
        for inst in &instances {
            let config = SolverConfig { psi_cap: None, guess_budget: budget, ..SolverConfig::default() };
            let plan = SolvePlan::new(inst, &eps, &config).unwrap();
            if plan.psi().is_capped() {
                return Err("psi is capped".into());
            }
            for (ordinal, guess) in plan.guesses().unwrap() {
                for j in 0..plan.tmins().len() {
                    let Some(policy) = plan.candidate_policy(j, ordinal, &guess).unwrap() else {
                        continue;
                    };
                    let exact = evaluate_exact(inst, &policy, DEFAULT_EXPONENT_CAP).unwrap().joint;
                    let unc = evaluate_uncrossing(inst, &policy, DEFAULT_EXPONENT_CAP).unwrap().joint;
                    let gap = (unc - exact).abs() / exact;
                    worst = worst.max(gap);
                    checked += 1;
                    if gap > two_eps {
                        return Err(format!("eps {eps}: J_uncrossing/J_exact - 1 = {gap} on guess {ordinal}"));
                    }
                }
            }
        }
    }
    Ok(format!("{checked} candidates, worst relative gap {worst:.2e}"))
}

fn end_to_end_ratio() -> Outcome {
    let eps = Rational::ratio(9, 20);
    let config = SolverConfig { psi_cap: Some(32), guess_budget: 1_000_000, ..SolverConfig::default() };
    let mut notes = Vec::new();
    for n in [2usize, 3, 5] {
        let started = Instant::now();
        let inst = Instance::from_params(8.0, &vec![(1.0, 2.0); n]).unwrap();
        let r = solve_parallel(&inst, &eps, &config, threads()).map_err(|e| e.to_string())?;
        let ub = 2.0 * ((8.0 + n as f64) * 2.0 * n as f64).sqrt();
        let elapsed = started.elapsed();
        if r.best_cost > 1.45 * ub || r.best_cost > r.pow2_cost || r.best_cost < r.lower_bound {
            return Err(format!(
                "n={n}: best {} UB {ub} pow2 {} LB {}",
                r.best_cost, r.pow2_cost, r.lower_bound
            ));
        }
        if elapsed > Duration::from_secs(300) {
            return Err(format!("n={n} took {elapsed:?}"));
        }
        notes.push(format!("n={n} best/UB={:.6}", r.best_cost / ub));
    }
    Ok(notes.join(", "))
}

fn single_commodity() -> Outcome {
    let inst = Instance::from_params(3.0, &[(1.0, 1.0)]).unwrap();
    let r = solve_parallel(&inst, &Rational::ratio(1, 4), &SolverConfig::default(), threads())
        .map_err(|e| e.to_string())?;
    let msg = format!("best_cost = {}", r.best_cost);
    if (4.0..=4.25).contains(&r.best_cost) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn determinism() -> Outcome {
    let eps = Rational::ratio(9, 20);
    let config = SolverConfig { psi_cap: Some(16), guess_budget: 3_000, ..SolverConfig::default() };
    for seed in 0..20u64 {
        let family = [Family::Random, Family::TwoScale, Family::Identical][seed as usize % 3];
        let inst = generate(&GenSpec::new(3 + seed as usize % 4, seed, family)).unwrap();
        let run = |t| solve_parallel(&inst, &eps, &config, t).map(|r| result_to_json(&r));
        let (a, b, c) = (run(1), run(1), run(8));
        let (a, b, c) = (a.map_err(|e| e.to_string())?, b.map_err(|e| e.to_string())?, c.map_err(|e| e.to_string())?);
        if a != b || a != c {
            return Err(format!("seed {seed}: results differ"));
        }
    }
    Ok("20 instances, identical JSON across repeats and 1 vs 8 threads".into())
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("EOQ identities", eoq_identities, Duration::from_secs(1)),
        ("density oracle", density_oracle, Duration::from_secs(10)),
        ("rational LCM", lcm_correctness, Duration::from_secs(5)),
        ("power-of-2 guarantee", pow2_guarantee, Duration::from_secs(30)),
        ("OPT estimate sandwich", opt_sandwich, Duration::from_secs(30)),
        ("beta structure", beta_structure, Duration::from_secs(10)),
        ("cross-component misalignment", misalignment, Duration::from_secs(10)),
        ("uncrossing cross-check", uncrossing_cross_check, Duration::from_secs(120)),
        ("end-to-end ratio", end_to_end_ratio, Duration::from_secs(900)),
        ("single commodity", single_commodity, Duration::from_secs(60)),
        ("determinism", determinism, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let started = Instant::now();
        let outcome = check();
        let elapsed = started.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > limit => Err(format!("{msg}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("acceptance {:>2} {name}: PASS ({msg}; {elapsed:.2?})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("acceptance {:>2} {name}: FAIL ({msg}; {elapsed:.2?})", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
