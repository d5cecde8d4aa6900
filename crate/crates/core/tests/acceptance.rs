//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p ordmatch-core --test acceptance`; the lines are
//! printed uncaptured.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use ordmatch_core::ars::RewriteSystem;
use ordmatch_core::dag::{plant_two_sink_fork, random_layered_dag, LayeredDagConfig};
use ordmatch_core::oracle::{all_greedy_paths_sinks, all_matchings, all_pbt_matchings, brute_force_min_order};
use ordmatch_core::order::{greedy_under_ordering, ordering_from_matching};
use ordmatch_core::teaching::*;
use ordmatch_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        // Bound first so a NaN comparison counts as a failure.
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

const STATE_BUDGET: usize = 1_000_000;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn unique_greedy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut graphs = common::corpus();
    for i in 0..200 {
        let p = [0.2, 0.5, 0.8][i % 3];
        let (l, r) = (rng.gen_range(0..=6), rng.gen_range(0..=6));
        graphs.push((format!("random #{i}"), common::random_graph(&mut rng, l, r, p)));
    }
    for (name, g) in &graphs {
        let sinks = all_greedy_paths_sinks(g, STATE_BUDGET).map_err(|e| format!("{name}: {e}"))?;
        let greedy = run_p_greedy(g);
        ensure!(
            sinks == BTreeSet::from([greedy.clone()]),
            "{name}: {} sinks reached",
            sinks.len()
        );
        ensure!(run_p_greedy_prime(g) == greedy, "{name}: right-driven greedy differs");
        for seed in 0..20 {
            ensure!(
                run_interleaved(g, InterleavingPolicy::SeededRandom(seed)) == greedy,
                "{name}: interleaving seed {seed} differs"
            );
        }
    }
    Ok(format!("{} graphs, 20 policies each", graphs.len()))
}

fn reach_naive(sys: &RewriteSystem<usize>, from: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![from];
    while let Some(a) = stack.pop() {
        if seen.insert(a) {
            stack.extend(sys.successors(a).iter().copied());
        }
    }
    seen
}

fn newman_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let (mut yes, mut no) = (0, 0);
    let mut check = |sys: &RewriteSystem<usize>, label: &str| -> Result<(), String> {
        ensure!(sys.state_count() <= 203, "{label}: {} states", sys.state_count());
        ensure!(sys.is_acyclic(), "{label}: not acyclic");
        let us = sys.satisfies_unique_sink();
        let c = sys.is_confluent();
        let lc = sys.is_locally_confluent();
        ensure!(
            us == c && c == lc,
            "{label}: unique-sink {us}, confluent {c}, locally confluent {lc}"
        );
        let naive =
            (0..sys.state_count()).all(|a| reach_naive(sys, a).iter().filter(|&&s| sys.is_sink(s)).count() == 1);
        ensure!(naive == us, "{label}: unique-sink disagrees with direct reachability");
        if us {
            yes += 1;
        } else {
            no += 1;
        }
        Ok(())
    };
    for i in 0..600 {
        let layers = rng.gen_range(2..=10);
        let cfg = LayeredDagConfig {
            layers,
            max_width: rng.gen_range(1..=(199 / layers).min(20)),
            arc_probability: rng.gen_range(0.05..0.6),
            funnel: i % 2 == 0,
        };
        let mut sys = random_layered_dag(&mut rng, &cfg);
        if i < 500 {
            check(&sys, &format!("dag #{i}"))?;
        } else {
            plant_two_sink_fork(&mut rng, &mut sys);
            check(&sys, &format!("mutated dag #{i}"))?;
        }
    }
    ensure!(
        yes >= 30 && no >= 30,
        "truth values under-represented: {yes} true, {no} false"
    );
    Ok(format!("600 systems, {yes} true / {no} false"))
}

fn minimum_order() -> Outcome {
    let mut graphs = 0;
    let mut inherited = 0;
    let mut swept = 0;
    for (name, g) in common::corpus() {
        if g.edge_count() > 20 {
            continue;
        }
        graphs += 1;
        let fast = min_order_saturating(&g).order;
        let slow = brute_force_min_order(&g).map_err(|e| e.to_string())?.order;
        ensure!(fast == slow, "{name}: min order {fast}, brute force {slow}");
        for m in all_matchings(&g).map_err(|e| e.to_string())? {
            if !is_l_saturating(&g, &m).unwrap() {
                continue;
            }
            let ord = ordering_from_matching(&g, &m).map_err(|e| e.to_string())?;
            let greedy = greedy_under_ordering(&g, &ord).map_err(|e| e.to_string())?;
            let (a, b) = (matching_order(&g, &greedy).unwrap(), matching_order(&g, &m).unwrap());
            ensure!(a <= b, "{name}: inherited ordering gives {a} > {b}");
            inherited += 1;
        }
        if g.left_len() <= 6 {
            let best = permutations(g.left_len())
                .into_iter()
                .map(|p| matching_order(&g, &greedy_under_ordering(&g, &LeftOrdering::new(p)).unwrap()).unwrap())
                .min()
                .unwrap();
            ensure!(best == fast, "{name}: best ordering gives {best}, min order {fast}");
            swept += 1;
        }
    }
    Ok(format!(
        "{graphs} graphs, {inherited} saturating matchings, {swept} full sweeps"
    ))
}

fn pbt_optimality() -> Outcome {
    let corpus = common::corpus();
    let mut finite = 0;
    for (name, g) in &corpus {
        let best = all_pbt_matchings(g)
            .map_err(|e| format!("{name}: {e}"))?
            .iter()
            .map(|m| matching_order(g, m).unwrap())
            .min()
            .unwrap_or(MatchingOrder::Infinite);
        let got = min_order_pbt(g).order;
        ensure!(got == best, "{name}: PBT greedy order {got}, best PBT order {best}");
        finite += usize::from(got.is_finite());
    }
    Ok(format!("{} graphs, {finite} with a PBT matching", corpus.len()))
}

struct CostRun {
    n: usize,
    full_class: bool,
    class_size: usize,
    q: usize,
}

/// Greedy costs over every tested class, concept ordering and sample order.
fn cost_runs() -> Result<Vec<CostRun>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut classes: Vec<(ConceptClass, bool)> = (1..=8).map(|n| (ConceptClass::all(n).unwrap(), true)).collect();
    for _ in 0..30 {
        classes.push((common::random_concept_class(&mut rng, 6, 40), false));
    }
    let mut runs = Vec::new();
    for (k, (cc, full_class)) in classes.iter().enumerate() {
        let orderings =
            std::iter::once(cc.lex_ordering()).chain((0..10).map(|s| cc.random_ordering(1000 * k as u64 + s)));
        for ord in orderings {
            for so in [
                SampleOrder::Canonical,
                SampleOrder::Shuffled(1),
                SampleOrder::Shuffled(2),
            ] {
                let cg = build_consistency_graph_with(cc, &ord, so).map_err(|e| e.to_string())?;
                let cost = greedy_cost_in(&cg);
                let report = subsample_report(&cg, &cost);
                if !report.mechanism_holds {
                    return Err(format!(
                        "n = {}: subsample mechanism broken at q = {}",
                        cc.domain_size(),
                        cost.q
                    ));
                }
                runs.push(CostRun {
                    n: cc.domain_size(),
                    full_class: *full_class,
                    class_size: cc.len(),
                    q: cost.q,
                });
            }
        }
    }
    Ok(runs)
}

fn upper_bound(runs: &[CostRun]) -> Outcome {
    for r in runs {
        let ub = log2_ceil(&BigUint::from(r.class_size)).unwrap();
        ensure!(r.q <= ub, "n = {}, |C| = {}: q = {} > {ub}", r.n, r.class_size, r.q);
        if r.q >= 1 {
            let need = (BigUint::from(1u32) << (r.q - 1)) + 1u32;
            ensure!(
                BigUint::from(r.class_size) >= need,
                "|C| = {} below 2^(q-1)+1 for q = {}",
                r.class_size,
                r.q
            );
        }
    }
    Ok(format!("{} runs", runs.len()))
}

fn lower_bound(runs: &[CostRun], gamma0: f64) -> Outcome {
    let mut count = 0;
    for r in runs.iter().filter(|r| r.full_class) {
        let exact = exact_cost_lower_bound(r.n, &(BigUint::from(1u32) << r.n)).unwrap();
        ensure!(r.q as f64 >= gamma0 * r.n as f64, "n = {}: q = {} < γ₀·n", r.n, r.q);
        ensure!(r.q >= exact, "n = {}: q = {} < exact bound {exact}", r.n, r.q);
        count += 1;
    }
    let qs: Vec<String> = (1..=8)
        .map(|n| {
            let q = runs
                .iter()
                .filter(|r| r.full_class && r.n == n)
                .map(|r| r.q)
                .min()
                .unwrap();
            format!("{n}:{q}")
        })
        .collect();
    Ok(format!("{count} runs, min q per n {}", qs.join(" ")))
}

fn gamma_constant() -> Result<(String, f64), String> {
    let g0 = solve_gamma0(1e-9).map_err(|e| e.to_string())?;
    ensure!(g0 > 0.214 && g0 < 0.215, "γ₀ = {g0}");
    let h0 = h_gamma(g0).unwrap();
    ensure!((h0 - 2.0).abs() <= 1e-7, "h(γ₀) = {h0}");
    let mut prev = 0.0;
    for i in 1..=10_000 {
        let h = h_gamma(i as f64 / 10_000.0).unwrap();
        ensure!(h > prev, "h not increasing at grid point {i}");
        prev = h;
    }
    let h1 = h_gamma(1.0).unwrap();
    ensure!((h1 - 2.0 * std::f64::consts::E).abs() <= 1e-12, "h(1) = {h1}");
    for n in 1..=10_000 {
        let d = d_star(n).unwrap();
        ensure!(d as f64 >= g0 * n as f64, "d*({n}) = {d} < γ₀·n");
    }
    Ok((format!("γ₀ = {g0:.9}, h(γ₀) − 2 = {:.1e}", h0 - 2.0), g0))
}

fn counting() -> Outcome {
    for n in 1..=8 {
        let three = BigUint::from(3u32).pow(n as u32);
        ensure!(samples_up_to(n, n).unwrap() == three, "samples_up_to({n}, {n}) ≠ 3^{n}");
        let enumerated = enumerate_realizable_samples(&ConceptClass::all(n).unwrap())
            .unwrap()
            .len();
        ensure!(
            BigUint::from(enumerated) == three,
            "n = {n}: {enumerated} samples enumerated"
        );
    }
    for n in 1..=30usize {
        for d in 1..=n {
            let lhs = phi(n, d).unwrap().to_f64().unwrap().ln();
            let rhs = d as f64 * (1.0 + (n as f64).ln() - (d as f64).ln());
            ensure!(lhs <= rhs + 1e-9 * rhs.abs(), "Φ_{d}({n}) exceeds (en/d)^d");
        }
    }
    Ok("n ≤ 8 enumerated, 465 (n, d) pairs".into())
}

fn timed<T>(f: impl FnOnce() -> T) -> (Duration, T) {
    let start = Instant::now();
    let out = f();
    (start.elapsed(), out)
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: usize, title: &str, (elapsed, outcome): (Duration, Outcome)| match outcome {
        Ok(detail) => println!("criterion {id} {title}: PASS ({detail}; {:.2}s)", elapsed.as_secs_f64()),
        Err(why) => {
            failed += 1;
            println!("criterion {id} {title}: FAIL ({why})");
        }
    };

    report(1, "unique greedy matching", timed(unique_greedy));
    report(2, "Newman equivalence", timed(newman_equivalence));
    report(3, "minimum order", timed(minimum_order));
    report(4, "PBT optimality", timed(pbt_optimality));

    let (gamma_time, gamma) = timed(gamma_constant);
    let (runs_time, runs) = timed(cost_runs);
    match runs {
        Ok(runs) => {
            let (t, out) = timed(|| upper_bound(&runs));
            report(5, "upper bound", (runs_time + t, out));
            let lb = timed(|| match &gamma {
                Ok((_, g0)) => lower_bound(&runs, *g0),
                Err(_) => Err("γ₀ unavailable".into()),
            });
            report(6, "lower bound", lb);
        }
        Err(e) => {
            report(5, "upper bound", (runs_time, Err(e.clone())));
            report(6, "lower bound", (runs_time, Err(e)));
        }
    }
    report(7, "gamma constant", (gamma_time, gamma.map(|(d, _)| d)));
    report(8, "counting identities", timed(counting));

    if failed == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 8 criteria failed");
        ExitCode::FAILURE
    }
}
