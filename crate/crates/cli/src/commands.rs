use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use num_bigint::BigUint;
use ordmatch_core::ars::{self, RewriteSystem};
use ordmatch_core::dag::{plant_two_sink_fork, random_layered_dag, LayeredDagConfig};
use ordmatch_core::greedy::{run_interleaved_traced, ArcRule};
use ordmatch_core::oracle;
use ordmatch_core::teaching::{self, ConceptClass, ConceptClassSpec, SampleOrder};
use ordmatch_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::{ConceptOrderArg, Report, Side};

/// Largest system for which full confluence (quadratic memory) is decided.
const CONFLUENCE_STATE_LIMIT: usize = 4096;

fn load_graph(path: &Path) -> Result<OrderedBipartiteGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = GraphSpec::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    validate_graph(&spec).with_context(|| format!("validating {}", path.display()))
}

fn load_class(path: &Path) -> Result<ConceptClass> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = ConceptClassSpec::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    spec.build().with_context(|| format!("validating {}", path.display()))
}

fn report(command: &str, inputs: Value, results: Value, oracle_agreement: Option<bool>) -> Report {
    Report {
        command: command.into(),
        inputs,
        results,
        oracle_agreement,
        failure: None,
    }
}

fn order_json(order: MatchingOrder) -> Value {
    serde_json::to_value(order).expect("orders serialize")
}

fn names(g: &OrderedBipartiteGraph, ord: &LeftOrdering) -> Vec<String> {
    ord.as_slice().iter().map(|&x| g.left_name(x).to_owned()).collect()
}

pub fn greedy(path: &Path, side: Side, seed: Option<u64>, verbose: bool) -> Result<Report> {
    let g = load_graph(path)?;
    let policy = match (side, seed) {
        (Side::L, _) => InterleavingPolicy::FixedL,
        (Side::R, _) => InterleavingPolicy::FixedR,
        (Side::Interleave, Some(seed)) => InterleavingPolicy::SeededRandom(seed),
        (Side::Interleave, None) => InterleavingPolicy::Alternating,
    };
    let (m, trace) = run_interleaved_traced(&g, policy);
    if verbose {
        for (i, step) in trace.iter().enumerate() {
            let rule = match step.rule {
                ArcRule::L => "L",
                ArcRule::R => "R",
                ArcRule::Both => "L=R",
            };
            eprintln!(
                "step {}: {} {}-{}",
                i + 1,
                rule,
                g.left_name(step.left),
                g.right_name(step.right)
            );
        }
    }
    let maximal = ars::frontier(&g, &m)?.is_empty();
    Ok(report(
        "greedy",
        json!({ "graph": path, "side": side, "seed": seed, "policy": policy }),
        json!({
            "matching": m.named_pairs(&g),
            "order": order_json(matching_order(&g, &m)?),
            "maximal": maximal,
            "l_saturating": is_l_saturating(&g, &m)?,
        }),
        None,
    ))
}

fn system_summary<S: Clone + Eq + std::hash::Hash>(sys: &RewriteSystem<S>) -> Value {
    let confluent = (sys.state_count() <= CONFLUENCE_STATE_LIMIT).then(|| sys.is_confluent());
    json!({
        "states": sys.state_count(),
        "arcs": sys.arc_count(),
        "sinks": sys.sinks().len(),
        "acyclic": sys.is_acyclic(),
        "locally_confluent": sys.is_locally_confluent(),
        "unique_sink": sys.satisfies_unique_sink(),
        "confluent": confluent,
    })
}

fn write_dump(path: &Path, dump: &ars::EdgeListDump) -> Result<()> {
    let text = serde_json::to_string_pretty(dump)?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn confluence(path: &Path, max_states: usize, full: bool, dump: Option<&Path>, oracle: bool) -> Result<Report> {
    let g = load_graph(path)?;
    let sys = if full {
        ars::full_greedy_system(&g)?
    } else {
        ars::explore_greedy_system(&g, max_states)?
    };
    eprintln!("explored {} states", sys.state_count());
    let mut results = system_summary(&sys);
    let reached: BTreeSet<Matching> = sys.sinks_reachable(&Matching::empty())?.into_iter().collect();
    results["sink_matchings"] = json!(sys
        .sinks()
        .into_iter()
        .map(|i| ars::matching_label(&g, sys.state(i)))
        .collect::<Vec<_>>());
    results["greedy_matching"] = json!(run_p_greedy(&g).named_pairs(&g));
    if let Some(dump) = dump {
        write_dump(dump, &sys.dump(|m| ars::matching_label(&g, m)))?;
    }
    let agreement = if oracle {
        let by_paths = oracle::all_greedy_paths_sinks(&g, max_states)?;
        results["oracle_sinks"] = json!(by_paths.len());
        Some(by_paths == reached)
    } else {
        None
    };
    Ok(report(
        "confluence",
        json!({ "graph": path, "max_states": max_states, "full": full, "oracle": oracle }),
        results,
        agreement,
    ))
}

pub fn demo_newman(seed: u64, dump: Option<&Path>) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = LayeredDagConfig {
        funnel: true,
        ..LayeredDagConfig::default()
    };
    let mut sys = random_layered_dag(&mut rng, &cfg);
    let fork = plant_two_sink_fork(&mut rng, &mut sys);
    if let Some(dump) = dump {
        write_dump(dump, &sys.dump(|s| s.to_string()))?;
    }
    let mut results = system_summary(&sys);
    results["fork"] = json!(fork);
    results["sinks_below_fork"] = json!(sys.sinks_reachable_from(fork)?.len());
    Ok(report("confluence", json!({ "demo_newman": seed }), results, None))
}

pub fn min_order(path: &Path, oracle: bool) -> Result<Report> {
    let g = load_graph(path)?;
    let result = min_order_saturating(&g);
    let mut results = json!({
        "order": order_json(result.order),
        "matching": result.matching.as_ref().map(|m| m.named_pairs(&g)),
        "witness_ordering": result.witness_ordering.as_ref().map(|o| names(&g, o)),
    });
    let agreement = if oracle {
        let brute = oracle::brute_force_min_order(&g)?;
        results["oracle_order"] = order_json(brute.order);
        Some(brute.order == result.order)
    } else {
        None
    };
    Ok(report(
        "min-order",
        json!({ "graph": path, "oracle": oracle }),
        results,
        agreement,
    ))
}

pub fn pbt(path: &Path, oracle: bool) -> Result<Report> {
    let g = load_graph(path)?;
    let m = run_pbt_greedy(&g);
    let best = min_order_pbt(&g);
    let mut results = json!({
        "matching": m.named_pairs(&g),
        "l_saturating": is_l_saturating(&g, &m)?,
        "pbt_property": has_pbt_property(&g, &m)?,
        "order": order_json(matching_order(&g, &m)?),
        "min_pbt_order": order_json(best.order),
    });
    let agreement = if oracle {
        let all = oracle::all_pbt_matchings(&g)?;
        let brute = all
            .iter()
            .map(|m| matching_order(&g, m))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .min()
            .unwrap_or(MatchingOrder::Infinite);
        results["oracle_pbt_matchings"] = json!(all.len());
        results["oracle_order"] = order_json(brute);
        Some(brute == best.order)
    } else {
        None
    };
    Ok(report(
        "pbt",
        json!({ "graph": path, "oracle": oracle }),
        results,
        agreement,
    ))
}

fn concept_ordering(cc: &ConceptClass, arg: &ConceptOrderArg) -> Result<LeftOrdering> {
    match arg {
        ConceptOrderArg::Lex => Ok(cc.lex_ordering()),
        ConceptOrderArg::Random(seed) => Ok(cc.random_ordering(*seed)),
        ConceptOrderArg::File(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let listed: Vec<String> =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            let idx = listed
                .iter()
                .map(|s| {
                    (0..cc.len())
                        .find(|&i| &cc.bitstring(i) == s)
                        .with_context(|| format!("concept `{s}` is not in the class"))
                })
                .collect::<Result<Vec<_>>>()?;
            let ord = LeftOrdering::new(idx);
            ord.check_len(cc.len())?;
            Ok(ord)
        }
    }
}

fn order_label(arg: &ConceptOrderArg) -> String {
    match arg {
        ConceptOrderArg::Lex => "lex".into(),
        ConceptOrderArg::Random(seed) => format!("random:{seed}"),
        ConceptOrderArg::File(path) => format!("file:{}", path.display()),
    }
}

pub fn teach(
    path: &Path,
    order: &ConceptOrderArg,
    sample_order: SampleOrder,
    sweep: Option<u64>,
    jobs: usize,
    oracle: bool,
) -> Result<Report> {
    let cc = load_class(path)?;
    let ord = concept_ordering(&cc, order)?;
    let cg = teaching::build_consistency_graph_with(&cc, &ord, sample_order)?;
    let cost = teaching::greedy_cost_in(&cg);
    let check = teaching::subsample_report(&cg, &cost);
    let size = BigUint::from(cc.len());
    let upper_bound = teaching::log2_ceil(&size)?;
    let n = cc.domain_size();
    let last_sample = (cost.order > 0).then(|| cg.samples[cost.order - 1].label(cc.domain()));
    let mut results = json!({
        "n": n,
        "class_size": cc.len(),
        "samples": cg.samples.len(),
        "edges": cg.graph.edge_count(),
        "q": cost.q,
        "order": cost.order,
        "last_sample": last_sample,
        "upper_bound": upper_bound,
        "upper_bound_holds": cost.q <= upper_bound,
        "exact_lower_bound": teaching::exact_cost_lower_bound(n, &size)?,
        "log_c": (cc.len() as f64).log2(),
        "d_star": if n == 0 { None } else { Some(teaching::d_star(n)?) },
        "gamma0": teaching::solve_gamma0(1e-9)?,
        "subsample_bound": check,
    });
    if let Some(count) = sweep {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
        let costs = pool.install(|| {
            (0..count)
                .into_par_iter()
                .map(|seed| {
                    let ord = cc.random_ordering(seed);
                    let cg = teaching::build_consistency_graph_with(&cc, &ord, sample_order)?;
                    let cost = teaching::greedy_cost_in(&cg);
                    let holds = teaching::subsample_report(&cg, &cost).holds();
                    Ok((cost.q, holds))
                })
                .collect::<Result<Vec<_>, Error>>()
        })?;
        let qs: Vec<usize> = costs.iter().map(|&(q, _)| q).collect();
        results["sweep"] = json!({
            "orderings": count,
            "q": qs,
            "min_q": qs.iter().min(),
            "max_q": qs.iter().max(),
            "all_within_upper_bound": qs.iter().all(|&q| q <= upper_bound),
            "subsample_bound_holds": costs.iter().all(|&(_, h)| h),
        });
    }
    let agreement = if oracle {
        let q = oracle::greedy_cost_by_definition(&cc, &ord, &cg.samples)?;
        results["oracle_q"] = json!(q);
        Some(q == cost.q)
    } else {
        None
    };
    Ok(report(
        "teach",
        json!({
            "class": path,
            "order": order_label(order),
            "sample_order": sample_order,
            "sweep": sweep,
            "jobs": jobs,
            "oracle": oracle,
        }),
        results,
        agreement,
    ))
}

pub fn bounds(n: usize, tolerance: f64) -> Result<Report> {
    let gamma0 = teaching::solve_gamma0(tolerance)?;
    // Big integers go out as decimal strings so no JSON reader loses precision.
    let phi = (0..=n)
        .map(|d| teaching::phi(n, d).map(|v| v.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let samples = (0..=n)
        .map(|d| teaching::samples_up_to(n, d).map(|v| v.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let d_star = if n == 0 { None } else { Some(teaching::d_star(n)?) };
    let exact = teaching::exact_cost_lower_bound(n, &(BigUint::from(1u32) << n))?;
    Ok(report(
        "bounds",
        json!({ "n": n, "tolerance": tolerance }),
        json!({
            "phi": phi,
            "samples_up_to": samples,
            "d_star": d_star,
            "exact_cost_lower_bound": exact,
            "gamma0": gamma0,
            "h_gamma0": teaching::h_gamma(gamma0)?,
            "gamma0_n": gamma0 * n as f64,
        }),
        None,
    ))
}

pub fn newman(count: usize, seed: u64, max_layers: usize, max_width: usize, mutate: f64) -> Result<Report> {
    if !(0.0..=1.0).contains(&mutate) {
        bail!("--mutate must lie in [0, 1]");
    }
    if max_layers < 1 || max_width < 1 {
        bail!("--max-layers and --max-width must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut unique, mut not_unique, mut disagreements, mut largest) = (0, 0, Vec::new(), 0);
    for i in 0..count {
        let cfg = LayeredDagConfig {
            layers: rng.gen_range(1..=max_layers),
            max_width: rng.gen_range(1..=max_width),
            arc_probability: rng.gen_range(0.05..0.6),
            funnel: rng.gen_bool(0.5),
        };
        let mut sys = random_layered_dag(&mut rng, &cfg);
        if rng.gen_bool(mutate) {
            plant_two_sink_fork(&mut rng, &mut sys);
        }
        largest = largest.max(sys.state_count());
        let us = sys.satisfies_unique_sink();
        let c = sys.is_confluent();
        let lc = sys.is_locally_confluent();
        if us {
            unique += 1;
        } else {
            not_unique += 1;
        }
        if !(us == c && c == lc) {
            eprintln!("dag {i}: unique-sink {us}, confluent {c}, locally confluent {lc}");
            disagreements.push(i);
        }
    }
    let bad = disagreements.len();
    let mut out = report(
        "newman",
        json!({
            "count": count,
            "seed": seed,
            "max_layers": max_layers,
            "max_width": max_width,
            "mutate": mutate,
        }),
        json!({
            "unique_sink": unique,
            "not_unique_sink": not_unique,
            "largest_system": largest,
            "disagreements": disagreements,
            "equivalence_holds": bad == 0,
        }),
        None,
    );
    if bad > 0 {
        out.failure = Some(format!("{bad} DAGs violate the equivalence"));
    }
    Ok(out)
}
