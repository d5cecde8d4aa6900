#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use ordmatch_core::teaching::ConceptClass;
use ordmatch_core::{validate_graph, GraphSpec, OrderedBipartiteGraph};
use proptest::prelude::*;
use rand::Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/graphs")
}

/// Every fixture graph, sorted by file name.
pub fn corpus() -> Vec<(String, OrderedBipartiteGraph)> {
    let mut entries: Vec<_> = fs::read_dir(fixture_dir())
        .expect("fixture directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    entries.sort();
    entries
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            let g = validate_graph(&GraphSpec::from_json(&text).unwrap()).unwrap();
            (p.file_stem().unwrap().to_string_lossy().into_owned(), g)
        })
        .collect()
}

pub fn random_graph<R: Rng>(rng: &mut R, left: usize, right: usize, p: f64) -> OrderedBipartiteGraph {
    let edges: Vec<_> = (0..left)
        .flat_map(|x| (0..right).map(move |y| (x, y)))
        .filter(|_| rng.gen_bool(p))
        .collect();
    OrderedBipartiteGraph::from_edges(left, right, &edges).unwrap()
}

pub fn random_concept_class<R: Rng>(rng: &mut R, max_n: usize, max_size: usize) -> ConceptClass {
    let n = rng.gen_range(1..=max_n);
    let total = 1usize << n;
    let size = rng.gen_range(1..=max_size.min(total));
    let mut all: Vec<u32> = (0..total as u32).collect();
    rand::seq::SliceRandom::shuffle(all.as_mut_slice(), rng);
    all.truncate(size);
    let domain = (1..=n).map(|i| format!("p{i}")).collect();
    ConceptClass::new(domain, all).unwrap()
}

/// Graphs with up to `max_side` vertices per side and arbitrary edge sets.
pub fn graph_strategy(max_side: usize) -> impl Strategy<Value = OrderedBipartiteGraph> {
    (0..=max_side, 0..=max_side).prop_flat_map(|(l, r)| {
        prop::collection::vec(any::<bool>(), l * r).prop_map(move |bits| {
            let edges: Vec<_> = bits
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| (i / r.max(1), i % r.max(1)))
                .collect();
            OrderedBipartiteGraph::from_edges(l, r, &edges).unwrap()
        })
    })
}
