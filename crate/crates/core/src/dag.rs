//! Random layered DAGs for exercising the confluence checks.

use rand::Rng;

use crate::ars::RewriteSystem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayeredDagConfig {
    pub layers: usize,
    pub max_width: usize,
    /// Probability of each forward arc between two layers.
    pub arc_probability: f64,
    /// Route every dead end into one shared final sink.
    pub funnel: bool,
}

impl Default for LayeredDagConfig {
    fn default() -> Self {
        LayeredDagConfig {
            layers: 5,
            max_width: 6,
            arc_probability: 0.3,
            funnel: false,
        }
    }
}

/// A DAG whose arcs only run from lower to higher layers. States are
/// numbered consecutively from 0.
pub fn random_layered_dag<R: Rng + ?Sized>(rng: &mut R, cfg: &LayeredDagConfig) -> RewriteSystem<usize> {
    let mut sys = RewriteSystem::new();
    let mut layers: Vec<Vec<usize>> = Vec::with_capacity(cfg.layers);
    for _ in 0..cfg.layers.max(1) {
        let width = rng.gen_range(1..=cfg.max_width.max(1));
        let layer = (0..width)
            .map(|_| {
                let id = sys.state_count();
                sys.add_state(id)
            })
            .collect();
        layers.push(layer);
    }
    for (i, lower) in layers.iter().enumerate() {
        for higher in &layers[i + 1..] {
            for &a in lower {
                for &b in higher {
                    if rng.gen_bool(cfg.arc_probability) {
                        sys.add_arc(a, b).expect("states exist");
                    }
                }
            }
        }
    }
    if cfg.funnel {
        let id = sys.state_count();
        let sink = sys.add_state(id);
        for a in 0..sink {
            if sys.is_sink(a) {
                sys.add_arc(a, sink).expect("states exist");
            }
        }
    }
    sys
}

/// Hangs a fresh fork `f -> s1, f -> s2` (two fresh sinks) below a random
/// existing state, so that state reaches at least two sinks.
pub fn plant_two_sink_fork<R: Rng + ?Sized>(rng: &mut R, sys: &mut RewriteSystem<usize>) -> usize {
    let anchor = (sys.state_count() > 0).then(|| rng.gen_range(0..sys.state_count()));
    let mut fresh = || {
        let id = sys.state_count();
        sys.add_state(id)
    };
    let fork = fresh();
    let s1 = fresh();
    let s2 = fresh();
    sys.add_arc(fork, s1).expect("states exist");
    sys.add_arc(fork, s2).expect("states exist");
    if let Some(a) = anchor {
        sys.add_arc(a, fork).expect("states exist");
    }
    fork
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn layered_dags_are_acyclic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let s = random_layered_dag(&mut rng, &LayeredDagConfig::default());
            assert!(s.is_acyclic());
        }
    }

    #[test]
    fn funnel_gives_unique_sink() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = LayeredDagConfig {
            funnel: true,
            ..Default::default()
        };
        for _ in 0..50 {
            let s = random_layered_dag(&mut rng, &cfg);
            assert_eq!(s.sinks().len(), 1);
            assert!(s.satisfies_unique_sink());
        }
    }

    #[test]
    fn planted_fork_breaks_confluence() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = LayeredDagConfig {
            funnel: true,
            ..Default::default()
        };
        let mut s = random_layered_dag(&mut rng, &cfg);
        let fork = plant_two_sink_fork(&mut rng, &mut s);
        assert!(s.is_acyclic());
        assert_eq!(s.sinks_reachable_from(fork).unwrap().len(), 2);
        assert!(!s.satisfies_unique_sink());
        assert!(!s.is_confluent());
        assert!(!s.is_locally_confluent());
    }
}
