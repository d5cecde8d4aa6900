mod commands;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use ordmatch_core::ars::DEFAULT_MAX_STATES;
use ordmatch_core::teaching::SampleOrder;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Greedy matchings in vertex-ordered bipartite graphs, their rewriting
/// systems, and teaching costs of concept classes.
#[derive(Debug, Parser)]
#[command(name = "ordmatch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a greedy procedure on a graph file.
    Greedy {
        graph: PathBuf,
        /// Which side drives the procedure.
        #[arg(long, value_enum, default_value_t = Side::L)]
        side: Side,
        /// Seed for random interleaving (alternates strictly when absent).
        #[arg(long)]
        seed: Option<u64>,
        /// Print each inserted edge to stderr.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Explore the greedy rewriting system of a graph and test confluence.
    Confluence {
        #[arg(required_unless_present = "demo_newman")]
        graph: Option<PathBuf>,
        #[arg(long, env = "ORDMATCH_MAX_STATES", default_value_t = DEFAULT_MAX_STATES)]
        max_states: usize,
        /// Build the system over all matchings instead of those reachable from the empty one.
        #[arg(long)]
        full: bool,
        /// Check a random DAG with a planted two-sink fork instead of a graph.
        #[arg(long, value_name = "SEED", conflicts_with = "graph")]
        demo_newman: Option<u64>,
        /// Write the system as a JSON edge list.
        #[arg(long, value_name = "PATH")]
        dump: Option<PathBuf>,
        /// Cross-check the sink set against exhaustive path enumeration.
        #[arg(long)]
        oracle: bool,
    },
    /// Minimum order of a left-saturating matching.
    MinOrder {
        graph: PathBuf,
        /// Cross-check against exhaustive enumeration.
        #[arg(long)]
        oracle: bool,
    },
    /// Run the PBT greedy procedure.
    Pbt {
        graph: PathBuf,
        /// Cross-check against all PBT matchings.
        #[arg(long)]
        oracle: bool,
    },
    /// Greedy teaching cost of a concept class.
    Teach {
        class: PathBuf,
        /// Concept preference: `lex`, `random:SEED` or `file:PATH`.
        #[arg(long, default_value = "lex")]
        order: ConceptOrderArg,
        /// Sample tie-break within each size: `canonical` or `shuffled:SEED`.
        #[arg(long, default_value = "canonical")]
        sample_order: SampleOrderArg,
        /// Also evaluate N random concept orderings (seeds 0..N).
        #[arg(long, value_name = "N")]
        sweep: Option<u64>,
        /// Worker threads for the sweep.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Recompute the cost from the definition.
        #[arg(long)]
        oracle: bool,
    },
    /// Counting quantities behind the teaching-cost bounds.
    Bounds {
        n: usize,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Test the unique-sink / confluence / local-confluence equivalence on random DAGs.
    Newman {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        max_layers: usize,
        #[arg(long, default_value_t = 10)]
        max_width: usize,
        /// Share of DAGs that get a planted two-sink fork.
        #[arg(long, default_value_t = 0.2)]
        mutate: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Side {
    L,
    R,
    Interleave,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum ConceptOrderArg {
    Lex,
    Random(u64),
    File(PathBuf),
}

impl FromStr for ConceptOrderArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            None if s == "lex" => Ok(ConceptOrderArg::Lex),
            Some(("random", seed)) => seed
                .parse()
                .map(ConceptOrderArg::Random)
                .map_err(|e| format!("bad seed: {e}")),
            Some(("file", path)) if !path.is_empty() => Ok(ConceptOrderArg::File(path.into())),
            _ => Err(format!("expected lex, random:SEED or file:PATH, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SampleOrderArg(SampleOrder);

impl FromStr for SampleOrderArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            None if s == "canonical" => Ok(SampleOrderArg(SampleOrder::Canonical)),
            Some(("shuffled", seed)) => seed
                .parse()
                .map(|seed| SampleOrderArg(SampleOrder::Shuffled(seed)))
                .map_err(|e| format!("bad seed: {e}")),
            _ => Err(format!("expected canonical or shuffled:SEED, got `{s}`")),
        }
    }
}

/// What every subcommand prints on stdout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle_agreement: Option<bool>,
    /// A check the command itself performs came out negative.
    #[serde(skip)]
    pub failure: Option<String>,
}

impl Report {
    fn failure(&self) -> Option<String> {
        match (&self.failure, self.oracle_agreement) {
            (Some(why), _) => Some(why.clone()),
            (None, Some(false)) => Some("oracle disagreement".into()),
            _ => None,
        }
    }
}

/// Exit status for a completed run whose cross-check failed.
const EXIT_CHECK_FAILED: u8 = 3;

fn run(cli: Cli) -> anyhow::Result<Report> {
    match cli.command {
        Command::Greedy {
            graph,
            side,
            seed,
            verbose,
        } => commands::greedy(&graph, side, seed, verbose),
        Command::Confluence {
            graph,
            max_states,
            full,
            demo_newman,
            dump,
            oracle,
        } => match demo_newman {
            Some(seed) => commands::demo_newman(seed, dump.as_deref()),
            None => commands::confluence(
                graph.as_deref().expect("clap enforces a graph"),
                max_states,
                full,
                dump.as_deref(),
                oracle,
            ),
        },
        Command::MinOrder { graph, oracle } => commands::min_order(&graph, oracle),
        Command::Pbt { graph, oracle } => commands::pbt(&graph, oracle),
        Command::Teach {
            class,
            order,
            sample_order,
            sweep,
            jobs,
            oracle,
        } => commands::teach(&class, &order, sample_order.0, sweep, jobs, oracle),
        Command::Bounds { n, tolerance } => commands::bounds(n, tolerance),
        Command::Newman {
            count,
            seed,
            max_layers,
            max_width,
            mutate,
        } => commands::newman(count, seed, max_layers, max_width, mutate),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).expect("reports serialize");
            if let Err(e) = writeln!(io::stdout().lock(), "{text}") {
                // A closed pipe means the reader has what it wanted.
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("error: writing report: {e}");
                    return ExitCode::FAILURE;
                }
            }
            match report.failure() {
                None => ExitCode::SUCCESS,
                Some(why) => {
                    eprintln!("error: {why}");
                    ExitCode::from(EXIT_CHECK_FAILED)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_order_flags() {
        assert_eq!("lex".parse::<ConceptOrderArg>(), Ok(ConceptOrderArg::Lex));
        assert_eq!("random:7".parse::<ConceptOrderArg>(), Ok(ConceptOrderArg::Random(7)));
        assert_eq!(
            "file:a/b.json".parse::<ConceptOrderArg>(),
            Ok(ConceptOrderArg::File("a/b.json".into()))
        );
        assert!("random:x".parse::<ConceptOrderArg>().is_err());
        assert!("file:".parse::<ConceptOrderArg>().is_err());
        assert!("lexx".parse::<ConceptOrderArg>().is_err());
        assert_eq!(
            "shuffled:3".parse::<SampleOrderArg>(),
            Ok(SampleOrderArg(SampleOrder::Shuffled(3)))
        );
        assert!("shuffled".parse::<SampleOrderArg>().is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
