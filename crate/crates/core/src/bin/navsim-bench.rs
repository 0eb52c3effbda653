use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use navsim::bench::{
    fps_bench, fps_world, load_suite, run_suite, BenchmarkReport, PolicyKind, RunOptions, SensorsFile,
};
use navsim::sensors::default_sensors;
use navsim::task::write_jsonl;

/// Scripted-baseline benchmarks and throughput probes.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a policy over one or more scene suites.
    Run {
        /// Built-in suite name or suite TOML file; repeat for several suites.
        #[arg(long, required = true)]
        suite: Vec<String>,
        #[arg(long, default_value = "random", value_parser = parse_policy)]
        policy: PolicyKind,
        /// Episodes per suite.
        #[arg(long, default_value_t = 500)]
        episodes: u32,
        /// Policy seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write one JSON line per episode.
        #[arg(long)]
        episodes_out: Option<PathBuf>,
    },
    /// Measure in-process steps per second with a random policy.
    Fps {
        /// Sensor TOML file (`[[sensors]]` tables); defaults to color, depth,
        /// contact and measurements at 84x84.
        #[arg(long)]
        sensors: Option<PathBuf>,
        #[arg(long, default_value_t = 2000)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_policy(s: &str) -> Result<PolicyKind, String> {
    s.parse()
}

fn run() -> Result<(), String> {
    match Cli::parse().command {
        Command::Run {
            suite,
            policy,
            episodes,
            seed,
            out,
            episodes_out,
        } => {
            let opts = RunOptions { policy, episodes, seed };
            let mut runs = Vec::new();
            for name in &suite {
                let s = load_suite(name).map_err(|e| e.to_string())?;
                runs.push(run_suite(&s, &opts).map_err(|e| e.to_string())?);
            }
            let report = BenchmarkReport::from_runs(&runs);
            print!("{}", report.table());
            if let Some(path) = out {
                let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
                std::fs::write(&path, json).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            if let Some(path) = episodes_out {
                let records: Vec<_> = runs.iter().flat_map(|r| r.records.iter().cloned()).collect();
                let file = std::fs::File::create(&path).map_err(|e| format!("{}: {e}", path.display()))?;
                write_jsonl(std::io::BufWriter::new(file), &records).map_err(|e| e.to_string())?;
            }
            Ok(())
        }
        Command::Fps { sensors, steps, seed } => {
            let specs = match sensors {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
                    SensorsFile::parse(&text).map_err(|e| e.to_string())?.sensors
                }
                None => default_sensors(),
            };
            if steps < 1000 {
                eprintln!("warning: fewer than 1000 steps gives a noisy estimate");
            }
            let world = fps_world(seed).map_err(|e| e.to_string())?;
            let r = fps_bench(world, specs, steps, seed).map_err(|e| e.to_string())?;
            println!("{} steps in {:.3} s: {:.0} steps/s", r.steps, r.seconds, r.steps_per_second);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
