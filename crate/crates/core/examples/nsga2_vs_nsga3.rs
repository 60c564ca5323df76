//! NSGA-II against NSGA-III on 3-OMM with the same population size, plus
//! NSGA-II with an eight times larger population.
//!
//! cargo run --release --example nsga2_vs_nsga3 -- 24 300

use moea_lab::engine::{run, Algorithm, RunConfig};
use moea_lab::problems::Benchmark;

fn main() -> moea_lab::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().ok());
    let n = args.next().flatten().unwrap_or(24);
    let iterations = args.next().flatten().unwrap_or(300);
    let front = (n / 2 + 1) * (n / 2 + 1);

    let mut nsga3 = RunConfig::new(Benchmark::ThreeOneMinMax, n, Algorithm::Nsga3);
    nsga3.divisions = Some((4.65 * n as f64).ceil() as usize);
    let nsga2 = RunConfig::new(Benchmark::ThreeOneMinMax, n, Algorithm::Nsga2);
    let mut nsga2_big = nsga2.clone();
    nsga2_big.pop_size = 8 * front;

    println!(
        "{:<14} {:>6} {:>10} {:>10} {:>8}",
        "algorithm", "N", "final", "best", "losses"
    );
    for (label, mut config) in [
        ("nsga3", nsga3),
        ("nsga2", nsga2),
        ("nsga2 (8x)", nsga2_big),
    ] {
        config.max_iterations = iterations;
        let outcome = run(config.clone())?;
        let best = outcome.records.iter().map(|r| r.covered).max().unwrap_or(0);
        println!(
            "{label:<14} {:>6} {:>6}/{front} {:>6}/{front} {:>8}",
            config.pop_size,
            outcome.final_record().covered,
            best,
            outcome.losses()
        );
    }
    Ok(())
}
