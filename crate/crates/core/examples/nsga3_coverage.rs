//! Runs NSGA-III on 3-OMM and prints how the front fills up.
//!
//! cargo run --release --example nsga3_coverage -- 20

use moea_lab::engine::{run, Algorithm, RunConfig, StopPolicy};
use moea_lab::problems::Benchmark;

fn main() -> moea_lab::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(20);
    let mut config = RunConfig::new(Benchmark::ThreeOneMinMax, n, Algorithm::Nsga3);
    config.max_iterations = 20 * n;
    config.stop = StopPolicy::Coverage;
    config.seed = 2024;

    let outcome = run(config.clone())?;
    println!(
        "n = {n}, N = {}, p = {}, mutation 1/n",
        config.pop_size,
        config.effective_divisions().unwrap()
    );
    let step = (outcome.records.len() / 15).max(1);
    for r in outcome.records.iter().step_by(step) {
        let bar = "#".repeat(40 * r.covered / r.front_size);
        println!("{:>5} {:>4}/{} {bar}", r.iteration, r.covered, r.front_size);
    }
    match outcome.first_full_coverage {
        Some(t) => println!(
            "full coverage after {t} iterations, {} loss events",
            outcome.losses()
        ),
        None => println!(
            "no full coverage within {} iterations",
            config.max_iterations
        ),
    }
    Ok(())
}
