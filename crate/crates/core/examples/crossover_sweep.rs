//! Sweeps the crossover rate for NSGA-III on 3-OMM and writes the run and
//! summary CSVs, as the `sweep` subcommand would.
//!
//! cargo run --release --example crossover_sweep -- /tmp/crossover

use moea_lab::lab::{sweep_to_dir, SweepSpec};

const SPEC: &str = "\
n = 12, 16
chi = 0, 0.5, 0.9
divisions = 21n
seeds = 4
seed = 11
iterations = 3000
stop = coverage
";

fn main() -> moea_lab::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("moea-lab-crossover"));
    let spec = SweepSpec::parse(SPEC)?;
    let results = sweep_to_dir(&spec, &out, None)?;
    println!("{} runs written to {}", results.len(), out.display());
    print!("{}", std::fs::read_to_string(out.join("summary.csv"))?);
    Ok(())
}
