//! Normalizes a random 3-OMM population and compares the result with plain
//! min-max scaling.

use moea_lab::genome::{Genome, RandomSource};
use moea_lab::normalization::NormalizationState;
use moea_lab::problems::Problem;

fn main() -> moea_lab::Result<()> {
    let n = 10;
    let problem = Problem::three_omm(n)?;
    let mut rng = RandomSource::from_seed(3);
    let pop: Vec<_> = (0..30)
        .map(|_| problem.evaluate(&Genome::random(n, &mut rng)?))
        .collect::<moea_lab::Result<_>>()?;

    let mut state = NormalizationState::new(3);
    let everyone = vec![(0..pop.len()).collect::<Vec<_>>()];
    let normalizer = state.normalize(&pop, &everyone)?;
    let report = state.last_report().expect("normalize stores a report");
    println!("ideal      {:?}", state.ideal());
    println!("worst      {:?}", state.worst());
    println!(
        "intercepts {:?} (valid: {}, used: {})",
        report.intercepts.values, report.intercepts.valid, report.used_intercepts
    );
    println!("nadir      {:?}", normalizer.nadir());

    let mut worst_gap: f64 = 0.0;
    for f in &pop {
        let scaled = normalizer.apply(f);
        for j in 0..3 {
            let minmax = (f[j] - state.ideal()[j]) / (state.worst()[j] - state.ideal()[j]);
            worst_gap = worst_gap.max((scaled[j] - minmax).abs());
        }
    }
    println!("largest difference from min-max scaling: {worst_gap:e}");
    for f in pop.iter().take(5) {
        println!("  {:?} -> {:.3?}", f.values(), normalizer.apply(f));
    }
    Ok(())
}
