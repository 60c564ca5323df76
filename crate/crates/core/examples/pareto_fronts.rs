//! Evaluates bit strings on OneMinMax and 3-OMM and enumerates both fronts.
//!
//! cargo run --example pareto_fronts -- 6

use moea_lab::genome::{Genome, RandomSource};
use moea_lab::problems::Problem;

fn main() -> moea_lab::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(6);
    let omm = Problem::one_min_max(n)?;
    let tomm = Problem::three_omm(n)?;

    let mut rng = RandomSource::from_seed(1);
    for _ in 0..4 {
        let x = Genome::random(n, &mut rng)?;
        println!(
            "{x}  omm {:?}  3omm {:?}",
            omm.evaluate(&x)?.values(),
            tomm.evaluate(&x)?.values()
        );
    }

    println!("\nOneMinMax front ({} values):", omm.front_size());
    for v in omm.pareto_front() {
        print!(" {:?}", v.values());
    }
    println!("\n\n3-OMM front ({} values):", tomm.front_size());
    for v in tomm.pareto_front() {
        print!(" {:?}", v.values());
    }
    println!();
    Ok(())
}
