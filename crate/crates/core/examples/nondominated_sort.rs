//! Ranks a random population into non-dominated fronts and shows where the
//! population budget cuts the ranking.

use moea_lab::dominance::{dominates, fast_nondominated_sort};
use moea_lab::genome::RandomSource;
use moea_lab::problems::Sense;
use rand::Rng;

fn main() -> moea_lab::Result<()> {
    let mut rng = RandomSource::from_seed(7);
    // minimize cost, maximize quality
    let senses = [Sense::Minimize, Sense::Maximize];
    let pop: Vec<[f64; 2]> = (0..16)
        .map(|_| {
            [
                rng.random_range(0..10) as f64,
                rng.random_range(0..10) as f64,
            ]
        })
        .collect();

    let ranked = fast_nondominated_sort(&pop, &senses)?;
    for (k, front) in ranked.fronts().iter().enumerate() {
        let values: Vec<String> = front.iter().map(|&i| format!("{:?}", pop[i])).collect();
        println!("F{}: {}", k + 1, values.join(" "));
    }

    let split = ranked.split_at_budget(8)?;
    println!(
        "\nbudget 8: keep {} from ranks before {}, pick {} of {} from the critical front",
        split.accepted_count(),
        split.critical_rank,
        split.slots,
        split.critical.len()
    );

    let (a, b) = (
        pop[ranked.first()[0]],
        pop[ranked.fronts().last().unwrap()[0]],
    );
    println!("{a:?} vs {b:?}: {:?}", dominates(&a, &b, &senses)?);
    Ok(())
}
