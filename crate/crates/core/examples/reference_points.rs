//! Builds the structured reference point lattice and associates a few
//! directions with it.
//!
//! cargo run --example reference_points -- 4

use moea_lab::refpoints::{lattice_size, ReferencePointSet};

fn main() -> moea_lab::Result<()> {
    let p: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(4);
    let set = ReferencePointSet::new(3, p)?;
    println!(
        "{} points for p = {p} (expected {})",
        set.len(),
        lattice_size(3, p)
    );
    for (i, r) in set.points().iter().enumerate().take(12) {
        println!("  r{i:<3} {:.3} {:.3} {:.3}", r[0], r[1], r[2]);
    }
    if set.len() > 12 {
        println!("  ...");
    }

    for v in [
        [1.0, 0.2, 0.2],
        [0.3, 0.3, 0.4],
        [0.5, 0.5, 0.0],
        [2.0, 1.0, 1.0],
    ] {
        let near = set.nearest(&v)?;
        let tied: Vec<String> = near
            .indices
            .iter()
            .map(|i| format!("{:?}", set.point(*i)))
            .collect();
        println!(
            "{v:?} -> {} at distance {:.4}",
            tied.join(" | "),
            near.distance
        );
    }
    Ok(())
}
