//! Checks that every 3-OMM front value gets its own reference point and
//! searches for the fewest divisions that achieve this.
//!
//! cargo run --release --example unique_association -- 4 8 12 16 20

use moea_lab::analysis::{
    association_angle_bound, minimal_p_search, pairwise_angle_bound, verify_unique_association,
};

fn main() -> moea_lab::Result<()> {
    let mut ns: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    if ns.is_empty() {
        ns = vec![4, 8, 12, 16, 20];
    }
    println!(
        "{:>4} {:>6} {:>12} {:>12} {:>10} {:>6} {:>8}",
        "n", "p=21n", "min pair", "max assoc", "collisions", "p_min", "p_min/n"
    );
    for n in ns {
        let r = verify_unique_association(n, 21 * n)?;
        assert!(r.max_assoc_angle <= association_angle_bound(21 * n) + 1e-12);
        assert!(r.min_pairwise_angle >= pairwise_angle_bound(n) - 1e-12);
        let m = minimal_p_search(n, 1..=21 * n)?;
        let p = m.p_min.expect("21n always works");
        println!(
            "{n:>4} {:>6} {:>12.6} {:>12.6} {:>10} {p:>6} {:>8.2}",
            r.p,
            r.min_pairwise_angle,
            r.max_assoc_angle,
            r.collisions,
            p as f64 / n as f64
        );
    }
    Ok(())
}
