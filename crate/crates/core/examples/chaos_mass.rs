//! Chaos-game samples of the natural mass, checked against the graph and the
//! mass bound.
//!
//! cargo run --release --example chaos_mass

use okamoto::geometry::DEFAULT_BURN_IN;
use okamoto::{chaos_game, mass_bound_check, ChaosGame, Parameter};

fn main() -> okamoto::Result<()> {
    let a = Parameter::ratio(2, 3)?;
    let sample = chaos_game(&a, 200_000, DEFAULT_BURN_IN, 42)?;
    println!("weights {:?}", sample.weights);

    let dev = sample.graph_deviations(40, 1e-6)?;
    let worst = dev.iter().copied().fold(0.0, f64::max);
    println!("max |y - F(x)| over {} points: {worst:.2e}", dev.len());

    for level in 1..=4 {
        let report = mass_bound_check(&sample, level, 0.2)?;
        println!(
            "level {level}: max mass/bound {:.3}, flagged {}",
            report.max_ratio(),
            report.flagged().len()
        );
    }
    let coarse = mass_bound_check(&sample, 1, 0.2)?;
    println!(
        "column masses at level 1: {:.4} {:.4} {:.4}",
        coarse.column_mass(0),
        coarse.column_mass(1),
        coarse.column_mass(2)
    );

    // chains split across threads give the same sample for a fixed seed
    let game = ChaosGame::new(&a)?;
    assert_eq!(game.run_chains(4, 1000, 5), game.run_chains(4, 1000, 5));
    Ok(())
}
