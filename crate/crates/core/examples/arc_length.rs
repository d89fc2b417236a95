//! Euclidean and Manhattan lengths of the iterations.
//!
//! cargo run --example arc_length

use okamoto::{arc_length_profile, Parameter};

fn main() -> okamoto::Result<()> {
    for a in [0.2, 0.5, 0.6, 0.8] {
        let prof = arc_length_profile(&Parameter::new(a)?, 10)?;
        let l: Vec<String> = prof
            .levels
            .iter()
            .step_by(2)
            .map(|l| format!("{:.4}", l.euclidean))
            .collect();
        let last = prof.levels.last().unwrap();
        println!(
            "a = {a}: L_0,2,..,10 = {}  (Manhattan L_10 = {:.4})",
            l.join(" "),
            last.manhattan
        );
    }
    Ok(())
}
