//! Slope products D_m along digit streams on either side of a0.
//!
//! cargo run --release --example derivative_traces

use okamoto::differentiability::{a0, derivative_experiment};
use okamoto::{derivative_trace, digit_frequency_experiment, Parameter, TernaryExpansion};

fn main() -> okamoto::Result<()> {
    let freq = digit_frequency_experiment(200, 3000, 7)?;
    println!(
        "digit-1 frequency over 200 x 3000 digits: mean {:.4}, range [{:.4}, {:.4}]",
        freq.mean, freq.min, freq.max
    );

    // at a0 the periodic point 0.(012) flips sign every block
    let critical = Parameter::new(a0())?;
    let pattern = TernaryExpansion::periodic(&[0, 1, 2], 18)?;
    let trace = derivative_trace(&critical, &pattern, 18)?;
    let blocks: Vec<String> = (0..=6).map(|m| format!("{:+.6}", trace.value(3 * m))).collect();
    println!("D_3m at a0 along 0.(012): {}", blocks.join(" "));

    for (a, n) in [(0.4, 200), (0.4, 400), (0.7, 100)] {
        let exp = derivative_experiment(&Parameter::new(a)?, 100, n, 7)?;
        println!(
            "a = {a}, m = {n}: {} of 100 end below 1e-2, {} pass 1e6",
            exp.count_final_below(1e-2),
            exp.count_exceeding_by(1e6, n)
        );
    }
    Ok(())
}
