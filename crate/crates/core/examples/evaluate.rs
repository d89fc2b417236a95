//! Certified evaluation of F_a, in floats and exactly.
//!
//! cargo run --example evaluate

use num::BigRational;
use okamoto::{eval_digit_series, evaluate, ternary_rational, to_ternary, Parameter};

fn main() -> okamoto::Result<()> {
    let bourbaki = Parameter::new(2.0 / 3.0)?;
    for x in [0.1, 0.25, 0.5, 0.9] {
        let e = evaluate(&bourbaki, x, 1e-12)?;
        println!(
            "F_2/3({x}) = {:.15} (error < {:.1e}, {} digits)",
            e.value, e.error_bound, e.digits_used
        );
    }

    // exact values at triadic points
    let exact = Parameter::ratio(3, 5)?;
    for k in 0..=9 {
        let v = eval_digit_series::<BigRational>(&exact, &ternary_rational(k, 2)?, 1e-12)?;
        println!("F_3/5({k}/9) = {}", v.value);
    }

    // asking for more than the digits can certify
    let short = to_ternary(0.3, 5)?;
    match eval_digit_series::<f64>(&bourbaki, &short, 1e-12) {
        Err(e) => println!("5 digits: {e}"),
        Ok(v) => println!("5 digits: {}", v.value),
    }
    Ok(())
}
