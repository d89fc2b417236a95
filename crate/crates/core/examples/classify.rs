//! Differentiability regions across the parameter range, and a0.
//!
//! cargo run --example classify

use okamoto::differentiability::{classify_limit, find_a0};
use okamoto::{nondiff_points, region_classify, Parameter};

fn main() -> okamoto::Result<()> {
    let cv = find_a0(1e-15)?;
    println!(
        "a0 = {:.16} (residual {:.1e}, {} bisection steps)",
        cv.value, cv.residual, cv.iterations
    );

    for s in ["1/4", "1/3", "0.45", "1/2", "0.55", "0.56", "0.6", "2/3", "0.8"] {
        let a: Parameter = s.parse()?;
        let class = region_classify(&a);
        println!(
            "a = {s:>4}: {:<28} F' {:<22} limit at gamma=1/3: {}",
            class.region.description(),
            class.first_derivative.label(),
            classify_limit(&a, 1.0 / 3.0)?
        );
    }

    // a dense set where F_a' fails to exist, shown to level 2
    for a in [0.25, 0.45] {
        let pts = nondiff_points(&Parameter::new(a)?, 2)?;
        let shown: Vec<String> = pts.iter().map(|r| r.to_string()).collect();
        println!("a = {a}: {}", shown.join(" "));
    }
    if let Err(e) = nondiff_points(&Parameter::new(0.75)?, 2) {
        println!("a = 0.75: {e}");
    }
    Ok(())
}
