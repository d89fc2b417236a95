//! Column-area covers, their box counts and the fitted dimension.
//!
//! cargo run --example box_dimension

use okamoto::geometry::square_dimension_estimate;
use okamoto::{cover_profile, dimension_estimate, Parameter};

fn main() -> okamoto::Result<()> {
    let a = Parameter::ratio(2, 3)?;
    println!("level         area            boxes");
    for l in &cover_profile(&a, 8)?.levels {
        println!("{:>5} {:>12.6e} {:>16.1}", l.level, l.area, l.boxes);
    }

    println!("\n   a   column  square  log3(12a-3)");
    for s in ["0.2", "1/2", "0.6", "2/3", "0.8", "0.9"] {
        let a: Parameter = s.parse()?;
        let column = dimension_estimate(&a, 1, 10)?;
        let square = square_dimension_estimate(&a, 1, 9)?;
        println!(
            "{s:>4}  {:.5}  {:.4}  {:.5}",
            column.slope, square.slope, column.reference
        );
    }
    Ok(())
}
