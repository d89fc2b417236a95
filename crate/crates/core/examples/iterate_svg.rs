//! Writes the level-6 polylines of a few parameters as SVG.
//!
//! cargo run --example iterate_svg -- [output dir]

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use okamoto::export::{write_svg, Header};
use okamoto::{sample_graph, Parameter};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    for (p, q) in [(1, 3), (1, 2), (3, 5), (2, 3), (5, 6)] {
        let a = Parameter::ratio(p, q)?;
        let points = sample_graph::<f64>(&a, 6)?;
        let path = dir.join(format!("okamoto_{p}_{q}.svg"));
        write_svg(BufWriter::new(File::create(&path)?), &Header::new(&a, 0), &points)?;
        println!("a = {a}: {} vertices -> {}", points.len(), path.display());
    }
    Ok(())
}
