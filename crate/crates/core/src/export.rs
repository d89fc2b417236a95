//! CSV and SVG emission.
//!
//! Every file starts with a provenance comment: `# a=<a> mode=<mode>
//! seed=<seed> version=<version>` (an XML comment in SVG). Floats are written
//! with 17 significant digits so they re-parse bit for bit; exact values are
//! written as `p/q`.

use std::io::{self, BufRead, Write};

use num::BigRational;

use crate::geometry::{CoverLevel, LengthProfile, MassSample};
use crate::param::{Mode, Parameter};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance written at the top of every output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub a: String,
    pub mode: Mode,
    pub seed: u64,
    pub version: String,
}

impl Header {
    pub fn new(a: &Parameter, seed: u64) -> Self {
        Header {
            a: a.to_string(),
            mode: a.mode(),
            seed,
            version: VERSION.to_string(),
        }
    }

    fn fields(&self) -> String {
        format!(
            "a={} mode={} seed={} version={}",
            self.a, self.mode, self.seed, self.version
        )
    }

    pub fn comment_line(&self) -> String {
        format!("# {}", self.fields())
    }

    /// Parses a line produced by [`Header::comment_line`].
    pub fn parse(line: &str) -> io::Result<Self> {
        let body = line
            .strip_prefix('#')
            .ok_or_else(|| invalid(format!("not a header line: {line:?}")))?;
        let mut a = None;
        let mut mode = None;
        let mut seed = None;
        let mut version = None;
        for field in body.split_whitespace() {
            match field.split_once('=') {
                Some(("a", v)) => a = Some(v.to_string()),
                Some(("mode", "exact")) => mode = Some(Mode::Exact),
                Some(("mode", "float")) => mode = Some(Mode::Float),
                Some(("seed", v)) => seed = v.parse().ok(),
                Some(("version", v)) => version = Some(v.to_string()),
                _ => {}
            }
        }
        match (a, mode, seed, version) {
            (Some(a), Some(mode), Some(seed), Some(version)) => Ok(Header {
                a,
                mode,
                seed,
                version,
            }),
            _ => Err(invalid(format!("incomplete header: {line:?}"))),
        }
    }
}

fn invalid(msg: String) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg)
}

/// Text form of a value in output files.
pub trait ExportValue {
    fn export(&self) -> String;
}

impl ExportValue for f64 {
    fn export(&self) -> String {
        format_float(*self)
    }
}

impl ExportValue for BigRational {
    fn export(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

/// 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_writer<W: Write>(mut out: W, header: &Header, extra: &[String]) -> io::Result<csv::Writer<W>> {
    writeln!(out, "{}", header.comment_line())?;
    for line in extra {
        writeln!(out, "# {line}")?;
    }
    Ok(csv::Writer::from_writer(out))
}

/// `x,y` rows of a polyline.
pub fn write_points_csv<W: Write, T: ExportValue>(
    out: W,
    header: &Header,
    points: &[(T, T)],
) -> io::Result<()> {
    let mut w = csv_writer(out, header, &[])?;
    w.write_record(["x", "y"])?;
    for (x, y) in points {
        w.write_record([x.export(), y.export()])?;
    }
    w.flush()
}

/// `x,y,step` rows of a chaos-game sample.
pub fn write_chaos_csv<W: Write>(out: W, header: &Header, sample: &MassSample) -> io::Result<()> {
    let mut w = csv_writer(out, header, &[])?;
    w.write_record(["x", "y", "step"])?;
    for (&(x, y), step) in sample.points.iter().zip(&sample.steps) {
        w.write_record([format_float(x), format_float(y), step.to_string()])?;
    }
    w.flush()
}

/// `level,delta,area,boxes,log_inv_delta,log_boxes` rows.
pub fn write_cover_csv<W: Write>(
    out: W,
    header: &Header,
    notes: &[String],
    levels: &[CoverLevel],
) -> io::Result<()> {
    let mut w = csv_writer(out, header, notes)?;
    w.write_record(["level", "delta", "area", "boxes", "log_inv_delta", "log_boxes"])?;
    for l in levels {
        w.write_record([
            l.level.to_string(),
            format_float(l.delta),
            format_float(l.area),
            format_float(l.boxes),
            format_float(l.log_inv_delta()),
            format_float(l.log_boxes()),
        ])?;
    }
    w.flush()
}

/// `level,euclidean_length,manhattan_length,total_variation` rows.
pub fn write_length_csv<W: Write>(
    out: W,
    header: &Header,
    notes: &[String],
    profile: &LengthProfile,
) -> io::Result<()> {
    let mut w = csv_writer(out, header, notes)?;
    w.write_record([
        "level",
        "euclidean_length",
        "manhattan_length",
        "total_variation",
    ])?;
    for l in &profile.levels {
        w.write_record([
            l.level.to_string(),
            format_float(l.euclidean),
            format_float(l.manhattan),
            format_float(l.total_variation),
        ])?;
    }
    w.flush()
}

/// A float points file (`x,y` or `x,y,step`) with its header.
#[derive(Debug, Clone, PartialEq)]
pub struct PointsFile {
    pub header: Header,
    pub points: Vec<(f64, f64)>,
    pub steps: Option<Vec<u64>>,
}

pub fn read_points_csv<R: BufRead>(mut input: R) -> io::Result<PointsFile> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    let header = Header::parse(first.trim_end())?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let columns = reader.headers()?.len();
    let mut points = Vec::new();
    let mut steps = Vec::new();
    for record in reader.records() {
        let record = record?;
        let field = |i: usize| -> io::Result<f64> {
            record[i]
                .parse()
                .map_err(|_| invalid(format!("bad float {:?}", &record[i])))
        };
        points.push((field(0)?, field(1)?));
        if columns > 2 {
            steps.push(
                record[2]
                    .parse()
                    .map_err(|_| invalid(format!("bad step {:?}", &record[2])))?,
            );
        }
    }
    Ok(PointsFile {
        header,
        points,
        steps: (columns > 2).then_some(steps),
    })
}

/// A single polyline in the unit square, y axis pointing up.
pub fn write_svg<W: Write>(mut out: W, header: &Header, points: &[(f64, f64)]) -> io::Result<()> {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1 1">"#
    )?;
    writeln!(out, "<!-- {} -->", header.fields())?;
    write!(
        out,
        r#"<polyline fill="none" stroke="black" stroke-width="0.002" points=""#
    )?;
    for (idx, (x, y)) in points.iter().enumerate() {
        if idx > 0 {
            write!(out, " ")?;
        }
        write!(out, "{:.8},{:.8}", x, 1.0 - y)?;
    }
    writeln!(out, r#""/>"#)?;
    writeln!(out, "</svg>")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn header() -> Header {
        Header::new(&Parameter::ratio(2, 3).unwrap(), 7)
    }

    #[test]
    fn header_round_trip() {
        let h = header();
        assert_eq!(h.comment_line(), format!("# a=2/3 mode=exact seed=7 version={VERSION}"));
        assert_eq!(Header::parse(&h.comment_line()).unwrap(), h);
        assert!(Header::parse("# a=1").is_err());
    }

    #[test]
    fn exact_values_print_as_fractions() {
        let v = BigRational::new(4.into(), 9.into());
        assert_eq!(v.export(), "4/9");
        let one = BigRational::new(1.into(), 1.into());
        assert_eq!(one.export(), "1/1");
    }

    #[test]
    fn svg_flips_y() {
        let mut buf = Vec::new();
        write_svg(&mut buf, &header(), &[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains(r#"viewBox="0 0 1 1""#));
        assert!(text.contains(r#"stroke-width="0.002""#));
        assert!(text.contains("0.00000000,1.00000000 1.00000000,0.00000000"));
        assert_eq!(text.matches("<polyline").count(), 1);
    }

    proptest! {
        #[test]
        fn float_csv_round_trips_bitwise(points in prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 1..50)) {
            let h = Header::new(&Parameter::new(0.6).unwrap(), 1);
            let mut buf = Vec::new();
            write_points_csv(&mut buf, &h, &points).unwrap();
            let back = read_points_csv(&buf[..]).unwrap();
            prop_assert_eq!(back.header, h);
            prop_assert_eq!(back.points.len(), points.len());
            for (p, q) in back.points.iter().zip(&points) {
                prop_assert_eq!(p.0.to_bits(), q.0.to_bits());
                prop_assert_eq!(p.1.to_bits(), q.1.to_bits());
            }
        }
    }
}
