//! Deterministic CSV and PPM writers.
//!
//! CSV files start with `#`-prefixed metadata lines (the first one names the
//! table and its schema version), followed by a header row and data rows.
//! Numbers are written with 12 significant digits, `.` as decimal separator
//! and `\n` line endings, so identical inputs give byte-identical files.

use std::io::{self, Write};

use crate::orbits::{EscapeGrid, PixelClass};
use crate::sector::{SectorReport, SectorVerdict};

pub const SCHEMA_VERSION: u32 = 1;

/// `%.12g`-style formatting.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    const DIGITS: i32 = 12;
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= DIGITS {
        format!("{}e{}", trim_fraction(mantissa), exp)
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A small in-memory CSV table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub meta: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

impl CsvTable {
    /// Starts a table whose first metadata line is
    /// `# hypdyn <name> schema=<version>`.
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            meta: vec![format!("hypdyn {name} schema={SCHEMA_VERSION}")],
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, line: impl Into<String>) -> &mut Self {
        self.meta.push(line.into());
        self
    }

    pub fn push(&mut self, row: Vec<String>) -> &mut Self {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
        self
    }

    pub fn push_nums(&mut self, row: &[f64]) -> &mut Self {
        self.push(row.iter().map(|&v| fmt_num(v)).collect())
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        for m in &self.meta {
            writeln!(out, "# {m}")?;
        }
        let line = |fields: &[String]| fields.iter().map(|f| quote(f)).collect::<Vec<_>>().join(",");
        writeln!(out, "{}", line(&self.header))?;
        for row in &self.rows {
            writeln!(out, "{}", line(row))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}

/// Escape-grid palette.
pub const ESCAPED_RGB: [u8; 3] = [250, 200, 60];
pub const BOUNDED_RGB: [u8; 3] = [20, 20, 60];
pub const LEFT_WINDOW_RGB: [u8; 3] = [120, 180, 230];

pub fn pixel_rgb(p: PixelClass) -> [u8; 3] {
    match p {
        PixelClass::Escaped(_) => ESCAPED_RGB,
        PixelClass::Bounded(_) => BOUNDED_RGB,
        PixelClass::LeftWindow(_) => LEFT_WINDOW_RGB,
    }
}

/// Columns `x,y,class,iterations`, one row per pixel in row-major order
/// starting at the top-left corner.
pub fn escape_grid_csv(grid: &EscapeGrid) -> CsvTable {
    let mut t = CsvTable::new("escape-grid", &["x", "y", "class", "iterations"]);
    t.meta(format!(
        "rect={},{},{},{} resolution={}x{} n_max={} r_esc={}",
        fmt_num(grid.rect.re_min),
        fmt_num(grid.rect.re_max),
        fmt_num(grid.rect.im_min),
        fmt_num(grid.rect.im_max),
        grid.width,
        grid.height,
        grid.n_max,
        fmt_num(grid.escape_radius)
    ));
    for row in 0..grid.height {
        for col in 0..grid.width {
            let z = grid.pixel_center(col, row);
            let p = grid.get(col, row);
            t.push(vec![fmt_num(z.re), fmt_num(z.im), p.label().to_string(), p.iterations().to_string()]);
        }
    }
    t
}

/// Binary PPM (`P6`, maxval 255) using the palette above.
pub fn write_ppm<W: Write>(grid: &EscapeGrid, mut out: W) -> io::Result<()> {
    write!(out, "P6\n{} {}\n255\n", grid.width, grid.height)?;
    let bytes: Vec<u8> = grid.pixels.iter().flat_map(|&p| pixel_rgb(p)).collect();
    out.write_all(&bytes)
}

/// Columns `x,ratio`; the verdict and `K` go into a metadata line.
pub fn sector_report_csv(report: &SectorReport) -> CsvTable {
    let mut t = CsvTable::new("sector-check", &["x", "ratio"]);
    let k = match report.verdict {
        SectorVerdict::Satisfied { k } => fmt_num(k),
        _ => fmt_num(report.sup_ratio),
    };
    let mut line = format!("verdict={} K={k}", report.verdict);
    if let SectorVerdict::Violated { witness } = report.verdict {
        line.push_str(&format!(" witness={}", fmt_num(witness)));
    }
    t.meta(line);
    t.meta(format!(
        "sigma={} r={} x_max={} samples={}",
        report.direction,
        fmt_num(report.r),
        fmt_num(report.x_max),
        report.samples
    ));
    for &(x, q) in &report.ratios {
        t.push_nums(&[x, q]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(-std::f64::consts::PI), "-3.14159265359");
        assert_eq!(fmt_num(1e-7), "1e-7");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_num(1e300), "1e300");
        assert_eq!(fmt_num(0.0001), "0.0001");
        assert_eq!(fmt_num(999999999999.5), "1e12");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_layout() {
        let mut t = CsvTable::new("demo", &["a", "b"]);
        t.meta("note=x").push_nums(&[1.0, 0.25]);
        t.push(vec!["has,comma".into(), "q\"uote".into()]);
        assert_eq!(
            t.to_csv_string(),
            "# hypdyn demo schema=1\n# note=x\na,b\n1,0.25\n\"has,comma\",\"q\"\"uote\"\n"
        );
    }
}
