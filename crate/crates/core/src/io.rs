//! Grid persistence and previews.
//!
//! A grid file is the magic line `CDG1`, a text header
//! `N rows cols dx origin_x origin_y` and `rows · cols` little-endian `f64`
//! values in row-major order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::forward::Grid2D;

pub const GRID_MAGIC: &str = "CDG1";

#[derive(Debug, Clone, PartialEq)]
pub struct GridFile {
    pub dimension: u32,
    pub grid: Grid2D,
}

impl GridFile {
    pub fn new(dimension: u32, grid: Grid2D) -> Self {
        Self { dimension, grid }
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let g = &self.grid;
        let [ox, oy] = g.origin();
        writeln!(out, "{GRID_MAGIC}")?;
        writeln!(
            out,
            "{} {} {} {} {} {}",
            self.dimension,
            g.rows(),
            g.cols(),
            g.dx(),
            ox,
            oy
        )?;
        let mut payload = Vec::with_capacity(g.len() * 8);
        for v in g.values() {
            payload.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&payload)?;
        out.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(input: R) -> Result<Self> {
        let mut reader = BufReader::new(input);
        let mut line = String::new();
        reader.read_line(&mut line)?;
        if line.trim_end_matches('\n') != GRID_MAGIC {
            return Err(Error::Format(format!("bad magic {:?}", line.trim_end())));
        }
        line.clear();
        reader.read_line(&mut line)?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::Format(format!("header needs 6 fields, got {:?}", line.trim_end())));
        }
        let parse_usize = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| Error::Format(format!("bad integer {s:?}: {e}")))
        };
        let parse_f64 = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Format(format!("bad number {s:?}: {e}")))
        };
        let dimension = fields[0]
            .parse::<u32>()
            .map_err(|e| Error::Format(format!("bad dimension {:?}: {e}", fields[0])))?;
        let rows = parse_usize(fields[1])?;
        let cols = parse_usize(fields[2])?;
        let dx = parse_f64(fields[3])?;
        let origin = [parse_f64(fields[4])?, parse_f64(fields[5])?];
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Format("grid dimensions overflow".into()))?;
        let mut payload = Vec::new();
        reader.read_to_end(&mut payload)?;
        if payload.len() != len * 8 {
            return Err(Error::Format(format!(
                "payload holds {} bytes, expected {}",
                payload.len(),
                len * 8
            )));
        }
        let values = payload
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8 bytes")))
            .collect();
        let grid = Grid2D::new(rows, cols, dx, values)
            .map_err(|e| Error::Format(e.to_string()))?
            .with_origin(origin);
        Ok(Self { dimension, grid })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(File::open(path)?)
    }
}

/// Range used to map values to gray levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgmScaling {
    pub min: f64,
    pub max: f64,
}

/// 8-bit binary PGM, row 0 at the top, linear min-max scaling recorded in
/// a header comment.
pub fn write_pgm<W: Write>(grid: &Grid2D, mut out: W) -> Result<PgmScaling> {
    let (min, max) = (grid.min_value(), grid.max_value());
    let span = max - min;
    writeln!(out, "P5")?;
    writeln!(out, "# min {min} max {max}")?;
    writeln!(out, "{} {}", grid.cols(), grid.rows())?;
    writeln!(out, "255")?;
    let bytes: Vec<u8> = grid
        .values()
        .iter()
        .map(|&v| {
            if span > 0.0 {
                (255.0 * (v - min) / span).round().clamp(0.0, 255.0) as u8
            } else {
                0
            }
        })
        .collect();
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(PgmScaling { min, max })
}

pub fn save_pgm(grid: &Grid2D, path: &Path) -> Result<PgmScaling> {
    write_pgm(grid, BufWriter::new(File::create(path)?))
}

/// Numeric CSV with a header row; floats in round-trip form.
pub fn write_csv<W, I>(mut out: W, header: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = Vec<f64>>,
{
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::Internal(format!(
                "CSV row has {} fields, header has {}",
                row.len(),
                header.len()
            )));
        }
        let text: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", text.join(","))?;
    }
    out.flush()?;
    Ok(())
}
