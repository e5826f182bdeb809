//! Field serialization.
//!
//! CSV: one row per node, coordinates then value. Binary: header of 64-bit
//! little-endian words (dim, then per axis length as f64 and points as u64),
//! followed by the samples as f64, row-major.

use crate::error::{CoreError, Result};
use crate::field::Field;
use crate::grid::GridSpec;
use std::io::{BufRead, Read, Write};

pub fn write_field_csv(f: &Field, w: &mut impl Write) -> Result<()> {
    let grid = f.grid();
    let dim = grid.dim();
    let header: Vec<&str> = match dim {
        1 => vec!["x", "value"],
        _ => vec!["x", "y", "value"],
    };
    writeln!(w, "{}", header.join(","))?;
    for (idx, v) in f.samples().iter().enumerate() {
        let node = grid.node(idx);
        for c in &node[..dim] {
            write!(w, "{c:.16e},")?;
        }
        writeln!(w, "{v:.16e}")?;
    }
    Ok(())
}

/// Read a CSV field back; the grid must be supplied (the CSV stores nodes,
/// not the grid definition).
pub fn read_field_csv(r: &mut impl BufRead, grid: &GridSpec) -> Result<Field> {
    let mut lines = r.lines();
    let _header = lines.next().ok_or_else(|| CoreError::Parse("empty field csv".into()))?;
    let mut samples = Vec::with_capacity(grid.total_points());
    for line in lines {
        let line = line.map_err(CoreError::Io)?;
        if line.trim().is_empty() {
            continue;
        }
        let last = line
            .rsplit(',')
            .next()
            .ok_or_else(|| CoreError::Parse("missing value column".into()))?;
        samples.push(
            last.trim().parse::<f64>().map_err(|e| CoreError::Parse(format!("bad value: {e}")))?,
        );
    }
    Field::from_samples(grid.clone(), samples)
}

pub fn write_field_binary(f: &Field, w: &mut impl Write) -> Result<()> {
    let grid = f.grid();
    w.write_all(&(grid.dim() as u64).to_le_bytes())?;
    for a in 0..grid.dim() {
        w.write_all(&grid.lengths()[a].to_le_bytes())?;
    }
    for a in 0..grid.dim() {
        w.write_all(&(grid.points()[a] as u64).to_le_bytes())?;
    }
    for v in f.samples() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_field_binary(r: &mut impl Read) -> Result<Field> {
    let mut u64buf = [0u8; 8];
    r.read_exact(&mut u64buf)?;
    let dim = u64::from_le_bytes(u64buf) as usize;
    if dim == 0 || dim > 2 {
        return Err(CoreError::Parse(format!("bad dimension {dim}")));
    }
    let mut lengths = Vec::with_capacity(dim);
    for _ in 0..dim {
        r.read_exact(&mut u64buf)?;
        lengths.push(f64::from_le_bytes(u64buf));
    }
    let mut points = Vec::with_capacity(dim);
    for _ in 0..dim {
        r.read_exact(&mut u64buf)?;
        points.push(u64::from_le_bytes(u64buf) as usize);
    }
    let grid = GridSpec::new(&lengths, &points)?;
    let mut samples = Vec::with_capacity(grid.total_points());
    for _ in 0..grid.total_points() {
        r.read_exact(&mut u64buf)?;
        samples.push(f64::from_le_bytes(u64buf));
    }
    Field::from_samples(grid, samples)
}
