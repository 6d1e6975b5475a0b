//! Field import/export.
//!
//! CSV: header `kind,index,<coords>,value`, one row per interior point then
//! one per boundary point, `kind` being `interior` or `boundary`.
//!
//! Binary: magic `KHSF`, then little-endian `u32 n`, `u32 shape` (0 box,
//! 1 ball), `u32 points_per_axis`, `u64` interior count, `u64` boundary count,
//! followed by the interior values and the boundary values as `f64`.

use std::io::{BufRead, Read, Write};

use super::{GeometryError, Grid, ScalarField, Shape};

const MAGIC: &[u8; 4] = b"KHSF";

fn coord_names(dim: usize) -> Vec<String> {
    (0..dim)
        .map(|a| format!("{}{}", if a % 2 == 0 { 'x' } else { 'y' }, a / 2 + 1))
        .collect()
}

pub fn write_csv<W: Write>(grid: &Grid, field: &ScalarField, mut out: W) -> Result<(), GeometryError> {
    field.check(grid)?;
    writeln!(out, "kind,index,{},value", coord_names(grid.real_dim()).join(","))?;
    let mut row = |kind: &str, i: usize, z: &[f64], v: f64| -> std::io::Result<()> {
        write!(out, "{kind},{i}")?;
        for c in z {
            write!(out, ",{c}")?;
        }
        writeln!(out, ",{v}")
    };
    for p in 0..grid.interior_len() {
        row("interior", p, grid.interior_point(p), field.interior[p])?;
    }
    for b in 0..grid.boundary_len() {
        row("boundary", b, grid.boundary_point(b), field.boundary[b])?;
    }
    Ok(())
}

/// Reads a CSV written by [`write_csv`] for the same grid; coordinates are
/// checked against the grid to 1e-12.
pub fn read_csv<R: BufRead>(grid: &Grid, input: R) -> Result<ScalarField, GeometryError> {
    let dim = grid.real_dim();
    let mut field = ScalarField::zeros(grid);
    let mut seen_i = vec![false; grid.interior_len()];
    let mut seen_b = vec![false; grid.boundary_len()];
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        if lineno == 0 || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != dim + 3 {
            return Err(GeometryError::Format(format!("line {}: expected {} columns", lineno + 1, dim + 3)));
        }
        let bad = |what: &str| GeometryError::Format(format!("line {}: bad {what}", lineno + 1));
        let idx: usize = cols[1].parse().map_err(|_| bad("index"))?;
        let coords: Vec<f64> = cols[2..2 + dim]
            .iter()
            .map(|c| c.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("coordinate"))?;
        let v: f64 = cols[dim + 2].parse().map_err(|_| bad("value"))?;
        let (expected, slot, seen) = match cols[0] {
            "interior" if idx < grid.interior_len() => {
                (grid.interior_point(idx), &mut field.interior[idx], &mut seen_i[idx])
            }
            "boundary" if idx < grid.boundary_len() => {
                (grid.boundary_point(idx), &mut field.boundary[idx], &mut seen_b[idx])
            }
            _ => return Err(bad("kind or index")),
        };
        if coords.iter().zip(expected).any(|(a, b)| (a - b).abs() > 1e-12) {
            return Err(bad("coordinates for this grid"));
        }
        *slot = v;
        *seen = true;
    }
    if seen_i.iter().chain(&seen_b).any(|s| !s) {
        return Err(GeometryError::Format("missing rows".into()));
    }
    Ok(field)
}

pub fn write_binary<W: Write>(grid: &Grid, field: &ScalarField, mut out: W) -> Result<(), GeometryError> {
    field.check(grid)?;
    let spec = grid.spec();
    out.write_all(MAGIC)?;
    out.write_all(&(spec.n as u32).to_le_bytes())?;
    out.write_all(&shape_code(spec.shape).to_le_bytes())?;
    out.write_all(&(spec.points_per_axis as u32).to_le_bytes())?;
    out.write_all(&(field.interior.len() as u64).to_le_bytes())?;
    out.write_all(&(field.boundary.len() as u64).to_le_bytes())?;
    for v in field.interior.iter().chain(&field.boundary) {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Header of a binary field dump.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DumpHeader {
    pub n: usize,
    pub shape: Shape,
    pub points_per_axis: usize,
    pub interior: usize,
    pub boundary: usize,
}

pub fn read_binary<R: Read>(mut input: R) -> Result<(DumpHeader, ScalarField), GeometryError> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(GeometryError::Format("bad magic".into()));
    }
    let mut u32buf = [0u8; 4];
    let mut read_u32 = |input: &mut R| -> std::io::Result<u32> {
        input.read_exact(&mut u32buf)?;
        Ok(u32::from_le_bytes(u32buf))
    };
    let n = read_u32(&mut input)? as usize;
    let shape = match read_u32(&mut input)? {
        0 => Shape::Box,
        1 => Shape::Ball,
        s => return Err(GeometryError::Format(format!("unknown shape code {s}"))),
    };
    let points_per_axis = read_u32(&mut input)? as usize;
    let mut u64buf = [0u8; 8];
    input.read_exact(&mut u64buf)?;
    let ni = u64::from_le_bytes(u64buf) as usize;
    input.read_exact(&mut u64buf)?;
    let nb = u64::from_le_bytes(u64buf) as usize;
    let mut read_vec = |len: usize| -> std::io::Result<Vec<f64>> {
        let mut v = Vec::with_capacity(len);
        for _ in 0..len {
            input.read_exact(&mut u64buf)?;
            v.push(f64::from_le_bytes(u64buf));
        }
        Ok(v)
    };
    let interior = read_vec(ni)?;
    let boundary = read_vec(nb)?;
    let header = DumpHeader { n, shape, points_per_axis, interior: ni, boundary: nb };
    Ok((header, ScalarField { interior, boundary }))
}

fn shape_code(shape: Shape) -> u32 {
    match shape {
        Shape::Box => 0,
        Shape::Ball => 1,
    }
}
