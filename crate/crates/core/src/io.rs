//! Dataset and cover-solution files.
//!
//! Datasets are CSV with a `label,f0,f1,...` header, or a little-endian
//! binary layout: the magic `MFCD`, `u32` point count, `u32` dimension, one
//! `u32` label per point, then the features row-major as `f64`. Paths ending
//! in `.bin` use the binary layout. Cover solutions are TOML.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::covering::CoverSolution;
use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::metric::PointSet;

pub const BINARY_MAGIC: &[u8; 4] = b"MFCD";

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Write `ds` as CSV. Features use the shortest representation that parses
/// back to the same `f64`.
pub fn write_csv<W: Write>(ds: &LabeledDataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["label".to_string()];
    header.extend((0..ds.dim()).map(|j| format!("f{j}")));
    w.write_record(&header).map_err(csv_io)?;
    let mut record = Vec::with_capacity(ds.dim() + 1);
    for (i, x) in ds.points().iter().enumerate() {
        record.clear();
        record.push(ds.label(i).to_string());
        record.extend(x.iter().map(|v| format!("{v:?}")));
        w.write_record(&record).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => parse_err(line, format!("{other:?}")),
    }
}

/// Parse a CSV dataset. Errors carry the 1-based line number.
pub fn read_csv<R: Read>(input: R) -> Result<LabeledDataset> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut records = r.records();
    let header = records
        .next()
        .ok_or_else(|| parse_err(1, "missing header"))?
        .map_err(csv_io)?;
    if header.get(0) != Some("label") || header.len() < 2 {
        return Err(parse_err(1, "header must be `label,f0,f1,...`"));
    }
    let dim = header.len() - 1;
    let mut labels = Vec::new();
    let mut coords = Vec::new();
    for rec in records {
        let rec = rec.map_err(csv_io)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != dim + 1 {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", dim + 1, rec.len()),
            ));
        }
        let label = rec[0]
            .parse::<usize>()
            .map_err(|_| parse_err(line, format!("label `{}` is not a non-negative integer", &rec[0])))?;
        labels.push(label);
        for field in rec.iter().skip(1) {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(line, format!("`{field}` is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("`{field}` is not finite")));
            }
            coords.push(v);
        }
    }
    if labels.is_empty() {
        return Err(parse_err(2, "no data rows"));
    }
    LabeledDataset::new(PointSet::from_flat(dim, coords)?, labels)
}

pub fn write_binary<W: Write>(ds: &LabeledDataset, mut out: W) -> Result<()> {
    let to_u32 = |v: usize, what: &str| {
        u32::try_from(v)
            .map_err(|_| Error::InvalidConfig(format!("{what} {v} does not fit the binary format")))
    };
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&to_u32(ds.len(), "point count")?.to_le_bytes())?;
    out.write_all(&to_u32(ds.dim(), "dimension")?.to_le_bytes())?;
    for &l in ds.labels() {
        out.write_all(&to_u32(l, "label")?.to_le_bytes())?;
    }
    for v in ds.points().as_flat() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<LabeledDataset> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let bad = |m: &str| Error::InvalidDataset(format!("binary dataset: {m}"));
    if bytes.len() < 12 || &bytes[..4] != BINARY_MAGIC {
        return Err(bad("missing magic header"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
    let (n, dim) = (u32_at(4), u32_at(8));
    let expected = n
        .checked_mul(dim)
        .and_then(|f| f.checked_mul(8))
        .and_then(|f| f.checked_add(12 + 4 * n))
        .ok_or_else(|| bad("sizes overflow"))?;
    if bytes.len() != expected {
        return Err(bad(&format!("expected {expected} bytes, found {}", bytes.len())));
    }
    let labels = (0..n).map(|i| u32_at(12 + 4 * i)).collect();
    let start = 12 + 4 * n;
    let coords = bytes[start..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    LabeledDataset::new(PointSet::from_flat(dim, coords)?, labels)
}

fn is_binary(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("bin"))
}

/// Load a dataset, choosing the format from the extension.
pub fn read_dataset(path: &Path) -> Result<LabeledDataset> {
    let file = fs::File::open(path)?;
    if is_binary(path) {
        read_binary(std::io::BufReader::new(file))
    } else {
        read_csv(std::io::BufReader::new(file))
    }
}

pub fn write_dataset(path: &Path, ds: &LabeledDataset) -> Result<()> {
    let file = std::io::BufWriter::new(fs::File::create(path)?);
    if is_binary(path) {
        write_binary(ds, file)
    } else {
        write_csv(ds, file)
    }
}

pub fn cover_to_string(sol: &CoverSolution) -> Result<String> {
    toml::to_string(sol).map_err(|e| Error::InvalidConfig(format!("cannot serialise cover: {e}")))
}

pub fn cover_from_str(text: &str) -> Result<CoverSolution> {
    toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(0, |s| {
            text[..s.start.min(text.len())].matches('\n').count() as u64 + 1
        });
        parse_err(line, e.message().to_string())
    })
}

pub fn write_cover(path: &Path, sol: &CoverSolution) -> Result<()> {
    fs::write(path, cover_to_string(sol)?)?;
    Ok(())
}

pub fn read_cover(path: &Path) -> Result<CoverSolution> {
    cover_from_str(&fs::read_to_string(path)?)
}
