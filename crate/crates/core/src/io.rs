//! CSV and JSON serialization.
//!
//! Matrices and fields are CSV with `#` header lines:
//!
//! ```text
//! # cloud: <d> <n> <min> <max>     masks and tables (n points per axis)
//! # coercivity: <C' or none>       tables only
//! # interval: <a> <b>              fields and primitives (optional, a = 0 by default)
//! # base: <c_1> [<c_2>]            primitives only
//! ```
//!
//! Reals are written in Rust's shortest round-trip form, so reading back
//! reproduces every value bit for bit.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hulls::geometry::Polytope;
use crate::hulls::PolytopeProductSet;
use crate::lattice::{Cell, DensityTable, Interval, PairMask, PwAffineFn, SlopeCloud, SlopeField};

struct Parsed {
    headers: Vec<(usize, String, String)>,
    rows: Vec<(usize, Vec<String>)>,
}

impl Parsed {
    fn header(&self, key: &str) -> Option<(usize, &str)> {
        self.headers
            .iter()
            .find(|(_, k, _)| k == key)
            .map(|(line, _, v)| (*line, v.as_str()))
    }

    fn require(&self, key: &str) -> Result<(usize, &str)> {
        self.header(key).ok_or_else(|| Error::Format {
            line: 1,
            msg: format!("missing `# {key}:` header"),
        })
    }
}

fn parse(mut input: impl Read) -> Result<Parsed> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut headers = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if let Some(rest) = line.trim_start().strip_prefix('#') {
            if let Some((key, value)) = rest.split_once(':') {
                headers.push((k + 1, key.trim().to_string(), value.trim().to_string()));
            }
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        rows.push((line, record.iter().map(str::to_string).collect()));
    }
    Ok(Parsed { headers, rows })
}

fn real(line: usize, s: &str) -> Result<f64> {
    let x: f64 = s.parse().map_err(|_| Error::Format {
        line,
        msg: format!("`{s}` is not a real number"),
    })?;
    if !x.is_finite() {
        return Err(Error::Format {
            line,
            msg: format!("`{s}` is not finite"),
        });
    }
    Ok(x)
}

fn reals(line: usize, s: &str) -> Result<Vec<f64>> {
    s.split_whitespace().map(|t| real(line, t)).collect()
}

fn cloud_header(cloud: &SlopeCloud) -> Result<String> {
    let g = cloud
        .grid()
        .ok_or_else(|| Error::InvalidInput("only uniform-grid clouds have a file header".into()))?;
    Ok(format!(
        "# cloud: {} {} {} {}\n",
        cloud.dim(),
        g.n,
        g.min,
        g.max
    ))
}

fn read_cloud(p: &Parsed) -> Result<Arc<SlopeCloud>> {
    let (line, v) = p.require("cloud")?;
    let parts: Vec<&str> = v.split_whitespace().collect();
    if parts.len() != 4 {
        return Err(Error::Format {
            line,
            msg: format!("expected `<d> <n> <min> <max>`, found `{v}`"),
        });
    }
    let int = |s: &str| {
        s.parse::<usize>().map_err(|_| Error::Format {
            line,
            msg: format!("`{s}` is not a nonnegative integer"),
        })
    };
    let cloud = SlopeCloud::uniform(
        int(parts[0])?,
        int(parts[1])?,
        real(line, parts[2])?,
        real(line, parts[3])?,
    )?;
    Ok(Arc::new(cloud))
}

fn matrix<T>(p: &Parsed, n: usize, cell: impl Fn(usize, &str) -> Result<T>) -> Result<Vec<T>> {
    if p.rows.len() != n {
        return Err(Error::Format {
            line: p.rows.last().map_or(1, |r| r.0),
            msg: format!("expected {n} rows, found {}", p.rows.len()),
        });
    }
    let mut out = Vec::with_capacity(n * n);
    for (line, row) in &p.rows {
        if row.len() != n {
            return Err(Error::Format {
                line: *line,
                msg: format!("expected {n} columns, found {}", row.len()),
            });
        }
        for s in row {
            out.push(cell(*line, s)?);
        }
    }
    Ok(out)
}

fn write_rows<W: Write>(out: &mut W, rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_mask<W: Write>(m: &PairMask, mut out: W) -> Result<()> {
    out.write_all(cloud_header(m.cloud())?.as_bytes())?;
    let n = m.n();
    write_rows(
        &mut out,
        (0..n).map(|i| {
            m.row(i)
                .iter()
                .map(|&b| if b { "1" } else { "0" }.to_string())
                .collect()
        }),
    )
}

pub fn read_mask(input: impl Read) -> Result<PairMask> {
    let p = parse(input)?;
    let cloud = read_cloud(&p)?;
    let bits = matrix(&p, cloud.len(), |line, s| match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(Error::Format {
            line,
            msg: format!("mask entries are 0 or 1, found `{s}`"),
        }),
    })?;
    PairMask::from_bits(cloud, bits)
}

pub fn write_density<W: Write>(t: &DensityTable, mut out: W) -> Result<()> {
    out.write_all(cloud_header(t.cloud())?.as_bytes())?;
    match t.coercivity() {
        Some(c) => writeln!(out, "# coercivity: {c}")?,
        None => writeln!(out, "# coercivity: none")?,
    }
    let n = t.n();
    write_rows(
        &mut out,
        (0..n).map(|i| (0..n).map(|j| t.get(i, j).to_string()).collect()),
    )
}

pub fn read_density(input: impl Read) -> Result<DensityTable> {
    let p = parse(input)?;
    let cloud = read_cloud(&p)?;
    let values = matrix(&p, cloud.len(), real)?;
    let table = DensityTable::new(cloud, values)?;
    match p.header("coercivity") {
        None => Ok(table),
        Some((_, "none")) => table.with_coercivity(None),
        Some((line, v)) => table.with_coercivity(Some(real(line, v)?)),
    }
}

fn field_rows(s: &SlopeField) -> impl Iterator<Item = Vec<String>> + '_ {
    s.cells().iter().map(|c| {
        std::iter::once(c.right.to_string())
            .chain(c.slope.iter().map(f64::to_string))
            .collect()
    })
}

pub fn write_field<W: Write>(s: &SlopeField, mut out: W) -> Result<()> {
    let i = s.interval();
    writeln!(out, "# interval: {} {}", i.a(), i.b())?;
    write_rows(&mut out, field_rows(s))
}

fn field_from(p: &Parsed) -> Result<SlopeField> {
    let interval = match p.header("interval") {
        Some((line, v)) => {
            let ab = reals(line, v)?;
            if ab.len() != 2 {
                return Err(Error::Format {
                    line,
                    msg: format!("expected `<a> <b>`, found `{v}`"),
                });
            }
            Some((ab[0], ab[1]))
        }
        None => None,
    };
    let mut cells = Vec::with_capacity(p.rows.len());
    for (line, row) in &p.rows {
        if row.len() < 2 {
            return Err(Error::Format {
                line: *line,
                msg: "expected `right_endpoint, slope...`".into(),
            });
        }
        let nums = row
            .iter()
            .map(|s| real(*line, s))
            .collect::<Result<Vec<f64>>>()?;
        cells.push(Cell {
            right: nums[0],
            slope: nums[1..].to_vec(),
        });
    }
    let (a, b) = match (interval, cells.last()) {
        (Some(ab), _) => ab,
        (None, Some(last)) => (0.0, last.right),
        (None, None) => {
            return Err(Error::Format {
                line: 1,
                msg: "slope field has no cells".into(),
            })
        }
    };
    SlopeField::new(Interval::new(a, b)?, cells)
}

pub fn read_field(input: impl Read) -> Result<SlopeField> {
    field_from(&parse(input)?)
}

pub fn write_pw_affine<W: Write>(u: &PwAffineFn, mut out: W) -> Result<()> {
    let base: Vec<String> = u.base().iter().map(f64::to_string).collect();
    writeln!(out, "# base: {}", base.join(" "))?;
    write_field(u.derivative(), out)
}

pub fn read_pw_affine(input: impl Read) -> Result<PwAffineFn> {
    let p = parse(input)?;
    let (line, v) = p.require("base")?;
    let base = reals(line, v)?;
    PwAffineFn::new(base, field_from(&p)?)
}

/// JSON: the factor polytopes as a list of vertex arrays.
pub fn write_product_set<W: Write>(s: &PolytopeProductSet, out: W) -> Result<()> {
    serde_json::to_writer(out, s.factors())?;
    Ok(())
}

pub fn read_product_set(input: impl Read, cloud: Arc<SlopeCloud>) -> Result<PolytopeProductSet> {
    let factors: Vec<Polytope> = serde_json::from_reader(input)?;
    PolytopeProductSet::new(cloud, factors)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<W: Write, T: serde::Serialize>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(input: impl Read) -> Result<T> {
    Ok(serde_json::from_reader(input)?)
}
