//! On-disk formats for [`GridField`].
//!
//! Binary: one line of JSON header terminated by `\n`, followed by the values
//! as little-endian IEEE-754 `f64`, row-major with `t` slowest, then the `x`
//! axes, then the `v` axes.
//!
//! CSV: a first line `# <json header>`, a column header
//! `t,x1..xd,v1..vd,value`, then one row per cell in storage order.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};

use serde::{Deserialize, Serialize};

use super::GridField;
use crate::error::{KgError, Result};

pub const FORMAT_NAME: &str = "kg-gridfield";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub format: String,
    pub version: u32,
    pub d: usize,
    pub bbox_lo: Vec<f64>,
    pub bbox_hi: Vec<f64>,
    pub resolution: Vec<usize>,
    pub layout: String,
    pub byte_order: String,
    pub dtype: String,
}

impl GridHeader {
    pub fn for_field(f: &GridField) -> Self {
        GridHeader {
            format: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
            d: f.dim(),
            bbox_lo: f.lo().to_vec(),
            bbox_hi: f.hi().to_vec(),
            resolution: f.shape().to_vec(),
            layout: "row-major: t, x1..xd, v1..vd".into(),
            byte_order: "little-endian".into(),
            dtype: "f64".into(),
        }
    }

    fn check(&self) -> Result<()> {
        if self.format != FORMAT_NAME || self.version != FORMAT_VERSION {
            return Err(KgError::Format(format!(
                "unsupported grid format {} v{}",
                self.format, self.version
            )));
        }
        Ok(())
    }
}

pub fn write_binary<W: Write>(f: &GridField, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    serde_json::to_writer(&mut out, &GridHeader::for_field(f))?;
    out.write_all(b"\n")?;
    for v in f.values() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(input: R) -> Result<GridField> {
    let mut input = BufReader::new(input);
    let mut line = String::new();
    input.read_line(&mut line)?;
    let header: GridHeader = serde_json::from_str(line.trim_end())?;
    header.check()?;
    let n: usize = header.resolution.iter().product();
    let mut buf = vec![0u8; 8 * n];
    input.read_exact(&mut buf)?;
    let values = buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    GridField::from_values(
        header.d,
        header.bbox_lo,
        header.bbox_hi,
        header.resolution,
        values,
    )
}

pub fn write_csv<W: Write>(f: &GridField, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "# {}", serde_json::to_string(&GridHeader::for_field(f))?)?;
    let d = f.dim();
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=d).map(|k| format!("x{k}")));
    cols.extend((1..=d).map(|k| format!("v{k}")));
    cols.push("value".into());
    writeln!(out, "{}", cols.join(","))?;
    for i in 0..f.len() {
        let z = f.cell_center(i).to_flat();
        for c in &z {
            write!(out, "{c:e},")?;
        }
        writeln!(out, "{:e}", f.values()[i])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<GridField> {
    let mut lines = BufReader::new(input).lines();
    let first = lines
        .next()
        .ok_or_else(|| KgError::Format("empty CSV".into()))??;
    let json = first
        .strip_prefix("# ")
        .ok_or_else(|| KgError::Format("CSV must start with a `# {header}` line".into()))?;
    let header: GridHeader = serde_json::from_str(json)?;
    header.check()?;
    lines.next();
    let mut values = Vec::new();
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let last = line
            .rsplit(',')
            .next()
            .ok_or_else(|| KgError::Format("empty CSV row".into()))?;
        values.push(
            last.parse::<f64>()
                .map_err(|e| KgError::Format(format!("bad value `{last}`: {e}")))?,
        );
    }
    GridField::from_values(
        header.d,
        header.bbox_lo,
        header.bbox_hi,
        header.resolution,
        values,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_field(seed: f64) -> GridField {
        GridField::from_fn(1, vec![-1.0, -2.0, -1.5], vec![0.0, 2.0, 1.5], vec![3, 4, 5], |z| {
            (seed * z.t + z.x[0] * z.v[0]).sin()
        })
        .unwrap()
    }

    #[test]
    fn binary_layout_is_header_then_le_doubles() {
        let f = sample_field(1.0);
        let mut buf = Vec::new();
        write_binary(&f, &mut buf).unwrap();
        let nl = buf.iter().position(|&b| b == b'\n').unwrap();
        assert_eq!(buf.len() - nl - 1, 8 * 60);
        let first = f64::from_le_bytes(buf[nl + 1..nl + 9].try_into().unwrap());
        assert_eq!(first, f.values()[0]);
    }

    #[test]
    fn rejects_foreign_header() {
        let bad = b"{\"format\":\"other\",\"version\":1,\"d\":1,\"bbox_lo\":[0,0,0],\"bbox_hi\":[1,1,1],\"resolution\":[1,1,1],\"layout\":\"\",\"byte_order\":\"\",\"dtype\":\"\"}\n\0\0\0\0\0\0\0\0";
        assert!(matches!(read_binary(&bad[..]), Err(KgError::Format(_))));
    }

    proptest! {
        #[test]
        fn binary_and_csv_round_trip(seed in -3.0f64..3.0) {
            let f = sample_field(seed);
            let mut bin = Vec::new();
            write_binary(&f, &mut bin).unwrap();
            prop_assert_eq!(read_binary(&bin[..]).unwrap(), f.clone());
            let mut csv = Vec::new();
            write_csv(&f, &mut csv).unwrap();
            prop_assert_eq!(read_csv(&csv[..]).unwrap(), f);
        }
    }
}
