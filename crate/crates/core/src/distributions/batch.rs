//! Sample batch container and persistence: CSV (decimal text, solver
//! fidelity preserved) and a packed binary format for large f64 runs.

use crate::error::{Error, Result};
use crate::numerics::{Real, Vector};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fidelity {
    F64,
    Precise,
}

/// Provenance metadata carried by every batch.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatchMeta {
    pub n: usize,
    pub beta: f64,
    pub gamma: f64,
    pub seed: u64,
    pub generator: String,
    pub fidelity: Fidelity,
}

/// Batch payload. Statistics batches are row-major f64; solver batches
/// carry full-precision values.
#[derive(Clone, Debug)]
pub enum BatchData {
    F64 {
        ys: Vec<Vec<f64>>,
        zs: Option<Vec<f64>>,
    },
    Precise {
        ys: Vec<Vector>,
        zs: Option<Vec<Real>>,
    },
}

/// A tagged, immutable set of `(y)` or `(y, z)` samples.
#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub meta: BatchMeta,
    pub data: BatchData,
}

const BIN_MAGIC: &[u8; 4] = b"CLWB";
const BIN_VERSION: u32 = 1;

impl SampleBatch {
    pub fn len(&self) -> usize {
        match &self.data {
            BatchData::F64 { ys, .. } => ys.len(),
            BatchData::Precise { ys, .. } => ys.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn has_z(&self) -> bool {
        match &self.data {
            BatchData::F64 { zs, .. } => zs.is_some(),
            BatchData::Precise { zs, .. } => zs.is_some(),
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "n,beta,gamma,seed,generator,fidelity")?;
        let fid = match self.meta.fidelity {
            Fidelity::F64 => "f64",
            Fidelity::Precise => "precise",
        };
        writeln!(
            w,
            "{},{},{},{},{},{}",
            self.meta.n, self.meta.beta, self.meta.gamma, self.meta.seed, self.meta.generator, fid
        )?;
        let mut header: Vec<String> = (1..=self.meta.n).map(|i| format!("y{i}")).collect();
        if self.has_z() {
            header.push("z".into());
        }
        writeln!(w, "{}", header.join(","))?;
        match &self.data {
            BatchData::F64 { ys, zs } => {
                for (i, y) in ys.iter().enumerate() {
                    let mut row: Vec<String> = y.iter().map(|x| format!("{x:.17e}")).collect();
                    if let Some(zs) = zs {
                        row.push(format!("{:.17e}", zs[i]));
                    }
                    writeln!(w, "{}", row.join(","))?;
                }
            }
            BatchData::Precise { ys, zs } => {
                for (i, y) in ys.iter().enumerate() {
                    let mut row: Vec<String> = y.iter().map(|x| x.decimal()).collect();
                    if let Some(zs) = zs {
                        row.push(zs[i].decimal());
                    }
                    writeln!(w, "{}", row.join(","))?;
                }
            }
        }
        Ok(())
    }

    pub fn read_csv(path: &Path, prec_for_precise: u32) -> Result<SampleBatch> {
        let f = std::fs::File::open(path)?;
        let mut lines = BufReader::new(f).lines();
        let _names = lines
            .next()
            .ok_or_else(|| Error::Parse("empty batch csv".into()))??;
        let meta_line = lines
            .next()
            .ok_or_else(|| Error::Parse("batch csv missing metadata row".into()))??;
        let parts: Vec<&str> = meta_line.split(',').collect();
        if parts.len() != 6 {
            return Err(Error::Parse("batch csv metadata row malformed".into()));
        }
        let n: usize = parts[0].parse().map_err(|_| Error::Parse("bad n".into()))?;
        let beta: f64 = parts[1].parse().map_err(|_| Error::Parse("bad beta".into()))?;
        let gamma: f64 = parts[2]
            .parse()
            .map_err(|_| Error::Parse("bad gamma".into()))?;
        let seed: u64 = parts[3].parse().map_err(|_| Error::Parse("bad seed".into()))?;
        let generator = parts[4].to_string();
        let fidelity = match parts[5] {
            "f64" => Fidelity::F64,
            "precise" => Fidelity::Precise,
            other => return Err(Error::Parse(format!("bad fidelity {other:?}"))),
        };
        let cols_line = lines
            .next()
            .ok_or_else(|| Error::Parse("batch csv missing column header".into()))??;
        let has_z = cols_line.split(',').any(|c| c == "z");
        let meta = BatchMeta {
            n,
            beta,
            gamma,
            seed,
            generator,
            fidelity,
        };
        match fidelity {
            Fidelity::F64 => {
                let mut ys = Vec::new();
                let mut zs = if has_z { Some(Vec::new()) } else { None };
                for line in lines {
                    let line = line?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let vals: Vec<f64> = line
                        .split(',')
                        .map(|s| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad value {s:?}"))))
                        .collect::<Result<_>>()?;
                    let expect = n + usize::from(has_z);
                    if vals.len() != expect {
                        return Err(Error::Parse("batch csv row width mismatch".into()));
                    }
                    ys.push(vals[..n].to_vec());
                    if let Some(zs) = zs.as_mut() {
                        zs.push(vals[n]);
                    }
                }
                Ok(SampleBatch {
                    meta,
                    data: BatchData::F64 { ys, zs },
                })
            }
            Fidelity::Precise => {
                let mut ys = Vec::new();
                let mut zs = if has_z { Some(Vec::new()) } else { None };
                for line in lines {
                    let line = line?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let vals: Vec<Real> = line
                        .split(',')
                        .map(|s| Real::parse(s, prec_for_precise))
                        .collect::<Result<_>>()?;
                    let expect = n + usize::from(has_z);
                    if vals.len() != expect {
                        return Err(Error::Parse("batch csv row width mismatch".into()));
                    }
                    ys.push(Vector::from_reals(vals[..n].to_vec()));
                    if let Some(zs) = zs.as_mut() {
                        zs.push(vals[n].clone());
                    }
                }
                Ok(SampleBatch {
                    meta,
                    data: BatchData::Precise { ys, zs },
                })
            }
        }
    }

    /// Packed binary format (f64 batches only): magic, version, metadata
    /// JSON block, then row-major 64-bit floats.
    pub fn write_bin(&self, path: &Path) -> Result<()> {
        let BatchData::F64 { ys, zs } = &self.data else {
            return Err(Error::Parameter(
                "binary batch format holds f64 fidelity only".into(),
            ));
        };
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        w.write_all(BIN_MAGIC)?;
        w.write_all(&BIN_VERSION.to_le_bytes())?;
        let meta = serde_json::json!({
            "meta": self.meta,
            "rows": ys.len(),
            "has_z": zs.is_some(),
        })
        .to_string();
        w.write_all(&(meta.len() as u64).to_le_bytes())?;
        w.write_all(meta.as_bytes())?;
        for (i, y) in ys.iter().enumerate() {
            for x in y {
                w.write_all(&x.to_le_bytes())?;
            }
            if let Some(zs) = zs {
                w.write_all(&zs[i].to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_bin(path: &Path) -> Result<SampleBatch> {
        let mut f = std::fs::File::open(path)?;
        let mut magic = [0u8; 4];
        f.read_exact(&mut magic)?;
        if &magic != BIN_MAGIC {
            return Err(Error::Parse("bad batch magic".into()));
        }
        let mut v = [0u8; 4];
        f.read_exact(&mut v)?;
        if u32::from_le_bytes(v) != BIN_VERSION {
            return Err(Error::Parse("unsupported batch version".into()));
        }
        let mut len8 = [0u8; 8];
        f.read_exact(&mut len8)?;
        let mlen = u64::from_le_bytes(len8) as usize;
        let mut mbytes = vec![0u8; mlen];
        f.read_exact(&mut mbytes)?;
        let header: serde_json::Value = serde_json::from_slice(&mbytes)
            .map_err(|e| Error::Parse(format!("batch metadata json: {e}")))?;
        let meta: BatchMeta = serde_json::from_value(header["meta"].clone())
            .map_err(|e| Error::Parse(format!("batch metadata: {e}")))?;
        let rows = header["rows"]
            .as_u64()
            .ok_or_else(|| Error::Parse("batch rows missing".into()))? as usize;
        let has_z = header["has_z"].as_bool().unwrap_or(false);
        let width = meta.n + usize::from(has_z);
        let mut buf = Vec::new();
        f.read_to_end(&mut buf)?;
        if buf.len() != rows * width * 8 {
            return Err(Error::Parse("batch payload size mismatch".into()));
        }
        let mut ys = Vec::with_capacity(rows);
        let mut zs = if has_z { Some(Vec::with_capacity(rows)) } else { None };
        for r in 0..rows {
            let base = r * width * 8;
            let mut row = Vec::with_capacity(meta.n);
            for c in 0..meta.n {
                let off = base + c * 8;
                row.push(f64::from_le_bytes(buf[off..off + 8].try_into().unwrap()));
            }
            ys.push(row);
            if let Some(zs) = zs.as_mut() {
                let off = base + meta.n * 8;
                zs.push(f64::from_le_bytes(buf[off..off + 8].try_into().unwrap()));
            }
        }
        Ok(SampleBatch {
            meta,
            data: BatchData::F64 { ys, zs },
        })
    }
}
