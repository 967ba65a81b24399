//! On-disk pole tables: CSV keyed by a hash of (a, n_max, algorithm version).

use super::{pole_table, PoleRecord, PoleTable};
use crate::error::{Error, Result};
use num_complex::Complex64;
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Bumped whenever pole values could change.
pub const ALGORITHM_VERSION: &str = "poles-1";
pub const CSV_HEADER: &str = "a,n,re_zeta,im_zeta,re_dzeta_da,im_dzeta_da,residual";

fn io(e: std::io::Error) -> Error {
    Error::PoleTable(format!("cache I/O: {e}"))
}

/// 17 significant digits, enough to round-trip a double.
pub(crate) fn g17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_table_csv(out: &mut impl Write, tables: &[PoleTable]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for t in tables {
        for r in &t.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                g17(r.a),
                r.n,
                g17(r.zeta.re),
                g17(r.zeta.im),
                g17(r.dzeta_da.re),
                g17(r.dzeta_da.im),
                g17(r.residual)
            )?;
        }
    }
    Ok(())
}

/// Parses one table; guess distances are recomputed from the stored poles.
pub fn read_table_csv(text: &str) -> Result<PoleTable> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::PoleTable("bad cache header".into()));
    }
    let mut records = Vec::new();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(Error::PoleTable(format!("bad cache line: {line}")));
        }
        let num = |k: usize| -> Result<f64> {
            f[k].parse::<f64>().map_err(|e| Error::PoleTable(format!("{e}: {line}")))
        };
        let n: i64 = f[1].parse().map_err(|_| Error::PoleTable(format!("bad n: {line}")))?;
        let a = num(0)?;
        let zeta = Complex64::new(num(2)?, num(3)?);
        let guess_distance = if n == 0 {
            0.0
        } else {
            (zeta - super::initial_pole_guess(a, n as u32)?).norm()
        };
        records.push(PoleRecord {
            n,
            a,
            zeta,
            dzeta_da: Complex64::new(num(4)?, num(5)?),
            residual: num(6)?,
            guess_distance,
        });
    }
    let a = records.first().map(|r| r.a).ok_or_else(|| Error::PoleTable("empty cache".into()))?;
    let table = PoleTable { a, n_max: records.len() as u32 - 1, records };
    table.validate()?;
    Ok(table)
}

/// Directory of cached pole tables.
pub struct PoleCache {
    dir: PathBuf,
}

impl PoleCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        PoleCache { dir: dir.into() }
    }

    pub fn key(a: f64, n_max: u32) -> String {
        let mut h = Sha256::new();
        h.update(a.to_bits().to_le_bytes());
        h.update(n_max.to_le_bytes());
        h.update(ALGORITHM_VERSION.as_bytes());
        hex::encode(h.finalize())
    }

    pub fn path(&self, a: f64, n_max: u32) -> PathBuf {
        self.dir.join(format!("{}.csv", Self::key(a, n_max)))
    }

    /// Cached table if present, else computed and stored (write to a temporary file,
    /// then rename).
    pub fn get_or_compute(&self, a: f64, n_max: u32) -> Result<PoleTable> {
        let path = self.path(a, n_max);
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(t) = read_table_csv(&text) {
                if t.a == a && t.n_max == n_max {
                    return Ok(t);
                }
            }
        }
        let table = pole_table(a, n_max)?;
        self.store(&path, &table)?;
        Ok(table)
    }

    fn store(&self, path: &Path, table: &PoleTable) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(io)?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let mut buf = Vec::new();
        write_table_csv(&mut buf, std::slice::from_ref(table)).map_err(io)?;
        fs::write(&tmp, &buf).map_err(io)?;
        fs::rename(&tmp, path).map_err(io)?;
        Ok(())
    }
}
