//! Binary field snapshots and CSV output.
//!
//! Snapshot layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 6     | magic `KLIFT1` |
//! | 4     | version (u32) |
//! | 8, 8  | N, Nv (u64) |
//! | 8 x 5 | dx, dv, v_min, v_max, time (f64) |
//! | 1     | mass-rescale flag |
//! | 8     | mass scale (f64) |
//! | N Nv 8 | row-major field, cell-major |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::kinetic::{DistributionField, SpatialGrid, VelocityGrid};

pub const SNAPSHOT_MAGIC: &[u8; 6] = b"KLIFT1";
pub const SNAPSHOT_VERSION: u32 = 1;
const HEADER_LEN: usize = 6 + 4 + 16 + 40 + 1 + 8;

fn encode(f: &DistributionField) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + f.values.len() * 8);
    buf.extend_from_slice(SNAPSHOT_MAGIC);
    buf.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(f.n_cells() as u64).to_le_bytes());
    buf.extend_from_slice(&(f.n_velocities() as u64).to_le_bytes());
    for x in [
        f.grid.dx(),
        f.vgrid.dv(),
        f.vgrid.v_min(),
        f.vgrid.v_max(),
        f.time,
    ] {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    buf.push(u8::from(f.mass_scale != 1.0));
    buf.extend_from_slice(&f.mass_scale.to_le_bytes());
    for x in &f.values {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    buf
}

/// Writes the snapshot; a partially written file is removed on error.
pub fn write_snapshot(path: impl AsRef<Path>, f: &DistributionField) -> Result<()> {
    let path = path.as_ref();
    let result = (|| -> std::io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&encode(f))?;
        w.flush()
    })();
    if let Err(e) = result {
        let _ = std::fs::remove_file(path);
        return Err(e.into());
    }
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take<const K: usize>(&mut self) -> [u8; K] {
        let mut out = [0u8; K];
        out.copy_from_slice(&self.bytes[self.pos..self.pos + K]);
        self.pos += K;
        out
    }
    fn u64(&mut self) -> u64 {
        u64::from_le_bytes(self.take())
    }
    fn f64(&mut self) -> f64 {
        f64::from_le_bytes(self.take())
    }
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<DistributionField> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    decode(&bytes).map_err(|msg| Error::Snapshot {
        path: path.to_path_buf(),
        msg,
    })
}

fn decode(bytes: &[u8]) -> std::result::Result<DistributionField, String> {
    if bytes.len() < HEADER_LEN {
        return Err(format!(
            "file too short for a header ({} bytes)",
            bytes.len()
        ));
    }
    if &bytes[..6] != SNAPSHOT_MAGIC {
        return Err("bad magic".into());
    }
    let mut c = Cursor { bytes, pos: 6 };
    let version = u32::from_le_bytes(c.take());
    if version != SNAPSHOT_VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let n = c.u64() as usize;
    let nv = c.u64() as usize;
    let (dx, dv, v_min, v_max, time) = (c.f64(), c.f64(), c.f64(), c.f64(), c.f64());
    let flag = c.take::<1>()[0];
    let mass_scale = c.f64();

    let expected = n
        .checked_mul(nv)
        .and_then(|x| x.checked_mul(8))
        .ok_or("grid size overflows")?;
    if bytes.len() - HEADER_LEN != expected {
        return Err(format!(
            "payload has {} bytes, header promises {expected} ({n} x {nv})",
            bytes.len() - HEADER_LEN
        ));
    }
    if (flag != 0) != (mass_scale != 1.0) {
        return Err(format!(
            "mass-rescale flag {flag} contradicts scale {mass_scale}"
        ));
    }
    if !(dx > 0.0 && dx.is_finite()) || n == 0 {
        return Err(format!("invalid spatial grid: N = {n}, dx = {dx}"));
    }
    let vgrid = VelocityGrid::new(v_min, v_max, nv).map_err(|e| e.to_string())?;
    if (vgrid.dv() - dv).abs() > 1e-12 * dv.abs() {
        return Err(format!(
            "dv = {dv} does not match the bounds ({})",
            vgrid.dv()
        ));
    }
    let values = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    DistributionField::new(
        SpatialGrid::with_spacing(dx, n),
        vgrid,
        values,
        time,
        mass_scale,
    )
    .map_err(|e| e.to_string())
}

/// CSV file with a `#` comment block ahead of the one-line header.
pub struct CsvWriter {
    out: csv::Writer<File>,
    path: PathBuf,
}

impl CsvWriter {
    /// `meta` pairs are echoed as `# key = value` lines.
    pub fn create(
        path: impl AsRef<Path>,
        meta: &[(&str, String)],
        columns: &[&str],
    ) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut file = File::create(&path)?;
        let mut block = String::new();
        for (k, v) in meta {
            block.push_str(&format!("# {k} = {v}\n"));
        }
        file.write_all(block.as_bytes())?;
        let mut out = csv::Writer::from_writer(file);
        out.write_record(columns).map_err(csv_err)?;
        Ok(CsvWriter { out, path })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.out.write_record(fields).map_err(csv_err)
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.out.flush()?;
        Ok(self.path)
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Full-precision text for CSV cells.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}
