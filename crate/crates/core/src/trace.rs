//! On-disk chain traces.
//!
//! Binary layout, all integers and floats little-endian:
//!
//! ```text
//! b"FSMCTRC1"                 magic
//! u64 m, u64 n, u64 seed
//! u64 len, len bytes          kernel descriptor, UTF-8 JSON
//! m columns of n+1 f64        coordinate i over steps 0..=n
//! 1 column of n+1 f64         accept flag (0/1); entry 0 is 0
//! ```

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::kernel::{ChainTrace, KernelDescriptor};
use crate::measure::StateVector;

pub const MAGIC: &[u8; 8] = b"FSMCTRC1";

fn put_u64(w: &mut impl Write, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn get_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn get_f64(r: &mut impl Read) -> Result<f64> {
    Ok(f64::from_bits(get_u64(r)?))
}

pub fn write_binary(trace: &ChainTrace, w: &mut impl Write) -> Result<()> {
    let m = trace.dim();
    let n = trace.steps();
    w.write_all(MAGIC)?;
    put_u64(w, m as u64)?;
    put_u64(w, n as u64)?;
    put_u64(w, trace.seed)?;
    let json = serde_json::to_vec(&trace.kernel)?;
    put_u64(w, json.len() as u64)?;
    w.write_all(&json)?;
    for i in 0..m {
        for s in &trace.states {
            w.write_all(&s[i].to_le_bytes())?;
        }
    }
    w.write_all(&0f64.to_le_bytes())?;
    for &a in &trace.accept_flags {
        w.write_all(&f64::from(u8::from(a)).to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary(r: &mut impl Read) -> Result<ChainTrace> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("not a trace file (bad magic)".into()));
    }
    let m = get_u64(r)? as usize;
    let n = get_u64(r)? as usize;
    let seed = get_u64(r)?;
    let len = get_u64(r)? as usize;
    let mut json = vec![0u8; len];
    r.read_exact(&mut json)?;
    let kernel: KernelDescriptor = serde_json::from_slice(&json)?;
    let mut states = vec![StateVector::zeros(m); n + 1];
    for i in 0..m {
        for s in states.iter_mut() {
            s[i] = get_f64(r)?;
        }
    }
    get_f64(r)?;
    let accept_flags = (0..n)
        .map(|_| match get_f64(r)? {
            v if v == 0.0 => Ok(false),
            v if v == 1.0 => Ok(true),
            v => Err(Error::Format(format!("accept flag {v} is neither 0 nor 1"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChainTrace {
        states,
        accept_flags,
        seed,
        kernel,
    })
}

/// One row per step: `step,accept,x_1,…,x_m`.
pub fn write_csv(trace: &ChainTrace, w: &mut impl Write) -> Result<()> {
    write!(w, "step,accept")?;
    for i in 1..=trace.dim() {
        write!(w, ",x_{i}")?;
    }
    writeln!(w)?;
    for (k, s) in trace.states.iter().enumerate() {
        let acc = if k == 0 { 0 } else { u8::from(trace.accept_flags[k - 1]) };
        write!(w, "{k},{acc}")?;
        for v in s.iter() {
            write!(w, ",{v:e}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// One row per step: `step,accept,<name>` with `f` applied to each state.
pub fn write_csv_functional<F>(trace: &ChainTrace, name: &str, f: F, w: &mut impl Write) -> Result<()>
where
    F: Fn(&[f64]) -> f64,
{
    writeln!(w, "step,accept,{name}")?;
    for (k, s) in trace.states.iter().enumerate() {
        let acc = if k == 0 { 0 } else { u8::from(trace.accept_flags[k - 1]) };
        writeln!(w, "{k},{acc},{:e}", f(s))?;
    }
    Ok(())
}

/// Reads a full-state CSV written by [`write_csv`]. The kernel descriptor is
/// not part of the CSV and must be supplied.
pub fn read_csv(r: &mut impl BufRead, kernel: KernelDescriptor, seed: u64) -> Result<ChainTrace> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| Error::Format("empty CSV".into()))??;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 2 || cols[0] != "step" || cols[1] != "accept" {
        return Err(Error::Format(format!("unexpected header {header:?}")));
    }
    let m = cols.len() - 2;
    let mut states = Vec::new();
    let mut accept_flags = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != m + 2 {
            return Err(Error::Format(format!("row {k} has {} fields, expected {}", fields.len(), m + 2)));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Format(format!("row {k}: {e}")));
        if k > 0 {
            accept_flags.push(fields[1] == "1");
        }
        states.push(StateVector(fields[2..].iter().map(|s| parse(s)).collect::<Result<_>>()?));
    }
    if states.is_empty() {
        return Err(Error::Format("CSV has no rows".into()));
    }
    Ok(ChainTrace {
        states,
        accept_flags,
        seed,
        kernel,
    })
}
