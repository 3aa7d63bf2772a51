//! Flat binary cache for coefficient tables, so repeated experiments skip
//! the sieves.
//!
//! Layout (little-endian): magic `ARDT`, format version u32, kind u8
//! (1 = divisor, 2 = hecke), weight u32, limit u64, then the raw arrays.
//! Divisor tables store values (u16) and prefix sums (u64); Hecke tables
//! store exact coefficients as signed 128-bit two's complement (they fit:
//! construction is capped well below the overflow point), normalized values
//! and prefix sums as f64 bits.

use crate::arith::{DivisorTable, HeckeTable};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"ARDT";
const VERSION: u32 = 1;
const KIND_DIVISOR: u8 = 1;
const KIND_HECKE: u8 = 2;

fn write_header(w: &mut impl Write, kind: u8, weight: u32, limit: u64) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[kind])?;
    w.write_all(&weight.to_le_bytes())?;
    w.write_all(&limit.to_le_bytes())?;
    Ok(())
}

fn read_header(r: &mut impl Read, want_kind: u8) -> Result<(u32, u64)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::CacheFormat("bad magic".into()));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != VERSION {
        return Err(Error::CacheFormat(format!("unsupported version {version}")));
    }
    let mut kind = [0u8; 1];
    r.read_exact(&mut kind)?;
    if kind[0] != want_kind {
        return Err(Error::CacheFormat(format!("wrong table kind {}", kind[0])));
    }
    r.read_exact(&mut b4)?;
    let weight = u32::from_le_bytes(b4);
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let limit = u64::from_le_bytes(b8);
    if limit == 0 {
        return Err(Error::CacheFormat("zero limit".into()));
    }
    Ok((weight, limit))
}

pub fn save_divisor_table(table: &DivisorTable, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, KIND_DIVISOR, 0, table.limit())?;
    for &v in &table.values()[1..] {
        w.write_all(&v.to_le_bytes())?;
    }
    for &p in &table.prefix_sums()[1..] {
        w.write_all(&p.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_divisor_table(path: impl AsRef<Path>) -> Result<DivisorTable> {
    let mut r = BufReader::new(File::open(path)?);
    let (_, limit) = read_header(&mut r, KIND_DIVISOR)?;
    let n = limit as usize;
    let mut values = vec![0u16; n + 1];
    let mut b2 = [0u8; 2];
    for v in values[1..].iter_mut() {
        r.read_exact(&mut b2)?;
        *v = u16::from_le_bytes(b2);
    }
    let mut prefix = vec![0u64; n + 1];
    let mut b8 = [0u8; 8];
    for p in prefix[1..].iter_mut() {
        r.read_exact(&mut b8)?;
        *p = u64::from_le_bytes(b8);
    }
    // header/body consistency: prefix increments must reproduce values
    let mut acc = 0u64;
    for i in 1..=n {
        acc += values[i] as u64;
        if prefix[i] != acc {
            return Err(Error::CacheFormat(format!("prefix mismatch at {i}")));
        }
    }
    Ok(DivisorTable::from_parts(limit, values, prefix))
}

pub fn save_hecke_table(table: &HeckeTable, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, KIND_HECKE, table.weight(), table.limit())?;
    for v in &table.exact_values()[1..] {
        let (sign, digits) = v.to_u64_digits();
        let mut lo = 0u128;
        for (i, &d) in digits.iter().enumerate().take(2) {
            lo |= (d as u128) << (64 * i);
        }
        if digits.len() > 2 || lo > i128::MAX as u128 {
            return Err(Error::CacheFormat("coefficient exceeds the 128-bit cache encoding".into()));
        }
        let signed = match sign {
            num_bigint::Sign::Minus => -(lo as i128),
            _ => lo as i128,
        };
        w.write_all(&signed.to_le_bytes())?;
    }
    for &v in &table.normalized_values()[1..] {
        w.write_all(&v.to_le_bytes())?;
    }
    for &v in &table.prefix_values()[1..] {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_hecke_table(path: impl AsRef<Path>) -> Result<HeckeTable> {
    let mut r = BufReader::new(File::open(path)?);
    let (weight, limit) = read_header(&mut r, KIND_HECKE)?;
    if weight != 12 {
        return Err(Error::CacheFormat(format!("unsupported weight {weight}")));
    }
    let n = limit as usize;
    let mut b16 = [0u8; 16];
    let mut exact = Vec::with_capacity(n + 1);
    exact.push(BigInt::from(0));
    for _ in 0..n {
        r.read_exact(&mut b16)?;
        exact.push(BigInt::from(i128::from_le_bytes(b16)));
    }
    let mut b8 = [0u8; 8];
    let mut normalized = vec![0.0f64; n + 1];
    for v in normalized[1..].iter_mut() {
        r.read_exact(&mut b8)?;
        *v = f64::from_le_bytes(b8);
    }
    let mut prefix = vec![0.0f64; n + 1];
    for v in prefix[1..].iter_mut() {
        r.read_exact(&mut b8)?;
        *v = f64::from_le_bytes(b8);
    }
    if exact[1] != BigInt::from(1) {
        return Err(Error::CacheFormat("first coefficient is not 1".into()));
    }
    Ok(HeckeTable::from_parts(weight, limit, exact, normalized, prefix))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{build_divisor_table, build_hecke_table};

    #[test]
    fn divisor_roundtrip() {
        let dir = std::env::temp_dir().join("arithdist-test-div.tbl");
        let t = build_divisor_table(5000).unwrap();
        save_divisor_table(&t, &dir).unwrap();
        let u = load_divisor_table(&dir).unwrap();
        assert_eq!(t.limit(), u.limit());
        assert_eq!(t.values(), u.values());
        assert_eq!(t.prefix_sums(), u.prefix_sums());
        std::fs::remove_file(dir).ok();
    }

    #[test]
    fn hecke_roundtrip() {
        let dir = std::env::temp_dir().join("arithdist-test-hecke.tbl");
        let t = build_hecke_table(12, 2000).unwrap();
        save_hecke_table(&t, &dir).unwrap();
        let u = load_hecke_table(&dir).unwrap();
        assert_eq!(t.limit(), u.limit());
        for n in 1..=2000u64 {
            assert_eq!(t.exact(n), u.exact(n));
            assert_eq!(t.normalized(n).to_bits(), u.normalized(n).to_bits());
            assert_eq!(t.prefix_normalized(n).to_bits(), u.prefix_normalized(n).to_bits());
        }
        std::fs::remove_file(dir).ok();
    }

    #[test]
    fn rejects_garbage() {
        let dir = std::env::temp_dir().join("arithdist-test-garbage.tbl");
        std::fs::write(&dir, b"NOPE0000000000000000000000").unwrap();
        assert!(load_divisor_table(&dir).is_err());
        std::fs::remove_file(dir).ok();
    }

    #[test]
    fn rejects_wrong_kind() {
        let dir = std::env::temp_dir().join("arithdist-test-kind.tbl");
        let t = build_divisor_table(100).unwrap();
        save_divisor_table(&t, &dir).unwrap();
        assert!(load_hecke_table(&dir).is_err());
        std::fs::remove_file(dir).ok();
    }
}
