//! Morton (Z-order) codes and their K×D bit-matrix view.
//!
//! A code in `X^D_K` is a `D·K`-bit integer. Splitting its zero-padded binary
//! expansion into `K` blocks of `D` bits gives a matrix whose row `r` is block
//! `r` (most significant first) and whose column `d` collects every bit of
//! dimension `d` (X = 0, Y = 1, Z = 2, ...).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `D·K` representable in one machine word.
pub const MAX_BITS: u32 = 63;

/// Dimension count `D` and scaling factor `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CurveParams {
    dim: u32,
    k: u32,
}

impl CurveParams {
    pub fn new(dim: u32, k: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParams { dim, k, reason: "D must be at least 1" });
        }
        if k == 0 {
            return Err(Error::InvalidParams { dim, k, reason: "K must be at least 1" });
        }
        if dim.checked_mul(k).map_or(true, |b| b > MAX_BITS) {
            return Err(Error::InvalidParams { dim, k, reason: "D*K must not exceed 63" });
        }
        Ok(Self { dim, k })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Total bit width `D·K`.
    pub fn bits(&self) -> u32 {
        self.dim * self.k
    }

    /// `|X^D_K| = 2^{D·K}`.
    pub fn cardinality(&self) -> u64 {
        1u64 << self.bits()
    }

    /// Largest member of `X^D_K`.
    pub fn max_value(&self) -> u64 {
        self.cardinality() - 1
    }

    /// Mask selecting every bit of dimension `d` in an encoded value.
    pub fn column_mask(&self, d: usize) -> u64 {
        let d = d as u32;
        debug_assert!(d < self.dim);
        (0..self.k).fold(0u64, |m, r| m | 1u64 << ((self.k - 1 - r) * self.dim + (self.dim - 1 - d)))
    }

    pub fn code(&self, value: u64) -> Result<MortonCode> {
        MortonCode::new(value, *self)
    }
}

impl fmt::Display for CurveParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X^{}_{}", self.dim, self.k)
    }
}

/// A fixed-width bit string, most significant (leftmost) bit first.
///
/// Used for a single dimension's column of a Morton code and for dictionary
/// values, both of which are `K` bits long.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bits {
    value: u64,
    len: u32,
}

impl Bits {
    pub fn new(value: u64, len: u32) -> Self {
        assert!(len <= 64, "bit strings are at most 64 bits long");
        Self { value: value & Self::mask(len), len }
    }

    pub fn zeros(len: u32) -> Self {
        Self::new(0, len)
    }

    pub fn ones(len: u32) -> Self {
        Self::new(u64::MAX, len)
    }

    fn mask(len: u32) -> u64 {
        if len == 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit `i` counted from the left (`i = 0` is the most significant).
    pub fn bit(&self, i: u32) -> bool {
        assert!(i < self.len);
        self.value >> (self.len - 1 - i) & 1 == 1
    }

    /// Drops the `n` leftmost bits.
    pub fn drop_front(&self, n: u32) -> Bits {
        assert!(n <= self.len);
        Bits::new(self.value, self.len - n)
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        assert_eq!(self.len, other.len, "xor of bit strings with different lengths");
        Bits::new(self.value ^ other.value, self.len)
    }

    pub fn not(&self) -> Bits {
        Bits::new(!self.value, self.len)
    }

    pub fn is_all_ones(&self) -> bool {
        self.value == Self::mask(self.len)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > 64 {
            return Err(Error::Parse(format!("bit string longer than 64: {s:?}")));
        }
        let mut value = 0u64;
        for c in s.chars() {
            value = value << 1
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::Parse(format!("not a bit string: {s:?}"))),
                };
        }
        Ok(Bits::new(value, s.len() as u32))
    }
}

/// A member of `X^D_K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MortonCode {
    value: u64,
    params: CurveParams,
}

impl MortonCode {
    pub fn new(value: u64, params: CurveParams) -> Result<Self> {
        if value > params.max_value() {
            return Err(Error::ValueOutOfRange { value, dim: params.dim, k: params.k });
        }
        Ok(Self { value, params })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn params(&self) -> CurveParams {
        self.params
    }

    pub fn to_bit_matrix(&self) -> BitMatrix {
        to_bit_matrix(self)
    }

    pub fn dimension_bits(&self, d: usize) -> Result<Bits> {
        dimension_bits(self, d)
    }
}

/// `K` rows of `D` bits, stored column-wise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    params: CurveParams,
    columns: Vec<Bits>,
}

impl BitMatrix {
    /// Builds a matrix from its columns (one `K`-bit string per dimension).
    pub fn from_columns(params: CurveParams, columns: Vec<Bits>) -> Result<Self> {
        if columns.len() != params.dim as usize {
            return Err(Error::Parse(format!(
                "expected {} columns, got {}",
                params.dim,
                columns.len()
            )));
        }
        if let Some(c) = columns.iter().find(|c| c.len() != params.k) {
            return Err(Error::Parse(format!("column {c} is not {} bits long", params.k)));
        }
        Ok(Self { params, columns })
    }

    /// Builds a matrix from `K` rows of `D` bits each.
    pub fn from_rows(params: CurveParams, rows: &[Vec<bool>]) -> Result<Self> {
        if rows.len() != params.k as usize || rows.iter().any(|r| r.len() != params.dim as usize) {
            return Err(Error::Parse(format!("expected a {}x{} bit matrix", params.k, params.dim)));
        }
        let columns = (0..params.dim as usize)
            .map(|d| {
                let v = rows.iter().fold(0u64, |acc, row| acc << 1 | row[d] as u64);
                Bits::new(v, params.k)
            })
            .collect();
        Ok(Self { params, columns })
    }

    pub fn params(&self) -> CurveParams {
        self.params
    }

    pub fn column(&self, d: usize) -> Bits {
        self.columns[d]
    }

    pub fn columns(&self) -> &[Bits] {
        &self.columns
    }

    /// Bit of dimension `d` at level `r` (`r = 0` is the most significant block).
    pub fn bit(&self, r: usize, d: usize) -> bool {
        self.columns[d].bit(r as u32)
    }

    pub fn row(&self, r: usize) -> Vec<bool> {
        (0..self.params.dim as usize).map(|d| self.bit(r, d)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<bool>> {
        (0..self.params.k as usize).map(|r| self.row(r)).collect()
    }
}

impl fmt::Display for BitMatrix {
    /// Bracketed block form, e.g. `[10][11][11]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            f.write_str("[")?;
            for b in row {
                f.write_str(if b { "1" } else { "0" })?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

pub fn to_bit_matrix(code: &MortonCode) -> BitMatrix {
    let p = code.params;
    let columns = (0..p.dim as usize).map(|d| column_of(p, code.value, d)).collect();
    BitMatrix { params: p, columns }
}

pub fn from_bit_matrix(m: &BitMatrix) -> MortonCode {
    let p = m.params;
    let value = m
        .columns
        .iter()
        .enumerate()
        .fold(0u64, |acc, (d, c)| acc | spread_column(p, c.value(), d));
    MortonCode { value, params: p }
}

pub fn dimension_bits(code: &MortonCode, d: usize) -> Result<Bits> {
    if d >= code.params.dim as usize {
        return Err(Error::InvalidDimension { index: d, dim: code.params.dim });
    }
    Ok(column_of(code.params, code.value, d))
}

/// Gathers the bits of dimension `d` into a `K`-bit string (a software `pext`).
pub(crate) fn column_of(p: CurveParams, value: u64, d: usize) -> Bits {
    let (dim, k) = (p.dim, p.k);
    let mut out = 0u64;
    for r in 0..k {
        let bit = value >> ((k - 1 - r) * dim + (dim - 1 - d as u32)) & 1;
        out = out << 1 | bit;
    }
    Bits::new(out, k)
}

/// Scatters a `K`-bit column back to the positions of dimension `d` (a software `pdep`).
pub(crate) fn spread_column(p: CurveParams, column: u64, d: usize) -> u64 {
    let (dim, k) = (p.dim, p.k);
    let mut out = 0u64;
    for r in 0..k {
        let bit = column >> (k - 1 - r) & 1;
        out |= bit << ((k - 1 - r) * dim + (dim - 1 - d as u32));
    }
    out
}
