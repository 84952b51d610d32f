//! The equivalent-position map `φ^D_{(S,B)}` between scaling factors.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{psi, Catalog, Subset};
use crate::error::{Error, Result};
use crate::morton::MAX_BITS;

/// `Ω = Σ_{j=0}^{diff} 2^{D·j}`: the bit pattern "D−1 zeros then a one",
/// repeated `diff + 1` times.
pub fn omega(dim: u32, diff: u32) -> Result<u64> {
    let width = (diff as u64 + 1) * dim as u64;
    if dim == 0 || width > MAX_BITS as u64 {
        return Err(Error::Overflow("omega"));
    }
    Ok((0..=diff).fold(0u64, |acc, j| acc | 1u64 << (dim * j)))
}

/// Dimension, source and destination scaling factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiParams {
    dim: u32,
    source: u32,
    dest: u32,
}

impl PhiParams {
    pub fn new(dim: u32, source: u32, dest: u32) -> Result<Self> {
        if dim == 0 || source == 0 {
            return Err(Error::InvalidPhiParams("D and S must be at least 1".into()));
        }
        if source > dest {
            return Err(Error::InvalidPhiParams(format!("S={source} exceeds B={dest}")));
        }
        if dim as u64 * dest as u64 > MAX_BITS as u64 {
            return Err(Error::InvalidPhiParams(format!("D·B = {} exceeds {MAX_BITS} bits", dim * dest)));
        }
        Ok(Self { dim, source, dest })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn source(&self) -> u32 {
        self.source
    }

    pub fn dest(&self) -> u32 {
        self.dest
    }

    pub fn omega(&self) -> u64 {
        omega(self.dim, self.dest - self.source).expect("validated in new")
    }
}

/// `φ(x) = 2^{D(B−S+1)} ⌊x / 2^D⌋ + Ω (x mod 2^D)`.
pub fn phi(x: u64, params: PhiParams) -> Result<u64> {
    let d = params.dim;
    if x >> (d * params.source) != 0 {
        return Err(Error::ValueOutOfRange { value: x, dim: d, k: params.source });
    }
    let shift = d * (params.dest - params.source + 1);
    let low = x & ((1u64 << d) - 1);
    Ok(((x >> d) << shift) + params.omega() * low)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappedSubset {
    /// `φ` of each element, in the order of the input.
    pub image: Vec<u64>,
    pub source_sum: u128,
    pub image_sum: u128,
    /// `Ψ^D_B · |T| / 2^D`.
    pub expected_sum: u128,
}

impl MappedSubset {
    pub fn sum_holds(&self) -> bool {
        self.image_sum == self.expected_sum
    }
}

/// Applies `φ` elementwise and checks the image sum against `Ψ^D_B · |T| / 2^D`.
pub fn map_subset(elements: &[u64], params: PhiParams) -> Result<MappedSubset> {
    let image = elements.iter().map(|&x| phi(x, params)).collect::<Result<Vec<_>>>()?;
    let unit = 1u128 << params.dim;
    let expected_sum = psi(params.dim, params.dest)? as u128 * elements.len() as u128 / unit;
    Ok(MappedSubset {
        source_sum: elements.iter().map(|&e| e as u128).sum(),
        image_sum: image.iter().map(|&e| e as u128).sum(),
        image,
        expected_sum,
    })
}

/// Valid/total counts for one subset size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    /// `None` when the destination catalog was not available.
    pub valid: Option<usize>,
    pub total: usize,
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.valid {
            Some(v) => write!(f, "{v}/{}", self.total),
            None => write!(f, "?/{}", self.total),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetImage {
    pub size: usize,
    pub first: u64,
    pub image_sum: u128,
    pub expected_sum: u128,
    pub valid: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub params: PhiParams,
    pub fractions: BTreeMap<usize, Fraction>,
    pub subsets: Vec<SubsetImage>,
}

impl ValidityReport {
    pub fn sum_failures(&self) -> usize {
        self.subsets.iter().filter(|s| s.image_sum != s.expected_sum).count()
    }

    pub fn evaluated(&self) -> bool {
        self.fractions.values().all(|f| f.valid.is_some())
    }

    pub fn fraction(&self, size: usize) -> Option<Fraction> {
        self.fractions.get(&size).copied()
    }
}

/// Maps every subset of `source` through `φ` and counts, per size, how many
/// images are exactly the element set of a subset of `dest`. Without a
/// destination catalog only the sum law is checked.
pub fn validity_fractions(params: PhiParams, source: &Catalog, dest: Option<&Catalog>) -> Result<ValidityReport> {
    let sp = source.params();
    if sp.dim() != params.dim || sp.k() != params.source {
        return Err(Error::InvalidPhiParams(format!("source catalog is {sp}, expected S={}", params.source)));
    }
    if let Some(d) = dest {
        if d.params().dim() != params.dim || d.params().k() != params.dest {
            return Err(Error::InvalidPhiParams(format!("destination catalog is {}, expected B={}", d.params(), params.dest)));
        }
    }
    let subsets: Vec<SubsetImage> = source
        .subsets()
        .par_iter()
        .map(|t| image_of(t, params, dest))
        .collect::<Result<_>>()?;
    let mut fractions: BTreeMap<usize, Fraction> = BTreeMap::new();
    for s in &subsets {
        let f = fractions
            .entry(s.size)
            .or_insert(Fraction { valid: dest.map(|_| 0), total: 0 });
        f.total += 1;
        if let (Some(v), Some(true)) = (f.valid.as_mut(), s.valid) {
            *v += 1;
        }
    }
    Ok(ValidityReport { params, fractions, subsets })
}

fn image_of(t: &Subset, params: PhiParams, dest: Option<&Catalog>) -> Result<SubsetImage> {
    let mut mapped = map_subset(&t.elements, params)?;
    // φ is increasing, so the image of an ascending list is ascending
    debug_assert!(mapped.image.windows(2).all(|w| w[0] < w[1]));
    let valid = dest.map(|c| c.is_subset(&mapped.image));
    mapped.image.clear();
    Ok(SubsetImage {
        size: t.size(),
        first: t.elements[0],
        image_sum: mapped.image_sum,
        expected_sum: mapped.expected_sum,
        valid,
    })
}

/// A value where `φ(S→M)` followed by `φ(M→B)` differs from `φ(S→B)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionMismatch {
    pub x: u64,
    pub mid: u32,
    pub composed: u64,
    pub direct: u64,
}

/// Compares two-step and direct maps for every `x ∈ X^D_S` and every
/// intermediate `M` in `S..=B`.
pub fn composition_mismatches(params: PhiParams) -> Result<Vec<CompositionMismatch>> {
    let (d, s, b) = (params.dim, params.source, params.dest);
    if d * s > 20 {
        return Err(Error::EnumerationTooLarge { bits: d * s, cap: 20 });
    }
    let mut out = Vec::new();
    for mid in s..=b {
        let first = PhiParams::new(d, s, mid)?;
        let second = PhiParams::new(d, mid, b)?;
        for x in 0..(1u64 << (d * s)) {
            let composed = phi(phi(x, first)?, second)?;
            let direct = phi(x, params)?;
            if composed != direct {
                out.push(CompositionMismatch { x, mid, composed, direct });
            }
        }
    }
    Ok(out)
}
