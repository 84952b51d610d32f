//! Enumeration of `X^D_K`, grouping by projected radius, and the summation
//! laws on the resulting subsets.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morton::CurveParams;
use crate::projection::radius_of_value;

/// Largest `D·K` accepted by [`enumerate`].
pub const ENUMERATION_CAP_BITS: u32 = 24;

pub const DEFAULT_SPLIT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_TIGHT_TOLERANCE: f64 = 1e-12;

/// `Ψ^D_K = 2^{D(K+1)-1} - 2^{D-1}`.
pub fn psi(dim: u32, k: u32) -> Result<u64> {
    let e = dim
        .checked_mul(k + 1)
        .and_then(|x| x.checked_sub(1))
        .filter(|&e| e < 64 && dim >= 1)
        .ok_or(Error::Overflow("psi"))?;
    Ok((1u64 << e) - (1u64 << (dim - 1)))
}

/// `Υ^D_K = 2^{D(K-1)}`.
pub fn upsilon(dim: u32, k: u32) -> Result<u64> {
    let e = k
        .checked_sub(1)
        .and_then(|x| x.checked_mul(dim))
        .filter(|&e| e < 64)
        .ok_or(Error::Overflow("upsilon"))?;
    Ok(1u64 << e)
}

/// Checks `S(X^D_K) = (2^{DK} - 1) 2^{DK} / 2 = Ψ^D_K · Υ^D_K` in exact
/// integer arithmetic.
pub fn total_sum_check(dim: u32, k: u32) -> Result<bool> {
    let bits = dim.checked_mul(k).filter(|&b| b <= 63).ok_or(Error::Overflow("total sum"))?;
    let n = 1u128 << bits;
    let total = (n - 1) * n / 2;
    let product = (psi(dim, k)? as u128)
        .checked_mul(upsilon(dim, k)? as u128)
        .ok_or(Error::Overflow("total sum"))?;
    Ok(total == product)
}

/// How codes are grouped into subsets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Grouping {
    /// Codes share a subset iff their computed radii are bit-identical.
    Exact,
    /// Sorted radii are split wherever the gap exceeds `split`; any gap in
    /// `(tight, split]` is rejected as ambiguous.
    Tolerance { split: f64, tight: f64 },
}

impl Grouping {
    pub fn tolerance(split: f64, tight: f64) -> Result<Self> {
        if !(split > tight && tight >= 0.0) {
            return Err(Error::InvalidTolerance { split, tight });
        }
        Ok(Grouping::Tolerance { split, tight })
    }

    /// The numeric tolerance recorded in catalog files (0 for exact grouping).
    pub fn split_tolerance(&self) -> f64 {
        match self {
            Grouping::Exact => 0.0,
            Grouping::Tolerance { split, .. } => *split,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Grouping::Exact => "exact",
            Grouping::Tolerance { .. } => "tolerance",
        }
    }
}

impl Default for Grouping {
    fn default() -> Self {
        Grouping::Exact
    }
}

/// Codes of `X^D_K` sharing one projected radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subset {
    pub radius: f64,
    /// Ascending.
    pub elements: Vec<u64>,
}

impl Subset {
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, value: u64) -> bool {
        self.elements.binary_search(&value).is_ok()
    }

    pub fn sum(&self) -> u128 {
        self.elements.iter().map(|&e| e as u128).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub grouping: Grouping,
    pub codes: u64,
    /// Smallest gap between the radii of consecutive subsets.
    pub min_gap: Option<f64>,
    /// Largest radius spread inside a single subset.
    pub max_spread: f64,
}

/// Every code of `X^D_K`, partitioned into subsets sorted by radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    params: CurveParams,
    subsets: Vec<Subset>,
    provenance: Provenance,
    /// `owner[v]` is the index of the subset holding `v`.
    owner: Vec<u32>,
}

impl Catalog {
    pub fn params(&self) -> CurveParams {
        self.params
    }

    pub fn subsets(&self) -> &[Subset] {
        &self.subsets
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn subset_of(&self, value: u64) -> Option<&Subset> {
        self.owner.get(value as usize).map(|&i| &self.subsets[i as usize])
    }

    pub fn subset_index_of(&self, value: u64) -> Option<usize> {
        self.owner.get(value as usize).map(|&i| i as usize)
    }

    /// Whether `elements` (ascending) is exactly the element set of one subset.
    pub fn is_subset(&self, elements: &[u64]) -> bool {
        match elements.first().and_then(|&e| self.subset_of(e)) {
            Some(s) => s.elements == elements,
            None => false,
        }
    }

    /// The subset whose radius is closest to `r`.
    pub fn nearest_radius(&self, r: f64) -> Option<&Subset> {
        let i = self.subsets.partition_point(|s| s.radius < r);
        let candidates = [i.checked_sub(1), Some(i)];
        candidates
            .into_iter()
            .flatten()
            .filter_map(|j| self.subsets.get(j))
            .min_by(|a, b| (a.radius - r).abs().total_cmp(&(b.radius - r).abs()))
    }

    /// Rebuilds a catalog from stored subsets, checking that they partition `X^D_K`.
    pub fn from_parts(params: CurveParams, grouping: Grouping, mut subsets: Vec<Subset>) -> Result<Self> {
        if params.bits() > ENUMERATION_CAP_BITS {
            return Err(Error::EnumerationTooLarge { bits: params.bits(), cap: ENUMERATION_CAP_BITS });
        }
        subsets.sort_by(|a, b| a.radius.total_cmp(&b.radius).then(a.elements.cmp(&b.elements)));
        let n = params.cardinality() as usize;
        let mut owner = vec![u32::MAX; n];
        for (i, s) in subsets.iter().enumerate() {
            if s.elements.is_empty() || s.elements.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Parse("subset elements must be non-empty and ascending".into()));
            }
            for &e in &s.elements {
                let slot = owner
                    .get_mut(e as usize)
                    .ok_or(Error::ValueOutOfRange { value: e, dim: params.dim(), k: params.k() })?;
                if *slot != u32::MAX {
                    return Err(Error::Parse(format!("value {e} appears in two subsets")));
                }
                *slot = i as u32;
            }
        }
        if let Some(missing) = owner.iter().position(|&o| o == u32::MAX) {
            return Err(Error::Parse(format!("value {missing} is not covered by any subset")));
        }
        let min_gap = subsets
            .windows(2)
            .map(|w| w[1].radius - w[0].radius)
            .min_by(|a, b| a.total_cmp(b));
        let provenance = Provenance { grouping, codes: n as u64, min_gap, max_spread: 0.0 };
        Ok(Self { params, subsets, provenance, owner })
    }
}

/// Projects every code of `X^D_K` and groups the codes into subsets.
///
/// Projection runs in parallel; the sort and split are a single-threaded
/// reduction over `(radius, value)` pairs, so the result does not depend on
/// the thread count.
pub fn enumerate(params: CurveParams, grouping: Grouping) -> Result<Catalog> {
    if params.bits() > ENUMERATION_CAP_BITS {
        return Err(Error::EnumerationTooLarge { bits: params.bits(), cap: ENUMERATION_CAP_BITS });
    }
    if let Grouping::Tolerance { split, tight } = grouping {
        Grouping::tolerance(split, tight)?;
    }
    let n = params.cardinality();
    let mut pairs: Vec<(f64, u64)> = (0..n)
        .into_par_iter()
        .map(|v| (radius_of_value(params, v), v))
        .collect();
    pairs.par_sort_unstable_by(|a, b| match a.0.total_cmp(&b.0) {
        Ordering::Equal => a.1.cmp(&b.1),
        o => o,
    });

    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = 0usize;
    let mut max_spread = 0.0f64;
    for i in 1..pairs.len() {
        let gap = pairs[i].0 - pairs[i - 1].0;
        let split = match grouping {
            Grouping::Exact => pairs[i].0.to_bits() != pairs[i - 1].0.to_bits(),
            Grouping::Tolerance { split, tight } => {
                if gap > tight && gap <= split {
                    return Err(Error::ToleranceAmbiguity {
                        gap,
                        lower: pairs[i - 1].0,
                        upper: pairs[i].0,
                    });
                }
                gap > split
            }
        };
        if split {
            groups.push((start, i));
            start = i;
        }
    }
    groups.push((start, pairs.len()));

    let mut subsets: Vec<Subset> = groups
        .iter()
        .map(|&(a, b)| {
            let slice = &pairs[a..b];
            max_spread = max_spread.max(slice[slice.len() - 1].0 - slice[0].0);
            let mut elements: Vec<u64> = slice.iter().map(|p| p.1).collect();
            elements.sort_unstable();
            Subset { radius: slice[0].0, elements }
        })
        .collect();
    subsets.sort_by(|a, b| a.radius.total_cmp(&b.radius).then(a.elements.cmp(&b.elements)));

    let mut owner = vec![0u32; n as usize];
    for (i, s) in subsets.iter().enumerate() {
        for &e in &s.elements {
            owner[e as usize] = i as u32;
        }
    }
    let min_gap = subsets
        .windows(2)
        .map(|w| w[1].radius - w[0].radius)
        .min_by(|a, b| a.total_cmp(b));
    let provenance = Provenance { grouping, codes: n, min_gap, max_spread };
    Ok(Catalog { params, subsets, provenance, owner })
}

/// Number of subsets of each size.
pub fn size_histogram(catalog: &Catalog) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for s in catalog.subsets() {
        *h.entry(s.size()).or_insert(0) += 1;
    }
    h
}

/// Subset sizes observed at desk scale; anything else is surfaced as a warning.
pub fn known_sizes(dim: u32) -> Option<&'static [usize]> {
    match dim {
        2 => Some(&[4, 8]),
        3 => Some(&[8, 16, 24, 32, 48]),
        _ => None,
    }
}

/// Sizes present in the catalog that were never observed before.
pub fn unexpected_sizes(catalog: &Catalog) -> Vec<usize> {
    match known_sizes(catalog.params().dim()) {
        Some(known) => size_histogram(catalog).into_keys().filter(|s| !known.contains(s)).collect(),
        None => Vec::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetSumCheck {
    pub size: usize,
    pub first: u64,
    pub sum: u128,
    pub expected: u128,
    pub size_multiple_of_2d: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumReport {
    pub dim: u32,
    pub k: u32,
    pub psi: u64,
    pub upsilon: u64,
    pub checks: Vec<SubsetSumCheck>,
    /// `Σ_T |T| / 2^D`.
    pub counted: u64,
}

impl SumReport {
    pub fn failures(&self) -> impl Iterator<Item = &SubsetSumCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.failures().next().is_none() && self.counted == self.upsilon
    }

    /// Sum per subset size, when all subsets of that size agree.
    pub fn sums_by_size(&self) -> BTreeMap<usize, Option<u128>> {
        let mut out: BTreeMap<usize, Option<u128>> = BTreeMap::new();
        for c in &self.checks {
            out.entry(c.size)
                .and_modify(|s| {
                    if *s != Some(c.sum) {
                        *s = None
                    }
                })
                .or_insert(Some(c.sum));
        }
        out
    }
}

/// Checks `S(T) = Ψ^D_K · |T| / 2^D` for every subset, and `Σ |T|/2^D = Υ^D_K`.
pub fn verify_sums(catalog: &Catalog) -> Result<SumReport> {
    let p = catalog.params();
    let psi = psi(p.dim(), p.k())?;
    let upsilon = upsilon(p.dim(), p.k())?;
    let unit = 1usize << p.dim();
    let checks: Vec<SubsetSumCheck> = catalog
        .subsets()
        .iter()
        .map(|s| {
            let sum = s.sum();
            let expected = psi as u128 * s.size() as u128 / unit as u128;
            let size_multiple_of_2d = s.size() % unit == 0;
            SubsetSumCheck {
                size: s.size(),
                first: s.elements[0],
                sum,
                expected,
                size_multiple_of_2d,
                passed: size_multiple_of_2d && sum == expected,
            }
        })
        .collect();
    let counted = catalog.subsets().iter().map(|s| (s.size() / unit) as u64).sum();
    Ok(SumReport { dim: p.dim(), k: p.k(), psi, upsilon, checks, counted })
}

/// A size whose subset count dropped when `K` grew by one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotonicityFlag {
    pub size: usize,
    pub k: u32,
    pub count_at_k: usize,
    pub count_at_next: usize,
}

/// Compares per-size subset counts between consecutive scaling factors.
/// Catalogs must share `D` and be ordered by ascending `K`.
pub fn monotonicity_flags(catalogs: &[&Catalog]) -> Vec<MonotonicityFlag> {
    let mut flags = Vec::new();
    for pair in catalogs.windows(2) {
        let (a, b) = (size_histogram(pair[0]), size_histogram(pair[1]));
        for (&size, &count) in &a {
            let next = b.get(&size).copied().unwrap_or(0);
            if next < count {
                flags.push(MonotonicityFlag {
                    size,
                    k: pair[0].params().k(),
                    count_at_k: count,
                    count_at_next: next,
                });
            }
        }
    }
    flags
}

/// Formats a radius with 17 significant digits in positional notation.
pub fn format_radius(r: f64) -> String {
    if r == 0.0 || !r.is_finite() {
        return format!("{r:?}");
    }
    let exponent = r.abs().log10().floor() as i32;
    let decimals = (16 - exponent).max(0) as usize;
    let s = format!("{r:.decimals$}");
    // log10 can be off by one right at a power of ten
    let digits = s.chars().filter(|c| c.is_ascii_digit()).collect::<String>();
    let significant = digits.trim_start_matches('0').len();
    if significant > 17 && decimals > 0 {
        let decimals = decimals - (significant - 17);
        format!("{r:.decimals$}")
    } else {
        s
    }
}

/// Serialises a catalog as
/// `{"dim":D,"k":K,"tolerance":t,"subsets":[{"radius":r,"elements":[...]}]}`
/// with radii at 17 significant digits.
pub fn catalog_to_json(catalog: &Catalog) -> String {
    use std::fmt::Write;
    let p = catalog.params();
    let mut out = String::with_capacity(64 + catalog.subsets().len() * 48);
    let _ = write!(
        out,
        "{{\"dim\":{},\"k\":{},\"grouping\":\"{}\",\"tolerance\":{},\"subsets\":[",
        p.dim(),
        p.k(),
        catalog.provenance().grouping.name(),
        json_float(catalog.provenance().grouping.split_tolerance()),
    );
    for (i, s) in catalog.subsets().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "\n{{\"radius\":{},\"elements\":[", format_radius(s.radius));
        for (j, e) in s.elements.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{e}");
        }
        out.push_str("]}");
    }
    out.push_str("\n]}\n");
    out
}

fn json_float(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:e}")
    }
}

#[derive(Deserialize)]
struct CatalogFile {
    dim: u32,
    k: u32,
    #[serde(default)]
    grouping: Option<String>,
    tolerance: f64,
    subsets: Vec<Subset>,
}

/// Parses the output of [`catalog_to_json`].
pub fn catalog_from_json(text: &str) -> Result<Catalog> {
    let file: CatalogFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let params = CurveParams::new(file.dim, file.k)?;
    let grouping = match file.grouping.as_deref() {
        Some("exact") | None if file.tolerance == 0.0 => Grouping::Exact,
        _ => Grouping::tolerance(file.tolerance, DEFAULT_TIGHT_TOLERANCE.min(file.tolerance / 10.0))?,
    };
    Catalog::from_parts(params, grouping, file.subsets)
}
