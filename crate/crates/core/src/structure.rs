//! Subset generators: the per-dimension XOR deltas that walk a subset in
//! ascending order, their variable dictionaries, and equivalence up to
//! renaming and cyclic rotation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::morton::{column_of, spread_column, Bits, CurveParams};

const LETTERS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWYZ";

/// A dictionary variable: `=` (all zeros), `X` (all ones) or a letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    Zero,
    Ones,
    Letter(u8),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Zero => f.write_str("="),
            Var::Ones => f.write_str("X"),
            Var::Letter(i) => match LETTERS.get(*i as usize) {
                Some(&c) => write!(f, "{}", c as char),
                None => write!(f, "V{i}"),
            },
        }
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "=" => Ok(Var::Zero),
            "X" => Ok(Var::Ones),
            t => {
                if let [c] = t.as_bytes() {
                    if let Some(i) = LETTERS.iter().position(|l| l == c) {
                        return Ok(Var::Letter(i as u8));
                    }
                }
                t.strip_prefix('V')
                    .and_then(|n| n.parse().ok())
                    .map(Var::Letter)
                    .ok_or_else(|| Error::Parse(format!("unknown variable {t:?}")))
            }
        }
    }
}

/// Variable → K-bit value map. `=` and `X` are always present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dictionary {
    k: u32,
    entries: BTreeMap<Var, Bits>,
}

impl Dictionary {
    pub fn new(k: u32) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(Var::Zero, Bits::zeros(k));
        entries.insert(Var::Ones, Bits::ones(k));
        Self { k, entries }
    }

    /// Builds a dictionary from letter entries; values must be distinct,
    /// of equal length, and differ from all zeros and all ones.
    pub fn from_entries<I: IntoIterator<Item = (Var, Bits)>>(k: u32, entries: I) -> Result<Self> {
        let mut d = Self::new(k);
        for (var, bits) in entries {
            if bits.len() != k {
                return Err(Error::Parse(format!("{var} has length {}, expected {k}", bits.len())));
            }
            match d.entries.get(&var) {
                Some(existing) if *existing == bits && !matches!(var, Var::Letter(_)) => continue,
                Some(_) => return Err(Error::Parse(format!("{var} defined twice"))),
                None => {}
            }
            if d.lookup(bits).is_some() {
                return Err(Error::Parse(format!("value {bits} appears twice")));
            }
            d.entries.insert(var, bits);
        }
        Ok(d)
    }

    /// Parses `NAME=bits` pairs, e.g. `A=0011,B=1100`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, value) = item
                .split_once(':')
                .or_else(|| item.rsplit_once('='))
                .ok_or_else(|| Error::Parse(format!("expected NAME=bits, got {item:?}")))?;
            pairs.push((name.parse::<Var>()?, value.trim().parse::<Bits>()?));
        }
        let k = pairs.first().map(|p| p.1.len()).ok_or_else(|| Error::Parse("empty dictionary".into()))?;
        Self::from_entries(k, pairs)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of entries, including `=` and `X`.
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, var: Var) -> Option<Bits> {
        self.entries.get(&var).copied()
    }

    pub fn lookup(&self, bits: Bits) -> Option<Var> {
        self.entries.iter().find(|(_, &b)| b == bits).map(|(&v, _)| v)
    }

    /// Entries in variable order: `=`, `X`, then letters.
    pub fn entries(&self) -> impl Iterator<Item = (Var, Bits)> + '_ {
        self.entries.iter().map(|(&v, &b)| (v, b))
    }

    pub fn letters(&self) -> impl Iterator<Item = (Var, Bits)> + '_ {
        self.entries().filter(|(v, _)| matches!(v, Var::Letter(_)))
    }

    fn insert_fresh(&mut self, bits: Bits) -> Var {
        if let Some(v) = self.lookup(bits) {
            return v;
        }
        let var = Var::Letter((self.entries.len() - 2) as u8);
        self.entries.insert(var, bits);
        var
    }
}

impl fmt::Display for Dictionary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, b) in self.letters().chain(self.entries().filter(|(v, _)| !matches!(v, Var::Letter(_))).collect::<Vec<_>>().into_iter().rev()) {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{v}: {b}")?;
        }
        Ok(())
    }
}

/// Per-transition variables for a subset. Row `i ≥ 1` takes element
/// `i − 1` to element `i` (ascending order); row 0 closes the cycle from the
/// last element back to the first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetGenerator {
    params: CurveParams,
    base: u64,
    rows: Vec<Vec<Var>>,
    dictionary: Dictionary,
}

impl SubsetGenerator {
    pub fn params(&self) -> CurveParams {
        self.params
    }

    /// The smallest element.
    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn rows(&self) -> &[Vec<Var>] {
        &self.rows
    }

    /// Rows without the closing row, as printed in the catalog of known generators.
    pub fn body(&self) -> &[Vec<Var>] {
        &self.rows[1..]
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dictionary
    }

    /// `Path_d`: the variables of dimension `d`, closing entry first.
    pub fn path(&self, d: usize) -> Vec<Var> {
        self.rows.iter().map(|r| r[d]).collect()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows in the comma-separated grid layout, closing row omitted.
    pub fn to_grid(&self) -> String {
        format_grid(self.body())
    }
}

pub fn format_grid(rows: &[Vec<Var>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(Var::to_string).collect::<Vec<_>>().join(", "))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn parse_grid(text: &str) -> Result<Vec<Vec<Var>>> {
    let rows: Vec<Vec<Var>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(str::parse).collect())
        .collect::<Result<_>>()?;
    if let Some(w) = rows.first().map(Vec::len) {
        if rows.iter().any(|r| r.len() != w) {
            return Err(Error::Parse("rows of unequal width".into()));
        }
    }
    Ok(rows)
}

/// Extracts the subset generator of `elements` (any order).
pub fn extract_sg(p: CurveParams, elements: &[u64]) -> Result<SubsetGenerator> {
    if elements.len() < 2 {
        return Err(Error::SubsetTooSmall(elements.len()));
    }
    let mut sorted = elements.to_vec();
    sorted.sort_unstable();
    if let Some(&bad) = sorted.iter().find(|&&v| v > p.max_value()) {
        return Err(Error::ValueOutOfRange { value: bad, dim: p.dim(), k: p.k() });
    }
    let dim = p.dim() as usize;
    let n = sorted.len();
    let mut dictionary = Dictionary::new(p.k());
    let mut transitions = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (sorted[i], sorted[(i + 1) % n]);
        let row: Vec<Var> = (0..dim)
            .map(|d| dictionary.insert_fresh(column_of(p, a, d).xor(&column_of(p, b, d))))
            .collect();
        transitions.push(row);
    }
    transitions.rotate_right(1);
    Ok(SubsetGenerator { params: p, base: sorted[0], rows: transitions, dictionary })
}

/// Walks the generator from its base and returns the visited elements.
pub fn regenerate(sg: &SubsetGenerator) -> Vec<u64> {
    let p = sg.params;
    let mut out = Vec::with_capacity(sg.len());
    let mut current = sg.base;
    out.push(current);
    for row in sg.body() {
        current = step(p, &sg.dictionary, current, row);
        out.push(current);
    }
    out
}

fn step(p: CurveParams, dict: &Dictionary, value: u64, row: &[Var]) -> u64 {
    row.iter().enumerate().fold(value, |v, (d, var)| {
        v ^ spread_column(p, dict.get(*var).expect("variables come from the dictionary").value(), d)
    })
}

/// Whether regeneration reproduces `elements` (ascending) and the closing
/// row returns to the base.
pub fn round_trip(sg: &SubsetGenerator, elements: &[u64]) -> bool {
    let regenerated = regenerate(sg);
    let closes = step(sg.params, &sg.dictionary, *regenerated.last().expect("non-empty"), &sg.rows[0]) == sg.base;
    closes && regenerated == elements
}

/// Running XOR of each column of `rows`, starting from all zeros.
pub fn cumulative_xor(rows: &[Vec<Var>], dict: &Dictionary) -> Result<Vec<Vec<Bits>>> {
    let width = rows.first().map_or(0, Vec::len);
    let mut acc = vec![Bits::zeros(dict.k()); width];
    rows.iter()
        .map(|row| {
            for (a, v) in acc.iter_mut().zip(row) {
                let bits = dict.get(*v).ok_or_else(|| Error::Parse(format!("{v} missing from dictionary")))?;
                *a = a.xor(&bits);
            }
            Ok(acc.clone())
        })
        .collect()
}

/// Whether the running XOR of the non-closing rows ends at all ones in every
/// dimension.
pub fn cumulative_xor_rows_check(rows: &[Vec<Var>], dict: &Dictionary) -> Result<bool> {
    Ok(cumulative_xor(rows, dict)?.last().is_some_and(|last| last.iter().all(Bits::is_all_ones)))
}

pub fn cumulative_xor_check(sg: &SubsetGenerator) -> bool {
    cumulative_xor_rows_check(sg.body(), &sg.dictionary).unwrap_or(false)
}

/// Rotation-minimal encoding of `rows` after renaming letters in order of
/// first appearance (`=` and `X` fixed). Two generators are equivalent iff
/// their keys are equal.
pub fn canonical_key(rows: &[Vec<Var>]) -> Vec<u8> {
    (0..rows.len())
        .map(|start| {
            let mut names: HashMap<Var, u8> = HashMap::new();
            rows[start..]
                .iter()
                .chain(&rows[..start])
                .flatten()
                .map(|v| match v {
                    Var::Zero => 0,
                    Var::Ones => 1,
                    Var::Letter(_) => {
                        let next = names.len() as u8 + 2;
                        *names.entry(*v).or_insert(next)
                    }
                })
                .collect::<Vec<u8>>()
        })
        .min()
        .unwrap_or_default()
}

pub fn sg_key(sg: &SubsetGenerator) -> Vec<u8> {
    canonical_key(&sg.rows)
}

/// Equal up to a renaming of letters and a cyclic rotation of the rows.
pub fn sg_equivalent(a: &SubsetGenerator, b: &SubsetGenerator) -> bool {
    a.params.dim() == b.params.dim() && a.len() == b.len() && sg_key(a) == sg_key(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SgProperties {
    pub unique_paths: bool,
    pub cyclic_x: bool,
    pub middle_x: bool,
    /// Rows mirror around the middle row, which itself is excluded.
    pub mirror_symmetric: bool,
}

impl SgProperties {
    pub fn all(&self) -> bool {
        self.unique_paths && self.cyclic_x && self.middle_x && self.mirror_symmetric
    }
}

pub fn sg_properties(sg: &SubsetGenerator) -> SgProperties {
    let dim = sg.params.dim() as usize;
    let n = sg.len();
    let paths: Vec<Vec<Var>> = (0..dim).map(|d| sg.path(d)).collect();
    let distinct: BTreeSet<&Vec<Var>> = paths.iter().collect();
    let mid = n / 2;
    let all_x = |r: &[Var]| r.iter().all(|v| *v == Var::Ones);
    SgProperties {
        unique_paths: distinct.len() == dim,
        cyclic_x: all_x(&sg.rows[0]),
        middle_x: n % 2 == 0 && all_x(&sg.rows[mid]),
        mirror_symmetric: n % 2 == 0 && (1..mid).all(|i| sg.rows[mid + i] == sg.rows[mid - i]),
    }
}

/// A generator from the catalog of known generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnownSg {
    pub dim: u32,
    pub size: usize,
    pub variant: usize,
    /// Without the closing row.
    pub body: Vec<Vec<Var>>,
}

impl KnownSg {
    pub fn key(&self) -> Vec<u8> {
        let mut rows = vec![vec![Var::Ones; self.dim as usize]];
        rows.extend(self.body.iter().cloned());
        canonical_key(&rows)
    }

    /// Distinct letters plus `=` and `X`.
    pub fn variable_count(&self) -> usize {
        self.body.iter().flatten().filter(|v| matches!(v, Var::Letter(_))).collect::<BTreeSet<_>>().len() + 2
    }
}

macro_rules! known {
    ($($d:literal, $t:literal, $v:literal);* $(;)?) => {
        &[$(($d, $t, $v, include_str!(concat!("../data/appendix_a/d", $d, "_t", $t, "_sg", $v, ".txt")))),*]
    };
}

const KNOWN_SGS: &[(u32, usize, usize, &str)] = known![
    2, 4, 1; 2, 8, 1;
    3, 8, 1; 3, 16, 1; 3, 24, 1; 3, 24, 2;
    3, 32, 1; 3, 32, 2; 3, 32, 3; 3, 32, 4; 3, 32, 5; 3, 32, 6;
    3, 48, 1; 3, 48, 2;
];

/// Every known generator for `D ∈ {2, 3}`.
pub fn known_sgs() -> Vec<KnownSg> {
    KNOWN_SGS
        .iter()
        .map(|&(dim, size, variant, text)| KnownSg {
            dim,
            size,
            variant,
            body: parse_grid(text).expect("bundled generator data parses"),
        })
        .collect()
}

/// The variant of the known generator equivalent to `sg`, if any.
pub fn match_known(sg: &SubsetGenerator, known: &[KnownSg]) -> Option<usize> {
    let key = sg_key(sg);
    known
        .iter()
        .filter(|k| k.dim == sg.params.dim() && k.size == sg.len())
        .find(|k| k.key() == key)
        .map(|k| k.variant)
}

/// Generators of mixed size and dimension that share the variables `A`, `B`.
pub fn cross_dimension_sgs() -> Vec<(u32, usize, Vec<Vec<Var>>)> {
    [
        (3, 16, include_str!("../data/three_sg/d3_t16.txt")),
        (3, 24, include_str!("../data/three_sg/d3_t24.txt")),
        (4, 32, include_str!("../data/three_sg/d4_t32.txt")),
    ]
    .into_iter()
    .map(|(d, t, text)| (d, t, parse_grid(text).expect("bundled generator data parses")))
    .collect()
}

/// Per subset size: dictionary sizes, equivalence classes and conformance.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub subsets: usize,
    /// Dictionary size → number of subsets.
    pub dictionary_sizes: BTreeMap<usize, usize>,
    pub classes: usize,
    /// Known variant → number of subsets.
    pub known_matches: BTreeMap<usize, usize>,
    /// Subsets whose generator matches no known generator of their size.
    pub unmatched: usize,
    /// Subsets of a size for which no generators are known.
    pub uncatalogued: usize,
    pub round_trip_failures: usize,
    pub cumulative_xor_failures: usize,
    pub property_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SgSweep {
    pub dim: u32,
    pub sizes: BTreeMap<usize, SizeSummary>,
}

impl SgSweep {
    pub fn conforms(&self) -> bool {
        self.sizes.values().all(|s| {
            s.unmatched == 0 && s.round_trip_failures == 0 && s.cumulative_xor_failures == 0 && s.property_failures == 0
        })
    }
}

/// Extracts and checks the generator of every subset of every catalog
/// (all catalogs must share `D`).
pub fn sg_sweep(catalogs: &[&Catalog]) -> Result<SgSweep> {
    let dim = catalogs.first().map_or(0, |c| c.params().dim());
    let known = known_sgs();
    let mut sizes: BTreeMap<usize, SizeSummary> = BTreeMap::new();
    let mut keys: BTreeMap<usize, BTreeSet<Vec<u8>>> = BTreeMap::new();
    for cat in catalogs {
        let p = cat.params();
        if p.dim() != dim {
            return Err(Error::InvalidParams { dim: p.dim(), k: p.k(), reason: "sweep catalogs must share D" });
        }
        for t in cat.subsets() {
            let sg = extract_sg(p, &t.elements)?;
            let s = sizes.entry(t.size()).or_default();
            s.subsets += 1;
            *s.dictionary_sizes.entry(sg.dictionary().size()).or_insert(0) += 1;
            keys.entry(t.size()).or_default().insert(sg_key(&sg));
            let catalogued = known.iter().any(|k| k.dim == p.dim() && k.size == t.size());
            match match_known(&sg, &known) {
                Some(v) => *s.known_matches.entry(v).or_insert(0) += 1,
                None if catalogued => s.unmatched += 1,
                None => s.uncatalogued += 1,
            }
            s.round_trip_failures += !round_trip(&sg, &t.elements) as usize;
            s.cumulative_xor_failures += !cumulative_xor_check(&sg) as usize;
            s.property_failures += !sg_properties(&sg).all() as usize;
        }
    }
    for (size, k) in keys {
        sizes.get_mut(&size).expect("same keys").classes = k.len();
    }
    Ok(SgSweep { dim, sizes })
}
