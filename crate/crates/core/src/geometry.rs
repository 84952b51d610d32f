//! Signed-permutation group actions on Morton bit matrices, coplanes, and
//! the decomposition of subsets into reflection orbits (orthotopes).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::{psi, Subset};
use crate::error::{Error, Result};
use crate::morton::{column_of, spread_column, CurveParams, MortonCode};
use crate::projection::project_into;

/// Coordinate agreement used when collecting coplane members.
pub const COPLANE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionKind {
    Identity,
    Negation(Vec<usize>),
    Swap(usize, usize),
    Inversion(usize, usize),
    Reflection(usize),
    Rotation { a: usize, b: usize, power: u32 },
    Composite,
}

/// A `D×D` signed permutation matrix. Entry `+1` at `(i, j)` copies column
/// `j` of the bit matrix into column `i`; `-1` copies its complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAction {
    matrix: Vec<Vec<i8>>,
    kind: ActionKind,
}

impl GroupAction {
    pub fn from_matrix(matrix: Vec<Vec<i8>>) -> Result<Self> {
        validate(&matrix)?;
        Ok(Self { matrix, kind: ActionKind::Composite })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: identity_matrix(dim), kind: ActionKind::Identity }
    }

    /// `M^¬`: complements every listed column.
    pub fn negation(dim: usize, dims: &[usize]) -> Result<Self> {
        let mut m = identity_matrix(dim);
        for &d in dims {
            check_dim(d, dim)?;
            m[d][d] = -m[d][d];
        }
        let mut sorted = dims.to_vec();
        sorted.sort_unstable();
        Ok(Self { matrix: m, kind: ActionKind::Negation(sorted) })
    }

    /// `M^{σ(a)}`.
    pub fn reflection(dim: usize, a: usize) -> Result<Self> {
        let mut g = Self::negation(dim, &[a])?;
        g.kind = ActionKind::Reflection(a);
        Ok(g)
    }

    /// `M^{S(a,b)}`.
    pub fn swap(dim: usize, a: usize, b: usize) -> Result<Self> {
        check_pair(a, b, dim)?;
        let mut m = identity_matrix(dim);
        m[a][a] = 0;
        m[b][b] = 0;
        m[a][b] = 1;
        m[b][a] = 1;
        Ok(Self { matrix: m, kind: ActionKind::Swap(a, b) })
    }

    /// `M^I` on the pair `(a, b)`.
    pub fn inversion(dim: usize, a: usize, b: usize) -> Result<Self> {
        check_pair(a, b, dim)?;
        let mut g = Self::negation(dim, &[a, b])?;
        g.kind = ActionKind::Inversion(a, b);
        Ok(g)
    }

    /// `(M^R)^power` on the pair `(a, b)`; one step maps column `a` to `¬b`
    /// and column `b` to `a`.
    pub fn rotation(dim: usize, a: usize, b: usize, power: u32) -> Result<Self> {
        check_pair(a, b, dim)?;
        let mut step = identity_matrix(dim);
        step[a][a] = 0;
        step[b][b] = 0;
        step[a][b] = -1;
        step[b][a] = 1;
        let mut m = identity_matrix(dim);
        for _ in 0..power % 4 {
            m = multiply(&step, &m);
        }
        Ok(Self { matrix: m, kind: ActionKind::Rotation { a, b, power } })
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<i8>] {
        &self.matrix
    }

    pub fn kind(&self) -> &ActionKind {
        &self.kind
    }

    /// `self ∘ other`: `other` is applied first.
    pub fn compose(&self, other: &GroupAction) -> Result<GroupAction> {
        if self.dim() != other.dim() {
            return Err(Error::InvalidAction(format!("dimension {} vs {}", self.dim(), other.dim())));
        }
        Ok(GroupAction { matrix: multiply(&self.matrix, &other.matrix), kind: ActionKind::Composite })
    }

    pub fn pow(&self, n: u32) -> GroupAction {
        let mut m = identity_matrix(self.dim());
        for _ in 0..n {
            m = multiply(&self.matrix, &m);
        }
        GroupAction { matrix: m, kind: ActionKind::Composite }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == identity_matrix(self.dim())
    }
}

impl fmt::Display for GroupAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.matrix.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>2}")).collect();
            write!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

fn identity_matrix(dim: usize) -> Vec<Vec<i8>> {
    (0..dim).map(|i| (0..dim).map(|j| (i == j) as i8).collect()).collect()
}

fn multiply(a: &[Vec<i8>], b: &[Vec<i8>]) -> Vec<Vec<i8>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn check_dim(d: usize, dim: usize) -> Result<()> {
    if d >= dim {
        return Err(Error::InvalidDimension { index: d, dim: dim as u32 });
    }
    Ok(())
}

fn check_pair(a: usize, b: usize, dim: usize) -> Result<()> {
    check_dim(a, dim)?;
    check_dim(b, dim)?;
    if a == b {
        return Err(Error::InvalidAction(format!("pair ({a}, {b}) repeats a dimension")));
    }
    Ok(())
}

fn validate(m: &[Vec<i8>]) -> Result<()> {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidAction("matrix must be square and non-empty".into()));
    }
    if m.iter().flatten().any(|v| !matches!(v, -1..=1)) {
        return Err(Error::InvalidAction("entries must be -1, 0 or 1".into()));
    }
    let mut column_used = vec![false; n];
    for (i, row) in m.iter().enumerate() {
        let nonzero: Vec<usize> = (0..n).filter(|&j| row[j] != 0).collect();
        if nonzero.len() != 1 {
            return Err(Error::InvalidAction(format!("row {i} must have exactly one non-zero entry")));
        }
        if std::mem::replace(&mut column_used[nonzero[0]], true) {
            return Err(Error::InvalidAction(format!("column {} used twice", nonzero[0])));
        }
    }
    Ok(())
}

/// Applies an action to a code's bit matrix and re-encodes the result.
pub fn apply_action(action: &GroupAction, code: &MortonCode) -> Result<MortonCode> {
    let p = code.params();
    if action.dim() != p.dim() as usize {
        return Err(Error::InvalidAction(format!("action is {}-dimensional, code is {}-dimensional", action.dim(), p.dim())));
    }
    validate(&action.matrix)?;
    Ok(MortonCode::new(apply_to_value(action, p, code.value()), p).expect("signed permutations stay in range"))
}

fn apply_to_value(action: &GroupAction, p: CurveParams, value: u64) -> u64 {
    let ones = (1u64 << p.k()) - 1;
    let mut out = 0;
    for (i, row) in action.matrix.iter().enumerate() {
        let j = row.iter().position(|&v| v != 0).expect("validated");
        let mut col = column_of(p, value, j).value();
        if row[j] < 0 {
            col ^= ones;
        }
        out |= spread_column(p, col, i);
    }
    out
}

/// The members of a subset that share a point's coordinate outside the
/// dimension pair `dims`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coplane {
    pub dims: (usize, usize),
    /// Coordinate in the remaining dimension; absent when `D = 2`.
    pub fixed_dim_value: Option<f64>,
    /// Ascending.
    pub members: Vec<u64>,
}

impl Coplane {
    pub fn arity(&self) -> usize {
        self.members.len()
    }

    /// The dimension outside the pair, when `D = 3`.
    pub fn fixed_dim(&self) -> usize {
        3 - self.dims.0 - self.dims.1
    }
}

fn coords_of(p: CurveParams, value: u64) -> Vec<f64> {
    let mut c = vec![0.0; p.dim() as usize];
    project_into(p, value, &mut c);
    c
}

/// The coplanes through `point`: one per dimension pair, so three for
/// `D = 3` and a single coplane holding all of `T` for `D = 2`.
pub fn coplanes_of(p: CurveParams, point: u64, t: &Subset) -> Result<Vec<Coplane>> {
    if !t.contains(point) {
        return Err(Error::NotInSubset(point));
    }
    match p.dim() {
        2 => Ok(vec![Coplane { dims: (0, 1), fixed_dim_value: None, members: t.elements.clone() }]),
        3 => {
            let coords: Vec<Vec<f64>> = t.elements.iter().map(|&e| coords_of(p, e)).collect();
            let own = coords_of(p, point);
            Ok([(0, 1), (1, 2), (0, 2)]
                .into_iter()
                .map(|(a, b)| {
                    let c = 3 - a - b;
                    let members = t
                        .elements
                        .iter()
                        .zip(&coords)
                        .filter(|(_, xc)| (xc[c] - own[c]).abs() <= COPLANE_TOLERANCE)
                        .map(|(&e, _)| e)
                        .collect();
                    Coplane { dims: (a, b), fixed_dim_value: Some(own[c]), members }
                })
                .collect())
        }
        d => Err(Error::CoplaneDimension(d)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mirror {
    pub coplane: Coplane,
    /// Mirrored members that are not in `T`.
    pub escaped: Vec<u64>,
}

/// Complements the remaining dimension of every member of a `D = 3` coplane.
pub fn mirror_coplane(p: CurveParams, c: &Coplane, t: &Subset) -> Result<Mirror> {
    if p.dim() != 3 {
        return Err(Error::CoplaneDimension(p.dim()));
    }
    let mask = p.column_mask(c.fixed_dim());
    let mut members: Vec<u64> = c.members.iter().map(|&m| m ^ mask).collect();
    members.sort_unstable();
    let escaped = members.iter().copied().filter(|&m| !t.contains(m)).collect();
    Ok(Mirror {
        coplane: Coplane { dims: c.dims, fixed_dim_value: c.fixed_dim_value.map(|v| -v), members },
        escaped,
    })
}

/// Images under `action` of the elements that leave `t`.
pub fn escapes(action: &GroupAction, p: CurveParams, elements: &[u64], t: &Subset) -> Vec<u64> {
    elements
        .iter()
        .map(|&e| apply_to_value(action, p, e))
        .filter(|&x| !t.contains(x))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthotopeDecomposition {
    /// Each orbit ascending; orbits ordered by their smallest element.
    pub orbits: Vec<Vec<u64>>,
    /// Orbit members that fall outside `T`.
    pub escaped: Vec<u64>,
}

impl OrthotopeDecomposition {
    pub fn is_clean(&self, dim: u32) -> bool {
        self.escaped.is_empty() && self.orbits.iter().all(|o| o.len() == 1 << dim)
    }
}

/// Splits `T` into orbits under the group generated by single-dimension
/// negations, i.e. XOR with every combination of column masks.
pub fn orthotope_decompose(p: CurveParams, t: &Subset) -> OrthotopeDecomposition {
    let dim = p.dim() as usize;
    let masks: Vec<u64> = (0u64..1 << dim)
        .map(|combo| (0..dim).filter(|d| combo >> d & 1 == 1).fold(0, |m, d| m | p.column_mask(d)))
        .collect();
    let mut seen = BTreeSet::new();
    let mut orbits = Vec::new();
    let mut escaped = Vec::new();
    for &x in &t.elements {
        if seen.contains(&x) {
            continue;
        }
        let mut orbit: Vec<u64> = masks.iter().map(|m| x ^ m).collect();
        orbit.sort_unstable();
        orbit.dedup();
        for &y in &orbit {
            if t.contains(y) {
                seen.insert(y);
            } else {
                escaped.push(y);
            }
        }
        orbits.push(orbit);
    }
    OrthotopeDecomposition { orbits, escaped }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthotopeSum {
    pub orbit: Vec<u64>,
    pub sum: u128,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthotopeReport {
    pub psi: u64,
    pub sums: Vec<OrthotopeSum>,
    pub escaped: Vec<u64>,
}

impl OrthotopeReport {
    pub fn all_passed(&self) -> bool {
        self.escaped.is_empty() && self.sums.iter().all(|s| s.passed)
    }
}

/// Checks that every orbit of `T` sums to `Ψ^D_K`.
pub fn verify_orthotope_sums(p: CurveParams, t: &Subset) -> Result<OrthotopeReport> {
    let psi = psi(p.dim(), p.k())?;
    let dec = orthotope_decompose(p, t);
    let full = 1usize << p.dim();
    let sums = dec
        .orbits
        .into_iter()
        .map(|orbit| {
            let sum = orbit.iter().map(|&e| e as u128).sum();
            let passed = sum == psi as u128 && orbit.len() == full;
            OrthotopeSum { orbit, sum, passed }
        })
        .collect();
    Ok(OrthotopeReport { psi, sums, escaped: dec.escaped })
}
