//! Cayley tables and graphs of dictionaries under XOR, and their canonical
//! constraint systems.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::morton::Bits;
use crate::structure::{extract_sg, Dictionary, Var};

/// Tolerance for comparing closeness centralities.
pub const CENTRALITY_TOLERANCE: f64 = 1e-12;

/// Letters first, then `X`, then `=`.
fn table_order(d: &Dictionary) -> Vec<Var> {
    let mut vars: Vec<Var> = d.letters().map(|(v, _)| v).collect();
    vars.push(Var::Ones);
    vars.push(Var::Zero);
    vars
}

/// `cells[i][j]` is the variable equal to `vars[i] ⊕ vars[j]`, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CayleyTable {
    pub vars: Vec<Var>,
    pub cells: Vec<Vec<Option<Var>>>,
}

impl CayleyTable {
    pub fn cell(&self, a: Var, b: Var) -> Option<Var> {
        let i = self.vars.iter().position(|&v| v == a)?;
        let j = self.vars.iter().position(|&v| v == b)?;
        self.cells[i][j]
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.vars.len();
        (0..n).all(|i| (0..n).all(|j| self.cells[i][j] == self.cells[j][i]))
    }
}

impl fmt::Display for CayleyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⊕")?;
        for v in &self.vars {
            write!(f, " {v}")?;
        }
        for (i, row) in self.cells.iter().enumerate() {
            write!(f, "\n{}", self.vars[i])?;
            for c in row {
                match c {
                    Some(v) => write!(f, " {v}")?,
                    None => write!(f, " .")?,
                }
            }
        }
        Ok(())
    }
}

pub fn cayley_table(d: &Dictionary) -> CayleyTable {
    let vars = table_order(d);
    let values: Vec<Bits> = vars.iter().map(|&v| d.get(v).expect("listed")).collect();
    let cells = values
        .iter()
        .map(|a| values.iter().map(|b| d.lookup(a.xor(b))).collect())
        .collect();
    CayleyTable { vars, cells }
}

/// An undirected edge `{a, b}` labelled by the variable `l` with `a ⊕ l = b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub a: Var,
    pub b: Var,
    pub label: Var,
}

impl Edge {
    fn new(x: Var, y: Var, label: Var) -> Self {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        Edge { a, b, label }
    }
}

/// Nodes are the dictionary variables other than `=`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CayleyGraph {
    pub nodes: Vec<Var>,
    pub edges: BTreeSet<Edge>,
}

impl CayleyGraph {
    pub fn neighbours(&self, v: Var) -> BTreeSet<Var> {
        self.edges
            .iter()
            .filter_map(|e| if e.a == v { Some(e.b) } else if e.b == v { Some(e.a) } else { None })
            .collect()
    }

    pub fn degree(&self, v: Var) -> usize {
        self.neighbours(v).len()
    }

    /// Whether `a ⊕ b = c` always brings the edges `(a,c):b`, `(a,b):c`
    /// and `(b,c):a` together.
    pub fn is_triangle_closed(&self) -> bool {
        self.edges.iter().all(|e| {
            self.edges.contains(&Edge::new(e.a, e.label, e.b)) && self.edges.contains(&Edge::new(e.b, e.label, e.a))
        })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph cayley {\n");
        for n in &self.nodes {
            s.push_str(&format!("  \"{n}\";\n"));
        }
        for e in &self.edges {
            s.push_str(&format!("  \"{}\" -- \"{}\" [label=\"{}\"];\n", e.a, e.b, e.label));
        }
        s.push('}');
        s
    }
}

pub fn cayley_graph(d: &Dictionary) -> CayleyGraph {
    let table = cayley_table(d);
    let nodes: Vec<Var> = table.vars.iter().copied().filter(|&v| v != Var::Zero).collect();
    let mut edges = BTreeSet::new();
    for (i, &a) in table.vars.iter().enumerate() {
        for (j, &b) in table.vars.iter().enumerate() {
            if let Some(c) = table.cells[i][j] {
                if a != Var::Zero && b != Var::Zero && c != Var::Zero {
                    edges.insert(Edge::new(a, c, b));
                }
            }
        }
    }
    CayleyGraph { nodes, edges }
}

/// Closeness centrality of each node on the unlabelled skeleton, sorted
/// ascending. Uses `(r − 1)/Σd · (r − 1)/(n − 1)` for a node reaching `r`
/// nodes (itself included), which reduces to `(n − 1)/Σd` when connected.
pub fn centrality_vector(g: &CayleyGraph) -> Vec<f64> {
    let n = g.nodes.len();
    let index: BTreeMap<Var, usize> = g.nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![BTreeSet::new(); n];
    for e in &g.edges {
        let (a, b) = (index[&e.a], index[&e.b]);
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let mut out: Vec<f64> = (0..n)
        .map(|s| {
            let mut dist = vec![usize::MAX; n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                }
            }
            let reached: Vec<usize> = dist.iter().copied().filter(|&d| d != usize::MAX).collect();
            let total: usize = reached.iter().sum();
            if total == 0 || n < 2 {
                0.0
            } else {
                let r = (reached.len() - 1) as f64;
                (r / total as f64) * (r / (n - 1) as f64)
            }
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

pub fn centralities_equal(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= CENTRALITY_TOLERANCE)
}

/// Exact isomorphism respecting edge labels: a bijection of nodes, fixing
/// `X`, that maps every labelled edge of `a` onto a labelled edge of `b`
/// with the label mapped by the same bijection.
pub fn graphs_isomorphic(a: &CayleyGraph, b: &CayleyGraph) -> bool {
    if a.nodes.len() != b.nodes.len() || a.edges.len() != b.edges.len() {
        return false;
    }
    if a.nodes.len() <= 1 {
        return true;
    }
    if !centralities_equal(&centrality_vector(a), &centrality_vector(b)) {
        return false;
    }
    let mut map: BTreeMap<Var, Var> = BTreeMap::new();
    map.insert(Var::Ones, Var::Ones);
    if !partial_ok(a, b, &map) {
        return false;
    }
    let order: Vec<Var> = a.nodes.iter().copied().filter(|&v| v != Var::Ones).collect();
    extend(a, b, &order, &mut map)
}

fn extend(a: &CayleyGraph, b: &CayleyGraph, order: &[Var], map: &mut BTreeMap<Var, Var>) -> bool {
    let Some((&next, rest)) = order.split_first() else {
        return true;
    };
    let used: BTreeSet<Var> = map.values().copied().collect();
    let degree = a.degree(next);
    let candidates: Vec<Var> = b
        .nodes
        .iter()
        .copied()
        .filter(|v| !used.contains(v) && b.degree(*v) == degree)
        .collect();
    for c in candidates {
        map.insert(next, c);
        if partial_ok(a, b, map) && extend(a, b, rest, map) {
            return true;
        }
        map.remove(&next);
    }
    false
}

fn partial_ok(a: &CayleyGraph, b: &CayleyGraph, map: &BTreeMap<Var, Var>) -> bool {
    a.edges.iter().all(|e| match (map.get(&e.a), map.get(&e.b), map.get(&e.label)) {
        (Some(&x), Some(&y), Some(&l)) => b.edges.contains(&Edge::new(x, y, l)),
        _ => true,
    })
}

/// An abstract position in a canonical graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Slot {
    A(u8),
    B(u8),
    X,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::A(i) => write!(f, "A{i}"),
            Slot::B(i) => write!(f, "B{i}"),
            Slot::X => f.write_str("X"),
        }
    }
}

impl std::str::FromStr for Slot {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().replace('_', "");
        let bad = || Error::Parse(format!("unknown slot {s:?}"));
        match s.as_bytes() {
            [b'X'] => Ok(Slot::X),
            [b'A', d @ b'1'..=b'3'] => Ok(Slot::A(d - b'0')),
            [b'B', d @ b'1'..=b'3'] => Ok(Slot::B(d - b'0')),
            _ => Err(bad()),
        }
    }
}

/// `⊕ lhs = rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub lhs: Vec<Slot>,
    pub rhs: Slot,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs: Vec<String> = self.lhs.iter().map(Slot::to_string).collect();
        write!(f, "{}: {} = {}", self.name, lhs.join(" ⊕ "), self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSystem {
    pub size: usize,
    pub slots: Vec<Slot>,
    pub constraints: Vec<Constraint>,
    /// Order of the automorphism group of the canonical graph.
    pub expected_assignments: usize,
}

fn c(name: &'static str, lhs: &[Slot], rhs: Slot) -> Constraint {
    Constraint { name: name.to_string(), lhs: lhs.to_vec(), rhs }
}

/// The canonical constraint system for a dictionary size, with every
/// existential choice pinned to one representative.
pub fn constraint_system(size: usize) -> Result<ConstraintSystem> {
    use Slot::{A, B, X};
    let (slots, constraints, expected) = match size {
        2 => (vec![], vec![], 1),
        4 => (vec![A(1), A(2)], vec![c("alpha", &[A(1), A(2)], X)], 2),
        6 => (
            vec![A(1), A(2), A(3), B(1)],
            vec![c("alpha", &[A(1), A(2)], A(3)), c("beta", &[B(1), A(3)], X)],
            2,
        ),
        7 => (
            vec![A(1), A(2), A(3), B(1), B(2)],
            vec![
                c("alpha", &[A(1), A(2)], A(3)),
                c("beta", &[B(1), B(2)], A(1)),
                c("lambda1", &[A(2), B(1)], X),
                c("lambda2", &[A(3), B(2)], X),
            ],
            2,
        ),
        8 => (
            vec![A(1), A(2), A(3), B(1), B(2), B(3)],
            vec![
                c("alpha", &[A(1), A(2)], A(3)),
                c("beta", &[B(1), B(2), B(3)], X),
                c("lambda1", &[A(1), B(2)], X),
                c("lambda2", &[A(2), B(1)], X),
                c("lambda3", &[A(3), B(3)], X),
                c("pi1", &[B(1), B(2)], A(3)),
                c("pi2", &[B(2), B(3)], A(2)),
                c("pi3", &[B(1), B(3)], A(1)),
            ],
            6,
        ),
        other => return Err(Error::UnknownCanonicalSize(other)),
    };
    Ok(ConstraintSystem { size, slots, constraints, expected_assignments: expected })
}

/// Dictionary letter → slot.
pub type Assignment = BTreeMap<Var, Slot>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalClassification {
    pub size: usize,
    pub assignments: Vec<Assignment>,
    pub system: ConstraintSystem,
}

impl CanonicalClassification {
    pub fn count_matches(&self) -> bool {
        self.assignments.len() == self.system.expected_assignments
    }

    /// Slots each letter takes across all assignments, in assignment order.
    pub fn options(&self) -> BTreeMap<Var, Vec<Slot>> {
        let mut out: BTreeMap<Var, Vec<Slot>> = BTreeMap::new();
        for a in &self.assignments {
            for (&v, &s) in a {
                out.entry(v).or_default().push(s);
            }
        }
        out
    }
}

fn satisfies(system: &ConstraintSystem, d: &Dictionary, slot_value: &BTreeMap<Slot, Bits>) -> bool {
    let ones = Bits::ones(d.k());
    let value = |s: &Slot| if *s == Slot::X { Some(ones) } else { slot_value.get(s).copied() };
    system.constraints.iter().all(|c| {
        let lhs = c.lhs.iter().try_fold(Bits::zeros(d.k()), |acc, s| value(s).map(|v| acc.xor(&v)));
        lhs.is_some() && lhs == value(&c.rhs)
    })
}

/// Every bijection of the dictionary's letters onto the slots of its
/// size's canonical system that satisfies all constraints. Letters keep
/// their category: the first three (in dictionary order) fill `A` slots,
/// the rest fill `B` slots.
pub fn classify_canonical(d: &Dictionary) -> Result<CanonicalClassification> {
    let system = constraint_system(d.size())?;
    let letters: Vec<(Var, Bits)> = d.letters().collect();
    let mut assignments = Vec::new();
    let mut perm: Vec<usize> = (0..letters.len()).collect();
    let category = |s: Slot| matches!(s, Slot::B(_));
    permutations(&mut perm, 0, &mut |p| {
        if p.iter().enumerate().any(|(i, &j)| category(system.slots[i]) != category(system.slots[j])) {
            return;
        }
        let slot_value: BTreeMap<Slot, Bits> = p.iter().enumerate().map(|(i, &j)| (system.slots[j], letters[i].1)).collect();
        if satisfies(&system, d, &slot_value) {
            assignments.push(p.iter().enumerate().map(|(i, &j)| (letters[i].0, system.slots[j])).collect());
        }
    });
    assignments.sort();
    if assignments.is_empty() {
        return Err(Error::NoCanonicalAssignment(d.size()));
    }
    Ok(CanonicalClassification { size: d.size(), assignments, system })
}

fn permutations(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Per dictionary size, over every subset of a set of catalogs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictSizeSummary {
    pub dictionaries: usize,
    /// Distinct sets of letter values.
    pub unique: usize,
    pub non_isomorphic: usize,
    pub table_asymmetric: usize,
    pub triangle_open: usize,
    pub classification_failures: usize,
    /// Assignment count → number of dictionaries.
    pub assignment_counts: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictSweep {
    pub sizes: BTreeMap<usize, DictSizeSummary>,
}

impl DictSweep {
    pub fn passed(&self) -> bool {
        self.sizes.iter().all(|(&size, s)| {
            let expected = constraint_system(size).map(|c| c.expected_assignments).ok();
            s.non_isomorphic == 0
                && s.table_asymmetric == 0
                && s.triangle_open == 0
                && s.classification_failures == 0
                && s.assignment_counts.keys().all(|&k| Some(k) == expected)
        })
    }
}

/// Builds the Cayley graph of every distinct dictionary, checks every graph
/// of a size against the first one of that size (isomorphism is an
/// equivalence, so this settles all pairs), and classifies each dictionary.
pub fn dict_sweep(catalogs: &[&Catalog]) -> Result<DictSweep> {
    let mut seen: BTreeMap<usize, BTreeMap<Vec<Bits>, Dictionary>> = BTreeMap::new();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for cat in catalogs {
        for t in cat.subsets() {
            let sg = extract_sg(cat.params(), &t.elements)?;
            let d = sg.dictionary().clone();
            let mut key: Vec<Bits> = d.letters().map(|(_, b)| b).collect();
            key.sort_by_key(|b| (b.len(), b.value()));
            *counts.entry(d.size()).or_insert(0) += 1;
            seen.entry(d.size()).or_default().entry(key).or_insert(d);
        }
    }
    let mut sizes = BTreeMap::new();
    for (size, dicts) in seen {
        let dicts: Vec<&Dictionary> = dicts.values().collect();
        let graphs: Vec<CayleyGraph> = dicts.par_iter().map(|d| cayley_graph(d)).collect();
        let reference = &graphs[0];
        let mut s = DictSizeSummary { dictionaries: counts[&size], unique: dicts.len(), ..Default::default() };
        let per: Vec<(bool, bool, bool, Option<usize>)> = dicts
            .par_iter()
            .zip(graphs.par_iter())
            .map(|(d, g)| {
                let iso = graphs_isomorphic(reference, g);
                let sym = cayley_table(d).is_symmetric();
                let closed = g.is_triangle_closed();
                let cls = classify_canonical(d).ok().map(|c| c.assignments.len());
                (iso, sym, closed, cls)
            })
            .collect();
        for (iso, sym, closed, cls) in per {
            s.non_isomorphic += !iso as usize;
            s.table_asymmetric += !sym as usize;
            s.triangle_open += !closed as usize;
            match cls {
                Some(n) => *s.assignment_counts.entry(n).or_insert(0) += 1,
                None => s.classification_failures += 1,
            }
        }
        sizes.insert(size, s);
    }
    Ok(DictSweep { sizes })
}
