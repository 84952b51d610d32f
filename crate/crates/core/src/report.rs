//! End-to-end verification run and its JSON, markdown and CSV forms.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::catalog::{enumerate, monotonicity_flags, size_histogram, unexpected_sizes, verify_sums, Catalog, Grouping};
use crate::dict_graph::dict_sweep;
use crate::equiv::{validity_fractions, PhiParams};
use crate::error::{Error, Result};
use crate::geometry::verify_orthotope_sums;
use crate::morton::CurveParams;
use crate::reference;
use crate::structure::sg_sweep;

pub const SCHEMA_VERSION: u32 = 1;

/// Largest `D·K_max` a verification run accepts.
pub const VERIFY_CAP_BITS: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// A conjecture-level disagreement; does not fail the run.
    Flagged,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Flagged => "flagged",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub status: Status,
    pub details: String,
}

/// A reproduced table, rendered as markdown.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    pub anchor: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub dim: u32,
    pub k_max: u32,
    pub grouping: Grouping,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl VerificationReport {
    pub fn has_failures(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema version {}", r.schema_version)));
        }
        Ok(r)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# Verification report: D={}, K≤{}, {} grouping\n", self.dim, self.k_max, self.grouping.name());
        let _ = writeln!(
            out,
            "{} pass, {} fail, {} flagged\n",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Flagged)
        );
        out.push_str("## Checks\n\n| check | anchor | status | details |\n|---|---|---|---|\n");
        for c in &self.checks {
            let _ = writeln!(out, "| {} | {} | {} | {} |", c.name, c.anchor, c.status, escape_md(&c.details));
        }
        for t in &self.tables {
            let _ = writeln!(out, "\n## {}\n\n_{}_\n", t.title, t.anchor);
            let _ = writeln!(out, "| {} |", t.header.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(t.header.len()));
            for row in &t.rows {
                let _ = writeln!(out, "| {} |", row.join(" | "));
            }
        }
        out
    }

    /// One row per check.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::Report(e.to_string());
        w.write_record(["name", "anchor", "status", "details"]).map_err(err)?;
        for c in &self.checks {
            w.write_record([&c.name, &c.anchor, &c.status.to_string(), &c.details]).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Report(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Report(e.to_string()))
    }
}

fn escape_md(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

fn check(name: &str, anchor: &str, status: Status, details: impl Into<String>) -> Check {
    Check { name: name.into(), anchor: anchor.into(), status, details: details.into() }
}

fn pass_or_fail(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn histogram_string(h: &BTreeMap<usize, usize>) -> String {
    h.iter().map(|(s, c)| format!("{s}:{c}")).collect::<Vec<_>>().join(" ")
}

/// Runs every verifier for `X^D_1 … X^D_{K_max}` in a fixed order:
/// enumeration, subset counts, subset sums, Υ, φ validity, monotonicity,
/// orthotopes, generator sweep, dictionary graphs.
pub fn run_verify_all(dim: u32, k_max: u32, grouping: Grouping) -> Result<VerificationReport> {
    if k_max == 0 {
        return Err(Error::InvalidParams { dim, k: k_max, reason: "K_max must be at least 1" });
    }
    let bits = dim.saturating_mul(k_max);
    if bits > VERIFY_CAP_BITS {
        return Err(Error::EnumerationTooLarge { bits, cap: VERIFY_CAP_BITS });
    }
    let catalogs = (1..=k_max)
        .map(|k| enumerate(CurveParams::new(dim, k)?, grouping))
        .collect::<Result<Vec<Catalog>>>()?;
    let refs: Vec<&Catalog> = catalogs.iter().collect();
    let mut checks = Vec::new();
    let mut tables = Vec::new();

    // enumeration
    let unexpected: Vec<String> = catalogs
        .iter()
        .filter_map(|c| {
            let u = unexpected_sizes(c);
            (!u.is_empty()).then(|| format!("K={}: {:?}", c.params().k(), u))
        })
        .collect();
    let total: usize = catalogs.iter().map(|c| c.subsets().len()).sum();
    checks.push(check(
        "enumeration",
        "radius-equal partition of every X^D_K",
        if unexpected.is_empty() { Status::Pass } else { Status::Flagged },
        if unexpected.is_empty() {
            format!("{total} subsets over K=1..{k_max}")
        } else {
            format!("{total} subsets; previously unseen sizes {}", unexpected.join("; "))
        },
    ));

    // subset counts
    let mut mismatches = Vec::new();
    let mut rows = Vec::new();
    for c in &catalogs {
        let k = c.params().k();
        let h = size_histogram(c);
        let expected = reference::subset_counts(dim, k).map(|r| r.iter().copied().collect::<BTreeMap<_, _>>());
        let status = match &expected {
            Some(e) if *e != h => {
                mismatches.push(format!("K={k}: got {{{}}}, expected {{{}}}", histogram_string(&h), histogram_string(e)));
                "mismatch"
            }
            Some(_) => "match",
            None => "no reference",
        };
        rows.push(vec![k.to_string(), histogram_string(&h), status.into()]);
    }
    checks.push(check(
        "subset-counts",
        "subset-count tables",
        pass_or_fail(mismatches.is_empty()),
        if mismatches.is_empty() { "all reference rows reproduced".into() } else { mismatches.join("; ") },
    ));
    tables.push(Table {
        title: format!("Subset counts per size, D={dim}"),
        anchor: "subset-count tables".into(),
        header: vec!["K".into(), "size:count".into(), "reference".into()],
        rows,
    });

    // subset sums and Υ
    let sum_reports = catalogs.iter().map(verify_sums).collect::<Result<Vec<_>>>()?;
    let mut sum_problems = Vec::new();
    let mut upsilon_problems = Vec::new();
    let mut rows = Vec::new();
    for r in &sum_reports {
        let failed = r.failures().count();
        if failed > 0 {
            sum_problems.push(format!("K={}: {failed} subsets off Ψ·|T|/2^D", r.k));
        }
        let by_size = r.sums_by_size();
        if let Some(expected) = reference::subset_sums(dim, r.k) {
            for &(size, sum) in expected {
                if by_size.get(&size).copied().flatten() != Some(sum) {
                    sum_problems.push(format!("K={}: size {size} expected sum {sum}", r.k));
                }
            }
        }
        if r.counted != r.upsilon {
            upsilon_problems.push(format!("K={}: counted {} vs Υ {}", r.k, r.counted, r.upsilon));
        }
        if let Some(u) = reference::upsilon(dim, r.k) {
            if u != r.counted {
                upsilon_problems.push(format!("K={}: counted {} vs reference {u}", r.k, r.counted));
            }
        }
        let sums = by_size
            .iter()
            .map(|(s, v)| format!("{s}:{}", v.map_or("mixed".into(), |x| x.to_string())))
            .collect::<Vec<_>>()
            .join(" ");
        rows.push(vec![r.k.to_string(), r.psi.to_string(), sums, r.counted.to_string(), r.upsilon.to_string()]);
    }
    checks.push(check(
        "subset-sums",
        "subset-sum tables",
        pass_or_fail(sum_problems.is_empty()),
        if sum_problems.is_empty() { "every subset sums to Ψ·|T|/2^D".into() } else { sum_problems.join("; ") },
    ));
    checks.push(check(
        "upsilon",
        "Υ tables",
        pass_or_fail(upsilon_problems.is_empty()),
        if upsilon_problems.is_empty() { "Σ|T|/2^D = Υ for every K".into() } else { upsilon_problems.join("; ") },
    ));
    tables.push(Table {
        title: format!("Subset sums and Υ, D={dim}"),
        anchor: "subset-sum and Υ tables".into(),
        header: vec!["K".into(), "Ψ".into(), "size:sum".into(), "Σ|T|/2^D".into(), "Υ".into()],
        rows,
    });

    // φ validity
    let mut law_failures = Vec::new();
    let mut flagged = Vec::new();
    let mut rows = Vec::new();
    for s in 1..k_max {
        for b in s + 1..=k_max {
            let params = PhiParams::new(dim, s, b)?;
            let r = validity_fractions(params, &catalogs[s as usize - 1], Some(&catalogs[b as usize - 1]))?;
            if r.sum_failures() > 0 {
                law_failures.push(format!("S={s} B={b}: {} images off the sum law", r.sum_failures()));
            }
            for (&size, f) in &r.fractions {
                let valid = f.valid.expect("destination supplied");
                let expected = match dim {
                    2 => Some((f.total, f.total)),
                    _ => reference::validity(dim, size, s, b),
                };
                let note = match expected {
                    Some(e) if e == (valid, f.total) => "match".to_string(),
                    Some((v, t)) => {
                        flagged.push(format!("size {size} S={s} B={b}: {f} vs {v}/{t}"));
                        format!("reference {v}/{t}")
                    }
                    None => "no reference".into(),
                };
                rows.push(vec![size.to_string(), s.to_string(), b.to_string(), f.to_string(), note]);
            }
        }
    }
    let status = if !law_failures.is_empty() {
        Status::Fail
    } else if !flagged.is_empty() {
        Status::Flagged
    } else {
        Status::Pass
    };
    let mut details: Vec<String> = law_failures;
    details.extend(flagged);
    checks.push(check(
        "phi-validity",
        "validity-fraction tables",
        status,
        if details.is_empty() {
            if k_max < 2 { "no (S, B) pair with B ≤ K_max".into() } else { "sum law holds; fractions match".into() }
        } else {
            details.join("; ")
        },
    ));
    tables.push(Table {
        title: format!("φ validity fractions, D={dim}"),
        anchor: "validity-fraction tables".into(),
        header: vec!["size".into(), "S".into(), "B".into(), "valid".into(), "reference".into()],
        rows,
    });

    // monotonicity
    let flags = monotonicity_flags(&refs);
    checks.push(check(
        "monotonicity",
        "per-size counts grow with K",
        if flags.is_empty() { Status::Pass } else { Status::Flagged },
        if flags.is_empty() {
            "no size count decreases".to_string()
        } else {
            flags
                .iter()
                .map(|f| format!("size {} K={}→{}: {}→{}", f.size, f.k, f.k + 1, f.count_at_k, f.count_at_next))
                .collect::<Vec<_>>()
                .join("; ")
        },
    ));

    // orthotopes
    let mut orbits = 0usize;
    let mut bad = Vec::new();
    for c in &catalogs {
        for t in c.subsets() {
            let r = verify_orthotope_sums(c.params(), t)?;
            orbits += r.sums.len();
            if !r.all_passed() {
                bad.push(format!("K={} first {}", c.params().k(), t.elements[0]));
            }
        }
    }
    checks.push(check(
        "orthotopes",
        "reflection-orbit decomposition",
        pass_or_fail(bad.is_empty()),
        if bad.is_empty() { format!("{orbits} orbits, each summing to Ψ") } else { bad.join("; ") },
    ));

    // subset generators
    let sweep = sg_sweep(&refs)?;
    let mut problems = Vec::new();
    let mut rows = Vec::new();
    let reference_rows = reference::dictionaries(dim);
    for (&size, s) in &sweep.sizes {
        if s.unmatched + s.round_trip_failures + s.cumulative_xor_failures + s.property_failures > 0 {
            problems.push(format!(
                "size {size}: {} unmatched, {} round-trip, {} cumulative-XOR, {} property failures",
                s.unmatched, s.round_trip_failures, s.cumulative_xor_failures, s.property_failures
            ));
        }
        let dict_sizes = s.dictionary_sizes.keys().map(|d| d.to_string()).collect::<Vec<_>>().join(",");
        let note = match reference_rows.and_then(|r| r.iter().find(|row| row.0 == size)) {
            Some(&(_, dicts, classes)) => {
                let sizes_ok = s.dictionary_sizes.keys().all(|d| dicts.contains(d));
                if !sizes_ok || s.classes > classes {
                    problems.push(format!("size {size}: dictionary sizes {{{dict_sizes}}}, {} classes", s.classes));
                }
                format!(
                    "{}, {classes}",
                    dicts.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
                )
            }
            None => "no reference".into(),
        };
        rows.push(vec![size.to_string(), s.subsets.to_string(), dict_sizes, s.classes.to_string(), note]);
    }
    checks.push(check(
        "subset-generators",
        "generator appendix and dictionary-size tables",
        pass_or_fail(problems.is_empty()),
        if problems.is_empty() {
            format!("{} subsets extracted, round-tripped and matched", sweep.sizes.values().map(|s| s.subsets).sum::<usize>())
        } else {
            problems.join("; ")
        },
    ));
    tables.push(Table {
        title: format!("Subset generators, D={dim}"),
        anchor: "dictionary-size tables".into(),
        header: vec!["size".into(), "subsets".into(), "dictionary sizes".into(), "classes".into(), "reference".into()],
        rows,
    });

    // dictionary graphs
    let dicts = dict_sweep(&refs)?;
    let rows: Vec<Vec<String>> = dicts
        .sizes
        .iter()
        .map(|(size, s)| {
            vec![
                size.to_string(),
                s.dictionaries.to_string(),
                s.unique.to_string(),
                s.non_isomorphic.to_string(),
                histogram_string(&s.assignment_counts),
            ]
        })
        .collect();
    checks.push(check(
        "dictionary-graphs",
        "canonical dictionary graphs",
        pass_or_fail(dicts.passed()),
        if dicts.passed() {
            format!("{} dictionary sizes, all isomorphic and classified", dicts.sizes.len())
        } else {
            dicts
                .sizes
                .iter()
                .filter(|(_, s)| {
                    s.non_isomorphic + s.table_asymmetric + s.triangle_open + s.classification_failures > 0
                })
                .map(|(size, s)| {
                    format!(
                        "size {size}: {} non-isomorphic, {} asymmetric, {} open, {} unclassified",
                        s.non_isomorphic, s.table_asymmetric, s.triangle_open, s.classification_failures
                    )
                })
                .collect::<Vec<_>>()
                .join("; ")
        },
    ));
    tables.push(Table {
        title: format!("Dictionary graphs, D={dim}"),
        anchor: "canonical dictionary graphs".into(),
        header: vec!["size".into(), "dictionaries".into(), "unique".into(), "non-isomorphic".into(), "assignments:count".into()],
        rows,
    });

    Ok(VerificationReport { schema_version: SCHEMA_VERSION, dim, k_max, grouping, checks, tables })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(d: u32, k: u32) -> VerificationReport {
        run_verify_all(d, k, Grouping::Exact).unwrap()
    }

    #[test]
    fn trivial_one_dimensional_run() {
        let r = run(1, 1);
        assert!(!r.has_failures(), "{}", r.to_markdown());
        assert_eq!(r.count(Status::Flagged), 0);
    }

    #[test]
    fn d2_matches_reference() {
        let r = run(2, 4);
        assert!(!r.has_failures(), "{}", r.to_markdown());
        assert_eq!(r.check("subset-counts").unwrap().status, Status::Pass);
        assert_eq!(r.check("phi-validity").unwrap().status, Status::Pass);
    }

    #[test]
    fn d3_k2_sums() {
        let r = run(3, 2);
        assert!(!r.has_failures());
        let row = &r.tables[1].rows[1];
        assert_eq!(row[2], "8:252 16:504 24:756");
    }

    #[test]
    fn check_order_is_fixed() {
        let names: Vec<_> = run(2, 2).checks.into_iter().map(|c| c.name).collect();
        assert_eq!(
            names,
            [
                "enumeration",
                "subset-counts",
                "subset-sums",
                "upsilon",
                "phi-validity",
                "monotonicity",
                "orthotopes",
                "subset-generators",
                "dictionary-graphs"
            ]
        );
    }

    #[test]
    fn emitters() {
        let r = run(2, 3);
        let json = r.to_json();
        assert_eq!(VerificationReport::from_json(&json).unwrap().to_json(), json);
        let csv = r.to_csv().unwrap();
        assert_eq!(csv.lines().count(), r.checks.len() + 1);
        let md = r.to_markdown();
        assert_eq!(md.matches("\n## ").count(), r.tables.len() + 1);
    }

    #[test]
    fn cap_and_zero_k() {
        assert!(matches!(run_verify_all(3, 9, Grouping::Exact), Err(Error::EnumerationTooLarge { .. })));
        assert!(run_verify_all(2, 0, Grouping::Exact).is_err());
    }

    #[test]
    fn mismatched_schema_rejected() {
        let json = run(1, 1).to_json().replace("\"schema_version\": 1", "\"schema_version\": 99");
        assert!(VerificationReport::from_json(&json).is_err());
    }
}
