use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};
use zsphere_core::catalog::{
    catalog_to_json, format_radius, size_histogram, verify_sums, Catalog, Grouping, Subset, ENUMERATION_CAP_BITS,
};
use zsphere_core::dict_graph::{cayley_graph, centrality_vector, classify_canonical, dict_sweep, CayleyGraph};
use zsphere_core::equiv::{self, validity_fractions, PhiParams};
use zsphere_core::geometry::{coplanes_of, mirror_coplane, verify_orthotope_sums, Coplane};
use zsphere_core::projection::{self, project_into};
use zsphere_core::report::run_verify_all;
use zsphere_core::structure::{extract_sg, known_sgs, match_known, round_trip, Dictionary};
use zsphere_core::{CurveParams, MortonCode};

use crate::cache::CatalogCache;
use crate::{Curve, GraphFormat, Pick, TableFormat};

fn params(c: Curve) -> Result<CurveParams> {
    Ok(CurveParams::new(c.dim, c.k)?)
}

fn print_json(v: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn select<'a>(cat: &'a Catalog, pick: Pick) -> Result<Vec<&'a Subset>> {
    if pick.all {
        return Ok(cat.subsets().iter().collect());
    }
    if let Some(r) = pick.radius {
        return Ok(cat.nearest_radius(r).into_iter().collect());
    }
    if let Some(m) = pick.member {
        return match cat.subset_of(m) {
            Some(t) => Ok(vec![t]),
            None => bail!("{m} is outside {}", cat.params()),
        };
    }
    bail!("choose a subset with --radius, --member or --all")
}

fn dictionary_json(d: &Dictionary) -> Value {
    Value::Object(d.letters().map(|(v, b)| (v.to_string(), Value::String(b.to_string()))).collect())
}

fn subset_json(t: &Subset) -> Value {
    json!({ "radius": t.radius, "size": t.size(), "first": t.elements[0] })
}

pub fn project(c: Curve, value: u64, trace: bool) -> Result<bool> {
    let pr = projection::project(&MortonCode::new(value, params(c)?)?);
    let mut out = json!({
        "dim": c.dim,
        "k": c.k,
        "value": value,
        "coords": pr.point.coords,
        "radius": pr.point.radius,
    });
    if trace {
        out["trace"] = serde_json::to_value(&pr.trace)?;
    }
    print_json(&out)?;
    Ok(true)
}

pub fn cloud(c: Curve, out: Option<&Path>) -> Result<bool> {
    let p = params(c)?;
    if p.bits() > ENUMERATION_CAP_BITS {
        bail!("D·K = {} exceeds the cap of {ENUMERATION_CAP_BITS} bits", p.bits());
    }
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    let header: Vec<String> = (0..c.dim).map(|d| format!("coord_{d}")).collect();
    writeln!(w, "value,{},radius", header.join(","))?;
    let mut coords = vec![0.0; c.dim as usize];
    let mut line = String::new();
    for v in 0..p.cardinality() {
        let r = project_into(p, v, &mut coords);
        line.clear();
        let _ = write!(line, "{v}");
        for x in &coords {
            let _ = write!(line, ",{x:?}");
        }
        let _ = write!(line, ",{}", format_radius(r));
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(true)
}

pub fn subsets(cache: &CatalogCache, c: Curve, json: Option<&Path>, histogram: bool, verify: bool) -> Result<bool> {
    let cat = cache.load(params(c)?)?;
    if let Some(path) = json {
        write_file(path, &catalog_to_json(&cat))?;
    }
    if histogram {
        println!("size\tcount");
        for (size, count) in size_histogram(&cat) {
            println!("{size}\t{count}");
        }
    }
    let mut ok = true;
    if verify {
        let r = verify_sums(&cat)?;
        for f in r.failures() {
            println!("FAIL size {} first {}: sum {} expected {}", f.size, f.first, f.sum, f.expected);
        }
        println!("Ψ = {}, Σ|T|/2^D = {}, Υ = {}", r.psi, r.counted, r.upsilon);
        ok = r.all_passed();
        println!("{}", if ok { "sums verified" } else { "sum verification failed" });
    }
    if json.is_none() && !histogram && !verify {
        let mut out = BufWriter::new(io::stdout().lock());
        for t in cat.subsets() {
            let elements: Vec<String> = t.elements.iter().map(u64::to_string).collect();
            writeln!(out, "{}\t{}\t{}", format_radius(t.radius), t.size(), elements.join(","))?;
        }
    }
    Ok(ok)
}

pub fn phi(dim: u32, from: u32, to: u32, value: u64) -> Result<bool> {
    println!("{}", equiv::phi(value, PhiParams::new(dim, from, to)?)?);
    Ok(true)
}

pub fn phi_verify(cache: &CatalogCache, dim: u32, from: u32, to: u32, sizes: &[usize], format: TableFormat) -> Result<bool> {
    let pp = PhiParams::new(dim, from, to)?;
    let source = cache.load(CurveParams::new(dim, from)?)?;
    let dest = match CurveParams::new(dim, to)? {
        p if p.bits() <= ENUMERATION_CAP_BITS => Some(cache.load(p)?),
        _ => None,
    };
    let r = validity_fractions(pp, &source, dest.as_ref())?;
    let rows: Vec<(usize, Option<usize>, usize)> = r
        .fractions
        .iter()
        .filter(|(s, _)| sizes.is_empty() || sizes.contains(s))
        .map(|(&s, f)| (s, f.valid, f.total))
        .collect();
    match format {
        TableFormat::Json => print_json(&json!({
            "dim": dim,
            "from": from,
            "to": to,
            "omega": pp.omega(),
            "evaluated": dest.is_some(),
            "sum_failures": r.sum_failures(),
            "fractions": rows.iter().map(|(s, v, t)| json!({ "size": s, "valid": v, "total": t })).collect::<Vec<_>>(),
        }))?,
        TableFormat::Csv => {
            println!("size,valid,total");
            for (s, v, t) in rows {
                println!("{s},{},{t}", v.map_or(String::new(), |v| v.to_string()));
            }
        }
    }
    Ok(r.sum_failures() == 0)
}

fn coplane_json(c: &Coplane) -> Value {
    json!({ "dims": [c.dims.0, c.dims.1], "fixed_value": c.fixed_dim_value, "arity": c.arity(), "members": c.members })
}

pub fn coplanes(cache: &CatalogCache, c: Curve, value: u64) -> Result<bool> {
    let p = params(c)?;
    let cat = cache.load(p)?;
    let Some(t) = cat.subset_of(value) else {
        bail!("{value} is outside {p}");
    };
    let planes = coplanes_of(p, value, t)?;
    let mut out = Vec::new();
    let mut closed = true;
    for plane in &planes {
        let mut entry = coplane_json(plane);
        if p.dim() == 3 {
            let m = mirror_coplane(p, plane, t)?;
            closed &= m.escaped.is_empty();
            entry["mirror"] = coplane_json(&m.coplane);
            entry["mirror_escaped"] = json!(m.escaped);
        }
        out.push(entry);
    }
    print_json(&json!({ "value": value, "subset": subset_json(t), "coplanes": out }))?;
    Ok(closed)
}

pub fn orthotopes(cache: &CatalogCache, c: Curve, pick: Pick) -> Result<bool> {
    let p = params(c)?;
    let cat = cache.load(p)?;
    let mut ok = true;
    let mut out = Vec::new();
    for t in select(&cat, pick)? {
        let r = verify_orthotope_sums(p, t)?;
        ok &= r.all_passed();
        let mut entry = subset_json(t);
        entry["psi"] = json!(r.psi);
        entry["orbits"] = json!(r
            .sums
            .iter()
            .map(|o| json!({ "elements": o.orbit, "sum": o.sum.to_string(), "passed": o.passed }))
            .collect::<Vec<_>>());
        entry["escaped"] = json!(r.escaped);
        out.push(entry);
    }
    print_json(&Value::Array(out))?;
    Ok(ok)
}

pub fn sg(cache: &CatalogCache, c: Curve, pick: Pick, check_appendix: bool) -> Result<bool> {
    let p = params(c)?;
    let cat = cache.load(p)?;
    let known = known_sgs();
    let mut ok = true;
    let mut out = BufWriter::new(io::stdout().lock());
    for t in select(&cat, pick)? {
        let g = extract_sg(p, &t.elements)?;
        ok &= round_trip(&g, &t.elements);
        writeln!(out, "# radius {} size {} first {}", format_radius(t.radius), t.size(), t.elements[0])?;
        writeln!(out, "# dictionary {}", g.dictionary())?;
        if check_appendix {
            let catalogued = known.iter().any(|k| k.dim == p.dim() && k.size == t.size());
            match match_known(&g, &known) {
                Some(v) => writeln!(out, "# known generator {v}")?,
                None if catalogued => {
                    ok = false;
                    writeln!(out, "# no known generator matches")?
                }
                None => writeln!(out, "# no known generators of this size")?,
            }
        }
        writeln!(out, "{}", g.to_grid())?;
    }
    Ok(ok)
}

fn graph_json(g: &CayleyGraph) -> Value {
    json!({
        "nodes": g.nodes.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
        "edges": g.edges.iter().map(|e| json!({ "a": e.a.to_string(), "b": e.b.to_string(), "label": e.label.to_string() })).collect::<Vec<_>>(),
        "centrality": centrality_vector(g),
    })
}

pub fn dict_graph(
    cache: &CatalogCache,
    c: Curve,
    pick: Pick,
    classify: bool,
    all_pairs: bool,
    format: GraphFormat,
) -> Result<bool> {
    if all_pairs {
        let cats = (1..=c.k).map(|k| cache.load(CurveParams::new(c.dim, k)?)).collect::<Result<Vec<_>>>()?;
        let sweep = dict_sweep(&cats.iter().collect::<Vec<_>>())?;
        print_json(&serde_json::to_value(&sweep)?)?;
        return Ok(sweep.passed());
    }
    let p = params(c)?;
    let cat = cache.load(p)?;
    let chosen = if pick.any() { select(&cat, pick)? } else { cat.subsets().iter().collect() };
    let mut seen = BTreeSet::new();
    let mut dicts = Vec::new();
    for t in chosen {
        let d = extract_sg(p, &t.elements)?.dictionary().clone();
        if seen.insert(d.to_string()) {
            dicts.push(d);
        }
    }
    let mut ok = true;
    let mut out = Vec::new();
    for d in &dicts {
        let g = cayley_graph(d);
        match format {
            GraphFormat::Dot => println!("// dictionary {d}\n{}", g.to_dot()),
            GraphFormat::Json => {
                let mut entry = json!({ "size": d.size(), "dictionary": dictionary_json(d), "graph": graph_json(&g) });
                if classify {
                    match classify_canonical(d) {
                        Ok(cls) => {
                            ok &= cls.count_matches();
                            entry["assignments"] = json!(cls
                                .assignments
                                .iter()
                                .map(|a| a.iter().map(|(v, s)| (v.to_string(), s.to_string())).collect::<BTreeMap<_, _>>())
                                .collect::<Vec<_>>());
                        }
                        Err(e) => {
                            ok = false;
                            entry["classification_error"] = json!(e.to_string());
                        }
                    }
                }
                out.push(entry);
            }
        }
    }
    if format == GraphFormat::Json {
        print_json(&Value::Array(out))?;
    }
    Ok(ok)
}

pub fn verify_all(
    grouping: Grouping,
    dim: u32,
    k_max: u32,
    json: Option<&Path>,
    markdown: Option<&Path>,
    csv: Option<&Path>,
) -> Result<bool> {
    let report = run_verify_all(dim, k_max, grouping)?;
    if let Some(p) = json {
        write_file(p, &report.to_json())?;
    }
    if let Some(p) = markdown {
        write_file(p, &report.to_markdown())?;
    }
    if let Some(p) = csv {
        write_file(p, &report.to_csv()?)?;
    }
    if json.is_none() && markdown.is_none() && csv.is_none() {
        print!("{}", report.to_markdown());
    } else {
        for c in &report.checks {
            println!("{:<8} {}", c.status.to_string(), c.name);
        }
    }
    Ok(!report.has_failures())
}
