//! Acceptance gate: one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use zsphere_core::catalog::{enumerate, size_histogram, verify_sums, Catalog, Grouping};
use zsphere_core::dict_graph::{cayley_graph, cayley_table, classify_canonical, dict_sweep, graphs_isomorphic, Slot};
use zsphere_core::equiv::{map_subset, omega, phi, validity_fractions, PhiParams};
use zsphere_core::geometry::{apply_action, orthotope_decompose, verify_orthotope_sums, GroupAction};
use zsphere_core::morton::{from_bit_matrix, to_bit_matrix};
use zsphere_core::projection::{bit_distance, project, radius};
use zsphere_core::reference;
use zsphere_core::report::run_verify_all;
use zsphere_core::structure::{cross_dimension_sgs, cumulative_xor, cumulative_xor_rows_check, extract_sg, sg_sweep, Dictionary, Var};
use zsphere_core::{Bits, CurveParams, MortonCode};

type Outcome = Vec<String>;

fn params(d: u32, k: u32) -> CurveParams {
    CurveParams::new(d, k).unwrap()
}

fn catalog(d: u32, k: u32) -> Catalog {
    enumerate(params(d, k), Grouping::Exact).unwrap()
}

fn close(errs: &mut Outcome, what: &str, got: f64, want: f64, tol: f64) {
    if (got - want).abs() > tol {
        errs.push(format!("{what}: got {got}, want {want} (tol {tol:e})"));
    }
}

fn same<T: PartialEq + std::fmt::Debug>(errs: &mut Outcome, what: &str, got: T, want: T) {
    if got != want {
        errs.push(format!("{what}: got {got:?}, want {want:?}"));
    }
}

fn within(errs: &mut Outcome, what: &str, elapsed: Duration, limit: Duration) {
    if elapsed > limit {
        errs.push(format!("{what} took {elapsed:?}, limit {limit:?}"));
    }
}

/// Shared sweep catalogs: `D = 2, K ≤ 8` and `D = 3, K ≤ 6`.
struct Sweeps {
    d2: Vec<Catalog>,
    d3: Vec<Catalog>,
}

impl Sweeps {
    fn d3_upto(&self, k: u32) -> Vec<&Catalog> {
        self.d3.iter().take(k as usize).collect()
    }
}

fn criterion_1() -> Outcome {
    let mut e = Vec::new();
    let start = Instant::now();
    let pr = project(&MortonCode::new(47, params(2, 3)).unwrap());
    let elapsed = start.elapsed();
    let t = &pr.trace[0];
    close(&mut e, "BD_X", t.raw_bd[0], 0.875, 1e-6);
    close(&mut e, "BD_Y", t.raw_bd[1], -0.125, 1e-6);
    close(&mut e, "H", t.hypotenuse, 0.883883, 1e-6);
    close(&mut e, "norm BD_X", t.normalized[0], 0.989949, 1e-6);
    close(&mut e, "norm BD_Y", t.normalized[1], -0.141421, 1e-6);
    close(&mut e, "acc X", pr.point.coords[0], 0.868714, 1e-6);
    close(&mut e, "acc Y", pr.point.coords[1], 0.222227, 1e-6);
    within(&mut e, "projection", elapsed, Duration::from_millis(1));

    // the printed accumulations follow from weights truncated to five decimals
    let truncated = [0.57142, 0.28571, 0.14285];
    let acc: Vec<f64> = (0..2)
        .map(|d| pr.trace.iter().zip(truncated).map(|(l, w)| l.normalized[d] * w).sum())
        .collect();
    println!("    exact accumulation ({:.7}, {:.7}); with weights {truncated:?}: ({:.6}, {:.6})", pr.point.coords[0], pr.point.coords[1], acc[0], acc[1]);
    e
}

fn criterion_2() -> Outcome {
    let mut e = Vec::new();
    let p = params(2, 5);
    close(&mut e, "radius(358)", radius(&MortonCode::new(358, p).unwrap()), 0.6774193548387097, 1e-12);
    close(&mut e, "radius(427)", radius(&MortonCode::new(427, p).unwrap()), 0.33208795317357703, 1e-12);

    let p = params(3, 5);
    if MortonCode::new(47606, p).is_ok() {
        e.push("47606 should lie outside X^3_5".into());
    }
    let cat = catalog(3, 5);
    let captions: [(f64, &[u64]); 5] = [
        (0.03225806451612912, &[7606, 21650, 4095, 18139, 14628, 28672, 11117, 25161]),
        (
            0.8551178077162921,
            &[4944, 23156, 281, 18493, 4832, 23492, 169, 18829, 13938, 32598, 9275, 27935, 14274, 32486, 9611, 27823],
        ),
        (
            0.7861258176340167,
            &[
                6235, 20863, 2578, 17206, 7744, 22372, 5229, 23881, 1572, 20224, 3081, 17709, 15058, 29686, 12543, 31195, 8886,
                27538, 10395, 25023, 15561, 30189, 11904, 26532,
            ],
        ),
        (
            0.8748984638909747,
            &[
                6440, 20492, 2913, 16965, 8171, 22223, 3490, 17542, 8157, 22265, 5272, 23996, 1745, 20469, 3476, 17584, 15183,
                29291, 12298, 31022, 8771, 27495, 10502, 24610, 15225, 29277, 10544, 24596, 15802, 29854, 12275, 26327,
            ],
        ),
        (0.8582254615975, &FORTY_EIGHT),
    ];
    for (r, list) in captions {
        for &x in list {
            close(&mut e, &format!("radius({x})"), radius(&MortonCode::new(x, p).unwrap()), r, 1e-10);
        }
        let mut sorted = list.to_vec();
        sorted.sort_unstable();
        if !cat.is_subset(&sorted) {
            e.push(format!("caption list at {r} is not exactly one subset"));
        }
    }
    e
}

const FORTY_EIGHT: [u64; 48] = [
    7015, 21059, 4130, 22790, 619, 19279, 2350, 16394, 7036, 21080, 4116, 22832, 605, 19321, 2357, 16401, 5882, 24542, 5847,
    24563, 1182, 19898, 1203, 19863, 12904, 31564, 12869, 31585, 8204, 26920, 8225, 26885, 16366, 30410, 13446, 32162, 9935,
    28651, 11687, 25731, 16373, 30417, 13488, 32148, 9977, 28637, 11708, 25752,
];

fn criterion_3() -> Outcome {
    let mut e = Vec::new();
    let start = Instant::now();
    for d in [2, 3] {
        for k in 1..=4 {
            let h = size_histogram(&catalog(d, k));
            let want: BTreeMap<usize, usize> = reference::subset_counts(d, k).unwrap().iter().copied().collect();
            same(&mut e, &format!("histogram D={d} K={k}"), &h, &want);
            if d == 3 {
                same(&mut e, &format!("size 40 at K={k}"), h.get(&40), None);
            }
        }
    }
    within(&mut e, "histograms", start.elapsed(), Duration::from_secs(30));
    e
}

fn criterion_4(s: &Sweeps) -> Outcome {
    let mut e = Vec::new();
    for (d, cats) in [(2, &s.d2), (3, &s.d3)] {
        for k in 1..=4u32 {
            let r = verify_sums(&cats[k as usize - 1]).unwrap();
            same(&mut e, &format!("sum failures D={d} K={k}"), r.failures().count(), 0);
            let by_size = r.sums_by_size();
            for &(size, sum) in reference::subset_sums(d, k).unwrap() {
                same(&mut e, &format!("sum D={d} K={k} size {size}"), by_size.get(&size).copied().flatten(), Some(sum));
            }
            same(&mut e, &format!("counted vs Υ D={d} K={k}"), r.counted, r.upsilon);
            if let Some(u) = reference::upsilon(d, k) {
                same(&mut e, &format!("Υ D={d} K={k}"), r.counted, u);
            }
        }
    }
    e
}

fn criterion_5() -> Outcome {
    let mut e = Vec::new();
    for &(diff, d, want) in reference::OMEGA {
        same(&mut e, &format!("Ω D={d} B−S={diff}"), omega(d, diff).unwrap(), want);
    }
    same(&mut e, "Ω rows", reference::OMEGA.len(), 12);
    e
}

fn criterion_6() -> Outcome {
    let mut e = Vec::new();
    let p = PhiParams::new(1, 3, 8).unwrap();
    let got: Vec<u64> = (0..8).map(|x| phi(x, p).unwrap()).collect();
    same(&mut e, "φ D=1 3→8", got.as_slice(), &reference::PHI_D1_S3_B8[..]);
    let p = PhiParams::new(2, 2, 4).unwrap();
    let got: Vec<u64> = (0..16).map(|x| phi(x, p).unwrap()).collect();
    same(&mut e, "φ D=2 2→4", got.as_slice(), &reference::PHI_D2_S2_B4[..]);

    let t = [99, 327, 42, 270, 85, 369, 28, 312, 199, 483, 142, 426, 241, 469, 184, 412];
    let m = map_subset(&t, PhiParams::new(3, 3, 4).unwrap()).unwrap();
    same(
        &mut e,
        "Example 3 image",
        m.image.as_slice(),
        &[795, 2623, 338, 2166, 685, 2953, 228, 2496, 1599, 3867, 1142, 3410, 1929, 3757, 1472, 3300][..],
    );
    same(&mut e, "source sum", m.source_sum, 4088);
    same(&mut e, "image sum", m.image_sum, 32760);
    e
}

fn criterion_7() -> Outcome {
    let mut e = Vec::new();
    let start = Instant::now();
    let cat = catalog(6, 3);
    let hits: Vec<_> = cat.subsets().iter().filter(|t| t.size() == 2816).collect();
    if hits.is_empty() {
        e.push("no subset of size 2816 in X^6_3".into());
    }
    for t in &hits {
        same(&mut e, "Σ T", t.sum(), 369_097_344);
        let m = map_subset(&t.elements, PhiParams::new(6, 3, 5).unwrap()).unwrap();
        same(&mut e, "Σ φ(T)", m.image_sum, 1_511_828_486_784);
    }
    within(&mut e, "X^6_3", start.elapsed(), Duration::from_secs(300));
    println!("    {} subsets of size 2816 in X^6_3", hits.len());
    e
}

fn criterion_8(s: &Sweeps) -> Outcome {
    let mut e = Vec::new();
    for src in 1..=4u32 {
        for dst in src + 1..=6 {
            let p = PhiParams::new(3, src, dst).unwrap();
            let r = validity_fractions(p, &s.d3[src as usize - 1], Some(&s.d3[dst as usize - 1])).unwrap();
            same(&mut e, &format!("sum law S={src} B={dst}"), r.sum_failures(), 0);
            if let Some((v, t)) = reference::validity(3, 8, src, dst) {
                same(&mut e, &format!("size 8 S={src} B={dst}"), r.fraction(8).map(|f| (f.valid, f.total)), Some((Some(v), t)));
            }
            if (src, dst) == (3, 4) {
                same(&mut e, "size 24 S=3 B=4", r.fraction(24).map(|f| f.to_string()), Some("7/9".into()));
            }
        }
    }
    for src in 1..6u32 {
        for dst in src + 1..=6 {
            let p = PhiParams::new(2, src, dst).unwrap();
            let r = validity_fractions(p, &s.d2[src as usize - 1], Some(&s.d2[dst as usize - 1])).unwrap();
            for (size, f) in &r.fractions {
                same(&mut e, &format!("D=2 size {size} S={src} B={dst}"), f.valid, Some(f.total));
            }
        }
    }
    e
}

fn criterion_9(s: &Sweeps) -> Outcome {
    let mut e = Vec::new();
    let cat = &s.d3[4];
    let p = cat.params();
    match cat.subset_of(605) {
        Some(t) => {
            close(&mut e, "48-subset radius", t.radius, 0.8582254615975, 1e-10);
            let dec = orthotope_decompose(p, t);
            let got: BTreeSet<Vec<u64>> = dec.orbits.into_iter().collect();
            let want: BTreeSet<Vec<u64>> = [
                [605, 4116, 9935, 13446, 19321, 22832, 28651, 32162],
                [619, 4130, 9977, 13488, 19279, 22790, 28637, 32148],
                [1182, 5847, 8204, 12869, 19898, 24563, 26920, 31585],
                [1203, 5882, 8225, 12904, 19863, 24542, 26885, 31564],
                [2350, 7015, 11708, 16373, 16394, 21059, 25752, 30417],
                [2357, 7036, 11687, 16366, 16401, 21080, 25731, 30410],
            ]
            .into_iter()
            .map(|o| o.to_vec())
            .collect();
            same(&mut e, "orthotopes", &got, &want);
            let r = verify_orthotope_sums(p, t).unwrap();
            for o in &r.sums {
                same(&mut e, "orthotope sum", o.sum, 131_068);
            }
        }
        None => e.push("605 not enumerated".into()),
    }
    let mut violations = 0;
    for (d, cats) in [(2, &s.d2), (3, &s.d3)] {
        for c in cats.iter().take(4) {
            for t in c.subsets() {
                violations += !verify_orthotope_sums(c.params(), t).unwrap().all_passed() as usize;
            }
        }
        same(&mut e, &format!("orthotope violations D={d}"), violations, 0);
    }
    e
}

fn letters(s: &str) -> Vec<Var> {
    s.split(',').map(|v| v.trim().parse().unwrap()).collect()
}

fn criterion_10(s: &Sweeps) -> Outcome {
    let mut e = Vec::new();
    let sg = extract_sg(params(2, 4), &[54, 57, 99, 108, 147, 156, 198, 201]).unwrap();
    same(&mut e, "path X", sg.path(0), letters("X,A,A,A,X,A,A,A"));
    same(&mut e, "path Y", sg.path(1), letters("X,A,B,A,X,A,B,A"));
    let dict: Vec<String> = sg.dictionary().letters().map(|(_, b)| b.to_string()).collect();
    same(&mut e, "dictionary", dict, vec!["0011".to_string(), "1100".into()]);

    for (d, cats, table) in [
        (2, s.d2.iter().collect::<Vec<_>>(), reference::DICTIONARIES_D2),
        (3, s.d3_upto(5), reference::DICTIONARIES_D3),
    ] {
        let sweep = sg_sweep(&cats).unwrap();
        if !sweep.conforms() {
            e.push(format!("D={d} sweep does not conform: {:?}", sweep.sizes));
        }
        let got: Vec<(usize, Vec<usize>, usize)> = sweep
            .sizes
            .iter()
            .map(|(&size, s)| (size, s.dictionary_sizes.keys().copied().collect(), s.classes))
            .collect();
        let want: Vec<(usize, Vec<usize>, usize)> = table.iter().map(|&(s, d, c)| (s, d.to_vec(), c)).collect();
        same(&mut e, &format!("dictionary-size table D={d}"), got, want);
        let uncatalogued: usize = sweep.sizes.values().map(|s| s.uncatalogued).sum();
        same(&mut e, &format!("uncatalogued D={d}"), uncatalogued, 0);
    }

    let shared = Dictionary::parse("A=0101, B=1010").unwrap();
    for (d, size, rows) in cross_dimension_sgs() {
        if !cumulative_xor_rows_check(&rows, &shared).unwrap() {
            e.push(format!("cumulative XOR D={d} size {size}"));
        }
    }

    let table = Dictionary::parse("A=0100, B=1011").unwrap();
    let rows = &cross_dimension_sgs()[0].2;
    let running: Vec<String> = cumulative_xor(rows, &table)
        .unwrap()
        .iter()
        .map(|r| r.iter().map(Bits::to_string).collect::<Vec<_>>().join(","))
        .collect();
    let want = "0100,0100,0000 0000,0000,1111 0100,0100,1111 0000,1111,0000 0100,1011,0000 0000,1111,1111 \
                0100,1011,1111 1011,0100,0000 1111,0000,0000 1011,0100,1111 1111,0000,1111 1011,1011,0000 \
                1111,1111,0000 1011,1011,1111 1111,1111,1111";
    same(&mut e, "running XOR", running.join(" "), want.to_string());
    e
}

const DICT1_TABLE: &str = "\
A: = C B E D _ A
B: C = A _ X E B
C: B A = _ _ D C
D: E _ _ = A _ D
E: D X _ A = B E
X: _ E D _ B = X
=: A B C D E X =";

const DICT2_TABLE: &str = "\
A: = C B X _ D A
B: C = A _ X E B
C: B A = E D _ C
D: X _ E = C A D
E: _ X D C = B E
X: D E _ A B = X
=: A B C D E X =";

/// Compares a computed Cayley table with a printed one cell by cell.
fn table_cells(e: &mut Outcome, what: &str, d: &Dictionary, printed: &str) {
    let t = cayley_table(d);
    let cols: Vec<String> = t.vars.iter().map(Var::to_string).collect();
    for line in printed.lines() {
        let (row, cells) = line.split_once(": ").unwrap();
        let i = t.vars.iter().position(|v| v.to_string() == row).unwrap();
        for (j, cell) in cells.split(' ').enumerate() {
            let got = t.cells[i][j].map_or("_".to_string(), |v| v.to_string());
            if got != cell {
                e.push(format!("{what} cell ({row},{}): computed {got}, printed {cell}", cols[j]));
            }
        }
    }
}

/// Printed example dictionaries with the slot options shown for each letter.
const EXAMPLES: &[&[(&str, &str)]] = &[
    &[("00110", "A1|A2"), ("11001", "A2|A1")],
    &[("01001", "A1|A2"), ("01110", "A3"), ("00111", "A2|A1"), ("10001", "B1")],
    &[("0110010", ""), ("0110001", ""), ("0000011", ""), ("1001110", "")],
    &[("000011", ""), ("000010", ""), ("000001", ""), ("111101", "")],
    &[("00011111", ""), ("00011110", ""), ("00000001", ""), ("11100001", "")],
    &[("00000010", "A2|A3"), ("00011110", "A1"), ("00011100", "A3|A2"), ("11111101", "B1|B2"), ("11100011", "B2|B1")],
    &[("0010", "A2|A3"), ("0111", "A1"), ("0101", "A3|A2"), ("1101", "B1|B2"), ("1010", "B2|B1")],
    &[("00011", "A2|A3"), ("00111", "A3|A2"), ("00100", "A1"), ("11100", "B1|B2"), ("11000", "B2|B1")],
    &[("010100", "A1"), ("001101", "A2|A3"), ("011001", "A3|A2"), ("100110", "B2|B1"), ("110010", "B1|B2")],
    &[("00111", "A1|A2"), ("01001", "A2|A3"), ("01110", "A3|A1"), ("10001", "B3|B2"), ("11000", "B2|B1"), ("10110", "B1|B3")],
    &[
        ("00111000", "A1|A2"),
        ("01011111", "A2|A3"),
        ("01100111", "A3|A1"),
        ("10100000", "B1|B3"),
        ("10011000", "B3|B2"),
        ("11000111", "B2|B1"),
    ],
    &[("0010", "A1|A2"), ("0101", "A2|A3"), ("0111", "A3|A1"), ("1000", "B3|B2"), ("1101", "B2|B1"), ("1010", "B1|B3")],
    &[("00001", "A1|A2"), ("01111", "A2|A3"), ("01110", "A3|A1"), ("10000", "B1|B3"), ("10001", "B3|B2"), ("11110", "B2|B1")],
];

fn criterion_11(s: &Sweeps) -> Outcome {
    let mut e = Vec::new();
    let d1 = Dictionary::parse("A=0110100, B=0001011, C=0111111, D=1000000, E=1110100").unwrap();
    let d2 = Dictionary::parse("A=0011011, B=0101001, C=0110010, D=1100100, E=1010110").unwrap();
    table_cells(&mut e, "dictionary 1", &d1, DICT1_TABLE);
    table_cells(&mut e, "dictionary 2", &d2, DICT2_TABLE);
    same(&mut e, "dictionary 1 ≅ 2", graphs_isomorphic(&cayley_graph(&d1), &cayley_graph(&d2)), true);

    let mut cats: Vec<&Catalog> = s.d2.iter().collect();
    cats.extend(s.d3_upto(5));
    let sweep = dict_sweep(&cats).unwrap();
    if !sweep.passed() {
        e.push(format!("dictionary sweep: {:?}", sweep.sizes));
    }
    let counts: BTreeMap<usize, Vec<usize>> =
        sweep.sizes.iter().map(|(&size, s)| (size, s.assignment_counts.keys().copied().collect())).collect();
    let want: BTreeMap<usize, Vec<usize>> =
        [(2, vec![1]), (4, vec![2]), (6, vec![2]), (7, vec![2]), (8, vec![6])].into_iter().collect();
    same(&mut e, "assignment counts", counts, want);

    for (i, example) in EXAMPLES.iter().enumerate() {
        let text: Vec<String> = example
            .iter()
            .enumerate()
            .map(|(j, (bits, _))| format!("{}={bits}", Var::Letter(j as u8)))
            .collect();
        let d = Dictionary::parse(&text.join(", ")).unwrap();
        let c = match classify_canonical(&d) {
            Ok(c) => c,
            Err(err) => {
                e.push(format!("example {i}: {err}"));
                continue;
            }
        };
        if !c.count_matches() {
            e.push(format!("example {i}: {} assignments", c.assignments.len()));
        }
        let options = c.options();
        for (j, (_, printed)) in example.iter().enumerate() {
            if printed.is_empty() {
                continue;
            }
            let got: BTreeSet<Slot> = options[&Var::Letter(j as u8)].iter().copied().collect();
            let shown: BTreeSet<Slot> = printed.split('|').map(|s| s.parse().unwrap()).collect();
            // size-8 columns print only the first options
            let ok = if d.size() == 8 { shown.is_subset(&got) } else { shown == got };
            if !ok {
                e.push(format!("example {i} letter {j}: slots {got:?}, printed {printed}"));
            }
        }
    }
    e
}

fn run_props(e: &mut Outcome, name: &str, cases: u32, f: impl Fn(&mut TestRunner) -> Result<(), String>) {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    if let Err(msg) = f(&mut runner) {
        e.push(format!("{name}: {msg}"));
    }
}

fn criterion_12() -> Outcome {
    let mut e = Vec::new();

    let mut roundtrip_failures = 0u64;
    for d in 1..=16u32 {
        for k in 1..=16 / d {
            let p = params(d, k);
            for v in 0..p.cardinality() {
                let code = MortonCode::new(v, p).unwrap();
                roundtrip_failures += (from_bit_matrix(&to_bit_matrix(&code)) != code) as u64;
            }
        }
    }
    same(&mut e, "Morton round-trip failures", roundtrip_failures, 0);

    run_props(&mut e, "weight normalization", 256, |r| {
        r.run(&(1u32..=6, 1u32..=10, any::<u64>()), |(d, k, seed)| {
            prop_assume!(d * k <= 63);
            let p = params(d, k);
            let pr = project(&MortonCode::new(seed & p.max_value(), p).unwrap());
            let total: f64 = pr.trace.iter().map(|l| l.weight).sum();
            prop_assert!((total - 1.0).abs() <= 1e-12, "Σw = {total}");
            Ok(())
        })
        .map_err(|f| f.to_string())
    });

    run_props(&mut e, "BitDistance lower bound", 512, |r| {
        r.run(&(1u32..=52, any::<u64>()), |(len, v)| {
            let bits = Bits::new(v & ((1u64 << len) - 1), len);
            let bd = bit_distance(&bits).unwrap();
            prop_assert!(bd != 0.0 && bd.abs() >= 2f64.powi(-(len as i32)));
            Ok(())
        })
        .map_err(|f| f.to_string())
    });

    run_props(&mut e, "catalog partition", 24, |r| {
        r.run(&(1u32..=4, 1u32..=4), |(d, k)| {
            let p = params(d, k);
            let cat = enumerate(p, Grouping::Exact).unwrap();
            let mut seen = vec![false; p.cardinality() as usize];
            for t in cat.subsets() {
                for &x in &t.elements {
                    prop_assert!(!seen[x as usize]);
                    seen[x as usize] = true;
                    prop_assert_eq!(radius(&MortonCode::new(x, p).unwrap()).to_bits(), t.radius.to_bits());
                }
            }
            prop_assert!(seen.iter().all(|&s| s));
            Ok(())
        })
        .map_err(|f| f.to_string())
    });

    run_props(&mut e, "φ monotone with fixed corners", 512, |r| {
        r.run(&(1u32..=4, 1u32..=5, 0u32..=4, any::<u64>(), any::<u64>()), |(d, s, extra, a, b)| {
            let dst = s + extra;
            prop_assume!(d * dst <= 63);
            let p = PhiParams::new(d, s, dst).unwrap();
            let max = (1u64 << (d * s)) - 1;
            let (x, y) = (a & max, b & max);
            prop_assume!(x < y);
            prop_assert!(phi(x, p).unwrap() < phi(y, p).unwrap());
            prop_assert_eq!(phi(0, p).unwrap(), 0);
            prop_assert_eq!(phi(max, p).unwrap(), (1u64 << (d * dst)) - 1);
            Ok(())
        })
        .map_err(|f| f.to_string())
    });

    run_props(&mut e, "action algebra", 256, |r| {
        r.run(&(2usize..=4, 1u32..=5, any::<u64>(), any::<(usize, usize)>()), |(d, k, seed, (i, j))| {
            let (a, b) = (i % d, j % d);
            prop_assume!(a != b);
            let p = params(d as u32, k);
            let code = MortonCode::new(seed & p.max_value(), p).unwrap();
            let rot = GroupAction::rotation(d, a, b, 1).unwrap();
            prop_assert!(rot.pow(4).is_identity());
            prop_assert!(!rot.pow(2).is_identity());
            let neg = GroupAction::negation(d, &[a]).unwrap();
            let swap = GroupAction::swap(d, a, b).unwrap();
            for g in [&neg, &swap] {
                prop_assert!(g.compose(g).unwrap().is_identity());
                prop_assert_eq!(apply_action(g, &apply_action(g, &code).unwrap()).unwrap(), code);
            }
            let composed = rot.compose(&neg).unwrap();
            let stepwise = apply_action(&rot, &apply_action(&neg, &code).unwrap()).unwrap();
            prop_assert_eq!(apply_action(&composed, &code).unwrap(), stepwise);
            // permuting coordinates reorders the sum of squares
            prop_assert!((radius(&apply_action(&rot, &code).unwrap()) - radius(&code)).abs() <= 1e-12);
            Ok(())
        })
        .map_err(|f| f.to_string())
    });

    let report = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_verify_all(3, 3, Grouping::Exact).unwrap().to_json())
    };
    let one = report(1);
    same(&mut e, "report bytes, 1 vs 4 threads", &one == &report(4), true);
    same(&mut e, "report bytes, repeated run", &one == &report(1), true);
    e
}

/// Criteria that cannot pass as written, with the reason printed alongside.
const UNATTAINABLE: &[(usize, &str)] = &[
    (1, "printed accumulated coordinates use weights truncated to five decimals; the exact weights differ by up to 1.7e-5"),
    (11, "the printed dictionary 1 table leaves C⊕D, D⊕C, D⊕X, X⊕D empty although 0111111 ⊕ 1000000 = 1111111 = X"),
];

fn main() -> ExitCode {
    let start = Instant::now();
    let sweeps = Sweeps { d2: (1..=8).map(|k| catalog(2, k)).collect(), d3: (1..=6).map(|k| catalog(3, k)).collect() };
    println!("sweep catalogs enumerated in {:?}", start.elapsed());

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("projection golden values", Box::new(criterion_1)),
        ("radius golden values", Box::new(criterion_2)),
        ("subset-count tables", Box::new(criterion_3)),
        ("sum and Υ tables", Box::new(|| criterion_4(&sweeps))),
        ("Ω table", Box::new(criterion_5)),
        ("φ examples", Box::new(criterion_6)),
        ("2816-element subset of X^6_3", Box::new(criterion_7)),
        ("validity fractions", Box::new(|| criterion_8(&sweeps))),
        ("orthotopes", Box::new(|| criterion_9(&sweeps))),
        ("subset generators", Box::new(|| criterion_10(&sweeps))),
        ("dictionary graphs", Box::new(|| criterion_11(&sweeps))),
        ("property suite", Box::new(criterion_12)),
    ];

    let mut unexpected = Vec::new();
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        let t = Instant::now();
        let errors = run();
        let verdict = if errors.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {verdict}: {name} ({:.2?})", t.elapsed());
        for err in &errors {
            println!("    {err}");
        }
        if let Some((_, why)) = UNATTAINABLE.iter().find(|(c, _)| *c == n) {
            println!("    known: {why}");
        }
        if !errors.is_empty() {
            failed.push(n);
            if !UNATTAINABLE.iter().any(|(c, _)| *c == n) {
                unexpected.push(n);
            }
        }
    }
    let stale: Vec<usize> = UNATTAINABLE.iter().map(|(c, _)| *c).filter(|c| !failed.contains(c)).collect();
    println!("{}/{} criteria pass; failed {failed:?}", criteria.len() - failed.len(), criteria.len());
    if !unexpected.is_empty() || !stale.is_empty() {
        println!("unexpected failures {unexpected:?}; listed as unattainable but passing {stale:?}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
