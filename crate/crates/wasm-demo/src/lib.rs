//! WebAssembly bindings for the browser demo in `www/`.

use serde_json::json;
use wasm_bindgen::prelude::*;
use zsphere_core::catalog::{enumerate, format_radius, psi, Catalog, Grouping};
use zsphere_core::geometry::orthotope_decompose;
use zsphere_core::projection::{project, project_into};
use zsphere_core::structure::{extract_sg, known_sgs, match_known};
use zsphere_core::{CurveParams, MortonCode};

/// Largest `D·K` the demo will enumerate in the browser.
pub const DEMO_CAP_BITS: u32 = 16;

/// An enumerated `X^D_K` with its projected coordinates.
#[wasm_bindgen]
pub struct Demo {
    params: CurveParams,
    catalog: Catalog,
    coords: Vec<f64>,
}

#[wasm_bindgen]
impl Demo {
    /// Enumerates `X^D_K` for `D ∈ {2, 3}` and `D·K ≤ 16`.
    #[wasm_bindgen(constructor)]
    pub fn new(dim: u32, k: u32) -> Result<Demo, String> {
        if !(2..=3).contains(&dim) {
            return Err(format!("the demo draws D = 2 or 3, got {dim}"));
        }
        let params = CurveParams::new(dim, k).map_err(|e| e.to_string())?;
        if params.bits() > DEMO_CAP_BITS {
            return Err(format!("D·K = {} exceeds the demo cap of {DEMO_CAP_BITS}", params.bits()));
        }
        let catalog = enumerate(params, Grouping::Exact).map_err(|e| e.to_string())?;
        let d = dim as usize;
        let mut coords = vec![0.0; params.cardinality() as usize * d];
        for (v, chunk) in coords.chunks_mut(d).enumerate() {
            project_into(params, v as u64, chunk);
        }
        Ok(Demo { params, catalog, coords })
    }

    pub fn dim(&self) -> u32 {
        self.params.dim()
    }

    pub fn len(&self) -> u32 {
        self.params.cardinality() as u32
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn subset_count(&self) -> u32 {
        self.catalog.subsets().len() as u32
    }

    /// Projected coordinates, `D` per code, in code order.
    pub fn coords(&self) -> Vec<f64> {
        self.coords.clone()
    }

    /// Index of each code's subset (subsets ordered by radius).
    pub fn subset_ids(&self) -> Vec<u32> {
        (0..self.params.cardinality())
            .map(|v| self.catalog.subset_index_of(v).expect("every code is catalogued") as u32)
            .collect()
    }

    /// Code whose projected point is nearest to `(x, y)` in the first two
    /// coordinates after rotating by `angle` about the vertical axis.
    pub fn nearest(&self, x: f64, y: f64, angle: f64) -> u32 {
        let d = self.params.dim() as usize;
        let (s, c) = angle.sin_cos();
        let mut best = (f64::INFINITY, 0);
        for (v, p) in self.coords.chunks(d).enumerate() {
            let px = if d == 3 { p[0] * c + p[2] * s } else { p[0] };
            let dist = (px - x).powi(2) + (p[1] - y).powi(2);
            if dist < best.0 {
                best = (dist, v as u32);
            }
        }
        best.1
    }

    /// Running position after each level of the projection of `value`,
    /// starting at the origin: `(K + 1) · D` numbers.
    pub fn route(&self, value: u32) -> Result<Vec<f64>, String> {
        let code = MortonCode::new(value as u64, self.params).map_err(|e| e.to_string())?;
        let pr = project(&code);
        let d = self.params.dim() as usize;
        let mut pos = vec![0.0; d];
        let mut out = pos.clone();
        for level in &pr.trace {
            for (p, s) in pos.iter_mut().zip(&level.segment) {
                *p += s;
            }
            out.extend_from_slice(&pos);
        }
        Ok(out)
    }

    /// The subset containing `value` as JSON: radius, elements, sum checks,
    /// reflection orbits and the subset generator.
    pub fn subset_info(&self, value: u32) -> Result<String, String> {
        let p = self.params;
        let t = self
            .catalog
            .subset_of(value as u64)
            .ok_or_else(|| format!("{value} is outside {p}"))?;
        let sg = extract_sg(p, &t.elements).map_err(|e| e.to_string())?;
        let psi = psi(p.dim(), p.k()).map_err(|e| e.to_string())?;
        let orbits = orthotope_decompose(p, t);
        let known = match_known(&sg, &known_sgs());
        Ok(json!({
            "value": value,
            "index": self.catalog.subset_index_of(value as u64),
            "radius": format_radius(t.radius),
            "size": t.size(),
            "elements": t.elements,
            "sum": t.sum().to_string(),
            "expected_sum": (psi as u128 * t.size() as u128 >> p.dim()).to_string(),
            "orbits": orbits.orbits,
            "dictionary": sg.dictionary().to_string(),
            "generator": sg.to_grid(),
            "known_generator": known,
        })
        .to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cloud_shape() {
        let demo = Demo::new(3, 3).unwrap();
        assert_eq!(demo.len(), 512);
        assert_eq!(demo.coords().len(), 512 * 3);
        let ids = demo.subset_ids();
        assert_eq!(ids.len(), 512);
        assert_eq!(*ids.iter().max().unwrap() + 1, demo.subset_count());
    }

    #[test]
    fn rejects_unsupported() {
        assert!(Demo::new(1, 4).is_err());
        assert!(Demo::new(3, 6).is_err());
        assert!(Demo::new(2, 0).is_err());
    }

    #[test]
    fn route_ends_at_point() {
        let demo = Demo::new(2, 3).unwrap();
        let r = demo.route(47).unwrap();
        assert_eq!(r.len(), 8);
        assert_eq!(&r[..2], &[0.0, 0.0]);
        assert_eq!(&r[6..], &demo.coords()[94..96]);
        assert!(demo.route(64).is_err());
    }

    #[test]
    fn nearest_finds_own_point() {
        let demo = Demo::new(2, 4).unwrap();
        let c = demo.coords();
        for v in [0u32, 54, 201, 255] {
            let (x, y) = (c[2 * v as usize], c[2 * v as usize + 1]);
            assert_eq!(demo.nearest(x, y, 0.0), v);
        }
    }

    #[test]
    fn subset_info_json() {
        let demo = Demo::new(2, 4).unwrap();
        let v: serde_json::Value = serde_json::from_str(&demo.subset_info(54).unwrap()).unwrap();
        assert_eq!(v["size"], 8);
        assert_eq!(v["sum"], v["expected_sum"]);
        assert_eq!(v["known_generator"], 1);
        assert_eq!(v["orbits"].as_array().unwrap().len(), 2);
        assert!(v["generator"].as_str().unwrap().contains("X, X"));
    }
}
