//! On-disk catalog cache: one JSON file per `(D, K)` with a SHA-256 sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};
use zsphere_core::catalog::{catalog_from_json, catalog_to_json, enumerate, Catalog, Grouping};
use zsphere_core::projection::radius_of_value;
use zsphere_core::CurveParams;

const FORMAT_VERSION: &str = "catalog-v1";
const SPOT_CHECKS: u64 = 32;

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub struct CatalogCache {
    root: Option<PathBuf>,
    grouping: Grouping,
}

impl CatalogCache {
    pub fn new(root: Option<PathBuf>, grouping: Grouping) -> Self {
        Self { root, grouping }
    }

    pub fn grouping(&self) -> Grouping {
        self.grouping
    }

    /// Directory keyed by the grouping configuration.
    fn dir(&self) -> Option<PathBuf> {
        let key = format!("{FORMAT_VERSION} {}", serde_json::to_string(&self.grouping).expect("grouping serializes"));
        self.root.as_ref().map(|r| r.join(&hex_digest(key.as_bytes())[..16]))
    }

    pub fn path(&self, p: CurveParams) -> Option<PathBuf> {
        self.dir().map(|d| d.join(format!("d{}_k{}.json", p.dim(), p.k())))
    }

    /// Loads a verified cached catalog or enumerates and stores a fresh one.
    pub fn load(&self, p: CurveParams) -> Result<Catalog> {
        let Some(path) = self.path(p) else {
            return Ok(enumerate(p, self.grouping)?);
        };
        if let Some(c) = self.read(&path, p) {
            return Ok(c);
        }
        let catalog = enumerate(p, self.grouping)?;
        self.write(&path, &catalog)?;
        Ok(catalog)
    }

    fn read(&self, path: &Path, p: CurveParams) -> Option<Catalog> {
        let text = fs::read_to_string(path).ok()?;
        let recorded = fs::read_to_string(sidecar(path)).ok()?;
        if recorded.trim() != hex_digest(text.as_bytes()) {
            eprintln!("cache: hash mismatch for {}, re-enumerating", path.display());
            return None;
        }
        let catalog = catalog_from_json(&text).ok()?;
        if catalog.params() != p || !spot_check(&catalog, self.grouping) {
            eprintln!("cache: spot check failed for {}, re-enumerating", path.display());
            return None;
        }
        Some(catalog)
    }

    fn write(&self, path: &Path, catalog: &Catalog) -> Result<()> {
        let dir = path.parent().expect("cache paths have a parent");
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let text = catalog_to_json(catalog);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, &text).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, path)?;
        fs::write(sidecar(path), hex_digest(text.as_bytes()) + "\n")?;
        Ok(())
    }
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("json.sha256")
}

/// Recomputes the radius of evenly spaced codes and compares it with the
/// radius of the subset they were filed under.
fn spot_check(catalog: &Catalog, grouping: Grouping) -> bool {
    let p = catalog.params();
    let n = p.cardinality();
    let step = (n / SPOT_CHECKS).max(1);
    (0..n).step_by(step as usize).all(|v| {
        let r = radius_of_value(p, v);
        match catalog.subset_of(v) {
            Some(t) => match grouping {
                Grouping::Exact => t.radius.to_bits() == r.to_bits(),
                Grouping::Tolerance { split, .. } => (t.radius - r).abs() <= split,
            },
            None => false,
        }
    })
}
