//! BitDistance and the circular projection of `X^D_K` onto the unit D-sphere.
//!
//! Every float operation below happens in a fixed order (levels ascending,
//! dimensions ascending, no fused multiply-add). Radii are used as exact
//! grouping keys downstream, so changing the order changes the catalogs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morton::{column_of, Bits, CurveParams, MortonCode};

/// `2^-n` built from its exponent bits; exact for `n <= 1022`.
fn pow2_neg(n: u32) -> f64 {
    debug_assert!(n <= 1022);
    f64::from_bits(((1023 - n) as u64) << 52)
}

/// Signed, weighted sum of a dimension's bits: bit `i` (from the left)
/// contributes `+2^{-(i+1)}` when set and `-2^{-(i+1)}` when clear.
///
/// The value is computed as an odd integer numerator over `2^L`, so it is
/// exact whenever `L <= 53`.
pub fn bit_distance(bits: &Bits) -> Result<f64> {
    if bits.is_empty() {
        return Err(Error::EmptyChain);
    }
    Ok(bit_distance_raw(bits.value(), bits.len()))
}

#[inline]
fn bit_distance_raw(value: u64, len: u32) -> f64 {
    // sum of (2b_i - 1) 2^{L-1-i} = 2v - (2^L - 1)
    let numerator = 2 * value as i128 - ((1i128 << len) - 1);
    numerator as f64 * pow2_neg(len)
}

/// `S_K = 1/2 + 1/4 + ... + 1/2^K = 1 - 2^-K`.
pub fn correction_factor(k: u32) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidParams { dim: 0, k, reason: "K must be at least 1" });
    }
    Ok(1.0 - pow2_neg(k))
}

/// Weight of level `n`: `(1/2^{n+1}) / S_K`.
fn level_weight(level: u32, correction: f64) -> f64 {
    pow2_neg(level + 1) / correction
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedPoint {
    pub coords: Vec<f64>,
    pub radius: f64,
    pub source: MortonCode,
}

/// One zoom level of the projection: the raw BitDistances with the first
/// `level` bits of every dimension dropped, their normalisation, and the
/// weighted segment added to the running position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelTrace {
    pub level: u32,
    pub raw_bd: Vec<f64>,
    pub hypotenuse: f64,
    pub normalized: Vec<f64>,
    pub weight: f64,
    pub segment: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub point: ProjectedPoint,
    pub trace: Vec<LevelTrace>,
}

/// Projects a code and records the per-level trace.
pub fn project(code: &MortonCode) -> Projection {
    let p = code.params();
    let dim = p.dim() as usize;
    let correction = 1.0 - pow2_neg(p.k());
    let columns: Vec<Bits> = (0..dim).map(|d| column_of(p, code.value(), d)).collect();

    let mut coords = vec![0.0f64; dim];
    let mut trace = Vec::with_capacity(p.k() as usize);
    for level in 0..p.k() {
        let raw_bd: Vec<f64> = columns
            .iter()
            .map(|c| {
                let suffix = c.drop_front(level);
                bit_distance_raw(suffix.value(), suffix.len())
            })
            .collect();
        let hypotenuse = sum_of_squares(&raw_bd).sqrt();
        let weight = level_weight(level, correction);
        let normalized: Vec<f64> = raw_bd.iter().map(|b| b / hypotenuse).collect();
        let segment: Vec<f64> = normalized.iter().map(|n| n * weight).collect();
        for (c, s) in coords.iter_mut().zip(&segment) {
            *c += s;
        }
        trace.push(LevelTrace { level, raw_bd, hypotenuse, normalized, weight, segment });
    }
    let radius = sum_of_squares(&coords).sqrt();
    Projection { point: ProjectedPoint { coords, radius, source: *code }, trace }
}

/// Projects a code without keeping the trace.
pub fn project_point(code: &MortonCode) -> ProjectedPoint {
    let p = code.params();
    let mut coords = vec![0.0; p.dim() as usize];
    let radius = project_into(p, code.value(), &mut coords);
    ProjectedPoint { coords, radius, source: *code }
}

pub fn radius(code: &MortonCode) -> f64 {
    radius_of_value(code.params(), code.value())
}

/// Allocation-free radius used by full enumeration. `value` must lie in `X^D_K`.
pub fn radius_of_value(p: CurveParams, value: u64) -> f64 {
    let mut coords = [0.0f64; 64];
    project_into(p, value, &mut coords[..p.dim() as usize])
}

/// Writes the projected coordinates of `value` into `coords` (length `D`)
/// and returns the radius. Same operation order as [`project`].
pub fn project_into(p: CurveParams, value: u64, coords: &mut [f64]) -> f64 {
    let dim = p.dim() as usize;
    let k = p.k();
    debug_assert_eq!(coords.len(), dim);
    debug_assert!(value <= p.max_value());

    let mut columns = [0u64; 64];
    for (d, c) in columns[..dim].iter_mut().enumerate() {
        *c = column_of(p, value, d).value();
    }
    let correction = 1.0 - pow2_neg(k);
    coords.fill(0.0);

    let mut raw = [0.0f64; 64];
    for level in 0..k {
        let len = k - level;
        let mask = (1u64 << len) - 1;
        for d in 0..dim {
            raw[d] = bit_distance_raw(columns[d] & mask, len);
        }
        let hypotenuse = sum_of_squares(&raw[..dim]).sqrt();
        let weight = level_weight(level, correction);
        for d in 0..dim {
            coords[d] += (raw[d] / hypotenuse) * weight;
        }
    }
    sum_of_squares(coords).sqrt()
}

#[inline]
fn sum_of_squares(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |acc, x| acc + x * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Left-to-right evaluation of the defining sum, one term per bit.
    fn bd_oracle(s: &str) -> f64 {
        s.chars()
            .enumerate()
            .map(|(i, c)| {
                let sign = if c == '1' { 1.0 } else { -1.0 };
                sign / 2f64.powi(i as i32 + 1)
            })
            .sum()
    }

    fn bd(s: &str) -> f64 {
        bit_distance(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn bit_distance_examples() {
        assert_eq!(bd("111"), 0.875);
        assert_eq!(bd("011"), -0.125);
        assert_eq!(bd("0"), -0.5);
        assert_eq!(bd("10"), 0.25);
        assert_eq!(bd("01"), -0.25);
        assert_eq!(bit_distance(&Bits::zeros(0)), Err(Error::EmptyChain));
    }

    #[test]
    fn bit_distance_matches_term_sum() {
        for len in 1..=12u32 {
            for v in 0..(1u64 << len) {
                let b = Bits::new(v, len);
                assert_eq!(bit_distance(&b).unwrap(), bd_oracle(&b.to_string()));
            }
        }
    }

    #[test]
    fn correction_factor_values() {
        assert_eq!(correction_factor(3).unwrap(), 0.875);
        assert_eq!(correction_factor(1).unwrap(), 0.5);
        assert_eq!(correction_factor(5).unwrap(), 0.5 + 0.25 + 0.125 + 0.0625 + 0.03125);
        assert!(correction_factor(0).is_err());
    }

    #[test]
    fn trace_of_47() {
        let c = CurveParams::new(2, 3).unwrap().code(47).unwrap();
        let pr = project(&c);
        assert_eq!(pr.trace.len(), 3);
        let t0 = &pr.trace[0];
        assert_eq!(t0.raw_bd, vec![0.875, -0.125]);
        assert!((t0.hypotenuse - 0.883883).abs() < 1e-6);
        assert!((t0.normalized[0] - 0.989949).abs() < 1e-6);
        assert!((t0.normalized[1] + 0.141421).abs() < 1e-6);
        assert_eq!(pr.trace[1].raw_bd, vec![0.75, 0.75]);
        assert_eq!(pr.trace[2].raw_bd, vec![0.5, 0.5]);
        let w: f64 = pr.trace.iter().map(|t| t.weight).sum();
        assert!((w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn corners_land_on_the_diagonal() {
        for (d, k) in [(2, 3), (3, 4), (5, 2)] {
            let p = CurveParams::new(d, k).unwrap();
            let inv = 1.0 / (d as f64).sqrt();
            for (value, sign) in [(0, -1.0), (p.max_value(), 1.0)] {
                let pt = project_point(&p.code(value).unwrap());
                for c in &pt.coords {
                    assert!((c - sign * inv).abs() < 1e-12);
                }
                assert!((pt.radius - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn caption_radii() {
        let p = CurveParams::new(2, 5).unwrap();
        assert!((radius(&p.code(358).unwrap()) - 0.6774193548387097).abs() < 1e-12);
        assert!((radius(&p.code(427).unwrap()) - 0.33208795317357703).abs() < 1e-12);
        assert!((radius(&p.code(0).unwrap()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn k1_radius_is_one() {
        for d in 1..=6 {
            let p = CurveParams::new(d, 1).unwrap();
            for v in 0..p.cardinality() {
                assert!((radius_of_value(p, v) - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn fast_path_agrees_with_traced_path() {
        let p = CurveParams::new(3, 4).unwrap();
        for v in 0..p.cardinality() {
            let code = p.code(v).unwrap();
            let full = project(&code).point;
            let fast = project_point(&code);
            assert_eq!(full.coords, fast.coords);
            assert_eq!(full.radius.to_bits(), fast.radius.to_bits());
        }
    }
}
