//! The map `g_t(x) = x^4 + x^3 + t x`.
//!
//! Fiber counts `omega_t(k)` have closed forms, and for odd m the image size
//! is governed by the affine point count `v` of `x^2 + z x = z^3 + z^2 + t`:
//!
//! ```text
//! |I(t)| = (6q + 1 - v + 4 Tr(t)) / 8        (m odd, t != 0)
//! ```
//!
//! `v` is counted in O(q) per t: for each z the quadratic in x has 1 root
//! when z = 0 and 2 or 0 roots otherwise, decided by an absolute trace.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{exact_div, Error, Result};
use crate::fiber::FiberDistribution;
use crate::field::{FieldElement, FieldSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurvePointCount {
    pub t: FieldElement,
    /// Affine solutions `(x, z)` of `x^2 + z x = z^3 + z^2 + t`.
    pub v: u64,
    /// Absolute trace of t.
    pub delta: u32,
}

impl CurvePointCount {
    /// `(v - q)^2 <= 4q`.
    pub fn within_hasse(&self, q: u64) -> bool {
        let dev = self.v as i128 - q as i128;
        dev * dev <= 4 * q as i128
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuarticImageRecord {
    pub t: FieldElement,
    pub exact_size: u64,
    pub floor_bound: u64,
    pub sharp: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharpnessRecord {
    pub m: u32,
    pub q: u64,
    pub bound: u64,
    pub max_size: u64,
    pub sharp: bool,
    /// Every t attaining `max_size`, sorted by encoding.
    pub witnesses: Vec<FieldElement>,
}

fn require_odd(m: u32, what: &'static str) -> Result<()> {
    if m.is_multiple_of(2) {
        Err(Error::EvenDegree { what, m })
    } else {
        Ok(())
    }
}

/// `omega_t(1)` for `t != 0`: `(q+1)/3`, `(q+4)/3` (m odd) or `(q-1)/3`,
/// `(q+2)/3` (m even), for `Tr(t) = 0, 1`.
pub fn omega1_formula(m: u32, tr_t: u32) -> Result<u64> {
    if m == 0 || m > 62 {
        return Err(Error::DegreeOutOfRange(m));
    }
    let q = 1u64 << m;
    let num = match (m % 2 == 1, tr_t != 0) {
        (true, false) => q + 1,
        (true, true) => q + 4,
        (false, false) => q - 1,
        (false, true) => q + 2,
    };
    exact_div("omega1_formula", num, 3)
}

/// `omega_t(3)` for `t != 0`: only `y = t^2` can have three preimages,
/// and does exactly when `Tr(t) = 0`.
pub fn omega3_formula(tr_t: u32) -> u64 {
    if tr_t == 0 {
        1
    } else {
        0
    }
}

/// The full fiber distribution of `x^4 + x^3` (t = 0).
pub fn omega0_distribution(m: u32) -> Result<FiberDistribution> {
    if m == 0 || m > 62 {
        return Err(Error::DegreeOutOfRange(m));
    }
    let q = 1u64 << m;
    let counts = if m % 2 == 1 {
        vec![(2, q / 2)]
    } else {
        vec![
            (1, exact_div("omega0_distribution", 2 * (q - 1), 3)?),
            (2, 1),
            (4, exact_div("omega0_distribution", q - 4, 12)?),
        ]
    };
    let hit: u64 = counts.iter().map(|&(_, c)| c).sum();
    let mut all = vec![(0, q - hit)];
    all.extend(counts);
    Ok(FiberDistribution::from_counts(FieldElement::ZERO, all))
}

/// `v` in O(q): `sum_z #{x : x^2 + z x = z^3 + z^2 + t}`.
pub fn curve_point_count(spec: &FieldSpec, t: FieldElement) -> CurvePointCount {
    let v = spec
        .elements()
        .map(|z| {
            let z2 = spec.square(z);
            let rhs = spec.mul(z2, z) + z2 + t;
            spec.quad_root_count(z, rhs) as u64
        })
        .sum();
    CurvePointCount {
        t,
        v,
        delta: spec.trace_abs(t),
    }
}

/// `v` by enumerating all q^2 pairs.
pub fn curve_point_count_by_pairs(spec: &FieldSpec, t: FieldElement) -> u64 {
    let mut v = 0;
    for z in spec.elements() {
        let z2 = spec.square(z);
        let rhs = spec.mul(z2, z) + z2 + t;
        for x in spec.elements() {
            if spec.square(x) + spec.mul(z, x) == rhs {
                v += 1;
            }
        }
    }
    v
}

fn image_from_count(q: u64, count: &CurvePointCount) -> Result<u64> {
    // Numerator is 8|I(t)|, so it is nonnegative; compute in i128 regardless.
    let num = 6 * q as i128 + 1 - count.v as i128 + 4 * count.delta as i128;
    if num < 0 {
        return Err(Error::InexactDivision {
            what: "quartic_image_exact",
            num: 0,
            den: 8,
        });
    }
    exact_div("quartic_image_exact", num as u64, 8)
}

/// `|I(t)|` for `g_t` from the curve count. Requires odd m and `t != 0`.
pub fn quartic_image_exact(spec: &FieldSpec, t: FieldElement) -> Result<u64> {
    require_odd(spec.m(), "quartic_image_exact")?;
    if t.is_zero() {
        return Err(Error::ZeroParameter("quartic_image_exact"));
    }
    image_from_count(spec.order() as u64, &curve_point_count(spec, t))
}

/// `floor(5q/8 + (2 sqrt(q) + 5)/8)` for odd m, in integers.
///
/// `2 sqrt(q)` is irrational for odd m, so
/// `floor((5q + 5 + 2 sqrt(q)) / 8) = floor((5q + 5 + floor(2 sqrt(q))) / 8)`:
/// the dropped fraction is below 1 and the numerator with `floor(2 sqrt q)`
/// is an integer, so it cannot reach the next multiple of 8 either way.
pub fn quartic_floor_bound(m: u32) -> Result<u64> {
    require_odd(m, "quartic_floor_bound")?;
    if m > 59 {
        return Err(Error::DegreeOutOfRange(m));
    }
    let q = 1u64 << m;
    let two_sqrt_q = (4 * q).isqrt();
    Ok((5 * q + 5 + two_sqrt_q) / 8)
}

pub fn quartic_record(spec: &FieldSpec, t: FieldElement) -> Result<QuarticImageRecord> {
    let exact_size = quartic_image_exact(spec, t)?;
    let floor_bound = quartic_floor_bound(spec.m())?;
    Ok(QuarticImageRecord {
        t,
        exact_size,
        floor_bound,
        sharp: exact_size == floor_bound,
    })
}

/// `(count, |I(t)|)` for every `t != 0`, in encoding order. Requires odd m.
pub fn quartic_sweep(spec: &FieldSpec) -> Result<Vec<(CurvePointCount, u64)>> {
    require_odd(spec.m(), "quartic sweep")?;
    let q = spec.order() as u64;
    (1..spec.order())
        .into_par_iter()
        .map(|t| {
            let count = curve_point_count(spec, FieldElement(t));
            let size = image_from_count(q, &count)?;
            Ok((count, size))
        })
        .collect()
}

/// Largest `|I(t)|` over `t != 0`, compared with the floor bound.
pub fn sharpness_search(spec: &FieldSpec) -> Result<SharpnessRecord> {
    let bound = quartic_floor_bound(spec.m())?;
    let sweep = quartic_sweep(spec)?;
    let max_size = sweep.iter().map(|&(_, s)| s).max().unwrap_or(0);
    let witnesses = sweep
        .iter()
        .filter(|&&(_, s)| s == max_size)
        .map(|(c, _)| c.t)
        .collect();
    Ok(SharpnessRecord {
        m: spec.m(),
        q: spec.order() as u64,
        bound,
        max_size,
        sharp: max_size == bound,
        witnesses,
    })
}
