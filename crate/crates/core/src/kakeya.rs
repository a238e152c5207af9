//! Kakeya sets built from image sets.
//!
//! For a non-linear `f` the set
//!
//! ```text
//! K = { (x_1, ..., x_j, t, 0, ..., 0) : 0 <= j < n, t in F_q, x_i in I_f(t) }
//! ```
//!
//! contains a line in every direction. Its (j, t) groups have `|I_f(t)|^j`
//! points each, so `sum_t (|I_f(t)|^n - 1) / (|I_f(t)| - 1)` counts the
//! construction group by group. Groups overlap (the `j = 1, t = 0` group sits
//! inside the `j = 0` group, for instance), so the number of distinct points
//! is at most that sum.
//!
//! Points are packed into a `u64`, coordinate `k` in bits `k*m .. (k+1)*m`.
//! Coordinate-wise addition is then a single XOR.

use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fiber::{FunctionSpec, FunctionTable};
use crate::field::{FieldElement, FieldSpec};

/// Default limit on materialized points.
pub const DEFAULT_MATERIALIZE_CAP: u64 = 1 << 24;

/// Above this many membership tests [`verify_kakeya`] is not worth running.
pub const MAX_VERIFY_WORK: u64 = 1_000_000_000;

/// Pairs sampled by the affinity test when exhaustive search is too large.
const AFFINITY_SAMPLES: usize = 100_000;
const AFFINITY_EXHAUSTIVE_MAX_M: u32 = 10;

#[derive(Clone, Debug)]
pub struct KakeyaSet {
    pub spec: FieldSpec,
    pub n: usize,
    pub f: FunctionSpec,
    /// `|I_f(t)|`, indexed by the encoding of t.
    pub image_sizes: Vec<u32>,
    /// Distinct packed points, when materialized.
    pub points: Option<HashSet<u64>>,
    /// Points enumerated group by group (with repeats across groups), when materialized.
    pub grouped_count: Option<u64>,
}

impl KakeyaSet {
    /// Size by the image-size formula.
    pub fn formula_size(&self) -> Result<u64> {
        kakeya_size_from_images(self.image_sizes.iter().map(|&s| s as u64), self.n)
    }

    pub fn is_materialized(&self) -> bool {
        self.points.is_some()
    }

    pub fn distinct_size(&self) -> Option<u64> {
        self.points.as_ref().map(|p| p.len() as u64)
    }

    pub fn pack(&self, coords: &[FieldElement]) -> u64 {
        pack(self.spec.m(), coords)
    }

    pub fn unpack(&self, point: u64) -> Vec<FieldElement> {
        unpack(self.spec.m(), self.n, point)
    }
}

fn pack(m: u32, coords: &[FieldElement]) -> u64 {
    coords.iter().enumerate().fold(0u64, |acc, (k, c)| {
        acc | (c.value() as u64) << (k as u32 * m)
    })
}

fn unpack(m: u32, n: usize, point: u64) -> Vec<FieldElement> {
    let mask = (1u64 << m) - 1;
    (0..n)
        .map(|k| FieldElement(((point >> (k as u32 * m)) & mask) as u32))
        .collect()
}

/// `sum_t (s_t^n - 1) / (s_t - 1)`, i.e. `sum_t sum_{j<n} s_t^j`.
/// A size of 1 contributes n.
pub fn kakeya_size_from_images(sizes: impl IntoIterator<Item = u64>, n: usize) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let overflow = || Error::PackingOverflow("Kakeya size".into());
    let mut total = 0u64;
    let mut any = false;
    for s in sizes {
        any = true;
        if s == 0 {
            return Err(Error::ZeroImageSize);
        }
        let term = if s == 1 {
            n as u64
        } else {
            let pow = s.checked_pow(n as u32).ok_or_else(overflow)?;
            (pow - 1) / (s - 1)
        };
        total = total.checked_add(term).ok_or_else(overflow)?;
    }
    if !any {
        return Err(Error::EmptyImageSizes);
    }
    Ok(total)
}

/// True iff `f(x + y) + f(x) + f(y) + f(0) = 0` for every tested pair.
/// Exhaustive for m <= 10, otherwise 10^5 pairs drawn from a ChaCha8 stream
/// seeded with `seed`.
pub fn is_gf2_affine(spec: &FieldSpec, f: &FunctionSpec, seed: u64) -> Result<bool> {
    let table = FunctionTable::new(spec, f)?;
    let f0 = table.value(FieldElement::ZERO);
    let holds = |x: FieldElement, y: FieldElement| {
        (table.value(x + y) + table.value(x) + table.value(y) + f0).is_zero()
    };
    if spec.m() <= AFFINITY_EXHAUSTIVE_MAX_M {
        return Ok((0..spec.order())
            .into_par_iter()
            .all(|x| spec.elements().all(|y| holds(FieldElement(x), y))));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = spec.order();
    Ok((0..AFFINITY_SAMPLES).all(|_| {
        let x = FieldElement(rng.gen_range(0..q));
        let y = FieldElement(rng.gen_range(0..q));
        holds(x, y)
    }))
}

/// Builds the construction for `f` in dimension `n`. Points are materialized
/// when the formula size is at most `materialize_cap` and `n*m <= 64`.
pub fn build_kakeya(
    spec: &FieldSpec,
    n: usize,
    f: &FunctionSpec,
    materialize_cap: u64,
) -> Result<KakeyaSet> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    if is_gf2_affine(spec, f, 0)? {
        return Err(Error::AffineFunction);
    }
    let table = FunctionTable::new(spec, f)?;
    let image_sizes = table.image_sizes();
    let mut set = KakeyaSet {
        spec: spec.clone(),
        n,
        f: f.clone(),
        image_sizes,
        points: None,
        grouped_count: None,
    };
    let size = set.formula_size()?;
    if size > materialize_cap || n as u32 * spec.m() > 64 {
        return Ok(set);
    }

    let m = spec.m();
    let mut points = HashSet::with_capacity(size as usize);
    let mut grouped = 0u64;
    for t in spec.elements() {
        let image: Vec<u64> = table
            .image_set(t)
            .values
            .expect("image_set always lists values")
            .into_iter()
            .map(|v| v.value() as u64)
            .collect();
        for j in 0..n {
            // Odometer over I(t)^j; coordinate j holds t.
            let tail = (t.value() as u64) << (j as u32 * m);
            let mut digits = vec![0usize; j];
            loop {
                let head = digits
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (k, &d)| acc | image[d] << (k as u32 * m));
                points.insert(head | tail);
                grouped += 1;
                let mut k = 0;
                while k < j {
                    digits[k] += 1;
                    if digits[k] < image.len() {
                        break;
                    }
                    digits[k] = 0;
                    k += 1;
                }
                if k == j {
                    break;
                }
            }
        }
    }
    set.points = Some(points);
    set.grouped_count = Some(grouped);
    Ok(set)
}

/// A projective direction, normalized so its first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Direction(pub Vec<FieldElement>);

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// One representative per direction of `F_q^n`: `(q^n - 1)/(q - 1)` vectors
/// in lexicographic order of their coordinate encodings.
pub fn canonical_directions(q: u32, n: usize) -> Vec<Direction> {
    let mut out = Vec::new();
    for lead in 0..n {
        let free = n - lead - 1;
        let count = (q as u64).pow(free as u32);
        for idx in 0..count {
            let mut v = vec![FieldElement::ZERO; n];
            v[lead] = FieldElement::ONE;
            let mut rest = idx;
            for k in (lead + 1..n).rev() {
                v[k] = FieldElement((rest % q as u64) as u32);
                rest /= q as u64;
            }
            out.push(Direction(v));
        }
    }
    out.sort_unstable();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KakeyaVerdict {
    pub ok: bool,
    /// Directions with no full line in the set, sorted.
    pub missing: Vec<Direction>,
    pub directions_checked: usize,
}

/// Membership tests [`verify_kakeya`] performs in the worst case.
pub fn verification_work(set: &KakeyaSet) -> Option<u64> {
    let points = set.distinct_size()?;
    let q = set.spec.order() as u64;
    let dirs = canonical_directions_count(q, set.n);
    Some(points.saturating_mul(dirs).saturating_mul(q))
}

pub fn canonical_directions_count(q: u64, n: usize) -> u64 {
    (0..n as u32).map(|k| q.pow(k)).sum()
}

/// Checks every direction for a line `{y + s d : s in F_q}` inside the set.
/// Base points range over the set itself, which is complete since `y` lies on
/// its own line.
pub fn verify_kakeya(set: &KakeyaSet) -> Result<KakeyaVerdict> {
    let points = set.points.as_ref().ok_or(Error::NotMaterialized)?;
    let spec = &set.spec;
    let m = spec.m();
    let dirs = canonical_directions(spec.order(), set.n);
    let base: Vec<u64> = {
        let mut b: Vec<u64> = points.iter().copied().collect();
        b.sort_unstable();
        b
    };
    let covered: Vec<bool> = dirs
        .par_iter()
        .map(|d| {
            let steps: Vec<u64> = spec
                .elements()
                .map(|s| {
                    let scaled: Vec<FieldElement> = d.0.iter().map(|&c| spec.mul(s, c)).collect();
                    pack(m, &scaled)
                })
                .collect();
            base.iter()
                .any(|&y| steps.iter().all(|&sd| points.contains(&(y ^ sd))))
        })
        .collect();
    let missing: Vec<Direction> = dirs
        .iter()
        .zip(&covered)
        .filter(|(_, &c)| !c)
        .map(|(d, _)| d.clone())
        .collect();
    Ok(KakeyaVerdict {
        ok: missing.is_empty(),
        missing,
        directions_checked: dirs.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Earlier bound for odd prime powers q.
    KlssOdd,
    /// Earlier bound for q an even power of 2.
    KlssEvenPower,
    /// Earlier bound for q an odd power of 2.
    KlssOddPower,
    /// `2q/(q + sqrt q - 2) ((q + sqrt q)/2)^n`, q an even power of 2.
    NewEven,
    /// `8q/(5q + 2 sqrt q - 3) ((5q + 2 sqrt q + 5)/8)^n`, q an odd power of 2.
    NewOdd,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::KlssOdd => "klss_odd",
            BoundKind::KlssEvenPower => "klss_even_power",
            BoundKind::KlssOddPower => "klss_odd_power",
            BoundKind::NewEven => "new_even",
            BoundKind::NewOdd => "new_odd",
        }
    }

    /// The (new, earlier) bound pair for `q = 2^m`.
    pub fn pair_for_degree(m: u32) -> (BoundKind, BoundKind) {
        if m.is_multiple_of(2) {
            (BoundKind::NewEven, BoundKind::KlssEvenPower)
        } else {
            (BoundKind::NewOdd, BoundKind::KlssOddPower)
        }
    }
}

fn is_odd_prime_power(q: u64) -> bool {
    if q < 3 || q.is_multiple_of(2) {
        return false;
    }
    let mut p = 3;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut r = q;
            while r.is_multiple_of(p) {
                r /= p;
            }
            return r == 1;
        }
        p += 2;
    }
    true
}

/// `Some(m)` when `q = 2^m`.
fn log2_exact(q: u64) -> Option<u32> {
    (q.is_power_of_two()).then(|| q.trailing_zeros())
}

pub fn bound_eval(kind: BoundKind, q: u64, n: usize) -> Result<f64> {
    let mismatch = || Error::BoundParity {
        kind: kind.name(),
        q,
    };
    let n = i32::try_from(n).map_err(|_| Error::ZeroDimension)?;
    if n < 1 {
        return Err(Error::ZeroDimension);
    }
    let qf = q as f64;
    if kind == BoundKind::KlssOdd {
        if !is_odd_prime_power(q) {
            return Err(mismatch());
        }
        return Ok(2.0 * (1.0 + 1.0 / (qf - 1.0)) * ((qf + 1.0) / 2.0).powi(n));
    }
    let m = log2_exact(q).filter(|&m| m >= 1).ok_or_else(mismatch)?;
    let even = m % 2 == 0;
    let sqrt_q = if even {
        (1u64 << (m / 2)) as f64
    } else {
        qf.sqrt()
    };
    match (kind, even) {
        (BoundKind::KlssEvenPower, true) => {
            Ok(1.5 * (1.0 + 1.0 / (qf - 1.0)) * ((2.0 * qf + 1.0) / 3.0).powi(n))
        }
        (BoundKind::KlssOddPower, false) => Ok(1.5 * (2.0 * (qf + sqrt_q + 1.0) / 3.0).powi(n)),
        (BoundKind::NewEven, true) => {
            Ok(2.0 * qf / (qf + sqrt_q - 2.0) * ((qf + sqrt_q) / 2.0).powi(n))
        }
        (BoundKind::NewOdd, false) => Ok(8.0 * qf / (5.0 * qf + 2.0 * sqrt_q - 3.0)
            * ((5.0 * qf + 2.0 * sqrt_q + 5.0) / 8.0).powi(n)),
        _ => Err(mismatch()),
    }
}

/// Minimum gap for an integer size to count as strictly below a float bound.
pub const BOUND_MARGIN: f64 = 1e-6;

pub fn strictly_below(size: u64, bound: f64) -> bool {
    bound - size as f64 > BOUND_MARGIN
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub q: u64,
    pub n: usize,
    pub measured_size: u64,
    pub klss_bound: f64,
    pub new_bound: f64,
    pub below_new: bool,
    pub below_klss: bool,
}

/// Compares a measured size against the new and earlier bounds for `q = 2^m`.
pub fn bound_report(m: u32, n: usize, measured_size: u64) -> Result<BoundReport> {
    let q = 1u64 << m;
    let (new_kind, klss_kind) = BoundKind::pair_for_degree(m);
    let new_bound = bound_eval(new_kind, q, n)?;
    let klss_bound = bound_eval(klss_kind, q, n)?;
    Ok(BoundReport {
        q,
        n,
        measured_size,
        klss_bound,
        new_bound,
        below_new: strictly_below(measured_size, new_bound),
        below_klss: strictly_below(measured_size, klss_bound),
    })
}

/// The function the construction uses for `q = 2^m`: `x^(sqrt(q)+1)` for even
/// m, `x^4 + x^3` for odd m.
pub fn default_function(m: u32) -> FunctionSpec {
    if m.is_multiple_of(2) {
        FunctionSpec::Gold(m / 2)
    } else {
        FunctionSpec::Quartic
    }
}
