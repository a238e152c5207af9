//! Image-set sizes of Gold maps `x -> x^(2^i+1) + t x`.
//!
//! With `d = gcd(i, m)` and `q = 2^m` the sizes depend only on the parity of
//! `m/d` and on whether `t = 0`:
//!
//! | `m/d` | `t = 0`               | `t != 0`                              |
//! |-------|-----------------------|---------------------------------------|
//! | even  | `1 + (q-1)/(2^d+1)`   | `(q+1)/2 + (q-1)/(2(2^d+1))`          |
//! | odd   | `q`                   | `(q-1)/2 + (q+1)/(2(2^d+1))`          |
//!
//! For `i = m/2` this collapses to `sqrt(q)` and `(q + sqrt(q))/2`, and
//! [`verify_half_gold_structure`] checks the fiber structure behind that count.

use rayon::prelude::*;
use serde::Serialize;

use crate::bluher::gcd;
use crate::error::{exact_div, Error, Result};
use crate::fiber::{FunctionSpec, FunctionTable};
use crate::field::{FieldElement, FieldSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldImageProfile {
    pub m: u32,
    pub i: u32,
    pub d: u32,
    pub size_at_zero: u64,
    pub size_at_nonzero: u64,
    /// Parity of `m/d`.
    pub parity_case: Parity,
}

fn u64_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        u64_gcd(b, a % b)
    }
}

pub fn gold_profile(m: u32, i: u32) -> Result<GoldImageProfile> {
    if i == 0 || i >= m {
        return Err(Error::GoldIndex { i, m });
    }
    let q = 1u64 << m;
    let d = gcd(i, m);
    let p = 1u64 << d;
    let parity_case = if (m / d).is_multiple_of(2) {
        Parity::Even
    } else {
        Parity::Odd
    };

    // x -> x^(2^i+1) on F_q^* is (gcd(q-1, 2^i+1))-to-1.
    let g = u64_gcd(q - 1, (1u64 << i) + 1);
    let expected_g = match parity_case {
        Parity::Even => p + 1,
        Parity::Odd => 1,
    };
    assert_eq!(g, expected_g, "gcd(2^{m}-1, 2^{i}+1)");
    let size_at_zero = 1 + exact_div("gold_profile", q - 1, g)?;

    let size_at_nonzero = match parity_case {
        Parity::Even => exact_div("gold_profile", (q + 1) * (p + 1) + (q - 1), 2 * (p + 1))?,
        Parity::Odd => exact_div("gold_profile", (q - 1) * (p + 1) + (q + 1), 2 * (p + 1))?,
    };
    Ok(GoldImageProfile {
        m,
        i,
        d,
        size_at_zero,
        size_at_nonzero,
        parity_case,
    })
}

impl GoldImageProfile {
    /// Predicted `|I_f(t)|`.
    pub fn size_at(&self, t: FieldElement) -> u64 {
        if t.is_zero() {
            self.size_at_zero
        } else {
            self.size_at_nonzero
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HalfGoldVerdict {
    pub m: u32,
    /// Image of `x^(sqrt(q)+1)` is exactly the subfield `GF(2^(m/2))`.
    pub image_is_subfield: bool,
    /// Every y with `Tr(y) = 1` is the only preimage of `g(y)`.
    pub injective_on_trace_one: bool,
    /// Every other y shares its value with exactly one partner, `y + Tr(y) + 1`.
    pub two_to_one_elsewhere: bool,
    /// Measured `|I(1)|`.
    pub image_size_at_one: u64,
    /// `(q + sqrt(q)) / 2`.
    pub expected_size_at_one: u64,
}

impl HalfGoldVerdict {
    pub fn holds(&self) -> bool {
        self.image_is_subfield
            && self.injective_on_trace_one
            && self.two_to_one_elsewhere
            && self.image_size_at_one == self.expected_size_at_one
    }
}

fn require_even(spec: &FieldSpec, what: &'static str) -> Result<u32> {
    if !spec.m().is_multiple_of(2) {
        return Err(Error::OddDegree { what, m: spec.m() });
    }
    Ok(spec.m() / 2)
}

/// Exhaustive check of the fiber structure of `g(x) = x^(sqrt(q)+1) + x`.
pub fn verify_half_gold_structure(spec: &FieldSpec) -> Result<HalfGoldVerdict> {
    let half = require_even(spec, "half-Gold structure check")?;
    let q = spec.order() as u64;
    let sqrt_q = 1u64 << half;
    let table = FunctionTable::new(spec, &FunctionSpec::Gold(half))?;

    let in_subfield = |u: FieldElement| spec.frobenius(u, half) == u;
    let mut bitmap = Vec::new();
    let zero_size = table.image_bitmap_into(FieldElement::ZERO, &mut bitmap);
    let image_is_subfield = zero_size as u64 == sqrt_q
        && spec.elements().all(|u| {
            let y = u.value() as usize;
            (bitmap[y >> 6] >> (y & 63) & 1 == 1) == in_subfield(u)
        });

    let g = |x: FieldElement| table.value(x) + x;
    let mut counts = vec![0u32; q as usize];
    for x in spec.elements() {
        counts[g(x).value() as usize] += 1;
    }
    let mut injective_on_trace_one = true;
    let mut two_to_one_elsewhere = true;
    for y in spec.elements() {
        let tr = spec.trace_rel(y)?;
        let fiber = counts[g(y).value() as usize];
        if tr == FieldElement::ONE {
            injective_on_trace_one &= fiber == 1;
        } else {
            let partner = y + tr + FieldElement::ONE;
            two_to_one_elsewhere &= fiber == 2 && partner != y && g(partner) == g(y);
        }
    }
    let image_size_at_one = counts.iter().filter(|&&c| c > 0).count() as u64;

    Ok(HalfGoldVerdict {
        m: spec.m(),
        image_is_subfield,
        injective_on_trace_one,
        two_to_one_elsewhere,
        image_size_at_one,
        expected_size_at_one: (q + sqrt_q) / 2,
    })
}

/// True iff `|I(t)|` is the same for every `t != 0`, for `f = x^(2^i+1)`
/// with `i = m/2`.
pub fn scale_invariance_check(spec: &FieldSpec, i: u32) -> Result<bool> {
    let half = require_even(spec, "scale invariance check")?;
    if i != half {
        return Err(Error::GoldIndex { i, m: spec.m() });
    }
    let table = FunctionTable::new(spec, &FunctionSpec::Gold(i))?;
    let reference = table.image_size(FieldElement::ONE);
    Ok((2..spec.order())
        .into_par_iter()
        .map_init(Vec::new, |bitmap, t| {
            table.image_bitmap_into(FieldElement(t), bitmap)
        })
        .all(|s| s == reference))
}
