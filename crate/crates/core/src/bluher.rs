//! `N_0`: the number of `b != 0` for which `x^(2^i+1) + b x + b` has no root
//! in F_q, by closed form and by exhaustive search.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{exact_div, Error, Result};
use crate::fiber::{FunctionSpec, FunctionTable};
use crate::field::{FieldElement, FieldSpec};

pub fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BluherCount {
    pub m: u32,
    pub i: u32,
    pub d: u32,
    pub n0_formula: u64,
    pub n0_bruteforce: Option<u64>,
    pub agree: Option<bool>,
}

fn check_index(m: u32, i: u32) -> Result<()> {
    if i >= m {
        Err(Error::GoldIndex { i, m })
    } else {
        Ok(())
    }
}

/// Closed form: `2^d (q -/+ 1) / (2 (2^d + 1))` for `m/d` even / odd,
/// with `d = gcd(i, m)` (so `d = m` when `i = 0`).
pub fn bluher_formula(m: u32, i: u32) -> Result<u64> {
    check_index(m, i)?;
    let q = 1u64 << m;
    let d = gcd(i, m);
    let p = 1u64 << d;
    let num = if (m / d).is_multiple_of(2) {
        p * (q - 1)
    } else {
        p * (q + 1)
    };
    exact_div("bluher_formula", num, 2 * (p + 1))
}

/// Counts `b in F_q^*` such that no x satisfies `x^(2^i+1) + b x + b = 0`.
pub fn bluher_bruteforce(spec: &FieldSpec, i: u32) -> Result<u64> {
    check_index(spec.m(), i)?;
    let table = FunctionTable::new(spec, &FunctionSpec::Gold(i))?;
    let count = (1..spec.order())
        .into_par_iter()
        .filter(|&b| {
            let b = FieldElement(b);
            !spec
                .elements()
                .any(|x| (table.value(x) + spec.mul(b, x) + b).is_zero())
        })
        .count();
    Ok(count as u64)
}

/// Formula and brute force side by side.
pub fn bluher_check(spec: &FieldSpec, i: u32) -> Result<BluherCount> {
    let m = spec.m();
    let n0_formula = bluher_formula(m, i)?;
    let brute = bluher_bruteforce(spec, i)?;
    Ok(BluherCount {
        m,
        i,
        d: gcd(i, m),
        n0_formula,
        n0_bruteforce: Some(brute),
        agree: Some(brute == n0_formula),
    })
}
