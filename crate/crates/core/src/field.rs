//! Arithmetic in the binary field GF(2^m), 1 <= m <= 20.
//!
//! Elements are integer-encoded coefficient vectors: bit `k` holds the
//! coefficient of `x^k`. Addition is XOR. Multiplication goes through
//! discrete log / antilog tables built once per field from a schoolbook
//! carry-less multiply, which stays available as [`clmul_mod`] for checking.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 20;

/// An element of GF(2^m), meaningful only relative to a [`FieldSpec`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(into = "String")]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::ops::Add for FieldElement {
    type Output = FieldElement;

    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl std::ops::AddAssign for FieldElement {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

impl fmt::LowerHex for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

impl From<FieldElement> for String {
    fn from(e: FieldElement) -> String {
        e.to_string()
    }
}

/// Parses a lowercase or uppercase hex string, with or without `0x`.
pub fn parse_hex(s: &str) -> Result<u32> {
    let digits = s
        .strip_prefix("0x")
        .or_else(|| s.strip_prefix("0X"))
        .unwrap_or(s);
    u32::from_str_radix(digits, 16).map_err(|_| Error::Parse(format!("not a hex value: {s:?}")))
}

struct Tables {
    /// `exp[k] = g^k` for `0 <= k < 2(q-1)`, doubled so a sum of two logs never wraps.
    exp: Vec<u32>,
    /// `log[a]` for `a != 0`; `log[0]` is unused.
    log: Vec<u32>,
    /// Bit `k` is the absolute trace of `x^k`.
    trace_mask: u32,
}

/// The field GF(2^m) defined by a fixed irreducible modulus.
///
/// Cloning is cheap; the lookup tables are shared.
#[derive(Clone)]
pub struct FieldSpec {
    m: u32,
    modulus: u32,
    tables: Arc<Tables>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("m", &self.m)
            .field("modulus", &format_args!("{:#x}", self.modulus))
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

/// Degree of a nonzero binary polynomial.
fn degree(p: u64) -> u32 {
    63 - p.leading_zeros()
}

/// Remainder of binary polynomial division.
fn poly_rem(mut a: u64, b: u64) -> u64 {
    let db = degree(b);
    while a != 0 && degree(a) >= db {
        a ^= b << (degree(a) - db);
    }
    a
}

/// Irreducibility over GF(2) by trial division with every polynomial of
/// degree 1..=deg/2.
pub fn is_irreducible(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let d = degree(p);
    (2u64..(1u64 << (d / 2 + 1))).all(|f| poly_rem(p, f) != 0)
}

/// The smallest (by integer encoding) irreducible polynomial of degree `m`
/// with nonzero constant term.
pub fn smallest_irreducible(m: u32) -> Result<u32> {
    check_degree(m)?;
    let lo = (1u32 << m) | 1;
    let hi = 1u32 << (m + 1);
    (lo..hi)
        .step_by(2)
        .find(|&p| is_irreducible(p as u64))
        .ok_or(Error::NoIrreducible(m))
}

fn check_degree(m: u32) -> Result<()> {
    if (1..=MAX_DEGREE).contains(&m) {
        Ok(())
    } else {
        Err(Error::DegreeOutOfRange(m))
    }
}

/// Schoolbook carry-less product of `a` and `b` reduced modulo `modulus`
/// (degree `m`).
pub fn clmul_mod(a: u32, b: u32, modulus: u32, m: u32) -> u32 {
    let top = 1u32 << m;
    let mut a = a;
    let mut b = b;
    let mut acc = 0u32;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= modulus;
        }
    }
    acc
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn slow_pow(mut a: u32, mut e: u64, modulus: u32, m: u32) -> u32 {
    let mut r = 1u32;
    while e > 0 {
        if e & 1 == 1 {
            r = clmul_mod(r, a, modulus, m);
        }
        a = clmul_mod(a, a, modulus, m);
        e >>= 1;
    }
    r
}

impl Tables {
    fn build(m: u32, modulus: u32) -> Tables {
        let q = 1u32 << m;
        let order = (q - 1) as u64;
        let factors = distinct_prime_factors(order);
        let generator = (1..q)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&p| slow_pow(g, order / p, modulus, m) != 1)
            })
            .expect("the multiplicative group of a finite field is cyclic");

        let n = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * n];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for (k, e) in exp[..n].iter_mut().enumerate() {
            *e = x;
            log[x as usize] = k as u32;
            x = clmul_mod(x, generator, modulus, m);
        }
        exp.copy_within(..n, n);

        let mut trace_mask = 0u32;
        for k in 0..m {
            let mut y = 1u32 << k;
            let mut tr = 0u32;
            for _ in 0..m {
                tr ^= y;
                y = clmul_mod(y, y, modulus, m);
            }
            debug_assert!(tr <= 1);
            trace_mask |= tr << k;
        }

        Tables {
            exp,
            log,
            trace_mask,
        }
    }
}

impl FieldSpec {
    /// GF(2^m) with the smallest irreducible modulus of degree `m`.
    pub fn new(m: u32) -> Result<FieldSpec> {
        let modulus = smallest_irreducible(m)?;
        Ok(Self::build(m, modulus))
    }

    /// GF(2^m) with a caller-chosen modulus, which must be irreducible of
    /// degree exactly `m`.
    pub fn with_modulus(m: u32, modulus: u32) -> Result<FieldSpec> {
        check_degree(m)?;
        if modulus == 0 || degree(modulus as u64) != m {
            return Err(Error::ModulusDegree { m, modulus });
        }
        if modulus & 1 == 0 || !is_irreducible(modulus as u64) {
            return Err(Error::ReducibleModulus(modulus));
        }
        Ok(Self::build(m, modulus))
    }

    fn build(m: u32, modulus: u32) -> FieldSpec {
        FieldSpec {
            m,
            modulus,
            tables: Arc::new(Tables::build(m, modulus)),
        }
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Field order q = 2^m.
    #[inline]
    pub fn order(&self) -> u32 {
        1 << self.m
    }

    /// Checked conversion from an integer encoding.
    pub fn element(&self, v: u32) -> Result<FieldElement> {
        if v < self.order() {
            Ok(FieldElement(v))
        } else {
            Err(Error::ElementOutOfRange {
                value: v,
                m: self.m,
            })
        }
    }

    /// All q elements in increasing encoding order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.order()).map(FieldElement)
    }

    /// The q-1 nonzero elements in increasing encoding order.
    pub fn nonzero(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (1..self.order()).map(FieldElement)
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let t = &self.tables;
        FieldElement(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
    }

    #[inline]
    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// `a^e` by repeated squaring; `pow(0, 0) = 1`.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        let mut base = a;
        let mut e = e;
        let mut r = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.square(base);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse, computed as `a^(q-2)`.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.order() as u64 - 2))
    }

    /// Inverse via the log table. Callers guarantee `a != 0`.
    #[inline]
    pub(crate) fn inv_fast(&self, a: FieldElement) -> FieldElement {
        debug_assert!(!a.is_zero());
        let t = &self.tables;
        let n = self.order() - 1;
        FieldElement(t.exp[((n - t.log[a.0 as usize]) % n.max(1)) as usize])
    }

    /// `a^(2^k)`.
    pub fn frobenius(&self, a: FieldElement, k: u32) -> FieldElement {
        (0..k).fold(a, |acc, _| self.square(acc))
    }

    /// Absolute trace `a + a^2 + ... + a^(2^(m-1))`, as 0 or 1.
    #[inline]
    pub fn trace_abs(&self, a: FieldElement) -> u32 {
        (a.0 & self.tables.trace_mask).count_ones() & 1
    }

    /// Relative trace onto GF(2^(m/2)): `a^(2^(m/2)) + a`. Requires even m.
    pub fn trace_rel(&self, a: FieldElement) -> Result<FieldElement> {
        if !self.m.is_multiple_of(2) {
            return Err(Error::OddDegree {
                what: "relative trace",
                m: self.m,
            });
        }
        Ok(self.frobenius(a, self.m / 2) + a)
    }

    /// Number of x with `x^2 + z x = c`: 1 when z = 0, otherwise 2 or 0
    /// according to whether `Tr(c / z^2)` vanishes.
    #[inline]
    pub fn quad_root_count(&self, z: FieldElement, c: FieldElement) -> u32 {
        if z.is_zero() {
            return 1;
        }
        let zi = self.inv_fast(z);
        if self.trace_abs(self.mul(c, self.square(zi))) == 0 {
            2
        } else {
            0
        }
    }
}

/// Shorthand for [`FieldSpec::new`].
pub fn make_field(m: u32) -> Result<FieldSpec> {
    FieldSpec::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fe(v: u32) -> FieldElement {
        FieldElement(v)
    }

    /// Irreducibility by brute force: no root-free factorisation into two
    /// lower-degree polynomials exists, checked over every product pair.
    fn irreducible_by_products(p: u32) -> bool {
        let d = degree(p as u64);
        for a in 2u32..(1 << d) {
            for b in 2u32..(1 << d) {
                let da = degree(a as u64);
                let db = degree(b as u64);
                if da + db != d {
                    continue;
                }
                let mut prod = 0u32;
                for k in 0..=db {
                    if b >> k & 1 == 1 {
                        prod ^= a << k;
                    }
                }
                if prod == p {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn default_moduli_small_degrees() {
        assert_eq!(make_field(2).unwrap().modulus(), 0b111);
        assert_eq!(make_field(3).unwrap().modulus(), 0b1011);
        assert_eq!(make_field(4).unwrap().modulus(), 0x13);
    }

    #[test]
    fn default_modulus_is_smallest_by_product_oracle() {
        for m in 1..=6 {
            let expected = (((1u32 << m) | 1)..(1u32 << (m + 1)))
                .step_by(2)
                .find(|&p| irreducible_by_products(p))
                .unwrap();
            assert_eq!(smallest_irreducible(m).unwrap(), expected, "m = {m}");
        }
    }

    #[test]
    fn every_degree_builds() {
        for m in 1..=MAX_DEGREE {
            let f = make_field(m).unwrap();
            assert_eq!(f.modulus() >> m, 1);
            assert_eq!(f.modulus() & 1, 1);
        }
    }

    #[test]
    fn rejects_bad_degree_and_modulus() {
        assert!(matches!(make_field(0), Err(Error::DegreeOutOfRange(0))));
        assert!(matches!(make_field(21), Err(Error::DegreeOutOfRange(21))));
        // x^4 + 1 = (x + 1)^4
        assert!(matches!(
            FieldSpec::with_modulus(4, 0x11),
            Err(Error::ReducibleModulus(0x11))
        ));
        assert!(matches!(
            FieldSpec::with_modulus(4, 0b1011),
            Err(Error::ModulusDegree { .. })
        ));
        // x^4 + x^3 + 1 is irreducible
        assert!(FieldSpec::with_modulus(4, 0x19).is_ok());
    }

    #[test]
    fn element_range() {
        let f = make_field(3).unwrap();
        assert!(f.element(7).is_ok());
        assert!(f.element(8).is_err());
    }

    #[test]
    fn small_products() {
        let gf4 = make_field(2).unwrap();
        assert_eq!(gf4.mul(fe(2), fe(2)), fe(3));
        let gf8 = make_field(3).unwrap();
        assert_eq!(gf8.mul(fe(2), fe(4)), fe(3));
        for a in gf8.elements() {
            assert_eq!(gf8.mul(FieldElement::ONE, a), a);
        }
    }

    #[test]
    fn powers() {
        let gf4 = make_field(2).unwrap();
        let gf8 = make_field(3).unwrap();
        assert_eq!(gf4.pow(fe(2), 3), FieldElement::ONE);
        assert_eq!(gf8.pow(fe(2), 7), FieldElement::ONE);
        assert_eq!(gf8.pow(FieldElement::ZERO, 0), FieldElement::ONE);
        for a in gf8.elements() {
            assert_eq!(gf8.pow(a, 1), a);
        }
    }

    #[test]
    fn inverses() {
        let gf4 = make_field(2).unwrap();
        assert_eq!(gf4.inv(FieldElement::ONE).unwrap(), FieldElement::ONE);
        assert_eq!(gf4.inv(fe(2)).unwrap(), gf4.square(fe(2)));
        assert!(matches!(
            gf4.inv(FieldElement::ZERO),
            Err(Error::ZeroInverse)
        ));
    }

    #[test]
    fn table_mul_matches_schoolbook_exhaustive() {
        for m in 1..=8 {
            let f = make_field(m).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b).0, clmul_mod(a.0, b.0, f.modulus(), m));
                }
            }
        }
    }

    #[test]
    fn inverse_exhaustive_small() {
        for m in 1..=8 {
            let f = make_field(m).unwrap();
            for a in f.nonzero() {
                let ai = f.inv(a).unwrap();
                assert_eq!(f.mul(a, ai), FieldElement::ONE);
                assert_eq!(f.inv_fast(a), ai);
            }
        }
    }

    #[test]
    fn field_axioms_randomized_mid_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for m in 9..=12 {
            let f = make_field(m).unwrap();
            let q = f.order();
            for _ in 0..100_000 {
                let a = fe(rng.gen_range(0..q));
                let b = fe(rng.gen_range(0..q));
                let c = fe(rng.gen_range(0..q));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.mul(a, b + c), f.mul(a, b) + f.mul(a, c));
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                }
            }
        }
    }

    fn trace_by_definition(f: &FieldSpec, a: FieldElement) -> u32 {
        let mut acc = FieldElement::ZERO;
        let mut y = a;
        for _ in 0..f.m() {
            acc += y;
            y = f.square(y);
        }
        assert!(acc.0 <= 1);
        acc.0
    }

    #[test]
    fn trace_small_values() {
        let gf4 = make_field(2).unwrap();
        assert_eq!(gf4.trace_abs(FieldElement::ZERO), 0);
        assert_eq!(gf4.trace_abs(fe(2)), 1);
        let gf8 = make_field(3).unwrap();
        assert_eq!(gf8.trace_abs(FieldElement::ONE), 1);
    }

    #[test]
    fn trace_balanced_and_matches_definition() {
        for m in 1..=13 {
            let f = make_field(m).unwrap();
            let zeros = f
                .elements()
                .filter(|&a| {
                    let t = f.trace_abs(a);
                    if m <= 10 {
                        assert_eq!(t, trace_by_definition(&f, a));
                    }
                    t == 0
                })
                .count();
            assert_eq!(zeros, 1 << (m - 1), "m = {m}");
        }
    }

    #[test]
    fn relative_trace() {
        let gf4 = make_field(2).unwrap();
        assert_eq!(
            gf4.trace_rel(FieldElement::ZERO).unwrap(),
            FieldElement::ZERO
        );
        assert_eq!(gf4.trace_rel(fe(2)).unwrap(), FieldElement::ONE);
        assert_eq!(
            gf4.trace_rel(FieldElement::ONE).unwrap(),
            FieldElement::ZERO
        );
        assert!(make_field(3).unwrap().trace_rel(FieldElement::ONE).is_err());
    }

    #[test]
    fn relative_trace_image_is_subfield() {
        for m in (2..=12).step_by(2) {
            let f = make_field(m).unwrap();
            let q = f.order() as usize;
            let mut image = vec![false; q];
            for a in f.elements() {
                image[f.trace_rel(a).unwrap().0 as usize] = true;
            }
            for u in f.elements() {
                let in_subfield = f.frobenius(u, m / 2) == u;
                assert_eq!(image[u.0 as usize], in_subfield, "m = {m}, u = {u}");
            }
        }
    }

    #[test]
    fn quad_roots_small() {
        let gf8 = make_field(3).unwrap();
        assert_eq!(gf8.quad_root_count(FieldElement::ZERO, fe(5)), 1);
        assert_eq!(
            gf8.quad_root_count(FieldElement::ONE, FieldElement::ZERO),
            2
        );
        let gf4 = make_field(2).unwrap();
        assert_eq!(gf4.quad_root_count(FieldElement::ONE, fe(2)), 0);
    }

    #[test]
    fn quad_roots_match_brute_force() {
        for m in 1..=8 {
            let f = make_field(m).unwrap();
            for z in f.elements() {
                let mut counts = vec![0u32; f.order() as usize];
                for x in f.elements() {
                    counts[(f.square(x) + f.mul(z, x)).0 as usize] += 1;
                }
                for c in f.elements() {
                    assert_eq!(f.quad_root_count(z, c), counts[c.0 as usize]);
                }
            }
        }
    }

    #[test]
    fn hex_parsing() {
        assert_eq!(parse_hex("13").unwrap(), 0x13);
        assert_eq!(parse_hex("0x1F").unwrap(), 0x1f);
        assert!(parse_hex("zz").is_err());
        assert_eq!(fe(0xab).to_string(), "ab");
    }

    proptest! {
        #[test]
        fn frobenius_is_additive(m in 1u32..=12, a in any::<u32>(), b in any::<u32>()) {
            let f = make_field(m).unwrap();
            let mask = f.order() - 1;
            let (a, b) = (fe(a & mask), fe(b & mask));
            prop_assert_eq!(f.square(a + b), f.square(a) + f.square(b));
            prop_assert_eq!(f.trace_abs(a + b), f.trace_abs(a) ^ f.trace_abs(b));
        }
    }
}
