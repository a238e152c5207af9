use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("extension degree {0} outside 1..=20")]
    DegreeOutOfRange(u32),
    #[error("no irreducible polynomial of degree {0} found")]
    NoIrreducible(u32),
    #[error("modulus {modulus:#x} does not have degree {m}")]
    ModulusDegree { m: u32, modulus: u32 },
    #[error("modulus {0:#x} is reducible")]
    ReducibleModulus(u32),
    #[error("value {value:#x} is not an element of GF(2^{m})")]
    ElementOutOfRange { value: u32, m: u32 },
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("{what} requires even m, got m = {m}")]
    OddDegree { what: &'static str, m: u32 },
    #[error("{what} requires odd m, got m = {m}")]
    EvenDegree { what: &'static str, m: u32 },
    #[error("Gold exponent index i = {i} out of range for m = {m}")]
    GoldIndex { i: u32, m: u32 },
    #[error("{0} requires t != 0")]
    ZeroParameter(&'static str),
    #[error("inexact division {num} / {den} in {what}")]
    InexactDivision {
        what: &'static str,
        num: u64,
        den: u64,
    },
    #[error("function is GF(2)-affine; the construction needs a non-linear map")]
    AffineFunction,
    #[error("dimension n must be at least 1")]
    ZeroDimension,
    #[error("{0} points do not fit in a 64-bit packed vector")]
    PackingOverflow(String),
    #[error("Kakeya set has no materialized point set")]
    NotMaterialized,
    #[error("image size map is empty")]
    EmptyImageSizes,
    #[error("image size must be at least 1")]
    ZeroImageSize,
    #[error("bound {kind} does not apply to q = {q}")]
    BoundParity { kind: &'static str, q: u64 },
    #[error("{0}")]
    Parse(String),
}

/// Exact integer division; a remainder is reported as an error.
pub(crate) fn exact_div(what: &'static str, num: u64, den: u64) -> Result<u64> {
    if den == 0 || !num.is_multiple_of(den) {
        Err(Error::InexactDivision { what, num, den })
    } else {
        Ok(num / den)
    }
}
