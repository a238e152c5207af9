//! Image sets `I_f(t) = { f(x) + t x }` and their fiber histograms.
//!
//! Every theorem check in the crate bottoms out here: sizes are counted by
//! brute force over all q inputs, with a q-bit membership bitmap per `t`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

/// The map `f: F_q -> F_q` under study.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctionSpec {
    /// `x^(2^i + 1)`.
    Gold(u32),
    /// `x^4 + x^3`.
    Quartic,
    /// `sum c_k x^(e_k)`.
    SparseExponentSum(Vec<(u64, FieldElement)>),
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Gold(i) => write!(f, "gold:{i}"),
            FunctionSpec::Quartic => f.write_str("quartic"),
            FunctionSpec::SparseExponentSum(terms) => {
                f.write_str("sum:")?;
                for (k, (e, c)) in terms.iter().enumerate() {
                    if k > 0 {
                        f.write_str("+")?;
                    }
                    write!(f, "{c}*x^{e}")?;
                }
                Ok(())
            }
        }
    }
}

impl FunctionSpec {
    /// The map `x^(q-2) + x^2` used by the earlier odd-power-of-two bound.
    pub fn inverse_plus_square(spec: &FieldSpec) -> FunctionSpec {
        FunctionSpec::SparseExponentSum(vec![
            (spec.order() as u64 - 2, FieldElement::ONE),
            (2, FieldElement::ONE),
        ])
    }

    pub fn validate(&self, spec: &FieldSpec) -> Result<()> {
        match *self {
            FunctionSpec::Gold(i) if i >= spec.m() => Err(Error::GoldIndex { i, m: spec.m() }),
            FunctionSpec::SparseExponentSum(ref terms) => {
                for &(_, c) in terms {
                    spec.element(c.value())?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// `f(x)` in the field.
pub fn evaluate(spec: &FieldSpec, f: &FunctionSpec, x: FieldElement) -> Result<FieldElement> {
    f.validate(spec)?;
    Ok(eval_unchecked(spec, f, x))
}

fn eval_unchecked(spec: &FieldSpec, f: &FunctionSpec, x: FieldElement) -> FieldElement {
    match f {
        FunctionSpec::Gold(i) => spec.mul(spec.frobenius(x, *i), x),
        FunctionSpec::Quartic => {
            let x2 = spec.square(x);
            let x3 = spec.mul(x2, x);
            spec.square(x2) + x3
        }
        FunctionSpec::SparseExponentSum(terms) => {
            terms.iter().fold(FieldElement::ZERO, |acc, &(e, c)| {
                acc + spec.mul(c, spec.pow(x, e))
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImageSetStats {
    pub t: FieldElement,
    pub size: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<FieldElement>>,
}

/// `omega[k]` = number of y with exactly k preimages under `x -> f(x) + t x`.
/// Only nonzero counts are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FiberDistribution {
    pub t: FieldElement,
    pub omega: BTreeMap<u32, u64>,
}

impl FiberDistribution {
    /// Builds a distribution from `(k, count)` pairs, dropping zero counts.
    pub fn from_counts(t: FieldElement, counts: impl IntoIterator<Item = (u32, u64)>) -> Self {
        let mut omega = BTreeMap::new();
        for (k, c) in counts {
            if c > 0 {
                *omega.entry(k).or_insert(0) += c;
            }
        }
        FiberDistribution { t, omega }
    }

    pub fn get(&self, k: u32) -> u64 {
        self.omega.get(&k).copied().unwrap_or(0)
    }

    /// `sum_k omega[k]`; equals q.
    pub fn total_values(&self) -> u64 {
        self.omega.values().sum()
    }

    /// `sum_k k omega[k]`; equals q.
    pub fn total_preimages(&self) -> u64 {
        self.omega.iter().map(|(&k, &c)| k as u64 * c).sum()
    }

    /// `sum_{k >= 1} omega[k]`, the image size.
    pub fn image_size(&self) -> u64 {
        self.omega.range(1..).map(|(_, &c)| c).sum()
    }

    pub fn max_fiber(&self) -> u32 {
        self.omega.keys().next_back().copied().unwrap_or(0)
    }
}

/// The values `f(x)` for every x, so sweeps over t only pay for `t x`.
#[derive(Clone, Debug)]
pub struct FunctionTable {
    spec: FieldSpec,
    values: Vec<u32>,
}

impl FunctionTable {
    pub fn new(spec: &FieldSpec, f: &FunctionSpec) -> Result<FunctionTable> {
        f.validate(spec)?;
        let values = spec
            .elements()
            .map(|x| eval_unchecked(spec, f, x).value())
            .collect();
        Ok(FunctionTable {
            spec: spec.clone(),
            values,
        })
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    #[inline]
    pub fn value(&self, x: FieldElement) -> FieldElement {
        FieldElement(self.values[x.value() as usize])
    }

    #[inline]
    fn shifted(&self, t: FieldElement) -> impl Iterator<Item = usize> + '_ {
        let spec = &self.spec;
        self.values
            .iter()
            .enumerate()
            .map(move |(x, &v)| (v ^ spec.mul(t, FieldElement(x as u32)).value()) as usize)
    }

    /// Fills `bitmap` (q bits) with membership of `I_f(t)` and returns its size.
    pub fn image_bitmap_into(&self, t: FieldElement, bitmap: &mut Vec<u64>) -> u32 {
        let words = self.values.len().div_ceil(64);
        bitmap.clear();
        bitmap.resize(words, 0);
        for y in self.shifted(t) {
            bitmap[y >> 6] |= 1 << (y & 63);
        }
        bitmap.iter().map(|w| w.count_ones()).sum()
    }

    pub fn image_size(&self, t: FieldElement) -> u32 {
        let mut bitmap = Vec::new();
        self.image_bitmap_into(t, &mut bitmap)
    }

    pub fn image_set(&self, t: FieldElement) -> ImageSetStats {
        let mut bitmap = Vec::new();
        let size = self.image_bitmap_into(t, &mut bitmap);
        let values = self
            .spec
            .elements()
            .filter(|y| {
                let y = y.value() as usize;
                bitmap[y >> 6] >> (y & 63) & 1 == 1
            })
            .collect();
        ImageSetStats {
            t,
            size,
            values: Some(values),
        }
    }

    /// Fiber histogram, reusing `counts` (q slots) as scratch.
    pub fn fiber_distribution_with(
        &self,
        t: FieldElement,
        counts: &mut Vec<u32>,
    ) -> FiberDistribution {
        counts.clear();
        counts.resize(self.values.len(), 0);
        for y in self.shifted(t) {
            counts[y] += 1;
        }
        let mut hist: Vec<u64> = vec![0; 8];
        for &c in counts.iter() {
            let c = c as usize;
            if c >= hist.len() {
                hist.resize(c + 1, 0);
            }
            hist[c] += 1;
        }
        FiberDistribution::from_counts(t, hist.into_iter().enumerate().map(|(k, n)| (k as u32, n)))
    }

    pub fn fiber_distribution(&self, t: FieldElement) -> FiberDistribution {
        self.fiber_distribution_with(t, &mut Vec::new())
    }

    /// `|I_f(t)|` for every t, indexed by the encoding of t.
    pub fn image_sizes(&self) -> Vec<u32> {
        (0..self.spec.order())
            .into_par_iter()
            .map_init(Vec::new, |bitmap, t| {
                self.image_bitmap_into(FieldElement(t), bitmap)
            })
            .collect()
    }

    /// Fiber distributions for every t, indexed by the encoding of t.
    pub fn fiber_distributions(&self) -> Vec<FiberDistribution> {
        (0..self.spec.order())
            .into_par_iter()
            .map_init(Vec::new, |counts, t| {
                self.fiber_distribution_with(FieldElement(t), counts)
            })
            .collect()
    }
}

pub fn image_set(spec: &FieldSpec, f: &FunctionSpec, t: FieldElement) -> Result<ImageSetStats> {
    Ok(FunctionTable::new(spec, f)?.image_set(t))
}

pub fn fiber_distribution(
    spec: &FieldSpec,
    f: &FunctionSpec,
    t: FieldElement,
) -> Result<FiberDistribution> {
    Ok(FunctionTable::new(spec, f)?.fiber_distribution(t))
}
