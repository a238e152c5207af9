//! Report sections for each exhaustive check. The single-topic verbs and
//! `all` assemble these; nothing here does field arithmetic of its own.

use std::ops::RangeInclusive;

use kakeya_core::fiber::FunctionTable;
use kakeya_core::kakeya::{
    bound_eval, build_kakeya, default_function, verification_work, verify_kakeya, BoundKind,
    DEFAULT_MATERIALIZE_CAP, MAX_VERIFY_WORK,
};
use kakeya_core::quartic::{curve_point_count, quartic_sweep};
use kakeya_core::{
    bluher_check, gold_profile, omega0_distribution, omega1_formula, omega3_formula,
    quartic_floor_bound, scale_invariance_check, sharpness_search, verify_half_gold_structure,
    FieldElement, FieldSpec, FunctionSpec, Result,
};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::{val, Section};

/// Field constructor used by every sweep, so a modulus override reaches all of them.
pub type FieldSource<'a> = &'a dyn Fn(u32) -> Result<FieldSpec>;

pub fn bluher_section(fields: FieldSource, ms: RangeInclusive<u32>) -> Result<Section> {
    let mut s = Section::new(
        "bluher",
        &["m", "i", "d", "n0_formula", "n0_bruteforce", "agree"],
    );
    for m in ms {
        let spec = fields(m)?;
        for i in 0..m {
            let c = bluher_check(&spec, i)?;
            let agree = s.check(c.agree == Some(true));
            s.push(vec![
                json!(m),
                json!(i),
                json!(c.d),
                json!(c.n0_formula),
                val(c.n0_bruteforce),
                json!(agree),
            ]);
        }
    }
    Ok(s)
}

/// Gold image sizes against brute force for every t.
pub fn gold_section(
    fields: FieldSource,
    ms: RangeInclusive<u32>,
    only_i: Option<u32>,
) -> Result<Section> {
    let mut s = Section::new(
        "gold_image_sizes",
        &[
            "m",
            "i",
            "d",
            "parity",
            "size_at_zero",
            "size_at_nonzero",
            "measured_at_zero",
            "measured_nonzero_min",
            "measured_nonzero_max",
            "agree",
        ],
    );
    for m in ms {
        let spec = fields(m)?;
        let is: Vec<u32> = match only_i {
            Some(i) => vec![i],
            None => (1..m).collect(),
        };
        for i in is {
            let p = gold_profile(m, i)?;
            let sizes = FunctionTable::new(&spec, &FunctionSpec::Gold(i))?.image_sizes();
            let nonzero = &sizes[1..];
            let lo = nonzero.iter().min().copied().unwrap_or(0) as u64;
            let hi = nonzero.iter().max().copied().unwrap_or(0) as u64;
            let agree = s.check(
                sizes[0] as u64 == p.size_at_zero
                    && lo == p.size_at_nonzero
                    && hi == p.size_at_nonzero,
            );
            s.push(vec![
                json!(m),
                json!(i),
                json!(p.d),
                val(p.parity_case),
                json!(p.size_at_zero),
                json!(p.size_at_nonzero),
                json!(sizes[0]),
                json!(lo),
                json!(hi),
                json!(agree),
            ]);
        }
    }
    Ok(s)
}

/// The `i = m/2` case: closed forms for every t plus the fiber structure.
pub fn half_gold_section(fields: FieldSource, ms: &[u32]) -> Result<Section> {
    let mut s = Section::new(
        "half_gold",
        &[
            "m",
            "sqrt_q",
            "measured_at_zero",
            "expected_nonzero",
            "nonzero_mismatches",
            "image_is_subfield",
            "injective_on_trace_one",
            "two_to_one_elsewhere",
            "scale_invariant",
            "ok",
        ],
    );
    for &m in ms {
        let spec = fields(m)?;
        let q = spec.order() as u64;
        let sqrt_q = 1u64 << (m / 2);
        let expected = (q + sqrt_q) / 2;
        let sizes = FunctionTable::new(&spec, &FunctionSpec::Gold(m / 2))?.image_sizes();
        let mismatches = sizes[1..].iter().filter(|&&v| v as u64 != expected).count();
        let v = verify_half_gold_structure(&spec)?;
        let scale = scale_invariance_check(&spec, m / 2)?;
        let ok = s.check(sizes[0] as u64 == sqrt_q && mismatches == 0 && v.holds() && scale);
        s.push(vec![
            json!(m),
            json!(sqrt_q),
            json!(sizes[0]),
            json!(expected),
            json!(mismatches),
            json!(v.image_is_subfield),
            json!(v.injective_on_trace_one),
            json!(v.two_to_one_elsewhere),
            json!(scale),
            json!(ok),
        ]);
    }
    Ok(s)
}

/// Fiber counts of `x^4 + x^3 + t x` against the closed forms, every t.
pub fn quartic_fiber_section(fields: FieldSource, ms: RangeInclusive<u32>) -> Result<Section> {
    let mut s = Section::new(
        "quartic_fibers",
        &[
            "m",
            "t_checked",
            "omega1_mismatches",
            "omega3_mismatches",
            "fibers_above_4",
            "omega0_matches",
            "ok",
        ],
    );
    for m in ms {
        let spec = fields(m)?;
        let dists = FunctionTable::new(&spec, &FunctionSpec::Quartic)?.fiber_distributions();
        let omega0_ok = dists[0] == omega0_distribution(m)?;
        let mut bad1 = 0u64;
        let mut bad3 = 0u64;
        let mut big = 0u64;
        for (t, d) in dists.iter().enumerate() {
            big += d.omega.range(5..).count() as u64;
            if t == 0 {
                continue;
            }
            let tr = spec.trace_abs(FieldElement(t as u32));
            bad1 += (d.get(1) != omega1_formula(m, tr)?) as u64;
            bad3 += (d.get(3) != omega3_formula(tr)) as u64;
        }
        let ok = s.check(omega0_ok && bad1 == 0 && bad3 == 0 && big == 0);
        s.push(vec![
            json!(m),
            json!(dists.len()),
            json!(bad1),
            json!(bad3),
            json!(big),
            json!(omega0_ok),
            json!(ok),
        ]);
    }
    Ok(s)
}

/// The curve-count image formula against brute force, with the Hasse check.
/// Degrees above `exhaustive_max` are spot-checked on `spot_count` seeded t.
pub fn quartic_exact_section(
    fields: FieldSource,
    ms: &[u32],
    exhaustive_max: u32,
    spot_count: usize,
    seed: u64,
) -> Result<Section> {
    let mut s = Section::new(
        "quartic_exact",
        &[
            "m",
            "mode",
            "t_swept",
            "t_bruteforced",
            "mismatches",
            "hasse_violations",
            "ok",
        ],
    );
    for &m in ms {
        let spec = fields(m)?;
        let q = spec.order() as u64;
        let sweep = quartic_sweep(&spec)?;
        let hasse_bad = sweep.iter().filter(|(c, _)| !c.within_hasse(q)).count();
        let table = FunctionTable::new(&spec, &FunctionSpec::Quartic)?;
        let (mode, checked): (String, Vec<u32>) = if m <= exhaustive_max {
            ("exhaustive".into(), (1..spec.order()).collect())
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = spot_count.min(spec.order() as usize - 1);
            let mut ts: Vec<u32> = sample(&mut rng, spec.order() as usize - 1, n)
                .into_iter()
                .map(|k| k as u32 + 1)
                .collect();
            ts.sort_unstable();
            (format!("spot:{n}:seed={seed}"), ts)
        };
        let mismatches = checked
            .par_iter()
            .filter(|&&t| {
                let exact = sweep[t as usize - 1].1;
                exact != table.image_size(FieldElement(t)) as u64
            })
            .count();
        let ok = s.check(mismatches == 0 && hasse_bad == 0);
        s.push(vec![
            json!(m),
            json!(mode),
            json!(sweep.len()),
            json!(checked.len()),
            json!(mismatches),
            json!(hasse_bad),
            json!(ok),
        ]);
    }
    Ok(s)
}

/// Maximum of `|I(t)|` against the floor bound. Degrees above
/// `required_max` are reported but a non-sharp result there does not fail.
pub fn sharpness_section(fields: FieldSource, ms: &[u32], required_max: u32) -> Result<Section> {
    let mut s = Section::new(
        "sharpness",
        &["m", "q", "bound", "max_size", "sharp", "witnesses"],
    );
    for &m in ms {
        let spec = fields(m)?;
        let r = sharpness_search(&spec)?;
        s.check(r.max_size <= r.bound && (r.sharp || m > required_max));
        s.push(vec![
            json!(r.m),
            json!(r.q),
            json!(r.bound),
            json!(r.max_size),
            json!(r.sharp),
            val(&r.witnesses),
        ]);
    }
    Ok(s)
}

pub struct KakeyaRow {
    pub f: FunctionSpec,
    pub size: u64,
    pub distinct_size: Option<u64>,
    pub grouped_count: Option<u64>,
    pub bound_new: f64,
    pub bound_klss: f64,
    pub kakeya_verified: Option<bool>,
}

pub const KAKEYA_COLUMNS: &[&str] = &[
    "q",
    "n",
    "f",
    "size",
    "bound_new",
    "bound_klss",
    "kakeya_verified",
    "distinct_size",
    "grouped_count",
];

/// Builds, optionally verifies, and compares against both bounds.
pub fn kakeya_row(
    spec: &FieldSpec,
    n: usize,
    f: &FunctionSpec,
    check: bool,
    cap: u64,
) -> Result<KakeyaRow> {
    let k = build_kakeya(spec, n, f, cap)?;
    let size = k.formula_size()?;
    let q = spec.order() as u64;
    let (new_kind, klss_kind) = BoundKind::pair_for_degree(spec.m());
    let kakeya_verified = match (check, verification_work(&k)) {
        (true, Some(work)) if work <= MAX_VERIFY_WORK => Some(verify_kakeya(&k)?.ok),
        _ => None,
    };
    Ok(KakeyaRow {
        f: f.clone(),
        size,
        distinct_size: k.distinct_size(),
        grouped_count: k.grouped_count,
        bound_new: bound_eval(new_kind, q, n)?,
        bound_klss: bound_eval(klss_kind, q, n)?,
        kakeya_verified,
    })
}

impl KakeyaRow {
    pub fn cells(&self, q: u64, n: usize) -> Vec<Value> {
        vec![
            json!(q),
            json!(n),
            json!(self.f.to_string()),
            json!(self.size),
            json!(self.bound_new),
            json!(self.bound_klss),
            val(self.kakeya_verified),
            val(self.distinct_size),
            val(self.grouped_count),
        ]
    }

    /// Verified, group count consistent with the formula, and strictly below both bounds.
    pub fn passes(&self) -> bool {
        use kakeya_core::kakeya::strictly_below;
        self.kakeya_verified != Some(false)
            && self.grouped_count.is_none_or(|g| g == self.size)
            && self.distinct_size.is_none_or(|d| d <= self.size)
            && strictly_below(self.size, self.bound_new)
            && strictly_below(self.size, self.bound_klss)
    }
}

/// The construction with its default function at each `(m, n)`.
pub fn kakeya_section(fields: FieldSource, ms: &[u32], ns: &[usize]) -> Result<Section> {
    let mut s = Section::new("kakeya", KAKEYA_COLUMNS);
    for &m in ms {
        let spec = fields(m)?;
        for &n in ns {
            let row = kakeya_row(
                &spec,
                n,
                &default_function(m),
                true,
                DEFAULT_MATERIALIZE_CAP,
            )?;
            s.check(row.passes() && row.kakeya_verified == Some(true));
            s.push(row.cells(spec.order() as u64, n));
        }
    }
    Ok(s)
}

/// New bound against the earlier bound of the same parity.
pub fn bound_table(
    name: &str,
    pairs: &[(u64, RangeInclusive<usize>)],
    require_dominance: bool,
) -> Result<Section> {
    let mut s = Section::new(
        name,
        &[
            "q",
            "n",
            "new_kind",
            "bound_new",
            "klss_kind",
            "bound_klss",
            "relative_gap",
            "new_below_klss",
        ],
    );
    for (q, ns) in pairs {
        let m = q.trailing_zeros();
        let (new_kind, klss_kind) = BoundKind::pair_for_degree(m);
        for n in ns.clone() {
            let new = bound_eval(new_kind, *q, n)?;
            let klss = bound_eval(klss_kind, *q, n)?;
            let gap = (klss - new) / klss;
            let below = gap > 1e-6;
            if require_dominance {
                s.check(below);
            }
            s.push(vec![
                json!(q),
                json!(n),
                json!(new_kind.name()),
                json!(new),
                json!(klss_kind.name()),
                json!(klss),
                json!(gap),
                json!(below),
            ]);
        }
    }
    Ok(s)
}

/// Minimum distance from an integer for a float floor to be trusted.
const FLOOR_MARGIN: f64 = 1e-6;

/// Integer floor bound against floating evaluation of
/// `floor(5q/8 + (2 sqrt(q) + 5)/8)`.
pub fn floor_bound_section(ms: &[u32]) -> Result<Section> {
    let mut s = Section::new(
        "floor_bound",
        &["m", "integer", "float_value", "float_floor", "margin", "ok"],
    );
    for &m in ms {
        let q = (1u64 << m) as f64;
        let x = 5.0 * q / 8.0 + (2.0 * q.sqrt() + 5.0) / 8.0;
        let fl = x.floor();
        let margin = (x - fl).min(fl + 1.0 - x);
        let int = quartic_floor_bound(m)?;
        let ok = s.check(margin > FLOOR_MARGIN && fl as u64 == int);
        s.push(vec![
            json!(m),
            json!(int),
            json!(x),
            json!(fl as u64),
            json!(margin),
            json!(ok),
        ]);
    }
    Ok(s)
}

/// Per-t quartic rows: fibers, curve count, exact size and bound.
pub fn quartic_t_section(spec: &FieldSpec, ts: &[FieldElement]) -> Result<Section> {
    let m = spec.m();
    let q = spec.order() as u64;
    let odd = m % 2 == 1;
    let bound = if odd {
        Some(quartic_floor_bound(m)?)
    } else {
        None
    };
    let mut s = Section::new(
        "quartic",
        &[
            "t",
            "trace",
            "omega",
            "omega_predicted",
            "image_size",
            "v",
            "within_hasse",
            "exact_size",
            "floor_bound",
            "ok",
        ],
    );
    let table = FunctionTable::new(spec, &FunctionSpec::Quartic)?;
    for &t in ts {
        let d = table.fiber_distribution(t);
        let tr = spec.trace_abs(t);
        let omega: Vec<String> = d.omega.iter().map(|(k, c)| format!("{k}:{c}")).collect();
        let (predicted, fibers_ok) = if t.is_zero() {
            let p = omega0_distribution(m)?;
            let ok = p == d;
            (
                json!(p
                    .omega
                    .iter()
                    .map(|(k, c)| format!("{k}:{c}"))
                    .collect::<Vec<_>>()),
                ok,
            )
        } else {
            let o1 = omega1_formula(m, tr)?;
            let o3 = omega3_formula(tr);
            (
                json!([format!("1:{o1}"), format!("3:{o3}")]),
                d.get(1) == o1 && d.get(3) == o3 && d.max_fiber() <= 4,
            )
        };
        let size = d.image_size();
        let (v, hasse, exact) = if t.is_zero() {
            (Value::Null, Value::Null, Value::Null)
        } else {
            let c = curve_point_count(spec, t);
            let exact = if odd {
                json!(kakeya_core::quartic_image_exact(spec, t)?)
            } else {
                Value::Null
            };
            (json!(c.v), json!(c.within_hasse(q)), exact)
        };
        let exact_ok = exact.as_u64().is_none_or(|e| e == size);
        let bound_ok = match (bound, t.is_zero()) {
            (Some(b), false) => size <= b,
            _ => true,
        };
        let ok = s.check(fibers_ok && exact_ok && bound_ok && hasse != json!(false));
        s.push(vec![
            json!(t.to_string()),
            json!(tr),
            json!(omega),
            predicted,
            json!(size),
            v,
            hasse,
            exact,
            val(bound),
            json!(ok),
        ]);
    }
    Ok(s)
}
