//! Small Kakeya sets in `F_q^n`, `q = 2^m`, built from Gold power maps and
//! from `x^4 + x^3`, together with exhaustive checks of every counting
//! formula they rest on.
//!
//! - [`field`]: GF(2^m) arithmetic, traces, quadratic root counts.
//! - [`fiber`]: image sets and fiber distributions of `x -> f(x) + t x`.
//! - [`bluher`]: root-free counts of `x^(2^i+1) + b x + b`.
//! - [`gold`]: closed-form image sizes for Gold maps.
//! - [`quartic`]: fiber counts, curve point counts and the floor bound for `x^4 + x^3`.
//! - [`kakeya`]: the construction, its direction check, and the size bounds.

pub mod bluher;
pub mod error;
pub mod fiber;
pub mod field;
pub mod gold;
pub mod kakeya;
pub mod quartic;

pub use bluher::{bluher_bruteforce, bluher_check, bluher_formula, BluherCount};
pub use error::{Error, Result};
pub use fiber::{
    evaluate, fiber_distribution, image_set, FiberDistribution, FunctionSpec, FunctionTable,
    ImageSetStats,
};
pub use field::{make_field, FieldElement, FieldSpec};
pub use gold::{
    gold_profile, scale_invariance_check, verify_half_gold_structure, GoldImageProfile,
};
pub use kakeya::{
    bound_eval, bound_report, build_kakeya, canonical_directions, canonical_directions_count,
    default_function, is_gf2_affine, kakeya_size_from_images, verify_kakeya, BoundKind,
    BoundReport, Direction, KakeyaSet, KakeyaVerdict, DEFAULT_MATERIALIZE_CAP,
};
pub use quartic::{
    curve_point_count, curve_point_count_by_pairs, omega0_distribution, omega1_formula,
    omega3_formula, quartic_floor_bound, quartic_image_exact, quartic_sweep, sharpness_search,
    CurvePointCount, QuarticImageRecord, SharpnessRecord,
};
