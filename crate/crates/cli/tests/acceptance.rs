//! Acceptance suite. Prints one line per criterion and fails if any criterion fails.
//!
//! Run with `cargo test -p kakeya-cli --test acceptance`.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use kakeya_core::{
    bluher_bruteforce, bluher_formula, bound_eval, build_kakeya, canonical_directions_count,
    default_function, gold_profile, make_field, omega0_distribution, omega1_formula,
    omega3_formula, quartic_floor_bound, quartic_image_exact, quartic_sweep, sharpness_search,
    verify_half_gold_structure, verify_kakeya, BoundKind, FieldElement, FieldSpec, FunctionSpec,
    FunctionTable, DEFAULT_MATERIALIZE_CAP,
};
use rand::seq::index::sample;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn field(m: u32) -> FieldSpec {
    make_field(m).expect("field")
}

fn criterion_1() -> Outcome {
    for m in 2..=12 {
        let spec = field(m);
        for i in 0..m {
            let formula = bluher_formula(m, i).map_err(|e| e.to_string())?;
            let brute = bluher_bruteforce(&spec, i).map_err(|e| e.to_string())?;
            ensure(formula == brute, || {
                format!("m={m} i={i}: formula {formula} brute {brute}")
            })?;
        }
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    for m in 2..=12 {
        let spec = field(m);
        for i in 1..m {
            let profile = gold_profile(m, i).map_err(|e| e.to_string())?;
            let table =
                FunctionTable::new(&spec, &FunctionSpec::Gold(i)).map_err(|e| e.to_string())?;
            for (t, size) in spec.elements().zip(table.image_sizes()) {
                let want = profile.size_at(t);
                ensure(size as u64 == want, || {
                    format!("m={m} i={i} t={t}: got {size} want {want}")
                })?;
            }
        }
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    for m in [2u32, 4, 6, 8, 10, 12] {
        let spec = field(m);
        let q = 1u64 << m;
        let sqrt_q = 1u64 << (m / 2);
        let table =
            FunctionTable::new(&spec, &FunctionSpec::Gold(m / 2)).map_err(|e| e.to_string())?;
        for (t, size) in spec.elements().zip(table.image_sizes()) {
            let want = if t.is_zero() {
                sqrt_q
            } else {
                (q + sqrt_q) / 2
            };
            ensure(size as u64 == want, || {
                format!("m={m} t={t}: got {size} want {want}")
            })?;
        }
        let verdict = verify_half_gold_structure(&spec).map_err(|e| e.to_string())?;
        ensure(verdict.holds(), || format!("m={m}: structure {verdict:?}"))?;

        // Independent look at the structural facts: g(y) = y^(sqrt q + 1).
        let g = |y: FieldElement| spec.pow(y, sqrt_q + 1);
        let image: HashSet<u32> = spec.elements().map(|y| g(y).value()).collect();
        let subfield: HashSet<u32> = spec
            .elements()
            .filter(|&a| spec.pow(a, sqrt_q) == a)
            .map(FieldElement::value)
            .collect();
        ensure(image == subfield, || {
            format!("m={m}: image is not the subfield")
        })?;
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    for m in 1..=13 {
        let spec = field(m);
        let table = FunctionTable::new(&spec, &FunctionSpec::Quartic).map_err(|e| e.to_string())?;
        let omega0 = omega0_distribution(m).map_err(|e| e.to_string())?;
        for (t, dist) in spec.elements().zip(table.fiber_distributions()) {
            if t.is_zero() {
                ensure(dist.omega == omega0.omega, || {
                    format!("m={m}: omega_0 {:?}", dist.omega)
                })?;
                continue;
            }
            let tr = spec.trace_abs(t);
            let w1 = omega1_formula(m, tr).map_err(|e| e.to_string())?;
            let w3 = omega3_formula(tr);
            ensure(dist.get(1) == w1, || {
                format!("m={m} t={t}: omega1 {} want {w1}", dist.get(1))
            })?;
            ensure(dist.get(3) == w3, || {
                format!("m={m} t={t}: omega3 {} want {w3}", dist.get(3))
            })?;
            ensure(dist.total_preimages() == 1 << m, || {
                format!("m={m} t={t}: preimage total")
            })?;
        }
    }
    Ok(())
}

fn criterion_5() -> Outcome {
    for m in [3u32, 5, 7, 9, 11, 13] {
        let spec = field(m);
        let q = 1u64 << m;
        let table = FunctionTable::new(&spec, &FunctionSpec::Quartic).map_err(|e| e.to_string())?;
        let sweep = quartic_sweep(&spec).map_err(|e| e.to_string())?;
        ensure(sweep.len() as u64 == q - 1, || {
            format!("m={m}: sweep length {}", sweep.len())
        })?;
        for (count, _) in &sweep {
            ensure(count.within_hasse(q), || {
                format!("m={m} t={}: v={} outside Hasse", count.t, count.v)
            })?;
        }
        let ts: Vec<u32> = if m <= 11 {
            (1..q as u32).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let mut picked: Vec<u32> = sample(&mut rng, q as usize - 1, 100)
                .into_iter()
                .map(|k| k as u32 + 1)
                .collect();
            picked.sort_unstable();
            picked
        };
        for tv in ts {
            let t = spec.element(tv).map_err(|e| e.to_string())?;
            let exact = quartic_image_exact(&spec, t).map_err(|e| e.to_string())?;
            let brute = table.image_size(t) as u64;
            ensure(exact == brute, || {
                format!("m={m} t={t}: formula {exact} brute {brute}")
            })?;
            let (count, size) = &sweep[tv as usize - 1];
            ensure(count.t == t && *size == exact, || {
                format!("m={m} t={t}: sweep row disagrees")
            })?;
        }
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    for m in [1u32, 3, 5, 7, 9, 11, 13] {
        let rec = sharpness_search(&field(m)).map_err(|e| e.to_string())?;
        ensure(rec.sharp, || {
            format!("m={m}: bound {} max {}", rec.bound, rec.max_size)
        })?;
        ensure(!rec.witnesses.is_empty(), || format!("m={m}: no witnesses"))?;
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    for m in [2u32, 3, 4] {
        let spec = field(m);
        let q = 1u64 << m;
        let f = default_function(m);
        let (new_kind, klss_kind) = BoundKind::pair_for_degree(m);
        for n in [2usize, 3] {
            let set =
                build_kakeya(&spec, n, &f, DEFAULT_MATERIALIZE_CAP).map_err(|e| e.to_string())?;
            let formula = set.formula_size().map_err(|e| e.to_string())?;

            let table = FunctionTable::new(&spec, &f).map_err(|e| e.to_string())?;
            let expected = expected_size(&table, &spec, n);
            ensure(formula == expected, || {
                format!("q={q} n={n}: formula {formula} expected {expected}")
            })?;

            let grouped = set.grouped_count.ok_or("not materialized")?;
            let distinct = set.distinct_size().ok_or("not materialized")?;
            ensure(grouped == formula, || {
                format!("q={q} n={n}: grouped {grouped} formula {formula}")
            })?;
            ensure(distinct <= formula, || {
                format!("q={q} n={n}: distinct {distinct} > formula {formula}")
            })?;

            let verdict = verify_kakeya(&set).map_err(|e| e.to_string())?;
            ensure(verdict.ok, || {
                format!("q={q} n={n}: missing {:?}", verdict.missing)
            })?;
            ensure(
                verdict.directions_checked as u64 == canonical_directions_count(q, n),
                || format!("q={q} n={n}: checked {}", verdict.directions_checked),
            )?;

            let new_b = bound_eval(new_kind, q, n).map_err(|e| e.to_string())?;
            let klss_b = bound_eval(klss_kind, q, n).map_err(|e| e.to_string())?;
            ensure((formula as f64) < new_b, || {
                format!("q={q} n={n}: {formula} !< new {new_b}")
            })?;
            ensure((formula as f64) < klss_b, || {
                format!("q={q} n={n}: {formula} !< klss {klss_b}")
            })?;
        }
    }
    Ok(())
}

/// `sum_t sum_{j<n} |I(t)|^j`, one term per group of the construction.
fn expected_size(table: &FunctionTable, spec: &FieldSpec, n: usize) -> u64 {
    spec.elements()
        .map(|t| {
            let s = table.image_size(t) as u64;
            (0..n as u32).map(|j| s.pow(j)).sum::<u64>()
        })
        .sum()
}

fn criterion_8() -> Outcome {
    let check = |new_kind, klss_kind, q: u64, ns: std::ops::RangeInclusive<usize>| -> Outcome {
        for n in ns {
            let a = bound_eval(new_kind, q, n).map_err(|e| e.to_string())?;
            let b = bound_eval(klss_kind, q, n).map_err(|e| e.to_string())?;
            ensure((b - a) / b > 1e-6, || {
                format!("q={q} n={n}: new {a} klss {b}")
            })?;
        }
        Ok(())
    };
    for q in [16u64, 64] {
        check(BoundKind::NewEven, BoundKind::KlssEvenPower, q, 2..=6)?;
    }
    for q in [8u64, 32, 128] {
        check(BoundKind::NewOdd, BoundKind::KlssOddPower, q, 1..=6)?;
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    for m in (1u32..=31).step_by(2) {
        let q = (1u64 << m) as f64;
        let value = 5.0 * q / 8.0 + (2.0 * q.sqrt() + 5.0) / 8.0;
        let floor = value.floor();
        ensure(value - floor > 1e-6 && floor + 1.0 - value > 1e-6, || {
            format!("m={m}: {value} too close to an integer for f64")
        })?;
        let int = quartic_floor_bound(m).map_err(|e| e.to_string())?;
        ensure(int == floor as u64, || {
            format!("m={m}: integer {int} float {floor}")
        })?;
    }
    Ok(())
}

fn run_all(jobs: &str) -> (i32, String) {
    let (code, out, err) =
        kakeya_cli::main_with_args(["kakeya", "--jobs", jobs, "--seed", "0", "all"]);
    assert!(err.is_empty(), "stderr: {err}");
    (code, out)
}

fn criterion_10() -> Outcome {
    let (c1, a1) = run_all("1");
    let (c2, a2) = run_all("1");
    let (c3, b1) = run_all("8");
    let (c4, b2) = run_all("8");
    ensure([c1, c2, c3, c4] == [0; 4], || {
        format!("exit codes {:?}", [c1, c2, c3, c4])
    })?;
    ensure(a1 == a2, || "two runs at --jobs 1 differ".into())?;
    ensure(b1 == b2, || "two runs at --jobs 8 differ".into())?;
    ensure(a1 == b1, || "--jobs 1 and --jobs 8 differ".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("bluher count agreement", criterion_1),
        ("gold image sizes", criterion_2),
        ("half-index gold structure", criterion_3),
        ("quartic fiber counts", criterion_4),
        ("quartic exact image size and Hasse", criterion_5),
        ("quartic floor bound sharpness", criterion_6),
        ("kakeya construction end to end", criterion_7),
        ("bound dominance", criterion_8),
        ("floor bound integer path", criterion_9),
        ("determinism of all", criterion_10),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {}: PASS  {name} ({secs:.2}s)", k + 1),
            Err(why) => {
                println!("criterion {}: FAIL  {name} ({secs:.2}s): {why}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
