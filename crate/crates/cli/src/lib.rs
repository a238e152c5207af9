//! Command-line driver: parses a [`RunConfig`], runs the requested sweep on a
//! worker pool of the requested size, and returns a [`Report`].
//!
//! Output depends only on the configuration (including `--seed`), never on
//! the worker count: every parallel step collects in index order or reduces
//! with counts.

pub mod report;
pub mod sweeps;

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use kakeya_core::field::parse_hex;
use kakeya_core::kakeya::{default_function, DEFAULT_MATERIALIZE_CAP};
use kakeya_core::{FieldElement, FieldSpec, FunctionSpec};

use crate::report::{Format, Report, Section};
use crate::sweeps::FieldSource;

/// Inclusive integer range written `A..B` (or a single `A`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanArg {
    pub start: u32,
    pub end: u32,
}

impl FromStr for SpanArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = match s.split_once("..") {
            Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
            None => (s, s),
        };
        let parse = |x: &str| {
            x.trim()
                .parse::<u32>()
                .map_err(|_| format!("bad range bound {x:?}"))
        };
        let (start, end) = (parse(a)?, parse(b)?);
        if start > end {
            return Err(format!("empty range {s}"));
        }
        Ok(SpanArg { start, end })
    }
}

impl SpanArg {
    pub fn range(&self) -> RangeInclusive<u32> {
        self.start..=self.end
    }
}

/// `gold:I`, `quartic`, or `inv-sq` (`x^(q-2) + x^2`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctionArg {
    Gold(u32),
    Quartic,
    InverseSquare,
}

impl FromStr for FunctionArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quartic" => Ok(FunctionArg::Quartic),
            "inv-sq" => Ok(FunctionArg::InverseSquare),
            _ => s
                .strip_prefix("gold:")
                .and_then(|i| i.parse().ok())
                .map(FunctionArg::Gold)
                .ok_or_else(|| {
                    format!("unknown function {s:?} (expected gold:I, quartic or inv-sq)")
                }),
        }
    }
}

impl FunctionArg {
    fn resolve(&self, spec: &FieldSpec) -> FunctionSpec {
        match *self {
            FunctionArg::Gold(i) => FunctionSpec::Gold(i),
            FunctionArg::Quartic => FunctionSpec::Quartic,
            FunctionArg::InverseSquare => FunctionSpec::inverse_plus_square(spec),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "kakeya",
    version,
    about = "Exhaustive checks for Kakeya set constructions over GF(2^m)"
)]
pub struct RunConfig {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: u32,
    /// Field modulus as hex (for example 13 for x^4 + x + 1); single-m commands only.
    #[arg(long, global = true)]
    pub modulus: Option<String>,
    /// Seed for spot-check sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Root-free counts of x^(2^i+1) + bx + b: closed form against brute force.
    VerifyBluher {
        #[arg(long, default_value_t = 12)]
        m_max: u32,
        #[arg(long, default_value_t = 2)]
        m_min: u32,
    },
    /// Image sizes of x^(2^i+1) + tx.
    Gold {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        i: u32,
        /// Brute-force every t (and the fiber structure when i = m/2).
        #[arg(long)]
        verify: bool,
    },
    /// Fibers, curve counts and image sizes of x^4 + x^3 + tx.
    Quartic {
        #[arg(long)]
        m: u32,
        /// A single t in hex; default is every t.
        #[arg(long)]
        t: Option<String>,
    },
    /// Largest |I(t)| for x^4 + x^3 against the floor bound (odd m).
    Sharpness {
        #[arg(long)]
        m: u32,
    },
    /// Build the Kakeya set for f in F_q^n and compare with the bounds.
    Kakeya {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: usize,
        /// gold:I, quartic or inv-sq; defaults to gold:m/2 (even m) or quartic (odd m).
        #[arg(long)]
        f: Option<FunctionArg>,
        /// Verify the line-in-every-direction property exhaustively.
        #[arg(long)]
        check: bool,
        /// Largest point set to materialize.
        #[arg(long, default_value_t = DEFAULT_MATERIALIZE_CAP)]
        cap: u64,
    },
    /// New and earlier upper bounds over ranges of m and n.
    Bounds {
        #[arg(long, default_value = "1..8")]
        m_range: SpanArg,
        #[arg(long, default_value = "1..6")]
        n_range: SpanArg,
    },
    /// Every acceptance check.
    All,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

impl From<kakeya_core::Error> for UsageError {
    fn from(e: kakeya_core::Error) -> Self {
        UsageError(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

impl RunConfig {
    fn is_single_m(&self) -> bool {
        matches!(
            self.command,
            Command::Gold { .. }
                | Command::Quartic { .. }
                | Command::Sharpness { .. }
                | Command::Kakeya { .. }
        )
    }

    fn field(&self, m: u32) -> kakeya_core::Result<FieldSpec> {
        match &self.modulus {
            Some(hex) => FieldSpec::with_modulus(m, parse_hex(hex)?),
            None => FieldSpec::new(m),
        }
    }
}

/// Runs the configured command on a pool of `config.jobs` threads.
pub fn run(config: &RunConfig) -> Result<Report, UsageError> {
    if config.modulus.is_some() && !config.is_single_m() {
        return Err(usage("--modulus applies only to single-m commands"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs as usize)
        .build()
        .map_err(|e| usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(config))
}

fn dispatch(config: &RunConfig) -> Result<Report, UsageError> {
    let default_fields = |m: u32| FieldSpec::new(m);
    let fields: FieldSource = &default_fields;
    let mut report;
    match &config.command {
        Command::VerifyBluher { m_max, m_min } => {
            if m_min > m_max || *m_min < 1 {
                return Err(usage("need 1 <= m-min <= m-max"));
            }
            report = Report::new("verify-bluher");
            report
                .sections
                .push(sweeps::bluher_section(fields, *m_min..=*m_max)?);
        }
        Command::Gold { m, i, verify } => {
            let spec = config.field(*m)?;
            let single = |_: u32| Ok(spec.clone());
            report = Report::new("gold");
            let profile = kakeya_core::gold_profile(*m, *i)?;
            let mut s = Section::new(
                "gold_profile",
                &["m", "i", "d", "parity", "size_at_zero", "size_at_nonzero"],
            );
            s.push(vec![
                (*m).into(),
                (*i).into(),
                profile.d.into(),
                report::val(profile.parity_case),
                profile.size_at_zero.into(),
                profile.size_at_nonzero.into(),
            ]);
            report.sections.push(s);
            if *verify {
                report
                    .sections
                    .push(sweeps::gold_section(&single, *m..=*m, Some(*i))?);
                if m % 2 == 0 && *i == m / 2 {
                    report
                        .sections
                        .push(sweeps::half_gold_section(&single, &[*m])?);
                }
            }
        }
        Command::Quartic { m, t } => {
            let spec = config.field(*m)?;
            let ts: Vec<FieldElement> = match t {
                Some(hex) => vec![spec.element(parse_hex(hex)?)?],
                None => spec.elements().collect(),
            };
            report = Report::new("quartic");
            report.sections.push(sweeps::quartic_t_section(&spec, &ts)?);
        }
        Command::Sharpness { m } => {
            if m % 2 == 0 {
                return Err(usage("m must be odd"));
            }
            let spec = config.field(*m)?;
            let single = |_: u32| Ok(spec.clone());
            report = Report::new("sharpness");
            report
                .sections
                .push(sweeps::sharpness_section(&single, &[*m], 13)?);
        }
        Command::Kakeya {
            m,
            n,
            f,
            check,
            cap,
        } => {
            let spec = config.field(*m)?;
            let f = f
                .as_ref()
                .map(|f| f.resolve(&spec))
                .unwrap_or_else(|| default_function(*m));
            let row = sweeps::kakeya_row(&spec, *n, &f, *check, *cap)?;
            let mut s = Section::new("kakeya", sweeps::KAKEYA_COLUMNS);
            // The bounds are only claimed for the default function.
            if f == default_function(*m) {
                s.check(row.passes());
            } else {
                s.check(row.kakeya_verified != Some(false));
            }
            s.push(row.cells(spec.order() as u64, *n));
            report = Report::new("kakeya");
            report.sections.push(s);
        }
        Command::Bounds { m_range, n_range } => {
            if m_range.start < 1 || m_range.end > 40 || n_range.start < 1 {
                return Err(usage("need 1 <= m <= 40 and n >= 1"));
            }
            let pairs: Vec<(u64, RangeInclusive<usize>)> = m_range
                .range()
                .map(|m| (1u64 << m, n_range.start as usize..=n_range.end as usize))
                .collect();
            report = Report::new("bounds");
            report
                .sections
                .push(sweeps::bound_table("bounds", &pairs, false)?);
        }
        Command::All => {
            report = all(fields, config.seed)?;
        }
    }
    Ok(report)
}

/// Degrees and dimensions of the full acceptance sweep.
pub mod plan {
    pub const BLUHER_M: std::ops::RangeInclusive<u32> = 2..=12;
    pub const GOLD_M: std::ops::RangeInclusive<u32> = 2..=12;
    pub const HALF_GOLD_M: &[u32] = &[2, 4, 6, 8, 10, 12];
    pub const QUARTIC_FIBER_M: std::ops::RangeInclusive<u32> = 1..=13;
    pub const QUARTIC_EXACT_M: &[u32] = &[3, 5, 7, 9, 11, 13];
    pub const QUARTIC_EXHAUSTIVE_MAX: u32 = 11;
    pub const QUARTIC_SPOT_COUNT: usize = 100;
    pub const SHARPNESS_M: &[u32] = &[1, 3, 5, 7, 9, 11, 13];
    pub const KAKEYA_M: &[u32] = &[2, 3, 4];
    pub const KAKEYA_N: &[usize] = &[2, 3];
    pub const FLOOR_M: &[u32] = &[1, 3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25, 27, 29, 31];
}

/// The full acceptance sweep as one report.
pub fn all(fields: FieldSource, seed: u64) -> Result<Report, UsageError> {
    let mut r = Report::new("all");
    r.sections
        .push(sweeps::bluher_section(fields, plan::BLUHER_M)?);
    r.sections
        .push(sweeps::gold_section(fields, plan::GOLD_M, None)?);
    r.sections
        .push(sweeps::half_gold_section(fields, plan::HALF_GOLD_M)?);
    r.sections.push(sweeps::quartic_fiber_section(
        fields,
        plan::QUARTIC_FIBER_M,
    )?);
    r.sections.push(sweeps::quartic_exact_section(
        fields,
        plan::QUARTIC_EXACT_M,
        plan::QUARTIC_EXHAUSTIVE_MAX,
        plan::QUARTIC_SPOT_COUNT,
        seed,
    )?);
    r.sections
        .push(sweeps::sharpness_section(fields, plan::SHARPNESS_M, 13)?);
    r.sections.push(sweeps::kakeya_section(
        fields,
        plan::KAKEYA_M,
        plan::KAKEYA_N,
    )?);
    r.sections.push(sweeps::bound_table(
        "bound_dominance_even",
        &[(16, 2..=6), (64, 2..=6)],
        true,
    )?);
    r.sections.push(sweeps::bound_table(
        "bound_dominance_odd",
        &[(8, 1..=6), (32, 1..=6), (128, 1..=6)],
        true,
    )?);
    r.sections.push(sweeps::floor_bound_section(plan::FLOOR_M)?);
    Ok(r)
}

/// Parses arguments, runs, renders. Returns the process exit code and the
/// text for stdout and stderr.
pub fn main_with_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                (0, text, String::new())
            } else {
                (2, String::new(), text)
            };
        }
    };
    match run(&config) {
        Ok(report) => {
            let code = if report.pass() { 0 } else { 1 };
            (code, report.render(config.format), String::new())
        }
        Err(e) => (2, String::new(), format!("error: {e}\n")),
    }
}
