//! One function per subcommand, each returning a [`Report`].

use std::fmt::Write as _;

use clap::{ArgGroup, Args, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use sqrt2_collatz::cycles::{
    classify_range, detect_cycle_with, ClassifiedRange, CycleLimits, CycleOutcome,
    DEFAULT_ITERATION_CAP, DEFAULT_VALUE_CAP_BITS,
};
use sqrt2_collatz::duffing::{
    energy, equilibria, melnikov, separatrix_crossing, separatrix_velocity, simulate,
    twin_run_separation, DuffingParams, ForcingSignal, ForcingTransform, Stability,
};
use sqrt2_collatz::map::{
    borderline_check, growth_estimate, growth_series, orbit, orbit_stats_with, p0_series,
    Branch, MapConfig,
};
use sqrt2_collatz::parity::{appendix_enumeration, constants_report, markov_series};
use sqrt2_collatz::predecessors::{
    classify_predecessor, gap_words, no_predecessor_census, predecessor_tree, sqrt2_convergents,
    DEFAULT_NODE_CAP,
};

use crate::output::{Cell, Report, Table};
use crate::{CliError, Context};

fn parse_big(s: &str) -> Result<BigUint, String> {
    s.trim()
        .replace('_', "")
        .parse()
        .map_err(|_| format!("'{s}' is not a nonnegative integer"))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterates of n, the parity table at m = 10^l, or the running p0(m).
    Orbit(OrbitArgs),
    /// (f^r(n))^(1/r) at one r or over a range.
    Growth(GrowthArgs),
    /// Censuses of numbers without predecessors, or of cycling and divergent starts.
    Census(CensusArgs),
    /// Cycle detection for a single start.
    Cycles(CyclesArgs),
    /// Predecessors of m and their Beatty classification.
    Preds(PredsArgs),
    /// Back-step tree of all preimages of a root.
    Tree(TreeArgs),
    /// Gap words of the no-predecessor numbers, or convergents of sqrt(2).
    Gaps(GapsArgs),
    /// Probability that f^r(n) is odd under the parity chain.
    Markov(MarkovArgs),
    /// Exact odd probabilities by path enumeration, r = 2..=25.
    Appendix(AppendixArgs),
    /// Stationary odd frequency and the derived constants alpha and delta.
    Constants(ConstantsArgs),
    /// The cubic-quintic oscillator: rest points, Melnikov scans, trajectories.
    Duffing(DuffingArgs),
    /// Geometric-mean growth (prod f(r)/r)^(1/n) for f_alpha.
    Borderline(BorderlineArgs),
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    #[arg(long, value_parser = parse_big)]
    pub n: BigUint,
    /// Number of iterates listed, starting with n itself.
    #[arg(long, default_value_t = 17)]
    pub steps: u64,
    /// Parity table for m = 10^1 .. 10^max-level.
    #[arg(long, conflicts_with = "p0_series")]
    pub table: bool,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..=9))]
    pub max_level: u32,
    /// Running even frequency p0(m) for m in from..=to.
    #[arg(long)]
    pub p0_series: bool,
    #[arg(long, default_value_t = 100)]
    pub from: u64,
    #[arg(long, default_value_t = 20_000)]
    pub to: u64,
    /// Keep every k-th row of a series.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub every: u64,
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    #[arg(long, value_parser = parse_big)]
    pub n: BigUint,
    /// A single step count; otherwise the series from..=to.
    #[arg(long)]
    pub r: Option<u64>,
    #[arg(long, default_value_t = 200)]
    pub from: u64,
    #[arg(long, default_value_t = 20_000)]
    pub to: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub every: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CensusKind {
    /// Count of m in [1, hi) without predecessors.
    NoPred,
    /// Starts in [lo, hi) that reach a cycle, with pre-period and period.
    Cycling,
    /// Starts in [lo, hi) that hit a cap first.
    Divergent,
    /// Running count of cycling starts k <= n.
    Counting,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[arg(long, value_enum)]
    pub kind: CensusKind,
    #[arg(long, default_value_t = 0)]
    pub lo: u64,
    #[arg(long)]
    pub hi: u64,
    /// Map evaluations allowed before a start is called divergent.
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_VALUE_CAP_BITS)]
    pub value_cap_bits: u64,
}

#[derive(Debug, Args)]
pub struct CyclesArgs {
    #[arg(long, value_parser = parse_big)]
    pub n: BigUint,
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_VALUE_CAP_BITS)]
    pub value_cap_bits: u64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("target").required(true).args(["m", "hi"])))]
pub struct PredsArgs {
    #[arg(long, conflicts_with_all = ["lo", "hi"])]
    pub m: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub lo: u64,
    #[arg(long)]
    pub hi: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    #[arg(long)]
    pub root: u64,
    #[arg(long)]
    pub node_cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GapsArgs {
    #[arg(long, default_value_t = 100_000)]
    pub hi: u64,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Characters of each word sequence shown; 0 shows all.
    #[arg(long, default_value_t = 60)]
    pub width: usize,
    /// List this many convergents of sqrt(2) instead.
    #[arg(long)]
    pub convergents: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MarkovArgs {
    #[arg(long)]
    pub r: u32,
    /// Every r' = 0..=r instead of r alone.
    #[arg(long)]
    pub series: bool,
    #[arg(long, default_value_t = 15)]
    pub digits: u32,
}

#[derive(Debug, Args)]
pub struct AppendixArgs {
    #[arg(long, default_value_t = 2)]
    pub from: u32,
    #[arg(long, default_value_t = 24)]
    pub to: u32,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..=1000))]
    pub digits: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DuffingMode {
    /// Rest points and their stability.
    Equilibria,
    /// Points (x, v) of the upper separatrix branch.
    Separatrix,
    /// M(t0) over a grid of t0.
    Melnikov,
    /// A trajectory (t, x, v, energy).
    Simulate,
    /// Phase-plane distance between two runs offset in x0.
    Twin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ForcingKind {
    None,
    Parity,
    Log,
}

#[derive(Debug, Args)]
pub struct DuffingArgs {
    #[arg(long, value_enum)]
    pub mode: DuffingMode,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub omega: f64,
    /// Profile amplitude; defaults to the separatrix of (a, b, c).
    #[arg(long, allow_negative_numbers = true)]
    pub amp: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, default_value_t = 100.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub v0: f64,
    #[arg(long, value_enum, default_value_t = ForcingKind::None)]
    pub forcing: ForcingKind,
    /// Start of the orbit that drives the forcing.
    #[arg(long, default_value = "73", value_parser = parse_big)]
    pub n: BigUint,
    #[arg(long, default_value_t = 0.5)]
    pub hold: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub offset: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0_from: f64,
    #[arg(long, default_value_t = std::f64::consts::TAU, allow_negative_numbers = true)]
    pub t0_to: f64,
    #[arg(long, default_value_t = 64)]
    pub t0_steps: usize,
    /// Keep every k-th sample of a trajectory.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub every: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    /// floor(n*alpha) for even n.
    Even,
    /// floor(n*alpha) for odd n.
    Odd,
}

#[derive(Debug, Args)]
pub struct BorderlineArgs {
    /// `sqrt2` (exact map), a rational `p/q`, or `sqrt:p/q`.
    #[arg(long, default_value = "sqrt2")]
    pub alpha: String,
    #[arg(long, value_enum, default_value_t = BranchArg::Even)]
    pub branch: BranchArg,
    #[arg(long, default_value_t = 10_000)]
    pub n_max: u64,
}

/// Checks that need no computation, so bad input fails before any work.
pub fn validate(cmd: &Command) -> Result<(), CliError> {
    let usage = |m: &str| Err(CliError::Usage(m.into()));
    match cmd {
        Command::Orbit(a) if a.p0_series && (a.from == 0 || a.from > a.to) => {
            usage("--from must be at least 1 and at most --to")
        }
        Command::Orbit(a) if a.steps == 0 => usage("--steps must be at least 1"),
        Command::Growth(a) if a.r.is_none() && (a.from == 0 || a.from > a.to) => {
            usage("--from must be at least 1 and at most --to")
        }
        Command::Census(a) if a.kind != CensusKind::NoPred && a.lo >= a.hi => {
            usage("--lo must be below --hi")
        }
        Command::Preds(a) if a.hi.is_some_and(|hi| hi <= a.lo.max(1)) => {
            usage("--hi must exceed --lo")
        }
        Command::Appendix(a) if a.from < 2 || a.to > 25 || a.from > a.to => {
            usage("appendix rows need 2 <= --from <= --to <= 25")
        }
        Command::Duffing(a) if !(a.dt > 0.0) || !(a.t_end >= 0.0) => {
            usage("--dt must be positive and --t-end nonnegative")
        }
        Command::Duffing(a) if a.mode == DuffingMode::Melnikov && a.t0_steps == 0 => {
            usage("--t0-steps must be at least 1")
        }
        Command::Borderline(a) => parse_alpha(&a.alpha, a.branch).map(|_| ()),
        _ => Ok(()),
    }
}

pub fn dispatch(cmd: &Command, ctx: &Context) -> Result<Report, CliError> {
    match cmd {
        Command::Orbit(a) => orbit_cmd(a, ctx),
        Command::Growth(a) => growth_cmd(a),
        Command::Census(a) => census_cmd(a, ctx),
        Command::Cycles(a) => cycles_cmd(a, ctx),
        Command::Preds(a) => preds_cmd(a),
        Command::Tree(a) => tree_cmd(a, ctx),
        Command::Gaps(a) => gaps_cmd(a),
        Command::Markov(a) => markov_cmd(a),
        Command::Appendix(a) => appendix_cmd(a, ctx),
        Command::Constants(a) => constants_cmd(a),
        Command::Duffing(a) => duffing_cmd(a, ctx),
        Command::Borderline(a) => borderline_cmd(a),
    }
}

const PROGRESS_EVERY: u64 = 100_000;

fn orbit_cmd(a: &OrbitArgs, ctx: &Context) -> Result<Report, CliError> {
    if a.table {
        let checkpoints: Vec<u64> = (1..=a.max_level).map(|l| 10u64.pow(l)).collect();
        let last = *checkpoints.last().expect("nonempty");
        let mut even = 0u64;
        let mut table = Table::new(&["l", "m", "even", "odd", "p0", "p1"]);
        orbit_stats_with(&a.n, last, |s| {
            if s.is_even() {
                even += 1;
            }
            let m = s.step + 1;
            if let Some(l) = checkpoints.iter().position(|&c| c == m) {
                let digits = l as u32 + 1;
                table.push(vec![
                    Cell::from(digits as u64),
                    Cell::from(m),
                    Cell::from(even),
                    Cell::from(m - even),
                    Cell::Text(sqrt2_collatz::map::decimal_ratio(even, m, digits)),
                    Cell::Text(sqrt2_collatz::map::decimal_ratio(m - even, m, digits)),
                ]);
            }
            if m % PROGRESS_EVERY == 0 {
                ctx.progress(format!("{m} of {last} iterates"));
            }
        })?;
        return Ok(Report::table(table));
    }
    if a.p0_series {
        let mut table = Table::new(&["m", "p0"]);
        for (m, p0) in p0_series(&a.n, a.from, a.to)? {
            if (m - a.from) % a.every == 0 {
                table.push(vec![Cell::from(m), Cell::from(p0)]);
            }
        }
        return Ok(Report::table(table));
    }
    if a.steps > PROGRESS_EVERY {
        ctx.progress(format!("listing {} iterates", a.steps));
    }
    let (states, _) = orbit(&a.n, a.steps)?;
    let mut table = Table::new(&["r", "value", "parity"]);
    for s in &states {
        table.push(vec![
            Cell::from(s.step),
            Cell::from(&s.value),
            Cell::from(if s.is_even() { "even" } else { "odd" }),
        ]);
    }
    Ok(Report::table(table))
}

fn growth_cmd(a: &GrowthArgs) -> Result<Report, CliError> {
    let mut table = Table::new(&["r", "growth"]);
    match a.r {
        Some(r) => table.push(vec![Cell::from(r), Cell::from(growth_estimate(&a.n, r)?)]),
        None => {
            for (r, g) in growth_series(&a.n, a.from, a.to)? {
                if (r - a.from) % a.every == 0 {
                    table.push(vec![Cell::from(r), Cell::from(g)]);
                }
            }
        }
    }
    Ok(Report::table(table))
}

fn limits(cap: Option<u64>, value_cap_bits: u64, ctx: &Context) -> CycleLimits {
    CycleLimits {
        iteration_cap: cap.or(ctx.cap).unwrap_or(DEFAULT_ITERATION_CAP),
        value_cap_bits,
    }
}

pub fn divergent_label(cap: u64) -> String {
    format!("divergent (heuristic, cap={cap})")
}

const CENSUS_CHUNK: u64 = 1_000;

/// [`classify_range`] in chunks, reporting progress between them.
fn classify_with_progress(lo: u64, hi: u64, limits: CycleLimits, ctx: &Context) -> ClassifiedRange {
    let mut merged = ClassifiedRange {
        lo,
        hi,
        cycling: Vec::new(),
        divergent: Vec::new(),
        iteration_cap: limits.iteration_cap,
        value_cap_bits: limits.value_cap_bits,
    };
    let mut start = lo;
    while start < hi {
        let end = hi.min(start.saturating_add(CENSUS_CHUNK));
        let part = classify_range(start, end, limits);
        merged.cycling.extend(part.cycling);
        merged.divergent.extend(part.divergent);
        ctx.progress(format!("classified [{lo}, {end}) of [{lo}, {hi})"));
        start = end;
    }
    merged
}

fn census_cmd(a: &CensusArgs, ctx: &Context) -> Result<Report, CliError> {
    if a.kind == CensusKind::NoPred {
        let count = no_predecessor_census(a.hi)?;
        let mut table = Table::new(&["hi", "count"]);
        table.push(vec![Cell::from(a.hi), Cell::from(count)]);
        return Ok(Report {
            table,
            text: Some(format!("{count}\n")),
            footer: Vec::new(),
        });
    }
    let limits = limits(a.cap, a.value_cap_bits, ctx);
    let cap = limits.iteration_cap;
    let range = classify_with_progress(a.lo, a.hi, limits, ctx);
    let span = format!("[{}, {})", a.lo, a.hi);
    match a.kind {
        CensusKind::Cycling => {
            let mut table = Table::new(&["n", "pre_period", "period", "cycle_min"]);
            for r in &range.cycling {
                table.push(vec![
                    Cell::from(&r.start_n),
                    Cell::from(r.pre_period),
                    Cell::from(r.period),
                    Cell::from(r.min_member()),
                ]);
            }
            let mut report = Report::table(table);
            report.footer.push(format!(
                "{} cycling in {span}, {} {}",
                range.cycling.len(),
                range.divergent.len(),
                divergent_label(cap)
            ));
            Ok(report)
        }
        CensusKind::Divergent => {
            let mut table = Table::new(&["n", "verdict"]);
            for &n in &range.divergent {
                table.push(vec![Cell::from(n), Cell::from(divergent_label(cap))]);
            }
            let mut report = Report::table(table);
            report
                .footer
                .push(format!("{} {} in {span}", range.divergent.len(), divergent_label(cap)));
            Ok(report)
        }
        CensusKind::Counting => {
            let mut table = Table::new(&["n", "cycling_up_to_n"]);
            for (n, count) in sqrt2_collatz::cycles::counting_from(&range) {
                table.push(vec![Cell::from(n), Cell::from(count)]);
            }
            Ok(Report::table(table))
        }
        CensusKind::NoPred => unreachable!("handled above"),
    }
}

fn join_members(members: &[BigUint]) -> String {
    members
        .iter()
        .map(|m| m.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cycles_cmd(a: &CyclesArgs, ctx: &Context) -> Result<Report, CliError> {
    let limits = limits(a.cap, a.value_cap_bits, ctx);
    let mut table = Table::new(&["n", "verdict", "pre_period", "period", "cycle"]);
    match detect_cycle_with(&a.n, limits) {
        CycleOutcome::Cycle(r) => table.push(vec![
            Cell::from(&a.n),
            Cell::from("cycle"),
            Cell::from(r.pre_period),
            Cell::from(r.period),
            Cell::from(join_members(&r.cycle_members)),
        ]),
        CycleOutcome::Divergent { iterations, .. } => table.push(vec![
            Cell::from(&a.n),
            Cell::from(divergent_label(limits.iteration_cap)),
            Cell::from(""),
            Cell::from(""),
            Cell::from(format!("none after {iterations} steps")),
        ]),
    }
    Ok(Report::table(table))
}

fn preds_cmd(a: &PredsArgs) -> Result<Report, CliError> {
    let (lo, hi) = match (a.m, a.hi) {
        (Some(m), _) => (m, m + 1),
        (None, Some(hi)) => (a.lo.max(1), hi),
        (None, None) => unreachable!("clap requires --m or --hi"),
    };
    let mut table = Table::new(&["m", "kind", "predecessors", "beatty_k"]);
    for m in lo..hi {
        let c = classify_predecessor(m)?;
        let kind = match c.witnesses.len() {
            0 => "none",
            1 => "one",
            _ => "two",
        };
        table.push(vec![
            Cell::from(m),
            Cell::from(kind),
            Cell::from(
                c.witnesses
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(" "),
            ),
            c.beatty_k.map_or(Cell::from(""), Cell::from),
        ]);
    }
    Ok(Report::table(table))
}

fn tree_cmd(a: &TreeArgs, ctx: &Context) -> Result<Report, CliError> {
    let cap = a.node_cap.or(ctx.node_cap).unwrap_or(DEFAULT_NODE_CAP);
    let tree = predecessor_tree(a.root, cap)?;
    let mut table = Table::new(&["parent", "child"]);
    for (p, c) in tree.edge_list() {
        table.push(vec![Cell::from(p), Cell::from(c)]);
    }
    Ok(Report {
        table,
        text: Some(tree.render()),
        footer: Vec::new(),
    })
}

fn gaps_cmd(a: &GapsArgs) -> Result<Report, CliError> {
    if let Some(count) = a.convergents {
        let mut table = Table::new(&["k", "p", "q"]);
        for (k, (p, q)) in sqrt2_convergents(count).iter().enumerate() {
            table.push(vec![Cell::from(k), Cell::from(p), Cell::from(q)]);
        }
        return Ok(Report::table(table));
    }
    let levels = gap_words(a.hi, a.levels)?;
    let mut table = Table::new(&["level", "short", "long", "letters", "words"]);
    for l in &levels {
        let words = l.word_sequence();
        let shown = if a.width == 0 {
            words
        } else {
            words.chars().take(a.width).collect()
        };
        table.push(vec![
            Cell::from(l.level),
            Cell::from(l.short_gap),
            Cell::from(l.long_gap),
            Cell::from(l.letters.len()),
            Cell::from(shown),
        ]);
    }
    Ok(Report::table(table))
}

fn markov_cmd(a: &MarkovArgs) -> Result<Report, CliError> {
    let series = markov_series(a.r);
    let first = if a.series { 0 } else { a.r as usize };
    let mut table = Table::new(&["r", "exact", "decimal"]);
    let mut text = String::new();
    for (r, p) in series.iter().enumerate().skip(first) {
        let decimal = p.to_decimal(a.digits);
        let _ = writeln!(text, "{p} = {decimal}");
        table.push(vec![Cell::from(r), Cell::from(p.to_string()), Cell::from(decimal)]);
    }
    Ok(Report {
        table,
        text: Some(text),
        footer: Vec::new(),
    })
}

fn appendix_cmd(a: &AppendixArgs, ctx: &Context) -> Result<Report, CliError> {
    let mut table = Table::new(&["r", "exact", "decimal"]);
    let mut text = String::new();
    for r in a.from..=a.to {
        if r >= 22 {
            ctx.progress(format!("enumerating r = {r}"));
        }
        let p = appendix_enumeration(r)?;
        let (exact, decimal) = (p.sage_form(), p.to_decimal(15));
        let _ = writeln!(text, "[{exact}, {decimal}]");
        table.push(vec![Cell::from(r as u64), Cell::from(exact), Cell::from(decimal)]);
    }
    Ok(Report {
        table,
        text: Some(text),
        footer: Vec::new(),
    })
}

fn constants_cmd(a: &ConstantsArgs) -> Result<Report, CliError> {
    let digits = a.digits as usize;
    let c = constants_report(digits)?;
    let mut table = Table::new(&["name", "value"]);
    let rows: [(&str, String); 7] = [
        ("stationary_odd", c.stationary_odd.to_string()),
        ("stationary_odd_decimal", c.stationary_odd.to_decimal(a.digits as u32)),
        ("alpha", c.alpha.to_string()),
        ("alpha_decimal", c.alpha_value.to_string()),
        ("delta", format!("2^({})", c.delta_exponent)),
        ("delta_decimal", c.delta_value.to_string()),
        ("empirical_delta", c.empirical_delta.to_string()),
    ];
    for (name, value) in rows {
        table.push(vec![Cell::from(name), Cell::from(value)]);
    }
    table.push(vec![
        Cell::from("identity_delta2_4alpha_eq_2"),
        Cell::from(c.identity_check.to_string()),
    ]);
    let mut text = String::new();
    for row in &table.rows {
        let _ = writeln!(text, "{} = {}", row[0].render(), row[1].render());
    }
    Ok(Report {
        table,
        text: Some(text),
        footer: Vec::new(),
    })
}

fn duffing_params(a: &DuffingArgs) -> DuffingParams {
    let mut p = DuffingParams::with_coefficients(a.a, a.b, a.c);
    p.gamma = a.gamma;
    p.delta_damp = a.delta;
    p.omega = a.omega;
    if let Some(v) = a.amp {
        p.a_amp = v;
    }
    if let Some(v) = a.lambda {
        p.lambda = v;
    }
    if let Some(v) = a.k {
        p.k = v;
    }
    p
}

fn forcing_signal(a: &DuffingArgs) -> Result<ForcingSignal, CliError> {
    let transform = match a.forcing {
        ForcingKind::None => return Ok(ForcingSignal::none()),
        ForcingKind::Parity => ForcingTransform::ParitySign,
        ForcingKind::Log => ForcingTransform::LogScaled,
    };
    let levels = (a.t_end / a.hold).ceil() as usize + 1;
    Ok(ForcingSignal::from_orbit(&a.n, levels, transform, a.hold)?)
}

fn duffing_cmd(a: &DuffingArgs, ctx: &Context) -> Result<Report, CliError> {
    let p = duffing_params(a);
    match a.mode {
        DuffingMode::Equilibria => {
            let mut table = Table::new(&["x", "v", "stability", "energy"]);
            for (x, s) in equilibria(&p)? {
                let label = match s {
                    Stability::Center => "center",
                    Stability::Saddle => "saddle",
                    Stability::Degenerate => "degenerate",
                };
                table.push(vec![
                    Cell::from(x),
                    Cell::from(0.0),
                    Cell::from(label),
                    Cell::from(energy(&p, x, 0.0)),
                ]);
            }
            Ok(Report::table(table))
        }
        DuffingMode::Separatrix => {
            let edge = separatrix_crossing(&p)?;
            let samples = a.t0_steps.max(2);
            let mut table = Table::new(&["x", "v"]);
            for i in 0..=samples {
                let x = edge * i as f64 / samples as f64;
                table.push(vec![Cell::from(x), Cell::from(separatrix_velocity(&p, x)?)]);
            }
            Ok(Report::table(table))
        }
        DuffingMode::Melnikov => {
            let mut table = Table::new(&["t0", "melnikov"]);
            let steps = a.t0_steps;
            for i in 0..=steps {
                let t0 = a.t0_from + (a.t0_to - a.t0_from) * i as f64 / steps as f64;
                table.push(vec![Cell::from(t0), Cell::from(melnikov(&p, t0)?)]);
            }
            Ok(Report::table(table))
        }
        DuffingMode::Simulate => {
            let forcing = forcing_signal(a)?;
            ctx.progress(format!("integrating to t = {} with dt = {}", a.t_end, a.dt));
            let points = simulate(&p, &forcing, a.t_end, a.dt, a.x0, a.v0)?;
            let mut table = Table::new(&["t", "x", "v", "energy"]);
            for pt in points.iter().step_by(a.every as usize) {
                table.push(vec![
                    Cell::from(pt.t),
                    Cell::from(pt.x),
                    Cell::from(pt.v),
                    Cell::from(energy(&p, pt.x, pt.v)),
                ]);
            }
            Ok(Report::table(table))
        }
        DuffingMode::Twin => {
            let forcing = forcing_signal(a)?;
            ctx.progress(format!("integrating twin runs to t = {}", a.t_end));
            let sep = twin_run_separation(&p, &forcing, a.t_end, a.dt, a.x0, a.v0, a.offset)?;
            let mut table = Table::new(&["t", "separation"]);
            for (t, d) in sep.iter().step_by(a.every as usize) {
                table.push(vec![Cell::from(*t), Cell::from(*d)]);
            }
            Ok(Report::table(table))
        }
    }
}

fn parse_ratio(s: &str) -> Option<(BigInt, BigInt)> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    Some((n.trim().parse().ok()?, d.trim().parse().ok()?))
}

fn parse_alpha(text: &str, branch: BranchArg) -> Result<MapConfig, CliError> {
    let bad = || CliError::Usage(format!("--alpha {text}: expected sqrt2, p/q or sqrt:p/q"));
    let branch = match branch {
        BranchArg::Even => Branch::EvenTimesAlpha,
        BranchArg::Odd => Branch::OddTimesAlpha,
    };
    let cfg = if text == "sqrt2" {
        return Ok(MapConfig::sqrt2());
    } else if let Some(rest) = text.strip_prefix("sqrt:") {
        let (n, d) = parse_ratio(rest).ok_or_else(bad)?;
        MapConfig::sqrt_of(n, d)
    } else {
        let (n, d) = parse_ratio(text).ok_or_else(bad)?;
        MapConfig::rational(n, d)
    };
    Ok(cfg.map_err(CliError::domain)?.with_branch(branch))
}

fn borderline_cmd(a: &BorderlineArgs) -> Result<Report, CliError> {
    let cfg = parse_alpha(&a.alpha, a.branch)?;
    let report = borderline_check(&cfg, a.n_max)?;
    let mut table = Table::new(&["alpha", "n_max", "value", "collatz_like"]);
    table.push(vec![
        Cell::from(cfg.alpha.to_string()),
        Cell::from(report.n_max),
        Cell::from(report.value),
        Cell::from(report.collatz_like),
    ]);
    Ok(Report::table(table))
}
