//! Argument definitions and the command implementations behind them.

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypdiv::bounds::{
    bounds_report, multi_lower_log, multi_lower_opt, multi_lower_quadratic, multi_upper_log,
    q_constant, stam_lower, stam_upper, summed_step_bounds, Target,
};
use hypdiv::divergence::{d_hyp_bin, d_hyp_poisson, d_multihyp_multinomial};
use hypdiv::verification::{
    asymptote_experiment, asymptote_limit, conjecture_search, extreme_case_trace, linear_schedule,
    verify_moment_identities, verify_phi_derivatives, verify_phi_grid, verify_tilt_all_with,
    ConjectureReport, MomentTerm, SweepConfig,
};
use hypdiv::{MultiHypParams, SupportCap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{Cell, Format, ReportDocument};
use crate::{Error, Result};

/// Environment variable that overrides the enumeration cap.
pub const SUPPORT_CAP_VAR: &str = "HYPERGEO_SUPPORT_CAP";

const DEFAULT_SLACK: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "hypdiv",
    version,
    about = "Exact divergences of hypergeometric laws from their approximations, with bounds and checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Slack below which a check counts as failed.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact divergence with every applicable bound, as one row.
    Divergence(UrnArgs),
    /// Every bound for one instance, one row per bound.
    Bounds(UrnArgs),
    /// hyp(N, K, n) against bin(n, K/N) for a range of K.
    Figure1(Figure1Args),
    /// Limits of the bounds as N grows with n/N = q fixed.
    Figure2(Figure2Args),
    /// Run a verification suite; exits 1 if a check fails.
    Verify(VerifyArgs),
    /// Exact divergence along a growing schedule against its limit.
    Asymptote(AsymptoteArgs),
    /// Tilted-family sweep for non-integer np.
    Conjecture(ConjectureArgs),
}

#[derive(Debug, Clone, Args)]
pub struct UrnArgs {
    /// Population size.
    #[arg(short = 'N')]
    pub population: Option<u64>,

    /// Number of white balls (two colors).
    #[arg(short = 'K')]
    pub white: Option<u64>,

    /// Sample size.
    #[arg(short = 'n')]
    pub sample: u64,

    /// Ball counts per color, instead of -N/-K.
    #[arg(long, value_delimiter = ',')]
    pub colors: Option<Vec<u64>>,

    #[arg(long, value_enum, default_value_t = TargetArg::Bin)]
    pub target: TargetArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Bin,
    Poisson,
    Multinomial,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Bin => Target::Binomial,
            TargetArg::Poisson => Target::Poisson,
            TargetArg::Multinomial => Target::Multinomial,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Figure1Args {
    #[arg(short = 'N', default_value_t = 200)]
    pub population: u64,

    #[arg(short = 'n', default_value_t = 101)]
    pub sample: u64,

    /// First K (default 1).
    #[arg(long)]
    pub k_min: Option<u64>,

    /// Last K (default N − 1).
    #[arg(long)]
    pub k_max: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct Figure2Args {
    /// Interior grid points q = i/(points + 1).
    #[arg(long, default_value_t = 99)]
    pub points: u64,

    #[arg(long, default_value_t = 2)]
    pub num_colors: usize,

    /// Evaluate the finite-N bounds at n = round(qN) instead of the limits.
    #[arg(short = 'N')]
    pub population: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Tilted-family sweep for n ≤ 13 with integer np.
    Tilt,
    Moments,
    Phi,
    Asymptote,
    Extreme,
    Conjecture,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,

    #[command(flatten)]
    pub schedule: ScheduleArgs,

    #[command(flatten)]
    pub probe: ProbeArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScheduleArgs {
    /// Limit ratio r, with n/N → 1 − r.
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,

    /// Largest population of the schedule.
    #[arg(long = "Nmax", default_value_t = 2000)]
    pub n_max: u64,

    #[arg(long, default_value_t = 40)]
    pub steps: u64,
}

#[derive(Debug, Clone, Args)]
pub struct AsymptoteArgs {
    #[command(flatten)]
    pub schedule: ScheduleArgs,

    /// Relative color weights.
    #[arg(long, value_delimiter = ',', default_value = "1,1")]
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ProbeArgs {
    /// Largest n of the probe.
    #[arg(long, default_value_t = 13)]
    pub max_draws: u64,

    /// Interior grid points p = i/(points + 1).
    #[arg(long, default_value_t = 84)]
    pub points: u64,

    /// Jitters every grid point by up to half a grid spacing.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct ConjectureArgs {
    #[command(flatten)]
    pub probe: ProbeArgs,
}

/// A finished command: the report and whether all its checks passed.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: ReportDocument,
    pub passed: bool,
}

impl Outcome {
    fn data(report: ReportDocument) -> Self {
        Self {
            report,
            passed: true,
        }
    }
}

/// Reads the cap from [`SUPPORT_CAP_VAR`], falling back to the default.
pub fn support_cap() -> Result<SupportCap> {
    match std::env::var(SUPPORT_CAP_VAR) {
        Ok(raw) => parse_cap(&raw),
        Err(_) => Ok(SupportCap::default()),
    }
}

pub fn parse_cap(raw: &str) -> Result<SupportCap> {
    let raw = raw.trim();
    if let Ok(v) = raw.parse::<u128>() {
        return Ok(SupportCap(v));
    }
    match raw.parse::<f64>() {
        Ok(v) if v >= 1.0 && v.is_finite() && v.fract() == 0.0 => Ok(SupportCap(v as u128)),
        _ => Err(Error::Usage(format!(
            "{SUPPORT_CAP_VAR} must be a positive integer, got {raw:?}"
        ))),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let cap = support_cap()?;
    let tolerance = cli.tolerance.unwrap_or(DEFAULT_SLACK);
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(Error::Usage(format!(
            "tolerance must be non-negative, got {tolerance}"
        )));
    }
    match &cli.command {
        Command::Divergence(args) => cmd_divergence(args, cap, tolerance).map(Outcome::data),
        Command::Bounds(args) => cmd_bounds(args, cap, tolerance).map(Outcome::data),
        Command::Figure1(args) => cmd_figure1(args).map(Outcome::data),
        Command::Figure2(args) => cmd_figure2(args).map(Outcome::data),
        Command::Verify(args) => cmd_verify(args, cli.tolerance, cap),
        Command::Asymptote(args) => cmd_asymptote(args, cap).map(Outcome::data),
        Command::Conjecture(args) => cmd_conjecture(&args.probe, tolerance),
    }
}

impl UrnArgs {
    pub fn params(&self) -> Result<MultiHypParams> {
        let counts = match (&self.colors, self.population, self.white) {
            (Some(_), _, Some(_)) => {
                return Err(Error::Usage("give either --colors or -K, not both".into()))
            }
            (Some(counts), population, None) => {
                let total: u64 = counts.iter().sum();
                if population.is_some_and(|n| n != total) {
                    return Err(Error::Usage(format!(
                        "--colors sum to {total}, but -N is {}",
                        population.unwrap_or_default()
                    )));
                }
                counts.clone()
            }
            (None, Some(population), Some(white)) => {
                if white > population {
                    return Err(Error::Usage(format!("-K {white} exceeds -N {population}")));
                }
                vec![white, population - white]
            }
            _ => return Err(Error::Usage("need -N and -K, or --colors".into())),
        };
        Ok(MultiHypParams::new(counts, self.sample)?)
    }

    fn echo(&self, doc: &mut ReportDocument, params: &MultiHypParams) {
        doc.param("N", params.population())
            .param("n", params.sample())
            .param("colors", params.counts())
            .param("target", Target::from(self.target).to_string());
    }
}

fn colors_field(counts: &[u64]) -> String {
    counts
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

/// Bound columns of `divergence`, lower bounds first.
pub const BOUND_COLUMNS: [&str; 10] = [
    "stam_lower",
    "quadratic",
    "log_integral",
    "opt_integral",
    "kravchuk",
    "poisson",
    "chi2",
    "stam_upper",
    "log_upper",
    "summed_upper",
];

pub fn cmd_divergence(args: &UrnArgs, cap: SupportCap, tolerance: f64) -> Result<ReportDocument> {
    let params = args.params()?;
    let target = Target::from(args.target);
    let exact = match target {
        Target::Binomial | Target::Poisson => {
            let hyp = params.as_univariate().ok_or_else(|| {
                Error::Usage(format!("--target {target} needs exactly two colors"))
            })?;
            if target == Target::Binomial {
                d_hyp_bin(&hyp)
            } else {
                d_hyp_poisson(&hyp)
            }
        }
        Target::Multinomial => d_multihyp_multinomial(&params, cap)?,
    };

    let mut columns = vec![
        "target",
        "N",
        "n",
        "colors",
        "exact",
        "support_size",
        "terms_dropped",
    ];
    columns.extend(BOUND_COLUMNS);
    columns.push("violations");
    let mut doc = ReportDocument::new("divergence", &columns);
    args.echo(&mut doc, &params);
    doc.tolerance("slack", tolerance);

    let mut row: Vec<Cell> = vec![
        target.to_string().into(),
        params.population().into(),
        params.sample().into(),
        colors_field(params.counts()).into(),
        exact.nats.into(),
        exact.support_size.into(),
        exact.terms_dropped.into(),
    ];
    if params.sample() == 0 {
        row.extend(BOUND_COLUMNS.iter().map(|_| Cell::Empty));
        row.push(Cell::Empty);
    } else {
        let report = bounds_report(&params, target, cap)?;
        for name in BOUND_COLUMNS {
            let value = report
                .lower
                .get(name)
                .or_else(|| report.upper.get(name))
                .copied();
            row.push(value.into());
        }
        let violated: Vec<String> = report
            .violations(tolerance)
            .into_iter()
            .map(|(n, _)| n)
            .collect();
        row.push(if violated.is_empty() {
            Cell::Empty
        } else {
            violated.join(";").into()
        });
    }
    doc.push_row(row);
    Ok(doc)
}

pub fn cmd_bounds(args: &UrnArgs, cap: SupportCap, tolerance: f64) -> Result<ReportDocument> {
    let params = args.params()?;
    let target = Target::from(args.target);
    let mut doc = ReportDocument::new(
        "bounds",
        &["bound", "side", "value", "exact", "slack", "status", "note"],
    );
    args.echo(&mut doc, &params);
    doc.tolerance("slack", tolerance);
    if params.sample() == 0 {
        return Err(Error::Usage("bounds need n ≥ 1".into()));
    }
    let report = bounds_report(&params, target, cap)?;
    for (side, bounds) in [("lower", &report.lower), ("upper", &report.upper)] {
        for (name, &value) in bounds {
            let slack = if side == "lower" {
                report.exact - value
            } else {
                value - report.exact
            };
            let status = if slack < -tolerance {
                "violated"
            } else {
                "holds"
            };
            doc.push_row(vec![
                name.as_str().into(),
                side.into(),
                value.into(),
                report.exact.into(),
                slack.into(),
                status.into(),
                Cell::Empty,
            ]);
        }
    }
    for (name, why) in &report.not_applicable {
        doc.push_row(vec![
            name.as_str().into(),
            Cell::Empty,
            Cell::Empty,
            report.exact.into(),
            Cell::Empty,
            "not_applicable".into(),
            why.as_str().into(),
        ]);
    }
    Ok(doc)
}

pub fn cmd_figure1(args: &Figure1Args) -> Result<ReportDocument> {
    let (big_n, n) = (args.population, args.sample);
    if big_n < 3 || n == 0 || n > big_n {
        return Err(Error::Usage(format!(
            "need N ≥ 3 and 1 ≤ n ≤ N, got N = {big_n}, n = {n}"
        )));
    }
    let k_min = args.k_min.unwrap_or(1);
    let k_max = args.k_max.unwrap_or(big_n - 1);
    if k_min == 0 || k_max >= big_n || k_min > k_max {
        return Err(Error::Usage(format!(
            "need 1 ≤ k-min ≤ k-max ≤ N − 1, got {k_min}..{k_max}"
        )));
    }
    let mut doc = ReportDocument::new(
        "figure1",
        &[
            "K",
            "exact",
            "stam_lower",
            "stam_upper",
            "new_lower",
            "new_upper",
        ],
    );
    doc.param("N", big_n)
        .param("n", n)
        .param("k_min", k_min)
        .param("k_max", k_max);

    let upper = stam_upper(2, big_n, n)?;
    let steps = summed_step_bounds(2, big_n, n)?;
    let new_upper = match multi_upper_log(2, big_n, n) {
        Ok(v) => v.min(steps.upper),
        Err(_) => steps.upper,
    };
    let mut new_lower = multi_lower_quadratic(2, big_n, n)?;
    if let Ok(v) = multi_lower_opt(2, big_n, n) {
        new_lower = new_lower.max(v);
    }
    for white in k_min..=k_max {
        let params = MultiHypParams::new(vec![white, big_n - white], n)?;
        let hyp = params.as_univariate().expect("two colors");
        let q = q_constant(&params.probabilities())?;
        doc.push_row(vec![
            white.into(),
            d_hyp_bin(&hyp).nats.into(),
            stam_lower(2, big_n, n, &q)?.into(),
            upper.into(),
            new_lower.into(),
            new_upper.into(),
        ]);
    }
    Ok(doc)
}

pub fn cmd_figure2(args: &Figure2Args) -> Result<ReportDocument> {
    if args.points == 0 {
        return Err(Error::Usage("need at least one grid point".into()));
    }
    if args.num_colors < 2 {
        return Err(Error::Usage("need at least two colors".into()));
    }
    let mut doc = ReportDocument::new(
        "figure2",
        &["q", "stam_upper", "stam_lower", "new_lower", "new_upper"],
    );
    doc.param("points", args.points)
        .param("num_colors", args.num_colors);
    let c = args.num_colors as f64 - 1.0;
    for i in 1..=args.points {
        let q = i as f64 / (args.points + 1) as f64;
        let row: [f64; 4] = match args.population {
            None => {
                let r = 1.0 - q;
                let gap = r - 1.0 - r.ln();
                [
                    c * q * q / (2.0 * (1.0 - q)),
                    c * q * q / 4.0,
                    c * gap / 2.0,
                    c * gap,
                ]
            }
            Some(big_n) => finite_figure2_row(args.num_colors, big_n, q)?,
        };
        let mut cells = vec![Cell::Float(q)];
        cells.extend(row.map(Cell::Float));
        doc.push_row(cells);
    }
    if let Some(big_n) = args.population {
        doc.param("N", big_n);
    }
    Ok(doc)
}

/// Bounds at finite `N` for `n = round(qN)` and equal color shares. The new
/// lower bound is the largest of the quadratic, log-integral and (for
/// `n ≤ N/2`) optimized integral bounds, the forms whose limits make up the
/// limit columns.
fn finite_figure2_row(colors: usize, big_n: u64, q: f64) -> Result<[f64; 4]> {
    if big_n < 3 {
        return Err(Error::Usage(format!("need N ≥ 3, got N = {big_n}")));
    }
    let n = ((q * big_n as f64).round() as u64).clamp(1, big_n - 1);
    let shares = vec![1.0 / colors as f64; colors];
    let qc = q_constant(&shares)?;
    let mut lower =
        multi_lower_quadratic(colors, big_n, n)?.max(multi_lower_log(colors, big_n, n)?);
    if let Ok(v) = multi_lower_opt(colors, big_n, n) {
        lower = lower.max(v);
    }
    let upper = multi_upper_log(colors, big_n, n)?.min(summed_step_bounds(colors, big_n, n)?.upper);
    Ok([
        stam_upper(colors, big_n, n)?,
        stam_lower(colors, big_n, n, &qc)?,
        lower,
        upper,
    ])
}

/// Collects `(suite, check, value, threshold, status)` rows.
struct Checks {
    doc: ReportDocument,
    passed: bool,
}

impl Checks {
    fn new() -> Self {
        Self {
            doc: ReportDocument::new(
                "verify",
                &["suite", "check", "value", "threshold", "status"],
            ),
            passed: true,
        }
    }

    /// A check that passes when `ok`.
    fn check(
        &mut self,
        suite: &str,
        check: impl Into<String>,
        value: f64,
        threshold: f64,
        ok: bool,
    ) {
        self.passed &= ok;
        let status = if ok { "pass" } else { "fail" };
        self.doc.push_row(vec![
            suite.into(),
            check.into().into(),
            value.into(),
            threshold.into(),
            status.into(),
        ]);
    }

    /// A reported value that does not affect the outcome.
    fn info(&mut self, suite: &str, check: impl Into<String>, value: Cell) {
        self.doc.push_row(vec![
            suite.into(),
            check.into().into(),
            value,
            Cell::Empty,
            "info".into(),
        ]);
    }
}

pub fn cmd_verify(args: &VerifyArgs, tolerance: Option<f64>, cap: SupportCap) -> Result<Outcome> {
    let mut checks = Checks::new();
    let run_all = args.suite == Suite::All;
    let wants = |s: Suite| run_all || args.suite == s;
    if wants(Suite::Tilt) {
        verify_tilt(&mut checks, tolerance.unwrap_or(DEFAULT_SLACK))?;
    }
    if wants(Suite::Moments) {
        verify_moments(&mut checks, tolerance.unwrap_or(1e-9))?;
    }
    if wants(Suite::Phi) {
        verify_phi(&mut checks, tolerance.unwrap_or(1e-12))?;
    }
    if wants(Suite::Asymptote) {
        verify_asymptote(&mut checks, &args.schedule, tolerance.unwrap_or(5e-3), cap)?;
    }
    if wants(Suite::Extreme) {
        verify_extreme(&mut checks)?;
    }
    if wants(Suite::Conjecture) {
        let tol = tolerance.unwrap_or(DEFAULT_SLACK);
        let report = probe(&args.probe, tol)?;
        checks.check(
            "conjecture",
            "violations",
            report.violations.len() as f64,
            0.0,
            report.violations.is_empty(),
        );
        checks.info("conjecture", "points_checked", report.points_checked.into());
        checks.info(
            "conjecture",
            "reduction_violations",
            report.reduction_violations.len().into(),
        );
    }
    let Checks { mut doc, passed } = checks;
    doc.param("suite", format!("{:?}", args.suite).to_lowercase());
    if let Some(t) = tolerance {
        doc.tolerance("override", t);
    }
    doc.note("passed", passed);
    Ok(Outcome {
        report: doc,
        passed,
    })
}

fn verify_tilt(checks: &mut Checks, tolerance: f64) -> Result<()> {
    let cfg = SweepConfig {
        tolerance,
        ..SweepConfig::default()
    };
    let summary = verify_tilt_all_with(13, &cfg)?;
    for case in &summary.cases {
        checks.check(
            "tilt",
            format!("n={},k={}", case.n, case.k),
            case.min_slack,
            -tolerance,
            case.passed,
        );
    }
    checks.info(
        "tilt",
        "nondegenerate_cases",
        summary.nondegenerate_count.into(),
    );
    checks.info(
        "tilt",
        "degenerate_endpoints",
        summary.degenerate.len().into(),
    );
    checks.info("tilt", "inclusive_count", summary.inclusive_count.into());
    checks.info(
        "tilt",
        "unnormalized_reduction_failures",
        summary
            .reduction_failures
            .iter()
            .map(|(n, k)| format!("n={n},k={k}"))
            .collect::<Vec<_>>()
            .join(";")
            .into(),
    );
    checks.doc.tolerance("tilt", tolerance);
    Ok(())
}

fn verify_moments(checks: &mut Checks, tolerance: f64) -> Result<()> {
    let report = verify_moment_identities(&[8, 20, 40])?;
    for (term, name) in [
        (MomentTerm::Second, "second"),
        (MomentTerm::Third, "third"),
        (MomentTerm::Fourth, "fourth"),
    ] {
        let err = report.max_error_for(term);
        checks.check(
            "moments",
            format!("{name}_order_term"),
            err,
            tolerance,
            err <= tolerance,
        );
    }
    let color_err = report
        .color_sums
        .iter()
        .map(|r| r.relative_error)
        .fold(0.0, f64::max);
    checks.check(
        "moments",
        "color_sum",
        color_err,
        tolerance,
        color_err <= tolerance,
    );
    checks.doc.tolerance("moments", tolerance);
    Ok(())
}

fn verify_phi(checks: &mut Checks, tolerance: f64) -> Result<()> {
    let grid = verify_phi_grid(100_000, tolerance)?;
    for (name, slack) in [
        ("nonnegative", grid.nonnegative),
        ("chi_upper", grid.chi_upper),
        ("taylor3_lower", grid.taylor3_lower),
        ("taylor4_upper", grid.taylor4_upper),
        ("taylor4_right", grid.taylor4_right),
    ] {
        checks.check("phi", name, slack, -tolerance, slack >= -tolerance);
    }
    let derivative = verify_phi_derivatives(200)?
        .iter()
        .map(|d| d.relative_error)
        .fold(0.0, f64::max);
    checks.check(
        "phi",
        "derivative_table",
        derivative,
        1e-6,
        derivative <= 1e-6,
    );
    checks.doc.tolerance("phi", tolerance);
    Ok(())
}

fn verify_asymptote(
    checks: &mut Checks,
    args: &ScheduleArgs,
    limit: f64,
    cap: SupportCap,
) -> Result<()> {
    let trace = asymptote_experiment(&[1.0, 1.0], args.r, &schedule(args)?, cap)?;
    let error = trace.final_error().unwrap_or(f64::INFINITY);
    checks.check("asymptote", "final_error", error, limit, error <= limit);
    let decreasing = trace.tail_decreasing(0.0);
    checks.check(
        "asymptote",
        "tail_decreasing",
        decreasing as u8 as f64,
        1.0,
        decreasing,
    );
    checks.info("asymptote", "limit", trace.limit.into());
    checks.doc.tolerance("asymptote", limit);
    Ok(())
}

fn verify_extreme(checks: &mut Checks) -> Result<()> {
    let trace = extreme_case_trace(2..=10_000)?;
    let scaled = |n: u64| trace[(n - 2) as usize].scaled;
    let (s100, s1000) = (scaled(100), scaled(1000));
    checks.check(
        "extreme",
        "N=100 |N^2 D - 1|",
        (s100 - 1.0).abs(),
        0.05,
        (s100 - 1.0).abs() <= 0.05,
    );
    checks.check(
        "extreme",
        "N=1000 |N^2 D - 1|",
        (s1000 - 1.0).abs(),
        0.005,
        (s1000 - 1.0).abs() <= 0.005,
    );
    let worst = trace
        .iter()
        .map(|p| p.divergence - p.lower_bound)
        .fold(f64::INFINITY, f64::min);
    checks.check(
        "extreme",
        "D - 1/(2(N-1)^2), N <= 10000",
        worst,
        0.0,
        worst >= 0.0,
    );
    Ok(())
}

fn schedule(args: &ScheduleArgs) -> Result<Vec<u64>> {
    if args.steps == 0 || args.n_max < 2 {
        return Err(Error::Usage("need --steps ≥ 1 and --Nmax ≥ 2".into()));
    }
    let pops: Vec<u64> = linear_schedule(args.n_max, args.steps)
        .into_iter()
        .filter(|&n| n >= 2)
        .collect();
    if pops.is_empty() {
        return Err(Error::Usage("schedule is empty".into()));
    }
    Ok(pops)
}

pub fn cmd_asymptote(args: &AsymptoteArgs, cap: SupportCap) -> Result<ReportDocument> {
    let trace = asymptote_experiment(
        &args.weights,
        args.schedule.r,
        &schedule(&args.schedule)?,
        cap,
    )?;
    let mut doc = ReportDocument::new("asymptote", &["N", "n", "exact", "limit", "error"]);
    doc.param("r", args.schedule.r)
        .param("Nmax", args.schedule.n_max)
        .param("steps", args.schedule.steps)
        .param("weights", &args.weights);
    for (i, &(big_n, n)) in trace.schedule.iter().enumerate() {
        doc.push_row(vec![
            big_n.into(),
            n.into(),
            trace.values[i].into(),
            trace.limit.into(),
            trace.errors[i].into(),
        ]);
    }
    doc.note(
        "limit",
        asymptote_limit(args.weights.len(), args.schedule.r),
    );
    doc.note("tail_decreasing", trace.tail_decreasing(0.0));
    Ok(doc)
}

/// Grid `p = i/(points + 1)`, jittered when a seed is given.
pub fn probe_grid(args: &ProbeArgs) -> Vec<f64> {
    let spacing = 1.0 / (args.points + 1) as f64;
    let mut rng = args.seed.map(ChaCha8Rng::seed_from_u64);
    (1..=args.points)
        .map(|i| {
            let jitter = rng
                .as_mut()
                .map_or(0.0, |r| r.gen_range(-0.5..0.5) * spacing);
            i as f64 * spacing + jitter
        })
        .collect()
}

fn probe(args: &ProbeArgs, tolerance: f64) -> Result<ConjectureReport> {
    if args.max_draws < 2 || args.points == 0 {
        return Err(Error::Usage("need --max-draws ≥ 2 and --points ≥ 1".into()));
    }
    let n_values: Vec<u64> = (2..=args.max_draws).collect();
    let cfg = SweepConfig {
        tolerance,
        ..SweepConfig::default()
    };
    Ok(conjecture_search(
        &n_values,
        &probe_grid(args),
        &cfg,
        tolerance,
    )?)
}

pub fn cmd_conjecture(args: &ProbeArgs, tolerance: f64) -> Result<Outcome> {
    let report = probe(args, tolerance)?;
    let mut doc = ReportDocument::new("conjecture", &["kind", "n", "p", "beta", "mean", "slack"]);
    doc.param("max_draws", args.max_draws)
        .param("points", args.points)
        .param("seed", args.seed)
        .tolerance("slack", tolerance);
    for (kind, points) in [
        ("normalized", &report.violations),
        ("reduction", &report.reduction_violations),
    ] {
        for v in points {
            doc.push_row(vec![
                kind.into(),
                v.n.into(),
                v.p.into(),
                v.beta.into(),
                v.mean.into(),
                v.slack.into(),
            ]);
        }
    }
    doc.note("points_checked", report.points_checked);
    doc.note("skipped_integer_mean", report.skipped_integer_mean);
    doc.note("violations", report.violations.len());
    let passed = report.violations.is_empty();
    Ok(Outcome {
        report: doc,
        passed,
    })
}
