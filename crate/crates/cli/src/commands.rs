use std::fs;

use guesswork::budget::{
    self, compare_free_form, compare_moment_exponents, compare_rate_functions, compare_vs_uniform_moments,
    compare_vs_uniform_rate, search_moment_violations, search_rate_violations, BudgetComparison,
    ComparisonKind, ViolationSearch,
};
use guesswork::guessing::{
    build_profile_with, guesswork_moment, guesswork_moment_auto, log_success_probability_for, Limits,
    MomentMode, QueryBudget,
};
use guesswork::secscan::{
    near_uniform_certificate, random_sources, scan_binary_segment, scan_simplex_with, GridPoint, SecLabel,
    MAX_SCAN_POINTS,
};
use guesswork::tilt::{entropy_range, family_scan, rate_function, solve_alpha_for_entropy, DEFAULT_ALPHA_TOL};
use guesswork::verify::{run_suite, Status, Suite};
use guesswork::Source;

use crate::args::{Command, GuardArgs, ModeArg, SourceArgs, SourceSetArgs, SuiteArg};
use crate::error::CliError;
use crate::output::{Cell, Column, Table};

/// Largest number of points a grid expression may expand to.
const MAX_GRID_POINTS: usize = 1_000_000;

/// Parses `a,b,c` or `start:step:stop` (inclusive), or a mix of both.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let pieces: Vec<&str> = part.split(':').collect();
        match pieces.as_slice() {
            [x] => out.push(parse_number(x)?),
            [start, step, stop] => {
                let (a, s, b) = (parse_number(start)?, parse_number(step)?, parse_number(stop)?);
                if !(s > 0.0) || b < a {
                    return Err(CliError::invalid(format!(
                        "range `{part}` needs a positive step and start <= stop"
                    )));
                }
                let steps = ((b - a) / s + 1e-9).floor();
                if steps >= MAX_GRID_POINTS as f64 {
                    return Err(CliError::invalid(format!("range `{part}` is too long")));
                }
                out.extend((0..=steps as usize).map(|i| a + s * i as f64));
            }
            _ => return Err(CliError::invalid(format!("cannot parse grid entry `{part}`"))),
        }
    }
    if out.is_empty() {
        return Err(CliError::invalid("empty grid"));
    }
    Ok(out)
}

fn parse_number(s: &str) -> Result<f64, CliError> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::invalid(format!("`{s}` is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::invalid(format!("`{s}` is not finite")));
    }
    Ok(x)
}

fn parse_lengths(text: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<u64>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| CliError::invalid(format!("`{p}` is not a positive length")))
        })
        .collect()
}

fn load_source(args: &SourceArgs) -> Result<Source, CliError> {
    match (&args.probs, &args.probs_file) {
        (Some(text), _) => Ok(Source::parse(text)?),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)?;
            Ok(Source::parse(&text)?)
        }
        (None, None) => Err(CliError::invalid("a source is required: --probs or --probs-file")),
    }
}

/// Sources with their lengths and display ids.
fn load_source_set(args: &SourceSetArgs) -> Result<Vec<(String, Source, u64)>, CliError> {
    if args.table1 {
        return budget::table1(budget::table1_budget::<f64>(), &budget::TABLE1_LENGTHS)?
            .into_iter()
            .map(|row| Ok((format!("table1_n{}", row.n), Source::binary(row.phi)?, row.n)))
            .collect();
    }
    let n = args.n.ok_or_else(|| CliError::invalid("--n is required unless --table1 is given"))?;
    if n == 0 {
        return Err(CliError::invalid("--n must be positive"));
    }
    Ok(vec![("source".into(), load_source(&args.source)?, n)])
}

pub struct Guards {
    pub limits: Limits,
    pub max_scan_points: u64,
}

impl Guards {
    pub fn from_args(args: &GuardArgs) -> Self {
        let d = Limits::default();
        if args.force_guard {
            // the enumeration cap also steers automatic mode selection, so it
            // stays in force unless given explicitly
            return Self {
                limits: Limits {
                    max_enumerated_strings: args.max_enumerated.unwrap_or(d.max_enumerated_strings),
                    ..Limits::unbounded()
                },
                max_scan_points: u64::MAX,
            };
        }
        Self {
            limits: Limits {
                max_compositions: args.max_compositions.unwrap_or(d.max_compositions),
                max_enumerated_strings: args.max_enumerated.unwrap_or(d.max_enumerated_strings),
                max_oracle_strings: d.max_oracle_strings,
            },
            max_scan_points: args.max_scan_points.unwrap_or(MAX_SCAN_POINTS),
        }
    }
}

/// What a command produced: a table and whether every check passed.
pub struct Outcome {
    pub table: Table,
    pub passed: bool,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Self { table, passed: true }
    }
}

pub fn run(command: &Command, guards: &Guards) -> Result<Outcome, CliError> {
    match command {
        Command::Analyze { source } => analyze(&load_source(source)?).map(Into::into),
        Command::TiltScan { source, alphas } => tilt_scan(&load_source(source)?, alphas).map(Into::into),
        Command::Rate { source, g } => rate(&load_source(source)?, g.as_deref()).map(Into::into),
        Command::Moments { set, rho, mode } => moments(set, rho, *mode, guards).map(Into::into),
        Command::Success { set, log_budget, g } => {
            success(set, log_budget.as_deref(), g.as_deref(), guards).map(Into::into)
        }
        Command::Compare {
            source,
            probs2,
            alpha,
            uniform,
            rho,
            g,
            n1,
            search,
        } => {
            let theta = load_source(source)?;
            if *search {
                return search_violations(&theta).map(Into::into);
            }
            compare(&theta, probs2.as_deref(), *alpha, *uniform, rho.as_deref(), g.as_deref(), *n1)
                .map(Into::into)
        }
        Command::ScanSimplex {
            resolution,
            dimension,
            binary,
            random,
            seed,
        } => scan(*resolution, *dimension, *binary, *random, *seed, guards).map(Into::into),
        Command::Table1 {
            total_bits,
            total_nats,
            lengths,
        } => {
            let total = total_nats.unwrap_or(total_bits * std::f64::consts::LN_2);
            table1(total, &parse_lengths(lengths)?).map(Into::into)
        }
        Command::Verify { suite } => Ok(verify(*suite)),
    }
}

fn analyze(theta: &Source) -> Result<Table, CliError> {
    let mut t = Table::new(vec![
        Column::plain("alphabet_size"),
        Column::nats("shannon", 1),
        Column::nats("renyi_half", 1),
        Column::nats("collision", 1),
        Column::nats("min_entropy", 1),
        Column::nats("varentropy", 2),
        Column::nats("skewentropy", 3),
        Column::nats("sec_margin", 4),
        Column::plain("satisfies_sec"),
        Column::plain("label"),
        Column::nats("max_info_deviation", 1),
        Column::plain("certified"),
        Column::plain("in_box"),
    ]);
    let r = theta.sec_report();
    let c = near_uniform_certificate(theta);
    t.push(vec![
        theta.alphabet_size().into(),
        r.shannon.into(),
        theta.renyi_entropy(0.5)?.into(),
        theta.renyi_entropy(2.0)?.into(),
        theta.renyi_entropy(f64::INFINITY)?.into(),
        r.varentropy.into(),
        r.skewentropy.into(),
        r.margin.into(),
        r.satisfies_sec.into(),
        SecLabel::of(theta, &r).name().into(),
        c.max_info_deviation.into(),
        c.certified.into(),
        c.in_box.into(),
    ]);
    Ok(t)
}

fn member(alpha: f64) -> &'static str {
    if alpha == 0.0 {
        "uniform"
    } else if alpha < 1.0 {
        "high_entropy"
    } else if alpha == 1.0 {
        "base"
    } else {
        "low_entropy"
    }
}

fn tilt_scan(theta: &Source, alphas: &str) -> Result<Table, CliError> {
    let alphas = parse_grid(alphas)?;
    let mut columns = vec![
        Column::plain("alpha"),
        Column::plain("member"),
        Column::nats("entropy", 1),
        Column::nats("kl_to_base", 1),
        Column::plain("clamped"),
    ];
    columns.extend((1..=theta.alphabet_size()).map(|i| Column::plain(&format!("p{i}"))));
    let mut t = Table::new(columns);
    for p in family_scan(theta, &alphas)? {
        let mut row: Vec<Cell> = vec![
            p.alpha.into(),
            member(p.alpha).into(),
            p.entropy.into(),
            p.kl_to_base.into(),
            p.clamped.into(),
        ];
        row.extend(p.dist.probs().iter().map(|&x| Cell::from(x)));
        t.push(row);
    }
    Ok(t)
}

fn rate(theta: &Source, g: Option<&str>) -> Result<Table, CliError> {
    let (lo, hi) = entropy_range(theta);
    let grid = match g {
        Some(text) => parse_grid(text)?,
        None if theta.is_uniform() => (0..=20).map(|i| hi * i as f64 / 20.0).collect(),
        None => (1..=20).map(|i| lo + (hi - lo) * i as f64 / 21.0).collect(),
    };
    let mut t = Table::new(vec![
        Column::nats("g", 1),
        Column::plain("alpha"),
        Column::nats("rate", 1),
    ]);
    for g in grid {
        let alpha = if theta.is_uniform() {
            None
        } else {
            Some(solve_alpha_for_entropy(theta, g, DEFAULT_ALPHA_TOL)?)
        };
        t.push(vec![g.into(), alpha.into(), rate_function(theta, g)?.into()]);
    }
    Ok(t)
}

fn moment_mode(mode: ModeArg) -> Option<MomentMode> {
    match mode {
        ModeArg::Auto => None,
        ModeArg::ExactEnumerated => Some(MomentMode::ExactEnumerated),
        ModeArg::ExactInteger => Some(MomentMode::ExactInteger),
        ModeArg::IntegralApprox => Some(MomentMode::IntegralApprox),
    }
}

fn moments(set: &SourceSetArgs, rho: &str, mode: ModeArg, guards: &Guards) -> Result<Table, CliError> {
    let rhos = parse_grid(rho)?;
    let mut t = Table::new(vec![
        Column::plain("source"),
        Column::plain("n"),
        Column::nats("entropy", 1),
        Column::plain("rho"),
        Column::nats("log_moment", 1),
        Column::nats("exponent", 1),
        Column::plain("mode"),
    ]);
    for (id, theta, n) in load_source_set(set)? {
        let profile = build_profile_with(&theta, n, guards.limits)?;
        for &r in &rhos {
            let (value, used) = match moment_mode(mode) {
                Some(m) => (guesswork_moment(&profile, r, m)?, m),
                None => guesswork_moment_auto(&profile, r)?,
            };
            t.push(vec![
                id.clone().into(),
                n.into(),
                theta.shannon_entropy().into(),
                r.into(),
                value.into(),
                (value / n as f64).into(),
                used.name().into(),
            ]);
        }
    }
    Ok(t)
}

fn success(
    set: &SourceSetArgs,
    log_budget: Option<&str>,
    g: Option<&str>,
    guards: &Guards,
) -> Result<Table, CliError> {
    let per_char = g.map(parse_grid).transpose()?;
    let totals = match (log_budget, &per_char) {
        (Some(text), _) => Some(parse_grid(text)?),
        (None, Some(_)) => None,
        (None, None) => Some(parse_grid("0:0.5:6")?),
    };
    let mut t = Table::new(vec![
        Column::plain("source"),
        Column::plain("n"),
        Column::nats("entropy", 1),
        Column::nats("g", 1),
        Column::nats("log_budget", 1),
        Column::plain("queries"),
        Column::plain("success"),
        Column::nats("log_success", 1),
    ]);
    for (id, theta, n) in load_source_set(set)? {
        let profile = build_profile_with(&theta, n, guards.limits)?;
        let points: Vec<(Option<f64>, f64)> = match (&totals, &per_char) {
            (Some(b), _) => b.iter().map(|&b| (None, b)).collect(),
            (None, Some(gs)) => gs.iter().map(|&g| (Some(g), g * n as f64)).collect(),
            (None, None) => unreachable!("a default budget grid is always set"),
        };
        for (g, b) in points {
            let budget = QueryBudget::from_log(b)?;
            let log_p = log_success_probability_for(&profile, budget);
            t.push(vec![
                id.clone().into(),
                n.into(),
                theta.shannon_entropy().into(),
                g.into(),
                b.into(),
                budget.exact.into(),
                log_p.exp().into(),
                log_p.into(),
            ]);
        }
    }
    Ok(t)
}

fn kind_name(kind: ComparisonKind) -> &'static str {
    match kind {
        ComparisonKind::MomentExponent => "moment_exponent",
        ComparisonKind::MomentVsUniform => "moment_vs_uniform",
        ComparisonKind::RateFunction => "rate_function",
        ComparisonKind::RateVsUniform => "rate_vs_uniform",
        ComparisonKind::FreeForm => "free_form",
    }
}

fn comparison_table() -> Table {
    Table::new(vec![
        Column::plain("kind"),
        Column::plain("rho"),
        Column::nats("g1", 1),
        Column::plain("alpha"),
        Column::plain("eta"),
        Column::plain("n1"),
        Column::plain("n2_real"),
        Column::plain("n2_ceil"),
        Column::nats("lhs", 1),
        Column::nats("rhs", 1),
        Column::plain("verdict"),
        Column::plain("expected"),
        Column::plain("ordering_holds"),
    ])
}

fn push_comparison(t: &mut Table, c: &BudgetComparison<f64>) {
    t.push(vec![
        kind_name(c.kind).into(),
        c.rho.into(),
        c.g1.into(),
        c.alpha.into(),
        c.eta.into(),
        c.n1.into(),
        c.n2_real.into(),
        c.n2_ceil().into(),
        c.lhs.into(),
        c.rhs.into(),
        c.verdict.symbol().into(),
        c.kind.expected().map(|v| v.symbol()).into(),
        c.ordering_holds().into(),
    ]);
}

fn compare(
    theta: &Source,
    probs2: Option<&str>,
    alpha: Option<f64>,
    uniform: bool,
    rho: Option<&str>,
    g: Option<&str>,
    n1: u64,
) -> Result<Table, CliError> {
    if n1 == 0 {
        return Err(CliError::invalid("--n1 must be positive"));
    }
    let rhos = match (rho, g) {
        (Some(text), _) => parse_grid(text)?,
        (None, Some(_)) => Vec::new(),
        (None, None) => vec![1.0],
    };
    let gs = g.map(parse_grid).transpose()?.unwrap_or_default();
    let mut out = Vec::new();
    if let Some(text) = probs2 {
        if !gs.is_empty() {
            return Err(CliError::invalid("--g needs --alpha or --uniform; free-form pairs compare moments only"));
        }
        let other = Source::parse(text)?;
        for &r in &rhos {
            out.push(compare_free_form(theta, &other, r)?);
        }
    } else if let Some(a) = alpha {
        for &r in &rhos {
            out.push(compare_moment_exponents(theta, a, r)?);
        }
        for &g1 in &gs {
            out.push(compare_rate_functions(theta, a, g1)?);
        }
    } else if uniform {
        for &r in &rhos {
            out.push(compare_vs_uniform_moments(theta, r)?);
        }
        for &g1 in &gs {
            out.push(compare_vs_uniform_rate(theta, g1)?);
        }
    } else {
        return Err(CliError::invalid(
            "choose a comparison: --alpha, --uniform, --probs2 or --search",
        ));
    }
    let mut t = comparison_table();
    for c in out {
        push_comparison(&mut t, &c.with_length(n1));
    }
    Ok(t)
}

fn search_violations(theta: &Source) -> Result<Table, CliError> {
    let alphas = budget::default_alpha_grid();
    let moments = search_moment_violations(theta, &alphas, &budget::default_rho_grid())?;
    let rates = search_rate_violations(theta, &alphas, &budget::default_g_fractions())?;
    let mut t = Table::new(vec![
        Column::plain("kind"),
        Column::plain("evaluated"),
        Column::plain("skipped"),
        Column::plain("violations"),
        Column::nats("min_margin", 1),
    ]);
    let mut push = |kind: ComparisonKind, s: &ViolationSearch<f64>| {
        t.push(vec![
            kind_name(kind).into(),
            s.evaluated.into(),
            s.skipped.into(),
            s.violations.len().into(),
            s.min_margin.into(),
        ])
    };
    push(ComparisonKind::MomentExponent, &moments);
    push(ComparisonKind::RateFunction, &rates);
    Ok(t)
}

fn report_columns() -> Vec<Column> {
    vec![
        Column::nats("entropy", 1),
        Column::nats("varentropy", 2),
        Column::nats("skewentropy", 3),
        Column::nats("sec_margin", 4),
        Column::plain("label"),
    ]
}

fn report_cells(p: &GridPoint<f64>) -> Vec<Cell> {
    vec![
        p.report.shannon.into(),
        p.report.varentropy.into(),
        p.report.skewentropy.into(),
        p.report.margin.into(),
        p.label.name().into(),
    ]
}

fn scan(
    resolution: u32,
    dimension: usize,
    binary: bool,
    random: Option<usize>,
    seed: u64,
    guards: &Guards,
) -> Result<Table, CliError> {
    if binary {
        let mut columns = vec![Column::plain("i"), Column::plain("phi")];
        columns.extend(report_columns());
        let mut t = Table::new(columns);
        for p in scan_binary_segment::<f64>(resolution)? {
            let mut row: Vec<Cell> = vec![(p.lattice[0] as u64).into(), p.theta.probs()[0].into()];
            row.extend(report_cells(&p));
            t.push(row);
        }
        return Ok(t);
    }
    if let Some(count) = random {
        if count as u64 > guards.max_scan_points {
            return Err(guesswork::Error::ResourceGuard {
                points: count as u64,
                limit: guards.max_scan_points,
            }
            .into());
        }
        let mut columns = vec![Column::plain("sample")];
        columns.extend((1..=dimension).map(|i| Column::plain(&format!("theta{i}"))));
        columns.extend(report_columns());
        columns.push(Column::plain("certified"));
        let mut t = Table::new(columns);
        for (i, theta) in random_sources::<f64>(dimension, count, seed, 0.0)?.iter().enumerate() {
            let report = theta.sec_report();
            let point = GridPoint {
                lattice: Vec::new(),
                label: SecLabel::of(theta, &report),
                theta: theta.clone(),
                report,
            };
            let mut row: Vec<Cell> = vec![i.into()];
            row.extend(theta.probs().iter().map(|&x| Cell::from(x)));
            row.extend(report_cells(&point));
            row.push(near_uniform_certificate(theta).certified.into());
            t.push(row);
        }
        return Ok(t);
    }
    let grid = scan_simplex_with::<f64>(resolution, dimension, guards.max_scan_points)?;
    let mut columns = vec![
        Column::plain("i"),
        Column::plain("j"),
        Column::plain("k"),
        Column::plain("theta1"),
        Column::plain("theta2"),
        Column::plain("theta3"),
    ];
    columns.extend(report_columns());
    let mut t = Table::new(columns);
    for p in &grid.points {
        let mut row: Vec<Cell> = p.lattice.iter().map(|&x| Cell::from(x as u64)).collect();
        row.extend(p.theta.probs().iter().map(|&x| Cell::from(x)));
        row.extend(report_cells(p));
        t.push(row);
    }
    Ok(t)
}

fn table1(total_nats: f64, lengths: &[u64]) -> Result<Table, CliError> {
    if lengths.is_empty() {
        return Err(CliError::invalid("--lengths is empty"));
    }
    let mut t = Table::new(vec![
        Column::plain("n"),
        Column::plain("phi"),
        Column::nats("H", 1),
        Column::nats("n_H", 1),
    ]);
    for row in budget::table1(total_nats, lengths)? {
        t.push(vec![row.n.into(), row.phi.into(), row.entropy.into(), row.total_entropy.into()]);
    }
    Ok(t)
}

fn verify(suite: SuiteArg) -> Outcome {
    let suite = match suite {
        SuiteArg::Derivatives => Suite::Derivatives,
        SuiteArg::Theorems => Suite::Theorems,
        SuiteArg::Oracle => Suite::Oracle,
        SuiteArg::All => Suite::All,
    };
    let records = run_suite(suite);
    let mut t = Table::new(vec![
        Column::plain("suite"),
        Column::plain("case"),
        Column::plain("status"),
        Column::plain("residual"),
    ]);
    let passed = records.iter().all(|r| r.passed());
    for r in records {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
        };
        t.push(vec![r.suite.into(), r.case.into(), status.into(), r.residual.into()]);
    }
    Outcome { table: t, passed }
}
