//! `netwave` command-line tool.
//!
//! Exit status: 0 on success, 1 when an input is invalid or a check or
//! invariant fails, 2 on usage errors.

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use netwave::verify::{self, VerifyConfig};
use netwave::{
    audit, build_matrix, check_continuity, continuation, default_warmup, intensity_report, intrinsic_period,
    max_support_set, optimize, predicted_throughput, run_traced, schedule_pair_equal, schedule_pair_unequal,
    schedule_primary, schedule_primary_with_spacing, space_time_diagram, validate_path_rules, validate_support_set,
    BinaryMatrix, IntensityReport, PathPair, Rational, RuleReport, Scenario, Schedule, SimReport, SupportSet,
    SupportViolation,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "netwave", version, about = "Beat scheduling for one or two multi-hop paths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Intensities, degrees and intrinsic periods of each path and the pair.
    Analyze {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Joint concurrency matrix of a pair, optionally tiled.
    Matrix {
        scenario: PathBuf,
        #[command(flatten)]
        spacing: Spacing,
        #[arg(long, requires = "l2")]
        l1: Option<usize>,
        #[arg(long, requires = "l1")]
        l2: Option<usize>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Maximum supporting set of a binary matrix (JSON rows or a 0/1 grid;
    /// `-` reads stdin).
    Support {
        matrix: PathBuf,
        /// Check this candidate instead, given as `row,col;row,col;...`.
        #[arg(long)]
        candidate: Option<String>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Build a beat schedule.
    Schedule {
        scenario: PathBuf,
        #[command(flatten)]
        plan: Plan,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Build a schedule and run it.
    Simulate {
        scenario: PathBuf,
        #[command(flatten)]
        plan: Plan,
        /// Measured periods.
        #[arg(long, default_value_t = 10)]
        periods: usize,
        /// Unmeasured periods before the window; defaults to enough to fill
        /// the pipeline.
        #[arg(long)]
        warmup: Option<usize>,
        /// Emit one JSON line per beat before the report.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Search routes, spacings and activation counts for the best joint
    /// throughput.
    Optimize {
        scenario: PathBuf,
        #[arg(long)]
        max_activations: Option<usize>,
        /// Spacing bounds for path 1 as `lo:hi`.
        #[arg(long, value_parser = parse_range)]
        t1_range: Option<(usize, usize)>,
        /// Spacing bounds for path 2 as `lo:hi`.
        #[arg(long, value_parser = parse_range)]
        t2_range: Option<(usize, usize)>,
        #[arg(long, value_enum, default_value_t = RouteMode::All)]
        routes: RouteMode,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run the property checks on a seeded random corpus.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteMode {
    /// Only the first route of each path.
    First,
    /// Every combination of candidate routes.
    All,
}

#[derive(Args, Clone, Copy)]
struct Spacing {
    /// Spacing of path 1; defaults to its intrinsic period.
    #[arg(long)]
    t1: Option<usize>,
    /// Spacing of path 2; defaults to its intrinsic period.
    #[arg(long)]
    t2: Option<usize>,
}

#[derive(Args, Clone, Copy)]
struct Plan {
    #[command(flatten)]
    spacing: Spacing,
    /// Schedule only this path of the scenario.
    #[arg(long)]
    path: Option<u8>,
    /// Equal activation count for both paths.
    #[arg(long, conflicts_with_all = ["l1", "l2"])]
    activations: Option<usize>,
    /// Activations of path 1 per cycle.
    #[arg(long, requires = "l2")]
    l1: Option<usize>,
    /// Activations of path 2 per cycle.
    #[arg(long, requires = "l1")]
    l2: Option<usize>,
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: usize = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: usize = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if lo == 0 || lo > hi {
        return Err("need 1 <= lo <= hi".into());
    }
    Ok((lo, hi))
}

fn emit<T: Serialize>(out: &mut impl Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn load(path: &Path) -> Result<(Scenario, PathPair)> {
    let sc = Scenario::load(path)?;
    let pair = sc.pair()?;
    Ok((sc, pair))
}

impl Spacing {
    fn resolve(self, pair: &PathPair) -> Result<(usize, usize)> {
        let t1 = match self.t1 {
            Some(t) => t,
            None => intrinsic_period(pair, 1)?,
        };
        let t2 = match self.t2 {
            Some(t) => t,
            None => intrinsic_period(pair, 2)?,
        };
        Ok((t1, t2))
    }
}

impl Plan {
    fn build(self, pair: &PathPair) -> Result<Schedule> {
        let single = self.path.or((!pair.is_pair()).then_some(1));
        if let Some(id) = single {
            if self.activations.is_some() || self.l1.is_some() {
                bail!("activation counts apply to pair schedules only");
            }
            let spacing = if id == 1 { self.spacing.t1 } else { self.spacing.t2 };
            return Ok(match spacing {
                Some(t) => schedule_primary_with_spacing(pair, id, t)?,
                None => schedule_primary(pair, id)?,
            });
        }
        let (t1, t2) = self.spacing.resolve(pair)?;
        Ok(match (self.l1, self.l2) {
            (Some(l1), Some(l2)) => schedule_pair_unequal(pair, t1, t2, l1, l2)?,
            _ => schedule_pair_equal(pair, t1, t2, self.activations.unwrap_or(1))?,
        })
    }
}

#[derive(Serialize)]
struct PathAnalysis {
    path_id: u8,
    n_senders: usize,
    intrinsic_period: usize,
    rules: RuleReport,
    continuous: Option<bool>,
    report: IntensityReport,
}

#[derive(Serialize)]
struct Analysis {
    paths: Vec<PathAnalysis>,
    pair: Option<IntensityReport>,
}

fn analyze(pair: &PathPair) -> Result<Analysis> {
    let mut paths = Vec::new();
    for p in pair.paths() {
        let rules = validate_path_rules(pair, p.id)?;
        let continuous = if rules.holds() { Some(check_continuity(pair, p.id)?) } else { None };
        paths.push(PathAnalysis {
            path_id: p.id,
            n_senders: p.n_senders,
            intrinsic_period: intrinsic_period(pair, p.id)?,
            rules,
            continuous,
            report: intensity_report(pair, &p.senders().collect::<Vec<_>>())?,
        });
    }
    let joint = if pair.is_pair() { Some(intensity_report(pair, &pair.all_nodes())?) } else { None };
    Ok(Analysis { paths, pair: joint })
}

#[derive(Serialize)]
struct Tiled {
    activations1: usize,
    activations2: usize,
    matrix: BinaryMatrix,
    support_number: usize,
}

#[derive(Serialize)]
struct MatrixOut {
    spacing1: usize,
    spacing2: usize,
    matrix: BinaryMatrix,
    support: SupportSet,
    support_number: usize,
    continuation: Option<Tiled>,
}

#[derive(Serialize)]
struct SupportOut {
    rows: usize,
    cols: usize,
    support_number: usize,
    support: SupportSet,
    candidate_valid: Option<bool>,
    violations: Vec<SupportViolation>,
}

#[derive(Serialize)]
struct ScheduleOut<'a> {
    predicted_throughput: Rational,
    schedule: &'a Schedule,
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse_candidate(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(';')
        .filter(|e| !e.trim().is_empty())
        .map(|e| {
            let (r, c) = e.split_once(',').with_context(|| format!("bad element {e:?}, expected row,col"))?;
            Ok((r.trim().parse()?, c.trim().parse()?))
        })
        .collect()
}

/// Returns whether every check passed.
fn dispatch(cmd: Command, out: &mut impl Write) -> Result<bool> {
    match cmd {
        Command::Analyze { scenario, format } => {
            let (_, pair) = load(&scenario)?;
            let a = analyze(&pair)?;
            match format {
                Format::Json => emit(out, &a)?,
                Format::Text => {
                    for p in &a.paths {
                        writeln!(
                            out,
                            "path {}: N={} I*={} C*={} T*={} dominant={}",
                            p.path_id,
                            p.n_senders,
                            p.report.interference_intensity,
                            p.report.concurrency_intensity,
                            p.intrinsic_period,
                            p.report.dominant
                        )?;
                    }
                    if let Some(j) = &a.pair {
                        writeln!(out, "pair: I*={} C*={}", j.interference_intensity, j.concurrency_intensity)?;
                    }
                }
            }
            Ok(true)
        }
        Command::Matrix {
            scenario,
            spacing,
            l1,
            l2,
            format,
        } => {
            let (_, pair) = load(&scenario)?;
            let (t1, t2) = spacing.resolve(&pair)?;
            let c = build_matrix(&pair, t1, t2)?;
            let (support, support_number) = max_support_set(&c.entries);
            let tiled = match (l1, l2) {
                (Some(a), Some(b)) => {
                    let m = continuation(&c.entries, a, b)?;
                    let u = max_support_set(&m).1;
                    Some(Tiled {
                        activations1: a,
                        activations2: b,
                        matrix: m,
                        support_number: u,
                    })
                }
                _ => None,
            };
            let res = MatrixOut {
                spacing1: t1,
                spacing2: t2,
                matrix: c.entries,
                support,
                support_number,
                continuation: tiled,
            };
            match format {
                Format::Json => emit(out, &res)?,
                Format::Text => {
                    writeln!(out, "spacings {t1} x {t2}, U* = {}", res.support_number)?;
                    write!(out, "{}", res.matrix.to_grid())?;
                    if let Some(t) = &res.continuation {
                        writeln!(
                            out,
                            "continuation {} x {}, U* = {}",
                            t.activations1, t.activations2, t.support_number
                        )?;
                        write!(out, "{}", t.matrix.to_grid())?;
                    }
                }
            }
            Ok(true)
        }
        Command::Support {
            matrix,
            candidate,
            format,
        } => {
            let m: BinaryMatrix = read_input(&matrix)?.parse()?;
            let (support, support_number) = max_support_set(&m);
            let (candidate_valid, violations) = match candidate {
                Some(c) => {
                    let v = validate_support_set(&m, &parse_candidate(&c)?)?;
                    (Some(v.is_empty()), v)
                }
                None => (None, Vec::new()),
            };
            let res = SupportOut {
                rows: m.rows(),
                cols: m.cols(),
                support_number,
                support,
                candidate_valid,
                violations,
            };
            match format {
                Format::Json => emit(out, &res)?,
                Format::Text => {
                    writeln!(out, "U* = {}", res.support_number)?;
                    let elems: Vec<String> = res.support.elements.iter().map(|(r, c)| format!("({r},{c})")).collect();
                    writeln!(out, "support {}", elems.join(" "))?;
                    for v in &res.violations {
                        writeln!(out, "violation: {v}")?;
                    }
                }
            }
            Ok(res.candidate_valid != Some(false))
        }
        Command::Schedule { scenario, plan, format } => {
            let (_, pair) = load(&scenario)?;
            let s = plan.build(&pair)?;
            let problems = audit(&pair, &s)?;
            match format {
                Format::Json => emit(
                    out,
                    &ScheduleOut {
                        predicted_throughput: predicted_throughput(&s),
                        schedule: &s,
                    },
                )?,
                Format::Text => {
                    writeln!(
                        out,
                        "period {} beats, U* = {}, predicted {} blocks/beat{}",
                        s.period,
                        s.support_number,
                        predicted_throughput(&s),
                        if s.pipelined { "" } else { " (not pipelined)" }
                    )?;
                    write!(out, "{}", s.timeline())?;
                }
            }
            for p in &problems {
                eprintln!("audit: {p:?}");
            }
            Ok(problems.is_empty())
        }
        Command::Simulate {
            scenario,
            plan,
            periods,
            warmup,
            trace,
            format,
        } => {
            let (_, pair) = load(&scenario)?;
            let s = plan.build(&pair)?;
            let warmup = warmup.unwrap_or_else(|| default_warmup(&s));
            let (rep, beats) = run_traced(&pair, &s, periods, warmup, trace || matches!(format, Format::Text))?;
            match format {
                Format::Json => {
                    if trace {
                        for b in &beats {
                            serde_json::to_writer(&mut *out, b)?;
                            writeln!(out)?;
                        }
                        serde_json::to_writer(&mut *out, &rep)?;
                        writeln!(out)?;
                    } else {
                        emit(out, &rep)?;
                    }
                }
                Format::Text => {
                    write!(out, "{}", space_time_diagram(&pair, &beats))?;
                    write_sim_summary(out, &rep)?;
                }
            }
            let matches = rep.predicted.map_or(true, |p| p == rep.throughput);
            if !rep.is_clean() {
                eprintln!("simulation violated an invariant");
            } else if !matches {
                eprintln!(
                    "measured throughput {} differs from predicted {}",
                    rep.throughput,
                    rep.predicted.unwrap_or(Rational::ZERO)
                );
            }
            Ok(rep.is_clean() && matches)
        }
        Command::Optimize {
            scenario,
            max_activations,
            t1_range,
            t2_range,
            routes,
            format,
        } => {
            let sc = Scenario::load(&scenario)?;
            let mut space = sc.search_space(max_activations)?;
            if let RouteMode::First = routes {
                space.candidates.truncate(1);
            }
            if t1_range.is_some() {
                space.period_bounds[0] = t1_range;
            }
            if t2_range.is_some() {
                space.period_bounds[1] = t2_range;
            }
            let res = optimize(&space)?;
            match format {
                Format::Json => emit(out, &res)?,
                Format::Text => {
                    let b = res.best;
                    writeln!(out, "best throughput {} blocks/beat", res.best_throughput)?;
                    for (k, r) in res.best_routes.iter().enumerate() {
                        writeln!(out, "route {}: {}", k + 1, r.join(" -> "))?;
                    }
                    writeln!(
                        out,
                        "spacings ({}, {}), activations ({}, {}), U* = {}, period {}",
                        b.spacing1, b.spacing2, b.activations1, b.activations2, b.support_number, res.schedule.period
                    )?;
                    let evaluated = res.search_log.iter().filter(|c| c.throughput.is_some()).count();
                    let skipped = res.search_log.len() - evaluated;
                    writeln!(out, "{evaluated} grid points evaluated, {skipped} skipped")?;
                    write!(out, "{}", res.schedule.timeline())?;
                }
            }
            Ok(true)
        }
        Command::Verify {
            seed,
            instances,
            format,
        } => {
            let outcomes = verify::run_all(&VerifyConfig::scaled(seed, instances));
            match format {
                Format::Json => emit(out, &outcomes)?,
                Format::Text => {
                    for o in &outcomes {
                        writeln!(out, "{}", o.line())?;
                    }
                }
            }
            Ok(outcomes.iter().all(|o| o.passed))
        }
    }
}

fn write_sim_summary(out: &mut impl Write, rep: &SimReport) -> Result<()> {
    writeln!(
        out,
        "beats {}..{}: delivered {}, throughput {}, predicted {}",
        rep.window_start,
        rep.window_start + rep.window_beats - 1,
        rep.delivered,
        rep.throughput,
        rep.predicted.map_or_else(|| "-".to_string(), |p| p.to_string())
    )?;
    for p in &rep.paths {
        writeln!(out, "path {}: delivered {}, throughput {}", p.path_id, p.delivered, p.throughput)?;
    }
    writeln!(
        out,
        "violations {}, stalls {}, conservation {}, fifo {}",
        rep.interference_violations, rep.stalls, rep.conservation_ok, rep.fifo_ok
    )?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match dispatch(cli.command, &mut out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
