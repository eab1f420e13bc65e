use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::{debug, info};
use prnred::campaign::{run_campaign, CampaignConfig};
use prnred::model::{self, Assignment, Format, Model};
use prnred::report::{
    mode_name, CoverReport, OracleReport, ReachReport, ReachSide, ReductionInput, ReductionReport,
};
use prnred::render;
use prnred_core::{
    compute_cover_set, concrete_cover_set, enabled_by_lattice, enumerate_minimal_traces, initial_lattice, reachable,
    reduce, Dprn, Goal, ParametrisationLattice, ReductionContext, SearchMode, SearchOptions, State, ValueChange,
    Verdict,
};

const EXIT_UNREACHED: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "prnred", version, about = "Goal-oriented reduction of parametric regulatory networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Approx,
}

impl From<Mode> for SearchMode {
    fn from(m: Mode) -> SearchMode {
        match m {
            Mode::Exact => SearchMode::Exact,
            Mode::Approx => SearchMode::Approximate,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(clap::Args)]
struct Common {
    /// Model file (line format, or JSON with `--format json` or a .json extension).
    model: PathBuf,
    /// Model file format; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<ModelFormat>,
    /// What to print on stdout.
    #[arg(long, value_enum, default_value = "text")]
    output: Output,
    /// Also write the JSON report to this path.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(clap::Args)]
struct Query {
    /// Initial state, e.g. `a=0,b=0,c=0,d=0`; overrides the model file.
    #[arg(long)]
    initial: Option<String>,
    /// Goal, e.g. `a=1`; overrides the model file.
    #[arg(long)]
    goal: Option<String>,
    /// Validity search: exact lattice tracking or the approximate relaxation.
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    /// Maximum number of configurations per search.
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the reduced model preserving the minimal traces to the goal.
    Reduce {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        query: Query,
        /// Include wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Decide whether the goal is reachable, optionally after reduction.
    Reach {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        query: Query,
        #[arg(long, value_enum, default_value = "on")]
        reduce: OnOff,
        /// Stop at the first goal state instead of exploring every reachable configuration.
        #[arg(long)]
        early_exit: bool,
    },
    /// Print the regulation cover set of one value change.
    Cover {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        component: String,
        /// Value change `i:j` with |i-j| = 1.
        #[arg(long)]
        change: String,
    },
    /// List minimal traces, or run the seeded random preservation campaign.
    Oracle {
        /// Model file; not needed with `--campaign`.
        model: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<ModelFormat>,
        #[arg(long, value_enum, default_value = "text")]
        output: Output,
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        #[arg(long)]
        initial: Option<String>,
        #[arg(long)]
        goal: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        /// Largest parametrisation space enumerated explicitly.
        #[arg(long, default_value_t = 1 << 20)]
        cap: u128,
        #[arg(long)]
        campaign: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Print a model file in the line format or as JSON.
    Convert {
        model: PathBuf,
        #[arg(long, value_enum)]
        format: Option<ModelFormat>,
        #[arg(long, value_enum, default_value = "text")]
        to: ModelFormat,
    },
}

fn load(path: &Path, format: Option<ModelFormat>) -> Result<Model> {
    let format = format.map(|f| match f {
        ModelFormat::Text => Format::Text,
        ModelFormat::Json => Format::Json,
    });
    let file = model::read_model(path, format).with_context(|| path.display().to_string())?;
    let m = file.resolve().with_context(|| path.display().to_string())?;
    info!(
        "loaded {} components, {} influences, {} parametrisations",
        m.prn.component_count(),
        m.prn.influence_count(),
        m.parametrisations.len()
    );
    Ok(m)
}

fn parse_assignments(text: &str) -> Result<Vec<Assignment>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (c, v) = item
                .split_once('=')
                .ok_or_else(|| anyhow!("expected `name=value`, got `{item}`"))?;
            let value = v
                .trim()
                .parse()
                .map_err(|_| anyhow!("invalid value `{}` for `{}`", v.trim(), c.trim()))?;
            Ok(Assignment {
                component: c.trim().to_string(),
                value,
            })
        })
        .collect()
}

fn initial_and_goal(m: &Model, initial: Option<&str>, goal: Option<&str>) -> Result<(State, Goal)> {
    let x = match initial {
        Some(s) => model::resolve_state(&m.prn, &parse_assignments(s)?)?,
        None => m
            .initial
            .clone()
            .ok_or_else(|| anyhow!("no initial state in the model file or on the command line"))?,
    };
    let g = match goal {
        Some(s) => {
            let a = parse_assignments(s)?;
            let [a] = a.as_slice() else {
                return Err(anyhow!("expected a single goal `name=value`, got `{s}`"));
            };
            model::resolve_goal(&m.prn, a)?
        }
        None => m
            .goal
            .ok_or_else(|| anyhow!("no goal in the model file or on the command line"))?,
    };
    Ok((x, g))
}

/// Hull of the named parametrisations, or the constraint lattice when the
/// model names none.
fn starting_lattice(m: &Model) -> (ParametrisationLattice, String) {
    if m.parametrisations.is_empty() {
        (initial_lattice(&m.prn), "constraints".into())
    } else {
        let set = prnred_core::ConcreteParametrisationSet::from_members(m.parametrisations.iter().map(|(_, p)| p.clone()));
        (set.hull(&m.prn).expect("named set is non-empty"), set.len().to_string())
    }
}

fn search_options(q: &Query) -> SearchOptions {
    SearchOptions {
        mode: q.mode.into(),
        budget: q.budget,
        ..SearchOptions::default()
    }
}

fn emit(output: Output, json_path: Option<&Path>, text: impl FnOnce() -> String, json: &str) -> Result<()> {
    if let Some(p) = json_path {
        std::fs::write(p, json).with_context(|| format!("writing {}", p.display()))?;
    }
    match output {
        Output::Text => print!("{}", text()),
        Output::Json => print!("{json}"),
    }
    Ok(())
}

fn cmd_reduce(common: &Common, q: &Query, timing: bool) -> Result<u8> {
    let m = load(&common.model, common.format)?;
    let (x, goal) = initial_and_goal(&m, q.initial.as_deref(), q.goal.as_deref())?;
    let (lattice0, parametrisations) = starting_lattice(&m);
    let input = Dprn::unrestricted(m.prn.clone());
    let start = Instant::now();
    let mut ctx = ReductionContext::new(&input, lattice0.clone(), search_options(q));
    let result = reduce(&mut ctx, &x, goal);
    let elapsed = start.elapsed();
    debug!("reduction took {elapsed:?}");
    let mut report = ReductionReport::new(
        &ReductionInput {
            input: &input,
            lattice0: &lattice0,
            initial: &x,
            goal,
            mode: q.mode.into(),
            parametrisations,
            cover_sets: ctx.covers.iter().count(),
            validity_queries: ctx.validity_queries(),
            explored_configurations: ctx.explored_configurations(),
        },
        &result,
    );
    if timing {
        report.timing_ms = Some(elapsed.as_secs_f64() * 1e3);
    }
    emit(
        common.output,
        common.json.as_deref(),
        || report.to_text(&m.prn, &result),
        &report.to_json(),
    )?;
    Ok(0)
}

fn cmd_reach(common: &Common, q: &Query, reduce_first: bool, early_exit: bool) -> Result<u8> {
    let m = load(&common.model, common.format)?;
    let (x, goal) = initial_and_goal(&m, q.initial.as_deref(), q.goal.as_deref())?;
    let (lattice0, _) = starting_lattice(&m);
    let input = Dprn::unrestricted(m.prn.clone());
    let opts = SearchOptions {
        exhaustive: !early_exit,
        ..search_options(q)
    };
    let before = reachable(&input, &x, goal, &lattice0, opts);
    let after = reduce_first.then(|| {
        let mut ctx = ReductionContext::new(&input, lattice0.clone(), search_options(q));
        let result = reduce(&mut ctx, &x, goal);
        reachable(&result.dprn, &x, goal, &lattice0, opts)
    });
    let verdict = after.as_ref().map_or(before.verdict, |a| a.verdict);
    let report = ReachReport {
        goal: prnred::report::Assigned {
            component: m.prn.name(goal.component).to_string(),
            value: goal.value,
        },
        mode: mode_name(q.mode.into()).to_string(),
        unreduced: ReachSide::new(&m.prn, &before),
        reduced: after.as_ref().map(|a| ReachSide::new(&m.prn, a)),
    };
    emit(common.output, common.json.as_deref(), || report.to_text(), &report.to_json())?;
    Ok(match verdict {
        Verdict::Reached => 0,
        Verdict::Unreached => EXIT_UNREACHED,
        Verdict::Unknown => EXIT_UNKNOWN,
    })
}

fn cmd_cover(common: &Common, component: &str, change: &str) -> Result<u8> {
    let m = load(&common.model, common.format)?;
    let v = model::component(&m.prn, component)?;
    let (from, to) = change
        .split_once(':')
        .and_then(|(i, j)| Some((i.trim().parse().ok()?, j.trim().parse().ok()?)))
        .ok_or_else(|| anyhow!("expected a value change `i:j`, got `{change}`"))?;
    let change = ValueChange::new(v, from, to);
    if !change.is_valid(&m.prn) {
        return Err(anyhow!(
            "{from}:{to} is not a unit value change within 0..={} of `{component}`",
            m.prn.max(v)
        ));
    }
    let (lattice0, _) = starting_lattice(&m);
    let enabling = |w: &prnred_core::RegulatorState| enabled_by_lattice(&m.prn, &change.transition(w.clone()), &lattice0);
    let cs = compute_cover_set(&m.prn, change, enabling);
    let concrete = concrete_cover_set(&m.prn, change, enabling);
    let report = CoverReport::new(&m.prn, &cs, &concrete);
    emit(common.output, common.json.as_deref(), || report.to_text(&m.prn, &cs), &report.to_json())?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_oracle(
    model_path: Option<&Path>,
    format: Option<ModelFormat>,
    output: Output,
    json: Option<&Path>,
    initial: Option<&str>,
    goal: Option<&str>,
    max_len: usize,
    cap: u128,
) -> Result<u8> {
    let path = model_path.ok_or_else(|| anyhow!("a model file is required without --campaign"))?;
    let m = load(path, format)?;
    let (x, goal) = initial_and_goal(&m, initial, goal)?;
    let base = m.parametrisation_set(cap).map_err(|e| {
        anyhow!(
            "{e}; the explicit oracle cannot enumerate this model, use `reduce` or `reach`, which work on lattice bounds"
        )
    })?;
    let traces = enumerate_minimal_traces(&m.prn, &base, &x, goal, max_len);
    let report = OracleReport::new(&m.prn, goal, max_len, &traces);
    debug!("{}", traces.iter().map(|t| render::trace(&m.prn, t)).collect::<Vec<_>>().join("\n"));
    emit(output, json, || report.to_text(), &report.to_json())?;
    Ok(0)
}

fn cmd_campaign(output: Output, json: Option<&Path>, seed: u64, count: usize, max_len: usize) -> Result<u8> {
    let cfg = CampaignConfig {
        seed,
        count,
        max_len,
        ..CampaignConfig::default()
    };
    let report = run_campaign(&cfg);
    emit(output, json, || report.to_text(), &report.to_json())?;
    Ok(if report.violations == 0 && report.discrepancies == 0 { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Reduce { common, query, timing } => cmd_reduce(&common, &query, timing),
        Command::Reach {
            common,
            query,
            reduce,
            early_exit,
        } => cmd_reach(&common, &query, reduce == OnOff::On, early_exit),
        Command::Cover {
            common,
            component,
            change,
        } => cmd_cover(&common, &component, &change),
        Command::Oracle {
            model,
            format,
            output,
            json,
            initial,
            goal,
            max_len,
            cap,
            campaign,
            seed,
            count,
        } => {
            if campaign {
                cmd_campaign(output, json.as_deref(), seed, count, max_len)
            } else {
                cmd_oracle(
                    model.as_deref(),
                    format,
                    output,
                    json.as_deref(),
                    initial.as_deref(),
                    goal.as_deref(),
                    max_len,
                    cap,
                )
            }
        }
        Command::Convert { model: path, format, to } => {
            let format = format.map(|f| match f {
                ModelFormat::Text => Format::Text,
                ModelFormat::Json => Format::Json,
            });
            let file = model::read_model(&path, format)?;
            file.resolve()?;
            match to {
                ModelFormat::Text => print!("{}", model::print_text(&file)),
                ModelFormat::Json => print!("{}", model::to_json(&file)),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("PRNRED_LOG")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
