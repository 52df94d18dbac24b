//! Command-line front end: genealogy simulation runs, expected and Monte
//! Carlo site-frequency-spectrum tables, figure data series, and the
//! verification suite.
//!
//! Tabular output is CSV with a header row; verification reports are JSON.
//! Every command is deterministic given `--seed`: per-replicate random
//! streams derive from `(seed, command label, replicate index)`, so output
//! bytes are identical across reruns and independent of `--threads`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cppgen::forward::{sample_conditioned_genealogy, DEFAULT_MAX_ATTEMPTS};
use cppgen::model::{ExtendedReal, Genealogy, ModelParams, OriginCondition};
use cppgen::mutation::{
    compute_sfs, expected_sfs, expected_sfs_fixed, expected_sfs_quadrature, place_mutations,
    place_mutations_below, MutationEvent,
};
use cppgen::rng::map_replicates;
use cppgen::sampler::sample_genealogy;

/// Stream labels, one per command, so different commands never share
/// replicate streams for a given seed.
mod label {
    pub const SIMULATE: u64 = 0xC11_0001;
    pub const SFS_MC: u64 = 0xC11_0002;
}

#[derive(Parser)]
#[command(
    name = "cppgen",
    version,
    about = "Coalescent point processes of critical birth-death samples: \
             exact simulation, expected site frequency spectra, and \
             verification of the large-sample limit laws",
    after_help = "Determinism: identical (command, seed) pairs produce \
                  byte-identical output, regardless of --threads.\n\
                  Thread count falls back to the CPPGEN_THREADS environment \
                  variable when --threads is absent."
)]
struct Cli {
    /// Worker threads for replicate loops (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw genealogies; one CSV row per replicate with columns
    /// `replicate,origin,h1,...,h{n-1}` (17-significant-digit floats).
    Simulate(SimulateArgs),
    /// Site-frequency-spectrum tables: closed-form expectations
    /// (`k,expected_xi`) or Monte Carlo means (`k,mean_xi,se_xi`).
    Sfs(SfsArgs),
    /// Normalized expected-spectrum series behind the standard figures.
    Fig(FigArgs),
    /// Run the verification suite; prints one line per criterion, writes a
    /// JSON report, and exits nonzero if any criterion fails.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Sample size (number of individuals).
    #[arg(long)]
    n: u64,
    /// Per-lineage sampling rate.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Origin condition: `fixed:<t>`, `infinite`, or `prior:<i>`.
    #[arg(long)]
    origin: String,
    #[arg(long, default_value_t = 1)]
    replicates: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `exact` inverts the depth quantile functions; `forward` runs the
    /// population-level rejection sampler (fixed origin only).
    #[arg(long, value_enum, default_value_t = Engine::Exact)]
    engine: Engine,
    /// Population birth-death rate for the forward engine (requires p < N).
    #[arg(long = "N")]
    pop_rate: Option<f64>,
    /// Rejection budget per replicate for the forward engine.
    #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
    max_attempts: u64,
    /// Mutation rate; when set, mutation events are written to
    /// `--mutations-out` as `replicate,branch,time` rows.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, requires = "theta")]
    mutations_out: Option<PathBuf>,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SfsArgs {
    #[arg(long, value_enum)]
    mode: SfsMode,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Origin condition `fixed:<t>` or `infinite` (alternative to --prior).
    #[arg(long, conflicts_with = "prior")]
    origin: Option<String>,
    /// Power-prior exponent i (0 = uniform, 1 = log-uniform).
    #[arg(long)]
    prior: Option<u64>,
    #[arg(long, default_value_t = 10_000)]
    replicates: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Backwards-time cutoff for Monte Carlo under an infinite origin;
    /// mutations above it are discarded (diagnostic only).
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FigArgs {
    /// `spt`: fixed-origin series over tau in {1,10,100,1000};
    /// `spp`: prior series for i in {0,1}.
    #[arg(long, value_enum)]
    figure: Figure,
    #[arg(long, default_value_t = 10)]
    n: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run only the deterministic (closed-form/quadrature) criteria.
    #[arg(long)]
    quick: bool,
    /// Path for the JSON report (stdout lines are always printed).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Exact,
    Forward,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SfsMode {
    Expected,
    Mc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Figure {
    Spt,
    Spp,
}

fn main() {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| std::env::var("CPPGEN_THREADS").ok().and_then(|v| v.parse().ok()));
    if let Some(threads) = threads {
        cppgen::rng::configure_threads(threads);
    }
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Simulate(args) => cmd_simulate(args).map(|()| 0),
        Command::Sfs(args) => cmd_sfs(args).map(|()| 0),
        Command::Fig(args) => cmd_fig(args).map(|()| 0),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn parse_origin(text: &str) -> Result<OriginCondition> {
    if text == "infinite" {
        return Ok(OriginCondition::InfiniteTime);
    }
    if let Some(t) = text.strip_prefix("fixed:") {
        let t: f64 = t.parse().with_context(|| format!("bad origin time in `{text}`"))?;
        return Ok(OriginCondition::FixedTime(t));
    }
    if let Some(i) = text.strip_prefix("prior:") {
        let i: u64 = i.parse().with_context(|| format!("bad prior exponent in `{text}`"))?;
        return Ok(OriginCondition::PowerPrior(i));
    }
    bail!("origin must be `fixed:<t>`, `infinite`, or `prior:<i>`, got `{text}`")
}

/// 17 significant digits: round-trips f64 exactly.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_origin(origin: &ExtendedReal) -> String {
    match origin {
        ExtendedReal::Finite(t) => fmt(*t),
        ExtendedReal::Infinite => "inf".into(),
    }
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(path) => {
            let file = File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

fn check_replicates(replicates: u64) -> Result<()> {
    if replicates == 0 {
        bail!("--replicates must be at least 1");
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    check_replicates(args.replicates)?;
    let origin = parse_origin(&args.origin)?;
    origin.validate(args.n).map_err(|e| anyhow!(e))?;
    let theta = args.theta.unwrap_or(0.0);
    let pop_rate = args.pop_rate.unwrap_or(2.0 * args.p);
    let params =
        ModelParams::new(args.n, args.p, theta, pop_rate, 1.0).map_err(|e| anyhow!(e))?;

    if args.engine == Engine::Forward {
        params.validate_forward().map_err(|e| anyhow!(e))?;
        if args.pop_rate.is_none() {
            bail!("the forward engine requires --N (population rate)");
        }
        if !matches!(origin, OriginCondition::FixedTime(_)) {
            bail!("the forward engine supports only `--origin fixed:<t>`");
        }
    }

    let max_attempts = args.max_attempts;
    let rows: Vec<(Genealogy, Vec<MutationEvent>)> =
        map_replicates(args.seed, label::SIMULATE, args.replicates, |_, rng| {
            let genealogy = match (args.engine, &origin) {
                (Engine::Exact, _) => {
                    sample_genealogy(&params, &origin, rng).expect("validated parameters")
                }
                (Engine::Forward, OriginCondition::FixedTime(t)) => {
                    sample_conditioned_genealogy(pop_rate, args.p, *t, args.n, rng, max_attempts)
                        .expect("acceptance budget")
                        .0
                }
                _ => unreachable!("rejected above"),
            };
            let events = if args.theta.is_some() {
                place_mutations(&genealogy, theta, rng).expect("validated rate").events
            } else {
                Vec::new()
            };
            (genealogy, events)
        });

    let mut out = open_out(&args.out)?;
    let header: Vec<String> = ["replicate".into(), "origin".into()]
        .into_iter()
        .chain((1..args.n).map(|k| format!("h{k}")))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for (replicate, (genealogy, _)) in rows.iter().enumerate() {
        let mut fields = vec![replicate.to_string(), fmt_origin(&genealogy.origin)];
        fields.extend(genealogy.depths.iter().map(|&d| fmt(d)));
        writeln!(out, "{}", fields.join(","))?;
    }
    out.flush()?;

    if let Some(path) = &args.mutations_out {
        let mut mut_out = open_out(&Some(path.clone()))?;
        writeln!(mut_out, "replicate,branch,time")?;
        for (replicate, (_, events)) in rows.iter().enumerate() {
            for ev in events {
                writeln!(mut_out, "{replicate},{},{}", ev.branch, fmt(ev.time))?;
            }
        }
        mut_out.flush()?;
    }
    Ok(())
}

fn cmd_sfs(args: SfsArgs) -> Result<()> {
    let regime = match (&args.origin, args.prior) {
        (Some(origin), None) => {
            let parsed = parse_origin(origin)?;
            if matches!(parsed, OriginCondition::PowerPrior(_)) {
                bail!("use --prior <i> for power priors");
            }
            parsed
        }
        (None, Some(i)) => OriginCondition::PowerPrior(i),
        (None, None) => bail!("one of --origin or --prior is required"),
        (Some(_), Some(_)) => unreachable!("clap conflict"),
    };
    regime.validate(args.n).map_err(|e| anyhow!(e))?;
    let mut out = open_out(&args.out)?;
    match args.mode {
        SfsMode::Expected => write_expected_sfs(&mut out, &regime, &args)?,
        SfsMode::Mc => write_mc_sfs(&mut out, &regime, &args)?,
    }
    out.flush()?;
    Ok(())
}

fn write_expected_sfs(out: &mut dyn Write, regime: &OriginCondition, args: &SfsArgs) -> Result<()> {
    // priors above the log-uniform have no closed form; note the fallback
    if let OriginCondition::PowerPrior(i) = regime {
        if *i >= 2 {
            writeln!(
                out,
                "# prior {i}: no closed form; values from posterior-mixture quadrature"
            )?;
        }
    }
    writeln!(out, "k,expected_xi")?;
    for k in 1..args.n {
        let value = match regime {
            OriginCondition::PowerPrior(i) if *i >= 2 => ExtendedReal::Finite(
                expected_sfs_quadrature(*i, args.n, k, args.theta, args.p)
                    .map_err(|e| anyhow!(e))?,
            ),
            _ => expected_sfs(regime, args.n, k, args.theta, args.p).map_err(|e| anyhow!(e))?,
        };
        let text = match value {
            ExtendedReal::Finite(v) => fmt(v),
            ExtendedReal::Infinite => "inf".into(),
        };
        writeln!(out, "{k},{text}")?;
    }
    Ok(())
}

fn write_mc_sfs(out: &mut dyn Write, regime: &OriginCondition, args: &SfsArgs) -> Result<()> {
    check_replicates(args.replicates)?;
    let horizon = match regime {
        OriginCondition::InfiniteTime => {
            let horizon = args.horizon.ok_or_else(|| {
                anyhow!(
                    "Monte Carlo under an infinite origin needs --horizon: the untruncated \
                     spectrum has infinite expectation"
                )
            })?;
            writeln!(
                out,
                "# diagnostic: infinite origin; mutations truncated below horizon={} \
                 (origin branch included up to the horizon)",
                fmt(horizon)
            )?;
            Some(horizon)
        }
        _ => args.horizon,
    };
    let params = ModelParams::new(args.n, args.p, args.theta, 2.0 * args.p, 1.0)
        .map_err(|e| anyhow!(e))?;
    let regime = *regime;
    let theta = args.theta;
    let spectra: Vec<Vec<u64>> =
        map_replicates(args.seed, label::SFS_MC, args.replicates, move |_, rng| {
            let g = sample_genealogy(&params, &regime, rng).expect("validated parameters");
            let set = match horizon {
                Some(h) => place_mutations_below(&g, theta, h, rng),
                None => place_mutations(&g, theta, rng),
            }
            .expect("validated rate");
            compute_sfs(&g, &set.events).xi
        });
    writeln!(out, "k,mean_xi,se_xi")?;
    let reps = args.replicates as f64;
    for k in 1..args.n {
        let values = spectra.iter().map(|xi| xi[(k - 1) as usize] as f64);
        let mean = values.clone().sum::<f64>() / reps;
        let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / reps;
        let se = (var / reps).sqrt();
        writeln!(out, "{k},{},{}", fmt(mean), fmt(se))?;
    }
    Ok(())
}

fn cmd_fig(args: FigArgs) -> Result<()> {
    let n = args.n;
    if n < 2 {
        bail!("figure series need n >= 2");
    }
    let mut out = open_out(&args.out)?;
    match args.figure {
        Figure::Spt => {
            let taus = [1.0, 10.0, 100.0, 1000.0];
            let mut series = Vec::new();
            for &tau in &taus {
                let values: Vec<f64> = (1..n)
                    .map(|k| expected_sfs_fixed(n, k, 1.0, 1.0, tau))
                    .collect::<Result<_, _>>()
                    .map_err(|e| anyhow!(e))?;
                let total: f64 = values.iter().sum();
                series.push(values.into_iter().map(|v| v / total).collect::<Vec<f64>>());
            }
            writeln!(out, "k,tau_1,tau_10,tau_100,tau_1000,reference")?;
            let reference = 1.0 / (n as f64 - 1.0);
            for k in 1..n {
                let idx = (k - 1) as usize;
                writeln!(
                    out,
                    "{k},{},{},{},{},{}",
                    fmt(series[0][idx]),
                    fmt(series[1][idx]),
                    fmt(series[2][idx]),
                    fmt(series[3][idx]),
                    fmt(reference)
                )?;
            }
        }
        Figure::Spp => {
            let mut series = Vec::new();
            for i in [0u64, 1] {
                let values: Vec<f64> = (1..n)
                    .map(|k| {
                        expected_sfs(&OriginCondition::PowerPrior(i), n, k, 1.0, 1.0)
                            .map(|v| v.value().expect("finite under power priors"))
                    })
                    .collect::<Result<_, _>>()
                    .map_err(|e| anyhow!(e))?;
                let total: f64 = values.iter().sum();
                series.push(values.into_iter().map(|v| v / total).collect::<Vec<f64>>());
            }
            writeln!(out, "k,prior_0,prior_1")?;
            for k in 1..n {
                let idx = (k - 1) as usize;
                writeln!(out, "{k},{},{}", fmt(series[0][idx]), fmt(series[1][idx]))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let report = cppgen::verify::run(args.seed, args.quick);
    for outcome in &report.criteria {
        println!("{}", outcome.format_line());
    }
    println!(
        "{}: {} of {} criteria passed (seed {})",
        if report.all_pass { "OK" } else { "FAILED" },
        report.criteria.iter().filter(|c| c.pass).count(),
        report.criteria.len(),
        report.seed
    );
    let json = serde_json::to_string_pretty(&report)?;
    match &args.out {
        Some(path) => {
            std::fs::write(path, json.as_bytes())
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => println!("{json}"),
    }
    Ok(if report.all_pass { 0 } else { 1 })
}
