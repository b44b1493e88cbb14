use clap::{Args, Parser, Subcommand, ValueEnum};
use irmlab::chain::{build_variance_profile, ProfileSpec};
use irmlab::diagrams::{catalog_diagram, validate_diagram, Diagram};
use irmlab::experiments::{emit_plot_data, parse_config, run, Kind, PlotKind, DEFAULT_OUT};
use irmlab::output::{digest_of, write_atomic};
use irmlab::special::{bessel_i, skellam_kernel, ReferenceLaw, Side, StableLaw};
use irmlab::Error;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "irmlab", version, about = "Inhomogeneous random matrix laboratory")]
struct Cli {
    /// Experiment or profile JSON.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a variance profile from --config and write its kernel CSV.
    Profile,
    /// Evaluate a special function.
    Special(SpecialArgs),
    /// Local limit residual of a band profile.
    Lclt,
    /// Comparison diagnostics for two chains, optionally with Monte Carlo moments.
    Compare,
    /// Run a diagram config, or validate a diagram with --validate.
    Diagram(DiagramArgs),
    /// Simulate top-eigenvalue samples for an ensemble.
    EdgeSim,
    /// Block-kernel transition probabilities against the Skellam kernel.
    Wegner,
    /// Alternating-walk distribution for a Hankel profile.
    Hankel,
    /// Run a (W, a) grid and write the summary and phase table.
    Sweep,
    /// Export plot data for an artifact digest found under --out.
    Emit(EmitArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SpecialFn {
    StableDensity,
    Theta,
    Skellam,
    BesselI,
    Cdf,
}

#[derive(Args)]
struct SpecialArgs {
    #[arg(value_enum)]
    function: SpecialFn,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Integer displacement or Bessel order.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    k: i64,
    /// Torus side for the periodic Skellam kernel.
    #[arg(long)]
    side: Option<u64>,
    /// Gumbel, TW1 or TW2.
    #[arg(long, default_value = "TW1")]
    law: String,
}

#[derive(Args)]
struct DiagramArgs {
    /// Diagram JSON file, or a catalog name, to validate only.
    #[arg(long)]
    validate: Option<String>,
}

#[derive(Args)]
struct EmitArgs {
    #[arg(long)]
    digest: String,
    /// histogram, cdf, ipr-profile or phase-table.
    #[arg(long)]
    kind: String,
}

fn config_text(cli: &Cli) -> Result<String, Error> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Missing("--config".into()))?;
    Ok(std::fs::read_to_string(path)?)
}

fn with_overrides(cli: &Cli, text: &str) -> Result<String, Error> {
    let mut v: Value = serde_json::from_str(text)?;
    if let Value::Object(map) = &mut v {
        if let Some(seed) = cli.seed {
            map.insert("seed".into(), json!(seed));
        }
        if let Some(out) = &cli.out {
            map.insert("out".into(), json!(out.to_string_lossy()));
        }
    }
    Ok(serde_json::to_string(&v)?)
}

fn run_kind(cli: &Cli, kind: Kind) -> Result<Value, Error> {
    let cfg = parse_config(&with_overrides(cli, &config_text(cli)?)?)?;
    if cfg.kind() != kind {
        return Err(Error::Config {
            path: "kind".into(),
            message: format!("subcommand `{}` got a `{}` config", kind.name(), cfg.kind().name()),
        });
    }
    Ok(serde_json::to_value(run(&cfg)?)?)
}

fn run_profile(cli: &Cli) -> Result<Value, Error> {
    let spec = ProfileSpec::from_json(&config_text(cli)?)?;
    let chain = build_variance_profile(&spec)?;
    let digest = digest_of(&spec);
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let path = dir.join(format!("profile-{digest}.csv"));
    write_atomic(&path, chain.to_csv().as_bytes())?;
    Ok(json!({
        "digest": digest,
        "states": chain.states,
        "max_entry": chain.max_entry(),
        "translation_invariant": chain.is_translation_invariant(),
        "stability_index": spec.stability_index(),
        "file": path,
    }))
}

fn run_special(a: &SpecialArgs) -> Result<Value, Error> {
    let value = match a.function {
        SpecialFn::StableDensity => StableLaw::standard(a.alpha)?.density(a.x, a.tau)?,
        SpecialFn::Theta => StableLaw::standard(a.alpha)?.theta(a.x, a.tau)?,
        SpecialFn::Skellam => {
            let side = a.side.map_or(Side::Infinite, Side::Finite);
            skellam_kernel(1, side, &[a.k], a.tau)?
        }
        SpecialFn::BesselI => {
            let nu = u32::try_from(a.k)
                .map_err(|_| Error::Config { path: "k".into(), message: "order must be ≥ 0".into() })?;
            bessel_i(nu, a.x)
        }
        SpecialFn::Cdf => {
            let law: ReferenceLaw = serde_json::from_value(json!(a.law))
                .map_err(|_| Error::Config { path: "law".into(), message: format!("unknown law `{}`", a.law) })?;
            let c = law.cdf(a.x);
            return Ok(json!({ "law": law.name(), "x": a.x, "cdf": c.p, "clamped": c.clamped }));
        }
    };
    Ok(json!({ "value": value }))
}

fn run_diagram_cmd(cli: &Cli, a: &DiagramArgs) -> Result<Value, Error> {
    let Some(src) = &a.validate else {
        return run_kind(cli, Kind::Diagram);
    };
    let g = match std::fs::read_to_string(src) {
        Ok(text) => Diagram::from_json(&text)?,
        Err(_) => catalog_diagram(src)?,
    };
    Ok(serde_json::to_value(validate_diagram(&g))?)
}

fn run_emit(cli: &Cli, a: &EmitArgs) -> Result<Value, Error> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let kind: PlotKind = a.kind.parse()?;
    let files = emit_plot_data(&dir, &a.digest, kind)?;
    Ok(json!({ "files": files }))
}

fn dispatch(cli: &Cli) -> Result<Value, Error> {
    match &cli.command {
        Command::Profile => run_profile(cli),
        Command::Special(a) => run_special(a),
        Command::Lclt => run_kind(cli, Kind::Lclt),
        Command::Compare => run_kind(cli, Kind::Compare),
        Command::Diagram(a) => run_diagram_cmd(cli, a),
        Command::EdgeSim => run_kind(cli, Kind::EdgeSim),
        Command::Wegner => run_kind(cli, Kind::Wegner),
        Command::Hankel => run_kind(cli, Kind::Hankel),
        Command::Sweep => run_kind(cli, Kind::Sweep),
        Command::Emit(a) => run_emit(cli, a),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Budget { .. } => 3,
        e if e.is_validation() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(&cli) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("report serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
