//! Benchmark CLI: runs prediction experiments from presets or flat config
//! files and dumps raw benchmark series.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use neofuzzy::harness::{run_experiment, ExperimentConfig, Preset};
use neofuzzy::signals::write_series_csv;

#[derive(Parser)]
#[command(
    name = "neofuzzy",
    version,
    about = "Neo-fuzzy neuron benchmark runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a preset name or a config-file path.
    Run(Box<RunArgs>),
    /// Generate a benchmark series and write it as CSV.
    Gen(GenArgs),
    /// List the built-in experiment presets.
    LsPresets,
}

#[derive(Args)]
struct RunArgs {
    /// Preset name (see `ls-presets`) or path to a flat config file.
    experiment: String,

    /// Output directory for table.csv, table.txt, trace.csv, config.echo.
    #[arg(long, default_value = "results")]
    out: PathBuf,

    /// Inference orders to sweep, e.g. `--p-sweep 0,1,2`.
    #[arg(long, value_delimiter = ',')]
    p_sweep: Option<Vec<usize>>,

    /// Uniform membership centers per input.
    #[arg(long)]
    h: Option<usize>,

    /// Smoothing parameter of the adaptive learning rule.
    #[arg(long)]
    alpha: Option<f64>,

    /// Membership family: `triangular` or `bspline`.
    #[arg(long)]
    membership: Option<String>,

    /// B-spline order (used with `--membership bspline`).
    #[arg(long)]
    q: Option<usize>,

    /// Series length override.
    #[arg(long)]
    n_points: Option<usize>,

    /// Lags on the target series, e.g. `--lags 3,2,1,0`.
    #[arg(long, value_delimiter = ',')]
    lags: Option<Vec<usize>>,

    /// Lags on the exogenous channel (narendra2 only).
    #[arg(long, value_delimiter = ',')]
    exo_lags: Option<Vec<usize>>,

    /// Prediction horizon.
    #[arg(long)]
    horizon: Option<usize>,

    /// Training pairs adapted online from the start of the dataset.
    #[arg(long)]
    train_len: Option<usize>,

    /// Frozen test pairs after the training prefix (default: the rest).
    #[arg(long)]
    test_len: Option<usize>,

    /// Delay of the chaotic generator (mackey-glass only).
    #[arg(long)]
    tau: Option<f64>,

    /// Integration step (mackey-glass only).
    #[arg(long)]
    dt: Option<f64>,

    /// Initial condition (narendra3/narendra4 only).
    #[arg(long)]
    y0: Option<f64>,

    /// Additive forcing variant (narendra3/narendra4 only).
    #[arg(long)]
    additive_variant: Option<bool>,
}

#[derive(Args)]
struct GenArgs {
    /// Preset whose signal to generate.
    preset: String,

    /// Output CSV file.
    #[arg(long)]
    out: PathBuf,

    /// Series length override.
    #[arg(long)]
    n_points: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(*args),
        Command::Gen(args) => cmd_gen(args),
        Command::LsPresets => cmd_ls_presets(),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let base = if let Some(preset) = Preset::from_name(&args.experiment) {
        preset.config().echo()
    } else {
        let path = Path::new(&args.experiment);
        if !path.is_file() {
            bail!(
                "`{}` is neither a preset ({}) nor a config file",
                args.experiment,
                Preset::ALL.map(|p| p.name()).join(", ")
            );
        }
        std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?
    };

    // Flags use the same keys as the config format; appending them makes
    // the CLI override the file, with all validation in one place.
    let mut text = base;
    let mut push = |key: &str, value: String| {
        let _ = writeln!(text, "{key} = {value}");
    };
    if let Some(v) = &args.p_sweep {
        push("p_sweep", join_nums(v));
    }
    if let Some(v) = args.h {
        push("h", v.to_string());
    }
    if let Some(v) = args.alpha {
        push("alpha", v.to_string());
    }
    if let Some(v) = &args.membership {
        push("membership", v.clone());
    }
    if let Some(v) = args.q {
        push("q", v.to_string());
    }
    if let Some(v) = args.n_points {
        push("n_points", v.to_string());
    }
    if let Some(v) = &args.lags {
        push("lags", join_nums(v));
    }
    if let Some(v) = &args.exo_lags {
        push("exo_lags", join_nums(v));
    }
    if let Some(v) = args.horizon {
        push("horizon", v.to_string());
    }
    if let Some(v) = args.train_len {
        push("train_len", v.to_string());
    }
    if let Some(v) = args.test_len {
        push("test_len", v.to_string());
    }
    if let Some(v) = args.tau {
        push("tau", v.to_string());
    }
    if let Some(v) = args.dt {
        push("dt", v.to_string());
    }
    if let Some(v) = args.y0 {
        push("y0", v.to_string());
    }
    if let Some(v) = args.additive_variant {
        push("additive_variant", v.to_string());
    }

    let config = ExperimentConfig::parse(&text).context("resolving experiment config")?;
    let report = run_experiment(&config).context("running experiment")?;
    report
        .write_outputs(&args.out)
        .with_context(|| format!("writing outputs to {}", args.out.display()))?;

    print!("{}", report.table_txt());
    println!(
        "trace: p = {} ({} test steps)",
        report.trace_p,
        report.trace.len()
    );
    println!(
        "wrote table.csv, table.txt, trace.csv, config.echo to {} in {:?}",
        args.out.display(),
        report.duration
    );
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let preset = Preset::from_name(&args.preset).with_context(|| {
        format!(
            "unknown preset `{}` (one of: {})",
            args.preset,
            Preset::ALL.map(|p| p.name()).join(", ")
        )
    })?;
    let mut signal = preset.config().signal;
    if let Some(n) = args.n_points {
        signal.set_n_points(n);
    }
    let generated = signal.generate().context("generating series")?;
    if let Some(dir) = args.out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let file = std::fs::File::create(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    write_series_csv(
        std::io::BufWriter::new(file),
        &generated.values,
        generated.exogenous.as_deref(),
    )?;
    println!(
        "wrote {} points of `{}` to {}",
        generated.values.len(),
        signal.name(),
        args.out.display()
    );
    Ok(())
}

fn cmd_ls_presets() -> Result<()> {
    for preset in Preset::ALL {
        println!("{:<14} {}", preset.name(), preset.describe());
    }
    Ok(())
}

fn join_nums(nums: &[usize]) -> String {
    nums.iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
