use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use geocascade::io::{self, ConfigDoc, RunManifest};
use geocascade::{energy, montecarlo, smallworld, Error};

#[derive(Parser)]
#[command(name = "geocascade", version, about = "Threshold cascades on geometric sensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replicated experiments over a one- or two-axis parameter grid.
    Sweep(Common),
    /// One cascade (replicate 0), optionally exporting snapshots.
    Run {
        #[command(flatten)]
        common: Common,
        /// Time steps to export, e.g. `0,80,170`.
        #[arg(long, value_delimiter = ',')]
        snapshots: Vec<usize>,
    },
    /// Window edges per threshold and the upper-boundary scaling fit.
    Transition(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `master_seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for all cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::InvalidParameter { .. } => 2,
        Error::Io(_) => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("geocascade: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load(common: &Common) -> Result<ConfigDoc, Error> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", common.config.display())))?;
    let mut doc = io::parse_config(&text)?;
    if let Some(seed) = common.seed {
        doc.base_mut().master_seed = seed;
    }
    if let Some(k) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Error::invalid("threads", e.to_string()))?;
    }
    Ok(doc)
}

fn emit(out: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), Error> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            io::write_file(path, |w| body(w))?
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn sweep_spec(doc: ConfigDoc, command: &str) -> Result<montecarlo::SweepSpec, Error> {
    match doc {
        ConfigDoc::Sweep(spec) => Ok(spec),
        ConfigDoc::Experiment(_) => Err(Error::invalid("sweep", format!("`{command}` needs a [sweep] section"))),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let started = Instant::now();
    match cli.command {
        Command::Sweep(common) => {
            let spec = sweep_spec(load(&common)?, "sweep")?;
            let rows = montecarlo::sweep(&spec)?;
            let mut manifest = RunManifest::new("sweep", &spec.base).with_axes(&spec);
            manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
            emit(common.out.as_deref(), |w| io::emit_sweep_csv(&rows, &manifest, w))
        }
        Command::Transition(common) => {
            let spec = sweep_spec(load(&common)?, "transition")?;
            let rows = montecarlo::sweep(&spec)?;
            let (edges, slope) = montecarlo::transition_analysis(&spec, &rows)?;
            let mut manifest = RunManifest::new("transition", &spec.base).with_axes(&spec);
            if let Err(e) = &slope {
                manifest.notes.push(("slope_error".into(), e.to_string()));
            }
            manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
            emit(common.out.as_deref(), |w| io::emit_transition_csv(&edges, slope.ok(), &manifest, w))
        }
        Command::Run { common, snapshots } => {
            let cfg = load(&common)?.base().clone();
            cfg.validate()?;
            let (net, outcome) = cfg.replicate(0)?;
            let report = energy::account_cascade(&net, &outcome, &cfg.energy_model()?);
            let d_bar = smallworld::mean_long_range_length(&net).ok();

            let stem = common.out.as_deref().unwrap_or(Path::new("geocascade"));
            if let Some(dir) = stem.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            for &t in &snapshots {
                let path = snapshot_path(stem, t);
                io::export_snapshot_file(&net, &outcome.active_at(t), t, &path)?;
                log::info!("wrote {}", path.display());
            }

            let mut manifest = RunManifest::new("run", &cfg);
            manifest.rows = 1;
            manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
            let mut row = String::new();
            write!(
                row,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                outcome.final_fraction,
                outcome.active_count,
                outcome.time,
                outcome.time_to_cutoff.map(|t| t.to_string()).unwrap_or_default(),
                u8::from(outcome.is_global),
                u8::from(outcome.stalled),
                net.long_links().len(),
                d_bar.map(|d| d.to_string()).unwrap_or_default(),
                report.e_local,
                report.e_long,
                report.e_total,
                report.e_predicted,
            )
            .unwrap();
            emit(common.out.as_deref(), |w| {
                manifest.write(w)?;
                writeln!(w, "{RUN_HEADER}")?;
                writeln!(w, "{row}")
            })
        }
    }
}

const RUN_HEADER: &str =
    "final_fraction,active_count,time,time_to_cutoff,is_global,stalled,long_links,d_bar,e_local,e_long,e_total,e_predicted";

/// `out/run.csv` with `t = 80` becomes `out/run.snapshot_t80.csv`.
fn snapshot_path(out: &Path, t: usize) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "geocascade".into());
    out.with_file_name(format!("{stem}.snapshot_t{t}.csv"))
}
