//! `qus`: simulate → envelope → parametric maps → fractal features →
//! naive Bayes evaluation.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

#[derive(Parser, Debug)]
#[command(
    name = "qus",
    version,
    about = "Ultrasound envelope statistics and fractal texture classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config file of section.key=value lines
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Model kinds, comma separated (rayleigh, rician, k, nakagami, nig)
    #[arg(long, global = true)]
    model: Option<String>,

    /// Estimation window HxW or HxW/STRIDE
    #[arg(long, global = true)]
    window: Option<String>,

    /// Wavelet-packet depth
    #[arg(long, global = true)]
    depth: Option<String>,

    /// Subband basis: full or best
    #[arg(long, global = true)]
    basis: Option<String>,

    /// Cross-validation schemes, comma separated (logo, kfold)
    #[arg(long, global = true)]
    cv: Option<String>,

    /// Fold counts for kfold, comma separated
    #[arg(long, global = true)]
    k: Option<String>,

    /// k-fold repeats
    #[arg(long, global = true)]
    repeats: Option<String>,

    /// Seed for simulation and cross-validation
    #[arg(long, global = true)]
    seed: Option<String>,

    /// Input directory
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,

    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<String>,

    /// Also write every parametric map
    #[arg(long, global = true)]
    save_maps: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Write a labelled two-class phantom dataset
    Simulate,
    /// Envelope-detect RF frames
    Envelope,
    /// Parametric maps and fractal feature tables
    Features,
    /// Cross-validated classification reports
    Evaluate,
    /// simulate, envelope, features and evaluate under one output directory
    All,
}

const EXIT_PARTIAL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

impl Cli {
    fn settings(&self) -> anyhow::Result<BTreeMap<String, String>> {
        let mut s = match &self.config {
            Some(p) => config::parse_file(p)?,
            None => BTreeMap::new(),
        };
        let mut set = |k: &str, v: &Option<String>| {
            if let Some(v) = v {
                s.insert(k.to_string(), v.clone());
            }
        };
        set("pipeline.model", &self.model);
        set("pipeline.window", &self.window);
        set("pipeline.depth", &self.depth);
        set("pipeline.basis", &self.basis);
        set("pipeline.threads", &self.threads);
        set("cv.scheme", &self.cv);
        set("cv.k", &self.k);
        set("cv.repeats", &self.repeats);
        set("cv.seed", &self.seed);
        set("simulate.seed", &self.seed);
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        set("io.in", &path(&self.input));
        set("io.out", &path(&self.out));
        if self.save_maps {
            s.insert("pipeline.save_maps".into(), "true".into());
        }
        Ok(s)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let cfg = match cli.settings().and_then(|s| config::resolve(&s)) {
        Ok(c) => c,
        Err(e) => {
            error!("configuration: {e:#}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            error!("thread pool: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let dirs = || -> anyhow::Result<(PathBuf, PathBuf)> {
        Ok((cfg.input_dir()?.to_path_buf(), cfg.output_dir()?.to_path_buf()))
    };
    let result = match cli.command {
        Command::Simulate => cfg
            .output_dir()
            .map(|o| o.to_path_buf())
            .and_then(|o| commands::simulate(&cfg, &o)),
        Command::All => cfg
            .output_dir()
            .map(|o| o.to_path_buf())
            .and_then(|o| commands::all(&cfg, &o)),
        Command::Envelope | Command::Features | Command::Evaluate => match dirs() {
            Err(e) => {
                error!("configuration: {e:#}");
                return ExitCode::from(EXIT_CONFIG);
            }
            Ok((i, o)) => match cli.command {
                Command::Envelope => commands::envelope(&cfg, &i, &o),
                Command::Features => commands::features(&cfg, &i, &o),
                _ => commands::evaluate(&cfg, &i, &o),
            },
        },
    };
    match result {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            error!("{n} input(s) failed");
            ExitCode::from(EXIT_PARTIAL)
        }
        Err(e) => {
            error!("{e:#}");
            ExitCode::from(EXIT_PARTIAL)
        }
    }
}
