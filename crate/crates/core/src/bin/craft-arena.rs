use clap::{Args, Parser, Subcommand};
use craft_arena::eval::EnvKind;
use craft_arena::harness::{cmd_collect, cmd_eval, cmd_replay, cmd_report, cmd_train, to_text, ExperimentConfig};
use craft_arena::{Error, Result};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "craft-arena", version, about = "Multi-robot construction arena: training, deployment and reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment TOML; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run this single seed instead of the configured list.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    env: Option<EnvKind>,
    #[arg(long)]
    episodes: Option<usize>,
    /// Output directory; overrides `out` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Train every seed; writes checkpoints, metrics and final.ckpt.
    Train(Common),
    /// Greedy success rate of trained checkpoints.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Evaluate this checkpoint instead of <out>/seed-<s>/final.ckpt.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Asynchronous deployment rollouts and harvested start states.
    Collect {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Print a trajectory file as text frames.
    Replay {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        file: PathBuf,
        /// Frames per second; 0 prints everything at once.
        #[arg(long, default_value_t = 0.0)]
        speed: f64,
    },
    /// Aggregate eval tables found under the output directory.
    Report(Common),
}

struct Resolved {
    cfg: ExperimentConfig,
    seeds: Vec<u64>,
    out: PathBuf,
}

fn resolve(c: &Common) -> Result<Resolved> {
    let mut cfg = match &c.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(n) = c.episodes {
        cfg.eval_episodes = n;
    }
    let seeds = c.seed.map_or_else(|| cfg.seeds.clone(), |s| vec![s]);
    let out = c.out.clone().unwrap_or_else(|| cfg.out.clone());
    Ok(Resolved { cfg, seeds, out })
}

fn usage(msg: &str) -> Error {
    Error::Usage(msg.to_string())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(c) => {
            if c.env == Some(EnvKind::Async) {
                return Err(usage("training runs in the synchronous simulator; drop --env async"));
            }
            let r = resolve(&c)?;
            for path in cmd_train(&r.cfg, &r.seeds, &r.out)? {
                println!("{}", path.display());
            }
        }
        Command::Eval { common, checkpoint } => {
            let r = resolve(&common)?;
            let envs = common.env.map_or(vec![EnvKind::Sync, EnvKind::Async], |e| vec![e]);
            let mut rows = Vec::new();
            for env in envs {
                rows.push(cmd_eval(&r.cfg, &r.seeds, env, r.cfg.eval_episodes, &r.out, checkpoint.as_deref())?);
            }
            print!("{}", to_text(&rows));
        }
        Command::Collect { common, checkpoint } => {
            if common.env == Some(EnvKind::Sync) {
                return Err(usage("collection runs in the asynchronous simulator; drop --env sync"));
            }
            let mut r = resolve(&common)?;
            let episodes = common.episodes.unwrap_or(r.cfg.method.collect_episodes);
            r.cfg.method.collect_episodes = episodes;
            for &seed in &r.seeds {
                let c = cmd_collect(&r.cfg, seed, episodes, &r.out, checkpoint.as_deref())?;
                println!("{}\t{}\t{}", c.trajectories.display(), c.start_states.display(), c.n_states);
            }
        }
        Command::Replay { common, file, speed } => {
            if !(speed >= 0.0 && speed.is_finite()) {
                return Err(usage("--speed must be a finite non-negative number"));
            }
            match &common.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    let mut f = std::fs::File::create(dir.join(replay_name(&file)))?;
                    cmd_replay(&file, 0.0, &mut f)?;
                }
                None => {
                    cmd_replay(&file, speed, &mut std::io::stdout().lock())?;
                }
            }
        }
        Command::Report(c) => {
            let r = resolve(&c)?;
            print!("{}", cmd_report(&r.out)?);
        }
    }
    Ok(())
}

fn replay_name(file: &Path) -> String {
    let stem = file.file_stem().and_then(|s| s.to_str()).unwrap_or("trajectories");
    format!("{stem}.replay.txt")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("bad arguments").trim_start_matches("error: ");
            eprintln!("error: usage: {first}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {}: {msg}", e.category());
            ExitCode::FAILURE
        }
    }
}
