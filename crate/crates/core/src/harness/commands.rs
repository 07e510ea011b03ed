use super::config::ExperimentConfig;
use super::render::render_all;
use super::report::{make_report, parse_tsv, to_tsv, ResultRow};
use crate::arena::{read_trajectories, write_trajectory};
use crate::error::{Error, Result};
use crate::eval::{evaluate, EnvKind, EvalSettings};
use crate::nn::{load_team_params, save_team_params, PolicyParams};
use crate::oodsi::{build_start_state_set, collect_ood_trajectories, oodsi_pipeline, CollectSettings};
use crate::train::net_shape;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Seed offset of evaluation episodes; training and evaluation never share
/// start states.
pub const EVAL_SEED_OFFSET: u64 = 1_000_000;

fn load_checkpoint(cfg: &ExperimentConfig, path: &Path) -> Result<Vec<PolicyParams>> {
    let task = cfg.task_spec()?;
    load_team_params(path, task.n_teams(), Some(net_shape(&task, &cfg.ppo)))
}

fn checkpoint_for(cfg: &ExperimentConfig, out: &Path, seed: u64, given: Option<&Path>) -> PathBuf {
    given.map_or_else(|| cfg.seed_dir(out, seed).join("final.ckpt"), Path::to_path_buf)
}

/// Trains every seed. Each seed gets `<out>/seed-<s>/` holding the config
/// snapshot, the pipeline's phase directories and `final.ckpt`.
pub fn cmd_train(cfg: &ExperimentConfig, seeds: &[u64], out: &Path) -> Result<Vec<PathBuf>> {
    if cfg.train_steps == 0 {
        return Err(Error::config("train_steps must be positive"));
    }
    let task = cfg.task_spec()?;
    let mut finals = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let dir = cfg.seed_dir(out, seed);
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("config.toml"), cfg.to_toml_string())?;
        let outcome = oodsi_pipeline(&cfg.pipeline(seed), task.clone(), Some(&dir))
            .map_err(|e| Error::in_phase(format!("seed {seed}"), e))?;
        let path = dir.join("final.ckpt");
        save_team_params(&path, &outcome.final_params)?;
        finals.push(path);
    }
    Ok(finals)
}

/// Greedy evaluation of each seed's checkpoint; writes
/// `<out>/eval-<env>.tsv` with the aggregated row.
pub fn cmd_eval(
    cfg: &ExperimentConfig,
    seeds: &[u64],
    env: EnvKind,
    episodes: usize,
    out: &Path,
    checkpoint: Option<&Path>,
) -> Result<ResultRow> {
    if episodes == 0 {
        return Err(Error::usage("episodes must be positive for eval"));
    }
    let task = cfg.task_spec()?;
    let mut rates = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let params = Arc::new(load_checkpoint(cfg, &checkpoint_for(cfg, out, seed, checkpoint))?);
        let settings = EvalSettings {
            env,
            model: cfg.duration.clone(),
            guidance: cfg.method.guidance,
            episodes,
            seed: seed.wrapping_add(EVAL_SEED_OFFSET),
        };
        rates.push(evaluate(params, task.clone(), &settings)?.success_rate());
    }
    let row = ResultRow::from_rates(&cfg.method_label(), &task.name, env, &rates, episodes);
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join(format!("eval-{env}.tsv")), to_tsv(std::slice::from_ref(&row)))?;
    Ok(row)
}

/// Files written by [`cmd_collect`].
#[derive(Debug, Clone)]
pub struct Collected {
    pub trajectories: PathBuf,
    pub start_states: PathBuf,
    pub n_states: usize,
}

/// Deployment rollouts of a checkpoint and the start states harvested from
/// them, under `<out>/seed-<s>/collect/`.
pub fn cmd_collect(
    cfg: &ExperimentConfig,
    seed: u64,
    episodes: usize,
    out: &Path,
    checkpoint: Option<&Path>,
) -> Result<Collected> {
    let task = cfg.task_spec()?;
    let params = Arc::new(load_checkpoint(cfg, &checkpoint_for(cfg, out, seed, checkpoint))?);
    let settings = CollectSettings {
        episodes,
        model: cfg.duration.clone(),
        guidance: cfg.method.guidance,
        greedy: cfg.method.harvest_greedy,
        seed,
    };
    let trajs = collect_ood_trajectories(params, task, &settings)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let set = build_start_state_set(&trajs, cfg.method.n_traj, cfg.method.n_segments, cfg.method.p_ood, &mut rng)?;

    let dir = cfg.seed_dir(out, seed).join("collect");
    std::fs::create_dir_all(&dir)?;
    let trajectories = dir.join("trajectories.jsonl");
    let mut buf = Vec::new();
    for t in &trajs {
        write_trajectory(&mut buf, t)?;
    }
    std::fs::write(&trajectories, buf)?;
    let start_states = dir.join("startset.jsonl");
    set.save(&start_states)?;
    Ok(Collected { trajectories, start_states, n_states: set.states.len() })
}

/// Renders a trajectory file. With `speed > 0` frames are written to `sink`
/// at that many frames per second.
pub fn cmd_replay<W: Write>(file: &Path, speed: f64, sink: &mut W) -> Result<usize> {
    let f = std::fs::File::open(file).map_err(|e| Error::config(format!("cannot open {}: {e}", file.display())))?;
    let trajs = read_trajectories(std::io::BufReader::new(f))?;
    let text = render_all(&trajs);
    let frames = trajs.iter().map(|t| super::render::render_trajectory(t).len()).sum();
    if speed > 0.0 {
        let pause = std::time::Duration::from_secs_f64(1.0 / speed);
        for (i, frame) in text.split("\n\n").enumerate() {
            if i > 0 {
                std::thread::sleep(pause);
                sink.write_all(b"\n")?;
            }
            sink.write_all(frame.as_bytes())?;
            if !frame.ends_with('\n') {
                sink.write_all(b"\n")?;
            }
            sink.flush()?;
        }
    } else {
        sink.write_all(text.as_bytes())?;
    }
    Ok(frames)
}

fn find_eval_tables(dir: &Path, found: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<std::io::Result<_>>()?;
    entries.sort();
    for path in entries {
        if path.is_dir() {
            find_eval_tables(&path, found)?;
        } else if path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with("eval-") && n.ends_with(".tsv"))
        {
            found.push(path);
        }
    }
    Ok(())
}

/// Gathers every `eval-*.tsv` under `out` into `report.txt` and
/// `report.tsv`; returns the text table.
pub fn cmd_report(out: &Path) -> Result<String> {
    if !out.is_dir() {
        return Err(Error::config(format!("{} is not a directory", out.display())));
    }
    let mut files = Vec::new();
    find_eval_tables(out, &mut files)?;
    let mut rows = Vec::new();
    for f in &files {
        let text = std::fs::read_to_string(f)?;
        rows.extend(parse_tsv(&text).map_err(|e| Error::in_phase(f.display().to_string(), e))?);
    }
    let (text, tsv) = make_report(&rows)?;
    std::fs::write(out.join("report.txt"), &text)?;
    std::fs::write(out.join("report.tsv"), &tsv)?;
    Ok(text)
}
