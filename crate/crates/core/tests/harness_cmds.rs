use craft_arena::arena::TaskSpec;
use craft_arena::eval::EnvKind;
use craft_arena::harness::{
    cmd_collect, cmd_eval, cmd_replay, cmd_report, cmd_train, make_report, parse_tsv, to_tsv, ExperimentConfig,
    ResultRow,
};
use craft_arena::nn::{save_team_params, PolicyParams};
use craft_arena::oodsi::{oodsi_pipeline, sample_start_state, PipelineConfig, StartStateSet};
use craft_arena::train::{net_shape, PpoConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn tiny() -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        task: "build-character-desk".into(),
        seeds: vec![3],
        train_steps: 256,
        retrain_steps: 128,
        eval_episodes: 10,
        checkpoint_every: 4,
        ..ExperimentConfig::default()
    };
    cfg.ppo = PpoConfig {
        hidden: 16,
        layers: 2,
        envs_per_worker: 4,
        rollout_len: 16,
        minibatch: 32,
        lr: 1e-3,
        ..PpoConfig::default()
    };
    cfg.method.oodsi = true;
    cfg.method.collect_episodes = 4;
    cfg
}

fn random_checkpoint(cfg: &ExperimentConfig, dir: &Path, seed: u64) -> PathBuf {
    let task = cfg.task_spec().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let teams: Vec<PolicyParams> = (0..task.n_teams())
        .map(|_| PolicyParams::new(net_shape(&task, &cfg.ppo), &mut rng))
        .collect();
    let path = dir.join("random.ckpt");
    save_team_params(&path, &teams).unwrap();
    path
}

#[test]
fn replay_matches_hand_written_frames() {
    let file = fixture("two_step.jsonl");
    let before = std::fs::read(&file).unwrap();
    let mut out = Vec::new();
    let frames = cmd_replay(&file, 0.0, &mut out).unwrap();
    assert_eq!(frames, 3);
    let want = std::fs::read_to_string(fixture("two_step.frames.txt")).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), want);
    assert_eq!(std::fs::read(&file).unwrap(), before);
}

#[test]
fn replay_of_an_empty_trajectory_has_no_frames() {
    let text = std::fs::read_to_string(fixture("two_step.jsonl")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.jsonl");
    std::fs::write(&path, format!("{}\n{}\n", lines[0], lines[3])).unwrap();
    let mut out = Vec::new();
    assert_eq!(cmd_replay(&path, 0.0, &mut out).unwrap(), 0);
    assert!(out.is_empty());
}

#[test]
fn corrupt_replay_line_is_a_parse_error_with_its_number() {
    let text = std::fs::read_to_string(fixture("two_step.jsonl")).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[2] = lines[2].replace("\"step\":1", "\"step\":\"one\"");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    std::fs::write(&path, lines.join("\n")).unwrap();
    let err = cmd_replay(&path, 0.0, &mut Vec::new()).unwrap_err();
    assert_eq!(err.category(), "parse");
    assert!(err.to_string().starts_with("line 3:"), "{err}");
}

#[test]
fn four_method_report_matches_golden_layout() {
    let rows = parse_tsv(&std::fs::read_to_string(fixture("four_methods.tsv")).unwrap()).unwrap();
    let (text, tsv) = make_report(&rows).unwrap();
    assert_eq!(text, std::fs::read_to_string(fixture("four_methods.txt")).unwrap());
    let methods: Vec<&str> = tsv.lines().skip(1).map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(methods, ["PPO", "PPO", "PPO+DR", "PPO+DR", "PPO+OODSI", "PPO+OODSI", "PPO+DR+OODSI", "PPO+DR+OODSI"]);
}

#[test]
fn single_row_report_is_one_line() {
    let row = ResultRow::from_rates("PPO", "fetch-block", EnvKind::Async, &[0.5, 0.7], 10);
    assert!((row.mean - 60.0).abs() < 1e-12 && (row.std - 10.0).abs() < 1e-12);
    let (text, tsv) = make_report(&[row]).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert_eq!(tsv.lines().nth(1).unwrap(), "PPO\tfetch-block\tasync\t60.00\t10.00\t2\t10");
    assert_eq!(make_report(&[]).unwrap_err().category(), "usage");
}

fn arb_row() -> impl Strategy<Value = ResultRow> {
    (
        prop::sample::select(vec!["PPO", "PPO+DR", "PPO+OODSI", "PPO+DR+OODSI", "PPO (no guidance)"]),
        prop::sample::select(vec!["build-character", "two-floor-competition", "fetch-block"]),
        prop::bool::ANY,
        prop::collection::vec(0.0..=1.0f64, 1..6),
    )
        .prop_map(|(m, t, a, rates)| {
            let env = if a { EnvKind::Async } else { EnvKind::Sync };
            ResultRow::from_rates(m, t, env, &rates, 100)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn report_order_ignores_input_order(rows in prop::collection::vec(arb_row(), 1..12), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut shuffled = rows.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = make_report(&rows).unwrap();
        let b = make_report(&shuffled).unwrap();
        prop_assert_eq!(&a.1, &b.1);
        // the text table's numbers and row order agree with the TSV twin
        let text_nums: Vec<String> = a.0.lines().skip(1).map(|l| {
            let cell = l.rsplit("  ").next().unwrap();
            cell.replace(" ± ", "\t")
        }).collect();
        let tsv_nums: Vec<String> = a.1.lines().skip(1).map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            format!("{}\t{}", f[3], f[4])
        }).collect();
        prop_assert_eq!(text_nums, tsv_nums);
        for r in parse_tsv(&a.1).unwrap() {
            prop_assert!((0.0..=100.0).contains(&r.mean) && r.std >= 0.0);
        }
    }

    #[test]
    fn result_tables_round_trip(rows in prop::collection::vec(arb_row(), 0..8)) {
        let tsv = to_tsv(&rows);
        prop_assert_eq!(to_tsv(&parse_tsv(&tsv).unwrap()), tsv);
    }
}

#[test]
fn shipped_configs_parse_and_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap(), cfg);
        cfg.task_spec().unwrap();
        seen += 1;
    }
    assert!(seen >= 2);
}

#[test]
fn collect_writes_fifteen_valid_start_states() {
    let cfg = tiny();
    let dir = tempfile::tempdir().unwrap();
    let ckpt = random_checkpoint(&cfg, dir.path(), 1);
    let c = cmd_collect(&cfg, 5, 3, dir.path(), Some(&ckpt)).unwrap();
    assert_eq!(c.n_states, 15);
    let set = StartStateSet::load(&c.start_states).unwrap();
    assert_eq!((set.n_traj, set.n_segments, set.p_ood), (3, 5, 0.5));
    let mut sources: Vec<usize> = set.states.iter().map(|h| h.source_trajectory).collect();
    sources.dedup();
    assert_eq!(sources.len(), 3);
    for (i, h) in set.states.iter().enumerate() {
        assert_eq!(h.segment, i % 5);
        assert!(h.decision_time.is_some());
        h.state.validate().unwrap();
        let mut ctrl = craft_arena::arena::RandomController::new(i as u64);
        craft_arena::arena::run_sync_episode(&mut ctrl, h.state.clone(), true, 0).unwrap();
    }
    let first = std::fs::read(&c.start_states).unwrap();
    let trajs = std::fs::read(&c.trajectories).unwrap();
    let again = cmd_collect(&cfg, 5, 3, dir.path(), Some(&ckpt)).unwrap();
    assert_eq!(std::fs::read(&again.start_states).unwrap(), first);
    assert_eq!(std::fs::read(&again.trajectories).unwrap(), trajs);

    let err = cmd_collect(&cfg, 5, 2, dir.path(), Some(&ckpt)).unwrap_err();
    assert_eq!(err.category(), "config");
}

#[test]
fn mixed_start_distribution_hits_p_ood() {
    let cfg = tiny();
    let dir = tempfile::tempdir().unwrap();
    let ckpt = random_checkpoint(&cfg, dir.path(), 2);
    let c = cmd_collect(&cfg, 9, 3, dir.path(), Some(&ckpt)).unwrap();
    let set = StartStateSet::load(&c.start_states).unwrap();
    let harvested: Vec<_> = set.states.iter().map(|h| (h.state.robots.clone(), h.state.objects.clone())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 10_000;
    let hits = (0..n)
        .filter(|_| {
            let s = sample_start_state(&set, &mut rng).unwrap();
            assert_eq!(s.step_count, 0);
            harvested.contains(&(s.robots, s.objects))
        })
        .count();
    let p = hits as f64 / n as f64;
    let se = (0.25 / n as f64).sqrt();
    assert!((p - 0.5).abs() <= 3.0 * se, "p = {p}");
}

#[test]
fn eval_rejects_bad_requests() {
    let cfg = tiny();
    let dir = tempfile::tempdir().unwrap();
    let ckpt = random_checkpoint(&cfg, dir.path(), 3);
    let err = cmd_eval(&cfg, &[0], EnvKind::Sync, 0, dir.path(), Some(&ckpt)).unwrap_err();
    assert_eq!(err.category(), "usage");

    let mut wider = cfg.clone();
    wider.ppo.hidden = 24;
    let err = cmd_eval(&wider, &[0], EnvKind::Sync, 5, dir.path(), Some(&ckpt)).unwrap_err();
    assert_eq!(err.category(), "checkpoint");

    let err = cmd_eval(&cfg, &[0], EnvKind::Sync, 5, dir.path(), None).unwrap_err();
    assert_eq!(err.category(), "checkpoint");
}

#[test]
fn random_weights_rarely_finish_the_desk_task() {
    let cfg = ExperimentConfig { seeds: vec![0, 1], ..tiny() };
    let dir = tempfile::tempdir().unwrap();
    let ckpt = random_checkpoint(&cfg, dir.path(), 4);
    let row = cmd_eval(&cfg, &cfg.seeds, EnvKind::Sync, 100, dir.path(), Some(&ckpt)).unwrap();
    assert!(row.mean < 5.0, "{row:?}");
    assert_eq!(row.seeds, 2);
    assert!(dir.path().join("eval-sync.tsv").exists());
}

#[test]
fn zero_retraining_returns_phase_one_teams() {
    let cfg = tiny();
    let task = cfg.task_spec().unwrap();
    let mut p = PipelineConfig::new(cfg.ppo_config(), 256, 0, 7);
    p.eval_episodes = 5;
    let dir = tempfile::tempdir().unwrap();
    let out = oodsi_pipeline(&p, task, Some(dir.path())).unwrap();
    assert_eq!(out.final_params, out.phase1);
    assert!(out.start_set.is_none() && out.retrain_log.is_empty());
    assert_eq!(out.report.len(), 4);
    assert!(dir.path().join("pipeline.tsv").exists());
}

#[test]
fn train_rejects_a_zero_budget_and_bad_presets() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig { train_steps: 0, ..tiny() };
    assert_eq!(cmd_train(&cfg, &[0], dir.path()).unwrap_err().category(), "config");
    let cfg = ExperimentConfig { task: "castle".into(), ..tiny() };
    let err = cmd_train(&cfg, &[0], dir.path()).unwrap_err();
    assert_eq!(err.category(), "config");
    for name in TaskSpec::PRESETS {
        assert!(err.to_string().contains(name));
    }
}

fn run_all(cfg: &ExperimentConfig, out: &Path) -> Vec<(String, Vec<u8>)> {
    cmd_train(cfg, &cfg.seeds, out).unwrap();
    for env in [EnvKind::Sync, EnvKind::Async] {
        cmd_eval(cfg, &cfg.seeds, env, 10, out, None).unwrap();
    }
    cmd_collect(cfg, cfg.seeds[0], 3, out, None).unwrap();
    cmd_report(out).unwrap();
    let mut files = Vec::new();
    let mut stack = vec![out.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files.push((p.strip_prefix(out).unwrap().display().to_string(), std::fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn commands_are_byte_reproducible() {
    let cfg = tiny();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let fa = run_all(&cfg, a.path());
    let fb = run_all(&cfg, b.path());
    let names: Vec<&str> = fa.iter().map(|(n, _)| n.as_str()).collect();
    for want in ["seed-3/phase1/metrics.tsv", "seed-3/retrain/metrics.tsv", "report.tsv", "report.txt", "eval-async.tsv"] {
        assert!(names.contains(&want), "{want} missing from {names:?}");
    }
    assert!(names.iter().any(|n| n.starts_with("seed-3/phase1/checkpoints/iter-")));
    assert_eq!(fa, fb);
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_craft-arena")).args(args).output().unwrap()
}

#[test]
fn cli_errors_are_one_categorized_line() {
    let out = cli(&["eval", "--env", "mars"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error: usage: "), "{err}");

    let out = cli(&["train", "--config", "/nonexistent/experiment.toml"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error: config: ") && err.lines().count() == 1, "{err}");

    let file = fixture("two_step.jsonl");
    let out = cli(&["replay", "--file", file.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        std::fs::read_to_string(fixture("two_step.frames.txt")).unwrap()
    );
}

#[test]
fn cli_runs_train_eval_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("tiny.toml");
    std::fs::write(&cfg_path, tiny().to_toml_string()).unwrap();
    let out_dir = dir.path().join("run");
    let (c, o) = (cfg_path.to_str().unwrap(), out_dir.to_str().unwrap());
    let out = cli(&["train", "--config", c, "--seed", "2", "--out", o]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = cli(&["eval", "--config", c, "--seed", "2", "--env", "async", "--episodes", "0", "--out", o]);
    assert_eq!(String::from_utf8(out.stderr).unwrap().split(':').nth(1), Some(" usage"));
    let out = cli(&["eval", "--config", c, "--seed", "2", "--env", "async", "--episodes", "5", "--out", o]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = cli(&["report", "--out", o]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PPO+OODSI") && text.contains("async"), "{text}");
}
