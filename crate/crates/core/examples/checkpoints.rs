//! Team checkpoints: save, reload with a shape check, and see what a
//! mismatched network size reports. Weights are stored as f32.

use craft_arena::arena::TaskSpec;
use craft_arena::nn::{load_team_params, save_team_params, PolicyParams};
use craft_arena::train::{net_shape, PpoConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> craft_arena::Result<()> {
    let task = TaskSpec::preset("two-floor-competition")?;
    let cfg = PpoConfig { hidden: 32, layers: 2, ..PpoConfig::default() };
    let shape = net_shape(&task, &cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let teams: Vec<PolicyParams> = (0..task.n_teams()).map(|_| PolicyParams::new(shape, &mut rng)).collect();

    let path = std::env::temp_dir().join("craft-arena-demo.ckpt");
    save_team_params(&path, &teams)?;
    println!("wrote {} ({} bytes)", path.display(), std::fs::metadata(&path)?.len());
    let back = load_team_params(&path, task.n_teams(), Some(shape))?;
    let worst = teams
        .iter()
        .zip(&back)
        .flat_map(|(a, b)| a.tensors().into_iter().zip(b.tensors()))
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).abs()).collect::<Vec<_>>())
        .fold(0.0, f64::max);
    println!("reloaded {} teams, shape {:?}, largest f32 rounding {worst:.2e}", back.len(), shape);

    // Values are stored as f32, so a second save of the reloaded teams is
    // byte-identical to the first.
    let again = std::env::temp_dir().join("craft-arena-demo-2.ckpt");
    save_team_params(&again, &back)?;
    assert_eq!(std::fs::read(&again)?, std::fs::read(&path)?);
    std::fs::remove_file(again)?;

    let wrong = net_shape(&task, &PpoConfig { hidden: 64, ..cfg });
    match load_team_params(&path, task.n_teams(), Some(wrong)) {
        Ok(_) => println!("unexpected: mismatched shape accepted"),
        Err(e) => println!("{}: {e}", e.category()),
    }
    std::fs::remove_file(path)?;
    Ok(())
}
