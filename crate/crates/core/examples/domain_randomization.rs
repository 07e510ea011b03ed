//! Stop injection: executed actions are replaced with `Stop` at a fixed
//! rate while training, after the policy's choice is recorded.

use craft_arena::arena::Action;
use craft_arena::train::dr_wrap;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for p in [0.0, 0.1, 0.3, 1.0] {
        let n = 100_000;
        let stops = (0..n).filter(|_| dr_wrap(Action::MoveForward, p, &mut rng) == Action::Stop).count();
        println!("p_stop {p:.1}: {:.4} of {n} moves became Stop", stops as f64 / n as f64);
    }
}
