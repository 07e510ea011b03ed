//! Brute-force GAE: for each step, the explicit (γλ)-weighted sum of future
//! TD errors up to the end of its episode or segment.

use rand::Rng;

pub struct Sequence {
    pub rewards: Vec<f64>,
    pub values: Vec<f64>,
    pub dones: Vec<bool>,
    pub bootstrap: f64,
}

pub fn random_sequence<R: Rng>(max_len: usize, rng: &mut R) -> Sequence {
    let n = rng.random_range(1..=max_len);
    Sequence {
        rewards: (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
        values: (0..n).map(|_| rng.random_range(-3.0..3.0)).collect(),
        dones: (0..n).map(|_| rng.random_bool(0.1)).collect(),
        bootstrap: rng.random_range(-3.0..3.0),
    }
}

pub fn brute_force(seq: &Sequence, gamma: f64, lambda: f64) -> Vec<f64> {
    let n = seq.rewards.len();
    let delta = |j: usize| {
        let next = if seq.dones[j] {
            0.0
        } else if j + 1 < n {
            seq.values[j + 1]
        } else {
            seq.bootstrap
        };
        seq.rewards[j] + gamma * next - seq.values[j]
    };
    (0..n)
        .map(|t| {
            let mut sum = 0.0;
            for j in t..n {
                sum += (gamma * lambda).powi((j - t) as i32) * delta(j);
                if seq.dones[j] {
                    break;
                }
            }
            sum
        })
        .collect()
}
