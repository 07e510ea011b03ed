use crate::arena::{observe_into, Action, ActionMask, Controller, WorldState};
use crate::nn::{MaskedDistribution, PolicyParams};
use ndarray::ArrayView2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Acts for every robot from its team's actor network.
#[derive(Debug, Clone)]
pub struct TeamPolicy {
    params: Arc<Vec<PolicyParams>>,
    /// `None` acts greedily.
    rng: Option<ChaCha8Rng>,
    buf: Vec<f64>,
}

impl TeamPolicy {
    pub fn greedy(params: Arc<Vec<PolicyParams>>) -> Self {
        Self { params, rng: None, buf: Vec::new() }
    }

    pub fn sampling(params: Arc<Vec<PolicyParams>>, seed: u64) -> Self {
        Self { params, rng: Some(ChaCha8Rng::seed_from_u64(seed)), buf: Vec::new() }
    }

    pub fn distribution(&mut self, state: &WorldState, agent: usize, mask: &ActionMask) -> MaskedDistribution {
        let team = state.robots[agent].team;
        observe_into(state, agent, &mut self.buf);
        let x = ArrayView2::from_shape((1, self.buf.len()), &self.buf).expect("one row");
        let logits = self.params[team]
            .actor
            .forward(x)
            .expect("observation width checked when the policy was loaded");
        MaskedDistribution::new(logits.row(0).as_slice().expect("contiguous"), mask)
            .expect("masks always allow Stop")
    }
}

impl Controller for TeamPolicy {
    fn act(&mut self, state: &WorldState, agent: usize, mask: &ActionMask) -> Action {
        let dist = self.distribution(state, agent, mask);
        match self.rng.as_mut() {
            Some(rng) => dist.sample(rng),
            None => dist.greedy(),
        }
    }
}
