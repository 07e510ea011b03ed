use super::mlp::Mlp;
use crate::arena::Action;
use rand::Rng;

/// Network sizes for one team.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetShape {
    pub obs_len: usize,
    pub joint_len: usize,
    pub hidden: usize,
    pub layers: usize,
}

/// Actor (per-agent observation → 11 logits) and centralized critic
/// (joint observation → value). Agents of one team share these weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParams {
    pub actor: Mlp,
    pub critic: Mlp,
    pub version: u64,
}

impl PolicyParams {
    pub fn new<R: Rng + ?Sized>(shape: NetShape, rng: &mut R) -> Self {
        let sizes = |input: usize, output: usize| {
            let mut s = vec![input];
            s.extend(std::iter::repeat_n(shape.hidden, shape.layers));
            s.push(output);
            s
        };
        Self {
            actor: Mlp::new(&sizes(shape.obs_len, Action::COUNT), 0.01, rng),
            critic: Mlp::new(&sizes(shape.joint_len, 1), 1.0, rng),
            version: 0,
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            actor: self.actor.zeros_like(),
            critic: self.critic.zeros_like(),
            version: 0,
        }
    }

    pub fn shape(&self) -> NetShape {
        NetShape {
            obs_len: self.actor.input_len(),
            joint_len: self.critic.input_len(),
            hidden: self.actor.layers[0].outputs(),
            layers: self.actor.layers.len() - 1,
        }
    }

    pub fn param_count(&self) -> usize {
        self.actor.param_count() + self.critic.param_count()
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut t = self.actor.tensors();
        t.extend(self.critic.tensors());
        t
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut t = self.actor.tensors_mut();
        t.extend(self.critic.tensors_mut());
        t
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    pub fn scale(&mut self, k: f64) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|v| *v *= k);
        }
    }
}

pub fn global_norm(grads: &PolicyParams) -> f64 {
    grads
        .tensors()
        .iter()
        .flat_map(|t| t.iter())
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}

/// Rescales `grads` in place so the global L2 norm is at most `max_norm`;
/// returns the norm before clipping.
pub fn clip_grad_norm(grads: &mut PolicyParams, max_norm: f64) -> f64 {
    let norm = global_norm(grads);
    if norm > max_norm {
        grads.scale(max_norm / norm);
    }
    norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grads(seed: u64) -> PolicyParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = NetShape { obs_len: 6, joint_len: 9, hidden: 8, layers: 4 };
        PolicyParams::new(shape, &mut rng)
    }

    #[test]
    fn clipping_scales_to_the_limit() {
        let mut g = grads(0);
        let max = global_norm(&g) / 2.0;
        let before = g.clone();
        clip_grad_norm(&mut g, max);
        assert!((global_norm(&g) - max).abs() < 1e-9);
        let dot: f64 = before
            .tensors()
            .iter()
            .zip(g.tensors())
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| x * y))
            .sum();
        let cos = dot / (global_norm(&before) * global_norm(&g));
        assert!((cos - 1.0).abs() < 1e-9);
    }

    #[test]
    fn clipping_below_the_limit_is_a_no_op() {
        let mut g = grads(1);
        let before = g.clone();
        let limit = global_norm(&g) * 1.5;
        clip_grad_norm(&mut g, limit);
        assert_eq!(g, before);
    }

    #[test]
    fn shape_round_trips() {
        let p = grads(2);
        assert_eq!(p.shape(), NetShape { obs_len: 6, joint_len: 9, hidden: 8, layers: 4 });
        assert_eq!(p.actor.output_len(), 11);
        assert_eq!(p.critic.output_len(), 1);
    }
}
