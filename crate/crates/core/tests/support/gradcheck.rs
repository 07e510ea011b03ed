//! Central finite-difference check of the PPO loss gradients.

use craft_arena::arena::{Action, ActionMask};
use craft_arena::nn::{MaskedDistribution, NetShape, PolicyParams};
use craft_arena::train::{ppo_loss, LossCoefs, Minibatch};
use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub const FD_EPS: f64 = 1e-4;
/// Pre-activations closer than this to zero count as sitting on a ReLU kink.
const KINK_MARGIN: f64 = 1e-3;
/// Ratios closer than this to a clip edge count as sitting on the clip kink.
const CLIP_MARGIN: f64 = 1e-2;
/// Denominator floor for the relative error of near-zero components.
pub const REL_FLOOR: f64 = 1e-6;

pub fn small_shape() -> NetShape {
    NetShape { obs_len: 7, joint_len: 9, hidden: 12, layers: 4 }
}

pub fn coefs() -> LossCoefs {
    LossCoefs { clip_eps: 0.2, vf_coef: 0.5, ent_coef: 0.01 }
}

fn normal_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || StandardNormal.sample(rng))
}

fn random_mask<R: Rng>(rng: &mut R) -> ActionMask {
    let mut m = ActionMask::stop_only();
    for a in Action::ALL {
        if rng.random_bool(0.6) {
            m.set(a, true);
        }
    }
    m
}

fn on_kink(params: &PolicyParams, mb: &Minibatch) -> bool {
    let (_, a) = params.actor.forward_cached(mb.obs.view()).unwrap();
    let (_, c) = params.critic.forward_cached(mb.joint.view()).unwrap();
    a.hidden_preactivations()
        .iter()
        .chain(c.hidden_preactivations())
        .any(|z| z.iter().any(|v| v.abs() < KINK_MARGIN))
}

/// A batch of `n` rows away from every kink of the loss, or `None` if the
/// draw landed too close to one.
pub fn random_minibatch<R: Rng>(params: &PolicyParams, n: usize, coefs: LossCoefs, rng: &mut R) -> Option<Minibatch> {
    let shape = params.shape();
    let obs = normal_matrix(n, shape.obs_len, rng);
    let joint = normal_matrix(n, shape.joint_len, rng);
    let logits = params.actor.forward(obs.view()).unwrap();
    let mut mb = Minibatch {
        obs,
        actions: Vec::new(),
        masks: Vec::new(),
        old_logp: Vec::new(),
        advantages: Vec::new(),
        joint,
        returns: (0..n).map(|_| StandardNormal.sample(rng)).collect(),
    };
    let eps = coefs.clip_eps;
    for i in 0..n {
        let mask = random_mask(rng);
        let allowed: Vec<Action> = mask.iter_allowed().collect();
        let action = allowed[rng.random_range(0..allowed.len())];
        let dist = MaskedDistribution::new(logits.row(i).as_slice().unwrap(), &mask).unwrap();
        let ratio: f64 = rng.random_range(0.6..1.4);
        if (ratio - (1.0 + eps)).abs() < CLIP_MARGIN || (ratio - (1.0 - eps)).abs() < CLIP_MARGIN {
            return None;
        }
        mb.old_logp.push(dist.log_prob(action) - ratio.ln());
        mb.actions.push(action);
        mb.masks.push(mask);
        mb.advantages.push(StandardNormal.sample(rng));
    }
    (!on_kink(params, &mb)).then_some(mb)
}

/// Largest relative error between the analytic gradient and central
/// differences, over every parameter.
pub fn max_relative_error(params: &PolicyParams, mb: &Minibatch, coefs: LossCoefs) -> f64 {
    let (_, grads) = ppo_loss(params, mb, coefs).unwrap();
    let analytic: Vec<f64> = grads.tensors().into_iter().flatten().copied().collect();
    let mut probe = params.clone();
    let mut worst = 0.0f64;
    let mut k = 0;
    let n_tensors = probe.tensors().len();
    for t in 0..n_tensors {
        let len = probe.tensors()[t].len();
        for j in 0..len {
            let orig = probe.tensors()[t][j];
            probe.tensors_mut()[t][j] = orig + FD_EPS;
            let up = ppo_loss(&probe, mb, coefs).unwrap().0.total;
            probe.tensors_mut()[t][j] = orig - FD_EPS;
            let down = ppo_loss(&probe, mb, coefs).unwrap().0.total;
            probe.tensors_mut()[t][j] = orig;
            let numeric = (up - down) / (2.0 * FD_EPS);
            let a = analytic[k];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(REL_FLOOR);
            worst = worst.max(rel);
            k += 1;
        }
    }
    worst
}

/// Runs the check on `batches` kink-free random batches of `rows` rows.
pub fn gradient_check<R: Rng>(batches: usize, rows: usize, rng: &mut R) -> f64 {
    let coefs = coefs();
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < batches {
        let params = PolicyParams::new(small_shape(), rng);
        if let Some(mb) = random_minibatch(&params, rows, coefs, rng) {
            worst = worst.max(max_relative_error(&params, &mb, coefs));
            done += 1;
        }
    }
    worst
}
