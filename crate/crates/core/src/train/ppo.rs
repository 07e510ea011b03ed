use super::config::PpoConfig;
use super::gae::{gae, normalize, AdvantageSet};
use super::rollout::TeamBatch;
use crate::arena::{Action, ActionMask};
use crate::error::{Error, Result};
use crate::nn::{adam_step, clip_grad_norm, MaskedDistribution, OptState, PolicyParams};
use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;

/// GAE over every segment of a team batch.
pub fn compute_gae(batch: &TeamBatch, gamma: f64, lambda: f64) -> AdvantageSet {
    let mut out = AdvantageSet::default();
    for seg in &batch.segments {
        let r = seg.start..seg.start + seg.len;
        let part = gae(
            &batch.rewards[r.clone()],
            &batch.values[r.clone()],
            &batch.dones[r],
            seg.bootstrap,
            gamma,
            lambda,
        );
        out.advantages.extend(part.advantages);
        out.returns.extend(part.returns);
    }
    out
}

/// Gathered training rows. Actor rows are per agent, critic rows per step.
#[derive(Debug, Clone)]
pub struct Minibatch {
    pub obs: Array2<f64>,
    pub actions: Vec<Action>,
    pub masks: Vec<ActionMask>,
    pub old_logp: Vec<f64>,
    /// Advantage for each actor row.
    pub advantages: Vec<f64>,
    pub joint: Array2<f64>,
    pub returns: Vec<f64>,
}

impl Minibatch {
    /// Rows for the given steps of `batch`; `advantages` is per step.
    pub fn gather(batch: &TeamBatch, steps: &[usize], advantages: &[f64], returns: &[f64]) -> Self {
        let k = batch.agents_per_step();
        let (ol, jl) = (batch.obs_len, batch.joint_len);
        let mut obs = Vec::with_capacity(steps.len() * k * ol);
        let mut joint = Vec::with_capacity(steps.len() * jl);
        let mut mb = Minibatch {
            obs: Array2::zeros((0, ol)),
            actions: Vec::with_capacity(steps.len() * k),
            masks: Vec::with_capacity(steps.len() * k),
            old_logp: Vec::with_capacity(steps.len() * k),
            advantages: Vec::with_capacity(steps.len() * k),
            joint: Array2::zeros((0, jl)),
            returns: Vec::with_capacity(steps.len()),
        };
        for &t in steps {
            for row in t * k..(t + 1) * k {
                obs.extend_from_slice(&batch.obs[row * ol..(row + 1) * ol]);
                mb.actions.push(batch.actions[row]);
                mb.masks.push(batch.masks[row]);
                mb.old_logp.push(batch.logp[row]);
                mb.advantages.push(advantages[t]);
            }
            joint.extend_from_slice(&batch.joint[t * jl..(t + 1) * jl]);
            mb.returns.push(returns[t]);
        }
        mb.obs = Array2::from_shape_vec((steps.len() * k, ol), obs).expect("row-aligned");
        mb.joint = Array2::from_shape_vec((steps.len(), jl), joint).expect("row-aligned");
        mb
    }
}

/// Loss coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossCoefs {
    pub clip_eps: f64,
    pub vf_coef: f64,
    pub ent_coef: f64,
}

impl From<&PpoConfig> for LossCoefs {
    fn from(c: &PpoConfig) -> Self {
        Self { clip_eps: c.clip_eps, vf_coef: c.vf_coef, ent_coef: c.ent_coef }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossParts {
    pub total: f64,
    pub policy: f64,
    pub value: f64,
    pub entropy: f64,
    pub mean_ratio: f64,
    pub clip_fraction: f64,
}

/// Clipped-surrogate loss plus value and entropy terms, with exact
/// gradients:
///
/// `L = -mean(min(ρA, clip(ρ, 1±ε)A)) + c_v·mean((V - R)²) - c_e·mean(H)`
///
/// The surrogate contributes gradient only where the unclipped branch is
/// strictly the smaller one (`A > 0, ρ < 1+ε` or `A < 0, ρ > 1-ε`).
pub fn ppo_loss(params: &PolicyParams, mb: &Minibatch, coefs: LossCoefs) -> Result<(LossParts, PolicyParams)> {
    let n = mb.actions.len();
    let s = mb.returns.len();
    if n == 0 || s == 0 {
        return Err(Error::contract("empty minibatch"));
    }
    let mut grads = params.zeros_like();
    let (logits, acache) = params.actor.forward_cached(mb.obs.view()).map_err(|e| Error::in_phase("actor", e))?;
    let mut dlogits = Array2::<f64>::zeros(logits.raw_dim());
    let mut parts = LossParts::default();
    let eps = coefs.clip_eps;
    for i in 0..n {
        let dist = MaskedDistribution::new(logits.row(i).as_slice().expect("contiguous"), &mb.masks[i])?;
        let a = mb.actions[i];
        let logp = dist.log_prob(a);
        let ratio = (logp - mb.old_logp[i]).exp();
        let adv = mb.advantages[i];
        let surr = (ratio * adv).min(ratio.clamp(1.0 - eps, 1.0 + eps) * adv);
        let ent = dist.entropy();
        parts.policy -= surr;
        parts.entropy += ent;
        parts.mean_ratio += ratio;
        if (ratio - 1.0).abs() > eps {
            parts.clip_fraction += 1.0;
        }
        let active = (adv > 0.0 && ratio < 1.0 + eps) || (adv < 0.0 && ratio > 1.0 - eps);
        let d_logp = if active { -adv * ratio / n as f64 } else { 0.0 };
        let mut row = dlogits.row_mut(i);
        for j in 0..Action::COUNT {
            let p = dist.probs[j];
            if !mb.masks[i].allowed[j] {
                continue;
            }
            let onehot = if j == a.index() { 1.0 } else { 0.0 };
            let d_ent = if p > 0.0 { -p * (p.ln() + ent) } else { 0.0 };
            row[j] = d_logp * (onehot - p) - coefs.ent_coef * d_ent / n as f64;
        }
    }
    parts.policy /= n as f64;
    parts.entropy /= n as f64;
    parts.mean_ratio /= n as f64;
    parts.clip_fraction /= n as f64;
    params.actor.backward(&acache, dlogits, &mut grads.actor);

    let (values, ccache) = params.critic.forward_cached(mb.joint.view()).map_err(|e| Error::in_phase("critic", e))?;
    let mut dv = Array2::<f64>::zeros(values.raw_dim());
    for t in 0..s {
        let err = values[[t, 0]] - mb.returns[t];
        parts.value += err * err;
        dv[[t, 0]] = coefs.vf_coef * 2.0 * err / s as f64;
    }
    parts.value /= s as f64;
    params.critic.backward(&ccache, dv, &mut grads.critic);

    parts.total = parts.policy + coefs.vf_coef * parts.value - coefs.ent_coef * parts.entropy;
    if !parts.total.is_finite() {
        return Err(Error::Numeric { layer: "loss".into(), detail: format!("{parts:?}") });
    }
    Ok((parts, grads))
}

/// Statistics of one PPO update.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UpdateStats {
    /// Mean importance ratio on the whole batch before any gradient step.
    pub initial_ratio: f64,
    pub mean_ratio: f64,
    pub clip_fraction: f64,
    pub value_loss: f64,
    pub policy_loss: f64,
    pub entropy: f64,
    pub grad_norm: f64,
    pub minibatches: usize,
}

/// Minibatched clipped PPO over `cfg.epochs` epochs with advantage
/// normalisation and gradient-norm clipping before each Adam step.
pub fn ppo_update<R: Rng + ?Sized>(
    batch: &TeamBatch,
    adv: &AdvantageSet,
    params: &mut PolicyParams,
    opt: &mut OptState,
    cfg: &PpoConfig,
    rng: &mut R,
) -> Result<UpdateStats> {
    let steps = batch.steps();
    let mut stats = UpdateStats::default();
    if steps == 0 {
        return Ok(stats);
    }
    let mut advantages = adv.advantages.clone();
    normalize(&mut advantages);
    let coefs = LossCoefs::from(cfg);
    let all: Vec<usize> = (0..steps).collect();
    let full = Minibatch::gather(batch, &all, &advantages, &adv.returns);
    stats.initial_ratio = ppo_loss(params, &full, coefs)?.0.mean_ratio;

    let mut order = all;
    for epoch in 0..cfg.epochs {
        order.shuffle(rng);
        for (m, chunk) in order.chunks(cfg.minibatch).enumerate() {
            let mb = Minibatch::gather(batch, chunk, &advantages, &adv.returns);
            let (parts, mut grads) = ppo_loss(params, &mb, coefs)
                .map_err(|e| Error::in_phase(format!("epoch {epoch} minibatch {m}"), e))?;
            stats.grad_norm += clip_grad_norm(&mut grads, cfg.max_grad_norm);
            adam_step(params, &grads, opt)?;
            stats.mean_ratio += parts.mean_ratio;
            stats.clip_fraction += parts.clip_fraction;
            stats.value_loss += parts.value;
            stats.policy_loss += parts.policy;
            stats.entropy += parts.entropy;
            stats.minibatches += 1;
        }
    }
    let k = stats.minibatches as f64;
    stats.mean_ratio /= k;
    stats.clip_fraction /= k;
    stats.value_loss /= k;
    stats.policy_loss /= k;
    stats.entropy /= k;
    stats.grad_norm /= k;
    Ok(stats)
}
