use super::params::PolicyParams;
use crate::error::{Error, Result};

/// Adam moments and step counter for one [`PolicyParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptState {
    pub m: PolicyParams,
    pub v: PolicyParams,
    pub step: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl OptState {
    pub fn new(params: &PolicyParams, lr: f64) -> Self {
        Self {
            m: params.zeros_like(),
            v: params.zeros_like(),
            step: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// One bias-corrected Adam update. Bumps `params.version`.
pub fn adam_step(params: &mut PolicyParams, grads: &PolicyParams, opt: &mut OptState) -> Result<()> {
    if params.shape() != grads.shape() || params.shape() != opt.m.shape() {
        return Err(Error::contract("gradient shapes do not match the parameters"));
    }
    if !grads.is_finite() {
        return Err(Error::Numeric {
            layer: "gradient".into(),
            detail: "non-finite value".into(),
        });
    }
    opt.step += 1;
    let (b1, b2) = (opt.beta1, opt.beta2);
    let c1 = 1.0 - b1.powi(opt.step as i32);
    let c2 = 1.0 - b2.powi(opt.step as i32);
    let (lr, eps) = (opt.lr, opt.eps);
    for (((p, g), m), v) in params
        .tensors_mut()
        .into_iter()
        .zip(grads.tensors())
        .zip(opt.m.tensors_mut())
        .zip(opt.v.tensors_mut())
    {
        for i in 0..p.len() {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            let mh = m[i] / c1;
            let vh = v[i] / c2;
            p[i] -= lr * mh / (vh.sqrt() + eps);
        }
    }
    params.version += 1;
    Ok(())
}
