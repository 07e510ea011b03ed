use crate::arena::{Action, ActionMask};
use crate::error::{Error, Result};
use rand::Rng;

/// Categorical distribution over the eleven actions with masked entries
/// pinned to probability zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedDistribution {
    pub logits: [f64; Action::COUNT],
    pub mask: ActionMask,
    pub probs: [f64; Action::COUNT],
}

impl MaskedDistribution {
    pub fn new(logits: &[f64], mask: &ActionMask) -> Result<Self> {
        if logits.len() != Action::COUNT {
            return Err(Error::contract(format!("{} logits for {} actions", logits.len(), Action::COUNT)));
        }
        if mask.count() == 0 {
            return Err(Error::contract("action mask allows nothing"));
        }
        let max = logits
            .iter()
            .zip(mask.allowed)
            .filter(|(_, ok)| *ok)
            .map(|(l, _)| *l)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut probs = [0.0; Action::COUNT];
        let mut total = 0.0;
        for i in 0..Action::COUNT {
            if mask.allowed[i] {
                probs[i] = (logits[i] - max).exp();
                total += probs[i];
            }
        }
        probs.iter_mut().for_each(|p| *p /= total);
        let mut l = [0.0; Action::COUNT];
        l.copy_from_slice(logits);
        Ok(Self { logits: l, mask: *mask, probs })
    }

    pub fn log_prob(&self, action: Action) -> f64 {
        let i = action.index();
        if !self.mask.allowed[i] {
            return f64::NEG_INFINITY;
        }
        let max = self.max_allowed_logit();
        let lse = max
            + (0..Action::COUNT)
                .filter(|j| self.mask.allowed[*j])
                .map(|j| (self.logits[j] - max).exp())
                .sum::<f64>()
                .ln();
        self.logits[i] - lse
    }

    fn max_allowed_logit(&self) -> f64 {
        (0..Action::COUNT)
            .filter(|j| self.mask.allowed[*j])
            .map(|j| self.logits[j])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn entropy(&self) -> f64 {
        self.probs
            .iter()
            .filter(|p| **p > 0.0)
            .map(|p| -p * p.ln())
            .sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Action {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = Action::Stop;
        for a in Action::ALL {
            let p = self.probs[a.index()];
            if p > 0.0 {
                acc += p;
                last = a;
                if u < acc {
                    return a;
                }
            }
        }
        last
    }

    /// Most likely allowed action, lowest index on ties.
    pub fn greedy(&self) -> Action {
        let mut best = Action::Stop;
        let mut best_logit = f64::NEG_INFINITY;
        for a in Action::ALL {
            if self.mask.is_allowed(a) && self.logits[a.index()] > best_logit {
                best = a;
                best_logit = self.logits[a.index()];
            }
        }
        best
    }
}

/// Samples an allowed action; returns it with its log-probability and the
/// entropy of the masked distribution.
pub fn sample_masked<R: Rng + ?Sized>(
    logits: &[f64],
    mask: &ActionMask,
    rng: &mut R,
) -> Result<(Action, f64, f64)> {
    let d = MaskedDistribution::new(logits, mask)?;
    let a = d.sample(rng);
    Ok((a, d.log_prob(a), d.entropy()))
}
