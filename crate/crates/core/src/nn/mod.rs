//! Policy and value networks written against `ndarray`: ReLU MLPs with
//! orthogonal initialisation, a masked categorical action head, Adam,
//! global gradient-norm clipping and a binary checkpoint format.

mod checkpoint;
mod dist;
mod mlp;
mod optim;
mod params;

pub use checkpoint::{
    load_params, load_team_params, read_params, read_team_params, save_params, save_team_params, write_params,
    write_team_params, FORMAT, MAGIC,
};
pub use dist::{sample_masked, MaskedDistribution};
pub use mlp::{orthogonal, Dense, Mlp, MlpCache};
pub use optim::{adam_step, OptState};
pub use params::{clip_grad_norm, global_norm, NetShape, PolicyParams};
