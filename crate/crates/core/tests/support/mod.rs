#![allow(dead_code)]
pub mod gae_oracle;
pub mod gradcheck;
pub mod mask_oracle;
pub mod scenes;
