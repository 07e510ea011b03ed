//! Binary parameter checkpoints.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic        8 bytes  "CRAFTPOL"
//! format       u32      1
//! version      u64      parameter version counter
//! per network (actor, then critic):
//!   n_layers   u32
//!   shapes     n_layers × (in: u32, out: u32)
//! values       per network, per layer: weights row-major (in × out) as f32,
//!              then biases (out) as f32
//! ```
//!
//! A team checkpoint is one such block per team, back to back in team order.

use super::mlp::{Dense, Mlp};
use super::params::{NetShape, PolicyParams};
use crate::error::{Error, Result};
use ndarray::{Array1, Array2};
use std::io::{Read, Write};
use std::path::Path;

pub const MAGIC: &[u8; 8] = b"CRAFTPOL";
pub const FORMAT: u32 = 1;

pub fn write_params<W: Write>(w: &mut W, params: &PolicyParams) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT.to_le_bytes())?;
    w.write_all(&params.version.to_le_bytes())?;
    for net in [&params.actor, &params.critic] {
        w.write_all(&(net.layers.len() as u32).to_le_bytes())?;
        for (i, o) in net.shapes() {
            w.write_all(&(i as u32).to_le_bytes())?;
            w.write_all(&(o as u32).to_le_bytes())?;
        }
    }
    for t in params.tensors() {
        for v in t {
            w.write_all(&(*v as f32).to_le_bytes())?;
        }
    }
    Ok(())
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|_| bad(format!("truncated while reading {what}")))
}

fn read_u32<R: Read>(r: &mut R, what: &str) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b, what)?;
    Ok(u32::from_le_bytes(b))
}

fn read_net<R: Read>(r: &mut R, name: &str) -> Result<Vec<(usize, usize)>> {
    let n = read_u32(r, name)? as usize;
    if n == 0 || n > 64 {
        return Err(bad(format!("{name} has {n} layers")));
    }
    let mut shapes = Vec::with_capacity(n);
    for _ in 0..n {
        let i = read_u32(r, name)? as usize;
        let o = read_u32(r, name)? as usize;
        if let Some(&(_, prev)) = shapes.last() {
            if prev != i {
                return Err(bad(format!("{name} layer widths do not chain ({prev} then {i})")));
            }
        }
        shapes.push((i, o));
    }
    Ok(shapes)
}

fn fill_net<R: Read>(r: &mut R, shapes: &[(usize, usize)]) -> Result<Mlp> {
    let mut layers = Vec::with_capacity(shapes.len());
    let mut floats = |n: usize| -> Result<Vec<f64>> {
        let mut buf = vec![0u8; 4 * n];
        read_exact(r, &mut buf, "values")?;
        Ok(buf
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect())
    };
    for &(i, o) in shapes {
        let w = Array2::from_shape_vec((i, o), floats(i * o)?).expect("sized above");
        let b = Array1::from_vec(floats(o)?);
        layers.push(Dense { w, b });
    }
    Ok(Mlp { layers })
}

/// Reads parameters; when `expected` is given the input widths, hidden
/// width and depth must match it.
pub fn read_params<R: Read>(r: &mut R, expected: Option<NetShape>) -> Result<PolicyParams> {
    let params = read_block(r, expected)?;
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(bad("trailing bytes after values"));
    }
    Ok(params)
}

fn read_block<R: Read>(r: &mut R, expected: Option<NetShape>) -> Result<PolicyParams> {
    let mut magic = [0u8; 8];
    read_exact(r, &mut magic, "magic")?;
    if &magic != MAGIC {
        return Err(bad("not a parameter checkpoint (bad magic)"));
    }
    let format = read_u32(r, "format")?;
    if format != FORMAT {
        return Err(bad(format!("unsupported checkpoint format {format}")));
    }
    let mut v = [0u8; 8];
    read_exact(r, &mut v, "version")?;
    let version = u64::from_le_bytes(v);
    let actor_shapes = read_net(r, "actor")?;
    let critic_shapes = read_net(r, "critic")?;
    if actor_shapes.last().map(|s| s.1) != Some(crate::arena::Action::COUNT) {
        return Err(bad("actor head is not 11 wide"));
    }
    if critic_shapes.last().map(|s| s.1) != Some(1) {
        return Err(bad("critic head is not scalar"));
    }
    let actor = fill_net(r, &actor_shapes)?;
    let critic = fill_net(r, &critic_shapes)?;
    let params = PolicyParams { actor, critic, version };
    if !params.is_finite() {
        return Err(bad("non-finite parameter values"));
    }
    if let Some(want) = expected {
        let got = params.shape();
        if got != want || params.critic.layers.len() != params.actor.layers.len() {
            return Err(bad(format!(
                "shape mismatch: checkpoint obs {} joint {} hidden {}×{}, task needs obs {} joint {} hidden {}×{}",
                got.obs_len, got.joint_len, got.layers, got.hidden, want.obs_len, want.joint_len, want.layers, want.hidden
            )));
        }
    }
    Ok(params)
}

pub fn save_params(path: impl AsRef<Path>, params: &PolicyParams) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_params(&mut w, params)?;
    w.flush()?;
    Ok(())
}

pub fn load_params(path: impl AsRef<Path>, expected: Option<NetShape>) -> Result<PolicyParams> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    read_params(&mut r, expected)
}

pub fn write_team_params<W: Write>(w: &mut W, teams: &[PolicyParams]) -> Result<()> {
    teams.iter().try_for_each(|p| write_params(w, p))
}

/// Reads exactly `n_teams` parameter blocks.
pub fn read_team_params<R: Read>(r: &mut R, n_teams: usize, expected: Option<NetShape>) -> Result<Vec<PolicyParams>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut cursor = bytes.as_slice();
    let mut teams = Vec::with_capacity(n_teams);
    while !cursor.is_empty() {
        if teams.len() == n_teams {
            return Err(bad(format!("more than {n_teams} parameter blocks")));
        }
        teams.push(read_block(&mut cursor, expected).map_err(|e| bad(format!("team {}: {e}", teams.len())))?);
    }
    if teams.len() != n_teams {
        return Err(bad(format!("{} parameter blocks for {n_teams} teams", teams.len())));
    }
    Ok(teams)
}

pub fn save_team_params(path: impl AsRef<Path>, teams: &[PolicyParams]) -> Result<()> {
    let mut buf = Vec::new();
    write_team_params(&mut buf, teams)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn load_team_params(path: impl AsRef<Path>, n_teams: usize, expected: Option<NetShape>) -> Result<Vec<PolicyParams>> {
    let path = path.as_ref();
    let mut f = std::fs::File::open(path)
        .map_err(|e| bad(format!("cannot open {}: {e}", path.display())))?;
    read_team_params(&mut f, n_teams, expected)
}
