//! Binary checkpoint records.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! "MBGN1"
//! u64 iteration, u64 seed
//! [u8; 32] rng key, u64 rng stream, u128 rng word position
//! f64 beta
//! group: generator
//! u64 K, then K groups: discriminator k
//! u64 beta adam step, tensor beta m, tensor beta v
//! ```
//!
//! A group is `u64 n, n parameter tensors, u64 adam step, n first-moment
//! tensors, n second-moment tensors`. A tensor is `u64 rows, u64 cols`
//! followed by `rows * cols` row-major `f64`s.

use std::io::Write;

use crate::ndcore::{Dense, Matrix, Mlp};
use crate::{Error, Result};

use super::{AdamConfig, AdamState};

pub const MAGIC: &[u8; 5] = b"MBGN1";

/// Serialized position of a ChaCha stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngState {
    pub key: [u8; 32],
    pub stream: u64,
    pub word_pos: u128,
}

/// Parameters plus optimizer moments of one network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub params: Mlp,
    pub adam: AdamState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub iteration: u64,
    pub seed: u64,
    pub rng: RngState,
    pub beta: f64,
    pub generator: NetworkState,
    pub discriminators: Vec<NetworkState>,
    pub beta_adam: AdamState,
}

/// Tensors of one group as read from disk, before shapes are checked.
#[derive(Debug, Clone)]
pub struct RawGroup {
    pub params: Vec<Matrix>,
    pub adam_step: u64,
    pub first_moment: Vec<Matrix>,
    pub second_moment: Vec<Matrix>,
}

#[derive(Debug, Clone)]
pub struct RawCheckpoint {
    pub iteration: u64,
    pub seed: u64,
    pub rng: RngState,
    pub beta: f64,
    pub generator: RawGroup,
    pub discriminators: Vec<RawGroup>,
    pub beta_adam_step: u64,
    pub beta_moments: (Matrix, Matrix),
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        put_u64(&mut out, self.iteration);
        put_u64(&mut out, self.seed);
        out.extend_from_slice(&self.rng.key);
        put_u64(&mut out, self.rng.stream);
        out.extend_from_slice(&self.rng.word_pos.to_le_bytes());
        out.extend_from_slice(&self.beta.to_le_bytes());
        put_group(&mut out, &self.generator);
        put_u64(&mut out, self.discriminators.len() as u64);
        for d in &self.discriminators {
            put_group(&mut out, d);
        }
        put_u64(&mut out, self.beta_adam.step_count);
        put_tensor(&mut out, &self.beta_adam.first_moment[0]);
        put_tensor(&mut out, &self.beta_adam.second_moment[0]);
        out
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&self.to_bytes()).map_err(|e| Error::io(path, e))
    }
}

impl RawCheckpoint {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(MAGIC.len())? != MAGIC {
            return Err(Error::CheckpointCorrupt("bad magic bytes".into()));
        }
        let iteration = r.u64()?;
        let seed = r.u64()?;
        let key: [u8; 32] = r.take(32)?.try_into().expect("32 bytes");
        let stream = r.u64()?;
        let word_pos = u128::from_le_bytes(r.take(16)?.try_into().expect("16 bytes"));
        let beta = r.f64()?;
        let generator = r.group()?;
        let k = r.count("discriminator count")?;
        let mut discriminators = Vec::with_capacity(k.min(1024));
        for _ in 0..k {
            discriminators.push(r.group()?);
        }
        let beta_adam_step = r.u64()?;
        let beta_moments = (r.tensor()?, r.tensor()?);
        if r.pos != bytes.len() {
            return Err(Error::CheckpointCorrupt(format!(
                "{} trailing bytes",
                bytes.len() - r.pos
            )));
        }
        Ok(Self {
            iteration,
            seed,
            rng: RngState {
                key,
                stream,
                word_pos,
            },
            beta,
            generator,
            discriminators,
            beta_adam_step,
            beta_moments,
        })
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    /// Checks every tensor against freshly built networks and attaches their
    /// activations.
    pub fn into_checkpoint(
        self,
        generator: &Mlp,
        discriminator: &Mlp,
        adam: AdamConfig,
        discriminators: usize,
    ) -> Result<Checkpoint> {
        if self.discriminators.len() != discriminators {
            return Err(Error::ShapeMismatch {
                tensor: "discriminators".into(),
                expected: format!("{discriminators} networks"),
                found: format!("{} networks", self.discriminators.len()),
            });
        }
        let generator = self.generator.into_state(generator, adam, "generator")?;
        let discriminators = self
            .discriminators
            .into_iter()
            .enumerate()
            .map(|(k, g)| g.into_state(discriminator, adam, &format!("discriminator[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        for (name, m) in [("beta.m", &self.beta_moments.0), ("beta.v", &self.beta_moments.1)] {
            if m.shape() != (1, 1) {
                return Err(shape_mismatch(name, (1, 1), m.shape()));
            }
        }
        Ok(Checkpoint {
            iteration: self.iteration,
            seed: self.seed,
            rng: self.rng,
            beta: self.beta,
            generator,
            discriminators,
            beta_adam: AdamState {
                config: adam,
                step_count: self.beta_adam_step,
                first_moment: vec![self.beta_moments.0],
                second_moment: vec![self.beta_moments.1],
            },
        })
    }
}

impl RawGroup {
    fn into_state(self, template: &Mlp, adam: AdamConfig, name: &str) -> Result<NetworkState> {
        let shapes: Vec<_> = template.tensors().map(|t| t.shape()).collect();
        if self.params.len() != shapes.len() {
            return Err(Error::ShapeMismatch {
                tensor: format!("{name} layers"),
                expected: format!("{} tensors", shapes.len()),
                found: format!("{} tensors", self.params.len()),
            });
        }
        for (label, set) in [
            ("", &self.params),
            (".m", &self.first_moment),
            (".v", &self.second_moment),
        ] {
            for (i, (t, s)) in set.iter().zip(&shapes).enumerate() {
                if t.shape() != *s {
                    let kind = if i % 2 == 0 { "weight" } else { "bias" };
                    return Err(shape_mismatch(
                        &format!("{name}.layer{}.{kind}{label}", i / 2),
                        *s,
                        t.shape(),
                    ));
                }
            }
        }
        let mut it = self.params.into_iter();
        let layers = template
            .layers
            .iter()
            .map(|l| Dense {
                weight: it.next().expect("count checked"),
                bias: it.next().expect("count checked"),
                activation: l.activation,
            })
            .collect();
        Ok(NetworkState {
            params: Mlp::new(layers)?,
            adam: AdamState {
                config: adam,
                step_count: self.adam_step,
                first_moment: self.first_moment,
                second_moment: self.second_moment,
            },
        })
    }
}

fn shape_mismatch(tensor: &str, expected: (usize, usize), found: (usize, usize)) -> Error {
    Error::ShapeMismatch {
        tensor: tensor.into(),
        expected: format!("{}x{}", expected.0, expected.1),
        found: format!("{}x{}", found.0, found.1),
    }
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_tensor(out: &mut Vec<u8>, m: &Matrix) {
    put_u64(out, m.rows() as u64);
    put_u64(out, m.cols() as u64);
    for v in m.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn put_group(out: &mut Vec<u8>, s: &NetworkState) {
    let tensors: Vec<&Matrix> = s.params.tensors().collect();
    put_u64(out, tensors.len() as u64);
    for t in &tensors {
        put_tensor(out, t);
    }
    put_u64(out, s.adam.step_count);
    for t in s.adam.first_moment.iter().chain(&s.adam.second_moment) {
        put_tensor(out, t);
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| {
                Error::CheckpointCorrupt(format!("truncated at byte {} (wanted {n} more)", self.pos))
            })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    /// A count that must be satisfiable by the remaining bytes.
    fn count(&mut self, what: &str) -> Result<usize> {
        let n = self.u64()?;
        // every counted item occupies at least 8 bytes
        if n > (self.bytes.len() - self.pos) as u64 / 8 {
            return Err(Error::CheckpointCorrupt(format!("implausible {what} {n}")));
        }
        Ok(n as usize)
    }

    fn tensor(&mut self) -> Result<Matrix> {
        let rows = self.u64()?;
        let cols = self.u64()?;
        let len = rows
            .checked_mul(cols)
            .filter(|&l| l <= (self.bytes.len() - self.pos) as u64 / 8)
            .ok_or_else(|| Error::CheckpointCorrupt(format!("tensor {rows}x{cols} exceeds remaining data")))?
            as usize;
        let data = self
            .take(len * 8)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Matrix::from_vec(rows as usize, cols as usize, data)
    }

    fn group(&mut self) -> Result<RawGroup> {
        let n = self.count("tensor count")?;
        let params = (0..n).map(|_| self.tensor()).collect::<Result<Vec<_>>>()?;
        let adam_step = self.u64()?;
        let first_moment = (0..n).map(|_| self.tensor()).collect::<Result<Vec<_>>>()?;
        let second_moment = (0..n).map(|_| self.tensor()).collect::<Result<Vec<_>>>()?;
        Ok(RawGroup {
            params,
            adam_step,
            first_moment,
            second_moment,
        })
    }
}
