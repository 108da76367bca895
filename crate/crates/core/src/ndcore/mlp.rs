//! Fully connected networks with a hand-written reverse pass.
//!
//! A layer computes `y = f(x W + b)` with `W` stored as `(in, out)` so a batch
//! of row samples multiplies directly. Parameters are exposed as a flat tensor
//! list `[W0, b0, W1, b1, ...]`; gradients, optimizer moments and checkpoints
//! all use that order.

use std::hash::{Hash, Hasher};

use super::matrix::{gemm, Transpose};
use super::{Activation, Matrix};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    /// `(in, out)`
    pub weight: Matrix,
    /// `(1, out)`
    pub bias: Matrix,
    pub activation: Activation,
}

impl Dense {
    pub fn zeros(input: usize, output: usize, activation: Activation) -> Self {
        Self {
            weight: Matrix::zeros(input, output),
            bias: Matrix::zeros(1, output),
            activation,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.weight.cols()
    }
}

/// Parameters of a multilayer perceptron.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

/// Values cached by [`Mlp::forward`] for the reverse pass: the input batch and
/// each layer's post-activation output.
#[derive(Debug, Clone)]
pub struct Tape {
    input: Matrix,
    outputs: Vec<Matrix>,
}

impl Tape {
    pub fn output(&self) -> &Matrix {
        self.outputs.last().unwrap_or(&self.input)
    }

    /// Hash of which Relu units were active for each row. Two forward passes
    /// with equal signatures (almost surely) ran on the same linear piece.
    pub fn relu_signature(&self, net: &Mlp) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for (layer, out) in net.layers.iter().zip(&self.outputs) {
            if layer.activation == Activation::Relu {
                for v in out.as_slice() {
                    (*v > 0.0).hash(&mut h);
                }
            }
        }
        h.finish()
    }

    pub fn input(&self) -> &Matrix {
        &self.input
    }
}

/// Gradients shaped like an [`Mlp`]'s flat tensor list.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGrads {
    pub tensors: Vec<Matrix>,
}

impl MlpGrads {
    pub fn zeros_like(net: &Mlp) -> Self {
        Self {
            tensors: net.tensors().map(|t| Matrix::zeros(t.rows(), t.cols())).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors.iter().all(Matrix::is_finite)
    }

    pub fn max_abs(&self) -> f64 {
        self.tensors.iter().fold(0.0, |m, t| m.max(t.max_abs()))
    }
}

#[derive(Debug, Clone)]
pub struct Backward {
    pub params: MlpGrads,
    /// Gradient with respect to the input batch; `None` when not requested.
    pub input: Option<Matrix>,
}

impl Mlp {
    pub fn new(layers: Vec<Dense>) -> Result<Self> {
        for pair in layers.windows(2) {
            if pair[0].output_dim() != pair[1].input_dim() {
                return Err(Error::DimensionMismatch {
                    op: "mlp layers",
                    lhs: pair[0].weight.shape(),
                    rhs: pair[1].weight.shape(),
                });
            }
        }
        Ok(Self { layers })
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, Dense::input_dim)
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, Dense::output_dim)
    }

    pub fn num_params(&self) -> usize {
        self.tensors().map(Matrix::len).sum()
    }

    pub fn tensors(&self) -> impl Iterator<Item = &Matrix> {
        self.layers.iter().flat_map(|l| [&l.weight, &l.bias])
    }

    pub fn tensors_mut(&mut self) -> impl Iterator<Item = &mut Matrix> {
        self.layers.iter_mut().flat_map(|l| [&mut l.weight, &mut l.bias])
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().all(Matrix::is_finite)
    }

    pub fn forward(&self, input: &Matrix) -> Result<(Matrix, Tape)> {
        if input.cols() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                op: "mlp_forward",
                lhs: input.shape(),
                rhs: (self.input_dim(), self.output_dim()),
            });
        }
        let mut outputs: Vec<Matrix> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let x = outputs.last().unwrap_or(input);
            let mut z = gemm(x, &layer.weight, Transpose::None)?;
            z.add_row_broadcast(&layer.bias)?;
            layer.activation.apply_in_place(&mut z);
            outputs.push(z);
        }
        let out = outputs.last().cloned().unwrap_or_else(|| input.clone());
        Ok((
            out,
            Tape {
                input: input.clone(),
                outputs,
            },
        ))
    }

    /// Output only; skips building a tape.
    pub fn predict(&self, input: &Matrix) -> Result<Matrix> {
        if input.cols() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                op: "mlp_forward",
                lhs: input.shape(),
                rhs: (self.input_dim(), self.output_dim()),
            });
        }
        let mut x = input.clone();
        for layer in &self.layers {
            let mut z = gemm(&x, &layer.weight, Transpose::None)?;
            z.add_row_broadcast(&layer.bias)?;
            layer.activation.apply_in_place(&mut z);
            x = z;
        }
        Ok(x)
    }

    /// Reverse pass for the scalar whose gradient w.r.t. the network output is
    /// `output_grad`.
    pub fn backward(&self, tape: &Tape, output_grad: &Matrix) -> Result<(MlpGrads, Matrix)> {
        let b = self.backward_with(tape, output_grad, true)?;
        Ok((b.params, b.input.expect("input gradient requested")))
    }

    pub fn backward_with(
        &self,
        tape: &Tape,
        output_grad: &Matrix,
        want_input_grad: bool,
    ) -> Result<Backward> {
        if tape.outputs.len() != self.layers.len() {
            return Err(Error::TapeMismatch(format!(
                "tape has {} layers, network has {}",
                tape.outputs.len(),
                self.layers.len()
            )));
        }
        for (l, (layer, out)) in self.layers.iter().zip(&tape.outputs).enumerate() {
            let x_rows = tape.input.rows();
            if out.shape() != (x_rows, layer.output_dim()) {
                return Err(Error::TapeMismatch(format!(
                    "layer {l} output {:?}, expected {:?}",
                    out.shape(),
                    (x_rows, layer.output_dim())
                )));
            }
        }
        if tape.input.cols() != self.input_dim() {
            return Err(Error::TapeMismatch(format!(
                "tape input has {} columns, network expects {}",
                tape.input.cols(),
                self.input_dim()
            )));
        }
        if output_grad.shape() != tape.output().shape() {
            return Err(Error::TapeMismatch(format!(
                "output gradient {:?} vs forward output {:?}",
                output_grad.shape(),
                tape.output().shape()
            )));
        }

        let n = self.layers.len();
        let mut grads: Vec<Matrix> = Vec::with_capacity(2 * n);
        let mut delta = output_grad.clone();
        let mut input_grad = None;
        for l in (0..n).rev() {
            let layer = &self.layers[l];
            layer.activation.backprop_in_place(&mut delta, &tape.outputs[l]);
            let x = if l == 0 { &tape.input } else { &tape.outputs[l - 1] };
            let dw = gemm(x, &delta, Transpose::Left)?;
            let db = delta.column_sums();
            if l > 0 || want_input_grad {
                let dx = gemm(&delta, &layer.weight, Transpose::Right)?;
                if l == 0 {
                    input_grad = Some(dx);
                } else {
                    delta = dx;
                }
            }
            grads.push(db);
            grads.push(dw);
        }
        grads.reverse();
        Ok(Backward {
            params: MlpGrads { tensors: grads },
            input: input_grad,
        })
    }
}
