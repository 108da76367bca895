//! The per-discriminator and generator objectives.
//!
//! For discriminator `k` with microbatch size `m`:
//!
//! ```text
//! V_k = mean log D_k(x_k) + mean log(1 − D_k(G(z_k))) + α · mean log D_k(G(z'_k))
//! ```
//!
//! `D_k` ascends `V_k`; the generator descends
//! `Σ_k [mean log(1 − D_k(G(z_k))) + α · mean log D_k(G(z'_k))]`. Every term is
//! computed from the raw discriminator score through the head's log forms.

use crate::models::DiscriminatorHead;
use crate::ndcore::{Matrix, Mlp, MlpGrads};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Term {
    /// `log D(x)`
    LogProb,
    /// `log(1 − D(x))`
    LogOneMinusProb,
}

/// A contiguous block of rows in a stacked discriminator batch, contributing
/// `weight · Σ term(raw)` to the objective.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Segment {
    pub rows: usize,
    pub term: Term,
    pub weight: f64,
}

/// Objective value, per-segment raw sums, and the gradient w.r.t. each raw
/// score.
pub(crate) fn evaluate_segments(
    raw: &Matrix,
    segments: &[Segment],
    head: DiscriminatorHead,
) -> (f64, Vec<f64>, Matrix) {
    debug_assert_eq!(raw.rows(), segments.iter().map(|s| s.rows).sum::<usize>());
    let mut grad = Matrix::zeros(raw.rows(), 1);
    let mut value = 0.0;
    let mut sums = Vec::with_capacity(segments.len());
    let mut row = 0;
    for seg in segments {
        let mut sum = 0.0;
        for r in row..row + seg.rows {
            let s = raw.get(r, 0);
            let (v, d) = match seg.term {
                Term::LogProb => (head.log_prob(s), head.dlog_prob(s)),
                Term::LogOneMinusProb => (head.log_one_minus_prob(s), head.dlog_one_minus_prob(s)),
            };
            sum += v;
            grad.set(r, 0, seg.weight * d);
        }
        if seg.rows > 0 {
            value += seg.weight * sum;
        }
        sums.push(sum);
        row += seg.rows;
    }
    (value, sums, grad)
}

fn check_finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteLoss(v))
    }
}

fn check_micro(real: Option<&Matrix>, own: &Matrix, complement: &Matrix) -> Result<usize> {
    let m = own.rows();
    if m == 0 {
        return Err(Error::EmptyBatch);
    }
    if let Some(real) = real {
        if real.rows() != m {
            return Err(Error::DimensionMismatch {
                op: "d_loss real microbatch",
                lhs: real.shape(),
                rhs: own.shape(),
            });
        }
    }
    if complement.rows() != 0 && complement.rows() != m {
        return Err(Error::DimensionMismatch {
            op: "complement microbatch",
            lhs: complement.shape(),
            rhs: own.shape(),
        });
    }
    Ok(m)
}

pub(crate) fn discriminator_segments(m: usize, complement: usize, alpha: f64) -> [Segment; 3] {
    let w = 1.0 / m as f64;
    [
        Segment {
            rows: m,
            term: Term::LogProb,
            weight: w,
        },
        Segment {
            rows: m,
            term: Term::LogOneMinusProb,
            weight: w,
        },
        Segment {
            rows: complement,
            term: Term::LogProb,
            weight: alpha * w,
        },
    ]
}

pub(crate) fn generator_segments(m: usize, complement: usize, alpha: f64) -> [Segment; 2] {
    let w = 1.0 / m as f64;
    [
        Segment {
            rows: m,
            term: Term::LogOneMinusProb,
            weight: w,
        },
        Segment {
            rows: complement,
            term: Term::LogProb,
            weight: alpha * w,
        },
    ]
}

/// Value and parameter gradient of `V_k` for one discriminator. An empty
/// complement (single discriminator) drops the α term.
pub fn d_loss_and_grad(
    d: &Mlp,
    real: &Matrix,
    own: &Matrix,
    complement: &Matrix,
    alpha: f64,
    head: DiscriminatorHead,
) -> Result<(f64, MlpGrads)> {
    let m = check_micro(Some(real), own, complement)?;
    let stacked = Matrix::vstack(&[real, own, complement])?;
    let (raw, tape) = d.forward(&stacked)?;
    let (value, _, raw_grad) =
        evaluate_segments(&raw, &discriminator_segments(m, complement.rows(), alpha), head);
    let back = d.backward_with(&tape, &raw_grad, false)?;
    Ok((check_finite(value)?, back.params))
}

pub fn d_loss(
    d: &Mlp,
    real: &Matrix,
    own: &Matrix,
    complement: &Matrix,
    alpha: f64,
    head: DiscriminatorHead,
) -> Result<f64> {
    let m = check_micro(Some(real), own, complement)?;
    let stacked = Matrix::vstack(&[real, own, complement])?;
    let raw = d.predict(&stacked)?;
    let (value, _, _) = evaluate_segments(&raw, &discriminator_segments(m, complement.rows(), alpha), head);
    check_finite(value)
}

/// Per-discriminator contribution to the generator loss.
#[derive(Debug, Clone)]
pub struct GeneratorTerm {
    pub value: f64,
    /// `mean log D_k(G(z'_k))`, this discriminator's share of `dLoss/dα`.
    pub dloss_dalpha: f64,
    /// Gradient w.r.t. the own-microbatch fake rows.
    pub own_grad: Matrix,
    /// Gradient w.r.t. the complement fake rows.
    pub complement_grad: Matrix,
}

pub fn generator_term(
    d: &Mlp,
    own: &Matrix,
    complement: &Matrix,
    alpha: f64,
    head: DiscriminatorHead,
) -> Result<GeneratorTerm> {
    let m = check_micro(None, own, complement)?;
    let stacked = Matrix::vstack(&[own, complement])?;
    let (raw, tape) = d.forward(&stacked)?;
    let (value, sums, raw_grad) =
        evaluate_segments(&raw, &generator_segments(m, complement.rows(), alpha), head);
    let back = d.backward_with(&tape, &raw_grad, true)?;
    let input = back.input.expect("input gradient requested");
    let dloss_dalpha = if complement.rows() > 0 {
        sums[1] / m as f64
    } else {
        0.0
    };
    Ok(GeneratorTerm {
        value: check_finite(value)?,
        dloss_dalpha,
        own_grad: input.slice_rows(0..m),
        complement_grad: input.slice_rows(m..input.rows()),
    })
}

/// `(loss, dLoss/dα)` of the generator against all discriminators.
pub fn g_loss(
    discriminators: &[Mlp],
    own_per_k: &[Matrix],
    complement_per_k: &[Matrix],
    alpha: f64,
    head: DiscriminatorHead,
) -> Result<(f64, f64)> {
    if discriminators.len() != own_per_k.len() || own_per_k.len() != complement_per_k.len() {
        return Err(Error::DimensionMismatch {
            op: "g_loss",
            lhs: (discriminators.len(), own_per_k.len()),
            rhs: (complement_per_k.len(), 0),
        });
    }
    let mut loss = 0.0;
    let mut dalpha = 0.0;
    for ((d, own), comp) in discriminators.iter().zip(own_per_k).zip(complement_per_k) {
        let m = check_micro(None, own, comp)?;
        let stacked = Matrix::vstack(&[own, comp])?;
        let raw = d.predict(&stacked)?;
        let (value, sums, _) = evaluate_segments(&raw, &generator_segments(m, comp.rows(), alpha), head);
        loss += value;
        if comp.rows() > 0 {
            dalpha += sums[1] / m as f64;
        }
    }
    Ok((check_finite(loss)?, dalpha))
}
