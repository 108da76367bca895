//! Central-difference verification of analytic gradients.

use rand::SeedableRng;

use super::{Mlp, MlpGrads};
use crate::{Error, Result, RunRng};

/// Which parameter coordinates get perturbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinates {
    All,
    /// At most `per_tensor` coordinates of each tensor, picked by a seeded
    /// draw. Keeps checks on the 49k-parameter generator affordable.
    Sample {
        per_tensor: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    pub checked: usize,
    /// Coordinates left out because `θ ± ε` straddle a kink.
    pub skipped: usize,
    /// `(tensor index, flat offset)` of the worst coordinate.
    pub worst: (usize, usize),
}

/// `|a - n| / max(|a|, |n|, 1e-8)`
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Compares `analytic` against `(L(θ+ε) − L(θ−ε)) / 2ε` for each selected
/// coordinate of `params` and returns the worst relative error.
pub fn grad_check<F>(
    params: &Mlp,
    analytic: &MlpGrads,
    mut loss: F,
    epsilon: f64,
    coords: Coordinates,
) -> Result<GradCheckReport>
where
    F: FnMut(&Mlp) -> f64,
{
    grad_check_piecewise(params, analytic, |p| (loss(p), 0), epsilon, coords)
}

/// [`grad_check`] for piecewise-smooth losses. `loss` also returns a
/// signature of the active linear piece (see [`Tape::relu_signature`]);
/// coordinates whose `θ + ε` and `θ − ε` signatures differ are skipped, since
/// a central difference across a Relu kink measures neither side's slope.
///
/// [`Tape::relu_signature`]: super::Tape::relu_signature
pub fn grad_check_piecewise<F>(
    params: &Mlp,
    analytic: &MlpGrads,
    mut loss: F,
    epsilon: f64,
    coords: Coordinates,
) -> Result<GradCheckReport>
where
    F: FnMut(&Mlp) -> (f64, u64),
{
    assert!(
        epsilon > 0.0 && epsilon <= 1e-2,
        "epsilon must lie in (0, 1e-2], got {epsilon}"
    );
    let shapes: Vec<_> = params.tensors().map(|t| t.shape()).collect();
    if analytic.tensors.len() != shapes.len()
        || analytic.tensors.iter().zip(&shapes).any(|(g, s)| g.shape() != *s)
    {
        return Err(Error::TapeMismatch(
            "analytic gradient does not match parameter shapes".into(),
        ));
    }

    let mut rng = match coords {
        Coordinates::Sample { seed, .. } => Some(RunRng::seed_from_u64(seed)),
        Coordinates::All => None,
    };

    let mut probe = params.clone();
    let mut report = GradCheckReport {
        max_relative_error: 0.0,
        checked: 0,
        skipped: 0,
        worst: (0, 0),
    };
    for (ti, shape) in shapes.iter().enumerate() {
        let len = shape.0 * shape.1;
        let offsets: Vec<usize> = match (coords, rng.as_mut()) {
            (Coordinates::Sample { per_tensor, .. }, Some(rng)) if per_tensor < len => {
                let mut v = rand::seq::index::sample(rng, len, per_tensor).into_vec();
                v.sort_unstable();
                v
            }
            _ => (0..len).collect(),
        };
        for off in offsets {
            let original = tensor_mut(&mut probe, ti).as_slice()[off];
            tensor_mut(&mut probe, ti).as_mut_slice()[off] = original + epsilon;
            let (plus, sig_plus) = loss(&probe);
            tensor_mut(&mut probe, ti).as_mut_slice()[off] = original - epsilon;
            let (minus, sig_minus) = loss(&probe);
            tensor_mut(&mut probe, ti).as_mut_slice()[off] = original;
            for v in [plus, minus] {
                if !v.is_finite() {
                    return Err(Error::NonFiniteLoss(v));
                }
            }
            if sig_plus != sig_minus {
                report.skipped += 1;
                continue;
            }
            let numeric = (plus - minus) / (2.0 * epsilon);
            let err = relative_error(analytic.tensors[ti].as_slice()[off], numeric);
            if err > report.max_relative_error {
                report.max_relative_error = err;
                report.worst = (ti, off);
            }
            report.checked += 1;
        }
    }
    Ok(report)
}

fn tensor_mut(net: &mut Mlp, index: usize) -> &mut super::Matrix {
    let layer = &mut net.layers[index / 2];
    if index.is_multiple_of(2) {
        &mut layer.weight
    } else {
        &mut layer.bias
    }
}
