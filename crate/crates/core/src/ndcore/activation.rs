use serde::{Deserialize, Serialize};

use super::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Linear,
    Softplus,
    Sigmoid,
    Tanh,
}

/// `ln(1 + e^v)` without overflow.
#[inline]
pub fn softplus(v: f64) -> f64 {
    v.max(0.0) + (-v.abs()).exp().ln_1p()
}

#[inline]
pub fn sigmoid(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

impl Activation {
    #[inline]
    pub fn apply_scalar(self, v: f64) -> f64 {
        match self {
            Activation::Relu => v.max(0.0),
            Activation::Linear => v,
            Activation::Softplus => softplus(v),
            Activation::Sigmoid => sigmoid(v),
            Activation::Tanh => v.tanh(),
        }
    }

    /// Derivative expressed through the activation's output `y = f(v)`.
    #[inline]
    pub fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Linear => 1.0,
            // y = ln(1 + e^v)  =>  sigmoid(v) = 1 - e^{-y}
            Activation::Softplus => -(-y).exp_m1(),
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Tanh => 1.0 - y * y,
        }
    }

    pub fn apply_in_place(self, x: &mut Matrix) {
        if self == Activation::Linear {
            return;
        }
        for v in x.as_mut_slice() {
            *v = self.apply_scalar(*v);
        }
    }

    /// Turns an output gradient into a pre-activation gradient.
    pub fn backprop_in_place(self, grad: &mut Matrix, output: &Matrix) {
        if self == Activation::Linear {
            return;
        }
        for (g, &y) in grad.as_mut_slice().iter_mut().zip(output.as_slice()) {
            *g *= self.derivative_from_output(y);
        }
    }
}

pub fn apply_activation(x: &Matrix, tag: Activation) -> Matrix {
    let mut out = x.clone();
    tag.apply_in_place(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relu_clips_negatives() {
        let x = Matrix::from_vec(1, 3, vec![-1.0, 0.0, 2.0]).unwrap();
        assert_eq!(
            apply_activation(&x, Activation::Relu).as_slice(),
            &[0.0, 0.0, 2.0]
        );
    }

    #[test]
    fn scalar_values() {
        assert_eq!(Activation::Sigmoid.apply_scalar(0.0), 0.5);
        assert!((Activation::Softplus.apply_scalar(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((Activation::Softplus.apply_scalar(0.0) - std::f64::consts::LN_2).abs() < 1e-6);
        assert_eq!(Activation::Tanh.apply_scalar(0.0), 0.0);
        assert_eq!(Activation::Linear.apply_scalar(-3.5), -3.5);
    }

    #[test]
    fn softplus_is_finite_at_extremes() {
        for v in [-1e6, -710.0, -30.0, 0.0, 30.0, 710.0, 1e6] {
            let y = softplus(v);
            assert!(y.is_finite(), "softplus({v}) = {y}");
            assert!(y >= 0.0);
        }
        assert_eq!(softplus(1e6), 1e6);
        assert!(sigmoid(-1e6) >= 0.0 && sigmoid(1e6) <= 1.0);
    }

    #[test]
    fn derivatives_match_central_differences() {
        let h = 1e-6;
        for tag in [
            Activation::Softplus,
            Activation::Sigmoid,
            Activation::Tanh,
            Activation::Linear,
        ] {
            for v in [-3.0, -0.4, 0.3, 2.5] {
                let numeric = (tag.apply_scalar(v + h) - tag.apply_scalar(v - h)) / (2.0 * h);
                let analytic = tag.derivative_from_output(tag.apply_scalar(v));
                assert!((numeric - analytic).abs() < 1e-8, "{tag:?} at {v}");
            }
        }
        assert_eq!(Activation::Relu.derivative_from_output(0.0), 0.0);
        assert_eq!(Activation::Relu.derivative_from_output(0.7), 1.0);
    }
}
