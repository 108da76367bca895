//! Fréchet distance between Gaussian fits of 2D point sets.

use crate::ndcore::Matrix;
use crate::{Error, Result};

/// Eigenvalues below this are treated as numerical noise around zero.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Symmetric 2x2 matrix `[[a, b], [b, c]]`.
pub type Sym2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMoments {
    pub mean: [f64; 2],
    pub cov: Sym2,
    pub n: usize,
}

/// Sample mean and unbiased (`n − 1`) covariance of an `n x 2` matrix.
pub fn fit_moments(samples: &Matrix) -> Result<GaussianMoments> {
    let n = samples.rows();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    if samples.cols() != 2 {
        return Err(Error::DimensionMismatch {
            op: "fit_moments",
            lhs: samples.shape(),
            rhs: (n, 2),
        });
    }
    let mut mean = [0.0; 2];
    for r in samples.iter_rows() {
        mean[0] += r[0];
        mean[1] += r[1];
    }
    mean[0] /= n as f64;
    mean[1] /= n as f64;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for r in samples.iter_rows() {
        let dx = r[0] - mean[0];
        let dy = r[1] - mean[1];
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let k = (n - 1) as f64;
    Ok(GaussianMoments {
        mean,
        cov: [[sxx / k, sxy / k], [sxy / k, syy / k]],
        n,
    })
}

fn trace(m: &Sym2) -> f64 {
    m[0][0] + m[1][1]
}

fn det(m: &Sym2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn mul2(a: &Sym2, b: &Sym2) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Smallest eigenvalue of a symmetric 2x2 matrix.
pub fn min_eigenvalue(m: &Sym2) -> f64 {
    let half_tr = 0.5 * trace(m);
    let disc = (0.25 * (m[0][0] - m[1][1]).powi(2) + m[0][1] * m[0][1]).sqrt();
    half_tr - disc
}

fn check_psd(m: &Sym2) -> Result<()> {
    let scale = m[0][0].abs().max(m[1][1].abs()).max(1.0);
    if (m[0][1] - m[1][0]).abs() > 1e-12 * scale {
        return Err(Error::NonPsdCovariance {
            min_eigenvalue: f64::NAN,
        });
    }
    let lo = min_eigenvalue(m);
    if lo.is_nan() || lo < -PSD_TOLERANCE {
        return Err(Error::NonPsdCovariance { min_eigenvalue: lo });
    }
    Ok(())
}

/// Principal square root of a symmetric PSD 2x2 matrix via
/// `√M = (M + √det·I) / √(tr + 2√det)`.
pub fn sqrt_psd(m: &Sym2) -> Sym2 {
    let s = det(m).max(0.0).sqrt();
    let t = (trace(m) + 2.0 * s).max(0.0).sqrt();
    if t == 0.0 {
        return [[0.0; 2]; 2];
    }
    let off = 0.5 * (m[0][1] + m[1][0]) / t;
    [[(m[0][0] + s) / t, off], [off, (m[1][1] + s) / t]]
}

/// Square root of `A^{1/2} B A^{1/2}`, the symmetrized form of `(AB)^{1/2}`.
pub fn sqrt_of_product(a: &Sym2, b: &Sym2) -> Sym2 {
    let ra = sqrt_psd(a);
    let p = mul2(&mul2(&ra, b), &ra);
    let off = 0.5 * (p[0][1] + p[1][0]);
    sqrt_psd(&[[p[0][0], off], [off, p[1][1]]])
}

/// `‖μ₁ − μ₂‖² + tr(Σ₁ + Σ₂ − 2 (Σ₁^{1/2} Σ₂ Σ₁^{1/2})^{1/2})`, clamped at 0.
pub fn frechet_distance(a: &GaussianMoments, b: &GaussianMoments) -> Result<f64> {
    check_psd(&a.cov)?;
    check_psd(&b.cov)?;
    let dm = (a.mean[0] - b.mean[0]).powi(2) + (a.mean[1] - b.mean[1]).powi(2);
    let cross = trace(&sqrt_of_product(&a.cov, &b.cov));
    Ok((dm + trace(&a.cov) + trace(&b.cov) - 2.0 * cross).max(0.0))
}
