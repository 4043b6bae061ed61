//! Gaussian, Gamma and Beta draws on top of [`RngStream`].

use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::{check_dim, CholeskyFactor};
use super::rng::RngStream;
use crate::error::{Error, Result};

#[inline]
pub fn standard_normal(rng: &mut RngStream) -> f64 {
    rng.sample(StandardNormal)
}

pub fn fill_standard_normal(rng: &mut RngStream, out: &mut [f64]) {
    for z in out.iter_mut() {
        *z = standard_normal(rng);
    }
}

/// Draws `mean + scale · L z` with `z ~ N(0, I)`, i.e. a sample from
/// `N(mean, scale² L Lᵀ)` where `factor` is the Cholesky factor of the covariance.
pub fn sample_mvn(mean: &[f64], scale: f64, factor: &CholeskyFactor, rng: &mut RngStream) -> Result<Vec<f64>> {
    check_dim(factor.dim(), mean.len())?;
    check_scale(scale)?;
    let mut z = vec![0.0; mean.len()];
    fill_standard_normal(rng, &mut z);
    let mut out = vec![0.0; mean.len()];
    factor.mul_vec_into(&z, &mut out);
    for (o, m) in out.iter_mut().zip(mean) {
        *o = m + scale * *o;
    }
    Ok(out)
}

/// Draws from `N(mean, scale² B⁻¹)` given the Cholesky factor `L` of the
/// precision matrix `B`, using `L⁻ᵀ z` as the covariance square root.
/// Costs one triangular solve instead of a factorization of `B⁻¹`.
pub fn sample_mvn_precision(
    mean: &[f64],
    scale: f64,
    precision_factor: &CholeskyFactor,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; mean.len()];
    sample_mvn_precision_into(mean, scale, precision_factor, rng, &mut out)?;
    Ok(out)
}

pub fn sample_mvn_precision_into(
    mean: &[f64],
    scale: f64,
    precision_factor: &CholeskyFactor,
    rng: &mut RngStream,
    out: &mut [f64],
) -> Result<()> {
    check_dim(precision_factor.dim(), mean.len())?;
    check_dim(mean.len(), out.len())?;
    check_scale(scale)?;
    fill_standard_normal(rng, out);
    precision_factor.solve_upper_in_place(out);
    for (o, m) in out.iter_mut().zip(mean) {
        *o = m + scale * *o;
    }
    Ok(())
}

fn check_scale(scale: f64) -> Result<()> {
    if scale >= 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("scale must be finite and >= 0, got {scale}")))
    }
}

/// Gamma(shape, 1) by Marsaglia–Tsang acceptance–rejection; shapes below one
/// are boosted with `Gamma(shape + 1) · U^(1/shape)`.
pub fn sample_gamma(shape: f64, rng: &mut RngStream) -> Result<f64> {
    if !(shape > 0.0 && shape.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma shape must be > 0, got {shape}")));
    }
    if shape < 1.0 {
        let g = marsaglia_tsang(shape + 1.0, rng);
        let u: f64 = 1.0 - rng.uniform();
        return Ok(g * u.powf(1.0 / shape));
    }
    Ok(marsaglia_tsang(shape, rng))
}

fn marsaglia_tsang(shape: f64, rng: &mut RngStream) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let (x, v) = loop {
            let x = standard_normal(rng);
            let v = 1.0 + c * x;
            if v > 0.0 {
                break (x, v * v * v);
            }
        };
        let u = rng.uniform();
        if u < 1.0 - 0.0331 * x * x * x * x {
            return d * v;
        }
        if u > 0.0 && u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Beta(s, f) as `X / (X + Y)` with `X ~ Gamma(s)`, `Y ~ Gamma(f)`.
pub fn sample_beta(s: f64, f: f64, rng: &mut RngStream) -> Result<f64> {
    if !(s > 0.0 && f > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta parameters must be > 0, got ({s}, {f})"
        )));
    }
    let x = sample_gamma(s, rng)?;
    let y = sample_gamma(f, rng)?;
    Ok(x / (x + y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{cholesky, SpdMatrix};

    fn mean_of(n: usize, mut draw: impl FnMut() -> f64) -> f64 {
        (0..n).map(|_| draw()).sum::<f64>() / n as f64
    }

    #[test]
    fn zero_scale_returns_mean_exactly() {
        let mut rng = RngStream::new(1);
        let mean = [0.1, -3.5, 7.25];
        let l = CholeskyFactor::identity(3);
        assert_eq!(sample_mvn(&mean, 0.0, &l, &mut rng).unwrap(), mean.to_vec());
        assert_eq!(sample_mvn_precision(&mean, 0.0, &l, &mut rng).unwrap(), mean.to_vec());
    }

    #[test]
    fn identity_transform_passes_normals_through() {
        let mut a = RngStream::new(9);
        let mut b = RngStream::new(9);
        let x = sample_mvn(&[0.0, 0.0], 1.0, &CholeskyFactor::identity(2), &mut a).unwrap();
        let z = [standard_normal(&mut b), standard_normal(&mut b)];
        assert_eq!(x, z.to_vec());
    }

    #[test]
    fn dimension_mismatch() {
        let mut rng = RngStream::new(1);
        assert!(matches!(
            sample_mvn(&[0.0], 1.0, &CholeskyFactor::identity(2), &mut rng),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn beta_rejects_bad_parameters() {
        let mut rng = RngStream::new(1);
        assert!(sample_beta(0.0, 1.0, &mut rng).is_err());
        assert!(sample_beta(1.0, -2.0, &mut rng).is_err());
    }

    #[test]
    fn beta_uniform_mean() {
        let mut rng = RngStream::new(21);
        let m = mean_of(100_000, || sample_beta(1.0, 1.0, &mut rng).unwrap());
        assert!((m - 0.5).abs() < 0.01, "{m}");
    }

    #[test]
    fn beta_three_seven_mean() {
        let mut rng = RngStream::new(22);
        let m = mean_of(100_000, || sample_beta(3.0, 7.0, &mut rng).unwrap());
        assert!((m - 0.3).abs() < 0.01, "{m}");
    }

    #[test]
    fn beta_concentrated_tail() {
        // P(X <= 0.99) = 0.99^1000 ≈ 4.3e-5 for Beta(1000, 1).
        let mut rng = RngStream::new(23);
        let hits = (0..10_000)
            .filter(|_| sample_beta(1000.0, 1.0, &mut rng).unwrap() > 0.99)
            .count();
        assert!(hits as f64 / 10_000.0 > 0.99);
    }

    #[test]
    fn gamma_small_shape_mean() {
        let mut rng = RngStream::new(24);
        let m = mean_of(100_000, || sample_gamma(0.3, &mut rng).unwrap());
        assert!((m - 0.3).abs() < 0.01, "{m}");
    }

    #[test]
    fn precision_route_matches_covariance_route_in_distribution() {
        let b = SpdMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let cov = cholesky(&b).unwrap().inverse();
        let cov_factor = cholesky(&cov).unwrap();
        let prec_factor = cholesky(&b).unwrap();
        let n = 100_000;
        let mut rng = RngStream::new(31);
        let mut acc_a = [0.0; 3];
        let mut acc_b = [0.0; 3];
        for _ in 0..n {
            let a = sample_mvn(&[0.0, 0.0], 1.0, &cov_factor, &mut rng).unwrap();
            let p = sample_mvn_precision(&[0.0, 0.0], 1.0, &prec_factor, &mut rng).unwrap();
            acc_a[0] += a[0] * a[0];
            acc_a[1] += a[0] * a[1];
            acc_a[2] += a[1] * a[1];
            acc_b[0] += p[0] * p[0];
            acc_b[1] += p[0] * p[1];
            acc_b[2] += p[1] * p[1];
        }
        let target = [cov.get(0, 0), cov.get(0, 1), cov.get(1, 1)];
        for i in 0..3 {
            assert!((acc_a[i] / n as f64 - target[i]).abs() < 0.02);
            assert!((acc_b[i] / n as f64 - target[i]).abs() < 0.02);
        }
    }
}
