use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest diagonal jitter tried before a fit is declared singular.
pub const MAX_JITTER: f64 = 1e-4;
const FIRST_JITTER: f64 = 1e-10;

/// Squared-exponential covariance `sf2 * exp(-|x1 - x2|^2 / (2 l^2))`.
pub fn kernel_se<F: Scalar>(x1: &[F], x2: &[F], signal_var: F, lengthscale: F) -> F {
    debug_assert_eq!(x1.len(), x2.len());
    let d2: F = x1.iter().zip(x2).map(|(&a, &b)| (a - b) * (a - b)).sum();
    signal_var * (-d2 / (F::lit(2.0) * lengthscale * lengthscale)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams<F> {
    pub signal_var: F,
    pub lengthscale: F,
    pub noise_var: F,
}

impl<F: Scalar> KernelParams<F> {
    pub fn new(signal_var: F, lengthscale: F, noise_var: F) -> Self {
        KernelParams {
            signal_var,
            lengthscale,
            noise_var,
        }
    }

    /// Signal variance from the sample variance of `ys` (floored at 1e-4),
    /// with the given lengthscale and noise.
    pub fn from_targets(ys: &[F], lengthscale: F, noise_var: F) -> Self {
        let floor = F::lit(1e-4);
        let var = if ys.is_empty() {
            floor
        } else {
            let n = F::count(ys.len());
            let mean = ys.iter().copied().sum::<F>() / n;
            (ys.iter().map(|&y| (y - mean) * (y - mean)).sum::<F>() / n).max(floor)
        };
        Self::new(var, lengthscale, noise_var)
    }

    pub fn kernel(&self, x1: &[F], x2: &[F]) -> F {
        kernel_se(x1, x2, self.signal_var, self.lengthscale)
    }
}

/// Gaussian-process regression with a constant prior mean (the mean of the
/// observed targets) and a cached Cholesky factor of `K + noise I`.
#[derive(Debug, Clone)]
pub struct GpModel<F> {
    params: KernelParams<F>,
    xs: Vec<Vec<F>>,
    mean: F,
    /// Lower triangular factor, row-major `n * n`.
    chol: Vec<F>,
    /// `(K + noise I)^-1 (y - mean)`.
    alpha: Vec<F>,
    centered: Vec<F>,
    jitter: F,
}

impl<F: Scalar> GpModel<F> {
    /// Model with no data: posterior equals the prior `(mean, signal_var)`.
    pub fn prior(params: KernelParams<F>, mean: F) -> Self {
        GpModel {
            params,
            xs: Vec::new(),
            mean,
            chol: Vec::new(),
            alpha: Vec::new(),
            centered: Vec::new(),
            jitter: F::zero(),
        }
    }

    /// Fits to `(xs[i], ys[i])`. If the factorization fails, diagonal jitter
    /// is raised from 1e-10 by factors of ten up to 1e-4.
    pub fn fit(xs: &[Vec<F>], ys: &[F], params: KernelParams<F>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Invalid(format!("{} inputs but {} targets", xs.len(), ys.len())));
        }
        if xs.is_empty() {
            return Err(Error::Invalid("fit needs at least one observation".into()));
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::Invalid("non-finite target".into()));
        }
        let n = xs.len();
        let mean = ys.iter().copied().sum::<F>() / F::count(n);
        let centered: Vec<F> = ys.iter().map(|&y| y - mean).collect();

        let mut k = vec![F::zero(); n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = params.kernel(&xs[i], &xs[j]);
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
            k[i * n + i] = k[i * n + i] + params.noise_var;
        }

        let mut jitter = F::zero();
        let chol = loop {
            if let Some(l) = cholesky(&k, n, jitter) {
                break l;
            }
            jitter = if jitter == F::zero() {
                F::lit(FIRST_JITTER)
            } else {
                jitter * F::lit(10.0)
            };
            if jitter > F::lit(MAX_JITTER * 1.000_001) {
                return Err(Error::SingularKernel { jitter: MAX_JITTER });
            }
        };
        let alpha = cholesky_solve(&chol, n, &centered);
        Ok(GpModel {
            params,
            xs: xs.to_vec(),
            mean,
            chol,
            alpha,
            centered,
            jitter,
        })
    }

    pub fn params(&self) -> &KernelParams<F> {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn prior_mean(&self) -> F {
        self.mean
    }

    /// Diagonal jitter that was needed on top of the noise variance.
    pub fn jitter(&self) -> F {
        self.jitter
    }

    /// Posterior mean and latent variance at `x`; the variance is clamped at 0.
    pub fn posterior(&self, x: &[F]) -> (F, F) {
        let n = self.xs.len();
        let prior_var = self.params.signal_var;
        if n == 0 {
            return (self.mean, prior_var);
        }
        let ks: Vec<F> = self.xs.iter().map(|xi| self.params.kernel(xi, x)).collect();
        let mean = self.mean + ks.iter().zip(&self.alpha).map(|(&a, &b)| a * b).sum::<F>();
        let v = forward_subst(&self.chol, n, &ks);
        let var = prior_var - v.iter().map(|&a| a * a).sum::<F>();
        (mean, var.max(F::zero()))
    }

    /// `log p(y | X)` of the centered targets under the fitted kernel.
    pub fn log_marginal_likelihood(&self) -> F {
        let n = self.xs.len();
        let fit: F = self.centered.iter().zip(&self.alpha).map(|(&a, &b)| a * b).sum();
        let log_det: F = (0..n).map(|i| self.chol[i * n + i].ln()).sum();
        -F::lit(0.5) * fit - log_det - F::lit(0.5) * F::count(n) * (F::lit(2.0) * F::PI()).ln()
    }
}

/// Lower Cholesky factor of `a + jitter I`, or `None` if not positive definite.
fn cholesky<F: Scalar>(a: &[F], n: usize, jitter: F) -> Option<Vec<F>> {
    let mut l = vec![F::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            if i == j {
                s = s + jitter;
            }
            for k in 0..j {
                s = s - l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s.is_finite() && s > F::zero()) {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Solves `L y = b`.
fn forward_subst<F: Scalar>(l: &[F], n: usize, b: &[F]) -> Vec<F> {
    let mut y = vec![F::zero(); n];
    for i in 0..n {
        let s = (0..i).fold(b[i], |s, k| s - l[i * n + k] * y[k]);
        y[i] = s / l[i * n + i];
    }
    y
}

/// Solves `L L^T x = b`.
fn cholesky_solve<F: Scalar>(l: &[F], n: usize, b: &[F]) -> Vec<F> {
    let mut x = forward_subst(l, n, b);
    for i in (0..n).rev() {
        let s = (i + 1..n).fold(x[i], |s, k| s - l[k * n + i] * x[k]);
        x[i] = s / l[i * n + i];
    }
    x
}
