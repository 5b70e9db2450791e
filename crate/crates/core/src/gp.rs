//! Constant-mean Gaussian process with an ARD squared-exponential kernel.
//!
//! The covariance between `a` and `b` is `τ²·exp(-Σ_p (a_p - b_p)² / ℓ_p)`.
//! A small nugget `g` is added to the diagonal of the correlation matrix for
//! numerical stability; the signal scale `τ²` is profiled out of the
//! likelihood and lengthscales are fitted by maximum likelihood in log space.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{contract, Error, Result};
use crate::optim::{minimize_box, BoxOptions};
use crate::points::Points;

/// Kernel hyperparameters.
#[derive(Clone, Debug, PartialEq)]
pub struct GpHyper {
    pub lengthscales: Vec<f64>,
    /// Signal variance `τ²`.
    pub signal_scale: f64,
    pub nugget: f64,
}

impl GpHyper {
    pub fn new(lengthscales: Vec<f64>, signal_scale: f64, nugget: f64) -> Result<Self> {
        let h = Self {
            lengthscales,
            signal_scale,
            nugget,
        };
        h.validate()?;
        Ok(h)
    }

    /// The same lengthscale in every dimension, unit scale, default nugget.
    pub fn isotropic(dim: usize, lengthscale: f64) -> Self {
        Self {
            lengthscales: vec![lengthscale; dim],
            signal_scale: 1.0,
            nugget: GpConfig::default().nugget,
        }
    }

    pub fn dim(&self) -> usize {
        self.lengthscales.len()
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !self.lengthscales.iter().all(|&l| positive(l)) {
            return Err(contract("lengthscales must be positive and finite"));
        }
        if !positive(self.signal_scale) || !positive(self.nugget) {
            return Err(contract("signal scale and nugget must be positive and finite"));
        }
        Ok(())
    }
}

/// Lower limit on the profiled signal variance, so constant outputs still
/// leave a nonzero predictive spread.
pub const SIGNAL_SCALE_FLOOR: f64 = 1e-12;

/// Fitting configuration.
#[derive(Clone, Debug)]
pub struct GpConfig {
    /// Starting jitter on the correlation diagonal.
    pub nugget: f64,
    /// Jitter is raised tenfold on factorization failure up to this value.
    pub max_nugget: f64,
    pub lengthscale_min: f64,
    pub lengthscale_max: f64,
    pub optimizer: BoxOptions,
}

impl Default for GpConfig {
    fn default() -> Self {
        Self {
            nugget: 1e-8,
            max_nugget: 1e-4,
            lengthscale_min: 1e-3,
            lengthscale_max: 10.0,
            optimizer: BoxOptions::default(),
        }
    }
}

/// Squared-exponential covariance between `a` and `b`.
pub fn kernel(hyper: &GpHyper, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() != hyper.dim() {
        return Err(contract("kernel arguments and lengthscales differ in dimension"));
    }
    if !hyper.lengthscales.iter().all(|&l| l > 0.0) {
        return Err(contract("lengthscales must be positive"));
    }
    Ok(hyper.signal_scale * correlation(&hyper.lengthscales, a, b))
}

#[inline]
fn correlation(ls: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let s: f64 = a.iter().zip(b).zip(ls).map(|((x, y), l)| (x - y) * (x - y) / l).sum();
    (-s).exp()
}

fn correlation_matrix(x: &Points, ls: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut r = DMatrix::identity(n, n);
    for i in 0..n {
        for j in 0..i {
            let v = correlation(ls, x.row(i), x.row(j));
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    r
}

/// Cholesky factor of `R + g·I`, escalating `g` tenfold on failure.
fn factor(r: &DMatrix<f64>, config: &GpConfig) -> Option<(Cholesky<f64, Dyn>, f64)> {
    let mut g = config.nugget;
    while g <= config.max_nugget * (1.0 + 1e-9) {
        let mut a = r.clone();
        for i in 0..a.nrows() {
            a[(i, i)] += g;
        }
        if let Some(c) = Cholesky::new(a) {
            if c.l_dirty().diagonal().iter().all(|d| d.is_finite() && *d > 0.0) {
                return Some((c, g));
            }
        }
        g *= 10.0;
    }
    None
}

fn check_data(x: &Points, y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(contract(format!("{} inputs but {} outputs", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(contract("a GP fit needs at least two points"));
    }
    if !x.is_finite() || !y.iter().all(|v| v.is_finite()) {
        return Err(contract("GP training data must be finite"));
    }
    Ok(())
}

fn centered(y: &[f64]) -> (f64, DVector<f64>) {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    (mean, DVector::from_iterator(y.len(), y.iter().map(|v| v - mean)))
}

/// Concentrated log marginal likelihood (with `τ²` at its profile optimum)
/// and its gradient with respect to `ln ℓ`.
///
/// Returns the nugget actually used alongside the value.
pub fn log_likelihood(x: &Points, y: &[f64], lengthscales: &[f64], config: &GpConfig) -> Result<(f64, Vec<f64>, f64)> {
    check_data(x, y)?;
    if lengthscales.len() != x.dim() || !lengthscales.iter().all(|&l| l > 0.0 && l.is_finite()) {
        return Err(contract("lengthscales must be positive, finite and match the input dimension"));
    }
    let (_, yc) = centered(y);
    let r = correlation_matrix(x, lengthscales);
    let (chol, g) = factor(&r, config)
        .ok_or_else(|| Error::SurrogateFit("correlation matrix is not positive definite".into()))?;
    Ok(likelihood_from_factor(x, &yc, lengthscales, &r, &chol, g))
}

fn likelihood_from_factor(
    x: &Points,
    yc: &DVector<f64>,
    ls: &[f64],
    r: &DMatrix<f64>,
    chol: &Cholesky<f64, Dyn>,
    g: f64,
) -> (f64, Vec<f64>, f64) {
    let n = x.len();
    let nf = n as f64;
    let alpha = chol.solve(yc);
    let q = yc.dot(&alpha).max(f64::MIN_POSITIVE);
    let logdet = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let ll = -0.5 * nf * (q / nf).ln() - 0.5 * logdet - 0.5 * nf * ((2.0 * std::f64::consts::PI).ln() + 1.0);

    // d ll / d ln ℓ_p = ½ Σ_ij (N α_i α_j / q − A⁻¹_ij) R_ij (x_ip − x_jp)² / ℓ_p
    let ainv = chol.inverse();
    let mut grad = vec![0.0; x.dim()];
    for i in 0..n {
        let xi = x.row(i);
        for j in 0..i {
            let w = (nf * alpha[i] * alpha[j] / q - ainv[(i, j)]) * r[(i, j)];
            if w == 0.0 {
                continue;
            }
            for ((gp, (a, b)), l) in grad.iter_mut().zip(xi.iter().zip(x.row(j))).zip(ls) {
                *gp += w * (a - b) * (a - b) / l;
            }
        }
    }
    (ll, grad, g)
}

/// A conditioned GP ready for prediction.
#[derive(Clone, Debug)]
pub struct GpModel {
    x: Points,
    y_mean: f64,
    yc: DVector<f64>,
    hyper: GpHyper,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    log_likelihood: f64,
}

/// Predictive mean and standard deviation at one point, with gradients.
#[derive(Clone, Debug)]
pub struct MomentsGrad {
    pub mean: f64,
    pub sd: f64,
    pub d_mean: Vec<f64>,
    pub d_sd: Vec<f64>,
}

impl GpModel {
    /// Conditions on `(x, y)` with fixed lengthscales; `τ²` is set to its
    /// profile maximum-likelihood value (at least [`SIGNAL_SCALE_FLOOR`]).
    pub fn condition(x: &Points, y: &[f64], lengthscales: &[f64], config: &GpConfig) -> Result<Self> {
        check_data(x, y)?;
        if lengthscales.len() != x.dim() || !lengthscales.iter().all(|&l| l > 0.0 && l.is_finite()) {
            return Err(contract("lengthscales must be positive, finite and match the input dimension"));
        }
        let (y_mean, yc) = centered(y);
        let r = correlation_matrix(x, lengthscales);
        let (chol, g) = factor(&r, config).ok_or_else(|| {
            Error::SurrogateFit(format!(
                "correlation matrix not positive definite with nugget up to {}",
                config.max_nugget
            ))
        })?;
        let alpha = chol.solve(&yc);
        let tau2 = (yc.dot(&alpha) / x.len() as f64).max(SIGNAL_SCALE_FLOOR);
        let (ll, _, _) = likelihood_from_factor(x, &yc, lengthscales, &r, &chol, g);
        Ok(Self {
            x: x.clone(),
            y_mean,
            yc,
            hyper: GpHyper {
                lengthscales: lengthscales.to_vec(),
                signal_scale: tau2,
                nugget: g,
            },
            chol,
            alpha,
            log_likelihood: ll,
        })
    }

    /// Maximum-likelihood fit of the lengthscales, starting from
    /// `init.lengthscales` (clamped into the configured box).
    pub fn fit(x: &Points, y: &[f64], init: &GpHyper, config: &GpConfig) -> Result<Self> {
        check_data(x, y)?;
        if init.dim() != x.dim() {
            return Err(contract("initial lengthscales do not match the input dimension"));
        }
        let (lo, hi) = (config.lengthscale_min.ln(), config.lengthscale_max.ln());
        let theta0: Vec<f64> = init.lengthscales.iter().map(|l| l.max(f64::MIN_POSITIVE).ln().clamp(lo, hi)).collect();
        let lower = vec![lo; x.dim()];
        let upper = vec![hi; x.dim()];

        let (_, yc) = centered(y);
        let objective = |theta: &[f64]| {
            let ls: Vec<f64> = theta.iter().map(|t| t.exp()).collect();
            let r = correlation_matrix(x, &ls);
            let (chol, g) = factor(&r, config)?;
            let (ll, grad, _) = likelihood_from_factor(x, &yc, &ls, &r, &chol, g);
            Some((-ll, grad.into_iter().map(|v| -v).collect()))
        };
        let best = minimize_box(objective, &theta0, &lower, &upper, &config.optimizer);
        let theta = if best.value.is_finite() { best.x } else { theta0 };
        let ls: Vec<f64> = theta.iter().map(|t| t.exp()).collect();
        Self::condition(x, y, &ls, config)
    }

    pub fn hyper(&self) -> &GpHyper {
        &self.hyper
    }

    pub fn inputs(&self) -> &Points {
        &self.x
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn mean_offset(&self) -> f64 {
        self.y_mean
    }

    pub fn centered_outputs(&self) -> &[f64] {
        self.yc.as_slice()
    }

    /// Concentrated log marginal likelihood at the current hyperparameters.
    pub fn log_likelihood(&self) -> f64 {
        self.log_likelihood
    }

    /// Lower-triangular Cholesky factor of `R + g·I`.
    pub fn factor(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    fn cross_correlation(&self, q: &[f64]) -> DVector<f64> {
        let ls = &self.hyper.lengthscales;
        DVector::from_iterator(self.len(), self.x.rows().map(|xi| correlation(ls, q, xi)))
    }

    /// Predictive means and standard deviations at every row of `queries`.
    pub fn predict(&self, queries: &Points) -> Result<(Vec<f64>, Vec<f64>)> {
        if queries.dim() != self.dim() {
            return Err(contract("query dimension does not match the model"));
        }
        let m = queries.len();
        let n = self.len();
        let ls = &self.hyper.lengthscales;
        let mut kt = DMatrix::zeros(n, m);
        for (j, q) in queries.rows().enumerate() {
            for (i, xi) in self.x.rows().enumerate() {
                kt[(i, j)] = correlation(ls, q, xi);
            }
        }
        let means = kt.tr_mul(&self.alpha).iter().map(|v| v + self.y_mean).collect();
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&kt)
            .expect("Cholesky factor has a positive diagonal");
        let tau2 = self.hyper.signal_scale;
        let sds = v
            .column_iter()
            .map(|c| (tau2 * (1.0 - c.norm_squared())).max(0.0).sqrt())
            .collect();
        Ok((means, sds))
    }

    /// Predictive moments at `q` and their gradients with respect to `q`.
    pub fn predict_with_grad(&self, q: &[f64]) -> Result<MomentsGrad> {
        if q.len() != self.dim() {
            return Err(contract("query dimension does not match the model"));
        }
        let k = self.cross_correlation(q);
        let v = self.chol.solve(&k);
        let tau2 = self.hyper.signal_scale;
        let mean = self.y_mean + k.dot(&self.alpha);
        let var = tau2 * (1.0 - k.dot(&v));
        let sd = var.max(0.0).sqrt();

        let dim = self.dim();
        let mut d_mean = vec![0.0; dim];
        let mut d_var = vec![0.0; dim];
        for (i, xi) in self.x.rows().enumerate() {
            for p in 0..dim {
                let dk = k[i] * (-2.0 * (q[p] - xi[p]) / self.hyper.lengthscales[p]);
                d_mean[p] += self.alpha[i] * dk;
                d_var[p] -= 2.0 * tau2 * v[i] * dk;
            }
        }
        let d_sd = if sd > 0.0 {
            d_var.iter().map(|d| d / (2.0 * sd)).collect()
        } else {
            vec![0.0; dim]
        };
        Ok(MomentsGrad { mean, sd, d_mean, d_sd })
    }
}
