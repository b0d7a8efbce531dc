//! Alpha-skew generalized normal (ASGN) model: density, priors, and
//! posterior estimation by random-walk Metropolis-within-Gibbs.
//!
//! The density has a Gaussian kernel multiplied by a quadratic skewing
//! polynomial in raw `y`:
//!
//! ```text
//! f(y | alpha, nu, delta2) =
//!     sqrt(2) * ((1 - alpha*y)^2 + 1)
//!     / (4 * (Gamma(3/2)*alpha + Gamma(1/2)))
//!     * exp(-(y - nu)^2 / (2*delta2))
//! ```
//!
//! The expression is only valid for `Gamma(3/2)*alpha + Gamma(1/2) > 0`,
//! i.e. `alpha > -2`, and `delta2 > 0`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Gamma(3/2) = sqrt(pi)/2.
pub const GAMMA_3_2: f64 = 0.886226925452758;
/// Gamma(1/2) = sqrt(pi).
pub const GAMMA_1_2: f64 = 1.772453850905516;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Floor applied to data-derived variances so constant data still yields
/// proper priors.
pub const VARIANCE_FLOOR: f64 = 0.01;

/// ASGN parameter triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsgnParams {
    /// Skewness. Must satisfy `alpha > -2` so the density denominator
    /// stays positive.
    pub alpha: f64,
    /// Location, in M-value units.
    pub nu: f64,
    /// Scale, in squared M-value units. Strictly positive.
    pub delta2: f64,
}

impl AsgnParams {
    pub fn new(alpha: f64, nu: f64, delta2: f64) -> Result<Self> {
        let p = Self { alpha, nu, delta2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delta2.is_finite() || self.delta2 <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "delta2 must be positive, got {}",
                self.delta2
            )));
        }
        if !self.alpha.is_finite() || GAMMA_3_2 * self.alpha + GAMMA_1_2 <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "alpha must exceed -2, got {}",
                self.alpha
            )));
        }
        if !self.nu.is_finite() {
            return Err(Error::InvalidParams("nu must be finite".into()));
        }
        Ok(())
    }
}

/// Hyperparameters: Normal priors on `alpha` and `nu`, inverse-gamma
/// (shape-rate) prior on `delta2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsgnPriors {
    pub mu_a: f64,
    pub sigma2_a: f64,
    pub mu_n: f64,
    pub sigma2_n: f64,
    pub a_d: f64,
    pub b_d: f64,
}

impl AsgnPriors {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sigma2_a", self.sigma2_a),
            ("sigma2_n", self.sigma2_n),
            ("A_d", self.a_d),
            ("B_d", self.b_d),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "prior {name} must be positive, got {v}"
                )));
            }
        }
        if !self.mu_a.is_finite() || !self.mu_n.is_finite() {
            return Err(Error::InvalidParams("prior means must be finite".into()));
        }
        Ok(())
    }
}

/// User-facing prior triple, mirroring `list(alpha=, mu=, sigma2=)`:
/// `alpha` sets the prior mean of the skewness, `mu` the prior mean of the
/// location, and `sigma2` the inverse-gamma shape on the scale. The
/// remaining hyperparameters are fixed internally (`sigma2_a = sigma2_n =
/// B_d = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorSpec {
    pub alpha: f64,
    pub mu: f64,
    pub sigma2: f64,
}

impl PriorSpec {
    pub fn to_priors(self) -> Result<AsgnPriors> {
        let priors = AsgnPriors {
            mu_a: self.alpha,
            sigma2_a: 1.0,
            mu_n: self.mu,
            sigma2_n: 1.0,
            a_d: self.sigma2,
            b_d: 1.0,
        };
        priors.validate()?;
        Ok(priors)
    }
}

impl std::str::FromStr for PriorSpec {
    type Err = Error;

    /// Parses `alpha=A,mu=M,sigma2=S` (keys in any order, each exactly once).
    fn from_str(s: &str) -> Result<Self> {
        let mut alpha = None;
        let mut mu = None;
        let mut sigma2 = None;
        for part in s.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("expected key=value, got '{part}'")))?;
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::InvalidConfig(format!("invalid number '{}' for '{}'", value.trim(), key))
            })?;
            let slot = match key.trim() {
                "alpha" => &mut alpha,
                "mu" => &mut mu,
                "sigma2" => &mut sigma2,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown prior key '{other}' (expected alpha, mu, sigma2)"
                    )))
                }
            };
            if slot.replace(value).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate prior key '{}'", key.trim())));
            }
        }
        match (alpha, mu, sigma2) {
            (Some(alpha), Some(mu), Some(sigma2)) => Ok(Self { alpha, mu, sigma2 }),
            _ => Err(Error::InvalidConfig(
                "prior must specify alpha=, mu= and sigma2=".into(),
            )),
        }
    }
}

/// MCMC run lengths and seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McmcConfig {
    pub nburn: usize,
    pub niter: usize,
    pub thin: usize,
    pub seed: u64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self {
            nburn: 5000,
            niter: 10000,
            thin: 1,
            seed: 0,
        }
    }
}

impl McmcConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.niter == 0 || self.thin == 0 {
            return Err(Error::InvalidConfig(
                "niter and thin must be at least 1".into(),
            ));
        }
        if self.niter / self.thin < 2 {
            return Err(Error::InvalidConfig(format!(
                "niter/thin must retain at least 2 samples, got {}",
                self.niter / self.thin
            )));
        }
        Ok(())
    }

    pub fn n_retained(&self) -> usize {
        self.niter / self.thin
    }
}

/// Posterior summary of one fit: component-wise means, empirical 95%
/// credible intervals, and post-burn-in acceptance rates for the
/// (alpha, nu, log delta2) updates.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    pub mean: AsgnParams,
    pub ci_lower: AsgnParams,
    pub ci_upper: AsgnParams,
    pub acceptance_rates: [f64; 3],
    pub n_retained: usize,
}

/// Log of the ASGN density at `y`. Implements the printed formula
/// directly: the skewing polynomial uses raw `y` and no `1/delta` factor
/// is applied, so the value at `y = nu` with `alpha = 0` does not depend
/// on `delta2`.
pub fn asgn_log_density(y: f64, params: &AsgnParams) -> Result<f64> {
    params.validate()?;
    Ok(log_density_unchecked(
        y,
        params.alpha,
        params.nu,
        params.delta2,
    ))
}

/// ASGN density at `y`; `exp` of [`asgn_log_density`].
pub fn asgn_density(y: f64, params: &AsgnParams) -> Result<f64> {
    asgn_log_density(y, params).map(f64::exp)
}

#[inline]
pub(crate) fn log_density_unchecked(y: f64, alpha: f64, nu: f64, delta2: f64) -> f64 {
    let u = 1.0 - alpha * y;
    let resid = y - nu;
    (SQRT_2 * (u * u + 1.0)).ln() - (4.0 * (GAMMA_3_2 * alpha + GAMMA_1_2)).ln()
        - resid * resid / (2.0 * delta2)
}

fn log_normal(x: f64, mean: f64, variance: f64) -> f64 {
    -0.5 * (std::f64::consts::TAU * variance).ln() - (x - mean) * (x - mean) / (2.0 * variance)
}

/// Log inverse-gamma density, shape-rate: `B^A/Gamma(A) x^{-A-1} e^{-B/x}`.
fn log_inv_gamma(x: f64, shape: f64, rate: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    shape * rate.ln() - ln_gamma(shape) - (shape + 1.0) * x.ln() - rate / x
}

/// Joint log-prior of a parameter triple.
pub fn log_prior(params: &AsgnParams, priors: &AsgnPriors) -> Result<f64> {
    params.validate()?;
    priors.validate()?;
    Ok(log_normal(params.alpha, priors.mu_a, priors.sigma2_a)
        + log_normal(params.nu, priors.mu_n, priors.sigma2_n)
        + log_inv_gamma(params.delta2, priors.a_d, priors.b_d))
}

/// Weakly informative priors constructed from the data: `mu_a = 0`,
/// `sigma2_a = 1`, `mu_n` the sample mean, `sigma2_n` the sample variance
/// (floored), `A_d = 2` and `B_d` the sample variance (floored) so the
/// inverse-gamma prior mean equals the sample variance.
pub fn default_priors(data: &[f64]) -> Result<AsgnPriors> {
    let finite: Vec<f64> = data.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.len() < 3 {
        return Err(Error::TooFewObservations(finite.len()));
    }
    let (mean, var) = mean_and_variance(&finite);
    let var = var.max(VARIANCE_FLOOR);
    Ok(AsgnPriors {
        mu_a: 0.0,
        sigma2_a: 1.0,
        mu_n: mean,
        sigma2_n: var,
        a_d: 2.0,
        b_d: var,
    })
}

/// Carry-forward priors for a subsegment: prior means are the parent
/// posterior means with prior variances fixed at 1; the inverse-gamma
/// rate is matched to the parent posterior mean of `delta2` with
/// `A_d = 2`.
pub fn child_priors(parent: &PosteriorSummary) -> AsgnPriors {
    AsgnPriors {
        mu_a: parent.mean.alpha,
        sigma2_a: 1.0,
        mu_n: parent.mean.nu,
        sigma2_n: 1.0,
        a_d: 2.0,
        b_d: parent.mean.delta2,
    }
}

/// Sample mean and (n-1)-denominator variance.
pub(crate) fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (n - 1.0))
}

/// Type-7 quantile (linear interpolation between order statistics) of an
/// ascending-sorted slice.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

// Robbins-Monro adaptation targets the middle of the 0.2-0.5 band.
const TARGET_ACCEPT: f64 = 0.35;
const INITIAL_SCALE: f64 = 0.5;

/// Lower support bound for the sampler's skewness walk. The density
/// normalizer vanishes at `alpha = -2`, so the likelihood grows without
/// bound toward that boundary and the posterior would be improper;
/// stopping the walk slightly inside keeps the target bounded.
pub const ALPHA_WALK_MIN: f64 = -1.95;

/// The unnormalized log-posterior, split into an alpha part and a
/// (nu, log delta2) part; the two blocks of the density factorize, which
/// lets each Metropolis update re-evaluate only its own block.
///
/// Likelihood contributions carry the Gaussian scale factor
/// `-log(delta)` per observation, so that with `alpha = 0` the fit is an
/// exact Normal(nu, delta2) fit and the scale is recovered from data.
/// The log-delta2 walk includes the `+t` Jacobian term.
struct Target<'a> {
    obs: &'a [f64],
    n: f64,
    sum: f64,
    sum_sq: f64,
    priors: &'a AsgnPriors,
}

impl<'a> Target<'a> {
    fn new(obs: &'a [f64], priors: &'a AsgnPriors) -> Self {
        let n = obs.len() as f64;
        let sum = obs.iter().sum();
        let sum_sq = obs.iter().map(|y| y * y).sum();
        Self {
            obs,
            n,
            sum,
            sum_sq,
            priors,
        }
    }

    fn alpha_part(&self, alpha: f64) -> f64 {
        let denom = GAMMA_3_2 * alpha + GAMMA_1_2;
        if denom <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let mut poly = 0.0;
        for &y in self.obs {
            let u = 1.0 - alpha * y;
            poly += (u * u + 1.0).ln();
        }
        poly - self.n * (4.0 * denom / SQRT_2).ln()
            + log_normal(alpha, self.priors.mu_a, self.priors.sigma2_a)
    }

    /// `t` is log(delta2).
    fn nu_delta_part(&self, nu: f64, t: f64) -> f64 {
        let inv_delta2 = (-t).exp();
        if !inv_delta2.is_finite() {
            return f64::NEG_INFINITY;
        }
        let ss = self.sum_sq - 2.0 * nu * self.sum + self.n * nu * nu;
        let p = self.priors;
        -0.5 * ss * inv_delta2 - 0.5 * self.n * t
            + log_normal(nu, p.mu_n, p.sigma2_n)
            + (p.a_d * p.b_d.ln() - ln_gamma(p.a_d) - (p.a_d + 1.0) * t - p.b_d * inv_delta2)
            + t
    }
}

/// Fits the ASGN model to a univariate sample by Metropolis-within-Gibbs
/// over `(alpha, nu, log delta2)` with Gaussian random-walk proposals,
/// updated in that order each iteration. Proposal scales adapt during
/// burn-in only and are frozen afterwards. Deterministic given
/// `(data, priors, mcmc.seed)`; non-finite data entries are ignored.
pub fn asgn_fit(data: &[f64], priors: &AsgnPriors, mcmc: &McmcConfig) -> Result<PosteriorSummary> {
    priors.validate()?;
    mcmc.validate()?;
    let obs: Vec<f64> = data.iter().copied().filter(|v| v.is_finite()).collect();
    if obs.len() < 3 {
        return Err(Error::TooFewObservations(obs.len()));
    }

    let target = Target::new(&obs, priors);
    let (data_mean, data_var) = mean_and_variance(&obs);

    let mut alpha = 0.0;
    let mut nu = data_mean;
    let mut t = data_var.max(VARIANCE_FLOOR).ln();
    let mut cur_alpha_part = target.alpha_part(alpha);
    let mut cur_nu_delta_part = target.nu_delta_part(nu, t);

    let mut rng = ChaCha8Rng::seed_from_u64(mcmc.seed);
    let mut log_scales = [INITIAL_SCALE.ln(); 3];
    let mut adapt_steps = [0u64; 3];
    let mut accepts = [0usize; 3];

    let mut samples_alpha = Vec::with_capacity(mcmc.n_retained());
    let mut samples_nu = Vec::with_capacity(mcmc.n_retained());
    let mut samples_delta2 = Vec::with_capacity(mcmc.n_retained());

    for iter in 0..(mcmc.nburn + mcmc.niter) {
        let adapting = iter < mcmc.nburn;

        // alpha
        {
            let step: f64 = rng.sample(StandardNormal);
            let proposal = alpha + log_scales[0].exp() * step;
            let prob = if proposal < ALPHA_WALK_MIN {
                0.0
            } else {
                let part = target.alpha_part(proposal);
                let log_ratio = part - cur_alpha_part;
                let u: f64 = rng.random();
                if u.ln() < log_ratio {
                    alpha = proposal;
                    cur_alpha_part = part;
                    if !adapting {
                        accepts[0] += 1;
                    }
                }
                log_ratio.exp().min(1.0)
            };
            if adapting {
                adapt(&mut log_scales[0], &mut adapt_steps[0], prob);
            }
        }

        // nu
        {
            let step: f64 = rng.sample(StandardNormal);
            let proposal = nu + log_scales[1].exp() * step;
            let part = target.nu_delta_part(proposal, t);
            let log_ratio = part - cur_nu_delta_part;
            let u: f64 = rng.random();
            if u.ln() < log_ratio {
                nu = proposal;
                cur_nu_delta_part = part;
                if !adapting {
                    accepts[1] += 1;
                }
            }
            if adapting {
                adapt(&mut log_scales[1], &mut adapt_steps[1], log_ratio.exp().min(1.0));
            }
        }

        // log delta2
        {
            let step: f64 = rng.sample(StandardNormal);
            let proposal = t + log_scales[2].exp() * step;
            let part = target.nu_delta_part(nu, proposal);
            let log_ratio = part - cur_nu_delta_part;
            let u: f64 = rng.random();
            if u.ln() < log_ratio {
                t = proposal;
                cur_nu_delta_part = part;
                if !adapting {
                    accepts[2] += 1;
                }
            }
            if adapting {
                adapt(&mut log_scales[2], &mut adapt_steps[2], log_ratio.exp().min(1.0));
            }
        }

        if !adapting {
            let k = iter - mcmc.nburn + 1;
            if k % mcmc.thin == 0 {
                samples_alpha.push(alpha);
                samples_nu.push(nu);
                samples_delta2.push(t.exp());
            }
        }
    }

    let summarize = |samples: &mut Vec<f64>| -> (f64, f64, f64) {
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        samples.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
        (
            mean,
            quantile_sorted(samples, 0.025),
            quantile_sorted(samples, 0.975),
        )
    };
    let (mean_a, lo_a, hi_a) = summarize(&mut samples_alpha);
    let (mean_n, lo_n, hi_n) = summarize(&mut samples_nu);
    let (mean_d, lo_d, hi_d) = summarize(&mut samples_delta2);

    let niter = mcmc.niter as f64;
    Ok(PosteriorSummary {
        mean: AsgnParams {
            alpha: mean_a,
            nu: mean_n,
            delta2: mean_d,
        },
        ci_lower: AsgnParams {
            alpha: lo_a,
            nu: lo_n,
            delta2: lo_d,
        },
        ci_upper: AsgnParams {
            alpha: hi_a,
            nu: hi_n,
            delta2: hi_d,
        },
        acceptance_rates: [
            accepts[0] as f64 / niter,
            accepts[1] as f64 / niter,
            accepts[2] as f64 / niter,
        ],
        n_retained: samples_alpha.len(),
    })
}

fn adapt(log_scale: &mut f64, steps: &mut u64, accept_prob: f64) {
    *steps += 1;
    let gain = (*steps as f64).powf(-0.6);
    *log_scale = (*log_scale + gain * (accept_prob - TARGET_ACCEPT)).clamp(-12.0, 12.0);
}
