//! Monte Carlo simulation of the same network: non-uniform PPP deployments,
//! Rayleigh fading and power-law pathloss, used as an independent oracle for
//! the analytic pipeline.
//!
//! Trial `i` draws from a ChaCha8 stream keyed by `(master_seed, i)`, and
//! per-trial results are reduced in trial order, so estimates are bitwise
//! reproducible whatever the thread count.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::geometry::{MuProfile, NetworkParams, PolarPoint};

pub mod stats;

/// Trials per reduction chunk.
const CHUNK: u64 = 1024;

/// Where the mobile user sits in each trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuPosition {
    Fixed { r: f64, theta: f64 },
    /// Radius drawn from the MU density `ρ`, bearing uniform.
    Sampled,
}

/// Radial sampler for access-point deployments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampler {
    #[default]
    InverseCdf,
    Thinning,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub trials: u64,
    pub master_seed: u64,
    pub mu_position: MuPosition,
    pub params: NetworkParams,
    pub mu_profile: MuProfile,
    pub sampler: Sampler,
}

impl SimConfig {
    /// MU fixed at the domain centre, inverse-CDF sampler.
    pub fn new(params: NetworkParams, trials: u64, master_seed: u64) -> Self {
        Self {
            trials,
            master_seed,
            mu_position: MuPosition::Fixed { r: 0.0, theta: 0.0 },
            params,
            mu_profile: MuProfile::default(),
            sampler: Sampler::InverseCdf,
        }
    }

    pub fn at(self, r: f64, theta: f64) -> Self {
        Self {
            mu_position: MuPosition::Fixed { r, theta },
            ..self
        }
    }

    pub fn sampled_mu(self, mu_profile: MuProfile) -> Self {
        Self {
            mu_position: MuPosition::Sampled,
            mu_profile,
            ..self
        }
    }

    pub fn with_sampler(self, sampler: Sampler) -> Self {
        Self { sampler, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.mu_profile.validate(self.params.radius)?;
        if self.trials == 0 {
            return Err(domain("trials must be >= 1"));
        }
        if let MuPosition::Fixed { r, theta } = self.mu_position {
            if !(r >= 0.0 && r <= self.params.radius) || !theta.is_finite() {
                return Err(domain(format!("MU position ({r}, {theta}) outside the domain")));
            }
        }
        Ok(())
    }

    fn fixed_position(&self) -> Result<PolarPoint> {
        match self.mu_position {
            MuPosition::Fixed { r, theta } => Ok(PolarPoint { t: r, phi: theta }),
            MuPosition::Sampled => Err(domain("this estimator needs a fixed MU position")),
        }
    }
}

/// Sample mean with its standard error `s / √n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials_used: u64,
}

impl SimEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n.max(1) as f64;
        let var = if n > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            std_error: (var / n.max(1) as f64).sqrt(),
            trials_used: n as u64,
        }
    }

    /// `|self − value| ≤ k · std_error`.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }
}

/// The random stream of trial `trial` under `master_seed`.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// CDF `(2a t² + b t⁴) / (2R²)` of an access point's radius.
pub fn radial_cdf(t: f64, p: &NetworkParams) -> f64 {
    shape_cdf(t.clamp(0.0, p.radius), p.b, p.radius)
}

fn shape_cdf(t: f64, shape: f64, radius: f64) -> f64 {
    let a = 1.0 - shape * radius * radius / 2.0;
    let t2 = t * t;
    (2.0 * a * t2 + shape * t2 * t2) / (2.0 * radius * radius)
}

/// Inverse of [`radial_cdf`]: `t² = 2R²u / (a + √(a² + 2bR²u))`, which is the
/// root of the quadratic in `t²` written without cancellation at `b = 0`.
pub fn radial_quantile(u: f64, p: &NetworkParams) -> f64 {
    shape_quantile(u, p.b, p.radius)
}

fn shape_quantile(u: f64, shape: f64, radius: f64) -> f64 {
    let rr = radius * radius;
    let a = 1.0 - shape * rr / 2.0;
    let disc = (a * a + 2.0 * shape * rr * u).max(0.0).sqrt();
    let denom = a + disc;
    if denom <= 0.0 {
        return 0.0;
    }
    (2.0 * rr * u / denom).sqrt().min(radius)
}

/// Radius of a MU drawn from `ρ(r) r dr`: the same quadratic law with `β`.
pub fn mu_radius_quantile(u: f64, mu: &MuProfile, radius: f64) -> f64 {
    shape_quantile(u, mu.beta, radius)
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as usize).unwrap_or(0)
}

/// One deployment: Poisson count with mean `λ0πR²`, uniform bearings,
/// radii by inverse CDF.
pub fn sample_deployment<R: Rng + ?Sized>(p: &NetworkParams, rng: &mut R) -> Vec<PolarPoint> {
    let n = poisson_count(p.mean_count(), rng);
    (0..n)
        .map(|_| {
            let t = radial_quantile(rng.random::<f64>(), p);
            let phi = 2.0 * PI * rng.random::<f64>();
            PolarPoint { t, phi }
        })
        .collect()
}

/// One deployment by thinning a uniform PPP of intensity `max_t λ(t)`.
pub fn sample_deployment_by_thinning<R: Rng + ?Sized>(p: &NetworkParams, rng: &mut R) -> Vec<PolarPoint> {
    let a = p.a();
    let peak = a.max(a + p.b * p.radius * p.radius);
    let n = poisson_count(p.lambda0 * peak * PI * p.radius * p.radius, rng);
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let t = p.radius * rng.random::<f64>().sqrt();
        let phi = 2.0 * PI * rng.random::<f64>();
        let keep = (a + p.b * t * t) / peak;
        if rng.random::<f64>() < keep {
            points.push(PolarPoint { t, phi });
        }
    }
    points
}

fn deploy<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Vec<PolarPoint> {
    match cfg.sampler {
        Sampler::InverseCdf => sample_deployment(&cfg.params, rng),
        Sampler::Thinning => sample_deployment_by_thinning(&cfg.params, rng),
    }
}

fn mu_position<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> PolarPoint {
    match cfg.mu_position {
        MuPosition::Fixed { r, theta } => PolarPoint { t: r, phi: theta },
        MuPosition::Sampled => {
            let t = mu_radius_quantile(rng.random::<f64>(), &cfg.mu_profile, cfg.params.radius);
            PolarPoint {
                t,
                phi: 2.0 * PI * rng.random::<f64>(),
            }
        }
    }
}

/// Runs `trial` for every index and returns the per-trial values in order.
fn run_trials<F>(cfg: &SimConfig, trial: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = cfg.trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let end = ((c + 1) * CHUNK).min(cfg.trials);
            (c * CHUNK..end)
                .map(|i| trial(&mut trial_rng(cfg.master_seed, i)))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat()
}

/// Fraction of trials with `SINR ≥ q`; an empty deployment is an outage.
pub fn simulate_coverage(cfg: &SimConfig) -> Result<SimEstimate> {
    cfg.validate()?;
    let p = cfg.params;
    let values = run_trials(cfg, |rng| {
        let mu = mu_position(cfg, rng);
        let aps = deploy(cfg, rng);
        if aps.is_empty() {
            return 0.0;
        }
        let dists: Vec<f64> = aps.iter().map(|ap| ap.distance_to(mu)).collect();
        let serving = dists
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .map(|(i, _)| i)
            .expect("deployment is nonempty");
        let mut signal = 0.0;
        let mut interference = 0.0;
        for (i, &d) in dists.iter().enumerate() {
            let h: f64 = Exp1.sample(rng);
            let rx = p.power * h * d.powf(-p.eta);
            if i == serving {
                signal = rx;
            } else {
                interference += rx;
            }
        }
        if signal >= p.q * (p.noise + interference) {
            1.0
        } else {
            0.0
        }
    });
    Ok(SimEstimate::from_samples(&values))
}

/// Equal-width histogram over `[0, bin_width · counts.len())`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_width: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(samples: &[f64], bin_width: f64, upper: f64) -> Self {
        let bins = (upper / bin_width).ceil().max(1.0) as usize;
        let mut counts = vec![0u64; bins];
        for &s in samples {
            let i = ((s / bin_width) as usize).min(bins - 1);
            counts[i] += 1;
        }
        Self { bin_width, counts }
    }

    /// Density estimate per bin, normalised by `total` draws.
    pub fn density(&self, total: u64) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / (total as f64 * self.bin_width))
            .collect()
    }
}

/// Empirical serving distances.
#[derive(Debug, Clone, PartialEq)]
pub struct NndSimulation {
    /// Serving distances of the nonempty trials, in trial order.
    pub samples: Vec<f64>,
    /// Trials whose deployment held no access point.
    pub empty: u64,
    /// Mean serving distance over the nonempty trials.
    pub mean: SimEstimate,
    pub histogram: Histogram,
}

pub fn simulate_nnd(cfg: &SimConfig, bin_width: f64) -> Result<NndSimulation> {
    cfg.validate()?;
    let mu = cfg.fixed_position()?;
    if !(bin_width > 0.0) {
        return Err(domain("bin width must be positive"));
    }
    let values = run_trials(cfg, |rng| {
        deploy(cfg, rng)
            .iter()
            .map(|ap| ap.distance_to(mu))
            .fold(f64::NAN, f64::min)
    });
    let samples: Vec<f64> = values.iter().copied().filter(|d| !d.is_nan()).collect();
    let empty = cfg.trials - samples.len() as u64;
    let histogram = Histogram::new(&samples, bin_width, cfg.params.radius + mu.t);
    Ok(NndSimulation {
        mean: SimEstimate::from_samples(&samples),
        samples,
        empty,
        histogram,
    })
}

/// How deployments are conditioned on an empty serving ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Conditioning {
    /// Drop the points inside `B(r, d1)`; valid because a PPP restricted
    /// to disjoint sets is independent.
    #[default]
    Discard,
    /// Redraw whole deployments until the ball is empty.
    Reject { max_attempts: u64 },
}

/// Estimates `E[exp(−q Σ_k (d1/d_k)^η |h_k|²)]` over interferers outside
/// `B(r, d1)`, the Laplace functional of the interference at `s = q d1^η`.
pub fn simulate_laplace(cfg: &SimConfig, d1: f64, conditioning: Conditioning) -> Result<SimEstimate> {
    cfg.validate()?;
    let mu = cfg.fixed_position()?;
    if !(d1 > 0.0 && d1.is_finite()) {
        return Err(domain(format!("d1 must be positive, got {d1}")));
    }
    let p = cfg.params;
    let exhausted = std::sync::atomic::AtomicBool::new(false);
    let values = run_trials(cfg, |rng| {
        let aps = match conditioning {
            Conditioning::Discard => deploy(cfg, rng),
            Conditioning::Reject { max_attempts } => {
                let mut found = None;
                for _ in 0..max_attempts.max(1) {
                    let aps = deploy(cfg, rng);
                    if aps.iter().all(|ap| ap.distance_to(mu) >= d1) {
                        found = Some(aps);
                        break;
                    }
                }
                match found {
                    Some(aps) => aps,
                    None => {
                        exhausted.store(true, std::sync::atomic::Ordering::Relaxed);
                        return f64::NAN;
                    }
                }
            }
        };
        let mut load = 0.0;
        for ap in &aps {
            let d = ap.distance_to(mu);
            if d >= d1 {
                let h: f64 = Exp1.sample(rng);
                load += (d1 / d).powf(p.eta) * h;
            }
        }
        (-p.q * load).exp()
    });
    if exhausted.into_inner() {
        return Err(Error::NoConvergence {
            value: f64::NAN,
            err_estimate: f64::INFINITY,
        });
    }
    Ok(SimEstimate::from_samples(&values))
}
