//! Laplace functional of the aggregate interference at a mobile user whose
//! serving access point sits at distance `d1`.
//!
//! In polar coordinates centred on the user (bearing measured from the
//! direction of the domain centre), interferers occupy `d ∈ (d1, R̂(θ))` for
//! `|θ| < θ̂₁`. Under Rayleigh fading the radial integral has the closed form
//! `φ(x)` built from `ψ(k/η, x^η/(q d1^η))`, leaving a single angular
//! quadrature:
//!
//! ```text
//! ℒ = exp(−λ0 ∫₀^θ̂₁ φ(R̂(θ)) − φ(d1) dθ)
//! φ(x) = (a + b r²) K2(x) + b (K4(x) − r cos θ K3(x))
//! K2 = x² ψ(2/η, y),  K3 = (4/3) x³ ψ(3/η, y),  K4 = x⁴ ψ(4/η, y) / 2
//! ```

use crate::error::{domain, Error, Result};
use crate::geometry::{border_distance, intersection_angle, NetworkParams};
use crate::numerics::{integrate, psi, QuadratureSpec};

/// Exponents below `−MAX_EXPONENT` underflow to zero.
const MAX_EXPONENT: f64 = 745.0;

/// A Laplace-functional evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceQuery {
    pub r: f64,
    pub d1: f64,
    pub q: f64,
    pub params: NetworkParams,
}

impl LaplaceQuery {
    /// Query with the threshold taken from `params.q`.
    pub fn new(params: NetworkParams, r: f64, d1: f64) -> Result<Self> {
        let query = Self {
            r,
            d1,
            q: params.q,
            params,
        };
        query.validate()?;
        Ok(query)
    }

    pub fn with_threshold(self, q: f64) -> Result<Self> {
        let query = Self { q, ..self };
        query.validate()?;
        Ok(query)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let radius = self.params.radius;
        if !(self.r >= 0.0 && self.r <= radius * (1.0 + 1e-12)) {
            return Err(domain(format!("r = {} outside [0, R]", self.r)));
        }
        if !(self.d1 > 0.0 && self.d1 <= (radius + self.r) * (1.0 + 1e-12)) {
            return Err(domain(format!("d1 = {} outside (0, R + r]", self.d1)));
        }
        if !(self.q > 0.0 && self.q.is_finite()) {
            return Err(domain(format!("q must be positive, got {}", self.q)));
        }
        Ok(())
    }
}

/// The radial kernels at distance `x` for serving distance `d1`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Kernels {
    k2: f64,
    k3: f64,
    k4: f64,
}

fn kernels(x: f64, d1: f64, q: f64, eta: f64, need_shape: bool) -> Result<Kernels> {
    if x == 0.0 {
        return Ok(Kernels { k2: 0.0, k3: 0.0, k4: 0.0 });
    }
    let y = (x / d1).powf(eta) / q;
    if !y.is_finite() {
        // ψ(·, y) → 0 faster than any x-power here grows.
        return Ok(Kernels { k2: 0.0, k3: 0.0, k4: 0.0 });
    }
    let x2 = x * x;
    let k2 = x2 * psi(2.0 / eta, y)?;
    if !need_shape {
        return Ok(Kernels { k2, k3: 0.0, k4: 0.0 });
    }
    Ok(Kernels {
        k2,
        k3: 4.0 / 3.0 * x2 * x * psi(3.0 / eta, y)?,
        k4: 0.5 * x2 * x2 * psi(4.0 / eta, y)?,
    })
}

/// `φ(x)` at bearing `θ`: twice the radial integral `∫₀^x λ(z)/λ0 · s/(1 + (s/d1)^η/q) ds`.
pub fn phi_kernel(x: f64, theta: f64, query: &LaplaceQuery) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(domain(format!("phi_kernel needs x >= 0, got {x}")));
    }
    let p = &query.params;
    let k = kernels(x, query.d1, query.q, p.eta, p.b != 0.0)?;
    let r = query.r;
    Ok((p.a() + p.b * r * r) * k.k2 + p.b * (k.k4 - r * theta.cos() * k.k3))
}

/// Components of the interference exponent: per unit `λ0` it equals
/// `a·uniform + b·shape`, so one evaluation serves every deployment shape
/// with the same `(R, η, q, r, d1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceParts {
    pub uniform: f64,
    pub shape: f64,
    pub err_estimate: f64,
}

impl LaplaceParts {
    /// `λ0 (a·uniform + b·shape)`, clamped to be nonnegative.
    pub fn exponent(&self, p: &NetworkParams) -> f64 {
        (p.lambda0 * (p.a() * self.uniform + p.b * self.shape)).max(0.0)
    }

    pub fn laplace(&self, p: &NetworkParams) -> f64 {
        let e = self.exponent(p);
        if e > MAX_EXPONENT {
            0.0
        } else {
            (-e).exp()
        }
    }
}

/// Default tolerances for the angular integral: two decades tighter than
/// the outer integrals that consume it.
pub fn default_spec() -> QuadratureSpec {
    QuadratureSpec::default().tightened(2)
}

/// Exponent components for the query geometry; `params.b` is not used.
/// Without `with_shape` only the uniform part is computed and `shape` is
/// left at zero, which is exact for `b = 0`.
pub fn laplace_parts(query: &LaplaceQuery, with_shape: bool, spec: &QuadratureSpec) -> Result<LaplaceParts> {
    query.validate()?;
    let p = &query.params;
    let (r, d1, q, eta) = (query.r, query.d1, query.q, p.eta);
    let radius = p.radius;
    let theta_max = intersection_angle(r, d1, radius)?;
    if theta_max == 0.0 {
        return Ok(LaplaceParts {
            uniform: 0.0,
            shape: 0.0,
            err_estimate: 0.0,
        });
    }

    let inner = kernels(d1, d1, q, eta, with_shape)?;
    if r == 0.0 {
        // Concentric: R̂ ≡ R and the cos θ term integrates to zero over [0, π].
        let outer = kernels(radius, d1, q, eta, with_shape)?;
        return Ok(LaplaceParts {
            uniform: theta_max * (outer.k2 - inner.k2),
            shape: if with_shape { theta_max * (outer.k4 - inner.k4) } else { 0.0 },
            err_estimate: 0.0,
        });
    }

    let mut failure: Option<Error> = None;
    let uniform = integrate(
        |theta| {
            let x = border_distance(r, theta, radius).unwrap_or(0.0);
            match kernels(x, d1, q, eta, false) {
                Ok(k) => k.k2 - inner.k2,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        theta_max,
        spec,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    if !with_shape {
        return Ok(LaplaceParts {
            uniform: uniform.value,
            shape: 0.0,
            err_estimate: uniform.err_estimate,
        });
    }

    let mut failure: Option<Error> = None;
    let extra = integrate(
        |theta| {
            let x = border_distance(r, theta, radius).unwrap_or(0.0);
            match kernels(x, d1, q, eta, true) {
                Ok(k) => (k.k4 - inner.k4) - r * theta.cos() * (k.k3 - inner.k3),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        theta_max,
        spec,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(LaplaceParts {
        uniform: uniform.value,
        shape: r * r * uniform.value + extra.value,
        err_estimate: uniform.err_estimate * (1.0 + r * r) + extra.err_estimate,
    })
}

/// `ℒ_ℐ(q d1^η)`: the probability-like factor by which interference scales
/// the connection probability.
pub fn laplace_interference(query: &LaplaceQuery) -> Result<f64> {
    laplace_interference_with(query, &default_spec())
}

pub fn laplace_interference_with(query: &LaplaceQuery, spec: &QuadratureSpec) -> Result<f64> {
    let parts = laplace_parts(query, query.params.b != 0.0, spec)?;
    Ok(parts.laplace(&query.params))
}
