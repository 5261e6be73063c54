//! Distance from a mobile user at radius `r` to its nearest (serving)
//! access point.
//!
//! The law is defective: with probability `exp(−λ0πR²)` the domain holds no
//! access point at all, and that mass is kept out of the pdf rather than
//! renormalised away.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::geometry::{clipped_ball_measure, lens_moment_rates, lens_moments, NetworkParams};
use crate::numerics::{integrate_with_breaks, QuadratureSpec};

/// The nearest-neighbour law evaluated at one `(r, d1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NndEvaluation {
    pub r: f64,
    pub d1: f64,
    pub pdf_value: f64,
    pub void_prob: f64,
}

pub fn evaluate(r: f64, d1: f64, p: &NetworkParams) -> Result<NndEvaluation> {
    Ok(NndEvaluation {
        r,
        d1,
        pdf_value: nnd_pdf(r, d1, p)?,
        void_prob: void_probability(r, d1, p)?,
    })
}

/// Probability that `B(r, d1)` holds no access point.
pub fn void_probability(r: f64, d1: f64, p: &NetworkParams) -> Result<f64> {
    Ok((-clipped_ball_measure(r, d1, p)?).exp())
}

/// `P[d1 ≤ x]`; tends to `1 − exp(−λ0πR²)` rather than one.
pub fn nnd_cdf(r: f64, d1: f64, p: &NetworkParams) -> Result<f64> {
    Ok(-(-clipped_ball_measure(r, d1, p)?).exp_m1())
}

/// Density of the serving distance while the ball lies inside the domain
/// (`d1 ≤ R − r`).
pub fn interior_pdf(r: f64, d1: f64, p: &NetworkParams) -> f64 {
    let (a, b, l0) = (p.a(), p.b, p.lambda0);
    let d2 = d1 * d1;
    2.0 * PI * d1 * l0 * (a + b * (d2 + r * r)) * (-l0 * PI * d2 * (a + b * (d2 + 2.0 * r * r) / 2.0)).exp()
}

/// Density of the serving distance once the ball is clipped by the border:
/// `Λ'(d1) e^{−Λ(d1)}` with `Λ'` the intensity integrated over the arc of
/// the sphere inside the domain.
pub fn clipped_pdf(r: f64, d1: f64, p: &NetworkParams) -> Result<f64> {
    let measure = lens_moments(r, d1, p.radius)?.measure(p);
    let rate = lens_moment_rates(r, d1, p.radius)?.measure(p);
    Ok((rate * (-measure).exp()).max(0.0))
}

/// Density `f(r, d1)` of the serving distance.
///
/// Zero beyond `d_max = R + r`. The interior branch applies for
/// `d1 ≤ R − r`, so at `r = R` every `d1 > 0` uses the clipped branch.
pub fn nnd_pdf(r: f64, d1: f64, p: &NetworkParams) -> Result<f64> {
    p.validate()?;
    if !(r >= 0.0 && r <= p.radius * (1.0 + 1e-12)) {
        return Err(domain(format!("r = {r} outside [0, R]")));
    }
    if !d1.is_finite() || d1 < 0.0 {
        return Err(domain(format!("d1 must be nonnegative, got {d1}")));
    }
    let r = r.min(p.radius);
    if d1 == 0.0 || d1 >= p.radius + r {
        return Ok(0.0);
    }
    if d1 <= p.radius - r {
        Ok(interior_pdf(r, d1, p).max(0.0))
    } else {
        clipped_pdf(r, d1, p)
    }
}

/// Break points for integrals over `d1 ∈ [0, R + r]`: the seam `R − r`
/// where the ball first touches the border.
pub(crate) fn d1_breaks(r: f64, radius: f64) -> Vec<f64> {
    let seam = radius - r;
    let mut pts = vec![0.0];
    if seam > 0.0 && seam < radius + r {
        pts.push(seam);
    }
    pts.push(radius + r);
    pts
}

/// Mean serving distance `∫₀^{R+r} d1 f(r, d1) dd1` (unconditional, so the
/// empty-network event contributes zero).
pub fn mean_nnd(r: f64, p: &NetworkParams) -> Result<f64> {
    mean_nnd_with(r, p, &QuadratureSpec::default())
}

pub fn mean_nnd_with(r: f64, p: &NetworkParams, spec: &QuadratureSpec) -> Result<f64> {
    p.validate()?;
    let mut failure = None;
    let q = integrate_with_breaks(
        |d1| match nnd_pdf(r, d1, p) {
            Ok(f) => d1 * f,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        &d1_breaks(r, p.radius),
        spec,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(q.value),
    }
}

/// `∫₀^{R+r} f(r, d1) dd1`; equals `1 − exp(−λ0πR²)` for a correct pdf.
pub fn pdf_mass(r: f64, p: &NetworkParams, spec: &QuadratureSpec) -> Result<f64> {
    p.validate()?;
    let q = integrate_with_breaks(
        |d1| nnd_pdf(r, d1, p).unwrap_or(f64::NAN),
        &d1_breaks(r, p.radius),
        spec,
    )?;
    Ok(q.value)
}
