//! Brute-force references: the clipped-ball measure and the interference
//! exponent as nested 2-D adaptive quadratures of their defining integrals.
//! Slow, and independent of the closed forms they check.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::geometry::{border_distance, intersection_angle, NetworkParams};
use crate::interference::LaplaceQuery;
use crate::numerics::{integrate_with_breaks, QuadratureSpec};

/// `Λ(B(r, d1) ∩ V)` integrated in polar coordinates about the MU.
pub fn clipped_ball_measure_2d(r: f64, d1: f64, p: &NetworkParams, spec: &QuadratureSpec) -> Result<f64> {
    p.validate()?;
    if !(d1 > 0.0) {
        return Err(domain(format!("d1 must be positive, got {d1}")));
    }
    let r = r.min(p.radius);
    let theta_hat = intersection_angle(r, d1, p.radius)?;
    let mut failure: Option<Error> = None;
    let q = integrate_with_breaks(
        |theta| {
            let reach = match border_distance(r, theta, p.radius) {
                Ok(v) => v.min(d1),
                Err(e) => {
                    failure.get_or_insert(e);
                    return 0.0;
                }
            };
            let inner = integrate_with_breaks(
                |s| {
                    let z2 = r * r + s * s - 2.0 * r * s * theta.cos();
                    p.lambda0 * (p.a() + p.b * z2) * s
                },
                &[0.0, reach],
                spec,
            );
            match inner {
                Ok(v) => 2.0 * v.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        &breaks(&[0.0, theta_hat, PI]),
        spec,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(q.value),
    }
}

/// `ℒ_ℐ(q d1^η)` from the double integral over `V ∖ B(r, d1)` in polar
/// coordinates about the domain centre.
pub fn laplace_2d(query: &LaplaceQuery, spec: &QuadratureSpec) -> Result<f64> {
    query.validate()?;
    let p = query.params;
    let (r, d1) = (query.r, query.d1);
    let scale = query.q * d1.powf(p.eta);
    let mut failure: Option<Error> = None;

    // Excluded bearings at radius t are |φ| < α(t), with the MU on φ = 0.
    let excluded = |t: f64| -> f64 {
        if t == 0.0 || r == 0.0 {
            return if t.max(r) < d1 { PI } else { 0.0 };
        }
        let c = (t * t + r * r - d1 * d1) / (2.0 * t * r);
        if c >= 1.0 {
            0.0
        } else if c <= -1.0 {
            PI
        } else {
            c.acos()
        }
    };

    let mut t_points = vec![0.0, p.radius];
    for x in [(r - d1).abs(), r + d1, d1, r] {
        if x > 0.0 && x < p.radius {
            t_points.push(x);
        }
    }
    let t_points = breaks(&t_points);

    let q = integrate_with_breaks(
        |t| {
            let alpha = excluded(t);
            if alpha >= PI {
                return 0.0;
            }
            let inner = integrate_with_breaks(
                |phi| {
                    let dist2 = t * t + r * r - 2.0 * t * r * phi.cos();
                    1.0 / (1.0 + dist2.powf(p.eta / 2.0) / scale)
                },
                &[alpha, PI],
                spec,
            );
            match inner {
                Ok(v) => 2.0 * v.value * p.lambda0 * (p.a() + p.b * t * t) * t,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        &t_points,
        spec,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let exponent = q.value;
    Ok(if exponent > 745.0 { 0.0 } else { (-exponent).exp() })
}

fn breaks(points: &[f64]) -> Vec<f64> {
    let mut v = points.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
    v
}
