//! Printed closed forms kept verbatim for comparison only. None of these
//! feed the coverage pipeline; see [`closed_form_report`] for how far they
//! are from the general expressions.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use crate::error::{domain, Result};
use crate::geometry::{lens_moments, NetworkParams};
use crate::interference::{laplace_interference_with, LaplaceQuery};
use crate::numerics::{psi, QuadratureSpec};
use crate::oracle::laplace_2d;

/// The printed centre (`r = 0`) closed form of `ℒ_ℐ(q d1^η)`, transcribed
/// as-is:
///
/// `exp[2 d1² q (2 + b d1² − bR²) / (4(1+q)) − 4R² ψ(2/η, y) + bR⁴ ψ(4/η, y)]`
/// with `y = R^η / (q d1^η)`.
pub fn laplace_center_closed_form(d1: f64, q: f64, p: &NetworkParams) -> Result<f64> {
    p.validate()?;
    if !(d1 > 0.0 && d1 <= p.radius) || !(q > 0.0) {
        return Err(domain(format!("need 0 < d1 <= R and q > 0, got d1 = {d1}, q = {q}")));
    }
    let (rr, b, eta) = (p.radius * p.radius, p.b, p.eta);
    let y = p.radius.powf(eta) / (q * d1.powf(eta));
    let exponent = 2.0 * d1 * d1 * q * (2.0 + b * d1 * d1 - b * rr) / (4.0 * (1.0 + q))
        - 4.0 * rr * psi(2.0 / eta, y)?
        + b * rr * rr * psi(4.0 / eta, y)?;
    Ok(exponent.exp())
}

/// The printed clipped-ball measure for `R − r < d1 < R + r`, transcribed
/// as-is (including its prefactor `2λ0`, the `+arctan` term and the `r²`
/// term in the last bracket).
pub fn printed_clipped_ball_measure(r: f64, d1: f64, p: &NetworkParams) -> Result<f64> {
    p.validate()?;
    let rr = p.radius * p.radius;
    if !(r > 0.0 && r <= p.radius && d1 > p.radius - r && d1 < p.radius + r) {
        return Err(domain("printed form applies only to R − r < d1 < R + r"));
    }
    let (a, b, l0) = (p.a(), p.b, p.lambda0);
    let r_hat = (rr + r * r - d1 * d1) / (2.0 * r);
    let r_tilde = r_hat - r;
    let d2 = d1 * d1;
    let s = (d2 - r_tilde * r_tilde).sqrt();
    let w = (rr - r_hat * r_hat).sqrt();
    let bracket = a * r_tilde * s
        + d2 * ((r_tilde / s).atan() + FRAC_PI_2) * (a + b * (d2 + 2.0 * r * r) / 2.0)
        + b * r_tilde / (12.0 * s) * (5.0 * d2 * d2 - 7.0 * d2 * r_tilde * r_tilde + 2.0 * r_tilde.powi(4))
        - b * s / 12.0
            * (d2 * (13.0 * r + 3.0 * r_hat)
                + 2.0 * (r * r + r * r * r_hat + r * r_hat * r_hat - 3.0 * r_hat.powi(3)))
        + rr * (a + b * rr / 2.0) * (FRAC_PI_2 + (r_hat / w).atan())
        - r_hat * w * (a + b / 6.0 * (rr + 2.0 * r_hat * r_hat));
    Ok(2.0 * l0 * bracket)
}

/// One row of the centre closed-form comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormRow {
    pub d1: f64,
    pub b: f64,
    pub printed: f64,
    pub general: f64,
    pub oracle: f64,
}

impl ClosedFormRow {
    pub fn printed_rel_diff(&self) -> f64 {
        rel_diff(self.printed, self.general)
    }

    pub fn oracle_rel_diff(&self) -> f64 {
        rel_diff(self.general, self.oracle)
    }
}

fn rel_diff(x: f64, reference: f64) -> f64 {
    (x - reference).abs() / reference.abs().max(f64::MIN_POSITIVE)
}

/// Printed vs general centre Laplace functional, with a 2-D quadrature
/// reference for the general form.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormReport {
    pub params: NetworkParams,
    pub rows: Vec<ClosedFormRow>,
}

impl ClosedFormReport {
    pub fn max_oracle_rel_diff(&self) -> f64 {
        self.rows.iter().map(ClosedFormRow::oracle_rel_diff).fold(0.0, f64::max)
    }

    pub fn max_printed_rel_diff(&self) -> f64 {
        self.rows.iter().map(ClosedFormRow::printed_rel_diff).fold(0.0, f64::max)
    }
}

impl fmt::Display for ClosedFormReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "centre Laplace functional, printed closed form vs general form (R={}, lambda0={}, eta={}, q={})",
            self.params.radius, self.params.lambda0, self.params.eta, self.params.q
        )?;
        writeln!(
            f,
            "{:>6} {:>9} {:>14} {:>14} {:>14} {:>12} {:>12}",
            "d1", "b", "printed", "general", "oracle", "printed/gen", "gen-oracle"
        )?;
        for row in &self.rows {
            writeln!(
                f,
                "{:>6} {:>9.4} {:>14.6e} {:>14.6e} {:>14.6e} {:>12.4e} {:>12.2e}",
                row.d1,
                row.b,
                row.printed,
                row.general,
                row.oracle,
                row.printed / row.general,
                row.oracle_rel_diff()
            )?;
        }
        Ok(())
    }
}

/// The 12-point comparison over `d1 ∈ {0.1, 0.5, 1, 2}` and the three
/// reference shapes, at the given `R`, `λ0`, `η`, `q`.
pub fn closed_form_report(p: &NetworkParams) -> Result<ClosedFormReport> {
    p.validate()?;
    let bound = p.shape_bound();
    let spec = crate::interference::default_spec().tightened(1);
    let oracle_spec = QuadratureSpec::default().tightened(2);
    let mut rows = Vec::with_capacity(12);
    for d1 in [0.1, 0.5, 1.0, 2.0] {
        for b in [-bound, 0.0, bound] {
            let pb = p.with_b(b)?;
            let query = LaplaceQuery::new(pb, 0.0, d1)?;
            rows.push(ClosedFormRow {
                d1,
                b,
                printed: laplace_center_closed_form(d1, p.q, &pb)?,
                general: laplace_interference_with(&query, &spec)?,
                oracle: laplace_2d(&query, &oracle_spec)?,
            });
        }
    }
    Ok(ClosedFormReport { params: *p, rows })
}

/// Relative gap between the printed and the exact clipped-ball measure at
/// one point.
pub fn printed_measure_rel_diff(r: f64, d1: f64, p: &NetworkParams) -> Result<f64> {
    let exact = lens_moments(r, d1, p.radius)?.measure(p);
    Ok(rel_diff(printed_clipped_ball_measure(r, d1, p)?, exact))
}
