//! Deployment geometry: the quadratic radial intensity, the MU density, the
//! intensity measure of a ball clipped by the circular domain, and the
//! shifted-coordinate quantities (intersection angle, distance to border)
//! used by the interference integral.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Result};

/// Slack allowed on radial coordinates before they count as out of domain.
const RADIAL_SLACK: f64 = 1e-12;

/// Parameters of the access-point process and of the link.
///
/// `a = 1 − bR²/2` is always derived from `b`, so the expected number of
/// access points stays `λ0 π R²` for every shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    /// Domain radius `R`.
    pub radius: f64,
    /// Mean density `λ0` (points per unit area).
    pub lambda0: f64,
    /// Shape `b`, in `[−2/R², 2/R²]`.
    pub b: f64,
    /// Pathloss exponent `η`.
    pub eta: f64,
    /// Transmit power `P`.
    pub power: f64,
    /// Thermal noise power `N`.
    pub noise: f64,
    /// SINR threshold `q`.
    pub q: f64,
}

impl Default for NetworkParams {
    /// `R = 5, λ0 = 1, b = 0, η = 4, P = N = q = 1`.
    fn default() -> Self {
        Self {
            radius: 5.0,
            lambda0: 1.0,
            b: 0.0,
            eta: 4.0,
            power: 1.0,
            noise: 1.0,
            q: 1.0,
        }
    }
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.radius,
            self.lambda0,
            self.b,
            self.eta,
            self.power,
            self.noise,
            self.q,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(domain(format!("non-finite network parameter in {self:?}")));
        }
        if self.radius <= 0.0 {
            return Err(domain(format!("R must be positive, got {}", self.radius)));
        }
        if self.lambda0 <= 0.0 {
            return Err(domain(format!("lambda0 must be positive, got {}", self.lambda0)));
        }
        if self.eta < 2.0 {
            return Err(domain(format!("eta must be >= 2, got {}", self.eta)));
        }
        if self.power <= 0.0 {
            return Err(domain(format!("power must be positive, got {}", self.power)));
        }
        if self.noise < 0.0 {
            return Err(domain(format!("noise must be >= 0, got {}", self.noise)));
        }
        if self.q <= 0.0 {
            return Err(domain(format!("q must be positive, got {}", self.q)));
        }
        check_shape("b", self.b, self.radius)
    }

    /// Largest admissible `|b|`, `2/R²`.
    pub fn shape_bound(&self) -> f64 {
        shape_bound(self.radius)
    }

    /// Constant term `a = 1 − bR²/2` of the intensity.
    pub fn a(&self) -> f64 {
        1.0 - self.b * self.radius * self.radius / 2.0
    }

    /// Expected number of access points, `λ0 π R²`.
    pub fn mean_count(&self) -> f64 {
        self.lambda0 * PI * self.radius * self.radius
    }

    pub fn with_b(self, b: f64) -> Result<Self> {
        let p = Self { b, ..self };
        p.validate()?;
        Ok(p)
    }

    pub fn with_preset(self, preset: Preset) -> Self {
        Self {
            b: preset.b(self.radius),
            ..self
        }
    }
}

fn shape_bound(radius: f64) -> f64 {
    2.0 / (radius * radius)
}

fn check_shape(name: &str, value: f64, radius: f64) -> Result<()> {
    let bound = shape_bound(radius);
    if !value.is_finite() || value.abs() > bound * (1.0 + 1e-12) {
        return Err(domain(format!(
            "{name} must lie in [-2/R², 2/R²] = [{:.6}, {:.6}], got {value}",
            -bound, bound
        )));
    }
    Ok(())
}

/// The three reference deployment shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// `b = 0`.
    Uniform,
    /// `b = −2/R²`: mass near the centre (random-waypoint stationary law).
    Concave,
    /// `b = 2/R²`: mass near the border.
    Convex,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Uniform, Preset::Concave, Preset::Convex];

    pub fn b(self, radius: f64) -> f64 {
        match self {
            Preset::Uniform => 0.0,
            Preset::Concave => -shape_bound(radius),
            Preset::Convex => shape_bound(radius),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Uniform => "uniform",
            Preset::Concave => "concave",
            Preset::Convex => "convex",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Preset::Uniform),
            "concave" => Ok(Preset::Concave),
            "convex" => Ok(Preset::Convex),
            other => Err(format!("unknown preset '{other}' (uniform|concave|convex)")),
        }
    }
}

/// Radial shape `β` of the mobile-user density `ρ(r) = 1 − βR²/2 + βr²`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MuProfile {
    pub beta: f64,
}

impl MuProfile {
    pub fn new(beta: f64, radius: f64) -> Result<Self> {
        check_shape("beta", beta, radius)?;
        Ok(Self { beta })
    }

    pub fn validate(&self, radius: f64) -> Result<()> {
        check_shape("beta", self.beta, radius)
    }
}

/// A point `(t, φ)` of the disk in polar coordinates about its centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub t: f64,
    pub phi: f64,
}

impl PolarPoint {
    pub fn to_cartesian(self) -> (f64, f64) {
        (self.t * self.phi.cos(), self.t * self.phi.sin())
    }

    pub fn distance_to(self, other: PolarPoint) -> f64 {
        let (x0, y0) = self.to_cartesian();
        let (x1, y1) = other.to_cartesian();
        (x1 - x0).hypot(y1 - y0)
    }
}

fn check_radial(name: &str, value: f64, radius: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 || value > radius * (1.0 + RADIAL_SLACK) {
        return Err(domain(format!("{name} = {value} outside [0, R = {radius}]")));
    }
    Ok(())
}

/// Access-point intensity `λ0 (a + b t²)` at radius `t`.
pub fn ap_intensity(t: f64, p: &NetworkParams) -> Result<f64> {
    p.validate()?;
    check_radial("t", t, p.radius)?;
    Ok((p.lambda0 * (p.a() + p.b * t * t)).max(0.0))
}

/// Mobile-user density `ρ(r) = 1 − βR²/2 + βr²`; averages to one over the disk.
pub fn mu_density(r: f64, mu: &MuProfile, radius: f64) -> Result<f64> {
    mu.validate(radius)?;
    check_radial("r", r, radius)?;
    Ok((1.0 - mu.beta * radius * radius / 2.0 + mu.beta * r * r).max(0.0))
}

/// Area and second moment `∫ t² dA` of `B(r, d1) ∩ V`.
///
/// Any intensity of the form `λ0 (a + b t²)` integrates over the region to
/// `λ0 (a·area + b·second_moment)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensMoments {
    pub area: f64,
    pub second_moment: f64,
}

impl LensMoments {
    pub fn measure(&self, p: &NetworkParams) -> f64 {
        p.lambda0 * (p.a() * self.area + p.b * self.second_moment)
    }
}

/// Moments of the ball `B(r, d1)` clipped to the disk of radius `R`, for
/// `r` the MU's distance from the centre.
pub fn lens_moments(r: f64, d1: f64, radius: f64) -> Result<LensMoments> {
    if !(radius > 0.0) {
        return Err(domain("R must be positive"));
    }
    check_radial("r", r, radius)?;
    if !d1.is_finite() || d1 < 0.0 {
        return Err(domain(format!("d1 must be nonnegative, got {d1}")));
    }
    let r = r.min(radius);
    if d1 >= radius + r {
        return Ok(LensMoments {
            area: PI * radius * radius,
            second_moment: PI * radius.powi(4) / 2.0,
        });
    }
    if d1 <= radius - r {
        return Ok(LensMoments {
            area: PI * d1 * d1,
            second_moment: PI * d1 * d1 * (d1 * d1 / 2.0 + r * r),
        });
    }
    Ok(LensMoments {
        area: clipped_bracket(r, d1, radius, 1.0, 0.0),
        second_moment: clipped_bracket(r, d1, radius, 0.0, 1.0),
    })
}

/// Chord geometry of the circles `|x| = R` and `|x − r| = d1`: the signed
/// offsets `r̂ = (R² + r² − d1²)/2r` (from the centre) and `r̃ = r̂ − r` (from
/// the MU) of their common chord, and its half-length.
///
/// The half-chord is formed from the factorised product so that it vanishes
/// exactly at tangency.
fn chord_geometry(r: f64, d1: f64, radius: f64) -> (f64, f64, f64) {
    let r_hat = ((radius * radius + r * r - d1 * d1) / (2.0 * r)).clamp(-radius, radius);
    let r_tilde = (radius - r) * (radius + r) / (2.0 * r) - d1 * d1 / (2.0 * r);
    let h2 = (d1 - radius + r) * (d1 + radius - r) * (radius + r - d1) * (radius + r + d1)
        / (4.0 * r * r);
    (r_hat, r_tilde, h2.max(0.0).sqrt())
}

/// Expected number of points in the clipped ball per unit `λ0`, for
/// intensity `a + b t²`; linear in `(a, b)`.
fn clipped_bracket(r: f64, d1: f64, radius: f64, a: f64, b: f64) -> f64 {
    let rr = radius * radius;
    let (r_hat, r_tilde, chord) = chord_geometry(r, d1, radius);
    let d2 = d1 * d1;

    // arctan(x / chord) + π/2 written with atan2 so the tangent case is exact.
    let ball_angle = r_tilde.atan2(chord) + FRAC_PI_2;
    let disk_angle = FRAC_PI_2 - r_hat.atan2(chord);

    a * r_tilde * chord
        + d2 * ball_angle * (a + b * (d2 + 2.0 * r * r) / 2.0)
        // b r̃ (5d1⁴ − 7d1²r̃² + 2r̃⁴) / (12 chord), with chord² = d1² − r̃² cancelled.
        + b * r_tilde * chord * (5.0 * d2 - 2.0 * r_tilde * r_tilde) / 12.0
        - b * chord / 12.0
            * (d2 * (13.0 * r + 3.0 * r_hat)
                + 2.0 * (r.powi(3) + r * r * r_hat + r * r_hat * r_hat - 3.0 * r_hat.powi(3)))
        + rr * (a + b * rr / 2.0) * disk_angle
        - r_hat * chord * (a + b / 6.0 * (rr + 2.0 * r_hat * r_hat))
}

/// Intensity measure `Λ(B(r, d1) ∩ V)`.
pub fn clipped_ball_measure(r: f64, d1: f64, p: &NetworkParams) -> Result<f64> {
    p.validate()?;
    Ok(lens_moments(r, d1, p.radius)?.measure(p).max(0.0))
}

/// Rates `d/dd1` of the lens moments: the integral over the part of the
/// sphere `|x − r| = d1` lying inside the domain.
pub fn lens_moment_rates(r: f64, d1: f64, radius: f64) -> Result<LensMoments> {
    let theta = intersection_angle(r, d1, radius)?;
    let arc = 2.0 * d1 * theta;
    let sin_term = if r > 0.0 { 4.0 * r * d1 * d1 * theta.sin() } else { 0.0 };
    Ok(LensMoments {
        area: arc,
        second_moment: arc * (r * r + d1 * d1) - sin_term,
    })
}

/// Angle `θ̂₁` (from the bearing pointing at the domain centre) at which the
/// circle of radius `d1` around the MU leaves the domain.
pub fn intersection_angle(r: f64, d1: f64, radius: f64) -> Result<f64> {
    check_radial("r", r, radius)?;
    if !d1.is_finite() || d1 <= 0.0 {
        return Err(domain(format!("d1 must be positive, got {d1}")));
    }
    if r == 0.0 {
        // Concentric: the whole circle lies inside or outside.
        return Ok(if d1 <= radius { PI } else { 0.0 });
    }
    if d1 <= radius - r {
        return Ok(PI);
    }
    if d1 >= radius + r {
        return Ok(0.0);
    }
    // arccos((r² + d1² − R²)/(2 r d1)) = atan2(half-chord, −r̃).
    let (_, r_tilde, chord) = chord_geometry(r, d1, radius);
    Ok(chord.atan2(-r_tilde))
}

/// Distance `R̂(θ) = r cos θ + √(R² − r² sin² θ)` from the MU to the border
/// along bearing `θ`, measured from the direction of the centre.
pub fn border_distance(r: f64, theta: f64, radius: f64) -> Result<f64> {
    check_radial("r", r, radius)?;
    let r = r.min(radius);
    let s = r * theta.sin();
    Ok(r * theta.cos() + (radius * radius - s * s).max(0.0).sqrt())
}
