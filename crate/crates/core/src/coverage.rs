//! Connection probability, position-dependent coverage, MU-weighted average
//! coverage and the search for the coverage-maximising deployment shape.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::geometry::{lens_moment_rates, lens_moments, mu_density, MuProfile, NetworkParams};
use crate::interference::{laplace_interference_with, laplace_parts, LaplaceParts, LaplaceQuery};
use crate::nnd::nnd_pdf;
use crate::numerics::{integrate_with_breaks, kronrod_nodes, QuadratureSpec};

/// Serving distances whose ball already holds this many expected access
/// points contribute at most `e^{-60}` to any coverage integral.
const NEGLIGIBLE_MASS: f64 = 60.0;

/// An analytic coverage value with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageResult {
    pub value: f64,
    pub err_estimate: f64,
}

/// `exp(−q N d1^η / P)`: the probability that fading alone beats the noise.
pub fn noise_factor(d1: f64, p: &NetworkParams) -> f64 {
    (-p.q * p.noise * d1.powf(p.eta) / p.power).exp()
}

/// `H(r, d1) = exp(−q N d1^η / P) · ℒ_ℐ(q d1^η)` under Rayleigh fading.
pub fn connection_probability(r: f64, d1: f64, p: &NetworkParams) -> Result<f64> {
    connection_probability_with(r, d1, p, &crate::interference::default_spec())
}

fn connection_probability_with(r: f64, d1: f64, p: &NetworkParams, spec: &QuadratureSpec) -> Result<f64> {
    let query = LaplaceQuery::new(*p, r, d1)?;
    let noise = noise_factor(d1, p);
    if noise == 0.0 {
        return Ok(0.0);
    }
    Ok(noise * laplace_interference_with(&query, spec)?)
}

/// Smallest `d1` at which `measure(d1) >= NEGLIGIBLE_MASS`, or `R + r` if
/// the whole domain holds less. `measure` must be nondecreasing.
fn truncation_distance<F: Fn(f64) -> f64>(r: f64, radius: f64, measure: F) -> f64 {
    let d_max = radius + r;
    if measure(d_max) < NEGLIGIBLE_MASS {
        return d_max;
    }
    let (mut lo, mut hi) = (0.0, d_max);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if measure(mid) < NEGLIGIBLE_MASS {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `s + L(3u² − 2u³)` and its Jacobian; flattens the square-root behaviour
/// of the clipped pdf at both ends of `[s, s + L]`.
fn smoothstep(u: f64, start: f64, len: f64) -> (f64, f64) {
    (start + len * u * u * (3.0 - 2.0 * u), 6.0 * len * u * (1.0 - u))
}

/// Coverage probability `C(r) = ∫₀^{R+r} H(r, d1) f(r, d1) dd1`.
///
/// The empty-network event counts as outage, so `C ≤ 1 − exp(−λ0πR²)`.
pub fn coverage_probability(r: f64, p: &NetworkParams) -> Result<CoverageResult> {
    coverage_probability_with(r, p, &QuadratureSpec::default())
}

pub fn coverage_probability_with(r: f64, p: &NetworkParams, spec: &QuadratureSpec) -> Result<CoverageResult> {
    p.validate()?;
    spec.validate()?;
    if !(r >= 0.0 && r <= p.radius * (1.0 + 1e-12)) {
        return Err(domain(format!("r = {r} outside [0, R]")));
    }
    let r = r.min(p.radius);
    let laplace_spec = spec.tightened(2);
    let seam = p.radius - r;
    let cut = truncation_distance(r, p.radius, |d| {
        lens_moments(r, d, p.radius).map(|m| m.measure(p)).unwrap_or(f64::INFINITY)
    });

    let mut failure: Option<Error> = None;
    let mut integrand = |d1: f64| -> f64 {
        let f = match nnd_pdf(r, d1, p) {
            Ok(f) => f,
            Err(e) => {
                failure.get_or_insert(e);
                return 0.0;
            }
        };
        if f == 0.0 {
            return 0.0;
        }
        match connection_probability_with(r, d1, p, &laplace_spec) {
            Ok(h) => h * f,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };

    let mut value = 0.0;
    let mut err = 0.0;
    let interior_end = seam.min(cut);
    if interior_end > 0.0 {
        let q = integrate_with_breaks(&mut integrand, &[0.0, interior_end], spec)?;
        value += q.value;
        err += q.err_estimate;
    }
    if cut > seam {
        let len = cut - seam;
        let q = integrate_with_breaks(
            |u| {
                let (d1, jac) = smoothstep(u, seam, len);
                if jac == 0.0 || d1 <= 0.0 {
                    0.0
                } else {
                    integrand(d1) * jac
                }
            },
            &[0.0, 0.5, 1.0],
            spec,
        )?;
        value += q.value;
        err += q.err_estimate;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(CoverageResult {
        value: value.clamp(0.0, 1.0),
        err_estimate: err,
    })
}

/// MU-weighted average `C̄ = (2/R²) ∫₀^R ρ(r) C(r) r dr` for deployment
/// shape `b` (overriding `p.b`).
pub fn average_coverage(b: f64, mu: &MuProfile, p: &NetworkParams) -> Result<CoverageResult> {
    average_coverage_with(b, mu, p, &QuadratureSpec::default())
}

pub fn average_coverage_with(b: f64, mu: &MuProfile, p: &NetworkParams, spec: &QuadratureSpec) -> Result<CoverageResult> {
    let p = p.with_b(b)?;
    mu.validate(p.radius)?;
    let inner_spec = spec.tightened(1);
    let scale = 2.0 / (p.radius * p.radius);
    let mut failure: Option<Error> = None;
    let mut inner_err = 0.0f64;
    let q = integrate_with_breaks(
        |r| {
            let w = match mu_density(r, mu, p.radius) {
                Ok(w) => w,
                Err(e) => {
                    failure.get_or_insert(e);
                    return 0.0;
                }
            };
            match coverage_probability_with(r, &p, &inner_spec) {
                Ok(c) => {
                    inner_err = inner_err.max(c.err_estimate);
                    scale * w * c.value * r
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        &[0.0, p.radius],
        spec,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(CoverageResult {
        value: q.value.clamp(0.0, 1.0),
        err_estimate: q.err_estimate + inner_err,
    })
}

/// Node layout of a [`CoverageTable`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableSpec {
    /// Kronrod panels across `r ∈ [0, R]`.
    pub r_panels: usize,
    /// Target panel width along `d1`, in units of `1/√λ0`.
    pub d1_panel_width: f64,
    /// Tolerances of each angular interference integral.
    pub laplace_spec: QuadratureSpec,
}

impl Default for TableSpec {
    fn default() -> Self {
        Self {
            r_panels: 6,
            d1_panel_width: 0.6,
            laplace_spec: crate::interference::default_spec(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct TableNode {
    weight: f64,
    d1: f64,
    area: f64,
    second_moment: f64,
    area_rate: f64,
    second_rate: f64,
    laplace: LaplaceParts,
    noise: f64,
}

#[derive(Debug, Clone)]
struct TableRow {
    r: f64,
    weight: f64,
    nodes: Vec<TableNode>,
}

/// Coverage integrals on a fixed composite Kronrod grid over `(r, d1)`.
///
/// Both the ball measure and the interference exponent are linear in
/// `(a, b)` with `a = 1 − bR²/2`, so each node stores their coefficients
/// once and `C(r)` / `C̄` can be re-evaluated for any shape `b` and any MU
/// profile `β` by plain summation. The grid is valid for every admissible
/// `b`: it is truncated only where the ball mass is negligible for both
/// extreme shapes.
#[derive(Debug, Clone)]
pub struct CoverageTable {
    params: NetworkParams,
    rows: Vec<TableRow>,
}

impl CoverageTable {
    pub fn build(p: &NetworkParams) -> Result<Self> {
        Self::build_with(p, &TableSpec::default())
    }

    pub fn build_with(p: &NetworkParams, spec: &TableSpec) -> Result<Self> {
        p.validate()?;
        spec.laplace_spec.validate()?;
        if spec.r_panels == 0 || !(spec.d1_panel_width > 0.0) {
            return Err(domain("table needs r_panels >= 1 and d1_panel_width > 0"));
        }
        let params = NetworkParams { b: 0.0, ..*p };
        let radius = params.radius;
        let r_step = radius / spec.r_panels as f64;
        let r_nodes: Vec<(f64, f64)> = (0..spec.r_panels)
            .flat_map(|i| kronrod_nodes(i as f64 * r_step, (i + 1) as f64 * r_step))
            .collect();

        let rows = r_nodes
            .par_iter()
            .map(|&(r, weight)| Self::build_row(&params, spec, r, weight))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { params, rows })
    }

    fn build_row(params: &NetworkParams, spec: &TableSpec, r: f64, weight: f64) -> Result<TableRow> {
        let radius = params.radius;
        let bound = params.shape_bound();
        let extremes = [params.with_b(-bound)?, params.with_b(bound)?];
        let cut = truncation_distance(r, radius, |d| {
            lens_moments(r, d, radius)
                .map(|m| extremes.iter().map(|e| m.measure(e)).fold(f64::INFINITY, f64::min))
                .unwrap_or(f64::INFINITY)
        });
        let h = spec.d1_panel_width / params.lambda0.sqrt();
        let seam = radius - r;

        // (d1, weight) pairs.
        let mut points: Vec<(f64, f64)> = Vec::new();
        let interior_end = seam.min(cut);
        if interior_end > 0.0 {
            let n = (interior_end / h).ceil().max(1.0) as usize;
            let step = interior_end / n as f64;
            for i in 0..n {
                points.extend(kronrod_nodes(i as f64 * step, (i + 1) as f64 * step));
            }
        }
        if cut > seam {
            let len = cut - seam;
            let n = (len / h).ceil().max(2.0) as usize;
            let step = 1.0 / n as f64;
            for i in 0..n {
                for (u, w) in kronrod_nodes(i as f64 * step, (i + 1) as f64 * step) {
                    let (d1, jac) = smoothstep(u, seam, len);
                    if d1 > 0.0 && jac > 0.0 {
                        points.push((d1, w * jac));
                    }
                }
            }
        }

        let mut nodes = Vec::with_capacity(points.len());
        for (d1, w) in points {
            let moments = lens_moments(r, d1, radius)?;
            let rates = lens_moment_rates(r, d1, radius)?;
            let noise = noise_factor(d1, params);
            let laplace = if noise > 0.0 {
                laplace_parts(&LaplaceQuery::new(*params, r, d1)?, true, &spec.laplace_spec)?
            } else {
                LaplaceParts {
                    uniform: 0.0,
                    shape: 0.0,
                    err_estimate: 0.0,
                }
            };
            nodes.push(TableNode {
                weight: w,
                d1,
                area: moments.area,
                second_moment: moments.second_moment,
                area_rate: rates.area,
                second_rate: rates.second_moment,
                laplace,
                noise,
            });
        }
        Ok(TableRow { r, weight, nodes })
    }

    /// Parameters the table was built for (`b` reported as zero).
    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    /// Radii of the table rows.
    pub fn radii(&self) -> Vec<f64> {
        self.rows.iter().map(|row| row.r).collect()
    }

    fn row_coverage(&self, row: &TableRow, p: &NetworkParams) -> f64 {
        let (l0, a, b) = (p.lambda0, p.a(), p.b);
        row.nodes
            .iter()
            .map(|n| {
                if n.noise == 0.0 {
                    return 0.0;
                }
                let mass = l0 * (a * n.area + b * n.second_moment);
                let rate = l0 * (a * n.area_rate + b * n.second_rate);
                let pdf = (rate * (-mass).exp()).max(0.0);
                n.weight * pdf * n.noise * n.laplace.laplace(p)
            })
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }

    /// `C(r)` at every table radius for deployment shape `b`.
    pub fn coverage_profile(&self, b: f64) -> Result<Vec<(f64, f64)>> {
        let p = self.params.with_b(b)?;
        Ok(self.rows.iter().map(|row| (row.r, self.row_coverage(row, &p))).collect())
    }

    /// `C̄(b, β)` by composite quadrature over the stored nodes.
    pub fn average_coverage(&self, b: f64, mu: &MuProfile) -> Result<f64> {
        let p = self.params.with_b(b)?;
        mu.validate(p.radius)?;
        let scale = 2.0 / (p.radius * p.radius);
        let mut total = 0.0;
        for row in &self.rows {
            let rho = mu_density(row.r.min(p.radius), mu, p.radius)?;
            total += row.weight * scale * rho * row.r * self.row_coverage(row, &p);
        }
        Ok(total.clamp(0.0, 1.0))
    }

    /// Total number of `(r, d1)` nodes.
    pub fn node_count(&self) -> usize {
        self.rows.iter().map(|row| row.nodes.len()).sum()
    }

    /// Largest serving distance stored for any row.
    pub fn max_d1(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|row| row.nodes.iter().map(|n| n.d1))
            .fold(0.0, f64::max)
    }
}

/// Scan-then-refine settings for [`optimize_b`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeSettings {
    /// Evenly spaced scan points over `[−2/R², 2/R²]`.
    pub grid_points: usize,
    /// Width at which golden-section refinement stops; `None` means
    /// `1e-3 · 2/R²`.
    pub refinement_tol: Option<f64>,
    /// Objective values closer than this to the best count as ties.
    pub value_tol: f64,
}

impl Default for OptimizeSettings {
    fn default() -> Self {
        Self {
            grid_points: 17,
            refinement_tol: None,
            value_tol: 1e-9,
        }
    }
}

/// Outcome of the deployment optimisation.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub b_star: f64,
    pub cbar_at_b_star: f64,
    /// `(b, C̄)` at every scan point that evaluated successfully.
    pub scan: Vec<(f64, f64)>,
    pub refinement_tol: f64,
}

/// `b* = argmax_b C̄(b, β)` for the given MU profile.
pub fn optimize_b(mu: &MuProfile, p: &NetworkParams) -> Result<OptimizationResult> {
    let table = CoverageTable::build(p)?;
    optimize_b_with(&table, mu, &OptimizeSettings::default())
}

/// [`optimize_b`] against a prebuilt table, so sweeps over `β` share it.
pub fn optimize_b_with(table: &CoverageTable, mu: &MuProfile, settings: &OptimizeSettings) -> Result<OptimizationResult> {
    let bound = table.params().shape_bound();
    maximize_on_interval(-bound, bound, settings, |b| table.average_coverage(b, mu))
}

/// Maximise `f` on `[lo, hi]`: evenly spaced scan, then golden-section search
/// inside the bracket around the best scan point. Ties (values within
/// `value_tol` of the best) resolve to the candidate of smallest `|b|`.
pub fn maximize_on_interval<F>(lo: f64, hi: f64, settings: &OptimizeSettings, mut f: F) -> Result<OptimizationResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) || settings.grid_points < 2 {
        return Err(domain("optimisation needs lo < hi and at least two grid points"));
    }
    let tol = settings.refinement_tol.unwrap_or(1e-3 * hi.abs().max(lo.abs()));
    if !(tol > 0.0) {
        return Err(domain("refinement tolerance must be positive"));
    }

    let n = settings.grid_points;
    let grid: Vec<f64> = (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect();
    let mut scan = Vec::with_capacity(n);
    let mut failures = 0usize;
    for &b in &grid {
        match f(b) {
            Ok(v) if v.is_finite() => scan.push((b, v)),
            _ => failures += 1,
        }
    }
    if failures * 5 > n || scan.is_empty() {
        return Err(Error::Optimization(format!(
            "objective failed at {failures} of {n} scan points"
        )));
    }

    let (best_idx, _) = scan
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &(_, v))| if v > acc.1 { (i, v) } else { acc });
    let best_b = scan[best_idx].0;
    let grid_idx = grid.iter().position(|&g| g == best_b).unwrap_or(0);
    let left = grid[grid_idx.saturating_sub(1)];
    let right = grid[(grid_idx + 1).min(n - 1)];

    let (refined_b, refined_v) = golden_section_max(left, right, tol, &mut f)?;

    let mut candidates = scan.clone();
    candidates.push((refined_b, refined_v));
    let best_value = candidates.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    let (b_star, cbar) = candidates
        .into_iter()
        .filter(|c| c.1 >= best_value - settings.value_tol)
        .min_by(|x, y| x.0.abs().total_cmp(&y.0.abs()))
        .expect("candidate set contains the best value");

    Ok(OptimizationResult {
        b_star,
        cbar_at_b_star: cbar,
        scan,
        refinement_tol: tol,
    })
}

fn golden_section_max<F>(mut a: f64, mut b: f64, tol: f64, f: &mut F) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a) > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}
