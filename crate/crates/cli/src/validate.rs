use std::fmt::Write as _;

use fincov::coverage::coverage_probability;
use fincov::diagnostics::closed_form_report;
use fincov::geometry::clipped_ball_measure;
use fincov::interference::{laplace_interference, LaplaceQuery};
use fincov::montecarlo::stats::{ks_critical_value, ks_statistic, ks_two_sample, ks_two_sample_critical_value};
use fincov::montecarlo::{
    radial_cdf, sample_deployment, sample_deployment_by_thinning, simulate_coverage, simulate_laplace, simulate_nnd,
    trial_rng, Conditioning, SimConfig,
};
use fincov::nnd::{clipped_pdf, interior_pdf, nnd_cdf, pdf_mass};
use fincov::oracle::{clipped_ball_measure_2d, laplace_2d};
use fincov::{NetworkParams, Preset, QuadratureSpec};

use crate::args::{single, Resolved};
use crate::error::{CliError, CliResult};
use crate::manifest::{emit, num, Block, RunManifest};

struct Check {
    name: String,
    deviation: f64,
    tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            deviation,
            tolerance,
        }
    }

    fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

fn run_checks(p: &NetworkParams, trials: u64, seed: u64) -> fincov::Result<Vec<Check>> {
    let radius = p.radius;
    let radii = [0.0, 0.5 * radius, 0.9 * radius];
    let mut checks = Vec::new();

    let spec = QuadratureSpec::default().tightened(2);
    let nonempty = -(-p.mean_count()).exp_m1();
    let mut worst = 0.0f64;
    for r in radii {
        worst = worst.max((pdf_mass(r, p, &spec)? - nonempty).abs());
    }
    checks.push(Check::new("nnd pdf integrates to 1 - exp(-mean count)", worst, 1e-6));

    let mut worst = 0.0f64;
    for r in [0.2 * radius, 0.5 * radius, 0.8 * radius] {
        let seam = radius - r;
        worst = worst.max((interior_pdf(r, seam, p) - clipped_pdf(r, seam, p)?).abs());
    }
    checks.push(Check::new("nnd pdf continuous where the ball meets the border", worst, 1e-6));

    let oracle_spec = QuadratureSpec::default().tightened(3);
    let mut worst = 0.0f64;
    for r in radii {
        for d1 in [0.3 * radius, 0.8 * radius, 1.3 * radius] {
            let exact = clipped_ball_measure(r, d1, p)?;
            let brute = clipped_ball_measure_2d(r, d1, p, &oracle_spec)?;
            worst = worst.max((exact - brute).abs() / brute);
        }
    }
    checks.push(Check::new("clipped-ball measure vs 2-D quadrature (relative)", worst, 1e-6));

    let scale = 1.0 / p.lambda0.sqrt();
    let mut worst = 0.0f64;
    for r in radii {
        for d1 in [0.2 * scale, scale] {
            let query = LaplaceQuery::new(*p, r, d1.min(radius))?;
            let analytic = laplace_interference(&query)?;
            let brute = laplace_2d(&query, &oracle_spec)?;
            worst = worst.max((analytic - brute).abs() / brute);
        }
    }
    checks.push(Check::new("laplace functional vs 2-D quadrature (relative)", worst, 1e-5));

    for (i, r) in radii.into_iter().enumerate() {
        let analytic = coverage_probability(r, p)?.value;
        let est = simulate_coverage(&SimConfig::new(*p, trials, seed.wrapping_add(i as u64)).at(r, 0.0))?;
        let z = (est.mean - analytic).abs() / est.std_error.max(f64::MIN_POSITIVE);
        checks.push(Check::new(
            format!("coverage at r={} vs simulation, |z| (analytic {:.5}, simulated {:.5})", num(r), analytic, est.mean),
            z,
            3.0,
        ));
    }

    let (r, d1) = (0.5 * radius, (0.5 * scale).min(radius));
    let analytic = laplace_interference(&LaplaceQuery::new(*p, r, d1)?)?;
    let est = simulate_laplace(&SimConfig::new(*p, trials, seed.wrapping_add(10)).at(r, 0.0), d1, Conditioning::Discard)?;
    checks.push(Check::new(
        format!("laplace at r={} d1={} vs simulation, |z|", num(r), num(d1)),
        (est.mean - analytic).abs() / est.std_error.max(f64::MIN_POSITIVE),
        3.0,
    ));

    let sim = simulate_nnd(&SimConfig::new(*p, trials, seed.wrapping_add(11)).at(r, 0.0), 0.05)?;
    let ks = ks_statistic(&sim.samples, |x| nnd_cdf(r, x, p).unwrap_or(f64::NAN) / nonempty);
    let crit = ks_critical_value(0.01, sim.samples.len().max(1));
    checks.push(Check::new(format!("serving distance KS vs analytic cdf (critical {crit:.4})"), ks, crit));

    let n = 20_000;
    let collect = |thinning: bool, stream_seed: u64| {
        let mut out = Vec::with_capacity(n + 256);
        let mut i = 0;
        while out.len() < n {
            let mut rng = trial_rng(stream_seed, i);
            let pts = if thinning {
                sample_deployment_by_thinning(p, &mut rng)
            } else {
                sample_deployment(p, &mut rng)
            };
            out.extend(pts.iter().map(|pt| pt.t));
            i += 1;
        }
        out.truncate(n);
        out
    };
    let inverse = collect(false, seed.wrapping_add(12));
    let thinned = collect(true, seed.wrapping_add(13));
    let crit = ks_critical_value(0.01, n);
    checks.push(Check::new(
        format!("inverse-cdf radii KS vs radial cdf (critical {crit:.4})"),
        ks_statistic(&inverse, |t| radial_cdf(t, p)),
        crit,
    ));
    let crit = ks_two_sample_critical_value(0.01, n, n);
    checks.push(Check::new(
        format!("inverse-cdf vs thinning radii, two-sample KS (critical {crit:.4})"),
        ks_two_sample(&inverse, &thinned),
        crit,
    ));
    Ok(checks)
}

pub fn validate(res: &Resolved) -> CliResult<()> {
    let radius = res.radius()?;
    let lambda0 = single(res.lambda0s(&[1.0])?, "lambda0")?;
    let eta = single(res.etas(&[4.0])?, "eta")?;
    let base = res.params(lambda0, eta, 1.0)?;
    let shapes = res.shapes(&[Preset::Uniform])?;
    let b = single(shapes.iter().map(|s| s.b).collect(), "b")?;
    let p = Resolved::with_shape(&base, b)?;
    let trials = res.trials(20_000)?;
    let seed = res.seed()?.unwrap_or(1);

    let checks = run_checks(&p, trials, seed)?;
    let mut report = String::new();
    let _ = writeln!(
        report,
        "validation: R={} lambda0={} b={} eta={} q={} P={} N={} trials={} seed={}",
        num(radius),
        num(lambda0),
        num(b),
        num(eta),
        num(p.q),
        num(p.power),
        num(p.noise),
        trials,
        seed
    );
    for c in &checks {
        let _ = writeln!(
            report,
            "{} {}: {:.3e} (tolerance {:.3e})",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            c.deviation,
            c.tolerance
        );
    }
    let centre = NetworkParams { b: 0.0, ..base };
    match closed_form_report(&centre) {
        Ok(cf) => {
            let _ = writeln!(
                report,
                "INFO printed centre closed form vs general form: max relative gap {:.3e}; general form vs 2-D quadrature {:.3e}",
                cf.max_printed_rel_diff(),
                cf.max_oracle_rel_diff()
            );
            for line in cf.to_string().lines() {
                let _ = writeln!(report, "INFO   {line}");
            }
        }
        Err(e) => {
            let _ = writeln!(report, "INFO printed centre closed form not evaluated: {e}");
        }
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let _ = writeln!(report, "{} of {} checks passed", checks.len() - failed, checks.len());

    let mut m = RunManifest::new("validate");
    m.seed = Some(seed);
    m.set("R", num(radius));
    m.set("lambda0", num(lambda0));
    m.set("b", num(b));
    m.set("eta", num(eta));
    m.set("q", num(p.q));
    m.set("power", num(p.power));
    m.set("noise", num(p.noise));
    m.set("trials", trials);
    m.outputs = emit(&[Block { label: None, csv: report }], res.out().as_deref())?;
    m.publish()?;
    if failed > 0 {
        return Err(CliError::ValidationFailed(format!("{failed} of {} checks failed", checks.len())));
    }
    Ok(())
}
