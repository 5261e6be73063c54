use std::fmt::Write as _;

use fincov::coverage::{coverage_probability, optimize_b_with, CoverageTable, OptimizeSettings};
use fincov::interference::{laplace_interference, LaplaceQuery};
use fincov::montecarlo::{simulate_coverage, simulate_laplace, simulate_nnd, Conditioning, Sampler, SimConfig};
use fincov::{nnd_pdf, MuProfile, Preset};

use crate::args::{single, Quantity, Resolved, SamplerArg};
use crate::error::{usage, CliError, CliResult};
use crate::manifest::{emit, join, num, Block, RunManifest};

fn check_radii(radii: &[f64], radius: f64) -> CliResult<()> {
    match radii.iter().find(|&&r| !(r >= 0.0 && r <= radius)) {
        Some(r) => Err(usage(format!("--r = {r} outside [0, R = {radius}]"))),
        None => Ok(()),
    }
}

/// `n` evenly spaced radii covering `[0, R]`.
fn radius_grid(radius: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|i| radius * i as f64 / (n - 1) as f64).collect()
}

fn record_common(m: &mut RunManifest, res: &Resolved, p: &fincov::NetworkParams) {
    m.set("R", num(p.radius));
    m.set("power", num(p.power));
    m.set("noise", num(p.noise));
    m.set("q", num(p.q));
    if let Some(path) = res.out() {
        m.set("out", path.display());
    }
}

pub fn nnd(res: &Resolved) -> CliResult<()> {
    let radius = res.radius()?;
    let lambda0 = single(res.lambda0s(&[1.0])?, "lambda0")?;
    let p = res.params(lambda0, 4.0, 1.0)?;
    let shapes = res.shapes(&Preset::ALL)?;
    let radii = res.radii(&radius_grid(radius, 6))?;
    check_radii(&radii, radius)?;
    let d1_max = res.d1_max(2.0 * radius)?;
    if !(d1_max > 0.0 && d1_max.is_finite()) {
        return Err(usage(format!("--d1-max must be positive, got {d1_max}")));
    }
    let steps = res.steps(200)?;

    let mut blocks = Vec::new();
    for shape in &shapes {
        let pb = Resolved::with_shape(&p, shape.b)?;
        let mut csv = String::from("r,d1,pdf\n");
        for &r in &radii {
            for i in 1..=steps {
                let d1 = d1_max * i as f64 / steps as f64;
                let _ = writeln!(csv, "{},{},{}", num(r), num(d1), num(nnd_pdf(r, d1, &pb)?));
            }
        }
        blocks.push(Block {
            label: Some((shape.label.clone(), shape.b)),
            csv,
        });
    }
    let mut m = RunManifest::new("nnd");
    record_common(&mut m, res, &p);
    m.set("lambda0", num(lambda0));
    m.set_list("b", &shapes.iter().map(|s| s.b).collect::<Vec<_>>());
    m.set_list("r", &radii);
    m.set("d1-max", num(d1_max));
    m.set("steps", steps);
    m.outputs = emit(&blocks, res.out().as_deref())?;
    m.publish()
}

pub fn laplace(res: &Resolved) -> CliResult<()> {
    let radius = res.radius()?;
    let lambda0 = single(res.lambda0s(&[1.0])?, "lambda0")?;
    let eta = single(res.etas(&[6.0])?, "eta")?;
    let p = res.params(lambda0, eta, 1.0)?;
    let shapes = res.shapes(&Preset::ALL)?;
    let steps = res.steps(51)?;
    let radii = res.radii(&radius_grid(radius, steps))?;
    check_radii(&radii, radius)?;
    let d1s = res.d1s(&[0.5, 1.0, 2.0])?;
    if let Some(d) = d1s.iter().find(|&&d| !(d > 0.0 && d.is_finite())) {
        return Err(usage(format!("--d1 must be positive, got {d}")));
    }

    let mut blocks = Vec::new();
    for shape in &shapes {
        let pb = Resolved::with_shape(&p, shape.b)?;
        let mut csv = String::from("r,d1,laplace\n");
        for &d1 in &d1s {
            for &r in &radii {
                let query = LaplaceQuery::new(pb, r, d1).map_err(|e| usage(e.to_string()))?;
                let _ = writeln!(csv, "{},{},{}", num(r), num(d1), num(laplace_interference(&query)?));
            }
        }
        blocks.push(Block {
            label: Some((shape.label.clone(), shape.b)),
            csv,
        });
    }
    let mut m = RunManifest::new("laplace");
    record_common(&mut m, res, &p);
    m.set("lambda0", num(lambda0));
    m.set("eta", num(eta));
    m.set_list("b", &shapes.iter().map(|s| s.b).collect::<Vec<_>>());
    m.set_list("r", &radii);
    m.set_list("d1", &d1s);
    m.outputs = emit(&blocks, res.out().as_deref())?;
    m.publish()
}

pub fn coverage(res: &Resolved) -> CliResult<()> {
    let radius = res.radius()?;
    let lambda0s = res.lambda0s(&[1.0, 5.0])?;
    let etas = res.etas(&[2.0, 4.0])?;
    let shapes = res.shapes(&Preset::ALL)?;
    let steps = res.steps(21)?;
    let radii = res.radii(&radius_grid(radius, steps))?;
    check_radii(&radii, radius)?;

    let mut csv = String::from("r,b,eta,lambda0,coverage,err_estimate\n");
    let mut base = None;
    for &eta in &etas {
        for &lambda0 in &lambda0s {
            let p = res.params(lambda0, eta, 1.0)?;
            base.get_or_insert(p);
            for shape in &shapes {
                let pb = Resolved::with_shape(&p, shape.b)?;
                eprintln!("coverage: eta={eta} lambda0={lambda0} b={}", shape.b);
                for &r in &radii {
                    let c = coverage_probability(r, &pb)?;
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{}",
                        num(r),
                        num(shape.b),
                        num(eta),
                        num(lambda0),
                        num(c.value),
                        num(c.err_estimate)
                    );
                }
            }
        }
    }
    let mut m = RunManifest::new("coverage");
    if let Some(p) = base {
        record_common(&mut m, res, &p);
    }
    m.set_list("eta", &etas);
    m.set_list("lambda0", &lambda0s);
    m.set_list("b", &shapes.iter().map(|s| s.b).collect::<Vec<_>>());
    m.set_list("r", &radii);
    m.outputs = emit(&[Block { label: None, csv }], res.out().as_deref())?;
    m.publish()
}

pub fn optimize(res: &Resolved) -> CliResult<()> {
    let radius = res.radius()?;
    let bound = 2.0 / (radius * radius);
    let lambda0s = res.lambda0s(&[1.0, 5.0])?;
    let etas = res.etas(&[2.0, 4.0])?;
    let steps = res.steps(9)?;
    let default_betas: Vec<f64> = if steps == 1 {
        vec![0.0]
    } else {
        (0..steps)
            .map(|i| if i + 1 == steps { bound } else { -bound + 2.0 * bound * i as f64 / (steps - 1) as f64 })
            .collect()
    };
    let betas = res.betas(&default_betas)?;
    let profiles = betas
        .iter()
        .map(|&beta| MuProfile::new(beta, radius).map_err(|e| usage(e.to_string())))
        .collect::<CliResult<Vec<_>>>()?;

    let settings = OptimizeSettings::default();
    let mut csv = String::from("beta,eta,lambda0,b_star,cbar\n");
    let mut base = None;
    for &eta in &etas {
        for &lambda0 in &lambda0s {
            let p = res.params(lambda0, eta, 1.0)?;
            base.get_or_insert(p);
            eprintln!("optimize: building coverage table for eta={eta} lambda0={lambda0}");
            let table = CoverageTable::build(&p)?;
            for mu in &profiles {
                let opt = optimize_b_with(&table, mu, &settings)?;
                eprintln!(
                    "optimize: eta={eta} lambda0={lambda0} beta={} b*={} cbar={}",
                    mu.beta, opt.b_star, opt.cbar_at_b_star
                );
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    num(mu.beta),
                    num(eta),
                    num(lambda0),
                    num(opt.b_star),
                    num(opt.cbar_at_b_star)
                );
            }
        }
    }
    let mut m = RunManifest::new("optimize");
    if let Some(p) = base {
        record_common(&mut m, res, &p);
    }
    m.set_list("eta", &etas);
    m.set_list("lambda0", &lambda0s);
    m.set_list("beta", &betas);
    m.set("grid_points", settings.grid_points);
    m.set("refinement_tol", num(1e-3 * bound));
    m.outputs = emit(&[Block { label: None, csv }], res.out().as_deref())?;
    m.publish()
}

pub fn simulate(res: &Resolved, quantity: Quantity, theta: f64, sampler: SamplerArg) -> CliResult<()> {
    let seed = res
        .seed()?
        .ok_or_else(|| usage("simulate requires --seed"))?;
    let radius = res.radius()?;
    let lambda0 = single(res.lambda0s(&[1.0])?, "lambda0")?;
    let eta = single(res.etas(&[4.0])?, "eta")?;
    let p = res.params(lambda0, eta, 1.0)?;
    let shapes = res.shapes(&[Preset::Uniform])?;
    let b = single(shapes.iter().map(|s| s.b).collect(), "b")?;
    let p = Resolved::with_shape(&p, b)?;
    let trials = res.trials(10_000)?;
    let beta = single(res.betas(&[0.0])?, "beta")?;
    let mu = MuProfile::new(beta, radius).map_err(|e| usage(e.to_string()))?;

    let mut cfg = SimConfig::new(p, trials, seed).with_sampler(match sampler {
        SamplerArg::Inverse => Sampler::InverseCdf,
        SamplerArg::Thinning => Sampler::Thinning,
    });
    let fixed_r = if res.radii_given() {
        let r = single(res.radii(&[])?, "r")?;
        check_radii(&[r], radius)?;
        Some(r)
    } else {
        None
    };
    cfg = match fixed_r {
        Some(r) => cfg.at(r, theta),
        None if quantity == Quantity::Coverage => cfg.sampled_mu(mu),
        None => cfg.at(0.0, theta),
    };

    let estimate = match quantity {
        Quantity::Coverage => simulate_coverage(&cfg)?,
        Quantity::Nnd => simulate_nnd(&cfg, 0.05)?.mean,
        Quantity::Laplace => {
            let d1 = single(res.d1s(&[])?, "d1").map_err(|_| usage("simulate --quantity laplace needs one --d1"))?;
            simulate_laplace(&cfg, d1, Conditioning::Discard).map_err(|e| match e {
                fincov::Error::Domain(msg) => usage(msg),
                other => CliError::Library(other),
            })?
        }
    };
    let csv = format!(
        "mean,std_error,trials\n{},{},{}\n",
        num(estimate.mean),
        num(estimate.std_error),
        estimate.trials_used
    );

    let mut m = RunManifest::new("simulate");
    m.seed = Some(seed);
    record_common(&mut m, res, &p);
    m.set("quantity", format!("{quantity:?}").to_lowercase());
    m.set("lambda0", num(lambda0));
    m.set("eta", num(eta));
    m.set("b", num(b));
    m.set("trials", trials);
    m.set("sampler", format!("{sampler:?}").to_lowercase());
    match fixed_r {
        Some(r) => m.set("mu", format!("fixed r={} theta={}", num(r), num(theta))),
        None if quantity == Quantity::Coverage => m.set("mu", format!("sampled beta={}", num(beta))),
        None => m.set("mu", format!("fixed r=0.0 theta={}", num(theta))),
    }
    if quantity == Quantity::Laplace {
        m.set("d1", join(&res.d1s(&[])?));
    }
    m.outputs = emit(&[Block { label: None, csv }], res.out().as_deref())?;
    m.publish()
}
