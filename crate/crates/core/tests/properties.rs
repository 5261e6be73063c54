use std::f64::consts::PI;

use fincov::geometry::{border_distance, clipped_ball_measure, intersection_angle, lens_moments};
use fincov::interference::{laplace_interference, LaplaceQuery};
use fincov::montecarlo::{radial_cdf, radial_quantile};
use fincov::nnd::nnd_pdf;
use fincov::numerics::{integrate, psi};
use fincov::{NetworkParams, QuadratureSpec};
use proptest::prelude::*;

const R: f64 = 5.0;

fn shape() -> impl Strategy<Value = f64> {
    -2.0 / (R * R)..=2.0 / (R * R)
}

fn params(b: f64) -> NetworkParams {
    NetworkParams { b, ..NetworkParams::default() }
}

proptest! {
    #[test]
    fn psi_within_integrand_bounds(x in 0.05f64..4.0, y in 0.0f64..1e8) {
        let v = psi(x, y).unwrap();
        prop_assert!(v <= 1.0 + 1e-15);
        prop_assert!(v >= 1.0 / (1.0 + y) * (1.0 - 1e-12));
    }

    #[test]
    fn psi_decreasing_in_y(x in 0.1f64..3.0, y in 0.0f64..1e6, factor in 1.01f64..10.0) {
        prop_assert!(psi(x, y * factor + 1e-3).unwrap() < psi(x, y).unwrap());
    }

    #[test]
    fn psi_log_identity(exp in -6.0f64..6.0) {
        let y = 10f64.powf(exp);
        let want = y.ln_1p();
        prop_assert!((psi(1.0, y).unwrap() * y - want).abs() <= 1e-10 * want.max(1e-300));
    }

    #[test]
    fn integrate_is_additive(a in -2.0f64..0.0, mid in 0.0f64..1.0, c in 1.0f64..3.0, k in 0.5f64..3.0) {
        let spec = QuadratureSpec::default();
        let f = |x: f64| (k * x).sin() + x * x;
        let whole = integrate(f, a, c, &spec).unwrap();
        let left = integrate(f, a, mid, &spec).unwrap();
        let right = integrate(f, mid, c, &spec).unwrap();
        let tol = whole.err_estimate + left.err_estimate + right.err_estimate + 1e-12;
        prop_assert!((whole.value - left.value - right.value).abs() <= tol.max(1e-9));
    }

    #[test]
    fn measure_nondecreasing_and_saturating(r in 0.0f64..=R, b in shape(), d in 0.0f64..11.0, step in 0.0f64..1.0) {
        let p = params(b);
        let lo = clipped_ball_measure(r, d, &p).unwrap();
        let hi = clipped_ball_measure(r, d + step, &p).unwrap();
        prop_assert!(hi >= lo - 1e-12 * hi.max(1.0));
        prop_assert!(hi <= p.mean_count() * (1.0 + 1e-12));
        if d >= R + r {
            prop_assert!((lo - p.mean_count()).abs() < 1e-9);
        }
    }

    #[test]
    fn lens_area_never_exceeds_either_disk(r in 0.0f64..=R, d in 0.01f64..11.0) {
        let m = lens_moments(r, d, R).unwrap();
        prop_assert!(m.area <= PI * d * d * (1.0 + 1e-12) + 1e-12);
        prop_assert!(m.area <= PI * R * R * (1.0 + 1e-12));
    }

    #[test]
    fn intersection_angle_is_clamped_arccos(r in 0.01f64..=R, d in 0.01f64..11.0) {
        let c = ((r * r + d * d - R * R) / (2.0 * r * d)).clamp(-1.0, 1.0);
        let got = intersection_angle(r, d, R).unwrap();
        // acos loses accuracy near ±1, so compare through the cosine.
        prop_assert!((got.cos() - c).abs() < 1e-9);
        prop_assert!((0.0..=PI).contains(&got));
    }

    #[test]
    fn border_distance_reaches_the_circle(r in 0.0f64..=R, theta in 0.0f64..(2.0 * PI)) {
        let d = border_distance(r, theta, R).unwrap();
        // θ = 0 points at the centre, so the MU sits at (r, 0) and looks along −x.
        let x = r - d * theta.cos();
        let y = d * theta.sin();
        prop_assert!((x.hypot(y) - R).abs() < 1e-9 * R);
        prop_assert!(d >= R - r - 1e-12 && d <= R + r + 1e-12);
    }

    #[test]
    fn nnd_pdf_nonnegative(r in 0.0f64..=R, d in 0.0f64..12.0, b in shape(), l0 in 0.05f64..5.0) {
        let p = NetworkParams { lambda0: l0, ..params(b) };
        let f = nnd_pdf(r, d, &p).unwrap();
        prop_assert!(f >= 0.0 && f.is_finite());
    }

    #[test]
    fn quantile_inverts_radial_cdf(b in shape(), u in 0.0f64..=1.0) {
        let p = params(b);
        let t = radial_quantile(u, &p);
        prop_assert!((0.0..=R).contains(&t));
        prop_assert!((radial_cdf(t, &p) - u).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn laplace_bounded_and_nonincreasing_in_threshold(
        r in 0.0f64..=R,
        d in 0.05f64..3.0,
        b in shape(),
        eta in 2.0f64..6.0,
        q in 0.05f64..5.0,
    ) {
        let p = NetworkParams { eta, q, ..params(b) };
        let lo = laplace_interference(&LaplaceQuery::new(p, r, d).unwrap()).unwrap();
        let hi = laplace_interference(&LaplaceQuery::new(p, r, d).unwrap().with_threshold(2.0 * q).unwrap()).unwrap();
        prop_assert!(lo > 0.0 && lo <= 1.0);
        prop_assert!(hi <= lo * (1.0 + 1e-9));
    }
}
