//! Property-based invariants of the spatial operators and geometry.

use std::f64::consts::PI;

use proptest::prelude::*;

use curveflow::ops::{diff_periodic, quadrature_periodic, resample, Scheme};
use curveflow::PolarCurve;

/// Random band-limited profile `1 + Σ a_k cos kθ + b_k sin kθ`,
/// normalized to keep the curve safely star-shaped.
fn star_profile(n: usize, coeffs: &[(f64, f64)]) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / n as f64;
            let mut r = 1.0;
            for (k, (a, b)) in coeffs.iter().enumerate() {
                let f = (k + 1) as f64;
                r += 0.3 / coeffs.len() as f64 * (a * (f * t).cos() + b * (f * t).sin());
            }
            r
        })
        .collect()
}

fn coeff_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Discrete Wirtinger inequality: for mean-zero band-limited samples,
    /// the derivative's L2 norm dominates the function's.
    #[test]
    fn wirtinger_inequality(coeffs in coeff_strategy()) {
        let n = 64;
        let mut u = star_profile(n, &coeffs);
        let mean = u.iter().sum::<f64>() / n as f64;
        for v in u.iter_mut() {
            *v -= mean;
        }
        let du = diff_periodic(&u, 1, Scheme::Spectral).unwrap();
        let e_u = quadrature_periodic(&u.iter().map(|v| v * v).collect::<Vec<_>>());
        let e_du = quadrature_periodic(&du.iter().map(|v| v * v).collect::<Vec<_>>());
        prop_assert!(e_du >= e_u - 1e-10, "{e_du} < {e_u}");
    }

    /// The quadrature of an exact periodic derivative vanishes.
    #[test]
    fn derivative_integrates_to_zero(coeffs in coeff_strategy()) {
        let u = star_profile(128, &coeffs);
        let du = diff_periodic(&u, 1, Scheme::Spectral).unwrap();
        prop_assert!(quadrature_periodic(&du).abs() < 1e-10);
    }

    /// Upsampling then downsampling a band-limited profile is lossless.
    #[test]
    fn resample_round_trip(coeffs in coeff_strategy()) {
        let u = star_profile(64, &coeffs);
        let up = resample(&u, 256).unwrap();
        let back = resample(&up, 64).unwrap();
        let worst = u.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-12, "round-trip error {worst:.3e}");
    }

    /// Support never exceeds the radius, and the isoperimetric
    /// inequality holds on every star-shaped curve.
    #[test]
    fn support_and_isoperimetric(coeffs in coeff_strategy()) {
        let c = PolarCurve::new(star_profile(128, &coeffs)).unwrap();
        let f = c.metric_and_curvature(Scheme::Spectral).unwrap();
        for (p, r) in f.p.iter().zip(c.r()) {
            prop_assert!(*p <= r + 1e-12);
            prop_assert!(*p > 0.0);
        }
        let (l, a) = c.length_area(Scheme::Spectral).unwrap();
        prop_assert!(l * l >= 4.0 * PI * a - 1e-8, "deficit {}", l * l - 4.0 * PI * a);
    }

    /// Polar and marker backends agree on length and area up to the
    /// polygonal O(n⁻²) error.
    #[test]
    fn polar_marker_geometry_agree(coeffs in coeff_strategy()) {
        let c = PolarCurve::new(star_profile(256, &coeffs)).unwrap();
        let (l, a) = c.length_area(Scheme::Spectral).unwrap();
        let g = c.to_marker().geometry().unwrap();
        let h = 2.0 * PI / 256.0;
        prop_assert!((g.length - l).abs() < l * h * h, "length gap {}", (g.length - l).abs());
        prop_assert!((g.signed_area - a).abs() < a * h * h, "area gap {}", (g.signed_area - a).abs());
    }

    /// Differentiating twice equals the second-derivative operator
    /// (spectral scheme).
    #[test]
    fn second_derivative_composes(coeffs in coeff_strategy()) {
        let u = star_profile(64, &coeffs);
        let d1 = diff_periodic(&u, 1, Scheme::Spectral).unwrap();
        let dd = diff_periodic(&d1, 1, Scheme::Spectral).unwrap();
        let d2 = diff_periodic(&u, 2, Scheme::Spectral).unwrap();
        let worst = dd.iter().zip(&d2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-9, "composition gap {worst:.3e}");
    }
}
