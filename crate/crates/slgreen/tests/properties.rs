//! Property tests for the structural invariants that hold on every
//! coefficient preset.

use proptest::prelude::*;

use slgreen::coeff::{build_weight_field, parse_spec_str, CoefficientSpec, Window};
use slgreen::geometry;
use slgreen::trend::{classify, TrendClass};

fn preset_strategy() -> impl Strategy<Value = CoefficientSpec> {
    prop_oneof![
        (0.5f64..4.0, 0.25f64..4.0)
            .prop_map(|(r0, q0)| CoefficientSpec::Constant { r0, q0 }),
        (-1.0f64..1.0, -1.0f64..1.0)
            .prop_map(|(alpha, beta)| CoefficientSpec::Exponential { alpha, beta }),
        (1u32..4).prop_map(|k| CoefficientSpec::PolynomialQ { k }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cumulative_integrals_are_additive_and_monotone(
        spec in preset_strategy(),
        a in -12.0f64..12.0,
        b in -12.0f64..12.0,
        c in -12.0f64..12.0,
    ) {
        let field = build_weight_field(spec).unwrap();
        let mut pts = [a, b, c];
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let [a, b, c] = pts;
        let r_whole = field.r_integral(a, c);
        let r_split = field.r_integral(a, b) + field.r_integral(b, c);
        prop_assert!((r_whole - r_split).abs() <= 1e-10 * (1.0 + r_whole.abs()));
        let q_whole = field.q_integral(a, c);
        let q_split = field.q_integral(a, b) + field.q_integral(b, c);
        prop_assert!((q_whole - q_split).abs() <= 1e-10 * (1.0 + q_whole.abs()));
        if c > a {
            prop_assert!(r_whole > 0.0);
            prop_assert!(q_whole >= 0.0);
        }
    }

    #[test]
    fn length_anchored_integrals_match_endpoint_forms(
        spec in preset_strategy(),
        x in -8.0f64..8.0,
        d in 1e-3f64..6.0,
    ) {
        let field = build_weight_field(spec).unwrap();
        let tol = |v: f64| 1e-11 * (1.0 + v.abs());
        let left = field.r_integral_left(x, d);
        prop_assert!((left - field.r_integral(x - d, x)).abs() <= tol(left));
        let right = field.q_integral_right(x, d);
        prop_assert!((right - field.q_integral(x, x + d)).abs() <= tol(right));
    }

    #[test]
    fn harmonic_mean_is_dominated_by_both_sides(
        spec in preset_strategy(),
        x in -6.0f64..6.0,
    ) {
        let field = build_weight_field(spec).unwrap();
        if let Ok(v) = geometry::compute_phi_psi_h(&field, x, 96.0) {
            prop_assert!(v.h > 0.0);
            prop_assert!(v.h <= v.phi.min(v.psi) * (1.0 + 1e-12));
            let hm = v.phi / (1.0 + v.phi / v.psi);
            prop_assert!((v.h - hm).abs() <= 1e-10 * hm);
            prop_assert!(v.identity_residual <= 1e-6);
        }
    }

    #[test]
    fn spec_text_roundtrip(spec in preset_strategy()) {
        let text = match &spec {
            CoefficientSpec::Constant { r0, q0 } => {
                format!("kind=constant\nr0={r0}\nq0={q0}\n")
            }
            CoefficientSpec::Exponential { alpha, beta } => {
                format!("kind=exponential\nalpha={alpha}\nbeta={beta}\n")
            }
            CoefficientSpec::PolynomialQ { k } => format!("kind=polynomial-q\nk={k}\n"),
            CoefficientSpec::Tabulated(_) => unreachable!(),
        };
        let parsed = parse_spec_str(&text, None).unwrap();
        prop_assert_eq!(parsed, spec);
    }

    #[test]
    fn trend_classification_is_scale_invariant(
        v0 in 1e-6f64..1e6,
        r1 in 0.05f64..20.0,
        r2 in 0.05f64..20.0,
        scale in 1e-8f64..1e8,
    ) {
        let base = [v0, v0 * r1, v0 * r1 * r2];
        let scaled = [base[0] * scale, base[1] * scale, base[2] * scale];
        prop_assert_eq!(classify(base), classify(scaled));
    }

    #[test]
    fn window_grid_is_strictly_increasing_and_symmetric(
        x in 0.1f64..100.0,
        n in 3usize..300,
    ) {
        let grid = Window::new(x, n).unwrap().grid();
        prop_assert_eq!(grid.len(), n);
        prop_assert_eq!(grid[0], -x);
        prop_assert_eq!(grid[n - 1], x);
        prop_assert!(grid.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn trend_classes_cover_clean_regimes() {
    assert_eq!(classify([8.0, 2.0, 0.5]), TrendClass::Vanishing);
    assert_eq!(classify([1.0, 1.0, 1.0]), TrendClass::Bounded);
    assert_eq!(classify([0.5, 2.0, 8.0]), TrendClass::Diverging);
}
