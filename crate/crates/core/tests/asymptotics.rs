use pointisland::asymptotics::{
    cm_distance, fit_power_law, fixed_exponent_amplitude, leading_law, psi, similarity_snapshot,
    subcritical_ratios, Quantity,
};
use pointisland::centre_manifold::expand;
use pointisland::rational::{int, ratio, to_f64};
use pointisland::ModelParams;
use proptest::prelude::*;

fn positive_rational() -> impl Strategy<Value = pointisland::Rational> {
    (1i64..40, 1i64..10).prop_map(|(p, q)| ratio(p, q))
}

#[test]
fn exponent_identities() {
    for i in 2..=8 {
        let p = ModelParams::scaled(i, int(1)).unwrap();
        let k = i as i64 + 2;
        assert_eq!(leading_law(&p, Quantity::Monomer).unwrap().exponent, ratio(-1, k));
        for j in 1..=i {
            assert_eq!(leading_law(&p, Quantity::Subcritical(j)).unwrap().exponent, ratio(-(j as i64), k));
        }
        assert_eq!(leading_law(&p, Quantity::Tail(i + 3)).unwrap().exponent, ratio(-(i as i64), k));
        assert_eq!(leading_law(&p, Quantity::MeanSize).unwrap().exponent, ratio(i as i64 + 1, k));

        let monomer = leading_law(&p, Quantity::Monomer).unwrap();
        let first = leading_law(&p, Quantity::Subcritical(1)).unwrap();
        assert!((monomer.amplitude - first.amplitude).abs() <= 1e-15 * monomer.amplitude);
        assert_eq!(
            leading_law(&p, Quantity::Subcritical(i)).unwrap().exponent,
            leading_law(&p, Quantity::Tail(i + 1)).unwrap().exponent
        );
        assert!(leading_law(&p, Quantity::Subcritical(i + 1)).is_err());
        assert!(leading_law(&p, Quantity::Tail(i)).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn physical_laws_are_rescaled_scaled_laws(
        i in 2usize..7,
        at in positive_rational(),
        beta in positive_rational(),
        t in 1.0f64..1e6,
        j in 1usize..20,
    ) {
        let physical = ModelParams::new(i, at, beta.clone()).unwrap();
        let scaled = ModelParams::scaled(i, physical.alpha.clone()).unwrap();
        let b = to_f64(&beta);
        let mut quantities = vec![Quantity::Monomer, Quantity::Tail(i + j)];
        quantities.push(Quantity::Subcritical(1 + j % i));
        for q in quantities {
            let lhs = leading_law(&physical, q).unwrap().evaluate(t);
            let rhs = b * leading_law(&scaled, q).unwrap().evaluate(b * t);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs, "{:?}: {} vs {}", q, lhs, rhs);
        }
        let lhs = leading_law(&physical, Quantity::MeanSize).unwrap().evaluate(t);
        let rhs = leading_law(&scaled, Quantity::MeanSize).unwrap().evaluate(b * t);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs);
    }

    #[test]
    fn power_law_fit_recovers_exact_laws(a in 0.01f64..10.0, k in -2.0f64..2.0) {
        let times: Vec<f64> = (0..20).map(|n| 10f64.powf(1.0 + n as f64 / 5.0)).collect();
        let values: Vec<f64> = times.iter().map(|t| a * t.powf(k)).collect();
        let fit = fit_power_law(&times, &values, (1.0, 1e6)).unwrap();
        prop_assert!((fit.slope - k).abs() < 1e-9);
        prop_assert!((fit.intercept.exp() / a - 1.0).abs() < 1e-9);
        let amp = fixed_exponent_amplitude(&times, &values, k, (1.0, 1e6)).unwrap();
        prop_assert!((amp / a - 1.0).abs() < 1e-9);
    }
}

#[test]
fn psi_shape() {
    for i in 2..=6 {
        let grid: Vec<f64> = (0..1000).map(|k| k as f64 / 1000.0).collect();
        assert_eq!(psi(i, 0.0), 1.0);
        assert!(grid.windows(2).all(|w| psi(i, w[1]) > psi(i, w[0])));
        assert!(psi(i, 0.999_999) > 1e3);
        assert_eq!(psi(i, 1.0), 0.0);
        assert_eq!(psi(i, 2.5), 0.0);
    }
}

#[test]
fn snapshot_eta_increases() {
    let params = ModelParams::scaled(2, int(1)).unwrap();
    let c: Vec<f64> = (1..=50).map(|j| 1.0 / j as f64).collect();
    let snap = similarity_snapshot(&params, &c, 10.0).unwrap();
    assert!(snap.points.windows(2).all(|w| w[1].eta > w[0].eta));
    assert!(snap.points.iter().all(|p| p.scaled >= 0.0));
    assert!(similarity_snapshot(&params, &[0.0; 4], 1.0).is_err());
}

#[test]
fn distance_to_the_manifold() {
    let e = expand(3, &int(1), &int(1), 12).unwrap();
    let c1 = 0.05;
    let on: Vec<f64> = std::iter::once(c1).chain((2..=3).map(|j| e.g(j).evaluate_f64(c1))).collect();
    assert!(cm_distance(&on, &e).unwrap().iter().all(|d| *d == 0.0));
    let mut off = on.clone();
    off[1] *= 2.0;
    let d = cm_distance(&off, &e).unwrap();
    assert!((d[0] - 1.0).abs() < 0.01, "{d:?}");
    assert!(cm_distance(&[0.0, 0.0, 0.0], &e).is_err());
    let ratios = subcritical_ratios(&on, 3);
    assert!((ratios[0] - 1.0).abs() < 0.01 && (ratios[1] - 1.0).abs() < 0.06);
}
