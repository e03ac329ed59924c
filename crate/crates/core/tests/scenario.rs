use proptest::prelude::*;
use riskindex::scenario::{sample, sample_stream, DistributionSpec, EmpiricalDistribution, ScenarioSpace};
use riskindex::Error;

fn law() -> impl Strategy<Value = EmpiricalDistribution> {
    prop::collection::vec((-50.0f64..50.0, 0.01f64..1.0), 1..12)
        .prop_map(|pts| {
        let total: f64 = pts.iter().map(|p| p.1).sum();
        let pts: Vec<(f64, f64)> = pts.iter().map(|&(v, w)| (v, w / total)).collect();
        EmpiricalDistribution::new(&pts).unwrap()
    })
}

proptest! {
    #[test]
    fn quantile_inverts_cdf(d in law(), t in 0.001f64..0.999) {
        // q(t) is the least x with F(x) >= t.
        let q = d.quantile(t).unwrap();
        prop_assert!(d.cdf(q) >= t - 1e-12);
        prop_assert!(d.cdf_left(q) <= t + 1e-12);
        let uq = d.upper_quantile(t).unwrap();
        prop_assert!(uq >= q);
        prop_assert!(d.cdf_left(uq) <= t + 1e-12);
    }

    #[test]
    fn cdf_of_atoms(d in law()) {
        for ((v, _), c) in d.atoms().zip(d.cumulative()) {
            prop_assert!((d.cdf(v) - c).abs() < 1e-12);
        }
        prop_assert!((d.cdf(d.max()) - 1.0).abs() < 1e-12);
        prop_assert_eq!(d.cdf_left(d.min()), 0.0);
    }

    #[test]
    fn psi_moment_is_homogeneous(d in law(), lambda in 0.1f64..4.0, p in 1.0f64..4.0) {
        let scaled = d.affine(lambda, 0.0).unwrap();
        let (a, b) = (scaled.psi_p_moment(p).unwrap(), lambda.powf(p) * d.psi_p_moment(p).unwrap());
        prop_assert!((a - b).abs() <= 1e-9 * b.max(1.0));
        let (n, m) = (d.negated().psi_p_moment(p).unwrap(), d.psi_p_moment(p).unwrap());
        prop_assert!((n - m).abs() <= 1e-12 * m.max(1.0));
    }

    #[test]
    fn continuous_quantiles_invert(t in 0.001f64..0.999) {
        for spec in [
            DistributionSpec::Normal { mean: 1.0, sd: 2.0 },
            DistributionSpec::LogNormal { mean_log: 0.0, sd_log: 0.5 },
            DistributionSpec::Truncated { inner: Box::new(DistributionSpec::Normal { mean: 0.0, sd: 1.0 }), low: -1.0, high: 2.0 },
        ] {
            let x = spec.quantile(t).unwrap();
            prop_assert!((spec.cdf(x) - t).abs() < 1e-9, "{:?}", spec);
        }
    }
}

#[test]
fn sampling_is_reproducible_per_stream() {
    let spec = DistributionSpec::Normal { mean: 0.0, sd: 1.0 };
    assert_eq!(sample(&spec, 100, 5).unwrap(), sample(&spec, 100, 5).unwrap());
    assert_eq!(sample_stream(&spec, 100, 5, 3).unwrap(), sample_stream(&spec, 100, 5, 3).unwrap());
    assert_ne!(sample_stream(&spec, 100, 5, 3).unwrap(), sample_stream(&spec, 100, 5, 4).unwrap());
    let big = sample(&spec, 200_000, 9).unwrap();
    assert!(big.mean().abs() < 0.01);
}

#[test]
fn mixture_weights_show_in_samples() {
    let spec = DistributionSpec::Mixture {
        components: vec![(0.9, DistributionSpec::PointMass { c: 1.0 }), (0.1, DistributionSpec::PointMass { c: -1.0 })],
    };
    let d = sample(&spec, 100_000, 1).unwrap();
    assert!((d.cdf(0.0) - 0.1).abs() < 0.005);
}

#[test]
fn truncation_stays_inside() {
    let spec = DistributionSpec::Truncated { inner: Box::new(DistributionSpec::Normal { mean: 0.0, sd: 1.0 }), low: -5.0, high: 5.0 };
    let d = sample(&spec, 50_000, 2).unwrap();
    assert!(d.min() >= -5.0 && d.max() <= 5.0);
    assert!(spec.is_bounded());
}

#[test]
fn csv_round_trip() {
    let csv = "prob,X,S\n0.25,-10,1\n0.25,-5,1\n0.5,3,2\n";
    let space = ScenarioSpace::from_csv_reader(csv.as_bytes()).unwrap();
    assert_eq!(space.n_states(), 3);
    assert_eq!(space.var("X").unwrap(), &[-10.0, -5.0, 3.0]);
    assert_eq!(space.var_names().collect::<Vec<_>>(), ["S", "X"]);
    assert!(matches!(space.var("Y"), Err(Error::UnknownVariable(_))));
}

#[test]
fn csv_rejects_bad_probabilities() {
    assert!(ScenarioSpace::from_csv_reader("prob,X\n0.5,1\n0.4,2\n".as_bytes()).is_err());
    assert!(ScenarioSpace::from_csv_reader("p,X\n1,1\n".as_bytes()).is_err());
    assert!(ScenarioSpace::from_csv_reader("prob,X\n1,abc\n".as_bytes()).is_err());
}

#[test]
fn same_law_ignores_state_order() {
    let s = ScenarioSpace::uniform(4)
        .unwrap()
        .with_var("X", vec![1.0, 2.0, 2.0, 3.0])
        .unwrap()
        .with_var("Y", vec![2.0, 3.0, 1.0, 2.0])
        .unwrap();
    assert!(s.law_of("X").unwrap().same_law(&s.law_of("Y").unwrap(), 1e-15));
}
