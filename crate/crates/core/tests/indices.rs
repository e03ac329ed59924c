use riskindex::indices::{
    conjugate, index_of_finiteness, index_of_qualitative_robustness, numeric_index_of_finiteness, Attainment,
    IndexMethod,
};
use riskindex::riskcore::{
    AcceptanceSpec, CustomFn, DensitySpec, DistortionFamily, DistortionSpec, ExtendedReal, UtilityFamily, UtilitySpec,
};

const PARAMS: [f64; 4] = [1.5, 2.0, 3.0, 5.0];

fn distortion(f: DistortionFamily) -> AcceptanceSpec {
    AcceptanceSpec::Distortion { distortion: DistortionSpec::new(f).unwrap() }
}

fn utility(f: UtilityFamily, level: f64) -> AcceptanceSpec {
    AcceptanceSpec::UtilityFloor { utility: UtilitySpec::new(f, level).unwrap() }
}

/// Every spec of the table with its expected index and attainment.
fn table() -> Vec<(AcceptanceSpec, f64, Attainment)> {
    use Attainment::*;
    let inf = f64::INFINITY;
    let mut rows = Vec::new();
    for g in PARAMS {
        rows.push((distortion(DistortionFamily::MaxVar { gamma: g }), g, No));
        rows.push((distortion(DistortionFamily::MinVar { gamma: g }), 1.0, Yes));
        rows.push((distortion(DistortionFamily::MaxMinVar { gamma: g }), g, No));
        rows.push((distortion(DistortionFamily::MinMaxVar { gamma: g }), g, No));
        rows.push((distortion(DistortionFamily::BetaGamma { beta: g, gamma: 2.0 }), g, No));
        rows.push((utility(UtilityFamily::FlatPower { q: g }, -1.0), g, Yes));
        rows.push((utility(UtilityFamily::Exponential { gamma: g }, 0.0), inf, No));
        rows.push((
            AcceptanceSpec::MaxCorrelation { density: DensitySpec::quantile_power(g).unwrap() },
            g / (g - 1.0),
            No,
        ));
    }
    rows.push((distortion(DistortionFamily::LogDistortion), 1.0, Yes));
    rows.push((utility(UtilityFamily::CappedLog { c: 2.0 }, 0.0), inf, No));
    rows.push((utility(UtilityFamily::NonHara { a: 1.0, c: 2.0 }, 0.0), 1.0, Yes));
    rows.push((AcceptanceSpec::TVaRLevel { alpha: 0.05 }, 1.0, Yes));
    rows.push((AcceptanceSpec::ExpectationFloor { alpha: 0.0 }, 1.0, Yes));
    rows
}

#[test]
fn analytic_table_is_exact() {
    for (acc, index, attained) in table() {
        let r = index_of_finiteness(&acc).unwrap();
        assert_eq!(r.index, ExtendedReal::from_f64(index), "{acc:?}");
        assert_eq!(r.attained, attained, "{acc:?}");
        assert_eq!(r.method, IndexMethod::Analytic);
    }
}

#[test]
fn numeric_estimates_agree() {
    for (acc, index, _) in table() {
        let r = numeric_index_of_finiteness(&acc).unwrap();
        if index.is_infinite() {
            assert_eq!(r.index, ExtendedReal::PlusInfinity, "{acc:?}");
        } else {
            let got = r.index.finite().unwrap_or_else(|| panic!("{acc:?} estimated as infinite"));
            assert!((got - index).abs() <= 0.05, "{acc:?}: {got} vs {index}");
        }
    }
}

#[test]
fn robustness_index_is_reciprocal() {
    for (acc, ..) in table() {
        let fin = index_of_finiteness(&acc).unwrap().index;
        let iqr = index_of_qualitative_robustness(&acc).unwrap().index.to_f64();
        match fin {
            ExtendedReal::PlusInfinity => assert_eq!(iqr, 0.0),
            other => assert!((iqr * other.to_f64() - 1.0).abs() < 1e-12, "{acc:?}"),
        }
    }
}

#[test]
fn conjugate_exponents() {
    assert_eq!(conjugate(2.0), 2.0);
    assert_eq!(conjugate(1.0), f64::INFINITY);
    assert_eq!(conjugate(f64::INFINITY), 1.0);
    assert!((conjugate(3.0) - 1.5).abs() < 1e-15);
}

#[test]
fn empirical_density_has_index_one() {
    let density = DensitySpec::empirical(vec![0.5, 1.5], vec![0.5, 0.5]).unwrap();
    let r = index_of_finiteness(&AcceptanceSpec::MaxCorrelation { density }).unwrap();
    assert_eq!(r.index, ExtendedReal::Finite(1.0));
    assert_eq!(r.attained, Attainment::Yes);
}

#[test]
fn custom_specs_use_numeric_fit() {
    // t^(1/2) behaves like MaxVar(2) near zero.
    let sqrt = DistortionSpec::new(DistortionFamily::Custom {
        distortion: CustomFn::new(|t: f64| t.sqrt()),
        right_derivative: None,
    })
    .unwrap();
    let r = index_of_finiteness(&AcceptanceSpec::Distortion { distortion: sqrt }).unwrap();
    assert_eq!(r.method, IndexMethod::NumericFit);
    assert!((r.index.to_f64() - 2.0).abs() < 0.05);

    // Cubic loss penalty.
    let cubic = UtilitySpec::new(UtilityFamily::Custom(CustomFn::new(|x: f64| -(x.min(0.0)).abs().powi(3))), -1.0)
        .unwrap();
    let r = index_of_finiteness(&AcceptanceSpec::UtilityFloor { utility: cubic }).unwrap();
    assert_eq!(r.method, IndexMethod::NumericFit);
    assert!((r.index.to_f64() - 3.0).abs() < 0.05);
}
