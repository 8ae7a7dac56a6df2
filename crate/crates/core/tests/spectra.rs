use axion_hall_core::evolve::HelicalMode;
use axion_hall_core::spectra::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn modes_strategy() -> impl Strategy<Value = Vec<HelicalMode>> {
    proptest::collection::vec((0.1f64..10.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, 0.01f64..1.0), 1..40).prop_map(|v| {
        v.into_iter()
            .map(|(k, a, b, c, d, w)| HelicalMode::new(k, Complex64::new(a, b), Complex64::new(c, d), w).unwrap())
            .collect()
    })
}

fn edges() -> Vec<f64> {
    vec![0.1, 0.3, 1.0, 2.0, 5.0, 10.0]
}

proptest! {
    #[test]
    fn bins_sum_to_totals(modes in modes_strategy()) {
        let s = snapshot(&modes, &edges(), 0.0).unwrap();
        let e = magnetic_energy(&modes);
        let h = helicity(&modes);
        prop_assert!((s.total_energy - e).abs() <= 1e-12 * e.max(1e-300));
        let hscale = modes.iter().map(|m| m.weight * (m.b_plus.norm_sqr() + m.b_minus.norm_sqr()) / m.k).sum::<f64>();
        prop_assert!((s.total_helicity - h).abs() <= 1e-12 * hscale.max(1e-300));
        prop_assert!(s.energy.iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn every_ensemble_is_realizable(modes in modes_strategy()) {
        let s = snapshot(&modes, &edges(), 0.0).unwrap();
        prop_assert!(s.realizability_excess() <= 1e-12 * s.total_energy.max(1e-300));
    }

    #[test]
    fn merging_bins_preserves_totals(modes in modes_strategy(), i in 0usize..4) {
        let s = snapshot(&modes, &edges(), 0.0).unwrap();
        let m = s.merge_adjacent(i);
        prop_assert_eq!(m.bins(), s.bins() - 1);
        let de: f64 = m.energy.iter().sum::<f64>() - s.energy.iter().sum::<f64>();
        prop_assert!(de.abs() <= 1e-12 * s.total_energy.max(1e-300));
    }

    #[test]
    fn parity_flips_helicity(modes in modes_strategy()) {
        let mirrored: Vec<HelicalMode> = modes.iter().map(|m| m.helicity_swapped()).collect();
        prop_assert_eq!(magnetic_energy(&mirrored), magnetic_energy(&modes));
        prop_assert_eq!(helicity(&mirrored), -helicity(&modes));
    }
}

#[test]
fn out_of_range_modes_are_rejected() {
    let m = HelicalMode::new(20.0, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 1.0).unwrap();
    assert!(snapshot(&[m], &edges(), 0.0).is_err());
    assert!(snapshot(&[], &[1.0], 0.0).is_err());
}
