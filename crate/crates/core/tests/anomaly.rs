use axion_hall_core::qhall::*;

fn report(setup: &AnomalySetup) -> AnomalyReport {
    let g = GridSample2D::from_setup(setup).unwrap();
    anomaly_inflow_check(&g).unwrap().0
}

#[test]
fn residual_converges_at_second_order() {
    let r: Vec<AnomalyReport> = [32, 64, 128, 256].iter().map(|&n| report(&AnomalySetup::new(n))).collect();
    for w in r.windows(2) {
        let ratio = w[0].integrated_residual / w[1].integrated_residual;
        assert!((3.6..=4.4).contains(&ratio), "ratio {ratio}");
        assert!(w[1].faraday_max < 1e-10);
    }
    // without the edge term the divergence stays O(1)
    let last = &r[3];
    assert!(last.bulk_only_integrated > 0.1);
    assert!(last.integrated_residual < 1e-2 * last.bulk_only_integrated);
    assert!((last.bulk_only_signed + last.edge_integral).abs() < 1e-2 * last.bulk_only_integrated);
}

#[test]
fn residual_is_linear_in_amplitude() {
    let base = report(&AnomalySetup::new(64));
    for amp in [0.25, 3.0] {
        let s = AnomalySetup { amplitude: amp, ..AnomalySetup::new(64) };
        let r = report(&s);
        assert!((r.integrated_residual - amp * base.integrated_residual).abs() <= 1e-9 * amp * base.integrated_residual);
    }
}

#[test]
fn no_parallel_field_has_no_anomaly() {
    let s = AnomalySetup { potential: TestPotential::NoParallelField, ..AnomalySetup::new(96) };
    let r = report(&s);
    assert!(r.bulk_only_max < 1e-12 && r.max_pointwise < 1e-12);
}

#[test]
fn uniform_sigma_conserves_charge() {
    let s = AnomalySetup { strip: None, sigma0: 2.5, ..AnomalySetup::new(80) };
    let r = report(&s);
    assert!(r.bulk_only_max < 1e-11);
    assert!(r.edge_integral.abs() < 1e-12);
}

#[test]
fn setup_guards() {
    assert!(GridSample2D::from_setup(&AnomalySetup::new(4)).is_err());
    let wide = AnomalySetup { envelope_radius: 1.5, ..AnomalySetup::new(64) };
    assert!(GridSample2D::from_setup(&wide).is_err());
    let near = AnomalySetup { envelope_radius: 0.99, ..AnomalySetup::new(64) };
    assert!(anomaly_inflow_check(&GridSample2D::from_setup(&near).unwrap()).is_err());
    let strip = AnomalySetup { strip: Some((0.5, 0.9)), ..AnomalySetup::new(64) };
    assert!(anomaly_inflow_check(&GridSample2D::from_setup(&strip).unwrap()).is_err());
}
