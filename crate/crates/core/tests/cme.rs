use axion_hall_core::cme::*;
use axion_hall_core::math::FOUR_PI_SQ;
use axion_hall_core::qhall::hall3d;
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    lo + (hi - lo) * u
}

fn vec3(rng: &mut ChaCha8Rng) -> [f64; 3] {
    [uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)]
}

fn close(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
    let scale = 1.0f64.max(a.iter().chain(&b).fold(0.0f64, |m, x| m.max(x.abs())));
    (0..3).all(|i| (a[i] - b[i]).abs() <= tol * scale)
}

#[test]
fn conductivity_is_psd_rank_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let p = TransportParams::new(uniform(&mut rng, 0.1, 50.0), uniform(&mut rng, 0.1, 3.0), uniform(&mut rng, 0.1, 5.0), 0.0).unwrap();
        let b = vec3(&mut rng);
        let s = conductivity_tensor(&p, b);
        let m = Matrix3::from_fn(|i, j| s[i][j]);
        assert_eq!(m, m.transpose());
        let eig = m.symmetric_eigen();
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let top = ev[2];
        let c = p.l * p.alpha / FOUR_PI_SQ;
        let expected = p.tau * c * c * Vector3::from(b).norm_squared();
        assert!((top - expected).abs() <= 1e-12 * expected.max(1e-300));
        assert!(ev[0] >= -1e-12 * top && ev[1].abs() <= 1e-12 * top);
        let sv = m.svd(false, false).singular_values;
        assert_eq!(sv.iter().filter(|x| **x > 1e-10 * top).count(), 1);
    }
}

#[test]
fn steady_cme_equals_ohmic_current() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..500 {
        let p = TransportParams::new(uniform(&mut rng, 0.1, 50.0), uniform(&mut rng, 0.1, 3.0), uniform(&mut rng, 0.1, 5.0), 0.0).unwrap();
        let (e, b) = (vec3(&mut rng), vec3(&mut rng));
        let mu5 = steady_mu5(&p, e[0] * b[0] + e[1] * b[1] + e[2] * b[2]);
        let a = cme_current(mu5, b, p.alpha);
        let o = ohmic_current(&conductivity_tensor(&p, b), e);
        assert!(close(a, o, 1e-12), "{a:?} {o:?}");
        assert!(close(steady_cme_current(&p, e, b), o, 1e-12));
    }
}

#[test]
fn hall3d_is_axion_current_of_crystal_axion() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let k = [(rng.next_u32() % 7) as i64 - 3, (rng.next_u32() % 7) as i64 - 3, (rng.next_u32() % 7) as i64 - 3];
        let e2h = uniform(&mut rng, 0.1, 3.0);
        let (e, b) = (vec3(&mut rng), vec3(&mut rng));
        let alpha = TransportParams::alpha_from_conductance_quantum(e2h);
        let grad = [2.0 * std::f64::consts::PI * k[0] as f64, 2.0 * std::f64::consts::PI * k[1] as f64, 2.0 * std::f64::consts::PI * k[2] as f64];
        let (rho, j) = hall3d(k, b, e, e2h);
        // (α/4π²)·2π = e²/h
        assert!(close(j, axion_current(0.0, grad, e, b, alpha), 1e-12));
        let rho_ax = axion_charge_density(grad, b, alpha);
        assert!((rho - rho_ax).abs() <= 1e-12 * rho.abs().max(1.0));
    }
}

#[test]
fn relaxation_matches_closed_form() {
    let p = TransportParams::new(FOUR_PI_SQ, 1.0, 0.7, 0.0).unwrap();
    for (d, mu0) in [(1.0, 0.0), (1.0, 1.4), (-2.5, 3.0), (0.0, 1.0)] {
        for t in [0.0, 0.1, 1.0, 5.0, 14.0] {
            let num = relax_mu5(&p, |_| d, mu0, t).unwrap();
            let exact = relax_mu5_constant(&p, d, mu0, t, 0.0);
            assert!((num - exact).abs() <= 1e-10 * exact.abs().max(1.0), "{d} {mu0} {t}: {num} {exact}");
        }
    }
}

#[test]
fn relaxation_with_oscillating_drive() {
    // μ̇ + μ/τ = cos ωt has the periodic solution (cos ωt/τ + ω sin ωt)/(1/τ² + ω²)
    let p = TransportParams::new(1.0, 1.0, 0.5, 0.0).unwrap();
    let w: f64 = 3.0;
    let r = 1.0 / p.tau;
    let periodic = |t: f64| (r * (w * t).cos() + w * (w * t).sin()) / (r * r + w * w);
    let t = 4.0;
    let mu = relax_mu5(&p, |s| (w * s).cos(), periodic(0.0), t).unwrap();
    assert!((mu - periodic(t)).abs() < 1e-10);
}

#[test]
fn diffusion_adds_to_rate() {
    let p = TransportParams::new(1.0, 1.0, 2.0, 0.3).unwrap();
    assert!((p.relaxation_rate(2.0) - (0.5 + 1.2)).abs() < 1e-15);
    let t = 1.3;
    let v = relax_mu5_constant(&p, 0.0, 1.0, t, 2.0);
    assert!((v - (-1.7f64 * t).exp()).abs() < 1e-15);
}

proptest! {
    #[test]
    fn currents_are_linear(mu in -5.0f64..5.0, s in -3.0f64..3.0, bx in -2.0f64..2.0, by in -2.0f64..2.0, bz in -2.0f64..2.0) {
        let b = [bx, by, bz];
        let a = cme_current(mu * s, b, 7.0);
        let c = cme_current(mu, b, 7.0);
        prop_assert!(close(a, [s * c[0], s * c[1], s * c[2]], 1e-14));
        // the homogeneous-axion current with φ̇ = μ₅ is the CME current
        prop_assert!(close(axion_current(mu, [0.0; 3], [1.0, 2.0, 3.0], b, 7.0), c, 1e-15));
    }

    #[test]
    fn steady_state_is_fixed_point(edotb in -4.0f64..4.0, tau in 0.1f64..5.0, l in 0.1f64..3.0) {
        let p = TransportParams::new(3.0, l, tau, 0.0).unwrap();
        let inf = steady_mu5(&p, edotb);
        let d = p.drive_coefficient() * edotb;
        prop_assert!((d - inf / p.tau).abs() <= 1e-13 * d.abs().max(1e-300));
        prop_assert!((relax_mu5_constant(&p, d, inf, 3.0, 0.0) - inf).abs() <= 1e-13 * inf.abs().max(1e-300));
    }
}
