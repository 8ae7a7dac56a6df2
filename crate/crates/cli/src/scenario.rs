use axion_hall_core::cme::{self, TransportParams};
use axion_hall_core::dispersion::{self, Helicity};
use axion_hall_core::evolve::{
    self, effective_mu5, integrate_mode, prescribed_axion_history, Trajectory,
};
use axion_hall_core::math::{self, FOUR_PI_SQ};
use axion_hall_core::qhall::{self, GridSample2D};
use axion_hall_core::spectra;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Mu5Profile, RunConfig, Scenario};
use crate::error::CliError;
use crate::output::{fmt_f64, json_file, OutputFile, Table};

/// Files and summary of one executed scenario.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<OutputFile>,
    /// Text for stdout.
    pub stdout: Option<String>,
    /// Run diagnostics recorded in the manifest.
    pub diagnostics: Value,
}

/// Runs a resolved configuration. `threads` sizes the pool used for
/// independent modes; results do not depend on it.
pub fn execute(cfg: &RunConfig, threads: usize) -> Result<Outcome, CliError> {
    match cfg.scenario() {
        Scenario::Dispersion => dispersion_scan(cfg),
        Scenario::Shell => shell(cfg),
        Scenario::Evolve | Scenario::EvolveCoupled => evolve_run(cfg, threads),
        Scenario::Cme => cme_run(cfg),
        Scenario::HallFraction => hall_fraction(cfg),
        Scenario::HallEnumerate => hall_enumerate(cfg),
        Scenario::HallAnomalyCheck => anomaly_check(cfg),
        Scenario::Hall3d => hall_3d(cfg),
    }
}

fn dispersion_scan(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.chiral_params()?;
    let ks = cfg.k_grid()?.expect("dispersion has a k grid");
    let mut t = Table::new(&["k", "im_omega_plus_1", "im_omega_plus_2", "im_omega_minus_1", "im_omega_minus_2", "growth_rate"]);
    for &k in &ks {
        let b = dispersion::omega_branches(k, &p)?;
        let [p1, p2] = b.helicity(Helicity::Plus);
        let [m1, m2] = b.helicity(Helicity::Minus);
        t.floats(&[k, p1.im, p2.im, m1.im, m2.im, dispersion::growth_rate(k, &p)?]);
    }
    Ok(Outcome {
        files: vec![t.finish("dispersion.csv")],
        stdout: None,
        diagnostics: json!({ "mu5_eff": p.mu5_eff, "hubble": p.hubble, "hubble_dot": p.hubble_dot, "n_k": ks.len() }),
    })
}

fn shell(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.chiral_params()?;
    let s = dispersion::instability_shell(&p);
    let (k_star, gamma) = dispersion::max_growth(&p).unwrap_or((f64::NAN, f64::NAN));
    let mut t = Table::new(&["mu5_eff", "hubble", "hubble_dot", "offset", "empty", "k_min", "k_max", "k_star", "gamma_star"]);
    let mut row: Vec<String> = [p.mu5_eff, p.hubble, p.hubble_dot, s.offset].iter().map(|x| fmt_f64(*x)).collect();
    row.push(s.empty.to_string());
    row.extend([s.k_min, s.k_max, k_star, gamma].iter().map(|x| fmt_f64(*x)));
    t.row(row);
    let stdout = if s.empty {
        "empty".to_string()
    } else {
        format!("{} {}", fmt_f64(s.k_min), fmt_f64(s.k_max))
    };
    Ok(Outcome {
        files: vec![t.finish("shell.csv")],
        stdout: Some(stdout),
        diagnostics: json!({ "empty": s.empty, "k_min": s.k_min, "k_max": s.k_max }),
    })
}

fn mu5_fn(profile: Mu5Profile, mu5: f64, t0: f64) -> impl Fn(f64) -> f64 + Sync {
    move |t| match profile {
        Mu5Profile::Constant => mu5,
        Mu5Profile::Linear { rate } => mu5 + rate * (t - t0),
        Mu5Profile::Exponential { decay_time } => mu5 * math::exp(-(t - t0) / decay_time),
    }
}

/// Prescribed-μ₅ run with modes integrated independently on a thread pool.
pub fn evolve_prescribed(cfg: &RunConfig, threads: usize) -> Result<Trajectory, CliError> {
    let modes = cfg.spectrum_spec()?.initial_modes()?;
    let bg = cfg.background()?;
    let window = cfg.window()?;
    let ax = cfg.axion_state()?;
    let mu5 = mu5_fn(cfg.mu5_profile()?, ax.mu5, window.t0);
    let alpha = ax.alpha;
    let mu5_eff = |t: f64| effective_mu5(alpha, mu5(t));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::config(Some("threads"), e.to_string()))?;
    let histories = pool.install(|| {
        modes.par_iter().map(|m| integrate_mode(m, &bg, &mu5_eff, &window)).collect::<Result<Vec<_>, _>>()
    })?;
    let axion = prescribed_axion_history(ax.phi, &mu5, &window)?;
    Ok(Trajectory::assemble(window.sample_times(), histories, axion))
}

fn evolve_run(cfg: &RunConfig, threads: usize) -> Result<Outcome, CliError> {
    let spec = cfg.spectrum_spec()?;
    let traj = match cfg.scenario() {
        Scenario::EvolveCoupled => {
            let window = cfg.window()?;
            evolve::integrate_coupled(&spec, &cfg.background()?, &cfg.axion_state()?, &window)?
        }
        _ => evolve_prescribed(cfg, threads)?,
    };
    let mut files = Vec::new();
    let mut ts = Table::new(&["t", "phi", "mu5", "energy", "helicity", "edotb"]);
    for (i, t) in traj.times.iter().enumerate() {
        let (phi, mu5) = traj.axion[i];
        let d = traj.diagnostics[i];
        ts.floats(&[*t, phi, mu5, d.energy, d.helicity, d.edotb]);
    }
    files.push(ts.finish("timeseries.csv"));
    let edges = spec.bin_edges();
    let snaps = cfg.snapshot_times()?;
    for (s, &time) in snaps.iter().enumerate() {
        let i = traj.times.iter().position(|t| *t == time).expect("snapshot times are sampled");
        let ms = &traj.modes[i];
        let mut mt = Table::new(&["t", "k", "abs_b_plus", "abs_b_minus"]);
        for m in ms {
            mt.floats(&[time, m.k, math::hypot(m.b_plus.re, m.b_plus.im), math::hypot(m.b_minus.re, m.b_minus.im)]);
        }
        files.push(mt.finish(format!("modes_{s}.csv")));
        let snap = spectra::snapshot(ms, &edges, time)?;
        let mut st = Table::new(&["t", "k_lo", "k_hi", "energy", "helicity"]);
        for b in 0..snap.bins() {
            st.floats(&[time, snap.edges[b], snap.edges[b + 1], snap.energy[b], snap.helicity[b]]);
        }
        files.push(st.finish(format!("spectrum_{s}.csv")));
    }
    let last = traj.diagnostics.last().copied().expect("at least one sample");
    let window = cfg.window()?;
    let ax = cfg.axion_state()?;
    let st0 = cfg.background()?.eval(window.t0)?;
    let p0 = dispersion::ChiralParams::new(ax.mu5_eff(), st0.hubble, st0.hubble_dot);
    let shell0 = dispersion::instability_shell(&p0);
    Ok(Outcome {
        files,
        stdout: None,
        diagnostics: json!({
            "samples": traj.times.len(),
            "modes": spec.n_modes,
            "snapshot_times": snaps,
            "max_adiabaticity": traj.max_adiabaticity(),
            "final_energy": last.energy,
            "final_helicity": last.helicity,
            "initial_shell": { "empty": shell0.empty, "k_min": shell0.k_min, "k_max": shell0.k_max },
        }),
    })
}

fn vec_json(v: [f64; 3]) -> Value {
    json!(v)
}

fn cme_run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p: TransportParams = cfg.transport()?;
    let c = cfg.cme.as_ref().expect("validated");
    let edotb = math::dot(c.e, c.b);
    let steady = cme::steady_mu5(&p, edotb);
    let sigma = cme::conductivity_tensor(&p, c.b);
    let t_relax = c.t_relax.unwrap_or(20.0 * p.tau);
    let drive = p.drive_coefficient() * edotb;
    let relaxed = cme::relax_mu5(&p, |_| drive, c.mu5_0, t_relax)?;
    let closed = cme::relax_mu5_constant(&p, drive, c.mu5_0, t_relax, 0.0);
    let mut out = json!({
        "alpha": p.alpha,
        "coupling": p.alpha / FOUR_PI_SQ,
        "drive_coefficient": p.drive_coefficient(),
        "relaxation_rate": p.relaxation_rate(c.q),
        "edotb": edotb,
        "steady_mu5": steady,
        "steady_current": vec_json(cme::steady_cme_current(&p, c.e, c.b)),
        "conductivity_tensor": sigma,
        "ohmic_current": vec_json(cme::ohmic_current(&sigma, c.e)),
        "axion_current": vec_json(cme::axion_current(c.phi_dot, c.grad_phi, c.e, c.b, p.alpha)),
        "axion_charge_density": cme::axion_charge_density(c.grad_phi, c.b, p.alpha),
        "relaxation": {
            "t": t_relax,
            "mu5_0": c.mu5_0,
            "mu5_numeric": relaxed,
            "mu5_closed_form": closed,
            "mu5_mode_q": cme::relax_mu5_constant(&p, drive, c.mu5_0, t_relax, c.q),
        },
    });
    if let Some(m) = c.mu5 {
        out["cme_current"] = vec_json(cme::cme_current(m, c.b, p.alpha));
    }
    Ok(Outcome {
        files: vec![json_file("cme.json", &out)],
        stdout: None,
        diagnostics: json!({ "steady_mu5": steady }),
    })
}

fn gram_string(g: &[Vec<i64>]) -> String {
    g.iter().flatten().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn q_string(q: &[i64]) -> String {
    q.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn hall_fraction(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (lat, q) = cfg.lattice()?;
    let f = qhall::hall_fraction(&lat, &q)?;
    let out = json!({
        "fraction": f.to_ratio_string(),
        "numerator": f.numer().to_string(),
        "denominator": f.denom().to_string(),
        "value": f.to_f64(),
        "det": lat.det().to_string(),
        "gram": lat.gram(),
        "q": q.0,
    });
    Ok(Outcome {
        files: vec![json_file("hall_fraction.json", &out)],
        stdout: Some(f.to_ratio_string()),
        diagnostics: json!({ "fraction": f.to_ratio_string() }),
    })
}

fn hall_enumerate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let e = cfg.enumerate.as_ref().expect("validated");
    let fr = qhall::enumerate_fractions(e.max_dim, e.entry_bound, e.charge_bound)?;
    let mut t = Table::new(&["fraction", "value", "dim", "gram", "q", "det", "multiplicity"]);
    for f in &fr {
        t.row([
            f.fraction.to_ratio_string(),
            fmt_f64(f.fraction.to_f64()),
            f.lattice.dim().to_string(),
            gram_string(f.lattice.gram()),
            q_string(&f.q.0),
            f.lattice.det().to_string(),
            f.multiplicity.to_string(),
        ]);
    }
    Ok(Outcome {
        files: vec![t.finish("fractions.csv")],
        stdout: None,
        diagnostics: json!({ "distinct_fractions": fr.len() }),
    })
}

fn anomaly_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let setups = cfg.anomaly_setups()?;
    let mut reports = Vec::new();
    let mut fields = None;
    for s in &setups {
        let g = GridSample2D::from_setup(s)?;
        let (r, f) = qhall::anomaly_inflow_check(&g)?;
        reports.push(r);
        fields = Some((g, f));
    }
    let ratios: Vec<f64> =
        reports.windows(2).map(|w| w[0].integrated_residual / w[1].integrated_residual).collect();
    let per_grid: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "h": r.h,
                "max_pointwise": r.max_pointwise,
                "integrated_residual": r.integrated_residual,
                "signed_residual": r.signed_residual,
                "bulk_only_max": r.bulk_only_max,
                "bulk_only_integrated": r.bulk_only_integrated,
                "bulk_only_signed": r.bulk_only_signed,
                "edge_integral": r.edge_integral,
                "faraday_max": r.faraday_max,
            })
        })
        .collect();
    let out = json!({ "grids": per_grid, "refinement_ratios": ratios });
    let (g, f) = fields.expect("at least one grid");
    let mut t = Table::new(&["x", "y", "bulk_divergence", "edge_term", "residual"]);
    for (idx, &(i, j)) in f.nodes.iter().enumerate() {
        let (d, e) = (f.bulk_divergence[idx], f.edge_term[idx]);
        t.floats(&[g.coords[i], g.coords[j], d, e, d + e]);
    }
    Ok(Outcome {
        files: vec![json_file("anomaly.json", &out), t.finish("anomaly_field.csv")],
        stdout: None,
        diagnostics: json!({ "refinement_ratios": ratios, "field_grid": g.n }),
    })
}

fn hall_3d(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let h = cfg.hall3d.as_ref().expect("validated");
    let e2h = cfg.units.e2_over_h;
    let (rho, j) = qhall::hall3d(h.k, h.b, h.e, e2h);
    let two_pi = 2.0 * math::PI;
    let grad = [two_pi * h.k[0] as f64, two_pi * h.k[1] as f64, two_pi * h.k[2] as f64];
    let alpha = TransportParams::alpha_from_conductance_quantum(e2h);
    let ja = cme::axion_current(0.0, grad, h.e, h.b, alpha);
    let rho_a = cme::axion_charge_density(grad, h.b, alpha);
    let diff = (0..3).map(|i| (j[i] - ja[i]).abs()).fold((rho - rho_a).abs(), f64::max);
    let out = json!({
        "k": h.k,
        "e2_over_h": e2h,
        "charge_density": rho,
        "current": j,
        "axion_check": { "charge_density": rho_a, "current": ja, "max_abs_difference": diff },
    });
    Ok(Outcome {
        files: vec![json_file("hall3d.json", &out)],
        stdout: None,
        diagnostics: json!({ "max_abs_difference": diff }),
    })
}
