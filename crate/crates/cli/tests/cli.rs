use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use axion_hall::scenario::evolve_prescribed;
use axion_hall::{read_manifest, RunConfig, Scenario};
use axion_hall_core::evolve::{effective_mu5, integrate_ensemble};
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_axion-hall");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("AXION_HALL_THREADS").output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn error_report(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr is a JSON error report")
}

const EVOLVE: &str = r#"
scenario = "evolve"
seed = 3

[background]
kind = "de_sitter"
hubble = 0.1

[spectrum]
k_min = 0.2
k_max = 3.0
n_modes = 10
amplitude = 1e-3

[evolve]
t1 = 4.0
n_samples = 20
snapshot_times = [2.0, 4.0]

[axion]
mu5 = 12.566370614359172
"#;

#[test]
fn shell_example_writes_endpoints() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.toml", "scenario = \"shell\"\n[chiral]\nmu5_eff = 2.0\n");
    let out = d.path().join("out");
    let o = run(&["shell", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("shell.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rec = rdr.records().next().unwrap().unwrap();
    let lo: f64 = rec[5].parse().unwrap();
    let hi: f64 = rec[6].parse().unwrap();
    assert_eq!((lo, hi), (0.0, 2.0));
    assert_eq!(&rec[4], "false");
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("0.0000000000000000e0 2.0000000000000000e0"));
}

#[test]
fn negative_tau_is_a_config_error() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        d.path(),
        "c.toml",
        "scenario = \"cme\"\n[transport]\nl = 1.0\ntau = -1.0\n[cme]\ne = [1.0, 0.0, 0.0]\nb = [1.0, 0.0, 0.0]\n",
    );
    let out = d.path().join("out");
    let o = run(&["cme", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let r = error_report(&o);
    assert_eq!(r["error"]["field"], "transport.tau");
    assert_eq!(r["error"]["kind"], "config");
    assert!(!out.exists(), "nothing is written before validation passes");
}

#[test]
fn strict_parsing() {
    let d = tempfile::tempdir().unwrap();
    let cases = [
        "scenario = \"shell\"\nextra = 1\n[chiral]\nmu5_eff = 2.0\n",
        "scenario = \"shell\"\n[chiral]\nmu5_eff = 2.0\nk_min = 0.1\n",
        "scenario = \"shell\"\n[chiral]\nmu5 = 1.0\nmu5_eff = 2.0\n",
        "scenario = \"shell\"\n[chiral]\nmu5_eff = 2.0\n[cme]\ne = [0.0, 0.0, 0.0]\nb = [0.0, 0.0, 0.0]\n",
        "scenario = \"shell\"\n[background]\nkind = \"de_sitter\"\nhubble = 1.0\nexponent = 2.0\n[chiral]\nmu5_eff = 2.0\n",
        "scenario = \"nonsense\"\n",
        "scenario = \"hall-fraction\"\n[lattice]\ngram = [[2]]\nq = [1]\n",
        "scenario = \"hall-fraction\"\n[lattice]\ngram = [[1, 0], [0, 1]]\nq = [2, 2]\n",
        "scenario = \"hall-enumerate\"\n[enumerate]\nmax_dim = 4\nentry_bound = 3\ncharge_bound = 3\n",
        "scenario = \"evolve\"\n[spectrum]\nk_min = 1.0\nk_max = 0.5\nn_modes = 2\namplitude = 1.0\n[evolve]\nt1 = 1.0\n[axion]\nmu5 = 1.0\n",
        "scenario = \"evolve\"\n[spectrum]\nk_min = 0.5\nk_max = 1.0\nn_modes = 2\namplitude = 1.0\n[evolve]\nt1 = 1.0\ntol = 0.5\n[axion]\nmu5 = 1.0\n",
        "scenario = \"evolve\"\n[spectrum]\nk_min = 0.5\nk_max = 1.0\nn_modes = 2\namplitude = 1.0\n[evolve]\nt1 = 1.0\n[axion]\nmu5 = 1.0\npotential = { kind = \"cosine\", scale = 1.0 }\n",
        "scenario = \"hall-anomaly-check\"\n[anomaly]\ngrids = [4]\n",
    ];
    for (i, c) in cases.iter().enumerate() {
        let cfg = write(d.path(), &format!("c{i}.toml"), c);
        let out = d.path().join(format!("o{i}"));
        let o = run(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "case {i}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(error_report(&o)["error"]["exit_code"], 2);
    }
}

#[test]
fn subcommand_must_match_scenario() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.toml", "scenario = \"shell\"\n[chiral]\nmu5_eff = 2.0\n");
    let o = run(&["hall", "fraction", "--config", &cfg, "--out", d.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    // a scenario-less config takes it from the subcommand
    let cfg = write(d.path(), "h.toml", "[lattice]\ngram = [[3]]\nq = [1]\n");
    let o = run(&["hall", "fraction", "--config", &cfg, "--out", d.path().join("h").to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "1/3");
    let j: Value = serde_json::from_slice(&fs::read(d.path().join("h/hall_fraction.json")).unwrap()).unwrap();
    assert_eq!(j["fraction"], "1/3");
    assert_eq!(j["det"], "3");
}

#[test]
fn exit_codes_for_numeric_and_io_failures() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        d.path(),
        "c.toml",
        "scenario = \"evolve\"\n[spectrum]\nk_min = 1.0\nk_max = 2.0\nn_modes = 1\namplitude = 1.0\n[evolve]\nt1 = 100.0\nmax_steps = 10\n[axion]\nmu5 = 1.0\n",
    );
    let o = run(&["run", "--config", &cfg, "--out", d.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(error_report(&o)["error"]["parameter"].as_str().unwrap().starts_with("k = "));
    let o = run(&["run", "--config", d.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    let o = run(&["rerun", d.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn identical_runs_are_byte_identical() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "e.toml", EVOLVE);
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    assert!(run(&["evolve", "--config", &cfg, "--out", a.to_str().unwrap(), "--threads", "1"]).status.success());
    assert!(run(&["evolve", "--config", &cfg, "--out", b.to_str().unwrap(), "--threads", "4"]).status.success());
    let names = ["timeseries.csv", "modes_0.csv", "modes_1.csv", "spectrum_0.csv", "spectrum_1.csv"];
    for n in names {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n}");
    }
    let m = read_manifest(&a.join("manifest.json")).unwrap();
    assert_eq!(m.outputs.len(), names.len());
    assert_eq!(m.config["seed"], 3);
}

#[test]
fn seed_flag_overrides_config() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "e.toml", EVOLVE);
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    assert!(run(&["evolve", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    assert!(run(&["evolve", "--config", &cfg, "--out", b.to_str().unwrap(), "--seed", "99"]).status.success());
    assert_ne!(fs::read(a.join("timeseries.csv")).unwrap(), fs::read(b.join("timeseries.csv")).unwrap());
    assert_eq!(read_manifest(&b.join("manifest.json")).unwrap().config["seed"], 99);
}

#[test]
fn rerun_verifies_hashes_and_detects_tampering() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "e.toml", EVOLVE);
    let a = d.path().join("a");
    assert!(run(&["evolve", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    let manifest = a.join("manifest.json");
    let o = run(&["rerun", manifest.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(a.join("timeseries.csv")).unwrap(), fs::read(a.join("rerun/timeseries.csv")).unwrap());

    let mut m: Value = serde_json::from_slice(&fs::read(&manifest).unwrap()).unwrap();
    m["outputs"][0]["sha256"] = Value::from("00");
    let bad = d.path().join("bad.json");
    fs::write(&bad, serde_json::to_vec(&m).unwrap()).unwrap();
    assert_eq!(run(&["rerun", bad.to_str().unwrap(), "--out", d.path().join("x").to_str().unwrap()]).status.code(), Some(3));

    let mut m: Value = serde_json::from_slice(&fs::read(&manifest).unwrap()).unwrap();
    m["config"]["evolve"]["t1"] = Value::from(5.0);
    fs::write(&bad, serde_json::to_vec(&m).unwrap()).unwrap();
    assert_eq!(run(&["rerun", bad.to_str().unwrap(), "--out", d.path().join("y").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn thread_env_var_is_honoured() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "e.toml", EVOLVE);
    let a = d.path().join("a");
    let o = Command::new(BIN)
        .args(["evolve", "--config", &cfg, "--out", a.to_str().unwrap()])
        .env("AXION_HALL_THREADS", "3")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(read_manifest(&a.join("manifest.json")).unwrap().threads, 3);
    let o = Command::new(BIN).args(["evolve", "--config", &cfg]).env("AXION_HALL_THREADS", "0").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parallel_map_matches_serial_ensemble() {
    let cfg = RunConfig::from_toml(EVOLVE).unwrap().resolve(None, None).unwrap();
    assert_eq!(cfg.scenario(), Scenario::Evolve);
    let par = evolve_prescribed(&cfg, 4).unwrap();
    let modes = cfg.spectrum_spec().unwrap().initial_modes().unwrap();
    let ax = cfg.axion_state().unwrap();
    let mu5 = ax.mu5;
    let ser = integrate_ensemble(&modes, &cfg.background().unwrap(), ax.alpha, ax.phi, &|_| mu5, &cfg.window().unwrap()).unwrap();
    assert_eq!(par, ser);
    assert!((effective_mu5(ax.alpha, mu5) - 2.0).abs() < 1e-14);
}

#[test]
fn every_scenario_runs() {
    let d = tempfile::tempdir().unwrap();
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let expected: &[(&str, &[&str])] = &[
        ("dispersion", &["dispersion.csv"]),
        ("shell", &["shell.csv"]),
        ("cme", &["cme.json"]),
        ("hall_fraction", &["hall_fraction.json"]),
        ("hall_enumerate", &["fractions.csv"]),
        ("hall_3d", &["hall3d.json"]),
        ("evolve_coupled", &["timeseries.csv", "modes_0.csv", "spectrum_0.csv"]),
    ];
    for (name, files) in expected {
        let out = d.path().join(name);
        let cfg = configs.join(format!("{name}.toml"));
        let o = run(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        for f in *files {
            assert!(out.join(f).exists(), "{name}/{f}");
        }
        let m = read_manifest(&out.join("manifest.json")).unwrap();
        assert_eq!(m.outputs.len(), files.len());
        assert!(m.conventions.contains_key("wavenumber"));
    }
    let j: Value = serde_json::from_slice(&fs::read(d.path().join("hall_3d/hall3d.json")).unwrap()).unwrap();
    assert_eq!(j["charge_density"], 2.5);
    assert_eq!(j["current"], serde_json::json!([0.0, 1.5, 0.0]));
    assert!(j["axion_check"]["max_abs_difference"].as_f64().unwrap() < 1e-12);
}
