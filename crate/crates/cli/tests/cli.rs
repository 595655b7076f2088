use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_deltashell"));
    c.env_remove("DELTASHELL_OUT");
    c
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

struct Run {
    code: i32,
    stderr: String,
}

fn run(args: &[&str], out: &Path) -> Run {
    let o = bin().args(args).arg("--out").arg(out).output().unwrap();
    Run { code: o.status.code().unwrap(), stderr: String::from_utf8(o.stderr).unwrap() }
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const ORACLE_SUBSET: &str = r#"
schema_version = 1
mass = 1.0

[surface]
kind = "plane"
normal = [0.0, 0.0, 1.0]
offset = 0.0

[interaction]
form = "electrostatic_lorentz"
eta = 1.0
tau = 0.0

[oracle]
half_length = 20.0
points_per_side = 200

[[oracle.cases]]
label = "electrostatic eta=1 xi=0 m=1"
xi = [0.0, 0.0]
m = 1.0
phi = 0.0
coupling = { form = "electrostatic_lorentz", eta = 1.0, tau = 0.0 }

[[oracle.cases]]
label = "free xi=0 m=1"
xi = [0.0, 0.0]
m = 1.0
phi = 0.0
coupling = { form = "diagonal_pair", gamma = 0.0, epsilon = 0.0 }
"#;

#[test]
fn verify_passes_and_names_the_closed_form_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["verify"], dir.path());
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(dir.path().join("verify.json"));
    let ids = v["result"]["identities"].as_array().unwrap();
    assert!(ids.len() >= 6);
    for id in ids {
        assert_eq!(id["pass"], true, "{id}");
        assert!(id["max_error"].as_f64().unwrap() < 1e-12);
    }
    let cf = &v["result"]["closed_forms"];
    assert!(cf["uniform_match"].is_null());
    assert!(cf["exact_max_rel_error"].as_f64().unwrap() < 1e-9);
    assert!(v["warnings"][0].as_str().unwrap().contains("neither published closed form"));
    assert!(v["config_hash"].is_null());
}

#[test]
fn tampered_generators_exit_with_identity_failure() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["verify", "--tamper-alpha2"], dir.path());
    assert_eq!(r.code, 2);
    let v = json(dir.path().join("verify.json"));
    let failed: Vec<&str> = v["result"]["identities"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|i| i["pass"] == false)
        .map(|i| i["name"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"dirac_anticommutation"), "{failed:?}");
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["spectrum", "/nonexistent/config.toml"], dir.path()).code, 1);
    let text = std::fs::read_to_string(config("plane_shell.toml")).unwrap();
    let bad = write_config(dir.path(), "bad.toml", &text.replace("schema_version = 1", "schema_version = 7"));
    let r = run(&["check-ls", bad.to_str().unwrap()], dir.path());
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("schema_version"));
}

#[test]
fn ls_reports_for_the_example_configs() {
    let dir = tempfile::tempdir().unwrap();
    let check = |name: &str| {
        let out = dir.path().join(name);
        assert_eq!(run(&["check-ls", config(name).to_str().unwrap()], &out).code, 0);
        json(out.join("check-ls.json"))["result"].clone()
    };
    let sphere = check("sphere_radial.toml");
    for key in ["uniform", "parameter"] {
        assert_eq!(sphere[key]["pass"], true);
    }
    assert_eq!(sphere["local"]["pass"], true);
    assert_eq!(sphere["verdict"], "self-adjoint by the criterion");

    let critical = check("plane_critical.toml");
    assert_eq!(critical["parameter"]["pass"], false);
    assert_eq!(critical["verdict"], "criterion not established");

    let cone = check("cone_degenerate.toml");
    assert_eq!(cone["uniform"]["pass"], false);
    assert_eq!(cone["uniform"]["argmin_radius"].as_f64().unwrap(), 1e3);
}

#[test]
fn spectrum_gate_and_force() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("plane_critical.toml");
    let r = run(&["spectrum", cfg.to_str().unwrap()], dir.path());
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("--force"));
    assert_eq!(run(&["spectrum", cfg.to_str().unwrap(), "--force"], dir.path()).code, 0);
    let v = json(dir.path().join("spectrum.json"));
    assert_eq!(v["result"]["gate"]["forced"], true);
}

#[test]
fn spectrum_examples() {
    let dir = tempfile::tempdir().unwrap();
    let spectrum = |name: &str| {
        let out = dir.path().join(name);
        assert_eq!(run(&["spectrum", config(name).to_str().unwrap()], &out).code, 0);
        json(out.join("spectrum.json"))["result"].clone()
    };
    let rays = serde_json::json!({
        "intervals": [{"lo": "-inf", "hi": -1.0}, {"lo": 1.0, "hi": "+inf"}],
        "points": []
    });
    assert_eq!(spectrum("sphere_radial.toml")["spectrum"], rays);

    let cone = spectrum("cone_vanishing.toml");
    assert_eq!(cone["spectrum"], rays);
    for s in cone["shell"].as_array().unwrap() {
        assert!(s["points"].as_array().unwrap().is_empty() && s["hulls"].as_array().unwrap().is_empty());
    }

    let plane = spectrum("plane_shell.toml");
    let first = plane["shell"][0]["points"][0].as_f64().unwrap();
    assert!((first - 0.6).abs() < 1e-8, "{first}");
    let csv = std::fs::read_to_string(dir.path().join("plane_shell.toml").join("dispersion_0.csv")).unwrap();
    assert!(csv.starts_with("xi_norm,branch_id,energy\n"));
    assert_eq!(plane["gaps"][0]["points"].as_array().unwrap().len(), 0);
}

#[test]
fn vector_potential_does_not_change_the_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let base = std::fs::read_to_string(config("plane_shell.toml")).unwrap();
    let gauged = format!(
        "{base}\n[[potential.vector.components]]\nmodel = \"constant\"\nvalue = 0.7\n\n\
         [[potential.vector.components]]\nmodel = \"radial_so\"\nbase = 0.0\namplitude = 2.0\nprofile = \"sin_log\"\n\n\
         [[potential.vector.components]]\nmodel = \"constant\"\nvalue = -1.5\n"
    );
    let a = write_config(dir.path(), "a.toml", &base);
    let b = write_config(dir.path(), "b.toml", &gauged);
    assert_eq!(run(&["spectrum", a.to_str().unwrap()], &dir.path().join("a")).code, 0);
    assert_eq!(run(&["spectrum", b.to_str().unwrap()], &dir.path().join("b")).code, 0);
    let ra = json(dir.path().join("a/spectrum.json"));
    let rb = json(dir.path().join("b/spectrum.json"));
    assert_ne!(ra["config_hash"], rb["config_hash"]);
    assert_eq!(ra["result"], rb["result"]);
    assert_eq!(ra["warnings"], rb["warnings"]);
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-env");
    let o = bin().arg("verify").env("DELTASHELL_OUT", &target).output().unwrap();
    assert!(o.status.success());
    assert!(target.join("verify.json").exists());
}

#[test]
fn dispersion_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["dispersion", config("plane_shell.toml").to_str().unwrap()], dir.path()).code, 0);
    let v = json(dir.path().join("dispersion.json"));
    let rows = v["result"]["problems"][0]["table"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 33);
    assert!(dir.path().join("dispersion_0.csv").exists());
}

#[test]
fn oracle_subset_reproduces_committed_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "oracle.toml", ORACLE_SUBSET);
    let r = run(&["oracle", cfg.to_str().unwrap()], dir.path());
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(dir.path().join("oracle.json"));
    assert_eq!(v["result"]["max_drift"].as_f64().unwrap(), 0.0);
    assert!(v["result"]["cases"].as_array().unwrap().iter().all(|c| c["reliable"] == true));
}

#[test]
fn oracle_drift_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let committed = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/fd_battery.json"),
    )
    .unwrap();
    let mut battery: Value = serde_json::from_str(&committed).unwrap();
    let e = &mut battery["results"][0]["eigenvalues"][0];
    *e = Value::from(e.as_f64().unwrap() * 1.01);
    let baseline = write_config(dir.path(), "baseline.json", &battery.to_string());
    let text = ORACLE_SUBSET.replace(
        "points_per_side = 200",
        &format!("points_per_side = 200\nbaseline = \"{}\"", baseline.display()),
    );
    let cfg = write_config(dir.path(), "oracle.toml", &text);
    let r = run(&["oracle", cfg.to_str().unwrap()], dir.path());
    assert_eq!(r.code, 3);
    let v = json(dir.path().join("oracle.json"));
    assert_eq!(v["result"]["pass"], false);
}

#[test]
fn oracle_refined_grid_stays_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let text = ORACLE_SUBSET.replace("points_per_side = 200", "points_per_side = 400");
    let cfg = write_config(dir.path(), "oracle.toml", &text);
    let r = run(&["oracle", cfg.to_str().unwrap()], dir.path());
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(dir.path().join("oracle.json"));
    let d = v["result"]["max_drift"].as_f64().unwrap();
    assert!(d < 1e-3, "{d}");
}

#[test]
fn short_interval_is_flagged_unreliable() {
    let dir = tempfile::tempdir().unwrap();
    let text = ORACLE_SUBSET
        .replace("half_length = 20.0", "half_length = 10.0\nauto_length = false")
        .replace("points_per_side = 200", "points_per_side = 100");
    let cfg = write_config(dir.path(), "oracle.toml", &text);
    let r = run(&["oracle", cfg.to_str().unwrap()], dir.path());
    assert!(r.stderr.contains("marked unreliable"), "{}", r.stderr);
    let v = json(dir.path().join("oracle.json"));
    assert_eq!(v["result"]["cases"][0]["reliable"], false);
    assert_eq!(v["result"]["cases"][1]["reliable"], true);
}
