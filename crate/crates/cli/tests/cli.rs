use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bogolon_cli::config::RunConfig;
use bogolon_cli::output::header_config;

const CONDENSATE: &str = "
[condensate]
mass = 1.0
coupling = 1.0
density = 1.0
impurity_coupling = 0.1
hbar = 1.0
";

fn bogolon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bogolon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, format!("{CONDENSATE}{body}")).unwrap();
    path
}

fn run_with(config: &Path, command: &str, extra: &[&str]) -> Output {
    let mut args = vec![command, "--config", config.to_str().unwrap()];
    args.extend_from_slice(extra);
    bogolon(&args)
}

/// Data rows of a CSV document, header line excluded.
fn rows(out: &Output) -> Vec<Vec<String>> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

const EXPONENTIAL: &str = "
[trajectory]
kind = \"exponential_decay\"
zeta0 = 1.0
gamma0 = 1.0

[window]
start = -inf
end = inf

[grid]
k_min = 0.05
k_max = 4.0
k_count = 7
thetas = [0.0, 0.4, 1.2, 1.9415926535897931, 2.7415926535897932, 3.141592653589793]
";

#[test]
fn spectrum_header_and_layout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "exp.toml", EXPONENTIAL);
    let out = run_with(&cfg, "spectrum", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.starts_with(&format!("# bogolon {}\n", env!("CARGO_PKG_VERSION"))));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "k,theta,omega,dn_dk_domega,dE_dk_domega,provenance");
    let rows = rows(&out);
    assert_eq!(rows.len(), 7 * 6);
    // k-major, θ-minor
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(num(&r[0]), num(&rows[(i / 6) * 6][0]));
        assert_eq!(r[5], "closed_form");
        let omega = num(&r[2]);
        assert_eq!(num(&r[4]), omega * num(&r[3]));
        assert!(num(&r[3]) >= 0.0);
    }
}

#[test]
fn hemisphere_ratio_per_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "exp.toml", EXPONENTIAL);
    let rows = rows(&run_with(&cfg, "spectrum", &[]));
    // θ and π − θ pair up as (0, 5), (1, 4), (2, 3) within a k block
    for block in rows.chunks(6) {
        let omega = num(&block[0][2]);
        for (a, b) in [(0, 5), (1, 4), (2, 3)] {
            let ratio = num(&block[a][3]) / num(&block[b][3]);
            let expected = (-2.0 * PI * omega).exp();
            assert!((ratio / expected - 1.0).abs() < 1e-9, "ω = {omega}: {ratio} vs {expected}");
        }
    }
}

#[test]
fn subsonic_uniform_motion_is_dark() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cv.toml",
        "
[trajectory]
kind = \"constant_velocity\"
speed = 0.5

[window]
start = -inf
end = inf

[grid]
k_min = 0.1
k_max = 5.0
k_count = 9
theta_count = 7
",
    );
    let out = run_with(&cfg, "spectrum", &[]);
    assert_eq!(out.status.code(), Some(0));
    let rows = rows(&out);
    assert_eq!(rows.len(), 63);
    assert!(rows.iter().all(|r| num(&r[3]) == 0.0 && num(&r[4]) == 0.0));
}

#[test]
fn resting_impurity_radiates_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "rest.toml",
        "
[trajectory]
kind = \"constant_velocity\"
speed = 0.0

[window]
start = -inf
end = inf

[grid]
k_min = 0.1
k_max = 1.0

[energy]
k_max = 5.0
",
    );
    let out = run_with(&cfg, "energy", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = &rows(&out)[0];
    assert_eq!(num(&r[0]), 0.0);
    assert_eq!(r[5], "false");
}

#[test]
fn missing_rate_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.toml",
        &EXPONENTIAL.replace("gamma0 = 1.0\n", ""),
    );
    let out = run_with(&cfg, "spectrum", &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma0"));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "typo.toml", &format!("{EXPONENTIAL}\n[output]\nprecison = 5\n"));
    let out = run_with(&cfg, "spectrum", &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precison"));
}

#[test]
fn invalid_physics_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "neg.toml", &EXPONENTIAL.replace("gamma0 = 1.0", "gamma0 = -1.0"));
    assert_eq!(run_with(&cfg, "spectrum", &[]).status.code(), Some(1));
    let cfg = write_config(
        dir.path(),
        "noreg.toml",
        &format!("{EXPONENTIAL}\n[regulator]\nclosed_form = false\n"),
    );
    let out = run_with(&cfg, "spectrum", &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("regulator"));
    assert_eq!(bogolon(&["spectrum"]).status.code(), Some(1));
    assert_eq!(bogolon(&["spectrum", "--config", "/nonexistent.toml"]).status.code(), Some(1));
}

#[test]
fn exhausted_quadrature_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "tight.toml",
        &format!("{EXPONENTIAL}\n[energy]\nk_max = 20.0\n\n[energy.quadrature]\nmax_panels = 2\nrel_tol = 1e-14\n"),
    );
    let out = run_with(&cfg, "energy", &[]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("numerical failure"));
}

#[test]
fn echoed_config_reparses() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "exp.toml",
        &format!("{EXPONENTIAL}\n[energy]\nk_max = 20.0\n\n[output]\nunits = \"physical\"\n"),
    );
    let out_path = dir.path().join("out.csv");
    let out = run_with(&cfg, "spectrum", &["--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let echoed = RunConfig::from_toml(&header_config(&text).unwrap()).unwrap();
    let mut original = RunConfig::load(&cfg).unwrap();
    original.output.path = Some(out_path.clone());
    assert_eq!(echoed, original);
    // the echo is a fixed point
    assert_eq!(RunConfig::from_toml(&echoed.to_toml()).unwrap(), echoed);
}

#[test]
fn json_output_carries_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "exp.toml", EXPONENTIAL);
    let out = run_with(&cfg, "spectrum", &["--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["command"], "spectrum");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 42);
    let config = RunConfig::from_toml(doc["config"].as_str().unwrap()).unwrap();
    assert_eq!(config.output.format, bogolon_cli::config::Format::Json);
}

#[test]
fn physical_units_rescale_columns() {
    let dir = tempfile::tempdir().unwrap();
    // c = sqrt(gn/M) = 2, ξ = ħ/(2Mc) = 1/4 in these units; natural length ħ/(Mc) = 1/2
    let body = EXPONENTIAL.replace("gamma0 = 1.0", "gamma0 = 4.0").replace("zeta0 = 1.0", "zeta0 = 0.5");
    let phys = format!(
        "[condensate]\nmass = 1.0\ncoupling = 4.0\ndensity = 1.0\nimpurity_coupling = 0.1\nhbar = 1.0\n{body}\n[output]\nunits = \"physical\"\n"
    );
    let path = dir.path().join("phys.toml");
    std::fs::write(&path, phys).unwrap();
    let out = run_with(&path, "spectrum", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for r in rows(&out) {
        // ω = ck sqrt(1 + (kħ/2Mc)²) with c = 2 and k the physical wavenumber
        let k = num(&r[0]);
        let omega = 2.0 * k * (1.0 + (k / 4.0).powi(2)).sqrt();
        assert!((num(&r[2]) / omega - 1.0).abs() < 1e-14);
        // ħ = 1, so dE = ħω dn in the physical columns too
        assert!((num(&r[4]) - omega * num(&r[3])).abs() <= 1e-14 * num(&r[4]).abs());
    }
}

#[test]
fn thread_count_does_not_change_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let numeric = write_config(
        dir.path(),
        "numeric.toml",
        "
[trajectory]
kind = \"uniform_acceleration\"
acceleration = 1.0

[window]
start = -4.0
end = 4.0

[grid]
k_min = 0.2
k_max = 3.0
k_count = 6
theta_count = 5
",
    );
    let exp = write_config(dir.path(), "exp.toml", &format!("{EXPONENTIAL}\n[energy]\nk_max = 10.0\n"));
    for (cfg, command) in [(&numeric, "spectrum"), (&exp, "energy")] {
        let one = run_with(cfg, command, &["--threads", "1"]);
        let four = run_with(cfg, command, &["--threads", "4"]);
        assert_eq!(one.status.code(), Some(0), "{}", String::from_utf8_lossy(&one.stderr));
        assert_eq!(one.stdout, four.stdout, "{command}");
    }
}

#[test]
fn duration_sweep_keeps_block_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.toml",
        "
[trajectory]
kind = \"exponential_decay\"
zeta0 = 1.0
gamma0 = 1.0

[window]
start = 0.0
end = 1.0

[grid]
k_min = 1e-3
k_max = 1e-2
k_count = 4
thetas = [0.0]

[sweep]
parameter = \"duration\"
values = [4.0, 1.0, 2.0]
",
    );
    let out = run_with(&cfg, "sweep", &["--threads", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = rows(&out);
    assert_eq!(rows.len(), 12);
    let values: Vec<f64> = rows.iter().map(|r| num(&r[1])).collect();
    assert_eq!(values, [4.0, 4.0, 4.0, 4.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0]);
    for block in rows.chunks(4) {
        let ks: Vec<f64> = block.iter().map(|r| num(&r[2])).collect();
        let dn: Vec<f64> = block.iter().map(|r| num(&r[5])).collect();
        let slope = (dn[3] / dn[0]).ln() / (ks[3] / ks[0]).ln();
        assert!((slope - 3.0).abs() < 0.05, "slope {slope}");
    }
}

#[test]
fn zeta0_sweep_on_the_full_line_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "zeta.toml",
        &format!("{EXPONENTIAL}\n[sweep]\nparameter = \"zeta0\"\nvalues = [0.5, 1.0, 3.0]\n"),
    );
    let rows = rows(&run_with(&cfg, "sweep", &[]));
    assert_eq!(rows.len(), 3 * 42);
    for i in 0..42 {
        let a = num(&rows[i][5]);
        for block in 1..3 {
            let b = num(&rows[block * 42 + i][5]);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "row {i}: {a} vs {b}");
        }
    }
}

#[test]
fn regulator_sweep_emits_an_extrapolation_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "reg.toml",
        "
[trajectory]
kind = \"exponential_decay\"
zeta0 = 0.5
gamma0 = 1.0

[window]
start = -inf
end = inf

[regulator]
kind = \"exponential\"
ladder = [0.2, 0.1, 0.05]
order = 2
closed_form = false

[grid]
k_min = 0.8
k_max = 0.8
k_count = 1
thetas = [0.0]

[sweep]
parameter = \"regulator_epsilon\"
values = [0.1, 0.2, 0.05, 0.025]
",
    );
    let out = run_with(&cfg, "sweep", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = rows(&out);
    let stages: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(stages, ["ladder", "ladder", "ladder", "ladder", "extrapolated"]);
    let eps: Vec<f64> = rows.iter().map(|r| num(&r[3])).collect();
    assert_eq!(eps, [0.2, 0.1, 0.05, 0.025, 0.0]);
    // upper hemisphere Planck value (2π/ω)/(e^{2πω} − 1)
    let k: f64 = 0.8;
    let omega = k * (1.0 + k * k / 4.0).sqrt();
    let planck = 2.0 * PI / omega / ((2.0 * PI * omega).exp() - 1.0);
    let limit = num(&rows[4][6]);
    assert!((limit / planck - 1.0).abs() < 0.01, "{limit} vs {planck}");
}

#[test]
fn sweep_parameter_must_fit_the_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad_sweep.toml",
        &format!("{EXPONENTIAL}\n[sweep]\nparameter = \"acceleration\"\nvalues = [1.0]\n"),
    );
    let out = run_with(&cfg, "sweep", &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("acceleration"));
}

#[test]
fn sampled_path_is_read_relative_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let samples: String = (0..=400)
        .map(|i| {
            let t = i as f64 * 0.01;
            format!("{t},{}\n", (-t).exp())
        })
        .collect();
    std::fs::write(dir.path().join("path.csv"), format!("t,zeta\n{samples}")).unwrap();
    let grid = "
[window]
start = 0.0
end = 4.0

[grid]
k_min = 0.5
k_max = 2.0
k_count = 3
theta_count = 3
";
    let sampled = write_config(
        dir.path(),
        "sampled.toml",
        &format!("[trajectory]\nkind = \"sampled\"\npath = \"path.csv\"\n{grid}"),
    );
    let exact = write_config(
        dir.path(),
        "exact.toml",
        &format!("[trajectory]\nkind = \"exponential_decay\"\nzeta0 = 1.0\ngamma0 = 1.0\n{grid}"),
    );
    let a = rows(&run_with(&sampled, "spectrum", &[]));
    let b = rows(&run_with(&exact, "spectrum", &[]));
    assert_eq!(a.len(), 9);
    for (ra, rb) in a.iter().zip(&b) {
        assert_eq!(ra[5], "numeric");
        let (x, y) = (num(&ra[3]), num(&rb[3]));
        assert!((x - y).abs() <= 1e-5 * y.abs() + 1e-12, "{x} vs {y}");
    }
}

#[test]
fn depletion_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dep.toml");
    std::fs::write(
        &path,
        "
[condensate]
mass = 1.0
coupling = 1.0
density = 1.0
impurity_coupling = 0.1
hbar = 1.0
particle_number = 1000
box_length = 10.0

[trajectory]
kind = \"exponential_decay\"
zeta0 = 1.0
gamma0 = 1.0

[window]
start = 0.0
end = 2.0

[grid]
k_min = 0.1
k_max = 1.0

[depletion]
k_max = 4.0
time = 2.0
",
    )
    .unwrap();
    let out = run_with(&path, "depletion", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = &rows(&out)[0];
    let leading = 8.0 / 3.0 * (1.0 / (4.0 * PI).powi(3) / PI).sqrt();
    assert!((num(&r[0]) / leading - 1.0).abs() < 1e-12);
    assert!(num(&r[1]) > 0.0);
    assert_eq!(r[6], "1000");
}

#[test]
fn validate_passes_and_notices_a_bad_bessel() {
    let ok = bogolon(&["validate", "--samples", "200000"]);
    let report = String::from_utf8_lossy(&ok.stdout).to_string();
    assert_eq!(ok.status.code(), Some(0), "{report}");
    assert!(report.contains("regulator_dependence,INFO"));
    let bad = bogolon(&["validate", "--samples", "200000", "--perturb-k1", "1e-6"]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("bessel_k1_integral,FAIL"));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("bessel_k1_integral"));
}
