//! End-to-end tests of the `specedge` binary: exit codes, artifact layout,
//! preset fidelity, and byte-level reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn specedge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specedge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

/// Parse the edge section of samples.csv / edges.csv.
fn parse_edges(text: &str) -> Vec<(f64, f64)> {
    text.lines()
        .skip_while(|l| !l.starts_with("location,"))
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| {
            let mut it = l.split(',');
            (
                it.next().unwrap().parse().unwrap(),
                it.next().unwrap().parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn detect_writes_all_artifacts_and_finds_the_sawtooth_edge() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let config = dir.path().join("exp.conf");
    fs::write(
        &config,
        "signal = sawtooth\nn_modes = 128\neta = 0\nseed = 5\n",
    )
    .unwrap();

    let out = specedge(&[
        "detect",
        "--config",
        config.to_str().unwrap(),
        "--out_dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    for artifact in [
        "coefficients.csv",
        "factor.csv",
        "samples.csv",
        "edges.csv",
        "manifest.txt",
    ] {
        assert!(out_dir.join(artifact).exists(), "missing {artifact}");
    }

    let edges = parse_edges(&read(&out_dir.join("edges.csv")));
    assert_eq!(edges.len(), 1, "edges: {edges:?}");
    let n = 128.0f64;
    let tol = 5.0 * n.ln() / n;
    assert!(edges[0].0.abs() <= 2.0 * std::f64::consts::TAU / 1024.0);
    assert!((edges[0].1 - 1.0).abs() <= tol);

    let manifest = read(&out_dir.join("manifest.txt"));
    for key in ["signal", "n_modes", "eta", "seed", "beta", "grid_size", "c_abs", "c_rel"] {
        assert!(
            manifest.lines().any(|l| l.starts_with(&format!("{key} ="))),
            "manifest missing {key}"
        );
    }
}

#[test]
fn fig3_preset_factor_matches_its_band_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = specedge(&[
        "factors",
        "--preset",
        "fig3-case1",
        "--out_dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let eta = 2e-5f64;
    let beta = std::f64::consts::PI * eta.powf(-1.0 / 6.0);
    let k0 = 8.0 * std::f64::consts::PI;
    let text = read(&dir.path().join("factor.csv"));
    let mut checked = 0;
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.starts_with('k')) {
        let mut it = line.split(',');
        let k: usize = it.next().unwrap().parse().unwrap();
        let s: f64 = it.next().unwrap().parse().unwrap();
        let expect = 0.3985 * (k as f64 - k0).max(0.0) / (1.0 + eta * (beta * k as f64).powi(2));
        if expect > 0.0 {
            assert!(
                (s - expect).abs() <= 0.01 * expect,
                "k = {k}: {s} vs {expect}"
            );
            checked += 1;
        } else {
            assert_eq!(s, 0.0, "k = {k}");
        }
    }
    assert!(checked > 900);
}

#[test]
fn malformed_configs_exit_2_naming_the_precondition() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    fs::write(
        &config,
        "factor = truncated\neta = 1e-4\nn_modes = 100\nk0 = 80\nn0 = 50\n",
    )
    .unwrap();
    let out = specedge(&["detect", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 1, "single-line error: {err}");
    assert!(err.contains("k0 < N0"), "names the precondition: {err}");
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    fs::write(&config, "n_modes = 64\nmystery_knob = 3\n").unwrap();
    let out = specedge(&["detect", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mystery_knob"));
}

#[test]
fn empty_sweep_value_list_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = specedge(&[
        "sweep",
        "--preset",
        "fig1",
        "--param",
        "eta",
        "--values",
        "",
        "--out_dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fig1_sweep_reproduces_the_root_ten_plateau_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let out = specedge(&[
        "sweep",
        "--preset",
        "fig1",
        "--param",
        "eta",
        "--values",
        "1e-3,1e-4",
        "--out_dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let summary = read(&dir.path().join("summary.csv"));
    let rows: Vec<Vec<f64>> = summary
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("value"))
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    let ratio = rows[0][2] / rows[1][2]; // plateau_max column
    let target = 10.0f64.sqrt();
    assert!(
        (ratio - target).abs() <= 0.35 * target,
        "plateau ratio {ratio} vs sqrt(10)"
    );
    assert!(dir.path().join("sub_eta_1e-3").join("samples.csv").exists());
}

#[test]
fn noise_free_n_sweep_plateau_decays() {
    let dir = tempfile::tempdir().unwrap();
    let out = specedge(&[
        "sweep",
        "--n_modes",
        "64",
        "--param",
        "N",
        "--values",
        "64,128,256,512",
        "--out_dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read(&dir.path().join("summary.csv"));
    let plateaus: Vec<f64> = summary
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("value"))
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(plateaus.len(), 4);
    assert!(
        plateaus.windows(2).all(|w| w[1] < w[0]),
        "plateau not decaying: {plateaus:?}"
    );
}

#[test]
fn identical_configs_give_byte_identical_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.conf");
    fs::write(
        &config,
        "signal = custom\njumps = -1.5707963267948966:1.0, 1.5707963267948966:-0.5\n\
         smooth = cos:1:0.4\nn_modes = 200\neta = 1e-4\nadd_noise = true\nseed = 77\n\
         factor = noise_adapted\nbeta = auto\n",
    )
    .unwrap();

    let run = |out: &Path| {
        let o = specedge(&[
            "detect",
            "--config",
            config.to_str().unwrap(),
            "--out_dir",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run(&a);
    run(&b);
    for artifact in ["coefficients.csv", "factor.csv", "samples.csv", "edges.csv"] {
        assert_eq!(
            fs::read(a.join(artifact)).unwrap(),
            fs::read(b.join(artifact)).unwrap(),
            "{artifact} differs"
        );
    }
}

#[test]
fn manifest_reruns_reproduce_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let out = specedge(&[
        "detect",
        "--preset",
        "fig3-case2",
        "--out_dir",
        first.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // strip out_dir so the flag can redirect the rerun
    let manifest_text: String = read(&first.join("manifest.txt"))
        .lines()
        .filter(|l| !l.starts_with("out_dir"))
        .map(|l| format!("{l}\n"))
        .collect();
    let rerun_cfg = dir.path().join("rerun.conf");
    fs::write(&rerun_cfg, manifest_text).unwrap();

    let second = dir.path().join("second");
    let out = specedge(&[
        "detect",
        "--config",
        rerun_cfg.to_str().unwrap(),
        "--out_dir",
        second.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    for artifact in ["coefficients.csv", "factor.csv", "samples.csv", "edges.csv"] {
        assert_eq!(
            fs::read(first.join(artifact)).unwrap(),
            fs::read(second.join(artifact)).unwrap(),
            "{artifact} differs after manifest rerun"
        );
    }
}

#[test]
fn montecarlo_writes_trial_rows_plus_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let out = specedge(&[
        "montecarlo",
        "--preset",
        "fig2",
        "--n_modes",
        "200",
        "--grid_size",
        "1600",
        "--trials",
        "5",
        "--out_dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(&dir.path().join("trials.csv"));
    let data_rows = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("trial"))
        .count();
    assert_eq!(data_rows, 6, "5 trials + aggregate:\n{text}");
    assert!(text.lines().last().unwrap().starts_with("-1,"));
}

#[test]
fn beta_auto_resolves_to_the_policy_value_in_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = specedge(&[
        "detect",
        "--preset",
        "fig2",
        "--n_modes",
        "200",
        "--out_dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let manifest = read(&dir.path().join("manifest.txt"));
    let beta_line = manifest
        .lines()
        .find(|l| l.starts_with("beta ="))
        .expect("beta line");
    let beta: f64 = beta_line.split('=').nth(1).unwrap().trim().parse().unwrap();
    let expect = std::f64::consts::PI * 1e-4f64.powf(-1.0 / 6.0);
    assert!((beta - expect).abs() < 1e-12 * expect);
}
