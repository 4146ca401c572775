//! End-to-end runs of the `spinorbit` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use spinorbit::design::pgm::Pgm;
use spinorbit::tomography::TomographyResult;
use tempfile::TempDir;

fn spinorbit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinorbit"))
        .args(args)
        .env_remove("SPINORBIT_OUT")
        .output()
        .unwrap()
}

fn run_in(dir: &Path, name: &str, args: &[&str]) -> (Output, PathBuf) {
    let out = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out", out.to_str().unwrap()]);
    (spinorbit(&full), out)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Value of `key=` in whitespace-separated `key=value` output.
fn field(text: &str, key: &str) -> String {
    let prefix = format!("{key}=");
    text.split_whitespace()
        .find_map(|w| w.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in {text:?}"))
        .to_string()
}

fn num(text: &str, key: &str) -> f64 {
    field(text, key).parse().unwrap()
}

fn read_pgm(path: &Path) -> Pgm {
    Pgm::read(std::io::BufReader::new(fs::File::open(path).unwrap())).unwrap()
}

#[test]
fn noiseless_bell_is_near_perfect() {
    let dir = TempDir::new().unwrap();
    for target in ["psi+", "psi-", "phi+", "phi-"] {
        let (o, out) = run_in(
            dir.path(),
            target,
            &["bell", "--target", target, "--noise", "none"],
        );
        assert!(o.status.success(), "{}", stderr(&o));
        let s = stdout(&o);
        assert_eq!(field(&s, "target"), target);
        assert!(num(&s, "fidelity") >= 0.999);
        assert_eq!(field(&s, "converged"), "true");
        for f in ["counts.csv", "result.json", "summary.txt", "manifest.conf"] {
            assert!(out.join(f).exists(), "{f}");
        }
    }
}

#[test]
fn phi_minus_trials_clear_the_reported_fidelity() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run_in(
        dir.path(),
        "t",
        &[
            "bell", "--target", "phi-", "--counts", "1000", "--noise", "poisson", "--trials",
            "100", "--seed", "7",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(num(&s, "median") >= 0.9591, "{s}");
    assert!(num(&s, "min") <= num(&s, "median") && num(&s, "median") <= num(&s, "max"));
    let trials = fs::read_to_string(out.join("trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 101);
    // Derived seeds are base + i.
    assert!(trials.lines().nth(1).unwrap().starts_with("0,7,"));
    assert!(trials.lines().nth(100).unwrap().starts_with("99,106,"));
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = TempDir::new().unwrap();
    let args = ["bell", "--target", "psi-", "--seed", "11", "--trials", "4"];
    let (a, pa) = run_in(dir.path(), "a", &args);
    let (b, pb) = run_in(dir.path(), "b", &args);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    for f in ["counts.csv", "result.json", "summary.txt", "trials.csv"] {
        assert_eq!(
            fs::read(pa.join(f)).unwrap(),
            fs::read(pb.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn manifest_replays_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let (o, first) = run_in(
        dir.path(),
        "first",
        &["bell", "--target", "phi+", "--seed", "3", "--eta", "0.5"],
    );
    assert!(o.status.success());
    let manifest = first.join("manifest.conf");
    let text = fs::read_to_string(&manifest).unwrap();
    assert!(text.starts_with("command = bell\n"));
    assert!(text.contains("eta = 0.5\n") && text.contains("noise = poisson\n"));

    let (o, second) = run_in(
        dir.path(),
        "second",
        &["bell", "--config", manifest.to_str().unwrap()],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["counts.csv", "result.json", "summary.txt"] {
        assert_eq!(
            fs::read(first.join(f)).unwrap(),
            fs::read(second.join(f)).unwrap(),
            "{f}"
        );
    }

    let (o, d1) = run_in(
        dir.path(),
        "d1",
        &["design", "--grid", "128", "--kind", "ideal"],
    );
    assert!(o.status.success());
    let m = d1.join("manifest.conf");
    let (o, d2) = run_in(
        dir.path(),
        "d2",
        &["design", "--config", m.to_str().unwrap()],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    for f in [
        "layout.csv",
        "mask_sigma_plus.pgm",
        "mask_sigma_minus.pgm",
        "farfield.pgm",
        "spectrum.json",
    ] {
        assert_eq!(
            fs::read(d1.join(f)).unwrap(),
            fs::read(d2.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn tomo_methods_agree_on_noiseless_counts() {
    let dir = TempDir::new().unwrap();
    let (o, bell) = run_in(
        dir.path(),
        "bell",
        &[
            "bell", "--target", "psi+", "--noise", "none", "--counts", "1000000",
        ],
    );
    assert!(o.status.success());
    let csv = bell.join("counts.csv");
    let (o, out) = run_in(
        dir.path(),
        "tomo",
        &[
            "tomo",
            "--counts-file",
            csv.to_str().unwrap(),
            "--target",
            "psi+",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(num(&stdout(&o), "trace_distance") <= 1e-6);
    let mle =
        TomographyResult::from_json(&fs::read_to_string(out.join("mle.json")).unwrap()).unwrap();
    assert!(mle.converged);
    assert!(mle.fidelity_vs_target.unwrap() >= 0.999);
    assert!(out.join("linear.json").exists());
}

fn counts_with(dir: &Path, tag: &str, edit: impl Fn(usize, &str) -> Option<String>) -> PathBuf {
    let (o, bell) = run_in(dir, &format!("source_{tag}"), &["bell", "--noise", "none"]);
    assert!(o.status.success());
    let text = fs::read_to_string(bell.join("counts.csv")).unwrap();
    let mut lines = text.lines();
    let mut out = vec![lines.next().unwrap().to_string()];
    for (i, line) in lines.enumerate() {
        if let Some(l) = edit(i, line) {
            out.push(l);
        }
    }
    let path = dir.join(format!("{tag}.csv"));
    fs::write(&path, out.join("\n") + "\n").unwrap();
    path
}

#[test]
fn flat_counts_reconstruct_the_mixed_state() {
    let dir = TempDir::new().unwrap();
    let csv = counts_with(dir.path(), "flat", |i, line| {
        let cols: Vec<&str> = line.split(',').collect();
        let counts = if i == 0 { "1000" } else { "250" };
        Some(format!("{},{},{},{}", cols[0], cols[1], counts, cols[3]))
    });
    let (o, out) = run_in(
        dir.path(),
        "tomo",
        &[
            "tomo",
            "--counts-file",
            csv.to_str().unwrap(),
            "--target",
            "phi+",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let mle =
        TomographyResult::from_json(&fs::read_to_string(out.join("mle.json")).unwrap()).unwrap();
    assert!((mle.fidelity_vs_target.unwrap() - 0.5).abs() < 1e-3);
    let m = mle.rho.matrix();
    for i in 0..4 {
        for j in 0..4 {
            let expected = if i == j { 0.25 } else { 0.0 };
            assert!((m[(i, j)].re - expected).abs() < 1e-3 && m[(i, j)].im.abs() < 1e-3);
        }
    }
}

#[test]
fn tomo_rejects_incomplete_or_malformed_files() {
    let dir = TempDir::new().unwrap();
    let missing = counts_with(dir.path(), "missing", |i, line| {
        (i != 0).then(|| line.to_string())
    });
    let (o, _) = run_in(
        dir.path(),
        "a",
        &["tomo", "--counts-file", missing.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("setting 0"), "{}", stderr(&o));

    let garbled = counts_with(dir.path(), "garbled", |i, line| {
        Some(if i == 5 {
            line.replacen(",10", ",ten", 1)
        } else {
            line.to_string()
        })
    });
    let (o, _) = run_in(
        dir.path(),
        "b",
        &["tomo", "--counts-file", garbled.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("row"), "{}", stderr(&o));

    let (o, _) = run_in(
        dir.path(),
        "c",
        &["tomo", "--counts-file", "/nonexistent/counts.csv"],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exhausted_budget_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let (o, _) = run_in(dir.path(), "bell", &["bell", "--max-evals", "2"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    let (o, bell) = run_in(dir.path(), "ok", &["bell"]);
    assert!(o.status.success());
    let csv = bell.join("counts.csv");
    let (o, _) = run_in(
        dir.path(),
        "tomo",
        &[
            "tomo",
            "--counts-file",
            csv.to_str().unwrap(),
            "--max-evals",
            "2",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn invalid_arguments_exit_with_two() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["bell", "--target", "chi+"][..],
        &["bell", "--counts", "0"],
        &["bell", "--eta", "1.5"],
        &["bell", "--trials", "0"],
        &["bell", "--no-such-flag"],
        &["design", "--rod-pitch-nm", "800"],
        &["design", "--grid", "63"],
        &["farfield"],
    ] {
        let (o, out) = run_in(dir.path(), "x", args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!out.exists(), "{args:?} wrote output");
    }
    let (o, _) = run_in(dir.path(), "x", &["bell", "--counts", "0"]);
    assert!(stderr(&o).contains("--counts"));
}

#[test]
fn config_files_are_checked() {
    let dir = TempDir::new().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(
        &conf,
        "# comment\ncommand = bell\ntarget = phi+\nseed = 5\n",
    )
    .unwrap();
    let (o, out) = run_in(
        dir.path(),
        "a",
        &["bell", "--config", conf.to_str().unwrap(), "--seed", "6"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(field(&stdout(&o), "target"), "phi+");
    assert!(fs::read_to_string(out.join("manifest.conf"))
        .unwrap()
        .contains("seed = 6\n"));

    fs::write(&conf, "command = bell\ntarrget = phi+\n").unwrap();
    let (o, _) = run_in(
        dir.path(),
        "b",
        &["bell", "--config", conf.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("tarrget"));

    fs::write(&conf, "command = design\n").unwrap();
    let (o, _) = run_in(
        dir.path(),
        "c",
        &["bell", "--config", conf.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn outputs_are_not_overwritten_without_force() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run_in(dir.path(), "a", &["bell", "--seed", "1"]);
    assert!(o.status.success());
    let before = fs::read(out.join("counts.csv")).unwrap();
    let (o, _) = run_in(dir.path(), "a", &["bell", "--seed", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(fs::read(out.join("counts.csv")).unwrap(), before);
    let (o, _) = run_in(dir.path(), "a", &["bell", "--seed", "2", "--force"]);
    assert!(o.status.success());
    assert_ne!(fs::read(out.join("counts.csv")).unwrap(), before);
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("from_env");
    let o = Command::new(env!("CARGO_BIN_EXE_spinorbit"))
        .args(["bell", "--noise", "none"])
        .env("SPINORBIT_OUT", &target)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(target.join("counts.csv").exists());
}

#[test]
fn design_winding_one_is_a_clean_vortex() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run_in(
        dir.path(),
        "d",
        &["design", "--winding", "1", "--grid", "256"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert_eq!(field(&s, "dominant_l").parse::<i32>().unwrap().abs(), 1);
    assert!(num(&s, "power") >= 0.95);
    assert!(num(&s, "on_axis_ratio") < 1e-3);

    let spectrum: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("spectrum.json")).unwrap()).unwrap();
    let obj = spectrum.as_object().unwrap();
    assert_eq!(obj.len(), 9);
    let best = obj
        .values()
        .map(|v| v.as_f64().unwrap())
        .fold(0.0, f64::max);
    assert!(best >= 0.95);

    let layout = fs::read_to_string(out.join("layout.csv")).unwrap();
    assert_eq!(layout.lines().next().unwrap(), "x_nm,y_nm,angle_mrad");
    assert_eq!(layout.lines().count(), 105_624 + 1);

    let mask = out.join("mask_sigma_plus.pgm");
    let (o, ff) = run_in(
        dir.path(),
        "ff",
        &["farfield", "--mask", mask.to_str().unwrap()],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(num(&stdout(&o), "on_axis_ratio") < 1e-3);
    assert!(ff.join("farfield.pgm").exists() && ff.join("farfield.json").exists());
}

#[test]
fn design_winding_zero_is_flat() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run_in(
        dir.path(),
        "d",
        &["design", "--winding", "0", "--grid", "128"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert_eq!(field(&s, "dominant_l"), "0");
    assert!((num(&s, "on_axis_ratio") - 1.0).abs() < 1e-12);
    let far = read_pgm(&out.join("farfield.pgm"));
    assert_eq!(far.data.iter().copied().max(), Some(65535));
}

#[test]
fn opposite_windings_negate_the_masks() {
    let dir = TempDir::new().unwrap();
    let (a, pa) = run_in(
        dir.path(),
        "pos",
        &["design", "--winding", "1", "--grid", "128"],
    );
    let (b, pb) = run_in(
        dir.path(),
        "neg",
        &["design", "--winding", "-1", "--grid", "128"],
    );
    assert!(a.status.success() && b.status.success(), "{}", stderr(&b));
    for name in ["mask_sigma_plus.pgm", "mask_sigma_minus.pgm"] {
        let (x, y) = (read_pgm(&pa.join(name)), read_pgm(&pb.join(name)));
        assert_eq!(x.data.len(), y.data.len());
        for (&u, &v) in x.data.iter().zip(&y.data) {
            // Codes sum to zero mod 2^16 up to one step of rounding.
            let sum = (u as u32 + v as u32) % 65536;
            assert!(sum <= 1 || sum == 65535, "{u} + {v}");
        }
    }
}

#[test]
fn garbage_mask_files_are_rejected() {
    let dir = TempDir::new().unwrap();
    let mask = dir.path().join("junk.pgm");
    fs::write(&mask, b"P2\n1 1\n255\n0\n").unwrap();
    fs::write(dir.path().join("junk.json"), "{}").unwrap();
    let (o, _) = run_in(
        dir.path(),
        "f",
        &["farfield", "--mask", mask.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(2));
}
