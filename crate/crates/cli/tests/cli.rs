//! End-to-end tests of the command-line surface: exit codes, artifact round
//! trips, and byte-identical reruns.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_selfsim"))
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> TempDir {
        let dir = std::env::temp_dir().join(format!("selfsim-cli-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        TempDir(dir)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn write_middle_thirds(path: &Path) {
    fs::write(
        path,
        r#"{"maps": [{"ratio": "1/3", "translation": "0"},
                     {"ratio": "1/3", "translation": "2/3"}]}"#,
    )
    .unwrap();
}

fn write_quarter(path: &Path) {
    fs::write(
        path,
        "[[maps]]\nratio = \"1/4\"\ntranslation = \"0\"\n\n[[maps]]\nratio = \"1/4\"\ntranslation = \"3/4\"\n",
    )
    .unwrap();
}

#[test]
fn certify_and_verify_round_trip() {
    let dir = TempDir::new("certify");
    let x = dir.path("x.json");
    let y = dir.path("y.toml");
    let cert = dir.path("cert.json");
    write_middle_thirds(&x);
    write_quarter(&y);

    let status = bin()
        .args(["certify", "--x"])
        .arg(&x)
        .arg("--y")
        .arg(&y)
        .args(["--max-depth", "30", "--out"])
        .arg(&cert)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0), "emptiness should certify");
    assert!(cert.exists());

    let status = bin().arg("verify").arg(&cert).status().unwrap();
    assert_eq!(status.code(), Some(0), "certificate should replay");

    // cross-check against the original config files too
    let status = bin()
        .arg("verify")
        .arg(&cert)
        .arg("--x")
        .arg(&x)
        .arg("--y")
        .arg(&y)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    // a tampered certificate is refuted with exit 3: removing a leaf
    // breaks the exact tiling check
    let mut value: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    let leaves = value["branches"][0]["leaves"].as_array_mut().unwrap();
    leaves.pop();
    let bad = dir.path("bad.json");
    fs::write(&bad, serde_json::to_string_pretty(&value).unwrap()).unwrap();
    let status = bin().arg("verify").arg(&bad).status().unwrap();
    assert_eq!(status.code(), Some(3), "tampered certificate must be refuted");
}

#[test]
fn self_embedding_yields_unknown_with_survivors() {
    let dir = TempDir::new("unknown");
    let x = dir.path("x.json");
    let out = dir.path("survivors.json");
    write_middle_thirds(&x);

    let status = bin()
        .arg("certify")
        .arg("--x")
        .arg(&x)
        .arg("--y")
        .arg(&x)
        .args(["--max-depth", "12", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2), "self-embedding instance stays unknown");
    let dump: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(dump["outcome"], "unknown");
    let cells = dump["survivors"]["cells"].as_array().unwrap();
    assert!(!cells.is_empty());
    // the cell containing the identity (1, 0) appears among the survivors
    let contains_identity = cells.iter().any(|entry| {
        let cell = &entry[1];
        let level = cell["level"].as_u64().unwrap() as u32;
        let ka = cell["ka"].as_i64().unwrap();
        let kb = cell["kb"].as_i64().unwrap();
        let scale = 1i64 << level;
        ka <= scale && scale <= ka + 1 && kb <= 0 && 0 <= kb + 1
    });
    assert!(contains_identity, "no surviving cell contains (1, 0)");
}

#[test]
fn malformed_config_exits_64() {
    let dir = TempDir::new("badcfg");
    let x = dir.path("x.json");
    let out = dir.path("out.json");
    fs::write(
        &x,
        r#"{"maps": [{"ratio": "1/0", "translation": "0"},
                     {"ratio": "1/3", "translation": "2/3"}]}"#,
    )
    .unwrap();
    let status = bin()
        .arg("certify")
        .arg("--x")
        .arg(&x)
        .arg("--y")
        .arg(&x)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(64));
}

#[test]
fn outputs_are_byte_identical_across_reruns() {
    let dir = TempDir::new("determinism");
    let a = dir.path("a.json");
    let b = dir.path("b.json");
    // different worker counts must not change a single byte
    for (out, jobs) in [(&a, "1"), (&b, "4")] {
        let status = bin()
            .args([
                "--jobs",
                jobs,
                "dioph",
                "--gammas",
                "log:2,log:3",
                "--c",
                "2",
                "--n-max",
                "60",
                "--mode",
                "D",
                "--out",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "reruns must be byte-identical");

    // seeded orbit artifacts embed their seed and reproduce exactly
    let c = dir.path("c.json");
    let d = dir.path("d.json");
    for out in [&c, &d] {
        let status = bin()
            .args([
                "multirot",
                "--alpha",
                "1/3",
                "--betas",
                "1/2",
                "--choices",
                "seeded:7",
                "--n",
                "64",
                "--out",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let text = fs::read_to_string(&c).unwrap();
    assert_eq!(text, fs::read_to_string(&d).unwrap());
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["meta"]["seed"], 7);
    assert_eq!(value["meta"]["precision"], 64);
}

#[test]
fn precision_overrides_are_recorded() {
    // environment variable
    let out = bin()
        .env("SELFSIM_PRECISION", "96")
        .args(["rank", "--ratios", "1/2,1/3"])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["meta"]["precision"], 96);

    // flag beats the environment
    let out = bin()
        .env("SELFSIM_PRECISION", "96")
        .args(["--precision", "128", "rank", "--ratios", "1/2,1/3"])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["meta"]["precision"], 128);
}

#[test]
fn rank_span_and_dioph_wrappers() {
    let out = bin().args(["rank", "--ratios", "1/3,1/4,1/5"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rank"], 3);

    let out = bin().args(["span", "--target", "1/12", "--basis", "1/2,1/3"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["in_span"], true);
    assert_eq!(v["coefficients"][0], "2");
    assert_eq!(v["coefficients"][1], "1");

    let out = bin()
        .args(["dioph", "--gammas", "log:2,log:4", "--c", "1", "--n-max", "8", "--mode", "D"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["violations"][0], 2);
}

#[test]
fn renorm_trajectory_has_constant_theta() {
    let dir = TempDir::new("renorm");
    let x = dir.path("x.json");
    let csv = dir.path("traj.csv");
    let out = dir.path("traj.json");
    write_middle_thirds(&x);
    let status = bin()
        .arg("renorm")
        .arg("--x")
        .arg(&x)
        .arg("--y")
        .arg(&x)
        .args(["--f", "1/3,0", "--stream", "constant:0", "--n-start", "6", "--n-end", "16"])
        .arg("--csv")
        .arg(&csv)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# selfsim "), "CSV must carry the meta header");
    let mut data_rows = 0;
    for line in text.lines().skip(2) {
        let theta: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(theta.fract(), 0.0, "theta column must be integral");
        data_rows += 1;
    }
    assert!(data_rows >= 8);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["nesting_ok"], true);
    assert_eq!(v["floor_ok"], true);
}

#[test]
fn cpstep_trajectory_is_seed_reproducible() {
    let dir = TempDir::new("cpstep");
    let atoms = dir.path("atoms.csv");
    fs::write(&atoms, "1/10,1/2\n9/10,1/2\n").unwrap();
    let j1 = dir.path("t1.jsonl");
    let j2 = dir.path("t2.jsonl");
    for out in [&j1, &j2] {
        let status = bin()
            .arg("cpstep")
            .arg("--atoms")
            .arg(&atoms)
            .args(["--level", "1", "--steps", "20", "--seed", "9"])
            .arg("--jsonl")
            .arg(out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let t1 = fs::read_to_string(&j1).unwrap();
    assert_eq!(t1, fs::read_to_string(&j2).unwrap());
    // one meta line plus twenty steps
    assert_eq!(t1.lines().count(), 21);
    assert!(t1.lines().next().unwrap().contains("\"meta\""));
}

#[test]
fn boxdim_on_a_point_file() {
    let dir = TempDir::new("boxdim");
    let pts = dir.path("points.txt");
    let mut text = String::new();
    for k in 0..1024 {
        text.push_str(&format!("{k}/1024\n"));
    }
    fs::write(&pts, text).unwrap();
    let out = bin()
        .arg("boxdim")
        .arg("--points")
        .arg(&pts)
        .args(["--scales", "1/8,1/16,1/32,1/64"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let slope = v["slope"].as_f64().unwrap();
    assert!(slope > 0.9 && slope < 1.1, "grid slope {slope}");
}
