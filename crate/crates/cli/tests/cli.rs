use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use holo_core::io::{read_hologram_png, save_gray8};
use holo_core::testpattern::shapes;
use holo_core::Grid;

const DESK: [&str; 8] = [
    "--grid",
    "64",
    "--distance",
    "31.25mm",
    "--offset-x",
    "1.28mm",
    "--offset-y",
    "1.28mm",
];

fn holo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holo")).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn desk_image(dir: &Path) -> PathBuf {
    let p = dir.join("target.png");
    save_gray8(&p, &shapes(64).to_gray8()).unwrap();
    p
}

fn run_ok(args: &[&str]) -> Output {
    let out = holo(args);
    assert!(
        out.status.success(),
        "holo {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn with_desk<'a>(head: &[&'a str]) -> Vec<&'a str> {
    head.iter().copied().chain(DESK).collect()
}

#[test]
fn generate_writes_hologram_with_sidecar_pitch() {
    let dir = tempfile::tempdir().unwrap();
    let img = desk_image(dir.path());
    let out = dir.path().join("h.png");
    run_ok(&with_desk(&["generate", path_str(&img), "--out", path_str(&out)]));
    let h = read_hologram_png(&out).unwrap();
    assert_eq!(h.shape(), (64, 64));
    assert_eq!(h.pitch().x, 3.74e-6);
    assert_eq!(h.wavelength(), 532e-9);
}

#[test]
fn gs_with_zero_iterations_matches_random_generate() {
    let dir = tempfile::tempdir().unwrap();
    let img = desk_image(dir.path());
    let a = dir.path().join("gen.png");
    let b = dir.path().join("gs.png");
    run_ok(&with_desk(&["generate", path_str(&img), "--out", path_str(&a), "--init", "random", "--seed", "4"]));
    run_ok(&with_desk(&[
        "gs",
        path_str(&img),
        "--out",
        path_str(&b),
        "--init",
        "random",
        "--seed",
        "4",
        "--iterations",
        "0",
    ]));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let trace = fs::read_to_string(dir.path().join("gs.trace.csv")).unwrap();
    assert_eq!(trace, "iteration,residual\n");
}

#[test]
fn gs_trace_has_one_row_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let img = desk_image(dir.path());
    let out = dir.path().join("h.png");
    let trace = dir.path().join("t.csv");
    run_ok(&with_desk(&[
        "gs",
        path_str(&img),
        "--out",
        path_str(&out),
        "--trace",
        path_str(&trace),
        "--iterations",
        "10",
        "--init",
        "random",
    ]));
    let text = fs::read_to_string(&trace).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "iteration,residual");
    assert_eq!(lines.len(), 11);
    let residual = |l: &str| l.split(',').nth(1).unwrap().parse::<f64>().unwrap();
    assert!(residual(lines[10]) < residual(lines[1]));
}

#[test]
fn reconstruct_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let img = desk_image(dir.path());
    let h = dir.path().join("h.png");
    let r = dir.path().join("r.png");
    run_ok(&with_desk(&["generate", path_str(&img), "--out", path_str(&h), "--encoding", "bleached"]));
    run_ok(&with_desk(&["reconstruct", path_str(&h), "--out", path_str(&r)]));

    let same = run_ok(&["metrics", path_str(&img), path_str(&img)]);
    assert!(String::from_utf8_lossy(&same.stdout).contains("PSNR=inf SSIM=1.000000"));

    let scored = run_ok(&["metrics", path_str(&img), path_str(&r)]);
    let text = String::from_utf8_lossy(&scored.stdout);
    let psnr: f64 = text.split("PSNR=").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    assert!(psnr.is_finite() && psnr > 5.0, "{text}");
}

#[test]
fn metrics_constant_difference() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.png");
    let b = dir.path().join("b.png");
    save_gray8(&a, &Grid::filled(32, 32, 100u8)).unwrap();
    save_gray8(&b, &Grid::filled(32, 32, 116u8)).unwrap();
    let out = run_ok(&["metrics", path_str(&a), path_str(&b)]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("PSNR=24.048"), "{:?}", out);
}

#[test]
fn zoom_sweep_skips_invalid_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let img = desk_image(dir.path());
    let out = dir.path().join("sweep");
    let res = run_ok(&with_desk(&["zoom-sweep", path_str(&img), "--out", path_str(&out), "--ratios", "0.5,2,5"]));
    assert!(String::from_utf8_lossy(&res.stderr).contains("skipping ratio 0.5"));
    let index = fs::read_to_string(out.join("index.csv")).unwrap();
    let lines: Vec<_> = index.lines().collect();
    assert_eq!(lines[0], "ratio,f_i,psnr,ssim");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("2,") && lines[2].starts_with("5,"));
    assert!(out.join("holo_r5.00.png").exists() && out.join("recon_r2.00.png").exists());
}

#[test]
fn goldens_emit_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    run_ok(&["goldens", "--out", path_str(&out), "--seed", "3"]);
    let check = run_ok(&["goldens", "--out", path_str(&out), "--check"]);
    assert!(!String::from_utf8_lossy(&check.stdout).contains("FAILED"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let img = desk_image(dir.path());
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "grid = 32\ndistance = 31.25mm\noffset_x = 1.28mm\noffset_y = 1.28mm\nholo_pitch = 5um\n").unwrap();
    let out = dir.path().join("h.png");
    run_ok(&[
        "generate",
        path_str(&img),
        "--out",
        path_str(&out),
        "--config",
        path_str(&cfg),
        "--grid",
        "64",
    ]);
    let h = read_hologram_png(&out).unwrap();
    assert_eq!(h.shape(), (64, 64));
    assert_eq!(h.pitch().x, 5e-6);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let img = desk_image(dir.path());
    let out = dir.path().join("h.png");
    let code = |args: &[&str]| holo(args).status.code().unwrap();

    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["generate", path_str(&img)]), 1);
    assert_eq!(code(&with_desk(&["generate", path_str(&img), "--out", path_str(&out), "--wavelength", "5 parsecs"])), 1);
    let zero_distance = ["generate", path_str(&img), "--out", path_str(&out), "--grid", "64", "--distance", "0"];
    assert_eq!(code(&zero_distance), 2);
    assert_eq!(code(&with_desk(&["generate", path_str(&img), "--out", path_str(&out), "--image-pitch", "1um"])), 2);
    assert_eq!(code(&with_desk(&["generate", "/nonexistent/x.png", "--out", path_str(&out)])), 3);

    let small = dir.path().join("small.png");
    save_gray8(&small, &Grid::filled(16, 16, 9u8)).unwrap();
    assert_eq!(code(&["metrics", path_str(&img), path_str(&small)]), 2);

    run_ok(&with_desk(&["generate", path_str(&img), "--out", path_str(&out)]));
    fs::remove_file(dir.path().join("h.png.meta")).unwrap();
    assert_eq!(code(&with_desk(&["reconstruct", path_str(&out), "--out", path_str(&dir.path().join("r.png"))])), 3);
}

/// Every command, run twice with the same inputs, writes byte-identical files.
#[test]
fn commands_are_deterministic() {
    let runs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for dir in &runs {
        let d = dir.path();
        let img = desk_image(d);
        let (h, g, r) = (d.join("gen.png"), d.join("gs.png"), d.join("rec.png"));
        run_ok(&with_desk(&["generate", path_str(&img), "--out", path_str(&h), "--init", "random", "--seed", "9"]));
        run_ok(&with_desk(&["gs", path_str(&img), "--out", path_str(&g), "--iterations", "3", "--seed", "9", "--init", "random"]));
        run_ok(&with_desk(&["reconstruct", path_str(&g), "--out", path_str(&r)]));
        let m = run_ok(&["metrics", path_str(&img), path_str(&r)]);
        fs::write(d.join("metrics.txt"), String::from_utf8_lossy(&m.stdout).replace(path_str(d), "")).unwrap();
        run_ok(&with_desk(&["zoom-sweep", path_str(&img), "--out", path_str(&d.join("sweep")), "--ratios", "2..3:0.5"]));
        run_ok(&["goldens", "--out", path_str(&d.join("goldens")), "--seed", "5"]);
    }
    let files = |root: &Path| {
        let mut v = Vec::new();
        let mut stack = vec![root.to_path_buf()];
        while let Some(p) = stack.pop() {
            for e in fs::read_dir(&p).unwrap() {
                let e = e.unwrap().path();
                if e.is_dir() {
                    stack.push(e);
                } else {
                    v.push(e.strip_prefix(root).unwrap().to_path_buf());
                }
            }
        }
        v.sort();
        v
    };
    let (a, b) = (runs[0].path(), runs[1].path());
    assert_eq!(files(a), files(b));
    assert!(files(a).len() > 20);
    for f in files(a) {
        assert!(fs::read(a.join(&f)).unwrap() == fs::read(b.join(&f)).unwrap(), "{f:?} differs");
    }
}
