use std::path::Path;
use std::process::{Command, Output};

use ffp::analysis::recovery_error;
use ffp::dataio::{read_json, read_matrix, read_pgm, write_matrix, write_pgm, GrayFrame};
use ffp::DenseMatrix;
use serde_json::Value;

fn ffp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffp")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn synth(dir: &Path, seed: &str) {
    let out = ffp(&[
        "synth",
        "--d",
        "200",
        "--n",
        "200",
        "--rank",
        "5",
        "--fraction",
        "0.05",
        "--seed",
        seed,
        "--out",
        p(dir),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn synth_writes_three_matrices_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    synth(&a, "7");
    synth(&b, "7");
    for name in ["X.ffpm", "L_star.ffpm", "S_star.ffpm"] {
        let bytes = std::fs::read(a.join(name)).unwrap();
        assert_eq!(bytes, std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    let manifest: Value = read_json(a.join("manifest.json")).unwrap();
    assert_eq!(manifest["command"], "synth");
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 3);
    assert_eq!(read_matrix(a.join("X.ffpm")).unwrap().shape(), (200, 200));

    let bad = ffp(&["synth", "--d", "200", "--n", "200", "--rank", "500", "--out", p(&tmp.path().join("c"))]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn decompose_recovers_the_synthetic_problem() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data, "7");
    let x = data.join("X.ffpm");
    let truth = data.join("L_star.ffpm");

    let out_dir = tmp.path().join("fffp");
    let out = ffp(&[
        "decompose",
        "--input",
        p(&x),
        "--method",
        "fffp",
        "--k",
        "5",
        "--truth",
        p(&truth),
        "--out",
        p(&out_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = read_json(out_dir.join("report.json")).unwrap();
    assert_eq!(report["method"], "fffp");
    assert_eq!(report["final_rank"], 5);
    assert!(report["metrics"]["recovery_error"].as_f64().unwrap() <= 1e-3);
    assert_eq!(report["config"]["rho0"], 1e-4);
    let u = read_matrix(out_dir.join("U.ffpm")).unwrap();
    let c = read_matrix(out_dir.join("C.ffpm")).unwrap();
    let v = read_matrix(out_dir.join("V.ffpm")).unwrap();
    let l = u.matmul(&c).unwrap().matmul(&v.transpose()).unwrap();
    assert!(recovery_error(&l, &read_matrix(&truth).unwrap()).unwrap() <= 1e-3);
    assert!(out_dir.join("S.ffpm").exists() && out_dir.join("manifest.json").exists());

    let sweep_dir = tmp.path().join("uffp");
    let out = ffp(&[
        "decompose",
        "--input",
        p(&x),
        "--method",
        "uffp",
        "--k",
        "25",
        "--lambda-sweep",
        "--out",
        p(&sweep_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = read_json(sweep_dir.join("report.json")).unwrap();
    assert_eq!(report["final_rank"], 5);
    assert_eq!(report["metrics"]["rank_l"], 5);
    let sweep = &report["lambda_sweep"];
    let chosen = &sweep["entries"][sweep["selected"].as_u64().unwrap() as usize];
    assert_eq!(chosen["lambda"], report["lambda"]);

    let ialm_dir = tmp.path().join("ialm");
    let out = ffp(&["decompose", "--input", p(&x), "--method", "ialm", "--out", p(&ialm_dir)]);
    assert_eq!(code(&out), 0);
    let report: Value = read_json(ialm_dir.join("report.json")).unwrap();
    assert!(report["final_rank"].as_u64().unwrap() >= 5);
    assert!((report["lambda"].as_f64().unwrap() - 1.0 / 200f64.sqrt()).abs() < 1e-15);
    assert!(ialm_dir.join("L.ffpm").exists());

    let out =
        ffp(&["decompose", "--input", p(&x), "--method", "uffp", "--k", "25", "--out", p(&tmp.path().join("bad"))]);
    assert_eq!(code(&out), 2);
}

#[test]
fn iteration_cap_exits_3_but_writes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data, "3");
    let out_dir = tmp.path().join("out");
    let out =
        ffp(&["decompose", "--input", p(&data.join("X.ffpm")), "--k", "5", "--max-iter", "3", "--out", p(&out_dir)]);
    assert_eq!(code(&out), 3);
    let report: Value = read_json(out_dir.join("report.json")).unwrap();
    assert_eq!(report["iterations"], 3);
    assert_eq!(report["converged"], false);
}

#[test]
fn csv_input_and_bad_files() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("m.csv");
    let m = DenseMatrix::from_fn(6, 5, |i, j| (i + 1) as f64 * (j + 1) as f64).unwrap();
    write_matrix(&csv, &m).unwrap();
    let out = ffp(&["decompose", "--input", p(&csv), "--k", "1", "--out", p(&tmp.path().join("o"))]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let junk = tmp.path().join("junk.ffpm");
    std::fs::write(&junk, b"FFPX").unwrap();
    let out = ffp(&["decompose", "--input", p(&junk), "--k", "1", "--out", p(&tmp.path().join("o2"))]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte 0"));
}

fn frame(fill: u8, block: bool) -> GrayFrame {
    let (h, w) = (12, 16);
    let mut pixels = vec![0u8; h * w];
    for r in 0..h {
        for c in 0..w {
            pixels[r * w + c] = fill.wrapping_add((r * 5 + c * 3) as u8);
            if block && (3..6).contains(&r) && (4..8).contains(&c) {
                pixels[r * w + c] = 250;
            }
        }
    }
    GrayFrame { height: h, width: w, pixels }
}

#[test]
fn background_of_a_static_scene() {
    let tmp = tempfile::tempdir().unwrap();
    let frames = tmp.path().join("frames");
    std::fs::create_dir(&frames).unwrap();
    for i in 0..10 {
        write_pgm(frames.join(format!("f{i:02}.pgm")), &frame(40, false)).unwrap();
    }
    let out_dir = tmp.path().join("out");
    let out = ffp(&["background", "--frames", p(&frames), "--k", "1", "--out", p(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for i in 0..10 {
        let name = format!("f{i:02}.pgm");
        assert_eq!(read_pgm(out_dir.join("background").join(&name)).unwrap(), frame(40, false));
        let fg = read_pgm(out_dir.join("foreground").join(&name)).unwrap();
        assert!(fg.pixels.iter().all(|&v| v == 0), "{name}");
    }

    // one frame gains a bright block; only its foreground shows it
    write_pgm(frames.join("f05.pgm"), &frame(40, true)).unwrap();
    let out_dir = tmp.path().join("out2");
    let out = ffp(&["background", "--frames", p(&frames), "--k", "1", "--out", p(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for i in 0..10 {
        let fg = read_pgm(out_dir.join("foreground").join(format!("f{i:02}.pgm"))).unwrap();
        let block_energy: u32 =
            (3..6).flat_map(|r| (4..8).map(move |c| (r, c))).map(|(r, c)| u32::from(fg.pixels[r * 16 + c])).sum();
        let outside = fg
            .pixels
            .iter()
            .enumerate()
            .filter(|(idx, _)| !((3..6).contains(&(idx / 16)) && (4..8).contains(&(idx % 16))))
            .map(|(_, &v)| u32::from(v))
            .max()
            .unwrap();
        if i == 5 {
            assert!(block_energy > 12 * 100, "block energy {block_energy}");
        } else {
            assert!(block_energy < 12 * 5, "frame {i}: block energy {block_energy}");
        }
        assert!(outside <= 2, "frame {i}: stray foreground {outside}");
    }

    let empty = tmp.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let out = ffp(&["background", "--frames", p(&empty), "--k", "1", "--out", p(&tmp.path().join("out3"))]);
    assert_eq!(code(&out), 2);
}

#[test]
fn anomaly_flags_planted_outliers() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let out = ffp(&["synth", "--d", "64", "--n", "200", "--outliers", "10", "--seed", "4", "--out", p(&data)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let planted: Vec<usize> = read_json(data.join("outliers.json")).unwrap();

    let out_dir = tmp.path().join("out");
    let out = ffp(&["anomaly", "--input", p(&data.join("X.ffpm")), "--top-m", "10", "--out", p(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let flagged: Value = read_json(out_dir.join("flagged.json")).unwrap();
    let flagged: Vec<usize> = serde_json::from_value(flagged["flagged"].clone()).unwrap();
    assert_eq!(flagged, planted);
    let scores = std::fs::read_to_string(out_dir.join("scores.csv")).unwrap();
    assert_eq!(scores.lines().count(), 201);

    // exactly rank one: S vanishes and nothing is flagged
    let rank_one = DenseMatrix::from_fn(20, 30, |i, j| (i + 1) as f64 * (1.0 + j as f64 / 10.0)).unwrap();
    let x = tmp.path().join("r1.ffpm");
    write_matrix(&x, &rank_one).unwrap();
    let out_dir = tmp.path().join("out2");
    let out = ffp(&["anomaly", "--input", p(&x), "--top-m", "5", "--out", p(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let flagged: Value = read_json(out_dir.join("flagged.json")).unwrap();
    assert_eq!(flagged["flagged"].as_array().unwrap().len(), 0);

    let out_dir = tmp.path().join("out3");
    let out = ffp(&["anomaly", "--input", p(&x), "--threshold", "5", "--out", p(&out_dir)]);
    assert_eq!(code(&out), 0);
}

#[test]
fn bench_writes_a_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("one");
    let out = ffp(&[
        "bench",
        "--factors",
        "1.0",
        "--d",
        "60",
        "--n",
        "60",
        "--iters",
        "5",
        "--repeats",
        "1",
        "--out",
        p(&out_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("bench.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("factor,rows,cols,size,seconds"));

    let out_dir = tmp.path().join("two");
    let out = ffp(&[
        "bench",
        "--axis",
        "dimension",
        "--factors",
        "0.5,1",
        "--d",
        "60",
        "--n",
        "60",
        "--iters",
        "5",
        "--repeats",
        "1",
        "--out",
        p(&out_dir),
    ]);
    assert_eq!(code(&out), 0);
    let fit: Value = read_json(out_dir.join("fit.json")).unwrap();
    assert_eq!(fit["axis"], "dimension");

    let out = ffp(&["bench", "--factors", "1,0.5", "--out", p(&tmp.path().join("bad"))]);
    assert_eq!(code(&out), 2);
}
