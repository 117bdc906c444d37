use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const STRIP: &str = "torus 0.6931471805599453 16 64\n+ strip -pi/4 pi/4\n";
const BAND: &str = "torus 0.6931471805599453 16 64\n+ band 0.2 0.5\n";

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torus-pencil")).current_dir(dir).args(args).output().unwrap()
}

fn setup(shape: &str, config: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("d.shape"), shape).unwrap();
    fs::write(dir.path().join("run.cfg"), config).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn domain_classifies_a_strip() {
    let dir = setup(STRIP, "shape d.shape\nout res\n");
    let o = run(dir.path(), &["domain", "run.cfg"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let comps = fs::read_to_string(dir.path().join("res/components.csv")).unwrap();
    assert!(comps.contains("0,256,connected,1,0,false"), "{comps}");
    let mask = fs::read_to_string(dir.path().join("res/mask.csv")).unwrap();
    assert!(mask.starts_with("# torus-pencil domain\n# config sha256:"));
}

#[test]
fn rho_reports_the_strip_value_and_estimator_table() {
    let dir = setup(STRIP, "shape d.shape\nout res\n");
    let o = run(dir.path(), &["rho", "run.cfg"]);
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("rho(D) = ")).unwrap();
    let v: f64 = line["rho(D) = ".len()..].parse().unwrap();
    assert!((v - 2.0).abs() < 0.04, "{text}");
    let table = fs::read_to_string(dir.path().join("res/estimators.csv")).unwrap();
    for m in ["pencil", "growth", "hm_decay", "modulus", "extremal"] {
        assert!(table.contains(&format!("0,{m},")), "{table}");
    }
}

#[test]
fn outputs_are_reproducible() {
    let dir = setup(STRIP, "shape d.shape\nrho 1\nfield 1\n");
    for out in ["a", "b"] {
        let o = run(dir.path(), &["riesz", "run.cfg", "--out", out]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["majorant.csv", "potential.csv", "measure.csv", "report.txt"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn config_hash_follows_the_inputs() {
    let dir = setup(STRIP, "shape d.shape\n");
    let header = |out: &str| {
        let o = run(dir.path(), &["domain", "run.cfg", "--out", out]);
        assert_eq!(o.status.code(), Some(0));
        fs::read_to_string(dir.path().join(out).join("mask.csv")).unwrap().lines().nth(1).unwrap().to_string()
    };
    let a = header("a");
    fs::write(dir.path().join("d.shape"), STRIP.replace("pi/4 pi/4", "pi/3 pi/3")).unwrap();
    assert_ne!(a, header("b"));
}

#[test]
fn bad_configs_exit_with_code_2() {
    for cfg in ["colour red\n", "shape d.shape\nrho -1\n", "shape missing.shape\n"] {
        let dir = setup(STRIP, cfg);
        let o = run(dir.path(), &["domain", "run.cfg"]);
        assert_eq!(o.status.code(), Some(2), "{cfg}");
        assert!(stderr(&o).starts_with("error kind=config code=2 message="), "{}", stderr(&o));
    }
    let dir = setup(STRIP, "shape d.shape\n");
    assert_eq!(run(dir.path(), &["green", "run.cfg"]).status.code(), Some(2));
    let dir = setup(STRIP, "shape d.shape\nrho 1\nsource 0.3,3.0\n");
    let o = run(dir.path(), &["green", "run.cfg"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("outside the domain"));
}

#[test]
fn green_function_is_nonpositive() {
    let dir = setup(STRIP, "shape d.shape\nrho 1\nsource 0.3,0.1\nout res\n");
    let o = run(dir.path(), &["green", "run.cfg"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let text = fs::read_to_string(dir.path().join("res/green_0.csv")).unwrap();
    let values: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('x'))
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 16 * 64);
    assert!(values.iter().all(|&v| v <= 0.0));
    assert!(values.iter().any(|&v| v < 0.0));
}

#[test]
fn spectrum_box_flag_overrides_the_config() {
    let dir = setup(STRIP, "shape d.shape\nout res\n");
    let o = run(dir.path(), &["spectrum", "run.cfg", "--box", "0.5,5,-1,1"]);
    assert!(matches!(o.status.code(), Some(0) | Some(4)), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("box=0.5,5,-1,1"), "{text}");
    let csv = fs::read_to_string(dir.path().join("res/spectrum.csv")).unwrap();
    let reals: Vec<f64> =
        csv.lines().skip_while(|l| !l.starts_with("index")).skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(reals.iter().any(|r| (r - 2.0).abs() < 0.04), "{csv}");
}

#[test]
fn subminorant_of_a_negative_constant_is_refuted() {
    let dir = setup(STRIP, "shape d.shape\nrho 3\nobstacle -1\nout res\n");
    let o = run(dir.path(), &["subminorant", "run.cfg"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}{}", stderr(&o));
    assert!(text.contains("no subminorant exists"), "{text}");
    assert!(text.contains("existence Excluded"), "{text}");
    assert!(text.contains("status Diverged"), "{text}");
}

#[test]
fn band_obstacle_gives_zero() {
    let dir = tempfile::tempdir().unwrap();
    let p = 2f64.ln();
    let mut csv = format!("# 16 64 {p}\n");
    for j in 0..64 {
        let row: Vec<String> = (0..16).map(|i| if (4..8).contains(&i) { "1" } else { "0" }.to_string()).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
        let _ = j;
    }
    fs::write(dir.path().join("m.csv"), csv).unwrap();
    fs::write(dir.path().join("run.cfg"), format!("period {p}\nnx 16\nny 64\nrho 3\nobstacle m.csv\n")).unwrap();
    let o = run(dir.path(), &["subminorant", "run.cfg"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}{}", stderr(&o));
    assert!(text.contains("status IdenticallyZero"), "{text}");
    assert!(text.contains("existence Excluded"), "{text}");
}

#[test]
fn minimality_of_a_positive_constant() {
    let dir = setup(STRIP, "shape d.shape\nrho 3\nfield 1\n");
    let o = run(dir.path(), &["minimality", "run.cfg"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict Nonminimal"));
}

#[test]
fn lambda_table_on_a_band_has_no_spiral_component() {
    let dir = setup(BAND, "shape d.shape\nrho 2\n");
    let o = run(dir.path(), &["lambda", "run.cfg"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("0 inf 0.000000 below"), "{}", stdout(&o));
}

#[test]
fn plotdata_writes_slices() {
    let dir = setup(STRIP, "shape d.shape\nslice_y 0\nslice_x 0.1,0.3\nout res\n");
    let o = run(dir.path(), &["plotdata", "run.cfg"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = fs::read_to_string(dir.path().join("res/slice_y_0.csv")).unwrap();
    assert_eq!(s.lines().filter(|l| !l.starts_with('#')).count(), 17);
    assert!(s.lines().last().unwrap().ends_with(",1e0"));
    assert!(dir.path().join("res/slice_x_1.csv").exists());
    let f = fs::read_to_string(dir.path().join("res/field.csv")).unwrap();
    assert_eq!(f.lines().filter(|l| !l.starts_with('#')).count(), 64);
}

#[test]
fn verify_runs_selected_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "--criterion", "5", "--out", "res"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("PASS  5 fundamental-solution cross-check"));
    assert_eq!(run(dir.path(), &["verify", "--criterion", "13"]).status.code(), Some(2));
}

#[test]
fn fundsol_kernels_agree() {
    let dir = setup(STRIP, "shape d.shape\nrho 1.5\n");
    let read = |k: &str| {
        let o = run(dir.path(), &["fundsol", "run.cfg", "--set", &format!("kernel={k}"), "--out", k]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let text = fs::read_to_string(dir.path().join(k).join("fundsol.csv")).unwrap();
        text.lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with('x'))
            .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
            .collect::<Vec<_>>()
    };
    let (a, b) = (read("fourier"), read("weierstrass"));
    let diff = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-6, "{diff}");
}

#[test]
fn integer_order_needs_the_generalized_kernel() {
    let dir = setup(STRIP, "shape d.shape\nrho 1\n");
    let o = run(dir.path(), &["fundsol", "run.cfg"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error kind=numerical"));
    let o = run(dir.path(), &["fundsol", "run.cfg", "--set", "kernel=generalized"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("resonant modes removed"));
}
