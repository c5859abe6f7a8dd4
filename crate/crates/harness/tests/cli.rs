use std::process::{Command, Output};

fn affiq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affiq"))
        .args(args)
        .env_remove("AFFIQ_CONFIG")
        .current_dir(env!("CARGO_TARGET_TMPDIR"))
        .output()
        .expect("affiq runs")
}

#[test]
fn unknown_suite_is_bad_input() {
    let out = affiq(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("usage"), "{err}");
    assert!(err.contains("relate"), "{err}");
}

#[test]
fn unknown_subcommand_and_bad_config_are_bad_input() {
    assert_eq!(affiq(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(affiq(&["verify", "--suite", "matheron", "--set", "grid.cells=abc"]).status.code(), Some(2));
    assert_eq!(affiq(&["verify", "--suite", "matheron", "--tol", "0.5"]).status.code(), Some(2));
}

#[test]
fn constants_table_has_provenance() {
    let out = affiq(&["constants", "--n", "2", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let c22: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("c_{2,2}\t"))
        .and_then(|l| l.split('\t').next())
        .unwrap()
        .parse()
        .unwrap();
    assert!((c22 - 0.3422).abs() < 5e-5, "{text}");
    assert!(text.contains("CLOSED-FORM"), "{text}");
    assert!(text.contains("ODE"), "{text}");
}

#[test]
fn relate_passes_and_report_renders() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("relate.csv");
    let out = affiq(&["verify", "--suite", "relate", "--tol", "0.01", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = dir.path().join("relate.svg");
    let out = affiq(&["report", "--input", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn config_file_and_env_are_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("affiq.conf");
    std::fs::write(&conf, "grid.cells = 0\n").unwrap();
    let run = |envvar: bool| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_affiq"));
        c.args(["energy", "--func", "cone"]).current_dir(env!("CARGO_TARGET_TMPDIR"));
        if envvar {
            c.env("AFFIQ_CONFIG", &conf);
        } else {
            c.env_remove("AFFIQ_CONFIG");
        }
        c.output().unwrap()
    };
    assert_eq!(run(false).status.code(), Some(0));
    // zero cells is rejected by the grid constructor
    assert_eq!(run(true).status.code(), Some(2));
}

#[test]
fn minkowski_cross_gives_unit_square() {
    let out = affiq(&["minkowski", "1,0:1;0,1:1;-1,0:1;0,-1:1", "--p", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let vol: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("volume\t"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((vol - 1.0).abs() < 1e-6, "{text}");
    assert_eq!(affiq(&["minkowski", "1,0:1;garbage"]).status.code(), Some(2));
}
