use std::fs;
use std::path::Path;
use std::process::Command;

fn frit(args: &[&str], out: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_frit"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

fn config(out: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(out.join("config.json")).unwrap()).unwrap()
}

#[test]
fn apply_writes_fields_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let code = frit(&["apply", "--n", "2", "-N", "32", "--beta", "0.5", "--field", "gaussian"], dir.path());
    assert_eq!(code, 0);
    let c = config(dir.path());
    assert_eq!(c["N"], 32);
    assert_eq!(c["beta"], 0.5);
    let names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert!(names.iter().any(|s| s.starts_with("tf_n2_N32") && s.ends_with(".csv")), "{names:?}");
}

#[test]
fn runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["sweep", "--kind", "norm", "--n", "2", "-N", "32", "--field", "multi_bump", "--seed", "4"];
    assert_eq!(frit(&args, a.path()), 0);
    assert_eq!(frit(&args, b.path()), 0);
    let mut seen = 0;
    for e in fs::read_dir(a.path()).unwrap() {
        let name = e.unwrap().file_name();
        // config.json records the output directory
        if name == "config.json" {
            continue;
        }
        assert!(fs::read(a.path().join(&name)).unwrap() == fs::read(b.path().join(&name)).unwrap(), "{name:?}");
        seen += 1;
    }
    assert!(seen >= 2);
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("in.json");
    fs::write(&cfg, r#"{"n": 1, "N": 64, "beta": 0.3, "field": {"kind": "indicator_cube"}}"#).unwrap();
    let out = dir.path().join("out");
    assert_eq!(frit(&["apply", "--config", cfg.to_str().unwrap(), "--beta", "0.4"], &out), 0);
    let c = config(&out);
    assert_eq!(c["n"], 1);
    assert_eq!(c["N"], 64);
    assert_eq!(c["beta"], 0.4);
}

#[test]
fn bad_input_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(frit(&["apply", "--n", "2", "--beta", "3"], dir.path()), 2);
    assert_eq!(frit(&["apply", "--n", "4"], dir.path()), 2);
    assert_eq!(frit(&["sqg", "--alpha", "0.8"], dir.path()), 2);
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(frit(&["apply", "--config", cfg.to_str().unwrap()], dir.path()), 2);
}

#[test]
fn czd_and_sqg_succeed() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(frit(&["czd", "--n", "2", "-N", "32", "--field", "multi_bump", "--t", "0.5"], dir.path()), 0);
    assert_eq!(frit(&["sqg", "-N", "32", "--alpha", "0.3", "--field", "multi_bump"], dir.path()), 0);
}
