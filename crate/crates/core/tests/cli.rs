use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use spin_core::cli::{run, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};
use spin_core::matcore::{sigma_x, sigma_y, sigma_z, CMatrix};
use spin_core::spin_construct::SpinTuple;

fn spinsys(args: &[&str]) -> i32 {
    let mut argv = vec!["spinsys"];
    argv.extend_from_slice(args);
    run(argv)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string(value).unwrap()).unwrap();
    p
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn construct_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.json");
    assert_eq!(
        spinsys(&["construct", "--m", "5", "--out", path_str(&q)]),
        EXIT_OK
    );
    let s: SpinTuple = serde_json::from_str(&fs::read_to_string(&q).unwrap()).unwrap();
    assert_eq!((s.arity(), s.dim()), (5, 4));

    let report = dir.path().join("report.json");
    assert_eq!(
        spinsys(&["verify", "--in", path_str(&q), "--out", path_str(&report)]),
        EXIT_OK
    );
    let v = read(&report);
    assert_eq!(v["passes"], Value::Bool(true));
    assert_eq!(v["commutant_dim"], 1);
}

#[test]
fn verify_flags_a_non_spin_tuple() {
    let dir = tempfile::tempdir().unwrap();
    let bad = SpinTuple::unchecked(vec![sigma_x(), sigma_x()]).unwrap();
    let p = write_json(dir.path(), "bad.json", &bad);
    let out = dir.path().join("r.json");
    assert_eq!(
        spinsys(&["verify", "--in", path_str(&p), "--out", path_str(&out)]),
        EXIT_FAILURE
    );
    assert_eq!(read(&out)["passes"], Value::Bool(false));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(spinsys(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(spinsys(&["construct"]), EXIT_USAGE);
    assert_eq!(
        spinsys(&["verify", "--in", "/nonexistent/q.json"]),
        EXIT_USAGE
    );
    assert_eq!(spinsys(&["construct", "--m", "1"]), EXIT_FAILURE);
}

#[test]
fn construct_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let args = [
            "construct",
            "--m",
            "4",
            "--inflate",
            "2",
            "--conjugate",
            "--seed",
            "7",
            "--out",
            path_str(p),
        ];
        assert_eq!(spinsys(&args), EXIT_OK);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn canonicalize_pair_command() {
    let dir = tempfile::tempdir().unwrap();
    let u = write_json(dir.path(), "u.json", &sigma_z());
    let v = write_json(dir.path(), "v.json", &sigma_y());
    let out = dir.path().join("cf.json");
    assert_eq!(
        spinsys(&[
            "canonicalize-pair",
            "--u",
            path_str(&u),
            "--v",
            path_str(&v),
            "--out",
            path_str(&out)
        ]),
        EXIT_OK
    );
    let cf = read(&out);
    assert_eq!(cf["canonical_form"]["n"], 1);
    assert!(
        cf["analysis"]["reduction"]["reduction_residual"]
            .as_f64()
            .unwrap()
            < 1e-12
    );

    let same = write_json(dir.path(), "z.json", &sigma_z());
    assert_eq!(
        spinsys(&[
            "canonicalize-pair",
            "--u",
            path_str(&u),
            "--v",
            path_str(&same)
        ]),
        EXIT_FAILURE
    );
}

#[test]
fn pencil_check_across_realizations() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert_eq!(
        spinsys(&["construct", "--m", "3", "--out", path_str(&a)]),
        EXIT_OK
    );
    assert_eq!(
        spinsys(&[
            "construct",
            "--m",
            "3",
            "--inflate",
            "3",
            "--conjugate",
            "--out",
            path_str(&b)
        ]),
        EXIT_OK
    );
    let pencil = serde_json::json!({ "coeffs": [
        CMatrix::from_real(1, 1, &[1.0]),
        CMatrix::from_real(1, 1, &[0.5]),
        CMatrix::from_real(1, 1, &[0.5]),
        CMatrix::from_real(1, 1, &[0.5]),
    ]});
    let p = write_json(dir.path(), "p.json", &pencil);
    let out = dir.path().join("r.json");
    assert_eq!(
        spinsys(&[
            "pencil-check",
            "--pencil",
            path_str(&p),
            "--spin",
            path_str(&a),
            path_str(&b),
            "--out",
            path_str(&out)
        ]),
        EXIT_OK
    );
    let r = read(&out);
    assert_eq!(r["consistent"], Value::Bool(true));
    for row in r["realizations"].as_array().unwrap() {
        // 1 − 0.5·√3 > 0
        assert_eq!(row["psd"], Value::Bool(true));
        assert!((row["min_eig"].as_f64().unwrap() - (1.0 - 0.5 * 3f64.sqrt())).abs() < 1e-12);
    }
}

#[test]
fn choi_and_dilate_commands() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    assert_eq!(
        spinsys(&[
            "construct",
            "--m",
            "3",
            "--inflate",
            "2",
            "--conjugate",
            "--out",
            path_str(&t)
        ]),
        EXIT_OK
    );
    let c = dir.path().join("c.json");
    assert_eq!(
        spinsys(&["choi", "--in", path_str(&t), "--out", path_str(&c)]),
        EXIT_OK
    );
    assert!(read(&c)["map"]["choi_min_eig"].as_f64().unwrap() >= -1e-9);
    let d = dir.path().join("d.json");
    assert_eq!(
        spinsys(&["dilate", "--in", path_str(&t), "--out", path_str(&d)]),
        EXIT_OK
    );
    assert!(read(&d)["dilation"]["isometry_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(
        spinsys(&[
            "dilate",
            "--reverse",
            "--in",
            path_str(&t),
            "--out",
            path_str(&d)
        ]),
        EXIT_OK
    );

    let flipped = SpinTuple::new(vec![sigma_x(), sigma_y(), -&sigma_z()]).unwrap();
    let f = write_json(dir.path(), "f.json", &flipped);
    assert_eq!(spinsys(&["choi", "--in", path_str(&f)]), EXIT_FAILURE);
}

#[test]
fn spectra_commands() {
    let dir = tempfile::tempdir().unwrap();
    let scalars = |v: &[f64]| serde_json::json!({ "mats": v.iter().map(|&x| CMatrix::from_real(1, 1, &[x])).collect::<Vec<_>>() });
    let inside = write_json(dir.path(), "in.json", &scalars(&[0.6, 0.7]));
    let outside = write_json(dir.path(), "out.json", &scalars(&[0.8, 0.8]));
    let o = dir.path().join("o.json");

    assert_eq!(
        spinsys(&[
            "spectra",
            "spinball",
            "--h",
            path_str(&inside),
            "--out",
            path_str(&o)
        ]),
        EXIT_OK
    );
    assert_eq!(read(&o)["inside"], Value::Bool(true));
    assert_eq!(
        spinsys(&[
            "spectra",
            "spinball",
            "--h",
            path_str(&outside),
            "--out",
            path_str(&o)
        ]),
        EXIT_OK
    );
    assert_eq!(read(&o)["inside"], Value::Bool(false));

    let a = write_json(
        dir.path(),
        "a.json",
        &serde_json::json!({ "mats": [sigma_x(), sigma_y()] }),
    );
    assert_eq!(
        spinsys(&[
            "spectra",
            "member",
            "--a",
            path_str(&a),
            "--h",
            path_str(&inside),
            "--out",
            path_str(&o)
        ]),
        EXIT_OK
    );
    assert_eq!(read(&o)["inside"], Value::Bool(true));

    let args = [
        "spectra",
        "maxball2",
        "--h",
        path_str(&inside),
        "--random-trials",
        "3",
        "--out",
        path_str(&o),
    ];
    assert_eq!(spinsys(&args), EXIT_OK);
    assert_eq!(read(&o)["violations"], 0);

    let a1 = write_json(dir.path(), "a1.json", &sigma_x());
    let a2 = write_json(dir.path(), "a2.json", &sigma_y());
    assert_eq!(
        spinsys(&[
            "spectra",
            "ando",
            "--a1",
            path_str(&a1),
            "--a2",
            path_str(&a2),
            "--out",
            path_str(&o)
        ]),
        EXIT_OK
    );
    assert_eq!(read(&o)["outcome"]["status"], "feasible");
    let big = write_json(dir.path(), "big.json", &sigma_x().scale_re(2.0));
    let zero = write_json(dir.path(), "zero.json", &CMatrix::zeros(2, 2));
    let args = [
        "spectra",
        "ando",
        "--a1",
        path_str(&big),
        "--a2",
        path_str(&zero),
        "--max-iter",
        "500",
        "--out",
        path_str(&o),
    ];
    assert_eq!(spinsys(&args), EXIT_FAILURE);
    assert_eq!(read(&o)["outcome"]["status"], "infeasible");

    let csv = dir.path().join("r.csv");
    let z = write_json(dir.path(), "z.json", &sigma_z());
    let args = [
        "spectra",
        "nrange",
        "--x",
        path_str(&a1),
        path_str(&a2),
        path_str(&z),
        "--samples",
        "50",
        "--out",
        path_str(&csv),
    ];
    assert_eq!(spinsys(&args), EXIT_OK);
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "re_1,im_1,re_2,im_2,re_3,im_3");
    assert_eq!(lines.count(), 50);
}

#[test]
fn suite_quick_subset_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        assert_eq!(
            spinsys(&[
                "suite",
                "--quick",
                "--only",
                "02",
                "--only",
                "05",
                "--out",
                path_str(p)
            ]),
            EXIT_OK
        );
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(read(&a)["checks"].as_array().unwrap().len(), 2);
    assert_eq!(spinsys(&["suite", "--only", "nope"]), EXIT_USAGE);
}

#[test]
fn env_override_of_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert_eq!(
        spinsys(&[
            "construct",
            "--m",
            "2",
            "--conjugate",
            "--seed",
            "99",
            "--out",
            path_str(&a)
        ]),
        EXIT_OK
    );
    assert_eq!(
        spinsys(&[
            "construct",
            "--m",
            "2",
            "--conjugate",
            "--seed",
            "100",
            "--out",
            path_str(&b)
        ]),
        EXIT_OK
    );
    assert_ne!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}
