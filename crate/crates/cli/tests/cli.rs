use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabwire"))
        .args(args)
        .env("STABWIRE_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn enumerate_uses_and_repairs_its_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");

    let first = run(&cache, &["enumerate"]);
    assert!(first.status.success());
    assert!(stdout(&first).contains("lagrangians=75735 orbits=2649"));
    assert!(!stdout(&first).contains("cached"));
    let saved = fs::read(cache.join("orbits.csv")).unwrap();

    let second = run(&cache, &["enumerate"]);
    assert!(second.status.success());
    assert!(stdout(&second).contains("cached"));
    assert_eq!(fs::read(cache.join("orbits.csv")).unwrap(), saved);

    let text = fs::read_to_string(cache.join("orbits.csv")).unwrap();
    fs::write(cache.join("orbits.csv"), text.replacen("0,0\n", "0,1\n", 1)).unwrap();
    let third = run(&cache, &["enumerate"]);
    assert!(third.status.success());
    assert!(!stdout(&third).contains("cached"));
    assert_eq!(fs::read(cache.join("orbits.csv")).unwrap(), saved);
}

#[test]
fn capacity_of_fixture_files() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("ghz.stab", "5", "5", "C = 1"),
        ("cluster.stab", "6", "6", "C = 6"),
        ("toric.stab", "5", "2", "C = 4"),
    ];
    for (file, n, d, expected) in cases {
        let path = fixture(file);
        let out = run(dir.path(), &["capacity", path.to_str().unwrap(), n, d]);
        assert!(out.status.success(), "{file}");
        assert_eq!(stdout(&out).trim(), expected, "{file}");
    }
    let traced = run(
        dir.path(),
        &[
            "capacity",
            fixture("toric.stab").to_str().unwrap(),
            "3",
            "3",
            "--trace",
        ],
    );
    assert!(stdout(&traced).contains("T_R depth 3"));
}

#[test]
fn capacity_rejects_bad_tensors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.stab");
    fs::write(
        &path,
        "stabtensor v1 legs=u,d,l,r,phys\nXIIII\nZIIII\nIIZII\nIIIZI\nIIIIZ\n",
    )
    .unwrap();
    let out = run(dir.path(), &["capacity", path.to_str().unwrap(), "2", "2"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("anticommute"));
}

#[test]
fn classify_then_heatmaps() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out_dir = dir.path().join("out");
    let out = out_dir.to_str().unwrap();

    let classified = run(&cache, &["classify", "--out", out]);
    assert!(classified.status.success());
    let text = stdout(&classified);
    assert!(text.contains("classes=13"));
    assert!(text.contains("omega_classes="));
    assert!(text.contains("phi c -> 4,6,7"));

    let census = fs::read_to_string(out_dir.join("census.csv")).unwrap();
    let total: usize = census
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(total, 2649);
    let report = fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert!(report.starts_with(
        "# stabwire-report v1\ncanonical_ordinal,transmission_class,phi_class,omega_class,sig_c11,"
    ));
    assert_eq!(report.lines().count(), 2 + 2649);

    let full = run(&cache, &["heatmap", "12", "--out", out, "--svg"]);
    assert!(full.status.success());
    let csv = fs::read_to_string(out_dir.join("heatmap-class12.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let v: Vec<usize> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(v[2], v[0]);
    }
    assert!(fs::read_to_string(out_dir.join("heatmap-class12.svg"))
        .unwrap()
        .starts_with("<svg"));

    run(&cache, &["heatmap", "0", "--out", out]);
    let zero = fs::read_to_string(out_dir.join("heatmap-class0.csv")).unwrap();
    assert!(zero.lines().skip(1).all(|l| l.ends_with(",0")));

    // GHZ sits in the first class with the all-ones grid.
    run(
        &cache,
        &["heatmap", "2", "--out", out, "--n-max", "8", "--d-max", "8"],
    );
    let ones = fs::read_to_string(out_dir.join("heatmap-class2.csv")).unwrap();
    assert_eq!(ones.lines().count(), 1 + 64);
    assert!(ones.lines().skip(1).all(|l| l.ends_with(",1")));

    assert!(!run(&cache, &["heatmap", "13", "--out", out])
        .status
        .success());
}

#[test]
fn report_bytes_do_not_depend_on_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(
        &cache,
        &["classify", "--workers", "1", "--out", a.to_str().unwrap()]
    )
    .status
    .success());
    assert!(run(
        &cache,
        &["classify", "--workers", "3", "--out", b.to_str().unwrap()]
    )
    .status
    .success());
    for file in ["report.csv", "census.csv"] {
        assert_eq!(
            fs::read(a.join(file)).unwrap(),
            fs::read(b.join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn verify_passes_and_catches_an_injected_fault() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let clean = run(&cache, &["verify"]);
    assert!(clean.status.success(), "{}", stdout(&clean));
    assert_eq!(stdout(&clean).matches(": PASS").count(), 4);

    let reseeded = run(&cache, &["verify", "--seed", "7"]);
    assert!(reseeded.status.success());

    let broken = run(&cache, &["verify", "--corrupt-for-test"]);
    assert!(!broken.status.success());
    let text = stdout(&broken);
    assert!(text.contains("suite oracle: FAIL"));
    assert!(text.contains("first counterexample: tensor"));
}
