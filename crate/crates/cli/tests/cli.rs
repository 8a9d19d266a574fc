use std::path::Path;
use std::process::{Command, Output};

fn hypfull(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypfull"))
        .args(args)
        .current_dir(dir)
        .env_remove("HYPFULL_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn gen_then_volume_with_cache() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(hypfull(d, &["gen", "--n", "28", "--out", "c28.pc"]).status.success());
    let ok = hypfull(d, &["validate", "--in", "c28.pc"]);
    assert!(ok.status.success());

    let args = ["volume", "--in", "c28.pc", "--out", "v.csv", "--cache-dir", "cache", "--jobs", "2"];
    assert!(hypfull(d, &args).status.success());
    let first = std::fs::read(d.join("v.csv")).unwrap();
    assert!(hypfull(d, &args).status.success());
    assert_eq!(std::fs::read(d.join("v.csv")).unwrap(), first);
    assert_eq!(std::fs::read_dir(d.join("cache")).unwrap().count(), 2);

    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("id,N,volume,"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn table1_and_conjecture() {
    let dir = tempfile::tempdir().unwrap();
    let t = hypfull(dir.path(), &["table1", "--n-min", "20", "--n-max", "30"]);
    assert!(t.status.success());
    let s = stdout(&t);
    assert!(s.contains("\n30,3,3,8.612415,8.946606,"), "{s}");
    assert!(s.contains("\n22,0,0,"));

    let c = hypfull(dir.path(), &["conjecture", "--n", "30"]);
    assert!(c.status.success());
    assert!(stdout(&c).contains("\"verdict\":true"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.txt"), "20: 1 2 3\n").unwrap();
    assert_eq!(hypfull(d, &["validate", "--in", "bad.txt"]).status.code(), Some(1));
    assert_eq!(hypfull(d, &["validate", "--in", "missing.pc"]).status.code(), Some(1));
    assert_eq!(hypfull(d, &["conjecture", "--n", "25"]).status.code(), Some(1));
    assert_eq!(hypfull(d, &["frobnicate"]).status.code(), Some(1));
    assert_eq!(hypfull(d, &["--help"]).status.code(), Some(0));
    assert_eq!(hypfull(d, &["volume", "--n", "30", "--tol=-1"]).status.code(), Some(1));
}

#[test]
fn correlate_with_external_column() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(hypfull(d, &["volume", "--n", "30", "--out", "v.csv"]).status.success());
    let ids: Vec<String> = std::fs::read_to_string(d.join("v.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect();
    let mut ext = String::from("id,relative_energy\n");
    for (k, id) in ids.iter().enumerate() {
        ext.push_str(&format!("{id},{}\n", [3.0, 1.0, 0.0][k]));
    }
    std::fs::write(d.join("e.csv"), ext).unwrap();
    let o = hypfull(
        d,
        &["correlate", "--desc", "v.csv", "--external", "e.csv", "--columns", "volume,relative_energy"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    let row = s.lines().find(|l| l.starts_with("volume,")).unwrap();
    let r: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!(r < -0.9, "{s}");

    let mut ext = String::from("id,relative_energy\n");
    let vols = std::fs::read_to_string(d.join("v.csv")).unwrap();
    // five rows with energy falling as volume grows
    let more = hypfull(d, &["volume", "--n", "32", "--out", "v32.csv"]);
    assert!(more.status.success());
    let v32 = std::fs::read_to_string(d.join("v32.csv")).unwrap();
    for line in v32.lines().skip(1).chain(vols.lines().skip(1)) {
        let f: Vec<&str> = line.split(',').collect();
        let vol: f64 = f[2].parse().unwrap();
        ext.push_str(&format!("{},{}\n", f[0], 100.0 - 3.0 * vol));
    }
    std::fs::write(d.join("e32.csv"), ext).unwrap();
    let s = hypfull(
        d,
        &["correlate", "--desc", "v32.csv", "--external", "e32.csv", "--columns", "volume",
          "--np-groups", "np.csv", "--stability", "st.json"],
    );
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
    let np = std::fs::read_to_string(d.join("np.csv")).unwrap();
    assert!(np.starts_with("Np,count,slope,pcc\n"));
    let st: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("st.json")).unwrap()).unwrap();
    assert_eq!(st["extremes_match"], true);
    assert!(st["pcc"].as_f64().unwrap() < -0.999);

    let reg = hypfull(d, &["regress", "--desc", "v.csv", "--target", "volume", "--features", "H5"]);
    assert!(reg.status.success());
    assert!(stdout(&reg).contains("\"r_squared\""));
}
