use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stable-trees"))
}

#[test]
fn oracle_prints_json() {
    let out = bin().args(["oracle", "height_moment", "--gamma", "2", "--p", "-1"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    let expect = std::f64::consts::PI.sqrt() / 2.0;
    assert!((v["value"].as_f64().unwrap() - expect).abs() < 1e-14);
}

#[test]
fn missing_gamma_is_a_usage_error() {
    let out = bin().args(["oracle", "height_moment", "--p", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["limit", "--gamma", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_identities_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.json"), dir.path().join("b.json")];
    for p in &paths {
        let out = bin()
            .args(["verify", "identities", "--seed", "1", "--output"])
            .arg(p)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["schema"], 1);
}

#[test]
fn sampling_outputs_are_reproducible() {
    let run = |args: &[&str]| bin().args(args).output().unwrap().stdout;
    let args = ["sample", "--gamma", "2", "--n", "300", "--replicates", "3", "--seed", "9"];
    let a = run(&args);
    assert_eq!(a, run(&args));
    assert_eq!(String::from_utf8(a.clone()).unwrap().lines().count(), 3);

    let dir = tempfile::tempdir().unwrap();
    let trees = dir.path().join("trees.jsonl");
    std::fs::write(&trees, &a).unwrap();
    let out = bin()
        .args(["zfunc", "--gamma", "2", "--alpha", "1", "--beta", "2", "--input"])
        .arg(&trees)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("gamma,alpha,beta,c,n,seed,replicate,z_total,z_leaf,height,"));
    assert_eq!(text.lines().count(), 4);

    let out = bin()
        .args(["zoom", "--gamma", "2", "--n", "500", "--replicates", "100", "--threads", "1"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("epsilon,t,ks_stat,p_value,correlation,replicates"));

    let out = bin().args(["limit", "--gamma", "1.5", "--replicates", "50", "--format", "json"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["lower"].as_f64().unwrap() <= v["upper"].as_f64().unwrap());
}
