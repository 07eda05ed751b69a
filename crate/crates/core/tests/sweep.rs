use owpinv::harness::sweep::{run_sweep, SweepConfig, SWEEP_COLUMNS};

fn column(csv: &str, name: &str) -> Vec<String> {
    let idx = SWEEP_COLUMNS.iter().position(|c| *c == name).unwrap();
    csv.lines().skip(1).map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

#[test]
fn mean_v2_norm_grows_with_the_bad_set() {
    let config = SweepConfig::from_json(
        r#"{"master_seed": 77, "n": [10], "families": [{"family": "random"}],
            "a": [0.0], "bad_sizes": [0, 1, 2, 4]}"#,
    )
    .unwrap();
    let out = run_sweep(&config, 4).unwrap();
    let csv = String::from_utf8(out.csv).unwrap();
    let means: Vec<f64> = column(&csv, "mean_v2_norm").iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(means.len(), 4);
    assert!(means[0] <= 1e-9);
    assert!(means.windows(2).all(|w| w[0] <= w[1]), "{means:?}");
    assert!(column(&csv, "v2_bound_pass").iter().all(|v| v == "true"));
    assert!(column(&csv, "ratio_identity_pass").iter().all(|v| v == "true"));
    assert!(column(&csv, "l_bound_pass").iter().all(|v| v == "true"));
}

#[test]
fn rows_follow_grid_order() {
    let config = SweepConfig::from_json(
        r#"{"master_seed": 1, "n": [2, 4], "families": [{"family": "identity"}, {"family": "bit-reversal"}],
            "a": [0.0, 0.01], "bad_sizes": [0, 1], "x": {"mode": "sample", "count": 3}}"#,
    )
    .unwrap();
    let csv = String::from_utf8(run_sweep(&config, 2).unwrap().csv).unwrap();
    let keys: Vec<(String, String, String, String)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].into(), f[1].into(), f[3].into(), f[5].into())
        })
        .collect();
    assert_eq!(keys.len(), 16);
    assert_eq!(keys[0], ("2".into(), "identity".into(), "0.0000000000000000e0".into(), "0".into()));
    assert_eq!(keys[1].3, "1");
    assert_eq!(keys[2].2, "1.0000000000000000e-2");
    assert_eq!(keys[4].1, "bit-reversal");
    assert_eq!(keys[8].0, "4");
    assert!(column(&csv, "sample_mode")[8].starts_with("sampled"));
}
