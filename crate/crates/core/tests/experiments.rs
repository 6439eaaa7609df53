use std::path::PathBuf;

use proptest::prelude::*;
use ridgerec::experiments::{
    read_aggregate, read_trials, run_grid, summarize, write_aggregate, write_trials, AggregateRow,
    Algo, ExperimentConfig, TrialRecord,
};
use ridgerec::Error;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn golden_trials() -> Vec<TrialRecord> {
    vec![
        TrialRecord {
            algo: Algo::A,
            d: 10,
            m: 10,
            s: 10,
            h: 0.1,
            sigma: 0.0,
            trial: 0,
            seed: 42,
            err_l1: 0.001,
            err_l2: 0.0005,
            sup_err: 0.0002,
            queries: 1035,
            wall_ms: 1.5,
        },
        TrialRecord {
            algo: Algo::C,
            d: 300,
            m: 120,
            s: 5,
            h: 1.902,
            sigma: 0.01,
            trial: 1,
            seed: u64::MAX,
            err_l1: 1e-7,
            err_l2: 2.5e-8,
            sup_err: 3.75e20,
            queries: 1145,
            wall_ms: 0.25,
        },
        TrialRecord {
            algo: Algo::DCs,
            d: 100,
            m: 40,
            s: 5,
            h: 0.2,
            sigma: 0.0,
            trial: 2,
            seed: 7,
            err_l1: f64::NAN,
            err_l2: f64::NAN,
            sup_err: f64::NAN,
            queries: 0,
            wall_ms: 12.0,
        },
    ]
}

fn same_record(a: &TrialRecord, b: &TrialRecord) -> bool {
    // NaN marks a failed trial; its payload carries no information.
    let bits = |r: &TrialRecord| {
        [r.h, r.sigma, r.err_l1, r.err_l2, r.sup_err, r.wall_ms].map(|v| {
            if v.is_nan() {
                u64::MAX
            } else {
                v.to_bits()
            }
        })
    };
    (a.algo, a.d, a.m, a.s, a.trial, a.seed, a.queries)
        == (b.algo, b.d, b.m, b.s, b.trial, b.seed, b.queries)
        && bits(a) == bits(b)
}

fn small(algo: Algo, profile: &str) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::single(algo, profile, 20, 0.1, 11);
    cfg.trials = 3;
    cfg.table_size = 33;
    cfg.sup_error_points = 16;
    cfg
}

#[test]
fn trial_csv_matches_golden_file() {
    let mut buf = Vec::new();
    write_trials(&mut buf, &golden_trials()).unwrap();
    assert_eq!(
        String::from_utf8(buf).unwrap(),
        std::fs::read_to_string(fixture("trials_golden.csv")).unwrap()
    );
    let back = read_trials(std::fs::File::open(fixture("trials_golden.csv")).unwrap()).unwrap();
    assert_eq!(back.len(), 3);
    assert!(back
        .iter()
        .zip(&golden_trials())
        .all(|(a, b)| same_record(a, b)));
}

#[test]
fn aggregate_csv_matches_golden_file() {
    let text = std::fs::read_to_string(fixture("aggregate_golden.csv")).unwrap();
    let rows = read_aggregate(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].algo, Algo::B);
    assert_eq!(rows[0].mean_l1, 0.044);
    assert_eq!(rows[1].failures, 40);
    assert!(rows[1].mean_l2.is_nan());
    let mut buf = Vec::new();
    write_aggregate(&mut buf, &rows).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), text);
}

#[test]
fn empty_record_set_writes_header_only() {
    let mut buf = Vec::new();
    write_trials(&mut buf, &[]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(
        text,
        "algo,d,m,s,h,sigma,trial,seed,err_l1,err_l2,sup_err,queries,wall_ms\n"
    );
    assert!(read_trials(text.as_bytes()).unwrap().is_empty());
    let mut buf = Vec::new();
    write_aggregate(&mut buf, &[]).unwrap();
    assert!(read_aggregate(buf.as_slice()).unwrap().is_empty());
}

#[test]
fn malformed_files_report_line_numbers() {
    let good = std::fs::read_to_string(fixture("trials_golden.csv")).unwrap();
    let mut lines: Vec<String> = good.lines().map(String::from).collect();
    lines[2] = lines[2].replace("1145", "many");
    let err = read_trials(lines.join("\n").as_bytes()).unwrap_err();
    assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");

    let short = format!("{}\nA,1,2\n", lines[0]);
    assert!(matches!(
        read_trials(short.as_bytes()).unwrap_err(),
        Error::Parse { line: 2, .. }
    ));

    let wrong_header = good.replacen("algo", "algorithm", 1);
    assert!(matches!(
        read_trials(wrong_header.as_bytes()).unwrap_err(),
        Error::Parse { line: 1, .. }
    ));
    assert!(matches!(
        read_trials("".as_bytes()).unwrap_err(),
        Error::Parse { line: 1, .. }
    ));
}

#[test]
fn one_point_one_trial_gives_one_record() {
    let mut cfg = small(Algo::A, "tanh");
    cfg.trials = 1;
    let recs = run_grid(&cfg, Some(1)).unwrap();
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0].queries, 20 + 1 + 33);
}

#[test]
fn records_follow_grid_order() {
    let mut cfg = small(Algo::C, "tanh-shift");
    cfg.dims = vec![20, 30];
    cfg.measurements = vec![8, 12];
    cfg.steps = vec![0.1, 0.2];
    cfg.sigmas = vec![0.0, 0.01];
    cfg.sparsity = Some(3);
    let recs = run_grid(&cfg, Some(2)).unwrap();
    assert_eq!(recs.len(), 2 * 2 * 2 * 2 * 3);
    let keys: Vec<_> = recs
        .iter()
        .map(|r| {
            (
                r.d,
                r.m,
                (r.h * 10.0) as u32,
                (r.sigma * 100.0) as u32,
                r.trial,
            )
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(summarize("tanh-shift", &recs, 0.1).len(), 16);
}

#[test]
fn output_is_independent_of_thread_count() {
    let mut cfg = small(Algo::B, "tanh-shift");
    cfg.dims = vec![40];
    cfg.measurements = vec![10, 20];
    cfg.sparsity = Some(3);
    cfg.steps = vec![0.1, 0.3];
    let strip = |mut v: Vec<TrialRecord>| {
        v.iter_mut().for_each(|r| r.wall_ms = 0.0);
        let mut buf = Vec::new();
        write_trials(&mut buf, &v).unwrap();
        buf
    };
    let one = strip(run_grid(&cfg, Some(1)).unwrap());
    let three = strip(run_grid(&cfg, Some(3)).unwrap());
    assert_eq!(one, three);
}

#[test]
fn steps_and_noise_levels_share_instances() {
    let mut cfg = small(Algo::C, "linear");
    cfg.measurements = vec![10];
    cfg.sparsity = Some(2);
    cfg.steps = vec![0.1, 0.2];
    cfg.sigmas = vec![0.0, 0.01];
    let recs = run_grid(&cfg, Some(1)).unwrap();
    for t in 0..cfg.trials {
        let seeds: Vec<u64> = recs
            .iter()
            .filter(|r| r.trial == t)
            .map(|r| r.seed)
            .collect();
        assert!(seeds.windows(2).all(|w| w[0] == w[1]));
    }
}

#[test]
fn invalid_points_become_failed_records() {
    let mut cfg = small(Algo::A, "tanh");
    cfg.steps = vec![0.1, 2.0];
    assert!(matches!(cfg.check_grid(), Err(Error::Config(_))));
    let recs = run_grid(&cfg, Some(1)).unwrap();
    let rows = summarize("tanh", &recs, 1.0);
    assert_eq!(rows[0].failures, 0);
    assert_eq!(rows[1].failures, 3);
    assert!(rows[1].mean_l1.is_nan());
}

#[test]
fn error_decreases_with_more_measurements() {
    let mut cfg = small(Algo::B, "tanh-shift");
    cfg.dims = vec![100];
    cfg.measurements = vec![8, 24, 48];
    cfg.sparsity = Some(4);
    cfg.trials = 20;
    let rows = summarize("tanh-shift", &run_grid(&cfg, None).unwrap(), 0.01);
    assert!(
        rows.windows(2).all(|w| w[1].mean_l1 <= w[0].mean_l1),
        "{rows:?}"
    );
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.toml");
    std::fs::write(
        &path,
        "algo = \"D-cs\"\nprofile = \"recip\"\nd = [50]\nm = [20]\ns = 3\nh = [0.01, 0.02]\ntrials = 2\nmaster_seed = 9\nradius = 2.0\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::from_file(&path).unwrap();
    assert_eq!(cfg.algo, Algo::DCs);
    assert_eq!(cfg.radius, Some(2.0));
    let recs = run_grid(&cfg, Some(1)).unwrap();
    assert_eq!(recs.len(), 4);
    assert!(recs.iter().all(|r| !r.failed()));
}

fn arb_record() -> impl Strategy<Value = TrialRecord> {
    (
        0usize..7,
        1usize..10_000,
        any::<u64>(),
        prop::num::f64::ANY,
        prop::num::f64::POSITIVE | prop::num::f64::ZERO,
        any::<u32>(),
    )
        .prop_map(|(a, d, seed, e, h, q)| TrialRecord {
            algo: Algo::ALL[a],
            d,
            m: d / 2 + 1,
            s: d / 3 + 1,
            h,
            sigma: h / 7.0,
            trial: d % 13,
            seed,
            err_l1: e,
            err_l2: e.abs(),
            sup_err: -e,
            queries: q as u64,
            wall_ms: h * 3.0,
        })
}

proptest! {
    #[test]
    fn trial_csv_round_trips(records in prop::collection::vec(arb_record(), 0..20)) {
        let mut buf = Vec::new();
        write_trials(&mut buf, &records).unwrap();
        let back = read_trials(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), records.len());
        prop_assert!(back.iter().zip(&records).all(|(a, b)| same_record(a, b)));
    }

    #[test]
    fn summary_mean_is_arithmetic_mean(errs in prop::collection::vec(0.0f64..10.0, 1..30)) {
        let recs: Vec<TrialRecord> = errs.iter().enumerate().map(|(i, e)| TrialRecord {
            err_l1: *e, err_l2: *e, sup_err: *e, trial: i, ..golden_trials()[0].clone()
        }).collect();
        let rows: Vec<AggregateRow> = summarize("tanh", &recs, 5.0);
        prop_assert_eq!(rows.len(), 1);
        let mean = errs.iter().sum::<f64>() / errs.len() as f64;
        prop_assert!((rows[0].mean_l1 - mean).abs() <= 1e-12 * mean.max(1.0));
        let below = errs.iter().filter(|e| **e <= 5.0).count() as f64 / errs.len() as f64;
        prop_assert_eq!(rows[0].success_rate, below);
    }
}
