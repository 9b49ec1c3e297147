use otfs_trmrc::experiments::{
    read_csv, read_spec, run_experiment, run_experiment_with_threads, write_csv, write_csv_to, ExperimentSpec, Preset,
    ResultTable,
};
use otfs_trmrc::metrics::CSV_COLUMNS;
use otfs_trmrc::receiver::WindowMode;

const SMALL: &str = r#"
name = "small"
master_seed = 11
trials = 2
n = 8
blocks_per_frame = 2
pdp = "EVA"

[sweep]
q = [2, 4]
snr_db = [0.0, 6.0]
doppler_hz = [0.0, 10900.0]
m = [16]
"#;

fn small() -> ExperimentSpec {
    ExperimentSpec::from_toml(SMALL).unwrap()
}

#[test]
fn csv_header_and_rows() {
    let spec = small();
    let table = run_experiment(&spec).unwrap();
    assert_eq!(table.records.len(), 2 * 2 * 2 * 2);
    let mut buf = Vec::new();
    write_csv_to(&table, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "q,m,n,doppler_hz,snr_db,window_mode,seed,sinr_linear,sinr_db,ber,bits_counted,trials,ci_halfwidth_db"
    );
    assert_eq!(header.split(',').collect::<Vec<_>>(), CSV_COLUMNS);
    assert_eq!(text.lines().count(), 1 + table.records.len());
    for r in &table.records {
        assert_eq!(r.seed, 11);
        assert_eq!(r.trials, 2);
        assert_eq!(r.bits_counted, 2 * 16 * 8 * 2 * 2);
        assert!(r.sinr_linear > 0.0 && (0.0..=1.0).contains(&r.ber));
        assert!(r.ci_halfwidth_db >= 0.0);
    }
    let modes: Vec<WindowMode> = table.records.iter().take(2).map(|r| r.window_mode).collect();
    assert_eq!(modes, [WindowMode::Rect, WindowMode::Rdc]);
}

#[test]
fn empty_table_gives_header_only() {
    let table = ResultTable { spec: small(), sample_period: 1.0, records: Vec::new() };
    let mut buf = Vec::new();
    write_csv_to(&table, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", CSV_COLUMNS.join(",")));
}

#[test]
fn csv_round_trips_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let table = run_experiment(&small()).unwrap();
    write_csv(&table, &path).unwrap();
    assert_eq!(read_csv(&path).unwrap(), table.records);
}

#[test]
fn toml_round_trip() {
    let spec = small();
    let again = ExperimentSpec::from_toml(&spec.to_toml().unwrap()).unwrap();
    assert_eq!(spec, again);
    for p in Preset::ALL {
        let s = p.spec(false, 9);
        assert_eq!(ExperimentSpec::from_toml(&s.to_toml().unwrap()).unwrap(), s);
    }
}

#[test]
fn unknown_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, SMALL.replace("pdp = \"EVA\"", "pdp = \"EVA\"\nυmax = 5500.0")).unwrap();
    let err = read_spec(&path).unwrap_err();
    assert!(err.is_config());
    assert!(err.to_string().contains("υmax"), "{err}");
}

#[test]
fn infeasible_geometry_rejected() {
    let spec = ExperimentSpec::from_toml(&SMALL.replace("m = [16]", "m = [8]")).unwrap();
    let err = spec.validate().unwrap_err();
    assert!(err.is_config() && err.to_string().contains("L=13"), "{err}");
    let both = SMALL.replace("n = 8", "n = 8\nblock_size = 128");
    assert!(ExperimentSpec::from_toml(&both).unwrap().validate().is_err());
}

#[test]
fn fig1_preset_shape() {
    let spec = Preset::Fig1.spec(false, 1);
    spec.validate().unwrap();
    assert_eq!(spec.cells().len(), 20 * 3);
    assert_eq!(spec.cells().len() * spec.window_modes.len(), 120);
    let fig2 = Preset::Fig2.spec(false, 1);
    for c in fig2.cells() {
        assert_eq!(c.m * c.n, 8192);
    }
}

#[test]
fn reruns_and_thread_counts_agree() {
    let spec = small();
    let csv = |t: ResultTable| {
        let mut buf = Vec::new();
        write_csv_to(&t, &mut buf).unwrap();
        buf
    };
    let a = csv(run_experiment_with_threads(&spec, 1).unwrap());
    let b = csv(run_experiment_with_threads(&spec, 3).unwrap());
    let c = csv(run_experiment(&spec).unwrap());
    assert_eq!(a, b);
    assert_eq!(a, c);
    let mut other = spec.clone();
    other.master_seed = 12;
    assert_ne!(a, csv(run_experiment(&other).unwrap()));
}
