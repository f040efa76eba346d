use std::f64::consts::PI;

use super::*;
use crate::diagnostics::DiagnosticsRow;
use crate::field::{BoundaryCondition, Field, Grid2D};
use crate::stepper::{CnPreconditioner, SchemeKind};

const SMALL: &str = "\
experiment = gaussian-conservation
[grid]
lx = 8
ly = 4
nx = 33
ny = 16
[model]
p = 1
lambda = -1
[scheme]
kind = compact
order = 4
[time]
dt = 1e-3
t_end = 0.02
[initial]
state = gaussian-packet
a = 1
wx = 0.5
wy = 1.0
[outputs]
diag_every = 5
snapshot_every = 10
";

fn small() -> ExperimentConfig {
    ExperimentConfig::parse(SMALL).unwrap()
}

fn with_line(text: &str, find: &str, replace: &str) -> String {
    assert!(text.contains(find), "{find}");
    text.replacen(find, replace, 1)
}

fn validation_field(text: &str) -> String {
    match ExperimentConfig::parse(text) {
        Err(ConfigError::Validation { field, .. }) => field,
        other => panic!("expected a validation error, got {other:?}"),
    }
}

fn parse_line(text: &str) -> usize {
    match ExperimentConfig::parse(text) {
        Err(ConfigError::Parse { line, .. }) => line,
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn registry_configs_parse() {
    let names: Vec<_> = EXPERIMENTS.iter().map(|e| e.name).collect();
    assert_eq!(
        names,
        ["zaitsev-accuracy", "gaussian-conservation", "zaitsev-perturbation", "line-instability", "blowup"]
    );
    for e in &EXPERIMENTS {
        let cfg = e.load().unwrap_or_else(|err| panic!("{}: {err}", e.name));
        assert_eq!(cfg.experiment, e.name);
    }
}

#[test]
fn shipped_settings() {
    let z = experiment("zaitsev-accuracy").unwrap().load().unwrap();
    assert_eq!((z.grid.lx, z.grid.ly, z.grid.nx, z.grid.ny), (89.6, 21.0, 601, 160));
    assert_eq!(z.time.dt, 1e-4);
    assert_eq!(z.initial.params["delta"], PI / 21.0);
    assert_eq!(z.scheme.kind, SchemeKind::Compact { order: 6 });

    let b = experiment("blowup").unwrap().load().unwrap();
    assert_eq!((b.model.p, b.model.lambda), (2, -1.0));
    assert_eq!((b.grid.lx, b.grid.ly, b.grid.nx, b.grid.ny), (10.0, 2.5, 201, 50));
    assert_eq!(b.time.dt, 1e-6);
    assert_eq!(b.scheme.kind, SchemeKind::Compact { order: 6 });
    assert_eq!(b.initial.state, "gaussian-xx");

    let g = experiment("gaussian-conservation").unwrap().load().unwrap();
    assert_eq!((g.grid.nx, g.grid.ny), (501, 100));
    assert_eq!(g.initial.params["wy"], 7.5);

    let p = experiment("zaitsev-perturbation").unwrap().load().unwrap();
    assert_eq!(p.initial.params["beta"], 0.5);
    assert_eq!(p.scheme.preconditioner, CnPreconditioner::Modal);
}

#[test]
fn defaults_are_applied() {
    let c = small();
    assert_eq!(c.grid.bc_y, BoundaryCondition::Periodic);
    assert_eq!(c.scheme.picard.tol, 1e-12);
    assert_eq!(c.scheme.gmres.restart, 60);
    assert_eq!(c.scheme.preconditioner, CnPreconditioner::Diagonal);
    assert_eq!(c.outputs.out_dir, std::path::PathBuf::from("out/gaussian-conservation"));
    assert_eq!(c.guard.linf_factor, 1e4);
    assert_eq!(c.time.n_steps(), 20);
}

#[test]
fn missing_dt_names_the_field() {
    assert_eq!(validation_field(&with_line(SMALL, "dt = 1e-3\n", "")), "time.dt");
    assert_eq!(validation_field(&with_line(SMALL, "experiment = gaussian-conservation\n", "")), "experiment");
    assert_eq!(validation_field(&with_line(SMALL, "a = 1\n", "")), "initial.a");
}

#[test]
fn parse_errors_carry_line_numbers() {
    assert_eq!(parse_line(&with_line(SMALL, "lx = 8", "lx = 8x")), 3);
    assert_eq!(parse_line(&with_line(SMALL, "lx = 8", "lx = nan")), 3);
    assert_eq!(parse_line(&with_line(SMALL, "[model]", "[modle]")), 7);
    assert_eq!(parse_line(&with_line(SMALL, "p = 1", "p 1")), 8);
    assert_eq!(parse_line(&with_line(SMALL, "p = 1", "p = 1.5")), 8);
    assert_eq!(parse_line(&with_line(SMALL, "p = 1", "Nx = 1")), 8);
    assert_eq!(parse_line(&with_line(SMALL, "lambda = -1", "p = 2")), 9);
    assert_eq!(parse_line(&with_line(SMALL, "[grid]", "[grid")), 2);
}

#[test]
fn numbers_and_comments() {
    let text = with_line(SMALL, "dt = 1e-3", "dt = 0.001   # comment");
    let text = with_line(&text, "t_end = 0.02", "t_end = 2E-2");
    let text = with_line(&text, "nx = 33", "nx = 3.3e1");
    let c = ExperimentConfig::parse(&text).unwrap();
    assert_eq!((c.time.dt, c.time.t_end, c.grid.nx), (1e-3, 0.02, 33));
}

#[test]
fn incompatible_settings_are_rejected() {
    assert_eq!(validation_field(&with_line(SMALL, "nx = 33", "nx = 32")), "grid.nx");
    let spectral = with_line(SMALL, "kind = compact\norder = 4", "kind = spectral");
    assert_eq!(validation_field(&spectral), "grid.nx");
    let spectral = with_line(&spectral, "nx = 33", "nx = 32");
    ExperimentConfig::parse(&spectral).unwrap();
    assert_eq!(validation_field(&with_line(&spectral, "[model]", "bc_y = neumann\n[model]")), "grid.bc_y");
    assert_eq!(validation_field(&with_line(SMALL, "order = 4", "order = 8")), "scheme.order");
    assert_eq!(validation_field(&with_line(SMALL, "lambda = -1", "lambda = 0.5")), "model.lambda");
    assert_eq!(validation_field(&with_line(SMALL, "t_end = 0.02", "t_end = 0.0205")), "time.t_end");
    assert_eq!(validation_field(&with_line(SMALL, "wy = 1.0", "wy = 1.0\nbogus = 2")), "initial.bogus");
    assert_eq!(validation_field(&with_line(SMALL, "[time]", "extra = 1\n[time]")), "scheme.extra");
    assert_eq!(validation_field(&with_line(SMALL, "[time]", "preconditioner = ilu\n[time]")), "scheme.preconditioner");
    assert_eq!(validation_field(&with_line(SMALL, "state = gaussian-packet", "state = lump")), "initial.state");
}

#[test]
fn snapshot_round_trip_is_bit_exact() {
    let grid = Grid2D::periodic(3.0, 2.0, 7, 5).unwrap();
    let f = Field::from_fn(grid, |x, y| (x * 1.3).sin() * y.exp() + 1e-300).unwrap();
    let bytes = Snapshot::from_field(&f, 0.125).encode();
    assert_eq!(&bytes[..4], b"KPS1");
    assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
    assert_eq!(bytes.len(), 4 + 12 + 24 + 35 * 8);
    let s = Snapshot::decode(&bytes).unwrap();
    assert_eq!(s.time, 0.125);
    let back = s.to_field(BoundaryCondition::Periodic).unwrap();
    assert!(back.values().iter().zip(f.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
    assert_eq!(back.grid(), f.grid());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.kps1");
    write_snapshot(&f, 0.125, &path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), bytes);
    assert_eq!(read_snapshot(&path).unwrap(), s);
}

#[test]
fn snapshot_errors() {
    let grid = Grid2D::periodic(1.0, 1.0, 8, 8).unwrap();
    let mut bytes = Snapshot::from_field(&Field::zeros(grid), 0.0).encode();
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(matches!(Snapshot::decode(&bad), Err(SnapshotError::BadMagic)));
    assert!(matches!(Snapshot::decode(b"KP"), Err(SnapshotError::BadMagic)));
    assert!(matches!(Snapshot::decode(&bytes[..20]), Err(SnapshotError::TruncatedFile { .. })));
    bytes.pop();
    assert!(matches!(
        Snapshot::decode(&bytes),
        Err(SnapshotError::TruncatedFile { expected: 512, actual: 511 })
    ));
    // header claims more rows than the payload holds
    let mut wrong = Snapshot::from_field(&Field::zeros(grid), 0.0).encode();
    wrong[12..16].copy_from_slice(&9u32.to_le_bytes());
    assert!(matches!(Snapshot::decode(&wrong), Err(SnapshotError::TruncatedFile { .. })));
}

#[test]
fn guard_decisions() {
    let first = DiagnosticsRow { linf: 2.0, l2: 1.0, ..Default::default() };
    let policy = GuardPolicy::resolve(1e4, None, &first);
    assert_eq!(policy.linf_ceiling, 2e4);
    let row = DiagnosticsRow { linf: 3.0, l2: 1.0, ..Default::default() };
    assert_eq!(blowup_guard(&row, &policy), GuardDecision::Continue);
    let nan = DiagnosticsRow { l2: f64::NAN, ..row };
    assert_eq!(blowup_guard(&nan, &policy), GuardDecision::Halt(HaltReason::NonFinite));
    let big = DiagnosticsRow { linf: 2.1e4, ..row };
    assert_eq!(blowup_guard(&big, &policy), GuardDecision::Halt(HaltReason::BlowUp));
    assert_eq!(GuardPolicy::resolve(1e4, Some(5.0), &first).linf_ceiling, 5.0);
    let drifted = DiagnosticsRow { l2: 1.002, ..row };
    assert_eq!(blowup_guard(&drifted, &policy), GuardDecision::Continue);
    let strict = policy.with_l2_drift(Some(1e-3));
    assert_eq!(blowup_guard(&drifted, &strict), GuardDecision::Halt(HaltReason::ResolutionLoss));
    assert_eq!(blowup_guard(&DiagnosticsRow { l2: 1.0005, ..row }, &strict), GuardDecision::Continue);
}

fn csv_rows(path: &std::path::Path) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), DiagnosticsRow::CSV_HEADER);
    lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn zero_state_run_writes_zero_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::parse(&with_line(SMALL, "state = gaussian-packet\na = 1\nwx = 0.5\nwy = 1.0", "state = zero"))
        .unwrap();
    cfg.outputs.out_dir = dir.path().to_path_buf();
    let outcome = run_experiment(&cfg).unwrap();
    assert_eq!(outcome.exit_code(), 0);
    assert_eq!(outcome.steps, 20);
    let rows = csv_rows(&dir.path().join("diagnostics.csv"));
    assert_eq!(rows.iter().map(|r| r[0] as u64).collect::<Vec<_>>(), [0, 5, 10, 15, 20]);
    for r in &rows {
        assert!(r[2..7].iter().all(|&v| v == 0.0), "{r:?}");
    }
    let snaps: Vec<_> = std::fs::read_dir(dir.path().join("snapshots")).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(snaps.len(), 3);
    let last = read_snapshot(&dir.path().join("snapshots/step_00000020.kps1")).unwrap();
    assert!((last.time - 0.02).abs() < 1e-15);
}

#[test]
fn metadata_records_resolved_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let text = with_line(SMALL, "experiment = gaussian-conservation", "experiment = zaitsev-accuracy");
    let text = with_line(
        &text,
        "state = gaussian-packet\na = 1\nwx = 0.5\nwy = 1.0",
        "state = zaitsev\nalpha = 0.5\ndelta = 0.7853981633974483\nc_reference = 0.76",
    );
    let mut cfg = ExperimentConfig::parse(&text).unwrap();
    cfg.outputs.out_dir = dir.path().to_path_buf();
    cfg.time.t_end = 0.005;
    run_experiment(&cfg).unwrap();
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["experiment"], "zaitsev-accuracy");
    assert_eq!(meta["grid"]["nx"], 33);
    assert_eq!(meta["scheme"]["name"], "compact-4");
    assert_eq!(meta["n_steps"], 5);
    assert_eq!(meta["termination"]["status"], "completed");
    let z = crate::analytic::ZaitsevParams::new(0.5, PI / 4.0).unwrap();
    let close = |key: &str, want: f64| {
        let got = meta["zaitsev"][key].as_f64().unwrap();
        assert!((got - want).abs() <= 1e-14 * want.abs(), "{key}: {got} vs {want}");
    };
    close("c", z.c);
    close("omega", z.omega);
    close("beta", z.beta);
    close("c_relative_discrepancy", (z.c - 0.76) / 0.76);
}

#[test]
fn guard_halt_is_a_terminal_event() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small();
    cfg.outputs.out_dir = dir.path().to_path_buf();
    // the packet steepens, so a ceiling at the initial sup norm trips
    cfg.guard.linf_ceiling = Some(1e-3);
    let outcome = run_experiment(&cfg).unwrap();
    assert_eq!(outcome.exit_code(), 3);
    assert!(matches!(outcome.termination, Termination::Halted { reason: HaltReason::BlowUp, step: 1, .. }));
    let meta = std::fs::read_to_string(dir.path().join("metadata.json")).unwrap();
    assert!(meta.contains("\"halted\"") && meta.contains("blow-up at t=0.001"));
    assert!(dir.path().join("snapshots/step_00000001.kps1").exists());
}

#[test]
fn divergence_is_a_terminal_event() {
    let mut cfg = small();
    cfg.model.p = 2;
    cfg.initial.params.insert("a".into(), 400.0);
    cfg.time.dt = 0.01;
    cfg.time.t_end = 0.2;
    let outcome = simulate(&cfg, &mut NullObserver).unwrap();
    assert!(matches!(outcome.termination, Termination::Diverged { .. }), "{:?}", outcome.termination);
    assert_eq!(outcome.exit_code(), 3);
    assert_eq!(outcome.rows.last().unwrap().step, outcome.steps);
}

#[test]
fn runs_are_byte_identical() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small();
        cfg.outputs.out_dir = dir.path().to_path_buf();
        run_experiment(&cfg).unwrap();
        let mut files = Vec::new();
        for name in ["diagnostics.csv", "metadata.json", "snapshots/step_00000010.kps1", "snapshots/step_00000020.kps1"] {
            files.push(std::fs::read(dir.path().join(name)).unwrap());
        }
        files
    };
    assert_eq!(run(), run());
}

#[test]
fn exit_codes() {
    let err: RunError = ConfigError::validation("time.dt", "missing").into();
    assert_eq!(err.exit_code(), 2);
    assert_eq!(RunError::Internal("x".into()).exit_code(), 1);
}

#[test]
fn convergence_sizes_follow_parity() {
    let cfg = small();
    assert_eq!(default_sizes(&cfg, RefineAxis::X), [33, 49, 67]);
    assert_eq!(default_sizes(&cfg, RefineAxis::Y), [16, 24, 32]);
    assert!(matches!(
        convergence_sweep(&cfg, RefineAxis::Y, &[16, 24]),
        Err(RunError::Config(ConfigError::Validation { .. }))
    ));
    assert_eq!("y".parse::<RefineAxis>(), Ok(RefineAxis::Y));
    assert!("z".parse::<RefineAxis>().is_err());
}

#[test]
fn spectral_x_sweep_converges_fast() {
    let text = "\
experiment = zaitsev-accuracy
[grid]
lx = 30
ly = 3.141592653589793
nx = 64
ny = 16
[scheme]
kind = spectral
[time]
dt = 1e-3
t_end = 0.01
[initial]
state = zaitsev
alpha = 1
delta = 2
";
    let cfg = ExperimentConfig::parse(text).unwrap();
    let report = convergence_sweep(&cfg, RefineAxis::X, &[128, 160, 192]).unwrap();
    assert_eq!(report.points.len(), 3);
    // exponential convergence: the local slope keeps steepening
    let s = &report.pairwise_slopes;
    assert!(s[1] > s[0] + 1.0 && s[0] > 4.0, "{report:?}");
}
