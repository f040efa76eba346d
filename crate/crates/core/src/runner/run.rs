//! Time integration loop, output files and run metadata.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analytic::initial_state;
use crate::diagnostics::{energy, l2_norm, linf_norm, mass, max_xline_mass, DiagnosticsRow, EnergyOperators};
use crate::field::Field;
use crate::linalg::LinalgError;
use crate::stepper::{build_stepper, CnPreconditioner, SchemeKind, StepError, StepReport};

use super::config::ExperimentConfig;
use super::guard::{blowup_guard, GuardDecision, GuardPolicy, HaltReason};
use super::snapshot::write_snapshot;
use super::RunError;

/// How a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Completed,
    /// The guard fired on the state at `time`.
    Halted { reason: HaltReason, step: u64, time: f64 },
    /// A step failed to converge; `time` is that of the last good state.
    Diverged { step: u64, time: f64, message: String },
}

impl Termination {
    pub fn is_terminal_event(&self) -> bool {
        !matches!(self, Termination::Completed)
    }

    /// Time at which the run stopped early.
    pub fn event_time(&self) -> Option<f64> {
        match self {
            Termination::Completed => None,
            Termination::Halted { time, .. } | Termination::Diverged { time, .. } => Some(*time),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Termination::Completed => "completed".into(),
            Termination::Halted { reason, time, .. } => format!("{} at t={time}", reason.as_str()),
            Termination::Diverged { time, message, .. } => format!("divergence at t={time}: {message}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub termination: Termination,
    /// Steps completed.
    pub steps: u64,
    pub final_time: f64,
    /// Rows emitted at the diagnostics cadence, plus the first and last.
    pub rows: Vec<DiagnosticsRow>,
    pub final_state: Field,
}

impl RunOutcome {
    /// 0 on completion, 3 on a blow-up or divergence event.
    pub fn exit_code(&self) -> i32 {
        if self.termination.is_terminal_event() {
            3
        } else {
            0
        }
    }
}

/// Receives the run's output stream.
pub trait RunObserver {
    fn row(&mut self, row: &DiagnosticsRow) -> Result<(), RunError>;
    fn snapshot(&mut self, state: &Field, step: u64, time: f64) -> Result<(), RunError>;
}

/// Discards everything.
pub struct NullObserver;

impl RunObserver for NullObserver {
    fn row(&mut self, _: &DiagnosticsRow) -> Result<(), RunError> {
        Ok(())
    }
    fn snapshot(&mut self, _: &Field, _: u64, _: f64) -> Result<(), RunError> {
        Ok(())
    }
}

fn cheap_row(u: &Field, step: u64, time: f64, report: &StepReport) -> DiagnosticsRow {
    DiagnosticsRow {
        step,
        time,
        mass: mass(u),
        l2: l2_norm(u),
        linf: linf_norm(u),
        energy: f64::NAN,
        max_xline_mass: max_xline_mass(u),
        picard_iters: report.picard_iters,
        gmres_iters: report.gmres_total_iters,
    }
}

/// Failures that mean the solution left the solver's reach rather than a bug.
fn divergence_message(e: &StepError) -> Option<String> {
    match e {
        StepError::PicardDiverged { .. }
        | StepError::GmresFailed(LinalgError::NoConvergence { .. })
        | StepError::Linalg(LinalgError::NoConvergence { .. }) => Some(e.to_string()),
        _ => None,
    }
}

struct Recorder<'a> {
    observer: &'a mut dyn RunObserver,
    rows: Vec<DiagnosticsRow>,
    last_snapshot: Option<u64>,
}

impl Recorder<'_> {
    fn row(&mut self, mut row: DiagnosticsRow, u: &Field, cfg: &ExperimentConfig, ops: &EnergyOperators) -> Result<(), RunError> {
        row.energy = energy(u, &cfg.model, ops);
        self.observer.row(&row)?;
        self.rows.push(row);
        Ok(())
    }

    fn snapshot(&mut self, u: &Field, step: u64, time: f64) -> Result<(), RunError> {
        self.observer.snapshot(u, step, time)?;
        self.last_snapshot = Some(step);
        Ok(())
    }
}

/// Integrate the configured experiment, streaming diagnostics and snapshots
/// to `observer`. The first and last states always get a row and a snapshot.
pub fn simulate(cfg: &ExperimentConfig, observer: &mut dyn RunObserver) -> Result<RunOutcome, RunError> {
    cfg.validate()?;
    let grid = cfg.grid.build()?;
    let stepper = build_stepper(&grid, &cfg.model, &cfg.scheme, cfg.time.dt)?;
    let ops = EnergyOperators::new(&grid, cfg.scheme.kind)?;
    let mut u = initial_state(&cfg.initial.state, &grid, &cfg.initial.params)?;

    let n_steps = cfg.time.n_steps();
    let dt = cfg.time.dt;
    let (diag_every, snap_every) = (cfg.outputs.diag_every, cfg.outputs.snapshot_every);
    let mut rec = Recorder { observer, rows: Vec::new(), last_snapshot: None };

    let first = cheap_row(&u, 0, 0.0, &StepReport::default());
    let policy = GuardPolicy::resolve(cfg.guard.linf_factor, cfg.guard.linf_ceiling, &first)
        .with_l2_drift(cfg.guard.l2_drift);
    rec.row(first, &u, cfg, &ops)?;
    rec.snapshot(&u, 0, 0.0)?;

    let mut termination = Termination::Completed;
    let mut step = 0;
    while step < n_steps {
        let time = (step + 1) as f64 * dt;
        let (next, report) = match stepper.step(&u) {
            Ok(r) => r,
            Err(e) => match divergence_message(&e) {
                Some(message) => {
                    termination = Termination::Diverged { step: step + 1, time: step as f64 * dt, message };
                    break;
                }
                None => return Err(e.into()),
            },
        };
        step += 1;
        u = next;
        let row = cheap_row(&u, step, time, &report);
        if let GuardDecision::Halt(reason) = blowup_guard(&row, &policy) {
            termination = Termination::Halted { reason, step, time };
            rec.row(row, &u, cfg, &ops)?;
            break;
        }
        if step % diag_every == 0 || step == n_steps {
            rec.row(row, &u, cfg, &ops)?;
        }
        if snap_every > 0 && step % snap_every == 0 {
            rec.snapshot(&u, step, time)?;
        }
    }
    let final_time = step as f64 * dt;
    if rec.rows.last().map(|r| r.step) != Some(step) {
        let row = cheap_row(&u, step, final_time, &StepReport::default());
        rec.row(row, &u, cfg, &ops)?;
    }
    if rec.last_snapshot != Some(step) {
        rec.snapshot(&u, step, final_time)?;
    }
    Ok(RunOutcome { termination, steps: step, final_time, rows: rec.rows, final_state: u })
}

/// Writes `diagnostics.csv` and `snapshots/step_NNNNNNNN.kps1` under a
/// directory.
pub struct FileObserver {
    csv: BufWriter<File>,
    snapshot_dir: PathBuf,
}

impl FileObserver {
    pub fn create(out_dir: &Path) -> Result<Self, RunError> {
        let snapshot_dir = out_dir.join("snapshots");
        std::fs::create_dir_all(&snapshot_dir)?;
        let mut csv = BufWriter::new(File::create(out_dir.join("diagnostics.csv"))?);
        writeln!(csv, "{}", DiagnosticsRow::CSV_HEADER)?;
        Ok(Self { csv, snapshot_dir })
    }

    pub fn finish(mut self) -> Result<(), RunError> {
        self.csv.flush()?;
        Ok(())
    }
}

impl RunObserver for FileObserver {
    fn row(&mut self, row: &DiagnosticsRow) -> Result<(), RunError> {
        writeln!(self.csv, "{}", row.to_csv())?;
        Ok(())
    }

    fn snapshot(&mut self, state: &Field, step: u64, time: f64) -> Result<(), RunError> {
        write_snapshot(state, time, &self.snapshot_dir.join(format!("step_{step:08}.kps1")))?;
        Ok(())
    }
}

#[derive(Serialize)]
struct GridMeta {
    lx: f64,
    ly: f64,
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    bc_x: &'static str,
    bc_y: &'static str,
}

#[derive(Serialize)]
struct SchemeMeta {
    name: String,
    kind: &'static str,
    order: Option<u32>,
    picard_tol: f64,
    picard_max_iter: usize,
    gmres_tol: f64,
    gmres_max_iter: usize,
    gmres_restart: usize,
    preconditioner: &'static str,
    dealias: bool,
}

#[derive(Serialize)]
struct ZaitsevMeta {
    alpha: f64,
    delta: f64,
    beta: f64,
    beta_derived: f64,
    omega: f64,
    c: f64,
    c_reference: Option<f64>,
    /// `(c - c_reference) / c_reference`
    c_relative_discrepancy: Option<f64>,
}

#[derive(Serialize)]
struct TerminationMeta {
    status: &'static str,
    reason: Option<String>,
    steps: u64,
    time: f64,
}

#[derive(Serialize)]
struct Metadata {
    experiment: String,
    solver_version: &'static str,
    snapshot_format: &'static str,
    grid: GridMeta,
    model: BTreeMap<&'static str, f64>,
    scheme: SchemeMeta,
    time: BTreeMap<&'static str, f64>,
    n_steps: u64,
    initial_state: String,
    initial_params: BTreeMap<String, f64>,
    zaitsev: Option<ZaitsevMeta>,
    diag_every: u64,
    snapshot_every: u64,
    guard_linf_factor: f64,
    guard_linf_ceiling: Option<f64>,
    guard_l2_drift: Option<f64>,
    termination: TerminationMeta,
}

fn metadata(cfg: &ExperimentConfig, outcome: Option<&RunOutcome>) -> Result<Metadata, RunError> {
    let grid = cfg.grid.build()?;
    let (kind, order) = match cfg.scheme.kind {
        SchemeKind::Compact { order } => ("compact", Some(order)),
        SchemeKind::Spectral => ("spectral", None),
        SchemeKind::Mixed { order_y } => ("mixed", Some(order_y)),
    };
    let zaitsev = match cfg.zaitsev_params() {
        Some(z) => {
            let z = z?;
            let derived = crate::analytic::ZaitsevParams::new(z.alpha, z.delta)?;
            let c_reference = cfg.initial.params.get("c_reference").copied();
            Some(ZaitsevMeta {
                alpha: z.alpha,
                delta: z.delta,
                beta: z.beta,
                beta_derived: derived.beta,
                omega: z.omega,
                c: z.c,
                c_reference,
                c_relative_discrepancy: c_reference.map(|r| (z.c - r) / r),
            })
        }
        None => None,
    };
    let termination = match outcome {
        None => TerminationMeta { status: "running", reason: None, steps: 0, time: 0.0 },
        Some(o) => TerminationMeta {
            status: match o.termination {
                Termination::Completed => "completed",
                Termination::Halted { .. } => "halted",
                Termination::Diverged { .. } => "diverged",
            },
            reason: o.termination.is_terminal_event().then(|| o.termination.describe()),
            steps: o.steps,
            time: o.final_time,
        },
    };
    Ok(Metadata {
        experiment: cfg.experiment.clone(),
        solver_version: env!("CARGO_PKG_VERSION"),
        snapshot_format: "KPS1 v1",
        grid: GridMeta {
            lx: grid.lx(),
            ly: grid.ly(),
            nx: grid.nx(),
            ny: grid.ny(),
            hx: grid.hx(),
            hy: grid.hy(),
            bc_x: grid.bc_x().name(),
            bc_y: grid.bc_y().name(),
        },
        model: BTreeMap::from([("p", cfg.model.p as f64), ("lambda", cfg.model.lambda)]),
        scheme: SchemeMeta {
            name: cfg.scheme.kind.name(),
            kind,
            order,
            picard_tol: cfg.scheme.picard.tol,
            picard_max_iter: cfg.scheme.picard.max_iter,
            gmres_tol: cfg.scheme.gmres.rel_tol,
            gmres_max_iter: cfg.scheme.gmres.max_iter,
            gmres_restart: cfg.scheme.gmres.restart,
            preconditioner: match cfg.scheme.preconditioner {
                CnPreconditioner::Diagonal => "diagonal",
                CnPreconditioner::Modal => "modal",
            },
            dealias: cfg.scheme.dealias,
        },
        time: BTreeMap::from([("dt", cfg.time.dt), ("t_end", cfg.time.t_end)]),
        n_steps: cfg.time.n_steps(),
        initial_state: cfg.initial.state.clone(),
        initial_params: cfg.initial.params.clone(),
        zaitsev,
        diag_every: cfg.outputs.diag_every,
        snapshot_every: cfg.outputs.snapshot_every,
        guard_linf_factor: cfg.guard.linf_factor,
        guard_linf_ceiling: cfg.guard.linf_ceiling,
        guard_l2_drift: cfg.guard.l2_drift,
        termination,
    })
}

fn write_metadata(path: &Path, cfg: &ExperimentConfig, outcome: Option<&RunOutcome>) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(&metadata(cfg, outcome)?)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Run an experiment, writing `diagnostics.csv`, `metadata.json` and
/// snapshots into `cfg.outputs.out_dir`.
///
/// Blow-up and divergence are reported through [`RunOutcome::termination`],
/// not as errors.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    cfg.validate()?;
    let dir = &cfg.outputs.out_dir;
    let mut observer = FileObserver::create(dir)?;
    let meta_path = dir.join("metadata.json");
    write_metadata(&meta_path, cfg, None)?;
    let outcome = simulate(cfg, &mut observer)?;
    observer.finish()?;
    write_metadata(&meta_path, cfg, Some(&outcome))?;
    Ok(outcome)
}
