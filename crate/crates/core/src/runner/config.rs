//! Sectioned `key = value` experiment configuration.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use crate::analytic::{ZaitsevParams, INITIAL_STATES};
use crate::field::{BoundaryCondition, FieldError, Grid2D};
use crate::linalg::GmresParams;
use crate::stepper::{CnPreconditioner, ModelParams, PicardParams, SchemeConfig, SchemeKind};

use super::registry;
use super::ConfigError;

/// Reference text for the configuration format, with every default.
pub const CONFIG_REFERENCE: &str = "\
Configuration files hold `key = value` pairs in sections; `#` starts a comment.

experiment = NAME            registered experiment (see list-experiments)
[grid]     lx, ly            half-widths of [-lx, lx] x [-ly, ly]
           nx, ny            points per axis
           bc_y              periodic | dirichlet | neumann   (periodic)
[model]    p                 nonlinearity power               (1)
           lambda            -1 (KP-I) or 1 (KP-II)            (-1)
[scheme]   kind              compact | spectral | mixed
           order             2 | 4 | 6 (compact, mixed)
           picard_tol        1e-12      picard_max_iter  50
           gmres_tol         1e-10      gmres_max_iter   500
           gmres_restart     60
           preconditioner    diagonal | modal                 (diagonal)
           dealias           true | false (spectral)          (false)
[time]     dt, t_end         t_end must be a whole number of steps
[initial]  state             zaitsev | gaussian-packet | perturbed-zaitsev |
                             perturbed-line | gaussian-xx | zero
           other keys        numeric state parameters
[outputs]  diag_every        10         snapshot_every   100 (0: first and last only)
           out_dir           out/<experiment>
[guard]    linf_factor       1e4        halt when linf exceeds factor * initial linf
           linf_ceiling      absolute ceiling, overrides linf_factor
           l2_drift          halt when |l2 - l2(0)| / l2(0) exceeds this  (off)
";

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub lx: f64,
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
    pub bc_y: BoundaryCondition,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid2D, FieldError> {
        Grid2D::new(self.lx, self.ly, self.nx, self.ny, BoundaryCondition::Periodic, self.bc_y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeParams {
    pub dt: f64,
    pub t_end: f64,
}

impl TimeParams {
    pub fn n_steps(&self) -> u64 {
        (self.t_end / self.dt).round() as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialSpec {
    pub state: String,
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub diag_every: u64,
    pub snapshot_every: u64,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardSpec {
    pub linf_factor: f64,
    pub linf_ceiling: Option<f64>,
    pub l2_drift: Option<f64>,
}

impl Default for GuardSpec {
    fn default() -> Self {
        Self { linf_factor: 1e4, linf_ceiling: None, l2_drift: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub grid: GridSpec,
    pub model: ModelParams,
    pub scheme: SchemeConfig,
    pub time: TimeParams,
    pub initial: InitialSpec,
    pub outputs: OutputSpec,
    pub guard: GuardSpec,
}

const SECTIONS: [&str; 7] = ["grid", "model", "scheme", "time", "initial", "outputs", "guard"];

/// Parameters each initial state accepts, required ones first.
fn state_keys(state: &str) -> (&'static [&'static str], &'static [&'static str]) {
    match state {
        "zaitsev" => (&["alpha", "delta"], &["beta", "t0", "c_reference"]),
        "gaussian-packet" => (&["a", "wx", "wy"], &[]),
        "perturbed-zaitsev" => (&["alpha", "delta"], &["beta", "shift", "amplitude"]),
        "perturbed-line" => (&[], &["amplitude", "epsilon"]),
        "gaussian-xx" => (&[], &["prefactor"]),
        _ => (&[], &[]),
    }
}

struct Entry {
    line: usize,
    value: String,
    used: bool,
}

/// Raw sectioned key/value pairs with their line numbers.
struct Raw {
    entries: HashMap<(String, String), Entry>,
}

fn valid_key(k: &str) -> bool {
    let mut chars = k.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

fn parse_number(s: &str) -> Option<f64> {
    let ok = !s.is_empty()
        && s.chars().all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E'))
        && s.chars().any(|c| c.is_ascii_digit());
    if !ok {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

impl Raw {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = HashMap::new();
        let mut section = String::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::parse(line, "unterminated section header"))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(ConfigError::parse(line, format!("unknown section [{name}]")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::parse(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if !valid_key(key) {
                return Err(ConfigError::parse(line, format!("invalid key {key:?}")));
            }
            if value.is_empty() {
                return Err(ConfigError::parse(line, format!("missing value for {key:?}")));
            }
            let entry = Entry { line, value: value.to_string(), used: false };
            if entries.insert((section.clone(), key.to_string()), entry).is_some() {
                return Err(ConfigError::parse(line, format!("duplicate key {key:?}")));
            }
        }
        Ok(Self { entries })
    }

    fn take(&mut self, section: &str, key: &str) -> Option<(usize, String)> {
        let e = self.entries.get_mut(&(section.to_string(), key.to_string()))?;
        e.used = true;
        Some((e.line, e.value.clone()))
    }

    fn string(&mut self, section: &str, key: &str) -> Option<String> {
        self.take(section, key).map(|(_, v)| v)
    }

    fn number(&mut self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.take(section, key) {
            None => Ok(None),
            Some((line, v)) => parse_number(&v)
                .map(Some)
                .ok_or_else(|| ConfigError::parse(line, format!("{key}: {v:?} is not a finite number"))),
        }
    }

    fn integer(&mut self, section: &str, key: &str) -> Result<Option<u64>, ConfigError> {
        match self.take(section, key) {
            None => Ok(None),
            Some((line, v)) => match parse_number(&v) {
                Some(x) if x >= 0.0 && x.fract() == 0.0 && x <= 9.007_199_254_740_992e15 => Ok(Some(x as u64)),
                _ => Err(ConfigError::parse(line, format!("{key}: {v:?} is not a non-negative integer"))),
            },
        }
    }

    fn boolean(&mut self, section: &str, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.take(section, key) {
            None => Ok(None),
            Some((_, v)) if v == "true" => Ok(Some(true)),
            Some((_, v)) if v == "false" => Ok(Some(false)),
            Some((line, v)) => Err(ConfigError::parse(line, format!("{key}: expected true or false, got {v:?}"))),
        }
    }

    /// Numeric keys of a section not consumed so far.
    fn remaining_numbers(&mut self, section: &str) -> Result<BTreeMap<String, f64>, ConfigError> {
        let keys: Vec<String> = self
            .entries
            .iter()
            .filter(|((s, _), e)| s == section && !e.used)
            .map(|((_, k), _)| k.clone())
            .collect();
        let mut out = BTreeMap::new();
        for k in keys {
            let v = self.number(section, &k)?.expect("key present");
            out.insert(k, v);
        }
        Ok(out)
    }

    /// Reject keys nobody asked for, first by line number.
    fn check_unused(&self) -> Result<(), ConfigError> {
        let first = self
            .entries
            .iter()
            .filter(|(_, e)| !e.used)
            .min_by_key(|(_, e)| e.line);
        match first {
            None => Ok(()),
            Some(((s, k), _)) => {
                let field = if s.is_empty() { k.clone() } else { format!("{s}.{k}") };
                Err(ConfigError::validation(field, "unknown key"))
            }
        }
    }
}

fn required<T>(v: Option<T>, field: &str) -> Result<T, ConfigError> {
    v.ok_or_else(|| ConfigError::validation(field, "missing"))
}

fn to_usize(v: u64) -> usize {
    usize::try_from(v).unwrap_or(usize::MAX)
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    /// Parse and validate config text.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = Raw::parse(text)?;
        let experiment = required(raw.string("", "experiment"), "experiment")?;

        let bc_y = match raw.string("grid", "bc_y").as_deref() {
            None | Some("periodic") => BoundaryCondition::Periodic,
            Some("dirichlet") => BoundaryCondition::Dirichlet0,
            Some("neumann") => BoundaryCondition::Neumann0,
            Some(other) => return Err(ConfigError::validation("grid.bc_y", format!("unknown boundary {other:?}"))),
        };
        let grid = GridSpec {
            lx: required(raw.number("grid", "lx")?, "grid.lx")?,
            ly: required(raw.number("grid", "ly")?, "grid.ly")?,
            nx: to_usize(required(raw.integer("grid", "nx")?, "grid.nx")?),
            ny: to_usize(required(raw.integer("grid", "ny")?, "grid.ny")?),
            bc_y,
        };

        let p = raw.integer("model", "p")?.unwrap_or(1);
        let model = ModelParams {
            p: u32::try_from(p).map_err(|_| ConfigError::validation("model.p", "too large"))?,
            lambda: raw.number("model", "lambda")?.unwrap_or(-1.0),
        };

        let kind_name = required(raw.string("scheme", "kind"), "scheme.kind")?;
        let order_raw = raw.integer("scheme", "order")?;
        let order = || -> Result<u32, ConfigError> {
            let o = required(order_raw, "scheme.order")?;
            u32::try_from(o).map_err(|_| ConfigError::validation("scheme.order", "too large"))
        };
        let kind = match kind_name.as_str() {
            "compact" => SchemeKind::Compact { order: order()? },
            "mixed" => SchemeKind::Mixed { order_y: order()? },
            "spectral" => {
                if order_raw.is_some() {
                    return Err(ConfigError::validation("scheme.order", "not used by the spectral scheme"));
                }
                SchemeKind::Spectral
            }
            other => return Err(ConfigError::validation("scheme.kind", format!("unknown scheme {other:?}"))),
        };
        let defaults = (PicardParams::default(), GmresParams::default());
        let mut scheme = SchemeConfig::new(kind);
        scheme.picard = PicardParams {
            tol: raw.number("scheme", "picard_tol")?.unwrap_or(defaults.0.tol),
            max_iter: to_usize(raw.integer("scheme", "picard_max_iter")?.unwrap_or(defaults.0.max_iter as u64)),
        };
        scheme.gmres = GmresParams {
            rel_tol: raw.number("scheme", "gmres_tol")?.unwrap_or(defaults.1.rel_tol),
            max_iter: to_usize(raw.integer("scheme", "gmres_max_iter")?.unwrap_or(defaults.1.max_iter as u64)),
            restart: to_usize(raw.integer("scheme", "gmres_restart")?.unwrap_or(defaults.1.restart as u64)),
        };
        scheme.preconditioner = match raw.string("scheme", "preconditioner").as_deref() {
            None | Some("diagonal") => CnPreconditioner::Diagonal,
            Some("modal") => CnPreconditioner::Modal,
            Some(other) => {
                return Err(ConfigError::validation(
                    "scheme.preconditioner",
                    format!("unknown preconditioner {other:?}"),
                ))
            }
        };
        scheme.dealias = raw.boolean("scheme", "dealias")?.unwrap_or(false);

        let time = TimeParams {
            dt: required(raw.number("time", "dt")?, "time.dt")?,
            t_end: required(raw.number("time", "t_end")?, "time.t_end")?,
        };

        let state = required(raw.string("initial", "state"), "initial.state")?;
        let params = raw.remaining_numbers("initial")?;
        let initial = InitialSpec { state, params };

        let outputs = OutputSpec {
            diag_every: raw.integer("outputs", "diag_every")?.unwrap_or(10),
            snapshot_every: raw.integer("outputs", "snapshot_every")?.unwrap_or(100),
            out_dir: raw
                .string("outputs", "out_dir")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("out").join(&experiment)),
        };
        let guard = GuardSpec {
            linf_factor: raw.number("guard", "linf_factor")?.unwrap_or(GuardSpec::default().linf_factor),
            linf_ceiling: raw.number("guard", "linf_ceiling")?,
            l2_drift: raw.number("guard", "l2_drift")?,
        };
        raw.check_unused()?;

        let cfg = Self { experiment, grid, model, scheme, time, initial, outputs, guard };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Check every invariant that does not need allocation: ranges, grid and
    /// scheme compatibility, and initial-state parameters.
    // `!(x > 0.0)` also rejects NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), ConfigError> {
        fn v(field: &str, message: impl Into<String>) -> ConfigError {
            ConfigError::validation(field, message)
        }
        if registry::experiment(&self.experiment).is_none() {
            return Err(v("experiment", format!("unknown experiment {:?}", self.experiment)));
        }
        let g = &self.grid;
        for (name, x) in [("grid.lx", g.lx), ("grid.ly", g.ly)] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(v(name, "must be positive"));
            }
        }
        for (name, n) in [("grid.nx", g.nx), ("grid.ny", g.ny)] {
            if n < 8 {
                return Err(v(name, "at least 8 points are needed"));
            }
        }
        let check_order = |o: u32| {
            if matches!(o, 2 | 4 | 6) {
                Ok(())
            } else {
                Err(v("scheme.order", "must be 2, 4 or 6"))
            }
        };
        match self.scheme.kind {
            SchemeKind::Compact { order } => {
                check_order(order)?;
                if g.nx.is_multiple_of(2) {
                    return Err(v("grid.nx", "the compact antiderivative needs an odd number of x points"));
                }
            }
            SchemeKind::Mixed { order_y } => {
                check_order(order_y)?;
                if g.nx % 2 == 1 {
                    return Err(v("grid.nx", "the mixed scheme needs an even number of x points"));
                }
            }
            SchemeKind::Spectral => {
                if g.nx % 2 == 1 {
                    return Err(v("grid.nx", "the spectral scheme needs an even number of x points"));
                }
                if g.ny % 2 == 1 {
                    return Err(v("grid.ny", "the spectral scheme needs an even number of y points"));
                }
                if g.bc_y != BoundaryCondition::Periodic {
                    return Err(v("grid.bc_y", "the spectral scheme needs periodic y"));
                }
            }
        }
        if self.scheme.dealias && self.scheme.kind != SchemeKind::Spectral {
            return Err(v("scheme.dealias", "only the spectral scheme dealiases"));
        }
        if self.model.p < 1 {
            return Err(v("model.p", "must be at least 1"));
        }
        if self.model.lambda.abs() != 1.0 {
            return Err(v("model.lambda", "must be -1 or 1"));
        }
        let s = &self.scheme;
        if !(s.picard.tol > 0.0) {
            return Err(v("scheme.picard_tol", "must be positive"));
        }
        if s.picard.max_iter == 0 {
            return Err(v("scheme.picard_max_iter", "must be positive"));
        }
        if !(s.gmres.rel_tol > 0.0) {
            return Err(v("scheme.gmres_tol", "must be positive"));
        }
        if s.gmres.max_iter == 0 {
            return Err(v("scheme.gmres_max_iter", "must be positive"));
        }
        if s.gmres.restart == 0 {
            return Err(v("scheme.gmres_restart", "must be positive"));
        }
        let t = &self.time;
        if !(t.dt > 0.0 && t.dt.is_finite()) {
            return Err(v("time.dt", "must be positive"));
        }
        if !(t.t_end > 0.0 && t.t_end.is_finite()) {
            return Err(v("time.t_end", "must be positive"));
        }
        let steps = t.t_end / t.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) || steps.round() < 1.0 {
            return Err(v("time.t_end", "must be a whole number of time steps"));
        }
        self.validate_initial()?;
        if self.outputs.diag_every == 0 {
            return Err(v("outputs.diag_every", "must be positive"));
        }
        if !(self.guard.linf_factor > 1.0) {
            return Err(v("guard.linf_factor", "must exceed 1"));
        }
        if let Some(c) = self.guard.linf_ceiling {
            if !(c > 0.0) {
                return Err(v("guard.linf_ceiling", "must be positive"));
            }
        }
        if let Some(d) = self.guard.l2_drift {
            if !(d > 0.0) {
                return Err(v("guard.l2_drift", "must be positive"));
            }
        }
        Ok(())
    }

    fn validate_initial(&self) -> Result<(), ConfigError> {
        let state = self.initial.state.as_str();
        if !INITIAL_STATES.contains(&state) {
            return Err(ConfigError::validation("initial.state", format!("unknown state {state:?}")));
        }
        let (req, opt) = state_keys(state);
        for key in req {
            if !self.initial.params.contains_key(*key) {
                return Err(ConfigError::validation(format!("initial.{key}"), "missing"));
            }
        }
        if let Some(key) = self.initial.params.keys().find(|k| !req.contains(&k.as_str()) && !opt.contains(&k.as_str())) {
            return Err(ConfigError::validation(format!("initial.{key}"), format!("not a parameter of {state}")));
        }
        if let Some(z) = self.zaitsev_params() {
            z.map_err(|e| ConfigError::validation("initial", e.to_string()))?;
        }
        Ok(())
    }

    /// Zaitsev parameters of a Zaitsev-type initial state.
    pub fn zaitsev_params(&self) -> Option<Result<ZaitsevParams, crate::analytic::AnalyticError>> {
        if !matches!(self.initial.state.as_str(), "zaitsev" | "perturbed-zaitsev") {
            return None;
        }
        let p = &self.initial.params;
        let (alpha, delta) = (*p.get("alpha")?, *p.get("delta")?);
        Some(ZaitsevParams::new(alpha, delta).and_then(|z| match p.get("beta") {
            Some(&b) => z.with_beta(b),
            None => Ok(z),
        }))
    }
}
