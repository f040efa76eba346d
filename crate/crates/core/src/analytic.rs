//! Exact solutions and initial data.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::field::{Field, FieldError, Grid2D};

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticError {
    #[error("Zaitsev parameters need 3 alpha^4 < delta^2 (alpha = {alpha}, delta = {delta})")]
    ExistenceViolated { alpha: f64, delta: f64 },
    #[error("invalid parameter {name} = {value}")]
    InvalidParam { name: &'static str, value: f64 },
    #[error("unknown initial state {0:?}")]
    UnknownState(String),
    #[error("initial state {state:?} needs parameter {key:?}")]
    MissingParam { state: String, key: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Parameters of the y-periodic Zaitsev traveling wave of KP-I.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZaitsevParams {
    pub alpha: f64,
    pub delta: f64,
    pub beta: f64,
    pub omega: f64,
    pub c: f64,
}

impl ZaitsevParams {
    pub fn new(alpha: f64, delta: f64) -> Result<Self, AnalyticError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(AnalyticError::InvalidParam { name: "alpha", value: alpha });
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(AnalyticError::InvalidParam { name: "delta", value: delta });
        }
        let a4 = alpha.powi(4);
        if 3.0 * a4 >= delta * delta {
            return Err(AnalyticError::ExistenceViolated { alpha, delta });
        }
        let beta = ((delta * delta - 3.0 * a4) / (delta * delta)).sqrt();
        let omega = (delta * delta + a4) / alpha;
        Ok(Self { alpha, delta, beta, omega, c: omega / alpha })
    }

    /// Replace the derived `beta`. The profile is then no longer an exact
    /// solution; it is only meant as initial data.
    pub fn with_beta(self, beta: f64) -> Result<Self, AnalyticError> {
        if !(0.0..1.0).contains(&beta) {
            return Err(AnalyticError::InvalidParam { name: "beta", value: beta });
        }
        Ok(Self { beta, ..self })
    }
}

fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// `12 α² (1 - β cosh θ cos δy) / (cosh θ - β cos δy)²` with `θ = αx - ωt`,
/// evaluated in sech form so large `|θ|` does not overflow.
pub fn zaitsev(params: &ZaitsevParams, x: f64, y: f64, t: f64) -> f64 {
    let s = sech(params.alpha * x - params.omega * t);
    let bc = params.beta * (params.delta * y).cos();
    let den = 1.0 - bc * s;
    12.0 * params.alpha * params.alpha * s * (s - bc) / (den * den)
}

/// KdV soliton of speed `c` for `u_t + u_xxx + u^p u_x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSolitonParams {
    pub p: u32,
    pub c: f64,
}

impl LineSolitonParams {
    pub fn new(p: u32, c: f64) -> Result<Self, AnalyticError> {
        if p < 1 {
            return Err(AnalyticError::InvalidParam { name: "p", value: p as f64 });
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(AnalyticError::InvalidParam { name: "c", value: c });
        }
        Ok(Self { p, c })
    }

    pub fn amplitude(&self) -> f64 {
        let p = self.p as f64;
        ((p + 1.0) * (p + 2.0) * self.c / 2.0).powf(1.0 / p)
    }
}

pub fn line_soliton(params: &LineSolitonParams, x: f64, t: f64) -> f64 {
    let p = params.p as f64;
    let arg = p * params.c.sqrt() / 2.0 * (x - params.c * t);
    params.amplitude() * sech(arg).powf(2.0 / p)
}

/// Names accepted by [`initial_state`].
pub const INITIAL_STATES: [&str; 6] =
    ["zaitsev", "gaussian-packet", "perturbed-zaitsev", "perturbed-line", "gaussian-xx", "zero"];

struct Params<'a> {
    state: &'a str,
    map: &'a BTreeMap<String, f64>,
}

impl Params<'_> {
    fn get(&self, key: &str) -> Result<f64, AnalyticError> {
        self.map.get(key).copied().ok_or_else(|| AnalyticError::MissingParam {
            state: self.state.to_string(),
            key: key.to_string(),
        })
    }

    fn get_or(&self, key: &str, default: f64) -> f64 {
        self.map.get(key).copied().unwrap_or(default)
    }

    fn zaitsev(&self) -> Result<ZaitsevParams, AnalyticError> {
        let z = ZaitsevParams::new(self.get("alpha")?, self.get("delta")?)?;
        match self.map.get("beta") {
            Some(&b) => z.with_beta(b),
            None => Ok(z),
        }
    }
}

/// Sample a named initial state on the grid.
///
/// | name | parameters |
/// |---|---|
/// | `zaitsev` | `alpha`, `delta`, optional `beta`, `t0` |
/// | `gaussian-packet` | `a`, `wx`, `wy`: `a (1 - 2 wx x²) exp(-wx x² - wy y²)` |
/// | `perturbed-zaitsev` | as `zaitsev`, plus `shift` (default `Lx/2`), `amplitude` (6) |
/// | `perturbed-line` | `amplitude` (12), `epsilon` (0.4): `A sech²(x + ε cos(2y/Ly))` |
/// | `gaussian-xx` | `prefactor` (3): `prefactor ∂xx exp(-x² - y²)` |
/// | `zero` | none |
pub fn initial_state(name: &str, grid: &Grid2D, params: &BTreeMap<String, f64>) -> Result<Field, AnalyticError> {
    let p = Params { state: name, map: params };
    let field = match name {
        "zaitsev" => {
            let z = p.zaitsev()?;
            let t0 = p.get_or("t0", 0.0);
            Field::from_fn(*grid, |x, y| zaitsev(&z, x, y, t0))?
        }
        "gaussian-packet" => {
            let (a, wx, wy) = (p.get("a")?, p.get("wx")?, p.get("wy")?);
            Field::from_fn(*grid, |x, y| a * (1.0 - 2.0 * wx * x * x) * (-wx * x * x - wy * y * y).exp())?
        }
        "perturbed-zaitsev" => {
            let z = p.zaitsev()?;
            let shift = p.get_or("shift", grid.lx() / 2.0);
            let amp = p.get_or("amplitude", 6.0);
            Field::from_fn(*grid, |x, y| {
                let xs = x + shift;
                zaitsev(&z, xs, y, 0.0) + amp * xs * (-xs * xs - y * y).exp()
            })?
        }
        "perturbed-line" => {
            let amp = p.get_or("amplitude", 12.0);
            let eps = p.get_or("epsilon", 0.4);
            let ly = grid.ly();
            Field::from_fn(*grid, |x, y| amp * sech(x + eps * (2.0 * y / ly).cos()).powi(2))?
        }
        "gaussian-xx" => {
            let c = p.get_or("prefactor", 3.0);
            Field::from_fn(*grid, |x, y| c * (4.0 * x * x - 2.0) * (-x * x - y * y).exp())?
        }
        "zero" => Field::zeros(*grid),
        other => return Err(AnalyticError::UnknownState(other.to_string())),
    };
    Ok(field)
}
