//! Halting rule for runs that blow up.

use crate::diagnostics::DiagnosticsRow;

/// Resolved guard thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardPolicy {
    pub linf_ceiling: f64,
    /// Reference L2 norm for `l2_drift`.
    pub initial_l2: f64,
    /// Halt once `|l2 - initial_l2| / initial_l2` exceeds this. The schemes
    /// conserve L2 while the solution is resolved, so losing it marks a
    /// singularity that has collapsed below the grid scale.
    pub l2_drift: Option<f64>,
}

impl GuardPolicy {
    /// `ceiling` if given, otherwise `factor` times the initial sup norm.
    pub fn resolve(factor: f64, ceiling: Option<f64>, initial: &DiagnosticsRow) -> Self {
        Self {
            linf_ceiling: ceiling.unwrap_or(factor * initial.linf),
            initial_l2: initial.l2,
            l2_drift: None,
        }
    }

    pub fn with_l2_drift(self, l2_drift: Option<f64>) -> Self {
        Self { l2_drift, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    BlowUp,
    NonFinite,
    ResolutionLoss,
}

impl HaltReason {
    pub fn as_str(self) -> &'static str {
        match self {
            HaltReason::BlowUp => "blow-up",
            HaltReason::NonFinite => "nonfinite",
            HaltReason::ResolutionLoss => "resolution-loss",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuardDecision {
    Continue,
    Halt(HaltReason),
}

/// Energy is not inspected: it is only computed on output steps.
pub fn blowup_guard(row: &DiagnosticsRow, policy: &GuardPolicy) -> GuardDecision {
    if !(row.mass.is_finite() && row.l2.is_finite() && row.linf.is_finite()) {
        GuardDecision::Halt(HaltReason::NonFinite)
    } else if row.linf > policy.linf_ceiling {
        GuardDecision::Halt(HaltReason::BlowUp)
    } else if policy
        .l2_drift
        .is_some_and(|tol| (row.l2 - policy.initial_l2).abs() > tol * policy.initial_l2)
    {
        GuardDecision::Halt(HaltReason::ResolutionLoss)
    } else {
        GuardDecision::Continue
    }
}
