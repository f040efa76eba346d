//! Named experiments and their shipped configurations.

use super::config::ExperimentConfig;
use super::ConfigError;

#[derive(Debug, Clone, Copy)]
pub struct Experiment {
    pub name: &'static str,
    pub description: &'static str,
    /// Config file text.
    pub config: &'static str,
}

pub const EXPERIMENTS: [Experiment; 5] = [
    Experiment {
        name: "zaitsev-accuracy",
        description: "Zaitsev traveling wave against its exact solution (KP-I, p = 1)",
        config: include_str!("../../../../configs/zaitsev-accuracy.cfg"),
    },
    Experiment {
        name: "gaussian-conservation",
        description: "Gaussian wave packet, L2 norm and mass conservation",
        config: include_str!("../../../../configs/gaussian-conservation.cfg"),
    },
    Experiment {
        name: "zaitsev-perturbation",
        description: "Zaitsev soliton with a localized perturbation decaying into lumps",
        config: include_str!("../../../../configs/zaitsev-perturbation.cfg"),
    },
    Experiment {
        name: "line-instability",
        description: "Transverse instability of a bent line soliton",
        config: include_str!("../../../../configs/line-instability.cfg"),
    },
    Experiment {
        name: "blowup",
        description: "Finite-time blow-up of KP-I with p = 2",
        config: include_str!("../../../../configs/blowup.cfg"),
    },
];

pub fn experiment(name: &str) -> Option<&'static Experiment> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

impl Experiment {
    pub fn load(&self) -> Result<ExperimentConfig, ConfigError> {
        ExperimentConfig::parse(self.config)
    }
}
