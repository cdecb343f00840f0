//! Named scenario presets.
//!
//! Six presets cover the small/medium/large scale and medium/heavy load
//! experiment grid. The `desk-*` presets are smaller configurations for quick
//! runs and CI; they are not part of that grid.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    SmallMedium,
    MediumMedium,
    LargeMedium,
    SmallHeavy,
    MediumHeavy,
    LargeHeavy,
    DeskMedium,
    DeskHeavy,
}

/// The values a preset pins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetValues {
    pub num_schedulers: usize,
    pub num_resources: usize,
    pub load_fraction: f64,
    pub steps: u64,
}

pub const MEDIUM_LOAD: f64 = 0.6;
pub const HEAVY_LOAD: f64 = 0.9;

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::SmallMedium,
        Preset::MediumMedium,
        Preset::LargeMedium,
        Preset::SmallHeavy,
        Preset::MediumHeavy,
        Preset::LargeHeavy,
        Preset::DeskMedium,
        Preset::DeskHeavy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::SmallMedium => "small-medium",
            Preset::MediumMedium => "medium-medium",
            Preset::LargeMedium => "large-medium",
            Preset::SmallHeavy => "small-heavy",
            Preset::MediumHeavy => "medium-heavy",
            Preset::LargeHeavy => "large-heavy",
            Preset::DeskMedium => "desk-medium",
            Preset::DeskHeavy => "desk-heavy",
        }
    }

    /// False for the reduced desk-scale presets.
    pub fn is_reference_experiment(self) -> bool {
        !matches!(self, Preset::DeskMedium | Preset::DeskHeavy)
    }

    pub fn values(self) -> PresetValues {
        let (num_schedulers, num_resources, load_fraction, steps) = match self {
            Preset::SmallMedium => (50, 200, MEDIUM_LOAD, 5000),
            Preset::MediumMedium => (150, 400, MEDIUM_LOAD, 5000),
            Preset::LargeMedium => (300, 1200, MEDIUM_LOAD, 5000),
            Preset::SmallHeavy => (50, 200, HEAVY_LOAD, 5000),
            Preset::MediumHeavy => (150, 400, HEAVY_LOAD, 5000),
            Preset::LargeHeavy => (300, 1200, HEAVY_LOAD, 5000),
            Preset::DeskMedium => (10, 40, MEDIUM_LOAD, 2000),
            Preset::DeskHeavy => (10, 40, HEAVY_LOAD, 2000),
        };
        PresetValues {
            num_schedulers,
            num_resources,
            load_fraction,
            steps,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
            format!("unknown preset `{s}` (expected one of {})", names.join(", "))
        })
    }
}
