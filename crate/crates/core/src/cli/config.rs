use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::asymptotics::ScanConfig;
use crate::field::EdeptParams;
use crate::numerics::{AxisRecipe, CylGrid, TruncationPolicy};
use crate::spectrum::{default_position_grid, ModeGrid, SpectralSetup, SpectrumTolerances};

use super::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Everything a run needs. Missing sections take their defaults; unknown
/// keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default = "default_params")]
    pub params: EdeptParams,
    #[serde(default)]
    pub grids: GridConfig,
    #[serde(default)]
    pub fields: FieldMapConfig,
    #[serde(default)]
    pub falloff: FalloffConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub energy: EnergyConfig,
    #[serde(default)]
    pub validation: ValidationConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Worker threads; 0 lets the pool pick.
    #[serde(default)]
    pub threads: usize,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_params() -> EdeptParams {
    EdeptParams::unit(1).expect("unit parameters are valid")
}

fn default_seed() -> u64 {
    20_240_917
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            params: default_params(),
            grids: GridConfig::default(),
            fields: FieldMapConfig::default(),
            falloff: FalloffConfig::default(),
            spectrum: SpectrumConfig::default(),
            energy: EnergyConfig::default(),
            validation: ValidationConfig::default(),
            tolerances: Tolerances::default(),
            seed: default_seed(),
            threads: 0,
            output: OutputConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylRecipe {
    pub rho: AxisRecipe,
    pub z: AxisRecipe,
}

/// Position and mode grids; `null` picks defaults scaled to the parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub position: Option<CylRecipe>,
    pub modes: Option<CylRecipe>,
    pub truncation: TruncationPolicy,
}

impl GridConfig {
    pub fn setup(&self, params: &EdeptParams) -> Result<SpectralSetup, CliError> {
        let grid = match &self.position {
            Some(r) => CylGrid::new(r.rho, r.z).map_err(|e| CliError::Config(format!("grids.position: {e}")))?,
            None => default_position_grid(params),
        };
        let modes = match &self.modes {
            Some(r) => ModeGrid::new(r.rho, r.z).map_err(|e| CliError::Config(format!("grids.modes: {e}")))?,
            None => ModeGrid::default_for(params),
        };
        Ok(SpectralSetup::new(grid, modes, self.truncation))
    }
}

/// Grid for the `fields` map, in absolute units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldMapConfig {
    pub times: Vec<f64>,
    pub rho: AxisRecipe,
    pub z: AxisRecipe,
}

impl Default for FieldMapConfig {
    fn default() -> Self {
        FieldMapConfig {
            times: vec![0.0],
            rho: AxisRecipe::Linear { min: 0.0, max: 5.0, n: 50 },
            z: AxisRecipe::Linear { min: -5.0, max: 5.0, n: 100 },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FalloffConfig {
    pub alphas: Vec<u32>,
    /// Polar angles from the z axis, in degrees.
    pub directions_deg: Vec<f64>,
    pub scan: ScanConfig,
}

impl Default for FalloffConfig {
    fn default() -> Self {
        FalloffConfig {
            alphas: vec![1, 2, 3, 4],
            directions_deg: vec![0.0, 45.0, 90.0, 135.0],
            scan: ScanConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub t0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergyConfig {
    /// Slice times in units of `g1/c`.
    pub times: Vec<f64>,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig {
            times: vec![0.0, 1.0, 2.0],
        }
    }
}

/// Random point cloud for the Maxwell residual check; radii in units of
/// `max(g1, g2)`, times in units of `g1/c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidationConfig {
    pub points: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub t_half: f64,
    pub norm_doubling: bool,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            points: 1000,
            r_min: 1e-2,
            r_max: 1e3,
            t_half: 2.0,
            norm_doubling: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub maxwell: f64,
    pub spectrum: SpectrumTolerances,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            maxwell: 1e-8,
            spectrum: SpectrumTolerances::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("edept-out"),
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

impl RunConfig {
    /// Parses JSON, naming the offending key on failure.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let msg = e.inner().to_string();
            let msg = msg.lines().next().unwrap_or_default().to_string();
            if path == "." {
                CliError::Config(msg)
            } else {
                CliError::Config(format!("at `{path}`: {msg}"))
            }
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn check(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "at `schema_version`: unsupported version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        let t = &self.tolerances;
        let s = &t.spectrum;
        let named = [
            ("tolerances.maxwell", t.maxwell),
            ("tolerances.spectrum.transversality", s.transversality),
            ("tolerances.spectrum.electric_relation", s.electric_relation),
            ("tolerances.spectrum.magnetic_relation", s.magnetic_relation),
            ("tolerances.spectrum.round_trip", s.round_trip),
            ("tolerances.spectrum.parseval", s.parseval),
            ("tolerances.spectrum.conservation", s.conservation),
            ("tolerances.spectrum.norm_convergence", s.norm_convergence),
            ("falloff.scan.window_tolerance", self.falloff.scan.window_tolerance),
        ];
        for (name, v) in named {
            if !(v > 0.0) {
                return Err(CliError::Config(format!("at `{name}`: tolerance must be positive, got {v}")));
            }
        }
        if self.falloff.alphas.contains(&0) {
            return Err(CliError::Config("at `falloff.alphas`: alpha must be >= 1".into()));
        }
        if self.validation.points == 0 || !(self.validation.r_min > 0.0 && self.validation.r_max > self.validation.r_min) {
            return Err(CliError::Config("at `validation`: need points > 0 and 0 < r_min < r_max".into()));
        }
        if self.energy.times.is_empty() {
            return Err(CliError::Config("at `energy.times`: need at least one slice".into()));
        }
        Ok(())
    }
}
