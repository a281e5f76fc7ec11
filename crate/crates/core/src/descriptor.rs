//! Experiment descriptors: the JSON files that drive the command-line tool.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::basis::BareOpoParams;
use crate::comb::CavityGeometry;
use crate::error::{Error, Result};
use crate::fitting::{AlphaModel, Quadrature};
use crate::grid::Spacing;
use crate::spectrum::{Damping, Mode, SpectrumConfig};
use crate::threshold::DoublyResonantParams;
use crate::variance::{apply_loss, variance_to_r, LossBudget, SqueezedState};

/// Cavity model of the OPO whose output spectrum is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub g: f64,
    pub delta_c: f64,
    #[serde(default = "default_theta_p")]
    pub theta_p: f64,
    pub kappa: f64,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<Damping>,
    /// Analysis sideband, rad/s.
    #[serde(default)]
    pub omega: f64,
    /// Quadrature compared with noise-power data.
    #[serde(default)]
    pub quadrature: Quadrature,
}

fn default_theta_p() -> f64 {
    PI
}

/// Injected squeezed vacuum, given at its source, with the transfer
/// efficiency to the cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirSpec {
    pub r: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default = "one")]
    pub eta_pro: f64,
}

fn one() -> f64 {
    1.0
}

impl ReservoirSpec {
    /// Squeezing parameter after propagation loss.
    pub fn effective_r(&self) -> Result<f64> {
        if self.eta_pro == 1.0 {
            return Ok(self.r);
        }
        variance_to_r(apply_loss((-2.0 * self.r).exp(), self.eta_pro)?)
    }

    pub fn state(&self) -> Result<SqueezedState> {
        SqueezedState::new(self.effective_r()?, self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombSpec {
    /// Crystal acceptance bandwidth, Hz.
    pub bandwidth_hz: f64,
    /// Co-resonance tolerance, Hz. Defaults to half the narrower linewidth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance_hz: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSpec {
    /// Pump power at which the classical gain is reported, W.
    pub pump_power: f64,
    /// Measured threshold with squeezing injected, W, for comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reported_reduced_threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubthresholdSpec {
    pub pump_ratio: f64,
    /// Analysis frequency, Hz.
    pub f: f64,
    /// Cavity linewidth, Hz.
    pub gamma: f64,
    pub eta_tot: f64,
    pub theta_tot: f64,
}

/// Output-power models: a line in pump ratio and a `cosh 2r` scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerModelSpec {
    /// W per unit pump ratio.
    pub slope: f64,
    /// W.
    pub intercept: f64,
    /// W.
    pub cosh_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    PumpRatio,
    R,
    Omega,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    #[serde(default = "linear")]
    pub spacing: Spacing,
}

fn linear() -> Spacing {
    Spacing::Linear
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::config("sweep count must be >= 2"));
        }
        if !(self.lo < self.hi) {
            return Err(Error::config("sweep needs lo < hi"));
        }
        if self.spacing == Spacing::Log && !(self.lo > 0.0) {
            return Err(Error::config("log sweep needs lo > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentDescriptor {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reservoir: Option<ReservoirSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<LossBudget>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subthreshold: Option<SubthresholdSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<[CavityGeometry; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comb: Option<CombSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doubly_resonant: Option<DoublyResonantParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_model: Option<PowerModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

/// Shipped parameter sets, by name.
pub const PRESETS: [(&str, &str); 4] = [
    ("paper-opo1", include_str!("../presets/paper-opo1.json")),
    ("paper-opo2", include_str!("../presets/paper-opo2.json")),
    ("paper-fig4b", include_str!("../presets/paper-fig4b.json")),
    ("paper-figS2", include_str!("../presets/paper-figS2.json")),
];

/// The descriptor JSON schema shipped with the tool.
pub const SCHEMA: &str = include_str!("../schema/descriptor.schema.json");

fn missing(section: &str) -> Error {
    Error::config(format!("descriptor has no '{section}' section"))
}

impl ExperimentDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        let d: Self = serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        d.validate()?;
        Ok(d)
    }

    pub fn preset(name: &str) -> Result<Self> {
        let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
            Error::config(format!("unknown preset '{name}' (known: {})", names.join(", ")))
        })?;
        Self::from_json(text)
    }

    /// Checks every present section. Domain errors are reported as
    /// configuration errors.
    pub fn validate(&self) -> Result<()> {
        let as_config = |e: Error| match e {
            Error::Domain(m) => Error::Config(m),
            other => other,
        };
        if let Some(s) = &self.system {
            self.params_of(s).map_err(as_config)?;
            if !(s.omega >= 0.0) || !s.omega.is_finite() {
                return Err(Error::config("system.omega must be finite and >= 0"));
            }
            if let Some(d) = s.damping {
                if !(d.alpha >= 0.0 && d.r_p >= 0.0) {
                    return Err(Error::config("damping alpha and r_p must be >= 0"));
                }
            }
        }
        if let Some(r) = &self.reservoir {
            if !(r.eta_pro > 0.0 && r.eta_pro <= 1.0) {
                return Err(Error::config("reservoir.eta_pro must lie in (0, 1]"));
            }
            r.state().map_err(as_config)?;
        }
        if let Some(b) = &self.budget {
            b.validate().map_err(as_config)?;
        }
        if let Some(g) = &self.geometry {
            for geom in g {
                geom.validate().map_err(as_config)?;
            }
        }
        if let Some(c) = &self.comb {
            if !(c.bandwidth_hz > 0.0) || c.tolerance_hz.is_some_and(|t| !(t >= 0.0)) {
                return Err(Error::config("comb bandwidth must be > 0 and tolerance >= 0"));
            }
        }
        if let Some(p) = &self.doubly_resonant {
            p.validate().map_err(as_config)?;
        }
        if let Some(t) = &self.threshold {
            if !(t.pump_power >= 0.0) || t.reported_reduced_threshold.is_some_and(|v| !(v > 0.0)) {
                return Err(Error::config(
                    "threshold pump_power must be >= 0 and the reported threshold > 0",
                ));
            }
        }
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        Ok(())
    }

    fn params_of(&self, s: &SystemSpec) -> Result<BareOpoParams> {
        BareOpoParams::new(s.g, s.delta_c, s.theta_p, s.kappa)
    }

    pub fn system(&self) -> Result<&SystemSpec> {
        self.system.as_ref().ok_or_else(|| missing("system"))
    }

    /// Spectrum configuration with the mode overridden when given.
    pub fn spectrum_config(&self, mode: Option<Mode>) -> Result<SpectrumConfig> {
        let s = self.system()?;
        let reservoir = match &self.reservoir {
            Some(r) => r.state()?,
            None => SqueezedState::vacuum(),
        };
        let mut cfg = SpectrumConfig::new(self.params_of(s)?, reservoir).with_mode(mode.unwrap_or(s.mode));
        if let Some(d) = s.damping {
            cfg = cfg.with_damping(d)?;
        }
        Ok(cfg)
    }

    pub fn alpha_model(&self, mode: Option<Mode>) -> Result<AlphaModel> {
        let s = self.system()?;
        let d = s
            .damping
            .ok_or_else(|| Error::config("alpha fit needs system.damping for r_p"))?;
        let mut template = self.spectrum_config(mode)?;
        template.damping = None;
        Ok(AlphaModel {
            template,
            omega: s.omega,
            r_p: d.r_p,
            quadrature: s.quadrature,
        })
    }

    pub fn geometry(&self) -> Result<&[CavityGeometry; 2]> {
        self.geometry.as_ref().ok_or_else(|| missing("geometry"))
    }

    pub fn doubly_resonant(&self) -> Result<&DoublyResonantParams> {
        self.doubly_resonant.as_ref().ok_or_else(|| missing("doubly_resonant"))
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("descriptor serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}
