//! Longitudinal-mode combs of two cavities and where they coincide.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::threshold::SPEED_OF_LIGHT;

/// Default signal-band index of the PPKTP crystal.
pub const DEFAULT_CRYSTAL_INDEX: f64 = 1.83;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityGeometry {
    /// Geometric round-trip-half path outside the crystal, m.
    pub air_path: f64,
    pub crystal_len: f64,
    #[serde(default = "default_index")]
    pub crystal_index: f64,
    /// Amplitude reflectivities of the two mirrors.
    pub r1: f64,
    pub r2: f64,
}

fn default_index() -> f64 {
    DEFAULT_CRYSTAL_INDEX
}

impl CavityGeometry {
    pub fn optical_path(&self) -> f64 {
        self.air_path + self.crystal_index * self.crystal_len
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.air_path >= 0.0 && self.crystal_len >= 0.0 && self.crystal_index >= 1.0) {
            return Err(Error::domain("cavity lengths must be >= 0 and the crystal index >= 1"));
        }
        if !(self.optical_path() > 0.0) || !self.optical_path().is_finite() {
            return Err(Error::domain("cavity optical path must be > 0"));
        }
        for r in [self.r1, self.r2] {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::domain(format!(
                    "mirror reflectivity must lie in [0, 1), got {r}"
                )));
            }
        }
        Ok(())
    }
}

/// Free spectral range `c / 2L` with `L` the optical path, Hz.
pub fn fsr(geom: &CavityGeometry) -> Result<f64> {
    geom.validate()?;
    Ok(SPEED_OF_LIGHT / (2.0 * geom.optical_path()))
}

/// Airy transmission of a two-mirror cavity at offset `nu` from a resonance.
pub fn transmission(nu: f64, fsr_hz: f64, r1: f64, r2: f64) -> Result<f64> {
    if !(fsr_hz > 0.0) {
        return Err(Error::domain(format!("FSR must be > 0, got {fsr_hz}")));
    }
    let phase = PI * nu / fsr_hz;
    let num = ((1.0 - r1 * r1) * (1.0 - r2 * r2)).sqrt() * Complex64::from_polar(1.0, phase);
    let den = Complex64::new(1.0, 0.0) - r1 * r2 * Complex64::from_polar(1.0, 2.0 * phase);
    Ok((num / den).norm_sqr())
}

/// Full width at half maximum of the Airy peak, Hz.
pub fn fwhm(fsr_hz: f64, r1: f64, r2: f64) -> Result<f64> {
    if !(fsr_hz > 0.0) {
        return Err(Error::domain(format!("FSR must be > 0, got {fsr_hz}")));
    }
    let rr = r1 * r2;
    let finesse_coef = 4.0 * rr / (1.0 - rr).powi(2);
    if finesse_coef <= 1.0 {
        return Err(Error::domain(
            "cavity too lossy for a half-maximum point between resonances",
        ));
    }
    Ok(2.0 * fsr_hz / PI * (1.0 / finesse_coef.sqrt()).asin())
}

/// Half the narrower of the two cavity linewidths.
pub fn default_tolerance(a: &CavityGeometry, b: &CavityGeometry) -> Result<f64> {
    let wa = fwhm(fsr(a)?, a.r1, a.r2)?;
    let wb = fwhm(fsr(b)?, b.r1, b.r2)?;
    Ok(0.5 * wa.min(wb))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CombEntry {
    pub mode_index: i64,
    /// Sideband frequency of the cavity-2 mode, Hz.
    pub offset_hz: f64,
    /// Distance to the nearest cavity-1 mode, Hz.
    pub detuning_hz: f64,
    pub co_resonant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombReport {
    pub fsr1: f64,
    pub fsr2: f64,
    pub tolerance_hz: f64,
    pub entries: Vec<CombEntry>,
}

impl CombReport {
    /// Re-flags the entries for a new tolerance.
    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol >= 0.0) {
            return Err(Error::domain(format!("tolerance must be >= 0, got {tol}")));
        }
        self.tolerance_hz = tol;
        for e in &mut self.entries {
            e.co_resonant = e.mode_index == 0 || e.detuning_hz.abs() <= tol;
        }
        Ok(self)
    }

    pub fn co_resonant_modes(&self) -> Vec<i64> {
        self.entries
            .iter()
            .filter(|e| e.co_resonant)
            .map(|e| e.mode_index)
            .collect()
    }
}

/// Folds `x` onto the nearest multiple of `period`, into `(-period/2, period/2]`.
pub fn fold(x: f64, period: f64) -> f64 {
    let m = (x / period).round();
    let mut best = x - m * period;
    for cand in [m - 1.0, m + 1.0] {
        let d = x - cand * period;
        if d.abs() < best.abs() || (d.abs() == best.abs() && d > best) {
            best = d;
        }
    }
    best
}

/// Detuning of every cavity-2 mode inside `±bandwidth/2` from the nearest
/// cavity-1 mode. Both combs share mode 0 at the carrier.
pub fn comb_detunings(fsr1: f64, fsr2: f64, bandwidth: f64) -> Result<CombReport> {
    if !(fsr1 > 0.0 && fsr2 > 0.0 && bandwidth > 0.0) {
        return Err(Error::domain("FSRs and bandwidth must be > 0"));
    }
    let kmax = (0.5 * bandwidth / fsr2).floor() as i64;
    let entries = (-kmax..=kmax)
        .map(|k| {
            let offset = k as f64 * fsr2;
            let detuning = if k == 0 { 0.0 } else { fold(offset, fsr1) };
            CombEntry {
                mode_index: k,
                offset_hz: offset,
                detuning_hz: detuning,
                co_resonant: k == 0 || detuning == 0.0,
            }
        })
        .collect();
    Ok(CombReport {
        fsr1,
        fsr2,
        tolerance_hz: 0.0,
        entries,
    })
}

/// Mode indices whose detuning is within `tol`. Mode 0 is always included.
pub fn co_resonances(fsr1: f64, fsr2: f64, bandwidth: f64, tol: f64) -> Result<Vec<i64>> {
    Ok(comb_detunings(fsr1, fsr2, bandwidth)?
        .with_tolerance(tol)?
        .co_resonant_modes())
}
