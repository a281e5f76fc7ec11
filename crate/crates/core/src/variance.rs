//! Quadrature variances, squeezing parameters and loss budgets.
//!
//! Variances are normalized so that the shot-noise limit is 1. Noise power
//! in decibels is `10 log10 V` relative to shot noise, so squeezing shows up
//! as a negative number (-10.4 dB) and anti-squeezing as a positive one.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Noise variances of the two quadratures, shot noise = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadVariance {
    pub var_x: f64,
    pub var_p: f64,
}

impl QuadVariance {
    pub fn new(var_x: f64, var_p: f64) -> Result<Self> {
        if !(var_x > 0.0 && var_p > 0.0) {
            return Err(Error::domain(format!(
                "quadrature variances must be positive, got ({var_x}, {var_p})"
            )));
        }
        Ok(Self { var_x, var_p })
    }

    /// Pure phase-squeezed state: x anti-squeezed, p squeezed.
    pub fn phase_squeezed(r: f64) -> Self {
        Self {
            var_x: (2.0 * r).exp(),
            var_p: (-2.0 * r).exp(),
        }
    }

    pub fn product(&self) -> f64 {
        self.var_x * self.var_p
    }

    pub fn db(&self) -> Result<(f64, f64)> {
        Ok((variance_to_db(self.var_x)?, variance_to_db(self.var_p)?))
    }
}

/// Gaussian squeezed vacuum described by `xi = r e^{-i theta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSqueezedState")]
pub struct SqueezedState {
    r: f64,
    theta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSqueezedState {
    r: f64,
    #[serde(default)]
    theta: f64,
}

impl TryFrom<RawSqueezedState> for SqueezedState {
    type Error = Error;

    fn try_from(raw: RawSqueezedState) -> Result<Self> {
        SqueezedState::new(raw.r, raw.theta)
    }
}

impl SqueezedState {
    /// `theta` is folded into `[0, 2pi)`.
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::domain(format!(
                "squeezing parameter must be finite and >= 0, got {r}"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::domain("squeezing angle must be finite"));
        }
        Ok(Self {
            r,
            theta: wrap_angle(theta),
        })
    }

    pub fn vacuum() -> Self {
        Self { r: 0.0, theta: 0.0 }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn with_r(&self, r: f64) -> Result<Self> {
        Self::new(r, self.theta)
    }

    /// Symmetrized covariance of `(X, P)` with `X = b + b†`, `P = -i(b - b†)`.
    ///
    /// At `theta = 0` this is `diag(e^{2r}, e^{-2r})`, a phase-squeezed state.
    pub fn covariance(&self) -> [[f64; 2]; 2] {
        let (c, s) = ((2.0 * self.r).cosh(), (2.0 * self.r).sinh());
        let (sin, cos) = self.theta.sin_cos();
        [[c + s * cos, -s * sin], [-s * sin, c - s * cos]]
    }

    /// `<b† b>`
    pub fn photon_number(&self) -> f64 {
        self.r.sinh().powi(2)
    }

    /// `<b b>` for the state with covariance [`Self::covariance`].
    pub fn anomalous_moment(&self) -> num_complex::Complex64 {
        num_complex::Complex64::from_polar(self.r.cosh() * self.r.sinh(), -self.theta)
    }
}

/// Folds an angle into `[0, 2pi)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Noise power relative to shot noise, `10 log10 v`. Squeezing is negative.
pub fn variance_to_db(v: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::domain(format!("variance must be positive, got {v}")));
    }
    Ok(10.0 * v.log10())
}

/// Inverse of [`variance_to_db`].
pub fn db_to_variance(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Squeezing degree `R = -10 log10 v`, positive for squeezed variances.
pub fn squeezing_degree(v: f64) -> Result<f64> {
    variance_to_db(v).map(|db| -db)
}

/// `r = -ln(v) / 2`; negative for anti-squeezed variances.
pub fn variance_to_r(v: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::domain(format!("variance must be positive, got {v}")));
    }
    Ok(-0.5 * v.ln())
}

/// Beam-splitter loss: `eta v + 1 - eta`.
pub fn apply_loss(v: f64, eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::domain(format!("efficiency must lie in [0, 1], got {eta}")));
    }
    if !(v > 0.0) {
        return Err(Error::domain(format!("variance must be positive, got {v}")));
    }
    Ok(eta * v + (1.0 - eta))
}

/// Loss and phase-noise budget of one squeezer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossBudget {
    pub eta_esc: f64,
    pub eta_pro: f64,
    pub eta_vis: f64,
    pub eta_qe: f64,
    /// Total phase fluctuation, rad.
    pub theta_tot: f64,
    /// Output-coupler transmissivity.
    pub t_coupler: f64,
    pub l_roundtrip: f64,
}

impl LossBudget {
    /// Builds a budget with the escape efficiency derived as `T / (T + l)`.
    pub fn from_coupler(
        t_coupler: f64,
        l_roundtrip: f64,
        eta_pro: f64,
        eta_vis: f64,
        eta_qe: f64,
        theta_tot: f64,
    ) -> Result<Self> {
        let b = Self {
            eta_esc: escape_efficiency(t_coupler, l_roundtrip)?,
            eta_pro,
            eta_vis,
            eta_qe,
            theta_tot,
            t_coupler,
            l_roundtrip,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, eta) in [
            ("eta_esc", self.eta_esc),
            ("eta_pro", self.eta_pro),
            ("eta_vis", self.eta_vis),
            ("eta_qe", self.eta_qe),
        ] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::domain(format!("{name} must lie in (0, 1], got {eta}")));
            }
        }
        if !(self.theta_tot >= 0.0) {
            return Err(Error::domain("theta_tot must be >= 0"));
        }
        if !(self.t_coupler > 0.0 && self.t_coupler < 1.0) {
            return Err(Error::domain("t_coupler must lie in (0, 1)"));
        }
        if !(0.0..1.0).contains(&self.l_roundtrip) {
            return Err(Error::domain("l_roundtrip must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// `T / (T + l)`
pub fn escape_efficiency(t_coupler: f64, l_roundtrip: f64) -> Result<f64> {
    if !(t_coupler > 0.0) || !(l_roundtrip >= 0.0) {
        return Err(Error::domain("escape efficiency needs T > 0 and l >= 0"));
    }
    Ok(t_coupler / (t_coupler + l_roundtrip))
}

/// `eta_esc * eta_pro * eta_vis * eta_qe`
pub fn total_efficiency(budget: &LossBudget) -> f64 {
    budget.eta_esc * budget.eta_pro * budget.eta_vis * budget.eta_qe
}
