//! Squeezed-basis form of the degenerate OPO Hamiltonian.
//!
//! The bare Hamiltonian (hbar = 1) is
//! `H = dc a†a + (g/2) e^{i theta_p} a² + (g/2) e^{-i theta_p} a†²`.
//! Substituting `a = a_s cosh r - a_s† e^{-i theta} sinh r` gives a new
//! quadratic form in `a_s`. With the main-text sign `e^{-i theta_p} a²` the
//! same results hold after `theta_p -> -theta_p`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::variance::{wrap_angle, SqueezedState};

/// Parameters of the bare OPO, all rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BareOpoParams {
    /// Parametric coupling strength.
    pub g: f64,
    /// Cavity detuning.
    pub delta_c: f64,
    /// Pump phase, rad.
    pub theta_p: f64,
    /// Cavity damping constant.
    pub kappa: f64,
}

impl BareOpoParams {
    pub fn new(g: f64, delta_c: f64, theta_p: f64, kappa: f64) -> Result<Self> {
        let p = Self {
            g,
            delta_c,
            theta_p,
            kappa,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(Error::domain(format!("g must be finite and >= 0, got {}", self.g)));
        }
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(Error::domain(format!("kappa must be > 0, got {}", self.kappa)));
        }
        if !self.delta_c.is_finite() || !self.theta_p.is_finite() {
            return Err(Error::domain("delta_c and theta_p must be finite"));
        }
        Ok(())
    }
}

/// Coefficients of `c_a2 a_s² + c_a2_dag a_s†² + c_number a_s†a_s + c_scalar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedHamiltonian {
    pub c_a2: Complex64,
    pub c_a2_dag: Complex64,
    pub c_number: f64,
    pub c_scalar: f64,
}

pub fn transform_hamiltonian(params: &BareOpoParams, reservoir: &SqueezedState) -> TransformedHamiltonian {
    let BareOpoParams {
        g, delta_c, theta_p, ..
    } = *params;
    let r = reservoir.r();
    let theta = reservoir.theta();
    let (ch, sh) = (r.cosh(), r.sinh());
    let phi = theta_p - theta;
    let half_g = 0.5 * g;

    // a_s² collects a² (cosh²), a†² (sinh², e^{2i theta}) and the a†a cross term
    let inner = Complex64::from_polar(half_g * ch * ch, phi) + Complex64::from_polar(half_g * sh * sh, -phi)
        - delta_c * ch * sh;
    let c_a2 = Complex64::from_polar(1.0, theta) * inner;

    let inner_dag = Complex64::from_polar(half_g * sh * sh, phi) + Complex64::from_polar(half_g * ch * ch, -phi)
        - delta_c * ch * sh;
    let c_a2_dag = Complex64::from_polar(1.0, -theta) * inner_dag;

    // e^{i phi} + e^{-i phi} = 2 cos phi
    let c_number = delta_c * (ch * ch + sh * sh) - g * ch * sh * 2.0 * phi.cos();
    let c_scalar = delta_c * sh * sh - half_g * ch * sh * 2.0 * phi.cos();

    TransformedHamiltonian {
        c_a2,
        c_a2_dag,
        c_number,
        c_scalar,
    }
}

/// `g cosh 2r`, the coupling in the squeezed frame when `theta_p - theta = pi`.
pub fn enhanced_coupling(g: f64, r: f64) -> f64 {
    g * (2.0 * r).cosh()
}

/// True when the pump phase sits a half-turn away from the squeezing angle.
pub fn interaction_condition(params: &BareOpoParams, reservoir: &SqueezedState, tol: f64) -> bool {
    let diff = wrap_angle(params.theta_p - reservoir.theta());
    (diff - std::f64::consts::PI).abs() <= tol
}
