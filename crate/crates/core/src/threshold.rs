//! Oscillation threshold and parametric gain of a doubly resonant OPO.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vacuum permeability, H/m.
pub const MU_0: f64 = 4.0 * std::f64::consts::PI * 1e-7;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoublyResonantParams {
    /// Pump transmittance of the coupler.
    pub t_p: f64,
    /// Pump round-trip loss.
    pub v_p: f64,
    /// Signal transmittance of the coupler.
    pub t_s: f64,
    /// Signal round-trip loss.
    pub l_s: f64,
    /// Effective nonlinearity, m/V.
    pub d_eff: f64,
    pub omega_s: f64,
    pub omega_i: f64,
    pub omega_p: f64,
    /// Pump refractive index.
    pub n_p: f64,
    /// Crystal length, m.
    pub crystal_len: f64,
    /// Boyd-Kleinman focusing factor.
    pub h_focus: f64,
}

impl DoublyResonantParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("t_p", self.t_p),
            ("v_p", self.v_p),
            ("t_s", self.t_s),
            ("l_s", self.l_s),
        ] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::domain(format!("{name} must lie in [0, 1), got {v}")));
            }
        }
        let sum = self.omega_s + self.omega_i;
        if !(self.omega_p > 0.0) || ((self.omega_p - sum) / self.omega_p).abs() > 1e-6 {
            return Err(Error::domain(format!(
                "energy conservation violated: omega_p = {} but omega_s + omega_i = {sum}",
                self.omega_p
            )));
        }
        if !(self.n_p > 0.0 && self.crystal_len > 0.0 && self.h_focus >= 0.0 && self.d_eff >= 0.0) {
            return Err(Error::domain("n_p and crystal_len must be > 0; d_eff and h_focus >= 0"));
        }
        Ok(())
    }
}

/// Nonlinear coupling `E` of the parametric interaction, 1/W.
pub fn nonlinear_coefficient(p: &DoublyResonantParams) -> f64 {
    4.0 * MU_0 * p.d_eff.powi(2) * p.omega_s.powi(2) * p.omega_i.powi(2) * p.crystal_len * p.h_focus
        / (std::f64::consts::PI * SPEED_OF_LIGHT.powi(2) * p.n_p.powi(2) * p.omega_p)
}

/// `P_th = (T_p + V_p)² (T_s + l)² / (2 T_p E)`, in watts.
pub fn threshold_power(p: &DoublyResonantParams) -> Result<f64> {
    if !(p.t_p > 0.0) {
        return Err(Error::domain("threshold needs a pump transmittance > 0"));
    }
    let e = nonlinear_coefficient(p);
    if !(e > 0.0) {
        return Err(Error::domain("threshold needs a non-zero nonlinear coefficient"));
    }
    Ok((p.t_p + p.v_p).powi(2) * (p.t_s + p.l_s).powi(2) / (2.0 * p.t_p * e))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalGain {
    pub gain: f64,
    pub above_threshold: bool,
}

/// `g0 = 1 / (1 - sqrt(P / P_th))²`. Above threshold the formula value is
/// still returned, flagged.
pub fn classical_gain(pump_power: f64, p_th: f64) -> Result<ClassicalGain> {
    if !(pump_power >= 0.0) || !(p_th > 0.0) {
        return Err(Error::domain("classical gain needs pump power >= 0 and P_th > 0"));
    }
    let root = (pump_power / p_th).sqrt();
    if root == 1.0 {
        return Err(Error::Singular("classical gain diverges at threshold".into()));
    }
    Ok(ClassicalGain {
        gain: 1.0 / (1.0 - root).powi(2),
        above_threshold: pump_power > p_th,
    })
}

/// Threshold lowered by the squeezed-frame gain enhancement, `P_th / cosh 2r`.
pub fn reduced_threshold(p_th: f64, r: f64) -> Result<f64> {
    if !(p_th > 0.0) || !(r >= 0.0) {
        return Err(Error::domain("reduced threshold needs P_th > 0 and r >= 0"));
    }
    Ok(p_th / (2.0 * r).cosh())
}

/// Spontaneous (`e^{r_p}`) and stimulated (`cosh 2r`) gain factors.
pub fn gain_comparison(r_p: f64, r: f64) -> Result<(f64, f64)> {
    if !(r_p >= 0.0) || !(r >= 0.0) {
        return Err(Error::domain("squeezing parameters must be >= 0"));
    }
    Ok((r_p.exp(), (2.0 * r).cosh()))
}

/// Squeezing parameter where `cosh 2r = e^r`. Below it the spontaneous
/// factor is the larger one.
pub const GAIN_CROSSOVER_R: f64 = 0.609_377_863_436_006_2;

/// Linear output-power model above the reduced threshold.
pub fn power_model_eval(slope: f64, intercept: f64, pump_ratio: f64) -> Result<f64> {
    if !(pump_ratio >= 1.0) {
        return Err(Error::domain(format!(
            "power model applies above threshold (pump ratio >= 1), got {pump_ratio}"
        )));
    }
    Ok(slope * pump_ratio + intercept)
}

/// Output power relative to `r0`: `cosh 2r / cosh 2r0`.
pub fn power_vs_r(r: f64, r0: f64) -> f64 {
    (2.0 * r).cosh() / (2.0 * r0).cosh()
}

/// Relative gap between a model value and a reported one, `(model - reported) / reported`.
pub fn relative_delta(model: f64, reported: f64) -> f64 {
    (model - reported) / reported
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn published_set() -> DoublyResonantParams {
        DoublyResonantParams {
            t_p: 0.025,
            v_p: 0.011,
            t_s: 0.15,
            l_s: 0.004,
            d_eff: 1e-11,
            omega_s: 1.77e15,
            omega_i: 1.77e15,
            omega_p: 3.54e15,
            n_p: 1.89,
            crystal_len: 0.01,
            h_focus: 1.0,
        }
    }

    #[test]
    fn nonlinear_coefficient_examples() {
        let p = published_set();
        let e = nonlinear_coefficient(&p);
        assert!((e - 1.3818e-2).abs() < 1e-6, "E = {e}");
        assert_eq!(nonlinear_coefficient(&DoublyResonantParams { d_eff: 0.0, ..p }), 0.0);
        let doubled = nonlinear_coefficient(&DoublyResonantParams { d_eff: 2e-11, ..p });
        assert!((doubled / e - 4.0).abs() < 1e-12);
    }

    #[test]
    fn threshold_examples() {
        let p = published_set();
        let pth = threshold_power(&p).unwrap();
        assert!((pth * 1e3 - 44.6).abs() < 0.15, "P_th = {} mW", pth * 1e3);
        // (T_s + l) doubled
        let q = DoublyResonantParams {
            t_s: 0.304,
            l_s: 0.004,
            ..p
        };
        assert!((threshold_power(&q).unwrap() / pth - 4.0).abs() < 1e-12);
        assert!(threshold_power(&DoublyResonantParams { t_p: 0.0, ..p }).is_err());
        assert!(threshold_power(&DoublyResonantParams { d_eff: 0.0, ..p }).is_err());
        let halved_e = DoublyResonantParams { h_focus: 0.5, ..p };
        assert!((threshold_power(&halved_e).unwrap() / pth - 2.0).abs() < 1e-12);
    }

    #[test]
    fn parameter_validation() {
        assert!(published_set().validate().is_ok());
        let bad = DoublyResonantParams {
            omega_p: 3.6e15,
            ..published_set()
        };
        assert!(bad.validate().is_err());
        let bad = DoublyResonantParams {
            t_s: 1.0,
            ..published_set()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn gain_examples() {
        assert_eq!(classical_gain(0.0, 1.0).unwrap().gain, 1.0);
        assert!((classical_gain(0.25, 1.0).unwrap().gain - 4.0).abs() < 1e-12);
        let g = classical_gain(70.0, 90.0).unwrap();
        assert!((g.gain - 71.72).abs() < 0.01 && !g.above_threshold);
        assert!(matches!(classical_gain(1.0, 1.0), Err(Error::Singular(_))));
        assert!(classical_gain(2.0, 1.0).unwrap().above_threshold);
    }

    #[test]
    fn reduced_threshold_examples() {
        assert_eq!(reduced_threshold(0.045, 0.0).unwrap(), 0.045);
        assert!((reduced_threshold(45.0, 0.99).unwrap() - 12.194).abs() < 1e-3);
        assert!((reduced_threshold(45.0, 0.8).unwrap() - 17.459).abs() < 1e-3);
        let delta = relative_delta(reduced_threshold(45.0, 0.99).unwrap(), 11.4);
        assert!(delta > 0.069 && delta < 0.070);
    }

    #[test]
    fn gain_comparison_examples() {
        assert_eq!(gain_comparison(0.0, 0.0).unwrap(), (1.0, 1.0));
        let (sp, st) = gain_comparison(0.8, 0.8).unwrap();
        assert!((st - 2.577).abs() < 1e-3 && (sp - 2.226).abs() < 1e-3);
        let (sp, st) = gain_comparison(1.2, 1.2).unwrap();
        assert!((st - 5.557).abs() < 1e-3 && (sp - 3.320).abs() < 1e-3);
    }

    #[test]
    fn gain_crossover_is_a_root() {
        let r = GAIN_CROSSOVER_R;
        assert!(((2.0 * r).cosh() - r.exp()).abs() < 1e-14);
    }

    #[test]
    fn power_model_examples() {
        let (slope, intercept) = (2.8e-3, -2.3e-3);
        assert!((power_model_eval(slope, intercept, 1.0).unwrap() - 0.5e-3).abs() < 1e-12);
        assert!((power_model_eval(slope, intercept, 1.75).unwrap() - 2.6e-3).abs() < 1e-12);
        assert_eq!(power_model_eval(0.0, 1e-3, 1.4).unwrap(), 1e-3);
        assert!(power_model_eval(slope, intercept, 0.9).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn threshold_is_quadratic_in_signal_loss(k in 0.1f64..5.0) {
                let p = published_set();
                let base = threshold_power(&p).unwrap();
                let scaled = DoublyResonantParams { t_s: p.t_s * k, l_s: p.l_s * k, ..p };
                let ratio = threshold_power(&scaled).unwrap() / base;
                prop_assert!((ratio / (k * k) - 1.0).abs() < 1e-12);
            }

            #[test]
            fn classical_gain_increasing(a in 0.0f64..0.999, b in 0.0f64..0.999) {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                let gl = classical_gain(lo, 1.0).unwrap().gain;
                let gh = classical_gain(hi, 1.0).unwrap().gain;
                prop_assert!(gl >= 1.0);
                if hi - lo > 1e-9 { prop_assert!(gh > gl); }
            }

            #[test]
            fn reduced_threshold_decreasing(a in 0.0f64..3.0, b in 0.0f64..3.0) {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                if hi - lo > 1e-9 {
                    prop_assert!(reduced_threshold(1.0, hi).unwrap() < reduced_threshold(1.0, lo).unwrap());
                }
            }

            #[test]
            fn stimulated_gain_dominates_past_crossover(r in 1e-6f64..3.0) {
                let (sp, st) = gain_comparison(r, r).unwrap();
                if r > GAIN_CROSSOVER_R + 1e-9 {
                    prop_assert!(st > sp);
                } else if r < GAIN_CROSSOVER_R - 1e-9 {
                    prop_assert!(st < sp);
                }
            }

            #[test]
            fn cosh_power_curve_monotone(a in 0.0f64..2.0, b in 0.0f64..2.0, r0 in 0.0f64..2.0) {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                prop_assert!(power_vs_r(hi, r0) >= power_vs_r(lo, r0));
                prop_assert!((power_vs_r(r0, r0) - 1.0).abs() < 1e-15);
            }
        }
    }
}
