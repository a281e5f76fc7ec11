//! Output quadrature noise of the squeezed-reservoir OPO.
//!
//! The intracavity mode obeys (hbar = 1, frame of the squeezed basis)
//!
//! ```text
//! d/dt a_s  = A a_s + B a_s† - (kappa/2) a_s + sqrt(kappa) b_in
//! A = -i dc cosh 2r - i g sinh 2r
//! B = (i dc sinh 2r + i g cosh 2r) e^{-i theta}
//! ```
//!
//! which is the locked-phase (`theta_p - theta = pi`) form of the transformed
//! Hamiltonian. The Fourier-domain pair `(a_s, a_s†)` is solved at each
//! sideband `omega`, with `-i omega` on the `a_s` row and `+i omega` on the
//! `a_s†` row, so every transfer matrix satisfies `t_dd = conj(t_bb)`. In this
//! convention a sideband at `omega` responds like the carrier of a cavity
//! detuned by `-omega`; at `omega = 0` it agrees with the two-sided sideband
//! spectrum. The pair is mapped to the output with one of two boundary
//! conditions:
//!
//! * [`Mode::Canonical`]: `a_out = sqrt(kappa) a_s - b_in`. Lossless and
//!   passive-unitary; this is the default.
//! * [`Mode::Verbatim`]: the printed beam-splitter relation
//!   `a_out = sqrt(kappa) a_s + sqrt(1 - kappa) b_in`, with `kappa` read as a
//!   dimensionless transmissivity, and the printed closed-form X-quadrature
//!   variance. Kept for reproducing the published curves; it does not conserve
//!   shot noise.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::BareOpoParams;
use crate::error::{Error, Result};
use crate::variance::{apply_loss, QuadVariance, SqueezedState};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative size of the response denominator treated as singular.
pub const SINGULARITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Canonical,
    Verbatim,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(Mode::Canonical),
            "verbatim" => Ok(Mode::Verbatim),
            other => Err(Error::config(format!("unknown mode '{other}'"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Canonical => "canonical",
            Mode::Verbatim => "verbatim",
        })
    }
}

/// Effective two-photon-damping loss `eta = 1 - alpha |r - r_p|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Damping {
    pub alpha: f64,
    pub r_p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumConfig {
    pub params: BareOpoParams,
    pub reservoir: SqueezedState,
    pub mode: Mode,
    pub damping: Option<Damping>,
}

impl SpectrumConfig {
    pub fn new(params: BareOpoParams, reservoir: SqueezedState) -> Self {
        Self {
            params,
            reservoir,
            mode: Mode::Canonical,
            damping: None,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_damping(mut self, damping: Damping) -> Result<Self> {
        if !(damping.alpha >= 0.0) {
            return Err(Error::domain(format!("alpha must be >= 0, got {}", damping.alpha)));
        }
        self.damping = Some(damping);
        Ok(self)
    }

    pub fn with_r(mut self, r: f64) -> Result<Self> {
        self.reservoir = self.reservoir.with_r(r)?;
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseCoefficients {
    pub a_coef: Complex64,
    pub b_coef: Complex64,
}

/// Linear map from `(b_in, b_in†)` to an output pair at one sideband.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub t_bb: Complex64,
    pub t_bd: Complex64,
    pub t_db: Complex64,
    pub t_dd: Complex64,
}

impl TransferMatrix {
    /// Largest deviation from `t_dd = conj(t_bb)`, `t_db = conj(t_bd)`.
    pub fn conjugate_asymmetry(&self) -> f64 {
        (self.t_dd - self.t_bb.conj())
            .norm()
            .max((self.t_db - self.t_bd.conj()).norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub omega: f64,
    pub vars: QuadVariance,
}

pub fn response_coefficients(params: &BareOpoParams, reservoir: &SqueezedState) -> ResponseCoefficients {
    let (c2, s2) = ((2.0 * reservoir.r()).cosh(), (2.0 * reservoir.r()).sinh());
    let a_coef = -I * (params.delta_c * c2 + params.g * s2);
    let b_coef = I * (params.delta_c * s2 + params.g * c2) * Complex64::from_polar(1.0, -reservoir.theta());
    ResponseCoefficients { a_coef, b_coef }
}

/// Solves the intracavity pair `(a_s, a_s†)` in terms of `(b_in, b_in†)`.
pub fn intracavity_transfer(coef: &ResponseCoefficients, kappa: f64, omega: f64) -> Result<TransferMatrix> {
    let ResponseCoefficients { a_coef: a, b_coef: b } = *coef;
    let half = 0.5 * kappa;
    let d1 = -I * omega - a + half;
    let d2 = I * omega - a.conj() + half;
    let den = d1 * d2 - b.norm_sqr();
    // den is real for real parameters; a non-positive value means the
    // linearized mode is at or beyond its oscillation threshold
    if den.norm() < SINGULARITY_FLOOR * kappa * kappa || den.re <= 0.0 {
        return Err(Error::ThresholdSingularity {
            omega,
            denominator: den.re,
        });
    }
    let scale = kappa.sqrt() / den;
    Ok(TransferMatrix {
        t_bb: scale * d2,
        t_bd: scale * b,
        t_db: scale * b.conj(),
        t_dd: scale * d1,
    })
}

pub fn output_transfer(config: &SpectrumConfig, omega: f64) -> Result<TransferMatrix> {
    let coef = response_coefficients(&config.params, &config.reservoir);
    let kappa = config.params.kappa;
    match config.mode {
        Mode::Canonical => {
            let intra = intracavity_transfer(&coef, kappa, omega)?;
            let root = kappa.sqrt();
            Ok(TransferMatrix {
                t_bb: root * intra.t_bb - 1.0,
                t_bd: root * intra.t_bd,
                t_db: root * intra.t_db,
                t_dd: root * intra.t_dd - 1.0,
            })
        }
        Mode::Verbatim => {
            let through = verbatim_through(kappa)?;
            let (a, b) = (coef.a_coef, coef.b_coef);
            let half = 0.5 * kappa;
            let den = (I * omega - a + half) * (-I * omega - a.conj() + half) - b.norm_sqr();
            if den.norm() < SINGULARITY_FLOOR * kappa * kappa {
                return Err(Error::ThresholdSingularity {
                    omega,
                    denominator: den.re,
                });
            }
            let pre = kappa / den;
            Ok(TransferMatrix {
                t_bb: pre * (-I * omega - a.conj() + half) + through,
                t_bd: pre * b,
                t_db: pre * b.conj(),
                t_dd: pre * (I * omega - a + half) + through,
            })
        }
    }
}

fn verbatim_through(kappa: f64) -> Result<f64> {
    if kappa > 1.0 {
        return Err(Error::domain(format!(
            "verbatim mode reads kappa as a transmissivity and needs kappa <= 1, got {kappa}"
        )));
    }
    Ok((1.0 - kappa).sqrt())
}

/// Coefficients `(c_x, c_p)` with `X_out = c_x X_in + c_p P_in`, and the same
/// for `P_out`, from `X = b + b†`, `P = -i (b - b†)`.
fn quadrature_map(t: &TransferMatrix) -> [[Complex64; 2]; 2] {
    let TransferMatrix { t_bb, t_bd, t_db, t_dd } = *t;
    let x_row = [0.5 * (t_bb + t_db + t_bd + t_dd), 0.5 * I * (t_bb + t_db - t_bd - t_dd)];
    let p_row = [
        -0.5 * I * (t_bb - t_db + t_bd - t_dd),
        0.5 * (t_bb - t_db - t_bd + t_dd),
    ];
    [x_row, p_row]
}

fn hermitian_form(row: &[Complex64; 2], cov: &[[f64; 2]; 2]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            acc += row[i] * cov[i][j] * row[j].conj();
        }
    }
    acc.re
}

/// Output quadrature variances before two-photon-damping correction.
pub fn quadrature_variance(config: &SpectrumConfig, omega: f64) -> Result<QuadVariance> {
    match config.mode {
        Mode::Canonical => {
            let t = output_transfer(config, omega)?;
            let map = quadrature_map(&t);
            let cov = config.reservoir.covariance();
            QuadVariance::new(hermitian_form(&map[0], &cov), hermitian_form(&map[1], &cov))
        }
        Mode::Verbatim => verbatim_variance(config, omega),
    }
}

/// The printed closed form, including its signed (not modulus) squares.
/// The P quadrature uses the same expression with the two input variances
/// exchanged.
fn verbatim_variance(config: &SpectrumConfig, omega: f64) -> Result<QuadVariance> {
    let kappa = config.params.kappa;
    let through = verbatim_through(kappa)?;
    let ResponseCoefficients { a_coef: a, b_coef: b } = response_coefficients(&config.params, &config.reservoir);
    let root = kappa.sqrt();
    let m = (I * omega - a + root) * (-I * omega - a.conj() + root);
    if m.norm() < SINGULARITY_FLOOR * kappa * kappa {
        return Err(Error::ThresholdSingularity {
            omega,
            denominator: m.re,
        });
    }
    let first = (kappa * kappa / (2.0 * m) + through).powi(2);
    let second = (kappa / m * (-I * omega + a - b)).powi(2);
    let cov = config.reservoir.covariance();
    let (in_x, in_p) = (cov[0][0], cov[1][1]);
    let var_x = (first * in_x - second * in_p).re;
    let var_p = (first * in_p - second * in_x).re;
    QuadVariance::new(var_x, var_p).map_err(|_| {
        Error::domain(format!(
            "verbatim formula gives non-positive variance ({var_x}, {var_p}) at omega = {omega}"
        ))
    })
}

/// Result of the two-photon-damping correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedVariance {
    pub variance: f64,
    pub eta: f64,
    /// Set when `1 - alpha |r - r_p|` fell outside `[0, 1]`.
    pub clamped: bool,
}

pub fn damping_corrected_variance(v: f64, alpha: f64, r: f64, r_p: f64) -> Result<DampedVariance> {
    if !(alpha >= 0.0) {
        return Err(Error::domain(format!("alpha must be >= 0, got {alpha}")));
    }
    let raw = 1.0 - alpha * (r - r_p).abs();
    let eta = raw.clamp(0.0, 1.0);
    Ok(DampedVariance {
        variance: apply_loss(v, eta)?,
        eta,
        clamped: eta != raw,
    })
}

/// Output variances with the configured damping correction applied.
pub fn output_variance(config: &SpectrumConfig, omega: f64) -> Result<(QuadVariance, Option<DampedVariance>)> {
    let raw = quadrature_variance(config, omega)?;
    let Some(d) = config.damping else {
        return Ok((raw, None));
    };
    let r = config.reservoir.r();
    let x = damping_corrected_variance(raw.var_x, d.alpha, r, d.r_p)?;
    let p = damping_corrected_variance(raw.var_p, d.alpha, r, d.r_p)?;
    Ok((QuadVariance::new(x.variance, p.variance)?, Some(x)))
}

/// Evaluates the undamped spectrum on a caller-supplied grid, in grid order.
pub fn spectrum(config: &SpectrumConfig, omegas: &[f64]) -> Vec<Result<SpectrumPoint>> {
    omegas
        .iter()
        .map(|&omega| {
            if !(omega >= 0.0) {
                return Err(Error::domain(format!("sideband frequency must be >= 0, got {omega}")));
            }
            quadrature_variance(config, omega).map(|vars| SpectrumPoint { omega, vars })
        })
        .collect()
}

/// Squeezed (`var_x` = V-) and anti-squeezed (`var_p` = V+) variances of a
/// sub-threshold OPO with detection losses and phase jitter.
pub fn subthreshold_variance(
    pump_ratio: f64,
    f: f64,
    gamma: f64,
    eta_tot: f64,
    theta_tot: f64,
) -> Result<QuadVariance> {
    if !(pump_ratio >= 0.0) || pump_ratio > 1.0 {
        return Err(Error::domain(format!(
            "pump ratio must lie in [0, 1] for a sub-threshold OPO, got {pump_ratio}"
        )));
    }
    if !(gamma > 0.0) {
        return Err(Error::domain(format!("linewidth must be > 0, got {gamma}")));
    }
    if !(0.0..=1.0).contains(&eta_tot) {
        return Err(Error::domain(format!("efficiency must lie in [0, 1], got {eta_tot}")));
    }
    let x = pump_ratio.sqrt();
    let lorentz = 4.0 * (f / gamma).powi(2);
    let den_sq = (1.0 + x).powi(2) + lorentz;
    let den_anti = (1.0 - x).powi(2) + lorentz;
    if den_anti == 0.0 {
        return Err(Error::Singular(
            "sub-threshold variance diverges at pump ratio 1 and f = 0".into(),
        ));
    }
    let gain = 4.0 * eta_tot * x;
    let squeezed = 1.0 - gain / den_sq;
    let anti = 1.0 + gain / den_anti;
    let (s, c) = theta_tot.sin_cos();
    let (c2, s2) = (c * c, s * s);
    QuadVariance::new(squeezed * c2 + anti * s2, anti * c2 + squeezed * s2)
}

/// `<a_out† a_out>` for squeezed-vacuum input, at one sideband.
pub fn mean_photon_number(config: &SpectrumConfig, omega: f64) -> Result<f64> {
    let t = output_transfer(config, omega)?;
    let n = config.reservoir.photon_number();
    let m = config.reservoir.anomalous_moment();
    let val = t.t_db * t.t_bb * m + t.t_db * t.t_bd * (n + 1.0) + t.t_dd * t.t_bb * n + t.t_dd * t.t_bd * m.conj();
    Ok(val.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variance::variance_to_db;
    use std::f64::consts::PI;

    fn params(g: f64, dc: f64, kappa: f64) -> BareOpoParams {
        BareOpoParams::new(g, dc, PI, kappa).unwrap()
    }

    fn cfg(g: f64, dc: f64, kappa: f64, r: f64, theta: f64) -> SpectrumConfig {
        SpectrumConfig::new(params(g, dc, kappa), SqueezedState::new(r, theta).unwrap())
    }

    fn c_close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn response_examples() {
        let g = 1.7;
        let c = response_coefficients(&params(g, 0.0, 1.0), &SqueezedState::new(0.0, 0.8).unwrap());
        assert!(c_close(c.a_coef, Complex64::new(0.0, 0.0), 1e-15));
        assert!(c_close(c.b_coef, I * g * Complex64::from_polar(1.0, -0.8), 1e-15));

        let c = response_coefficients(&params(0.0, 0.3, 1.0), &SqueezedState::vacuum());
        assert!(c_close(c.a_coef, -I * 0.3, 1e-15));
        assert!(c_close(c.b_coef, Complex64::new(0.0, 0.0), 1e-15));

        let c = response_coefficients(&params(1.0, 0.0, 1.0), &SqueezedState::new(0.99, 0.0).unwrap());
        assert!((c.a_coef.im + 1.98f64.sinh()).abs() < 1e-12 && c.a_coef.re == 0.0);
        assert!((c.b_coef.im - 3.6904).abs() < 1e-4 && c.b_coef.re.abs() < 1e-15);
    }

    #[test]
    fn empty_cavity_intracavity_response() {
        let kappa = 2.0;
        let coef = ResponseCoefficients {
            a_coef: Complex64::new(0.0, 0.0),
            b_coef: Complex64::new(0.0, 0.0),
        };
        for &w in &[0.0, 0.5, 3.0] {
            let t = intracavity_transfer(&coef, kappa, w).unwrap();
            let expected = kappa.sqrt() / (0.5 * kappa - I * w);
            assert!(c_close(t.t_bb, expected, 1e-14));
            assert_eq!(t.t_bd, Complex64::new(0.0, 0.0));
        }
        let far = intracavity_transfer(&coef, kappa, 1e12).unwrap();
        assert!(far.t_bb.norm() < 1e-11);
    }

    #[test]
    fn threshold_raises_singularity() {
        let kappa = 1.0;
        let coef = response_coefficients(&params(0.5, 0.0, kappa), &SqueezedState::vacuum());
        assert!(matches!(
            intracavity_transfer(&coef, kappa, 0.0),
            Err(Error::ThresholdSingularity { .. })
        ));
        let coef = response_coefficients(&params(0.5 - 1e-3, 0.0, kappa), &SqueezedState::vacuum());
        assert!(intracavity_transfer(&coef, kappa, 0.0).is_ok());
        let coef = response_coefficients(&params(0.6, 0.0, kappa), &SqueezedState::vacuum());
        assert!(intracavity_transfer(&coef, kappa, 0.0).is_err());
    }

    #[test]
    fn canonical_passive_cavity_is_all_pass() {
        let kappa = 3.0;
        for &w in &[0.0, 0.1, 2.0, 40.0] {
            let t = output_transfer(&cfg(0.0, 0.0, kappa, 0.4, 0.0), w).unwrap();
            let expected = (0.5 * kappa + I * w) / (0.5 * kappa - I * w);
            assert!(c_close(t.t_bb, expected, 1e-14));
            assert!((t.t_bb.norm() - 1.0).abs() < 1e-14);
            assert_eq!(t.t_bd.norm(), 0.0);
        }
        // detuned but passive
        let t = output_transfer(&cfg(0.0, 0.7, kappa, 0.0, 0.0), 0.2).unwrap();
        assert!((t.t_bb.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn verbatim_passive_response_is_not_unitary() {
        let kappa: f64 = 0.15;
        let c = cfg(0.0, 0.0, kappa, 0.0, 0.0).with_mode(Mode::Verbatim);
        let t = output_transfer(&c, 0.0).unwrap();
        let expected = 2.0 + (1.0 - kappa).sqrt();
        assert!(c_close(t.t_bb, Complex64::new(expected, 0.0), 1e-12));
        assert!((t.t_bb.norm() - 1.0).abs() > 0.5);
        assert!(t.conjugate_asymmetry() < 1e-12);
    }

    #[test]
    fn verbatim_needs_dimensionless_kappa() {
        let c = cfg(0.0, 0.0, 2.0, 0.0, 0.0).with_mode(Mode::Verbatim);
        assert!(matches!(quadrature_variance(&c, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn shot_noise_pass_through() {
        for &w in &[0.0, 0.3, 5.0] {
            let v = quadrature_variance(&cfg(0.0, 0.0, 1.0, 0.0, 0.0), w).unwrap();
            assert!((v.var_x - 1.0).abs() < 1e-12 && (v.var_p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn passive_cavity_preserves_input_squeezing() {
        let r = 0.7;
        let v = quadrature_variance(&cfg(0.0, 0.0, 1.0, r, 0.0), 0.0).unwrap();
        assert!((v.var_x - (2.0 * r).exp()).abs() < 1e-12);
        assert!((v.var_p - (-2.0 * r).exp()).abs() < 1e-12);
        // off carrier the empty cavity only rotates the quadratures
        for &w in &[0.3, 5.0] {
            let v = quadrature_variance(&cfg(0.0, 0.0, 1.0, r, 0.0), w).unwrap();
            assert!((v.var_x + v.var_p - 2.0 * (2.0 * r).cosh()).abs() < 1e-12);
            assert!(v.product() >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn bare_opo_matches_textbook_squeezing_on_resonance() {
        // vacuum input, real coupling B = g (theta = pi/2): at zero sideband
        // frequency the quadratures are 1 -/+ 4 eps / (1 +/- eps)², eps = 2g/kappa
        let kappa = 2.0;
        for &g in &[0.1, 0.5, 0.9] {
            let v = quadrature_variance(&cfg(g, 0.0, kappa, 0.0, PI / 2.0), 0.0).unwrap();
            let eps = 2.0 * g / kappa;
            let sq = 1.0 - 4.0 * eps / (1.0 + eps).powi(2);
            let anti = 1.0 + 4.0 * eps / (1.0 - eps).powi(2);
            let (lo, hi) = (v.var_x.min(v.var_p), v.var_x.max(v.var_p));
            assert!((lo - sq).abs() < 1e-12, "{lo} vs {sq}");
            assert!((hi - anti).abs() < 1e-12, "{hi} vs {anti}");
        }
    }

    #[test]
    fn sideband_acts_as_detuning_without_reservoir() {
        // with the conjugate row carrying +i omega, a sideband at omega sees
        // the same response as a carrier detuned by -omega
        for &(g, dc, w) in &[(0.3, 0.0, 0.4), (0.2, 0.5, 1.1)] {
            let at_w = quadrature_variance(&cfg(g, dc, 2.0, 0.0, 0.3), w).unwrap();
            let shifted = quadrature_variance(&cfg(g, dc - w, 2.0, 0.0, 0.3), 0.0).unwrap();
            assert!((at_w.var_x - shifted.var_x).abs() < 1e-12);
            assert!((at_w.var_p - shifted.var_p).abs() < 1e-12);
        }
    }

    #[test]
    fn damping_examples() {
        let d = damping_corrected_variance(0.3, 2.1, 1.15, 1.15).unwrap();
        assert_eq!(d.variance, 0.3);
        assert_eq!(d.eta, 1.0);
        let d = damping_corrected_variance(0.3, 2.1, 0.8, 1.15).unwrap();
        assert!((d.eta - 0.265).abs() < 1e-12);
        assert!(!d.clamped);
        let d = damping_corrected_variance(0.3, 0.0, 0.2, 1.15).unwrap();
        assert_eq!(d.variance, 0.3);
        let d = damping_corrected_variance(0.3, 5.0, 0.0, 1.15).unwrap();
        assert!(d.clamped && d.eta == 0.0 && d.variance == 1.0);
        assert!(damping_corrected_variance(0.3, -1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn damping_kinks_at_r_p() {
        let f = |r: f64| damping_corrected_variance(0.4, 1.0, r, 1.0).unwrap().variance;
        let h = 1e-3;
        let left = (f(1.0) - f(1.0 - h)) / h;
        let right = (f(1.0 + h) - f(1.0)) / h;
        assert!((left + right).abs() < 1e-9 && left.abs() > 0.1);
        // linear away from the kink
        let s1 = (f(0.5) - f(0.4)) / 0.1;
        let s2 = (f(0.8) - f(0.7)) / 0.1;
        assert!((s1 - s2).abs() < 1e-9);
    }

    #[test]
    fn subthreshold_examples() {
        let v = subthreshold_variance(0.0, 18e6, 68e6, 0.97, 0.03).unwrap();
        assert!((v.var_x - 1.0).abs() < 1e-15 && (v.var_p - 1.0).abs() < 1e-15);

        let v = subthreshold_variance(70.0 / 90.0, 18e6, 68e6, 0.97, 0.030).unwrap();
        assert!((v.var_x - 0.1160).abs() < 1e-4);
        assert!((variance_to_db(v.var_x).unwrap() + 9.36).abs() < 0.01);
        assert!(v.var_p > 1.0);

        let v = subthreshold_variance(0.999, 0.0, 68e6, 1.0, 0.0).unwrap();
        assert!(v.var_x < 1e-6);
        assert!(matches!(
            subthreshold_variance(1.0, 0.0, 68e6, 1.0, 0.0),
            Err(Error::Singular(_))
        ));
        assert!(subthreshold_variance(1.2, 1.0, 68e6, 1.0, 0.0).is_err());
        assert!(subthreshold_variance(0.5, 1.0, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn subthreshold_monotone_in_pump() {
        let mut last = f64::INFINITY;
        for i in 0..200 {
            let p = i as f64 / 200.0;
            let v = subthreshold_variance(p, 18e6, 68e6, 0.97, 0.0).unwrap().var_x;
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn photon_number_examples() {
        assert_eq!(mean_photon_number(&cfg(0.0, 0.0, 1.0, 0.0, 0.0), 0.3).unwrap(), 0.0);
        let r: f64 = 0.8;
        let n = mean_photon_number(&cfg(0.0, 0.0, 1.0, r, 0.4), 0.3).unwrap();
        assert!((n - r.sinh().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn photon_number_quadratic_in_coupling_for_vacuum_input() {
        let n = |g: f64| mean_photon_number(&cfg(g, 0.0, 2.0, 0.0, 0.0), 0.3).unwrap();
        let (a, b) = (n(1e-3), n(2e-3));
        assert!((b / a - 4.0).abs() < 1e-3, "ratio {}", b / a);
    }

    #[test]
    fn spectrum_preserves_grid_order_and_flags_errors() {
        let c = cfg(0.5, 0.0, 1.0, 0.0, 0.0);
        let pts = spectrum(&c, &[1.0, 0.0, 2.0, -1.0]);
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0].as_ref().unwrap().omega, 1.0);
        assert!(matches!(pts[1], Err(Error::ThresholdSingularity { .. })));
        assert_eq!(pts[2].as_ref().unwrap().omega, 2.0);
        assert!(matches!(pts[3], Err(Error::Domain(_))));
    }

    #[test]
    fn output_variance_applies_damping() {
        let c = cfg(0.2, 0.0, 1.0, 0.8, 0.0)
            .with_damping(Damping { alpha: 2.1, r_p: 1.15 })
            .unwrap();
        let raw = quadrature_variance(&c, 0.1).unwrap();
        let (v, d) = output_variance(&c, 0.1).unwrap();
        let d = d.unwrap();
        assert!((d.eta - 0.265).abs() < 1e-12);
        assert!((v.var_x - (0.265 * raw.var_x + 0.735)).abs() < 1e-12);
    }
}
