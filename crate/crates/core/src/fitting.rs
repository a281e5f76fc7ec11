//! Scalar least-squares fits: the damping coefficient alpha, a straight line,
//! and a single `cosh 2r` scale.

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{damping_corrected_variance, quadrature_variance, SpectrumConfig};
use crate::variance::variance_to_db;

/// Grid cells scanned before golden-section refinement.
pub const ALPHA_GRID_CELLS: usize = 64;
/// Absolute tolerance on alpha.
pub const ALPHA_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    pub x: f64,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

impl DataPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y, sigma: None }
    }

    pub fn with_sigma(x: f64, y: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::domain(format!("sigma must be > 0, got {sigma}")));
        }
        Ok(Self {
            x,
            y,
            sigma: Some(sigma),
        })
    }

    /// `1 / sigma²`, or 1 without an error bar. An infinite sigma weighs 0.
    pub fn weight(&self) -> f64 {
        self.sigma.map_or(1.0, |s| 1.0 / (s * s))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub parameters: Vec<&'static str>,
    pub estimate: Vec<f64>,
    pub residual_sse: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn check_points(data: &[DataPoint]) -> Result<()> {
    for (i, p) in data.iter().enumerate() {
        if !p.x.is_finite() || !p.y.is_finite() {
            return Err(Error::Input(format!("data point {i} is not finite")));
        }
        if let Some(s) = p.sigma {
            if !(s > 0.0) {
                return Err(Error::Input(format!("data point {i}: sigma must be > 0")));
            }
        }
    }
    Ok(())
}

/// Which output quadrature the alpha model compares against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    #[default]
    X,
    P,
}

/// Noise power in dB versus injected `r`, with the damping correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaModel {
    pub template: SpectrumConfig,
    pub omega: f64,
    pub r_p: f64,
    pub quadrature: Quadrature,
}

impl AlphaModel {
    /// Variance before damping at squeezing parameter `r`.
    pub fn undamped(&self, r: f64) -> Result<f64> {
        let v = quadrature_variance(&self.template.with_r(r)?, self.omega)?;
        Ok(match self.quadrature {
            Quadrature::X => v.var_x,
            Quadrature::P => v.var_p,
        })
    }

    pub fn db(&self, r: f64, alpha: f64) -> Result<f64> {
        let v = self.undamped(r)?;
        variance_to_db(damping_corrected_variance(v, alpha, r, self.r_p)?.variance)
    }
}

/// One golden-section step, recorded for inspection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenStep {
    pub lo: f64,
    pub hi: f64,
    pub best_alpha: f64,
    pub best_sse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaTrace {
    pub grid_best: (f64, f64),
    pub steps: Vec<GoldenStep>,
}

/// Least-squares alpha over `bounds`, by a grid scan and golden-section
/// refinement. Ties go to the smaller alpha.
pub fn fit_alpha(data: &[DataPoint], model: &AlphaModel, bounds: (f64, f64)) -> Result<FitResult> {
    fit_alpha_traced(data, model, bounds).map(|(fit, _)| fit)
}

pub fn fit_alpha_traced(data: &[DataPoint], model: &AlphaModel, bounds: (f64, f64)) -> Result<(FitResult, AlphaTrace)> {
    if data.len() < 2 {
        return Err(Error::Input("alpha fit needs at least 2 data points".into()));
    }
    check_points(data)?;
    let (lo, hi) = bounds;
    if !(lo >= 0.0) || !(hi > lo) || !hi.is_finite() {
        return Err(Error::domain(format!(
            "alpha bounds must satisfy 0 <= lo < hi, got [{lo}, {hi}]"
        )));
    }
    // alpha only enters through the damping, so the spectrum is solved once
    let undamped = data.iter().map(|p| model.undamped(p.x)).collect::<Result<Vec<f64>>>()?;
    let sse = |alpha: f64| -> Result<f64> {
        let mut acc = 0.0;
        for (p, &v) in data.iter().zip(&undamped) {
            let damped = damping_corrected_variance(v, alpha, p.x, model.r_p)?.variance;
            let m = 10.0 * damped.log10();
            if !m.is_finite() {
                return Err(Error::domain(format!(
                    "model output is not finite at alpha = {alpha}, r = {}",
                    p.x
                )));
            }
            acc += (m - p.y).powi(2) * p.weight();
        }
        Ok(acc)
    };

    let cell = (hi - lo) / ALPHA_GRID_CELLS as f64;
    let mut best = (lo, sse(lo)?);
    let mut best_idx = 0;
    for i in 1..=ALPHA_GRID_CELLS {
        let a = if i == ALPHA_GRID_CELLS {
            hi
        } else {
            lo + cell * i as f64
        };
        let s = sse(a)?;
        if s < best.1 {
            best = (a, s);
            best_idx = i;
        }
    }
    let grid_best = best;
    let mut a = if best_idx == 0 {
        lo
    } else {
        lo + cell * (best_idx - 1) as f64
    };
    let mut b = if best_idx == ALPHA_GRID_CELLS {
        hi
    } else {
        lo + cell * (best_idx + 1) as f64
    };

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (sse(c)?, sse(d)?);
    let mut steps = Vec::new();
    let consider = |best: &mut (f64, f64), x: f64, f: f64| {
        if f < best.1 || (f == best.1 && x < best.0) {
            *best = (x, f);
        }
    };
    consider(&mut best, c, fc);
    consider(&mut best, d, fd);
    let mut iterations = 0;
    while b - a > ALPHA_TOL && iterations < 200 {
        iterations += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sse(c)?;
            consider(&mut best, c, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sse(d)?;
            consider(&mut best, d, fd);
        }
        steps.push(GoldenStep {
            lo: a,
            hi: b,
            best_alpha: best.0,
            best_sse: best.1,
        });
    }
    let fit = FitResult {
        parameters: vec!["alpha"],
        estimate: vec![best.0],
        residual_sse: best.1,
        iterations: ALPHA_GRID_CELLS + 1 + iterations,
        converged: b - a <= ALPHA_TOL,
    };
    Ok((fit, AlphaTrace { grid_best, steps }))
}

/// Weighted least-squares line `y = slope x + intercept`.
pub fn fit_linear(data: &[DataPoint]) -> Result<FitResult> {
    if data.len() < 2 {
        return Err(Error::Input("line fit needs at least 2 data points".into()));
    }
    check_points(data)?;
    let sw: f64 = data.iter().map(DataPoint::weight).sum();
    if !(sw > 0.0) {
        return Err(Error::Input("all data points have zero weight".into()));
    }
    let xm = data.iter().map(|p| p.weight() * p.x).sum::<f64>() / sw;
    let ym = data.iter().map(|p| p.weight() * p.y).sum::<f64>() / sw;
    let sxx: f64 = data.iter().map(|p| p.weight() * (p.x - xm).powi(2)).sum();
    let sxy: f64 = data.iter().map(|p| p.weight() * (p.x - xm) * (p.y - ym)).sum();
    let scale: f64 = data
        .iter()
        .map(|p| p.weight() * p.x * p.x)
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    if sxx <= 1e-14 * scale {
        return Err(Error::Singular("degenerate design: all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let sse = data
        .iter()
        .map(|p| p.weight() * (p.y - slope * p.x - intercept).powi(2))
        .sum();
    Ok(FitResult {
        parameters: vec!["slope", "intercept"],
        estimate: vec![slope, intercept],
        residual_sse: sse,
        iterations: 1,
        converged: true,
    })
}

/// Single scale `s` in `P = s cosh 2r`.
pub fn fit_cosh_scale(data: &[DataPoint]) -> Result<FitResult> {
    if data.is_empty() {
        return Err(Error::Input("cosh-scale fit needs at least 1 data point".into()));
    }
    check_points(data)?;
    let c = |p: &DataPoint| (2.0 * p.x).cosh();
    let num: f64 = data.iter().map(|p| p.weight() * p.y * c(p)).sum();
    let den: f64 = data.iter().map(|p| p.weight() * c(p) * c(p)).sum();
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::Input("cosh-scale fit has no usable weight".into()));
    }
    let s = num / den;
    let sse = data.iter().map(|p| p.weight() * (p.y - s * c(p)).powi(2)).sum();
    Ok(FitResult {
        parameters: vec!["scale"],
        estimate: vec![s],
        residual_sse: sse,
        iterations: 1,
        converged: true,
    })
}

/// Reads `x,y[,sigma]` rows. `#` lines are comments and a leading
/// `x,y` or `x,y,sigma` header is allowed.
pub fn ingest_data(source: impl BufRead) -> Result<Vec<DataPoint>> {
    let mut out = Vec::new();
    let mut lineno = 0;
    let mut seen_row = false;
    for line in source.lines() {
        lineno += 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        if !seen_row && (fields == ["x", "y"] || fields == ["x", "y", "sigma"]) {
            seen_row = true;
            continue;
        }
        seen_row = true;
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::parse(lineno, "expected 'x,y' or 'x,y,sigma'"));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(lineno, format!("bad number '{s}'")))
        };
        let (x, y) = (num(fields[0])?, num(fields[1])?);
        let point = match fields.get(2) {
            Some(s) => {
                let sigma = num(s)?;
                DataPoint::with_sigma(x, y, sigma)
                    .map_err(|_| Error::parse(lineno, format!("sigma must be > 0, got {sigma}")))?
            }
            None => DataPoint::new(x, y),
        };
        out.push(point);
    }
    if out.is_empty() {
        return Err(Error::parse(lineno, "no data rows"));
    }
    Ok(out)
}
