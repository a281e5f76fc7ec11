//! The command-line operations, as library functions returning tables.

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::comb::{comb_detunings, default_tolerance, fsr};
use crate::descriptor::{ExperimentDescriptor, SweepVariable};
use crate::error::{Error, Result};
use crate::fitting::{fit_alpha, fit_cosh_scale, fit_linear, DataPoint, FitResult};
use crate::grid::{grid, Spacing};
use crate::linewidth::{estimate_linewidth, ingest_trace};
use crate::spectrum::{output_variance, subthreshold_variance, Mode, SpectrumConfig};
use crate::table::{Cell, Column, Format, Provenance, ResultTable};
use crate::threshold::{classical_gain, nonlinear_coefficient, reduced_threshold, relative_delta, threshold_power};
use crate::variance::variance_to_db;

const MW: f64 = 1e3;

fn mode_label(d: &ExperimentDescriptor, mode: Option<Mode>) -> String {
    mode.or(d.system.map(|s| s.mode))
        .map_or_else(|| "none".into(), |m| m.to_string())
}

fn provenance(command: &str, d: &ExperimentDescriptor, mode: Option<Mode>) -> Provenance {
    Provenance::new(command, &d.content_hash(), &mode_label(d, mode))
}

fn spectrum_columns(first: Column) -> Vec<Column> {
    vec![
        first,
        Column::new("var_x", "SNU", Format::Exact),
        Column::new("var_p", "SNU", Format::Exact),
        Column::new("dB_x", "dB", Format::Db),
        Column::new("dB_p", "dB", Format::Db),
        Column::new("eta", "1", Format::Exact),
        Column::new("flag", "", Format::Exact),
    ]
}

/// Spectrum cells at one sideband. Threshold singularities become a
/// flagged row of NaNs; other errors propagate.
fn spectrum_cells(cfg: &SpectrumConfig, omega: f64) -> Result<Vec<Cell>> {
    match output_variance(cfg, omega) {
        Ok((v, damped)) => {
            let (eta, flag) = damped.map_or((1.0, ""), |d| (d.eta, if d.clamped { "clamped" } else { "" }));
            Ok(vec![
                v.var_x.into(),
                v.var_p.into(),
                variance_to_db(v.var_x)?.into(),
                variance_to_db(v.var_p)?.into(),
                eta.into(),
                flag.into(),
            ])
        }
        Err(Error::ThresholdSingularity { .. }) => {
            let nan = Cell::Num(f64::NAN);
            Ok(vec![
                nan.clone(),
                nan.clone(),
                nan.clone(),
                nan.clone(),
                nan,
                "threshold".into(),
            ])
        }
        Err(e) => Err(e),
    }
}

/// The sideband grid: the descriptor's omega sweep if it has one, otherwise
/// the single analysis frequency.
pub fn default_omega_grid(d: &ExperimentDescriptor) -> Result<Vec<f64>> {
    match d.sweep {
        Some(s) if s.variable == SweepVariable::Omega => grid(s.lo, s.hi, s.count, s.spacing),
        _ => Ok(vec![d.system()?.omega]),
    }
}

pub fn cmd_spectrum(d: &ExperimentDescriptor, mode: Option<Mode>, omegas: &[f64]) -> Result<ResultTable> {
    let cfg = d.spectrum_config(mode)?;
    let mut table = ResultTable::new(
        spectrum_columns(Column::new("omega", "rad/s", Format::Exact)),
        provenance("spectrum", d, mode),
    );
    table.note("r", cfg.reservoir.r());
    if let Some(s) = &d.subthreshold {
        let v = subthreshold_variance(s.pump_ratio, s.f, s.gamma, s.eta_tot, s.theta_tot)?;
        table.note("subthreshold_dB_minus", format!("{:.2}", variance_to_db(v.var_x)?));
        table.note("subthreshold_dB_plus", format!("{:.2}", variance_to_db(v.var_p)?));
    }
    for &omega in omegas {
        if !(omega >= 0.0) {
            return Err(Error::domain(format!("sideband frequency must be >= 0, got {omega}")));
        }
        let mut row = vec![Cell::Num(omega)];
        row.extend(spectrum_cells(&cfg, omega)?);
        table.push(row);
    }
    Ok(table)
}

/// Reduced threshold for the descriptor's reservoir, W.
fn descriptor_reduced_threshold(d: &ExperimentDescriptor, r: f64) -> Result<Option<f64>> {
    match &d.doubly_resonant {
        Some(p) => Ok(Some(reduced_threshold(threshold_power(p)?, r)?)),
        None => Ok(None),
    }
}

pub fn cmd_sweep(d: &ExperimentDescriptor, mode: Option<Mode>) -> Result<ResultTable> {
    let s = d
        .sweep
        .ok_or_else(|| Error::config("descriptor has no 'sweep' section"))?;
    let xs = grid(s.lo, s.hi, s.count, s.spacing)?;
    match s.variable {
        SweepVariable::Omega => {
            let mut t = cmd_spectrum(d, mode, &xs)?;
            t.provenance.command = "sweep".into();
            Ok(t)
        }
        SweepVariable::PumpRatio => {
            let pm = d
                .power_model
                .ok_or_else(|| Error::config("pump-ratio sweep needs a 'power_model' section"))?;
            let r = d.reservoir.map_or(Ok(0.0), |r| r.effective_r())?;
            let p_th = descriptor_reduced_threshold(d, r)?;
            let mut cols = vec![Column::new("pump_ratio", "1", Format::Exact)];
            if p_th.is_some() {
                cols.push(Column::new("pump_power", "mW", Format::Sig3));
            }
            cols.push(Column::new("output_power", "mW", Format::Sig3));
            let mut t = ResultTable::new(cols, provenance("sweep", d, mode));
            for &x in &xs {
                let mut row = vec![Cell::Num(x)];
                if let Some(p) = p_th {
                    row.push((x * p * MW).into());
                }
                let out = crate::threshold::power_model_eval(pm.slope, pm.intercept, x)?;
                row.push((out * MW).into());
                t.push(row);
            }
            Ok(t)
        }
        SweepVariable::R => {
            let mut cols = vec![Column::new("r", "1", Format::Exact)];
            let has_threshold = d.doubly_resonant.is_some();
            if has_threshold {
                cols.push(Column::new("reduced_threshold", "mW", Format::Sig3));
            }
            if d.power_model.is_some() {
                cols.push(Column::new("output_power", "mW", Format::Sig3));
            }
            let cfg = match &d.system {
                Some(_) => Some(d.spectrum_config(mode)?),
                None => None,
            };
            if cfg.is_some() {
                cols.extend(spectrum_columns(Column::new("omega", "rad/s", Format::Exact)));
            }
            let mut t = ResultTable::new(cols, provenance("sweep", d, mode));
            for &r in &xs {
                let mut row = vec![Cell::Num(r)];
                if let Some(p) = descriptor_reduced_threshold(d, r)? {
                    row.push((p * MW).into());
                }
                if let Some(pm) = d.power_model {
                    row.push((pm.cosh_scale * (2.0 * r).cosh() * MW).into());
                }
                if let Some(c) = cfg {
                    let omega = d.system()?.omega;
                    row.push(omega.into());
                    row.extend(spectrum_cells(&c.with_r(r)?, omega)?);
                }
                t.push(row);
            }
            Ok(t)
        }
    }
}

/// Companion table for a sweep: the data, and the model fitted to it.
pub fn cmd_sweep_overlay(d: &ExperimentDescriptor, data: &[DataPoint]) -> Result<ResultTable> {
    let s = d
        .sweep
        .ok_or_else(|| Error::config("descriptor has no 'sweep' section"))?;
    let (fit, model): (FitResult, Box<dyn Fn(f64) -> f64>) = match s.variable {
        SweepVariable::PumpRatio => {
            let f = fit_linear(data)?;
            let (a, b) = (f.estimate[0], f.estimate[1]);
            (f, Box::new(move |x| a * x + b))
        }
        SweepVariable::R => {
            let f = fit_cosh_scale(data)?;
            let k = f.estimate[0];
            (f, Box::new(move |x| k * (2.0 * x).cosh()))
        }
        SweepVariable::Omega => {
            return Err(Error::config("no fitted overlay for an omega sweep"));
        }
    };
    let mut t = ResultTable::new(
        vec![
            Column::new("x", "1", Format::Exact),
            Column::new("y_data", "mW", Format::Sig3),
            Column::new("y_fit", "mW", Format::Sig3),
        ],
        provenance("sweep-fit", d, None),
    );
    for (name, v) in fit.parameters.iter().zip(&fit.estimate) {
        t.note(name, format!("{v:?}"));
    }
    t.note("residual_sse", format!("{:?}", fit.residual_sse));
    let xs = grid(s.lo, s.hi, s.count, Spacing::Linear)?;
    for p in data {
        t.push(vec![p.x.into(), (p.y * MW).into(), (model(p.x) * MW).into()]);
    }
    for x in xs {
        t.push(vec![x.into(), f64::NAN.into(), (model(x) * MW).into()]);
    }
    Ok(t)
}

pub fn cmd_threshold(d: &ExperimentDescriptor) -> Result<ResultTable> {
    let p = d.doubly_resonant()?;
    let e = nonlinear_coefficient(p);
    let p_th = threshold_power(p)?;
    let r = d.reservoir.map_or(Ok(0.0), |r| r.effective_r())?;
    let reduced = reduced_threshold(p_th, r)?;
    let mut cols = vec![
        Column::new("E", "1/W", Format::Exact),
        Column::new("P_th", "mW", Format::Sig3),
        Column::new("r", "1", Format::Exact),
        Column::new("P_th_reduced", "mW", Format::Sig3),
    ];
    let mut row: Vec<Cell> = vec![e.into(), (p_th * MW).into(), r.into(), (reduced * MW).into()];
    let spec = d.threshold;
    if let Some(reported) = spec.and_then(|s| s.reported_reduced_threshold) {
        cols.push(Column::new("P_th_reported", "mW", Format::Sig3));
        cols.push(Column::new("delta_vs_reported", "1", Format::Exact));
        row.push((reported * MW).into());
        row.push(relative_delta(reduced, reported).into());
    }
    if let Some(s) = spec {
        let g = classical_gain(s.pump_power, p_th)?;
        cols.push(Column::new("pump_power", "mW", Format::Sig3));
        cols.push(Column::new("g0", "1", Format::Exact));
        cols.push(Column::new("above_threshold", "", Format::Flag));
        row.push((s.pump_power * MW).into());
        row.push(g.gain.into());
        row.push(if g.above_threshold { 1.0 } else { 0.0 }.into());
    }
    let mut t = ResultTable::new(cols, provenance("threshold", d, None));
    t.push(row);
    Ok(t)
}

pub fn cmd_comb(d: &ExperimentDescriptor, tol: Option<f64>, fsr_override: Option<(f64, f64)>) -> Result<ResultTable> {
    let bandwidth = d
        .comb
        .ok_or_else(|| Error::config("descriptor has no 'comb' section"))?
        .bandwidth_hz;
    let (f1, f2) = match fsr_override {
        Some(pair) => pair,
        None => {
            let g = d.geometry()?;
            (fsr(&g[0])?, fsr(&g[1])?)
        }
    };
    let tol = match tol.or(d.comb.and_then(|c| c.tolerance_hz)) {
        Some(t) => t,
        None => {
            let g = d.geometry()?;
            default_tolerance(&g[0], &g[1])?
        }
    };
    let report = comb_detunings(f1, f2, bandwidth)?.with_tolerance(tol)?;
    let mut t = ResultTable::new(
        vec![
            Column::new("mode_index", "1", Format::Integer),
            Column::new("offset_hz", "Hz", Format::Exact),
            Column::new("detuning_hz", "Hz", Format::Exact),
            Column::new("co_resonant", "", Format::Flag),
        ],
        provenance("comb", d, None),
    );
    let modes = report.co_resonant_modes();
    t.note("fsr1_hz", format!("{f1:?}"));
    t.note("fsr2_hz", format!("{f2:?}"));
    t.note("bandwidth_hz", format!("{bandwidth:?}"));
    t.note("tolerance_hz", format!("{tol:?}"));
    t.note("co_resonant_count", modes.len());
    let listed: Vec<String> = modes.iter().map(|m| m.to_string()).collect();
    t.note("co_resonant_modes", listed.join(" "));
    for e in &report.entries {
        t.push(vec![
            (e.mode_index as f64).into(),
            e.offset_hz.into(),
            e.detuning_hz.into(),
            if e.co_resonant { 1.0 } else { 0.0 }.into(),
        ]);
    }
    Ok(t)
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn cmd_linewidth(trace: &[u8], f_min: Option<f64>) -> Result<Value> {
    let mut t = ingest_trace(trace)?;
    if let Some(f) = f_min {
        t.f_min = Some(f);
    }
    let result = estimate_linewidth(&t)?;
    Ok(json!({
        "provenance": {
            "command": "linewidth",
            "trace_sha256": sha256_hex(trace),
            "version": env!("CARGO_PKG_VERSION"),
        },
        "result": result,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitKind {
    Alpha,
    Linear,
    CoshScale,
}

impl std::str::FromStr for FitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" => Ok(Self::Alpha),
            "linear" => Ok(Self::Linear),
            "cosh-scale" => Ok(Self::CoshScale),
            other => Err(Error::config(format!("unknown fit kind '{other}'"))),
        }
    }
}

pub fn cmd_fit(
    kind: FitKind,
    data_text: &[u8],
    d: Option<&ExperimentDescriptor>,
    mode: Option<Mode>,
    bounds: (f64, f64),
) -> Result<Value> {
    let data = crate::fitting::ingest_data(data_text)?;
    let (fit, model) = match kind {
        FitKind::Linear => (fit_linear(&data)?, json!({"kind": "linear"})),
        FitKind::CoshScale => (fit_cosh_scale(&data)?, json!({"kind": "cosh-scale"})),
        FitKind::Alpha => {
            let d = d.ok_or_else(|| Error::config("alpha fit needs a descriptor or preset"))?;
            let m = d.alpha_model(mode)?;
            let fit = fit_alpha(&data, &m, bounds)?;
            let model = json!({
                "kind": "alpha",
                "descriptor": d.name,
                "descriptor_sha256": d.content_hash(),
                "mode": m.template.mode.to_string(),
                "r_p": m.r_p,
                "omega": m.omega,
                "bounds": [bounds.0, bounds.1],
            });
            (fit, model)
        }
    };
    Ok(json!({
        "provenance": {
            "command": "fit",
            "data_sha256": sha256_hex(data_text),
            "version": env!("CARGO_PKG_VERSION"),
        },
        "model": model,
        "points": data.len(),
        "fit": fit,
    }))
}
