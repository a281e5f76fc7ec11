//! Laser linewidth from a frequency-noise PSD with the beta-separation line.
//!
//! Only the part of the PSD lying above `8 ln2 f / pi²` broadens the line;
//! its area `D` gives `Gamma = sqrt(8 ln2 D)`.

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default spectrum-analyser input impedance, ohms.
pub const DEFAULT_Z0: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdKind {
    /// Spectrum-analyser reading of the PDH error signal, dBm per RBW.
    DbmRaw,
    /// Frequency-noise PSD, Hz²/Hz.
    FreqNoise,
}

impl std::str::FromStr for PsdKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dbm_raw" => Ok(Self::DbmRaw),
            "freq_noise" => Ok(Self::FreqNoise),
            other => Err(Error::config(format!("unknown PSD kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsdTrace {
    /// `(frequency Hz, value)` with strictly increasing frequency.
    pub samples: Vec<(f64, f64)>,
    pub kind: PsdKind,
    pub rbw: Option<f64>,
    /// PDH slope, V/Hz.
    pub k0: Option<f64>,
    pub z0: f64,
    /// Lower integration bound `1/T0`, Hz.
    pub f_min: Option<f64>,
}

impl PsdTrace {
    pub fn freq_noise(samples: Vec<(f64, f64)>) -> Result<Self> {
        let t = Self {
            samples,
            kind: PsdKind::FreqNoise,
            rbw: None,
            k0: None,
            z0: DEFAULT_Z0,
            f_min: None,
        };
        t.check_samples()?;
        Ok(t)
    }

    pub fn with_f_min(mut self, f_min: f64) -> Self {
        self.f_min = Some(f_min);
        self
    }

    fn check_samples(&self) -> Result<()> {
        for (i, &(f, v)) in self.samples.iter().enumerate() {
            if !(f > 0.0) || !f.is_finite() || !v.is_finite() {
                return Err(Error::Input(format!("sample {i}: need finite f > 0 and finite value")));
            }
            if i > 0 && f <= self.samples[i - 1].0 {
                return Err(Error::Input(format!(
                    "sample {i}: frequencies must be strictly increasing"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HighIndexSurface {
    /// Area above the beta line, Hz².
    pub surface_d: f64,
    pub crossover_freqs: Vec<f64>,
    /// Where integration started, `max(f_min, first sample)`.
    pub lower_bound_hz: f64,
    /// Last sample; the integral is cut here.
    pub truncation_hz: f64,
    /// True when the PSD is still above the line at the cut.
    pub truncated_above_line: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinewidthResult {
    pub gamma: f64,
    pub surface_d: f64,
    pub crossover_freqs: Vec<f64>,
    pub lower_bound_hz: f64,
    pub truncation_hz: f64,
    pub truncated_above_line: bool,
}

/// Converts a dBm trace to Hz²/Hz using the PDH slope and RBW.
pub fn convert_psd(trace: &PsdTrace) -> Result<PsdTrace> {
    if trace.kind == PsdKind::FreqNoise {
        return Ok(trace.clone());
    }
    let rbw = trace.rbw.ok_or_else(|| Error::config("dbm_raw trace needs rbw"))?;
    let k0 = trace.k0.ok_or_else(|| Error::config("dbm_raw trace needs k0"))?;
    if !(rbw > 0.0 && k0 > 0.0 && trace.z0 > 0.0) {
        return Err(Error::config("rbw, k0 and z0 must all be > 0"));
    }
    let scale = k0 * k0 / trace.z0;
    let samples = trace
        .samples
        .iter()
        .map(|&(f, dbm)| (f, 10f64.powf(dbm / 10.0) / 1000.0 / scale / rbw))
        .collect();
    Ok(PsdTrace {
        samples,
        kind: PsdKind::FreqNoise,
        ..trace.clone()
    })
}

/// `8 ln2 f / pi²`, Hz²/Hz.
pub fn beta_line(f: f64) -> f64 {
    8.0 * std::f64::consts::LN_2 * f / (std::f64::consts::PI * std::f64::consts::PI)
}

fn lerp(a: (f64, f64), b: (f64, f64), f: f64) -> f64 {
    a.1 + (b.1 - a.1) * (f - a.0) / (b.0 - a.0)
}

/// Trapezoidal area of the PSD above the beta line. Segments where the PSD
/// crosses the line are split at the interpolated crossing.
pub fn high_index_surface(trace: &PsdTrace) -> Result<HighIndexSurface> {
    if trace.kind != PsdKind::FreqNoise {
        return Err(Error::Input("convert the trace to freq_noise first".into()));
    }
    trace.check_samples()?;
    let s = &trace.samples;
    if s.len() < 2 {
        return Err(Error::Input("need at least 2 samples".into()));
    }
    let last = s[s.len() - 1];
    let lower = trace.f_min.map_or(s[0].0, |m| m.max(s[0].0));
    if lower >= last.0 {
        return Err(Error::Input(format!(
            "lower bound {lower} Hz is not below the last sample {} Hz",
            last.0
        )));
    }

    // samples clipped to [lower, last]
    let start = s.partition_point(|p| p.0 <= lower);
    let mut pts = Vec::with_capacity(s.len() - start + 1);
    if s[start - 1].0 == lower {
        pts.push(s[start - 1]);
    } else {
        pts.push((lower, lerp(s[start - 1], s[start], lower)));
    }
    pts.extend_from_slice(&s[start..]);

    let excess = |p: (f64, f64)| p.1 - beta_line(p.0);
    let mut d = 0.0;
    let mut crossings = Vec::new();
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ga, gb) = (excess(a), excess(b));
        let (up_a, up_b) = (ga > 0.0, gb > 0.0);
        if up_a && up_b {
            d += 0.5 * (a.1 + b.1) * (b.0 - a.0);
        } else if up_a != up_b {
            let fc = a.0 + (b.0 - a.0) * ga / (ga - gb);
            let sc = lerp(a, b, fc);
            crossings.push(fc);
            if up_a {
                d += 0.5 * (a.1 + sc) * (fc - a.0);
            } else {
                d += 0.5 * (sc + b.1) * (b.0 - fc);
            }
        }
    }
    Ok(HighIndexSurface {
        surface_d: d,
        crossover_freqs: crossings,
        lower_bound_hz: lower,
        truncation_hz: last.0,
        truncated_above_line: excess(last) > 0.0,
    })
}

/// `sqrt(8 ln2 D)`, Hz.
pub fn linewidth(surface_d: f64) -> Result<f64> {
    if !(surface_d >= 0.0) {
        return Err(Error::domain(format!("surface must be >= 0, got {surface_d}")));
    }
    Ok((8.0 * std::f64::consts::LN_2 * surface_d).sqrt())
}

/// Converts if needed, integrates and returns the linewidth.
pub fn estimate_linewidth(trace: &PsdTrace) -> Result<LinewidthResult> {
    let s = high_index_surface(&convert_psd(trace)?)?;
    Ok(LinewidthResult {
        gamma: linewidth(s.surface_d)?,
        surface_d: s.surface_d,
        crossover_freqs: s.crossover_freqs,
        lower_bound_hz: s.lower_bound_hz,
        truncation_hz: s.truncation_hz,
        truncated_above_line: s.truncated_above_line,
    })
}

/// Applies one `key=value` metadata pair. Unknown keys are ignored.
fn apply_meta(trace: &mut PsdTrace, key: &str, value: &str, line: usize) -> Result<()> {
    let num = || -> Result<f64> {
        value
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::parse(line, format!("bad number '{value}' for {key}")))
    };
    match key {
        "kind" => {
            trace.kind = value
                .parse()
                .map_err(|_| Error::parse(line, format!("unknown kind '{value}'")))?
        }
        "rbw" => trace.rbw = Some(num()?),
        "k0" => trace.k0 = Some(num()?),
        "z0" => trace.z0 = num()?,
        "fmin" => trace.f_min = Some(num()?),
        _ => {}
    }
    Ok(())
}

/// Parses the CSV trace format: `#` metadata lines with `key=value` pairs
/// (`kind`, `rbw`, `k0`, `z0`, `fmin`) and `frequency_hz,value` data lines.
pub fn ingest_trace(source: impl BufRead) -> Result<PsdTrace> {
    let mut trace = PsdTrace {
        samples: Vec::new(),
        kind: PsdKind::FreqNoise,
        rbw: None,
        k0: None,
        z0: DEFAULT_Z0,
        f_min: None,
    };
    let mut lineno = 0;
    for line in source.lines() {
        lineno += 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if text.starts_with('#') {
            for token in text.split(|c: char| c == '#' || c.is_whitespace()) {
                if let Some((k, v)) = token.split_once('=') {
                    apply_meta(&mut trace, k, v, lineno)?;
                }
            }
            continue;
        }
        let (fs, vs) = text
            .split_once(',')
            .ok_or_else(|| Error::parse(lineno, "expected 'frequency_hz,value'"))?;
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(lineno, format!("bad {what} '{}'", s.trim())))
        };
        let f = parse(fs, "frequency")?;
        let v = parse(vs, "value")?;
        if !(f > 0.0) {
            return Err(Error::parse(lineno, format!("frequency must be > 0, got {f}")));
        }
        if let Some(&(prev, _)) = trace.samples.last() {
            if f <= prev {
                return Err(Error::parse(
                    lineno,
                    format!("frequency {f} does not increase (previous {prev})"),
                ));
            }
        }
        trace.samples.push((f, v));
    }
    if trace.kind == PsdKind::DbmRaw && (trace.rbw.is_none() || trace.k0.is_none()) {
        return Err(Error::parse(lineno, "dbm_raw trace needs rbw and k0 metadata"));
    }
    if trace.samples.is_empty() {
        return Err(Error::parse(lineno, "no data rows"));
    }
    Ok(trace)
}
