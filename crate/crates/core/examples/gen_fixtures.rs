//! Regenerates the shipped fixtures under `fixtures/`.
//!
//! The linewidth anchors use a single-knee PSD `h0 / (1 + (f/fk)²)` whose
//! beta-line area has a closed form, so `h0` is chosen analytically for each
//! target linewidth and the sampled trace is left for the estimator.
//!
//! ```text
//! cargo run --example gen_fixtures
//! ```

use std::f64::consts::{LN_2, PI};
use std::fs;
use std::path::Path;

use opo_reservoir::grid::{grid, Spacing};

const KNEE_HZ: f64 = 1e4;
const F_MIN: f64 = 10.0;
const F_MAX: f64 = 1e6;
const SAMPLES: usize = 4000;
const RBW: f64 = 100.0;
const K0: f64 = 2e-6;
const Z0: f64 = 50.0;

fn beta_slope() -> f64 {
    8.0 * LN_2 / (PI * PI)
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Analytic linewidth of the knee PSD above `F_MIN`.
fn knee_gamma(h0: f64) -> f64 {
    let c = beta_slope();
    let fc = bisect(0.0, h0 / c, |f| c * f * (1.0 + (f / KNEE_HZ).powi(2)) - h0);
    let d = h0 * KNEE_HZ * ((fc / KNEE_HZ).atan() - (F_MIN / KNEE_HZ).atan());
    (8.0 * LN_2 * d.max(0.0)).sqrt()
}

fn write_trace(path: &Path, header: &str, samples: impl Iterator<Item = (f64, f64)>) {
    let mut out = String::from(header);
    for (f, v) in samples {
        out.push_str(&format!("{f:?},{v:?}\n"));
    }
    fs::write(path, out).unwrap();
}

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    fs::create_dir_all(&root).unwrap();
    let freqs = grid(F_MIN, F_MAX, SAMPLES, Spacing::Log).unwrap();

    let anchors = [
        ("r080", 30e3, false),
        ("r089", 27.8e3, true),
        ("r094", 23e3, false),
        ("r097", 18.7e3, true),
        ("r099", 15e3, false),
        ("laser1064", 15e3, true),
    ];
    for (name, target, raw) in anchors {
        let h0 = bisect(0.0, 1e8, |h| knee_gamma(h) - target);
        let psd = |f: f64| h0 / (1.0 + (f / KNEE_HZ).powi(2));
        let path = root.join(format!("linewidth_{name}.csv"));
        if raw {
            let header = format!(
                "# kind=dbm_raw rbw={RBW:?} k0={K0:?} z0={Z0:?} fmin={F_MIN:?}\n# knee h0={h0:?} target_hz={target:?}\n"
            );
            // invert the frequency-noise calibration back to analyser dBm
            let dbm = |s: f64| 10.0 * (s * RBW * K0 * K0 / Z0 * 1000.0).log10();
            write_trace(&path, &header, freqs.iter().map(|&f| (f, dbm(psd(f)))));
        } else {
            let header = format!("# kind=freq_noise fmin={F_MIN:?}\n# knee h0={h0:?} target_hz={target:?}\n");
            write_trace(&path, &header, freqs.iter().map(|&f| (f, psd(f))));
        }
    }

    let white = grid(F_MIN, F_MAX, 10_000, Spacing::Log).unwrap();
    write_trace(
        &root.join("linewidth_white.csv"),
        "# kind=freq_noise fmin=10.0\n# white h0=10000.0\n",
        white.iter().map(|&f| (f, 1e4)),
    );
    write_trace(
        &root.join("linewidth_below.csv"),
        "# kind=freq_noise fmin=10.0\n# entirely under the beta line\n",
        freqs.iter().map(|&f| (f, 1e-3)),
    );

    let data = [
        (
            "power_vs_pump.csv",
            "# pump ratio, output power in W\nx,y\n1.0,0.0005\n1.75,0.0026\n",
        ),
        (
            "power_vs_r.csv",
            "# squeezing parameter, output power in W\nx,y\n0.99,0.0026\n",
        ),
        (
            "noise_vs_r.csv",
            "# squeezing parameter, noise in dB\nx,y\n0.8,-3.2\n0.99,-5.4\n",
        ),
    ];
    for (name, text) in data {
        fs::write(root.join(name), text).unwrap();
    }
}
