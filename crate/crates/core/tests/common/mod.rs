//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use serde_json::Value;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Drift coefficients `(A, B)` from the general squeezed-basis Hamiltonian
/// `alpha a² + beta a†² + gamma a†a`, read off with `da/dt = -i(2 beta a† + gamma a)`.
pub fn drift(g: f64, dc: f64, theta_p: f64, r: f64, theta: f64) -> (Complex64, Complex64) {
    let (ch, sh) = (r.cosh(), r.sinh());
    let phi = theta_p - theta;
    let e = Complex64::from_polar(1.0, phi);
    let beta = Complex64::from_polar(1.0, -theta) * (0.5 * g * (e * sh * sh + e.conj() * ch * ch) - dc * ch * sh);
    let gamma = dc * (ch * ch + sh * sh) - g * ch * sh * (e + e.conj());
    (-I * gamma, -2.0 * I * beta)
}

/// Solves a 2x2 complex system by Gaussian elimination with partial pivoting.
pub fn solve2(m: [[Complex64; 2]; 2], rhs: [Complex64; 2]) -> Option<[Complex64; 2]> {
    let (mut m, mut rhs) = (m, rhs);
    if m[1][0].norm() > m[0][0].norm() {
        m.swap(0, 1);
        rhs.swap(0, 1);
    }
    if m[0][0].norm() == 0.0 {
        return None;
    }
    let f = m[1][0] / m[0][0];
    let m11 = m[1][1] - f * m[0][1];
    let r1 = rhs[1] - f * rhs[0];
    if m11.norm() == 0.0 {
        return None;
    }
    let y = r1 / m11;
    let x = (rhs[0] - m[0][1] * y) / m[0][0];
    Some([x, y])
}

/// Output transfer `[[t_bb, t_bd], [t_db, t_dd]]` of the canonical pipeline,
/// solved column by column from the Fourier-domain Langevin pair.
pub fn canonical_transfer(
    g: f64,
    dc: f64,
    theta_p: f64,
    kappa: f64,
    r: f64,
    theta: f64,
    omega: f64,
) -> Option<[[Complex64; 2]; 2]> {
    let (a, b) = drift(g, dc, theta_p, r, theta);
    let half = Complex64::new(0.5 * kappa, 0.0);
    // (-i w - (A - k/2)) a - B a† = sqrt(k) b_in, and the conjugate row with +i w
    let m = [[-I * omega - a + half, -b], [-b.conj(), I * omega - a.conj() + half]];
    let root = kappa.sqrt();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let col0 = solve2(m, [root * one, zero])?;
    let col1 = solve2(m, [zero, root * one])?;
    Some([
        [root * col0[0] - 1.0, root * col1[0]],
        [root * col0[1], root * col1[1] - 1.0],
    ])
}

/// Symmetrized variance of `c1 b + c2 b†` for a state with `<b†b> = n`, `<bb> = m`.
pub fn moment_variance(c1: Complex64, c2: Complex64, n: f64, m: Complex64) -> f64 {
    (c1.norm_sqr() + c2.norm_sqr()) * (n + 0.5) + 2.0 * (c1 * c2.conj() * m).re
}

/// Canonical `(var_x, var_p)` with `X = b + b†`, `P = -i(b - b†)`.
pub fn canonical_variances(
    g: f64,
    dc: f64,
    theta_p: f64,
    kappa: f64,
    r: f64,
    theta: f64,
    omega: f64,
) -> Option<(f64, f64)> {
    let t = canonical_transfer(g, dc, theta_p, kappa, r, theta, omega)?;
    let n = r.sinh().powi(2);
    let m = Complex64::from_polar(r.cosh() * r.sinh(), -theta);
    let vx = moment_variance(t[0][0] + t[1][0], t[0][1] + t[1][1], n, m);
    let vp = moment_variance(-I * (t[0][0] - t[1][0]), -I * (t[0][1] - t[1][1]), n, m);
    Some((vx, vp))
}

/// The printed phase-squeezed X-quadrature expression, transcribed term by
/// term; `P` swaps `e^{2r}` and `e^{-2r}`.
pub fn verbatim_literal(g: f64, dc: f64, kappa: f64, r: f64, omega: f64) -> (f64, f64) {
    let (a, b) = (
        -I * dc * (2.0 * r).cosh() - I * g * (2.0 * r).sinh(),
        I * dc * (2.0 * r).sinh() + I * g * (2.0 * r).cosh(),
    );
    let den = (I * omega - a + kappa.sqrt()) * (-I * omega - a.conj() + kappa.sqrt());
    let first = kappa * kappa / (2.0 * den) + (1.0 - kappa).sqrt();
    let second = kappa / den * (-I * omega + a - b);
    let (up, down) = ((2.0 * r).exp(), (-2.0 * r).exp());
    let vx = first * first * up - second * second * down;
    let vp = first * first * down - second * second * up;
    (vx.re, vp.re)
}

/// Validates `value` against the subset of JSON Schema the descriptor schema
/// uses. Returns the paths of all violations.
pub fn schema_violations(schema: &Value, value: &Value) -> Vec<String> {
    let mut out = Vec::new();
    check(schema, value, "$", &mut out);
    out
}

fn type_matches(ty: &str, v: &Value) -> bool {
    match ty {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "number" => v.is_number(),
        "integer" => v.as_f64().is_some_and(|x| x.fract() == 0.0),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        _ => false,
    }
}

fn check(schema: &Value, v: &Value, path: &str, out: &mut Vec<String>) {
    let Some(s) = schema.as_object() else { return };
    if let Some(ty) = s.get("type") {
        let ok = match ty {
            Value::String(t) => type_matches(t, v),
            Value::Array(ts) => ts.iter().filter_map(Value::as_str).any(|t| type_matches(t, v)),
            _ => true,
        };
        if !ok {
            out.push(format!("{path}: expected type {ty}"));
            return;
        }
    }
    if let Some(allowed) = s.get("enum").and_then(Value::as_array) {
        if !allowed.contains(v) {
            out.push(format!("{path}: not in enum"));
        }
    }
    if let Some(x) = v.as_f64() {
        let bound = |k: &str| s.get(k).and_then(Value::as_f64);
        if bound("minimum").is_some_and(|b| x < b)
            || bound("maximum").is_some_and(|b| x > b)
            || bound("exclusiveMinimum").is_some_and(|b| x <= b)
            || bound("exclusiveMaximum").is_some_and(|b| x >= b)
        {
            out.push(format!("{path}: {x} out of range"));
        }
    }
    if let Some(obj) = v.as_object() {
        let props = s.get("properties").and_then(Value::as_object);
        for key in s.get("required").and_then(Value::as_array).into_iter().flatten() {
            if let Some(k) = key.as_str() {
                if !obj.contains_key(k) {
                    out.push(format!("{path}: missing '{k}'"));
                }
            }
        }
        for (k, child) in obj {
            match props.and_then(|p| p.get(k)) {
                Some(sub) => check(sub, child, &format!("{path}.{k}"), out),
                None if s.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    out.push(format!("{path}: unexpected '{k}'"))
                }
                None => {}
            }
        }
    }
    if let Some(items) = v.as_array() {
        let len = items.len() as u64;
        if s.get("minItems").and_then(Value::as_u64).is_some_and(|n| len < n)
            || s.get("maxItems").and_then(Value::as_u64).is_some_and(|n| len > n)
        {
            out.push(format!("{path}: {len} items"));
        }
        if let Some(sub) = s.get("items") {
            for (i, item) in items.iter().enumerate() {
                check(sub, item, &format!("{path}[{i}]"), out);
            }
        }
    }
}
