//! Coefficient pair `(r, q)` of the equation `-(r y')' + q y = f`.
//!
//! A [`WeightField`] exposes pointwise evaluation together with the two
//! cumulative integrals everything else is built from,
//!
//! ```text
//! R(a, b) = int_a^b dt / r(t),      Q(a, b) = int_a^b q(t) dt,
//! ```
//!
//! using closed-form antiderivatives for the presets and exact piecewise
//! integration for tabulated data. Standing hypotheses (`r > 0`, `q >= 0`,
//! positive one-sided mass of `q`, divergence of `R * Q` products) are
//! probed numerically by [`validate_hypotheses`]; the verdict is evidence,
//! not proof, and is reported as such.

use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad;
use crate::trend::{classify, TrendClass};

/// Tabulated coefficients: strictly increasing abscissas with `r`, `q`
/// samples, interpolated piecewise-linearly (positivity preserving) and
/// extended by constants beyond the table range.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    pub q: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientSpec {
    /// `r == r0`, `q == q0`.
    Constant { r0: f64, q0: f64 },
    /// `r = exp(alpha |x|)`, `q = exp(beta |x|)`.
    Exponential { alpha: f64, beta: f64 },
    /// `r == 1`, `q = 1 + x^(2k)`.
    PolynomialQ { k: u32 },
    Tabulated(Table),
}

impl CoefficientSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            CoefficientSpec::Constant { .. } => "constant",
            CoefficientSpec::Exponential { .. } => "exponential",
            CoefficientSpec::PolynomialQ { .. } => "polynomial-q",
            CoefficientSpec::Tabulated(_) => "tabulated",
        }
    }
}

/// Parse the plain-text `key=value` coefficient spec format.
///
/// ```text
/// kind=exponential
/// alpha=-1.0
/// beta=1.0
/// ```
///
/// `kind=tabulated` takes `table=<path>` resolved against `base_dir`; the
/// table itself is a 3-column CSV `x,r,q` with a header row.
pub fn parse_spec_str(text: &str, base_dir: Option<&Path>) -> Result<CoefficientSpec> {
    let mut kind: Option<String> = None;
    let mut params: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::ConfigParse(format!(
                "line {}: expected key=value, got {:?}",
                lineno + 1,
                line
            )));
        };
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim().to_string();
        if key == "kind" {
            kind = Some(value.to_ascii_lowercase());
        } else {
            params.push((key, value));
        }
    }
    let kind = kind.ok_or_else(|| Error::ConfigParse("missing kind=".into()))?;

    let get_f64 = |name: &str| -> Result<f64> {
        for (k, v) in &params {
            if k == name {
                return v
                    .parse::<f64>()
                    .map_err(|_| Error::ConfigParse(format!("{name}: not a number: {v:?}")));
            }
        }
        Err(Error::ConfigParse(format!("missing {name}=")))
    };

    let spec = match kind.as_str() {
        "constant" => CoefficientSpec::Constant {
            r0: get_f64("r0")?,
            q0: get_f64("q0")?,
        },
        "exponential" => CoefficientSpec::Exponential {
            alpha: get_f64("alpha")?,
            beta: get_f64("beta")?,
        },
        "polynomial-q" | "polynomial_q" => {
            let k = get_f64("k").unwrap_or(1.0);
            if !(k.fract() == 0.0 && (1.0..=8.0).contains(&k)) {
                return Err(Error::ConfigParse(format!("k must be an integer in 1..=8, got {k}")));
            }
            CoefficientSpec::PolynomialQ { k: k as u32 }
        }
        "tabulated" => {
            let mut path = None;
            for (k, v) in &params {
                if k == "table" {
                    path = Some(v.clone());
                }
            }
            let rel = path.ok_or_else(|| Error::ConfigParse("tabulated kind needs table=".into()))?;
            // no filesystem access without an anchor directory; this keeps
            // string-level parsing pure
            let dir = base_dir.ok_or_else(|| {
                Error::ConfigParse("tabulated spec requires a base directory".into())
            })?;
            let text = std::fs::read_to_string(dir.join(&rel))?;
            CoefficientSpec::Tabulated(parse_table_csv(&text)?)
        }
        other => {
            return Err(Error::ConfigParse(format!("unknown kind {other:?}")));
        }
    };
    validate_spec(&spec)?;
    Ok(spec)
}

/// Read a coefficient spec from a file.
pub fn load_spec(path: &Path) -> Result<CoefficientSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_spec_str(&text, path.parent())
}

/// Parse the 3-column `x,r,q` CSV with a header row.
pub fn parse_table_csv(text: &str) -> Result<Table> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedTable("empty table".into()))?;
    let cols: Vec<&str> = header.split(',').map(|c| c.trim()).collect();
    if cols.len() != 3 || !cols[0].eq_ignore_ascii_case("x") {
        return Err(Error::MalformedTable(format!(
            "expected header x,r,q, got {header:?}"
        )));
    }
    let mut x = Vec::new();
    let mut r = Vec::new();
    let mut q = Vec::new();
    for (lineno, raw) in lines.enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(|f| f.trim()).collect();
        if fields.len() != 3 {
            return Err(Error::MalformedTable(format!(
                "row {}: expected 3 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            let v: f64 = s
                .parse()
                .map_err(|_| Error::MalformedTable(format!("row {}: bad number {s:?}", lineno + 2)))?;
            if !v.is_finite() {
                return Err(Error::MalformedTable(format!(
                    "row {}: non-finite value",
                    lineno + 2
                )));
            }
            Ok(v)
        };
        x.push(parse(fields[0])?);
        r.push(parse(fields[1])?);
        q.push(parse(fields[2])?);
    }
    let table = Table { x, r, q };
    validate_table(&table)?;
    Ok(table)
}

fn validate_table(t: &Table) -> Result<()> {
    if t.x.len() < 3 {
        return Err(Error::MalformedTable(format!(
            "need at least 3 rows, got {}",
            t.x.len()
        )));
    }
    for w in t.x.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::MalformedTable(format!(
                "x column not strictly increasing at x = {}",
                w[1]
            )));
        }
    }
    for (i, &ri) in t.r.iter().enumerate() {
        if !(ri > 0.0) {
            return Err(Error::InvalidCoefficient {
                what: "r",
                x: t.x[i],
                value: ri,
            });
        }
    }
    for (i, &qi) in t.q.iter().enumerate() {
        if !(qi >= 0.0) {
            return Err(Error::InvalidCoefficient {
                what: "q",
                x: t.x[i],
                value: qi,
            });
        }
    }
    Ok(())
}

fn validate_spec(spec: &CoefficientSpec) -> Result<()> {
    match spec {
        CoefficientSpec::Constant { r0, q0 } => {
            if !(*r0 > 0.0) || !r0.is_finite() {
                return Err(Error::InvalidCoefficient {
                    what: "r",
                    x: 0.0,
                    value: *r0,
                });
            }
            if !(*q0 >= 0.0) || !q0.is_finite() {
                return Err(Error::InvalidCoefficient {
                    what: "q",
                    x: 0.0,
                    value: *q0,
                });
            }
        }
        CoefficientSpec::Exponential { alpha, beta } => {
            if !alpha.is_finite() || !beta.is_finite() {
                return Err(Error::ConfigParse("alpha/beta must be finite".into()));
            }
        }
        CoefficientSpec::PolynomialQ { .. } => {}
        CoefficientSpec::Tabulated(t) => validate_table(t)?,
    }
    Ok(())
}

/// Uniform sample grid on `[-X, X]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub half_width: f64,
    pub samples: usize,
}

impl Window {
    pub fn new(half_width: f64, samples: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Numeric(format!(
                "window half-width must be positive, got {half_width}"
            )));
        }
        if samples < 3 {
            return Err(Error::Numeric(format!(
                "window needs at least 3 samples, got {samples}"
            )));
        }
        Ok(Window {
            half_width,
            samples,
        })
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.samples;
        let x = self.half_width;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    x
                } else {
                    -x + 2.0 * x * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// `int_a^b exp(c |t|) dt` without cancellation: short intervals far from
/// the origin keep full relative precision via `exp_m1` anchored at one
/// endpoint.
fn exp_abs_integral(c: f64, a: f64, b: f64) -> f64 {
    if a > b {
        return -exp_abs_integral(c, b, a);
    }
    if c == 0.0 {
        return b - a;
    }
    if a >= 0.0 {
        (c * a).exp() * (c * (b - a)).exp_m1() / c
    } else if b <= 0.0 {
        (-c * b).exp() * (c * (b - a)).exp_m1() / c
    } else {
        exp_abs_integral(c, a, 0.0) + exp_abs_integral(c, 0.0, b)
    }
}

/// `b^p - a^p` in factored form when both ends share a sign, so short
/// intervals at large |x| do not cancel.
fn power_diff(a: f64, b: f64, p: i32) -> f64 {
    power_diff_len(a, b, b - a, p)
}

/// Same, with the exact interval length supplied by the caller.
fn power_diff_len(a: f64, b: f64, len: f64, p: i32) -> f64 {
    if a * b <= 0.0 {
        // opposite signs and odd p: the two terms add, no cancellation
        return b.powi(p) - a.powi(p);
    }
    let mut sum = 0.0;
    for j in 0..p {
        sum += b.powi(j) * a.powi(p - 1 - j);
    }
    len * sum
}

/// `int_{x-d}^x exp(c |t|) dt` anchored at `x` with exact length.
fn exp_abs_integral_left(c: f64, x: f64, d: f64) -> f64 {
    if c == 0.0 {
        return d;
    }
    if x <= 0.0 {
        (-c * x).exp() * (c * d).exp_m1() / c
    } else if x - d >= 0.0 {
        -(c * x).exp() * (-c * d).exp_m1() / c
    } else {
        // straddles the origin; both pieces anchor at 0 exactly
        exp_abs_integral(c, x - d, 0.0) + (c * x).exp_m1() / c
    }
}

/// `int_x^{x+d} exp(c |t|) dt` anchored at `x` with exact length.
fn exp_abs_integral_right(c: f64, x: f64, d: f64) -> f64 {
    if c == 0.0 {
        return d;
    }
    if x >= 0.0 {
        (c * x).exp() * (c * d).exp_m1() / c
    } else if x + d <= 0.0 {
        -(-c * x).exp() * (-c * d).exp_m1() / c
    } else {
        ((-c * x).exp_m1() / c) + exp_abs_integral(c, 0.0, x + d)
    }
}

/// Evaluator for a coefficient pair with exact-as-possible cumulative
/// integrals. Immutable after construction; all methods take `&self`.
#[derive(Debug)]
pub struct WeightField {
    spec: CoefficientSpec,
    // tabulated presets carry prefix sums of the exact per-segment integrals
    cum_r: Vec<f64>,
    cum_q: Vec<f64>,
    extrapolation_warned: AtomicBool,
}

impl Clone for WeightField {
    fn clone(&self) -> Self {
        WeightField {
            spec: self.spec.clone(),
            cum_r: self.cum_r.clone(),
            cum_q: self.cum_q.clone(),
            extrapolation_warned: AtomicBool::new(
                self.extrapolation_warned.load(Ordering::Relaxed),
            ),
        }
    }
}

impl WeightField {
    pub fn spec(&self) -> &CoefficientSpec {
        &self.spec
    }
}

/// Construct the evaluator, re-validating the spec invariants.
pub fn build_weight_field(spec: CoefficientSpec) -> Result<WeightField> {
    validate_spec(&spec)?;
    let (cum_r, cum_q) = match &spec {
        CoefficientSpec::Tabulated(t) => {
            let n = t.x.len();
            let mut cum_r = vec![0.0; n];
            let mut cum_q = vec![0.0; n];
            for i in 1..n {
                let len = t.x[i] - t.x[i - 1];
                cum_r[i] = cum_r[i - 1] + segment_inv_integral(t.r[i - 1], t.r[i], len);
                cum_q[i] = cum_q[i - 1] + 0.5 * (t.q[i - 1] + t.q[i]) * len;
            }
            (cum_r, cum_q)
        }
        _ => (Vec::new(), Vec::new()),
    };
    Ok(WeightField {
        spec,
        cum_r,
        cum_q,
        extrapolation_warned: AtomicBool::new(false),
    })
}

/// `int_0^len dt / (a + (b - a) t / len)` for a linear segment.
fn segment_inv_integral(a: f64, b: f64, len: f64) -> f64 {
    if (b - a).abs() <= 1e-12 * a.abs().max(b.abs()) {
        len / (0.5 * (a + b))
    } else {
        len * (b / a).ln() / (b - a)
    }
}

impl WeightField {
    pub fn r(&self, x: f64) -> f64 {
        match &self.spec {
            CoefficientSpec::Constant { r0, .. } => *r0,
            CoefficientSpec::Exponential { alpha, .. } => (alpha * x.abs()).exp(),
            CoefficientSpec::PolynomialQ { .. } => 1.0,
            CoefficientSpec::Tabulated(t) => self.table_eval(t, &t.r, x),
        }
    }

    pub fn q(&self, x: f64) -> f64 {
        match &self.spec {
            CoefficientSpec::Constant { q0, .. } => *q0,
            CoefficientSpec::Exponential { beta, .. } => (beta * x.abs()).exp(),
            CoefficientSpec::PolynomialQ { k } => 1.0 + x.powi(2 * *k as i32),
            CoefficientSpec::Tabulated(t) => self.table_eval(t, &t.q, x),
        }
    }

    fn table_eval(&self, t: &Table, col: &[f64], x: f64) -> f64 {
        let n = t.x.len();
        if x <= t.x[0] {
            self.note_extrapolation(x);
            return col[0];
        }
        if x >= t.x[n - 1] {
            self.note_extrapolation(x);
            return col[n - 1];
        }
        let i = match t.x.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => return col[i],
            Err(i) => i,
        };
        let w = (x - t.x[i - 1]) / (t.x[i] - t.x[i - 1]);
        col[i - 1] + w * (col[i] - col[i - 1])
    }

    fn note_extrapolation(&self, x: f64) {
        if !self.extrapolation_warned.swap(true, Ordering::Relaxed)
            && std::env::var_os("SRT_LOG").is_some()
        {
            eprintln!("slgreen: tabulated coefficients extended by constants (first hit at x = {x:.3})");
        }
    }

    /// `R(a, b) = int_a^b dt / r(t)`.
    pub fn r_integral(&self, a: f64, b: f64) -> f64 {
        match &self.spec {
            CoefficientSpec::Constant { r0, .. } => (b - a) / r0,
            CoefficientSpec::Exponential { alpha, .. } => exp_abs_integral(-alpha, a, b),
            CoefficientSpec::PolynomialQ { .. } => b - a,
            CoefficientSpec::Tabulated(t) => self.table_integral(t, &self.cum_r, a, b, true),
        }
    }

    /// `Q(a, b) = int_a^b q(t) dt`.
    pub fn q_integral(&self, a: f64, b: f64) -> f64 {
        match &self.spec {
            CoefficientSpec::Constant { q0, .. } => q0 * (b - a),
            CoefficientSpec::Exponential { beta, .. } => exp_abs_integral(*beta, a, b),
            CoefficientSpec::PolynomialQ { k } => {
                let p = 2 * *k as i32 + 1;
                (b - a) + power_diff(a, b, p) / p as f64
            }
            CoefficientSpec::Tabulated(t) => self.table_integral(t, &self.cum_q, a, b, false),
        }
    }

    fn table_integral(&self, t: &Table, cum: &[f64], a: f64, b: f64, inv: bool) -> f64 {
        if a == b {
            return 0.0;
        }
        if b < a {
            return -self.table_integral(t, cum, b, a, inv);
        }
        // same-segment shortcut keeps short intervals cancellation-free
        let n = t.x.len();
        if b <= t.x[0] || a >= t.x[n - 1] {
            let edge = if a >= t.x[n - 1] { n - 1 } else { 0 };
            let v = if inv { 1.0 / t.r[edge] } else { t.q[edge] };
            return (b - a) * v;
        }
        if a >= t.x[0] && b <= t.x[n - 1] {
            let i = t.x.partition_point(|&v| v < b);
            if i >= 1 && a >= t.x[i - 1] {
                let lo = t.x[i - 1];
                let span = t.x[i] - lo;
                let col = if inv { &t.r } else { &t.q };
                let va = col[i - 1] + (a - lo) / span * (col[i] - col[i - 1]);
                let vb = col[i - 1] + (b - lo) / span * (col[i] - col[i - 1]);
                return if inv {
                    segment_inv_integral(va, vb, b - a)
                } else {
                    0.5 * (va + vb) * (b - a)
                };
            }
        }
        let prim = |x: f64| -> f64 {
            let n = t.x.len();
            if x <= t.x[0] {
                let edge = if inv { 1.0 / t.r[0] } else { t.q[0] };
                return (x - t.x[0]) * edge;
            }
            if x >= t.x[n - 1] {
                let edge = if inv { 1.0 / t.r[n - 1] } else { t.q[n - 1] };
                return cum[n - 1] + (x - t.x[n - 1]) * edge;
            }
            let i = t.x.partition_point(|&v| v < x);
            // i >= 1, x in (x[i-1], x[i]]
            let lo = t.x[i - 1];
            let len = x - lo;
            let span = t.x[i] - lo;
            let w = len / span;
            if inv {
                let r0 = t.r[i - 1];
                let r1 = r0 + w * (t.r[i] - r0);
                cum[i - 1] + segment_inv_integral(r0, r1, len)
            } else {
                let q0 = t.q[i - 1];
                let q1 = q0 + w * (t.q[i] - q0);
                cum[i - 1] + 0.5 * (q0 + q1) * len
            }
        };
        prim(b) - prim(a)
    }

    /// `R(x - d, x)` with the length supplied exactly: the endpoint
    /// `x - d` loses the low bits of `d` whenever `d` is tiny against
    /// `ulp(x)`, so the presets evaluate anchored closed forms instead.
    pub fn r_integral_left(&self, x: f64, d: f64) -> f64 {
        match &self.spec {
            CoefficientSpec::Constant { r0, .. } => d / r0,
            CoefficientSpec::Exponential { alpha, .. } => exp_abs_integral_left(-alpha, x, d),
            CoefficientSpec::PolynomialQ { .. } => d,
            CoefficientSpec::Tabulated(_) => self.r_integral(x - d, x),
        }
    }

    /// `R(x, x + d)`, length-anchored.
    pub fn r_integral_right(&self, x: f64, d: f64) -> f64 {
        match &self.spec {
            CoefficientSpec::Constant { r0, .. } => d / r0,
            CoefficientSpec::Exponential { alpha, .. } => exp_abs_integral_right(-alpha, x, d),
            CoefficientSpec::PolynomialQ { .. } => d,
            CoefficientSpec::Tabulated(_) => self.r_integral(x, x + d),
        }
    }

    /// `Q(x - d, x)`, length-anchored.
    pub fn q_integral_left(&self, x: f64, d: f64) -> f64 {
        match &self.spec {
            CoefficientSpec::Constant { q0, .. } => q0 * d,
            CoefficientSpec::Exponential { beta, .. } => exp_abs_integral_left(*beta, x, d),
            CoefficientSpec::PolynomialQ { k } => {
                let p = 2 * *k as i32 + 1;
                d + power_diff_len(x - d, x, d, p) / p as f64
            }
            CoefficientSpec::Tabulated(_) => self.q_integral(x - d, x),
        }
    }

    /// `Q(x, x + d)`, length-anchored.
    pub fn q_integral_right(&self, x: f64, d: f64) -> f64 {
        match &self.spec {
            CoefficientSpec::Constant { q0, .. } => q0 * d,
            CoefficientSpec::Exponential { beta, .. } => exp_abs_integral_right(*beta, x, d),
            CoefficientSpec::PolynomialQ { k } => {
                let p = 2 * *k as i32 + 1;
                d + power_diff_len(x, x + d, d, p) / p as f64
            }
            CoefficientSpec::Tabulated(_) => self.q_integral(x, x + d),
        }
    }

    /// Adaptive-quadrature route for `R(a, b)`; used to cross-check the
    /// closed forms.
    pub fn r_integral_quad(&self, a: f64, b: f64) -> f64 {
        quad::integrate(|t| 1.0 / self.r(t), a, b, quad::QUAD_ABS_TOL, quad::QUAD_REL_TOL)
    }

    /// Adaptive-quadrature route for `Q(a, b)`.
    pub fn q_integral_quad(&self, a: f64, b: f64) -> f64 {
        quad::integrate(|t| self.q(t), a, b, quad::QUAD_ABS_TOL, quad::QUAD_REL_TOL)
    }

    /// `(r'(x), q'(x))` for the differentiable presets, None for tabulated.
    pub fn derivatives(&self, x: f64) -> Option<(f64, f64)> {
        match &self.spec {
            CoefficientSpec::Constant { .. } => Some((0.0, 0.0)),
            CoefficientSpec::Exponential { alpha, beta } => {
                let s = if x >= 0.0 { 1.0 } else { -1.0 };
                Some((
                    s * alpha * (alpha * x.abs()).exp(),
                    s * beta * (beta * x.abs()).exp(),
                ))
            }
            CoefficientSpec::PolynomialQ { k } => {
                let p = 2 * *k as i32;
                Some((0.0, p as f64 * x.powi(p - 1)))
            }
            CoefficientSpec::Tabulated(_) => None,
        }
    }

    /// Abscissas where the coefficients lose smoothness: table knots and
    /// the `|x|` corner of the exponential presets. ODE sweeps land on
    /// these exactly so every step integrates a smooth piece.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.spec {
            CoefficientSpec::Constant { .. } | CoefficientSpec::PolynomialQ { .. } => Vec::new(),
            CoefficientSpec::Exponential { .. } => vec![0.0],
            CoefficientSpec::Tabulated(t) => t.x.clone(),
        }
    }

    /// Whether `r` is identically 1 (`|r - 1| <= 1e-12` at the probe grid).
    pub fn is_unit_r(&self, window: &Window) -> bool {
        match &self.spec {
            CoefficientSpec::Constant { r0, .. } => (r0 - 1.0).abs() <= 1e-12,
            CoefficientSpec::Exponential { alpha, .. } => *alpha == 0.0,
            CoefficientSpec::PolynomialQ { .. } => true,
            CoefficientSpec::Tabulated(_) => window
                .grid()
                .iter()
                .all(|&x| (self.r(x) - 1.0).abs() <= 1e-12),
        }
    }

    /// Check `r > 0`, `q >= 0` at every grid node.
    pub fn check_positivity(&self, window: &Window) -> Result<()> {
        for &x in &window.grid() {
            let r = self.r(x);
            if !(r > 0.0) {
                return Err(Error::InvalidCoefficient {
                    what: "r",
                    x,
                    value: r,
                });
            }
            let q = self.q(x);
            if !(q >= 0.0) {
                return Err(Error::InvalidCoefficient {
                    what: "q",
                    x,
                    value: q,
                });
            }
        }
        Ok(())
    }
}

/// Outcome of the numeric probes of the standing hypotheses. Report-only:
/// a failed probe flags the field, it does not abort construction.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    /// One-sided `q` masses at the probe points `-X, 0, X` over reach `8X`.
    pub q_mass: Vec<QMassProbe>,
    /// `q` has positive mass on both sides of each probe point.
    pub positivity_ok: bool,
    /// Trend of `F(D) = R(x-D, x) * Q(x-D, x)` as `D` runs through `X, 2X,
    /// 4X`, for both signs of `D`, at each probe point.
    pub divergence: Vec<DivergenceProbe>,
    /// All divergence probes classified as diverging.
    pub divergence_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct QMassProbe {
    pub x: f64,
    pub left_mass: f64,
    pub right_mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceProbe {
    pub x: f64,
    pub backward: TrendClass,
    pub forward: TrendClass,
}

/// Probe the standing hypotheses on the window. Never claims to prove a
/// limit over the whole line.
pub fn validate_hypotheses(field: &WeightField, window: &Window) -> HypothesisReport {
    let x_max = window.half_width;
    let reach = 8.0 * x_max;
    let probes = [-x_max, 0.0, x_max];

    let q_mass: Vec<QMassProbe> = probes
        .iter()
        .map(|&x| QMassProbe {
            x,
            left_mass: field.q_integral(x - reach, x),
            right_mass: field.q_integral(x, x + reach),
        })
        .collect();
    let positivity_ok = q_mass
        .iter()
        .all(|p| p.left_mass > 0.0 && p.right_mass > 0.0);

    let shells = [x_max, 2.0 * x_max, 4.0 * x_max];
    let divergence: Vec<DivergenceProbe> = probes
        .iter()
        .map(|&x| {
            let backward =
                classify(shells.map(|d| field.r_integral(x - d, x) * field.q_integral(x - d, x)));
            let forward =
                classify(shells.map(|d| field.r_integral(x, x + d) * field.q_integral(x, x + d)));
            DivergenceProbe {
                x,
                backward,
                forward,
            }
        })
        .collect();
    let divergence_ok = divergence
        .iter()
        .all(|p| p.backward == TrendClass::Diverging && p.forward == TrendClass::Diverging);

    HypothesisReport {
        q_mass,
        positivity_ok,
        divergence,
        divergence_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(r0: f64, q0: f64) -> WeightField {
        build_weight_field(CoefficientSpec::Constant { r0, q0 }).unwrap()
    }

    fn exponential(alpha: f64, beta: f64) -> WeightField {
        build_weight_field(CoefficientSpec::Exponential { alpha, beta }).unwrap()
    }

    #[test]
    fn constant_integrals() {
        let f = constant(1.0, 1.0);
        assert_eq!(f.r_integral(0.0, 2.0), 2.0);
        assert_eq!(f.q_integral(-1.0, 1.0), 2.0);
    }

    #[test]
    fn exponential_closed_form() {
        let f = exponential(-1.0, -1.0);
        // R(0,1) = int_0^1 e^t dt = e - 1
        let e = std::f64::consts::E;
        assert!((f.r_integral(0.0, 1.0) - (e - 1.0)).abs() < 1e-12);
        // across the kink at 0
        assert!((f.r_integral(-1.0, 1.0) - 2.0 * (e - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_table() {
        let t = Table {
            x: vec![0.0, 1.0, 2.0],
            r: vec![1.0, 1.0, 1.0],
            q: vec![0.0, 1.0, 2.0],
        };
        let f = build_weight_field(CoefficientSpec::Tabulated(t)).unwrap();
        assert!((f.q_integral(0.0, 2.0) - 2.0).abs() < 1e-14);
        assert!((f.r_integral(0.0, 2.0) - 2.0).abs() < 1e-14);
        // partial segment
        assert!((f.q_integral(0.0, 0.5) - 0.125).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let f = exponential(-0.7, 0.3);
        for (a, b) in [(0.0, 1.5), (-2.0, 0.5), (-3.0, 3.0)] {
            let exact = f.r_integral(a, b);
            let quad = f.r_integral_quad(a, b);
            assert!((exact - quad).abs() <= 1e-8 * (1.0 + exact.abs()));
            let exact = f.q_integral(a, b);
            let quad = f.q_integral_quad(a, b);
            assert!((exact - quad).abs() <= 1e-8 * (1.0 + exact.abs()));
        }
    }

    #[test]
    fn rejects_nonpositive_r() {
        let t = Table {
            x: vec![0.0, 1.0, 2.0],
            r: vec![1.0, 0.0, 1.0],
            q: vec![1.0, 1.0, 1.0],
        };
        assert!(matches!(
            build_weight_field(CoefficientSpec::Tabulated(t)),
            Err(Error::InvalidCoefficient { what: "r", .. })
        ));
    }

    #[test]
    fn rejects_decreasing_x() {
        let text = "x,r,q\n0,1,1\n2,1,1\n1,1,1\n";
        assert!(matches!(
            parse_table_csv(text),
            Err(Error::MalformedTable(_))
        ));
    }

    #[test]
    fn parses_spec_text() {
        let s = parse_spec_str("kind=exponential\nalpha=-1.0\nbeta=1.0\n", None).unwrap();
        assert_eq!(
            s,
            CoefficientSpec::Exponential {
                alpha: -1.0,
                beta: 1.0
            }
        );
        let s = parse_spec_str("# comment\nkind=constant\nr0=1\nq0=4\n", None).unwrap();
        assert_eq!(s, CoefficientSpec::Constant { r0: 1.0, q0: 4.0 });
        assert!(parse_spec_str("kind=constant\nr0=1\n", None).is_err());
        assert!(parse_spec_str("r0=1\nq0=1\n", None).is_err());
    }

    #[test]
    fn hypotheses_on_constant_field() {
        let f = constant(1.0, 1.0);
        let w = Window::new(10.0, 21).unwrap();
        let rep = validate_hypotheses(&f, &w);
        assert!(rep.positivity_ok);
        // F(d) = d^2 diverges
        assert!(rep.divergence_ok);
    }

    #[test]
    fn hypotheses_flag_zero_q() {
        let t = Table {
            x: vec![-1.0, 0.0, 1.0],
            r: vec![1.0, 1.0, 1.0],
            q: vec![0.0, 0.0, 0.0],
        };
        let f = build_weight_field(CoefficientSpec::Tabulated(t)).unwrap();
        let w = Window::new(1.0, 11).unwrap();
        let rep = validate_hypotheses(&f, &w);
        assert!(!rep.positivity_ok);
        assert!(!rep.divergence_ok);
    }

    #[test]
    fn grid_is_symmetric_and_increasing() {
        let w = Window::new(5.0, 11).unwrap();
        let g = w.grid();
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], -5.0);
        assert_eq!(g[10], 5.0);
        assert_eq!(g[5], 0.0);
        assert!(g.windows(2).all(|p| p[1] > p[0]));
    }
}
