//! Auxiliary length functions and local geometry of the coefficient pair.
//!
//! Every length is the unique root of a nondecreasing integral map:
//!
//! ```text
//! d1(x):  R(x-d, x)   * Q(x-d, x)   = 1
//! d2(x):  R(x, x+d)   * Q(x, x+d)   = 1
//! d(x):   int_{x-d}^{x+d} dt / (r h)     = 1
//! s(x):   int_{x-s}^{x+s} dt / (r rho)   = 1
//! dtilde: d * int_{x-d}^{x+d} q dt       = 2      (r == 1 only)
//! mu(x):  int_{x-mu}^{x+mu} q h dt       = 1      (smallest root)
//! ```
//!
//! with `phi = R(x-d1, x)`, `psi = R(x, x+d2)` and the harmonic mean
//! `h = phi psi / (phi + psi)`. Monotonicity makes bracket-plus-bisection
//! globally convergent, so each solver doubles an initial bracket and then
//! polishes with false position.

use std::cell::{Cell, RefCell};

use serde::Serialize;

use crate::coeff::{WeightField, Window};
use crate::error::{Error, Result};
use crate::quad::{self, monotone_unit_root, RootFail};

/// Default search cap multiplier: roots are abandoned beyond `8 X`.
pub const SEARCH_RADIUS_FACTOR: f64 = 8.0;

fn map_root_fail(fail: RootFail, kind: &'static str, x: f64, window_like: bool) -> Error {
    match fail {
        RootFail::NeverReaches { radius, .. } => {
            if window_like {
                Error::WindowExhausted { kind, x, radius }
            } else {
                Error::NoFiniteRoot { kind, x, radius }
            }
        }
        RootFail::NonFinite { at } => Error::Numeric(format!(
            "{kind}: non-finite map value near t = {at} while solving at x = {x}"
        )),
    }
}

/// Root of `R(x-d, x) Q(x-d, x) = 1`.
pub fn solve_d1(field: &WeightField, x: f64, max_radius: f64) -> Result<f64> {
    solve_d1_from(field, x, max_radius, 1.0)
}

pub fn solve_d1_from(field: &WeightField, x: f64, max_radius: f64, guess: f64) -> Result<f64> {
    monotone_unit_root(
        |d| field.r_integral_left(x, d) * field.q_integral_left(x, d),
        guess,
        max_radius,
    )
    .map_err(|e| map_root_fail(e, "d1", x, false))
}

/// Root of `R(x, x+d) Q(x, x+d) = 1`.
pub fn solve_d2(field: &WeightField, x: f64, max_radius: f64) -> Result<f64> {
    solve_d2_from(field, x, max_radius, 1.0)
}

pub fn solve_d2_from(field: &WeightField, x: f64, max_radius: f64, guess: f64) -> Result<f64> {
    monotone_unit_root(
        |d| field.r_integral_right(x, d) * field.q_integral_right(x, d),
        guess,
        max_radius,
    )
    .map_err(|e| map_root_fail(e, "d2", x, false))
}

/// One-sided weight integrals and their harmonic mean at a point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhiPsiH {
    pub d1: f64,
    pub d2: f64,
    pub phi: f64,
    pub psi: f64,
    pub h: f64,
    /// Relative residual of the identity `h = Q(x-d1, x+d2)^{-1}`.
    pub identity_residual: f64,
}

/// Solve both one-sided lengths at `x` and evaluate `phi`, `psi`, `h`.
pub fn compute_phi_psi_h(field: &WeightField, x: f64, max_radius: f64) -> Result<PhiPsiH> {
    compute_phi_psi_h_from(field, x, max_radius, 1.0, 1.0)
}

fn compute_phi_psi_h_from(
    field: &WeightField,
    x: f64,
    max_radius: f64,
    g1: f64,
    g2: f64,
) -> Result<PhiPsiH> {
    let d1 = solve_d1_from(field, x, max_radius, g1)?;
    let d2 = solve_d2_from(field, x, max_radius, g2)?;
    let phi = field.r_integral_left(x, d1);
    let psi = field.r_integral_right(x, d2);
    // ratio form avoids overflow when phi, psi are both huge
    let h = phi / (1.0 + phi / psi);
    let total_q = field.q_integral_left(x, d1) + field.q_integral_right(x, d2);
    let identity_residual = (h * total_q - 1.0).abs();
    Ok(PhiPsiH {
        d1,
        d2,
        phi,
        psi,
        h,
        identity_residual,
    })
}

/// Warm-started evaluator of `h(t)`; neighbouring calls reuse the previous
/// roots as bracket seeds. Failures surface as NaN and are stashed so the
/// enclosing solver can report the real cause.
pub struct HEval<'a> {
    field: &'a WeightField,
    max_radius: f64,
    last_d1: Cell<f64>,
    last_d2: Cell<f64>,
    error: RefCell<Option<Error>>,
}

impl<'a> HEval<'a> {
    pub fn new(field: &'a WeightField, max_radius: f64) -> Self {
        HEval {
            field,
            max_radius,
            last_d1: Cell::new(1.0),
            last_d2: Cell::new(1.0),
            error: RefCell::new(None),
        }
    }

    pub fn values(&self, t: f64) -> Result<PhiPsiH> {
        let out = compute_phi_psi_h_from(
            self.field,
            t,
            self.max_radius,
            self.last_d1.get(),
            self.last_d2.get(),
        )?;
        self.last_d1.set(out.d1);
        self.last_d2.set(out.d2);
        Ok(out)
    }

    /// `h(t)`, or NaN with the error stashed.
    pub fn h(&self, t: f64) -> f64 {
        match self.values(t) {
            Ok(v) => v.h,
            Err(e) => {
                self.error.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    }

    pub fn take_error(&self) -> Option<Error> {
        self.error.borrow_mut().take()
    }
}

/// Root of `int_{x-d}^{x+d} dt / (r h) = 1`.
pub fn solve_d(field: &WeightField, h: &HEval<'_>, x: f64, max_radius: f64) -> Result<f64> {
    solve_d_from(field, h, x, max_radius, 1.0)
}

pub fn solve_d_from(
    field: &WeightField,
    h: &HEval<'_>,
    x: f64,
    max_radius: f64,
    guess: f64,
) -> Result<f64> {
    // integrate in the offset coordinate so the panel widths stay exact
    // even when eta is far below ulp(x)
    let map = |eta: f64| {
        quad::integrate(
            |tau| {
                let t = x + tau;
                1.0 / (field.r(t) * h.h(t))
            },
            -eta,
            eta,
            1e-12,
            1e-9,
        )
    };
    monotone_unit_root(map, guess, max_radius).map_err(|fail| {
        h.take_error()
            .unwrap_or_else(|| map_root_fail(fail, "d", x, true))
    })
}

/// Root of `int_{x-s}^{x+s} dt / (r rho) = 1`.
///
/// `log_rho` evaluates `ln rho(t)` and must return NaN outside the domain
/// where the fundamental system is known.
pub fn solve_s(
    field: &WeightField,
    log_rho: &dyn Fn(f64) -> f64,
    x: f64,
    max_radius: f64,
) -> Result<f64> {
    solve_s_from(field, log_rho, x, max_radius, 1.0)
}

pub fn solve_s_from(
    field: &WeightField,
    log_rho: &dyn Fn(f64) -> f64,
    x: f64,
    max_radius: f64,
    guess: f64,
) -> Result<f64> {
    let map = |eta: f64| {
        quad::integrate(
            |tau| {
                let t = x + tau;
                (-(field.r(t).ln() + log_rho(t))).exp()
            },
            -eta,
            eta,
            1e-12,
            1e-9,
        )
    };
    monotone_unit_root(map, guess, max_radius).map_err(|e| map_root_fail(e, "s", x, true))
}

/// Root of `d * int_{x-d}^{x+d} q dt = 2`, defined only for `r == 1`.
pub fn solve_dtilde(field: &WeightField, x: f64, max_radius: f64) -> Result<f64> {
    solve_dtilde_from(field, x, max_radius, 1.0)
}

pub fn solve_dtilde_from(
    field: &WeightField,
    x: f64,
    max_radius: f64,
    guess: f64,
) -> Result<f64> {
    for probe in [x - 1.0, x, x + 1.0] {
        if (field.r(probe) - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnitR { x: probe });
        }
    }
    monotone_unit_root(
        |d| 0.5 * d * (field.q_integral_left(x, d) + field.q_integral_right(x, d)),
        guess,
        max_radius,
    )
    .map_err(|e| map_root_fail(e, "dtilde", x, false))
}

/// Smallest root of `int_{x-mu}^{x+mu} q h dt = 1`.
///
/// The map is nondecreasing but not necessarily strictly, so plain
/// bisection may land anywhere on a plateau; a leftward scan with step
/// `root / 1024` locates the first crossing.
pub fn solve_mu(field: &WeightField, h: &HEval<'_>, x: f64, max_radius: f64) -> Result<f64> {
    solve_mu_from(field, h, x, max_radius, 1.0)
}

pub fn solve_mu_from(
    field: &WeightField,
    h: &HEval<'_>,
    x: f64,
    max_radius: f64,
    guess: f64,
) -> Result<f64> {
    let map = |eta: f64| {
        quad::integrate(
            |tau| {
                let t = x + tau;
                field.q(t) * h.h(t)
            },
            -eta,
            eta,
            1e-12,
            1e-9,
        )
    };
    let root = monotone_unit_root(&map, guess, max_radius).map_err(|fail| {
        h.take_error()
            .unwrap_or_else(|| map_root_fail(fail, "mu", x, true))
    })?;

    let step = root / 1024.0;
    let slack = 1e-9;
    let mut leftmost = root;
    let mut k = 1usize;
    while leftmost - step > 0.0 && map(leftmost - step) >= 1.0 - slack {
        leftmost -= step;
        k += 1;
        if k > 1024 {
            break;
        }
    }
    if k > 1 {
        // tighten inside the last scan step
        let lo = (leftmost - step).max(0.0);
        let refined = quad::bisect_sign_change(
            |eta| map(eta) - (1.0 - slack),
            lo,
            leftmost,
            1e-10 * (1.0 + leftmost),
        );
        return Ok(refined);
    }
    Ok(root)
}

/// WKB-type scale and the two smoothness moduli used to justify the
/// asymptotics `d1, d2 ~ d_hat` for differentiable coefficients.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmoothAsymptotics {
    /// `sqrt(r(x) / q(x))`.
    pub d_hat: f64,
    /// `r(x) sup_{|t| <= 80 d_hat} |int_x^{x+t} r'/r^2|`.
    pub kappa1: f64,
    /// `q(x)^{-1} sup_{|t| <= 80 d_hat} |int_x^{x+t} q'|`.
    pub kappa2: f64,
}

/// Evaluate the smoothness moduli; tabulated presets have no derivative
/// evaluator and are rejected.
pub fn smooth_asymptotics(field: &WeightField, x: f64) -> Result<SmoothAsymptotics> {
    if field.derivatives(x).is_none() {
        return Err(Error::UnsupportedPreset("smooth asymptotics"));
    }
    let q = field.q(x);
    if !(q > 0.0) {
        return Err(Error::Numeric(format!("q({x}) = {q}: d_hat undefined")));
    }
    let r = field.r(x);
    let d_hat = (r / q).sqrt();
    let reach = 80.0 * d_hat;
    // int_x^{x+t} r'/r^2 = 1/r(x) - 1/r(x+t), exact for absolutely
    // continuous r; same collapse for the q modulus.
    let (_, kappa1) = quad::scan_max(
        |t| (1.0 - r / field.r(x + t)).abs(),
        -reach,
        reach,
        400,
    );
    let (_, kappa2) = quad::scan_max(
        |t| (field.q(x + t) - q).abs() / q,
        -reach,
        reach,
        400,
    );
    Ok(SmoothAsymptotics {
        d_hat,
        kappa1,
        kappa2,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub center: f64,
    pub half_width: f64,
}

/// A chain of segments `[x_n - k(x_n), x_n + k(x_n)]` tiling the window,
/// consecutive endpoints shared exactly.
#[derive(Debug, Clone, Serialize)]
pub struct Covering {
    pub origin: f64,
    pub kind: String,
    /// Sorted by `lo`; the forward chain starts exactly at `origin`.
    pub segments: Vec<Segment>,
}

impl Covering {
    /// Largest chaining defect; zero by construction.
    pub fn max_chain_defect(&self) -> f64 {
        self.segments
            .windows(2)
            .map(|w| (w[1].lo - w[0].hi).abs())
            .fold(0.0, f64::max)
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        if self.segments.is_empty() {
            return false;
        }
        self.segments[0].lo <= lo
            && self.segments.last().unwrap().hi >= hi
            && self.max_chain_defect() == 0.0
    }
}

/// Build the covering driven by a positive continuous half-width `kappa`.
///
/// Each forward step solves `c - kappa(c) = L` for the next center by
/// bracketing and bisection; the backward chain mirrors it. Construction
/// assumes the drift `t - kappa(t)` eventually increases; that is not
/// verified globally, and a bracket that never closes is reported as a
/// covering failure.
pub fn build_covering(
    kappa: &dyn Fn(f64) -> Result<f64>,
    x: f64,
    window: &Window,
    kind: &str,
) -> Result<Covering> {
    let x_hi = window.half_width;
    let x_lo = -window.half_width;
    let max_segments = 100_000usize;

    let mut segments: Vec<Segment> = Vec::new();

    // forward chain on [x, x_hi]
    let mut left = x;
    while left < x_hi {
        let seg = next_forward_segment(kappa, left, window)?;
        segments.push(seg);
        left = seg.hi;
        if segments.len() > max_segments {
            return Err(Error::CoveringFailure {
                x,
                why: "segment budget exceeded".into(),
            });
        }
    }

    // backward chain on [x_lo, x]
    let mut right = x;
    let mut backward: Vec<Segment> = Vec::new();
    while right > x_lo {
        let seg = next_backward_segment(kappa, right, window)?;
        backward.push(seg);
        right = seg.lo;
        if backward.len() > max_segments {
            return Err(Error::CoveringFailure {
                x,
                why: "segment budget exceeded".into(),
            });
        }
    }
    backward.reverse();
    backward.extend(segments);

    Ok(Covering {
        origin: x,
        kind: kind.to_string(),
        segments: backward,
    })
}

fn next_forward_segment(
    kappa: &dyn Fn(f64) -> Result<f64>,
    left: f64,
    window: &Window,
) -> Result<Segment> {
    // bracket c with c - kappa(c) >= left
    let k0 = kappa(left)?;
    if !(k0 > 0.0) {
        return Err(Error::CoveringFailure {
            x: left,
            why: format!("kappa({left}) = {k0} not positive"),
        });
    }
    let cap = left + 64.0 * (window.half_width + k0);
    let mut step = k0;
    let mut hi = left + step;
    let mut g_hi = hi - kappa(hi)? - left;
    while g_hi < 0.0 {
        step *= 2.0;
        hi = left + step;
        if hi > cap {
            return Err(Error::CoveringFailure {
                x: left,
                why: "kappa grows too fast: center equation never brackets".into(),
            });
        }
        g_hi = hi - kappa(hi)? - left;
    }
    let err = RefCell::new(None::<Error>);
    let g = |c: f64| match kappa(c) {
        Ok(k) => c - k - left,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let center = quad::bisect_sign_change(g, left, hi, 1e-12 * (1.0 + hi.abs()));
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    let half_width = kappa(center)?;
    Ok(Segment {
        lo: left,
        hi: center + half_width,
        center,
        half_width,
    })
}

fn next_backward_segment(
    kappa: &dyn Fn(f64) -> Result<f64>,
    right: f64,
    window: &Window,
) -> Result<Segment> {
    let k0 = kappa(right)?;
    if !(k0 > 0.0) {
        return Err(Error::CoveringFailure {
            x: right,
            why: format!("kappa({right}) = {k0} not positive"),
        });
    }
    let cap = right - 64.0 * (window.half_width + k0);
    let mut step = k0;
    let mut lo = right - step;
    let mut g_lo = lo + kappa(lo)? - right;
    while g_lo > 0.0 {
        step *= 2.0;
        lo = right - step;
        if lo < cap {
            return Err(Error::CoveringFailure {
                x: right,
                why: "kappa grows too fast: center equation never brackets".into(),
            });
        }
        g_lo = lo + kappa(lo)? - right;
    }
    let err = RefCell::new(None::<Error>);
    let g = |c: f64| match kappa(c) {
        Ok(k) => c + k - right,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let center = quad::bisect_sign_change(g, lo, right, 1e-12 * (1.0 + right.abs()));
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    let half_width = kappa(center)?;
    Ok(Segment {
        lo: center - half_width,
        hi: right,
        center,
        half_width,
    })
}

/// Per-sample values of every auxiliary length on the window grid. Cells
/// are None where the defining equation has no root in reach (the CSV
/// export leaves them empty).
#[derive(Debug, Clone, Serialize)]
pub struct AuxProfile {
    pub x: Vec<f64>,
    pub d1: Vec<Option<f64>>,
    pub d2: Vec<Option<f64>>,
    pub phi: Vec<Option<f64>>,
    pub psi: Vec<Option<f64>>,
    pub h: Vec<Option<f64>>,
    pub d: Vec<Option<f64>>,
    pub s: Vec<Option<f64>>,
    pub mu: Vec<Option<f64>>,
    pub dtilde: Vec<Option<f64>>,
    /// First instance of each distinct solver failure, for the report.
    pub notes: Vec<String>,
}

/// Assemble the profile on the window grid. `log_rho` enables the `s`
/// column; `dtilde` fills only when `r == 1`.
pub fn compute_aux_profile(
    field: &WeightField,
    window: &Window,
    log_rho: Option<&dyn Fn(f64) -> f64>,
) -> AuxProfile {
    let grid = window.grid();
    let n = grid.len();
    let max_radius = SEARCH_RADIUS_FACTOR * window.half_width;
    let unit_r = field.is_unit_r(window);
    let h_eval = HEval::new(field, max_radius);

    let mut out = AuxProfile {
        x: grid.clone(),
        d1: vec![None; n],
        d2: vec![None; n],
        phi: vec![None; n],
        psi: vec![None; n],
        h: vec![None; n],
        d: vec![None; n],
        s: vec![None; n],
        mu: vec![None; n],
        dtilde: vec![None; n],
        notes: Vec::new(),
    };

    let note = |notes: &mut Vec<String>, e: &Error| {
        let s = e.to_string();
        let head: String = s.chars().take(40).collect();
        if !notes.iter().any(|n| n.starts_with(&head)) && notes.len() < 16 {
            notes.push(s);
        }
    };

    let mut guess_pph = (1.0, 1.0);
    let mut guess_d = 1.0;
    let mut guess_s = 1.0;
    let mut guess_mu = 1.0;
    let mut guess_dt = 1.0;

    for (i, &x) in grid.iter().enumerate() {
        match compute_phi_psi_h_from(field, x, max_radius, guess_pph.0, guess_pph.1) {
            Ok(v) => {
                guess_pph = (v.d1, v.d2);
                out.d1[i] = Some(v.d1);
                out.d2[i] = Some(v.d2);
                out.phi[i] = Some(v.phi);
                out.psi[i] = Some(v.psi);
                out.h[i] = Some(v.h);
                match solve_d_from(field, &h_eval, x, max_radius, guess_d) {
                    Ok(d) => {
                        guess_d = d;
                        out.d[i] = Some(d);
                    }
                    Err(e) => note(&mut out.notes, &e),
                }
                match solve_mu_from(field, &h_eval, x, max_radius, guess_mu) {
                    Ok(mu) => {
                        guess_mu = mu;
                        out.mu[i] = Some(mu);
                    }
                    Err(e) => note(&mut out.notes, &e),
                }
            }
            Err(e) => note(&mut out.notes, &e),
        }
        if let Some(log_rho) = log_rho {
            match solve_s_from(field, log_rho, x, max_radius, guess_s) {
                Ok(s) => {
                    guess_s = s;
                    out.s[i] = Some(s);
                }
                Err(e) => note(&mut out.notes, &e),
            }
        }
        if unit_r {
            match solve_dtilde_from(field, x, max_radius, guess_dt) {
                Ok(dt) => {
                    guess_dt = dt;
                    out.dtilde[i] = Some(dt);
                }
                Err(e) => note(&mut out.notes, &e),
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{build_weight_field, CoefficientSpec, Table};

    fn constant(r0: f64, q0: f64) -> WeightField {
        build_weight_field(CoefficientSpec::Constant { r0, q0 }).unwrap()
    }

    fn exponential(alpha: f64, beta: f64) -> WeightField {
        build_weight_field(CoefficientSpec::Exponential { alpha, beta }).unwrap()
    }

    fn poly_q() -> WeightField {
        build_weight_field(CoefficientSpec::PolynomialQ { k: 1 }).unwrap()
    }

    #[test]
    fn unit_constant_lengths() {
        let f = constant(1.0, 1.0);
        for x in [-3.0, 0.0, 7.5] {
            assert!((solve_d1(&f, x, 80.0).unwrap() - 1.0).abs() < 1e-9);
            assert!((solve_d2(&f, x, 80.0).unwrap() - 1.0).abs() < 1e-9);
            let v = compute_phi_psi_h(&f, x, 80.0).unwrap();
            assert!((v.phi - 1.0).abs() < 1e-9);
            assert!((v.psi - 1.0).abs() < 1e-9);
            assert!((v.h - 0.5).abs() < 1e-9);
            assert!(v.identity_residual < 1e-8);
        }
        let h = HEval::new(&f, 80.0);
        assert!((solve_d(&f, &h, 0.0, 80.0).unwrap() - 0.25).abs() < 1e-8);
        assert!((solve_mu(&f, &h, 0.0, 80.0).unwrap() - 1.0).abs() < 1e-8);
        assert!((solve_dtilde(&f, 0.0, 80.0).unwrap() - 1.0).abs() < 1e-9);
        // rho == 1/2 for this field
        let log_rho = |_t: f64| 0.5f64.ln();
        assert!((solve_s(&f, &log_rho, 0.0, 80.0).unwrap() - 0.25).abs() < 1e-8);
    }

    #[test]
    fn exponential_symmetric_case_matches_algebraic_root() {
        // independent oracle: bisection on (e^d - 1)(1 - e^{-d}) = 1
        let mut lo = 0.5f64;
        let mut hi = 2.0f64;
        for _ in 0..80 {
            let m = 0.5 * (lo + hi);
            if (m.exp() - 1.0) * (1.0 - (-m).exp()) < 1.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        let oracle = 0.5 * (lo + hi);
        // closed form: root of t^2 - 3t + 1 with t = e^d
        let algebraic = ((3.0 + 5.0f64.sqrt()) / 2.0).ln();
        assert!((oracle - algebraic).abs() < 1e-10);
        assert!((oracle - 0.962424).abs() < 1e-6);

        let f = exponential(-1.0, -1.0);
        for x in [5.0, 10.0, 20.0] {
            assert!((solve_d1(&f, x, 240.0).unwrap() - oracle).abs() < 1e-7);
            assert!((solve_d2(&f, x, 240.0).unwrap() - oracle).abs() < 1e-7);
        }
    }

    #[test]
    fn constant_4_1_lengths() {
        let f = constant(4.0, 1.0);
        // F2(d) = (d/4) d = 1 -> d2 = 2
        assert!((solve_d2(&f, 0.0, 80.0).unwrap() - 2.0).abs() < 1e-9);
        let v = compute_phi_psi_h(&f, 0.0, 80.0).unwrap();
        assert!((v.phi - 0.5).abs() < 1e-9);
        assert!((v.psi - 0.5).abs() < 1e-9);
        assert!((v.h - 0.25).abs() < 1e-9);
        let h = HEval::new(&f, 80.0);
        // 1/(r h) = 1 -> 2d = 1
        assert!((solve_d(&f, &h, 0.0, 80.0).unwrap() - 0.5).abs() < 1e-8);
        // q h = 1/4 -> 2 mu / 4 = 1 -> mu = 2
        assert!((solve_mu(&f, &h, 0.0, 80.0).unwrap() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn exponential_case_has_constant_d() {
        let f = exponential(-1.0, -1.0);
        let h = HEval::new(&f, 240.0);
        let d5 = solve_d(&f, &h, 5.0, 240.0).unwrap();
        let d10 = solve_d(&f, &h, 10.0, 240.0).unwrap();
        assert!((d5 / d10 - 1.0).abs() < 0.01);
        // h ~ e^{|x|}/sqrt(5) implies d = 1/(2 sqrt 5) far from the origin
        assert!((d10 - 0.5 / 5.0f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn dtilde_on_polynomial_q() {
        // independent oracle: bisection on d (2d + 2 d^3 / 3) = 2
        let mut lo = 0.1;
        let mut hi = 2.0;
        for _ in 0..80 {
            let m = 0.5 * (lo + hi);
            if m * (2.0 * m + 2.0 * m * m * m / 3.0) < 2.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        let oracle = 0.5 * (lo + hi);
        let f = poly_q();
        let dt = solve_dtilde(&f, 0.0, 80.0).unwrap();
        assert!((dt - oracle).abs() < 1e-8);
        // quartic root in closed form: d^2 = (sqrt(21) - 3) / 2
        let exact = ((21.0f64.sqrt() - 3.0) / 2.0).sqrt();
        assert!((dt - exact).abs() < 1e-8);
    }

    #[test]
    fn dtilde_needs_unit_r() {
        let f = exponential(-1.0, 0.0);
        assert!(matches!(
            solve_dtilde(&f, 2.0, 80.0),
            Err(Error::NotUnitR { .. })
        ));
    }

    #[test]
    fn zero_q_has_no_root() {
        let t = Table {
            x: vec![-4.0, 0.0, 4.0],
            r: vec![1.0, 1.0, 1.0],
            q: vec![0.0, 0.0, 0.0],
        };
        let f = build_weight_field(CoefficientSpec::Tabulated(t)).unwrap();
        assert!(matches!(
            solve_d1(&f, 0.0, 32.0),
            Err(Error::NoFiniteRoot { kind: "d1", .. })
        ));
        let h = HEval::new(&f, 32.0);
        assert!(solve_mu(&f, &h, 0.0, 32.0).is_err());
    }

    #[test]
    fn monotone_consistency_around_roots() {
        let f = exponential(-1.0, -1.0);
        let x = 6.0;
        let d1 = solve_d1(&f, x, 240.0).unwrap();
        let map = |d: f64| f.r_integral(x - d, x) * f.q_integral(x - d, x);
        assert!(map(0.5 * d1) < 1.0);
        assert!(map(2.0 * d1) > 1.0);
        assert!((map(d1) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn covering_is_an_arithmetic_chain_for_constant_kappa() {
        let w = Window::new(2.0, 9).unwrap();
        let kappa = |_: f64| Ok(0.25);
        let cov = build_covering(&kappa, 0.0, &w, "d").unwrap();
        assert!(cov.covers(-2.0, 2.0));
        assert_eq!(cov.max_chain_defect(), 0.0);
        // forward centers at (2n-1)/4
        let forward: Vec<&Segment> = cov.segments.iter().filter(|s| s.center > 0.0).collect();
        for (n, seg) in forward.iter().enumerate() {
            let expect = (2.0 * (n as f64 + 1.0) - 1.0) / 4.0;
            assert!((seg.center - expect).abs() < 1e-9);
            assert!((seg.hi - seg.lo - 0.5).abs() < 1e-9);
        }
        // first forward segment starts exactly at the origin
        assert!(forward[0].lo == 0.0);
    }

    #[test]
    fn smooth_asymptotics_on_polynomial_q() {
        let f = poly_q();
        let sa = smooth_asymptotics(&f, 0.0).unwrap();
        assert!((sa.d_hat - 1.0).abs() < 1e-12);
        assert_eq!(sa.kappa1, 0.0);
        let sa = smooth_asymptotics(&f, 50.0).unwrap();
        assert!((sa.d_hat - (1.0 / 2501.0f64).sqrt()).abs() < 1e-12);
        assert_eq!(sa.kappa1, 0.0);
        assert!(sa.kappa2 < 0.07);

        let c = constant(1.0, 1.0);
        let sa = smooth_asymptotics(&c, 3.0).unwrap();
        assert!((sa.d_hat - 1.0).abs() < 1e-12);
        assert_eq!(sa.kappa1, 0.0);
        assert_eq!(sa.kappa2, 0.0);
    }

    #[test]
    fn smooth_asymptotics_rejects_tabulated() {
        let t = Table {
            x: vec![-1.0, 0.0, 1.0],
            r: vec![1.0, 1.0, 1.0],
            q: vec![1.0, 1.0, 1.0],
        };
        let f = build_weight_field(CoefficientSpec::Tabulated(t)).unwrap();
        assert!(matches!(
            smooth_asymptotics(&f, 0.0),
            Err(Error::UnsupportedPreset(_))
        ));
    }
}
