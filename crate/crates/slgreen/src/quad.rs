//! Quadrature and one-dimensional search primitives.
//!
//! Everything downstream leans on three things: an adaptive Simpson rule,
//! a log-domain variant of it for integrands of the form `exp(g)` whose
//! values overflow `f64`, and a bracketing root finder for nondecreasing
//! maps with target value 1.

/// Default absolute tolerance for the adaptive Simpson rule.
pub const QUAD_ABS_TOL: f64 = 1e-10;
/// Default relative tolerance for the adaptive Simpson rule.
pub const QUAD_REL_TOL: f64 = 1e-8;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    abs_tol: f64,
    rel_tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let refined = left + right;
    let delta = refined - whole;
    let tol = abs_tol.max(rel_tol * refined.abs());
    if depth == 0 || delta.abs() <= 15.0 * tol || !delta.is_finite() {
        return refined + delta / 15.0;
    }
    adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * abs_tol, rel_tol, depth - 1)
        + adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * abs_tol, rel_tol, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// Reversed limits flip the sign. NaN from the integrand propagates to the
/// result so callers can detect inner failures.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let m = 0.5 * (lo + hi);
    let fa = f(lo);
    let fm = f(m);
    let fb = f(hi);
    let whole = simpson(fa, fm, fb, hi - lo);
    sign * adapt(&f, lo, fa, hi, fb, m, fm, whole, abs_tol, rel_tol, 30)
}

/// `log of int_a^b exp(log_f(t)) dt`, stable for integrands far outside the
/// representable range of `f64`.
///
/// The exponent is recentered at the maximum seen on a coarse scan; the
/// shifted integrand is then handled by the ordinary adaptive rule.
pub fn log_integrate<F: Fn(f64) -> f64>(log_f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return f64::NEG_INFINITY;
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let mut gref = f64::NEG_INFINITY;
    const SCAN: usize = 33;
    for i in 0..=SCAN {
        let t = lo + (hi - lo) * i as f64 / SCAN as f64;
        let g = log_f(t);
        if g > gref {
            gref = g;
        }
    }
    if gref == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let shifted = |t: f64| (log_f(t) - gref).exp();
    let integral = integrate(shifted, lo, hi, 0.0, rel_tol);
    if integral <= 0.0 {
        return f64::NEG_INFINITY;
    }
    gref + integral.ln()
}

/// `log(exp(a) + exp(b))` without overflow.
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootFail {
    /// The map stays below 1 all the way to the search cap.
    NeverReaches { radius: f64, last_value: f64 },
    /// The map produced NaN; an inner evaluation failed.
    NonFinite { at: f64 },
}

/// Root of `f(eta) = 1` for a nondecreasing map with `f(0) = 0`.
///
/// Brackets by doubling (or halving an overshooting guess), then runs the
/// Illinois variant of false position. Absolute tolerance on the bracket
/// width is `1e-10 * (1 + root)`.
pub fn monotone_unit_root<F: Fn(f64) -> f64>(
    f: F,
    guess: f64,
    max_radius: f64,
) -> Result<f64, RootFail> {
    let mut hi = guess.clamp(1e-8, max_radius);
    let mut fhi = f(hi);
    if fhi.is_nan() {
        return Err(RootFail::NonFinite { at: hi });
    }
    let mut lo = 0.0;
    let mut flo = 0.0;
    if fhi < 1.0 {
        // grow until the map crosses 1
        loop {
            if hi >= max_radius {
                return Err(RootFail::NeverReaches {
                    radius: hi,
                    last_value: fhi,
                });
            }
            lo = hi;
            flo = fhi;
            hi = (hi * 2.0).min(max_radius);
            fhi = f(hi);
            if fhi.is_nan() {
                return Err(RootFail::NonFinite { at: hi });
            }
            if fhi >= 1.0 {
                break;
            }
        }
    } else {
        // the guess overshot; tighten the lower end
        let mut cand = 0.5 * hi;
        while cand > 1e-300 {
            let fc = f(cand);
            if fc.is_nan() {
                return Err(RootFail::NonFinite { at: cand });
            }
            if fc < 1.0 {
                lo = cand;
                flo = fc;
                break;
            }
            hi = cand;
            fhi = fc;
            cand *= 0.5;
        }
    }

    // Illinois false position on [lo, hi] with f(lo) < 1 <= f(hi).
    // The width tolerance is relative as well as absolute: downstream
    // quadratures sample these roots inside their integrands, so the
    // root noise must sit far below any quadrature tolerance even when
    // the root itself is tiny.
    let tol = (1e-10 * (1.0 + hi)).min(1e-12 * hi);
    let mut glo = flo - 1.0;
    let mut ghi = fhi - 1.0;
    let mut side = 0i8;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mut t = if (ghi - glo).abs() > 0.0 && glo.is_finite() && ghi.is_finite() {
            (lo * ghi - hi * glo) / (ghi - glo)
        } else {
            0.5 * (lo + hi)
        };
        let margin = 1e-3 * (hi - lo);
        if !(t > lo + margin && t < hi - margin) {
            t = 0.5 * (lo + hi);
        }
        let gt = f(t) - 1.0;
        if gt.is_nan() {
            return Err(RootFail::NonFinite { at: t });
        }
        if gt < 0.0 {
            lo = t;
            glo = gt;
            if side == -1 {
                ghi *= 0.5;
            }
            side = -1;
        } else {
            hi = t;
            ghi = gt;
            if side == 1 {
                glo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bisection for a continuous `f` with a sign change on `[lo, hi]`.
pub fn bisect_sign_change<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let m = 0.5 * (lo + hi);
        let fm = f(m);
        if (fm >= 0.0) == (flo >= 0.0) {
            lo = m;
            flo = fm;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// Maximum of `f` over `[a, b]`: uniform scan plus golden-section refinement
/// around the best probe.
pub fn scan_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, probes: usize) -> (f64, f64) {
    let n = probes.max(2);
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    let step = (b - a) / n as f64;
    for i in 0..=n {
        let x = a + step * i as f64;
        let v = f(x);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = a + step * best_i.saturating_sub(1) as f64;
    let hi = (a + step * (best_i + 1) as f64).min(b);
    golden_max(f, lo, hi, 60)
}

/// Golden-section search for a maximum on `[a, b]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12, 1e-12);
        // antiderivative x^4/4 - x^2 + x
        let exact = (81.0 / 4.0 - 9.0 + 3.0) - (0.25 - 1.0 - 1.0);
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn integrator_handles_reversed_limits() {
        let v = integrate(|x| x.exp(), 1.0, 0.0, 1e-12, 1e-10);
        assert!((v + (std::f64::consts::E - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn log_integrate_matches_direct_on_moderate_input() {
        let direct = integrate(|x| (2.0 * x).exp(), 0.0, 3.0, 1e-13, 1e-11).ln();
        let logged = log_integrate(|x| 2.0 * x, 0.0, 3.0, 1e-11);
        assert!((direct - logged).abs() < 1e-8);
    }

    #[test]
    fn log_integrate_survives_huge_exponents() {
        // int exp(1000 t) over [0,1]: log = 1000 - ln 1000 + ln(1 - e^{-1000})
        let v = log_integrate(|x| 1000.0 * x, 0.0, 1.0, 1e-11);
        assert!((v - (1000.0 - 1000.0f64.ln())).abs() < 1e-7);
    }

    #[test]
    fn unit_root_on_square() {
        let r = monotone_unit_root(|x| x * x, 1.0, 64.0).unwrap();
        assert!((r - 1.0).abs() < 1e-9);
        let r = monotone_unit_root(|x| x * x / 16.0, 1.0, 64.0).unwrap();
        assert!((r - 4.0).abs() < 1e-8);
    }

    #[test]
    fn unit_root_reports_saturation() {
        let err = monotone_unit_root(|x| 0.5 * x / (1.0 + x), 1.0, 128.0).unwrap_err();
        match err {
            RootFail::NeverReaches { radius, .. } => assert!(radius >= 128.0),
            other => panic!("unexpected failure {other:?}"),
        }
    }

    #[test]
    fn golden_finds_parabola_peak() {
        // quadratic flatness limits the argmax to sqrt(eps) resolution
        let (x, v) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, -1.0, 1.0, 80);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-12);
    }
}
