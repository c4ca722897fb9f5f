//! Principal fundamental system `{u, v}` of `(r z')' = q z` and the Green
//! kernel built from it.
//!
//! `v` is nondecreasing and `u` nonincreasing, both positive, normalized by
//! `r (v' u - u' v) = 1`. Each is dominant in one direction, so each is
//! integrated in its growth direction (`v` left to right, `u` right to
//! left via reflection) where the sweep is self-correcting. State is kept
//! in log space, `(L, M) = (ln y, ln r y')`, because the solutions overflow
//! `f64` on wide windows; products and ratios are then exact sums of logs.
//!
//! The start value is the pure-flux direction `(y, y') = (0, eps / r)`:
//! that is the recessive direction at the truncation point, which matters
//! when `1/r` is integrable and the recessive solution tends to a constant
//! rather than to zero.

use serde::Serialize;

use crate::coeff::{WeightField, Window};
use crate::error::{Error, Result};
use crate::quad;
use crate::trend::{classify, TrendClass};

/// Cap on `int sqrt(q/r)` over the integration domain; beyond this an
/// explicit sweep cannot finish and the construction reports itself stiff.
pub const PHASE_BUDGET: f64 = 6.0e4;

const MAX_STEPS: usize = 8_000_000;
// Absolute-only control: the Wronskian gate needs absolute accuracy of the
// log traces, so error must not be allowed to scale with |L|.
const RK_RTOL: f64 = 0.0;
const RK_ATOL: f64 = 1e-10;
// Hard cap on the phase advanced per step. Truncation bias accumulates as
// total_phase * (phase_per_step)^4 * c, and 0.01 keeps that far below the
// 1e-6 Wronskian budget for every sweep the phase budget admits.
const PHASE_STEP: f64 = 0.01;

/// One stored trace of a dominant sweep: log value, log flux and their
/// derivatives at thinned accepted-step points.
#[derive(Debug, Clone)]
struct HalfTrace {
    xs: Vec<f64>,
    l: Vec<f64>,
    m: Vec<f64>,
    dl: Vec<f64>,
    dm: Vec<f64>,
}

impl HalfTrace {
    fn locate(&self, x: f64) -> Option<usize> {
        if x < self.xs[0] - 1e-12 || x > *self.xs.last().unwrap() + 1e-12 {
            return None;
        }
        let i = self.xs.partition_point(|&v| v <= x);
        Some(i.clamp(1, self.xs.len() - 1) - 1)
    }

    /// Cubic Hermite interpolation of `(L, M)`.
    fn eval(&self, x: f64) -> Option<(f64, f64)> {
        let i = self.locate(x)?;
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let hseg = x1 - x0;
        if hseg == 0.0 {
            return Some((self.l[i], self.m[i]));
        }
        let t = ((x - x0) / hseg).clamp(0.0, 1.0);
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let l = h00 * self.l[i] + h10 * hseg * self.dl[i] + h01 * self.l[i + 1]
            + h11 * hseg * self.dl[i + 1];
        let m = h00 * self.m[i] + h10 * hseg * self.dm[i] + h01 * self.m[i + 1]
            + h11 * hseg * self.dm[i + 1];
        Some((l, m))
    }
}

// Dormand-Prince 5(4) with FSAL.
const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn integrate_dominant<R, Q>(
    r: R,
    q: Q,
    x_lo: f64,
    x_hi: f64,
    breakpoints: &[f64],
) -> Result<HalfTrace>
where
    R: Fn(f64) -> f64,
    Q: Fn(f64) -> f64,
{
    let span = x_hi - x_lo;
    let rhs = |x: f64, l: f64, m: f64| -> (f64, f64) {
        let rv = r(x);
        let qv = q(x);
        let dl = (m - l - rv.ln()).exp();
        let dm = if qv > 0.0 {
            (qv.ln() + l - m).exp()
        } else {
            0.0
        };
        (dl, dm)
    };

    // analytic micro-start away from the (y, w) = (0, 1) corner:
    // w stays ~1 over a tiny lead, so y(delta) ~ delta / r.
    let delta = span * 1e-9;
    let mut x = x_lo + delta;
    let mut l = (delta / r(x_lo + 0.5 * delta)).ln();
    let mut m = 0.0;

    let mut trace = HalfTrace {
        xs: vec![x],
        l: vec![l],
        m: vec![m],
        dl: Vec::new(),
        dm: Vec::new(),
    };
    let (dl0, dm0) = rhs(x, l, m);
    trace.dl.push(dl0);
    trace.dm.push(dm0);

    let mut h = (span * 1e-8).max(1e-300);
    let mut k1 = (dl0, dm0);
    let mut phase_acc = 0.0;
    let mut steps_since_emit = 0usize;
    let mut steps = 0usize;
    let mut bp_idx = breakpoints.partition_point(|&b| b <= x);

    while x < x_hi {
        if steps > MAX_STEPS {
            return Err(Error::FssConstruction(format!(
                "step budget exhausted at x = {x:.6}"
            )));
        }
        if h < span * 1e-15 {
            return Err(Error::FssConstruction(format!(
                "step size underflow at x = {x:.6}"
            )));
        }
        let mut h_try = h;
        let mut h_clipped = false;
        let rate = k1.0.abs().max(k1.1.abs());
        if rate > 0.0 && h_try * rate > PHASE_STEP {
            h_try = PHASE_STEP / rate;
            h_clipped = true;
        }
        if x + h_try > x_hi {
            h_try = x_hi - x;
            h_clipped = true;
        }
        // land exactly on coefficient breakpoints so every step integrates
        // a smooth piece
        while bp_idx < breakpoints.len() && breakpoints[bp_idx] <= x {
            bp_idx += 1;
        }
        if bp_idx < breakpoints.len() && x + h_try > breakpoints[bp_idx] {
            h_try = breakpoints[bp_idx] - x;
            h_clipped = true;
        }
        let mut k = [(0.0f64, 0.0f64); 7];
        k[0] = k1;
        for stage in 1..7 {
            let mut al = 0.0;
            let mut am = 0.0;
            for (j, kj) in k.iter().enumerate().take(stage) {
                al += DP_A[stage][j] * kj.0;
                am += DP_A[stage][j] * kj.1;
            }
            k[stage] = rhs(x + DP_C[stage] * h_try, l + h_try * al, m + h_try * am);
        }
        let mut l5 = 0.0;
        let mut m5 = 0.0;
        let mut le = 0.0;
        let mut me = 0.0;
        for (j, kj) in k.iter().enumerate() {
            l5 += DP_B5[j] * kj.0;
            m5 += DP_B5[j] * kj.1;
            le += (DP_B5[j] - DP_B4[j]) * kj.0;
            me += (DP_B5[j] - DP_B4[j]) * kj.1;
        }
        let l_new = l + h_try * l5;
        let m_new = m + h_try * m5;
        let sc_l = RK_ATOL + RK_RTOL * l.abs().max(l_new.abs());
        let sc_m = RK_ATOL + RK_RTOL * m.abs().max(m_new.abs());
        let err = (0.5 * ((h_try * le / sc_l).powi(2) + (h_try * me / sc_m).powi(2))).sqrt();
        steps += 1;
        if err <= 1.0 && l_new.is_finite() && m_new.is_finite() {
            phase_acc += (l_new - l).abs().max((m_new - m).abs());
            steps_since_emit += 1;
            x += h_try;
            l = l_new;
            m = m_new;
            k1 = k[6]; // FSAL
            if phase_acc >= 0.05 || steps_since_emit >= 16 || h_clipped || x >= x_hi {
                trace.xs.push(x);
                trace.l.push(l);
                trace.m.push(m);
                trace.dl.push(k1.0);
                trace.dm.push(k1.1);
                phase_acc = 0.0;
                steps_since_emit = 0;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            // a clipped step says nothing about the natural step size
            h = if h_clipped { h } else { h_try * factor };
        } else {
            let factor = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.1
            };
            h = h_try * factor;
        }
    }
    Ok(trace)
}

/// Grids of the fundamental system on the window, plus the continuous
/// traces it was sampled from. Immutable once built.
#[derive(Debug, Clone)]
pub struct FssProfile {
    pub window: Window,
    /// Integration domain; evaluators are valid on it.
    pub domain: (f64, f64),
    pub grid: Vec<f64>,
    pub log_v: Vec<f64>,
    pub log_u: Vec<f64>,
    pub rho: Vec<f64>,
    pub rv_prime: Vec<f64>,
    pub ru_prime: Vec<f64>,
    /// The unique crossing point of `u` and `v`.
    pub x0: f64,
    pub max_wronskian_residual: f64,
    v_trace: HalfTrace,
    u_trace: HalfTrace,
    shift: f64,
}

/// Phase of the sweep: `int sqrt(q / r)` over the domain.
pub fn sweep_phase(field: &WeightField, lo: f64, hi: f64) -> f64 {
    quad::integrate(
        |t| (field.q(t) / field.r(t)).sqrt(),
        lo,
        hi,
        1e-6,
        1e-3,
    )
}

/// Construct the fundamental system for the window; the sweep runs on the
/// doubled domain `[-2X, 2X]` so window-edge values are unpolluted by the
/// truncation.
pub fn compute_fss(field: &WeightField, window: &Window) -> Result<FssProfile> {
    compute_fss_on(field, window, 2.0 * window.half_width)
}

/// Same construction with an explicit integration half-width.
pub fn compute_fss_on(
    field: &WeightField,
    window: &Window,
    domain_half_width: f64,
) -> Result<FssProfile> {
    field.check_positivity(window)?;
    let hw = domain_half_width.max(window.half_width);
    let reach = 8.0 * window.half_width;
    for probe in [-window.half_width, 0.0, window.half_width] {
        if !(field.q_integral(probe - reach, probe) > 0.0)
            || !(field.q_integral(probe, probe + reach) > 0.0)
        {
            return Err(Error::FssConstruction(format!(
                "q has no mass on one side of x = {probe}"
            )));
        }
    }
    let phase = sweep_phase(field, -hw, hw);
    if !phase.is_finite() || phase > PHASE_BUDGET {
        return Err(Error::TooStiff {
            phase,
            budget: PHASE_BUDGET,
        });
    }

    let mut bps: Vec<f64> = field
        .breakpoints()
        .into_iter()
        .filter(|b| (-hw..hw).contains(b))
        .collect();
    let v_trace = integrate_dominant(|x| field.r(x), |x| field.q(x), -hw, hw, &bps)?;
    // u is the mirrored dominant sweep on the reflected field
    bps.reverse();
    let bps_reflected: Vec<f64> = bps.iter().map(|b| -b).collect();
    let u_trace = integrate_dominant(|x| field.r(-x), |x| field.q(-x), -hw, hw, &bps_reflected)?;

    // the micro-start trims a sliver off each end; the usable domain is
    // the intersection of the two traces
    let domain = (v_trace.xs[0], -u_trace.xs[0]);
    let raw = FssProfile {
        window: *window,
        domain,
        grid: Vec::new(),
        log_v: Vec::new(),
        log_u: Vec::new(),
        rho: Vec::new(),
        rv_prime: Vec::new(),
        ru_prime: Vec::new(),
        x0: 0.0,
        max_wronskian_residual: 0.0,
        v_trace,
        u_trace,
        shift: 0.0,
    };

    // joint rescale: Wronskian = 1 at x = 0 (log form; the raw terms
    // overflow long before the normalized ones do)
    let log_w0 = raw.log_wronskian_unshifted(0.0).ok_or_else(|| {
        Error::FssConstruction("origin outside integration domain".into())
    })?;
    if !log_w0.is_finite() {
        return Err(Error::FssConstruction(format!(
            "degenerate Wronskian (log {log_w0}) at the origin"
        )));
    }
    let mut fss = raw;
    fss.shift = 0.5 * log_w0;

    let grid = window.grid();
    let mut log_v = Vec::with_capacity(grid.len());
    let mut log_u = Vec::with_capacity(grid.len());
    let mut rho = Vec::with_capacity(grid.len());
    let mut rv_prime = Vec::with_capacity(grid.len());
    let mut ru_prime = Vec::with_capacity(grid.len());
    let mut max_res = 0.0f64;
    for &x in &grid {
        let (lv, mv) = fss
            .v_trace
            .eval(x)
            .ok_or_else(|| Error::FssConstruction(format!("v trace does not reach x = {x}")))?;
        let (lu, mu) = fss
            .u_trace
            .eval(-x)
            .ok_or_else(|| Error::FssConstruction(format!("u trace does not reach x = {x}")))?;
        let lv = lv - fss.shift;
        let lu = lu - fss.shift;
        let mv = mv - fss.shift;
        let mu = mu - fss.shift;
        log_v.push(lv);
        log_u.push(lu);
        rho.push((lv + lu).exp());
        rv_prime.push(mv.exp());
        ru_prime.push(-mu.exp());
        let w = (mv + lu).exp() + (mu + lv).exp();
        max_res = max_res.max((w - 1.0).abs());
    }
    if !(max_res <= 1e-6) {
        return Err(Error::FssConstruction(format!(
            "Wronskian residual {max_res:.3e} exceeds 1e-6 (window too wide or coefficients too stiff)"
        )));
    }

    fss.grid = grid;
    fss.log_v = log_v;
    fss.log_u = log_u;
    fss.rho = rho;
    fss.rv_prime = rv_prime;
    fss.ru_prime = ru_prime;
    fss.max_wronskian_residual = max_res;
    fss.x0 = find_x0(&fss)?;
    Ok(fss)
}

impl FssProfile {
    fn log_wronskian_unshifted(&self, x: f64) -> Option<f64> {
        let (lv, mv) = self.v_trace.eval(x)?;
        let (lu, mu) = self.u_trace.eval(-x)?;
        Some(quad::log_add(mv + lu, mu + lv))
    }

    /// `ln v(x)`; NaN outside the integration domain.
    pub fn log_v_at(&self, x: f64) -> f64 {
        match self.v_trace.eval(x) {
            Some((l, _)) => l - self.shift,
            None => f64::NAN,
        }
    }

    /// `ln u(x)`; NaN outside the integration domain.
    pub fn log_u_at(&self, x: f64) -> f64 {
        match self.u_trace.eval(-x) {
            Some((l, _)) => l - self.shift,
            None => f64::NAN,
        }
    }

    /// `ln rho(x) = ln u + ln v`.
    pub fn log_rho_at(&self, x: f64) -> f64 {
        self.log_v_at(x) + self.log_u_at(x)
    }

    pub fn rho_at(&self, x: f64) -> f64 {
        self.log_rho_at(x).exp()
    }

    /// `r v' (x) >= 0`.
    pub fn rv_prime_at(&self, x: f64) -> f64 {
        match self.v_trace.eval(x) {
            Some((_, m)) => (m - self.shift).exp(),
            None => f64::NAN,
        }
    }

    /// `r u' (x) <= 0`.
    pub fn ru_prime_at(&self, x: f64) -> f64 {
        match self.u_trace.eval(-x) {
            Some((_, m)) => -(m - self.shift).exp(),
            None => f64::NAN,
        }
    }

    /// Wronskian `r (v' u - u' v)` from the stored traces.
    pub fn wronskian_at(&self, x: f64) -> f64 {
        let lv = self.log_v_at(x);
        let lu = self.log_u_at(x);
        let mv = match self.v_trace.eval(x) {
            Some((_, m)) => m - self.shift,
            None => return f64::NAN,
        };
        let mu = match self.u_trace.eval(-x) {
            Some((_, m)) => m - self.shift,
            None => return f64::NAN,
        };
        (mv + lu).exp() + (mu + lv).exp()
    }

    /// `ln G(x, t) = ln u(max) + ln v(min)`.
    pub fn green_log(&self, x: f64, t: f64) -> f64 {
        let (lo, hi) = if x <= t { (x, t) } else { (t, x) };
        self.log_u_at(hi) + self.log_v_at(lo)
    }

    /// Green kernel value, window-checked.
    pub fn green(&self, x: f64, t: f64) -> Result<f64> {
        let hw = self.window.half_width;
        for v in [x, t] {
            if v.abs() > hw * (1.0 + 1e-12) {
                return Err(Error::OutOfWindow {
                    x: v,
                    half_width: hw,
                });
            }
        }
        Ok(self.green_log(x, t).exp())
    }

    /// `int_a^b dxi / (r rho)`, the phase of the ratio `v/u`.
    pub fn inv_r_rho_integral(&self, field: &WeightField, a: f64, b: f64) -> f64 {
        quad::integrate(
            |t| (-(field.r(t).ln() + self.log_rho_at(t))).exp(),
            a,
            b,
            1e-13,
            1e-9,
        )
    }
}

/// Green kernel evaluator plus its diagonal.
pub struct GreenKernel<'a> {
    pub fss: &'a FssProfile,
}

impl<'a> GreenKernel<'a> {
    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        self.fss.green(x, t)
    }

    pub fn diagonal(&self, x: f64) -> f64 {
        self.fss.rho_at(x)
    }
}

/// The unique root of `v(x) = u(x)`: bisection on `ln v - ln u` between the
/// grid nodes where it changes sign. Zero or multiple sign changes mean
/// the construction is unusable.
pub fn find_x0(fss: &FssProfile) -> Result<f64> {
    let d: Vec<f64> = fss
        .grid
        .iter()
        .zip(fss.log_v.iter().zip(fss.log_u.iter()))
        .map(|(_, (lv, lu))| lv - lu)
        .collect();
    let mut crossings = Vec::new();
    for i in 1..d.len() {
        if (d[i - 1] < 0.0) != (d[i] < 0.0) {
            crossings.push(i);
        }
    }
    if crossings.len() != 1 {
        return Err(Error::FssConstruction(format!(
            "expected exactly one crossing of u and v in the window, found {}",
            crossings.len()
        )));
    }
    let i = crossings[0];
    let root = quad::bisect_sign_change(
        |x| fss.log_v_at(x) - fss.log_u_at(x),
        fss.grid[i - 1],
        fss.grid[i],
        1e-12 * (1.0 + fss.grid[i].abs()),
    );
    Ok(root)
}

#[derive(Debug, Clone, Serialize)]
pub struct DhReport {
    /// Max relative residual of the reconstruction of `u`, `v` from `rho`
    /// and `x0` at the random probe nodes.
    pub max_residual: f64,
    /// `int_0^X dxi/(r rho)` over nested windows `X/4, X/2, X` and its class.
    pub forward_mass: [f64; 3],
    pub forward_trend: TrendClass,
    pub backward_mass: [f64; 3],
    pub backward_trend: TrendClass,
}

/// Reconstruct the pair from its product and the crossing point,
/// `u, v = sqrt(rho) exp(-+ 1/2 int_{x0}^x dxi/(r rho))`, at `count` random
/// nodes, and report the worst log-residual together with the divergence
/// evidence for the phase integral.
pub fn check_davies_harrell(
    fss: &FssProfile,
    field: &WeightField,
    count: usize,
    seed: u64,
) -> DhReport {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let hw = fss.window.half_width;
    let mut max_residual = 0.0f64;
    for _ in 0..count {
        let x = rng.gen_range(-hw..hw);
        let phase = fss.inv_r_rho_integral(field, fss.x0, x);
        let half_log_rho = 0.5 * fss.log_rho_at(x);
        let log_u_rec = half_log_rho - 0.5 * phase;
        let log_v_rec = half_log_rho + 0.5 * phase;
        // |ln a - ln b| is the relative residual for nearby values
        max_residual = max_residual
            .max((log_u_rec - fss.log_u_at(x)).abs())
            .max((log_v_rec - fss.log_v_at(x)).abs());
    }
    let shells = [0.25 * hw, 0.5 * hw, hw];
    let forward_mass = shells.map(|s| fss.inv_r_rho_integral(field, 0.0, s));
    let backward_mass = shells.map(|s| fss.inv_r_rho_integral(field, -s, 0.0));
    DhReport {
        max_residual,
        forward_trend: classify(forward_mass),
        backward_trend: classify(backward_mass),
        forward_mass,
        backward_mass,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LogDerivReport {
    /// Max over interior nodes of the scaled residual of
    /// `v'/v = (1 + r rho') / (2 r rho)`.
    pub max_residual_v: f64,
    /// Same for `u'/u = -(1 - r rho') / (2 r rho)`.
    pub max_residual_u: f64,
    /// Max of `r |rho'|` over interior nodes (finite differences).
    pub max_r_abs_rho_prime: f64,
}

/// Check of the log-derivative identities at interior grid nodes: the
/// left sides come from the stored fluxes, `rho'` from central
/// differences. Nodes straddling a coefficient breakpoint are skipped for
/// the residual (there `rho'` genuinely jumps and a central difference
/// reports the one-sided average), but still count for the `r |rho'|`
/// bound, which holds for both one-sided slopes.
pub fn check_log_derivative_identities(fss: &FssProfile, field: &WeightField) -> LogDerivReport {
    let g = &fss.grid;
    let bps = field.breakpoints();
    let step = if g.len() > 1 { g[1] - g[0] } else { 0.0 };
    let mut res_v = 0.0f64;
    let mut res_u = 0.0f64;
    let mut max_rrho = 0.0f64;
    for i in 1..g.len() - 1 {
        let x = g[i];
        let dx = g[i + 1] - g[i - 1];
        let rho_prime = (fss.rho[i + 1] - fss.rho[i - 1]) / dx;
        let r = field.r(x);
        let rho = fss.rho[i];
        max_rrho = max_rrho.max(r * rho_prime.abs());
        if bps.iter().any(|b| (b - x).abs() <= 1.5 * step) {
            continue;
        }
        // v'/v and u'/u from the stored fluxes, exact on the trace
        let lv_prime = (fss.rv_prime[i].ln() - r.ln() - fss.log_v[i]).exp();
        let lu_prime = -((-fss.ru_prime[i]).ln() - r.ln() - fss.log_u[i]).exp();
        let rhs_v = (1.0 + r * rho_prime) / (2.0 * r * rho);
        let rhs_u = -(1.0 - r * rho_prime) / (2.0 * r * rho);
        res_v = res_v.max((lv_prime - rhs_v).abs() / (1.0 + lv_prime.abs()));
        res_u = res_u.max((lu_prime - rhs_u).abs() / (1.0 + lu_prime.abs()));
    }
    LogDerivReport {
        max_residual_v: res_v,
        max_residual_u: res_u,
        max_r_abs_rho_prime: max_rrho,
    }
}

/// Truncated versions of the four defining integrals that distinguish `u`
/// from `v`, with nested-window trends; only trends are observable on a
/// finite window, so nothing here asserts a limit.
#[derive(Debug, Clone, Serialize)]
pub struct LimitReport {
    pub v_over_u_left: f64,
    pub u_over_v_right: f64,
    /// `int dt/(r u^2)` over `[-X, 0]` (finite side).
    pub left_u_mass: f64,
    /// `int dt/(r v^2)` over `[0, X]` (finite side).
    pub right_v_mass: f64,
    /// `int dt/(r v^2)` over `[-s, 0]`, nested, expected to diverge.
    pub left_v_mass: [f64; 3],
    pub left_v_trend: TrendClass,
    /// `int dt/(r u^2)` over `[0, s]`, nested, expected to diverge.
    pub right_u_mass: [f64; 3],
    pub right_u_trend: TrendClass,
}

pub fn limit_report(fss: &FssProfile, field: &WeightField) -> LimitReport {
    let hw = fss.window.half_width;
    let inv_ru2 = |t: f64| (-(field.r(t).ln() + 2.0 * fss.log_u_at(t))).exp();
    let inv_rv2 = |t: f64| (-(field.r(t).ln() + 2.0 * fss.log_v_at(t))).exp();
    let shells = [0.25 * hw, 0.5 * hw, hw];
    let left_v_mass = shells.map(|s| quad::integrate(&inv_rv2, -s, 0.0, 1e-13, 1e-9));
    let right_u_mass = shells.map(|s| quad::integrate(&inv_ru2, 0.0, s, 1e-13, 1e-9));
    LimitReport {
        v_over_u_left: (fss.log_v_at(-hw) - fss.log_u_at(-hw)).exp(),
        u_over_v_right: (fss.log_u_at(hw) - fss.log_v_at(hw)).exp(),
        left_u_mass: quad::integrate(&inv_ru2, -hw, 0.0, 1e-13, 1e-9),
        right_v_mass: quad::integrate(&inv_rv2, 0.0, hw, 1e-13, 1e-9),
        left_v_trend: classify(left_v_mass),
        left_v_mass,
        right_u_trend: classify(right_u_mass),
        right_u_mass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{build_weight_field, CoefficientSpec, Table};

    fn constant(r0: f64, q0: f64) -> WeightField {
        build_weight_field(CoefficientSpec::Constant { r0, q0 }).unwrap()
    }

    #[test]
    fn constant_unit_field_fss() {
        let f = constant(1.0, 1.0);
        let w = Window::new(10.0, 201).unwrap();
        let fss = compute_fss(&f, &w).unwrap();
        // v = e^x / sqrt2, u = e^{-x} / sqrt2, rho = 1/2
        let half_log2 = 0.5 * 2.0f64.ln();
        for (i, &x) in fss.grid.iter().enumerate() {
            assert!((fss.rho[i] - 0.5).abs() < 1e-7, "rho at {x}");
            assert!((fss.log_v[i] - (x - half_log2)).abs() < 1e-7);
            assert!((fss.log_u[i] - (-x - half_log2)).abs() < 1e-7);
            assert!(fss.rv_prime[i] >= 0.0);
            assert!(fss.ru_prime[i] <= 0.0);
        }
        assert!(fss.max_wronskian_residual < 1e-6);
        assert!(fss.x0.abs() < 1e-6);
    }

    #[test]
    fn constant_1_4_fss() {
        let f = constant(1.0, 4.0);
        let w = Window::new(8.0, 161).unwrap();
        let fss = compute_fss(&f, &w).unwrap();
        for (i, &x) in fss.grid.iter().enumerate() {
            assert!((fss.rho[i] - 0.25).abs() < 1e-7, "rho at {x}");
        }
        assert!(fss.x0.abs() < 1e-6);
    }

    #[test]
    fn green_kernel_golden_values() {
        let f = constant(1.0, 1.0);
        let w = Window::new(10.0, 201).unwrap();
        let fss = compute_fss(&f, &w).unwrap();
        let g = GreenKernel { fss: &fss };
        assert!((g.eval(0.0, 0.0).unwrap() - 0.5).abs() < 1e-7);
        let expect = (-4.0f64).exp() / 2.0;
        assert!((g.eval(0.0, 4.0).unwrap() - expect).abs() < 1e-9);
        assert_eq!(g.eval(1.0, 3.0).unwrap(), g.eval(3.0, 1.0).unwrap());
        assert!(g.eval(11.0, 0.0).is_err());
    }

    #[test]
    fn davies_harrell_reconstruction_is_tight() {
        let f = constant(1.0, 1.0);
        let w = Window::new(10.0, 201).unwrap();
        let fss = compute_fss(&f, &w).unwrap();
        let rep = check_davies_harrell(&fss, &f, 100, 42);
        assert!(rep.max_residual < 1e-6, "residual {}", rep.max_residual);
        // 1/(r rho) = 2: mass over [0, s] is 2 s, diverging trend
        assert!((rep.forward_mass[2] - 2.0 * 10.0).abs() < 1e-5);
        assert_eq!(rep.forward_trend, TrendClass::Diverging);
        assert_eq!(rep.backward_trend, TrendClass::Diverging);
    }

    #[test]
    fn log_derivative_identities_on_constant_fields() {
        let f = constant(1.0, 4.0);
        let w = Window::new(8.0, 321).unwrap();
        let fss = compute_fss(&f, &w).unwrap();
        let rep = check_log_derivative_identities(&fss, &f);
        // v'/v = 2 = (1 + 0) / (2 * 1/4)
        assert!(rep.max_residual_v < 1e-6);
        assert!(rep.max_residual_u < 1e-6);
        assert!(rep.max_r_abs_rho_prime < 1e-6);
    }

    #[test]
    fn asymmetric_q_has_matching_rho_plateaus() {
        // r == 1; q doubles on x > 0. The product rho = u v is invariant
        // under the pair's scale freedom, so the closed-form matching
        // oracle pins it: rho -> 1/2 far left, 1/(2 sqrt 2) far right, and
        // rho(0) = sqrt(2) - 1 at the interface.
        let t = Table {
            x: vec![-40.0, -0.01, 0.01, 40.0],
            r: vec![1.0, 1.0, 1.0, 1.0],
            q: vec![1.0, 1.0, 2.0, 2.0],
        };
        let f = build_weight_field(CoefficientSpec::Tabulated(t)).unwrap();
        let w = Window::new(8.0, 161).unwrap();
        let fss = compute_fss(&f, &w).unwrap();
        assert!((fss.rho_at(-6.0) - 0.5).abs() < 0.01);
        assert!((fss.rho_at(6.0) - 0.5 / 2.0f64.sqrt()).abs() < 0.01);
        assert!((fss.rho_at(0.0) - (2.0f64.sqrt() - 1.0)).abs() < 0.02);
        // the crossing of u and v exists and is unique in the window
        assert!(fss.x0.abs() < 8.0);
    }

    #[test]
    fn stiff_fields_are_rejected() {
        let f = build_weight_field(CoefficientSpec::Exponential {
            alpha: -1.0,
            beta: 1.0,
        })
        .unwrap();
        let w = Window::new(30.0, 61).unwrap();
        assert!(matches!(
            compute_fss(&f, &w),
            Err(Error::TooStiff { .. })
        ));
    }

    #[test]
    fn limit_report_shapes() {
        let f = constant(1.0, 1.0);
        let w = Window::new(10.0, 201).unwrap();
        let fss = compute_fss(&f, &w).unwrap();
        let rep = limit_report(&fss, &f);
        // v/u at -X is e^{-2X}
        assert!(rep.v_over_u_left < 1e-2);
        assert!(rep.u_over_v_right < 1e-2);
        // int dt/(r v^2) over [0, X] converges to 1 for v = e^x/sqrt2
        assert!((rep.right_v_mass - (1.0 - (-20.0f64).exp())).abs() < 1e-6);
        assert_eq!(rep.left_v_trend, TrendClass::Diverging);
        assert_eq!(rep.right_u_trend, TrendClass::Diverging);
    }
}
