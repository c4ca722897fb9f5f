//! The invariant suite behind the `verify` subcommand: every module's
//! structural properties executed against one coefficient field, each
//! with its tolerance pinned here.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coeff::{WeightField, Window};
use crate::criteria::{self, AnalysisOutput, Verdict};
use crate::error::Result;
use crate::fss::{check_davies_harrell, check_log_derivative_identities, limit_report};
use crate::geometry::{self, build_covering, HEval, SEARCH_RADIUS_FACTOR};
use crate::hardy::{self, discretize, spectral_norm};
use crate::quad;
use crate::spectral;
use crate::trend::{ShellTrend, TrendClass};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
}

struct Suite {
    checks: Vec<CheckResult>,
}

impl Suite {
    fn push(&mut self, name: &'static str, pass: bool, detail: String) {
        self.checks.push(CheckResult { name, pass, detail });
    }

    fn residual(&mut self, name: &'static str, worst: f64, tol: f64) {
        self.push(
            name,
            worst <= tol,
            format!("worst {worst:.3e} (tolerance {tol:.1e})"),
        );
    }

    fn skip(&mut self, name: &'static str, why: String) {
        self.checks.push(CheckResult {
            name,
            pass: true,
            detail: format!("skipped: {why}"),
        });
    }
}

/// Run the whole invariant suite. `p` and `n` configure the operator-norm
/// and spectral checks.
pub fn run(
    field: &WeightField,
    window: &Window,
    seed: u64,
    p: f64,
    n: usize,
) -> Result<VerifyReport> {
    let mut suite = Suite { checks: Vec::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x_max = window.half_width;
    let max_radius = SEARCH_RADIUS_FACTOR * x_max;

    // ---------- coefficient model ----------
    {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let mut pts = [
                rng.gen_range(-x_max..x_max),
                rng.gen_range(-x_max..x_max),
                rng.gen_range(-x_max..x_max),
            ];
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let [a, b, c] = pts;
            let r_total = field.r_integral(a, c);
            let r_split = field.r_integral(a, b) + field.r_integral(b, c);
            worst = worst.max((r_split - r_total).abs() / (1.0 + r_total.abs()));
            let q_total = field.q_integral(a, c);
            let q_split = field.q_integral(a, b) + field.q_integral(b, c);
            worst = worst.max((q_split - q_total).abs() / (1.0 + q_total.abs()));
        }
        suite.residual("coeff: cumulative integrals are additive", worst, 1e-10);
    }
    {
        let mut ok = true;
        for _ in 0..50 {
            let a = rng.gen_range(-x_max..x_max);
            let b = rng.gen_range(-x_max..x_max);
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            if b > a && !(field.r_integral(a, b) > 0.0) {
                ok = false;
            }
            if field.q_integral(a, b) < 0.0 {
                ok = false;
            }
        }
        suite.push(
            "coeff: R strictly increasing, Q nondecreasing",
            ok,
            String::new(),
        );
    }
    {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let a = rng.gen_range(-x_max..x_max);
            let b = rng.gen_range(-x_max..x_max);
            let exact = field.r_integral(a, b);
            let by_quad = field.r_integral_quad(a, b);
            worst = worst.max((exact - by_quad).abs() / (1.0 + exact.abs()));
            let exact = field.q_integral(a, b);
            let by_quad = field.q_integral_quad(a, b);
            worst = worst.max((exact - by_quad).abs() / (1.0 + exact.abs()));
        }
        suite.residual(
            "coeff: closed forms agree with adaptive quadrature",
            worst,
            1e-8,
        );
    }
    suite.push(
        "coeff: positivity at every grid node",
        field.check_positivity(window).is_ok(),
        String::new(),
    );

    // ---------- pipeline ----------
    let analysis: AnalysisOutput = criteria::analyze(field, window)?;
    let aux = &analysis.aux;
    let fss = analysis.fss.as_ref();
    let unit_r = field.is_unit_r(window);

    // ---------- local geometry ----------
    {
        // root residuals and monotone consistency at random points
        let mut worst = 0.0f64;
        let mut mono_ok = true;
        let mut solved = 0;
        for _ in 0..25 {
            let x = rng.gen_range(-x_max..x_max);
            if let Ok(v) = geometry::compute_phi_psi_h(field, x, max_radius) {
                solved += 1;
                let f1 = |d: f64| field.r_integral_left(x, d) * field.q_integral_left(x, d);
                let f2 = |d: f64| field.r_integral_right(x, d) * field.q_integral_right(x, d);
                worst = worst.max((f1(v.d1) - 1.0).abs()).max((f2(v.d2) - 1.0).abs());
                mono_ok &= f1(0.5 * v.d1) < 1.0 && f1(2.0 * v.d1) > 1.0;
                mono_ok &= f2(0.5 * v.d2) < 1.0 && f2(2.0 * v.d2) > 1.0;
                worst = worst.max(v.identity_residual);
                let h_eval = HEval::new(field, max_radius);
                if let Ok(d) = geometry::solve_d(field, &h_eval, x, max_radius) {
                    let f3 = |eta: f64| {
                        quad::integrate(
                            |tau| {
                                let t = x + tau;
                                1.0 / (field.r(t) * h_eval.h(t))
                            },
                            -eta,
                            eta,
                            1e-12,
                            1e-9,
                        )
                    };
                    worst = worst.max((f3(d) - 1.0).abs());
                    mono_ok &= f3(0.5 * d) < 1.0 && f3(2.0 * d) > 1.0;
                }
                if unit_r {
                    if let Ok(dt) = geometry::solve_dtilde(field, x, max_radius) {
                        let f = |d: f64| {
                            0.5 * d
                                * (field.q_integral_left(x, d) + field.q_integral_right(x, d))
                        };
                        worst = worst.max((f(dt) - 1.0).abs());
                    }
                }
            }
        }
        if solved == 0 {
            suite.skip(
                "geometry: root residuals <= 1e-8",
                "no finite roots on this field".into(),
            );
            suite.skip("geometry: monotone consistency", "no finite roots".into());
        } else {
            suite.residual("geometry: root residuals <= 1e-8", worst, 1e-8);
            suite.push(
                "geometry: monotone consistency F(root/2) < 1 < F(2 root)",
                mono_ok,
                format!("{solved}/25 points had roots"),
            );
        }
    }
    {
        // Lipschitz bounds for d and s at random pairs
        let mut worst = 0.0f64;
        let mut tried = 0;
        for _ in 0..50 {
            let x = rng.gen_range(-0.9 * x_max..0.9 * x_max);
            let h_eval = HEval::new(field, max_radius);
            let Ok(d_x) = geometry::solve_d(field, &h_eval, x, max_radius) else {
                continue;
            };
            let t = rng.gen_range(-1.0..1.0) * d_x;
            let Ok(d_t) = geometry::solve_d(field, &h_eval, x + t, max_radius) else {
                continue;
            };
            tried += 1;
            let eps = t.abs() / d_x;
            let lo = (1.0 - eps) * d_x;
            let hi = (1.0 + eps) * d_x;
            worst = worst.max((lo - d_t).max(0.0) / d_x).max((d_t - hi).max(0.0) / d_x);
        }
        if tried == 0 {
            suite.skip("geometry: d is 1-Lipschitz on its own scale", "no roots".into());
        } else {
            suite.residual("geometry: d is 1-Lipschitz on its own scale", worst, 1e-7);
        }
        if let Some(f) = fss {
            let log_rho = |t: f64| f.log_rho_at(t);
            let mut worst = 0.0f64;
            let mut tried = 0;
            for _ in 0..50 {
                let x = rng.gen_range(-0.9 * x_max..0.9 * x_max);
                let Ok(s_x) = geometry::solve_s(field, &log_rho, x, max_radius) else {
                    continue;
                };
                let t = rng.gen_range(-1.0..1.0) * s_x;
                let Ok(s_t) = geometry::solve_s(field, &log_rho, x + t, max_radius) else {
                    continue;
                };
                tried += 1;
                let eps = t.abs() / s_x;
                worst = worst
                    .max(((1.0 - eps) * s_x - s_t).max(0.0) / s_x)
                    .max((s_t - (1.0 + eps) * s_x).max(0.0) / s_x);
            }
            if tried == 0 {
                suite.skip("geometry: s is 1-Lipschitz on its own scale", "no roots".into());
            } else {
                suite.residual("geometry: s is 1-Lipschitz on its own scale", worst, 1e-7);
            }
        }
    }
    {
        // harmonic-mean identity and bound
        let mut worst = 0.0f64;
        let mut bound_ok = true;
        for i in 0..aux.x.len() {
            if let (Some(phi), Some(psi), Some(h)) = (aux.phi[i], aux.psi[i], aux.h[i]) {
                let hm = phi / (1.0 + phi / psi);
                worst = worst.max((h - hm).abs() / hm);
                bound_ok &= h <= phi.min(psi) * (1.0 + 1e-12);
            }
        }
        suite.residual("geometry: h = phi psi / (phi + psi)", worst, 1e-10);
        suite.push("geometry: h <= min(phi, psi)", bound_ok, String::new());
    }
    {
        // coverings chain exactly and tile the window
        let h_eval = HEval::new(field, max_radius);
        let kappa_d = |t: f64| geometry::solve_d(field, &h_eval, t, max_radius);
        match build_covering(&kappa_d, 0.0, window, "d") {
            Ok(cov) => {
                let covers = cov.covers(-x_max, x_max);
                let defect = cov.max_chain_defect();
                let mut center_res = 0.0f64;
                for pair in cov.segments.windows(2) {
                    let seg = &pair[1];
                    let back = seg.center - seg.half_width;
                    center_res = center_res.max((back - seg.lo).abs() / (1.0 + seg.center.abs()));
                }
                suite.push(
                    "covering: d-chain covers the window with zero defect",
                    covers && defect == 0.0 && center_res <= 1e-8,
                    format!(
                        "{} segments, defect {defect:.1e}, center residual {center_res:.2e}",
                        cov.segments.len()
                    ),
                );
            }
            Err(e) => suite.skip("covering: d-chain covers the window with zero defect", e.to_string()),
        }
        if let Some(f) = fss {
            let log_rho = |t: f64| f.log_rho_at(t);
            let kappa_s = |t: f64| geometry::solve_s(field, &log_rho, t, max_radius);
            match build_covering(&kappa_s, 0.0, window, "s") {
                Ok(cov) => suite.push(
                    "covering: s-chain covers the window with zero defect",
                    cov.covers(-x_max, x_max) && cov.max_chain_defect() == 0.0,
                    format!("{} segments", cov.segments.len()),
                ),
                Err(e) => suite.skip("covering: s-chain covers the window with zero defect", e.to_string()),
            }
        }
    }
    if unit_r {
        // h and d are two-sided comparable when r == 1
        let bound = 4.0 * (2.0f64).exp() * (2.0f64).exp(); // 4 e^2
        let mut ok = true;
        let mut worst: f64 = 1.0;
        for i in 0..aux.x.len() {
            if let (Some(h), Some(d)) = (aux.h[i], aux.d[i]) {
                let ratio = h / d;
                worst = worst.max(ratio).max(1.0 / ratio);
                ok &= ratio >= 1.0 / bound && ratio <= bound;
            }
        }
        suite.push(
            "geometry: h/d inside [1/(4e^2), 4e^2] for r == 1",
            ok,
            format!("worst ratio {worst:.3}"),
        );
    }

    // ---------- principal solutions ----------
    if let Some(f) = fss {
        let mut sign_ok = true;
        for i in 0..f.grid.len() {
            sign_ok &= f.rho[i] > 0.0 && f.rv_prime[i] >= 0.0 && f.ru_prime[i] <= 0.0;
        }
        suite.push("fss: positivity and monotonicity signs", sign_ok, String::new());
        suite.residual(
            "fss: Wronskian residual <= 1e-6 at every node",
            f.max_wronskian_residual,
            1e-6,
        );

        let dh = check_davies_harrell(f, field, 100, seed ^ 0x9e37);
        suite.residual(
            "fss: product-representation reconstruction <= 1e-5",
            dh.max_residual,
            1e-5,
        );
        let ld = check_log_derivative_identities(f, field);
        suite.residual(
            "fss: log-derivative identities <= 1e-4 (central differences)",
            ld.max_residual_v.max(ld.max_residual_u),
            1e-4,
        );
        suite.push(
            "fss: r |rho'| < 1.001 at interior nodes",
            ld.max_r_abs_rho_prime < 1.001,
            format!("max {:.6}", ld.max_r_abs_rho_prime),
        );

        // two-sided sandwiches against the auxiliary functions
        let mut rho_h_ok = true;
        let mut deriv_ok = true;
        let mut dtilde_ok = true;
        let slack = 1.0 + 1e-9;
        for i in 0..f.grid.len() {
            let rho = f.rho[i];
            if let Some(h) = aux.h[i] {
                rho_h_ok &= rho >= 0.5 * h / slack && rho <= 2.0 * h * slack;
            }
            if let (Some(phi), Some(psi)) = (aux.phi[i], aux.psi[i]) {
                let v = f.log_v[i];
                let u = f.log_u[i];
                let lhs_v = (f.rv_prime[i].ln() + phi.ln() - v).exp();
                let lhs_u = ((-f.ru_prime[i]).ln() + psi.ln() - u).exp();
                deriv_ok &= lhs_v >= 0.5 / slack && lhs_v <= 2.0 * slack;
                deriv_ok &= lhs_u >= 0.5 / slack && lhs_u <= 2.0 * slack;
            }
            if let Some(dt) = aux.dtilde[i] {
                dtilde_ok &= rho >= 0.25 * dt / slack && rho <= 1.5 * dt * slack;
            }
        }
        suite.push("fss: h/2 <= rho <= 2 h at every sample", rho_h_ok, String::new());
        suite.push(
            "fss: v/2 <= (r v') phi <= 2 v and the mirrored bound",
            deriv_ok,
            String::new(),
        );
        if unit_r {
            suite.push(
                "fss: dtilde/4 <= rho <= 1.5 dtilde for r == 1",
                dtilde_ok,
                String::new(),
            );
        }

        // local equivalence on the d- and s-balls
        let alpha = (2.0f64).exp();
        let mut ok_d = true;
        let mut ok_s = true;
        let log_rho = |t: f64| f.log_rho_at(t);
        for _ in 0..50 {
            let x = rng.gen_range(-0.9 * x_max..0.9 * x_max);
            let h_eval = HEval::new(field, max_radius);
            if let Ok(d) = geometry::solve_d(field, &h_eval, x, max_radius) {
                let t = x + rng.gen_range(-1.0..1.0) * d;
                let rv = (f.log_v_at(t) - f.log_v_at(x)).exp();
                let ru = (f.log_u_at(t) - f.log_u_at(x)).exp();
                let rr = (f.log_rho_at(t) - f.log_rho_at(x)).exp();
                for ratio in [rv, ru, rr] {
                    ok_d &= ratio >= 1.0 / (alpha * 1.000001) && ratio <= alpha * 1.000001;
                }
                if let (Ok(hx), Ok(ht)) = (
                    geometry::compute_phi_psi_h(field, x, max_radius),
                    geometry::compute_phi_psi_h(field, t, max_radius),
                ) {
                    let rh = ht.h / hx.h;
                    ok_d &= rh >= 1.0 / (4.0 * alpha * 1.000001) && rh <= 4.0 * alpha * 1.000001;
                }
            }
            if let Ok(s) = geometry::solve_s(field, &log_rho, x, max_radius) {
                let t = x + rng.gen_range(-1.0..1.0) * s;
                let e = std::f64::consts::E * 1.000001;
                let rv = (f.log_v_at(t) - f.log_v_at(x)).exp();
                let ru = (f.log_u_at(t) - f.log_u_at(x)).exp();
                let rr = (f.log_rho_at(t) - f.log_rho_at(x)).exp();
                ok_s &= rv >= 1.0 / e && rv <= e && ru >= 1.0 / e && ru <= e;
                ok_s &= rr >= 1.0 / (e * e) && rr <= e * e;
            }
        }
        suite.push(
            "fss: local equivalence of u, v, rho, h on the d-ball",
            ok_d,
            String::new(),
        );
        suite.push(
            "fss: local equivalence of u, v, rho on the s-ball",
            ok_s,
            String::new(),
        );

        // rho bound through the inverse-weight tails when 1/r is integrable
        let tails = [8.0 * x_max, 16.0 * x_max, 32.0 * x_max];
        let left: Vec<f64> = tails.iter().map(|&t| field.r_integral(-t, 0.0)).collect();
        let right: Vec<f64> = tails.iter().map(|&t| field.r_integral(0.0, t)).collect();
        let integrable = left[2] <= left[1] * 1.05 && right[2] <= right[1] * 1.05;
        if integrable {
            let reach = tails[2];
            let tau = (1.0 / left[2]).max(1.0 / right[2]);
            let mut ok = true;
            for (i, &x) in f.grid.iter().enumerate() {
                let bound =
                    tau * field.r_integral(x - reach, x) * field.r_integral(x, x + reach);
                ok &= f.rho[i] <= bound * (1.0 + 1e-6);
            }
            suite.push(
                "fss: rho bounded by the inverse-weight tail product",
                ok,
                String::new(),
            );
        }

        // report-only limit evidence
        let lim = limit_report(f, field);
        suite.push(
            "fss: one-sided mass trends reported",
            true,
            format!(
                "v/u(-X) = {:.3e}, u/v(X) = {:.3e}, divergent-side trends {:?}/{:?}",
                lim.v_over_u_left, lim.u_over_v_right, lim.left_v_trend, lim.right_u_trend
            ),
        );
    } else {
        suite.skip("fss: construction", "fundamental system unavailable".into());
    }

    // ---------- criteria ----------
    let report = &analysis.report;
    {
        // h d A(x) <= 16 wherever both sides exist
        let mut worst = 0.0f64;
        for i in 0..aux.x.len() {
            if let (Some(h), Some(d)) = (aux.h[i], aux.d[i]) {
                let x = aux.x[i];
                let a = (field.q_integral_left(x, d) + field.q_integral_right(x, d)) / (2.0 * d);
                worst = worst.max(h * d * a);
            }
        }
        suite.push(
            "criteria: h d * Steklov average <= 16",
            worst <= 16.0,
            format!("max {worst:.4}"),
        );
    }
    {
        // the two necessary-and-sufficient routes agree when both computed
        let b_t = &report.b.trend;
        let s_t = &report.s.trend;
        if b_t.complete() && s_t.complete() {
            let agree = (b_t.any_diverging() == s_t.any_diverging())
                && (b_t.vanishing_both() == s_t.vanishing_both());
            suite.push(
                "criteria: verdicts from B and S agree",
                agree,
                format!(
                    "B {:?}/{:?}, S {:?}/{:?}",
                    b_t.class_minus, b_t.class_plus, s_t.class_minus, s_t.class_plus
                ),
            );
            if let Some(ratio) = report.b_over_s {
                suite.push(
                    "criteria: B/S inside [1/16, 16]",
                    (1.0 / 16.0..=16.0).contains(&ratio),
                    format!("B/S = {ratio:.4}"),
                );
            }
        } else {
            suite.skip(
                "criteria: verdicts from B and S agree",
                "one route unavailable".into(),
            );
        }
    }
    {
        // Steklov divergence forces the h d route to vanish
        if report.steklov.trend.diverging_both() {
            suite.push(
                "criteria: Steklov divergence implies h d vanishing",
                report.b.trend.vanishing_both(),
                String::new(),
            );
        }
    }
    if unit_r {
        // Molchanov equivalence: dtilde vanishes iff every local q mass
        // diverges. The trend runs on dtilde^2 (comparable to h d), which
        // keeps 1/x-type decay away from the factor-2 boundary.
        let dtilde_sq_trend = ShellTrend::evaluate(x_max, |x| {
            geometry::solve_dtilde(field, x, SEARCH_RADIUS_FACTOR * 4.0 * x_max)
                .ok()
                .map(|v| v * v)
        });
        if dtilde_sq_trend.complete() {
            let dtilde_vanishes = dtilde_sq_trend.vanishing_both();
            let all_masses_diverge = report
                .molchanov
                .iter()
                .all(|m| m.trend.diverging_both());
            suite.push(
                "criteria: Molchanov equivalence at trend level (r == 1)",
                dtilde_vanishes == all_masses_diverge,
                format!(
                    "dtilde vanishing = {dtilde_vanishes}, all masses diverging = {all_masses_diverge}"
                ),
            );
        }
    }
    {
        // constant positive q can never yield a compact verdict
        let q_vals: Vec<f64> = window.grid().iter().map(|&x| field.q(x)).collect();
        let q_const = q_vals
            .windows(2)
            .all(|w| (w[0] - w[1]).abs() <= 1e-12 * (1.0 + w[0].abs()));
        if q_const && q_vals[0] > 0.0 {
            suite.push(
                "criteria: constant positive q is never compact",
                report.compact == Verdict::No,
                format!("verdict {:?}", report.compact),
            );
        }
    }

    // ---------- hardy bounds ----------
    if let Some(f) = fss {
        match hardy::split_operator_norms(f, field, p, window, n) {
            Ok(norms) => {
                suite.push(
                    "hardy: triangle relation on the discretized split",
                    norms.triangle_ok,
                    format!(
                        "|G| = {:.5}, |G1| = {:.5}, |G2| = {:.5}",
                        norms.norm_g, norms.norm_g1, norms.norm_g2
                    ),
                );
                if let Some(ok) = norms.sandwich_ok {
                    suite.push(
                        "hardy: H_p brackets the discretized half norms",
                        ok,
                        format!(
                            "H(G2) = {:.5} vs |G2| = {:.5}; H(G1) = {:.5} vs |G1| = {:.5}; factor {:.3}",
                            norms.hardy_g2,
                            norms.norm_g2,
                            norms.hardy_g1,
                            norms.norm_g1,
                            norms.bracket_factor
                        ),
                    );
                }
                // norms grow under dyadic refinement (nested cell spaces)
                // and under window growth (central sub-blocks)
                let nn = (n.max(32) / 4) * 4;
                let mut mono_n = true;
                let mut prev = 0.0;
                for k in [nn / 4, nn / 2, nn] {
                    let ops = discretize(f, window, k)?;
                    let (norm, _) = spectral_norm(&ops.g, 1e-8, 4000);
                    mono_n &= norm >= prev * (1.0 - 1e-7);
                    prev = norm;
                }
                let ops = discretize(f, window, nn)?;
                let mut mono_x = true;
                let mut prev = 0.0;
                for keep in [nn / 2, 3 * nn / 4, nn] {
                    let block = hardy::central_block(&ops.g, keep);
                    let (norm, _) = spectral_norm(&block, 1e-8, 4000);
                    mono_x &= norm >= prev * (1.0 - 1e-7);
                    prev = norm;
                }
                suite.push(
                    "hardy: discretized norm nondecreasing in n and window",
                    mono_n && mono_x,
                    String::new(),
                );
            }
            Err(e) => suite.skip("hardy: operator norms", e.to_string()),
        }
        let theta = hardy::theta_p_profile(f, field, aux, p, window);
        suite.push(
            "hardy: theta_p finite and nonnegative at every sample",
            theta.theta_p.iter().all(|v| v.is_finite() && *v >= 0.0),
            format!(
                "sup = {:.5e}, envelope theta_p/(h d) in [{:.3}, {:.3}]",
                theta.sup,
                theta.envelope_min.unwrap_or(f64::NAN),
                theta.envelope_max.unwrap_or(f64::NAN)
            ),
        );
        let decays = theta
            .variants
            .windows(2)
            .all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-9) && w[1].2 <= w[0].2 * (1.0 + 1e-9));
        suite.push(
            "hardy: one-sided theta_p variants decay with the cut",
            decays,
            format!("{:?}", theta.variants),
        );
    }

    // ---------- spectral ----------
    if let Some(f) = fss {
        let ops = discretize(f, window, n.max(16))?;
        suite.push(
            "spectral: discretized kernel is exactly symmetric",
            ops.g.is_symmetric(),
            String::new(),
        );
        let nn = (n.max(32) / 4) * 4;
        let mut lambdas = Vec::new();
        for k in [nn / 4, nn / 2, nn] {
            let rep = spectral::eigen_top(f, window, k, 3)?;
            lambdas.push(rep.lambda_max);
        }
        let mono = lambdas
            .windows(2)
            .all(|w| w[1] >= w[0] * (1.0 - 1e-7));
        suite.push(
            "spectral: lambda_max nondecreasing over nested dyadic grids",
            mono,
            format!("{lambdas:?}"),
        );

        let decay = spectral::decay_quantities(f, field, window);
        let hd_shells = [0.25 * x_max, 0.5 * x_max, x_max];
        let hd_plus = hd_shells.map(|s| criteria::hd_at(field, s, max_radius).ok());
        let hd_minus = hd_shells.map(|s| criteria::hd_at(field, -s, max_radius).ok());
        if hd_plus.iter().all(|v| v.is_some()) && hd_minus.iter().all(|v| v.is_some()) {
            let hd_plus_trend = crate::trend::classify(hd_plus.map(|v| v.unwrap()));
            let hd_minus_trend = crate::trend::classify(hd_minus.map(|v| v.unwrap()));
            let fwd_agree = (decay.forward_trend_plus == TrendClass::Vanishing)
                == (hd_plus_trend == TrendClass::Vanishing);
            let bwd_agree = (decay.backward_trend_minus == TrendClass::Vanishing)
                == (hd_minus_trend == TrendClass::Vanishing);
            suite.push(
                "spectral: kernel-tail decay agrees with the h d trend",
                fwd_agree && bwd_agree,
                format!(
                    "I {:?}/{:?} vs h d {:?}/{:?}",
                    decay.backward_trend_minus, decay.forward_trend_plus, hd_minus_trend, hd_plus_trend
                ),
            );
        }

        let mut spec_rep = spectral::eigen_top(f, window, n.max(16), 10)?;
        if let Some(b) = report.b.window_sup {
            spectral::check_eigen_vs_b(&mut spec_rep, b);
            if report.compact == Verdict::Yes {
                suite.push(
                    "spectral: lambda/B inside the [1/64, 64] envelope",
                    spec_rep.envelope_ok.unwrap_or(false),
                    format!("ratio {:?}", spec_rep.ratio_to_b),
                );
            } else {
                suite.push(
                    "spectral: lambda/B reported (vanishing hypothesis fails here)",
                    true,
                    format!("ratio {:?}", spec_rep.ratio_to_b),
                );
            }
        }

        if report.compact == Verdict::Yes {
            // kernel application flattens at the edges for compact fields
            let nn = n.max(64);
            let ops = discretize(f, window, nn)?;
            let fvec: Vec<f64> = ops
                .grid
                .iter()
                .map(|&t| if t.abs() <= 1.0 { 1.0 } else { 0.0 })
                .collect();
            let mut y = vec![0.0; nn];
            ops.g.matvec(&fvec, &mut y);
            // r y' y via central differences
            let mut max_mid = 0.0f64;
            let mut edge = 0.0f64;
            for i in 1..nn - 1 {
                let yp = (y[i + 1] - y[i - 1]) / (2.0 * ops.weight);
                let val = (field.r(ops.grid[i]) * yp * y[i]).abs();
                if ops.grid[i].abs() <= 0.5 * x_max {
                    max_mid = max_mid.max(val);
                } else if ops.grid[i].abs() >= 0.9 * x_max {
                    edge = edge.max(val);
                }
            }
            suite.push(
                "spectral: flux-energy product decays toward the edges",
                edge <= 1e-3 * max_mid.max(1e-300),
                format!("edge {edge:.3e} vs mid {max_mid:.3e}"),
            );
        }
    }

    let all_pass = suite.checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        checks: suite.checks,
        all_pass,
    })
}
