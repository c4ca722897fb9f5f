//! Solvability and compactness functionals and the verdict they imply.
//!
//! The necessary-and-sufficient quantities are `B = sup h(x) d(x)` and
//! `S = sup rho(x) s(x)`: finiteness decides solvability, vanishing at
//! infinity decides compactness of the Green operator. Around them sit the
//! sufficient criteria (Steklov averages, `B1..B3`, the Hardy-type `theta`
//! and `nu`, the Molchanov mass for `r == 1`) used when a route is out of
//! numerical reach. Every "limit" is a nested-window trend; the verdict
//! records which rule fired, and a necessary "no" always overrides a
//! sufficient "yes".

use serde::Serialize;

use crate::coeff::{
    validate_hypotheses, HypothesisReport, WeightField, Window,
};
use crate::error::Result;
use crate::fss::{compute_fss_on, FssProfile};
use crate::geometry::{
    self, compute_aux_profile, AuxProfile, HEval, SEARCH_RADIUS_FACTOR,
};
use crate::trend::ShellTrend;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

/// Window supremum and edge trend of one functional.
#[derive(Debug, Clone, Serialize)]
pub struct SupFunctional {
    pub window_sup: Option<f64>,
    pub argmax: Option<f64>,
    pub trend: ShellTrend,
    /// Reason the functional does not apply to this field, if any.
    pub prerequisite_failed: Option<String>,
}

/// Window infimum and edge trend of one functional.
#[derive(Debug, Clone, Serialize)]
pub struct InfFunctional {
    pub window_inf: Option<f64>,
    pub argmin: Option<f64>,
    pub trend: ShellTrend,
    pub prerequisite_failed: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MolchanovEntry {
    pub a: f64,
    /// `inf over the window of int_{x-a}^{x+a} q`.
    pub window_inf: f64,
    pub trend: ShellTrend,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriteriaReport {
    /// `sup h d`.
    pub b: SupFunctional,
    /// `sup rho s`.
    pub s: SupFunctional,
    /// Steklov average `A(x) = Q(x-d, x+d) / (2 d)`, its infimum and trend.
    pub steklov: InfFunctional,
    /// `A~(x) = Q(x-mu, x+mu) / (2 mu)`.
    pub a_tilde: InfFunctional,
    /// Largest of `phi/psi`, `psi/phi` over the window.
    pub phi_psi_max_ratio: Option<f64>,
    /// The `A~` verdict contribution is conditional when the ratio above
    /// exceeds 10 (its criterion assumes two-sided comparability).
    pub a_tilde_conditional: bool,
    /// `sup r h^2`.
    pub b1: SupFunctional,
    /// `sup r phi psi`.
    pub b2: SupFunctional,
    /// `sup h |x|`.
    pub b3: SupFunctional,
    /// `sup |x| R(-inf, x) R(x, inf)`; needs `1/r` integrable and `q`
    /// non-integrable on both tails.
    pub theta: SupFunctional,
    /// `sup r R(-inf, x)^2 R(x, inf)^2`; needs `1/r` integrable.
    pub nu: SupFunctional,
    /// Molchanov masses for `r == 1`.
    pub molchanov: Vec<MolchanovEntry>,
    pub unit_r: bool,
    pub b_over_s: Option<f64>,
    pub solvable: Verdict,
    pub solvable_rule: String,
    pub compact: Verdict,
    pub compact_rule: String,
    pub notes: Vec<String>,
}

/// Everything one pipeline run produces.
#[derive(Debug)]
pub struct AnalysisOutput {
    pub window: Window,
    pub hypotheses: HypothesisReport,
    pub aux: AuxProfile,
    /// Fundamental system on the doubled window, when the sweep is
    /// feasible.
    pub fss: Option<FssProfile>,
    /// Wider system reaching the trend shells.
    pub fss_trend: Option<FssProfile>,
    pub report: CriteriaReport,
}

const MOLCHANOV_REACH: [f64; 3] = [0.25, 1.0, 4.0];

fn empty_trend(base: f64) -> ShellTrend {
    ShellTrend::from_samples([base, 2.0 * base, 4.0 * base], [None; 3], [None; 3])
}

/// `h(x) d(x)` at one point.
pub fn hd_at(field: &WeightField, x: f64, max_radius: f64) -> Result<f64> {
    let v = geometry::compute_phi_psi_h(field, x, max_radius)?;
    let h_eval = HEval::new(field, max_radius);
    let d = geometry::solve_d(field, &h_eval, x, max_radius)?;
    Ok(v.h * d)
}

/// Steklov average of `q` over the `d(x)`-ball.
pub fn steklov_at(field: &WeightField, x: f64, max_radius: f64) -> Result<f64> {
    let h_eval = HEval::new(field, max_radius);
    let d = geometry::solve_d(field, &h_eval, x, max_radius)?;
    Ok((field.q_integral_left(x, d) + field.q_integral_right(x, d)) / (2.0 * d))
}

/// The smoothed average of `q` over the `mu(x)`-ball.
pub fn a_tilde_at(field: &WeightField, x: f64, max_radius: f64) -> Result<f64> {
    let h_eval = HEval::new(field, max_radius);
    let mu = geometry::solve_mu(field, &h_eval, x, max_radius)?;
    Ok((field.q_integral_left(x, mu) + field.q_integral_right(x, mu)) / (2.0 * mu))
}

/// `rho(x) s(x)` at one point, using an already-built fundamental system.
pub fn rho_s_at(field: &WeightField, fss: &FssProfile, x: f64, max_radius: f64) -> Result<f64> {
    let log_rho = |t: f64| fss.log_rho_at(t);
    let s = geometry::solve_s(field, &log_rho, x, max_radius)?;
    Ok(fss.rho_at(x) * s)
}

fn theta_at(field: &WeightField, x: f64, reach: f64) -> f64 {
    x.abs() * field.r_integral(x - reach, x) * field.r_integral(x, x + reach)
}

fn nu_at(field: &WeightField, x: f64, reach: f64) -> f64 {
    let left = field.r_integral(x - reach, x);
    let right = field.r_integral(x, x + reach);
    field.r(x) * left * left * right * right
}

/// Evidence that `int dt/r` converges on both tails: the mass gains from
/// doubling the reach are negligible.
fn inv_r_integrable(field: &WeightField, base: f64) -> bool {
    let reaches = [8.0 * base, 16.0 * base, 32.0 * base];
    let left: Vec<f64> = reaches.iter().map(|&t| field.r_integral(-t, 0.0)).collect();
    let right: Vec<f64> = reaches.iter().map(|&t| field.r_integral(0.0, t)).collect();
    let converged = |v: &[f64]| v[2] <= v[1] * 1.05 && v[1] <= v[0] * 1.05 && v[2].is_finite();
    converged(&left) && converged(&right)
}

/// Evidence that `q` is non-integrable on both tails.
fn q_nonintegrable_tails(field: &WeightField, base: f64) -> bool {
    let reaches = [8.0 * base, 16.0 * base, 32.0 * base];
    let left: Vec<f64> = reaches.iter().map(|&t| field.q_integral(-t, 0.0)).collect();
    let right: Vec<f64> = reaches.iter().map(|&t| field.q_integral(0.0, t)).collect();
    let diverging = |v: &[f64]| v[1] >= 1.9 * v[0] && v[2] >= 1.9 * v[1];
    diverging(&left) && diverging(&right)
}

struct ProfileSup {
    sup: Option<f64>,
    argmax: Option<f64>,
}

fn profile_sup(xs: &[f64], vals: impl Iterator<Item = Option<f64>>) -> ProfileSup {
    let mut sup = None;
    let mut argmax = None;
    for (x, v) in xs.iter().zip(vals) {
        if let Some(v) = v {
            if sup.map_or(true, |s| v > s) {
                sup = Some(v);
                argmax = Some(*x);
            }
        }
    }
    ProfileSup { sup, argmax }
}

fn profile_inf(xs: &[f64], vals: impl Iterator<Item = Option<f64>>) -> ProfileSup {
    let mut inf = None;
    let mut argmin = None;
    for (x, v) in xs.iter().zip(vals) {
        if let Some(v) = v {
            if inf.map_or(true, |s| v < s) {
                inf = Some(v);
                argmin = Some(*x);
            }
        }
    }
    ProfileSup {
        sup: inf,
        argmax: argmin,
    }
}

/// Run the full pipeline on one field.
pub fn analyze(field: &WeightField, window: &Window) -> Result<AnalysisOutput> {
    field.check_positivity(window)?;
    let hypotheses = validate_hypotheses(field, window);
    let mut notes: Vec<String> = Vec::new();
    if !hypotheses.positivity_ok {
        notes.push("one-sided q mass vanishes at a probe point".into());
    }
    if !hypotheses.divergence_ok {
        notes.push("R*Q products do not all diverge at the probes".into());
    }

    let x_base = window.half_width;

    // fundamental system on the doubled window for window-sup quantities
    let fss = match compute_fss_on(field, window, 2.0 * x_base) {
        Ok(f) => Some(f),
        Err(e) => {
            notes.push(format!("fss unavailable: {e}"));
            None
        }
    };
    // and a wider one reaching the trend shells at 4X (pad of X beyond)
    let fss_trend = if fss.is_some() {
        let wide = Window::new(4.0 * x_base, (window.samples * 2).max(801))?;
        match compute_fss_on(field, &wide, 5.0 * x_base) {
            Ok(f) => Some(f),
            Err(e) => {
                notes.push(format!("trend fss unavailable: {e}"));
                None
            }
        }
    } else {
        None
    };

    let log_rho_base: Option<Box<dyn Fn(f64) -> f64>> = fss.as_ref().map(|f| {
        let f = f.clone();
        Box::new(move |t: f64| f.log_rho_at(t)) as Box<dyn Fn(f64) -> f64>
    });
    let aux = compute_aux_profile(field, window, log_rho_base.as_deref());
    notes.extend(aux.notes.iter().cloned());

    let report = build_report(field, window, &aux, fss.as_ref(), fss_trend.as_ref(), notes);
    Ok(AnalysisOutput {
        window: *window,
        hypotheses,
        aux,
        fss,
        fss_trend,
        report,
    })
}

fn build_report(
    field: &WeightField,
    window: &Window,
    aux: &AuxProfile,
    fss: Option<&FssProfile>,
    fss_trend: Option<&FssProfile>,
    notes: Vec<String>,
) -> CriteriaReport {
    let x_base = window.half_width;
    let shell_radius = SEARCH_RADIUS_FACTOR * 4.0 * x_base;
    let unit_r = field.is_unit_r(window);

    // ---- window suprema from the profile ----
    let hd_vals = aux
        .h
        .iter()
        .zip(aux.d.iter())
        .map(|(h, d)| h.and_then(|h| d.map(|d| h * d)));
    let b_sup = profile_sup(&aux.x, hd_vals);

    let rho_s_vals: Vec<Option<f64>> = match fss {
        Some(f) => aux
            .x
            .iter()
            .zip(aux.s.iter())
            .map(|(&x, s)| s.map(|s| f.rho_at(x) * s))
            .collect(),
        None => vec![None; aux.x.len()],
    };
    let s_sup = profile_sup(&aux.x, rho_s_vals.iter().cloned());

    let steklov_vals: Vec<Option<f64>> = aux
        .x
        .iter()
        .zip(aux.d.iter())
        .map(|(&x, d)| {
            d.map(|d| (field.q_integral_left(x, d) + field.q_integral_right(x, d)) / (2.0 * d))
        })
        .collect();
    let steklov_inf = profile_inf(&aux.x, steklov_vals.iter().cloned());

    let a_tilde_vals: Vec<Option<f64>> = aux
        .x
        .iter()
        .zip(aux.mu.iter())
        .map(|(&x, mu)| {
            mu.map(|mu| (field.q_integral_left(x, mu) + field.q_integral_right(x, mu)) / (2.0 * mu))
        })
        .collect();
    let a_tilde_inf = profile_inf(&aux.x, a_tilde_vals.iter().cloned());

    let phi_psi_max_ratio = aux
        .phi
        .iter()
        .zip(aux.psi.iter())
        .filter_map(|(phi, psi)| {
            phi.and_then(|phi| psi.map(|psi| (phi / psi).max(psi / phi)))
        })
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        });
    let a_tilde_conditional = phi_psi_max_ratio.map_or(true, |r| r > 10.0);

    let b1_sup = profile_sup(
        &aux.x,
        aux.x
            .iter()
            .zip(aux.h.iter())
            .map(|(&x, h)| h.map(|h| field.r(x) * h * h)),
    );
    let b2_sup = profile_sup(
        &aux.x,
        aux.x.iter().zip(aux.phi.iter().zip(aux.psi.iter())).map(
            |(&x, (phi, psi))| phi.and_then(|phi| psi.map(|psi| field.r(x) * phi * psi)),
        ),
    );
    let b3_sup = profile_sup(
        &aux.x,
        aux.x
            .iter()
            .zip(aux.h.iter())
            .map(|(&x, h)| h.map(|h| h * x.abs())),
    );

    // ---- edge trends ----
    let b_trend = ShellTrend::evaluate(x_base, |x| hd_at(field, x, shell_radius).ok());
    let s_trend = match fss_trend {
        Some(f) => {
            ShellTrend::evaluate(x_base, |x| rho_s_at(field, f, x, shell_radius).ok())
        }
        None => empty_trend(x_base),
    };
    let steklov_trend = ShellTrend::evaluate(x_base, |x| steklov_at(field, x, shell_radius).ok());
    let a_tilde_trend = ShellTrend::evaluate(x_base, |x| a_tilde_at(field, x, shell_radius).ok());
    let b1_trend = ShellTrend::evaluate(x_base, |x| {
        geometry::compute_phi_psi_h(field, x, shell_radius)
            .ok()
            .map(|v| field.r(x) * v.h * v.h)
    });
    let b2_trend = ShellTrend::evaluate(x_base, |x| {
        geometry::compute_phi_psi_h(field, x, shell_radius)
            .ok()
            .map(|v| field.r(x) * v.phi * v.psi)
    });
    let b3_trend = ShellTrend::evaluate(x_base, |x| {
        geometry::compute_phi_psi_h(field, x, shell_radius)
            .ok()
            .map(|v| v.h * x.abs())
    });

    // Hardy-type functionals: tails truncated at the search cap
    let tail_reach = shell_radius;
    let r_tail_ok = inv_r_integrable(field, x_base);
    let q_tails_diverge = q_nonintegrable_tails(field, x_base);
    let theta_prereq = if !r_tail_ok {
        Some("1/r not integrable on the tails".to_string())
    } else if !q_tails_diverge {
        Some("q integrable on a tail".to_string())
    } else {
        None
    };
    let nu_prereq = if r_tail_ok {
        None
    } else {
        Some("1/r not integrable on the tails".to_string())
    };
    let (theta_sup, theta_trend) = if theta_prereq.is_none() {
        (
            profile_sup(
                &aux.x,
                aux.x.iter().map(|&x| Some(theta_at(field, x, tail_reach))),
            ),
            ShellTrend::evaluate(x_base, |x| Some(theta_at(field, x, tail_reach))),
        )
    } else {
        (
            ProfileSup {
                sup: None,
                argmax: None,
            },
            empty_trend(x_base),
        )
    };
    let (nu_sup, nu_trend) = if nu_prereq.is_none() {
        (
            profile_sup(
                &aux.x,
                aux.x.iter().map(|&x| Some(nu_at(field, x, tail_reach))),
            ),
            ShellTrend::evaluate(x_base, |x| Some(nu_at(field, x, tail_reach))),
        )
    } else {
        (
            ProfileSup {
                sup: None,
                argmax: None,
            },
            empty_trend(x_base),
        )
    };

    let molchanov: Vec<MolchanovEntry> = if unit_r {
        MOLCHANOV_REACH
            .iter()
            .map(|&a| {
                let inf = profile_inf(
                    &aux.x,
                    aux.x
                        .iter()
                        .map(|&x| Some(field.q_integral(x - a, x + a))),
                );
                MolchanovEntry {
                    a,
                    window_inf: inf.sup.unwrap_or(0.0),
                    trend: ShellTrend::evaluate(x_base, |x| {
                        Some(field.q_integral(x - a, x + a))
                    }),
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    let b = SupFunctional {
        window_sup: b_sup.sup,
        argmax: b_sup.argmax,
        trend: b_trend,
        prerequisite_failed: None,
    };
    let s = SupFunctional {
        window_sup: s_sup.sup,
        argmax: s_sup.argmax,
        trend: s_trend,
        prerequisite_failed: if fss.is_none() {
            Some("fundamental system unavailable".into())
        } else {
            None
        },
    };
    let b_over_s = match (b.window_sup, s.window_sup) {
        (Some(b), Some(s)) if s > 0.0 => Some(b / s),
        _ => None,
    };

    let steklov = InfFunctional {
        window_inf: steklov_inf.sup,
        argmin: steklov_inf.argmax,
        trend: steklov_trend,
        prerequisite_failed: None,
    };
    let a_tilde = InfFunctional {
        window_inf: a_tilde_inf.sup,
        argmin: a_tilde_inf.argmax,
        trend: a_tilde_trend,
        prerequisite_failed: None,
    };
    let b1 = SupFunctional {
        window_sup: b1_sup.sup,
        argmax: b1_sup.argmax,
        trend: b1_trend,
        prerequisite_failed: None,
    };
    let b2 = SupFunctional {
        window_sup: b2_sup.sup,
        argmax: b2_sup.argmax,
        trend: b2_trend,
        prerequisite_failed: None,
    };
    let b3 = SupFunctional {
        window_sup: b3_sup.sup,
        argmax: b3_sup.argmax,
        trend: b3_trend,
        prerequisite_failed: None,
    };
    let theta = SupFunctional {
        window_sup: theta_sup.sup,
        argmax: theta_sup.argmax,
        trend: theta_trend,
        prerequisite_failed: theta_prereq,
    };
    let nu = SupFunctional {
        window_sup: nu_sup.sup,
        argmax: nu_sup.argmax,
        trend: nu_trend,
        prerequisite_failed: nu_prereq,
    };

    let mut report = CriteriaReport {
        b,
        s,
        steklov,
        a_tilde,
        phi_psi_max_ratio,
        a_tilde_conditional,
        b1,
        b2,
        b3,
        theta,
        nu,
        molchanov,
        unit_r,
        b_over_s,
        solvable: Verdict::Inconclusive,
        solvable_rule: String::new(),
        compact: Verdict::Inconclusive,
        compact_rule: String::new(),
        notes: Vec::new(),
    };
    render_verdict(&mut report);
    report.notes = notes;
    report
}

/// Decide the verdicts from the assembled functionals. Necessary-condition
/// failures are checked first and override everything else.
pub fn render_verdict(report: &mut CriteriaReport) {
    // ---- solvability ----
    let molchanov_all_vanish = report.unit_r
        && !report.molchanov.is_empty()
        && report
            .molchanov
            .iter()
            .all(|m| m.trend.vanishing_both());
    let (solvable, rule): (Verdict, String) = if report.b.trend.any_diverging() {
        (Verdict::No, "sup h*d diverges at the window edges (necessary criterion)".into())
    } else if report.s.trend.any_diverging() {
        (Verdict::No, "sup rho*s diverges at the window edges (necessary criterion)".into())
    } else if molchanov_all_vanish {
        (
            Verdict::No,
            "r == 1 and every probed Molchanov mass vanishes at the edges".into(),
        )
    } else if report.b.trend.finite_evidence() {
        (Verdict::Yes, "sup h*d stays finite across the nested windows".into())
    } else if report.s.trend.finite_evidence() {
        (Verdict::Yes, "sup rho*s stays finite across the nested windows".into())
    } else if report.steklov.window_inf.is_some_and(|v| v > 0.0)
        && (report.steklov.trend.finite_evidence() || report.steklov.trend.diverging_both())
        && report.steklov.trend.complete()
    {
        (
            Verdict::Yes,
            "Steklov average of q separated from zero (sufficient)".into(),
        )
    } else if !report.a_tilde_conditional
        && report.a_tilde.window_inf.is_some_and(|v| v > 0.0)
        && report.a_tilde.trend.complete()
        && !report.a_tilde.trend.vanishing_both()
    {
        (
            Verdict::Yes,
            "mu-averaged q separated from zero with phi ~ psi (sufficient)".into(),
        )
    } else if report.theta.prerequisite_failed.is_none() && report.theta.trend.finite_evidence() {
        (
            Verdict::Yes,
            "theta finite with 1/r integrable (Hardy-type route)".into(),
        )
    } else if report.nu.prerequisite_failed.is_none() && report.nu.trend.finite_evidence() {
        (
            Verdict::Yes,
            "nu finite with 1/r integrable (Hardy-type route)".into(),
        )
    } else if report.b1.trend.finite_evidence()
        || report.b2.trend.finite_evidence()
        || report.b3.trend.finite_evidence()
    {
        (Verdict::Yes, "a pointwise h-functional stays bounded (sufficient)".into())
    } else if report.unit_r
        && report
            .molchanov
            .iter()
            .any(|m| m.window_inf > 0.0 && m.trend.complete() && !m.trend.vanishing_both())
    {
        (
            Verdict::Yes,
            "r == 1 and a Molchanov mass is separated from zero".into(),
        )
    } else {
        (
            Verdict::Inconclusive,
            "no criterion reached a classification".into(),
        )
    };
    report.solvable = solvable;
    report.solvable_rule = rule;

    // ---- compactness ----
    let (compact, rule): (Verdict, String) = if report.solvable == Verdict::No {
        (Verdict::No, "not correctly solvable".into())
    } else if report.solvable == Verdict::Inconclusive {
        (Verdict::Inconclusive, "solvability undecided".into())
    } else if report.b.trend.vanishing_both() {
        (Verdict::Yes, "h*d vanishes at the window edges".into())
    } else if report.s.trend.vanishing_both() {
        (Verdict::Yes, "rho*s vanishes at the window edges".into())
    } else if report.steklov.trend.diverging_both()
        && report.steklov.window_inf.is_some_and(|v| v > 0.0)
    {
        (Verdict::Yes, "Steklov average of q diverges".into())
    } else if !report.a_tilde_conditional && report.a_tilde.trend.diverging_both() {
        (Verdict::Yes, "mu-averaged q diverges with phi ~ psi".into())
    } else if report.theta.prerequisite_failed.is_none() && report.theta.trend.vanishing_both() {
        (Verdict::Yes, "theta vanishes with 1/r integrable".into())
    } else if report.nu.prerequisite_failed.is_none() && report.nu.trend.vanishing_both() {
        (Verdict::Yes, "nu vanishes with 1/r integrable".into())
    } else if report.b.trend.bounded_away() {
        (
            Verdict::No,
            "h*d stays bounded away from zero at the edges".into(),
        )
    } else if report.s.trend.bounded_away() {
        (
            Verdict::No,
            "rho*s stays bounded away from zero at the edges".into(),
        )
    } else if report.unit_r
        && report.molchanov.iter().any(|m| m.window_inf > 0.0)
        && report
            .molchanov
            .iter()
            .any(|m| m.trend.complete() && !m.trend.diverging_both())
    {
        (
            Verdict::No,
            "r == 1 and a Molchanov mass fails to diverge".into(),
        )
    } else {
        (Verdict::Inconclusive, "no criterion reached a classification".into())
    };
    report.compact = compact;
    report.compact_rule = rule;
}

/// Expected sign-class behaviour of the exponential family
/// `r = exp(alpha |x|)`, `q = exp(beta |x|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CellExpectation {
    NotSolvable,
    SolvableNotCompact,
    Compact,
}

pub fn expected_cell(alpha: f64, beta: f64) -> CellExpectation {
    if alpha > 0.0 {
        CellExpectation::Compact
    } else if beta > 0.0 {
        CellExpectation::Compact
    } else if beta == 0.0 {
        CellExpectation::SolvableNotCompact
    } else {
        CellExpectation::NotSolvable
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TableCell {
    pub alpha: f64,
    pub beta: f64,
    pub solvable: Verdict,
    pub compact: Verdict,
    pub solvable_rule: String,
    pub compact_rule: String,
    pub expected: CellExpectation,
    pub matches: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableOutput {
    pub window: Window,
    pub cells: Vec<TableCell>,
    pub all_match: bool,
}

fn cell_matches(expected: CellExpectation, solvable: Verdict, compact: Verdict) -> bool {
    match expected {
        CellExpectation::NotSolvable => solvable == Verdict::No,
        CellExpectation::SolvableNotCompact => {
            solvable == Verdict::Yes && compact == Verdict::No
        }
        CellExpectation::Compact => solvable == Verdict::Yes && compact == Verdict::Yes,
    }
}

/// Run the pipeline over a grid of exponential coefficients and compare
/// with the expected sign-class verdicts.
pub fn exponential_table(alphas: &[f64], betas: &[f64], window: &Window) -> TableOutput {
    let mut cells = Vec::new();
    for &alpha in alphas {
        for &beta in betas {
            let expected = expected_cell(alpha, beta);
            let spec = crate::coeff::CoefficientSpec::Exponential { alpha, beta };
            let cell = match crate::coeff::build_weight_field(spec)
                .and_then(|field| analyze(&field, window))
            {
                Ok(out) => TableCell {
                    alpha,
                    beta,
                    solvable: out.report.solvable,
                    compact: out.report.compact,
                    solvable_rule: out.report.solvable_rule.clone(),
                    compact_rule: out.report.compact_rule.clone(),
                    expected,
                    matches: cell_matches(expected, out.report.solvable, out.report.compact),
                    error: None,
                },
                Err(e) => TableCell {
                    alpha,
                    beta,
                    solvable: Verdict::Inconclusive,
                    compact: Verdict::Inconclusive,
                    solvable_rule: String::new(),
                    compact_rule: String::new(),
                    expected,
                    matches: false,
                    error: Some(e.to_string()),
                },
            };
            cells.push(cell);
        }
    }
    let all_match = cells.iter().all(|c| c.matches);
    TableOutput {
        window: *window,
        cells,
        all_match,
    }
}
