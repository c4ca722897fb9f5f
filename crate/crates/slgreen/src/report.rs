//! Deterministic serialization of profiles and reports.
//!
//! Identical inputs must yield byte-identical output, so every float is
//! printed with a fixed scientific format and iteration orders are the
//! storage orders.

use std::fmt::Write as _;

use serde::Serialize;

use crate::coeff::{HypothesisReport, Window};
use crate::criteria::CriteriaReport;
use crate::fss::FssProfile;
use crate::geometry::{AuxProfile, Covering};

fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

fn fmt_opt(v: &Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

/// CSV with columns `x,d1,d2,phi,psi,h,d,s,mu,dtilde`; cells are empty
/// where the defining equation had no root in reach.
pub fn aux_profile_csv(aux: &AuxProfile) -> String {
    let mut out = String::from("x,d1,d2,phi,psi,h,d,s,mu,dtilde\n");
    for i in 0..aux.x.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt(aux.x[i]),
            fmt_opt(&aux.d1[i]),
            fmt_opt(&aux.d2[i]),
            fmt_opt(&aux.phi[i]),
            fmt_opt(&aux.psi[i]),
            fmt_opt(&aux.h[i]),
            fmt_opt(&aux.d[i]),
            fmt_opt(&aux.s[i]),
            fmt_opt(&aux.mu[i]),
            fmt_opt(&aux.dtilde[i]),
        );
    }
    out
}

/// CSV with columns `x,log_v,log_u,rho,rv_prime,ru_prime`.
pub fn fss_csv(fss: &FssProfile) -> String {
    let mut out = String::from("x,log_v,log_u,rho,rv_prime,ru_prime\n");
    for i in 0..fss.grid.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt(fss.grid[i]),
            fmt(fss.log_v[i]),
            fmt(fss.log_u[i]),
            fmt(fss.rho[i]),
            fmt(fss.rv_prime[i]),
            fmt(fss.ru_prime[i]),
        );
    }
    out
}

/// CSV of the covering segments.
pub fn covering_csv(cov: &Covering) -> String {
    let mut out = String::from("index,lo,hi,center,half_width\n");
    for (i, seg) in cov.segments.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            i,
            fmt(seg.lo),
            fmt(seg.hi),
            fmt(seg.center),
            fmt(seg.half_width),
        );
    }
    out
}

/// CSV of eigenvalues, largest first.
pub fn spectrum_csv(eigenvalues: &[f64]) -> String {
    let mut out = String::from("index,eigenvalue\n");
    for (i, v) in eigenvalues.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, fmt(*v));
    }
    out
}

/// Top-level analyze report: the criteria plus run metadata.
#[derive(Serialize)]
pub struct AnalyzeReport<'a> {
    pub kind: &'a str,
    pub window: Window,
    pub hypotheses: &'a HypothesisReport,
    pub criteria: &'a CriteriaReport,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report serialization");
    out.push('\n');
    out
}

/// Flattened per-sample view of the criteria maps.
pub fn criteria_samples_csv(
    aux: &AuxProfile,
    fss: Option<&FssProfile>,
    field: &crate::coeff::WeightField,
) -> String {
    let mut out = String::from("x,h_d,rho_s,steklov,a_tilde\n");
    for i in 0..aux.x.len() {
        let x = aux.x[i];
        let hd = match (aux.h[i], aux.d[i]) {
            (Some(h), Some(d)) => Some(h * d),
            _ => None,
        };
        let rho_s = match (fss, aux.s[i]) {
            (Some(f), Some(s)) => Some(f.rho_at(x) * s),
            _ => None,
        };
        let steklov = aux.d[i]
            .map(|d| (field.q_integral_left(x, d) + field.q_integral_right(x, d)) / (2.0 * d));
        let a_tilde = aux.mu[i]
            .map(|mu| (field.q_integral_left(x, mu) + field.q_integral_right(x, mu)) / (2.0 * mu));
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt(x),
            fmt_opt(&hd),
            fmt_opt(&rho_s),
            fmt_opt(&steklov),
            fmt_opt(&a_tilde),
        );
    }
    out
}
