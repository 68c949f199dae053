//! Canonical text rendering. Printing is injective on canonical forms and
//! round-trips through the parser.

use crate::algebra::{DiffKey, DiffPoly};
use crate::context::Chart;
use crate::lambda::{LambdaMuPoly, LambdaPoly};
use crate::param::{format_rat, ParamPoly};
use num::{One, Signed};

fn jet_suffix(order: u32) -> String {
    match order {
        0 => String::new(),
        1..=3 => "'".repeat(order as usize),
        k => format!("^({k})"),
    }
}

fn key_factors(key: &DiffKey, chart: &Chart) -> Vec<String> {
    let mut out = Vec::new();
    for &((f, s), e) in &key.even {
        let mut t = format!("{}{}", chart.fields[f], jet_suffix(s));
        if e != 1 {
            t.push_str(&format!("^{e}"));
        }
        out.push(t);
    }
    for &(f, s) in &key.odd {
        out.push(format!("{}{}", chart.thetas[f], jet_suffix(s)));
    }
    out
}

/// One rendered term: (is_negative, body-without-sign).
fn render_term(key: &DiffKey, coeff: &ParamPoly, chart: &Chart, params: &[String]) -> (bool, String) {
    let factors = key_factors(key, chart);
    let single = coeff.terms().count() == 1;
    if single {
        let (exps, r) = coeff.terms().next().unwrap();
        let mut parts: Vec<String> = Vec::new();
        let abs = r.abs();
        let mut pfac: Vec<String> = Vec::new();
        for (j, &k) in exps.iter().enumerate() {
            if k == 1 {
                pfac.push(params[j].clone());
            } else if k > 1 {
                pfac.push(format!("{}^{}", params[j], k));
            }
        }
        if !abs.is_one() || (pfac.is_empty() && factors.is_empty()) {
            parts.push(format_rat(&abs));
        }
        parts.extend(pfac);
        parts.extend(factors);
        (r.is_negative(), parts.join("*"))
    } else {
        let inner = coeff.render(params);
        let mut parts = vec![format!("({inner})")];
        parts.extend(factors);
        (false, parts.join("*"))
    }
}

fn join_terms(terms: Vec<(bool, String)>) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (neg, body)) in terms.into_iter().enumerate() {
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&body);
    }
    out
}

pub fn render_diff_poly(p: &DiffPoly) -> String {
    let chart = p.ctx().chart(p.chart());
    let params = &p.ctx().params;
    join_terms(
        p.terms()
            .map(|(k, c)| render_term(k, c, chart, params))
            .collect(),
    )
}

fn lambda_factor(sym: &str, k: u32) -> Option<String> {
    match k {
        0 => None,
        1 => Some(sym.to_string()),
        k => Some(format!("{sym}^{k}")),
    }
}

pub fn render_lambda_poly_with(p: &LambdaPoly, sym: &str) -> String {
    let mut terms: Vec<(bool, String)> = Vec::new();
    for (&k, coeff) in p.coeffs() {
        let chart = coeff.ctx().chart(coeff.chart());
        let params = &coeff.ctx().params;
        let lam = lambda_factor(sym, k);
        if coeff.n_terms() == 1 {
            let (key, c) = coeff.terms().next().unwrap();
            let (neg, mut body) = render_term(key, c, chart, params);
            if let Some(l) = lam {
                if body == "1" {
                    body = l;
                } else {
                    body = format!("{body}*{l}");
                }
            }
            terms.push((neg, body));
        } else {
            let inner = render_diff_poly(coeff);
            let body = match lam {
                None => format!("({inner})"),
                Some(l) => format!("({inner})*{l}"),
            };
            terms.push((false, body));
        }
    }
    join_terms(terms)
}

pub fn render_lambda_poly(p: &LambdaPoly) -> String {
    render_lambda_poly_with(p, "L")
}

pub fn render_lambda_mu_poly(p: &LambdaMuPoly) -> String {
    let mut terms: Vec<(bool, String)> = Vec::new();
    for (&(k, m), coeff) in p.coeffs() {
        let chart = coeff.ctx().chart(coeff.chart());
        let params = &coeff.ctx().params;
        let suffix: Vec<String> = [lambda_factor("L", k), lambda_factor("M", m)]
            .into_iter()
            .flatten()
            .collect();
        if coeff.n_terms() == 1 {
            let (key, c) = coeff.terms().next().unwrap();
            let (neg, mut body) = render_term(key, c, chart, params);
            if !suffix.is_empty() {
                if body == "1" {
                    body = suffix.join("*");
                } else {
                    body = format!("{body}*{}", suffix.join("*"));
                }
            }
            terms.push((neg, body));
        } else {
            let inner = render_diff_poly(coeff);
            let body = if suffix.is_empty() {
                format!("({inner})")
            } else {
                format!("({inner})*{}", suffix.join("*"))
            };
            terms.push((false, body));
        }
    }
    join_terms(terms)
}
