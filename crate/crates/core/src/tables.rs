//! CSV and JSON emitters for sweep tables.
//!
//! CSV output is plain text with a fixed column order and fixed float
//! formatting, so identical inputs produce identical bytes. JSON documents
//! carry a top-level `schema` version.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::simulability::{
    caratheodory_bound, classify, lhv_count_continuous, HiddenVariableCount, ResourceEstimate, ResourceFamily,
    SimulabilityReport, SimulatingSpin, StaircaseRow,
};

pub const SCHEMA_VERSION: u32 = 1;

pub const CLASSIFICATION_HEADER: &str = "alpha,s_min_twice,region,n_h";
pub const WITNESS_HEADER: &str = "family,s_twice,theta,theta_p,mu,lambda_minus";
pub const RESOURCES_ALPHA_HEADER: &str = "alpha,s_min_twice,n_h,n_h_continuous";
pub const RESOURCES_EPSILON_HEADER: &str = "family,theta,theta_p,mu,epsilon,effective_epsilon,n_h_epsilon,note";

fn alpha_str(alpha: f64) -> String {
    format!("{alpha:.12}")
}

fn num(x: f64) -> String {
    if x.is_infinite() {
        "inf".to_string()
    } else {
        format!("{x:e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn with_header(header: &str, lines: impl Iterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn classification_line(r: &SimulabilityReport) -> String {
    format!("{},{},{},{}", alpha_str(r.alpha), r.s_min.twice_label(), r.region, r.n_h.label())
}

pub fn classification_csv(reports: &[SimulabilityReport]) -> String {
    with_header(CLASSIFICATION_HEADER, reports.iter().map(classification_line))
}

pub fn classification_json(reports: &[SimulabilityReport]) -> Value {
    let rows: Vec<Value> = reports.iter().map(report_json).collect();
    json!({ "schema": SCHEMA_VERSION, "rows": rows })
}

fn report_json(r: &SimulabilityReport) -> Value {
    json!({
        "alpha": r.alpha,
        "s_min_twice": r.s_min.finite().map(|s| s.twice()),
        "region": r.region,
        "n_h": r.n_h.finite(),
    })
}

fn staircase_reports(rows: &[StaircaseRow]) -> Result<Vec<SimulabilityReport>> {
    rows.iter()
        .map(|row| {
            let mut r = classify(row.alpha)?;
            // jump rows carry the exact spin rather than the float reconstruction
            r.s_min = SimulatingSpin::Finite(row.s_min);
            r.n_h = HiddenVariableCount::Finite(caratheodory_bound(2, row.s_min.dim()));
            Ok(r)
        })
        .collect()
}

pub fn staircase_csv(rows: &[StaircaseRow]) -> Result<String> {
    Ok(classification_csv(&staircase_reports(rows)?))
}

/// Same columns as the CSV plus `jump`, the exact fraction `-S/(S+1)` for
/// rows sitting on a jump point and `null` otherwise.
pub fn staircase_json(rows: &[StaircaseRow]) -> Result<Value> {
    let reports = staircase_reports(rows)?;
    let out: Vec<Value> = rows
        .iter()
        .zip(&reports)
        .map(|(row, r)| {
            let mut v = report_json(r);
            v["jump"] = row.jump.map(|j| Value::String(j.to_string())).unwrap_or(Value::Null);
            v
        })
        .collect();
    Ok(json!({ "schema": SCHEMA_VERSION, "rows": out }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessRow {
    pub family: &'static str,
    pub s_twice: u32,
    pub theta: f64,
    pub theta_p: Option<f64>,
    pub mu: Option<f64>,
    pub lambda_minus: f64,
}

pub fn witness_csv(rows: &[WitnessRow]) -> String {
    with_header(
        WITNESS_HEADER,
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{},{}",
                r.family,
                r.s_twice,
                num(r.theta),
                opt(r.theta_p),
                opt(r.mu),
                num(r.lambda_minus)
            )
        }),
    )
}

pub fn witness_json(rows: &[WitnessRow]) -> Value {
    json!({ "schema": SCHEMA_VERSION, "rows": rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaResourceRow {
    pub alpha: f64,
    pub s_min_twice: Option<u32>,
    pub n_h: Option<u64>,
    pub n_h_continuous: f64,
}

impl AlphaResourceRow {
    pub fn new(alpha: f64) -> Result<Self> {
        let r = classify(alpha)?;
        Ok(Self {
            alpha,
            s_min_twice: r.s_min.finite().map(|s| s.twice()),
            n_h: r.n_h.finite(),
            n_h_continuous: lhv_count_continuous(alpha)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonResourceRow {
    pub family: ResourceFamily,
    pub estimate: Option<ResourceEstimate>,
    pub epsilon: f64,
    pub note: String,
}

fn family_params(f: &ResourceFamily) -> (Option<f64>, Option<f64>, Option<f64>) {
    match *f {
        ResourceFamily::Bell => (None, None, None),
        ResourceFamily::Pure { theta } => (Some(theta), None, None),
        ResourceFamily::RankTwo { mu, theta, theta_p } => (Some(theta), Some(theta_p), Some(mu)),
    }
}

/// Two sections separated by a blank line: `N_h(alpha)` then `N_h(epsilon)`.
pub fn resources_csv(alpha_rows: &[AlphaResourceRow], eps_rows: &[EpsilonResourceRow]) -> String {
    let a = with_header(
        RESOURCES_ALPHA_HEADER,
        alpha_rows.iter().map(|r| {
            format!(
                "{},{},{},{}",
                alpha_str(r.alpha),
                r.s_min_twice.map_or("inf".to_string(), |t| t.to_string()),
                r.n_h.map_or("inf".to_string(), |n| n.to_string()),
                num(r.n_h_continuous)
            )
        }),
    );
    let e = with_header(
        RESOURCES_EPSILON_HEADER,
        eps_rows.iter().map(|r| {
            let (theta, theta_p, mu) = family_params(&r.family);
            format!(
                "{},{},{},{},{},{},{},{}",
                r.family.name(),
                opt(theta),
                opt(theta_p),
                opt(mu),
                num(r.epsilon),
                opt(r.estimate.map(|e| e.effective_epsilon)),
                opt(r.estimate.map(|e| e.n_h_epsilon)),
                r.note
            )
        }),
    );
    format!("{a}\n{e}")
}

pub fn resources_json(alpha_rows: &[AlphaResourceRow], eps_rows: &[EpsilonResourceRow]) -> Value {
    json!({ "schema": SCHEMA_VERSION, "alpha": alpha_rows, "epsilon": eps_rows })
}
