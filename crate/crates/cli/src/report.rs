//! JSON and CSV report shapes. Complex numbers serialize as `{re, im}` and
//! non-finite floats as `null`.

use serde::Serialize;
use std::path::Path;
use vertex_core::verify::{Bound, Check, Tolerances};
use vertex_core::{ChainParams, C};

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl From<C> for Complex {
    fn from(z: C) -> Self {
        Self { re: z.re, im: z.im }
    }
}

pub fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Serialize)]
pub struct Params {
    pub n: usize,
    pub case: Option<usize>,
    pub xi: Vec<Complex>,
    pub eta: Complex,
    pub nome: Complex,
    pub omega: Complex,
    pub generic_margin: Option<f64>,
}

impl Params {
    pub fn new(p: &ChainParams, case: Option<usize>) -> Self {
        Self {
            n: p.n,
            case,
            xi: p.xi.iter().map(|&z| z.into()).collect(),
            eta: p.eta.into(),
            nome: p.ctx.nome().into(),
            omega: p.ctx.omega.into(),
            generic_margin: finite(p.generic_margin()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TolerancesOut {
    pub residual: f64,
    pub set: f64,
    pub scalar: f64,
    pub lift: f64,
    pub appendix: f64,
}

impl TolerancesOut {
    pub fn new(t: &Tolerances, appendix: f64) -> Self {
        Self { residual: t.residual, set: t.set, scalar: t.scalar, lift: t.lift, appendix }
    }
}

#[derive(Debug, Serialize)]
pub struct Meta {
    pub command: &'static str,
    pub params: Option<Params>,
    pub tolerances: TolerancesOut,
    pub seed: u64,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct CheckOut {
    pub suite: &'static str,
    pub name: String,
    pub value: Option<f64>,
    pub bound: &'static str,
    pub threshold: Option<f64>,
    pub passed: bool,
}

impl From<&Check> for CheckOut {
    fn from(c: &Check) -> Self {
        let (bound, threshold) = match c.bound {
            Bound::Below(x) => ("below", Some(x)),
            Bound::Above(x) => ("above", Some(x)),
            Bound::Equals(x) => ("equals", Some(x)),
            Bound::Report => ("report", None),
        };
        Self { suite: c.suite, name: c.name.clone(), value: finite(c.value), bound, threshold, passed: c.passed }
    }
}

#[derive(Debug, Serialize)]
pub struct Report<R: Serialize> {
    pub meta: Meta,
    pub records: Vec<R>,
    pub checks: Vec<CheckOut>,
}

impl<R: Serialize> Report<R> {
    pub fn write_json(&self, path: &Path) -> Result<(), String> {
        let text = serde_json::to_string_pretty(self).map_err(|e| e.to_string())?;
        std::fs::write(path, text + "\n").map_err(|e| format!("cannot write {}: {e}", path.display()))
    }
}

#[derive(Debug, Serialize)]
pub struct SpectrumOut {
    pub model: &'static str,
    pub index: usize,
    pub t_at_xi: Vec<Complex>,
    pub multiplicity: usize,
    pub source: &'static str,
    pub functional_residual: Option<f64>,
    pub eigen_residual: Option<f64>,
    /// Record of the same model whose tuple is the negative of this one.
    pub sign_partner: Option<usize>,
    /// 8-vertex records: nearest dynamical 6-vertex record and its distance.
    pub nearest_six: Option<usize>,
    pub inclusion_distance: Option<f64>,
    /// Dynamical 6-vertex records, when both models run: lift outcome.
    pub lifted: Option<bool>,
    pub lift_residual: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct AppendixRow {
    pub case: usize,
    pub table: &'static str,
    pub row: usize,
    pub eta: f64,
    pub printed_eta: f64,
    pub published: [f64; 3],
    pub computed: [f64; 3],
    pub deviations: [f64; 3],
    pub max_deviation: Option<f64>,
    pub typo_cells: Vec<usize>,
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

fn write_csv(path: &Path, header: Vec<String>, rows: Vec<Vec<String>>) -> Result<(), String> {
    let fail = |e: csv::Error| format!("cannot write {}: {e}", path.display());
    let mut w = csv::Writer::from_path(path).map_err(fail)?;
    w.write_record(&header).map_err(fail)?;
    for r in rows {
        w.write_record(&r).map_err(fail)?;
    }
    w.flush().map_err(|e| format!("cannot write {}: {e}", path.display()))
}

pub fn checks_csv(path: &Path, checks: &[CheckOut]) -> Result<(), String> {
    let header = ["suite", "name", "value", "bound", "threshold", "passed"].map(String::from).to_vec();
    let rows = checks
        .iter()
        .map(|c| {
            vec![
                c.suite.to_string(),
                c.name.clone(),
                opt(c.value),
                c.bound.to_string(),
                opt(c.threshold),
                c.passed.to_string(),
            ]
        })
        .collect();
    write_csv(path, header, rows)
}

/// One row per record with `t(ξ_a)` flattened into `t{a}_re, t{a}_im`.
pub fn spectrum_csv(path: &Path, records: &[SpectrumOut]) -> Result<(), String> {
    let n = records.first().map_or(0, |r| r.t_at_xi.len());
    let mut header: Vec<String> = [
        "model",
        "index",
        "multiplicity",
        "source",
        "functional_residual",
        "eigen_residual",
        "sign_partner",
        "nearest_six",
        "inclusion_distance",
        "lifted",
        "lift_residual",
    ]
    .map(String::from)
    .to_vec();
    for a in 1..=n {
        header.push(format!("t{a}_re"));
        header.push(format!("t{a}_im"));
    }
    let idx = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
    let rows = records
        .iter()
        .map(|r| {
            let mut row = vec![
                r.model.to_string(),
                r.index.to_string(),
                r.multiplicity.to_string(),
                r.source.to_string(),
                opt(r.functional_residual),
                opt(r.eigen_residual),
                idx(r.sign_partner),
                idx(r.nearest_six),
                opt(r.inclusion_distance),
                r.lifted.map(|b| b.to_string()).unwrap_or_default(),
                opt(r.lift_residual),
            ];
            for z in &r.t_at_xi {
                row.push(format!("{:e}", z.re));
                row.push(format!("{:e}", z.im));
            }
            row
        })
        .collect();
    write_csv(path, header, rows)
}

pub fn appendix_csv(path: &Path, rows: &[AppendixRow]) -> Result<(), String> {
    let mut header = ["case", "table", "row", "eta", "printed_eta"].map(String::from).to_vec();
    for k in 1..=3 {
        header.push(format!("published{k}"));
    }
    for k in 1..=3 {
        header.push(format!("computed{k}"));
    }
    header.push("max_deviation".into());
    header.push("typo_cells".into());
    let out = rows
        .iter()
        .map(|r| {
            let mut row = vec![
                r.case.to_string(),
                r.table.to_string(),
                r.row.to_string(),
                r.eta.to_string(),
                r.printed_eta.to_string(),
            ];
            row.extend(r.published.iter().map(|v| format!("{v:e}")));
            row.extend(r.computed.iter().map(|v| format!("{v:e}")));
            row.push(opt(r.max_deviation));
            row.push(r.typo_cells.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";"));
            row
        })
        .collect();
    write_csv(path, header, out)
}
