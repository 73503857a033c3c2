use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use dqme_core::dqme::converged_dressed_currents;
use dqme_core::floquet::converged_floquet_currents;
use dqme_core::{CurrentReport, Method, ModelSpec};
use rayon::prelude::*;

use crate::config::{SweepConfig, SweepPoint};
use crate::error::CliError;

pub const CSV_HEADER: &str = "sweep_var,value,method,j_left,j_right,j_pump";

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub sweep_var: &'static str,
    pub value: f64,
    pub method: Method,
    pub j_left: f64,
    pub j_right: f64,
    pub j_pump: f64,
}

impl Row {
    fn new(sweep_var: &'static str, value: f64, r: &CurrentReport) -> Self {
        Self {
            sweep_var,
            value,
            method: r.method,
            j_left: r.j_left,
            j_right: r.j_right,
            j_pump: r.j_pump,
        }
    }
}

/// Evaluates every requested method at one point.
///
/// For the Kerr model the Fock truncation is first converged with the driven
/// dressed pipeline and the Floquet pipeline then reuses that truncation.
pub fn evaluate_point(cfg: &SweepConfig, point: &SweepPoint, methods: &[Method]) -> Result<Vec<Row>, CliError> {
    let variable = cfg.sweep.variable.name();
    let fail = |method, source| CliError::Numerical {
        variable,
        value: point.value,
        method,
        source,
    };
    let mut truncated: Option<(CurrentReport, ModelSpec)> = None;
    let driven = |truncated: &mut Option<(CurrentReport, ModelSpec)>| -> Result<(CurrentReport, ModelSpec), CliError> {
        if truncated.is_none() {
            let r = converged_dressed_currents(&point.model, &point.drive, &cfg.reservoirs, Method::Driven)
                .map_err(|e| fail(Method::Driven, e))?;
            *truncated = Some(r);
        }
        Ok(truncated.unwrap())
    };
    let mut rows = Vec::with_capacity(methods.len());
    for &method in methods {
        let report = match method {
            Method::Driven => driven(&mut truncated)?.0,
            Method::Traditional => {
                converged_dressed_currents(&point.model, &point.drive, &cfg.reservoirs, method)
                    .map_err(|e| fail(method, e))?
                    .0
            }
            Method::Floquet => {
                let model = driven(&mut truncated)?.1;
                converged_floquet_currents(&model, &point.drive, &cfg.reservoirs, &cfg.floquet)
                    .map_err(|e| fail(method, e))?
                    .report
            }
        };
        rows.push(Row::new(variable, point.value, &report));
    }
    Ok(rows)
}

/// Runs the sweep with the config's own method list.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<Row>, CliError> {
    run_sweep_with(cfg, &cfg.methods)
}

/// Points are evaluated in parallel; rows come back sorted by value, then method.
pub fn run_sweep_with(cfg: &SweepConfig, methods: &[Method]) -> Result<Vec<Row>, CliError> {
    let per_point: Vec<Vec<Row>> = cfg
        .points()
        .par_iter()
        .map(|p| evaluate_point(cfg, p, methods))
        .collect::<Result<_, _>>()?;
    let mut rows: Vec<Row> = per_point.into_iter().flatten().collect();
    rows.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.method.cmp(&b.method)));
    Ok(rows)
}

/// CSV text with 17 significant digits per number. Adding `0.0` turns a
/// negative zero into a plain one.
pub fn format_csv(rows: &[Row]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{:.16e},{},{:.16e},{:.16e},{:.16e}",
            r.sweep_var,
            r.value + 0.0,
            r.method,
            r.j_left + 0.0,
            r.j_right + 0.0,
            r.j_pump + 0.0
        )
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn emit_csv(rows: &[Row], path: &Path) -> Result<(), CliError> {
    if rows.is_empty() {
        return Err(CliError::Config("no rows to write".into()));
    }
    fs::write(path, format_csv(rows)).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
