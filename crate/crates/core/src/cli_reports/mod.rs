//! Command adapters, run configuration and report formatting.
//!
//! Every command is a thin wrapper over library calls that returns either
//! a JSON value or CSV text; the binary only parses arguments and writes
//! the result.

mod verify;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::flat_core::{build_double_ngon, build_staircase, check_n, cylinder_decomposition, Model, SurfaceTemplate, V2};
use crate::hecke_hyperbolic::{reduce_to_fundamental_domain, HeckeGroup, UHPoint};
use crate::homology_pairing::{algebraic_intersection, edge_intersection_matrix, geometric_signed_crossings};
use crate::kvol_engine::{kvol_closed_form, kvol_closed_form_extended, kvol_empirical, scan_disc, Grid, ScanResult};
use crate::saddle_scan::{all_diagrams, enumerate_saddle_connections};

pub use verify::{cmd_verify, Criterion, VerifyReport};

pub const SCHEMA: &str = "kvol-report/1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Standard,
    /// Closed-form references in double-double arithmetic.
    Extended,
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Precision::Standard),
            "extended" => Ok(Precision::Extended),
            _ => Err(Error::Config(format!("unknown precision {s:?}, expected standard or extended"))),
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::Standard => "standard",
            Precision::Extended => "extended",
        })
    }
}

/// Parses the template names accepted on the command line.
pub fn parse_model(s: &str) -> Result<Model> {
    match s {
        "double" => Ok(Model::Double),
        "staircase" => Ok(Model::Staircase),
        _ => Err(Error::Config(format!("unknown model {s:?}, expected double or staircase"))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub model: Model,
    pub lmax: f64,
    pub grid: Grid,
    pub precision: Precision,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 5,
            model: Model::Double,
            lmax: 2.2,
            grid: Grid { nx: 20, ny: 20, y_max: 3.0 },
            precision: Precision::Standard,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        check_n(self.n).map_err(|_| Error::Config(format!("n must be odd and at least 5, got {}", self.n)))?;
        if self.model == Model::Fixture {
            return Err(Error::Config("model must be double or staircase".into()));
        }
        if !(self.lmax > 0.0 && self.lmax.is_finite()) {
            return Err(Error::Config(format!("lmax must be positive, got {}", self.lmax)));
        }
        if self.grid.nx < 2 || self.grid.ny < 2 {
            return Err(Error::Config(format!("grid needs nx, ny >= 2, got {}x{}", self.grid.nx, self.grid.ny)));
        }
        Ok(())
    }

    pub fn template(&self) -> Result<SurfaceTemplate> {
        match self.model {
            Model::Staircase => build_staircase(self.n),
            _ => build_double_ngon(self.n),
        }
    }
}

/// `x` rounded to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(num) if num.is_f64() => json!(round15(num.as_f64().expect("f64 number"))),
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        v => v,
    }
}

/// Pretty JSON with the schema tag first and floats at 15 significant digits.
pub fn to_json<T: Serialize>(body: &T) -> Result<String> {
    let mut out = serde_json::Map::new();
    out.insert("schema".into(), json!(SCHEMA));
    match serde_json::to_value(body)? {
        Value::Object(o) => out.extend(o),
        v => {
            out.insert("data".into(), v);
        }
    }
    Ok(serde_json::to_string_pretty(&round_value(Value::Object(out)))? + "\n")
}

fn csv_text(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn num(x: f64) -> String {
    let r = round15(x);
    if r != 0.0 && (r.abs() < 1e-5 || r.abs() >= 1e16) {
        format!("{r:e}")
    } else {
        r.to_string()
    }
}

/// Closed-form KVol at the configured precision.
pub fn closed_form(n: usize, x: &UHPoint, p: Precision) -> f64 {
    match p {
        Precision::Standard => kvol_closed_form(n, x),
        Precision::Extended => kvol_closed_form_extended(n, x),
    }
}

/// Reference constants at the configured precision.
pub(crate) struct Refs(pub Precision);

impl Refs {
    fn eval(&self, n: usize, f64_form: impl Fn(f64) -> f64, ext_form: impl Fn(TwoFloat) -> TwoFloat) -> f64 {
        match self.0 {
            Precision::Standard => f64_form(std::f64::consts::PI / n as f64),
            Precision::Extended => f64::from(ext_form(twofloat::consts::PI / TwoFloat::from(n as f64))),
        }
    }

    pub fn staircase_area(&self, n: usize) -> f64 {
        let h = n as f64 / 2.0;
        self.eval(n, |a| h * a.cos(), |a| a.cos() * h)
    }

    pub fn staircase_modulus(&self, n: usize) -> f64 {
        self.eval(n, |a| 1.0 / (2.0 * a.cos()), |a| TwoFloat::from(1.0) / (a.cos() * 2.0))
    }

    pub fn k_coordinate(&self, n: usize) -> f64 {
        self.eval(n, |a| 1.0 / a.sin().powi(2), |a| TwoFloat::from(1.0) / (a.sin() * a.sin()))
    }

    pub fn phi(&self, n: usize) -> f64 {
        self.eval(n, |a| 2.0 * a.cos(), |a| a.cos() * 2.0)
    }

    pub fn kvol_at_x0(&self, n: usize) -> f64 {
        let h = n as f64 / 2.0;
        self.eval(n, |a| h / a.tan(), |a| a.cos() / a.sin() * h)
    }

    pub fn closed_form(&self, n: usize, x: &UHPoint) -> f64 {
        closed_form(n, x, self.0)
    }
}

#[derive(Serialize)]
struct EdgeRow {
    label: String,
    orient: i8,
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct CylinderRow {
    width: f64,
    height: f64,
    modulus: f64,
}

/// Template summary: area, cone angle, edges and horizontal cylinders.
pub fn cmd_ngon(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let s = cfg.template()?;
    let edges: Vec<EdgeRow> = (0..s.edge_count())
        .map(|e| EdgeRow { label: s.label(e).to_string(), orient: s.edge_labels[e].orient, x: s.edge_vec(e).x, y: s.edge_vec(e).y })
        .collect();
    let cylinders: Vec<CylinderRow> = cylinder_decomposition(&s, &V2::new(1.0, 0.0))?
        .iter()
        .map(|c| CylinderRow { width: c.width, height: c.height, modulus: c.modulus() })
        .collect();
    to_json(&json!({
        "n": s.n,
        "model": s.model,
        "area": s.area(),
        "cone_angle": s.cone_angle(),
        "polygons": s.polygons.len(),
        "edges": edges,
        "horizontal_cylinders": cylinders,
    }))
}

/// Saddle connections up to `lmax` as CSV.
pub fn cmd_enumerate(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let s = cfg.template()?;
    let scs = enumerate_saddle_connections(&s, cfg.lmax)?;
    csv_text(
        &["hol_x", "hol_y", "length", "angle", "crossings", "homology"],
        scs.iter().map(|sc| {
            vec![
                num(sc.holonomy.x),
                num(sc.holonomy.y),
                num(sc.length),
                num(sc.angle()),
                sc.crossing_string(&s),
                sc.homology.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(";"),
            ]
        }),
    )
}

#[derive(Serialize)]
struct Mismatch {
    alpha: usize,
    beta: usize,
    homological: i64,
    geometric: Option<i64>,
    error: Option<String>,
}

/// Pairwise intersection summary, optionally checked against the
/// geometric crossing count.
pub fn cmd_pairing(cfg: &RunConfig, check_oracle: bool) -> Result<String> {
    cfg.validate()?;
    let s = cfg.template()?;
    let b = edge_intersection_matrix(&s)?;
    let scs = enumerate_saddle_connections(&s, cfg.lmax)?;
    let mut max_abs = 0;
    let mut mismatches = Vec::new();
    for (i, a) in scs.iter().enumerate() {
        for (j, c) in scs.iter().enumerate() {
            let h = algebraic_intersection(&a.homology, &c.homology, &b)?;
            max_abs = max_abs.max(h.abs());
            if check_oracle {
                match geometric_signed_crossings(a, c, &s) {
                    Ok(g) if g == h => {}
                    Ok(g) => mismatches.push(Mismatch { alpha: i, beta: j, homological: h, geometric: Some(g), error: None }),
                    Err(e) => mismatches.push(Mismatch { alpha: i, beta: j, homological: h, geometric: None, error: Some(e.to_string()) }),
                }
            }
        }
    }
    to_json(&json!({
        "n": s.n,
        "model": s.model,
        "lmax": cfg.lmax,
        "connections": scs.len(),
        "pairs": scs.len() * scs.len(),
        "oracle_checked": check_oracle,
        "mismatches": mismatches,
        "max_abs_int": max_abs,
        "intersection_matrix": b,
    }))
}

/// Parses `a+bi` style complex numbers into a point of the upper half-plane.
pub fn parse_point(z: &str) -> Result<UHPoint> {
    let c = Complex64::from_str(&z.replace(' ', "")).map_err(|_| Error::Config(format!("cannot parse {z:?} as a complex number")))?;
    UHPoint::new(c.re, c.im)
}

pub fn cmd_hyp_reduce(n: usize, z: &str) -> Result<String> {
    let g = HeckeGroup::new(n).map_err(|_| Error::Config(format!("n must be odd and at least 5, got {n}")))?;
    let p = parse_point(z)?;
    let (r, w) = reduce_to_fundamental_domain(&p, &g)?;
    to_json(&json!({
        "n": n,
        "input": p,
        "reduced": r,
        "word": w.to_string(),
    }))
}

pub fn cmd_kvol_closed(cfg: &RunConfig, x: &UHPoint) -> Result<String> {
    cfg.validate()?;
    to_json(&json!({
        "n": cfg.n,
        "point": x,
        "precision": cfg.precision,
        "closed_form": closed_form(cfg.n, x, cfg.precision),
    }))
}

/// Empirical KVol at `x`, after moving `x` into the fundamental domain.
pub fn cmd_kvol_empirical(cfg: &RunConfig, x: &UHPoint) -> Result<String> {
    cfg.validate()?;
    let (r, w) = reduce_to_fundamental_domain(x, &HeckeGroup::new(cfg.n)?)?;
    let mut report = kvol_empirical(cfg.n, &r, cfg.lmax)?;
    report.closed_form = closed_form(cfg.n, &r, cfg.precision);
    report.gap = report.closed_form - report.empirical;
    to_json(&json!({
        "input": x,
        "reduction_word": w.to_string(),
        "precision": cfg.precision,
        "report": report,
    }))
}

pub struct ScanOutput {
    pub result: ScanResult,
    pub csv: String,
    pub summary: String,
}

/// Disc scan as CSV rows plus a JSON summary of the extremal cells.
pub fn cmd_scan(cfg: &RunConfig) -> Result<ScanOutput> {
    cfg.validate()?;
    let mut result = scan_disc(cfg.n, cfg.grid, cfg.lmax)?;
    for c in &mut result.cells {
        c.closed_form = closed_form(cfg.n, &c.point, cfg.precision);
        c.gap = c.closed_form - c.empirical;
    }
    let csv = csv_text(
        &["x", "y", "closed_form", "empirical", "gap", "pair_alpha_id", "pair_beta_id"],
        result.cells.iter().map(|c| {
            vec![
                num(c.point.x),
                num(c.point.y),
                num(c.closed_form),
                num(c.empirical),
                num(c.gap),
                c.attaining_pair.alpha.id.to_string(),
                c.attaining_pair.beta.id.to_string(),
            ]
        }),
    )?;
    let point = |i: &usize| result.cells[*i].point;
    let summary = to_json(&json!({
        "n": cfg.n,
        "grid": cfg.grid,
        "lmax": cfg.lmax,
        "precision": cfg.precision,
        "cells": result.cells.len(),
        "argmin": result.argmin.iter().map(point).collect::<Vec<_>>(),
        "argmax": result.argmax.iter().map(point).collect::<Vec<_>>(),
        "min_empirical": result.argmin.first().map(|&i| result.cells[i].empirical),
        "max_empirical": result.argmax.first().map(|&i| result.cells[i].empirical),
        "max_relative_gap": result.cells.iter().map(|c| c.gap / c.closed_form).fold(f64::NEG_INFINITY, f64::max),
    }))?;
    Ok(ScanOutput { result, csv, summary })
}

/// All transition diagrams, one sector per line.
pub fn cmd_diagrams(n: usize) -> Result<String> {
    check_n(n).map_err(|_| Error::Config(format!("n must be odd and at least 5, got {n}")))?;
    let mut out = String::new();
    for d in all_diagrams(n)? {
        let row: Vec<String> = d.order.iter().map(|k| format!("e{k}")).collect();
        out.push_str(&format!("Σ{} : {}\n", d.sector, row.join(" ⇋ ")));
    }
    Ok(out)
}
