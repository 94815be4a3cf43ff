//! Temperature sweeps and table output behind the command-line tool.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::atomdata::{self, load_atom, AtomSpecies};
use crate::dielectric::{self, load_material, DielectricModel, SurfaceResponse};
use crate::error::{Error, Result};
use crate::friction::{
    attenuation_time, eta_bb, eta_bb_asymptotic, eta_qf, eta_qf_asymptotic, gamma0, Evaluation,
};
use crate::polarizability::{im_alpha_oneloop, resonant_lines};
use crate::units::CONSTANTS_VERSION;

/// Environment variable naming the default dataset directory.
pub const DATA_DIR_ENV: &str = "THERMOFRICTION_DATA_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Bb,
    Qf,
    Gamma0,
    ImAlpha,
    CompareBb,
    CompareQf,
}

impl Command {
    fn needs_material(self) -> bool {
        matches!(self, Command::Qf | Command::Gamma0 | Command::CompareQf)
    }

    fn needs_distance(self) -> bool {
        matches!(self, Command::Qf | Command::CompareQf)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    pub command: Command,
    pub atom: String,
    pub material: Option<String>,
    /// Sweep bounds: kelvin, or hartree for `im-alpha`.
    pub lower: f64,
    pub upper: f64,
    pub points: usize,
    pub spacing: Spacing,
    /// Metres.
    pub distance: Option<f64>,
    #[serde(skip)]
    pub evaluation: Evaluation,
    #[serde(skip)]
    pub data_dir: Option<PathBuf>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let axis = if self.command == Command::ImAlpha { "omega" } else { "t" };
        if !(self.lower > 0.0) || !self.lower.is_finite() {
            return Err(Error::validation(format!("{axis}-min"), format!("must be positive, got {}", self.lower)));
        }
        if !self.upper.is_finite() {
            return Err(Error::validation(format!("{axis}-max"), "must be finite"));
        }
        match self.points {
            0 => return Err(Error::validation("points", "must be at least 1")),
            1 if self.lower != self.upper => {
                return Err(Error::validation("points", "a range needs at least 2 points"))
            }
            1 => {}
            _ if !(self.lower < self.upper) => {
                return Err(Error::validation(
                    format!("{axis}-max"),
                    format!("must exceed {axis}-min ({} >= {})", self.lower, self.upper),
                ))
            }
            _ => {}
        }
        if self.command.needs_material() && self.material.is_none() {
            return Err(Error::validation("material", "required for this command"));
        }
        if self.command.needs_distance() {
            match self.distance {
                Some(z) if z > 0.0 && z.is_finite() => {}
                Some(z) => return Err(Error::validation("distance", format!("must be positive, got {z}"))),
                None => return Err(Error::validation("distance", "required for this command")),
            }
        }
        self.evaluation.quadrature.validate()
    }

    /// Sweep abscissae in increasing order.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        if n == 1 {
            return vec![self.lower];
        }
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.lower + t * (self.upper - self.lower),
                    Spacing::Log => (self.lower.ln() + t * (self.upper / self.lower).ln()).exp(),
                }
            })
            .enumerate()
            .map(|(i, v)| match i {
                0 => self.lower,
                _ if i == n - 1 => self.upper,
                _ => v,
            })
            .collect()
    }
}

/// A dataset together with where it came from and its content hash.
#[derive(Debug, Clone, Serialize)]
pub struct Dataset {
    pub role: &'static str,
    pub name: String,
    pub origin: String,
    pub sha256: String,
    #[serde(skip)]
    pub text: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Resolves `spec` as a file path, then as `<data_dir>/<sub>/<spec>.toml`,
/// then as a bundled dataset name.
fn resolve(
    role: &'static str,
    spec: &str,
    data_dir: Option<&Path>,
    sub: &str,
    bundled: fn(&str) -> Option<&'static str>,
) -> Result<Dataset> {
    let read = |path: &Path| -> Result<Dataset> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Dataset {
            role,
            name: spec.to_string(),
            origin: path.display().to_string(),
            sha256: sha256_hex(text.as_bytes()),
            text,
        })
    };
    let direct = Path::new(spec);
    if direct.is_file() {
        return read(direct);
    }
    if let Some(dir) = data_dir {
        for candidate in [dir.join(sub).join(format!("{spec}.toml")), dir.join(format!("{spec}.toml"))] {
            if candidate.is_file() {
                return read(&candidate);
            }
        }
    }
    match bundled(spec) {
        Some(text) => Ok(Dataset {
            role,
            name: spec.to_string(),
            origin: "bundled".to_string(),
            sha256: sha256_hex(text.as_bytes()),
            text: text.to_string(),
        }),
        None => Err(Error::validation(role, format!("no dataset file or bundled entry named `{spec}`"))),
    }
}

pub fn resolve_atom(spec: &str, data_dir: Option<&Path>) -> Result<(AtomSpecies, Dataset)> {
    let ds = resolve("atom", spec, data_dir, "atoms", atomdata::bundled::source)?;
    Ok((load_atom(&ds.text)?, ds))
}

pub fn resolve_material(spec: &str, data_dir: Option<&Path>) -> Result<(DielectricModel, Dataset)> {
    let ds = resolve("material", spec, data_dir, "materials", dielectric::bundled::source)?;
    Ok((load_material(&ds.text)?, ds))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    /// Nine significant digits in scientific notation.
    pub fn render(&self) -> String {
        match self {
            Cell::Num(v) if v.is_nan() => "nan".to_string(),
            Cell::Num(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.to_string(),
            Cell::Num(v) => format!("{v:.8e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(self.render().parse::<f64>().expect("formatted float")),
            _ => Value::String(self.render()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| *c == name)?;
        self.rows
            .iter()
            .map(|r| match &r[idx] {
                Cell::Num(v) => Some(*v),
                Cell::Text(_) => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub meta: Value,
    pub table: Table,
    /// Tree-level line list (`im-alpha` only).
    pub lines: Option<Table>,
}

impl Report {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# tool: thermofriction {}\n", self.meta["version"].as_str().unwrap_or("")));
        out.push_str(&format!("# constants: {}\n", self.meta["constants"].as_str().unwrap_or("")));
        if let Some(sets) = self.meta["datasets"].as_array() {
            for d in sets {
                out.push_str(&format!(
                    "# dataset: {} {} ({}) sha256={}\n",
                    d["role"].as_str().unwrap_or(""),
                    d["name"].as_str().unwrap_or(""),
                    d["origin"].as_str().unwrap_or(""),
                    d["sha256"].as_str().unwrap_or("")
                ));
            }
        }
        out.push_str(&format!("# config: {}\n", self.meta["config"]));
        write_csv_table(&mut out, &self.table);
        if let Some(lines) = &self.lines {
            out.push_str("\n# lines\n");
            write_csv_table(&mut out, lines);
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut doc = json!({ "meta": self.meta, "rows": table_json(&self.table) });
        if let Some(lines) = &self.lines {
            doc["lines"] = table_json(lines);
        }
        doc
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json");
                s.push('\n');
                s
            }
        }
    }
}

fn write_csv_table(out: &mut String, table: &Table) {
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::render).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
}

fn table_json(table: &Table) -> Value {
    Value::Array(
        table
            .rows
            .iter()
            .map(|row| {
                let obj = table
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.to_string(), c.to_json()))
                    .collect();
                Value::Object(obj)
            })
            .collect(),
    )
}

/// Evaluates `f` on every grid point in parallel; results stay in grid
/// order and the first failing point (in grid order) wins.
fn evaluate<F>(grid: &[f64], f: F) -> Result<Vec<Vec<Cell>>>
where
    F: Fn(f64) -> Result<Vec<Cell>> + Sync,
{
    let results: Vec<Result<Vec<Cell>>> = grid.par_iter().map(|&x| f(x)).collect();
    results.into_iter().collect()
}

fn meta(config: &SweepConfig, datasets: &[Dataset]) -> Value {
    let eval = &config.evaluation;
    let mut cfg = serde_json::to_value(config).expect("config");
    cfg["mode"] = serde_json::to_value(eval.mode).expect("mode");
    cfg["policy"] = serde_json::to_value(eval.policy).expect("policy");
    cfg["rel_tol"] = json!(eval.quadrature.rel_tol);
    cfg["x_max"] = json!(eval.quadrature.x_max);
    cfg["include_pseudo_lines"] = json!(eval.include_pseudo_lines);
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "constants": CONSTANTS_VERSION,
        "datasets": datasets,
        "config": cfg,
    })
}

/// Runs a sweep and returns the assembled table.
pub fn run(config: &SweepConfig) -> Result<Report> {
    config.validate()?;
    let data_dir = config.data_dir.as_deref();
    let (atom, atom_ds) = resolve_atom(&config.atom, data_dir)?;
    let mut datasets = vec![atom_ds];
    let material = match (&config.material, config.command.needs_material()) {
        (Some(spec), true) => {
            let (m, ds) = resolve_material(spec, data_dir)?;
            datasets.push(ds);
            Some(m)
        }
        _ => None,
    };
    let grid = config.grid();
    let eval = &config.evaluation;
    let num = Cell::Num;
    let validity = |v: crate::friction::Validity| Cell::Text(v.as_str().to_string());

    let (columns, rows, lines) = match config.command {
        Command::Bb => {
            let rows = evaluate(&grid, |t| {
                let r = eta_bb(&atom, t, eval)?;
                Ok(vec![
                    num(t),
                    num(r.eta.si),
                    num(r.eta.au),
                    num(attenuation_time(&atom, &r)),
                    num(r.tree_part.si),
                    num(r.oneloop_part.si),
                    validity(r.validity),
                ])
            })?;
            let cols = vec![
                "T_K",
                "eta_bb_si_kg_per_s",
                "eta_bb_au",
                "tau_bb_s",
                "tree_part_si",
                "oneloop_part_si",
                "validity",
            ];
            (cols, rows, None)
        }
        Command::Qf => {
            let surface = material.as_ref().expect("material");
            let z = config.distance.expect("distance");
            let rows = evaluate(&grid, |t| {
                let r = eta_qf(&atom, surface, t, z, eval)?;
                Ok(vec![
                    num(t),
                    num(z),
                    Cell::Text(surface.name().to_string()),
                    num(r.eta.si),
                    num(r.eta.au),
                    num(r.tree_part.si),
                    num(r.oneloop_part.si),
                    validity(r.validity),
                ])
            })?;
            let cols = vec![
                "T_K",
                "Z_m",
                "material",
                "eta_qf_si_kg_per_s",
                "eta_qf_au",
                "tree_part_si",
                "oneloop_part_si",
                "validity",
            ];
            (cols, rows, None)
        }
        Command::Gamma0 => {
            let surface = material.as_ref().expect("material");
            let rows = evaluate(&grid, |t| {
                let g = gamma0(&atom, surface, t, eval)?;
                Ok(vec![num(t), num(g.gamma0), num(g.tree_part), num(g.oneloop_part)])
            })?;
            (vec!["T_K", "gamma0_per_s", "tree_part", "oneloop_part"], rows, None)
        }
        Command::ImAlpha => {
            let rows = evaluate(&grid, |w| Ok(vec![num(w), num(im_alpha_oneloop(&atom, w, eval.policy)?)]))?;
            let lines = resonant_lines(&atom, eval.include_pseudo_lines)
                .into_iter()
                .map(|l| vec![num(l.omega), num(l.weight)])
                .collect();
            let line_table = Table {
                columns: vec!["omega_au", "weight_au"],
                rows: lines,
            };
            (vec!["omega_au", "im_alpha_smooth_au"], rows, Some(line_table))
        }
        Command::CompareBb => {
            let rows = evaluate(&grid, |t| {
                let r = eta_bb(&atom, t, eval)?;
                let a = eta_bb_asymptotic(&atom, t)?;
                Ok(vec![num(t), num(r.eta.si), num(a.si_form.si), num(r.eta.si / a.si_form.si)])
            })?;
            (vec!["T_K", "eta_numeric_si", "eta_asymptotic_si", "ratio"], rows, None)
        }
        Command::CompareQf => {
            let surface = material.as_ref().expect("material");
            let z = config.distance.expect("distance");
            let rows = evaluate(&grid, |t| {
                let r = eta_qf(&atom, surface, t, z, eval)?;
                let a = eta_qf_asymptotic(&atom, surface, t, z)?;
                Ok(vec![num(t), num(z), num(r.eta.si), num(a.si_form.si), num(r.eta.si / a.si_form.si)])
            })?;
            (vec!["T_K", "Z_m", "eta_numeric_si", "eta_asymptotic_si", "ratio"], rows, None)
        }
    };
    Ok(Report {
        meta: meta(config, &datasets),
        table: Table { columns, rows },
        lines,
    })
}

/// Runs the sweep and writes it to `output` (stdout when `None`). A
/// partially written file is removed on failure.
pub fn run_to(config: &SweepConfig, format: Format, output: Option<&Path>) -> Result<()> {
    let report = run(config);
    let Some(path) = output else {
        print!("{}", report?.render(format));
        return Ok(());
    };
    let result = report.and_then(|r| {
        fs::write(path, r.render(format)).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    });
    if result.is_err() && path.exists() {
        let _ = fs::remove_file(path);
    }
    result
}
