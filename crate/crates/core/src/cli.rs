//! Command surface shared by the `phspec` binary and the end-to-end tests:
//! each subcommand is a pure function from parsed inputs to the full output
//! text, so identical inputs produce byte-identical output.

use crate::model::{PseudoharmonicModel, QuantumNumbers};
use crate::molecules::{
    self, load_observations, load_registry, MoleculeRecord, ObservedLevel,
};
use crate::oracle::{self, CrossCheck, OracleError};
use crate::units::PhysicalConstants;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad invocation or unreadable/invalid input: exit code 2.
    #[error("{0}")]
    Usage(String),
    /// A computation ran and failed its contract: exit code 1.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
}

const DEFAULT_PRECISION: usize = 8;

/// Columnar output: named series of equal length, rendered as aligned text
/// or CSV with a fixed decimal precision for floats.
pub struct OutputTable {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
    precision: usize,
}

impl OutputTable {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            precision: DEFAULT_PRECISION,
        }
    }

    pub fn with_precision(headers: &[&str], precision: usize) -> Self {
        Self { precision, ..Self::new(headers) }
    }

    pub fn float(&self, value: f64) -> String {
        format!("{value:.prec$}", prec = self.precision)
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.headers.len(), "row width must match header");
        self.rows.push(cells);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.headers.join(",");
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Text => {
                let mut widths: Vec<usize> = self.headers.iter().map(String::len).collect();
                for row in &self.rows {
                    for (w, cell) in widths.iter_mut().zip(row) {
                        *w = (*w).max(cell.len());
                    }
                }
                let mut out = String::new();
                let mut emit = |cells: &[String]| {
                    for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
                        if i > 0 {
                            out.push_str("  ");
                        }
                        let _ = write!(out, "{cell:>w$}", w = w);
                    }
                    out.push('\n');
                };
                emit(&self.headers);
                for row in &self.rows {
                    emit(row);
                }
                out
            }
        }
    }
}

pub fn registry_from_path(path: Option<&Path>) -> Result<Vec<MoleculeRecord>, CliError> {
    match path {
        Some(p) => load_registry(p).map_err(|e| CliError::Usage(e.to_string())),
        None => Ok(molecules::default_registry()),
    }
}

pub fn observations_from_path(path: &Path) -> Result<Vec<ObservedLevel>, CliError> {
    load_observations(path).map_err(|e| CliError::Usage(e.to_string()))
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut current = vec![i + 1];
        for (j, &cb) in b.iter().enumerate() {
            let substitute = prev[j] + usize::from(ca != cb);
            current.push(substitute.min(prev[j + 1] + 1).min(current[j] + 1));
        }
        prev = current;
    }
    prev[b.len()]
}

fn find_molecule<'a>(
    registry: &'a [MoleculeRecord],
    name: &str,
) -> Result<&'a MoleculeRecord, CliError> {
    if let Some(record) = registry.iter().find(|r| r.name == name) {
        return Ok(record);
    }
    let suggestion = registry
        .iter()
        .map(|r| (levenshtein(&r.name.to_lowercase(), &name.to_lowercase()), &r.name))
        .filter(|(d, _)| *d <= 2)
        .min_by_key(|(d, _)| *d)
        .map(|(_, n)| format!("; did you mean `{n}`?"))
        .unwrap_or_default();
    Err(CliError::Usage(format!("unknown molecule `{name}`{suggestion}")))
}

/// Closed-form spectrum of one molecule: rows (n, l, E) for n <= n_max,
/// l <= min(n, l_max).
pub fn run_spectrum(
    registry: &[MoleculeRecord],
    molecule: &str,
    n_max: u32,
    l_max: Option<u32>,
    format: Format,
) -> Result<String, CliError> {
    let record = find_molecule(registry, molecule)?;
    let model = PseudoharmonicModel::new(record.params);
    let mut table = OutputTable::new(&["n", "l", "E_eV"]);
    for n in 0..=n_max {
        for l in 0..=n.min(l_max.unwrap_or(n)) {
            let e = model.energy(QuantumNumbers::new(n, l));
            table.push_row(vec![n.to_string(), l.to_string(), table.float(e)]);
        }
    }
    Ok(table.render(format))
}

/// The (n, l) rows of the reference energy table: n in {0, 1, 2, 4, 5},
/// l <= n.
pub fn table_states() -> Vec<QuantumNumbers> {
    let mut states = Vec::new();
    for n in [0u32, 1, 2, 4, 5] {
        for l in 0..=n {
            states.push(QuantumNumbers::new(n, l));
        }
    }
    states
}

const TABLE_MOLECULES: [&str; 4] = ["N2", "CO", "NO", "CH"];

/// The four-molecule reference table: 17 rows, one energy column per
/// molecule, 8 decimal places.
pub fn run_table1(registry: &[MoleculeRecord], format: Format) -> Result<String, CliError> {
    let records: Vec<&MoleculeRecord> = TABLE_MOLECULES
        .iter()
        .map(|name| find_molecule(registry, name))
        .collect::<Result<_, _>>()?;
    let models: Vec<PseudoharmonicModel> =
        records.iter().map(|r| PseudoharmonicModel::new(r.params)).collect();

    let mut table = OutputTable::new(&["n", "l", "N2", "CO", "NO", "CH"]);
    for qn in table_states() {
        let mut row = vec![qn.n.to_string(), qn.l.to_string()];
        for model in &models {
            row.push(table.float(model.energy(qn)));
        }
        table.push_row(row);
    }
    Ok(table.render(format))
}

/// Radial wavefunction samples: rows (r, R, r^2 R^2, V_eff) at
/// r_i = i * r_max / points for i = 1..=points.
pub fn run_wavefunction(
    registry: &[MoleculeRecord],
    molecule: &str,
    n: u32,
    l: u32,
    points: usize,
    format: Format,
) -> Result<String, CliError> {
    if points < 2 {
        return Err(CliError::Usage(format!("need at least 2 sample points, got {points}")));
    }
    let record = find_molecule(registry, molecule)?;
    let model = PseudoharmonicModel::new(record.params);
    let wf = model.wavefunction(QuantumNumbers::new(n, l));
    let params = record.params;
    let k_factor = model.constants().hbar2_over_amu_a2() / params.mu_amu();
    let centrifugal = f64::from(l) * f64::from(l + 1) * k_factor / 2.0;

    // Wide enough that the Gaussian-type tail is below printable precision
    // at the edge; mirrors the numeric solvers' default span.
    let alpha = model.dimensionless(l).alpha;
    let r0 = params.r0_a();
    let r_max = r0 * (1.0 + 8.0 / (alpha * r0 * r0).sqrt()).max(4.0);

    let mut table = OutputTable::new(&["r_A", "R", "r2R2", "V_eff_eV"]);
    for i in 1..=points {
        let r = i as f64 * r_max / points as f64;
        let radial = wf.eval(r);
        let v_eff = model.potential(r).expect("sample radii are positive") + centrifugal / (r * r);
        table.push_row(vec![
            table.float(r),
            table.float(radial),
            table.float(r * r * radial * radial),
            table.float(v_eff),
        ]);
    }
    Ok(table.render(format))
}

/// The parameter set `validate` uses when asked for the molecule "natural":
/// V0 = 1/2 eV, r0 = 1 A, mu = 1 amu under hbar^2/(amu A^2) = 1 eV, where
/// the ground state sits at sqrt(5)/2 eV.
fn natural_case() -> (PhysicalConstants, crate::model::MolecularParams) {
    let constants = PhysicalConstants::natural();
    let params = crate::model::MolecularParams::new(0.5, 1.0, 1.0)
        .expect("natural-units parameters are positive");
    (constants, params)
}

fn oracle_failure(e: OracleError) -> CliError {
    match e {
        OracleError::InvalidGrid { .. } | OracleError::TooManyStates { .. } => {
            CliError::Usage(e.to_string())
        }
        _ => CliError::Failure(e.to_string()),
    }
}

/// Cross-validate the closed-form spectrum against both numeric solvers for
/// all n <= n_max, l <= n. Reports Richardson-extrapolated deviations plus
/// measured convergence orders, and fails (exit 1) if any deviation exceeds
/// the tolerance.
pub fn run_validate(
    registry: &[MoleculeRecord],
    molecule: &str,
    n_max: u32,
    tolerance_ev: f64,
    grid_points: usize,
    format: Format,
) -> Result<String, CliError> {
    if !(tolerance_ev > 0.0) || !tolerance_ev.is_finite() {
        return Err(CliError::Usage(format!(
            "tolerance must be positive and finite, got {tolerance_ev}"
        )));
    }
    let (constants, params) = if molecule == "natural" {
        natural_case()
    } else {
        let record = find_molecule(registry, molecule)?;
        (PhysicalConstants::codata2018(), record.params)
    };
    let model = PseudoharmonicModel::with_constants(params, constants);

    let mut table = OutputTable::with_precision(
        &["n", "l", "E_closed_eV", "E_fd_eV", "E_numerov_eV", "max_dev_eV"],
        10,
    );
    let mut worst: Option<(QuantumNumbers, f64)> = None;
    let mut order_check: Option<(f64, f64)> = None;
    for l in 0..=n_max {
        let checks: Vec<CrossCheck> =
            oracle::cross_validate(&constants, &params, l, n_max, grid_points)
                .map_err(oracle_failure)?;
        for check in checks.iter().filter(|c| c.n >= l) {
            let qn = QuantumNumbers::new(check.n, check.l);
            let closed = model.energy(qn);
            let dev = (closed - check.fd.extrapolated)
                .abs()
                .max((closed - check.numerov.extrapolated).abs());
            if worst.map_or(true, |(_, w)| dev > w) {
                worst = Some((qn, dev));
            }
            if check.n == 0 && check.l == 0 {
                let fd_order = ((check.fd.coarse - closed).abs()
                    / (check.fd.medium - closed).abs())
                .log2();
                let nm_order = ((check.numerov.coarse - closed).abs()
                    / (check.numerov.medium - closed).abs())
                .log2();
                order_check = Some((fd_order, nm_order));
            }
            table.push_row(vec![
                check.n.to_string(),
                check.l.to_string(),
                table.float(closed),
                table.float(check.fd.extrapolated),
                table.float(check.numerov.extrapolated),
                format!("{dev:.2e}"),
            ]);
        }
    }

    let mut out = table.render(format);
    if let Some((fd_order, nm_order)) = order_check {
        let _ = writeln!(out, "# FD error order on grid halving (state 0,0): {fd_order:.2}");
        let _ = writeln!(out, "# Numerov error order on grid halving (state 0,0): {nm_order:.2}");
    }
    let (worst_qn, worst_dev) =
        worst.ok_or_else(|| CliError::Usage("no states requested".into()))?;
    let _ = writeln!(
        out,
        "# max |closed - numeric| = {worst_dev:.2e} eV at state (n={}, l={})",
        worst_qn.n, worst_qn.l
    );
    if worst_dev > tolerance_ev {
        let _ = writeln!(out, "# FAIL (tolerance {tolerance_ev:.1e} eV)");
        return Err(CliError::Failure(out));
    }
    let _ = writeln!(out, "# PASS (tolerance {tolerance_ev:.1e} eV)");
    Ok(out)
}

/// Fit (V0, r0) from observed levels at fixed mu and print a ready-to-use
/// registry block plus diagnostics as `#` comments.
pub fn run_fit(
    observations: &[ObservedLevel],
    source_label: &str,
    mu_amu: f64,
    name: &str,
) -> Result<String, CliError> {
    if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '"' || c == '#') {
        return Err(CliError::Usage(format!(
            "molecule name `{name}` must be non-empty without spaces, quotes, or `#`"
        )));
    }
    let constants = PhysicalConstants::codata2018();
    let fit = molecules::fit_parameters(observations, mu_amu, &constants)
        .map_err(|e| CliError::Failure(e.to_string()))?;

    let mut out = String::new();
    let _ = writeln!(out, "[molecule]");
    let _ = writeln!(out, "name={name}");
    let _ = writeln!(out, "V0_eV={:.11}", fit.params.v0_ev());
    let _ = writeln!(out, "r0_A={:.11}", fit.params.r0_a());
    let _ = writeln!(out, "mu_amu={:.10}", fit.params.mu_amu());
    let _ = writeln!(
        out,
        "provenance=\"V0, r0 least-squares back-fitted to the {} levels in {}; \
         mu supplied externally\"",
        observations.len(),
        source_label
    );
    let d = fit.diagnostics;
    let _ = writeln!(out, "# level spacing 2c = {:.8} eV", d.spacing_ev);
    let _ = writeln!(out, "# well scale D = mu V0 r0^2 / hbar^2 = {:.6}", d.d_scale);
    if let Some(offset) = d.e00_offset_ev {
        let _ = writeln!(out, "# seed redundancy check: E(0,0) offset = {offset:.2e} eV");
    }
    let _ = writeln!(out, "# max residual = {:.2e} eV over {} levels", d.max_residual_ev,
        observations.len());
    let _ = writeln!(out, "# least-squares iterations = {}", d.iterations);
    let _ = writeln!(
        out,
        "# note: the spectrum determines V0 and mu*r0^2 jointly; mu is an input and \
         r0 is derived from it, not independently measured"
    );
    Ok(out)
}
