//! Molecular parameter registry, parameter-file ingestion, and back-fitting
//! of (V0, r0) from observed level energies.
//!
//! The spectrum E(n, l) = -2 V0 + c [(2n + 1) + 2 sqrt(D/2 + l(l+1)/4 + 1/16)]
//! depends on V0, on the dimensionless well scale D = mu V0 r0^2 / hbar^2,
//! and on the half-spacing c = (hbar/r0) sqrt(2 V0 / mu). It therefore pins
//! down V0 and the product mu r0^2 but never mu itself: mu is an input taken
//! from standard atomic masses, and r0 is derived. The shipped registry was
//! produced by `fit_parameters` against the level files under data/observed/
//! and records that provenance on every block.

use crate::model::{ModelError, MolecularParams, PseudoharmonicModel, QuantumNumbers};
use crate::units::PhysicalConstants;
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("line {line}: {detail}")]
    Parse { line: usize, detail: String },
    #[error("line {line}: unknown key `{key}` (expected name, V0_eV, r0_A, mu_amu, provenance)")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}` in this block")]
    DuplicateKey { line: usize, key: String },
    #[error("block at line {line}: missing field `{field}`")]
    MissingField { line: usize, field: &'static str },
    #[error("line {line}: invalid value for `{field}`: {detail}")]
    InvalidValue { line: usize, field: String, detail: String },
    #[error("line {line}: duplicate molecule name `{name}`")]
    DuplicateName { line: usize, name: String },
    #[error("cannot read registry file: {0}")]
    Io(#[from] std::io::Error),
}

/// One registry entry: a named parameter set plus the free-text record of
/// how the numbers were obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct MoleculeRecord {
    pub name: String,
    pub params: MolecularParams,
    pub provenance: String,
}

/// One observed (or published) bound-state energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservedLevel {
    pub n: u32,
    pub l: u32,
    pub energy_ev: f64,
}

#[derive(Debug, Error)]
pub enum ObservationError {
    #[error("line {line}: {detail}")]
    Parse { line: usize, detail: String },
    #[error("line {line}: duplicate level (n={n}, l={l})")]
    Duplicate { line: usize, n: u32, l: u32 },
    #[error("cannot read observations file: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum FitError {
    #[error("under-determined fit: {detail}")]
    UnderDetermined { detail: String },
    #[error("inconsistent data at the {stage} stage: {detail}")]
    Inconsistent { stage: &'static str, detail: String },
    #[error("invalid fit input: {detail}")]
    Invalid { detail: String },
}

/// Closed-form seed quantities and the final least-squares quality measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitDiagnostics {
    /// Level spacing 2c estimated from consecutive same-l pairs (seed stage).
    pub spacing_ev: f64,
    /// Dimensionless well scale D = mu V0 r0^2 / hbar^2 from the l-splitting
    /// (seed stage).
    pub d_scale: f64,
    /// Redundancy check: E(0,0) predicted from (c, D) minus the observed
    /// value, when a (0,0) level is present.
    pub e00_offset_ev: Option<f64>,
    /// Largest |model - observed| residual after the least-squares stage.
    pub max_residual_ev: f64,
    /// Accepted Levenberg-Marquardt steps.
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: MolecularParams,
    pub diagnostics: FitDiagnostics,
}

/// Estimates whose spread exceeds this are structurally inconsistent with
/// the equal-spacing / n-independent-shift form of the spectrum.
const CONSISTENCY_TOL_EV: f64 = 1e-4;

/// Truncate at the first `#` that sits outside double quotes.
fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    for (idx, ch) in line.char_indices() {
        match ch {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..idx],
            _ => {}
        }
    }
    line
}

/// Split a line into whitespace-separated tokens, keeping quoted spans
/// intact (quotes included). Errors on an unterminated quote.
fn tokenize(line: &str, line_no: usize) -> Result<Vec<String>, RegistryError> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut in_quotes = false;
    for ch in line.chars() {
        if ch == '"' {
            in_quotes = !in_quotes;
            current.push(ch);
        } else if ch.is_whitespace() && !in_quotes {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
        } else {
            current.push(ch);
        }
    }
    if in_quotes {
        return Err(RegistryError::Parse {
            line: line_no,
            detail: "unterminated double quote".into(),
        });
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    Ok(tokens)
}

struct RawBlock {
    start_line: usize,
    fields: Vec<(usize, String, String)>,
}

impl RawBlock {
    fn take(&self, key: &str) -> Option<(usize, &str)> {
        self.fields.iter().find(|(_, k, _)| k == key).map(|(l, _, v)| (*l, v.as_str()))
    }
}

fn bare_value(block: &RawBlock, field: &'static str) -> Result<(usize, String), RegistryError> {
    let (line, value) = block
        .take(field)
        .ok_or(RegistryError::MissingField { line: block.start_line, field })?;
    if value.starts_with('"') {
        return Err(RegistryError::InvalidValue {
            line,
            field: field.into(),
            detail: "must be a bare token, not quoted".into(),
        });
    }
    Ok((line, value.to_string()))
}

fn float_value(block: &RawBlock, field: &'static str) -> Result<(usize, f64), RegistryError> {
    let (line, value) = bare_value(block, field)?;
    let parsed = value.parse::<f64>().map_err(|e| RegistryError::InvalidValue {
        line,
        field: field.into(),
        detail: format!("`{value}` is not a number ({e})"),
    })?;
    Ok((line, parsed))
}

/// Registry key of the quantity named by a parameter validation error.
fn param_field(quantity: &str) -> String {
    match quantity {
        "V0" => "V0_eV".into(),
        "r0" => "r0_A".into(),
        "mu" => "mu_amu".into(),
        other => other.into(),
    }
}

/// Parse registry text into validated records. See data/molecules.params for
/// the grammar.
pub fn parse_registry(text: &str) -> Result<Vec<MoleculeRecord>, RegistryError> {
    const KEYS: [&str; 5] = ["name", "V0_eV", "r0_A", "mu_amu", "provenance"];

    let mut blocks: Vec<RawBlock> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        for token in tokenize(strip_comment(raw_line), line_no)? {
            if token == "[molecule]" {
                blocks.push(RawBlock { start_line: line_no, fields: Vec::new() });
                continue;
            }
            let Some((key, value)) = token.split_once('=') else {
                return Err(RegistryError::Parse {
                    line: line_no,
                    detail: format!("expected `key=value` or `[molecule]`, got `{token}`"),
                });
            };
            if !KEYS.contains(&key) {
                return Err(RegistryError::UnknownKey { line: line_no, key: key.into() });
            }
            let Some(block) = blocks.last_mut() else {
                return Err(RegistryError::Parse {
                    line: line_no,
                    detail: format!("`{key}` appears before any [molecule] marker"),
                });
            };
            if block.fields.iter().any(|(_, k, _)| k == key) {
                return Err(RegistryError::DuplicateKey { line: line_no, key: key.into() });
            }
            block.fields.push((line_no, key.into(), value.into()));
        }
    }

    let mut records: Vec<MoleculeRecord> = Vec::new();
    for block in &blocks {
        let (name_line, name) = bare_value(block, "name")?;
        if name.is_empty() {
            return Err(RegistryError::InvalidValue {
                line: name_line,
                field: "name".into(),
                detail: "must be non-empty".into(),
            });
        }
        if records.iter().any(|r| r.name == name) {
            return Err(RegistryError::DuplicateName { line: name_line, name });
        }

        let (v0_line, v0_ev) = float_value(block, "V0_eV")?;
        let (_, r0_a) = float_value(block, "r0_A")?;
        let (_, mu_amu) = float_value(block, "mu_amu")?;
        let params = MolecularParams::new(v0_ev, r0_a, mu_amu).map_err(|e| {
            let field = match &e {
                ModelError::NonPositive { quantity, .. } => param_field(quantity),
                _ => "parameters".into(),
            };
            RegistryError::InvalidValue { line: v0_line, field, detail: e.to_string() }
        })?;

        let (prov_line, prov_raw) = block
            .take("provenance")
            .ok_or(RegistryError::MissingField { line: block.start_line, field: "provenance" })?;
        let provenance = prov_raw
            .strip_prefix('"')
            .and_then(|s| s.strip_suffix('"'))
            .ok_or_else(|| RegistryError::InvalidValue {
                line: prov_line,
                field: "provenance".into(),
                detail: "must be double-quoted".into(),
            })?
            .to_string();

        records.push(MoleculeRecord { name, params, provenance });
    }
    Ok(records)
}

pub fn load_registry(path: &Path) -> Result<Vec<MoleculeRecord>, RegistryError> {
    parse_registry(&std::fs::read_to_string(path)?)
}

/// The registry shipped with the crate: N2, CO, NO, CH.
pub fn default_registry() -> Vec<MoleculeRecord> {
    parse_registry(include_str!("../data/molecules.params"))
        .expect("shipped registry must parse")
}

/// Raw text of the shipped observed-level file for a registry molecule,
/// as consumed by `parse_observations`.
pub fn reference_levels(name: &str) -> Option<&'static str> {
    match name {
        "N2" => Some(include_str!("../data/observed/n2.levels")),
        "CO" => Some(include_str!("../data/observed/co.levels")),
        "NO" => Some(include_str!("../data/observed/no.levels")),
        "CH" => Some(include_str!("../data/observed/ch.levels")),
        _ => None,
    }
}

/// Parse `n,l,energy_eV` lines; `#` starts a comment; blank lines ignored.
pub fn parse_observations(text: &str) -> Result<Vec<ObservedLevel>, ObservationError> {
    let mut levels: Vec<(usize, ObservedLevel)> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(ObservationError::Parse {
                line: line_no,
                detail: format!("expected `n,l,energy_eV`, got `{line}`"),
            });
        }
        let n = parts[0].parse::<u32>().map_err(|e| ObservationError::Parse {
            line: line_no,
            detail: format!("bad n `{}` ({e})", parts[0]),
        })?;
        let l = parts[1].parse::<u32>().map_err(|e| ObservationError::Parse {
            line: line_no,
            detail: format!("bad l `{}` ({e})", parts[1]),
        })?;
        let energy_ev = parts[2].parse::<f64>().map_err(|e| ObservationError::Parse {
            line: line_no,
            detail: format!("bad energy `{}` ({e})", parts[2]),
        })?;
        if !energy_ev.is_finite() {
            return Err(ObservationError::Parse {
                line: line_no,
                detail: format!("energy `{}` is not finite", parts[2]),
            });
        }
        if let Some((_, dup)) = levels.iter().find(|(_, lv)| lv.n == n && lv.l == l) {
            return Err(ObservationError::Duplicate { line: line_no, n: dup.n, l: dup.l });
        }
        levels.push((line_no, ObservedLevel { n, l, energy_ev }));
    }
    Ok(levels.into_iter().map(|(_, lv)| lv).collect())
}

pub fn load_observations(path: &Path) -> Result<Vec<ObservedLevel>, ObservationError> {
    parse_observations(&std::fs::read_to_string(path)?)
}

/// Model energies for the given record and states, CODATA constants, in the
/// caller's state order.
pub fn predict_table(record: &MoleculeRecord, states: &[QuantumNumbers]) -> Vec<ObservedLevel> {
    let model = PseudoharmonicModel::new(record.params);
    states
        .iter()
        .map(|&qn| ObservedLevel { n: qn.n, l: qn.l, energy_ev: model.energy(qn) })
        .collect()
}

/// Mean and spread (max - min) of a non-empty slice.
fn mean_and_spread(values: &[f64]) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let max = values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let min = values.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    (mean, max - min)
}

struct StageOneSeed {
    c: f64,
    d: f64,
    v0: f64,
    r0: f64,
    e00_offset: Option<f64>,
}

/// Closed-form seed: half-spacing c from same-l level differences, the well
/// scale D from the l-splitting via bisection, then V0 = c sqrt(D/2) and
/// r0^2 = D (hbar^2/mu) / V0.
fn stage_one(obs: &[ObservedLevel], k_factor: f64) -> Result<StageOneSeed, FitError> {
    let mut by_l: BTreeMap<u32, Vec<(u32, f64)>> = BTreeMap::new();
    for level in obs {
        by_l.entry(level.l).or_default().push((level.n, level.energy_ev));
    }
    for group in by_l.values_mut() {
        group.sort_by_key(|&(n, _)| n);
    }

    let mut c_estimates = Vec::new();
    for group in by_l.values() {
        for pair in group.windows(2) {
            let dn = (pair[1].0 - pair[0].0) as f64;
            c_estimates.push((pair[1].1 - pair[0].1) / (2.0 * dn));
        }
    }
    if c_estimates.is_empty() {
        return Err(FitError::UnderDetermined {
            detail: "need two levels with distinct n at the same l to fix the spacing".into(),
        });
    }
    let (c, c_spread) = mean_and_spread(&c_estimates);
    if c_spread > CONSISTENCY_TOL_EV {
        return Err(FitError::Inconsistent {
            stage: "spacing",
            detail: format!(
                "same-l spacing estimates spread {c_spread:.3e} eV (limit {CONSISTENCY_TOL_EV:.0e})"
            ),
        });
    }
    if c <= 0.0 {
        return Err(FitError::Inconsistent {
            stage: "spacing",
            detail: format!("spacing c = {c:.3e} eV must be positive"),
        });
    }

    // l-splitting relative to l = 0 at shared n, for the smallest l >= 1
    // that has a partner.
    let base = by_l.get(&0).map(Vec::as_slice).unwrap_or(&[]);
    let mut split: Option<(u32, Vec<f64>)> = None;
    for (&l, group) in by_l.range(1..) {
        let deltas: Vec<f64> = group
            .iter()
            .filter_map(|&(n, e)| {
                base.iter().find(|&&(bn, _)| bn == n).map(|&(_, be)| e - be)
            })
            .collect();
        if !deltas.is_empty() {
            split = Some((l, deltas));
            break;
        }
    }
    let Some((l_split, deltas)) = split else {
        return Err(FitError::UnderDetermined {
            detail: "need a level with l >= 1 sharing n with an l = 0 level to fix the \
                     well scale"
                .into(),
        });
    };
    let (delta, delta_spread) = mean_and_spread(&deltas);
    if delta_spread > CONSISTENCY_TOL_EV {
        return Err(FitError::Inconsistent {
            stage: "l-shift",
            detail: format!(
                "l-shift estimates spread {delta_spread:.3e} eV (limit {CONSISTENCY_TOL_EV:.0e})"
            ),
        });
    }

    // delta = 2c [sqrt(D/2 + x + 1/16) - sqrt(D/2 + 1/16)], strictly
    // decreasing in D from its D = 0 value toward 0.
    let x = f64::from(l_split) * f64::from(l_split + 1) / 4.0;
    let shift_of = |d: f64| 2.0 * c * ((d / 2.0 + x + 0.0625).sqrt() - (d / 2.0 + 0.0625).sqrt());
    if delta <= 0.0 || delta >= shift_of(0.0) {
        return Err(FitError::Inconsistent {
            stage: "l-shift",
            detail: format!(
                "l-shift {delta:.3e} eV outside the representable range (0, {:.3e})",
                shift_of(0.0)
            ),
        });
    }
    let mut d_hi = 1.0f64;
    while shift_of(d_hi) > delta {
        d_hi *= 2.0;
        if d_hi > 1e300 {
            return Err(FitError::Inconsistent {
                stage: "l-shift",
                detail: "no finite well scale reproduces the l-shift".into(),
            });
        }
    }
    let (mut d_lo, mut d_hi) = (0.0f64, d_hi);
    for _ in 0..200 {
        let mid = 0.5 * (d_lo + d_hi);
        if shift_of(mid) > delta {
            d_lo = mid;
        } else {
            d_hi = mid;
        }
    }
    let d = 0.5 * (d_lo + d_hi);

    let v0 = c * (d / 2.0).sqrt();
    let r0 = (d * k_factor / v0).sqrt();
    let e00_offset = obs.iter().find(|lv| lv.n == 0 && lv.l == 0).map(|lv| {
        let e00 = -2.0 * v0 + c * (1.0 + 2.0 * (d / 2.0 + 0.0625).sqrt());
        e00 - lv.energy_ev
    });
    Ok(StageOneSeed { c, d, v0, r0, e00_offset })
}

/// Fit (V0, r0) to observed levels at a fixed reduced mass: a closed-form
/// seed from the spacing and l-splitting structure, then Levenberg-Marquardt
/// over the exact level formula. mu is not a fit output; the spectrum only
/// determines V0 and mu r0^2 jointly.
pub fn fit_parameters(
    obs: &[ObservedLevel],
    mu_amu: f64,
    constants: &PhysicalConstants,
) -> Result<FitResult, FitError> {
    if !(mu_amu > 0.0) || !mu_amu.is_finite() {
        return Err(FitError::Invalid { detail: format!("mu = {mu_amu} amu must be positive") });
    }
    for (i, a) in obs.iter().enumerate() {
        if obs[..i].iter().any(|b| b.n == a.n && b.l == a.l) {
            return Err(FitError::Invalid {
                detail: format!("duplicate level (n={}, l={})", a.n, a.l),
            });
        }
    }
    let k_factor = constants.hbar2_over_amu_a2() / mu_amu;
    let seed = stage_one(obs, k_factor)?;

    let energies = |v0: f64, r0: f64| -> Result<Vec<f64>, FitError> {
        let params = MolecularParams::new(v0, r0, mu_amu)
            .map_err(|e| FitError::Invalid { detail: e.to_string() })?;
        let model = PseudoharmonicModel::with_constants(params, *constants);
        Ok(obs.iter().map(|lv| model.energy(QuantumNumbers::new(lv.n, lv.l))).collect())
    };
    let cost_of = |resid: &[f64]| resid.iter().map(|r| r * r).sum::<f64>();
    let residuals = |v0: f64, r0: f64| -> Result<Vec<f64>, FitError> {
        Ok(energies(v0, r0)?
            .iter()
            .zip(obs)
            .map(|(e, lv)| e - lv.energy_ev)
            .collect())
    };

    let (mut v0, mut r0) = (seed.v0, seed.r0);
    let mut resid = residuals(v0, r0)?;
    let mut cost = cost_of(&resid);
    let mut lambda = 1e-3f64;
    let mut iterations = 0usize;
    for _ in 0..200 {
        // Central-difference Jacobian columns in (V0, r0).
        let (hv, hr) = (v0 * 1e-6, r0 * 1e-6);
        let ev_hi = energies(v0 + hv, r0)?;
        let ev_lo = energies(v0 - hv, r0)?;
        let er_hi = energies(v0, r0 + hr)?;
        let er_lo = energies(v0, r0 - hr)?;
        let mut a11 = 0.0;
        let mut a12 = 0.0;
        let mut a22 = 0.0;
        let mut g1 = 0.0;
        let mut g2 = 0.0;
        for i in 0..obs.len() {
            let j1 = (ev_hi[i] - ev_lo[i]) / (2.0 * hv);
            let j2 = (er_hi[i] - er_lo[i]) / (2.0 * hr);
            a11 += j1 * j1;
            a12 += j1 * j2;
            a22 += j2 * j2;
            g1 += j1 * resid[i];
            g2 += j2 * resid[i];
        }

        let mut stepped = false;
        for _ in 0..40 {
            let m11 = a11 * (1.0 + lambda);
            let m22 = a22 * (1.0 + lambda);
            let det = m11 * m22 - a12 * a12;
            if det.abs() < 1e-300 {
                lambda *= 10.0;
                continue;
            }
            let dv = (-g1 * m22 + g2 * a12) / det;
            let dr = (-g2 * m11 + g1 * a12) / det;
            let (v_try, r_try) = (v0 + dv, r0 + dr);
            if v_try <= 0.0 || r_try <= 0.0 {
                lambda *= 10.0;
                continue;
            }
            let resid_try = residuals(v_try, r_try)?;
            let cost_try = cost_of(&resid_try);
            if cost_try < cost {
                let small = dv.abs() < 1e-13 * v0 && dr.abs() < 1e-13 * r0;
                v0 = v_try;
                r0 = r_try;
                resid = resid_try;
                cost = cost_try;
                lambda = (lambda / 3.0).max(1e-14);
                iterations += 1;
                stepped = small;
                break;
            }
            lambda *= 10.0;
            if lambda > 1e14 {
                stepped = true;
                break;
            }
        }
        if stepped {
            break;
        }
    }

    let max_residual_ev = resid.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    if max_residual_ev > CONSISTENCY_TOL_EV {
        return Err(FitError::Inconsistent {
            stage: "post-fit",
            detail: format!(
                "largest residual {max_residual_ev:.3e} eV exceeds {CONSISTENCY_TOL_EV:.0e} eV"
            ),
        });
    }
    let params = MolecularParams::new(v0, r0, mu_amu)
        .map_err(|e| FitError::Invalid { detail: e.to_string() })?;
    Ok(FitResult {
        params,
        diagnostics: FitDiagnostics {
            spacing_ev: 2.0 * seed.c,
            d_scale: seed.d,
            e00_offset_ev: seed.e00_offset,
            max_residual_ev,
            iterations,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn table_states() -> Vec<QuantumNumbers> {
        let mut states = Vec::new();
        for n in [0u32, 1, 2, 4, 5] {
            for l in 0..=n {
                states.push(QuantumNumbers::new(n, l));
            }
        }
        states
    }

    #[test]
    fn default_registry_has_four_molecules() {
        let registry = default_registry();
        let names: Vec<&str> = registry.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["N2", "CO", "NO", "CH"]);
        for record in &registry {
            assert!(!record.provenance.is_empty());
            assert!(reference_levels(&record.name).is_some());
        }
    }

    #[test]
    fn empty_registry_text_parses_to_empty() {
        assert!(parse_registry("").unwrap().is_empty());
        assert!(parse_registry("# only comments\n\n  \n").unwrap().is_empty());
    }

    #[test]
    fn single_line_block_parses() {
        let text = r#"[molecule] name=X2 V0_eV=1.5 r0_A=1.0 mu_amu=2.0 provenance="made up""#;
        let records = parse_registry(text).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].name, "X2");
        assert_eq!(records[0].params.v0_ev(), 1.5);
        assert_eq!(records[0].provenance, "made up");
    }

    #[test]
    fn comments_and_quotes_interact_correctly() {
        let text = "[molecule] # trailing comment\nname=A\nV0_eV=1 r0_A=1 mu_amu=1\n\
                    provenance=\"keeps # inside quotes\" # but drops this\n";
        let records = parse_registry(text).unwrap();
        assert_eq!(records[0].provenance, "keeps # inside quotes");
    }

    #[test]
    fn rejects_nonpositive_v0_naming_field() {
        let text = "[molecule] name=A V0_eV=-1 r0_A=1 mu_amu=1 provenance=\"x\"";
        let err = parse_registry(text).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("V0"), "message was: {message}");
    }

    #[test]
    fn rejects_unknown_key_with_line() {
        let text = "[molecule] name=A\nV0_J=3\nr0_A=1 mu_amu=1 provenance=\"x\"";
        match parse_registry(text).unwrap_err() {
            RegistryError::UnknownKey { line, key } => {
                assert_eq!(line, 2);
                assert_eq!(key, "V0_J");
            }
            other => panic!("expected UnknownKey, got {other:?}"),
        }
    }

    #[test]
    fn rejects_structural_mistakes() {
        assert!(matches!(
            parse_registry("name=A"),
            Err(RegistryError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_registry("[molecule] name=A name=B"),
            Err(RegistryError::DuplicateKey { .. })
        ));
        assert!(matches!(
            parse_registry("[molecule] name=A V0_eV=1 r0_A=1 mu_amu=1"),
            Err(RegistryError::MissingField { field: "provenance", .. })
        ));
        assert!(matches!(
            parse_registry("[molecule] name=A V0_eV=1 r0_A=1 mu_amu=1 provenance=bare"),
            Err(RegistryError::InvalidValue { .. })
        ));
        assert!(matches!(
            parse_registry("[molecule] provenance=\"unterminated"),
            Err(RegistryError::Parse { .. })
        ));
        let two = "[molecule] name=A V0_eV=1 r0_A=1 mu_amu=1 provenance=\"x\"\n\
                   [molecule] name=A V0_eV=2 r0_A=1 mu_amu=1 provenance=\"y\"";
        assert!(matches!(two_err(two), RegistryError::DuplicateName { .. }));
    }

    fn two_err(text: &str) -> RegistryError {
        parse_registry(text).unwrap_err()
    }

    #[test]
    fn observations_parse_and_reject_duplicates() {
        let text = "# header\n0,0,0.5\n1, 0, 0.75 # inline comment\n\n2,1,1.0\n";
        let levels = parse_observations(text).unwrap();
        assert_eq!(levels.len(), 3);
        assert_eq!(levels[1], ObservedLevel { n: 1, l: 0, energy_ev: 0.75 });

        assert!(matches!(
            parse_observations("0,0,0.5\n0,0,0.6"),
            Err(ObservationError::Duplicate { line: 2, n: 0, l: 0 })
        ));
        assert!(matches!(
            parse_observations("0,0\n"),
            Err(ObservationError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_observations("0,0,not_a_number\n"),
            Err(ObservationError::Parse { .. })
        ));
    }

    #[test]
    fn fit_recovers_n2_scale_parameters() {
        let obs = parse_observations(reference_levels("N2").unwrap()).unwrap();
        let fit = fit_parameters(&obs, 7.0015370022, &PhysicalConstants::codata2018()).unwrap();
        assert_abs_diff_eq!(fit.params.v0_ev(), 11.934, epsilon = 0.01);
        assert_abs_diff_eq!(fit.diagnostics.spacing_ev, 0.21818714, epsilon = 1e-7);
        assert!(fit.diagnostics.max_residual_ev <= 1e-6);
        let offset = fit.diagnostics.e00_offset_ev.unwrap();
        assert!(offset.abs() <= 1e-6, "seed E(0,0) redundancy check off by {offset:.2e}");
    }

    #[test]
    fn fit_round_trips_synthetic_spectra() {
        let mut rng = StdRng::seed_from_u64(0x00F17_5EED);
        let constants = PhysicalConstants::codata2018();
        for _ in 0..30 {
            let v0 = rng.gen_range(1.0..15.0);
            let r0 = rng.gen_range(0.8..2.0);
            let mu = rng.gen_range(0.5..20.0);
            let params = MolecularParams::new(v0, r0, mu).unwrap();
            let model = PseudoharmonicModel::with_constants(params, constants);
            let obs: Vec<ObservedLevel> = table_states()
                .iter()
                .map(|&qn| ObservedLevel { n: qn.n, l: qn.l, energy_ev: model.energy(qn) })
                .collect();
            let fit = fit_parameters(&obs, mu, &constants).unwrap();
            assert_relative_eq!(fit.params.v0_ev(), v0, max_relative = 1e-10);
            assert_relative_eq!(fit.params.r0_a(), r0, max_relative = 1e-10);
            assert!(fit.diagnostics.max_residual_ev <= 1e-10);
        }
    }

    #[test]
    fn fit_rejects_perturbed_spectrum() {
        let constants = PhysicalConstants::codata2018();
        let params = MolecularParams::new(11.9340379802, 1.09423164695, 7.0015370022).unwrap();
        let model = PseudoharmonicModel::with_constants(params, constants);
        let mut obs: Vec<ObservedLevel> = table_states()
            .iter()
            .map(|&qn| ObservedLevel { n: qn.n, l: qn.l, energy_ev: model.energy(qn) })
            .collect();
        let idx = obs.iter().position(|lv| lv.n == 2 && lv.l == 1).unwrap();
        obs[idx].energy_ev += 2e-4;
        assert!(matches!(
            fit_parameters(&obs, 7.0015370022, &constants),
            Err(FitError::Inconsistent { .. })
        ));
    }

    #[test]
    fn fit_under_determined_inputs() {
        let constants = PhysicalConstants::codata2018();
        // Two levels at the same n cannot fix the spacing.
        let same_n = [
            ObservedLevel { n: 0, l: 0, energy_ev: 0.5 },
            ObservedLevel { n: 0, l: 1, energy_ev: 0.6 },
        ];
        assert!(matches!(
            fit_parameters(&same_n, 1.0, &constants),
            Err(FitError::UnderDetermined { .. })
        ));
        // Two l = 0 levels fix the spacing but not the well scale.
        let no_shift = [
            ObservedLevel { n: 0, l: 0, energy_ev: 0.5 },
            ObservedLevel { n: 1, l: 0, energy_ev: 0.9 },
        ];
        assert!(matches!(
            fit_parameters(&no_shift, 1.0, &constants),
            Err(FitError::UnderDetermined { .. })
        ));
        assert!(matches!(
            fit_parameters(&no_shift, -1.0, &constants),
            Err(FitError::Invalid { .. })
        ));
    }

    #[test]
    fn fit_on_low_n_predicts_held_out_rows() {
        let constants = PhysicalConstants::codata2018();
        for record in default_registry() {
            let all = parse_observations(reference_levels(&record.name).unwrap()).unwrap();
            let low: Vec<ObservedLevel> = all.iter().copied().filter(|lv| lv.n <= 2).collect();
            assert_eq!(low.len(), 6);
            let fit = fit_parameters(&low, record.params.mu_amu(), &constants).unwrap();
            let model = PseudoharmonicModel::with_constants(fit.params, constants);
            for held_out in all.iter().filter(|lv| lv.n > 2) {
                let predicted = model.energy(QuantumNumbers::new(held_out.n, held_out.l));
                assert_abs_diff_eq!(predicted, held_out.energy_ev, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn registry_reproduces_reference_levels() {
        for record in default_registry() {
            let reference = parse_observations(reference_levels(&record.name).unwrap()).unwrap();
            let states: Vec<QuantumNumbers> =
                reference.iter().map(|lv| QuantumNumbers::new(lv.n, lv.l)).collect();
            let predicted = predict_table(&record, &states);
            for (p, r) in predicted.iter().zip(&reference) {
                assert_abs_diff_eq!(p.energy_ev, r.energy_ev, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn predict_table_reference_cells() {
        let registry = default_registry();
        let n2 = registry.iter().find(|r| r.name == "N2").unwrap();
        let co = registry.iter().find(|r| r.name == "CO").unwrap();
        let top = predict_table(n2, &[QuantumNumbers::new(5, 5)]);
        assert_abs_diff_eq!(top[0].energy_ev, 1.20756990, epsilon = 1.5e-8);
        let ground = predict_table(co, &[QuantumNumbers::new(0, 0)]);
        assert_abs_diff_eq!(ground[0].energy_ev, 0.10193061, epsilon = 1.5e-8);
        assert!(predict_table(n2, &[]).is_empty());
    }

    #[test]
    fn load_registry_round_trips_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("custom.params");
        std::fs::write(
            &path,
            "[molecule] name=Q V0_eV=2 r0_A=1.1 mu_amu=3 provenance=\"disk test\"\n",
        )
        .unwrap();
        let records = load_registry(&path).unwrap();
        assert_eq!(records[0].name, "Q");
        assert!(matches!(
            load_registry(&dir.path().join("missing.params")),
            Err(RegistryError::Io(_))
        ));
    }
}
