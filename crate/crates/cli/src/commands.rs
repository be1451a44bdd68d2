use bogolon::phase_integral::{extrapolate_regulator, integrate_damped, PhaseIntegral};
use bogolon::spectrum::{depletion as depletion_report, spectrum_grid, total_energy, EnergyReport, SpectrumPoint};
use bogolon::validation::{run_suite, ValidationOptions};
use bogolon::{Condensate, Mode};
use rayon::prelude::*;

use crate::config::{Observable, Resolved, RunConfig, SweepParameter, Units};
use crate::output::{Cell, Document};
use crate::{CliError, ValidateArgs};

pub const SPECTRUM_COLUMNS: [&str; 6] = ["k", "theta", "omega", "dn_dk_domega", "dE_dk_domega", "provenance"];
pub const ENERGY_COLUMNS: [&str; 10] = [
    "e_total",
    "e_upper",
    "e_lower",
    "k_max",
    "truncation_error",
    "divergent",
    "upper_divergent",
    "lower_divergent",
    "upper_tail_exponent",
    "lower_tail_exponent",
];
pub const DEPLETION_COLUMNS: [&str; 9] = [
    "leading",
    "correction",
    "tail_estimate",
    "total",
    "modes",
    "box_length",
    "particle_number",
    "k_max",
    "time",
];
pub const REGULATOR_COLUMNS: [&str; 8] = ["k", "theta", "stage", "epsilon", "re_i", "im_i", "abs_i_sqr", "error"];

/// Natural-to-output conversions chosen by `output.units`.
struct Scale {
    wavenumber: f64,
    frequency: f64,
    time: f64,
    length: f64,
    energy: f64,
}

impl Scale {
    fn new(cond: &Condensate, units: Units) -> Self {
        match units {
            Units::Natural => Self {
                wavenumber: 1.0,
                frequency: 1.0,
                time: 1.0,
                length: 1.0,
                energy: 1.0,
            },
            Units::Physical => {
                let u = cond.units();
                Self {
                    wavenumber: 1.0 / u.length,
                    frequency: 1.0 / u.time,
                    time: u.time,
                    length: u.length,
                    energy: u.energy,
                }
            }
        }
    }
}

fn document(config: &RunConfig, command: &'static str, columns: &[&str]) -> Document {
    let mut doc = Document::new(command, columns);
    doc.config = Some(config.to_toml());
    doc.precision = config.output.precision;
    doc.units = match config.output.units {
        Units::Natural => "natural",
        Units::Physical => "physical",
    };
    doc
}

fn spectrum_rows(points: &[SpectrumPoint], s: &Scale) -> Vec<Vec<Cell>> {
    points
        .iter()
        .map(|p| {
            vec![
                Cell::Num(p.k * s.wavenumber),
                Cell::Num(p.theta),
                Cell::Num(p.omega * s.frequency),
                // per unit k: dk_natural = length · dk
                Cell::Num(p.dn_dk_domega * s.length),
                Cell::Num(p.de_dk_domega * s.length * s.energy),
                Cell::Text(p.provenance.as_str().into()),
            ]
        })
        .collect()
}

fn energy_row(r: &EnergyReport, s: &Scale) -> Vec<Cell> {
    vec![
        Cell::Num(r.total * s.energy),
        Cell::Num(r.upper * s.energy),
        Cell::Num(r.lower * s.energy),
        Cell::Num(r.k_max * s.wavenumber),
        Cell::Num(r.truncation_error * s.energy),
        r.divergent.into(),
        r.upper_divergent.into(),
        r.lower_divergent.into(),
        r.upper_tail_exponent.into(),
        r.lower_tail_exponent.into(),
    ]
}

fn compute_spectrum(config: &RunConfig, resolved: &Resolved) -> Result<Vec<Vec<Cell>>, CliError> {
    let points = spectrum_grid(&resolved.condensate, &resolved.source, &resolved.ks, &resolved.thetas)?;
    Ok(spectrum_rows(&points, &Scale::new(&resolved.condensate, config.output.units)))
}

fn compute_energy(config: &RunConfig, resolved: &Resolved) -> Result<Vec<Cell>, CliError> {
    let energy = config
        .energy
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [energy] block (energy.k_max)".into()))?;
    let cond = &resolved.condensate;
    let k_max = cond.wavenumber_to_natural(energy.k_max);
    let report = total_energy(cond, &resolved.source, k_max, &energy.quadrature)?;
    Ok(energy_row(&report, &Scale::new(cond, config.output.units)))
}

pub fn spectrum(config: &RunConfig, resolved: &Resolved) -> Result<Document, CliError> {
    let mut doc = document(config, "spectrum", &SPECTRUM_COLUMNS);
    doc.rows = compute_spectrum(config, resolved)?;
    Ok(doc)
}

pub fn energy(config: &RunConfig, resolved: &Resolved) -> Result<Document, CliError> {
    let mut doc = document(config, "energy", &ENERGY_COLUMNS);
    doc.rows = vec![compute_energy(config, resolved)?];
    Ok(doc)
}

pub fn depletion(config: &RunConfig, resolved: &Resolved) -> Result<Document, CliError> {
    let block = config
        .depletion
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [depletion] block (depletion.k_max, depletion.time)".into()))?;
    let cond = &resolved.condensate;
    let r = depletion_report(
        cond,
        &resolved.source,
        cond.wavenumber_to_natural(block.k_max),
        cond.time_to_natural(block.time),
    )?;
    let s = Scale::new(cond, config.output.units);
    let mut doc = document(config, "depletion", &DEPLETION_COLUMNS);
    doc.rows = vec![vec![
        r.leading.into(),
        r.correction.into(),
        r.tail_estimate.into(),
        r.total.into(),
        r.modes.into(),
        Cell::Num(r.box_length * s.length),
        r.particle_number.into(),
        Cell::Num(r.k_max * s.wavenumber),
        Cell::Num(r.time * s.time),
    ]];
    Ok(doc)
}

/// One block per swept value, blocks in the order the values were given.
pub fn sweep(config: &RunConfig, resolved: &Resolved) -> Result<Document, CliError> {
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [sweep] block (sweep.parameter, sweep.values)".into()))?;
    if sweep.parameter == SweepParameter::RegulatorEpsilon {
        return regulator_table(config, resolved);
    }
    let inner: &[&str] = match sweep.observable {
        Observable::Spectrum => &SPECTRUM_COLUMNS,
        Observable::Energy => &ENERGY_COLUMNS,
    };
    let mut columns = vec!["parameter", "value"];
    columns.extend_from_slice(inner);
    let mut doc = document(config, "sweep", &columns);
    let blocks: Vec<Vec<Vec<Cell>>> = sweep
        .values
        .par_iter()
        .map(|&value| {
            let varied = config.with_parameter(sweep.parameter, value);
            let r = varied.resolve()?;
            let rows = match sweep.observable {
                Observable::Spectrum => compute_spectrum(&varied, &r)?,
                Observable::Energy => vec![compute_energy(&varied, &r)?],
            };
            Ok(rows
                .into_iter()
                .map(|row| {
                    let mut full = vec![Cell::Text(sweep.parameter.as_str().into()), Cell::Num(value)];
                    full.extend(row);
                    full
                })
                .collect())
        })
        .collect::<Result<_, CliError>>()?;
    doc.rows = blocks.into_iter().flatten().collect();
    Ok(doc)
}

/// Regulated phase integrals at each ladder strength followed by their
/// extrapolation to zero, per grid point.
fn regulator_table(config: &RunConfig, resolved: &Resolved) -> Result<Document, CliError> {
    let sweep = config.sweep.as_ref().expect("checked by caller");
    let cond = &resolved.condensate;
    let s = Scale::new(cond, config.output.units);
    let mut ladder = sweep.values.clone();
    ladder.sort_by(|a, b| b.total_cmp(a));
    let order = config.regulator.order.min(ladder.len() - 1).max(1);
    let src = &resolved.source;
    let cells: Vec<(f64, f64)> = resolved
        .ks
        .iter()
        .flat_map(|&k| resolved.thetas.iter().map(move |&t| (k, t)))
        .collect();
    let blocks: Vec<Vec<Vec<Cell>>> = cells
        .par_iter()
        .map(|&(k, theta)| {
            let mode = Mode::new(k, theta)?;
            let mut points: Vec<(f64, PhaseIntegral)> = Vec::with_capacity(ladder.len());
            for &eps in &ladder {
                let natural = config.regulator.to_natural(cond, eps);
                let damping = src.regulator.damping(natural);
                points.push((natural, integrate_damped(&mode, &src.trajectory, src.window, damping, src.tol)?));
            }
            let row = |stage: &str, eps: f64, p: &PhaseIntegral| {
                vec![
                    Cell::Num(k * s.wavenumber),
                    Cell::Num(theta),
                    Cell::Text(stage.into()),
                    Cell::Num(eps),
                    Cell::Num(p.value.re * s.time),
                    Cell::Num(p.value.im * s.time),
                    Cell::Num(p.norm_sqr() * s.time * s.time),
                    Cell::Num(p.error * s.time),
                ]
            };
            let mut rows: Vec<Vec<Cell>> = ladder.iter().zip(&points).map(|(&e, (_, p))| row("ladder", e, p)).collect();
            let limit = extrapolate_regulator(&points, order)?;
            rows.push(row("extrapolated", 0.0, &limit));
            Ok(rows)
        })
        .collect::<Result<_, CliError>>()?;
    let mut doc = document(config, "sweep", &REGULATOR_COLUMNS);
    doc.rows = blocks.into_iter().flatten().collect();
    Ok(doc)
}

/// Returns the report and the names of failed checks.
pub fn validate(args: &ValidateArgs) -> Result<(Document, Vec<&'static str>), CliError> {
    let opts = ValidationOptions {
        seed: args.seed,
        monte_carlo_samples: args.samples,
        k1_perturbation: args.perturb_k1,
    };
    let checks = run_suite(&opts)?;
    let mut doc = Document::new("validate", &["check", "status", "measured", "tolerance", "note"]);
    doc.precision = 6;
    let mut failed = Vec::new();
    for c in &checks {
        let status = if c.informational {
            "INFO"
        } else if c.passed {
            "PASS"
        } else {
            failed.push(c.name);
            "FAIL"
        };
        eprintln!("{status} {} measured={:.3e} tolerance={:.3e} {}", c.name, c.measured, c.tolerance, c.note);
        doc.rows.push(vec![
            c.name.into(),
            status.into(),
            Cell::Num(c.measured),
            Cell::Num(c.tolerance),
            Cell::Text(c.note.clone()),
        ]);
    }
    Ok((doc, failed))
}
