use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use super::config::{PhasePolicy, RunConfig};
use super::output::{fmt_num, CsvOut};
use super::{CalibrateArgs, CliError, Command, SweepArgs};
use crate::continuum::{continuum_fisher, relative_difference, ContinuumSettings};
use crate::estimation::{
    enhancement_ratio, precision_bound, table_c1, uncertainty_budget, FisherReport, Interferometer,
    PhaseAssumption, PhaseScan, Scheme, DERIVATIVE_FLOOR, I_FLOOR, NORMALIZATION_TOL, P_FLOOR,
};
use crate::quantum_stats::{click_distribution, hom_pair_distribution, CLAMP_TOL, PHYSICAL_TOL};
use crate::tmm::stack_file::{CalibrationRecord, StackFile};
use crate::tmm::{
    calibrate_stack, find_crossing_ns, stack_response, CalibrationBounds, CalibrationTarget,
    LayerStack, CALIBRATION_RESIDUAL_TOL,
};

const TOOL: &str = env!("CARGO_PKG_NAME");
const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fraction of the sweep maximum of I^(C) below which G is not reported.
const SINGULAR_FRACTION: f64 = 0.01;
/// n_s window searched for the best HOM precision in `summary.json`.
const BOUND_WINDOW: (f64, f64) = (1.30, 1.33);
/// Half-width of the crossing search around the calibration target.
const CROSSING_HALF_WIDTH: f64 = 0.02;

pub(super) fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Calibrate(args) => calibrate(args),
        Command::Spectrum(args) => sweep("spectrum", args, spectrum),
        Command::Coincidence(args) => sweep("coincidence", args, coincidence),
        Command::Fisher(args) => sweep("fisher", args, fisher),
        Command::Map(args) => sweep("map", args, map),
        Command::Budget(args) => sweep("budget", args, budget),
        Command::Continuum(args) => sweep("continuum", args, continuum),
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn run_id(command: &str, payload: &str) -> String {
    let digest = Sha256::digest(format!("{command}\n{payload}").as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn tolerances() -> serde_json::Value {
    json!({
        "p_floor": P_FLOOR,
        "derivative_floor": DERIVATIVE_FLOOR,
        "i_floor": I_FLOOR,
        "normalization_tol": NORMALIZATION_TOL,
        "physical_tol": PHYSICAL_TOL,
        "clamp_tol": CLAMP_TOL,
        "calibration_residual_tol": CALIBRATION_RESIDUAL_TOL,
        "singular_fraction": SINGULAR_FRACTION,
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn tag(value: &impl Serialize) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

/// The stack a sweep runs on: a stored calibration for the configured target
/// is reused, otherwise the stack is calibrated unless that is disabled.
fn resolve_stack(config: &RunConfig) -> Result<(LayerStack, Option<CalibrationRecord>), CliError> {
    let base = match &config.stack {
        Some(file) => file.to_stack()?,
        None => LayerStack::default_sensor(),
    };
    let stored = config.stack.as_ref().and_then(|f| f.calibration);
    if let Some(record) = stored {
        if record.target() == config.calibration.target {
            return Ok((base, Some(record)));
        }
    }
    if !config.calibration.enabled {
        return Ok((base, stored));
    }
    let cal = calibrate_stack(
        &base,
        &config.calibration.target,
        &config.calibration.bounds,
    )?;
    let record = CalibrationRecord::from(&cal);
    Ok((cal.stack, Some(record)))
}

struct Run {
    command: &'static str,
    config: RunConfig,
    config_json: String,
    stack: LayerStack,
    calibration: Option<CalibrationRecord>,
    run_id: String,
    out: PathBuf,
    outputs: Vec<String>,
}

impl Run {
    fn metadata(&self) -> Vec<String> {
        vec![
            format!("tool: {TOOL} {VERSION}"),
            format!("command: {}", self.command),
            format!("run_id: {}", self.run_id),
            format!("d_gold_nm: {}", fmt_num(self.stack.film_thickness())),
            format!("d_sample_nm: {}", fmt_num(self.stack.sample_thickness())),
            format!("config: {}", self.config_json),
        ]
    }

    fn csv(&mut self, name: &str, header: &[&str]) -> Result<CsvOut, CliError> {
        self.outputs.push(name.to_string());
        CsvOut::create(&self.out.join(name), &self.metadata(), header)
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        self.outputs.push(name.to_string());
        write_json(&self.out.join(name), value)
    }

    fn interferometer(&self) -> Interferometer {
        let c = &self.config;
        let mut s = Interferometer::new(self.stack.clone(), c.wavelength_nm, c.theta_deg);
        s.pol = c.polarization;
        s.fd_step = c.fd_step_riu;
        s.alpha_sq = c.alpha_sq;
        s.beta_sq = c.beta_sq;
        s
    }

    fn finish(self) -> Result<(), CliError> {
        let config: serde_json::Value =
            serde_json::from_str(&self.config_json).map_err(|e| CliError::Config(e.to_string()))?;
        let meta = json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "run_id": self.run_id,
            "config": config,
            "calibration": self.calibration,
            "stack": StackFile::from_stack(&self.stack, self.calibration),
            "d_gold_nm": self.stack.film_thickness(),
            "d_sample_nm": self.stack.sample_thickness(),
            "tolerances": tolerances(),
            "outputs": self.outputs,
        });
        write_json(&self.out.join("run_metadata.json"), &meta)
    }
}

fn sweep(
    command: &'static str,
    args: SweepArgs,
    body: fn(&mut Run) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let config = RunConfig::load(&args.config)?;
    let out = args
        .out
        .or_else(|| config.output_dir.clone())
        .ok_or_else(|| {
            CliError::Config("no output directory: pass --out or set output_dir".into())
        })?;
    std::fs::create_dir_all(&out).map_err(|e| io_err(&out, e))?;
    let config_json =
        serde_json::to_string(&config).map_err(|e| CliError::Config(e.to_string()))?;
    let (stack, calibration) = resolve_stack(&config)?;
    let mut run = Run {
        command,
        run_id: run_id(command, &config_json),
        config,
        config_json,
        stack,
        calibration,
        out,
        outputs: Vec::new(),
    };
    body(&mut run)?;
    run.finish()
}

fn calibrate(args: CalibrateArgs) -> Result<(), CliError> {
    let (base, stack_json) = match &args.stack {
        Some(path) => {
            let file = StackFile::load(path).map_err(|e| CliError::Config(e.to_string()))?;
            (file.to_stack()?, Some(file))
        }
        None => (LayerStack::default_sensor(), None),
    };
    let target = CalibrationTarget {
        wavelength_nm: args.wavelength_nm,
        theta_deg: args.theta_deg,
        n_s: args.target_ns,
    };
    let cal = calibrate_stack(&base, &target, &CalibrationBounds::default())?;
    let record = CalibrationRecord::from(&cal);
    let file = StackFile::from_stack(&cal.stack, Some(record));
    let crossing = find_crossing_ns(
        &cal.stack,
        target.wavelength_nm,
        target.theta_deg,
        target.n_s,
        CROSSING_HALF_WIDTH,
    )?;

    let Some(out) = args.out else {
        println!("{}", file.to_json());
        return Ok(());
    };
    std::fs::create_dir_all(&out).map_err(|e| io_err(&out, e))?;
    let payload = serde_json::to_string(&json!({ "target": target, "stack": stack_json }))
        .map_err(|e| CliError::Config(e.to_string()))?;
    let stack_path = out.join("stack.json");
    std::fs::write(&stack_path, file.to_json() + "\n").map_err(|e| io_err(&stack_path, e))?;
    write_json(
        &out.join("run_metadata.json"),
        &json!({
            "tool": TOOL,
            "version": VERSION,
            "command": "calibrate",
            "run_id": run_id("calibrate", &payload),
            "target": target,
            "input_stack": stack_json,
            "calibration": record,
            "crossing_n_s": crossing,
            "tolerances": tolerances(),
            "outputs": ["stack.json"],
        }),
    )?;
    println!(
        "d_gold_nm={} d_sample_nm={} residual={} crossing_n_s={}",
        fmt_num(record.d_gold_nm),
        fmt_num(record.d_sample_nm),
        fmt_num(record.residual),
        crossing.map_or("nan".into(), fmt_num)
    );
    Ok(())
}

fn spectrum(run: &mut Run) -> Result<(), CliError> {
    let c = run.config.clone();
    let stack = run.stack.with_sample_n(c.spectrum_n_s);
    let rows = c
        .theta_grid_deg
        .points()?
        .into_par_iter()
        .map(|theta| {
            let r = stack_response(&stack, c.wavelength_nm, theta, c.polarization)?;
            Ok(vec![theta, r.transmittance, r.reflectance, r.absorptance])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut out = run.csv("spectrum_theta.csv", &["theta_deg", "T", "R", "A"])?;
    for row in rows {
        out.row(row.into_iter().map(fmt_num))?;
    }
    out.finish()?;

    let s = run.interferometer();
    let rows = c
        .n_s_grid
        .points()?
        .into_par_iter()
        .map(|n| {
            let r = s.response(n)?;
            Ok(vec![
                n,
                r.transmittance,
                r.reflectance,
                r.absorptance,
                r.phi_tr,
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut out = run.csv("spectrum_ns.csv", &["n_s", "T", "R", "A", "phi_tr"])?;
    for row in rows {
        out.row(row.into_iter().map(fmt_num))?;
    }
    out.finish()
}

fn coincidence(run: &mut Run) -> Result<(), CliError> {
    let s = run.interferometer();
    let rows = run
        .config
        .n_s_grid
        .points()?
        .into_par_iter()
        .map(|n| {
            let resp = s.response(n)?;
            let pairs = hom_pair_distribution(&s.bs_point(n)?)?;
            let clicks = click_distribution(&pairs);
            Ok((resp, pairs, clicks, n))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut out = run.csv(
        "response_ns.csv",
        &["n_s", "T", "R", "A", "phi_tr", "abs_T_minus_R"],
    )?;
    for (r, _, _, n) in &rows {
        out.row(
            [
                *n,
                r.transmittance,
                r.reflectance,
                r.absorptance,
                r.phi_tr,
                (r.transmittance - r.reflectance).abs(),
            ]
            .map(fmt_num),
        )?;
    }
    out.finish()?;

    let mut out = run.csv(
        "coincidence.csv",
        &[
            "n_s", "p00", "p10", "p20", "p11", "p0_click", "p1_click", "p2_click",
        ],
    )?;
    for (_, p, k, n) in &rows {
        out.row(
            [
                *n, p.p00, p.p10, p.p20, p.p11, k.p0_click, k.p1_click, k.p2_click,
            ]
            .map(fmt_num),
        )?;
    }
    out.finish()
}

/// φ_αβ for one point: the configured value, or the best scanned peak.
fn chosen_phase(policy: PhasePolicy, scan: Option<&PhaseScan>) -> f64 {
    match (policy, scan) {
        (PhasePolicy::Fixed { phi_ab_rad }, _) => phi_ab_rad,
        (PhasePolicy::Scan, Some(scan)) => scan
            .peaks
            .iter()
            .copied()
            .reduce(|a, b| if b.1 > a.1 { b } else { a })
            .map_or(FRAC_PI_2, |p| p.0),
        (PhasePolicy::Scan, None) => FRAC_PI_2,
    }
}

/// G with its singular flag, given the largest I^(C) of the sweep.
fn enhancement_cell(i_hom: f64, i_classical: f64, max_classical: f64) -> (f64, bool) {
    if i_classical <= (SINGULAR_FRACTION * max_classical).max(I_FLOOR) {
        return (f64::NAN, true);
    }
    match enhancement_ratio(i_hom, i_classical) {
        Ok(g) => (g, false),
        Err(_) => (f64::NAN, true),
    }
}

struct FisherPoint {
    report: FisherReport,
    mixed: f64,
    scan: PhaseScan,
}

fn fisher(run: &mut Run) -> Result<(), CliError> {
    let c = run.config.clone();
    let s = run.interferometer();
    let grid = c.n_s_grid.points()?;
    let points = grid
        .par_iter()
        .map(|&n| {
            let scan = s.phase_scan(n, c.phase_scan_points)?;
            let phi = chosen_phase(c.phi_ab, Some(&scan));
            Ok(FisherPoint {
                report: s.fisher_report(n, phi)?,
                mixed: s.mixed_phase_classical_fisher(n)?.information,
                scan,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let max_classical = points
        .iter()
        .map(|p| p.report.i_classical)
        .fold(0.0, f64::max);

    let mut out = run.csv(
        "fisher.csv",
        &[
            "n_s",
            "I_hom",
            "I_classical",
            "phi_ab_rad",
            "G",
            "singular",
            "I_classical_mixed",
            "bound_hom",
            "bound_classical",
            "near_singular",
        ],
    )?;
    for p in &points {
        let r = &p.report;
        let (g, singular) = enhancement_cell(r.i_hom, r.i_classical, max_classical);
        out.row([
            fmt_num(r.n_s),
            fmt_num(r.i_hom),
            fmt_num(r.i_classical),
            fmt_num(r.phi_ab_used),
            fmt_num(g),
            flag(singular),
            fmt_num(p.mixed),
            fmt_num(precision_bound(r.i_hom)),
            fmt_num(precision_bound(r.i_classical)),
            flag(r.near_singular),
        ])?;
    }
    out.finish()?;

    let rows = points
        .par_iter()
        .map(|p| {
            let n = p.report.n_s;
            let mut rows = Vec::new();
            for &scheme in &c.schemes {
                for phase in [PhaseAssumption::Actual, PhaseAssumption::Quadrature] {
                    let d = s.fisher_decomposition(n, scheme, phase, p.report.phi_ab_used)?;
                    let direct = match (scheme, phase) {
                        (Scheme::Hom, PhaseAssumption::Actual) => p.report.i_hom,
                        (Scheme::Classical, PhaseAssumption::Actual) => p.report.i_classical,
                        _ => f64::NAN,
                    };
                    let m = d.matrix;
                    let mut row = vec![fmt_num(n), tag(&scheme), tag(&phase)];
                    row.extend(
                        [
                            m[0][0],
                            m[0][1],
                            m[0][2],
                            m[1][1],
                            m[1][2],
                            m[2][2],
                            d.derivs[0],
                            d.derivs[1],
                            d.derivs[2],
                            d.contract(),
                            direct,
                        ]
                        .map(fmt_num),
                    );
                    rows.push(row);
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut out = run.csv(
        "decomposition.csv",
        &[
            "n_s",
            "scheme",
            "phase",
            "I_TT",
            "I_TR",
            "I_Tphi",
            "I_RR",
            "I_Rphi",
            "I_phiphi",
            "dT_dns",
            "dR_dns",
            "dphi_dns",
            "contraction",
            "direct",
        ],
    )?;
    for row in rows.into_iter().flatten() {
        out.row(row)?;
    }
    out.finish()?;

    let mut out = run.csv("phase_map.csv", &["n_s", "phi_ab_rad", "I_classical"])?;
    for p in &points {
        for (phi, info) in p.scan.phases.iter().zip(&p.scan.information) {
            out.row([fmt_num(p.report.n_s), fmt_num(*phi), fmt_num(*info)])?;
        }
    }
    out.finish()?;

    let mut out = run.csv(
        "phase_peaks.csv",
        &[
            "n_s",
            "phi_ab_rad",
            "I_classical",
            "offset_from_quadrature_rad",
        ],
    )?;
    for p in &points {
        for (phi, info) in &p.scan.peaks {
            let offset = phi.abs() - FRAC_PI_2;
            out.row([p.report.n_s, *phi, *info, offset].map(fmt_num))?;
        }
    }
    out.finish()?;

    let target = run.calibration.map_or(c.calibration.target.n_s, |r| r.n_s);
    let crossing = find_crossing_ns(
        &run.stack,
        c.wavelength_nm,
        c.theta_deg,
        target,
        CROSSING_HALF_WIDTH,
    )?;
    let best = points
        .iter()
        .filter(|p| (BOUND_WINDOW.0 - 1e-9..=BOUND_WINDOW.1 + 1e-9).contains(&p.report.n_s))
        .map(|p| &p.report)
        .reduce(|a, b| if b.i_hom > a.i_hom { b } else { a });
    let max_hom = points.iter().map(|p| p.report.i_hom).fold(0.0, f64::max);
    let summary = json!({
        "crossing_n_s": crossing,
        "max_i_hom": max_hom,
        "max_i_classical": max_classical,
        "bound_window_n_s": [BOUND_WINDOW.0, BOUND_WINDOW.1],
        "best_hom_in_window": best.map(|r| json!({
            "n_s": r.n_s,
            "i_hom": r.i_hom,
            "bound_riu": precision_bound(r.i_hom),
        })),
    });
    run.json("summary.json", &summary)
}

fn map(run: &mut Run) -> Result<(), CliError> {
    let c = run.config.clone();
    let s = run.interferometer();
    let wavelengths = c.wavelength_grid_nm.points()?;
    let grid = c.n_s_grid.points()?;
    let cells: Vec<(f64, f64)> = wavelengths
        .iter()
        .flat_map(|&w| grid.iter().map(move |&n| (w, n)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(w, n)| {
            let sw = s.with_wavelength(w);
            let scan = match c.phi_ab {
                PhasePolicy::Scan => Some(sw.phase_scan(n, c.phase_scan_points)?),
                PhasePolicy::Fixed { .. } => None,
            };
            let phi = chosen_phase(c.phi_ab, scan.as_ref());
            Ok((
                sw.fisher_hom(n)?.information,
                sw.fisher_classical(n, phi)?,
                phi,
            ))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut out = run.csv(
        "map.csv",
        &[
            "wavelength_nm",
            "n_s",
            "I_hom",
            "I_classical",
            "G",
            "singular",
            "phi_ab_rad",
        ],
    )?;
    for (row_cells, row_values) in cells.chunks(grid.len()).zip(values.chunks(grid.len())) {
        let max_classical = row_values.iter().map(|v| v.1).fold(0.0, f64::max);
        for (&(w, n), &(i_hom, i_c, phi)) in row_cells.iter().zip(row_values) {
            let (g, singular) = enhancement_cell(i_hom, i_c, max_classical);
            out.row([
                fmt_num(w),
                fmt_num(n),
                fmt_num(i_hom),
                fmt_num(i_c),
                fmt_num(g),
                flag(singular),
                fmt_num(phi),
            ])?;
        }
    }
    out.finish()
}

fn budget(run: &mut Run) -> Result<(), CliError> {
    let c = run.config.clone();
    let s = run.interferometer();
    let sources = c.budget.resolved_sources();
    let rows = uncertainty_budget(&s, c.budget.n_analyte, &sources, c.budget.sensitivity_model)?;
    let reference = table_c1();

    let mut out = run.csv(
        "budget.csv",
        &[
            "name",
            "perturbation",
            "unit",
            "uncertainty",
            "divisor",
            "sensitivity",
            "sigma",
            "reference_sensitivity",
            "ratio",
        ],
    )?;
    let mut sum_sq = 0.0;
    for (row, src) in rows.iter().zip(&sources) {
        let reference_c = reference
            .iter()
            .find(|r| r.perturbation == src.perturbation && r.unit == src.unit)
            .and_then(|r| r.sensitivity)
            .unwrap_or(f64::NAN);
        sum_sq += row.sigma * row.sigma;
        out.row([
            row.name.clone(),
            tag(&src.perturbation),
            row.unit.clone(),
            fmt_num(row.uncertainty),
            fmt_num(row.divisor),
            fmt_num(row.sensitivity),
            fmt_num(row.sigma),
            fmt_num(reference_c),
            fmt_num(row.sensitivity / reference_c),
        ])?;
    }
    out.row([
        "combined".to_string(),
        String::new(),
        "RIU".to_string(),
        String::new(),
        String::new(),
        String::new(),
        fmt_num(sum_sq.sqrt()),
        String::new(),
        String::new(),
    ])?;
    out.finish()?;

    let published = uncertainty_budget(
        &s,
        c.budget.n_analyte,
        &reference,
        c.budget.sensitivity_model,
    )?;
    let mut out = run.csv(
        "budget_reference.csv",
        &[
            "name",
            "unit",
            "uncertainty",
            "divisor",
            "sensitivity",
            "sigma",
            "sigma_3sf",
        ],
    )?;
    for row in &published {
        out.row([
            row.name.clone(),
            row.unit.clone(),
            fmt_num(row.uncertainty),
            fmt_num(row.divisor),
            fmt_num(row.sensitivity),
            fmt_num(row.sigma),
            format!("{:.2e}", row.sigma),
        ])?;
    }
    out.finish()
}

fn continuum(run: &mut Run) -> Result<(), CliError> {
    let c = run.config.clone();
    let s = run.interferometer();
    let settings = ContinuumSettings {
        nodes: c.continuum.nodes,
        span: c.continuum.span_fwhm,
        min_span: c.continuum.min_span_fwhm,
    };
    let grid = c.continuum.n_s_grid.unwrap_or(c.n_s_grid).points()?;
    let phases = grid
        .par_iter()
        .map(|&n| {
            let scan = match c.phi_ab {
                PhasePolicy::Scan => Some(s.phase_scan(n, c.phase_scan_points)?),
                PhasePolicy::Fixed { .. } => None,
            };
            Ok(chosen_phase(c.phi_ab, scan.as_ref()))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut cells = Vec::new();
    for &dl in &c.continuum.delta_lambda_nm {
        for (&n, &phi) in grid.iter().zip(&phases) {
            for &scheme in &c.schemes {
                cells.push((dl, n, phi, scheme));
            }
        }
    }
    let values = cells
        .par_iter()
        .map(|&(dl, n, phi, scheme)| {
            let single = match scheme {
                Scheme::Hom => s.fisher_hom(n)?.information,
                Scheme::Classical => s.fisher_classical(n, phi)?,
            };
            let cont = continuum_fisher(scheme, &s, dl, n, phi, &settings)?.information;
            Ok((single, cont))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut out = run.csv(
        "continuum.csv",
        &[
            "delta_lambda_nm",
            "n_s",
            "scheme",
            "phi_ab_rad",
            "I_single",
            "I_continuum",
            "D",
            "undefined",
        ],
    )?;
    for (&(dl, n, phi, scheme), &(single, cont)) in cells.iter().zip(&values) {
        let (d, undefined) = match relative_difference(single, cont) {
            Ok(d) => (d, false),
            Err(_) => (f64::NAN, true),
        };
        out.row([
            fmt_num(dl),
            fmt_num(n),
            tag(&scheme),
            fmt_num(phi),
            fmt_num(single),
            fmt_num(cont),
            fmt_num(d),
            flag(undefined),
        ])?;
    }
    out.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_id_is_stable_and_input_sensitive() {
        let a = run_id("fisher", "{}");
        assert_eq!(a.len(), 16);
        assert_eq!(a, run_id("fisher", "{}"));
        assert_ne!(a, run_id("map", "{}"));
    }

    #[test]
    fn singular_cells() {
        assert!(enhancement_cell(2.0, 0.001, 1.0).1);
        let (g, singular) = enhancement_cell(1.5, 1.0, 10.0);
        assert!(!singular);
        assert_eq!(g, 0.5);
        assert!(enhancement_cell(1.0, 0.0, 0.0).1);
    }

    #[test]
    fn scan_policy_takes_the_largest_peak() {
        let scan = PhaseScan {
            phases: vec![],
            information: vec![],
            peaks: vec![(-1.5, 2.0), (1.5, 3.0)],
        };
        assert_eq!(chosen_phase(PhasePolicy::Scan, Some(&scan)), 1.5);
        assert_eq!(
            chosen_phase(PhasePolicy::Fixed { phi_ab_rad: 0.3 }, Some(&scan)),
            0.3
        );
    }
}
