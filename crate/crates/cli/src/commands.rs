use std::io::Write;

use glocal::channel::{
    analytic_kraus_t, choi_matrix, kraus_from_choi, stationary_kraus, AnalyticKrausConvention, CP_TOL, KRAUS_DROP_TOL,
};
use glocal::entanglement::{
    concurrence, entangling_power_closed_form, entangling_power_monte_carlo, optimal_local_noise, ClosedFormMode,
};
use glocal::evolution::{evolve, evolve_analytic_pure_global, steady_state_numeric};
use glocal::model::{build_liouvillian_generic, vectorize};
use glocal::numerics::vec_norm;
use glocal::selftest::{run_selftest, SelftestConfig};
use glocal::steady::steady_coefficients;
use glocal::{BasisLabel, ComplexMatrix, DensityMatrix};
use rayon::prelude::*;
use serde_json::json;

use crate::args::Mode;
use crate::error::{CliError, CliResult};
use crate::scan::ScanSpec;
use crate::settings::Settings;

fn load_rho0(settings: &Settings, default: BasisLabel) -> CliResult<DensityMatrix> {
    let Some(path) = &settings.rho0 else {
        return Ok(DensityMatrix::basis(default));
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.clone(), source })?;
    let matrix: ComplexMatrix =
        serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.clone(), source })?;
    Ok(DensityMatrix::new(matrix)?)
}

fn emit(settings: &Settings, bytes: &[u8]) -> CliResult<()> {
    match &settings.out {
        Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::Write { path: path.clone(), source }),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|source| CliError::Write { path: "<stdout>".into(), source }),
    }
}

fn emit_json(settings: &Settings, mut report: serde_json::Value) -> CliResult<()> {
    report["parameters"] = settings.echo();
    let mut text = serde_json::to_string_pretty(&report).expect("reports serialise");
    text.push('\n');
    emit(settings, text.as_bytes())
}

fn emit_csv(settings: &Settings, columns: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut buffer: Vec<u8> = settings.header_lines().iter().map(|l| format!("# {l}\n")).collect::<String>().into_bytes();
    {
        let mut writer = csv::Writer::from_writer(&mut buffer);
        let to_io = |e: csv::Error| CliError::Write { path: "<csv buffer>".into(), source: e.into() };
        writer.write_record(columns).map_err(to_io)?;
        for row in rows {
            writer.write_record(row).map_err(to_io)?;
        }
        writer.flush().map_err(|source| CliError::Write { path: "<csv buffer>".into(), source })?;
    }
    emit(settings, &buffer)
}

fn state_summary(rho: &DensityMatrix) -> CliResult<serde_json::Value> {
    Ok(json!({
        "matrix": rho,
        "trace": rho.matrix().trace().re,
        "min_eigenvalue": rho.min_eigenvalue(),
        "concurrence": concurrence(rho)?,
    }))
}

pub fn steady(settings: &Settings) -> CliResult<()> {
    let p = settings.params()?;
    let rho0 = load_rho0(settings, BasisLabel::GroundGround)?;
    let coefficients = steady_coefficients(&p, &rho0)?;
    let state = coefficients.state();
    let kernel_residual = vec_norm(&build_liouvillian_generic(&p).apply(&vectorize(&state)));
    emit_json(
        settings,
        json!({
            "regime": if coefficients.degenerate { "degenerate" } else { "unique" },
            "initial_state": rho0,
            "steady_state": state_summary(&state)?,
            "coefficients": coefficients,
            "kernel_residual": kernel_residual,
        }),
    )
}

pub fn evolve_cmd(settings: &Settings) -> CliResult<()> {
    let p = settings.params()?;
    let t = settings.t.expect("evolve has a default time");
    let rho0 = load_rho0(settings, BasisLabel::ExcitedExcited)?;
    let state = evolve(&p, &rho0, t)?;
    let analytic_deviation = if p.is_degenerate() {
        Some(state.max_abs_diff(&evolve_analytic_pure_global(&rho0, t)?))
    } else {
        None
    };
    emit_json(
        settings,
        json!({
            "initial_state": rho0,
            "state": state_summary(&state)?,
            "analytic_deviation": analytic_deviation,
        }),
    )
}

fn reference_states() -> Vec<DensityMatrix> {
    let mut states: Vec<DensityMatrix> = (0..4).filter_map(BasisLabel::from_index).map(DensityMatrix::basis).collect();
    states.push(DensityMatrix::singlet());
    states.push(DensityMatrix::maximally_mixed());
    states
}

pub fn kraus(settings: &Settings) -> CliResult<()> {
    let p = settings.params()?;
    let set = match (settings.t, settings.analytic) {
        (None, true) => return Err(CliError::Usage("--analytic needs --t".into())),
        (None, false) => stationary_kraus(&p)?,
        (Some(t), true) => {
            if !p.is_degenerate() {
                return Err(CliError::Usage("--analytic is only available at gamma = 1, n_g = 0".into()));
            }
            analytic_kraus_t(t, AnalyticKrausConvention::ACCEPTED)?
        }
        (Some(t), false) => kraus_from_choi(&choi_matrix(&p, t)?, KRAUS_DROP_TOL)?,
    };
    // Compare against direct evolution on a handful of reference inputs.
    let mut channel_residual = 0.0f64;
    for rho in reference_states() {
        let direct = match settings.t {
            Some(t) => evolve(&p, &rho, t)?,
            None => steady_state_numeric(&p, &rho)?,
        };
        channel_residual = channel_residual.max(set.apply_matrix(rho.matrix()).max_abs_diff(direct.matrix()));
    }
    emit_json(
        settings,
        json!({
            "map": if settings.t.is_some() { "time_t" } else { "stationary" },
            "count": set.len(),
            "completeness_residual": set.completeness_residual(),
            "channel_residual": channel_residual,
            "operators": set.operators(),
        }),
    )
}

pub fn choi(settings: &Settings) -> CliResult<()> {
    let p = settings.params()?;
    let t = settings.t.expect("choi has a default time");
    let c = choi_matrix(&p, t)?;
    let min_eigenvalue = c.min_eigenvalue()?;
    if min_eigenvalue < -CP_TOL {
        return Err(glocal::Error::NotCompletelyPositive { eigenvalue: min_eigenvalue }.into());
    }
    emit_json(
        settings,
        json!({
            "choi": c.matrix(),
            "trace": c.trace(),
            "min_eigenvalue": min_eigenvalue,
            "hermiticity_deviation": c.hermiticity_deviation(),
            "trace_preservation_residual": c.trace_preservation_residual(),
        }),
    )
}

pub fn epower(settings: &Settings) -> CliResult<()> {
    let p = settings.params()?;
    let result = match settings.mode {
        Mode::Exact => entangling_power_closed_form(&p, ClosedFormMode::Exact)?,
        Mode::Limit => entangling_power_closed_form(&p, ClosedFormMode::Limit)?,
        Mode::Mc => entangling_power_monte_carlo(&p, settings.samples, settings.seed)?,
    };
    emit_json(settings, json!({ "degenerate": p.is_degenerate(), "entangling_power": result }))
}

pub fn scan(settings: &Settings) -> CliResult<()> {
    let spec = ScanSpec {
        axes: settings.axes.clone(),
        fixed: [settings.gamma, settings.n_g, settings.n_l],
        mode: settings.mode,
        mode_explicit: settings.mode_explicit,
        samples: settings.samples,
        seed: settings.seed,
    };
    let rows = spec.run()?;
    let two_axis = spec.axes.len() == 2;
    let mut columns = vec!["gamma", "n_g", "n_l", "value", "unclamped", "std_error"];
    if two_axis {
        columns.push("region");
    }
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let mut r: Vec<String> = row.params.iter().map(f64::to_string).collect();
            r.extend([row.result.value, row.result.unclamped, row.result.std_error].map(|x| x.to_string()));
            if two_axis {
                r.push(u8::from(row.result.value > 0.0).to_string());
            }
            r
        })
        .collect();
    emit_csv(settings, &columns, &records)
}

pub fn optimal_curve(settings: &Settings) -> CliResult<()> {
    if let Some(g) = settings.gammas.iter().find(|&&g| !(0.0..1.0).contains(&g)) {
        return Err(CliError::Usage(format!("optimal-curve needs gamma in [0, 1), got {g}")));
    }
    let results = settings
        .gammas
        .par_iter()
        .map(|&g| optimal_local_noise(g, settings.n_g, settings.search_max))
        .collect::<glocal::Result<Vec<_>>>()?;
    let records: Vec<Vec<String>> = settings
        .gammas
        .iter()
        .zip(&results)
        .map(|(g, r)| {
            vec![
                g.to_string(),
                settings.n_g.to_string(),
                r.n_l_star.to_string(),
                r.e_star.to_string(),
                u8::from(r.e_star > 0.0).to_string(),
            ]
        })
        .collect();
    emit_csv(settings, &["gamma", "n_g", "n_l_star", "e_star", "positive"], &records)
}

pub fn selftest(settings: &Settings) -> CliResult<()> {
    let config = SelftestConfig { mc_samples: settings.samples, seed: settings.seed, ..SelftestConfig::default() };
    let report = run_selftest(&config);
    for g in &report.groups {
        eprintln!("{} {}: {}", if g.passed { "PASS" } else { "FAIL" }, g.name, g.detail);
    }
    if settings.out.is_some() {
        emit_json(settings, json!({ "passed": report.passed(), "groups": report.groups }))?;
    }
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.groups.iter().filter(|g| !g.passed).map(|g| g.name).collect();
        Err(CliError::Selftest(failed.join(", ")))
    }
}
