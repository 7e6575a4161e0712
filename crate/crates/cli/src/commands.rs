use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use qsl_core::bounds::{alpha, alpha_endpoint, validity_sweep, Bound, SweepRecord};
use qsl_core::counterexamples::{
    circle_system, run_bd_nonsaturation_with, run_refutation, RefutationSpec, DEFAULT_MARGIN,
};
use qsl_core::evolution::{sample_trajectory_with, SamplingOptions, Trajectory};
use qsl_core::linalg::{HermitianOperator, PureState, DEFAULT_OCCUPATION_TOL};
use qsl_core::random;

use crate::config::{
    AlphaTableConfig, BdGapConfig, Format, Kind, RefuteMlConfig, TrajectoryConfig, ValiditySweepConfig,
};
use crate::error::CliError;
use crate::output::{self, display, float};

/// Tolerances on the invariants checked after a run.
pub const SATURATION_TOL: f64 = 1e-8;
pub const ENERGY_DRIFT_TOL: f64 = 1e-9;
pub const GAP_TOL: f64 = 1e-6;

/// Destination chosen on the command line, overriding the config.
#[derive(Debug, Clone, Default)]
pub struct Destination {
    pub out: Option<String>,
    pub format: Option<Format>,
}

impl Destination {
    fn resolve(&self, kind: Kind, output: &Option<String>, format: Option<Format>) -> (String, Format) {
        let prefix = self
            .out
            .clone()
            .or_else(|| output.clone())
            .unwrap_or_else(|| kind.name().to_string());
        (prefix, self.format.or(format).unwrap_or(Format::Csv))
    }
}

/// What a command did: whether its claim held and which files it wrote.
#[derive(Debug, Serialize)]
pub struct Outcome {
    pub kind: &'static str,
    pub verified: bool,
    pub files: Vec<String>,
    pub summary: serde_json::Value,
}

fn write_trajectory(prefix: &str, format: Format, traj: &Trajectory) -> Result<String, CliError> {
    let path = match format {
        Format::Csv => output::write(prefix, "_trajectory.csv", &output::trajectory_csv(traj))?,
        Format::Json => output::write(prefix, "_trajectory.json", &output::json(traj)?)?,
    };
    Ok(display(&path))
}

pub fn refute_ml(cfg: &RefuteMlConfig, dest: &Destination) -> Result<Outcome, CliError> {
    let spec = match (cfg.theta, cfg.margin) {
        (Some(_), Some(_)) => return Err(CliError::Config("give either theta or margin, not both".into())),
        (Some(theta), None) => RefutationSpec::new(cfg.delta, cfg.numerator, cfg.energy, theta)?,
        (None, margin) => {
            RefutationSpec::with_margin(cfg.delta, cfg.numerator, cfg.energy, margin.unwrap_or(DEFAULT_MARGIN))?
        }
    };
    let (report, traj) = run_refutation(&spec, cfg.samples)?;
    let saturated = report.margins.tau_minus_mt_closed.abs() <= SATURATION_TOL;
    let energy_conserved = report.margins.max_norm_energy_drift <= ENERGY_DRIFT_TOL;
    let verified = report.violated && saturated && energy_conserved;

    let (prefix, format) = dest.resolve(Kind::RefuteMl, &cfg.output, cfg.format);
    let document = json!({
        "report": report,
        "checks": { "saturated": saturated, "energy_conserved": energy_conserved },
    });
    let report_path = output::write(&prefix, "_report.json", &output::json(&document)?)?;
    let traj_path = write_trajectory(&prefix, format, &traj)?;
    Ok(Outcome {
        kind: Kind::RefuteMl.name(),
        verified,
        files: vec![display(&report_path), traj_path],
        summary: json!({
            "theta": spec.theta,
            "energy_uncertainty": report.energy_uncertainty,
            "tau": report.tau,
            "hypothetical_bound": report.hypothetical_bound,
            "violated": report.violated,
        }),
    })
}

fn bd_gap_system(cfg: &BdGapConfig) -> Result<(HermitianOperator, PureState), CliError> {
    match (&cfg.energies, cfg.dim) {
        (Some(_), Some(_)) => Err(CliError::Config("give either energies or dim, not both".into())),
        (Some(energies), None) => {
            let amplitudes = cfg
                .amplitudes
                .as_ref()
                .ok_or_else(|| CliError::Config("energies need matching amplitudes".into()))?;
            if amplitudes.len() != energies.len() {
                return Err(CliError::Config(format!(
                    "{} amplitudes for {} energies",
                    amplitudes.len(),
                    energies.len()
                )));
            }
            let phases = cfg.phases.clone().unwrap_or_else(|| vec![0.0; energies.len()]);
            if phases.len() != energies.len() {
                return Err(CliError::Config(format!(
                    "{} phases for {} energies",
                    phases.len(),
                    energies.len()
                )));
            }
            let amps: Vec<Complex64> = amplitudes
                .iter()
                .zip(&phases)
                .map(|(&r, &phi)| Complex64::from_polar(1.0, phi) * r)
                .collect();
            Ok((
                HermitianOperator::from_real_diagonal(energies)?,
                PureState::from_complex(&amps)?,
            ))
        }
        (None, Some(dim)) => {
            if cfg.amplitudes.is_some() || cfg.phases.is_some() {
                return Err(CliError::Config("amplitudes and phases need explicit energies".into()));
            }
            if dim < 3 {
                return Err(CliError::Config(format!("dim must be at least 3, got {dim}")));
            }
            if !(cfg.spectral_radius > 0.0) || !cfg.spectral_radius.is_finite() {
                return Err(CliError::Config("spectral_radius must be positive".into()));
            }
            let seed = crate::config::seed_override(cfg.seed)?.unwrap_or(0);
            let mut rng = random::seeded(seed, 0);
            let h = random::hermitian(&mut rng, dim, cfg.spectral_radius);
            let u = random::state(&mut rng, dim);
            Ok((h, u))
        }
        (None, None) => Err(CliError::Config("bd-gap needs energies and amplitudes, or dim".into())),
    }
}

pub fn bd_gap(cfg: &BdGapConfig, dest: &Destination) -> Result<Outcome, CliError> {
    let (h, u) = bd_gap_system(cfg)?;
    let report = run_bd_nonsaturation_with(&h, &u, cfg.delta, cfg.samples)?;
    let saturated = (report.bounds.tau_actual - report.bounds.mt_closed.value()).abs() <= SATURATION_TOL;
    let verified = saturated && report.closed_gap > GAP_TOL && report.min_pointwise_gap > 0.0;

    let (prefix, _) = dest.resolve(Kind::BdGap, &cfg.output, cfg.format);
    let document = json!({ "report": report, "checks": { "mt_saturated": saturated } });
    let path = output::write(&prefix, "_report.json", &output::json(&document)?)?;
    Ok(Outcome {
        kind: Kind::BdGap.name(),
        verified,
        files: vec![display(&path)],
        summary: json!({
            "tau": report.bounds.tau_actual,
            "mt_closed": report.bounds.mt_closed,
            "bd_closed": report.bounds.bd_closed,
            "gap": report.closed_gap,
        }),
    })
}

pub fn trajectory(cfg: &TrajectoryConfig, dest: &Destination) -> Result<Outcome, CliError> {
    let sys = circle_system(cfg.energy, cfg.theta, cfg.polar, cfg.azimuth)?;
    let t_max = match cfg.t_max {
        Some(t) => t,
        None => {
            // one full precession of the rotating-frame state
            let radius = sys.frame_generator().spectral_radius();
            if radius <= 1e-14 {
                return Err(CliError::Config(
                    "rotating-frame state is stationary at theta = pi/2; give t_max".into(),
                ));
            }
            PI / radius
        }
    };
    let options = SamplingOptions {
        frame: cfg.frame,
        occupation_tol: cfg.occupation_tol.unwrap_or(DEFAULT_OCCUPATION_TOL),
    };
    let traj = sample_trajectory_with(&sys, t_max, cfg.samples, &options)?;
    let (prefix, format) = dest.resolve(Kind::Trajectory, &cfg.output, cfg.format);
    let path = write_trajectory(&prefix, format, &traj)?;
    let bloch_x_spread = traj.max_drift(|s| s.bloch.map_or(f64::NAN, |b| b[0]));
    Ok(Outcome {
        kind: Kind::Trajectory.name(),
        verified: true,
        files: vec![path],
        summary: json!({ "t_max": t_max, "samples": traj.len(), "bloch_x_spread": bloch_x_spread }),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlphaRow {
    pub delta: f64,
    pub alpha: f64,
    pub arccos_sqrt_delta: f64,
    pub endpoint_value: f64,
    /// `α(δ) < arccos√δ`.
    pub strictly_below_arccos: bool,
    /// `α(δ) ≤ (1 − √δ)π/2 + 1e-12`.
    pub below_endpoint: bool,
    /// `α(δ) ≤ α(δ_prev) + 1e-12`.
    pub monotone: bool,
}

pub fn alpha_rows(cfg: &AlphaTableConfig) -> Result<Vec<AlphaRow>, CliError> {
    if cfg.points == 0 {
        return Err(CliError::Config("alpha table grid is empty (points = 0)".into()));
    }
    let (lo, hi) = (cfg.delta_min, cfg.delta_max);
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
        return Err(CliError::Config(format!(
            "need 0 <= delta_min <= delta_max <= 1, got [{lo}, {hi}]"
        )));
    }
    if cfg.points > 1 && lo == hi {
        return Err(CliError::Config("several points need delta_min < delta_max".into()));
    }
    let mut rows: Vec<AlphaRow> = Vec::with_capacity(cfg.points);
    for k in 0..cfg.points {
        let delta = if k + 1 == cfg.points && cfg.points > 1 {
            hi
        } else if cfg.points == 1 {
            lo
        } else {
            lo + (hi - lo) * k as f64 / (cfg.points - 1) as f64
        };
        let a = alpha(delta)?;
        let arccos = delta.sqrt().acos();
        let endpoint = alpha_endpoint(delta);
        rows.push(AlphaRow {
            delta,
            alpha: a,
            arccos_sqrt_delta: arccos,
            endpoint_value: endpoint,
            strictly_below_arccos: a < arccos,
            below_endpoint: a <= endpoint + 1e-12,
            monotone: rows.last().is_none_or(|prev| a <= prev.alpha + 1e-12),
        });
    }
    Ok(rows)
}

fn alpha_rows_verified(rows: &[AlphaRow]) -> bool {
    rows.iter().all(|r| {
        let interior = (1e-3..=1.0 - 1e-3).contains(&r.delta);
        r.monotone && r.below_endpoint && (!interior || r.alpha < r.arccos_sqrt_delta - 1e-12)
    })
}

pub fn alpha_table(cfg: &AlphaTableConfig, dest: &Destination) -> Result<Outcome, CliError> {
    let rows = alpha_rows(cfg)?;
    let (prefix, format) = dest.resolve(Kind::AlphaTable, &cfg.output, cfg.format);
    let path = match format {
        Format::Json => output::write(&prefix, "_alpha.json", &output::json(&rows)?)?,
        Format::Csv => {
            let mut text = String::from(
                "delta,alpha,arccos_sqrt_delta,endpoint_value,strictly_below_arccos,below_endpoint,monotone\n",
            );
            for r in &rows {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    float(r.delta),
                    float(r.alpha),
                    float(r.arccos_sqrt_delta),
                    float(r.endpoint_value),
                    r.strictly_below_arccos,
                    r.below_endpoint,
                    r.monotone
                ));
            }
            output::write(&prefix, "_alpha.csv", &text)?
        }
    };
    Ok(Outcome {
        kind: Kind::AlphaTable.name(),
        verified: alpha_rows_verified(&rows),
        files: vec![display(&path)],
        summary: json!({ "points": rows.len() }),
    })
}

fn bound_field(b: Option<Bound>) -> String {
    b.map(|b| float(b.value())).unwrap_or_default()
}

fn record_row(r: &SweepRecord) -> String {
    let class = match r.class {
        qsl_core::bounds::SystemClass::Isolated => "isolated",
        qsl_core::bounds::SystemClass::Coupled => "coupled",
    };
    let rep = r.report.as_ref();
    [
        r.system.to_string(),
        class.to_string(),
        r.dim.to_string(),
        float(r.delta),
        rep.is_some().to_string(),
        rep.map(|x| float(x.tau_actual)).unwrap_or_default(),
        bound_field(rep.map(|x| x.mt)),
        bound_field(rep.and_then(|x| x.ml)),
        bound_field(rep.map(|x| x.bd)),
        bound_field(rep.map(|x| x.mt_closed)),
        bound_field(rep.map(|x| x.bd_closed)),
        r.violations.join(";"),
    ]
    .join(",")
}

pub fn validity(cfg: &ValiditySweepConfig, dest: &Destination) -> Result<Outcome, CliError> {
    let mut sweep = cfg.to_sweep();
    if let Some(seed) = crate::config::seed_override(cfg.seed)? {
        sweep.seed = seed;
    }
    let summary = validity_sweep(&sweep)?;
    let (prefix, format) = dest.resolve(Kind::ValiditySweep, &cfg.output, cfg.format);
    let overview = json!({
        "config": summary.config,
        "evaluated": summary.evaluated,
        "unreached": summary.unreached,
        "violations": summary.violations,
        "passed": summary.passed(),
    });
    let summary_path = output::write(&prefix, "_summary.json", &output::json(&overview)?)?;
    let records_path = match format {
        Format::Json => output::write(&prefix, "_records.json", &output::json(&summary.records)?)?,
        Format::Csv => {
            let mut text = String::from("system,class,dim,delta,reached,tau,mt,ml,bd,mt_closed,bd_closed,violations\n");
            for r in &summary.records {
                text.push_str(&record_row(r));
                text.push('\n');
            }
            output::write(&prefix, "_records.csv", &text)?
        }
    };
    Ok(Outcome {
        kind: Kind::ValiditySweep.name(),
        verified: summary.passed(),
        files: vec![display(&summary_path), display(&records_path)],
        summary: overview,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_rows_cover_the_grid() {
        let cfg = AlphaTableConfig {
            delta_min: 0.0,
            delta_max: 1.0,
            points: 11,
            output: None,
            format: None,
        };
        let rows = alpha_rows(&cfg).unwrap();
        assert_eq!(rows.len(), 11);
        assert_eq!(rows[0].delta, 0.0);
        assert_eq!(rows[10].delta, 1.0);
        assert!(!rows[0].strictly_below_arccos);
        assert!(rows[1..10].iter().all(|r| r.strictly_below_arccos));
        assert!(alpha_rows_verified(&rows));
    }

    #[test]
    fn empty_alpha_grid_is_an_error() {
        let cfg = AlphaTableConfig {
            delta_min: 0.0,
            delta_max: 1.0,
            points: 0,
            output: None,
            format: None,
        };
        assert!(matches!(alpha_rows(&cfg), Err(CliError::Config(_))));
    }
}
