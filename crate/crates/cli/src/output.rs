//! CSV and JSON writers. Floats use 17 significant digits so files round-trip.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use qsl_core::evolution::Trajectory;

use crate::error::CliError;

pub const TRAJECTORY_COLUMNS: [&str; 11] = [
    "t",
    "fidelity",
    "exp_energy",
    "energy_uncertainty",
    "eps_min",
    "eps_max",
    "norm_energy",
    "dual_norm_energy",
    "bloch_x",
    "bloch_y",
    "bloch_z",
];

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = TRAJECTORY_COLUMNS.join(",");
    out.push('\n');
    for s in &traj.samples {
        let fields = [
            s.t,
            s.fidelity,
            s.exp_energy,
            s.energy_uncertainty,
            s.eps_min,
            s.eps_max,
            s.norm_energy,
            s.dual_norm_energy,
        ];
        let mut row: Vec<String> = fields.iter().map(|&x| float(x)).collect();
        match s.bloch {
            Some(b) => row.extend(b.iter().map(|&x| float(x))),
            None => row.extend(std::iter::repeat_n(String::new(), 3)),
        }
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// Writes `<prefix><suffix>` and returns its path.
pub fn write(prefix: &str, suffix: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = PathBuf::from(format!("{prefix}{suffix}"));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
    }
    fs::write(&path, contents).map_err(|e| CliError::io(path.display().to_string(), e))?;
    Ok(path)
}

pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn display(path: &Path) -> String {
    path.display().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::f64::consts::PI] {
            assert_eq!(float(x).parse::<f64>().unwrap(), x);
        }
    }
}
