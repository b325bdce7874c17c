//! On-disk formats: JSON design documents and CSV fidelity traces.
//!
//! Floats are written in their shortest round-trip decimal form, so reading a
//! file back reproduces every value bit for bit.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use starswitch::designer::{reduced_spectrum, DESIGN_SOURCE, DESIGN_TARGET};
use starswitch::{
    DesignSolution, FidelityTrace, ReducedParams, RootChoice, RoutingState, StarSpec,
};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: field `{field}`: {message}")]
    Field {
        path: PathBuf,
        field: &'static str,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Residuals {
    /// `|g_M(e; η)|`
    pub root: f64,
    /// largest `Λ` condition violation
    pub lambda: f64,
    /// largest deviation of the reduced spectrum from the target
    pub spectrum: f64,
}

/// A designed switch and the route its potentials are currently wired for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignFile {
    pub schema_version: u32,
    pub m: usize,
    pub eta: u64,
    pub root_choice: String,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub tau: f64,
    /// `[0, e, ηe, −ηe]`
    pub spectrum: [f64; 4],
    /// every positive root of the design polynomial, ascending
    pub roots: Vec<f64>,
    pub source: usize,
    pub target: usize,
    pub coupling: f64,
    pub potentials: Vec<f64>,
    pub residuals: Residuals,
}

impl DesignFile {
    pub fn from_routing(state: &RoutingState) -> Self {
        let sol = &state.base;
        let p = sol.params;
        Self {
            schema_version: SCHEMA_VERSION,
            m: p.m,
            eta: sol.eta,
            root_choice: sol.root_choice.to_string(),
            a: p.a,
            b: p.b,
            c: p.c,
            d: p.d,
            e: p.e,
            tau: sol.transfer_time,
            spectrum: sol.target_spectrum,
            roots: sol.roots.clone(),
            source: state.source,
            target: state.target,
            coupling: state.realized_spec.coupling(),
            potentials: state.realized_spec.potentials().to_vec(),
            residuals: Residuals {
                root: sol.root_residual,
                lambda: sol.lambda_residual,
                spectrum: sol.spectrum_residual,
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("design file serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self, FileError> {
        serde_json::from_str(text).map_err(|err| FileError::Parse {
            path: path.to_path_buf(),
            message: err.to_string(),
        })
    }

    pub fn read(path: &Path) -> Result<Self, FileError> {
        let text = fs::read_to_string(path).map_err(|source| FileError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, path)
    }

    pub fn write(&self, path: &Path) -> Result<(), FileError> {
        fs::write(path, self.to_json()).map_err(|source| FileError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Rebuilds the routed design, checking each field for consistency.
    pub fn to_routing(&self, path: &Path) -> Result<RoutingState, FileError> {
        let bad = |field: &'static str, message: String| FileError::Field {
            path: path.to_path_buf(),
            field,
            message,
        };
        if self.schema_version != SCHEMA_VERSION {
            return Err(bad(
                "schema_version",
                format!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }
        if self.m == 0 {
            return Err(bad("m", "at least one bystander is required".into()));
        }
        if self.eta < 2 || !self.eta.is_multiple_of(2) {
            return Err(bad(
                "eta",
                format!("{} is not a positive even integer", self.eta),
            ));
        }
        let root_choice: RootChoice = self
            .root_choice
            .parse()
            .map_err(|err: starswitch::Error| bad("root_choice", err.to_string()))?;
        for (field, value) in [
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("d", self.d),
            ("e", self.e),
            ("tau", self.tau),
        ] {
            if !value.is_finite() {
                return Err(bad(field, format!("{value} is not finite")));
            }
        }
        if !(self.c > 0.0) {
            return Err(bad("c", format!("{} must be positive", self.c)));
        }
        if self.e == 0.0 {
            return Err(bad("e", "must be nonzero".into()));
        }
        if ((self.tau - PI / self.e) / self.tau).abs() > 1e-12 {
            return Err(bad(
                "tau",
                format!("{} is not pi/e = {}", self.tau, PI / self.e),
            ));
        }
        let n = self.m + 2;
        if self.potentials.len() != n + 1 {
            return Err(bad(
                "potentials",
                format!(
                    "expected {} entries for M = {}, found {}",
                    n + 1,
                    self.m,
                    self.potentials.len()
                ),
            ));
        }
        for (field, node) in [("source", self.source), ("target", self.target)] {
            if node == 0 || node > n {
                return Err(bad(field, format!("node {node} is not in 1..={n}")));
            }
        }
        if self.source == self.target {
            return Err(bad("target", "must differ from source".into()));
        }
        if self.roots.is_empty() {
            return Err(bad("roots", "no roots listed".into()));
        }

        let params = ReducedParams {
            a: self.a,
            b: self.b,
            c: self.c,
            d: self.d,
            e: self.e,
            m: self.m,
        };
        let mut base_potentials = vec![self.d; n + 1];
        base_potentials[0] = self.a;
        base_potentials[DESIGN_SOURCE] = self.e;
        base_potentials[DESIGN_TARGET] = self.e;
        let base_spec =
            StarSpec::new(self.c, base_potentials).map_err(|err| bad("c", err.to_string()))?;
        let realized_spec = StarSpec::new(self.coupling, self.potentials.clone())
            .map_err(|err| bad("potentials", err.to_string()))?;

        let eta = self.eta as f64;
        let mut sorted_target = [0.0, self.e, eta * self.e, -eta * self.e];
        sorted_target.sort_by(f64::total_cmp);
        let spectrum_residual = reduced_spectrum(&params)
            .iter()
            .zip(&sorted_target)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);

        let base = DesignSolution {
            params,
            eta: self.eta,
            root_choice,
            roots: self.roots.clone(),
            transfer_time: self.tau,
            target_spectrum: self.spectrum,
            root_residual: self.residuals.root,
            lambda_residual: self.residuals.lambda,
            spectrum_residual: spectrum_residual.max(self.residuals.spectrum),
            realized: base_spec,
        };
        Ok(RoutingState {
            base,
            source: self.source,
            target: self.target,
            realized_spec,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct TraceRow {
    t: f64,
    fidelity: f64,
}

/// Writes `t,fidelity` rows under a header line.
pub fn write_trace(trace: &FidelityTrace, path: &Path) -> Result<(), FileError> {
    let io = |source: std::io::Error| FileError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = csv::Writer::from_path(path).map_err(|err| csv_error(err, path))?;
    for (t, fidelity) in trace.iter() {
        writer
            .serialize(TraceRow { t, fidelity })
            .map_err(|err| csv_error(err, path))?;
    }
    writer.flush().map_err(io)
}

pub fn read_trace(path: &Path) -> Result<FidelityTrace, FileError> {
    let mut reader = csv::Reader::from_path(path).map_err(|err| csv_error(err, path))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for row in reader.deserialize() {
        let row: TraceRow = row.map_err(|err| csv_error(err, path))?;
        times.push(row.t);
        values.push(row.fidelity);
    }
    FidelityTrace::new(times, values).map_err(|err| FileError::Parse {
        path: path.to_path_buf(),
        message: err.to_string(),
    })
}

fn csv_error(err: csv::Error, path: &Path) -> FileError {
    if err.is_io_error() {
        match err.into_kind() {
            csv::ErrorKind::Io(source) => FileError::Io {
                path: path.to_path_buf(),
                source,
            },
            _ => unreachable!(),
        }
    } else {
        FileError::Parse {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }
}
