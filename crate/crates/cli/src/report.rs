use deltashell::shell_symbol::{LsPoint, LsReport};
use serde::{Deserialize, Serialize};

pub const TOOL: &str = "deltashell";

/// Report envelope written as `<command>.json`. It carries no wall-clock
/// data, so identical inputs give identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport<R> {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: Option<String>,
    pub warnings: Vec<String>,
    pub result: R,
}

impl<R: Serialize> RunReport<R> {
    pub fn new(command: &str, config_hash: Option<String>, warnings: Vec<String>, result: R) -> Self {
        RunReport {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_hash,
            warnings,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// An LS check without its per-sample evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LsSummary {
    pub pass: bool,
    pub min_abs_det: f64,
    pub argmin: LsPoint,
    /// Distance of the argmin sample from the surface origin.
    pub argmin_radius: f64,
    pub threshold: f64,
    pub evaluations: usize,
    pub mirror_asymmetry: Option<f64>,
}

impl LsSummary {
    pub fn from_report(r: &LsReport, argmin_radius: f64) -> Self {
        LsSummary {
            pass: r.pass,
            min_abs_det: r.min_abs_det,
            argmin: r.argmin,
            argmin_radius,
            threshold: r.threshold,
            evaluations: r.samples.len(),
            mirror_asymmetry: r.mirror_asymmetry,
        }
    }
}
