//! TOML problem description.

use std::path::Path;

use deltashell::fd_oracle::{FdCase, FdGrid, FdOptions};
use deltashell::limitops::{GammaAtInfinity, LimitResolution, PotentialModel, SpectrumOptions, VectorPotential};
use deltashell::shell_symbol::{InteractionMatrix, DEFAULT_LS_THRESHOLD};
use deltashell::surfaces::SurfaceModel;
use deltashell::transmission1d::GapSearch;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// A coupling coefficient along the surface, as a function of the distance r
/// from the surface origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Constant(f64),
    /// at_infinity + (at_origin − at_infinity)·exp(−r / scale)
    Relaxing { at_origin: f64, at_infinity: f64, scale: f64 },
}

impl Coefficient {
    pub fn at(&self, r: f64) -> f64 {
        match *self {
            Coefficient::Constant(v) => v,
            Coefficient::Relaxing { at_origin, at_infinity, scale } => {
                at_infinity + (at_origin - at_infinity) * (-r / scale).exp()
            }
        }
    }

    pub fn at_infinity(&self) -> f64 {
        match *self {
            Coefficient::Constant(v) => v,
            Coefficient::Relaxing { at_infinity, .. } => at_infinity,
        }
    }

    fn validate(&self, name: &str) -> Result<(), CliError> {
        let ok = match *self {
            Coefficient::Constant(v) => v.is_finite(),
            Coefficient::Relaxing { at_origin, at_infinity, scale } => {
                at_origin.is_finite() && at_infinity.is_finite() && scale > 0.0 && scale.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(CliError::Config(format!("interaction coefficient {name} is not finite or has a non-positive scale")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum InteractionSpec {
    DiagonalPair { gamma: Coefficient, epsilon: Coefficient },
    ElectrostaticLorentz { eta: Coefficient, tau: Coefficient },
}

impl InteractionSpec {
    pub fn at(&self, r: f64) -> InteractionMatrix {
        match self {
            InteractionSpec::DiagonalPair { gamma, epsilon } => {
                InteractionMatrix::DiagonalPair { gamma: gamma.at(r), epsilon: epsilon.at(r) }
            }
            InteractionSpec::ElectrostaticLorentz { eta, tau } => {
                InteractionMatrix::ElectrostaticLorentz { eta: eta.at(r), tau: tau.at(r) }
            }
        }
    }

    pub fn at_infinity(&self) -> GammaAtInfinity {
        let gamma = match self {
            InteractionSpec::DiagonalPair { gamma, epsilon } => {
                InteractionMatrix::DiagonalPair { gamma: gamma.at_infinity(), epsilon: epsilon.at_infinity() }
            }
            InteractionSpec::ElectrostaticLorentz { eta, tau } => {
                InteractionMatrix::ElectrostaticLorentz { eta: eta.at_infinity(), tau: tau.at_infinity() }
            }
        };
        if gamma.is_zero() {
            GammaAtInfinity::Vanishing
        } else {
            GammaAtInfinity::Constant { gamma }
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        match self {
            InteractionSpec::DiagonalPair { gamma, epsilon } => {
                gamma.validate("gamma")?;
                epsilon.validate("epsilon")
            }
            InteractionSpec::ElectrostaticLorentz { eta, tau } => {
                eta.validate("eta")?;
                tau.validate("tau")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    #[serde(default = "zero_potential")]
    pub phi: PotentialModel,
    #[serde(default)]
    pub vector: VectorPotential,
}

fn zero_potential() -> PotentialModel {
    PotentialModel::Constant { value: 0.0 }
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec { phi: zero_potential(), vector: VectorPotential::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    pub ls_threshold: f64,
    pub gap_scan: usize,
    pub gap_tol: f64,
    pub accept_rel: f64,
    pub edge_margin: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let g = GapSearch::default();
        SolverSpec {
            ls_threshold: DEFAULT_LS_THRESHOLD,
            gap_scan: g.n_scan,
            gap_tol: g.tol,
            accept_rel: g.accept_rel,
            edge_margin: g.edge_margin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// Surface samples for the LS checks.
    pub n_surface: usize,
    /// Points on |ξ′| = 1.
    pub n_xi: usize,
    /// Points on the parameter hemisphere.
    pub n_param: usize,
    pub n_dirs: usize,
    pub n_phi: usize,
    /// Rows of the dispersion tables; `xi_max` defaults to 3(|m| + 1).
    pub n_xi_rows: usize,
    pub xi_max: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        let r = LimitResolution::default();
        GridSpec { n_surface: 128, n_xi: 64, n_param: 200, n_dirs: r.n_dirs, n_phi: r.n_phi, n_xi_rows: 33, xi_max: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSpec {
    pub half_length: f64,
    pub points_per_side: usize,
    pub dissipation: f64,
    pub localization: f64,
    pub refinement_tol: f64,
    pub auto_length: bool,
    pub max_half_length: f64,
    /// Relative drift against the baseline that counts as a regression.
    pub drift_tol: f64,
    /// Baseline battery JSON; the committed data when absent.
    pub baseline: Option<String>,
    /// Cases to run; the standard battery when absent.
    pub cases: Option<Vec<FdCase>>,
}

impl Default for OracleSpec {
    fn default() -> Self {
        let o = FdOptions::default();
        OracleSpec {
            half_length: 20.0,
            points_per_side: 200,
            dissipation: o.dissipation,
            localization: o.localization,
            refinement_tol: o.refinement_tol,
            auto_length: o.auto_length,
            max_half_length: o.max_half_length,
            drift_tol: 1e-3,
            baseline: None,
            cases: None,
        }
    }
}

impl OracleSpec {
    pub fn grid(&self) -> FdGrid {
        FdGrid { half_length: self.half_length, points_per_side: self.points_per_side }
    }

    pub fn options(&self) -> FdOptions {
        FdOptions {
            dissipation: self.dissipation,
            localization: self.localization,
            refinement_tol: self.refinement_tol,
            auto_length: self.auto_length,
            max_half_length: self.max_half_length,
            ..FdOptions::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub schema_version: u32,
    pub mass: f64,
    pub surface: SurfaceModel,
    pub interaction: InteractionSpec,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ProblemConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: ProblemConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !self.mass.is_finite() {
            return Err(CliError::Config("mass must be finite".into()));
        }
        self.surface.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.interaction.validate()?;
        self.potential.phi.validate().map_err(|e| CliError::Config(format!("potential phi: {e}")))?;
        for (k, c) in self.potential.vector.components.iter().enumerate() {
            c.validate().map_err(|e| CliError::Config(format!("vector potential component {k}: {e}")))?;
        }
        let s = &self.solver;
        positive("solver.ls_threshold", s.ls_threshold)?;
        positive("solver.gap_tol", s.gap_tol)?;
        positive("solver.accept_rel", s.accept_rel)?;
        positive("solver.edge_margin", s.edge_margin)?;
        if s.gap_scan < 8 {
            return Err(CliError::Config("solver.gap_scan must be at least 8".into()));
        }
        let g = &self.grid;
        if g.n_surface == 0 || g.n_xi < 4 || g.n_param < 8 || g.n_phi == 0 || g.n_xi_rows < 2 {
            return Err(CliError::Config(
                "grid sizes too small (n_surface >= 1, n_xi >= 4, n_param >= 8, n_phi >= 1, n_xi_rows >= 2)".into(),
            ));
        }
        if let Some(x) = g.xi_max {
            positive("grid.xi_max", x)?;
        }
        let o = &self.oracle;
        o.grid().validate().map_err(|e| CliError::Config(format!("oracle grid: {e}")))?;
        positive("oracle.refinement_tol", o.refinement_tol)?;
        positive("oracle.drift_tol", o.drift_tol)?;
        positive("oracle.max_half_length", o.max_half_length)?;
        if !(o.localization > 0.0 && o.localization <= 1.0) {
            return Err(CliError::Config("oracle.localization must lie in (0, 1]".into()));
        }
        if !(o.dissipation >= 0.0 && o.dissipation.is_finite()) {
            return Err(CliError::Config("oracle.dissipation must be non-negative".into()));
        }
        Ok(())
    }

    /// SHA-256 of the parsed configuration, so formatting and comments do
    /// not change it.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn gap_search(&self) -> GapSearch {
        GapSearch {
            n_scan: self.solver.gap_scan,
            tol: self.solver.gap_tol,
            accept_rel: self.solver.accept_rel,
            edge_margin: self.solver.edge_margin,
        }
    }

    pub fn resolution(&self) -> LimitResolution {
        LimitResolution { n_dirs: self.grid.n_dirs, n_phi: self.grid.n_phi }
    }

    pub fn spectrum_options(&self) -> SpectrumOptions {
        let top = self.grid.xi_max.unwrap_or(3.0 * (self.mass.abs() + 1.0));
        let n = self.grid.n_xi_rows;
        let step = top / (n - 1) as f64;
        SpectrumOptions {
            xi_grid: (0..n).map(|k| step * k as f64).collect(),
            search: self.gap_search(),
            branch_threshold: 10.0 * step,
        }
    }
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive")))
    }
}
