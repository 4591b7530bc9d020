use std::path::{Path, PathBuf};

use mstperc::mst::WeightLaw;
use mstperc::percolation::ArmTemplate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, LabResult};

/// Largest box half-width for continuum experiments without `--allow-large`.
pub const DESK_CONTINUUM_N: usize = 32;
/// Largest box half-width for lattice experiments without `--allow-large`.
pub const DESK_LATTICE_N: usize = 64;
pub const DESK_REPLICATES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    CltPoisson,
    CltLattice,
    ArmDecay,
    VarianceScaling,
    SteinBound,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::CltPoisson => "clt_poisson",
            Kind::CltLattice => "clt_lattice",
            Kind::ArmDecay => "arm_decay",
            Kind::VarianceScaling => "variance_scaling",
            Kind::SteinBound => "stein_bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Poisson,
    Lattice,
}

fn two() -> usize {
    2
}

fn one() -> f64 {
    1.0
}

fn one_rep() -> usize {
    1
}

fn default_bootstrap() -> usize {
    200
}

/// One experiment, read from a single JSON document. Box sizes are
/// half-widths: `n` stands for `B(n) = [-n, n]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default = "two")]
    pub dimension: usize,
    pub sizes: Vec<usize>,
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    /// Point process or lattice; fixed by the kind for the CLT runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Model>,
    #[serde(default = "one")]
    pub intensity: f64,
    #[serde(default)]
    pub law: WeightLaw,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arm: Option<ArmTemplate>,
    /// Radii or levels for arm decay.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    #[serde(default = "default_bootstrap")]
    pub bootstrap_reps: usize,
    #[serde(default = "one_rep")]
    pub inner_reps: usize,
    /// Odd number of Poisson blocks per axis; block side is `n / blocks_per_axis`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks_per_axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn bad<T>(msg: impl Into<String>) -> LabResult<T> {
    Err(LabError::Config(msg.into()))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> LabResult<Self> {
        serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The model actually simulated.
    pub fn resolved_model(&self) -> Option<Model> {
        match self.kind {
            Kind::CltPoisson => Some(Model::Poisson),
            Kind::CltLattice => Some(Model::Lattice),
            Kind::ArmDecay => match self.arm {
                Some(ArmTemplate::Continuum { .. }) => Some(Model::Poisson),
                Some(ArmTemplate::Lattice { .. }) => Some(Model::Lattice),
                None => None,
            },
            Kind::VarianceScaling | Kind::SteinBound => self.model,
        }
    }

    /// Sizes sorted and deduplicated, the order rows are emitted in.
    pub fn size_grid(&self) -> Vec<usize> {
        let mut s = self.sizes.clone();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Blocks per axis for the Poisson block model at size `n`.
    pub fn blocks_for(&self, n: usize) -> usize {
        self.blocks_per_axis.unwrap_or(if n % 2 == 1 { n } else { n - 1 })
    }

    pub fn validate(&self, allow_large: bool) -> LabResult<()> {
        if self.sizes.is_empty() {
            return bad("sizes must be non-empty");
        }
        if self.sizes.contains(&0) {
            return bad("sizes must be at least 1");
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1");
        }
        if self.dimension == 0 {
            return bad("dimension must be at least 1");
        }
        match self.kind {
            Kind::CltPoisson | Kind::CltLattice => {
                if self.model.is_some() {
                    return bad(format!("model is implied by kind {}", self.kind.name()));
                }
                if self.bootstrap_reps < 2 {
                    return bad("bootstrap_reps must be at least 2");
                }
            }
            Kind::VarianceScaling | Kind::SteinBound => {
                if self.model.is_none() {
                    return bad(format!("kind {} needs a model (poisson or lattice)", self.kind.name()));
                }
            }
            Kind::ArmDecay => {
                if self.model.is_some() {
                    return bad("arm_decay takes its model from the arm template");
                }
                let Some(arm) = &self.arm else {
                    return bad("arm_decay needs an arm template");
                };
                if self.params.is_empty() {
                    return bad("arm_decay needs a non-empty params grid");
                }
                let dim = match arm {
                    ArmTemplate::Continuum { dim, .. } | ArmTemplate::Lattice { dim, .. } => *dim,
                };
                if dim != self.dimension {
                    return bad(format!("arm template dimension {dim} differs from dimension {}", self.dimension));
                }
            }
        }
        if self.kind != Kind::ArmDecay && (self.arm.is_some() || !self.params.is_empty()) {
            return bad("arm and params are only used by arm_decay");
        }
        if self.kind != Kind::SteinBound && (self.blocks_per_axis.is_some() || self.inner_reps != 1) {
            return bad("blocks_per_axis and inner_reps are only used by stein_bound");
        }
        if self.inner_reps == 0 {
            return bad("inner_reps must be at least 1");
        }
        let model = self.resolved_model().expect("validated above");
        match model {
            Model::Poisson => {
                if !(self.intensity.is_finite() && self.intensity > 0.0) {
                    return bad(format!("intensity must be positive, got {}", self.intensity));
                }
            }
            Model::Lattice => {
                if self.dimension < 2 {
                    return bad("lattice experiments need dimension >= 2");
                }
                self.law.validate()?;
            }
        }
        if self.kind == Kind::SteinBound && model == Model::Poisson {
            for n in self.size_grid() {
                let m = self.blocks_for(n);
                if m.is_multiple_of(2) {
                    return bad(format!("blocks_per_axis must be odd, got {m}"));
                }
                let s = n as f64 / m as f64;
                if !(1.0..=2.0).contains(&s) {
                    return bad(format!("block side {s} at n={n} is outside [1, 2]"));
                }
            }
        }
        if !allow_large {
            let limit = match model {
                Model::Poisson => DESK_CONTINUUM_N,
                Model::Lattice => DESK_LATTICE_N,
            };
            if let Some(&n) = self.sizes.iter().find(|&&n| n > limit) {
                return bad(format!("size {n} exceeds the desk limit {limit}; pass --allow-large"));
            }
            if self.replicates > DESK_REPLICATES {
                return bad(format!(
                    "{} replicates exceed the desk limit {DESK_REPLICATES}; pass --allow-large",
                    self.replicates
                ));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, ignoring the output location.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}
