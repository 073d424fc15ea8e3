//! Scene files: named sets plus optional tolerance and seed, consumed by
//! the command-line front end.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexSet, Dynamics, SetJson};
use crate::{DEFAULT_SEED, DEFAULT_TOL};

/// On-disk scene document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<SetJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<SetJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Validated scene: parsed sets with the dynamics interiority check done.
#[derive(Debug, Clone)]
pub struct Scene {
    pub omega: Option<ConvexSet>,
    pub dynamics: Option<Dynamics>,
    pub tol: f64,
    pub seed: u64,
}

impl Scene {
    pub fn from_json(text: &str) -> Result<Scene> {
        let file: SceneFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("scene parse error: {e}")))?;
        let omega = file.omega.as_ref().map(ConvexSet::try_from).transpose()?;
        let dynamics = file
            .dynamics
            .as_ref()
            .map(|d| Dynamics::new(ConvexSet::try_from(d)?))
            .transpose()?;
        Ok(Scene {
            omega,
            dynamics,
            tol: file.tol.unwrap_or(DEFAULT_TOL),
            seed: file.seed.unwrap_or(DEFAULT_SEED),
        })
    }

    pub fn require_omega(&self) -> Result<&ConvexSet> {
        self.omega.as_ref().ok_or_else(|| Error::InvalidInput("scene has no \"omega\" set".into()))
    }

    pub fn require_dynamics(&self) -> Result<&Dynamics> {
        self.dynamics
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("scene has no \"dynamics\" set".into()))
    }
}
