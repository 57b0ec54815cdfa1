//! The four coupled nodal fields at one time level.

use crate::error::SimError;
use crate::params::PhysicalParameters;
use crate::Result;

/// Experiment phase. Imbibition wets the specimen from the bottom base;
/// drying removes moisture through the top and bottom bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Imbibition,
    Drying,
}

impl Phase {
    pub fn name(&self) -> &'static str {
        match self {
            Phase::Imbibition => "imbibition",
            Phase::Drying => "drying",
        }
    }
}

/// Nodal fields over a grid or mesh at a single time level.
///
/// Invariant: all four vectors share the node count and the porosity
/// satisfies `n = n0 - gamma*cs` nodewise.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    /// Volumetric liquid fraction.
    pub theta: Vec<f64>,
    /// Dissolved-ion concentration (g/cm^3).
    pub ci: Vec<f64>,
    /// Crystallized-salt concentration (g/cm^3).
    pub cs: Vec<f64>,
    /// Porosity.
    pub n: Vec<f64>,
}

impl State {
    /// A spatially uniform state; porosity is derived from `cs`.
    pub fn uniform(num_nodes: usize, theta: f64, ci: f64, cs: f64, p: &PhysicalParameters) -> Result<Self> {
        let n = crate::params::porosity_from_cs(cs, p)?;
        Ok(Self {
            theta: vec![theta; num_nodes],
            ci: vec![ci; num_nodes],
            cs: vec![cs; num_nodes],
            n: vec![n; num_nodes],
        })
    }

    /// The imbibition initial condition: the bottom base is saturated and in
    /// contact with the salty solution, the rest of the specimen holds the
    /// ambient moisture and no ions; no crystals anywhere.
    pub fn imbibition_initial(bottom: &[bool], p: &PhysicalParameters) -> Self {
        let n0 = p.porosity_init;
        let theta = bottom
            .iter()
            .map(|&b| if b { n0 } else { p.moisture_ambient })
            .collect();
        let ci = bottom
            .iter()
            .map(|&b| if b { p.ion_supply } else { 0.0 })
            .collect();
        Self {
            theta,
            ci,
            cs: vec![0.0; bottom.len()],
            n: vec![n0; bottom.len()],
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.theta.len()
    }

    /// Checks the structural invariants: equal field lengths, finite values,
    /// and the porosity identity to machine precision.
    pub fn validate(&self, p: &PhysicalParameters) -> Result<()> {
        let m = self.theta.len();
        if self.ci.len() != m || self.cs.len() != m || self.n.len() != m {
            return Err(SimError::DimensionMismatch {
                what: format!(
                    "state fields have lengths {}/{}/{}/{}",
                    m,
                    self.ci.len(),
                    self.cs.len(),
                    self.n.len()
                ),
            });
        }
        for j in 0..m {
            for (what, v) in [
                ("theta", self.theta[j]),
                ("ci", self.ci[j]),
                ("cs", self.cs[j]),
                ("n", self.n[j]),
            ] {
                if !v.is_finite() {
                    return Err(SimError::NonFinite { what });
                }
            }
            let expected = p.porosity_init - p.crystal_vol * self.cs[j];
            if (self.n[j] - expected).abs() > 1e-14 * p.porosity_init.max(1.0) {
                return Err(SimError::DimensionMismatch {
                    what: format!(
                        "porosity identity violated at node {j}: n = {} vs n0 - gamma*cs = {}",
                        self.n[j], expected
                    ),
                });
            }
        }
        Ok(())
    }
}
