//! Gregory quadrature rules and the scalar diagnostics built on them:
//! domain averages of porosity and crystal content, L2 errors between
//! discrete solutions, and the relative-total time series used by the
//! exchange-coefficient calibration.

use crate::error::SimError;
use crate::mesh::Mesh;
use crate::state::State;
use crate::Result;

/// Order of the endpoint-corrected trapezoid (Gregory) rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GregoryOrder {
    Two,
    Four,
}

/// Fourth-order endpoint corrections, frozen as rationals after checking the
/// polynomial-exactness conditions (the rule integrates cubics exactly).
const G4_EDGE: [f64; 3] = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];

/// Quadrature weights on a unit-spaced grid of `m` samples; they sum to
/// `m - 1` so constants integrate exactly.
pub fn gregory_weights(order: GregoryOrder, m: usize) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(SimError::TooFewSamples { needed: 2, got: m });
    }
    let order = effective_order(order, m);
    let mut w = vec![1.0; m];
    match order {
        GregoryOrder::Two => {
            w[0] = 0.5;
            w[m - 1] = 0.5;
        }
        GregoryOrder::Four => {
            for (k, &c) in G4_EDGE.iter().enumerate() {
                w[k] = c;
                w[m - 1 - k] = c;
            }
        }
    }
    Ok(w)
}

/// The fourth-order corrections need seven samples to avoid overlapping;
/// below that the rule downgrades to the trapezoid with a logged warning.
fn effective_order(order: GregoryOrder, m: usize) -> GregoryOrder {
    if order == GregoryOrder::Four && m < 7 {
        log::warn!("Gregory order 4 needs >= 7 samples, got {m}; downgrading to order 2");
        GregoryOrder::Two
    } else {
        order
    }
}

/// Integrates uniformly spaced samples over their span.
pub fn gregory_integrate(samples: &[f64], dx: f64, order: GregoryOrder) -> Result<f64> {
    let w = gregory_weights(order, samples.len())?;
    Ok(dx * samples.iter().zip(&w).map(|(s, wk)| s * wk).sum::<f64>())
}

/// Where a nodal field lives: a uniform 1D grid (Gregory quadrature) or a
/// simplicial mesh (mass-matrix inner products).
pub enum Geometry<'a> {
    UniformLine { dx: f64 },
    Simplicial(&'a Mesh),
}

impl<'a> Geometry<'a> {
    fn check_len(&self, len: usize) -> Result<()> {
        if let Geometry::Simplicial(mesh) = self {
            if mesh.num_nodes() != len {
                return Err(SimError::DimensionMismatch {
                    what: format!(
                        "field has {len} nodes, mesh has {}",
                        mesh.num_nodes()
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Domain average of a nodal field: fourth-order Gregory on lines, the
/// mass-matrix mean `1^T M v / |Omega|` on meshes.
pub fn average_field(values: &[f64], geometry: &Geometry) -> Result<f64> {
    geometry.check_len(values.len())?;
    match geometry {
        Geometry::UniformLine { dx } => {
            let span = dx * (values.len() - 1) as f64;
            Ok(gregory_integrate(values, *dx, GregoryOrder::Four)? / span)
        }
        Geometry::Simplicial(mesh) => {
            let m = crate::fem::assemble_mass(mesh, None)?;
            let weighted = m.spmv(values);
            Ok(weighted.iter().sum::<f64>() / mesh.volume())
        }
    }
}

/// Average porosity of the specimen.
pub fn average_porosity(state: &State, geometry: &Geometry) -> Result<f64> {
    average_field(&state.n, geometry)
}

/// Average crystallized-salt content of the specimen.
pub fn average_crystal(state: &State, geometry: &Geometry) -> Result<f64> {
    average_field(&state.cs, geometry)
}

/// L2 distance between two nodal fields on the same discretization.
pub fn l2_error(v: &[f64], v_ref: &[f64], geometry: &Geometry) -> Result<f64> {
    if v.len() != v_ref.len() {
        return Err(SimError::DimensionMismatch {
            what: format!("field lengths {} vs {}", v.len(), v_ref.len()),
        });
    }
    geometry.check_len(v.len())?;
    let diff: Vec<f64> = v.iter().zip(v_ref).map(|(a, b)| a - b).collect();
    match geometry {
        Geometry::UniformLine { dx } => {
            let sq: Vec<f64> = diff.iter().map(|e| e * e).collect();
            Ok(gregory_integrate(&sq, *dx, GregoryOrder::Four)?.max(0.0).sqrt())
        }
        Geometry::Simplicial(mesh) => {
            // e^T M e accumulated elementwise: the local consistent mass
            // gives |K| d!/(d+2)! ((sum e)^2 + sum e^2).
            let d = mesh.dim;
            let scale = factorial(d) / factorial(d + 2);
            let mut energy = 0.0;
            for e in 0..mesh.num_elements() {
                let mut sum = 0.0;
                let mut sq = 0.0;
                for &node in mesh.element(e) {
                    sum += diff[node];
                    sq += diff[node] * diff[node];
                }
                energy += mesh.element_measures[e] * scale * (sum * sum + sq);
            }
            Ok(energy.max(0.0).sqrt())
        }
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Spatial totals of moisture and crystal content sampled on a uniform time
/// grid; the unit of comparison for the calibration study.
#[derive(Debug, Clone, PartialEq)]
pub struct TotalsSeries {
    pub times: Vec<f64>,
    pub total_theta: Vec<f64>,
    pub total_cs: Vec<f64>,
}

impl TotalsSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Relative discrepancies between a run and a reference trajectory.
///
/// Each sample is normalized by the run's own total (not the reference's).
/// Samples with a vanishing denominator are excluded from the time average
/// and reported in `excluded`.
#[derive(Debug, Clone)]
pub struct RelativeErrors {
    pub e_theta: Vec<f64>,
    pub e_s: Vec<f64>,
    /// Time average of `e_theta` over the sampled span (second-order
    /// Gregory); equals `e_theta[0]` for a single sample.
    pub m_theta: f64,
    pub excluded: Vec<usize>,
}

pub fn relative_errors(run: &TotalsSeries, reference: &TotalsSeries) -> Result<RelativeErrors> {
    if run.times.len() != reference.times.len() {
        return Err(SimError::GridMismatch {
            what: format!(
                "run has {} samples, reference {}",
                run.times.len(),
                reference.times.len()
            ),
        });
    }
    if run.is_empty() {
        return Err(SimError::TooFewSamples { needed: 1, got: 0 });
    }
    for (i, (a, b)) in run.times.iter().zip(&reference.times).enumerate() {
        if (a - b).abs() > 1e-9 * a.abs().max(1.0) {
            return Err(SimError::GridMismatch {
                what: format!("sample {i}: t = {a} vs {b}"),
            });
        }
    }

    let m = run.times.len();
    let mut e_theta = vec![0.0; m];
    let mut e_s = vec![0.0; m];
    let mut excluded = Vec::new();
    for i in 0..m {
        if run.total_theta[i] == 0.0 {
            log::warn!("zero total moisture at sample {i}; excluded from the error series");
            excluded.push(i);
        } else {
            e_theta[i] = (run.total_theta[i] - reference.total_theta[i]).abs() / run.total_theta[i];
        }
        if run.total_cs[i] != 0.0 {
            e_s[i] = (run.total_cs[i] - reference.total_cs[i]).abs() / run.total_cs[i];
        } else if !excluded.contains(&i) && reference.total_cs[i] != 0.0 {
            log::warn!("zero total crystal content at sample {i}; e_s set to 0");
            excluded.push(i);
        }
    }

    let m_theta = if m == 1 {
        e_theta[0]
    } else {
        let dt = (run.times[m - 1] - run.times[0]) / (m - 1) as f64;
        let span = run.times[m - 1] - run.times[0];
        gregory_integrate(&e_theta, dt, GregoryOrder::Two)? / span
    };

    Ok(RelativeErrors {
        e_theta,
        e_s,
        m_theta,
        excluded,
    })
}
