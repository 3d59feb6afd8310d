//! Beam models: mesh, supports, loads, assembly and the banded solve.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::element::{
    build_element, consistent_load, recover_beta, ElementKind, ElementMatrices, Vector16, DOFS_PER_ELEMENT,
    DOFS_PER_NODE,
};
use crate::error::{Error, Result};
use crate::linalg::{backward_error, residual_norm, BandedSym};
use crate::material::{MaterialLaw, SectionGeometry};
use crate::section::{SectionModel, SectionOptions};

/// Half-bandwidth of the assembled beam stiffness.
pub const BEAM_HALF_BANDWIDTH: usize = DOFS_PER_ELEMENT - 1;

/// Relative pivot below which the factorization reports a zero-energy mode.
const PIVOT_TOLERANCE: f64 = 1e-11;

const DOF_NAMES: [&str; DOFS_PER_NODE] = ["u", "u_x", "w", "w_x", "theta", "theta_x", "phi", "phi_x"];

/// Offsets of the nodal DOFs within a node block.
pub mod dof {
    pub const U: usize = 0;
    pub const U_X: usize = 1;
    pub const W: usize = 2;
    pub const W_X: usize = 3;
    pub const THETA: usize = 4;
    pub const THETA_X: usize = 5;
    pub const PHI: usize = 6;
    pub const PHI_X: usize = 7;
}

pub fn dof_label(global: usize) -> String {
    format!("node {} {}", global / DOFS_PER_NODE, DOF_NAMES[global % DOFS_PER_NODE])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    SimplySupported,
    ClampedClamped,
    /// Explicit list of global DOF indices held at zero.
    Custom(Vec<usize>),
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ss" | "simply_supported" => Ok(BoundaryCondition::SimplySupported),
            "cc" | "clamped_clamped" => Ok(BoundaryCondition::ClampedClamped),
            other => Err(Error::Config(format!("unknown boundary condition `{other}`"))),
        }
    }
}

impl BoundaryCondition {
    pub fn label(&self) -> &'static str {
        match self {
            BoundaryCondition::SimplySupported => "ss",
            BoundaryCondition::ClampedClamped => "cc",
            BoundaryCondition::Custom(_) => "custom",
        }
    }
}

/// Variants of the support DOF sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportOptions {
    /// Hold the stretching amplitude `φ` at simple supports.
    pub ss_fix_stretching: bool,
    /// Also clamp `u_x`, `θ_x`, `φ_x` at clamped ends.
    pub cc_clamp_derivatives: bool,
}

impl Default for SupportOptions {
    fn default() -> Self {
        Self {
            ss_fix_stretching: true,
            cc_clamp_derivatives: false,
        }
    }
}

/// A transverse point load; it works through both `w` and `φ` of its node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodalLoad {
    pub node: usize,
    pub force: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadCase {
    /// Uniform line load (N/mm), positive in the deflection direction.
    pub q: f64,
    pub nodal: Vec<NodalLoad>,
    /// Value of the stretching shape `g` along the line where `q` acts.
    pub stretch_weight: f64,
}

impl LoadCase {
    pub fn uniform(q: f64) -> Self {
        Self {
            q,
            nodal: Vec::new(),
            stretch_weight: 1.0,
        }
    }
}

/// Which transverse displacement is reported as "the" deflection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeflectionMeasure {
    /// Depth average of `u_y = w + g φ`, i.e. `w + 2φ/3`.
    DepthMean,
    /// `u_y` on the reference axis, `w + φ`.
    Axis,
    /// The rigid transverse DOF `w` alone.
    Reference,
}

impl DeflectionMeasure {
    pub fn stretch_factor(self) -> f64 {
        match self {
            DeflectionMeasure::DepthMean => 2.0 / 3.0,
            DeflectionMeasure::Axis => 1.0,
            DeflectionMeasure::Reference => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamModel {
    pub geometry: SectionGeometry,
    pub law: MaterialLaw,
    pub section_options: SectionOptions,
    pub n_elements: usize,
    pub kind: ElementKind,
    pub bc: BoundaryCondition,
    pub supports: SupportOptions,
    pub load: LoadCase,
}

impl BeamModel {
    pub fn new(law: MaterialLaw, kind: ElementKind, n_elements: usize, bc: BoundaryCondition, q: f64) -> Self {
        Self {
            geometry: SectionGeometry::default(),
            law,
            section_options: SectionOptions::default(),
            n_elements,
            kind,
            bc,
            supports: SupportOptions::default(),
            load: LoadCase::uniform(q),
        }
    }

    pub fn element_length(&self) -> f64 {
        self.geometry.length / self.n_elements as f64
    }

    pub fn n_nodes(&self) -> usize {
        self.n_elements + 1
    }

    pub fn n_dofs(&self) -> usize {
        DOFS_PER_NODE * self.n_nodes()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_elements == 0 {
            return Err(Error::Domain("at least one element is required".into()));
        }
        self.geometry.validate()?;
        self.law.validate()?;
        for p in &self.load.nodal {
            if p.node >= self.n_nodes() {
                return Err(Error::Domain(format!("nodal load on missing node {}", p.node)));
            }
        }
        if let BoundaryCondition::Custom(list) = &self.bc {
            if let Some(bad) = list.iter().find(|&&d| d >= self.n_dofs()) {
                return Err(Error::Domain(format!("constrained DOF {bad} out of range")));
            }
        }
        Ok(())
    }

    /// Sorted global DOFs held at zero.
    pub fn fixed_dofs(&self) -> Vec<usize> {
        let last = DOFS_PER_NODE * self.n_elements;
        let mut fixed = match &self.bc {
            BoundaryCondition::SimplySupported => {
                let mut v = vec![dof::U, dof::W, last + dof::W];
                if self.supports.ss_fix_stretching {
                    v.extend([dof::PHI, last + dof::PHI]);
                }
                v
            }
            BoundaryCondition::ClampedClamped => {
                let mut per_node = vec![dof::U, dof::W, dof::W_X, dof::THETA, dof::PHI];
                if self.supports.cc_clamp_derivatives {
                    per_node.extend([dof::U_X, dof::THETA_X, dof::PHI_X]);
                }
                [0, last]
                    .iter()
                    .flat_map(|&base| per_node.iter().map(move |&o| base + o))
                    .collect()
            }
            BoundaryCondition::Custom(list) => list.clone(),
        };
        fixed.sort_unstable();
        fixed.dedup();
        fixed
    }

    pub fn section(&self) -> Result<SectionModel> {
        SectionModel::with_options(self.geometry, self.law.clone(), self.section_options)
    }
}

/// Assembled, unconstrained system.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub stiffness: BandedSym,
    pub load: Vec<f64>,
    pub element: ElementMatrices,
}

pub fn assemble(model: &BeamModel, section: &SectionModel) -> Result<AssembledSystem> {
    model.validate()?;
    let le = model.element_length();
    let element = build_element(section, le, model.load.q, model.kind)?;
    let fe = consistent_load(le, model.load.q, model.load.stretch_weight) + element.load_correction;
    let mut k = BandedSym::zeros(model.n_dofs(), BEAM_HALF_BANDWIDTH);
    let mut f = vec![0.0; model.n_dofs()];
    for e in 0..model.n_elements {
        let base = DOFS_PER_NODE * e;
        for i in 0..DOFS_PER_ELEMENT {
            f[base + i] += fe[i];
            for j in 0..=i {
                k.add(base + i, base + j, element.ke[(i, j)]);
            }
        }
    }
    for p in &model.load.nodal {
        f[DOFS_PER_NODE * p.node + dof::W] += p.force;
        f[DOFS_PER_NODE * p.node + dof::PHI] += p.force;
    }
    Ok(AssembledSystem {
        stiffness: k,
        load: f,
        element,
    })
}

/// Constrained copy of the system: fixed rows and columns replaced by
/// identity rows with zero right-hand side.
pub fn apply_bcs(system: &AssembledSystem, fixed: &[usize]) -> (BandedSym, Vec<f64>) {
    let mut k = system.stiffness.clone();
    let mut f = system.load.clone();
    for &d in fixed {
        k.constrain(d);
        f[d] = 0.0;
    }
    (k, f)
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub model: BeamModel,
    pub section: SectionModel,
    pub element: ElementMatrices,
    pub dofs: Vec<f64>,
    /// Force parameters per element (empty for displacement elements).
    pub betas: Vec<DVector<f64>>,
    /// `(global DOF, reaction)` at every constrained DOF, as `KΦ − F`.
    pub reactions: Vec<(usize, f64)>,
    /// `‖K Φ − F‖₂ / ‖F‖₂` of the constrained system. Bounded below by the
    /// rounding of `Φ` itself, which grows quickly with mesh refinement.
    pub residual: f64,
    /// Normwise backward error of the constrained solve.
    pub backward_error: f64,
}

impl Solution {
    pub fn node_dof(&self, node: usize, offset: usize) -> f64 {
        self.dofs[DOFS_PER_NODE * node + offset]
    }

    pub fn element_vector(&self, e: usize) -> Vector16 {
        Vector16::from_column_slice(&self.dofs[DOFS_PER_NODE * e..DOFS_PER_NODE * e + DOFS_PER_ELEMENT])
    }

    /// Transverse displacement at the centre node.
    pub fn midspan_deflection(&self, measure: DeflectionMeasure) -> Result<f64> {
        if !self.model.n_elements.is_multiple_of(2) {
            return Err(Error::Domain("mid-span sampling needs an even element count".into()));
        }
        let node = self.model.n_elements / 2;
        Ok(self.node_dof(node, dof::W) + measure.stretch_factor() * self.node_dof(node, dof::PHI))
    }

    /// Sum of the reactions on the `w` DOFs.
    pub fn transverse_reaction(&self) -> f64 {
        self.reactions
            .iter()
            .filter(|(d, _)| d % DOFS_PER_NODE == dof::W)
            .map(|(_, r)| r)
            .sum()
    }
}

pub fn solve(model: &BeamModel) -> Result<Solution> {
    let section = model.section()?;
    solve_with_section(model, section)
}

pub fn solve_with_section(model: &BeamModel, section: SectionModel) -> Result<Solution> {
    let system = assemble(model, &section)?;
    let fixed = model.fixed_dofs();
    let (k, f) = apply_bcs(&system, &fixed);
    let factor = k.clone().cholesky(PIVOT_TOLERANCE).map_err(|z| rigid_mode_error(z.null_vector))?;
    let dofs = factor.solve_refined(&k, &f, 3);
    let residual = residual_norm(&k, &dofs, &f);
    let backward_error = backward_error(&k, &dofs, &f);

    let kd = system.stiffness.matvec(&dofs);
    let reactions = fixed.iter().map(|&d| (d, kd[d] - system.load[d])).collect();

    let mut betas = Vec::new();
    if let (Some(ints), Some(hinv)) = (&system.element.integrals, &system.element.hpp_inverse) {
        for e in 0..model.n_elements {
            let phi = Vector16::from_column_slice(&dofs[DOFS_PER_NODE * e..DOFS_PER_NODE * e + DOFS_PER_ELEMENT]);
            betas.push(recover_beta(&phi, ints, hinv));
        }
    }
    Ok(Solution {
        model: model.clone(),
        section,
        element: system.element,
        dofs,
        betas,
        reactions,
        residual,
        backward_error,
    })
}

fn rigid_mode_error(null_vector: Vec<f64>) -> Error {
    let mut ranked: Vec<(usize, f64)> = null_vector.iter().copied().enumerate().filter(|(_, v)| v.abs() > 0.5).collect();
    ranked.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
    let names: Vec<String> = ranked.iter().take(4).map(|(i, _)| dof_label(*i)).collect();
    let more = ranked.len().saturating_sub(4);
    let dominant = if more > 0 {
        format!("{} (+{more} more)", names.join(", "))
    } else {
        names.join(", ")
    };
    Error::RigidMode { dominant, null_vector }
}
