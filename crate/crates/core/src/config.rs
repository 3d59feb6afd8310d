//! Scenario files: TOML with one table per block and every key optional.
//!
//! ```toml
//! [material]
//! kind = "C"
//! p = 5.0
//!
//! [model]
//! bc = "ss"
//! formulation = "cf"
//! n_elements = 32
//!
//! [output]
//! stations = [1500.0]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::element::ElementKind;
use crate::error::{Error, Result};
use crate::material::{GradingKind, MaterialLaw, SectionGeometry, DEFAULT_E_CERAMIC, DEFAULT_E_METAL, DEFAULT_POISSON};
use crate::q4ref::{Q4Model, Q4SolverKind, Q4Support};
use crate::recovery::{DerivativeRoute, Standardization};
use crate::section::SectionOptions;
use crate::solver::{BeamModel, BoundaryCondition, DeflectionMeasure, LoadCase, NodalLoad, SupportOptions};

pub const DEFAULT_Q: f64 = 5000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialBlock {
    pub kind: GradingKind,
    pub p: f64,
    pub e_metal: f64,
    pub e_ceramic: f64,
    pub poisson: f64,
    /// Layer boundaries; defaults depend on `kind`.
    pub bounds: Option<Vec<f64>>,
}

impl Default for MaterialBlock {
    fn default() -> Self {
        Self {
            kind: GradingKind::TypeA,
            p: 5.0,
            e_metal: DEFAULT_E_METAL,
            e_ceramic: DEFAULT_E_CERAMIC,
            poisson: DEFAULT_POISSON,
            bounds: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcChoice {
    Ss,
    Cc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelBlock {
    pub bc: BcChoice,
    /// Explicit constrained global DOFs; overrides `bc` when present.
    pub fixed_dofs: Option<Vec<usize>>,
    pub formulation: ElementKind,
    pub n_elements: usize,
    pub ss_fix_stretching: bool,
    pub cc_clamp_derivatives: bool,
    pub deflection: DeflectionMeasure,
    pub panels_per_layer: usize,
    pub gauss_points: usize,
    /// Halve the condensed shear stiffness.
    pub variational_half_factor: bool,
}

impl Default for ModelBlock {
    fn default() -> Self {
        let s = SectionOptions::default();
        let sup = SupportOptions::default();
        Self {
            bc: BcChoice::Ss,
            fixed_dofs: None,
            formulation: ElementKind::MixedCF,
            n_elements: 2,
            ss_fix_stretching: sup.ss_fix_stretching,
            cc_clamp_derivatives: sup.cc_clamp_derivatives,
            deflection: DeflectionMeasure::DepthMean,
            panels_per_layer: s.panels_per_layer,
            gauss_points: s.gauss_points,
            variational_half_factor: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoadBlock {
    pub q: f64,
    pub stretch_weight: f64,
    pub nodal: Vec<NodalLoad>,
}

impl Default for LoadBlock {
    fn default() -> Self {
        Self {
            q: DEFAULT_Q,
            stretch_weight: 1.0,
            nodal: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub stations: Vec<f64>,
    pub points: usize,
    pub standardization: Standardization,
    pub derivative: DerivativeRoute,
    pub include_axial_terms: bool,
    /// Overlay the continuum reference on stress profiles.
    pub q4_overlay: bool,
    /// Also write a gnuplot script next to profile CSVs.
    pub gnuplot: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            stations: vec![1500.0],
            points: 201,
            standardization: Standardization::None,
            derivative: DerivativeRoute::Analytic,
            include_axial_terms: false,
            q4_overlay: false,
            gnuplot: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Q4Block {
    pub mx: usize,
    pub my: usize,
    pub support: Option<Q4Support>,
    pub solver: Q4SolverKind,
}

impl Default for Q4Block {
    fn default() -> Self {
        Self {
            mx: 400,
            my: 100,
            support: None,
            solver: Q4SolverKind::BandedCholesky,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub material: MaterialBlock,
    pub geometry: SectionGeometry,
    pub model: ModelBlock,
    pub load: LoadBlock,
    pub output: OutputBlock,
    pub q4: Q4Block,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn law(&self) -> MaterialLaw {
        let m = &self.material;
        let mut law = MaterialLaw::standard(m.kind, m.p);
        law.e_metal = m.e_metal;
        law.e_ceramic = m.e_ceramic;
        law.poisson = m.poisson;
        if let Some(b) = &m.bounds {
            law.bounds = b.clone();
        } else if self.geometry.depth != 200.0 {
            let s = 0.5 * self.geometry.depth / 100.0;
            law.bounds.iter_mut().for_each(|v| *v *= s);
        }
        law
    }

    pub fn section_options(&self) -> SectionOptions {
        SectionOptions {
            panels_per_layer: self.model.panels_per_layer,
            gauss_points: self.model.gauss_points,
            shear_energy_factor: if self.model.variational_half_factor { 0.5 } else { 1.0 },
        }
    }

    pub fn bc(&self) -> BoundaryCondition {
        match (&self.model.fixed_dofs, self.model.bc) {
            (Some(list), _) => BoundaryCondition::Custom(list.clone()),
            (None, BcChoice::Ss) => BoundaryCondition::SimplySupported,
            (None, BcChoice::Cc) => BoundaryCondition::ClampedClamped,
        }
    }

    pub fn beam_model(&self) -> BeamModel {
        BeamModel {
            geometry: self.geometry,
            law: self.law(),
            section_options: self.section_options(),
            n_elements: self.model.n_elements,
            kind: self.model.formulation,
            bc: self.bc(),
            supports: SupportOptions {
                ss_fix_stretching: self.model.ss_fix_stretching,
                cc_clamp_derivatives: self.model.cc_clamp_derivatives,
            },
            load: LoadCase {
                q: self.load.q,
                nodal: self.load.nodal.clone(),
                stretch_weight: self.load.stretch_weight,
            },
        }
    }

    pub fn q4_model(&self) -> Q4Model {
        let support = self.q4.support.unwrap_or(match self.model.bc {
            BcChoice::Ss => Q4Support::SimpleEdges,
            BcChoice::Cc => Q4Support::ClampedEdges,
        });
        Q4Model {
            geometry: self.geometry,
            law: self.law(),
            mx: self.q4.mx,
            my: self.q4.my,
            support,
            q: self.load.q,
            solver: self.q4.solver,
        }
    }
}
