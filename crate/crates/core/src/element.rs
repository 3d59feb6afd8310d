//! Two-node beam elements with cubic Hermite kinematics.
//!
//! Each node carries `(u, u_x, w, w_x, θ, θ_x, φ, φ_x)`; an element vector
//! stacks node `a` then node `b`. The mixed elements interpolate the
//! resultants `(N, Mw, Mθ, R, Q)` independently and condense the force
//! parameters at element level, so the assembled system has displacement
//! unknowns only.

use nalgebra::{DMatrix, DVector, Matrix5, SMatrix, SVector, Vector5};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::guarded_inverse;
use crate::quadrature::GaussRule;
use crate::section::SectionModel;

pub const DOFS_PER_NODE: usize = 8;
pub const DOFS_PER_ELEMENT: usize = 16;
/// Gauss points used for all element integrals.
pub const ELEMENT_GAUSS_POINTS: usize = 6;

pub type Matrix16 = SMatrix<f64, 16, 16>;
pub type Vector16 = SVector<f64, 16>;
pub type StrainMatrix = SMatrix<f64, 5, 16>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    /// Mixed element whose bending moment carries the exact particular
    /// solution of `Mw'' + q = 0`.
    #[serde(alias = "cf", alias = "CF")]
    MixedCF,
    /// Mixed element with quadratic polynomials for every resultant.
    #[serde(alias = "c", alias = "C")]
    MixedC,
    /// Displacement element with the conventional section stiffness.
    #[serde(alias = "dts", alias = "DTS")]
    DisplacementDTS,
}

impl ElementKind {
    pub const ALL: [ElementKind; 3] = [ElementKind::DisplacementDTS, ElementKind::MixedC, ElementKind::MixedCF];

    /// Number of force parameters condensed per element.
    pub fn force_parameters(self) -> usize {
        match self {
            ElementKind::MixedCF => 14,
            ElementKind::MixedC => 15,
            ElementKind::DisplacementDTS => 0,
        }
    }

    pub fn is_mixed(self) -> bool {
        !matches!(self, ElementKind::DisplacementDTS)
    }

    pub fn label(self) -> &'static str {
        match self {
            ElementKind::MixedCF => "cf",
            ElementKind::MixedC => "c",
            ElementKind::DisplacementDTS => "dts",
        }
    }
}

impl std::fmt::Display for ElementKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for ElementKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cf" | "mixedcf" => Ok(ElementKind::MixedCF),
            "c" | "mixedc" => Ok(ElementKind::MixedC),
            "dts" | "displacementdts" => Ok(ElementKind::DisplacementDTS),
            other => Err(Error::Config(format!("unknown formulation `{other}`"))),
        }
    }
}

/// Values and first two derivatives of the four cubic Hermite functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteBasis {
    pub value: [f64; 4],
    pub d1: [f64; 4],
    pub d2: [f64; 4],
}

pub fn hermite_basis(x: f64, le: f64) -> HermiteBasis {
    let (l2, l3) = (le * le, le * le * le);
    let (x2, x3) = (x * x, x * x * x);
    HermiteBasis {
        value: [
            2.0 * x3 / l3 - 3.0 * x2 / l2 + 1.0,
            x3 / l2 - 2.0 * x2 / le + x,
            -2.0 * x3 / l3 + 3.0 * x2 / l2,
            x3 / l2 - x2 / le,
        ],
        d1: [
            6.0 * x2 / l3 - 6.0 * x / l2,
            3.0 * x2 / l2 - 4.0 * x / le + 1.0,
            -6.0 * x2 / l3 + 6.0 * x / l2,
            3.0 * x2 / l2 - 2.0 * x / le,
        ],
        d2: [
            12.0 * x / l3 - 6.0 / l2,
            6.0 * x / l2 - 4.0 / le,
            -12.0 * x / l3 + 6.0 / l2,
            6.0 * x / l2 - 2.0 / le,
        ],
    }
}

/// Kinematic fields in the element vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Axial = 0,
    Transverse = 1,
    Warping = 2,
    Stretching = 3,
}

/// Element-vector indices of the Hermite coefficients of `field`.
pub fn field_dofs(field: Field) -> [usize; 4] {
    let k = 2 * field as usize;
    [k, k + 1, DOFS_PER_NODE + k, DOFS_PER_NODE + k + 1]
}

/// Maps the element vector to `(ε0, κw, κθ, φ, γ0)` at local coordinate `x`.
pub fn strain_interp(x: f64, le: f64) -> StrainMatrix {
    let hb = hermite_basis(x, le);
    let mut nt = StrainMatrix::zeros();
    let u = field_dofs(Field::Axial);
    let w = field_dofs(Field::Transverse);
    let th = field_dofs(Field::Warping);
    let ph = field_dofs(Field::Stretching);
    for k in 0..4 {
        nt[(0, u[k])] = hb.d1[k];
        nt[(1, w[k])] = -hb.d2[k];
        nt[(2, th[k])] = hb.d1[k];
        nt[(3, ph[k])] = hb.value[k];
        nt[(4, th[k])] += hb.value[k];
        nt[(4, ph[k])] += hb.d1[k];
    }
    nt
}

/// Interpolated value of `field` at `x` from an element vector.
pub fn interpolate(field: Field, x: f64, le: f64, phi: &Vector16) -> f64 {
    let hb = hermite_basis(x, le);
    field_dofs(field).iter().zip(hb.value).map(|(&i, h)| phi[i] * h).sum()
}

/// Force modes `P(x)` (5×nβ) and the particular part `F(x)` such that the
/// resultants are `P β + F`.
pub fn force_modes(x: f64, q: f64, kind: ElementKind) -> Result<ModeSet> {
    let quad = [1.0, x, x * x];
    match kind {
        ElementKind::MixedCF => {
            let mut p = DMatrix::zeros(5, 14);
            for (c, v) in quad.iter().enumerate() {
                p[(0, c)] = *v;
                p[(2, 5 + c)] = *v;
                p[(3, 8 + c)] = *v;
                p[(4, 11 + c)] = *v;
            }
            p[(1, 3)] = 1.0;
            p[(1, 4)] = x;
            let f = Vector5::new(0.0, -0.5 * q * x * x, 0.0, 0.0, 0.0);
            Ok((p, f))
        }
        ElementKind::MixedC => {
            let mut p = DMatrix::zeros(5, 15);
            for r in 0..5 {
                for (c, v) in quad.iter().enumerate() {
                    p[(r, 3 * r + c)] = *v;
                }
            }
            Ok((p, Vector5::zeros()))
        }
        ElementKind::DisplacementDTS => Err(Error::Unsupported(
            "displacement elements have no force modes".into(),
        )),
    }
}

/// Force modes `P` paired with the load particular solution `F`.
pub type ModeSet = (DMatrix<f64>, Vector5<f64>);

/// First and second x-derivatives of `P(x)` and `F(x)`.
pub fn force_mode_derivatives(x: f64, q: f64, kind: ElementKind) -> Result<(ModeSet, ModeSet)> {
    let (p, _) = force_modes(x, q, kind)?;
    let mut d1 = DMatrix::zeros(5, p.ncols());
    let mut d2 = DMatrix::zeros(5, p.ncols());
    match kind {
        ElementKind::MixedCF => {
            for (r, start) in [(0, 0), (2, 5), (3, 8), (4, 11)] {
                d1[(r, start + 1)] = 1.0;
                d1[(r, start + 2)] = 2.0 * x;
                d2[(r, start + 2)] = 2.0;
            }
            d1[(1, 4)] = 1.0;
            let f1 = Vector5::new(0.0, -q * x, 0.0, 0.0, 0.0);
            let f2 = Vector5::new(0.0, -q, 0.0, 0.0, 0.0);
            Ok(((d1, f1), (d2, f2)))
        }
        ElementKind::MixedC => {
            for r in 0..5 {
                d1[(r, 3 * r + 1)] = 1.0;
                d1[(r, 3 * r + 2)] = 2.0 * x;
                d2[(r, 3 * r + 2)] = 2.0;
            }
            Ok(((d1, Vector5::zeros()), (d2, Vector5::zeros())))
        }
        ElementKind::DisplacementDTS => unreachable!(),
    }
}

/// Integrals over one element of the mixed functional.
#[derive(Debug, Clone)]
pub struct ElementIntegrals {
    /// `∫ Pᵀ Nt dx`, nβ×16.
    pub hpn: DMatrix<f64>,
    /// `∫ Pᵀ Dt⁻¹ P dx`, nβ×nβ.
    pub hpp: DMatrix<f64>,
    /// `∫ Fᵀ Nt dx`.
    pub gfn: Vector16,
    /// `∫ Pᵀ Dt⁻¹ F dx`.
    pub gpf: DVector<f64>,
    /// `∫ Fᵀ Dt⁻¹ F dx`.
    pub gff: f64,
}

pub fn element_integrals(le: f64, q: f64, compliance: &Matrix5<f64>, kind: ElementKind) -> Result<ElementIntegrals> {
    let nb = kind.force_parameters();
    if nb == 0 {
        return Err(Error::Unsupported("element integrals apply to mixed elements".into()));
    }
    let rule = GaussRule::new(ELEMENT_GAUSS_POINTS);
    let c = DMatrix::from_column_slice(5, 5, compliance.as_slice());
    let mut hpn = DMatrix::zeros(nb, DOFS_PER_ELEMENT);
    let mut hpp = DMatrix::zeros(nb, nb);
    let mut gfn = Vector16::zeros();
    let mut gpf = DVector::zeros(nb);
    let mut gff = 0.0;
    for (x, w) in rule.mapped(0.0, le) {
        let (p, f) = force_modes(x, q, kind)?;
        let nt = strain_interp(x, le);
        let nt = DMatrix::from_column_slice(5, 16, nt.as_slice());
        let f = DVector::from_column_slice(f.as_slice());
        let cp = &c * &p;
        let cf = &c * &f;
        hpn += p.transpose() * &nt * w;
        hpp += p.transpose() * &cp * w;
        gfn += Vector16::from_column_slice((nt.transpose() * &f * w).as_slice());
        gpf += p.transpose() * &cf * w;
        gff += f.dot(&cf) * w;
    }
    let hpp = 0.5 * (&hpp + hpp.transpose());
    Ok(ElementIntegrals { hpn, hpp, gfn, gpf, gff })
}

/// Element matrices ready for assembly.
#[derive(Debug, Clone)]
pub struct ElementMatrices {
    pub kind: ElementKind,
    pub le: f64,
    pub q: f64,
    pub ke: Matrix16,
    /// Load contribution of the particular force field, added to the
    /// consistent nodal load.
    pub load_correction: Vector16,
    pub integrals: Option<ElementIntegrals>,
    pub hpp_inverse: Option<DMatrix<f64>>,
}

/// Condenses the force parameters: `Ke = Hpnᵀ Hpp⁻¹ Hpn` and the load
/// correction `Hpnᵀ Hpp⁻¹ Gpf − Gfn`.
pub fn mixed_stiffness(integrals: &ElementIntegrals) -> Result<(Matrix16, Vector16, DMatrix<f64>)> {
    let hpp_inv = guarded_inverse(&integrals.hpp, "Hpp")?;
    let hpn = &integrals.hpn;
    let ke = hpn.transpose() * &hpp_inv * hpn;
    let ke = 0.5 * (&ke + ke.transpose());
    let corr = hpn.transpose() * (&hpp_inv * &integrals.gpf);
    let corr = Vector16::from_column_slice(corr.as_slice()) - integrals.gfn;
    Ok((Matrix16::from_column_slice(ke.as_slice()), corr, hpp_inv))
}

/// `Ke = ∫ Ntᵀ blockdiag(Dn, D55) Nt dx`.
pub fn displacement_stiffness(le: f64, stiffness: &Matrix5<f64>) -> Matrix16 {
    let rule = GaussRule::new(ELEMENT_GAUSS_POINTS);
    let mut ke = Matrix16::zeros();
    for (x, w) in rule.mapped(0.0, le) {
        let nt = strain_interp(x, le);
        ke += nt.transpose() * stiffness * nt * w;
    }
    0.5 * (ke + ke.transpose())
}

/// Force parameters from a solved element vector:
/// `β = Hpp⁻¹ (Hpn Φ − Gpf)`.
pub fn recover_beta(phi: &Vector16, integrals: &ElementIntegrals, hpp_inverse: &DMatrix<f64>) -> DVector<f64> {
    let phi = DVector::from_column_slice(phi.as_slice());
    hpp_inverse * (&integrals.hpn * phi - &integrals.gpf)
}

/// Consistent nodal load of a uniform line load `q`. The transverse DOFs
/// take the Hermite weights; the stretching DOFs take the same weights
/// scaled by `stretch_weight`, the value of `g` at the load line.
pub fn consistent_load(le: f64, q: f64, stretch_weight: f64) -> Vector16 {
    let weights = [q * le / 2.0, q * le * le / 12.0, q * le / 2.0, -q * le * le / 12.0];
    let mut f = Vector16::zeros();
    for (k, &i) in field_dofs(Field::Transverse).iter().enumerate() {
        f[i] += weights[k];
    }
    if stretch_weight != 0.0 {
        for (k, &i) in field_dofs(Field::Stretching).iter().enumerate() {
            f[i] += stretch_weight * weights[k];
        }
    }
    f
}

/// Builds the element of `kind` with length `le` under uniform load `q`.
pub fn build_element(section: &SectionModel, le: f64, q: f64, kind: ElementKind) -> Result<ElementMatrices> {
    match kind {
        ElementKind::DisplacementDTS => Ok(ElementMatrices {
            kind,
            le,
            q,
            ke: displacement_stiffness(le, &section.conventional_5x5()),
            load_correction: Vector16::zeros(),
            integrals: None,
            hpp_inverse: None,
        }),
        _ => {
            let compliance = section.dt_inverse()?;
            let integrals = element_integrals(le, q, &compliance, kind)?;
            let (ke, load_correction, hpp_inv) = mixed_stiffness(&integrals)?;
            Ok(ElementMatrices {
                kind,
                le,
                q,
                ke,
                load_correction,
                integrals: Some(integrals),
                hpp_inverse: Some(hpp_inv),
            })
        }
    }
}
