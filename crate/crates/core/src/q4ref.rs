//! Plane-stress bilinear quadrilateral model of the beam, used as the
//! continuum reference.
//!
//! The mesh is a regular `mx × my` grid over `[0, L] × [-h/2, h/2]`. Nodes
//! are numbered column by column (`y` fastest) so the half-bandwidth stays
//! at `2·my + 5`. The modulus is evaluated at every Gauss point. A positive
//! line load `q` acts along `+y` on the face `y = h/2`, the same sign
//! convention as the beam models.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pcg, BandedSym};
use crate::material::{MaterialLaw, SectionGeometry};
use crate::recovery::StressSample;

/// Normwise backward error every solve must reach.
pub const RESIDUAL_TARGET: f64 = 1e-10;
const REFINEMENT_STEPS: usize = 3;

type Matrix8 = SMatrix<f64, 8, 8>;
type Vector8 = SVector<f64, 8>;
type StrainDisp = SMatrix<f64, 3, 8>;

const GAUSS_2: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];
/// Local node order: (ξ, η) corners counter-clockwise from (-1, -1).
const CORNERS: [(f64, f64); 4] = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Q4Support {
    /// `u_y` held on every node of both end edges, `u_x` at the left
    /// mid-height node.
    SimpleEdges,
    /// `u_y` held only at the mid-height node of each end, `u_x` at the
    /// left one.
    SimpleMidHeight,
    /// `u_x` and `u_y` held on every node of both end edges.
    ClampedEdges,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Q4SolverKind {
    BandedCholesky,
    /// Jacobi-preconditioned conjugate gradients to relative residual 1e-10.
    ConjugateGradient,
}

/// How stresses are recovered from the Gauss-point values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Q4StressRecovery {
    /// Gauss values averaged to each element centroid, then interpolated
    /// bilinearly over the lattice of centroids (linear extrapolation in the
    /// half-element strips along the edges).
    #[default]
    CentroidLattice,
    /// Gauss values extrapolated to the element corners and averaged at
    /// shared nodes. Carries the parasitic bending mode of the fully
    /// integrated element into surface values.
    NodalExtrapolation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Q4Model {
    pub geometry: SectionGeometry,
    pub law: MaterialLaw,
    pub mx: usize,
    pub my: usize,
    pub support: Q4Support,
    /// Line load (N/mm); the face traction is `q / b`.
    pub q: f64,
    pub solver: Q4SolverKind,
}

impl Q4Model {
    pub fn new(law: MaterialLaw, mx: usize, my: usize, support: Q4Support, q: f64) -> Self {
        Self {
            geometry: SectionGeometry::default(),
            law,
            mx,
            my,
            support,
            q,
            solver: Q4SolverKind::BandedCholesky,
        }
    }

    fn node(&self, i: usize, j: usize) -> usize {
        i * (self.my + 1) + j
    }

    pub fn n_nodes(&self) -> usize {
        (self.mx + 1) * (self.my + 1)
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.n_nodes()
    }

    pub fn half_bandwidth(&self) -> usize {
        2 * self.my + 5
    }

    fn dx(&self) -> f64 {
        self.geometry.length / self.mx as f64
    }

    fn dy(&self) -> f64 {
        self.geometry.depth / self.my as f64
    }

    fn y_of(&self, j: usize) -> f64 {
        -0.5 * self.geometry.depth + j as f64 * self.dy()
    }

    fn element_nodes(&self, i: usize, j: usize) -> [usize; 4] {
        [self.node(i, j), self.node(i + 1, j), self.node(i + 1, j + 1), self.node(i, j + 1)]
    }

    fn element_dofs(&self, i: usize, j: usize) -> [usize; 8] {
        let n = self.element_nodes(i, j);
        [2 * n[0], 2 * n[0] + 1, 2 * n[1], 2 * n[1] + 1, 2 * n[2], 2 * n[2] + 1, 2 * n[3], 2 * n[3] + 1]
    }

    pub fn validate(&self) -> Result<()> {
        if self.mx < 2 || self.my < 2 {
            return Err(Error::Domain("the reference mesh needs at least 2 × 2 elements".into()));
        }
        self.geometry.validate()?;
        self.law.validate()
    }

    fn elasticity(&self, y: f64) -> Matrix3<f64> {
        let e = self.law.young_unchecked(y);
        let nu = self.law.poisson;
        let c = e / (1.0 - nu * nu);
        Matrix3::new(c, c * nu, 0.0, c * nu, c, 0.0, 0.0, 0.0, c * 0.5 * (1.0 - nu))
    }

    fn strain_displacement(&self, xi: f64, eta: f64) -> StrainDisp {
        let (a, b) = (0.5 * self.dx(), 0.5 * self.dy());
        let mut bm = StrainDisp::zeros();
        for (k, &(xk, yk)) in CORNERS.iter().enumerate() {
            let dndx = 0.25 * xk * (1.0 + yk * eta) / a;
            let dndy = 0.25 * yk * (1.0 + xk * xi) / b;
            bm[(0, 2 * k)] = dndx;
            bm[(1, 2 * k + 1)] = dndy;
            bm[(2, 2 * k)] = dndy;
            bm[(2, 2 * k + 1)] = dndx;
        }
        bm
    }

    fn gauss_y(&self, j: usize, eta: f64) -> f64 {
        self.y_of(j) + 0.5 * self.dy() * (1.0 + eta)
    }

    /// Stiffness of any element in row `j` (all columns are identical).
    fn row_stiffness(&self, j: usize) -> Matrix8 {
        let jac = 0.25 * self.dx() * self.dy();
        let t = self.geometry.width;
        let mut k = Matrix8::zeros();
        for &xi in &GAUSS_2 {
            for &eta in &GAUSS_2 {
                let bm = self.strain_displacement(xi, eta);
                let d = self.elasticity(self.gauss_y(j, eta));
                k += bm.transpose() * d * bm * (jac * t);
            }
        }
        k
    }

    /// Sorted constrained DOFs.
    pub fn fixed_dofs(&self) -> Vec<usize> {
        let mid = self.my / 2;
        let (left, right) = (0, self.mx);
        let mut v = Vec::new();
        match self.support {
            Q4Support::SimpleEdges => {
                for j in 0..=self.my {
                    v.push(2 * self.node(left, j) + 1);
                    v.push(2 * self.node(right, j) + 1);
                }
                v.push(2 * self.node(left, mid));
            }
            Q4Support::SimpleMidHeight => {
                v.push(2 * self.node(left, mid));
                v.push(2 * self.node(left, mid) + 1);
                v.push(2 * self.node(right, mid) + 1);
            }
            Q4Support::ClampedEdges => {
                for j in 0..=self.my {
                    for i in [left, right] {
                        v.push(2 * self.node(i, j));
                        v.push(2 * self.node(i, j) + 1);
                    }
                }
            }
        }
        v.sort_unstable();
        v.dedup();
        v
    }

    fn load_vector(&self) -> Vec<f64> {
        let mut f = vec![0.0; self.n_dofs()];
        let share = 0.5 * self.q * self.dx();
        for i in 0..self.mx {
            for end in [i, i + 1] {
                f[2 * self.node(end, self.my) + 1] += share;
            }
        }
        f
    }

    /// `K u - f` computed element by element in compensated arithmetic, so
    /// the cancellation between large stiffness terms does not swamp it.
    #[allow(clippy::needless_range_loop)]
    fn apply(&self, rows: &[Matrix8], u: &[f64], f: &[f64]) -> Vec<f64> {
        let mut hi: Vec<f64> = f.iter().map(|v| -v).collect();
        let mut lo = vec![0.0; self.n_dofs()];
        for i in 0..self.mx {
            for j in 0..self.my {
                let dofs = self.element_dofs(i, j);
                let ke = &rows[j];
                for a in 0..8 {
                    let (mut s, mut c) = (hi[dofs[a]], lo[dofs[a]]);
                    for b in 0..8 {
                        let (x, y) = (ke[(a, b)], u[dofs[b]]);
                        let p = x * y;
                        let e = x.mul_add(y, -p);
                        let t = s + p;
                        let z = t - s;
                        c += (s - (t - z)) + (p - z) + e;
                        s = t;
                    }
                    hi[dofs[a]] = s;
                    lo[dofs[a]] = c;
                }
            }
        }
        hi.iter().zip(&lo).map(|(h, l)| h + l).collect()
    }
}

/// Solved reference model.
#[derive(Debug, Clone)]
pub struct Q4Solution {
    pub model: Q4Model,
    pub displacements: Vec<f64>,
    pub reactions: Vec<(usize, f64)>,
    /// `‖f − K u‖₂ / ‖f‖₂` over the free DOFs.
    pub residual: f64,
    /// `‖f − K u‖∞ / (‖K‖∞ ‖u‖∞ + ‖f‖∞)`.
    pub backward_error: f64,
    row_stiffness: Vec<Matrix8>,
    nodal_stress: Vec<Vector3<f64>>,
    /// Element-mean stresses, row-major by column index `i`.
    centroid_stress: Vec<Vector3<f64>>,
}

#[allow(clippy::needless_range_loop)]
pub fn q4_solve(model: &Q4Model) -> Result<Q4Solution> {
    model.validate()?;
    let rows: Vec<Matrix8> = (0..model.my).into_par_iter().map(|j| model.row_stiffness(j)).collect();
    let fixed = model.fixed_dofs();
    let mut is_fixed = vec![false; model.n_dofs()];
    for &d in &fixed {
        is_fixed[d] = true;
    }

    let mut k = BandedSym::zeros(model.n_dofs(), model.half_bandwidth());
    let mut row_abs = vec![0.0f64; model.n_dofs()];
    for i in 0..model.mx {
        for j in 0..model.my {
            let dofs = model.element_dofs(i, j);
            let ke = &rows[j];
            for a in 0..8 {
                row_abs[dofs[a]] += (0..8).map(|b| ke[(a, b)].abs()).sum::<f64>();
                if is_fixed[dofs[a]] {
                    continue;
                }
                for b in 0..8 {
                    if !is_fixed[dofs[b]] && dofs[b] <= dofs[a] {
                        k.add(dofs[a], dofs[b], ke[(a, b)]);
                    }
                }
            }
        }
    }
    for &d in &fixed {
        k.set(d, d, 1.0);
    }
    let load = model.load_vector();
    let mut rhs = load.clone();
    for &d in &fixed {
        rhs[d] = 0.0;
    }

    let inf_norm = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let k_norm = inf_norm(&row_abs);
    let f_norm = inf_norm(&rhs);
    let norm2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let free_residual = |u: &[f64]| -> (Vec<f64>, Vec<f64>, f64) {
        let excess = model.apply(&rows, u, &load);
        let r: Vec<f64> = (0..excess.len()).map(|d| if is_fixed[d] { 0.0 } else { -excess[d] }).collect();
        let backward = inf_norm(&r) / (k_norm * inf_norm(u) + f_norm);
        (excess, r, backward)
    };

    let (displacements, excess, r, backward_error) = match model.solver {
        Q4SolverKind::BandedCholesky => {
            let factor = k.cholesky(1e-12).map_err(|z| Error::RigidMode {
                dominant: format!("continuum DOF {} (node {})", z.index, z.index / 2),
                null_vector: z.null_vector,
            })?;
            let mut u = factor.solve(&rhs);
            let (mut excess, mut r, mut be) = free_residual(&u);
            for _ in 0..REFINEMENT_STEPS {
                let du = factor.solve(&r);
                let trial: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + b).collect();
                let next = free_residual(&trial);
                if norm2(&next.1) >= norm2(&r) {
                    break;
                }
                u = trial;
                (excess, r, be) = next;
            }
            (u, excess, r, be)
        }
        Q4SolverKind::ConjugateGradient => {
            let u = pcg(&k, &rhs, 0.1 * RESIDUAL_TARGET, 20 * model.n_dofs())?;
            let (excess, r, be) = free_residual(&u);
            (u, excess, r, be)
        }
    };
    if backward_error > RESIDUAL_TARGET {
        return Err(Error::NotConverged {
            iterations: REFINEMENT_STEPS,
            residual: backward_error,
        });
    }
    let residual = norm2(&r) / norm2(&rhs);
    let reactions = fixed.iter().map(|&d| (d, excess[d])).collect();

    let mut sol = Q4Solution {
        model: model.clone(),
        displacements,
        reactions,
        residual,
        backward_error,
        row_stiffness: rows,
        nodal_stress: Vec::new(),
        centroid_stress: Vec::new(),
    };
    sol.nodal_stress = sol.average_nodal_stress();
    sol.centroid_stress = (0..model.mx)
        .flat_map(|i| (0..model.my).map(move |j| (i, j)))
        .map(|(i, j)| sol.gauss_stresses(i, j).iter().sum::<Vector3<f64>>() / 4.0)
        .collect();
    Ok(sol)
}

impl Q4Solution {
    fn element_displacements(&self, i: usize, j: usize) -> Vector8 {
        let dofs = self.model.element_dofs(i, j);
        Vector8::from_fn(|k, _| self.displacements[dofs[k]])
    }

    /// Stresses `(σx, σy, τxy)` at the four Gauss points of an element,
    /// in corner order.
    pub fn gauss_stresses(&self, i: usize, j: usize) -> [Vector3<f64>; 4] {
        let ue = self.element_displacements(i, j);
        let m = &self.model;
        std::array::from_fn(|k| {
            let (xi, eta) = (CORNERS[k].0 * GAUSS_2[1], CORNERS[k].1 * GAUSS_2[1]);
            m.elasticity(m.gauss_y(j, eta)) * (m.strain_displacement(xi, eta) * ue)
        })
    }

    fn average_nodal_stress(&self) -> Vec<Vector3<f64>> {
        let m = &self.model;
        let mut sum = vec![Vector3::zeros(); m.n_nodes()];
        let mut count = vec![0u32; m.n_nodes()];
        let s3 = 3f64.sqrt();
        for i in 0..m.mx {
            for j in 0..m.my {
                let gp = self.gauss_stresses(i, j);
                let nodes = m.element_nodes(i, j);
                for (c, &(xc, yc)) in CORNERS.iter().enumerate() {
                    // corner expressed in the Gauss-point coordinate system
                    let (r, s) = (xc * s3, yc * s3);
                    let mut v = Vector3::zeros();
                    for (k, &(xk, yk)) in CORNERS.iter().enumerate() {
                        v += gp[k] * (0.25 * (1.0 + xk * r) * (1.0 + yk * s));
                    }
                    sum[nodes[c]] += v;
                    count[nodes[c]] += 1;
                }
            }
        }
        sum.into_iter().zip(count).map(|(s, c)| s / c as f64).collect()
    }

    fn cell(&self, x: f64, y: f64) -> Result<(usize, usize, f64, f64)> {
        let m = &self.model;
        let g = &m.geometry;
        let tol = 1e-9;
        if x < -tol * g.length || x > g.length * (1.0 + tol) || y.abs() > 0.5 * g.depth * (1.0 + tol) {
            return Err(Error::Domain(format!("station ({x}, {y}) outside the continuum model")));
        }
        let tx = (x / m.dx()).clamp(0.0, m.mx as f64);
        let ty = ((y + 0.5 * g.depth) / m.dy()).clamp(0.0, m.my as f64);
        let i = (tx.floor() as usize).min(m.mx - 1);
        let j = (ty.floor() as usize).min(m.my - 1);
        Ok((i, j, 2.0 * (tx - i as f64) - 1.0, 2.0 * (ty - j as f64) - 1.0))
    }

    fn shape(xi: f64, eta: f64) -> [f64; 4] {
        std::array::from_fn(|k| 0.25 * (1.0 + CORNERS[k].0 * xi) * (1.0 + CORNERS[k].1 * eta))
    }

    /// Bilinearly interpolated displacement `(u_x, u_y)`.
    pub fn displacement(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let (i, j, xi, eta) = self.cell(x, y)?;
        let n = Self::shape(xi, eta);
        let nodes = self.model.element_nodes(i, j);
        let mut u = (0.0, 0.0);
        for k in 0..4 {
            u.0 += n[k] * self.displacements[2 * nodes[k]];
            u.1 += n[k] * self.displacements[2 * nodes[k] + 1];
        }
        Ok(u)
    }

    /// `u_y` at `(L/2, 0)`.
    pub fn midspan_deflection(&self) -> Result<f64> {
        self.displacement(0.5 * self.model.geometry.length, 0.0).map(|u| u.1)
    }

    /// Depth average of `u_y` over the vertical line through `x`.
    pub fn mean_deflection(&self, x: f64) -> Result<f64> {
        let m = &self.model;
        let mut acc = 0.0;
        for j in 0..=m.my {
            let w = if j == 0 || j == m.my { 0.5 } else { 1.0 };
            acc += w * self.displacement(x, m.y_of(j))?.1;
        }
        Ok(acc / m.my as f64)
    }

    /// Stress at any station with the default recovery.
    pub fn stress(&self, x: f64, y: f64) -> Result<StressSample> {
        self.stress_with(x, y, Q4StressRecovery::default())
    }

    pub fn stress_with(&self, x: f64, y: f64, recovery: Q4StressRecovery) -> Result<StressSample> {
        match recovery {
            Q4StressRecovery::CentroidLattice => self.centroid_lattice_stress(x, y),
            Q4StressRecovery::NodalExtrapolation => self.nodal_stress_at(x, y),
        }
    }

    fn centroid_lattice_stress(&self, x: f64, y: f64) -> Result<StressSample> {
        self.cell(x, y)?;
        let m = &self.model;
        let bracket = |t: f64, n: usize| {
            let k = (t.floor().max(0.0) as usize).min(n - 2);
            (k, t - k as f64)
        };
        let (i, s) = bracket(x / m.dx() - 0.5, m.mx);
        let (j, t) = bracket((y + 0.5 * m.geometry.depth) / m.dy() - 0.5, m.my);
        let at = |a: usize, b: usize| self.centroid_stress[a * m.my + b];
        let v = at(i, j) * ((1.0 - s) * (1.0 - t))
            + at(i + 1, j) * (s * (1.0 - t))
            + at(i + 1, j + 1) * (s * t)
            + at(i, j + 1) * ((1.0 - s) * t);
        Ok(StressSample::new(x, y, v[0], v[2], v[1]))
    }

    fn nodal_stress_at(&self, x: f64, y: f64) -> Result<StressSample> {
        let (i, j, xi, eta) = self.cell(x, y)?;
        let n = Self::shape(xi, eta);
        let nodes = self.model.element_nodes(i, j);
        let mut s = Vector3::zeros();
        for k in 0..4 {
            s += self.nodal_stress[nodes[k]] * n[k];
        }
        Ok(StressSample::new(x, y, s[0], s[2], s[1]))
    }

    /// Sum of the `u_y` reactions.
    pub fn transverse_reaction(&self) -> f64 {
        self.reactions.iter().filter(|(d, _)| d % 2 == 1).map(|(_, r)| r).sum()
    }

    pub fn element_stiffness_row(&self, j: usize) -> &SMatrix<f64, 8, 8> {
        &self.row_stiffness[j]
    }
}
