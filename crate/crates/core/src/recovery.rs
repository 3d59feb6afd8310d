//! Resultant fields and pointwise stresses from a solved beam.
//!
//! Mixed elements expose their resultants directly as `P(x) β + F(x)`;
//! displacement elements only have the constitutive products of their
//! strains, and their stresses follow the constitutive law throughout the
//! depth instead of the equilibrium profiles.
//!
//! A station that falls exactly on a node is evaluated in the element to its
//! left (the first element for `x = 0`).

use nalgebra::{DVector, Vector2, Vector5};
use serde::{Deserialize, Serialize};

use crate::element::{force_mode_derivatives, force_modes, strain_interp, ElementKind};
use crate::error::{Error, Result};
use crate::solver::Solution;

/// Route used for the x-derivatives of the bending resultants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeRoute {
    /// Differentiate the element force modes.
    Analytic,
    /// Central differences of element-midpoint values (second derivative only).
    FiniteDifference,
}

/// Stress state at one station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressSample {
    pub x: f64,
    pub y: f64,
    pub sigma_x: f64,
    pub tau_xy: f64,
    pub sigma_y: f64,
    pub sigma_max: f64,
    pub sigma_min: f64,
}

impl StressSample {
    pub fn new(x: f64, y: f64, sigma_x: f64, tau_xy: f64, sigma_y: f64) -> Self {
        let (sigma_max, sigma_min) = principal_stresses(sigma_x, sigma_y, tau_xy);
        Self {
            x,
            y,
            sigma_x,
            tau_xy,
            sigma_y,
            sigma_max,
            sigma_min,
        }
    }
}

/// Principal stresses of a plane stress state, larger first.
pub fn principal_stresses(sigma_x: f64, sigma_y: f64, tau: f64) -> (f64, f64) {
    let mean = 0.5 * (sigma_x + sigma_y);
    let radius = (0.25 * (sigma_x - sigma_y).powi(2) + tau * tau).sqrt();
    (mean + radius, mean - radius)
}

/// Normalization applied to a transverse normal stress profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Standardization {
    None,
    /// Divide by the largest magnitude in the profile.
    ByMaxAbs,
    /// Divide by the surface value `q / b`.
    ByAnalytical,
}

pub fn standardize_sigma_y(profile: &[f64], mode: Standardization, q: f64, width: f64) -> Result<Vec<f64>> {
    let divisor = match mode {
        Standardization::None => 1.0,
        Standardization::ByMaxAbs => profile.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        Standardization::ByAnalytical => {
            if width == 0.0 {
                0.0
            } else {
                q / width
            }
        }
    };
    if divisor == 0.0 || !divisor.is_finite() {
        return Err(Error::Domain(format!("cannot standardize with divisor {divisor}")));
    }
    Ok(profile.iter().map(|v| v / divisor).collect())
}

/// Second differences `[M(x+Le) − 2M(x) + M(x−Le)] / Le²` of a resultant
/// sampled at element midpoints; returns `(x, value)` at interior midpoints.
pub fn fd_second_derivative(midpoint_values: &[f64], le: f64, x0: f64) -> Result<Vec<(f64, f64)>> {
    if midpoint_values.len() < 3 {
        return Err(Error::Domain("finite differences need at least three elements".into()));
    }
    Ok(midpoint_values
        .windows(3)
        .enumerate()
        .map(|(i, w)| {
            let x = x0 + (i as f64 + 1.5) * le;
            (x, (w[2] - 2.0 * w[1] + w[0]) / (le * le))
        })
        .collect())
}

/// Stress recovery over a solved beam.
#[derive(Debug, Clone)]
pub struct StressRecovery<'a> {
    pub solution: &'a Solution,
    pub route: DerivativeRoute,
    /// Keep the `N` and `R` gradient terms that the equilibrium profiles
    /// normally drop.
    pub include_axial_terms: bool,
    fd_tables: Option<[Vec<(f64, f64)>; 2]>,
}

impl<'a> StressRecovery<'a> {
    pub fn new(solution: &'a Solution) -> Self {
        Self {
            solution,
            route: DerivativeRoute::Analytic,
            include_axial_terms: false,
            fd_tables: None,
        }
    }

    pub fn with_route(mut self, route: DerivativeRoute) -> Result<Self> {
        if route == DerivativeRoute::FiniteDifference {
            self.fd_tables = Some([
                fd_moment_second_derivative(self.solution, 1)?,
                fd_moment_second_derivative(self.solution, 2)?,
            ]);
        }
        self.route = route;
        Ok(self)
    }

    pub fn with_axial_terms(mut self, on: bool) -> Self {
        self.include_axial_terms = on;
        self
    }

    pub fn kind(&self) -> ElementKind {
        self.solution.model.kind
    }

    pub fn axial_stress(&self, x: f64, y: f64) -> Result<f64> {
        let sec = &self.solution.section;
        if self.kind().is_mixed() {
            let s = internal_forces(self.solution, x)?;
            let sn = s.fixed_rows::<4>(0).into_owned();
            Ok((sec.axial_row(y) * sec.flexibility * sn)[0])
        } else {
            let e = generalized_strains(self.solution, x)?;
            Ok((sec.axial_row(y) * e.fixed_rows::<4>(0))[0])
        }
    }

    pub fn shear_stress(&self, x: f64, y: f64) -> Result<f64> {
        let sec = &self.solution.section;
        if self.kind().is_mixed() {
            let d1 = internal_force_derivative(self.solution, x, 1)?;
            if self.include_axial_terms {
                let g = nalgebra::Vector4::new(d1[0], d1[1], d1[2], d1[3]);
                Ok((sec.full_shear_profile(y) * g)[0])
            } else {
                Ok((sec.shear_profile(y) * Vector2::new(d1[1], d1[2]))[0])
            }
        } else {
            let e = generalized_strains(self.solution, x)?;
            let m = sec.law.modulus(y)?;
            let g = crate::material::warping_shapes(y, sec.geometry.depth).g;
            Ok(m.shear * g * e[4])
        }
    }

    pub fn transverse_stress(&self, x: f64, y: f64) -> Result<f64> {
        let sec = &self.solution.section;
        if !self.kind().is_mixed() {
            let e = generalized_strains(self.solution, x)?;
            return Ok((sec.transverse_row(y) * e.fixed_rows::<4>(0))[0]);
        }
        let (mw, mt) = match self.route {
            DerivativeRoute::Analytic => {
                let d2 = internal_force_derivative(self.solution, x, 2)?;
                (d2[1], d2[2])
            }
            DerivativeRoute::FiniteDifference => {
                let tables = self.fd_tables.as_ref().expect("tables built by with_route");
                (interpolate_table(&tables[0], x), interpolate_table(&tables[1], x))
            }
        };
        Ok((sec.normal_profile(y) * Vector2::new(mw, mt))[0])
    }

    pub fn sample(&self, x: f64, y: f64) -> Result<StressSample> {
        check_station(self.solution, x, y)?;
        Ok(StressSample::new(
            x,
            y,
            self.axial_stress(x, y)?,
            self.shear_stress(x, y)?,
            self.transverse_stress(x, y)?,
        ))
    }

    /// Samples at `n_points` evenly spaced fibres from bottom to top.
    pub fn profile(&self, x: f64, n_points: usize) -> Result<Vec<StressSample>> {
        fibres(self.solution.model.geometry.depth, n_points)
            .into_iter()
            .map(|y| self.sample(x, y))
            .collect()
    }
}

/// `n` evenly spaced fibres from `-h/2` to `h/2`.
pub fn fibres(depth: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| -0.5 * depth + depth * k as f64 / (n - 1) as f64).collect(),
    }
}

fn check_station(sol: &Solution, x: f64, y: f64) -> Result<()> {
    let g = &sol.model.geometry;
    let tol = 1e-9 * g.length;
    if x < -tol || x > g.length + tol || y.abs() > 0.5 * g.depth * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("station ({x}, {y}) outside the beam")));
    }
    Ok(())
}

/// Element holding `x` and the local coordinate within it.
pub fn locate(sol: &Solution, x: f64) -> Result<(usize, f64)> {
    let g = &sol.model.geometry;
    if x < -1e-9 * g.length || x > g.length * (1.0 + 1e-9) {
        return Err(Error::Domain(format!("x = {x} outside [0, {}]", g.length)));
    }
    let le = sol.model.element_length();
    let n = sol.model.n_elements;
    let t = x / le;
    let e = (t.ceil() as isize - 1).clamp(0, n as isize - 1) as usize;
    Ok((e, x - e as f64 * le))
}

/// Resultants `(N, Mw, Mθ, R, Q)` at local coordinate `xl` of element `e`.
pub fn element_forces(sol: &Solution, e: usize, xl: f64) -> Result<Vector5<f64>> {
    let q = sol.model.load.q;
    let kind = sol.model.kind;
    if kind.is_mixed() {
        let (p, f) = force_modes(xl, q, kind)?;
        Ok(Vector5::from_column_slice((p * &sol.betas[e]).as_slice()) + f)
    } else {
        let nt = strain_interp(xl, sol.model.element_length());
        let strains = nt * sol.element_vector(e);
        Ok(sol.section.conventional_5x5() * strains)
    }
}

/// Resultants at global coordinate `x`. Displacement elements return their
/// constitutive products.
pub fn internal_forces(sol: &Solution, x: f64) -> Result<Vector5<f64>> {
    let (e, xl) = locate(sol, x)?;
    element_forces(sol, e, xl)
}

/// First (`order = 1`) or second (`order = 2`) x-derivative of the mixed
/// resultant field at `x`.
pub fn internal_force_derivative(sol: &Solution, x: f64, order: usize) -> Result<Vector5<f64>> {
    let kind = sol.model.kind;
    if !kind.is_mixed() {
        return Err(Error::Unsupported("resultant derivatives need a mixed element".into()));
    }
    let (e, xl) = locate(sol, x)?;
    let ((p1, f1), (p2, f2)) = force_mode_derivatives(xl, sol.model.load.q, kind)?;
    let beta: &DVector<f64> = &sol.betas[e];
    match order {
        1 => Ok(Vector5::from_column_slice((p1 * beta).as_slice()) + f1),
        2 => Ok(Vector5::from_column_slice((p2 * beta).as_slice()) + f2),
        _ => Err(Error::Domain(format!("derivative order {order} not available"))),
    }
}

/// Generalized strains `(ε0, κw, κθ, φ, γ0)` at `x`.
pub fn generalized_strains(sol: &Solution, x: f64) -> Result<Vector5<f64>> {
    let (e, xl) = locate(sol, x)?;
    Ok(strain_interp(xl, sol.model.element_length()) * sol.element_vector(e))
}

/// Finite-difference second derivative of resultant `component`
/// (0 = N, 1 = Mw, 2 = Mθ, 3 = R, 4 = Q) from element-midpoint samples.
pub fn fd_moment_second_derivative(sol: &Solution, component: usize) -> Result<Vec<(f64, f64)>> {
    if component > 4 {
        return Err(Error::Domain(format!("no resultant component {component}")));
    }
    let le = sol.model.element_length();
    let mids = (0..sol.model.n_elements)
        .map(|e| element_forces(sol, e, 0.5 * le).map(|s| s[component]))
        .collect::<Result<Vec<_>>>()?;
    fd_second_derivative(&mids, le, 0.0)
}

fn interpolate_table(table: &[(f64, f64)], x: f64) -> f64 {
    let k = table.partition_point(|(t, _)| *t <= x);
    if k == 0 {
        return table[0].1;
    }
    if k == table.len() {
        return table[k - 1].1;
    }
    let (x0, v0) = table[k - 1];
    let (x1, v1) = table[k];
    v0 + (v1 - v0) * (x - x0) / (x1 - x0)
}

/// Values of resultant `component` just left and right of every interior node.
pub fn interface_jumps(sol: &Solution, component: usize, derivative: bool) -> Result<Vec<(f64, f64, f64)>> {
    let le = sol.model.element_length();
    let q = sol.model.load.q;
    let kind = sol.model.kind;
    let value = |e: usize, xl: f64| -> Result<f64> {
        if derivative {
            let ((p1, f1), _) = force_mode_derivatives(xl, q, kind)?;
            Ok((Vector5::from_column_slice((p1 * &sol.betas[e]).as_slice()) + f1)[component])
        } else {
            Ok(element_forces(sol, e, xl)?[component])
        }
    };
    (1..sol.model.n_elements)
        .map(|node| Ok((node as f64 * le, value(node - 1, le)?, value(node, 0.0)?)))
        .collect()
}
