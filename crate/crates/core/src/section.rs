//! Cross-section integrals and the modified section stiffness.
//!
//! Generalized strains are ordered `(ε0, κw, κθ, φ, γ0)` and the matching
//! resultants `(N, Mw, Mθ, R, Q)`. The axial stress of the theory is
//! `σx = Tx(y)·ε` with `Tx = c·[1, y, f, ν g′]`, `c = E/(1-ν²)`, and the
//! transverse normal stress from the constitutive law is
//! `σy = Ty(y)·ε` with `Ty = c·[ν, ν y, ν f, g′]`.
//!
//! Integrating the two in-plane equilibrium equations through the depth,
//! with traction-free bottom fibres, gives
//!
//! ```text
//! τxy(x, y) = S(y) · (Mw,x, Mθ,x)
//! σy(x, y)  = Tȳ(y) · (Mw,xx, Mθ,xx)
//! ```
//!
//! where `S` and `Tȳ` are the shear and normal profiles computed here. The
//! profiles are stored as prefix tables at panel boundaries so each point
//! evaluation costs one partial panel of Gauss quadrature.

use nalgebra::{DMatrix, Matrix2, Matrix4, Matrix5, RowVector2, RowVector4, SMatrix, Vector2};

use crate::error::{Error, Result};
use crate::linalg::guarded_inverse;
use crate::material::{warping_shapes, MaterialLaw, SectionGeometry};
use crate::quadrature::{panel_edges, GaussRule};

pub type Matrix2x4 = SMatrix<f64, 2, 4>;
pub type Matrix4x2 = SMatrix<f64, 4, 2>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionOptions {
    /// Panels per material layer.
    pub panels_per_layer: usize,
    /// Gauss points per panel.
    pub gauss_points: usize,
    /// Multiplier on the condensed shear stiffness `fsᵀ fss⁻¹ fs`.
    pub shear_energy_factor: f64,
}

impl Default for SectionOptions {
    fn default() -> Self {
        Self {
            panels_per_layer: 64,
            gauss_points: 10,
            shear_energy_factor: 1.0,
        }
    }
}

/// Every through-thickness quantity of a graded rectangular section.
#[derive(Debug, Clone)]
pub struct SectionModel {
    pub geometry: SectionGeometry,
    pub law: MaterialLaw,
    pub options: SectionOptions,
    /// Conventional stiffness relating `(N, Mw, Mθ, R)` to `(ε0, κw, κθ, φ)`.
    pub dn: Matrix4<f64>,
    /// Conventional shear stiffness `∫ G g² dA`.
    pub d55: f64,
    /// Inverse of `dn`.
    pub flexibility: Matrix4<f64>,
    /// Work-conjugate shear resultant weights `(∫ Sw g dA, ∫ Sθ g dA)`.
    pub fs: Vector2<f64>,
    /// Complementary shear energy matrix `∫ Sᵀ S / G dA`.
    pub fss: Matrix2<f64>,
    pub hxx: Matrix4<f64>,
    pub hyy_bar: Matrix2x4,
    pub hxsx: Matrix4<f64>,
    pub hxsy_bar: Matrix4x2,
    pub hysy_bar: Matrix2<f64>,
    pub hex: Matrix4<f64>,
    pub hey_bar: Matrix2x4,
    /// Modified 5×5 stiffness relating `(N, Mw, Mθ, R, Q)` to `(ε0, κw, κθ, φ, γ0)`.
    pub dt: Matrix5<f64>,
    rule: GaussRule,
    edges: Vec<f64>,
    first_moment: Vec<[f64; 4]>,
    second_moment: Vec<[f64; 4]>,
}

impl SectionModel {
    pub fn new(geometry: SectionGeometry, law: MaterialLaw) -> Result<Self> {
        Self::with_options(geometry, law, SectionOptions::default())
    }

    pub fn with_options(geometry: SectionGeometry, law: MaterialLaw, options: SectionOptions) -> Result<Self> {
        geometry.validate()?;
        law.validate()?;
        let half = geometry.half_depth();
        let bounds = law.layer_bounds();
        let cover_tol = 1e-9 * geometry.depth;
        if bounds[0] > -half + cover_tol || bounds[bounds.len() - 1] < half - cover_tol {
            return Err(Error::Material(format!(
                "layers [{}, {}] do not cover the depth ±{half}",
                bounds[0],
                bounds[bounds.len() - 1]
            )));
        }
        if options.panels_per_layer == 0 || options.gauss_points == 0 {
            return Err(Error::Config("quadrature needs at least one panel and one point".into()));
        }
        let rule = GaussRule::new(options.gauss_points);
        let edges = panel_edges(-half, half, law.junctions(), options.panels_per_layer);

        let mut model = Self {
            geometry,
            law,
            options,
            dn: Matrix4::zeros(),
            d55: 0.0,
            flexibility: Matrix4::zeros(),
            fs: Vector2::zeros(),
            fss: Matrix2::zeros(),
            hxx: Matrix4::zeros(),
            hyy_bar: Matrix2x4::zeros(),
            hxsx: Matrix4::zeros(),
            hxsy_bar: Matrix4x2::zeros(),
            hysy_bar: Matrix2::zeros(),
            hex: Matrix4::zeros(),
            hey_bar: Matrix2x4::zeros(),
            dt: Matrix5::zeros(),
            rule,
            edges,
            first_moment: Vec::new(),
            second_moment: Vec::new(),
        };
        model.build_conventional()?;
        model.build_prefix_tables();
        model.build_modified()?;
        Ok(model)
    }

    pub fn poisson(&self) -> f64 {
        self.law.poisson
    }

    fn young(&self, y: f64) -> f64 {
        self.law.young_unchecked(y)
    }

    fn plane_modulus(&self, y: f64) -> f64 {
        let nu = self.law.poisson;
        self.young(y) / (1.0 - nu * nu)
    }

    /// Axial stress row `Tx(y)`.
    pub fn axial_row(&self, y: f64) -> RowVector4<f64> {
        let w = warping_shapes(y, self.geometry.depth);
        let nu = self.law.poisson;
        RowVector4::new(1.0, y, w.f, nu * w.dg) * self.plane_modulus(y)
    }

    /// Constitutive transverse stress row `Ty(y)`.
    pub fn transverse_row(&self, y: f64) -> RowVector4<f64> {
        let w = warping_shapes(y, self.geometry.depth);
        let nu = self.law.poisson;
        RowVector4::new(nu, nu * y, nu * w.f, w.dg) * self.plane_modulus(y)
    }

    /// Composite Gauss integral over `[lo, hi]`, split at layer junctions.
    pub fn integrate_thickness<F: FnMut(f64) -> f64>(&self, mut f: F, lo: f64, hi: f64) -> Result<f64> {
        let half = self.geometry.half_depth();
        let tol = 1e-12 * self.geometry.depth;
        if lo > hi {
            return Err(Error::Domain(format!("inverted interval [{lo}, {hi}]")));
        }
        if lo < -half - tol || hi > half + tol {
            return Err(Error::Domain(format!("interval [{lo}, {hi}] leaves the section ±{half}")));
        }
        if lo == hi {
            return Ok(0.0);
        }
        let edges = panel_edges(lo, hi, self.law.junctions(), self.options.panels_per_layer);
        Ok(edges
            .windows(2)
            .map(|w| self.rule.integrate(w[0], w[1], &mut f))
            .sum())
    }

    /// Applies `f(y, weight)` at every composite Gauss point of the full depth.
    fn for_each_node<F: FnMut(f64, f64)>(&self, mut f: F) {
        for w in self.edges.windows(2) {
            for (y, wt) in self.rule.mapped(w[0], w[1]) {
                f(y, wt);
            }
        }
    }

    fn build_conventional(&mut self) -> Result<()> {
        let b = self.geometry.width;
        let mut dn = Matrix4::zeros();
        let mut d55 = 0.0;
        let depth = self.geometry.depth;
        self.for_each_node(|y, wt| {
            let tx = self.axial_row(y);
            let ty = self.transverse_row(y);
            let w = warping_shapes(y, depth);
            let bx = RowVector4::new(1.0, y, w.f, 0.0);
            let by = RowVector4::new(0.0, 0.0, 0.0, w.dg);
            dn += (bx.transpose() * tx + by.transpose() * ty) * (b * wt);
            let g = self.law.modulus(y).map(|m| m.shear).unwrap_or(f64::NAN);
            d55 += b * wt * g * w.g * w.g;
        });
        self.dn = 0.5 * (dn + dn.transpose());
        self.d55 = d55;
        let inv = guarded_inverse(&DMatrix::from_column_slice(4, 4, self.dn.as_slice()), "Dn")?;
        self.flexibility = Matrix4::from_column_slice(inv.as_slice());
        Ok(())
    }

    /// Integrand of the cumulative stress-resultant profiles, per unit width.
    fn moment_integrand(&self, y: f64) -> [f64; 4] {
        let t = self.axial_row(y);
        [t[0], t[1], t[2], t[3]]
    }

    fn build_prefix_tables(&mut self) {
        let n = self.edges.len();
        let mut first = vec![[0.0; 4]; n];
        let mut second = vec![[0.0; 4]; n];
        for k in 1..n {
            let (a, bnd) = (self.edges[k - 1], self.edges[k]);
            let mut inc1 = [0.0; 4];
            let mut inc2 = [0.0; 4];
            for (y, wt) in self.rule.mapped(a, bnd) {
                let v = self.moment_integrand(y);
                let partial = self.partial_first(a, y);
                for i in 0..4 {
                    inc1[i] += wt * v[i];
                    inc2[i] += wt * (first[k - 1][i] + partial[i]);
                }
            }
            for i in 0..4 {
                first[k][i] = first[k - 1][i] + inc1[i];
                second[k][i] = second[k - 1][i] + inc2[i];
            }
        }
        self.first_moment = first;
        self.second_moment = second;
    }

    fn partial_first(&self, a: f64, y: f64) -> [f64; 4] {
        let mut acc = [0.0; 4];
        if y > a {
            for (t, wt) in self.rule.mapped(a, y) {
                let v = self.moment_integrand(t);
                for i in 0..4 {
                    acc[i] += wt * v[i];
                }
            }
        }
        acc
    }

    fn panel_of(&self, y: f64) -> usize {
        let k = self.edges.partition_point(|&e| e <= y);
        k.clamp(1, self.edges.len() - 1) - 1
    }

    fn clamp_depth(&self, y: f64) -> f64 {
        let half = self.geometry.half_depth();
        y.clamp(-half, half)
    }

    /// `∫_{-h/2}^{y} Tx dξ` per unit width.
    fn first_integral(&self, y: f64) -> [f64; 4] {
        let y = self.clamp_depth(y);
        let k = self.panel_of(y);
        let base = self.first_moment[k];
        let part = self.partial_first(self.edges[k], y);
        std::array::from_fn(|i| base[i] + part[i])
    }

    /// `∫_{-h/2}^{y} ∫_{-h/2}^{ξ} Tx dη dξ` per unit width.
    fn second_integral(&self, y: f64) -> [f64; 4] {
        let y = self.clamp_depth(y);
        let k = self.panel_of(y);
        let a = self.edges[k];
        let mut acc = self.second_moment[k];
        if y > a {
            let base = self.first_moment[k];
            for (t, wt) in self.rule.mapped(a, y) {
                let part = self.partial_first(a, t);
                for i in 0..4 {
                    acc[i] += wt * (base[i] + part[i]);
                }
            }
        }
        acc
    }

    /// Cumulative resultant profiles `S1..S4`, defined as minus the
    /// integral of `Tx` from the bottom fibre.
    pub fn resultant_profiles(&self, y: f64) -> RowVector4<f64> {
        let v = self.first_integral(y);
        -RowVector4::new(v[0], v[1], v[2], v[3])
    }

    /// Shear profile `(Sw, Sθ)` multiplying `(Mw,x, Mθ,x)`.
    pub fn shear_profile(&self, y: f64) -> RowVector2<f64> {
        let s = self.resultant_profiles(y) * self.flexibility;
        RowVector2::new(s[1], s[2])
    }

    /// All four columns of `S·Fn`, including the dropped `N` and `R` terms.
    pub fn full_shear_profile(&self, y: f64) -> RowVector4<f64> {
        self.resultant_profiles(y) * self.flexibility
    }

    /// Transverse normal profile `(Tȳw, Tȳθ)` multiplying `(Mw,xx, Mθ,xx)`.
    pub fn normal_profile(&self, y: f64) -> RowVector2<f64> {
        let v = self.second_integral(y);
        let t = RowVector4::new(v[0], v[1], v[2], v[3]) * self.flexibility;
        RowVector2::new(t[1], t[2])
    }

    fn build_modified(&mut self) -> Result<()> {
        let b = self.geometry.width;
        let depth = self.geometry.depth;
        let nu = self.law.poisson;
        let mut fs = Vector2::zeros();
        let mut fss = Matrix2::zeros();
        let mut hxx = Matrix4::zeros();
        let mut hyy = Matrix2x4::zeros();
        let mut hxsx = Matrix4::zeros();
        let mut hxsy = Matrix4x2::zeros();
        let mut hysy = Matrix2::zeros();
        self.for_each_node(|y, wt| {
            let m = self.law.modulus(y).unwrap_or(crate::material::Moduli {
                young: f64::NAN,
                shear: f64::NAN,
            });
            let w = warping_shapes(y, depth);
            let s = self.shear_profile(y);
            let tn = self.normal_profile(y);
            let tx = self.axial_row(y);
            let bx = RowVector4::new(1.0, y, w.f, 0.0);
            let by = RowVector4::new(0.0, 0.0, 0.0, w.dg);
            let da = b * wt;
            let (s11, s12, s22) = (1.0 / m.young, -nu / m.young, 1.0 / m.young);
            fs += s.transpose() * (w.g * da);
            fss += s.transpose() * s * (da / m.shear);
            hxx += tx.transpose() * bx * da;
            hyy += tn.transpose() * by * da;
            hxsx += tx.transpose() * tx * (s11 * da);
            hxsy += tx.transpose() * tn * (s12 * da);
            hysy += tn.transpose() * tn * (s22 * da);
        });
        self.fs = fs;
        self.fss = 0.5 * (fss + fss.transpose());
        self.hxx = hxx;
        self.hyy_bar = hyy;
        self.hxsx = 0.5 * (hxsx + hxsx.transpose());
        self.hxsy_bar = hxsy;
        self.hysy_bar = 0.5 * (hysy + hysy.transpose());
        self.hex = hxx + hxx.transpose() - self.hxsx;
        self.hey_bar = hyy - hxsy.transpose();

        let hysy_inv = inverse2(&self.hysy_bar, "Hysy")?;
        let fss_inv = inverse2(&self.fss, "fss")?;
        let bending = self.hex + self.hey_bar.transpose() * hysy_inv * self.hey_bar;
        let bending = 0.5 * (bending + bending.transpose());
        let mut dt = Matrix5::zeros();
        dt.fixed_view_mut::<4, 4>(0, 0).copy_from(&bending);
        dt[(4, 4)] = self.options.shear_energy_factor * (self.fs.transpose() * fss_inv * self.fs)[0];
        self.dt = dt;
        Ok(())
    }

    /// `(∫ g′ Tȳw dA, ∫ g′ Tȳθ dA)`, equal to `fs` after integration by parts.
    pub fn fs_by_parts(&self) -> Vector2<f64> {
        let b = self.geometry.width;
        let depth = self.geometry.depth;
        let mut acc = Vector2::zeros();
        self.for_each_node(|y, wt| {
            let dg = warping_shapes(y, depth).dg;
            acc += self.normal_profile(y).transpose() * (dg * b * wt);
        });
        acc
    }

    /// Modified stiffness inverse, used as the compliance of the mixed elements.
    pub fn dt_inverse(&self) -> Result<Matrix5<f64>> {
        let inv = guarded_inverse(&DMatrix::from_column_slice(5, 5, self.dt.as_slice()), "Dt")?;
        Ok(Matrix5::from_column_slice(inv.as_slice()))
    }

    /// Conventional 5×5 stiffness `blockdiag(Dn, D55)`.
    pub fn conventional_5x5(&self) -> Matrix5<f64> {
        let mut d = Matrix5::zeros();
        d.fixed_view_mut::<4, 4>(0, 0).copy_from(&self.dn);
        d[(4, 4)] = self.d55;
        d
    }

    /// Extreme of `|S|` over `samples` evenly spaced fibres.
    pub fn peak_shear_profile(&self, samples: usize) -> f64 {
        let half = self.geometry.half_depth();
        (0..=samples)
            .map(|k| {
                let y = -half + self.geometry.depth * k as f64 / samples as f64;
                self.shear_profile(y).amax()
            })
            .fold(0.0, f64::max)
    }
}

fn inverse2(m: &Matrix2<f64>, name: &str) -> Result<Matrix2<f64>> {
    let inv = guarded_inverse(&DMatrix::from_column_slice(2, 2, m.as_slice()), name)?;
    Ok(Matrix2::from_column_slice(inv.as_slice()))
}
