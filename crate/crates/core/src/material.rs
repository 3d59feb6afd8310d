//! Through-thickness material grading and the fixed warping shapes.
//!
//! The thickness coordinate `y` runs from `-h/2` (bottom) to `h/2` (top).
//! Grading follows a power law in the ceramic volume fraction, with three
//! layouts:
//!
//! * [`GradingKind::TypeA`]: one graded layer spanning the whole depth.
//! * [`GradingKind::TypeB`]: graded skins around a pure ceramic core.
//! * [`GradingKind::TypeC`]: a graded core between a metal bottom skin and a
//!   ceramic top skin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Layer layout of the volume-fraction law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradingKind {
    #[serde(alias = "A", alias = "a")]
    TypeA,
    #[serde(alias = "B", alias = "b")]
    TypeB,
    #[serde(alias = "C", alias = "c")]
    TypeC,
}

impl std::fmt::Display for GradingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GradingKind::TypeA => "A",
            GradingKind::TypeB => "B",
            GradingKind::TypeC => "C",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for GradingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" | "TYPEA" => Ok(GradingKind::TypeA),
            "B" | "TYPEB" => Ok(GradingKind::TypeB),
            "C" | "TYPEC" => Ok(GradingKind::TypeC),
            other => Err(Error::Config(format!("unknown grading kind `{other}`"))),
        }
    }
}

/// Power-law grading between a metal and a ceramic constituent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialLaw {
    pub kind: GradingKind,
    /// Power-law index; zero makes every graded layer pure ceramic.
    pub p: f64,
    pub e_metal: f64,
    pub e_ceramic: f64,
    pub poisson: f64,
    /// Layer boundaries from bottom to top. Type A uses the first two.
    pub bounds: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moduli {
    pub young: f64,
    pub shear: f64,
}

pub const DEFAULT_E_METAL: f64 = 70_000.0;
pub const DEFAULT_E_CERAMIC: f64 = 380_000.0;
pub const DEFAULT_POISSON: f64 = 0.3;

impl MaterialLaw {
    /// Default law for a 200 mm deep section.
    pub fn standard(kind: GradingKind, p: f64) -> Self {
        let bounds = match kind {
            GradingKind::TypeA => vec![-100.0, 100.0],
            GradingKind::TypeB | GradingKind::TypeC => vec![-100.0, -40.0, 40.0, 100.0],
        };
        Self {
            kind,
            p,
            e_metal: DEFAULT_E_METAL,
            e_ceramic: DEFAULT_E_CERAMIC,
            poisson: DEFAULT_POISSON,
            bounds,
        }
    }

    /// A law whose modulus is `young` everywhere.
    pub fn homogeneous(young: f64, poisson: f64, depth: f64) -> Self {
        Self {
            kind: GradingKind::TypeA,
            p: 0.0,
            e_metal: young,
            e_ceramic: young,
            poisson,
            bounds: vec![-0.5 * depth, 0.5 * depth],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let need = match self.kind {
            GradingKind::TypeA => 2,
            _ => 4,
        };
        if self.bounds.len() < need {
            return Err(Error::Material(format!(
                "type {} needs {need} layer boundaries, got {}",
                self.kind,
                self.bounds.len()
            )));
        }
        if self.bounds[..need].windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Material("layer boundaries must increase".into()));
        }
        if !(self.e_metal > 0.0 && self.e_ceramic > 0.0) {
            return Err(Error::Material("moduli must be positive".into()));
        }
        if !(0.0..0.5).contains(&self.poisson) {
            return Err(Error::Material(format!("poisson ratio {} outside [0, 0.5)", self.poisson)));
        }
        if !(self.p >= 0.0 && self.p.is_finite()) {
            return Err(Error::Material(format!("power index {} must be finite and >= 0", self.p)));
        }
        Ok(())
    }

    /// Boundaries actually used by the law.
    pub fn layer_bounds(&self) -> &[f64] {
        match self.kind {
            GradingKind::TypeA => &self.bounds[..2],
            _ => &self.bounds[..4],
        }
    }

    /// Interior layer junctions, where the integrand may lose smoothness.
    pub fn junctions(&self) -> &[f64] {
        let b = self.layer_bounds();
        &b[1..b.len() - 1]
    }

    pub fn volume_fraction(&self, y: f64) -> Result<f64> {
        let b = self.layer_bounds();
        let (lo, hi) = (b[0], b[b.len() - 1]);
        let slack = 1e-12 * (hi - lo);
        if !(y >= lo - slack && y <= hi + slack) {
            return Err(Error::Domain(format!("y = {y} outside material layers [{lo}, {hi}]")));
        }
        let y = y.clamp(lo, hi);
        let power = |t: f64| graded_power(t, self.p);
        let v = match self.kind {
            GradingKind::TypeA => power((y - b[0]) / (b[1] - b[0])),
            GradingKind::TypeB => {
                if y <= b[1] {
                    power((y - b[0]) / (b[1] - b[0]))
                } else if y <= b[2] {
                    1.0
                } else {
                    power((y - b[3]) / (b[2] - b[3]))
                }
            }
            GradingKind::TypeC => {
                if y <= b[1] {
                    0.0
                } else if y <= b[2] {
                    power((y - b[1]) / (b[2] - b[1]))
                } else {
                    1.0
                }
            }
        };
        Ok(v)
    }

    pub fn modulus(&self, y: f64) -> Result<Moduli> {
        let v = self.volume_fraction(y)?;
        let young = self.e_metal + (self.e_ceramic - self.e_metal) * v;
        Ok(Moduli {
            young,
            shear: young / (2.0 * (1.0 + self.poisson)),
        })
    }

    /// Young's modulus for a coordinate already known to lie in the section.
    pub(crate) fn young_unchecked(&self, y: f64) -> f64 {
        self.modulus(y).map(|m| m.young).unwrap_or(f64::NAN)
    }

    /// Same law with both constituent moduli multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            e_metal: self.e_metal * factor,
            e_ceramic: self.e_ceramic * factor,
            ..self.clone()
        }
    }
}

fn graded_power(t: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        t.clamp(0.0, 1.0).powf(p)
    }
}

/// Rectangular cross-section and span.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionGeometry {
    pub width: f64,
    pub depth: f64,
    pub length: f64,
}

impl Default for SectionGeometry {
    fn default() -> Self {
        Self {
            width: 50.0,
            depth: 200.0,
            length: 2000.0,
        }
    }
}

impl SectionGeometry {
    pub fn validate(&self) -> Result<()> {
        if self.width > 0.0 && self.depth > 0.0 && self.length > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("non-positive geometry {self:?}")))
        }
    }

    pub fn half_depth(&self) -> f64 {
        0.5 * self.depth
    }
}

/// Higher-order axial warping `f`, its slope `g` (the transverse stretching
/// shape) and the slope of `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpingShapes {
    pub f: f64,
    pub g: f64,
    pub dg: f64,
}

pub fn warping_shapes(y: f64, depth: f64) -> WarpingShapes {
    let h2 = depth * depth;
    WarpingShapes {
        f: y - 4.0 * y * y * y / (3.0 * h2),
        g: 1.0 - 4.0 * y * y / h2,
        dg: -8.0 * y / h2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volume_fraction_examples() {
        let a5 = MaterialLaw::standard(GradingKind::TypeA, 5.0);
        assert_eq!(a5.volume_fraction(-100.0).unwrap(), 0.0);
        assert!((a5.volume_fraction(0.0).unwrap() - 0.03125).abs() < 1e-15);
        let c5 = MaterialLaw::standard(GradingKind::TypeC, 5.0);
        assert_eq!(c5.volume_fraction(-60.0).unwrap(), 0.0);
        assert_eq!(c5.volume_fraction(60.0).unwrap(), 1.0);
        let b5 = MaterialLaw::standard(GradingKind::TypeB, 5.0);
        assert_eq!(b5.volume_fraction(0.0).unwrap(), 1.0);
        assert_eq!(b5.volume_fraction(100.0).unwrap(), 0.0);
        assert!(a5.volume_fraction(100.5).is_err());
    }

    #[test]
    fn modulus_examples() {
        let a0 = MaterialLaw::standard(GradingKind::TypeA, 0.0);
        for y in [-100.0, -3.0, 55.0, 100.0] {
            assert_eq!(a0.modulus(y).unwrap().young, 380_000.0);
        }
        let a5 = MaterialLaw::standard(GradingKind::TypeA, 5.0);
        assert_eq!(a5.modulus(-100.0).unwrap().young, 70_000.0);
        let m = a5.modulus(0.0).unwrap();
        assert!((m.young - 79_687.5).abs() < 1e-9);
        assert!((m.shear - 79_687.5 / 2.6).abs() < 1e-9);
    }

    #[test]
    fn modulus_is_continuous_at_junctions() {
        for kind in [GradingKind::TypeA, GradingKind::TypeB, GradingKind::TypeC] {
            for p in [0.5, 1.0, 2.0, 5.0, 10.0] {
                let law = MaterialLaw::standard(kind, p);
                let delta: f64 = 1e-9;
                // Largest change a power law over a 60 mm layer can make across 2δ.
                let bound = (law.e_ceramic - law.e_metal) * p.max(1.0) * (2.0 * delta / 60.0).powf(p.min(1.0)) * 1.001;
                for &j in law.junctions() {
                    let below = law.modulus(j - delta).unwrap().young;
                    let above = law.modulus(j + delta).unwrap().young;
                    assert!((below - above).abs() <= bound, "{kind} p={p} at {j}");
                }
            }
        }
        // p = 0 turns the graded core of type C into a step.
        let step = MaterialLaw::standard(GradingKind::TypeC, 0.0);
        assert_eq!(step.modulus(-40.0 - 1e-9).unwrap().young, 70_000.0);
        assert_eq!(step.modulus(-40.0 + 1e-9).unwrap().young, 380_000.0);
        for &j in MaterialLaw::standard(GradingKind::TypeB, 0.0).junctions() {
            let law = MaterialLaw::standard(GradingKind::TypeB, 0.0);
            assert_eq!(law.modulus(j - 1e-9).unwrap().young, law.modulus(j + 1e-9).unwrap().young);
        }
    }

    #[test]
    fn warping_examples() {
        let w = warping_shapes(0.0, 200.0);
        assert_eq!((w.f, w.g, w.dg), (0.0, 1.0, 0.0));
        let top = warping_shapes(100.0, 200.0);
        assert!((top.f - 200.0 / 3.0).abs() < 1e-12);
        assert_eq!(top.g, 0.0);
        assert!((top.dg + 0.02).abs() < 1e-15);
        let bot = warping_shapes(-100.0, 200.0);
        assert!((bot.f + 200.0 / 3.0).abs() < 1e-12);
        assert!((bot.dg - 0.02).abs() < 1e-15);
    }

    #[test]
    fn invalid_laws_are_rejected() {
        let mut law = MaterialLaw::standard(GradingKind::TypeB, 1.0);
        law.bounds = vec![-100.0, 40.0, -40.0, 100.0];
        assert!(law.validate().is_err());
        let mut law = MaterialLaw::standard(GradingKind::TypeA, 1.0);
        law.poisson = 0.5;
        assert!(law.validate().is_err());
    }
}
