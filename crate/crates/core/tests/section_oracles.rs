//! Section matrices against brute-force adaptive quadrature rebuilt from the
//! material law alone.

mod common;

use common::{close, gauss_jordan_inverse, BruteSection};
use fgbeam::{GradingKind, MaterialLaw, SectionGeometry, SectionModel};

const REL: f64 = 1e-8;

fn cases() -> Vec<(GradingKind, f64)> {
    vec![
        (GradingKind::TypeA, 5.0),
        (GradingKind::TypeB, 2.0),
        (GradingKind::TypeC, 1.0),
        (GradingKind::TypeC, 10.0),
    ]
}

fn model(kind: GradingKind, p: f64) -> (SectionModel, BruteSection) {
    let law = MaterialLaw::standard(kind, p);
    (SectionModel::new(SectionGeometry::default(), law.clone()).unwrap(), BruteSection::new(law))
}

fn assert_matrix(label: &str, got: impl Fn(usize, usize) -> f64, want: &[Vec<f64>]) {
    let scale = want.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for (i, row) in want.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            let g = got(i, j);
            assert!(
                close(g, w, REL, 1e-12 * scale),
                "{label}[{i},{j}]: quadrature {g:e} vs oracle {w:e}"
            );
        }
    }
}

#[test]
fn conventional_stiffness_matches_adaptive_simpson() {
    for (kind, p) in cases() {
        let (s, b) = model(kind, p);
        let dn = b.dn();
        assert_matrix(&format!("Dn {kind}{p}"), |i, j| s.dn[(i, j)], &dn);
        assert!(close(s.d55, b.d55(), REL, 0.0), "D55 {kind}{p}: {} vs {}", s.d55, b.d55());
        let fn_ = gauss_jordan_inverse(&dn);
        assert_matrix(&format!("Fn {kind}{p}"), |i, j| s.flexibility[(i, j)], &fn_);
    }
}

#[test]
fn profiles_match_single_and_double_quadrature() {
    for (kind, p) in cases() {
        let (s, b) = model(kind, p);
        let fn_ = gauss_jordan_inverse(&b.dn());
        for y in [-100.0, -73.3, -40.0, -12.5, 0.0, 33.3, 40.0, 81.0, 100.0] {
            let nested = b.second_nested(y);
            let cauchy = b.second_cauchy(y);
            for i in 0..4 {
                let scale = b.scales[i] * 200.0;
                assert!(close(nested[i], cauchy[i], 1e-9, 1e-13 * scale), "double quadrature {i} at {y}");
            }
            let (so, to) = b.profiles(&fn_, y);
            let sm = s.shear_profile(y);
            let tm = s.normal_profile(y);
            let s_peak = s.peak_shear_profile(400);
            for k in 0..2 {
                assert!(close(sm[k], so[k], REL, 1e-12 * s_peak), "S{k} {kind}{p} y={y}: {} vs {}", sm[k], so[k]);
                assert!(close(tm[k], to[k], REL, 1e-12 / 50.0), "T{k} {kind}{p} y={y}: {} vs {}", tm[k], to[k]);
            }
        }
    }
}

#[test]
fn modified_stiffness_ingredients_match_brute_force() {
    for (kind, p) in [(GradingKind::TypeA, 5.0), (GradingKind::TypeC, 2.0)] {
        let (s, b) = model(kind, p);
        let o = b.modified();
        let tag = format!("{kind}{p}");
        assert_matrix(&format!("fs {tag}"), |i, _| s.fs[i], &o.fs);
        assert_matrix(&format!("fss {tag}"), |i, j| s.fss[(i, j)], &o.fss);
        assert_matrix(&format!("Hxx {tag}"), |i, j| s.hxx[(i, j)], &o.hxx);
        assert_matrix(&format!("Hyy {tag}"), |i, j| s.hyy_bar[(i, j)], &o.hyy);
        assert_matrix(&format!("Hxsx {tag}"), |i, j| s.hxsx[(i, j)], &o.hxsx);
        assert_matrix(&format!("Hxsy {tag}"), |i, j| s.hxsy_bar[(i, j)], &o.hxsy);
        assert_matrix(&format!("Hysy {tag}"), |i, j| s.hysy_bar[(i, j)], &o.hysy);
        assert_matrix(&format!("Dt {tag}"), |i, j| s.dt[(i, j)], &o.dt);
    }
}

#[test]
fn homogeneous_section_closed_forms() {
    let (e, nu, b, h) = (210_000.0, 0.3, 50.0, 200.0);
    let s = SectionModel::new(SectionGeometry::default(), MaterialLaw::homogeneous(e, nu, h)).unwrap();
    let c = e / (1.0 - nu * nu);
    assert!(close(s.dn[(0, 0)], c * b * h, 1e-12, 0.0));
    assert!(close(s.dn[(1, 1)], c * b * h.powi(3) / 12.0, 1e-12, 0.0));
    assert!(s.dn[(0, 1)].abs() < 1e-6 * s.dn[(0, 0)]);
    assert!(close(s.d55, 8.0 / 15.0 * b * h * e / (2.0 * (1.0 + nu)), 1e-12, 0.0));
}
