//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use fgbeam::material::warping_shapes;
use fgbeam::MaterialLaw;

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Adaptive Simpson over `[a, b]`, restarted at every break point inside.
pub fn simpson_pieces<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&t| t > a && t < b));
    pts.push(b);
    pts.windows(2).map(|w| adaptive_simpson(f, w[0], w[1], tol)).sum()
}

/// Composite trapezoid rule with `n` panels.
pub fn trapezoid<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| f(a + k as f64 * h)).sum();
    h * (0.5 * (f(a) + f(b)) + inner)
}

/// Romberg extrapolation of trapezoid sums on 25, 50, 100 and 200 panels.
pub fn trapezoid_200<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let mut row: Vec<f64> = [25, 50, 100, 200].iter().map(|&n| trapezoid(f, a, b, n)).collect();
    let mut factor = 4.0;
    while row.len() > 1 {
        row = row.windows(2).map(|w| w[1] + (w[1] - w[0]) / (factor - 1.0)).collect();
        factor *= 4.0;
    }
    row[0]
}

/// Gauss–Jordan inverse with partial pivoting.
pub fn gauss_jordan_inverse(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, piv);
        let d = a[col][col];
        a[col].iter_mut().for_each(|v| *v /= d);
        for r in 0..n {
            if r != col {
                let factor = a[r][col];
                if factor != 0.0 {
                    let pivot_row = a[col].clone();
                    a[r].iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= factor * p);
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// `|a - b| <= rel·|b| + floor`.
pub fn close(a: f64, b: f64, rel: f64, floor: f64) -> bool {
    (a - b).abs() <= rel * b.abs() + floor
}

/// Through-thickness ingredients rebuilt from the material law alone.
pub struct BruteSection {
    pub law: MaterialLaw,
    pub width: f64,
    pub depth: f64,
    pub tol: f64,
    /// `∫ |Tx_i|` over the depth, for relative inner tolerances.
    pub scales: [f64; 4],
}

impl BruteSection {
    pub fn new(law: MaterialLaw) -> Self {
        let mut s = Self { law, width: 50.0, depth: 200.0, tol: 1e-10, scales: [1.0; 4] };
        s.scales = std::array::from_fn(|i| trapezoid(&|y| s.tx(i, y).abs(), -100.0, 100.0, 2000));
        s
    }

    pub fn half(&self) -> f64 {
        0.5 * self.depth
    }

    pub fn young(&self, y: f64) -> f64 {
        self.law.modulus(y).unwrap().young
    }

    pub fn shear(&self, y: f64) -> f64 {
        self.law.modulus(y).unwrap().shear
    }

    pub fn c(&self, y: f64) -> f64 {
        let nu = self.law.poisson;
        self.young(y) / (1.0 - nu * nu)
    }

    /// `Tx(y)` component `i`.
    pub fn tx(&self, i: usize, y: f64) -> f64 {
        let w = warping_shapes(y, self.depth);
        let nu = self.law.poisson;
        self.c(y) * [1.0, y, w.f, nu * w.dg][i]
    }

    pub fn ty(&self, i: usize, y: f64) -> f64 {
        let w = warping_shapes(y, self.depth);
        let nu = self.law.poisson;
        self.c(y) * [nu, nu * y, nu * w.f, w.dg][i]
    }

    pub fn bx(&self, i: usize, y: f64) -> f64 {
        let w = warping_shapes(y, self.depth);
        [1.0, y, w.f, 0.0][i]
    }

    pub fn by(&self, i: usize, y: f64) -> f64 {
        [0.0, 0.0, 0.0, warping_shapes(y, self.depth).dg][i]
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        simpson_pieces(&f, a, b, self.law.junctions(), self.tol)
    }

    pub fn full<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.integrate(f, -self.half(), self.half())
    }

    pub fn dn(&self) -> Vec<Vec<f64>> {
        let v = self.full_vec(
            |y| {
                (0..16)
                    .map(|m| {
                        let (i, j) = (m / 4, m % 4);
                        self.width * (self.bx(i, y) * self.tx(j, y) + self.by(i, y) * self.ty(j, y))
                    })
                    .collect()
            },
            1e-12,
        );
        (0..4).map(|i| v[4 * i..4 * i + 4].to_vec()).collect()
    }

    pub fn d55(&self) -> f64 {
        self.full_vec(|y| vec![self.width * self.shear(y) * warping_shapes(y, self.depth).g.powi(2)], 1e-12)[0]
    }

    /// `P(y) = ∫ Tx` from the bottom fibre.
    pub fn first(&self, y: f64) -> [f64; 4] {
        std::array::from_fn(|i| {
            simpson_pieces(&|t| self.tx(i, t), -self.half(), y, self.law.junctions(), 1e-14 * self.scales[i])
        })
    }

    /// Repeated integral of `Tx` as a genuine double quadrature.
    pub fn second_nested(&self, y: f64) -> [f64; 4] {
        let j = self.law.junctions();
        std::array::from_fn(|i| {
            let tol = 1e-13 * self.scales[i];
            let inner = |s: f64| simpson_pieces(&|t| self.tx(i, t), -self.half(), s, j, tol);
            simpson_pieces(&inner, -self.half(), y, j, tol * self.depth)
        })
    }

    /// Same repeated integral through Cauchy's formula `∫ (y - t) Tx(t) dt`.
    pub fn second_cauchy(&self, y: f64) -> [f64; 4] {
        std::array::from_fn(|i| {
            let tol = 1e-14 * self.scales[i] * self.depth;
            simpson_pieces(&|t| (y - t) * self.tx(i, t), -self.half(), y, self.law.junctions(), tol)
        })
    }
}

/// Row vector times matrix for plain nested vectors.
pub fn row_times(v: &[f64], m: &[Vec<f64>]) -> Vec<f64> {
    (0..m[0].len()).map(|j| (0..v.len()).map(|i| v[i] * m[i][j]).sum()).collect()
}

/// Vector-valued adaptive Simpson; `tol[k]` bounds component `k`.
pub fn adaptive_simpson_vec<F: Fn(f64) -> Vec<f64>>(f: &F, a: f64, b: f64, tol: &[f64]) -> Vec<f64> {
    fn combine(h: f64, fa: &[f64], fm: &[f64], fb: &[f64]) -> Vec<f64> {
        (0..fa.len()).map(|k| h / 6.0 * (fa[k] + 4.0 * fm[k] + fb[k])).collect()
    }
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> Vec<f64>>(f: &F, a: f64, b: f64, fa: &[f64], fm: &[f64], fb: &[f64], whole: &[f64], tol: &[f64], depth: u32) -> Vec<f64> {
        let m = 0.5 * (a + b);
        let flm = f(0.5 * (a + m));
        let frm = f(0.5 * (m + b));
        let left = combine(m - a, fa, &flm, fm);
        let right = combine(b - m, fm, &frm, fb);
        let delta: Vec<f64> = (0..fa.len()).map(|k| left[k] + right[k] - whole[k]).collect();
        if depth == 0 || delta.iter().zip(tol).all(|(d, t)| d.abs() <= 15.0 * t) {
            (0..fa.len()).map(|k| left[k] + right[k] + delta[k] / 15.0).collect()
        } else {
            let half: Vec<f64> = tol.iter().map(|t| 0.5 * t).collect();
            let l = step(f, a, m, fa, &flm, fm, &left, &half, depth - 1);
            let r = step(f, m, b, fm, &frm, fb, &right, &half, depth - 1);
            l.iter().zip(&r).map(|(x, y)| x + y).collect()
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = combine(b - a, &fa, &fm, &fb);
    step(f, a, b, &fa, &fm, &fb, &whole, tol, 40)
}

impl BruteSection {
    /// Vector integral over the depth, restarted at layer junctions, with
    /// tolerances relative to a coarse first estimate.
    pub fn full_vec<F: Fn(f64) -> Vec<f64>>(&self, f: F, rel: f64) -> Vec<f64> {
        let mut pts = vec![-self.half()];
        pts.extend(self.law.junctions().iter().copied().filter(|&t| t.abs() < self.half()));
        pts.push(self.half());
        let mut total: Option<Vec<f64>> = None;
        for w in pts.windows(2) {
            let coarse: Vec<f64> = {
                let n = 64;
                let h = (w[1] - w[0]) / n as f64;
                let mut acc = vec![0.0; f(w[0]).len()];
                for k in 0..n {
                    let v = f(w[0] + (k as f64 + 0.5) * h);
                    acc.iter_mut().zip(&v).for_each(|(a, b)| *a += b.abs() * h);
                }
                acc
            };
            let scale = coarse.iter().fold(0.0f64, |m, v| m.max(*v));
            let tol: Vec<f64> = coarse.iter().map(|c| rel * c.max(1e-6 * scale).max(1e-300)).collect();
            let part = adaptive_simpson_vec(&f, w[0], w[1], &tol);
            total = Some(match total {
                None => part,
                Some(t) => t.iter().zip(&part).map(|(a, b)| a + b).collect(),
            });
        }
        total.unwrap()
    }
}

pub type Grid = Vec<Vec<f64>>;

/// Brute-force ingredients of the modified section stiffness.
pub struct ModifiedOracle {
    pub fs: Grid,
    pub fss: Grid,
    pub hxx: Grid,
    pub hyy: Grid,
    pub hxsx: Grid,
    pub hxsy: Grid,
    pub hysy: Grid,
    pub dt: Grid,
}

impl BruteSection {
    /// Equilibrium shear and normal profiles `(S, Tȳ)`, `w` and `θ` columns.
    pub fn profiles(&self, fn_: &[Vec<f64>], y: f64) -> ([f64; 2], [f64; 2]) {
        let s = row_times(&self.first(y), fn_);
        let t = row_times(&self.second_cauchy(y), fn_);
        ([-s[1], -s[2]], [t[1], t[2]])
    }

    pub fn modified(&self) -> ModifiedOracle {
        let fn_ = gauss_jordan_inverse(&self.dn());
        let nu = self.law.poisson;
        let width = self.width;
        let depth = 2.0 * self.half();
        // 2 + 4 + 16 + 8 + 16 + 8 + 4 entries, in that order.
        let integrand = |y: f64| -> Vec<f64> {
            let (sv, tv) = self.profiles(&fn_, y);
            let (e, g) = (self.young(y), self.shear(y));
            let w = warping_shapes(y, depth);
            let tx: Vec<f64> = (0..4).map(|i| self.tx(i, y)).collect();
            let bx: Vec<f64> = (0..4).map(|i| self.bx(i, y)).collect();
            let by: Vec<f64> = (0..4).map(|i| self.by(i, y)).collect();
            let mut v = Vec::with_capacity(58);
            v.extend((0..2).map(|k| width * sv[k] * w.g));
            v.extend((0..4).map(|m| width * sv[m / 2] * sv[m % 2] / g));
            v.extend((0..16).map(|m| width * tx[m / 4] * bx[m % 4]));
            v.extend((0..8).map(|m| width * tv[m / 4] * by[m % 4]));
            v.extend((0..16).map(|m| width * tx[m / 4] * tx[m % 4] / e));
            v.extend((0..8).map(|m| width * tx[m / 2] * tv[m % 2] * (-nu / e)));
            v.extend((0..4).map(|m| width * tv[m / 2] * tv[m % 2] / e));
            v
        };
        let o = self.full_vec(integrand, 1e-11);
        let grid = |off: usize, r: usize, c: usize| -> Grid {
            (0..r).map(|i| (0..c).map(|j| o[off + i * c + j]).collect()).collect()
        };
        let fs = grid(0, 2, 1);
        let fss = grid(2, 2, 2);
        let hxx = grid(6, 4, 4);
        let hyy = grid(22, 2, 4);
        let hxsx = grid(30, 4, 4);
        let hxsy = grid(46, 4, 2);
        let hysy = grid(54, 2, 2);

        let hex: Grid = (0..4)
            .map(|i| (0..4).map(|j| hxx[i][j] + hxx[j][i] - hxsx[i][j]).collect())
            .collect();
        let hey: Grid = (0..2).map(|k| (0..4).map(|j| hyy[k][j] - hxsy[j][k]).collect()).collect();
        let hysy_inv = gauss_jordan_inverse(&hysy);
        let fss_inv = gauss_jordan_inverse(&fss);
        let mut raw = vec![vec![0.0; 5]; 5];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = hex[i][j];
                for k in 0..2 {
                    for l in 0..2 {
                        acc += hey[k][i] * hysy_inv[k][l] * hey[l][j];
                    }
                }
                raw[i][j] = acc;
            }
        }
        let mut dt: Grid = (0..5).map(|i| (0..5).map(|j| 0.5 * (raw[i][j] + raw[j][i])).collect()).collect();
        dt[4][4] = (0..2)
            .flat_map(|k| (0..2).map(move |l| (k, l)))
            .map(|(k, l)| fs[k][0] * fss_inv[k][l] * fs[l][0])
            .sum();
        ModifiedOracle { fs, fss, hxx, hyy, hxsx, hxsy, hysy, dt }
    }
}

/// Largest entrywise relative deviation of `got` from `want`. Entries more
/// than four orders below the largest reference entry (structural zeros
/// carrying round-off) are measured against that level instead.
pub fn max_relative_deviation(got: impl Fn(usize, usize) -> f64, want: &[Vec<f64>]) -> f64 {
    let scale = want.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst = 0.0f64;
    for (i, row) in want.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            let d = (got(i, j) - w).abs() / w.abs().max(1e-4 * scale).max(1e-300);
            worst = worst.max(d);
        }
    }
    worst
}
