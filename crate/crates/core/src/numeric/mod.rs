//! Double-precision complex helpers: compiled forms, small linear solves,
//! projective normalization, and a projective homotopy solver.

pub mod homotopy;

use num_complex::Complex64;

use crate::algebra::{rat_to_f64, HomogPoly};

pub type C64 = Complex64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// A form with complex coefficients, compiled for fast evaluation.
#[derive(Clone, Debug)]
pub struct NumPoly {
    pub nvars: usize,
    pub degree: u32,
    pub terms: Vec<([u32; 3], C64)>,
}

impl NumPoly {
    pub fn from_homog(p: &HomogPoly) -> Self {
        NumPoly {
            nvars: p.nvars(),
            degree: p.degree(),
            terms: p.terms().map(|(m, c)| (m.0, C64::new(rat_to_f64(c), 0.0))).collect(),
        }
    }

    fn powers(&self, x: &[C64]) -> Vec<Vec<C64>> {
        let d = self.degree as usize;
        (0..self.nvars)
            .map(|i| {
                let mut v = Vec::with_capacity(d + 1);
                v.push(C64::new(1.0, 0.0));
                for k in 0..d {
                    let next = v[k] * x[i];
                    v.push(next);
                }
                v
            })
            .collect()
    }

    pub fn eval(&self, x: &[C64]) -> C64 {
        let pw = self.powers(x);
        let mut s = C64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = *c;
            for i in 0..self.nvars {
                t *= pw[i][e[i] as usize];
            }
            s += t;
        }
        s
    }

    pub fn eval_grad(&self, x: &[C64]) -> (C64, Vec<C64>) {
        let pw = self.powers(x);
        let mut s = C64::new(0.0, 0.0);
        let mut g = vec![C64::new(0.0, 0.0); self.nvars];
        for (e, c) in &self.terms {
            let mut t = *c;
            for i in 0..self.nvars {
                t *= pw[i][e[i] as usize];
            }
            s += t;
            for j in 0..self.nvars {
                if e[j] == 0 {
                    continue;
                }
                let mut d = *c * e[j] as f64;
                for i in 0..self.nvars {
                    let k = if i == j { e[i] - 1 } else { e[i] };
                    d *= pw[i][k as usize];
                }
                g[j] += d;
            }
        }
        (s, g)
    }

    /// Sum of coefficient magnitudes.
    pub fn l1(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).sum()
    }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` for numerically singular systems.
pub fn solve_linear(a: &[Vec<C64>], b: &[C64]) -> Option<Vec<C64>> {
    let n = b.len();
    let mut m: Vec<Vec<C64>> = a.to_vec();
    let mut r = b.to_vec();
    let scale = m.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].norm().total_cmp(&m[j][k].norm()))?;
        if m[p][k].norm() <= scale * 1e-15 {
            return None;
        }
        m.swap(k, p);
        r.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for j in k..n {
                let v = m[k][j];
                m[i][j] -= f * v;
            }
            let v = r[k];
            r[i] -= f * v;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for k in (0..n).rev() {
        let mut s = r[k];
        for j in k + 1..n {
            s -= m[k][j] * x[j];
        }
        x[k] = s / m[k][k];
    }
    Some(x)
}

pub fn max_norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Index of the largest-magnitude coordinate, ties to the lowest index.
pub fn chart_index(x: &[C64]) -> usize {
    let mut best = 0;
    for i in 1..x.len() {
        if x[i].norm() > x[best].norm() {
            best = i;
        }
    }
    best
}

/// Scale to unit max-norm with the largest-magnitude coordinate real
/// positive.
pub fn normalize(x: &[C64]) -> Vec<C64> {
    let a = chart_index(x);
    let s = x[a];
    x.iter().map(|v| v / s).collect()
}

/// Distance between two projective points in the chart of the first:
/// `max_j |x_j/x_a - y_j/y_a|` with `a` the largest coordinate of `x`.
pub fn chart_distance(x: &[C64], y: &[C64]) -> f64 {
    let a = chart_index(x);
    if y[a].norm() <= 1e-300 {
        return f64::INFINITY;
    }
    let xa = x[a];
    let ya = y[a];
    x.iter().zip(y).map(|(u, v)| (u / xa - v / ya).norm()).fold(0.0, f64::max)
}

/// Symmetric projective distance.
pub fn proj_distance(x: &[C64], y: &[C64]) -> f64 {
    chart_distance(x, y).max(chart_distance(y, x))
}

/// Greedy clustering by projective distance. Returns clusters as index
/// lists, in order of first appearance.
pub fn cluster(points: &[Vec<C64>], tol: f64) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        match clusters.iter_mut().find(|c| proj_distance(&points[c[0]], p) < tol) {
            Some(c) => c.push(i),
            None => clusters.push(vec![i]),
        }
    }
    clusters
}

/// All complex roots of `Σ coeffs[i] x^i` (nonzero leading coefficient) by
/// the Aberth iteration, each refined by a few Newton steps.
pub fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lc = coeffs[n];
    let a: Vec<C64> = coeffs.iter().map(|v| v / lc).collect();
    if n == 1 {
        return vec![-a[0]];
    }
    let eval = |z: C64| -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for c in a.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    let radius = 1.0 + a[..n].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let r0 = radius.min(a[..n].iter().map(|v| v.norm()).sum::<f64>().max(1e-3)).max(1e-3);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(r0 * 0.8, std::f64::consts::TAU * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p == C64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let s: C64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            *zi -= step;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_solve_small() {
        let a = vec![vec![c(2.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 1.0), c(3.0, 0.0)]];
        let b = vec![c(3.0, 0.0), c(3.0, 1.0)];
        let x = solve_linear(&a, &b).unwrap();
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((x[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let p = NumPoly::from_homog(&HomogPoly::parse("z^2 - w*t + 3*t^2", 3).unwrap());
        let x = [c(0.3, 0.1), c(-0.7, 0.2), c(1.1, -0.4)];
        let (_, g) = p.eval_grad(&x);
        let h = 1e-7;
        for j in 0..3 {
            let mut xp = x;
            xp[j] += c(h, 0.0);
            let fd = (p.eval(&xp) - p.eval(&x)) / h;
            assert!((fd - g[j]).norm() < 1e-5);
        }
    }

    #[test]
    fn aberth_finds_cubic_roots() {
        // (x - 1)(x + 2)(x - 3i)
        let r = [c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 3.0)];
        let coeffs = [
            -r[0] * r[1] * r[2],
            r[0] * r[1] + r[0] * r[2] + r[1] * r[2],
            -(r[0] + r[1] + r[2]),
            c(1.0, 0.0),
        ];
        let got = poly_roots(&coeffs);
        for want in r {
            assert!(got.iter().any(|g| (g - want).norm() < 1e-12));
        }
    }

    #[test]
    fn projective_distance_is_scale_free() {
        let x = vec![c(1.0, 0.0), c(0.5, 0.5), c(-0.25, 0.0)];
        let y: Vec<C64> = x.iter().map(|v| v * c(-3.0, 2.0)).collect();
        assert!(proj_distance(&x, &y) < 1e-14);
        assert!((normalize(&y)[0] - c(1.0, 0.0)).norm() < 1e-14);
    }
}
