//! Projective total-degree homotopy continuation.
//!
//! A square system of `n` forms in `n + 1` homogeneous unknowns is joined
//! to the start system `x_i^{d_i} - x_n^{d_i}` through
//! `H(x, s) = (1 - s) γ G(x) + s F(x)`, with a random complex `γ` and a
//! random affine patch `a · x = 1`. Every isolated solution of `F` is the
//! endpoint of at least one of the `∏ d_i` paths (with probability one).
//! Paths are tracked with an RK4 predictor and a Newton corrector.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{max_norm, normalize, solve_linear, NumPoly, C64};

/// A square homogeneous system: `degrees().len() == nvars() - 1`.
pub trait HomogSystem: Sync {
    fn nvars(&self) -> usize;
    fn degrees(&self) -> Vec<u32>;
    /// Values and Jacobian (one row per equation).
    fn eval_jac(&self, x: &[C64]) -> (Vec<C64>, Vec<Vec<C64>>);
}

/// A system given by explicit forms.
pub struct Forms(pub Vec<NumPoly>);

impl HomogSystem for Forms {
    fn nvars(&self) -> usize {
        self.0[0].nvars
    }

    fn degrees(&self) -> Vec<u32> {
        self.0.iter().map(|p| p.degree).collect()
    }

    fn eval_jac(&self, x: &[C64]) -> (Vec<C64>, Vec<Vec<C64>>) {
        self.0.iter().map(|p| p.eval_grad(x)).unzip()
    }
}

#[derive(Clone, Debug)]
pub struct PathEnd {
    /// Endpoint, normalized to unit max-norm.
    pub point: Vec<C64>,
    /// Whether the path reached `s = 1` and the final Newton step converged.
    pub converged: bool,
}

struct Tracker<'a> {
    sys: &'a dyn HomogSystem,
    n: usize,
    degrees: Vec<u32>,
    scale: Vec<f64>,
    gamma: C64,
    patch: Vec<C64>,
}

struct Eval {
    h: Vec<C64>,
    hx: Vec<Vec<C64>>,
    hs: Vec<C64>,
}

impl Tracker<'_> {
    fn target(&self, x: &[C64]) -> (Vec<C64>, Vec<Vec<C64>>) {
        let (mut f, mut j) = self.sys.eval_jac(x);
        for i in 0..self.n {
            f[i] /= self.scale[i];
            for v in j[i].iter_mut() {
                *v /= self.scale[i];
            }
        }
        (f, j)
    }

    fn eval(&self, x: &[C64], s: f64) -> Eval {
        let n = self.n;
        let (f, jf) = self.target(x);
        let mut h = Vec::with_capacity(n + 1);
        let mut hx = Vec::with_capacity(n + 1);
        let mut hs = Vec::with_capacity(n + 1);
        let g_w = (1.0 - s) * self.gamma;
        for i in 0..n {
            let d = self.degrees[i] as i32;
            let gi = x[i].powi(d) - x[n].powi(d);
            let mut row: Vec<C64> = jf[i].iter().map(|v| v * s).collect();
            row[i] += g_w * (d as f64) * x[i].powi(d - 1);
            row[n] -= g_w * (d as f64) * x[n].powi(d - 1);
            h.push(g_w * gi + s * f[i]);
            hs.push(f[i] - self.gamma * gi);
            hx.push(row);
        }
        let ax: C64 = self.patch.iter().zip(x).map(|(a, v)| a * v).sum();
        h.push(ax - 1.0);
        hs.push(C64::new(0.0, 0.0));
        hx.push(self.patch.clone());
        Eval { h, hx, hs }
    }

    fn tangent(&self, x: &[C64], s: f64) -> Option<Vec<C64>> {
        let e = self.eval(x, s);
        let rhs: Vec<C64> = e.hs.iter().map(|v| -v).collect();
        solve_linear(&e.hx, &rhs)
    }

    fn predict(&self, x: &[C64], s: f64, h: f64) -> Option<Vec<C64>> {
        let axpy = |k: &[C64], c: f64| -> Vec<C64> { x.iter().zip(k).map(|(a, b)| a + b * c).collect() };
        let k1 = self.tangent(x, s)?;
        let k2 = self.tangent(&axpy(&k1, h / 2.0), s + h / 2.0)?;
        let k3 = self.tangent(&axpy(&k2, h / 2.0), s + h / 2.0)?;
        let k4 = self.tangent(&axpy(&k3, h), s + h)?;
        Some(
            (0..x.len())
                .map(|i| x[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0))
                .collect(),
        )
    }

    fn newton_step(&self, x: &[C64], s: f64) -> Option<(Vec<C64>, f64)> {
        let e = self.eval(x, s);
        let rhs: Vec<C64> = e.h.iter().map(|v| -v).collect();
        let dx = solve_linear(&e.hx, &rhs)?;
        let size = max_norm(&dx);
        Some((x.iter().zip(&dx).map(|(a, b)| a + b).collect(), size))
    }

    fn correct(&self, mut x: Vec<C64>, s: f64) -> Option<Vec<C64>> {
        let scale = 1.0 + max_norm(&x);
        let mut last = f64::INFINITY;
        for it in 0..4 {
            let (y, size) = self.newton_step(&x, s)?;
            if it == 0 && size > 0.05 * scale {
                return None;
            }
            if size > 0.5 * last && size > 1e-12 * scale {
                return None;
            }
            x = y;
            if size < 1e-11 * scale {
                return Some(x);
            }
            last = size;
        }
        (last < 1e-8 * scale).then_some(x)
    }

    fn track(&self, start: Vec<C64>) -> PathEnd {
        let mut x = start;
        let mut s = 0.0f64;
        let mut h = 0.01f64;
        let mut streak = 0;
        let mut steps = 0;
        let mut ok = true;
        while s < 1.0 {
            steps += 1;
            if steps > 50_000 || h < 1e-14 || max_norm(&x) > 1e12 {
                ok = false;
                break;
            }
            let step = h.min(1.0 - s);
            let next = self.predict(&x, s, step).and_then(|p| self.correct(p, s + step));
            match next {
                Some(y) => {
                    x = y;
                    s = if step == 1.0 - s { 1.0 } else { s + step };
                    streak += 1;
                    if streak >= 3 {
                        h = (h * 2.0).min(0.05);
                        streak = 0;
                    }
                }
                None => {
                    h /= 2.0;
                    streak = 0;
                }
            }
        }
        if ok {
            ok = self.polish(&mut x);
        } else if s > 0.95 && max_norm(&x) < 1e12 {
            ok = self.endgame(&mut x);
        }
        PathEnd { point: normalize(&x), converged: ok }
    }

    /// Paths heading into a singular endpoint stall once the corrector's
    /// contraction test fails (Newton only halves the error there). Plain
    /// Newton on the target system still converges, linearly, so the path
    /// is finished that way and accepted when the residual is negligible.
    fn endgame(&self, x: &mut Vec<C64>) -> bool {
        for _ in 0..200 {
            let Some((y, size)) = self.newton_step(x, 1.0) else {
                break;
            };
            if !y.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                return false;
            }
            *x = y;
            if size < 1e-14 * (1.0 + max_norm(x)) {
                break;
            }
        }
        let e = self.eval(x, 1.0);
        max_norm(&e.h) < 1e-12 * (1.0 + max_norm(x))
    }

    fn polish(&self, x: &mut Vec<C64>) -> bool {
        for _ in 0..40 {
            let Some((y, size)) = self.newton_step(x, 1.0) else {
                return false;
            };
            if !y.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                return false;
            }
            *x = y;
            if size < 1e-14 * (1.0 + max_norm(x)) {
                return true;
            }
        }
        true
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Tracks all `∏ d_i` paths. Output order matches the start-solution order
/// and is independent of thread scheduling.
pub fn solve(sys: &dyn HomogSystem, seed: u64) -> Vec<PathEnd> {
    let nv = sys.nvars();
    let degrees = sys.degrees();
    let n = nv - 1;
    assert_eq!(degrees.len(), n, "square homogeneous system expected");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = random_unit(&mut rng);
    let patch: Vec<C64> = (0..nv).map(|_| random_unit(&mut rng) * rng.gen_range(0.5..1.5)).collect();

    // Balance each equation against the start system.
    let mut scale = vec![0.0f64; n];
    for _ in 0..4 {
        let p: Vec<C64> = (0..nv).map(|_| random_unit(&mut rng)).collect();
        let (f, _) = sys.eval_jac(&p);
        for i in 0..n {
            scale[i] += f[i].norm() / 4.0;
        }
    }
    for v in scale.iter_mut() {
        if *v == 0.0 || !v.is_finite() {
            *v = 1.0;
        }
    }
    let tracker = Tracker { sys, n, degrees: degrees.clone(), scale, gamma, patch };

    let mut starts: Vec<Vec<C64>> = vec![Vec::new()];
    for &d in &degrees {
        let roots: Vec<C64> =
            (0..d).map(|j| C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / d as f64)).collect();
        starts = starts
            .into_iter()
            .flat_map(|s| roots.iter().map(move |r| [s.clone(), vec![*r]].concat()))
            .collect();
    }
    let starts: Vec<Vec<C64>> = starts
        .into_iter()
        .map(|mut s| {
            s.push(C64::new(1.0, 0.0));
            let ax: C64 = tracker.patch.iter().zip(&s).map(|(a, v)| a * v).sum();
            s.iter().map(|v| v / ax).collect()
        })
        .collect();
    starts.into_par_iter().map(|s| tracker.track(s)).collect()
}

/// Runs Newton on the plain system `F = 0` in the affine chart of the
/// largest coordinate. Returns the polished normalized point.
pub fn newton_refine(sys: &dyn HomogSystem, x: &[C64], iters: usize) -> Vec<C64> {
    let mut x = normalize(x);
    let a = super::chart_index(&x);
    let nv = x.len();
    for _ in 0..iters {
        let (f, j) = sys.eval_jac(&x);
        let mut rows: Vec<Vec<C64>> = j;
        let mut rhs: Vec<C64> = f.iter().map(|v| -v).collect();
        let mut fix = vec![C64::new(0.0, 0.0); nv];
        fix[a] = C64::new(1.0, 0.0);
        rows.push(fix);
        rhs.push(C64::new(0.0, 0.0));
        let Some(dx) = solve_linear(&rows, &rhs) else { break };
        let size = max_norm(&dx);
        x = x.iter().zip(&dx).map(|(u, v)| u + v).collect();
        if size < 1e-15 {
            break;
        }
    }
    normalize(&x)
}
