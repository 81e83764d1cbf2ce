//! Periodic points by homotopy continuation, preimages of points, and
//! superattracting certification through the chain rule over a cycle.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use super::{point_chart, Endomorphism, JacobianMatrix};
use crate::algebra::Rational;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::geometry::{point_image, ProjPoint};
use crate::numeric::homotopy::{newton_refine, solve, HomogSystem};
use crate::numeric::{chart_index, cluster, normalize, proj_distance, solve_linear, C64};

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Inexact(C64),
}

impl Scalar {
    pub fn norm(&self) -> f64 {
        match self {
            Scalar::Exact(r) => crate::algebra::rat_to_f64(r).abs(),
            Scalar::Inexact(c) => c.norm(),
        }
    }

    pub fn to_complex(&self) -> C64 {
        match self {
            Scalar::Exact(r) => C64::new(crate::algebra::rat_to_f64(r), 0.0),
            Scalar::Inexact(c) => *c,
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => s.serialize_str(&r.to_string()),
            Scalar::Inexact(c) => s.serialize_str(&format!("{}{:+}i", c.re, c.im)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    SuperattractingZeroDifferential,
    SuperattractingNilpotentNonzero,
    Attracting,
    Other,
    /// Inexact trace or determinant inside the ambiguity band.
    Undecided,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::SuperattractingZeroDifferential => "superattracting-zero-differential",
            Classification::SuperattractingNilpotentNonzero => "superattracting-nilpotent-nonzero",
            Classification::Attracting => "attracting",
            Classification::Other => "other",
            Classification::Undecided => "undecided",
        }
    }

    pub fn is_superattracting(self) -> bool {
        matches!(self, Classification::SuperattractingZeroDifferential | Classification::SuperattractingNilpotentNonzero)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicPoint {
    pub point: ProjPoint,
    pub period: u32,
    /// The orbit `p, f(p), …, f^{n-1}(p)`.
    pub cycle: Vec<ProjPoint>,
    /// Number of coincident solutions of the fixed-point system.
    pub multiplicity: u32,
    /// Chart in which the differential of `f^n` is expressed.
    pub chart: Option<usize>,
    pub matrix: Option<JacobianMatrix>,
    pub trace: Option<Scalar>,
    pub det: Option<Scalar>,
    pub classification: Option<Classification>,
    /// Tolerance used for inexact verdicts.
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodSummary {
    pub period: u32,
    /// Solutions of `f^n(x) = x` expected with multiplicity.
    pub expected: u64,
    /// Solutions found with multiplicity.
    pub found: u64,
    pub dropped_paths: usize,
    pub ambiguous_clusters: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodicSearch {
    pub points: Vec<PeriodicPoint>,
    pub per_period: Vec<PeriodSummary>,
}

/// `F^n(x)` and its homogeneous Jacobian by the chain rule.
fn iterate_with_jacobian(f: &Endomorphism, n: u32, x: &[C64]) -> (Vec<C64>, Vec<Vec<C64>>) {
    let m = x.len();
    let mut v = x.to_vec();
    let mut jac: Vec<Vec<C64>> =
        (0..m).map(|i| (0..m).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()).collect();
    for _ in 0..n {
        let (fv, jf) = f.apply_with_jacobian(&v);
        jac = (0..m).map(|i| (0..m).map(|j| (0..m).map(|k| jf[i][k] * jac[k][j]).sum()).collect()).collect();
        v = fv;
    }
    (v, jac)
}

fn iterate_complex(f: &Endomorphism, n: u32, x: &[C64]) -> Vec<C64> {
    let mut v = normalize(x);
    for _ in 0..n {
        v = normalize(&f.apply_complex(&v));
    }
    v
}

fn matvec(m: &[Vec<C64>], x: &[C64]) -> Vec<C64> {
    m.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

fn invert(m: &[Vec<C64>]) -> Option<Vec<Vec<C64>>> {
    let n = m.len();
    let cols: Option<Vec<Vec<C64>>> = (0..n)
        .map(|j| {
            let e: Vec<C64> = (0..n).map(|i| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect();
            solve_linear(m, &e)
        })
        .collect();
    let cols = cols?;
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

/// `E_i(y) = g_i(y) y_L - g_L(y) y_i` for `g = M^{-1} F^n M`.
struct FixedPointSystem<'a> {
    f: &'a Endomorphism,
    n: u32,
    m: Vec<Vec<C64>>,
    minv: Vec<Vec<C64>>,
}

impl HomogSystem for FixedPointSystem<'_> {
    fn nvars(&self) -> usize {
        self.f.nvars()
    }

    fn degrees(&self) -> Vec<u32> {
        vec![self.f.degree().pow(self.n) + 1; self.f.k()]
    }

    fn eval_jac(&self, y: &[C64]) -> (Vec<C64>, Vec<Vec<C64>>) {
        let nv = y.len();
        let last = nv - 1;
        let x = matvec(&self.m, y);
        let (fx, jx) = iterate_with_jacobian(self.f, self.n, &x);
        let g = matvec(&self.minv, &fx);
        let jm: Vec<Vec<C64>> =
            (0..nv).map(|i| (0..nv).map(|j| (0..nv).map(|k| jx[i][k] * self.m[k][j]).sum()).collect()).collect();
        let jg: Vec<Vec<C64>> =
            (0..nv).map(|i| (0..nv).map(|j| (0..nv).map(|k| self.minv[i][k] * jm[k][j]).sum()).collect()).collect();
        let mut vals = Vec::with_capacity(last);
        let mut rows = Vec::with_capacity(last);
        for i in 0..last {
            vals.push(g[i] * y[last] - g[last] * y[i]);
            let mut row: Vec<C64> = (0..nv).map(|j| jg[i][j] * y[last] - jg[last][j] * y[i]).collect();
            row[last] += g[i];
            row[i] -= g[last];
            rows.push(row);
        }
        (vals, rows)
    }
}

/// `E_i(x) = F_i(x) c_L - F_L(x) c_i` for `i ≠ L`, where `F` is `f^n` and `c`
/// is either a fixed target or `x` itself.
struct ChartSystem<'a> {
    f: &'a Endomorphism,
    n: u32,
    target: Option<Vec<C64>>,
    chart: usize,
}

impl HomogSystem for ChartSystem<'_> {
    fn nvars(&self) -> usize {
        self.f.nvars()
    }

    fn degrees(&self) -> Vec<u32> {
        let extra = if self.target.is_some() { 0 } else { 1 };
        vec![self.f.degree().pow(self.n) + extra; self.f.k()]
    }

    fn eval_jac(&self, x: &[C64]) -> (Vec<C64>, Vec<Vec<C64>>) {
        let nv = x.len();
        let l = self.chart;
        let (fx, jx) = iterate_with_jacobian(self.f, self.n, x);
        let mut vals = Vec::new();
        let mut rows = Vec::new();
        for i in (0..nv).filter(|&i| i != l) {
            match &self.target {
                Some(c) => {
                    vals.push(fx[i] * c[l] - fx[l] * c[i]);
                    rows.push((0..nv).map(|j| jx[i][j] * c[l] - jx[l][j] * c[i]).collect());
                }
                None => {
                    vals.push(fx[i] * x[l] - fx[l] * x[i]);
                    let mut row: Vec<C64> = (0..nv).map(|j| jx[i][j] * x[l] - jx[l][j] * x[i]).collect();
                    row[l] += fx[i];
                    row[i] -= fx[l];
                    rows.push(row);
                }
            }
        }
        (vals, rows)
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<C64>> {
    loop {
        let m: Vec<Vec<C64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let base = if i == j { 1.0 } else { 0.0 };
                        C64::new(base + rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))
                    })
                    .collect()
            })
            .collect();
        if invert(&m).is_some() {
            return m;
        }
    }
}

/// Best rational approximation with denominator at most `max_den`.
fn rationalize(x: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        if a.abs() > 1e12 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a as f64;
        if frac.abs() < 1e-13 {
            break;
        }
        r = 1.0 / frac;
    }
    (k1 != 0 && (x - h1 as f64 / k1 as f64).abs() < 1e-9).then(|| Rational::new(h1.into(), k1.into()))
}

/// Exact point near `x` with small denominators, if there is one.
pub fn recognize_rational(x: &[C64]) -> Option<ProjPoint> {
    let a = chart_index(x);
    let y: Vec<C64> = x.iter().map(|v| v / x[a]).collect();
    let coords: Option<Vec<Rational>> =
        y.iter().map(|v| if v.im.abs() < 1e-9 { rationalize(v.re, 10_000) } else { None }).collect();
    coords.map(|c| ProjPoint::from_rationals(&c))
}

fn exact_orbit_returns(f: &Endomorphism, p: &ProjPoint, n: u32) -> bool {
    let mut q = p.clone();
    for _ in 0..n {
        q = point_image(f, &q);
    }
    q == *p
}

fn returns_within(f: &Endomorphism, p: &ProjPoint, n: u32, tol: f64) -> bool {
    match p {
        ProjPoint::Exact(_) => exact_orbit_returns(f, p, n),
        ProjPoint::Inexact(x) => proj_distance(&iterate_complex(f, n, x), x) < tol,
    }
}

fn minimal_period(f: &Endomorphism, p: &ProjPoint, n: u32, tol: f64) -> u32 {
    (1..=n).find(|m| n % m == 0 && returns_within(f, p, *m, tol)).unwrap_or(n)
}

const SINGULAR_MERGE_TOL: f64 = 1e-6;

/// Solutions of `F(x) = y` for a point `y`, as `(point, multiplicity)`.
/// Multiplicities sum to `d^k` or the call fails.
pub fn preimages(f: &Endomorphism, y: &ProjPoint, cfg: &Config) -> Result<Vec<(ProjPoint, u32)>> {
    let c = y.to_complex();
    let sys = ChartSystem { f, n: 1, target: Some(c.clone()), chart: chart_index(&c) };
    let ends = solve(&sys, cfg.seed);
    let expected = (f.degree() as u64).pow(f.k() as u32);
    let mut pts = Vec::new();
    for e in &ends {
        if !e.converged {
            continue;
        }
        let x = newton_refine(&sys, &e.point, 6);
        if proj_distance(&x, &e.point) > 1e-6 {
            continue;
        }
        let img = normalize(&f.apply_complex(&x));
        if proj_distance(&img, &c) < cfg.residual_tol.max(1e-8) {
            pts.push(x);
        }
    }
    let groups = cluster(&pts, cfg.cluster_tol);
    let total: usize = groups.iter().map(Vec::len).sum();
    if total as u64 != expected {
        return Err(Error::SolverShortfall(format!(
            "{total} of {expected} preimages of {y} certified"
        )));
    }
    // Paths ending at a singular root agree only to about the square root
    // of the working precision, so nearby clusters are merged first.
    let mut merged: Vec<(Vec<C64>, u32)> = Vec::new();
    for g in &groups {
        let x = &pts[g[0]];
        match merged.iter_mut().find(|(r, _)| proj_distance(r, x) < SINGULAR_MERGE_TOL) {
            Some(m) => m.1 += g.len() as u32,
            None => merged.push((x.clone(), g.len() as u32)),
        }
    }
    let mut out: Vec<(ProjPoint, u32)> = Vec::new();
    for (x, mult) in merged {
        let p = match (y.is_exact(), recognize_rational(&x)) {
            (true, Some(q)) if point_image(f, &q) == *y => q,
            _ => ProjPoint::from_complex(&x),
        };
        match out.iter_mut().find(|(q, _)| q.is_exact() && *q == p) {
            Some(e) => e.1 += mult,
            None => out.push((p, mult)),
        }
    }
    out.sort_by(|a, b| a.0.to_string().cmp(&b.0.to_string()));
    Ok(out)
}

/// Periodic points of period at most `n_max`, each with its minimal period
/// and classification.
pub fn find_periodic(f: &Endomorphism, n_max: u32, cfg: &Config) -> Result<PeriodicSearch> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    let top = (f.degree() as u64).checked_pow(n_max).unwrap_or(u64::MAX);
    if top > cfg.degree_budget as u64 {
        return Err(Error::BudgetExceeded(format!("period {n_max} needs degree {top}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xf1c5);
    let mut found: Vec<PeriodicPoint> = Vec::new();
    let mut per_period = Vec::new();
    let k = f.k() as u32;
    for n in 1..=n_max {
        let big_d = (f.degree() as u64).pow(n);
        let expected: u64 = (0..=k).map(|i| big_d.pow(i)).sum();
        let m = random_matrix(&mut rng, f.nvars());
        let minv = invert(&m).unwrap();
        let sys = FixedPointSystem { f, n, m: m.clone(), minv };
        let ends = solve(&sys, rng.gen());
        let mut dropped = 0;
        let mut pts: Vec<Vec<C64>> = Vec::new();
        for e in &ends {
            if !e.converged {
                dropped += 1;
                continue;
            }
            let x0 = normalize(&matvec(&m, &e.point));
            // only polish endpoints that already solve the fixed-point problem
            if proj_distance(&iterate_complex(f, n, &x0), &x0) > 1e-6 {
                continue;
            }
            let polish = ChartSystem { f, n, target: None, chart: chart_index(&x0) };
            let x = newton_refine(&polish, &x0, 8);
            if proj_distance(&x, &x0) < 1e-6 && proj_distance(&iterate_complex(f, n, &x), &x) < cfg.residual_tol {
                pts.push(x);
            }
        }
        let groups = cluster(&pts, cfg.cluster_tol);
        let reps: Vec<&Vec<C64>> = groups.iter().map(|g| &pts[g[0]]).collect();
        let mut ambiguous = 0;
        for i in 0..reps.len() {
            if (0..reps.len()).any(|j| j != i && proj_distance(reps[i], reps[j]) < 10.0 * cfg.cluster_tol) {
                ambiguous += 1;
            }
        }
        let total: usize = groups.iter().map(Vec::len).sum();
        per_period.push(PeriodSummary {
            period: n,
            expected,
            found: total as u64,
            dropped_paths: dropped,
            ambiguous_clusters: ambiguous,
        });
        for g in &groups {
            let x = &pts[g[0]];
            let p = match recognize_rational(x) {
                Some(q) if exact_orbit_returns(f, &q, n) => q,
                _ => ProjPoint::from_complex(x),
            };
            let period = minimal_period(f, &p, n, cfg.residual_tol.max(1e-9));
            if period != n {
                continue;
            }
            if found.iter().any(|q| q.point.same_as(&p, cfg.cluster_tol)) {
                continue;
            }
            let cycle = orbit(f, &p, n);
            let pp = PeriodicPoint {
                point: p,
                period,
                cycle,
                multiplicity: g.len() as u32,
                chart: None,
                matrix: None,
                trace: None,
                det: None,
                classification: None,
                tolerance: cfg.classification_tol,
            };
            found.push(certify_superattracting(f, &pp, cfg)?);
        }
    }
    found.sort_by(|a, b| a.period.cmp(&b.period).then_with(|| a.point.to_string().cmp(&b.point.to_string())));
    Ok(PeriodicSearch { points: found, per_period })
}

fn orbit(f: &Endomorphism, p: &ProjPoint, n: u32) -> Vec<ProjPoint> {
    let mut out = vec![p.clone()];
    for _ in 1..n {
        let next = point_image(f, out.last().unwrap());
        out.push(next);
    }
    out
}

/// Differential of `f^n` over the cycle of `pp` in the chart of its largest
/// coordinate, together with its nilpotency verdict.
pub fn certify_superattracting(f: &Endomorphism, pp: &PeriodicPoint, cfg: &Config) -> Result<PeriodicPoint> {
    let n = pp.period;
    let tol = cfg.classification_tol;
    if !returns_within(f, &pp.point, n, cfg.residual_tol.max(1e-9)) {
        return Err(Error::Precondition(format!("{} is not periodic of period {n}", pp.point)));
    }
    let cycle = orbit(f, &pp.point, n);
    let charts: Vec<usize> = cycle.iter().map(point_chart).collect();
    let mut total: Option<JacobianMatrix> = None;
    for i in 0..n as usize {
        let next = charts[(i + 1) % n as usize];
        let step = f.differential_in_charts(&cycle[i], charts[i], next).matrix;
        total = Some(match total {
            None => step,
            Some(acc) => step.mul(&acc),
        });
    }
    let matrix = total.unwrap();
    let (trace, det) = trace_det(&matrix);
    let classification = classify(&matrix, &trace, &det, tol);
    Ok(PeriodicPoint {
        cycle,
        chart: Some(charts[0]),
        matrix: Some(matrix),
        trace: Some(trace),
        det: Some(det),
        classification: Some(classification),
        tolerance: tol,
        ..pp.clone()
    })
}

fn trace_det(m: &JacobianMatrix) -> (Scalar, Scalar) {
    match m {
        JacobianMatrix::Exact(a) if a.len() == 1 => (Scalar::Exact(a[0][0].clone()), Scalar::Exact(a[0][0].clone())),
        JacobianMatrix::Exact(a) => (
            Scalar::Exact(&a[0][0] + &a[1][1]),
            Scalar::Exact(&a[0][0] * &a[1][1] - &a[0][1] * &a[1][0]),
        ),
        JacobianMatrix::Inexact(a) if a.len() == 1 => (Scalar::Inexact(a[0][0]), Scalar::Inexact(a[0][0])),
        JacobianMatrix::Inexact(a) => {
            (Scalar::Inexact(a[0][0] + a[1][1]), Scalar::Inexact(a[0][0] * a[1][1] - a[0][1] * a[1][0]))
        }
    }
}

fn spectral_radius(trace: C64, det: C64, size: usize) -> f64 {
    if size == 1 {
        return trace.norm();
    }
    let disc = (trace * trace - 4.0 * det).sqrt();
    ((trace + disc) / 2.0).norm().max(((trace - disc) / 2.0).norm())
}

fn classify(m: &JacobianMatrix, trace: &Scalar, det: &Scalar, tol: f64) -> Classification {
    let size = m.size();
    match (trace, det) {
        (Scalar::Exact(t), Scalar::Exact(d)) => {
            if t.is_zero() && d.is_zero() {
                if m.is_zero_exact() {
                    Classification::SuperattractingZeroDifferential
                } else {
                    Classification::SuperattractingNilpotentNonzero
                }
            } else if spectral_radius(trace.to_complex(), det.to_complex(), size) < 1.0 {
                Classification::Attracting
            } else {
                Classification::Other
            }
        }
        _ => {
            let (t, d) = (trace.norm(), det.norm());
            if t < tol && d < tol {
                let max_entry = m.to_complex().iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
                if max_entry < tol {
                    Classification::SuperattractingZeroDifferential
                } else {
                    Classification::SuperattractingNilpotentNonzero
                }
            } else if t <= 10.0 * tol && d <= 10.0 * tol {
                Classification::Undecided
            } else if spectral_radius(trace.to_complex(), det.to_complex(), size) < 1.0 {
                Classification::Attracting
            } else {
                Classification::Other
            }
        }
    }
}
