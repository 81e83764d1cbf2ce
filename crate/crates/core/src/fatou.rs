//! Orbit sampling against known cycles and limit-set components, used for
//! basin renders of affine slices.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::dynamics::{Classification, Endomorphism, PeriodicSearch};
use crate::geometry::{relative_residual, AlgebraicSet, Component, ProjPoint};
use crate::numeric::{c, max_norm, normalize, proj_distance, C64};

/// A periodic cycle used as a convergence target.
#[derive(Clone, Debug, Serialize)]
pub struct CycleTarget {
    pub id: usize,
    pub points: Vec<ProjPoint>,
    pub classification: Option<Classification>,
    #[serde(skip)]
    coords: Vec<Vec<C64>>,
}

impl CycleTarget {
    pub fn new(id: usize, points: Vec<ProjPoint>, classification: Option<Classification>) -> Self {
        let coords = points.iter().map(|p| normalize(&p.to_complex())).collect();
        CycleTarget { id, points, classification, coords }
    }

    pub fn is_superattracting(&self) -> bool {
        self.classification.is_some_and(Classification::is_superattracting)
    }

    /// Smallest chart distance from `x` (normalized) to a cycle member.
    pub fn distance(&self, x: &[C64]) -> f64 {
        self.coords.iter().map(|p| proj_distance(p, x)).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Targets {
    pub cycles: Vec<CycleTarget>,
    /// Components of the limit sets `E_n`.
    pub components: Vec<Component>,
}

impl Targets {
    /// One target per cycle of `search`, plus the components of `limit`.
    pub fn from_analysis(search: &PeriodicSearch, limit: &[&AlgebraicSet], tol: f64) -> Self {
        let mut cycles: Vec<CycleTarget> = Vec::new();
        for pp in &search.points {
            if cycles.iter().any(|c| c.points.iter().any(|q| q.same_as(&pp.point, tol))) {
                continue;
            }
            cycles.push(CycleTarget::new(cycles.len(), pp.cycle.clone(), pp.classification));
        }
        let mut components = Vec::new();
        for set in limit {
            for comp in set.iter() {
                if !components.iter().any(|c: &Component| c.same_as(comp, tol)) {
                    components.push(comp.clone());
                }
            }
        }
        Targets { cycles, components }
    }

    /// Distance-like measure from `x` to the closest limit component:
    /// relative residual for hypersurfaces, chart distance for points.
    fn nearest_component(&self, x: &[C64]) -> Option<(usize, f64)> {
        self.components
            .iter()
            .enumerate()
            .map(|(i, comp)| {
                let d = match comp {
                    Component::Hypersurface(h) => relative_residual(h, x),
                    Component::Point(p) => proj_distance(&normalize(&p.to_complex()), x),
                };
                (i, d)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Converged { cycle: usize, iterations: usize },
    AccumulatesNear { component: usize, distance: f64 },
    Undecided { iterations: usize, diagnostic: Option<String> },
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitVerdict {
    pub start: ProjPoint,
    pub outcome: Outcome,
    /// Distance to the nearest cycle target at the last iterate.
    pub final_distance: f64,
}

const TAIL: usize = 50;

/// Iterates `x` in adaptive charts (each iterate is scaled by its largest
/// coordinate) and classifies the orbit.
pub fn sample_orbit(f: &Endomorphism, x: &ProjPoint, targets: &Targets, cfg: &Config) -> OrbitVerdict {
    sample_orbit_complex(f, &x.to_complex(), targets, cfg, x.clone())
}

fn sample_orbit_complex(f: &Endomorphism, x0: &[C64], targets: &Targets, cfg: &Config, start: ProjPoint) -> OrbitVerdict {
    let mut x = normalize(x0);
    let mut streak = 0usize;
    let mut streak_target = usize::MAX;
    let mut tail: Vec<Vec<C64>> = Vec::with_capacity(TAIL);
    let mut last = f64::INFINITY;
    for it in 1..=cfg.max_iter {
        let y = f.apply_complex(&x);
        let scale = max_norm(&y);
        if !(scale.is_finite() && scale > 0.0) {
            return OrbitVerdict {
                start,
                outcome: Outcome::Undecided { iterations: it, diagnostic: Some("overflow".into()) },
                final_distance: last,
            };
        }
        x = normalize(&y);
        let nearest = targets
            .cycles
            .iter()
            .map(|t| (t.id, t.distance(&x)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((id, d)) = nearest {
            last = d;
            if d < cfg.convergence_tol {
                if id == streak_target {
                    streak += 1;
                } else {
                    streak_target = id;
                    streak = 1;
                }
                if streak >= cfg.convergence_streak {
                    return OrbitVerdict {
                        start,
                        outcome: Outcome::Converged { cycle: id, iterations: it },
                        final_distance: d,
                    };
                }
            } else {
                streak = 0;
            }
        }
        if it + TAIL > cfg.max_iter {
            tail.push(x.clone());
        }
    }
    // the tail is near a component when every tail point is
    let mut worst: Option<(usize, f64)> = None;
    for p in &tail {
        match targets.nearest_component(p) {
            Some((i, d)) => {
                if worst.is_none_or(|(_, w)| d > w) {
                    worst = Some((i, d));
                }
            }
            None => {
                worst = None;
                break;
            }
        }
    }
    let outcome = match worst {
        Some((component, distance)) if distance < cfg.accumulation_tol => {
            Outcome::AccumulatesNear { component, distance }
        }
        _ => Outcome::Undecided { iterations: cfg.max_iter, diagnostic: None },
    };
    OrbitVerdict { start, outcome, final_distance: last }
}

/// `d^{-n} log‖F^n(x̂)‖` for the given lift `x̂`, with renormalization at
/// every step.
pub fn escape_rate_of_lift(f: &Endomorphism, lift: &[C64], n: u32) -> f64 {
    let d = f.degree() as f64;
    let r = max_norm(lift);
    let mut u: Vec<C64> = lift.iter().map(|v| v / r).collect();
    let mut g = r.ln();
    let mut w = 1.0;
    for _ in 0..n {
        w /= d;
        let y = f.apply_complex(&u);
        let s = max_norm(&y);
        g += w * s.ln();
        u = y.iter().map(|v| v / s).collect();
    }
    g
}

/// Escape rate of the canonical lift of `p`: the primitive integer vector
/// for exact points and the stored coordinates otherwise.
pub fn escape_rate(f: &Endomorphism, p: &ProjPoint, n: u32) -> f64 {
    let lift: Vec<C64> = match p {
        ProjPoint::Exact(v) => v.iter().map(|a| c(a.to_f64().unwrap_or(f64::INFINITY), 0.0)).collect(),
        ProjPoint::Inexact(v) => v.clone(),
    };
    escape_rate_of_lift(f, &lift, n)
}

/// Escape rate of the max-norm-one lift, which depends only on the point.
pub fn escape_rate_normalized(f: &Endomorphism, p: &ProjPoint, n: u32) -> f64 {
    let x = p.to_complex();
    let r = max_norm(&x);
    escape_rate_of_lift(f, &x.iter().map(|v| v / r).collect::<Vec<_>>(), n)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    /// Coordinate set to one on the slice.
    pub chart: usize,
    /// Affine coordinates (the chart coordinate omitted) of the slice origin.
    pub base: Vec<C64>,
    pub dir1: Vec<C64>,
    pub dir2: Vec<C64>,
    pub center: (f64, f64),
    /// Half-width of the square window.
    pub extent: f64,
    #[serde(default)]
    pub width: usize,
    #[serde(default)]
    pub height: usize,
}

impl SliceSpec {
    /// Chart of the last coordinate, spanned by the two affine axes on
    /// P^2, or by 1 and i on P^1; window [-3, 3]².
    pub fn default_for(k: usize, width: usize, height: usize) -> Self {
        let zero = c(0.0, 0.0);
        let (dir1, dir2) = match k {
            1 => (vec![c(1.0, 0.0)], vec![c(0.0, 1.0)]),
            _ => (vec![c(1.0, 0.0), zero], vec![zero, c(1.0, 0.0)]),
        };
        SliceSpec { chart: k, base: vec![zero; k], dir1, dir2, center: (0.0, 0.0), extent: 3.0, width, height }
    }

    pub fn validate(&self, nvars: usize) -> crate::Result<()> {
        let k = nvars - 1;
        if self.chart >= nvars || self.base.len() != k || self.dir1.len() != k || self.dir2.len() != k {
            return Err(crate::Error::Precondition("slice dimensions do not match the map".into()));
        }
        if self.width == 0 || self.height == 0 || !(self.extent > 0.0) {
            return Err(crate::Error::Precondition("empty slice window".into()));
        }
        // real-linear independence of the two directions
        let re: Vec<f64> = self.dir1.iter().flat_map(|v| [v.re, v.im]).collect();
        let im: Vec<f64> = self.dir2.iter().flat_map(|v| [v.re, v.im]).collect();
        let aa: f64 = re.iter().map(|v| v * v).sum();
        let bb: f64 = im.iter().map(|v| v * v).sum();
        let ab: f64 = re.iter().zip(&im).map(|(a, b)| a * b).sum();
        if aa * bb - ab * ab <= 1e-12 * aa.max(1e-300) * bb.max(1e-300) {
            return Err(crate::Error::Precondition("slice directions are dependent".into()));
        }
        Ok(())
    }

    /// Slice coordinates of the center of pixel `(row, col)`; row 0 is at
    /// the top of the window.
    pub fn pixel_coords(&self, row: usize, col: usize) -> (f64, f64) {
        let u = self.center.0 + self.extent * (2.0 * (col as f64 + 0.5) / self.width as f64 - 1.0);
        let v = self.center.1 + self.extent * (1.0 - 2.0 * (row as f64 + 0.5) / self.height as f64);
        (u, v)
    }

    /// Homogeneous coordinates of the slice point `(u, v)`.
    pub fn point(&self, u: f64, v: f64) -> Vec<C64> {
        let mut affine = self.base.iter().zip(&self.dir1).zip(&self.dir2).map(|((b, a1), a2)| b + a1 * u + a2 * v);
        (0..=self.base.len())
            .map(|i| if i == self.chart { c(1.0, 0.0) } else { affine.next().unwrap() })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "kebab-case")]
pub enum PixelLabel {
    Cycle(usize),
    /// Orbit tail accumulates near the indexed limit component.
    Escape(usize),
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct BasinImage {
    pub width: usize,
    pub height: usize,
    /// Row-major labels.
    pub labels: Vec<PixelLabel>,
    pub iterations: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LegendEntry {
    pub color: [u8; 3],
    pub label: PixelLabel,
    pub description: String,
    pub pixels: usize,
    pub fraction: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RenderSummary {
    pub pixels: usize,
    pub decided: usize,
    pub converged: usize,
    pub converged_superattracting: usize,
    pub converged_other: usize,
    pub undecided: usize,
    /// Share of decided pixels converging to a superattracting cycle.
    pub superattracting_fraction_of_decided: f64,
    pub distinct_basins: usize,
    pub legend: Vec<LegendEntry>,
}

/// Classifies every pixel center of the slice in parallel.
pub fn render_slice(f: &Endomorphism, spec: &SliceSpec, targets: &Targets, cfg: &Config) -> crate::Result<BasinImage> {
    spec.validate(f.nvars())?;
    let results: Vec<(PixelLabel, u32)> = (0..spec.width * spec.height)
        .into_par_iter()
        .map(|idx| {
            let (u, v) = spec.pixel_coords(idx / spec.width, idx % spec.width);
            let x = spec.point(u, v);
            let verdict = sample_orbit_complex(f, &x, targets, cfg, ProjPoint::Inexact(x.clone()));
            match verdict.outcome {
                Outcome::Converged { cycle, iterations } => (PixelLabel::Cycle(cycle), iterations as u32),
                Outcome::AccumulatesNear { component, .. } => (PixelLabel::Escape(component), cfg.max_iter as u32),
                Outcome::Undecided { iterations, .. } => (PixelLabel::Undecided, iterations as u32),
            }
        })
        .collect();
    let (labels, iterations) = results.into_iter().unzip();
    Ok(BasinImage { width: spec.width, height: spec.height, labels, iterations })
}

const PALETTE: [[u8; 3]; 8] = [
    [230, 80, 60],
    [60, 140, 230],
    [90, 200, 90],
    [240, 200, 50],
    [170, 90, 210],
    [50, 200, 200],
    [240, 140, 40],
    [200, 90, 150],
];

pub fn label_color(label: PixelLabel) -> [u8; 3] {
    match label {
        PixelLabel::Cycle(i) => {
            let [r, g, b] = PALETTE[i % PALETTE.len()];
            // later palette rounds are darker so colors stay distinct
            let dim = (i / PALETTE.len()) as u8 % 4;
            [r - r / 5 * dim, g - g / 5 * dim, b - b / 5 * dim]
        }
        PixelLabel::Escape(i) => {
            let v = 250u8.saturating_sub((i % 16) as u8 * 10);
            [v, v, v]
        }
        PixelLabel::Undecided => [0, 0, 0],
    }
}

impl BasinImage {
    /// Binary PPM: `P6`, width, height, 255, then RGB rows top to bottom.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        for &l in &self.labels {
            out.extend_from_slice(&label_color(l));
        }
        out
    }

    pub fn summary(&self, targets: &Targets) -> RenderSummary {
        let mut counts: std::collections::BTreeMap<PixelLabel, usize> = Default::default();
        for &l in &self.labels {
            *counts.entry(l).or_default() += 1;
        }
        let pixels = self.labels.len();
        let undecided = counts.get(&PixelLabel::Undecided).copied().unwrap_or(0);
        let decided = pixels - undecided;
        let mut converged = 0;
        let mut superattracting = 0;
        let mut distinct_basins = 0;
        let mut legend = Vec::new();
        for (&label, &n) in &counts {
            let description = match label {
                PixelLabel::Cycle(i) => {
                    let t = &targets.cycles[i];
                    converged += n;
                    distinct_basins += 1;
                    if t.is_superattracting() {
                        superattracting += n;
                    }
                    let names: Vec<String> = t.points.iter().map(|p| p.to_string()).collect();
                    let class = t.classification.map_or("unclassified", Classification::as_str);
                    format!("cycle {} ({class})", names.join(" -> "))
                }
                PixelLabel::Escape(i) => format!("accumulates near {}", targets.components[i]),
                PixelLabel::Undecided => "undecided".to_string(),
            };
            legend.push(LegendEntry {
                color: label_color(label),
                label,
                description,
                pixels: n,
                fraction: n as f64 / pixels as f64,
            });
        }
        RenderSummary {
            pixels,
            decided,
            converged,
            converged_superattracting: superattracting,
            converged_other: converged - superattracting,
            undecided,
            superattracting_fraction_of_decided: if decided == 0 { 0.0 } else { superattracting as f64 / decided as f64 },
            distinct_basins,
            legend,
        }
    }
}
