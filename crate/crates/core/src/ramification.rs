//! Backward orbits and critical-passage counts.
//!
//! A point `q` has bounded ramification when every backward path
//! `p, f(p), ..., f^{j-1}(p)` with `f^j(p) = q` passes through the critical
//! set a bounded number of times. For a critically finite map the bound
//! `l_1 + ... + l_n` holds off `E_n`; this module samples the claim on a
//! finite preimage tree.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::dynamics::{preimages, Endomorphism};
use crate::error::{Error, Result};
use crate::geometry::{contains, relative_residual, AlgebraicSet, Component, ProjPoint};
use crate::numeric::proj_distance;
use crate::postcritical::ClassificationReport;

#[derive(Clone, Debug, Serialize)]
pub struct TreeNode {
    pub point: ProjPoint,
    pub multiplicity: u32,
    /// Index into the previous level (`usize::MAX` for the root).
    pub parent: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PreimageTree {
    pub root: ProjPoint,
    pub depth: u32,
    /// `levels[0]` holds the root; `levels[i]` solves `f(x) = parent` for
    /// every node of `levels[i - 1]`.
    pub levels: Vec<Vec<TreeNode>>,
    /// Largest projective distance between `f^j(leaf)` and the root.
    pub path_consistency: f64,
}

impl PreimageTree {
    /// Multiplicity-weighted preimage count of every node on level `i`.
    pub fn counts_per_parent(&self, i: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.levels[i - 1].len()];
        for n in &self.levels[i] {
            out[n.parent] += n.multiplicity as u64;
        }
        out
    }

    pub fn leaves(&self) -> &[TreeNode] {
        self.levels.last().unwrap()
    }

    /// Node indices along the forward path of leaf `i`, from the leaf up to
    /// (but excluding) the root, as `(level, index)` pairs.
    fn path(&self, mut i: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for lvl in (1..self.levels.len()).rev() {
            out.push((lvl, i));
            i = self.levels[lvl][i].parent;
        }
        out
    }
}

fn iterate_point(f: &Endomorphism, p: &ProjPoint, n: u32) -> ProjPoint {
    (0..n).fold(p.clone(), |x, _| crate::geometry::point_image(f, &x))
}

/// Full backward tree of depth `depth` over `q`.
pub fn preimage_tree(f: &Endomorphism, q: &ProjPoint, depth: u32, cfg: &Config) -> Result<PreimageTree> {
    if depth == 0 {
        return Err(Error::Precondition("depth must be at least 1".into()));
    }
    if depth > cfg.ramification_depth_cap {
        return Err(Error::Precondition(format!(
            "depth {depth} exceeds the cap {}",
            cfg.ramification_depth_cap
        )));
    }
    let leaves = (f.degree() as u64).pow(f.k() as u32 * depth);
    if leaves > cfg.point_node_budget as u64 {
        return Err(Error::BudgetExceeded(format!("{leaves} leaves exceed the point budget {}", cfg.point_node_budget)));
    }
    let expected = (f.degree() as u64).pow(f.k() as u32);
    let mut levels = vec![vec![TreeNode { point: q.clone(), multiplicity: 1, parent: usize::MAX }]];
    for _ in 0..depth {
        let prev = levels.last().unwrap();
        let solved: Vec<Result<Vec<(ProjPoint, u32)>>> =
            prev.par_iter().map(|n| preimages(f, &n.point, cfg)).collect();
        let mut next = Vec::new();
        for (parent, r) in solved.into_iter().enumerate() {
            let pre = r.map_err(|e| match e {
                Error::SolverShortfall(m) => Error::SolverShortfall(format!("at node {}: {m}", prev[parent].point)),
                e => e,
            })?;
            let total: u64 = pre.iter().map(|(_, m)| *m as u64).sum();
            assert_eq!(total, expected, "preimage count with multiplicity");
            next.extend(pre.into_iter().map(|(point, multiplicity)| TreeNode { point, multiplicity, parent }));
        }
        levels.push(next);
    }
    let root = q.to_complex();
    let path_consistency = levels
        .last()
        .unwrap()
        .par_iter()
        .map(|n| proj_distance(&iterate_point(f, &n.point, depth).to_complex(), &root))
        .reduce(|| 0.0, f64::max);
    Ok(PreimageTree { root: q.clone(), depth, levels, path_consistency })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    Inside,
    Outside,
    Undecided,
}

/// Membership of `p` in `s`. Exact points are decided exactly; inexact
/// points inside the band `[tol, 10 tol)` are undecided.
pub fn membership(s: &AlgebraicSet, p: &ProjPoint, tol: f64) -> Membership {
    if p.is_exact() {
        return if contains(s, p, 0.0) { Membership::Inside } else { Membership::Outside };
    }
    let x = p.to_complex();
    let dist = s
        .iter()
        .map(|c| match c {
            Component::Hypersurface(h) => relative_residual(h, &x),
            Component::Point(q) => proj_distance(&q.to_complex(), &x),
        })
        .fold(f64::INFINITY, f64::min);
    if dist < tol {
        Membership::Inside
    } else if dist < 10.0 * tol {
        Membership::Undecided
    } else {
        Membership::Outside
    }
}

/// Σ l_m over orders `1..=n`.
pub fn ramification_bound(report: &ClassificationReport, n: u32) -> Result<u32> {
    (1..=n)
        .map(|m| {
            report
                .omega(m)
                .map(|o| o.l)
                .ok_or_else(|| Error::Precondition(format!("order {m} data missing")))
        })
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct PathRecord {
    /// Points `p, f(p), ..., f^{j-1}(p)`.
    pub points: Vec<ProjPoint>,
    /// `♯(I)`: number of path points in `C_1`.
    pub count: u32,
    /// `♯(I_m)` for `m = 1, ..., n`: passages through `C_m ∖ C_{m+1}`
    /// (the last stratum is `C_n` itself).
    pub strata: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    AllWithinBound,
    Violation { path: Vec<ProjPoint>, count: u32 },
    NotApplicable { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct RamificationCertificate {
    pub root: ProjPoint,
    pub order: u32,
    pub depth: u32,
    pub bound: u32,
    pub verdict: Verdict,
    pub max_count: u32,
    pub leaves: usize,
    /// Preimage counts with multiplicity per parent, for every level.
    pub level_counts: Vec<Vec<u64>>,
    pub paths: Vec<PathRecord>,
    /// Leaf paths with a membership test inside the ambiguity band.
    pub undecided_paths: Vec<Vec<ProjPoint>>,
    pub violations: usize,
    pub path_consistency: f64,
    pub tolerance: f64,
}

/// Critical strata for the stratified counts: `C_1` and optionally the
/// order-2 point set `C_2`.
pub struct Strata<'a> {
    pub c1: &'a AlgebraicSet,
    pub c2: Option<&'a AlgebraicSet>,
}

/// Counts critical passages along every leaf path and compares the counts
/// with `bound`.
pub fn check_bounded_ramification(
    tree: &PreimageTree,
    strata: &Strata<'_>,
    bound: u32,
    order: u32,
    tol: f64,
) -> Result<RamificationCertificate> {
    if !strata.c1.is_exact() {
        return Err(Error::Precondition("critical set must be exact".into()));
    }
    let nstrata = if strata.c2.is_some() { 2 } else { 1 };
    let mut paths = Vec::new();
    let mut undecided_paths = Vec::new();
    let mut first_violation = None;
    let mut violations = 0;
    for leaf in 0..tree.leaves().len() {
        let nodes = tree.path(leaf);
        let points: Vec<ProjPoint> = nodes.iter().map(|&(l, i)| tree.levels[l][i].point.clone()).collect();
        let mut count = 0;
        let mut by_stratum = vec![0u32; nstrata];
        let mut undecided = false;
        for p in &points {
            match membership(strata.c1, p, tol) {
                Membership::Outside => continue,
                Membership::Undecided => undecided = true,
                Membership::Inside => {}
            }
            // near-misses count as passages
            count += 1;
            let deeper = strata.c2.map(|c2| membership(c2, p, tol));
            match deeper {
                Some(Membership::Inside) => by_stratum[1] += 1,
                Some(Membership::Undecided) => {
                    undecided = true;
                    by_stratum[1] += 1;
                }
                _ => by_stratum[0] += 1,
            }
        }
        debug_assert_eq!(by_stratum.iter().sum::<u32>(), count);
        if undecided {
            undecided_paths.push(points);
            continue;
        }
        if count > bound {
            violations += 1;
            first_violation.get_or_insert_with(|| (points.clone(), count));
        }
        paths.push(PathRecord { points, count, strata: by_stratum });
    }
    let verdict = match first_violation {
        Some((path, count)) => Verdict::Violation { path, count },
        None => Verdict::AllWithinBound,
    };
    Ok(RamificationCertificate {
        root: tree.root.clone(),
        order,
        depth: tree.depth,
        bound,
        verdict,
        max_count: paths.iter().map(|p| p.count).max().unwrap_or(0),
        leaves: tree.leaves().len(),
        level_counts: (1..tree.levels.len()).map(|i| tree.counts_per_parent(i)).collect(),
        paths,
        undecided_paths,
        violations,
        path_consistency: tree.path_consistency,
        tolerance: tol,
    })
}

fn not_applicable(q: &ProjPoint, order: u32, bound: u32, depth: u32, reason: String, tol: f64) -> RamificationCertificate {
    RamificationCertificate {
        root: q.clone(),
        order,
        depth,
        bound,
        verdict: Verdict::NotApplicable { reason },
        max_count: 0,
        leaves: 0,
        level_counts: Vec::new(),
        paths: Vec::new(),
        undecided_paths: Vec::new(),
        violations: 0,
        path_consistency: 0.0,
        tolerance: tol,
    }
}

/// The whole pipeline at order `order`: applicability of `q`, the bound,
/// the tree, and the certificate.
pub fn certify(
    f: &Endomorphism,
    report: &ClassificationReport,
    q: &ProjPoint,
    order: u32,
    depth: u32,
    cfg: &Config,
) -> Result<RamificationCertificate> {
    let bound = ramification_bound(report, order)?;
    let tol = cfg.membership_tol;
    for m in 1..=order {
        let om = report.omega(m).unwrap();
        if membership(&om.e, q, tol) != Membership::Outside {
            return Ok(not_applicable(q, order, bound, depth, format!("root lies on E_{m}"), tol));
        }
        if membership(&om.f, q, tol) != Membership::Outside {
            return Ok(not_applicable(q, order, bound, depth, format!("root lies on F_{m}"), tol));
        }
    }
    let tree = preimage_tree(f, q, depth, cfg)?;
    let c2 = if order >= 2 { report.order(2).map(|o| &o.seeds) } else { None };
    check_bounded_ramification(&tree, &Strata { c1: &report.critical_set, c2 }, bound, order, tol)
}
