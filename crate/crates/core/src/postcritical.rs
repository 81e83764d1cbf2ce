//! Forward orbits of critical components and their ω-limit sets, which
//! drive the order-by-order classification of critical finiteness.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::HomogPoly;
use crate::config::Config;
use crate::dynamics::Endomorphism;
use crate::error::{Error, Result};
use crate::geometry::{
    component_image, curve_intersect, point_image, set_equal, AlgebraicSet, Component, ProjPoint,
};

#[derive(Clone, Debug, Serialize)]
pub struct OrbitNode {
    pub component: Component,
    /// Index of the node holding `f(component)`.
    pub image: usize,
    /// First iteration at which the component appears (seeds have depth 0).
    pub depth: u32,
    pub seed: bool,
    /// Whether the component is contained in `C_1`.
    pub critical: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitGraph {
    pub nvars: usize,
    pub nodes: Vec<OrbitNode>,
}

impl OrbitGraph {
    fn find(&self, c: &Component, tol: f64) -> Option<usize> {
        self.nodes.iter().position(|n| n.component.same_as(c, tol))
    }

    fn set_of(&self, idx: &[usize], tol: f64) -> AlgebraicSet {
        AlgebraicSet::from_components(self.nvars, idx.iter().map(|&i| self.nodes[i].component.clone()).collect(), tol)
    }

    /// Nodes lying on a cycle of the edge map.
    pub fn cycle_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&v| {
                let mut u = self.nodes[v].image;
                for _ in 0..self.nodes.len() {
                    if u == v {
                        return true;
                    }
                    u = self.nodes[u].image;
                }
                false
            })
            .collect()
    }

    /// The cycle through `v` as node indices, starting at `v`.
    pub fn cycle_through(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut u = self.nodes[v].image;
        while u != v {
            out.push(u);
            u = self.nodes[u].image;
        }
        out
    }
}

fn is_critical(c: &Component, crit: &AlgebraicSet, tol: f64) -> bool {
    match c {
        Component::Hypersurface(_) => crit.contains_component(c, 0.0),
        Component::Point(p) => crate::geometry::contains(crit, p, if p.is_exact() { 0.0 } else { tol }),
    }
}

/// Forward orbit graph of `seeds`, built breadth first. Curve images of a
/// frontier are computed in parallel and merged in frontier order.
pub fn build_orbit_graph(
    f: &Endomorphism,
    seeds: &AlgebraicSet,
    critical: &AlgebraicSet,
    cfg: &Config,
) -> Result<OrbitGraph> {
    if seeds.is_empty() {
        return Err(Error::Precondition("no seeds".into()));
    }
    let tol = cfg.cluster_tol;
    let mut g = OrbitGraph { nvars: seeds.nvars(), nodes: Vec::new() };
    for c in seeds.iter() {
        g.nodes.push(OrbitNode {
            component: c.clone(),
            image: usize::MAX,
            depth: 0,
            seed: true,
            critical: is_critical(c, critical, cfg.membership_tol),
        });
    }
    let mut frontier: Vec<usize> = (0..g.nodes.len()).collect();
    let mut depth = 0u32;
    while !frontier.is_empty() {
        depth += 1;
        if depth as usize > cfg.point_iteration_cap {
            return Err(Error::Undecided(format!("orbits not closed after {} iterations", cfg.point_iteration_cap)));
        }
        let images: Vec<Result<Component>> = frontier
            .par_iter()
            .map(|&v| component_image(f, &g.nodes[v].component, cfg.factor_cap))
            .collect();
        let mut next = Vec::new();
        for (&v, img) in frontier.iter().zip(images) {
            let img = img?;
            let target = match g.find(&img, tol) {
                Some(u) => u,
                None => {
                    g.nodes.push(OrbitNode {
                        critical: is_critical(&img, critical, cfg.membership_tol),
                        component: img,
                        image: usize::MAX,
                        depth,
                        seed: false,
                    });
                    next.push(g.nodes.len() - 1);
                    g.nodes.len() - 1
                }
            };
            g.nodes[v].image = target;
        }
        let curves = g.nodes.iter().filter(|n| matches!(n.component, Component::Hypersurface(_))).count();
        let points = g.nodes.len() - curves;
        if curves > cfg.curve_node_budget || points > cfg.point_node_budget {
            let listed: Vec<String> = next.iter().map(|&i| g.nodes[i].component.to_string()).collect();
            return Err(Error::BudgetExceeded(format!(
                "not critically finite within budget ({} curve / {} point nodes); frontier: {}",
                cfg.curve_node_budget,
                cfg.point_node_budget,
                listed.join(", ")
            )));
        }
        frontier = next;
    }
    verify_inexact_cycles(f, &g, cfg)?;
    Ok(g)
}

/// Walks each inexact cycle `cycle_verify_iterations` times, recomputing
/// every image from the stored node and requiring it to stay within
/// `cycle_verify_tol` of the recorded successor.
fn verify_inexact_cycles(f: &Endomorphism, g: &OrbitGraph, cfg: &Config) -> Result<()> {
    for v in g.cycle_nodes() {
        let Component::Point(p @ ProjPoint::Inexact(_)) = &g.nodes[v].component else {
            continue;
        };
        let mut cur = v;
        let mut x = p.clone();
        for _ in 0..cfg.cycle_verify_iterations {
            let next = g.nodes[cur].image;
            let y = point_image(f, &x);
            let Component::Point(stored) = &g.nodes[next].component else {
                return Err(Error::Degenerate("point orbit reached a curve".into()));
            };
            if !y.same_as(stored, cfg.cycle_verify_tol) {
                return Err(Error::Undecided(format!("inexact cycle through {p} failed re-verification")));
            }
            x = stored.clone();
            cur = next;
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaData {
    /// `D`: union of all forward images of the seeds.
    pub d: AlgebraicSet,
    pub e: AlgebraicSet,
    /// Least `l` with `f^{l-1}(D) = f^l(D)`.
    pub l: u32,
    pub eprime: AlgebraicSet,
    pub f: AlgebraicSet,
    /// Cycles of `E` as component lists.
    pub cycles: Vec<Vec<Component>>,
    /// Whether the cycle lies in `F`, parallel to `cycles`.
    pub critical_cycles: Vec<bool>,
    /// Direct test: some component of `E` lies in `C_1`.
    pub e_meets_critical_set: bool,
}

/// The limit set `E` of a stabilized graph with its split `E = E' ∪ F`.
pub fn omega_limit(g: &OrbitGraph, jacobian: &HomogPoly, cfg: &Config) -> Result<OmegaData> {
    if g.nodes.iter().any(|n| n.image == usize::MAX) {
        return Err(Error::Precondition("orbit graph is truncated".into()));
    }
    let tol = cfg.cluster_tol;
    let mut d: Vec<usize> = g.nodes.iter().map(|n| n.image).collect();
    d.sort_unstable();
    d.dedup();
    let image = |s: &[usize]| -> Vec<usize> {
        let mut v: Vec<usize> = s.iter().map(|&i| g.nodes[i].image).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut prev = d.clone();
    let mut l = 1u32;
    loop {
        let next = image(&prev);
        let equal = if g.nodes.iter().all(|n| n.component.is_exact()) {
            set_equal(&g.set_of(&prev, tol), &g.set_of(&next, tol))?
        } else {
            prev == next
        };
        if equal {
            break;
        }
        debug_assert!(next.iter().all(|i| prev.contains(i)), "descending chain");
        prev = next;
        l += 1;
    }
    let e_idx = prev;
    let cycle_nodes = g.cycle_nodes();
    assert_eq!(e_idx, cycle_nodes, "stabilized image must be the cycle part");

    let mut cycles = Vec::new();
    let mut critical_cycles = Vec::new();
    let mut seen = vec![false; g.nodes.len()];
    let mut f_idx = Vec::new();
    for &v in &e_idx {
        if seen[v] {
            continue;
        }
        let cyc = g.cycle_through(v);
        let crit = cyc.iter().any(|&u| g.nodes[u].critical);
        for &u in &cyc {
            seen[u] = true;
            if crit {
                f_idx.push(u);
            }
        }
        cycles.push(cyc.iter().map(|&u| g.nodes[u].component.clone()).collect());
        critical_cycles.push(crit);
    }
    let eprime_idx: Vec<usize> = e_idx.iter().copied().filter(|i| !f_idx.contains(i)).collect();
    let e_meets_critical_set = e_idx.iter().any(|&i| g.nodes[i].component.lies_in(jacobian, cfg.membership_tol));
    if e_meets_critical_set == f_idx.is_empty() {
        return Err(Error::Degenerate("cycle analysis and direct membership disagree".into()));
    }
    Ok(OmegaData {
        d: g.set_of(&d, tol),
        e: g.set_of(&e_idx, tol),
        l,
        eprime: g.set_of(&eprime_idx, tol),
        f: g.set_of(&f_idx, tol),
        cycles,
        critical_cycles,
        e_meets_critical_set,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderReport {
    pub order: u32,
    /// `C_n`.
    pub seeds: AlgebraicSet,
    /// `Some(true)` when `D_n` closed up within budget; `None` when undecided.
    pub critically_finite: Option<bool>,
    pub n_critically_finite: Option<bool>,
    pub graph: Option<OrbitGraph>,
    pub omega: Option<OmegaData>,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub k: usize,
    pub degree: u32,
    pub jacobian: String,
    pub jacobian_degree: u32,
    pub critical_set: AlgebraicSet,
    pub orders: Vec<OrderReport>,
    pub budget_exhausted: bool,
}

impl ClassificationReport {
    pub fn order(&self, n: u32) -> Option<&OrderReport> {
        self.orders.iter().find(|o| o.order == n)
    }

    pub fn omega(&self, n: u32) -> Option<&OmegaData> {
        self.order(n).and_then(|o| o.omega.as_ref())
    }
}

fn run_order(
    f: &Endomorphism,
    order: u32,
    seeds: AlgebraicSet,
    critical: &AlgebraicSet,
    jacobian: &HomogPoly,
    prior_n_critically_finite: bool,
    cfg: &Config,
) -> Result<(OrderReport, bool)> {
    let mut report = OrderReport {
        order,
        seeds: seeds.clone(),
        critically_finite: None,
        n_critically_finite: None,
        graph: None,
        omega: None,
        diagnostics: Vec::new(),
    };
    if seeds.is_empty() {
        // no critical seeds: D_n, E_n and F_n are empty
        report.critically_finite = Some(true);
        report.n_critically_finite = Some(prior_n_critically_finite);
        let empty = AlgebraicSet::empty(seeds.nvars());
        report.omega = Some(OmegaData {
            d: empty.clone(),
            e: empty.clone(),
            l: 1,
            eprime: empty.clone(),
            f: empty,
            cycles: Vec::new(),
            critical_cycles: Vec::new(),
            e_meets_critical_set: false,
        });
        return Ok((report, false));
    }
    match build_orbit_graph(f, &seeds, critical, cfg) {
        Ok(g) => {
            let omega = omega_limit(&g, jacobian, cfg)?;
            report.critically_finite = Some(true);
            report.n_critically_finite = Some(prior_n_critically_finite && omega.f.is_empty());
            report.graph = Some(g);
            report.omega = Some(omega);
            Ok((report, false))
        }
        Err(Error::BudgetExceeded(msg)) => {
            report.critically_finite = Some(false);
            report.n_critically_finite = Some(false);
            report.diagnostics.push(msg);
            Ok((report, true))
        }
        Err(Error::Undecided(msg)) => {
            report.diagnostics.push(msg);
            Ok((report, false))
        }
        Err(e) => Err(e),
    }
}

/// `C_2`: pairwise intersection points of distinct components of `C_1`
/// and `E_1`.
pub fn second_critical_set(critical: &AlgebraicSet, e1: &AlgebraicSet, cfg: &Config) -> Result<AlgebraicSet> {
    let mut pts = AlgebraicSet::empty(critical.nvars());
    for a in critical.iter() {
        for b in e1.iter() {
            if a.same_as(b, 0.0) {
                continue;
            }
            let (Some(fa), Some(fb)) = (a.form(), b.form()) else { continue };
            if !crate::algebra::gcd::gcd(fa, fb).is_constant() {
                continue;
            }
            for (p, _) in curve_intersect(a, b, cfg.residual_tol)? {
                pts.insert(Component::Point(p), cfg.cluster_tol);
            }
        }
    }
    Ok(pts)
}

/// Classification of orders `1..=max_order` (orders beyond `k` are skipped).
pub fn classify(f: &Endomorphism, max_order: u32, cfg: &Config) -> Result<ClassificationReport> {
    let critical = f.critical_set(cfg.factor_cap)?;
    let jacobian = f.jacobian_det();
    let mut orders = Vec::new();
    let mut exhausted = false;
    let (o1, b1) = run_order(f, 1, critical.clone(), &critical, &jacobian, true, cfg)?;
    exhausted |= b1;
    let order1_ok = o1.critically_finite == Some(true);
    let one_cf = o1.n_critically_finite == Some(true);
    let e1 = o1.omega.as_ref().map(|o| o.e.clone());
    orders.push(o1);
    if max_order >= 2 && f.k() == 2 && order1_ok {
        let c2 = second_critical_set(&critical, &e1.unwrap(), cfg)?;
        let (o2, b2) = run_order(f, 2, c2, &critical, &jacobian, one_cf, cfg)?;
        exhausted |= b2;
        orders.push(o2);
    }
    Ok(ClassificationReport {
        k: f.k(),
        degree: f.degree(),
        jacobian_degree: jacobian.degree(),
        jacobian: jacobian.to_string(),
        critical_set: critical,
        orders,
        budget_exhausted: exhausted,
    })
}
