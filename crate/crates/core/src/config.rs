//! Tolerances and budgets shared by every analysis stage.

use serde::{Deserialize, Serialize};

use crate::algebra::DEFAULT_FACTOR_CAP;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    /// Residual bound for numerically computed points.
    pub residual_tol: f64,
    /// Max-norm distance under which two inexact points are identified.
    pub cluster_tol: f64,
    /// Bound on |trace| and |det| for an inexact nilpotency verdict; values in
    /// `[tol, 10 tol]` are undecided.
    pub classification_tol: f64,
    /// Largest degree handed to the irreducible factorizer.
    pub factor_cap: u32,
    /// Largest degree of an iterate `f^n`.
    pub degree_budget: u32,
    pub curve_node_budget: usize,
    pub point_node_budget: usize,
    /// Forward iterations allowed when following a point orbit to its cycle.
    pub point_iteration_cap: usize,
    /// Extra iterations used to re-verify an inexact cycle.
    pub cycle_verify_iterations: usize,
    pub cycle_verify_tol: f64,
    /// Largest period searched by the periodic-point finder.
    pub max_period: u32,
    /// Distance to a target cycle below which an orbit counts as converging.
    pub convergence_tol: f64,
    /// Consecutive iterations the convergence bound must hold.
    pub convergence_streak: usize,
    pub max_iter: usize,
    /// Tail distance to a limit-set component counted as accumulation.
    pub accumulation_tol: f64,
    /// Relative residual under which a point counts as lying on `C_1`.
    pub membership_tol: f64,
    pub ramification_depth: u32,
    pub ramification_depth_cap: u32,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            residual_tol: 1e-10,
            cluster_tol: 1e-8,
            classification_tol: 1e-8,
            factor_cap: DEFAULT_FACTOR_CAP,
            degree_budget: 64,
            curve_node_budget: 64,
            point_node_budget: 512,
            point_iteration_cap: 200,
            cycle_verify_iterations: 50,
            cycle_verify_tol: 1e-6,
            max_period: 2,
            convergence_tol: 1e-8,
            convergence_streak: 10,
            max_iter: 500,
            accumulation_tol: 1e-3,
            membership_tol: 1e-8,
            ramification_depth: 3,
            ramification_depth_cap: 4,
            seed: 0,
        }
    }
}
