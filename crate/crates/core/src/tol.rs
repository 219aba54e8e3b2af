//! Numerical tolerance profile.
//!
//! One profile travels with every algebra descriptor so that all routines
//! agree on what counts as zero. Absolute thresholds are scaled by
//! `max(1, |A|)` of the operator they are applied to.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Eigenvalues closer than this are one cluster.
    pub cluster_radius: f64,
    /// Singular values below this count as zero in rank decisions.
    pub rank: f64,
    /// Allowed deviation of |lambda| from 1.
    pub unit_modulus: f64,
    /// Allowed real part of an eigenvalue of a compact element.
    pub imaginary_spectrum: f64,
    /// Minimal distance to a wall before a label is trusted.
    pub boundary_margin: f64,
    /// Relative residual of the defining group relations.
    pub group_relation: f64,
    /// Residual of a conjugation certificate.
    pub certificate: f64,
    /// Residual of a coordinate solve.
    pub coordinate_residual: f64,
    /// Eigenvalue floor for positive semidefiniteness.
    pub psd: f64,
    /// Distance to the cone boundary accepted as interior.
    pub cone_interior: f64,
    /// Minimal eigenvalue that certifies a positive definite form.
    pub pd_feasibility: f64,
    /// Residual of a curve step against its recorded velocity.
    pub step_consistency: f64,
    /// Interval width at which bisection stops.
    pub bisection: f64,
    /// Condition number above which an eigenbasis is unreliable.
    pub condition_limit: f64,
    /// Random restarts of the invariant form search.
    pub pd_restarts: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cluster_radius: 1e-8,
            rank: 1e-8,
            unit_modulus: 1e-8,
            imaginary_spectrum: 1e-8,
            boundary_margin: 1e-7,
            group_relation: 1e-9,
            certificate: 1e-8,
            coordinate_residual: 1e-8,
            psd: 1e-9,
            cone_interior: 1e-7,
            pd_feasibility: 1e-9,
            step_consistency: 1e-6,
            bisection: 1e-8,
            condition_limit: 1e12,
            pd_restarts: 20,
        }
    }
}

impl Tolerances {
    /// Every threshold multiplied by `factor`. Restart counts are kept.
    pub fn scaled(&self, factor: f64) -> Self {
        Tolerances {
            cluster_radius: self.cluster_radius * factor,
            rank: self.rank * factor,
            unit_modulus: self.unit_modulus * factor,
            imaginary_spectrum: self.imaginary_spectrum * factor,
            boundary_margin: self.boundary_margin * factor,
            group_relation: self.group_relation * factor,
            certificate: self.certificate * factor,
            coordinate_residual: self.coordinate_residual * factor,
            psd: self.psd * factor,
            cone_interior: self.cone_interior * factor,
            pd_feasibility: self.pd_feasibility * factor,
            step_consistency: self.step_consistency * factor,
            bisection: self.bisection * factor,
            condition_limit: self.condition_limit,
            pd_restarts: self.pd_restarts,
        }
    }

    /// Named profiles: `default`, `strict` (x0.01) and `loose` (x100).
    pub fn profile(name: &str) -> Option<Self> {
        match name {
            "default" => Some(Self::default()),
            "strict" => Some(Self::default().scaled(0.01)),
            "loose" => Some(Self::default().scaled(100.0)),
            _ => None,
        }
    }
}

#[inline]
pub fn scale(norm: f64) -> f64 {
    norm.max(1.0)
}
