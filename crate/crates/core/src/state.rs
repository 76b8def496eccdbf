//! Density-matrix state of one atom qubit.

use crate::mat2::{Mat2, C64};
use thiserror::Error;

/// Basis order is (|0>, |1>) with |0> = F=2,mF=0 and |1> = F=1,mF=0.
///
/// A density matrix rather than a state vector, so that depolarizing
/// preparation errors and gate depolarization compose without special cases.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState {
    rho: Mat2,
}

#[derive(Debug, Error, PartialEq)]
pub enum StateError {
    #[error("density matrix trace deviates from 1 by {0:.3e}")]
    TraceNotOne(f64),
    #[error("density matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("density matrix has negative eigenvalue {0:.3e}")]
    NotPositive(f64),
}

impl QubitState {
    /// Pure |0><0|.
    pub fn ground() -> Self {
        QubitState {
            rho: Mat2::from_parts([(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]),
        }
    }

    /// Pure |1><1|.
    pub fn excited() -> Self {
        QubitState {
            rho: Mat2::from_parts([(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]),
        }
    }

    /// I/2.
    pub fn maximally_mixed() -> Self {
        QubitState {
            rho: Mat2::identity().scale_re(0.5),
        }
    }

    /// Validating constructor for an arbitrary density matrix.
    pub fn from_density(rho: Mat2) -> Result<Self, StateError> {
        let state = QubitState { rho };
        state.validate(1e-12)?;
        Ok(state)
    }

    pub fn rho(&self) -> &Mat2 {
        &self.rho
    }

    /// Population of |1>.
    pub fn p1(&self) -> f64 {
        self.rho.get(1, 1).re
    }

    /// Population of |0>.
    pub fn p0(&self) -> f64 {
        self.rho.get(0, 0).re
    }

    /// rho <- U rho U^dag.
    pub fn apply_unitary(&mut self, u: &Mat2) {
        self.rho = *u * self.rho * u.conjugate_transpose();
    }

    /// Depolarizing channel: rho <- (1-p) rho + p I/2.
    pub fn depolarize(&mut self, p: f64) {
        debug_assert!((0.0..=1.0).contains(&p));
        self.rho = self.rho.scale_re(1.0 - p) + Mat2::identity().scale_re(0.5 * p);
    }

    /// Eigenvalues of the (Hermitian part of the) density matrix, ascending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let a = self.rho.get(0, 0).re;
        let d = self.rho.get(1, 1).re;
        let b = self.rho.get(0, 1);
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        (mid - rad, mid + rad)
    }

    /// Check the trace, Hermiticity and positivity invariants.
    pub fn validate(&self, tol: f64) -> Result<(), StateError> {
        let trace_dev = (self.rho.trace() - C64::new(1.0, 0.0)).norm();
        if trace_dev > tol {
            return Err(StateError::TraceNotOne(trace_dev));
        }
        let herm = self.rho.hermiticity_error();
        if herm > tol {
            return Err(StateError::NotHermitian(herm));
        }
        let (lo, _) = self.eigenvalues();
        if lo < -tol {
            return Err(StateError::NotPositive(lo));
        }
        Ok(())
    }
}
