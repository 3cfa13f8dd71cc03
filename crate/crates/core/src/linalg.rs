//! Dense symmetric-positive-definite linear algebra backing the
//! regularized (optionally weighted) least-squares estimate shared by the
//! contextual policies.
//!
//! The Gram matrix only ever grows by symmetric rank-one additions, so it
//! stays SPD with smallest eigenvalue at least the regularizer. A Cholesky
//! factor is refreshed lazily: dimensions are small enough that a full
//! refactorization per solve is cheaper than maintaining rank-one updates
//! stably. No explicit inverse is formed anywhere; every application of
//! the inverse goes through triangular solves.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Regularized Gram matrix, response vector and cached solved estimate.
#[derive(Debug, Clone)]
pub struct RegressionState<S: Scalar> {
    dim: usize,
    gamma: S,
    /// Row-major `dim x dim` symmetric matrix.
    gram: Vec<S>,
    bvec: Vec<S>,
    theta: Vec<S>,
    /// Lower-triangular Cholesky factor of `gram`, row-major.
    chol: Vec<S>,
    dirty: bool,
    update_count: u64,
}

impl<S: Scalar> RegressionState<S> {
    /// Fresh state: Gram matrix `gamma * I`, zero response vector.
    pub fn new(dim: usize, gamma: S) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if !(gamma > S::zero()) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "regularizer must be a positive real, got {gamma}"
            )));
        }
        let mut gram = vec![S::zero(); dim * dim];
        for i in 0..dim {
            gram[i * dim + i] = gamma;
        }
        let mut state = Self {
            dim,
            gamma,
            gram,
            bvec: vec![S::zero(); dim],
            theta: vec![S::zero(); dim],
            chol: vec![S::zero(); dim * dim],
            dirty: true,
            update_count: 0,
        };
        state.refactorize()?;
        Ok(state)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma(&self) -> S {
        self.gamma
    }

    pub fn update_count(&self) -> u64 {
        self.update_count
    }

    pub fn gram(&self) -> &[S] {
        &self.gram
    }

    pub fn bvec(&self) -> &[S] {
        &self.bvec
    }

    /// Adds `weight * phi * phi^T` to the Gram matrix and
    /// `weight * outcome * phi` to the response vector.
    pub fn weighted_rank_one_update(&mut self, phi: &[S], outcome: S, weight: S) -> Result<()> {
        if phi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: phi.len(),
            });
        }
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "feature vector has non-finite entries".into(),
            ));
        }
        if !(weight > S::zero()) || !weight.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "update weight must be positive, got {weight}"
            )));
        }
        for i in 0..self.dim {
            let wi = weight * phi[i];
            for j in 0..self.dim {
                self.gram[i * self.dim + j] = self.gram[i * self.dim + j] + wi * phi[j];
            }
            self.bvec[i] = self.bvec[i] + wi * outcome;
        }
        self.dirty = true;
        self.update_count += 1;
        Ok(())
    }

    /// Unit-weight special case.
    pub fn rank_one_update(&mut self, phi: &[S], outcome: S) -> Result<()> {
        self.weighted_rank_one_update(phi, outcome, S::one())
    }

    /// Solves `G theta = b`, caching the result until the next update.
    /// This is the minimizer of the weighted ridge objective accumulated
    /// through the rank-one updates.
    pub fn solve_theta(&mut self) -> Result<&[S]> {
        if self.dirty {
            self.refactorize()?;
            let y = self.forward_sub(&self.bvec);
            self.theta = self.backward_sub(&y);
            self.dirty = false;
        }
        Ok(&self.theta)
    }

    /// `sqrt(phi^T G^{-1} phi)`, via one triangular solve: with `G = L L^T`
    /// this is the Euclidean norm of `L^{-1} phi`.
    pub fn ellipsoid_norm(&mut self, phi: &[S]) -> Result<S> {
        if phi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: phi.len(),
            });
        }
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "feature vector has non-finite entries".into(),
            ));
        }
        if self.dirty {
            self.refactorize()?;
            // Keep theta consistent lazily; only the factor is needed here.
        }
        let y = self.forward_sub(phi);
        Ok(y.iter().map(|v| *v * *v).sum::<S>().sqrt())
    }

    fn refactorize(&mut self) -> Result<()> {
        let n = self.dim;
        let a = &self.gram;
        let l = &mut self.chol;
        for v in l.iter_mut() {
            *v = S::zero();
        }
        for i in 0..n {
            for j in 0..=i {
                let mut sum = a[i * n + j];
                for k in 0..j {
                    sum = sum - l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if sum <= S::zero() || !sum.is_finite() {
                        return Err(Error::CholeskyBreakdown(i));
                    }
                    l[i * n + j] = sum.sqrt();
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        Ok(())
    }

    /// Solves `L y = rhs`.
    fn forward_sub(&self, rhs: &[S]) -> Vec<S> {
        let n = self.dim;
        let l = &self.chol;
        let mut y = vec![S::zero(); n];
        for i in 0..n {
            let mut sum = rhs[i];
            for k in 0..i {
                sum = sum - l[i * n + k] * y[k];
            }
            y[i] = sum / l[i * n + i];
        }
        y
    }

    /// Solves `L^T x = rhs`.
    fn backward_sub(&self, rhs: &[S]) -> Vec<S> {
        let n = self.dim;
        let l = &self.chol;
        let mut x = vec![S::zero(); n];
        for i in (0..n).rev() {
            let mut sum = rhs[i];
            for k in (i + 1)..n {
                sum = sum - l[k * n + i] * x[k];
            }
            x[i] = sum / l[i * n + i];
        }
        x
    }

    /// Residual norm `||G theta - b||_2` for the cached estimate.
    pub fn residual_norm(&mut self) -> Result<S> {
        self.solve_theta()?;
        let n = self.dim;
        let mut acc = S::zero();
        for i in 0..n {
            let mut gi = S::zero();
            for j in 0..n {
                gi = gi + self.gram[i * n + j] * self.theta[j];
            }
            let r = gi - self.bvec[i];
            acc = acc + r * r;
        }
        Ok(acc.sqrt())
    }
}
