//! Dense matrices over exact, polynomial and complex-double backends.

mod exact;
mod hermitian;
mod mat;
mod modular;

pub use exact::{det_bareiss, det_poly, rank_nullspace, RankNullspace, MAX_EXPLICIT_DET};
pub use hermitian::{float_rank, hermitian_eig, Eigen, DEFAULT_RANK_TOL};
pub use mat::{Mat, TraceOut};
pub use modular::modular_rank;

use crate::{ExScalar, Rational, Ring, C64};

/// Rank in the backend's own sense: exact elimination, or thresholded
/// eigenvalues at [`DEFAULT_RANK_TOL`] for complex doubles.
pub trait MatrixRank: Ring {
    fn matrix_rank(m: &Mat<Self>) -> usize;
}

impl MatrixRank for Rational {
    fn matrix_rank(m: &Mat<Self>) -> usize {
        rank_nullspace(m).rank
    }
}

impl MatrixRank for ExScalar {
    /// Full rank mod p settles it; otherwise exact elimination.
    fn matrix_rank(m: &Mat<Self>) -> usize {
        match modular_rank(m) {
            Some(r) if r == m.rows().min(m.cols()) => r,
            _ => rank_nullspace(m).rank,
        }
    }
}

impl MatrixRank for C64 {
    fn matrix_rank(m: &Mat<Self>) -> usize {
        float_rank(m, DEFAULT_RANK_TOL)
    }
}
