#pragma once

#include <iosfwd>
#include <string>
#include <utility>

#include <Eigen/Core>
#include <Eigen/Sparse>

namespace bingham {

// Row-major storage so the compressed layout is CSR (sorted, unique column
// indices per row once compressed).
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

// Compress and drop explicitly stored zeros.
void finalize(SpMat& A);

struct SaddleSystem {
    SpMat A_block;        // 2n x 2n velocity block
    SpMat B_block;        // 2n x l pressure coupling
    Vec rhs_u;            // 2n
    Vec rhs_p;            // l
    Vec mean_constraint;  // quad areas, length l
};

// Direct solve of a symmetric positive definite system (simplicial LDLT with
// a positivity check on the pivots, plus one step of iterative refinement).
Vec solve_spd(const SpMat& A, const Vec& b);

// Conjugate-gradient path; cross-checks the factorization in tests.
Vec solve_cg(const SpMat& A, const Vec& b, double tol = 1e-12, int max_iter = 0);

// Sparse LU with partial pivoting for general square systems.
Vec solve_lu(const SpMat& A, const Vec& b);

// Solves  A u + B p = rhs_u,  B^T u = rhs_p  with the area-weighted zero
// pressure mean enforced by a single extra Lagrange-multiplier row/column.
std::pair<Vec, Vec> solve_saddle(const SaddleSystem& sys);

// Matrix-market-style triplet export: header line, then one
// "row col value" line per stored entry, 1-based indices.
void write_matrix_market(const SpMat& A, std::ostream& os);
void write_matrix_market(const SpMat& A, const std::string& path);

}  // namespace bingham
