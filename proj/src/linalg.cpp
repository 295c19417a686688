#include "binghamflow/linalg.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "binghamflow/errors.hpp"

namespace bingham {

namespace {

using ColMat = Eigen::SparseMatrix<double>;

}  // namespace

void finalize(SpMat& A) {
    A.prune(0.0, 0.0);
    A.makeCompressed();
}

Vec solve_spd(const SpMat& A, const Vec& b) {
    ColMat Ac(A);
    Eigen::SimplicialLDLT<ColMat> ldlt;
    ldlt.compute(Ac);
    if (ldlt.info() != Eigen::Success)
        throw NonPositivePivot("solve_spd: LDLT factorization failed");
    if (ldlt.vectorD().minCoeff() <= 0.0)
        throw NonPositivePivot("solve_spd: matrix is not positive definite");
    Vec x = ldlt.solve(b);
    // One refinement pass keeps the residual well inside the contract.
    Vec r = b - A * x;
    if (r.norm() > 1e-12 * (b.norm() + 1.0)) x += ldlt.solve(r);
    r = b - A * x;
    if (r.norm() > 1e-10 * (b.norm() + 1.0))
        throw NonConvergence("solve_spd: refined residual still above tolerance");
    return x;
}

Vec solve_cg(const SpMat& A, const Vec& b, double tol, int max_iter) {
    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(tol);
    if (max_iter > 0) cg.setMaxIterations(max_iter);
    cg.compute(A);
    Vec x = cg.solve(b);
    if (cg.info() != Eigen::Success)
        throw NonConvergence("solve_cg: conjugate gradient did not converge");
    return x;
}

Vec solve_lu(const SpMat& A, const Vec& b) {
    ColMat Ac(A);
    Eigen::SparseLU<ColMat> lu;
    lu.analyzePattern(Ac);
    lu.factorize(Ac);
    if (lu.info() != Eigen::Success)
        throw SingularSystem("solve_lu: factorization failed");
    return lu.solve(b);
}

std::pair<Vec, Vec> solve_saddle(const SaddleSystem& sys) {
    const int nu = static_cast<int>(sys.A_block.rows());
    const int np = static_cast<int>(sys.B_block.cols());
    const int dim = nu + np + 1;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(sys.A_block.nonZeros() + 2 * sys.B_block.nonZeros() + 2 * np);
    for (int r = 0; r < nu; ++r)
        for (SpMat::InnerIterator it(sys.A_block, r); it; ++it)
            trip.emplace_back(r, static_cast<int>(it.col()), it.value());
    for (int r = 0; r < nu; ++r)
        for (SpMat::InnerIterator it(sys.B_block, r); it; ++it) {
            const int c = static_cast<int>(it.col());
            trip.emplace_back(r, nu + c, it.value());
            trip.emplace_back(nu + c, r, it.value());
        }
    for (int c = 0; c < np; ++c) {
        trip.emplace_back(nu + c, dim - 1, sys.mean_constraint[c]);
        trip.emplace_back(dim - 1, nu + c, sys.mean_constraint[c]);
    }

    ColMat K(dim, dim);
    K.setFromTriplets(trip.begin(), trip.end());
    K.makeCompressed();

    Vec rhs(dim);
    rhs.head(nu) = sys.rhs_u;
    rhs.segment(nu, np) = sys.rhs_p;
    rhs[dim - 1] = 0.0;

    Eigen::SparseLU<ColMat> lu;
    lu.analyzePattern(K);
    lu.factorize(K);
    if (lu.info() != Eigen::Success)
        throw SingularSystem("solve_saddle: factorization of the augmented system failed");
    const Vec x = lu.solve(rhs);
    return {x.head(nu), x.segment(nu, np)};
}

void write_matrix_market(const SpMat& A, std::ostream& os) {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
    char buf[64];
    for (int r = 0; r < A.outerSize(); ++r)
        for (SpMat::InnerIterator it(A, r); it; ++it) {
            std::snprintf(buf, sizeof(buf), "%.17g", it.value());
            os << (r + 1) << " " << (it.col() + 1) << " " << buf << "\n";
        }
}

void write_matrix_market(const SpMat& A, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("write_matrix_market: cannot open " + path);
    write_matrix_market(A, os);
}

}  // namespace bingham
