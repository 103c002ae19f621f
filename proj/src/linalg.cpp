#include "rof/linalg.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "rof/types.hpp"

namespace rof {

Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b, double tol,
                          const Eigen::VectorXd* initial, SolveReport* report, int dense_threshold,
                          int max_iterations) {
    const Eigen::Index n = A.rows();
    if (A.cols() != n || b.size() != n) throw std::invalid_argument("solve_spd: dimension mismatch");
    SolveReport rep;
    const double bnorm = b.norm();
    if (n == 0 || bnorm == 0.0) {
        if (report) *report = rep;
        return Eigen::VectorXd::Zero(n);
    }
    const Eigen::VectorXd diag = A.diagonal();
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(diag[i] > 0.0)) throw NumericalError("solve_spd: nonpositive diagonal entry, matrix is not SPD");

    Eigen::VectorXd x;
    if (n < dense_threshold) {
        const Eigen::MatrixXd dense(A);
        Eigen::LLT<Eigen::MatrixXd> llt(dense);
        if (llt.info() != Eigen::Success) throw NumericalError("solve_spd: dense Cholesky failed, matrix is not SPD");
        x = llt.solve(b);
        rep.dense = true;
    } else {
        const Eigen::VectorXd inv_diag = diag.cwiseInverse();
        x = initial ? *initial : Eigen::VectorXd::Zero(n);
        Eigen::VectorXd r = b - A * x;
        Eigen::VectorXd z = inv_diag.cwiseProduct(r);
        Eigen::VectorXd p = z;
        double rz = r.dot(z);
        const int cap = max_iterations > 0 ? max_iterations : static_cast<int>(std::max<Eigen::Index>(10 * n, 1000));
        int it = 0;
        while (r.norm() > tol * bnorm) {
            if (it >= cap) throw NumericalError("solve_spd: conjugate gradients did not reach the tolerance");
            const Eigen::VectorXd q = A * p;
            const double pq = p.dot(q);
            if (!(pq > 0.0)) throw NumericalError("solve_spd: indefinite matrix detected");
            const double step = rz / pq;
            x += step * p;
            r -= step * q;
            z = inv_diag.cwiseProduct(r);
            const double rz_new = r.dot(z);
            p = z + (rz_new / rz) * p;
            rz = rz_new;
            ++it;
        }
        rep.iterations = it;
    }
    rep.relative_residual = (b - A * x).norm() / bnorm;
    if (!std::isfinite(rep.relative_residual) || rep.relative_residual > std::max(tol, 1e-10))
        throw NumericalError("solve_spd: residual above tolerance");
    if (report) *report = rep;
    return x;
}

struct SparseCholesky::Impl {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

SparseCholesky::SparseCholesky() : impl_(std::make_unique<Impl>()) {}
SparseCholesky::~SparseCholesky() = default;
SparseCholesky::SparseCholesky(SparseCholesky&&) noexcept = default;
SparseCholesky& SparseCholesky::operator=(SparseCholesky&&) noexcept = default;

void SparseCholesky::analyze(const Eigen::SparseMatrix<double>& A) {
    impl_->ldlt.analyzePattern(A);
    analyzed_ = true;
}

void SparseCholesky::factorize(const Eigen::SparseMatrix<double>& A) {
    if (!analyzed_) analyze(A);
    impl_->ldlt.factorize(A);
    if (impl_->ldlt.info() != Eigen::Success) throw NumericalError("SparseCholesky: factorization failed");
    const auto d = impl_->ldlt.vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (!(d[i] > 0.0)) throw NumericalError("SparseCholesky: matrix is not positive definite");
}

Eigen::VectorXd SparseCholesky::solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = impl_->ldlt.solve(b);
    if (impl_->ldlt.info() != Eigen::Success) throw NumericalError("SparseCholesky: solve failed");
    return x;
}

}  // namespace rof
