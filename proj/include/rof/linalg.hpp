#pragma once

#include <memory>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace rof {

struct SolveReport {
    int iterations = 0;
    double relative_residual = 0.0;
    bool dense = false;
};

/// Solves A x = b for symmetric positive definite A by Jacobi-preconditioned
/// conjugate gradients, or by a dense Cholesky factorization below
/// `dense_threshold` unknowns. Throws NumericalError on breakdown, detected
/// indefiniteness or when the relative residual stays above `tol`.
Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b, double tol = 1e-12,
                          const Eigen::VectorXd* initial = nullptr, SolveReport* report = nullptr,
                          int dense_threshold = 500, int max_iterations = 0);

/// Sparse LDL^T factorization with the ordering computed once per pattern.
class SparseCholesky {
public:
    SparseCholesky();
    ~SparseCholesky();
    SparseCholesky(SparseCholesky&&) noexcept;
    SparseCholesky& operator=(SparseCholesky&&) noexcept;

    void analyze(const Eigen::SparseMatrix<double>& A);
    /// Numeric factorization; A must share the analysed pattern.
    void factorize(const Eigen::SparseMatrix<double>& A);
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    bool analyzed() const { return analyzed_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    bool analyzed_ = false;
};

}  // namespace rof
