#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "twistspec/sparse.hpp"

namespace twistspec {

/// Eigenpair bundle returned by the solvers. Eigenvalues ascending,
/// eigenvectors orthonormal columns, residuals ||Av - lambda v||.
struct EigResult {
    std::vector<double> eigenvalues;
    Eigen::MatrixXd eigenvectors;  // order x k
    std::vector<double> residual_norms;
    int iterations = 0;
    std::vector<char> converged;  // per pair
    bool identity_preconditioner_fallback = false;

    bool all_converged() const {
        for (char c : converged)
            if (!c) return false;
        return !converged.empty();
    }
};

/// k smallest eigenpairs by LOBPCG with a Jacobi (diagonal)
/// preconditioner, soft locking of converged pairs and a dense
/// re-orthonormalization of the search block each iteration.
/// Deterministic for fixed (A, k, tol, max_iter, seed): the initial
/// block comes from the xorshift64* generator
///   s ^= s >> 12;  s ^= s << 25;  s ^= s >> 27;  out = s * 2685821657736338717.
/// Non-convergence is reported through the per-pair flags, with the
/// best available pairs returned.
EigResult lobpcg(const SparseSym& A, int k, double tol, int max_iter,
                 std::uint64_t seed);

/// Full ascending spectrum by a dense symmetric eigendecomposition
/// (tridiagonalization + implicit QL). Oracle for small problems;
/// throws TooLarge above the cap.
std::vector<double> dense_eig(const SparseSym& A, int order_cap = 2000);

namespace detail {

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix,
/// ascending. Used inside LOBPCG for the Rayleigh-Ritz subproblems so
/// that the iterative path shares no eigensolver kernel with dense_eig.
void jacobi_sym_eig(Eigen::MatrixXd A, Eigen::VectorXd& values,
                    Eigen::MatrixXd& vectors);

/// xorshift64* stream mapped to uniform (-1, 1).
class Xorshift64Star {
public:
    explicit Xorshift64Star(std::uint64_t seed)
        : state_(seed ? seed : 0x9E3779B97F4A7C15ULL) {}
    std::uint64_t next() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 2685821657736338717ULL;
    }
    double uniform_pm1() {
        return 2.0 * (static_cast<double>(next() >> 11) * 0x1.0p-53) - 1.0;
    }

private:
    std::uint64_t state_;
};

}  // namespace detail
}  // namespace twistspec
