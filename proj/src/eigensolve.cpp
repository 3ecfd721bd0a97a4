#include "twistspec/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace twistspec {

namespace detail {

void jacobi_sym_eig(Eigen::MatrixXd A, Eigen::VectorXd& values,
                    Eigen::MatrixXd& vectors) {
    const Eigen::Index n = A.rows();
    vectors = Eigen::MatrixXd::Identity(n, n);
    const double scale = std::max(A.cwiseAbs().maxCoeff(), 1e-300);
    for (int sweep = 0; sweep < 128; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        if (off <= n * n * 1e-32 * scale * scale) break;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double tau = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double aip = A(i, p), aiq = A(i, q);
                    A(i, p) = c * aip - s * aiq;
                    A(i, q) = s * aip + c * aiq;
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double api = A(p, i), aqi = A(q, i);
                    A(p, i) = c * api - s * aqi;
                    A(q, i) = s * api + c * aqi;
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double vip = vectors(i, p), viq = vectors(i, q);
                    vectors(i, p) = c * vip - s * viq;
                    vectors(i, q) = s * vip + c * viq;
                }
            }
    }
    // Sort ascending.
    std::vector<Eigen::Index> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return A(a, a) < A(b, b); });
    values.resize(n);
    Eigen::MatrixXd v(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        values(j) = A(idx[static_cast<size_t>(j)], idx[static_cast<size_t>(j)]);
        v.col(j) = vectors.col(idx[static_cast<size_t>(j)]);
    }
    vectors = std::move(v);
}

}  // namespace detail

namespace {

using detail::jacobi_sym_eig;

/// Orthonormalizes the columns of M through the eigendecomposition of
/// its Gram matrix, dropping near-dependent directions. The companion
/// block (typically A*M) is transformed identically.
void gram_orthonormalize(Eigen::MatrixXd& M, Eigen::MatrixXd* companion) {
    if (M.cols() == 0) return;
    Eigen::MatrixXd G = M.transpose() * M;
    G = 0.5 * (G + G.transpose()).eval();
    Eigen::VectorXd d;
    Eigen::MatrixXd V;
    jacobi_sym_eig(G, d, V);
    const double dmax = std::max(d.maxCoeff(), 1e-300);
    Eigen::Index keep = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d(i) > 1e-24 * dmax) ++keep;
    Eigen::MatrixXd K(d.size(), keep);
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d(i) > 1e-24 * dmax) K.col(c++) = V.col(i) / std::sqrt(d(i));
    M = (M * K).eval();
    if (companion) *companion = (*companion * K).eval();
}

EigResult finalize(const SparseSym& A, Eigen::MatrixXd X, int k, double tol,
                   int iterations, bool precond_fallback) {
    // Final Rayleigh-Ritz rotation and residual audit on fresh A*X.
    Eigen::MatrixXd AX = A.apply(X);
    Eigen::MatrixXd H = X.transpose() * AX;
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::VectorXd theta;
    Eigen::MatrixXd C;
    jacobi_sym_eig(H, theta, C);
    X = (X * C).eval();
    AX = (AX * C).eval();

    EigResult out;
    out.iterations = iterations;
    out.identity_preconditioner_fallback = precond_fallback;
    out.eigenvectors = X.leftCols(k);
    out.eigenvalues.resize(static_cast<size_t>(k));
    out.residual_norms.resize(static_cast<size_t>(k));
    out.converged.resize(static_cast<size_t>(k));
    for (int j = 0; j < k; ++j) {
        const double lam = theta(j);
        const double res = (AX.col(j) - lam * X.col(j)).norm();
        out.eigenvalues[static_cast<size_t>(j)] = lam;
        out.residual_norms[static_cast<size_t>(j)] = res;
        out.converged[static_cast<size_t>(j)] = res <= tol * (1.0 + std::abs(lam));
    }
    return out;
}

}  // namespace

EigResult lobpcg(const SparseSym& A, int k, double tol, int max_iter,
                 std::uint64_t seed) {
    const int n = A.order();
    if (k < 1 || k > n) throw ConfigError("lobpcg: need 1 <= k <= order");
    if (!(tol > 0.0)) throw ConfigError("lobpcg: tol must be positive");

    int m = std::min(2 * k, k + 8);
    m = std::min(m, n);

    // Preconditioner: inverse diagonal, with an identity fallback when
    // the diagonal is not positive.
    const std::vector<double> diag = A.diagonal();
    bool precond_fallback = false;
    for (double d : diag)
        if (!(d > 0.0)) precond_fallback = true;

    // Subspace methods need room; go dense below that.
    if (n <= std::max(3 * m, 16)) {
        Eigen::VectorXd vals;
        Eigen::MatrixXd vecs;
        jacobi_sym_eig(A.to_dense(), vals, vecs);
        return finalize(A, vecs.leftCols(std::min<Eigen::Index>(n, m)), k, tol, 0,
                        precond_fallback);
    }

    detail::Xorshift64Star rng(seed);
    Eigen::MatrixXd X(n, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = rng.uniform_pm1();
    gram_orthonormalize(X, nullptr);

    Eigen::MatrixXd AX = A.apply(X);
    Eigen::MatrixXd P(n, 0), AP(n, 0);

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        m = static_cast<int>(X.cols());  // may shrink on rank collapse
        if (m < k) break;
        // Ritz rotation of the current block.
        Eigen::MatrixXd H = X.transpose() * AX;
        H = 0.5 * (H + H.transpose()).eval();
        Eigen::VectorXd theta;
        Eigen::MatrixXd C;
        jacobi_sym_eig(H, theta, C);
        X = (X * C).eval();
        AX = (AX * C).eval();

        Eigen::MatrixXd R = AX - X * theta.asDiagonal();
        bool head_converged = true;
        std::vector<char> conv(static_cast<size_t>(m));
        for (int j = 0; j < m; ++j) {
            conv[static_cast<size_t>(j)] =
                R.col(j).norm() <= tol * (1.0 + std::abs(theta(j)));
            if (j < k && !conv[static_cast<size_t>(j)]) head_converged = false;
        }
        if (head_converged) break;

        // Soft locking: converged pairs stay in X but contribute no
        // new search directions.
        int mw = 0;
        for (int j = 0; j < m; ++j)
            if (!conv[static_cast<size_t>(j)]) ++mw;
        Eigen::MatrixXd W(n, mw);
        int c = 0;
        for (int j = 0; j < m; ++j) {
            if (conv[static_cast<size_t>(j)]) continue;
            if (precond_fallback) {
                W.col(c) = R.col(j);
            } else {
                for (int i = 0; i < n; ++i)
                    W(i, c) = R(i, j) / diag[static_cast<size_t>(i)];
            }
            const double nw = W.col(c).norm();
            if (nw > 0.0) W.col(c) /= nw;
            ++c;
        }
        Eigen::MatrixXd AW = A.apply(W);

        const Eigen::Index q = m + W.cols() + P.cols();
        Eigen::MatrixXd S(n, q), AS(n, q);
        S << X, W, P;
        AS << AX, AW, AP;

        // Dense orthonormalization of the whole search block.
        Eigen::MatrixXd G = S.transpose() * S;
        G = 0.5 * (G + G.transpose()).eval();
        Eigen::VectorXd d;
        Eigen::MatrixXd V;
        jacobi_sym_eig(G, d, V);
        const double dmax = std::max(d.maxCoeff(), 1e-300);
        Eigen::Index keep = 0;
        for (Eigen::Index i = 0; i < d.size(); ++i)
            if (d(i) > 1e-24 * dmax) ++keep;
        Eigen::MatrixXd K(q, keep);
        Eigen::Index kc = 0;
        for (Eigen::Index i = 0; i < d.size(); ++i)
            if (d(i) > 1e-24 * dmax) K.col(kc++) = V.col(i) / std::sqrt(d(i));

        Eigen::MatrixXd Hs = S.transpose() * AS;
        Hs = 0.5 * (Hs + Hs.transpose()).eval();
        Eigen::MatrixXd M = K.transpose() * Hs * K;
        M = 0.5 * (M + M.transpose()).eval();
        Eigen::VectorXd mu;
        Eigen::MatrixXd Cm;
        jacobi_sym_eig(M, mu, Cm);

        const Eigen::Index mtake = std::min<Eigen::Index>(m, keep);
        Eigen::MatrixXd Y = K * Cm.leftCols(mtake);  // q x m

        // New implicit gradient block: the part of the update outside
        // the span of the previous X.
        Eigen::MatrixXd Yp = Y;
        Yp.topRows(m).setZero();
        P = S * Yp;
        AP = AS * Yp;
        gram_orthonormalize(P, &AP);

        X = S * Y;
        AX = AS * Y;
        if ((iter + 1) % 64 == 0) {
            // Refresh tracked products to stop drift from accumulating.
            AX = A.apply(X);
            AP = A.apply(P);
        }
    }

    return finalize(A, std::move(X), k, tol, iter, precond_fallback);
}

std::vector<double> dense_eig(const SparseSym& A, int order_cap) {
    if (A.order() > order_cap)
        throw TooLarge("dense_eig: order exceeds the dense cap");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.to_dense(),
                                                      Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& v = es.eigenvalues();
    return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace twistspec
