#include "twistspec/sparse.hpp"

#include <algorithm>

namespace twistspec {

SparseSym SparseSym::from_triplets(int order, const std::vector<Triplet>& triplets) {
    if (order <= 0) throw ConfigError("SparseSym: order must be positive");
    // Fold everything into the lower triangle, then sort and sum duplicates.
    std::vector<Triplet> t;
    t.reserve(triplets.size());
    for (const Triplet& e : triplets) {
        if (e.row < 0 || e.col < 0 || e.row >= order || e.col >= order)
            throw ConfigError("SparseSym: triplet index out of range");
        if (e.value == 0.0) continue;
        t.push_back(e.row >= e.col ? e : Triplet{e.col, e.row, e.value});
    }
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseSym A;
    A.order_ = order;
    A.row_ptr_.assign(static_cast<size_t>(order) + 1, 0);
    for (size_t i = 0; i < t.size();) {
        size_t j = i;
        double v = 0.0;
        while (j < t.size() && t[j].row == t[i].row && t[j].col == t[i].col)
            v += t[j++].value;
        A.col_.push_back(t[i].col);
        A.vals_.push_back(v);
        ++A.row_ptr_[static_cast<size_t>(t[i].row) + 1];
        i = j;
    }
    for (int r = 0; r < order; ++r) A.row_ptr_[r + 1] += A.row_ptr_[r];
    return A;
}

void SparseSym::apply(const double* x, double* y) const {
    std::fill(y, y + order_, 0.0);
    for (int i = 0; i < order_; ++i) {
        const std::int64_t lo = row_ptr_[i], hi = row_ptr_[i + 1];
        double acc = 0.0;
        for (std::int64_t k = lo; k < hi; ++k) {
            const int j = col_[k];
            const double v = vals_[k];
            acc += v * x[j];
            if (j != i) y[j] += v * x[i];
        }
        y[i] += acc;
    }
}

Eigen::VectorXd SparseSym::apply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(order_);
    apply(x.data(), y.data());
    return y;
}

Eigen::MatrixXd SparseSym::apply(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd y(order_, x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c)
        apply(x.col(c).data(), y.col(c).data());
    return y;
}

std::vector<double> SparseSym::diagonal() const {
    std::vector<double> d(static_cast<size_t>(order_), 0.0);
    for (int i = 0; i < order_; ++i)
        for (std::int64_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            if (col_[k] == i) d[static_cast<size_t>(i)] = vals_[k];
    return d;
}

Eigen::MatrixXd SparseSym::to_dense() const {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(order_, order_);
    for (int i = 0; i < order_; ++i)
        for (std::int64_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            D(i, col_[k]) = vals_[k];
            D(col_[k], i) = vals_[k];
        }
    return D;
}

}  // namespace twistspec
