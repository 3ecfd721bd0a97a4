#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "twistspec/errors.hpp"

namespace twistspec {

/// Symmetric sparse matrix in compressed row layout. Only the lower
/// triangle is stored; the upper part is mirrored on apply with the
/// same accumulation order per entry pair, so u.Av == v.Au exactly.
class SparseSym {
public:
    SparseSym() = default;

    struct Triplet {
        int row;
        int col;
        double value;
    };

    /// Builds from arbitrary (i, j, v) contributions. Each logical
    /// off-diagonal pair must be supplied once (either orientation);
    /// duplicates on the same unordered pair are summed.
    static SparseSym from_triplets(int order, const std::vector<Triplet>& triplets);

    int order() const { return order_; }
    std::int64_t nnz_stored() const { return static_cast<std::int64_t>(vals_.size()); }

    /// y = A x
    void apply(const double* x, double* y) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    /// Column-wise block apply.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;

    std::vector<double> diagonal() const;
    Eigen::MatrixXd to_dense() const;

    const std::vector<std::int64_t>& row_offsets() const { return row_ptr_; }
    const std::vector<int>& column_indices() const { return col_; }
    const std::vector<double>& values() const { return vals_; }
    std::vector<double>& mutable_values() { return vals_; }

private:
    int order_ = 0;
    std::vector<std::int64_t> row_ptr_;
    std::vector<int> col_;  // col <= row, sorted per row
    std::vector<double> vals_;
};

}  // namespace twistspec
