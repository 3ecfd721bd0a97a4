#include "twistspec/xsection.hpp"

#include <cmath>

namespace twistspec {

TransverseGrid build_grid(const CrossSection& omega, double h) {
    if (!(h > 0.0)) throw ConfigError("build_grid: h must be positive");
    TransverseGrid g;
    g.h = h;
    g.box = omega.bounding_box();
    g.nx = std::max(0, static_cast<int>(std::ceil((g.box.hi.x - g.box.lo.x) / h)) - 1);
    g.ny = std::max(0, static_cast<int>(std::ceil((g.box.hi.y - g.box.lo.y) / h)) - 1);
    g.index.assign(static_cast<size_t>(g.nx) * g.ny, -1);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            const Vec2 t = {g.box.lo.x + h * (ix + 1), g.box.lo.y + h * (iy + 1)};
            if (omega.contains(t)) {
                g.index[static_cast<size_t>(iy) * g.nx + ix] = g.count();
                g.coords.push_back(t);
            }
        }
    if (g.count() == 0) throw EmptyGrid("build_grid: no lattice node inside omega");
    return g;
}

std::vector<SparseSym::Triplet> laplacian_triplets(const TransverseGrid& grid) {
    const double w = 1.0 / (grid.h * grid.h);
    std::vector<SparseSym::Triplet> t;
    t.reserve(static_cast<size_t>(grid.count()) * 3);
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix) {
            const int i = grid.node_at(ix, iy);
            if (i < 0) continue;
            t.push_back({i, i, 4.0 * w});
            // Each undirected neighbor pair once (west and south).
            const int west = grid.node_at(ix - 1, iy);
            if (west >= 0) t.push_back({i, west, -w});
            const int south = grid.node_at(ix, iy - 1);
            if (south >= 0) t.push_back({i, south, -w});
        }
    return t;
}

std::vector<SparseSym::Triplet> angular_derivative_triplets(const TransverseGrid& grid) {
    std::vector<SparseSym::Triplet> t;
    const double inv2h = 1.0 / (2.0 * grid.h);
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix) {
            const int i = grid.node_at(ix, iy);
            if (i < 0) continue;
            const Vec2 c = grid.coords[static_cast<size_t>(i)];
            const int e = grid.node_at(ix + 1, iy), w = grid.node_at(ix - 1, iy);
            const int n = grid.node_at(ix, iy + 1), s = grid.node_at(ix, iy - 1);
            if (e >= 0) t.push_back({i, e, c.y * inv2h});
            if (w >= 0) t.push_back({i, w, -c.y * inv2h});
            if (n >= 0) t.push_back({i, n, -c.x * inv2h});
            if (s >= 0) t.push_back({i, s, c.x * inv2h});
        }
    return t;
}

namespace {

/// Gram product T^t T emitted as unordered-pair triplets (i >= j).
std::vector<SparseSym::Triplet> gram_triplets(
    const std::vector<SparseSym::Triplet>& T, int order) {
    // Bucket T by row, then expand row-wise outer products.
    std::vector<std::vector<std::pair<int, double>>> rows(static_cast<size_t>(order));
    for (const auto& e : T) rows[static_cast<size_t>(e.row)].push_back({e.col, e.value});
    std::vector<SparseSym::Triplet> out;
    for (const auto& row : rows)
        for (size_t a = 0; a < row.size(); ++a)
            for (size_t b = 0; b < row.size(); ++b) {
                if (row[a].first < row[b].first) continue;
                out.push_back({row[a].first, row[b].first, row[a].second * row[b].second});
            }
    return out;
}

}  // namespace

XSectionOperator assemble_xsection(const TransverseGrid& grid, double beta) {
    XSectionOperator op;
    op.beta = beta;
    op.h = grid.h;
    op.nodes = grid.count();
    op.angular = angular_derivative_triplets(grid);
    std::vector<SparseSym::Triplet> t = laplacian_triplets(grid);
    if (beta != 0.0) {
        const double b2 = beta * beta;
        for (const auto& e : gram_triplets(op.angular, grid.count()))
            t.push_back({e.row, e.col, b2 * e.value});
    }
    op.matrix = SparseSym::from_triplets(grid.count(), t);
    return op;
}

CrossSectionSpectrum eigs_xsection(const XSectionOperator& op, int k, double tol,
                                   std::uint64_t seed, int max_iter) {
    if (k > op.matrix.order())
        throw ConfigError("eigs_xsection: k exceeds the node count");
    const EigResult r = lobpcg(op.matrix, k, tol, max_iter, seed);
    CrossSectionSpectrum s;
    s.beta = op.beta;
    s.eigenvalues = r.eigenvalues;
    s.residual_norms = r.residual_norms;
    s.converged = r.converged;
    s.iterations = r.iterations;
    s.h = op.h;
    s.nodes = op.nodes;
    return s;
}

}  // namespace twistspec
