#pragma once

#include <vector>

#include "twistspec/eigensolve.hpp"
#include "twistspec/geometry.hpp"
#include "twistspec/sparse.hpp"

namespace twistspec {

/// Uniform staircase Dirichlet grid: the lattice nodes of spacing h
/// over the bounding box that lie strictly inside omega, indexed
/// contiguously in row-major lattice order.
struct TransverseGrid {
    double h = 0.0;
    CrossSection::Box box;
    int nx = 0, ny = 0;            // lattice extent
    std::vector<int> index;        // nx*ny entries, -1 outside omega
    std::vector<Vec2> coords;      // per interior node

    int count() const { return static_cast<int>(coords.size()); }
    int node_at(int ix, int iy) const {
        if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return -1;
        return index[static_cast<size_t>(iy) * nx + ix];
    }
};

TransverseGrid build_grid(const CrossSection& omega, double h);

/// Five-point Dirichlet Laplacian on the grid, as unordered-pair triplets.
std::vector<SparseSym::Triplet> laplacian_triplets(const TransverseGrid& grid);

/// Centered-difference angular derivative t2*d/dt1 - t1*d/dt2 with zero
/// extension outside the grid. General (non-symmetric) entries.
std::vector<SparseSym::Triplet> angular_derivative_triplets(const TransverseGrid& grid);

/// Discretized -Laplace - beta^2 * (angular derivative)^2 on omega:
/// A(beta) = A(0) + beta^2 T^t T, symmetric positive definite.
struct XSectionOperator {
    SparseSym matrix;                           // A(beta)
    std::vector<SparseSym::Triplet> angular;    // T
    double beta = 0.0;
    double h = 0.0;
    int nodes = 0;
};

XSectionOperator assemble_xsection(const TransverseGrid& grid, double beta);

struct CrossSectionSpectrum {
    double beta = 0.0;
    std::vector<double> eigenvalues;
    std::vector<double> residual_norms;
    std::vector<char> converged;
    int iterations = 0;
    double h = 0.0;
    int nodes = 0;
};

CrossSectionSpectrum eigs_xsection(const XSectionOperator& op, int k, double tol,
                                   std::uint64_t seed, int max_iter = 20000);

}  // namespace twistspec
