#pragma once

#include <vector>

#include "twistspec/geometry.hpp"
#include "twistspec/sparse.hpp"
#include "twistspec/xsection.hpp"

namespace twistspec {

enum class EndCondition { Dirichlet, Neumann };

/// Slices of the truncated tube (-L, L), strictly inside the interval;
/// ghost slices at the cuts carry the end condition.
struct LongitudinalGrid {
    double L = 0.0;
    int n1 = 0;
    EndCondition end = EndCondition::Dirichlet;

    double h1() const { return 2.0 * L / (n1 + 1); }
    double x1(int i) const { return -L + h1() * (i + 1); }
};

/// n1 chosen so the spacing is as close as possible to h1_target.
LongitudinalGrid longitudinal_grid(double L, double h1_target, EndCondition end);

/// Straight-gauge twisted Laplacian on the truncated tube. The matrix
/// realizes the sum-of-squares form
///   sum_edges || (psi_{i+1} - psi_i)/h1 + rate_mid * T (psi_{i+1} + psi_i)/2 ||^2
///   + sum_slices psi_i^t Aperp(0) psi_i
/// with ghost slices clamped to zero for Dirichlet ends and the two
/// boundary difference terms dropped for Neumann ends. Depends on the
/// twist only through the rate, never the angle itself.
struct TubeOperator {
    SparseSym matrix;                // order n1 * nperp, slice-major
    int nperp = 0;
    int n1 = 0;
    double h1 = 0.0;
    EndCondition end = EndCondition::Dirichlet;
    std::vector<double> rate_mid;    // rate at inter-slice midpoints

    int order() const { return n1 * nperp; }
};

TubeOperator assemble_tube(const TransverseGrid& tgrid, const LongitudinalGrid& lgrid,
                           const TwistProfile& profile);

/// (v^t H v) / (v^t v); an upper bound for the lowest eigenvalue.
double rayleigh_quotient(const TubeOperator& op, const std::vector<double>& v);

/// Node samples of J0(j01 |t| / r) cos(pi x1 / (2L)) supported in the
/// embedded cylinder of inradius r about the axis -- a valid Dirichlet
/// trial function for every twist profile. Requires the origin inside
/// the cross-section.
std::vector<double> trial_cylinder_mode(const TransverseGrid& tgrid,
                                        const LongitudinalGrid& lgrid,
                                        const GeometrySummary& geom);

}  // namespace twistspec
