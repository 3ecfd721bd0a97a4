#pragma once

#include <string>
#include <vector>

#include "twistspec/geometry.hpp"
#include "twistspec/tube.hpp"

namespace twistspec {

/// Quasi-cylindrical window: with the origin interior to omega the
/// spectrum contains [mu1, infinity), mu1 the ground eigenvalue of the
/// disc of inradius r.
struct Thm1Window {
    double r = 0.0;
    double mu1 = 0.0;
    std::string claim;
};

Thm1Window thm1_window(const GeometrySummary& geom);

/// Station beyond which |rate| > n: analytic for the named diverging
/// families, conservative knot scan for tabulated rates.
double find_sn(const TwistProfile& profile, int n, double search_cap = 1e6);

/// Certificate for the exterior lower bound n^2/4: the station s_n plus
/// a sampled verification that every axial free segment past s_n + pi/n
/// has length at most 2 pi / n.
struct EssentialBound {
    int n = 0;
    double sn = 0.0;
    double bound = 0.0;  // n^2 / 4
    bool ray_verified = false;
    double max_observed_segment = 0.0;
    RaySampling sampling;
    double window_lo = 0.0, window_hi = 0.0;  // right-side window; mirrored on the left
    bool reports_purely_discrete = false;     // rate diverges, so n is arbitrary
};

EssentialBound essential_lower_bound(const CrossSection& omega,
                                     const TwistProfile& profile, int n,
                                     const RaySampling& sampling = {},
                                     double ray_tol = 1e-6, double horizon = 1e4);

/// Two-sided eigenvalue brackets from the Dirichlet / Neumann pair on
/// the same grids. Lower bounds for the continuum operator are
/// conditional on the exterior estimate; the ray certificate is the
/// numerical evidence, not a proof.
struct BracketReport {
    int n = 0;
    double sn = 0.0;
    double bound = 0.0;
    bool ray_verified = false;
    double L = 0.0, h = 0.0, h1 = 0.0;
    std::vector<double> lower;  // Neumann-cut eigenvalues
    std::vector<double> upper;  // Dirichlet-truncation eigenvalues
    std::vector<char> valid;    // upper_k < bound and L >= s_n
    std::string note;
};

BracketReport bracket_eigenvalues(const CrossSection& omega,
                                  const TwistProfile& profile, double h, double h1,
                                  double L, int n, int K, double tol,
                                  std::uint64_t seed, int max_iter = 20000,
                                  const RaySampling& sampling = {});

/// Sweep of lambda1(L) - E1 for a profile with inf |rate| > 0 on an
/// off-center cross-section: exhibits the Poincare-type gap numerically.
struct GapPoint {
    double L = 0.0;
    double lambda1 = 0.0;
    double gap = 0.0;
};

std::vector<GapPoint> poincare_gap_probe(const CrossSection& omega,
                                         const TwistProfile& profile,
                                         const std::vector<double>& L_sweep,
                                         double h, double h1, double tol,
                                         std::uint64_t seed, int max_iter = 20000);

}  // namespace twistspec
