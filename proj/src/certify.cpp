#include "twistspec/certify.hpp"

#include <cmath>

#include "twistspec/bessel.hpp"
#include "twistspec/eigensolve.hpp"

namespace twistspec {

Thm1Window thm1_window(const GeometrySummary& geom) {
    if (!geom.contains_origin || !geom.r)
        throw NoOrigin("thm1_window: origin is not interior to omega");
    Thm1Window w;
    w.r = *geom.r;
    const double j01 = bessel_j0_first_zero();
    w.mu1 = (j01 / w.r) * (j01 / w.r);
    w.claim = "spectrum contains [mu1, inf)";
    return w;
}

namespace {

/// Conservative s_n for a tabulated rate. On each linear piece |rate|
/// dips to the smaller endpoint magnitude, so a piece whose smaller
/// endpoint magnitude is <= n marks stations bad up to its outer knot
/// (conservative rounding at the tabulation resolution); beyond the
/// table the rate is linear and the last |rate| = n crossing is exact.
double tabulated_sn(const TwistProfile& p, int n, double cap) {
    const double nn = n;
    const auto& xs = p.knots();
    const auto& rs = p.knot_rates();
    const double slope = p.extrapolation_slope();
    double s = 0.0;

    // Pieces inside the table (plus the gap between 0 and the table
    // when the table does not straddle 0 -- the rate is linear there too).
    auto piece_bad = [&](double ra, double rb) {
        return std::min(std::abs(ra), std::abs(rb)) <= nn;
    };
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        if (!piece_bad(rs[i], rs[i + 1])) continue;
        if (xs[i + 1] > 0.0) s = std::max(s, xs[i + 1]);   // right side, outer end
        if (xs[i] < 0.0) s = std::max(s, -xs[i]);          // left side, outer end
    }
    if (xs.front() > 0.0 && piece_bad(p.rate(0.0), rs.front()))
        s = std::max(s, xs.front());
    if (xs.back() < 0.0 && piece_bad(rs.back(), p.rate(0.0)))
        s = std::max(s, -xs.back());

    // Extrapolation regions. Rightwards the rate rises from rate(x0)
    // with +slope; leftwards |rate| behaves the same by construction.
    auto tail_clearance = [&](double x0) {
        const double r0 = p.rate(x0);
        if (r0 > nn) return std::max(x0, 0.0);  // already clear and rising
        if (slope <= 0.0) {
            if (std::abs(r0) > nn) return std::max(x0, 0.0);  // flat tail below -n
            throw NotDiverging("find_sn: tabulated rate never exceeds n in the tail");
        }
        return std::max(x0, 0.0) + std::max(0.0, (nn - r0) / slope);
    };
    s = std::max(s, tail_clearance(std::max(xs.back(), 0.0)));
    {
        // Leftwards rate(x0 - d) = r0 + slope * d, the same rising form
        // as the right tail in the distance d.
        const double x0 = std::min(xs.front(), 0.0);
        const double r0 = p.rate(x0);
        double clear_d = 0.0;
        if (r0 > nn) {
            clear_d = 0.0;
        } else if (slope <= 0.0) {
            if (!(std::abs(r0) > nn))
                throw NotDiverging("find_sn: tabulated rate never exceeds n in the tail");
        } else {
            clear_d = std::max(0.0, (nn - r0) / slope);
        }
        s = std::max(s, -x0 + clear_d);
    }
    if (s > cap) throw NotDiverging("find_sn: s_n exceeds the search cap");
    return s;
}

}  // namespace

double find_sn(const TwistProfile& profile, int n, double search_cap) {
    if (n < 1) throw ConfigError("find_sn: n must be >= 1");
    switch (profile.kind()) {
        case TwistProfile::Kind::Constant:
            throw NotDiverging("find_sn: constant twist rate never explodes");
        case TwistProfile::Kind::LinearRate: {
            const double a = std::abs(profile.param_alpha());
            if (a == 0.0) throw NotDiverging("find_sn: zero linear rate");
            const double s = n / a;
            if (s > search_cap) throw NotDiverging("find_sn: s_n exceeds the search cap");
            return s;
        }
        case TwistProfile::Kind::PowerRate: {
            const double s =
                std::pow(static_cast<double>(n) / profile.param_alpha(),
                         1.0 / profile.param_p());
            if (s > search_cap) throw NotDiverging("find_sn: s_n exceeds the search cap");
            return s;
        }
        case TwistProfile::Kind::TabulatedRate:
            return tabulated_sn(profile, n, search_cap);
    }
    throw NotDiverging("find_sn: unsupported profile");
}

EssentialBound essential_lower_bound(const CrossSection& omega,
                                     const TwistProfile& profile, int n,
                                     const RaySampling& sampling, double ray_tol,
                                     double horizon) {
    const GeometrySummary geom = summary(omega);
    if (!(geom.m > 0.0))
        throw HalfPlaneViolated(
            "essential_lower_bound: omega must lie in the open half-plane t1 > 0");
    EssentialBound eb;
    eb.n = n;
    eb.sn = find_sn(profile, n);
    eb.bound = 0.25 * static_cast<double>(n) * static_cast<double>(n);
    eb.sampling = sampling;
    const double half_turn = M_PI / n;
    eb.window_lo = eb.sn + half_turn;
    eb.window_hi = eb.window_lo + 2.0 * half_turn;
    const double right = max_free_segment(omega, profile, {eb.window_lo, eb.window_hi},
                                          sampling, ray_tol, horizon);
    const double left = max_free_segment(omega, profile, {-eb.window_hi, -eb.window_lo},
                                         sampling, ray_tol, horizon);
    eb.max_observed_segment = std::max(right, left);
    eb.ray_verified = eb.max_observed_segment <= 2.0 * half_turn;
    eb.reports_purely_discrete = profile.diverges();
    return eb;
}

BracketReport bracket_eigenvalues(const CrossSection& omega,
                                  const TwistProfile& profile, double h, double h1,
                                  double L, int n, int K, double tol,
                                  std::uint64_t seed, int max_iter,
                                  const RaySampling& sampling) {
    const EssentialBound eb = essential_lower_bound(omega, profile, n, sampling);
    if (L < eb.sn)
        throw ConfigError("bracket_eigenvalues: truncation L must cover s_n");

    const TransverseGrid tgrid = build_grid(omega, h);
    const LongitudinalGrid ld = longitudinal_grid(L, h1, EndCondition::Dirichlet);
    const LongitudinalGrid ln = longitudinal_grid(L, h1, EndCondition::Neumann);
    const TubeOperator Hd = assemble_tube(tgrid, ld, profile);
    const TubeOperator Hn = assemble_tube(tgrid, ln, profile);
    const EigResult upper = lobpcg(Hd.matrix, K, tol, max_iter, seed);
    const EigResult lower = lobpcg(Hn.matrix, K, tol, max_iter, seed);

    BracketReport r;
    r.n = n;
    r.sn = eb.sn;
    r.bound = eb.bound;
    r.ray_verified = eb.ray_verified;
    r.L = L;
    r.h = h;
    r.h1 = ld.h1();
    r.lower = lower.eigenvalues;
    r.upper = upper.eigenvalues;
    r.valid.resize(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k)
        r.valid[static_cast<size_t>(k)] =
            r.upper[static_cast<size_t>(k)] < r.bound && L >= r.sn;
    r.note =
        "lower bounds for the continuum operator are conditional on the "
        "exterior estimate inf spec >= n^2/4; the ray certificate is sampled "
        "numerical evidence, not an interval-arithmetic proof";
    return r;
}

std::vector<GapPoint> poincare_gap_probe(const CrossSection& omega,
                                         const TwistProfile& profile,
                                         const std::vector<double>& L_sweep,
                                         double h, double h1, double tol,
                                         std::uint64_t seed, int max_iter) {
    const TransverseGrid tgrid = build_grid(omega, h);
    const XSectionOperator base = assemble_xsection(tgrid, 0.0);
    const double E1 = eigs_xsection(base, 1, tol, seed, max_iter).eigenvalues.at(0);
    std::vector<GapPoint> out;
    for (const double L : L_sweep) {
        const LongitudinalGrid lg = longitudinal_grid(L, h1, EndCondition::Dirichlet);
        const TubeOperator H = assemble_tube(tgrid, lg, profile);
        GapPoint gp;
        gp.L = L;
        gp.lambda1 = lobpcg(H.matrix, 1, tol, max_iter, seed).eigenvalues.at(0);
        gp.gap = gp.lambda1 - E1;
        out.push_back(gp);
    }
    return out;
}

}  // namespace twistspec
