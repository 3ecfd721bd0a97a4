#include "twistspec/tube.hpp"

#include <cmath>

#include "twistspec/bessel.hpp"

namespace twistspec {

LongitudinalGrid longitudinal_grid(double L, double h1_target, EndCondition end) {
    if (!(L > 0.0) || !(h1_target > 0.0))
        throw ConfigError("longitudinal_grid: L and h1 must be positive");
    LongitudinalGrid g;
    g.L = L;
    g.n1 = std::max(1, static_cast<int>(std::lround(2.0 * L / h1_target)) - 1);
    g.end = end;
    return g;
}

namespace {

using Triplets = std::vector<SparseSym::Triplet>;

/// Appends c * M into the block at (row_off, col_off). For diagonal
/// blocks of a symmetric M only the lower entries are emitted so each
/// unordered pair appears once.
void add_block(Triplets& out, const Triplets& M, double c, int row_off, int col_off,
               bool lower_only) {
    for (const auto& e : M) {
        if (lower_only && e.row < e.col) continue;
        out.push_back({row_off + e.row, col_off + e.col, c * e.value});
    }
}

}  // namespace

TubeOperator assemble_tube(const TransverseGrid& tgrid, const LongitudinalGrid& lgrid,
                           const TwistProfile& profile) {
    const int np = tgrid.count();
    const int n1 = lgrid.n1;
    const double h1 = lgrid.h1();
    const double inv_h1sq = 1.0 / (h1 * h1);

    // Transverse building blocks (full entry lists over one slice).
    const Triplets aperp = laplacian_triplets(tgrid);  // already unordered pairs
    const Triplets T = angular_derivative_triplets(tgrid);
    Triplets Tt, Tsym, G;
    for (const auto& e : T) Tt.push_back({e.col, e.row, e.value});
    Tsym = T;
    for (const auto& e : Tt) Tsym.push_back(e);
    {
        std::vector<std::vector<std::pair<int, double>>> rows(static_cast<size_t>(np));
        for (const auto& e : T)
            rows[static_cast<size_t>(e.row)].push_back({e.col, e.value});
        for (const auto& row : rows)
            for (size_t a = 0; a < row.size(); ++a)
                for (size_t b = 0; b < row.size(); ++b)
                    G.push_back({row[a].first, row[b].first,
                                 row[a].second * row[b].second});
    }
    Triplets ident;
    for (int i = 0; i < np; ++i) ident.push_back({i, i, 1.0});

    TubeOperator op;
    op.nperp = np;
    op.n1 = n1;
    op.h1 = h1;
    op.end = lgrid.end;

    Triplets t;
    // Slice-local part of the form.
    for (int i = 0; i < n1; ++i)
        add_block(t, aperp, 1.0, i * np, i * np, /*lower_only=*/true);

    // Covariant forward differences across inter-slice edges. Edge e
    // joins positions -L + e*h1 and -L + (e+1)*h1; slices are 1-based
    // within that numbering, ghosts at e=0 and e=n1.
    const int e_first = lgrid.end == EndCondition::Dirichlet ? 0 : 1;
    const int e_last = lgrid.end == EndCondition::Dirichlet ? n1 : n1 - 1;
    for (int e = e_first; e <= e_last; ++e) {
        const double mid = -lgrid.L + h1 * (e + 0.5);
        const double b = profile.rate(mid);
        op.rate_mid.push_back(b);
        const double bh = b / (2.0 * h1);
        const double b2 = 0.25 * b * b;
        const int left = e - 1;   // slice index of the left endpoint, -1 = ghost
        const int right = e;      // slice index of the right endpoint, n1 = ghost
        if (left >= 0) {
            const int o = left * np;
            add_block(t, ident, inv_h1sq, o, o, true);
            add_block(t, Tsym, -bh, o, o, true);
            if (b2 != 0.0) add_block(t, G, b2, o, o, true);
        }
        if (right < n1) {
            const int o = right * np;
            add_block(t, ident, inv_h1sq, o, o, true);
            add_block(t, Tsym, bh, o, o, true);
            if (b2 != 0.0) add_block(t, G, b2, o, o, true);
        }
        if (left >= 0 && right < n1) {
            // Full transposed coupling block H[right, left] (strictly lower).
            const int ro = right * np, co = left * np;
            add_block(t, ident, -inv_h1sq, ro, co, false);
            add_block(t, T, bh, ro, co, false);
            add_block(t, Tt, -bh, ro, co, false);
            if (b2 != 0.0) add_block(t, G, b2, ro, co, false);
        }
    }

    op.matrix = SparseSym::from_triplets(n1 * np, t);
    return op;
}

double rayleigh_quotient(const TubeOperator& op, const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != op.order())
        throw ConfigError("rayleigh_quotient: vector length mismatch");
    double vv = 0.0;
    for (double x : v) vv += x * x;
    if (vv == 0.0) throw ZeroVector("rayleigh_quotient: zero vector");
    std::vector<double> Hv(v.size());
    op.matrix.apply(v.data(), Hv.data());
    double vHv = 0.0;
    for (size_t i = 0; i < v.size(); ++i) vHv += v[i] * Hv[i];
    return vHv / vv;
}

std::vector<double> trial_cylinder_mode(const TransverseGrid& tgrid,
                                        const LongitudinalGrid& lgrid,
                                        const GeometrySummary& geom) {
    if (!geom.contains_origin || !geom.r)
        throw NoInradius("trial_cylinder_mode: origin not inside the cross-section");
    const double r = *geom.r;
    const double j01 = bessel_j0_first_zero();
    const int np = tgrid.count();
    std::vector<double> v(static_cast<size_t>(lgrid.n1) * np, 0.0);
    for (int i = 0; i < lgrid.n1; ++i) {
        const double axial = std::cos(M_PI * lgrid.x1(i) / (2.0 * lgrid.L));
        for (int j = 0; j < np; ++j) {
            const Vec2 tcoord = tgrid.coords[static_cast<size_t>(j)];
            const double rho = std::hypot(tcoord.x, tcoord.y);
            if (rho < r)
                v[static_cast<size_t>(i) * np + j] = bessel_j0(j01 * rho / r) * axial;
        }
    }
    return v;
}

}  // namespace twistspec
