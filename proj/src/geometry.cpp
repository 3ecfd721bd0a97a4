#include "twistspec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace twistspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq(double v) { return v * v; }

double norm2(Vec2 v) { return std::hypot(v.x, v.y); }

/// Counter-clockwise rotation by phi.
Vec2 rot(double phi, Vec2 v) {
    const double c = std::cos(phi), s = std::sin(phi);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) {
        t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
        t = std::clamp(t, 0.0, 1.0);
    }
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

double polygon_signed_area(const std::vector<Vec2>& v) {
    double s = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % v.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

int orientation(Vec2 a, Vec2 b, Vec2 c) {
    const double d = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (d > 0) return 1;
    if (d < 0) return -1;
    return 0;
}

bool segments_properly_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
    return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

/// Golden-section minimization of f on [a, b].
template <class F>
double golden_min(F&& f, double a, double b, double tol) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

/// Scan + local refinement extremum of a smooth periodic function of
/// the ellipse angle parameter.
template <class F>
double periodic_extremum(F&& f, bool maximize, double tol) {
    constexpr int kSamples = 256;
    constexpr double kTwoPi = 6.283185307179586476925;
    double best_t = 0.0, best_v = maximize ? -kInf : kInf;
    for (int i = 0; i < kSamples; ++i) {
        const double t = kTwoPi * i / kSamples;
        const double v = f(t);
        if (maximize ? v > best_v : v < best_v) {
            best_v = v;
            best_t = t;
        }
    }
    const double w = kTwoPi / kSamples;
    auto g = [&](double t) { return maximize ? -f(t) : f(t); };
    const double t = golden_min(g, best_t - w, best_t + w, tol);
    return f(t);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                            double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

// ---------------------------------------------------------------- shapes

CrossSection CrossSection::ellipse(Vec2 center, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw ConfigError("ellipse semi-axes must be positive");
    CrossSection cs;
    cs.kind_ = Kind::Ellipse;
    cs.center_ = center;
    cs.a_ = a;
    cs.b_ = b;
    return cs;
}

CrossSection CrossSection::rectangle(Vec2 lo, Vec2 hi) {
    if (!(hi.x > lo.x) || !(hi.y > lo.y))
        throw ConfigError("rectangle max corner must strictly dominate min corner");
    CrossSection cs;
    cs.kind_ = Kind::Rectangle;
    cs.lo_ = lo;
    cs.hi_ = hi;
    return cs;
}

CrossSection CrossSection::polygon(std::vector<Vec2> vertices) {
    if (vertices.size() < 3) throw ConfigError("polygon needs at least 3 vertices");
    if (!(polygon_signed_area(vertices) > 0.0))
        throw ConfigError("polygon must be counter-clockwise with positive area");
    const size_t n = vertices.size();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;  // shared vertex
            if (segments_properly_intersect(vertices[i], vertices[(i + 1) % n],
                                            vertices[j], vertices[(j + 1) % n]))
                throw ConfigError("polygon must be simple");
        }
    CrossSection cs;
    cs.kind_ = Kind::Polygon;
    cs.verts_ = std::move(vertices);
    return cs;
}

bool CrossSection::contains(Vec2 t) const {
    switch (kind_) {
        case Kind::Ellipse:
            return sq((t.x - center_.x) / a_) + sq((t.y - center_.y) / b_) < 1.0;
        case Kind::Rectangle:
            return t.x > lo_.x && t.x < hi_.x && t.y > lo_.y && t.y < hi_.y;
        case Kind::Polygon: {
            // Even-odd crossing count; boundary points are not interior.
            bool inside = false;
            const size_t n = verts_.size();
            for (size_t i = 0, j = n - 1; i < n; j = i++) {
                const Vec2& a = verts_[i];
                const Vec2& b = verts_[j];
                if ((a.y > t.y) != (b.y > t.y)) {
                    const double xint = a.x + (t.y - a.y) / (b.y - a.y) * (b.x - a.x);
                    if (t.x < xint) inside = !inside;
                }
            }
            return inside && boundary_distance(t) > 0.0;
        }
    }
    return false;
}

double CrossSection::boundary_distance(Vec2 t) const {
    switch (kind_) {
        case Kind::Ellipse: {
            auto f = [&](double u) {
                return std::hypot(center_.x + a_ * std::cos(u) - t.x,
                                  center_.y + b_ * std::sin(u) - t.y);
            };
            return periodic_extremum(f, /*maximize=*/false, 1e-13);
        }
        case Kind::Rectangle: {
            const Vec2 c[4] = {lo_, {hi_.x, lo_.y}, hi_, {lo_.x, hi_.y}};
            double d = kInf;
            for (int i = 0; i < 4; ++i)
                d = std::min(d, point_segment_distance(t, c[i], c[(i + 1) % 4]));
            return d;
        }
        case Kind::Polygon: {
            double d = kInf;
            const size_t n = verts_.size();
            for (size_t i = 0; i < n; ++i)
                d = std::min(d, point_segment_distance(t, verts_[i], verts_[(i + 1) % n]));
            return d;
        }
    }
    return 0.0;
}

CrossSection::Box CrossSection::bounding_box() const {
    switch (kind_) {
        case Kind::Ellipse:
            return {{center_.x - a_, center_.y - b_}, {center_.x + a_, center_.y + b_}};
        case Kind::Rectangle:
            return {lo_, hi_};
        case Kind::Polygon: {
            Vec2 lo = verts_[0], hi = verts_[0];
            for (const Vec2& v : verts_) {
                lo.x = std::min(lo.x, v.x);
                lo.y = std::min(lo.y, v.y);
                hi.x = std::max(hi.x, v.x);
                hi.y = std::max(hi.y, v.y);
            }
            return {lo, hi};
        }
    }
    return {};
}

std::vector<Vec2> CrossSection::boundary_polyline(int n) const {
    if (n < 3) throw ConfigError("boundary_polyline needs at least 3 samples");
    std::vector<Vec2> out;
    out.reserve(static_cast<size_t>(n));
    if (kind_ == Kind::Ellipse) {
        for (int i = 0; i < n; ++i) {
            const double u = 2.0 * M_PI * i / n;
            out.push_back({center_.x + a_ * std::cos(u), center_.y + b_ * std::sin(u)});
        }
        return out;
    }
    std::vector<Vec2> v;
    if (kind_ == Kind::Rectangle)
        v = {lo_, {hi_.x, lo_.y}, hi_, {lo_.x, hi_.y}};
    else
        v = verts_;
    const size_t m = v.size();
    std::vector<double> cum(m + 1, 0.0);
    for (size_t i = 0; i < m; ++i)
        cum[i + 1] = cum[i] + std::hypot(v[(i + 1) % m].x - v[i].x,
                                         v[(i + 1) % m].y - v[i].y);
    const double total = cum[m];
    size_t edge = 0;
    for (int i = 0; i < n; ++i) {
        const double s = total * i / n;
        while (edge + 1 < m && cum[edge + 1] <= s) ++edge;
        const double t = (s - cum[edge]) / (cum[edge + 1] - cum[edge]);
        const Vec2& a = v[edge];
        const Vec2& b = v[(edge + 1) % m];
        out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
    return out;
}

GeometrySummary summary(const CrossSection& omega) {
    GeometrySummary s;
    s.contains_origin = omega.contains({0.0, 0.0});
    if (s.contains_origin) s.r = omega.boundary_distance({0.0, 0.0});
    switch (omega.kind()) {
        case CrossSection::Kind::Ellipse: {
            auto f = [&](double u) {
                return std::hypot(omega.center().x + omega.semi_axis_a() * std::cos(u),
                                  omega.center().y + omega.semi_axis_b() * std::sin(u));
            };
            s.R = periodic_extremum(f, /*maximize=*/true, 1e-13);
            s.m = omega.center().x - omega.semi_axis_a();
            break;
        }
        case CrossSection::Kind::Rectangle: {
            const Vec2 lo = omega.rect_lo(), hi = omega.rect_hi();
            const Vec2 c[4] = {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}};
            s.R = 0.0;
            for (const Vec2& p : c) s.R = std::max(s.R, norm2(p));
            s.m = lo.x;
            break;
        }
        case CrossSection::Kind::Polygon: {
            s.R = 0.0;
            s.m = kInf;
            for (const Vec2& p : omega.vertices()) {
                s.R = std::max(s.R, norm2(p));
                s.m = std::min(s.m, p.x);
            }
            break;
        }
    }
    return s;
}

// --------------------------------------------------------------- profile

TwistProfile TwistProfile::constant(double beta) {
    TwistProfile p;
    p.kind_ = Kind::Constant;
    p.alpha_ = beta;
    return p;
}

TwistProfile TwistProfile::linear_rate(double alpha) {
    TwistProfile p;
    p.kind_ = Kind::LinearRate;
    p.alpha_ = alpha;
    return p;
}

TwistProfile TwistProfile::power_rate(double alpha, double pexp) {
    if (!(alpha > 0.0) || !(pexp > 0.0))
        throw ConfigError("power profile requires alpha > 0 and p > 0");
    TwistProfile p;
    p.kind_ = Kind::PowerRate;
    p.alpha_ = alpha;
    p.p_ = pexp;
    return p;
}

TwistProfile TwistProfile::tabulated(std::vector<double> xs,
                                     std::vector<double> rates,
                                     double extrapolation_slope) {
    if (xs.size() != rates.size() || xs.size() < 2)
        throw ConfigError("tabulated profile needs >= 2 (x, rate) samples");
    if (!std::is_sorted(xs.begin(), xs.end()))
        throw ConfigError("tabulated sample abscissae must be sorted");
    if (!(extrapolation_slope >= 0.0))
        throw ConfigError("extrapolation slope must be >= 0");
    TwistProfile p;
    p.kind_ = Kind::TabulatedRate;
    p.xs_ = std::move(xs);
    p.rates_ = std::move(rates);
    p.slope_ = extrapolation_slope;
    // Cumulative integral of the rate at the knots (adaptive Simpson
    // per knot interval, absolute tolerance 1e-10 scaled per piece).
    const size_t n = p.xs_.size();
    p.cum_.assign(n, 0.0);
    auto rate_fn = [&p](double x) { return p.rate(x); };
    for (size_t i = 0; i + 1 < n; ++i)
        p.cum_[i + 1] = p.cum_[i] + adaptive_simpson(rate_fn, p.xs_[i], p.xs_[i + 1],
                                                     1e-10 / static_cast<double>(n));
    return p;
}

TwistProfile TwistProfile::with_offset(double theta0) const {
    TwistProfile p = *this;
    p.theta0_ = theta0;
    return p;
}

double TwistProfile::rate(double x) const {
    switch (kind_) {
        case Kind::Constant:
            return alpha_;
        case Kind::LinearRate:
            return alpha_ * x;
        case Kind::PowerRate:
            return x == 0.0 ? 0.0
                            : alpha_ * (x > 0 ? 1.0 : -1.0) * std::pow(std::abs(x), p_);
        case Kind::TabulatedRate: {
            if (x <= xs_.front()) return rates_.front() - slope_ * (x - xs_.front());
            if (x >= xs_.back()) return rates_.back() + slope_ * (x - xs_.back());
            const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
            const size_t i = static_cast<size_t>(it - xs_.begin()) - 1;
            const double t = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
            return rates_[i] + t * (rates_[i + 1] - rates_[i]);
        }
    }
    return 0.0;
}

double TwistProfile::tabulated_angle(double x) const {
    // Integral from xs_[0] to x, shifted so that theta(0) = theta0.
    auto rate_fn = [this](double s) { return rate(s); };
    auto integral_from_front = [&](double t) {
        if (t <= xs_.front()) return adaptive_simpson(rate_fn, xs_.front(), t, 1e-10);
        if (t >= xs_.back())
            return cum_.back() + adaptive_simpson(rate_fn, xs_.back(), t, 1e-10);
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
        const size_t i = static_cast<size_t>(it - xs_.begin()) - 1;
        return cum_[i] + adaptive_simpson(rate_fn, xs_[i], t, 1e-10);
    };
    return integral_from_front(x) - integral_from_front(0.0);
}

double TwistProfile::angle(double x) const {
    switch (kind_) {
        case Kind::Constant:
            return theta0_ + alpha_ * x;
        case Kind::LinearRate:
            return theta0_ + 0.5 * alpha_ * x * x;
        case Kind::PowerRate:
            return theta0_ + alpha_ * std::pow(std::abs(x), p_ + 1.0) / (p_ + 1.0);
        case Kind::TabulatedRate:
            return theta0_ + tabulated_angle(x);
    }
    return theta0_;
}

bool TwistProfile::diverges() const {
    switch (kind_) {
        case Kind::Constant:
            return false;
        case Kind::LinearRate:
            return alpha_ != 0.0;
        case Kind::PowerRate:
            return true;
        case Kind::TabulatedRate:
            return slope_ > 0.0;
    }
    return false;
}

double TwistProfile::max_rate_on(double a, double b) const {
    if (a > b) std::swap(a, b);
    double m = std::max(std::abs(rate(a)), std::abs(rate(b)));
    if (a < 0.0 && b > 0.0) m = std::max(m, std::abs(rate(0.0)));
    if (kind_ == Kind::TabulatedRate)
        for (size_t i = 0; i < xs_.size(); ++i)
            if (xs_[i] >= a && xs_[i] <= b)
                m = std::max(m, std::abs(rates_[i]));
    return m;
}

// ------------------------------------------------------------- tube map

Vec3 map_point(const TwistProfile& profile, Vec3 x) {
    const double th = profile.angle(x.x1);
    const double c = std::cos(th), s = std::sin(th);
    return {x.x1, x.x2 * c + x.x3 * s, -x.x2 * s + x.x3 * c};
}

bool tube_contains(const CrossSection& omega, const TwistProfile& profile, Vec3 p) {
    return omega.contains(rot(profile.angle(p.x1), {p.x2, p.x3}));
}

namespace {

/// First membership flip at s > from (scan + bisection), or +-inf.
double locate_exit(const CrossSection& omega, const TwistProfile& profile,
                   Vec2 y, double from, int direction, double tol, double horizon) {
    // A frozen angle keeps the membership of this ray constant forever.
    if (profile.max_rate_on(from, from + direction * horizon) == 0.0)
        return direction > 0 ? kInf : -kInf;
    double s = from;
    // Membership depends on the angle only modulo 2 pi: once the scanned
    // angle range covers a full period with no exit, none exists.
    double th_lo = profile.angle(from), th_hi = th_lo;
    while (std::abs(s - from) <= horizon) {
        if (th_hi - th_lo >= 2.0 * M_PI) return direction > 0 ? kInf : -kInf;
        // Membership flips at least every pi / max|rate|, so this scan
        // step cannot skip an exit.
        const double look = 0.1 * direction;
        const double rate_bound = std::max(profile.max_rate_on(s, s + look), 1e-12);
        const double step = std::min(0.1, M_PI / (10.0 * rate_bound));
        double next = s + direction * step;
        if (!omega.contains(rot(profile.angle(next), y))) {
            double a = s, b = next;  // inside at a, outside at b
            while (std::abs(b - a) > tol) {
                const double mid = 0.5 * (a + b);
                (omega.contains(rot(profile.angle(mid), y)) ? a : b) = mid;
            }
            return 0.5 * (a + b);
        }
        s = next;
        const double th = profile.angle(s);
        th_lo = std::min(th_lo, th);
        th_hi = std::max(th_hi, th);
    }
    return direction > 0 ? kInf : -kInf;
}

}  // namespace

Interval free_segment(const CrossSection& omega, const TwistProfile& profile,
                      Vec2 y, double x1, double tol, double horizon) {
    if (!omega.contains(rot(profile.angle(x1), y)))
        throw NotInside("free_segment: point is not inside the tube");
    Interval iv;
    iv.hi = locate_exit(omega, profile, y, x1, +1, tol, horizon);
    iv.lo = locate_exit(omega, profile, y, x1, -1, tol, horizon);
    return iv;
}

namespace {

std::vector<Vec2> interior_lattice(const CrossSection& omega, int per_axis) {
    const auto box = omega.bounding_box();
    std::vector<Vec2> pts;
    for (int i = 1; i <= per_axis; ++i)
        for (int j = 1; j <= per_axis; ++j) {
            const Vec2 t = {box.lo.x + (box.hi.x - box.lo.x) * i / (per_axis + 1),
                            box.lo.y + (box.hi.y - box.lo.y) * j / (per_axis + 1)};
            if (omega.contains(t)) pts.push_back(t);
        }
    return pts;
}

}  // namespace

double max_free_segment(const CrossSection& omega, const TwistProfile& profile,
                        Interval window, const RaySampling& sampling, double tol,
                        double horizon) {
    if (!(window.hi > window.lo))
        throw ConfigError("max_free_segment: empty window");
    const auto pts = interior_lattice(omega, sampling.transverse_per_axis);
    double sup = 0.0;
    const int ns = std::max(sampling.x1_samples, 1);
    for (int i = 0; i < ns; ++i) {
        const double x1 = ns == 1 ? 0.5 * (window.lo + window.hi)
                                  : window.lo + (window.hi - window.lo) * i / (ns - 1);
        const double th = profile.angle(x1);
        for (const Vec2& t : pts) {
            const Vec2 y = rot(-th, t);  // ambient point on this slice
            const Interval iv = free_segment(omega, profile, y, x1, tol, horizon);
            if (!iv.bounded()) return kInf;
            sup = std::max(sup, iv.length());
        }
    }
    return sup;
}

std::vector<double> quasibounded_probe(const CrossSection& omega,
                                       const TwistProfile& profile,
                                       const std::vector<double>& stations,
                                       const RaySampling& sampling, double tol,
                                       double horizon) {
    const auto pts = interior_lattice(omega, sampling.transverse_per_axis);
    std::vector<double> out;
    out.reserve(stations.size());
    for (const double x1 : stations) {
        const double th = profile.angle(x1);
        double slice_max = 0.0;
        for (const Vec2& t : pts) {
            const double transverse = omega.boundary_distance(t);
            const Interval iv = free_segment(omega, profile, rot(-th, t), x1, tol, horizon);
            const double half = iv.bounded() ? 0.5 * iv.length() : kInf;
            slice_max = std::max(slice_max, std::min(transverse, half));
        }
        out.push_back(slice_max);
    }
    return out;
}

double jacobian_det(const TwistProfile& profile, Vec3 x, double h) {
    if (!(h > 0.0)) throw ConfigError("jacobian_det: step must be positive");
    double J[3][3];
    for (int j = 0; j < 3; ++j) {
        Vec3 xp = x, xm = x;
        (j == 0 ? xp.x1 : j == 1 ? xp.x2 : xp.x3) += h;
        (j == 0 ? xm.x1 : j == 1 ? xm.x2 : xm.x3) -= h;
        const Vec3 fp = map_point(profile, xp), fm = map_point(profile, xm);
        J[0][j] = (fp.x1 - fm.x1) / (2.0 * h);
        J[1][j] = (fp.x2 - fm.x2) / (2.0 * h);
        J[2][j] = (fp.x3 - fm.x3) / (2.0 * h);
    }
    return J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
           J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
           J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
}

}  // namespace twistspec
