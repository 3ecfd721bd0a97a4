#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "twistspec/errors.hpp"

namespace twistspec {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Straight-frame or ambient coordinates (x1 is the tube axis).
struct Vec3 {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
};

/// Bounded planar cross-section with exact membership and
/// boundary-distance queries (no sampling for rectangles/polygons;
/// 1D minimization over the boundary parametrization for ellipses).
class CrossSection {
public:
    enum class Kind { Ellipse, Rectangle, Polygon };

    static CrossSection ellipse(Vec2 center, double a, double b);
    static CrossSection rectangle(Vec2 lo, Vec2 hi);
    /// Vertices counter-clockwise; must form a simple polygon with
    /// positive signed area.
    static CrossSection polygon(std::vector<Vec2> vertices);

    Kind kind() const { return kind_; }

    /// Strict interior membership.
    bool contains(Vec2 t) const;

    /// Distance from t to the boundary curve (valid inside and outside).
    double boundary_distance(Vec2 t) const;

    struct Box {
        Vec2 lo, hi;
    };
    Box bounding_box() const;

    /// n points tracing the boundary once, counter-clockwise.
    /// Ellipses are sampled uniformly in the angle parameter,
    /// rectangles and polygons uniformly in arc length.
    std::vector<Vec2> boundary_polyline(int n) const;

    // Shape parameters (meaningful fields depend on kind).
    Vec2 center() const { return center_; }
    double semi_axis_a() const { return a_; }
    double semi_axis_b() const { return b_; }
    Vec2 rect_lo() const { return lo_; }
    Vec2 rect_hi() const { return hi_; }
    const std::vector<Vec2>& vertices() const { return verts_; }

private:
    CrossSection() = default;

    Kind kind_ = Kind::Ellipse;
    Vec2 center_;
    double a_ = 0.0, b_ = 0.0;  // ellipse semi-axes
    Vec2 lo_, hi_;              // rectangle corners
    std::vector<Vec2> verts_;   // polygon vertices, CCW
};

/// Derived scalar geometry of a cross-section: whether the rotation
/// axis pierces it, its inradius seen from the origin, circumradius,
/// and the distance of its closure from the half-plane boundary t1=0.
struct GeometrySummary {
    bool contains_origin = false;
    std::optional<double> r;  // dist(0, boundary) when the origin is interior
    double R = 0.0;           // sup |t| over the closure
    double m = 0.0;           // inf t1 over the closure
};

GeometrySummary summary(const CrossSection& omega);

/// Twist profile: the pair (angle, rate) along the tube axis.
/// The angle is theta0 + integral of the rate from 0; rates of the
/// named families are integrated in closed form, tabulated rates by
/// adaptive Simpson quadrature (absolute tolerance 1e-10).
class TwistProfile {
public:
    enum class Kind { Constant, LinearRate, PowerRate, TabulatedRate };

    static TwistProfile constant(double beta);
    static TwistProfile linear_rate(double alpha);
    static TwistProfile power_rate(double alpha, double p);
    /// Samples (x, rate) sorted by x; beyond the table the rate
    /// continues linearly with slope +s on the right and -s on the
    /// left, so |rate| diverges at both infinities iff s > 0.
    static TwistProfile tabulated(std::vector<double> xs,
                                  std::vector<double> rates,
                                  double extrapolation_slope);

    Kind kind() const { return kind_; }

    double rate(double x) const;   // d(theta)/dx
    double angle(double x) const;  // theta(x)

    /// True exactly when |rate| -> infinity at both ends of the axis.
    bool diverges() const;

    /// Same rate with a constant added to the angle (frame rotation).
    TwistProfile with_offset(double theta0) const;
    double offset() const { return theta0_; }

    /// sup |rate| over [a, b] (exact for the monotone named families,
    /// knot scan for tabulated rates).
    double max_rate_on(double a, double b) const;

    double param_alpha() const { return alpha_; }
    double param_p() const { return p_; }
    const std::vector<double>& knots() const { return xs_; }
    const std::vector<double>& knot_rates() const { return rates_; }
    double extrapolation_slope() const { return slope_; }

private:
    TwistProfile() = default;

    Kind kind_ = Kind::Constant;
    double theta0_ = 0.0;
    double alpha_ = 0.0;  // Constant: beta; LinearRate/PowerRate: alpha
    double p_ = 1.0;
    std::vector<double> xs_, rates_;
    std::vector<double> cum_;  // integral of rate up to each knot
    double slope_ = 0.0;

    double tabulated_angle(double x) const;
};

/// The tube map: rotates the transverse pair by -theta(x1) about the axis.
Vec3 map_point(const TwistProfile& profile, Vec3 x);

/// Exact inverse test: p lies in the twisted tube iff rotating its
/// transverse pair by +theta(p1) lands in the interior of omega.
bool tube_contains(const CrossSection& omega, const TwistProfile& profile, Vec3 p);

/// Maximal axial interval through (x1, y) staying inside the tube.
/// Endpoints at +-infinity when no exit is found within the horizon.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool bounded() const {
        return lo > -std::numeric_limits<double>::infinity() &&
               hi < std::numeric_limits<double>::infinity();
    }
};

Interval free_segment(const CrossSection& omega, const TwistProfile& profile,
                      Vec2 y, double x1, double tol, double horizon = 1e4);

struct RaySampling {
    int x1_samples = 17;          // stations across the window
    int transverse_per_axis = 16; // transverse lattice density over omega
};

/// Supremum of free-segment lengths over a deterministic sample grid of
/// rays. This is a sampled lower estimate of the true supremum.
double max_free_segment(const CrossSection& omega, const TwistProfile& profile,
                        Interval window, const RaySampling& sampling, double tol,
                        double horizon = 1e4);

/// Per station, the slice maximum over sampled interior points of
/// min(transverse distance to the slice boundary, half free-segment
/// length) -- both distances to actual boundary points of the tube,
/// hence valid upper bounds on dist(x, boundary).
std::vector<double> quasibounded_probe(const CrossSection& omega,
                                       const TwistProfile& profile,
                                       const std::vector<double>& stations,
                                       const RaySampling& sampling, double tol,
                                       double horizon = 1e4);

/// Central finite-difference Jacobian determinant of the tube map
/// (analytically 1 for every profile).
double jacobian_det(const TwistProfile& profile, Vec3 x, double h);

}  // namespace twistspec
