#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twistspec/geometry.hpp"

namespace twistspec {

/// Parsed experiment configuration. The file grammar is line oriented:
/// optional [section] headers, `key = value` pairs, `#` comments.
/// Shapes: ellipse(cx,cy,a,b), rectangle(x0,y0,x1,y1), polygon((x,y),...).
/// Profiles: constant(beta), linear(alpha), power(alpha,p), tabulated(path).
struct ExperimentConfig {
    std::optional<CrossSection> cross_section;
    std::optional<TwistProfile> profile;

    double h = 0.1;
    double h1 = 0.1;
    std::optional<double> L;
    std::vector<double> L_list;
    std::optional<std::vector<double>> beta_list;  // set iff the key appeared
    int n = 1;
    std::vector<int> n_list;
    int k = 1;
    double tol = 1e-8;
    std::uint64_t seed = 0;
    int max_iter = 20000;
    bool richardson = false;

    std::vector<double> stations;
    int slices = 64;
    int boundary_samples = 64;
    std::optional<double> x1_min, x1_max;

    double horizon = 1e4;
    double ray_tol = 1e-6;
    int ray_x1_samples = 17;
    int ray_transverse = 16;

    std::string mode = "auto";  // certify routing: auto | thm1 | thm2
    std::string end = "both";   // spectrum end condition: dirichlet | neumann | both
    bool include_negative_control = false;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& base_dir = ".");

/// Literal parsers, exposed for reuse and tests.
CrossSection parse_cross_section(const std::string& literal);
TwistProfile parse_profile(const std::string& literal, const std::string& base_dir);

}  // namespace twistspec
